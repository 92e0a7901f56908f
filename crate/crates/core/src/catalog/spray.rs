use std::sync::Arc;

use crate::alphabeta::RiemannSetup;
use crate::error::Result;
use crate::geometry::SprayField;
use crate::jet::{Caps, TaylorValue};

/// A spray of the form `G¹` quadratic in `y`, `G^μ = P·y^μ`.
pub trait SpecialFormSpray: SprayField {
    /// Jet of the projective factor `P` at `(x, y)`.
    fn p_jet(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<TaylorValue>;
}

/// Closed-form catalog spray
/// `G¹ = ((2f²(y¹)² − α²)/(2f²) + κ₁(α² − β²)/f²)·f'/f`,
/// `P = (y¹ + κ₂√(α² − β²)/f)·f'/f`.
///
/// Every catalog family has `Q = p√(1−s²) + qs`, which gives
/// `κ₁ = q/(2(1+q))` and `κ₂ = p/(2(1+q))`.
#[derive(Clone, Debug)]
pub struct ClosedFormSpray {
    setup: Arc<RiemannSetup>,
    kappa1: f64,
    kappa2: f64,
    label: String,
}

impl ClosedFormSpray {
    pub fn new(setup: Arc<RiemannSetup>, kappa1: f64, kappa2: f64, label: impl Into<String>) -> Self {
        ClosedFormSpray { setup, kappa1, kappa2, label: label.into() }
    }

    /// From the coefficients of `Q = p√(1−s²) + qs`.
    pub fn from_q(setup: Arc<RiemannSetup>, p: f64, q: f64, label: impl Into<String>) -> Self {
        let d = 2.0 * (1.0 + q);
        Self::new(setup, q / d, p / d, label)
    }

    pub fn kappas(&self) -> (f64, f64) {
        (self.kappa1, self.kappa2)
    }

    pub fn setup(&self) -> &Arc<RiemannSetup> {
        &self.setup
    }

    fn parts(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<(TaylorValue, TaylorValue, Vec<TaylorValue>)> {
        let fr = self.setup.frame(x, y, caps)?;
        let w = fr.df.checked_div(&fr.f)?;
        let f2 = fr.f.square();
        let quad = &(&(&f2 * &fr.y[0].square()) * 2.0) - &fr.alpha_sq;
        let gap = &fr.alpha_sq - &fr.beta.square();
        let g1 = &(&quad.checked_div(&(&f2 * 2.0))? + &(&gap.checked_div(&f2)? * self.kappa1)) * &w;
        let p = &(&fr.y[0] + &(&fr.root.checked_div(&fr.f)? * self.kappa2)) * &w;
        Ok((g1, p, fr.y))
    }

    /// `G¹` alone.
    pub fn g1_jet(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<TaylorValue> {
        Ok(self.parts(x, y, caps)?.0)
    }
}

impl SprayField for ClosedFormSpray {
    fn dim(&self) -> usize {
        self.setup.dim()
    }

    fn eval(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<Vec<TaylorValue>> {
        let (g1, p, ys) = self.parts(x, y, caps)?;
        let mut out = Vec::with_capacity(ys.len());
        out.push(g1);
        out.extend(ys[1..].iter().map(|ym| &p * ym));
        Ok(out)
    }

    fn admissible(&self, x: &[f64], y: &[f64]) -> bool {
        self.setup.phi_hat_value(y) > 0.0 && self.setup.f_values(x[0]).is_ok()
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

impl SpecialFormSpray for ClosedFormSpray {
    fn p_jet(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<TaylorValue> {
        Ok(self.parts(x, y, caps)?.1)
    }
}

/// `P + ε(y²)²/‖y‖` on top of a special-form spray, with `G^μ` rebuilt from
/// the perturbed `P`. A negative control: its Landsberg tensor no longer vanishes.
pub struct PerturbedSpray<S> {
    pub base: S,
    pub epsilon: f64,
}

impl<S: SpecialFormSpray> PerturbedSpray<S> {
    fn bump(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<TaylorValue> {
        let (_, ys) = crate::jet::seed_point(x, y, caps);
        let mut norm2 = ys[0].constant_like(0.0);
        for v in &ys {
            norm2 += &v.square();
        }
        Ok(&ys[1].square().checked_div(&norm2.sqrt()?)? * self.epsilon)
    }
}

impl<S: SpecialFormSpray> SprayField for PerturbedSpray<S> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn eval(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<Vec<TaylorValue>> {
        let mut g = self.base.eval(x, y, caps)?;
        let p = self.p_jet(x, y, caps)?;
        let (_, ys) = crate::jet::seed_point(x, y, caps);
        for (gm, ym) in g.iter_mut().zip(&ys).skip(1) {
            *gm = &p * ym;
        }
        Ok(g)
    }

    fn admissible(&self, x: &[f64], y: &[f64]) -> bool {
        self.base.admissible(x, y)
    }

    fn label(&self) -> String {
        format!("{} with P perturbed by {:e}", self.base.label(), self.epsilon)
    }
}

impl<S: SpecialFormSpray> SpecialFormSpray for PerturbedSpray<S> {
    fn p_jet(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<TaylorValue> {
        Ok(&self.base.p_jet(x, y, caps)? + &self.bump(x, y, caps)?)
    }
}
