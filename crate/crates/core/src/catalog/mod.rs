//! The non-Berwaldian Landsberg metrics as executable entries.
//!
//! Each entry is an (α,β)-metric `F = αφ(β/α)` on the conformally flat
//! background of [`crate::alphabeta`], or a verbatim coordinate formula. Every
//! family has `Q = p√(1−s²) + qs`, so the closed-form spray is always
//! `G¹ = (((y¹)² − φ̂)/2 + κ₁φ̂)·f'/f`, `G^μ = P·y^μ` with
//! `P = (y¹ + κ₂√φ̂)·f'/f`.

mod phi;
mod spray;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::alphabeta::{AlphaBetaSpray, PhiFunction, QuadraticForm, RiemannSetup, ScalarFunction};
use crate::error::{Error, Result};
use crate::geometry::FinslerField;
use crate::jet::{Caps, Group, TaylorValue};
use crate::verify::Verdict;

pub use phi::{atan_ratio, atanh_ratio, ClassPhi};
pub use spray::{ClosedFormSpray, PerturbedSpray, SpecialFormSpray};

/// Normalized distance the admissibility guards keep from every singular set.
pub const GUARD_MARGIN: f64 = 0.02;

/// Largest `|s|` the guards admit.
pub const S_LIMIT: f64 = 0.995;

const FRAC_1_SQRT_3: f64 = 0.577_350_269_189_625_8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassId {
    Class1,
    Class2,
    Class3,
    Class4,
    ShenEq8,
    AsanovEq9,
    Example31,
    Example32,
    Example33,
    ShenR3Eq1,
}

impl ClassId {
    pub const ALL: [ClassId; 10] = [
        ClassId::Class1,
        ClassId::Class2,
        ClassId::Class3,
        ClassId::Class4,
        ClassId::ShenEq8,
        ClassId::AsanovEq9,
        ClassId::Example31,
        ClassId::Example32,
        ClassId::Example33,
        ClassId::ShenR3Eq1,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            ClassId::Class1 => "class1",
            ClassId::Class2 => "class2",
            ClassId::Class3 => "class3",
            ClassId::Class4 => "class4",
            ClassId::ShenEq8 => "shen_eq8",
            ClassId::AsanovEq9 => "asanov_eq9",
            ClassId::Example31 => "example31",
            ClassId::Example32 => "example32",
            ClassId::Example33 => "example33",
            ClassId::ShenR3Eq1 => "shen_r3_eq1",
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            ClassId::Class1 | ClassId::Class2 | ClassId::Class3 => &["a"],
            ClassId::Class4 => &["p", "q"],
            ClassId::ShenEq8 => &["c1", "c3", "c4"],
            ClassId::AsanovEq9 => &["g"],
            _ => &[],
        }
    }

    /// Parameter constraints as shown by the catalog listing.
    pub fn constraints(&self) -> &'static str {
        match self {
            ClassId::Class1 | ClassId::Class3 => "a≠0",
            ClassId::Class2 => "a≠0,±1",
            ClassId::Class4 => "p≠0, q",
            ClassId::ShenEq8 => "c1≠0, 1+c3>0, c4>0",
            ClassId::AsanovEq9 => "0<|g|<2",
            _ => "-",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            ClassId::Class1 => "first class, (aβ+√(α²−β²))·exp(aβ/(aβ+√(α²−β²)))",
            ClassId::Class2 => "second class, power product",
            ClassId::Class3 => "third class, aβ+(α²−β²)/(aβ+2√(α²−β²))",
            ClassId::Class4 => "fourth class, arctanh/arctan form",
            ClassId::ShenEq8 => "Shen family, arctan ψ form",
            ClassId::AsanovEq9 => "Asanov family",
            ClassId::Example31 => "ℝ³ example, φ̂ = y²y³",
            ClassId::Example32 => "ℝ³ example, φ̂ = (y²)²+(y³)²",
            ClassId::Example33 => "ℝ⁴ example, φ̂ = y²y³+(y⁴)²",
            ClassId::ShenR3Eq1 => "ℝ³ metric with α² = (y¹)²+e^{2x¹}((y²)²+(y³)²)",
        }
    }

    /// Quadratic form and dimension an entry is tied to, if any.
    pub fn fixed_form(&self) -> Option<(QuadraticForm, usize)> {
        match self {
            ClassId::Example31 => Some((QuadraticForm::Product, 3)),
            ClassId::Example32 => Some((QuadraticForm::Euclid, 3)),
            ClassId::Example33 => Some((QuadraticForm::Mixed4, 4)),
            ClassId::ShenR3Eq1 => Some((QuadraticForm::Euclid, 3)),
            _ => None,
        }
    }

    pub fn expected_verdict(&self) -> Verdict {
        Verdict::LandsbergNonBerwald
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ClassId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassId::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::UnknownMetric(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClassParams {
    A(f64),
    PQ { p: f64, q: f64 },
    Shen { c1: f64, c3: f64, c4: f64 },
    Asanov { g: f64 },
    None,
}

impl ClassParams {
    /// Builds the parameters of `class` from `name = value` pairs. `c4`
    /// defaults to 1; every other parameter is required.
    pub fn from_pairs(class: ClassId, pairs: &[(String, f64)]) -> Result<Self> {
        let names = class.param_names();
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            if !names.contains(&k.as_str()) {
                return Err(Error::InvalidParameter(format!("{class} takes no parameter `{k}`")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{k} = {v} is not finite")));
            }
            if map.insert(k.as_str(), *v).is_some() {
                return Err(Error::InvalidParameter(format!("parameter `{k}` given twice")));
            }
        }
        let get = |k: &str| {
            map.get(k)
                .copied()
                .ok_or_else(|| Error::InvalidParameter(format!("{class} requires parameter `{k}`")))
        };
        Ok(match class {
            ClassId::Class1 | ClassId::Class2 | ClassId::Class3 => ClassParams::A(get("a")?),
            ClassId::Class4 => ClassParams::PQ { p: get("p")?, q: get("q")? },
            ClassId::ShenEq8 => ClassParams::Shen {
                c1: get("c1")?,
                c3: get("c3")?,
                c4: map.get("c4").copied().unwrap_or(1.0),
            },
            ClassId::AsanovEq9 => ClassParams::Asanov { g: get("g")? },
            _ => ClassParams::None,
        })
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        let pairs: Vec<(&str, f64)> = match *self {
            ClassParams::A(a) => vec![("a", a)],
            ClassParams::PQ { p, q } => vec![("p", p), ("q", q)],
            ClassParams::Shen { c1, c3, c4 } => vec![("c1", c1), ("c3", c3), ("c4", c4)],
            ClassParams::Asanov { g } => vec![("g", g)],
            ClassParams::None => vec![],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    fn matches(&self, class: ClassId) -> bool {
        matches!(
            (class, self),
            (ClassId::Class1 | ClassId::Class2 | ClassId::Class3, ClassParams::A(_))
                | (ClassId::Class4, ClassParams::PQ { .. })
                | (ClassId::ShenEq8, ClassParams::Shen { .. })
                | (ClassId::AsanovEq9, ClassParams::Asanov { .. })
                | (ClassId::Example31 | ClassId::Example32 | ClassId::Example33 | ClassId::ShenR3Eq1, ClassParams::None)
        )
    }
}

impl fmt::Display for ClassParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.to_map();
        if m.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// A catalog entry with its background data.
#[derive(Clone, Debug)]
pub struct MetricClassSpec {
    pub class: ClassId,
    pub params: ClassParams,
    pub f: Arc<dyn ScalarFunction>,
    pub form: QuadraticForm,
    pub n: usize,
}

impl MetricClassSpec {
    /// Entries tied to a form reject any other one.
    pub fn new(
        class: ClassId,
        params: ClassParams,
        f: Arc<dyn ScalarFunction>,
        form: QuadraticForm,
        n: usize,
    ) -> Result<Self> {
        if !params.matches(class) {
            return Err(Error::InvalidParameter(format!("parameters {params} do not fit {class}")));
        }
        if let Some((fixed, dim)) = class.fixed_form() {
            if class != ClassId::ShenR3Eq1 && fixed != form {
                return Err(Error::InvalidParameter(format!("{class} is defined only for φ̂ = {fixed}")));
            }
            if dim != n {
                return Err(Error::DimensionMismatch { expected: dim, found: n });
            }
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension {n} is below 2")));
        }
        Ok(MetricClassSpec { class, params, f, form, n })
    }

    /// The entry on its own form, or on the product form in ℝ³.
    pub fn with_defaults(class: ClassId, params: ClassParams, f: Arc<dyn ScalarFunction>) -> Result<Self> {
        let (form, n) = class.fixed_form().unwrap_or((QuadraticForm::Product, 3));
        Self::new(class, params, f, form, n)
    }

    pub fn setup(&self) -> Result<Arc<RiemannSetup>> {
        Ok(Arc::new(RiemannSetup::new(Arc::clone(&self.f), self.form.clone(), self.n)?))
    }

    pub fn label(&self) -> String {
        match self.params {
            ClassParams::None => self.class.to_string(),
            p => format!("{}({p})", self.class),
        }
    }

    pub fn expected_verdict(&self) -> Verdict {
        self.class.expected_verdict()
    }

    /// Checks the parameter rules; singular parameters are reported separately
    /// so that [`build_finsler_unchecked`] can still evaluate them.
    fn check(&self, allow_singular: bool) -> Result<()> {
        let singular = |msg: String| {
            if allow_singular {
                Ok(())
            } else {
                Err(Error::SingularParameters(msg))
            }
        };
        match (self.class, self.params) {
            (ClassId::Class1 | ClassId::Class3, ClassParams::A(a)) if a == 0.0 => {
                singular("det(g)=0 at a=0".into())
            }
            (ClassId::Class2, ClassParams::A(a)) if a == 0.0 => {
                Err(Error::InvalidParameter("class2 requires a ≠ 0".into()))
            }
            (ClassId::Class2, ClassParams::A(a)) if (a.abs() - 1.0).abs() < 1e-12 => {
                singular("det(g)=0 at a=±1".into())
            }
            (ClassId::Class4, ClassParams::PQ { p, .. }) if p == 0.0 => {
                Err(Error::InvalidParameter("class4 requires p ≠ 0".into()))
            }
            (ClassId::Class4, ClassParams::PQ { q, .. }) if (1.0 + q).abs() < 1e-12 => {
                singular("det(g)=0 at q=-1".into())
            }
            (ClassId::ShenEq8, ClassParams::Shen { c1, c3, c4 }) => {
                if c1 == 0.0 {
                    Err(Error::InvalidParameter("shen_eq8 requires c1 ≠ 0".into()))
                } else if !(1.0 + c3 > 0.0) {
                    Err(Error::InvalidParameter(format!("shen_eq8 requires 1 + c3 > 0, got c3 = {c3}")))
                } else if !(c4 > 0.0) {
                    Err(Error::InvalidParameter(format!("shen_eq8 requires c4 > 0, got c4 = {c4}")))
                } else {
                    Ok(())
                }
            }
            (ClassId::AsanovEq9, ClassParams::Asanov { g }) if !(g != 0.0 && g.abs() < 2.0) => {
                Err(Error::InvalidParameter(format!("asanov_eq9 requires 0 < |g| < 2, got g = {g}")))
            }
            _ => Ok(()),
        }
    }

    /// `φ` and the constant factor in front of `αφ(s)`.
    pub fn phi(&self) -> Result<Option<(ClassPhi, f64)>> {
        let near_zero = |d: f64, p: f64| d.abs() < 1e-12 * p.abs().powi(2).max(1.0);
        Ok(Some(match self.params {
            ClassParams::A(a) => match self.class {
                ClassId::Class1 => (ClassPhi::Class1 { a }, 1.0),
                ClassId::Class2 => (ClassPhi::Class2 { a }, 1.0),
                _ => (ClassPhi::Class3 { a }, 1.0),
            },
            ClassParams::PQ { p, q } => {
                if near_zero(ClassPhi::discriminant(p, q), p) {
                    (ClassPhi::Class1 { a: p / 2.0 }, 1.0)
                } else {
                    (ClassPhi::Class4 { p, q }, 1.0)
                }
            }
            ClassParams::Shen { c1, c3, c4 } => {
                // (2+c₃)² − (c₁² + c₃²) = −(c₁² − 4c₃ − 4): outside the arctan
                // regime the family is the fourth class with p = c₁, q = c₃.
                let d = ClassPhi::discriminant(c1, c3);
                if near_zero(d, c1) {
                    (ClassPhi::Class1 { a: c1 / 2.0 }, c4)
                } else if d > 0.0 {
                    (ClassPhi::Class4 { p: c1, q: c3 }, c4)
                } else {
                    (ClassPhi::Shen { c1, c3, c4, alternate: false }, 1.0)
                }
            }
            ClassParams::Asanov { g } => (ClassPhi::Asanov { g }, 1.0),
            ClassParams::None => match self.class {
                ClassId::ShenR3Eq1 => return Ok(None),
                _ => (ClassPhi::Asanov { g: 1.0 }, 1.0),
            },
        }))
    }

    /// `(p, q)` with `Q = p√(1−s²) + qs`.
    pub fn q_coefficients(&self) -> Result<(f64, f64)> {
        let (phi, _) = self
            .phi()?
            .ok_or_else(|| Error::NoClosedForm(self.class.to_string()))?;
        Ok(phi.q_coefficients())
    }

    /// The printed closed-form spray.
    pub fn closed_form_spray(&self) -> Result<ClosedFormSpray> {
        self.check(false)?;
        if self.class == ClassId::ShenR3Eq1 {
            return Err(Error::NoClosedForm(self.class.to_string()));
        }
        let (p, q) = self.q_coefficients()?;
        Ok(ClosedFormSpray::from_q(self.setup()?, p, q, format!("closed-form spray of {}", self.label())))
    }

    /// The general (α,β) spray evaluated for this entry's `φ`.
    pub fn ab_spray(&self) -> Result<AlphaBetaSpray> {
        self.check(false)?;
        let (phi, _) = self
            .phi()?
            .ok_or_else(|| Error::NoClosedForm(self.class.to_string()))?;
        Ok(AlphaBetaSpray { setup: self.setup()?, phi: Arc::new(phi) })
    }
}

enum Kind {
    AlphaPhi { phi: ClassPhi, scale: f64 },
    /// `f·√((y¹)² + φ̂ + y¹√φ̂)·exp((1/√3)·arctan(2y¹/√(3φ̂) + 1/√3))`
    Printed,
    /// The printed formula with `f = 1` and `φ̂ = e^{2x¹}((y²)² + (y³)²)`.
    ShenR3,
}

/// A catalog entry as a [`FinslerField`].
pub struct CatalogMetric {
    spec: MetricClassSpec,
    setup: Arc<RiemannSetup>,
    kind: Kind,
    unchecked: bool,
}

/// Builds the Finsler function of `spec`, rejecting singular parameters.
pub fn build_finsler(spec: &MetricClassSpec) -> Result<CatalogMetric> {
    spec.check(false)?;
    build(spec, false)
}

/// Like [`build_finsler`] but lets singular parameters through and drops the
/// guard on `det g`, so that the degeneracy of `g` can be observed.
pub fn build_finsler_unchecked(spec: &MetricClassSpec) -> Result<CatalogMetric> {
    spec.check(true)?;
    build(spec, true)
}

fn build(spec: &MetricClassSpec, unchecked: bool) -> Result<CatalogMetric> {
    let setup = spec.setup()?;
    let kind = match spec.class {
        ClassId::Example31 | ClassId::Example32 | ClassId::Example33 => Kind::Printed,
        ClassId::ShenR3Eq1 => Kind::ShenR3,
        _ => {
            let (phi, scale) = spec.phi()?.expect("family entries have a φ");
            Kind::AlphaPhi { phi, scale }
        }
    };
    Ok(CatalogMetric { spec: spec.clone(), setup, kind, unchecked })
}

fn printed_form(y1: &TaylorValue, phi_hat: &TaylorValue) -> Result<TaylorValue> {
    let root = phi_hat.sqrt()?;
    let amp = (&(&y1.square() + phi_hat) + &(y1 * &root)).sqrt()?;
    let arg = &(y1.checked_div(&(&root * 3f64.sqrt()))? * 2.0) + FRAC_1_SQRT_3;
    Ok(&amp * &(arg.atan()? * FRAC_1_SQRT_3).exp()?)
}

/// `det g = φ^{n+1}(φ − sφ')^{n−2}(φ − sφ' + (1 − s²)φ'')·det a`, so the
/// smallest of `φ`, `|φ − sφ'|` and `|φ − sφ' + (1 − s²)φ''|` relative to `φ(0)`
/// measures how far `s` is from a degenerate or vanishing `F`.
pub fn determinant_margin(phi: &dyn PhiFunction, s: f64) -> Option<f64> {
    let phi0 = phi.value(0.0).ok()?.abs();
    let t = TaylorValue::seed(Group::X, 0, s, 1, 0, Caps::new(2, 0)).ok()?;
    let v = phi.eval(&t).ok()?;
    let (p, dp, ddp) = (v.value(), v.partial(&[0], &[]).ok()?, v.partial(&[0, 0], &[]).ok()?);
    let d1 = p - s * dp;
    let d2 = d1 + (1.0 - s * s) * ddp;
    if !(p > 0.0) || !(phi0 > 0.0) || ![p, d1, d2].iter().all(|v| v.is_finite()) {
        return None;
    }
    Some(p.min(d1.abs()).min(d2.abs()) / phi0)
}

impl CatalogMetric {
    pub fn spec(&self) -> &MetricClassSpec {
        &self.spec
    }

    pub fn setup(&self) -> &Arc<RiemannSetup> {
        &self.setup
    }

    /// `φ` when the field is evaluated as `αφ(s)`.
    pub fn phi(&self) -> Option<ClassPhi> {
        match self.kind {
            Kind::AlphaPhi { phi, .. } => Some(phi),
            _ => None,
        }
    }

    fn r3_gap(x1: f64, y: &[f64]) -> f64 {
        (2.0 * x1).exp() * (y[1] * y[1] + y[2] * y[2])
    }

    /// `(φ̂, s)` in the direction of `y`, normalized so that `|y| = 1`.
    fn normalized(&self, x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return None;
        }
        let u: Vec<f64> = y.iter().map(|v| v / norm).collect();
        let ph = match self.kind {
            Kind::ShenR3 => Self::r3_gap(x[0], &u),
            _ => self.setup.phi_hat_value(&u),
        };
        let a2 = u[0] * u[0] + ph;
        if !(a2 > 0.0) {
            return None;
        }
        Some((ph, u[0] / a2.sqrt()))
    }
}

impl FinslerField for CatalogMetric {
    fn dim(&self) -> usize {
        self.spec.n
    }

    fn eval(&self, x: &[TaylorValue], y: &[TaylorValue]) -> Result<TaylorValue> {
        match &self.kind {
            Kind::AlphaPhi { phi, scale } => {
                let f = self.setup.conformal_factor().eval(&x[0])?;
                let alpha = (&f.square() * &(&y[0].square() + &self.setup.phi_hat(y))).sqrt()?;
                let s = (&f * &y[0]).checked_div(&alpha)?;
                Ok(&(&alpha * &phi.eval(&s)?) * *scale)
            }
            Kind::Printed => {
                let f = self.setup.conformal_factor().eval(&x[0])?;
                Ok(&f * &printed_form(&y[0], &self.setup.phi_hat(y))?)
            }
            Kind::ShenR3 => {
                let e = (&x[0] * 2.0).exp()?;
                let gap = &e * &(&y[1].square() + &y[2].square());
                printed_form(&y[0], &gap)
            }
        }
    }

    fn admissible(&self, x: &[f64], y: &[f64]) -> bool {
        if x.len() != self.spec.n || y.len() != self.spec.n || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        if !matches!(self.kind, Kind::ShenR3) && self.setup.f_values(x[0]).is_err() {
            return false;
        }
        let Some((ph, s)) = self.normalized(x, y) else {
            return false;
        };
        if ph < GUARD_MARGIN || s.abs() > S_LIMIT {
            return false;
        }
        let phi = match self.kind {
            Kind::AlphaPhi { phi, .. } => phi,
            _ => ClassPhi::Asanov { g: 1.0 },
        };
        if self.unchecked {
            return phi.value(s).is_ok_and(|v| v > GUARD_MARGIN);
        }
        phi.margin(s) >= GUARD_MARGIN && determinant_margin(&phi, s).is_some_and(|m| m >= GUARD_MARGIN)
    }

    fn label(&self) -> String {
        match self.kind {
            Kind::ShenR3 => self.spec.label(),
            _ => format!("{} ({})", self.spec.label(), self.setup.label()),
        }
    }

    fn berwald_weight(&self, x: &[f64]) -> f64 {
        match self.kind {
            Kind::ShenR3 => 1.0,
            _ => self.setup.f_values(x[0]).map(|(f, df)| (df / f).abs()).unwrap_or(1.0),
        }
    }
}

/// The printed value of `G²₂₂₂` (0-based `[1, 1, 1, 1]`) at `(x, y)`.
///
/// Every printed value has the shape `κ₂·S(ŷ)·f'/f` where `S` depends only
/// on the quadratic form.
pub fn expected_berwald_component(spec: &MetricClassSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    let none = || Error::NoPrintedComponent(format!("{} on φ̂ = {}", spec.label(), spec.form));
    let kappa2 = match (spec.class, spec.params) {
        (ClassId::Example31 | ClassId::Example32 | ClassId::Example33, _) => 0.5,
        (ClassId::Class1, ClassParams::A(a)) => 1.0 / a,
        (ClassId::Class2, ClassParams::A(a)) => a / (a * a - 1.0),
        (ClassId::Class3, ClassParams::A(a)) => 1.5 / a,
        _ => return Err(none()),
    };
    if y.len() != spec.n || x.len() != spec.n {
        return Err(Error::DimensionMismatch { expected: spec.n, found: y.len() });
    }
    let (u, v) = (y[1], y[2]);
    let shape = match (&spec.form, spec.n) {
        (QuadraticForm::Product, 3) => -3.0 / 8.0 * v / (u * (u * v).sqrt()),
        (QuadraticForm::Euclid, 3) => 3.0 * v.powi(4) / (u * u + v * v).powf(2.5),
        (QuadraticForm::Mixed4, 4) if spec.class == ClassId::Example33 => {
            let t = y[3];
            -3.0 / 8.0 * v * v * (u * v + 2.0 * t * t) / (u * v + t * t).powf(2.5)
        }
        _ => return Err(none()),
    };
    let (f, df) = spec.setup()?.f_values(x[0])?;
    Ok(kappa2 * shape * df / f)
}

/// Predicted relation between the energies of two entries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Relation {
    /// Same Finsler function.
    Identical,
    /// `E_left/E_right` is a constant; `stated` is the factor as printed.
    ProportionalEnergies { stated: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalencePair {
    pub left: (ClassId, ClassParams),
    pub right: (ClassId, ClassParams),
    pub relation: Relation,
}

/// Pairs of parameter maps between the classes, for one value of `a`.
pub fn equivalence_pairs_for(a: f64) -> Vec<EquivalencePair> {
    let c4 = |p: f64, q: f64| (ClassId::Class4, ClassParams::PQ { p, q });
    vec![
        EquivalencePair {
            left: c4(2.0 * a, a * a - 1.0),
            right: (ClassId::Class1, ClassParams::A(a)),
            relation: Relation::Identical,
        },
        EquivalencePair {
            left: c4(2.0 * a, a * a - 2.0),
            right: (ClassId::Class2, ClassParams::A(a)),
            relation: Relation::ProportionalEnergies { stated: 1.0 },
        },
        EquivalencePair {
            left: c4(1.5 * a, (a * a - 2.0) / 2.0),
            right: (ClassId::Class3, ClassParams::A(a)),
            relation: Relation::ProportionalEnergies { stated: -4.0 },
        },
        EquivalencePair {
            left: (ClassId::ShenEq8, ClassParams::Shen { c1: 2.0 * a, c3: a * a - 1.0, c4: 1.0 }),
            right: (ClassId::Class1, ClassParams::A(a)),
            relation: Relation::Identical,
        },
    ]
}

/// [`equivalence_pairs_for`] over a few representative `a`.
pub fn class_equivalence_pairs() -> Vec<EquivalencePair> {
    [-3.0, 0.5, 2.0, 3.0].into_iter().flat_map(equivalence_pairs_for).collect()
}

/// One row of the catalog listing.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub id: ClassId,
    pub constraints: &'static str,
    pub description: &'static str,
    pub expected: Verdict,
}

pub fn catalog_entries() -> Vec<CatalogEntry> {
    ClassId::ALL
        .into_iter()
        .map(|id| CatalogEntry {
            id,
            constraints: id.constraints(),
            description: id.description(),
            expected: id.expected_verdict(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::geometry::{field_jet, ChartPoint, Direction};
    use crate::jet::Caps;
    use approx::assert_relative_eq;

    fn exp_f() -> Arc<dyn ScalarFunction> {
        Arc::new(parse_expr("exp(x1)").unwrap())
    }

    fn value(m: &CatalogMetric, x: &[f64], y: &[f64]) -> f64 {
        field_jet(m, &ChartPoint::new(x.to_vec()).unwrap(), &Direction::new(y.to_vec()).unwrap(), Caps::new(0, 0))
            .unwrap()
            .value()
    }

    #[test]
    fn class1_hand_value() {
        let spec = MetricClassSpec::with_defaults(ClassId::Class1, ClassParams::A(1.0), exp_f()).unwrap();
        let m = build_finsler(&spec).unwrap();
        assert_relative_eq!(value(&m, &[0.0; 3], &[1.0; 3]), 2.0 * 0.5f64.exp(), max_relative = 1e-14);
    }

    #[test]
    fn example31_hand_value() {
        let spec = MetricClassSpec::with_defaults(ClassId::Example31, ClassParams::None, exp_f()).unwrap();
        let m = build_finsler(&spec).unwrap();
        let expected = 3f64.sqrt() * (std::f64::consts::PI / (3.0 * 3f64.sqrt())).exp();
        assert_relative_eq!(value(&m, &[0.0; 3], &[1.0; 3]), expected, max_relative = 1e-14);
    }

    #[test]
    fn printed_examples_equal_asanov_g1() {
        for class in [ClassId::Example31, ClassId::Example32, ClassId::Example33] {
            let spec = MetricClassSpec::with_defaults(class, ClassParams::None, exp_f()).unwrap();
            let printed = build_finsler(&spec).unwrap();
            let asanov = MetricClassSpec { class: ClassId::AsanovEq9, params: ClassParams::Asanov { g: 1.0 }, ..spec.clone() };
            let ab = build_finsler(&asanov).unwrap();
            let n = spec.n;
            let mut y = vec![0.4; n];
            y[0] = -0.3;
            let x = vec![0.25; n];
            assert_relative_eq!(value(&printed, &x, &y), value(&ab, &x, &y), max_relative = 1e-13);
        }
    }

    #[test]
    fn class4_on_the_parabola_is_class1() {
        let a = 1.5;
        let c4 = MetricClassSpec::with_defaults(ClassId::Class4, ClassParams::PQ { p: 2.0 * a, q: a * a - 1.0 }, exp_f()).unwrap();
        assert_eq!(c4.phi().unwrap().unwrap().0, ClassPhi::Class1 { a });
    }

    #[test]
    fn parameter_rules() {
        let mk = |class, params| MetricClassSpec::with_defaults(class, params, exp_f()).unwrap();
        let singular = build_finsler(&mk(ClassId::Class2, ClassParams::A(1.0)));
        assert!(matches!(singular, Err(Error::SingularParameters(ref m)) if m.contains("det(g)=0 at a=±1")));
        assert!(build_finsler_unchecked(&mk(ClassId::Class2, ClassParams::A(-1.0))).is_ok());
        assert!(matches!(build_finsler(&mk(ClassId::Class3, ClassParams::A(0.0))), Err(Error::SingularParameters(_))));
        assert!(matches!(
            build_finsler(&mk(ClassId::Class4, ClassParams::PQ { p: 0.0, q: 1.0 })),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            build_finsler(&mk(ClassId::ShenEq8, ClassParams::Shen { c1: 1.0, c3: -1.5, c4: 1.0 })),
            Err(Error::InvalidParameter(_))
        ));
        assert!(MetricClassSpec::new(ClassId::Example31, ClassParams::None, exp_f(), QuadraticForm::Euclid, 3).is_err());
        assert!(MetricClassSpec::with_defaults(ClassId::Class1, ClassParams::None, exp_f()).is_err());
    }

    #[test]
    fn params_from_pairs() {
        let p = ClassParams::from_pairs(ClassId::ShenEq8, &[("c1".into(), 1.0), ("c3".into(), 0.5)]).unwrap();
        assert_eq!(p, ClassParams::Shen { c1: 1.0, c3: 0.5, c4: 1.0 });
        assert!(ClassParams::from_pairs(ClassId::Class1, &[]).is_err());
        assert!(ClassParams::from_pairs(ClassId::Class1, &[("b".into(), 1.0)]).is_err());
        assert_eq!("example33".parse::<ClassId>().unwrap(), ClassId::Example33);
        assert!(matches!("nope".parse::<ClassId>(), Err(Error::UnknownMetric(_))));
    }

    #[test]
    fn printed_components_at_unit_direction() {
        let y = [1.0; 3];
        let x = [0.0; 3];
        let ex31 = MetricClassSpec::with_defaults(ClassId::Example31, ClassParams::None, exp_f()).unwrap();
        assert_relative_eq!(expected_berwald_component(&ex31, &x, &y).unwrap(), -3.0 / 16.0, epsilon = 1e-15);
        let c1 = MetricClassSpec::with_defaults(ClassId::Class1, ClassParams::A(1.0), exp_f()).unwrap();
        assert_relative_eq!(expected_berwald_component(&c1, &x, &y).unwrap(), -3.0 / 8.0, epsilon = 1e-15);
        let c3 = MetricClassSpec::with_defaults(ClassId::Class3, ClassParams::A(2.0), exp_f()).unwrap();
        assert_relative_eq!(expected_berwald_component(&c3, &x, &y).unwrap(), -9.0 / 32.0, epsilon = 1e-15);
        let c4 = MetricClassSpec::with_defaults(ClassId::Class4, ClassParams::PQ { p: 1.0, q: 0.0 }, exp_f()).unwrap();
        assert!(matches!(expected_berwald_component(&c4, &x, &y), Err(Error::NoPrintedComponent(_))));
    }

    #[test]
    fn listing_has_every_entry() {
        let rows = catalog_entries();
        assert_eq!(rows.len(), 10);
        assert!(rows.iter().all(|r| r.expected == Verdict::LandsbergNonBerwald));
    }
}
