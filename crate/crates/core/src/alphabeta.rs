//! (α,β)-metrics over the conformally flat background
//! `α = f(x¹)·√((y¹)² + φ̂(ŷ))`, `β = f(x¹)·y¹`, with `φ̂(ŷ) = c_λμ y^λ y^μ`
//! a non-degenerate quadratic form in `ŷ = (y², …, yⁿ)`.
//!
//! On this background `b² = 1`, `s_ij = 0` and `b_{i|j} = k(a_ij − b_i b_j)`
//! with `k = f'/f²`, so the general (α,β) spray reduces to
//! `G^i = G_α^i + Θ·r₀₀·(y^i/α + Q'/(Q − sQ')·b^i)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ndarray::{Array1, Array2, Array3};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{FinslerField, SprayField};
use crate::jet::{seed_point, Caps, Group, TaylorValue};
use crate::linalg;

/// Denominators of `Q`, `Θ` and `Q'/(Q − sQ')` below this are singular.
pub const DENOMINATOR_TOL: f64 = 1e-12;

/// A smooth function of `x¹`, evaluable on jets.
pub trait ScalarFunction: Send + Sync + fmt::Debug {
    fn eval(&self, t: &TaylorValue) -> Result<TaylorValue>;

    fn label(&self) -> String;

    /// `(f(t), f'(t))`
    fn value_and_derivative(&self, t: f64) -> Result<(f64, f64)> {
        let v = self.eval(&TaylorValue::seed(Group::X, 0, t, 1, 0, Caps::new(1, 0))?)?;
        Ok((v.value(), v.partial(&[0], &[])?))
    }
}

impl ScalarFunction for Expr {
    fn eval(&self, t: &TaylorValue) -> Result<TaylorValue> {
        Expr::eval(self, t)
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

/// Named or explicit quadratic form `φ̂(ŷ) = c_λμ y^λ y^μ`.
#[derive(Clone, Debug, PartialEq)]
pub enum QuadraticForm {
    /// `y²y³` on ℝ³
    Product,
    /// `(y²)² + … + (yⁿ)²`
    Euclid,
    /// `y²y³ + (y⁴)²` on ℝ⁴
    Mixed4,
    /// Symmetric `(n−1)×(n−1)` matrix, row-major.
    Matrix(Vec<f64>),
}

impl QuadraticForm {
    /// The coefficient matrix `c` for manifold dimension `n`.
    pub fn matrix(&self, n: usize) -> Result<Array2<f64>> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
        }
        let m = n - 1;
        let fixed = |want: usize| {
            if n == want {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected: want, found: n })
            }
        };
        Ok(match self {
            QuadraticForm::Product => {
                fixed(3)?;
                ndarray::array![[0.0, 0.5], [0.5, 0.0]]
            }
            QuadraticForm::Euclid => Array2::eye(m),
            QuadraticForm::Mixed4 => {
                fixed(4)?;
                ndarray::array![[0.0, 0.5, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, 1.0]]
            }
            QuadraticForm::Matrix(v) => {
                if v.len() != m * m {
                    return Err(Error::DimensionMismatch { expected: m * m, found: v.len() });
                }
                Array2::from_shape_vec((m, m), v.clone()).expect("length checked")
            }
        })
    }

    /// Natural dimension of the preset, if it has one.
    pub fn natural_dim(&self) -> Option<usize> {
        match self {
            QuadraticForm::Product => Some(3),
            QuadraticForm::Mixed4 => Some(4),
            QuadraticForm::Euclid => None,
            QuadraticForm::Matrix(v) => {
                let m = (v.len() as f64).sqrt().round() as usize;
                (m * m == v.len()).then_some(m + 1)
            }
        }
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadraticForm::Product => f.write_str("product"),
            QuadraticForm::Euclid => f.write_str("euclid"),
            QuadraticForm::Mixed4 => f.write_str("mixed4"),
            QuadraticForm::Matrix(v) => {
                let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl FromStr for QuadraticForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "product" => Ok(QuadraticForm::Product),
            "euclid" => Ok(QuadraticForm::Euclid),
            "mixed4" => Ok(QuadraticForm::Mixed4),
            other => other
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(QuadraticForm::Matrix)
                .map_err(|_| {
                    Error::InvalidParameter(format!(
                        "quadratic form must be product, euclid, mixed4 or a row-major list, got `{other}`"
                    ))
                }),
        }
    }
}

/// The background data `f`, `c` and everything derived from them.
#[derive(Clone, Debug)]
pub struct RiemannSetup {
    n: usize,
    f: Arc<dyn ScalarFunction>,
    form: QuadraticForm,
    c: Array2<f64>,
}

/// Jets of the background quantities at one point.
pub struct Frame {
    pub y: Vec<TaylorValue>,
    pub f: TaylorValue,
    pub df: TaylorValue,
    pub phi_hat: TaylorValue,
    pub alpha_sq: TaylorValue,
    pub alpha: TaylorValue,
    pub beta: TaylorValue,
    /// `√(α² − β²) = f·√φ̂`
    pub root: TaylorValue,
}

impl RiemannSetup {
    pub fn new(f: Arc<dyn ScalarFunction>, form: QuadraticForm, n: usize) -> Result<Self> {
        let c = form.matrix(n)?;
        let m = n - 1;
        for i in 0..m {
            for j in 0..m {
                if (c[[i, j]] - c[[j, i]]).abs() > 1e-14 {
                    return Err(Error::InvalidParameter("quadratic form matrix is not symmetric".into()));
                }
            }
        }
        let d = linalg::det(&c);
        if d.abs() <= 1e-10 {
            return Err(Error::SingularParameters(format!("quadratic form is degenerate (det c = {d:e})")));
        }
        Ok(RiemannSetup { n, f, form, c })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn c(&self) -> &Array2<f64> {
        &self.c
    }

    pub fn conformal_factor(&self) -> &Arc<dyn ScalarFunction> {
        &self.f
    }

    /// `φ̂(ŷ)` at a plain point.
    pub fn phi_hat_value(&self, y: &[f64]) -> f64 {
        let m = self.n - 1;
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += self.c[[i, j]] * y[i + 1] * y[j + 1];
            }
        }
        s
    }

    pub fn phi_hat(&self, y: &[TaylorValue]) -> TaylorValue {
        let m = self.n - 1;
        let mut s = y[0].constant_like(0.0);
        for i in 0..m {
            for j in i..m {
                let c = if i == j { self.c[[i, i]] } else { 2.0 * self.c[[i, j]] };
                if c != 0.0 {
                    s += &(&(&y[i + 1] * &y[j + 1]) * c);
                }
            }
        }
        s
    }

    /// `(f, f')` at `x¹`, failing when `f ≤ 0`.
    pub fn f_values(&self, x1: f64) -> Result<(f64, f64)> {
        let (f, df) = self.f.value_and_derivative(x1)?;
        if !(f > 0.0) {
            return Err(Error::InvalidParameter(format!("f(x1) = {f} is not positive at x1 = {x1}")));
        }
        Ok((f, df))
    }

    /// `k = f'/f²`
    pub fn k(&self, x1: f64) -> Result<f64> {
        let (f, df) = self.f_values(x1)?;
        Ok(df / (f * f))
    }

    /// Background jets at `(x, y)` with the given caps.
    pub fn frame(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<Frame> {
        let n = self.n;
        if x.len() != n || y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len().min(y.len()) });
        }
        let up = Caps::new(caps.x + 1, caps.y);
        let (xs, _) = seed_point(x, y, up);
        let f_up = self.f.eval(&xs[0])?;
        if !(f_up.value() > 0.0) {
            return Err(Error::InvalidParameter(format!("f(x1) = {} is not positive", f_up.value())));
        }
        let df = f_up.derivative(Group::X, 0)?;
        let f = f_up.truncate(caps)?;
        let (_, ys) = seed_point(x, y, caps);
        let phi_hat = self.phi_hat(&ys);
        let f2 = f.square();
        let alpha_sq = &f2 * &(&ys[0].square() + &phi_hat);
        let alpha = alpha_sq.sqrt()?;
        let beta = &f * &ys[0];
        let root = &f * &phi_hat.sqrt()?;
        Ok(Frame { y: ys, f, df, phi_hat, alpha_sq, alpha, beta, root })
    }

    /// `a_ij`
    pub fn a(&self, x1: f64) -> Result<Array2<f64>> {
        let (f, _) = self.f_values(x1)?;
        let n = self.n;
        let mut a = Array2::zeros((n, n));
        a[[0, 0]] = f * f;
        for i in 1..n {
            for j in 1..n {
                a[[i, j]] = f * f * self.c[[i - 1, j - 1]];
            }
        }
        Ok(a)
    }

    pub fn a_inv(&self, x1: f64) -> Result<Array2<f64>> {
        linalg::inverse(&self.a(x1)?)
    }

    /// `b_i = (f, 0, …, 0)`
    pub fn b_lower(&self, x1: f64) -> Result<Array1<f64>> {
        let (f, _) = self.f_values(x1)?;
        let mut b = Array1::zeros(self.n);
        b[0] = f;
        Ok(b)
    }

    /// `b^i = a^{ij} b_j = (1/f, 0, …, 0)`
    pub fn b_upper(&self, x1: f64) -> Result<Array1<f64>> {
        Ok(self.a_inv(x1)?.dot(&self.b_lower(x1)?))
    }

    /// Christoffel symbols `γ^h_ij` of `α`, indexed `[h, i, j]`.
    pub fn christoffel(&self, x1: f64) -> Result<Array3<f64>> {
        let (f, df) = self.f_values(x1)?;
        let w = df / f;
        let n = self.n;
        let mut g = Array3::zeros((n, n, n));
        g[[0, 0, 0]] = w;
        for l in 1..n {
            for m in 1..n {
                g[[0, l, m]] = -w * self.c[[l - 1, m - 1]];
            }
            g[[l, 0, l]] = w;
            g[[l, l, 0]] = w;
        }
        Ok(g)
    }

    /// `b_{i|j} = ∂_j b_i − γ^h_ij b_h`
    pub fn b_covariant(&self, x1: f64) -> Result<Array2<f64>> {
        let (f, df) = self.f_values(x1)?;
        let gamma = self.christoffel(x1)?;
        let n = self.n;
        Ok(Array2::from_shape_fn((n, n), |(i, j)| {
            let db = if i == 0 && j == 0 { df } else { 0.0 };
            db - gamma[[0, i, j]] * f
        }))
    }

    /// `b² = a^{ij} b_i b_j`
    pub fn b_norm_sq(&self, x1: f64) -> Result<f64> {
        Ok(self.b_lower(x1)?.dot(&self.b_upper(x1)?))
    }

    /// `r₀₀ = (α² − β²)·f'/f²`
    pub fn r00(&self, frame: &Frame) -> Result<TaylorValue> {
        Ok(&(&frame.alpha_sq - &frame.beta.square()) * &frame.df.checked_div(&frame.f.square())?)
    }

    /// `G_α^1 = (2f²(y¹)² − α²)f'/(2f³)`, `G_α^μ = (f'/f)·y¹y^μ`
    pub fn riemann_spray_jets(&self, frame: &Frame) -> Result<Vec<TaylorValue>> {
        let w = frame.df.checked_div(&frame.f)?;
        let f2 = frame.f.square();
        let num = &(&(&f2 * &frame.y[0].square()) * 2.0) - &frame.alpha_sq;
        let g1 = &num.checked_div(&(&f2 * 2.0))? * &w;
        let mut out = Vec::with_capacity(self.n);
        out.push(g1);
        let wy1 = &w * &frame.y[0];
        for ym in &frame.y[1..] {
            out.push(&wy1 * ym);
        }
        Ok(out)
    }

    pub fn label(&self) -> String {
        format!("f = {}, φ̂ = {}, n = {}", self.f.label(), self.form, self.n)
    }
}

/// The Riemannian norm `α` as a Finsler field.
#[derive(Clone, Debug)]
pub struct AlphaField(pub Arc<RiemannSetup>);

impl FinslerField for AlphaField {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, x: &[TaylorValue], y: &[TaylorValue]) -> Result<TaylorValue> {
        let f = self.0.f.eval(&x[0])?;
        (&f.square() * &(&y[0].square() + &self.0.phi_hat(y))).sqrt()
    }

    fn admissible(&self, _x: &[f64], y: &[f64]) -> bool {
        y[0] * y[0] + self.0.phi_hat_value(y) > 0.0
    }

    fn label(&self) -> String {
        format!("alpha ({})", self.0.label())
    }

    fn berwald_weight(&self, x: &[f64]) -> f64 {
        self.0.f_values(x[0]).map(|(f, df)| (df / f).abs()).unwrap_or(1.0)
    }
}

/// The closed-form Levi-Civita spray `G_α`.
#[derive(Clone, Debug)]
pub struct RiemannSpray(pub Arc<RiemannSetup>);

impl SprayField for RiemannSpray {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<Vec<TaylorValue>> {
        let frame = self.0.frame(x, y, caps)?;
        self.0.riemann_spray_jets(&frame)
    }

    fn label(&self) -> String {
        format!("riemann spray ({})", self.0.label())
    }
}

/// A generating function `φ(s)` of an (α,β)-metric `F = αφ(β/α)`.
pub trait PhiFunction: Send + Sync + fmt::Debug {
    fn eval(&self, s: &TaylorValue) -> Result<TaylorValue>;

    fn label(&self) -> String;

    /// `φ` is defined for `|s| < b0`.
    fn b0(&self) -> f64 {
        1.0
    }

    fn value(&self, s: f64) -> Result<f64> {
        Ok(self.eval(&TaylorValue::constant(s, 1, 0, Caps::new(0, 0)))?.value())
    }
}

/// `φ ≡ 1`, the Riemannian case.
#[derive(Clone, Copy, Debug)]
pub struct UnitPhi;

impl PhiFunction for UnitPhi {
    fn eval(&self, s: &TaylorValue) -> Result<TaylorValue> {
        Ok(s.constant_like(1.0))
    }

    fn label(&self) -> String {
        "1".into()
    }
}

/// `Q`, `Q'`, `Θ` and `Q'/(Q − sQ')` at one value of `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QTheta {
    pub q: f64,
    pub dq: f64,
    pub theta: f64,
    pub ratio: f64,
}

/// Taylor coefficients in `s` of `Q`, `Θ` and `Q'/(Q − sQ')` around `s0`.
#[derive(Clone, Debug)]
pub struct DerivedSeries {
    pub q: Vec<f64>,
    pub theta: Vec<f64>,
    pub ratio: Vec<f64>,
}

fn nonsingular(v: f64, what: &str, s: f64) -> Result<()> {
    if v.abs() > DENOMINATOR_TOL && v.is_finite() {
        Ok(())
    } else {
        Err(Error::SingularParameters(format!("{what} = {v:e} vanishes at s = {s}")))
    }
}

/// Series of the (α,β) auxiliary functions to `order`, by AD of `φ` alone:
/// `Q = φ'/(φ − sφ')`, `Θ = (Q − sQ')/(2(1 + sQ + (b² − s²)Q'))`.
pub fn derived_series(phi: &dyn PhiFunction, s0: f64, b2: f64, order: usize) -> Result<DerivedSeries> {
    if !(s0.abs() < phi.b0()) {
        return Err(Error::Domain { func: "phi", value: s0 });
    }
    let m = u8::try_from(order).map_err(|_| Error::InvalidParameter(format!("series order {order} too large")))?;
    let top = Caps::new(m + 2, 0);
    let mid = Caps::new(m + 1, 0);
    let low = Caps::new(m, 0);
    let t = TaylorValue::seed(Group::X, 0, s0, 1, 0, top)?;
    let ph = phi.eval(&t)?;
    let dph = ph.derivative(Group::X, 0)?;
    let t1 = t.truncate(mid)?;
    let den = &ph.truncate(mid)? - &(&t1 * &dph);
    nonsingular(den.value(), "phi - s phi'", s0)?;
    let q = dph.checked_div(&den)?;
    let dq = q.derivative(Group::X, 0)?;
    let q0 = q.truncate(low)?;
    if q.coeffs().iter().all(|c| c.abs() <= DENOMINATOR_TOL) {
        // Q ≡ 0 near s0: Riemannian, the (α,β) correction vanishes.
        let zero = vec![0.0; q0.coeffs().len()];
        return Ok(DerivedSeries { q: zero.clone(), theta: zero.clone(), ratio: zero });
    }
    let t0 = t.truncate(low)?;
    let qs = &q0 - &(&t0 * &dq);
    nonsingular(qs.value(), "Q - sQ'", s0)?;
    let den2 = &(1.0 + &(&t0 * &q0)) + &(&(b2 - &t0.square()) * &dq);
    nonsingular(den2.value(), "1 + sQ + (b^2 - s^2)Q'", s0)?;
    let theta = qs.checked_div(&(&den2 * 2.0))?;
    let ratio = dq.checked_div(&qs)?;
    Ok(DerivedSeries {
        q: q0.coeffs().to_vec(),
        theta: theta.coeffs().to_vec(),
        ratio: ratio.coeffs().to_vec(),
    })
}

/// `Q`, `Θ` and `Q'/(Q − sQ')` at `s`.
pub fn q_theta(phi: &dyn PhiFunction, s: f64, b2: f64) -> Result<QTheta> {
    let d = derived_series(phi, s, b2, 1)?;
    Ok(QTheta { q: d.q[0], dq: d.q[1], theta: d.theta[0], ratio: d.ratio[0] })
}

/// `F = α·φ(β/α)` on the background.
#[derive(Clone, Debug)]
pub struct AlphaBetaMetric {
    pub setup: Arc<RiemannSetup>,
    pub phi: Arc<dyn PhiFunction>,
}

impl AlphaBetaMetric {
    pub fn s_value(&self, y: &[f64]) -> f64 {
        let a2 = y[0] * y[0] + self.setup.phi_hat_value(y);
        y[0] / a2.sqrt()
    }
}

impl FinslerField for AlphaBetaMetric {
    fn dim(&self) -> usize {
        self.setup.dim()
    }

    fn eval(&self, x: &[TaylorValue], y: &[TaylorValue]) -> Result<TaylorValue> {
        let f = self.setup.f.eval(&x[0])?;
        let alpha = (&f.square() * &(&y[0].square() + &self.setup.phi_hat(y))).sqrt()?;
        let beta = &f * &y[0];
        let s = beta.checked_div(&alpha)?;
        Ok(&alpha * &self.phi.eval(&s)?)
    }

    fn admissible(&self, _x: &[f64], y: &[f64]) -> bool {
        if !(self.setup.phi_hat_value(y) > 0.0) {
            return false;
        }
        let s = self.s_value(y);
        s.abs() < self.phi.b0() && self.phi.value(s).map(|v| v > 0.0 && v.is_finite()).unwrap_or(false)
    }

    fn label(&self) -> String {
        format!("alpha*phi(s), phi = {} ({})", self.phi.label(), self.setup.label())
    }

    fn berwald_weight(&self, x: &[f64]) -> f64 {
        self.setup.f_values(x[0]).map(|(f, df)| (df / f).abs()).unwrap_or(1.0)
    }
}

/// The (α,β) spray `G^i = G_α^i + Θ·r₀₀·(y^i/α + Q'/(Q − sQ')·b^i)`,
/// valid because the background has `s_ij = 0`.
#[derive(Clone, Debug)]
pub struct AlphaBetaSpray {
    pub setup: Arc<RiemannSetup>,
    pub phi: Arc<dyn PhiFunction>,
}

impl SprayField for AlphaBetaSpray {
    fn dim(&self) -> usize {
        self.setup.dim()
    }

    fn eval(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<Vec<TaylorValue>> {
        let fr = self.setup.frame(x, y, caps)?;
        let s = fr.beta.checked_div(&fr.alpha)?;
        let series = derived_series(self.phi.as_ref(), s.value(), 1.0, caps.total())?;
        let theta = s.compose(&series.theta);
        let ratio = s.compose(&series.ratio);
        let lift = &theta * &self.setup.r00(&fr)?;
        let mut g = self.setup.riemann_spray_jets(&fr)?;
        let inv_alpha = fr.alpha.recip()?;
        for (i, gi) in g.iter_mut().enumerate() {
            let mut dir = &fr.y[i] * &inv_alpha;
            if i == 0 {
                dir += &ratio.checked_div(&fr.f)?;
            }
            *gi += &(&lift * &dir);
        }
        Ok(g)
    }

    fn admissible(&self, x: &[f64], y: &[f64]) -> bool {
        AlphaBetaMetric { setup: Arc::clone(&self.setup), phi: Arc::clone(&self.phi) }.admissible(x, y)
    }

    fn label(&self) -> String {
        format!("(alpha,beta) spray, phi = {}", self.phi.label())
    }
}

/// Spray of the Shen family on the background:
/// `G^i = G_α^i + c₁k√(α²−β²)/(2(1+c₃))·(y^i − βb^i + (c₃/c₁)√(α²−β²)·b^i)`.
#[derive(Clone, Debug)]
pub struct ShenSpray {
    setup: Arc<RiemannSetup>,
    c1: f64,
    c3: f64,
}

impl ShenSpray {
    pub fn new(setup: Arc<RiemannSetup>, c1: f64, c3: f64) -> Result<Self> {
        if c1 == 0.0 {
            return Err(Error::InvalidParameter("c1 must be non-zero".into()));
        }
        if !(1.0 + c3 > 0.0) {
            return Err(Error::InvalidParameter(format!("1 + c3 must be positive, got c3 = {c3}")));
        }
        Ok(ShenSpray { setup, c1, c3 })
    }
}

impl SprayField for ShenSpray {
    fn dim(&self) -> usize {
        self.setup.dim()
    }

    fn eval(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<Vec<TaylorValue>> {
        let fr = self.setup.frame(x, y, caps)?;
        let k = fr.df.checked_div(&fr.f.square())?;
        let lift = &(&k * &fr.root) * (self.c1 / (2.0 * (1.0 + self.c3)));
        let mut g = self.setup.riemann_spray_jets(&fr)?;
        let inv_f = fr.f.recip()?;
        for (i, gi) in g.iter_mut().enumerate() {
            let mut dir = fr.y[i].clone();
            if i == 0 {
                let tail = &(&fr.root * (self.c3 / self.c1)) - &fr.beta;
                dir += &(&tail * &inv_f);
            }
            *gi += &(&lift * &dir);
        }
        Ok(g)
    }

    fn admissible(&self, _x: &[f64], y: &[f64]) -> bool {
        self.setup.phi_hat_value(y) > 0.0
    }

    fn label(&self) -> String {
        format!("shen spray (c1 = {}, c3 = {})", self.c1, self.c3)
    }
}
