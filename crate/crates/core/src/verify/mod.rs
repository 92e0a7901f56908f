//! Classification over a seeded sample plan.
//!
//! "Vanishes identically" means the residual stays below its tolerance at every
//! sample; "non-Berwald" means some sample has a Berwald component above the
//! floor times `|f'/f|`. Residuals are divided by `max(1, |F|, ‖G‖∞)`.

mod sampler;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use ndarray::Array3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::SpecialFormSpray;
use crate::error::{Error, Result};
use crate::geometry::{
    field_jet, geodesic_spray, horizontal_differential, spray_jets, ChartPoint, Direction, FinslerField,
    GeodesicSpray, PointTensors, SprayField,
};
use crate::jet::{Caps, TaylorValue};

pub use sampler::{draw_samples, Sample};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    pub landsberg: f64,
    pub berwald_floor: f64,
    pub metrizability: f64,
    pub homogeneity: f64,
    pub spray_match: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile {
            landsberg: 1e-9,
            berwald_floor: 1e-6,
            metrizability: 1e-9,
            homogeneity: 1e-10,
            spray_match: 1e-8,
        }
    }
}

impl ToleranceProfile {
    pub const NAMES: [&'static str; 3] = ["default", "strict", "loose"];

    pub fn named(name: &str) -> Result<Self> {
        match name {
            "default" => Ok(Self::default()),
            "strict" => Ok(ToleranceProfile {
                landsberg: 1e-11,
                berwald_floor: 1e-6,
                metrizability: 1e-11,
                homogeneity: 1e-12,
                spray_match: 1e-10,
            }),
            "loose" => Ok(ToleranceProfile {
                landsberg: 1e-7,
                berwald_floor: 1e-4,
                metrizability: 1e-7,
                homogeneity: 1e-8,
                spray_match: 1e-6,
            }),
            other => Err(Error::InvalidPlan(format!(
                "unknown tolerance profile `{other}` (expected one of {})",
                Self::NAMES.join(", ")
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub n_points: usize,
    pub seed: u64,
    pub x_range: (f64, f64),
    /// Minimum angle in radians between `y` and the axis `(±1, 0, …, 0)`.
    pub exclusion_angle: f64,
    /// Draws allowed per sample before the sampler gives up.
    pub max_attempts: usize,
    pub tolerances: ToleranceProfile,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            n_points: 50,
            seed: 0,
            x_range: (-0.5, 0.5),
            exclusion_angle: 0.15,
            max_attempts: 10_000,
            tolerances: ToleranceProfile::default(),
        }
    }
}

impl SamplePlan {
    pub fn new(n_points: usize, seed: u64) -> Self {
        SamplePlan { n_points, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points == 0 {
            return Err(Error::InvalidPlan("n_points must be at least 1".into()));
        }
        let a = self.exclusion_angle;
        if !(a > 0.0 && a < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidPlan(format!("exclusion angle {a} is outside (0, π/2)")));
        }
        let (lo, hi) = self.x_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidPlan(format!("x range [{lo}, {hi}] is not a finite interval")));
        }
        if self.max_attempts == 0 {
            return Err(Error::InvalidPlan("max_attempts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Berwald,
    LandsbergNonBerwald,
    NonLandsberg,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Berwald => "Berwald",
            Verdict::LandsbergNonBerwald => "Landsberg, non-Berwald",
            Verdict::NonLandsberg => "non-Landsberg",
        })
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.to_ascii_lowercase().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        match key.as_str() {
            "berwald" => Ok(Verdict::Berwald),
            "landsberg" | "landsbergnonberwald" => Ok(Verdict::LandsbergNonBerwald),
            "nonlandsberg" => Ok(Verdict::NonLandsberg),
            _ => Err(Error::InvalidParameter(format!(
                "unknown verdict `{s}` (expected berwald, landsberg-non-berwald or non-landsberg)"
            ))),
        }
    }
}

/// Largest residual and the sample index where it occurred.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualMax {
    pub max: f64,
    pub sample: usize,
}

impl Default for ResidualMax {
    fn default() -> Self {
        ResidualMax { max: 0.0, sample: 0 }
    }
}

impl ResidualMax {
    fn push(&mut self, v: f64, sample: usize) {
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v > self.max {
            self.max = v;
            self.sample = sample;
        }
    }

    fn over<I: IntoIterator<Item = (f64, usize)>>(it: I) -> Self {
        let mut m = ResidualMax::default();
        for (v, s) in it {
            m.push(v, s);
        }
        m
    }
}

/// Per-sample residuals, all relative to the sample's scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub f: f64,
    pub scale: f64,
    pub landsberg: f64,
    pub berwald: f64,
    pub berwald_weight: f64,
    pub metrizability: f64,
    pub euler: f64,
    pub homogeneity: f64,
    pub spray_match: f64,
    pub identities: f64,
    pub cartan: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub landsberg: ResidualMax,
    pub berwald: ResidualMax,
    /// Largest `berwald / berwald_weight`, the quantity compared with the floor.
    pub berwald_weighted: ResidualMax,
    pub metrizability: ResidualMax,
    pub euler: ResidualMax,
    pub homogeneity: ResidualMax,
    pub spray_match: ResidualMax,
    pub identities: ResidualMax,
    pub cartan: ResidualMax,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub metric: String,
    pub params: BTreeMap<String, f64>,
    pub spray: String,
    pub plan: SamplePlan,
    pub residuals: Residuals,
    pub verdict: Verdict,
    /// Cartan tensor below the Landsberg tolerance everywhere.
    pub riemannian: bool,
    /// Horizontal differential and Euler defect below tolerance everywhere.
    pub metrizable: bool,
    pub samples: Vec<SampleRecord>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ClassificationReport {
    pub fn with_params(mut self, params: BTreeMap<String, f64>) -> Self {
        self.params = params;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    /// The per-sample table as CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "index,x1,f,scale,landsberg,berwald,berwald_weight,metrizability,euler,homogeneity,spray_match,identities,cartan",
        );
        for i in 0..self.samples.first().map_or(0, |s| s.y.len()) {
            out.push_str(&format!(",y{}", i + 1));
        }
        out.push('\n');
        for s in &self.samples {
            let mut row = vec![s.index.to_string()];
            row.extend(
                [
                    s.x[0],
                    s.f,
                    s.scale,
                    s.landsberg,
                    s.berwald,
                    s.berwald_weight,
                    s.metrizability,
                    s.euler,
                    s.homogeneity,
                    s.spray_match,
                    s.identities,
                    s.cartan,
                ]
                .iter()
                .chain(&s.y)
                .map(|v| format!("{v:e}")),
            );
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

struct Derived<'a>(&'a dyn FinslerField);

impl SprayField for Derived<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<Vec<TaylorValue>> {
        GeodesicSpray::derive(self.0, x, y, caps)
    }

    fn admissible(&self, x: &[f64], y: &[f64]) -> bool {
        self.0.admissible(x, y)
    }

    fn label(&self) -> String {
        format!("geodesic spray of {}", self.0.label())
    }
}

fn point(s: &Sample) -> Result<(ChartPoint, Direction)> {
    Ok((ChartPoint::new(s.x.clone())?, Direction::new(s.y.clone())?))
}

fn sup(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m: f64, x| if x.is_nan() { f64::INFINITY } else { m.max(x.abs()) })
}

/// `C_ijk = ¼ ∂̇_i∂̇_j∂̇_k F²`
fn cartan(fj: &TaylorValue, n: usize) -> Result<Array3<f64>> {
    let e = fj.square();
    let mut c = Array3::zeros((n, n, n));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                c[[i, j, k]] = 0.25 * e.partial(&[], &[i, j, k])?;
            }
        }
    }
    Ok(c)
}

fn evaluate(f: &dyn FinslerField, s: &dyn SprayField, oracle: bool, sample: &Sample) -> Result<SampleRecord> {
    let (x, y) = point(sample)?;
    let pt = PointTensors::compute(f, s, &x, &y)?;
    let scale = pt.scale();
    let n = pt.dim();

    let hd = horizontal_differential(f, s, &x, &y)?;
    let fj = field_jet(f, &x, &y, Caps::new(0, 3))?;
    let mut euler = -fj.value();
    for (i, yi) in sample.y.iter().enumerate() {
        euler += yi * fj.partial(&[], &[i])?;
    }
    let cart = cartan(&fj, n)?;

    let mut homog = 0.0f64;
    for lambda in [0.5, 2.0] {
        let yl = y.scaled(lambda)?;
        let fl = field_jet(f, &x, &yl, Caps::new(0, 0))?.value();
        homog = homog.max((fl - lambda * pt.f).abs() / (lambda * scale));
        let gl = spray_jets(s, &x, &yl, Caps::new(0, 0))?;
        for (gi, g0) in gl.iter().zip(pt.spray.iter()) {
            homog = homog.max((gi.value() - lambda * lambda * g0).abs() / (lambda * lambda * scale));
        }
    }

    let spray_match = if oracle {
        0.0
    } else {
        let ad = geodesic_spray(f, &x, &y)?;
        sup(ad.iter().zip(pt.spray.iter()).map(|(a, b)| a - b)) / scale
    };

    Ok(SampleRecord {
        index: sample.index,
        x: sample.x.clone(),
        y: sample.y.clone(),
        f: pt.f,
        scale,
        landsberg: pt.max_abs_landsberg() / scale,
        berwald: pt.max_abs_berwald() / scale,
        berwald_weight: f.berwald_weight(&sample.x),
        metrizability: sup(hd) / scale,
        euler: euler.abs() / scale,
        homogeneity: homog,
        spray_match,
        identities: pt.identity_defect(&y) / scale,
        cartan: sup(cart.iter().copied()) / scale,
    })
}

fn guard<'a>(f: &'a dyn FinslerField, s: &'a dyn SprayField) -> impl Fn(&[f64], &[f64]) -> bool + Sync + 'a {
    move |x: &[f64], y: &[f64]| f.admissible(x, y) && s.admissible(x, y)
}

/// Runs the tensor pipeline at every sample of `plan` and aggregates a verdict.
/// With `spray = None` the spray is derived from `F` by automatic differentiation.
pub fn classify(f: &dyn FinslerField, spray: Option<&dyn SprayField>, plan: &SamplePlan) -> Result<ClassificationReport> {
    let start = Instant::now();
    let derived = Derived(f);
    let oracle = spray.is_none();
    let s: &dyn SprayField = spray.unwrap_or(&derived);
    if s.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: s.dim() });
    }
    let samples = draw_samples(f.dim(), plan, guard(f, s))?;
    let records = samples
        .par_iter()
        .map(|smp| evaluate(f, s, oracle, smp))
        .collect::<Result<Vec<_>>>()?;

    let tol = &plan.tolerances;
    let col = |get: fn(&SampleRecord) -> f64| ResidualMax::over(records.iter().map(|r| (get(r), r.index)));
    let residuals = Residuals {
        landsberg: col(|r| r.landsberg),
        berwald: col(|r| r.berwald),
        berwald_weighted: col(|r| if r.berwald_weight > 0.0 { r.berwald / r.berwald_weight } else { r.berwald }),
        metrizability: col(|r| r.metrizability),
        euler: col(|r| r.euler),
        homogeneity: col(|r| r.homogeneity),
        spray_match: col(|r| r.spray_match),
        identities: col(|r| r.identities),
        cartan: col(|r| r.cartan),
    };
    let non_berwald = records.iter().any(|r| {
        let floor = if r.berwald_weight > 0.0 { tol.berwald_floor * r.berwald_weight } else { tol.berwald_floor };
        r.berwald > floor
    });
    let verdict = if !(residuals.landsberg.max <= tol.landsberg) {
        Verdict::NonLandsberg
    } else if non_berwald {
        Verdict::LandsbergNonBerwald
    } else {
        Verdict::Berwald
    };
    Ok(ClassificationReport {
        metric: f.label(),
        params: BTreeMap::new(),
        spray: s.label(),
        plan: plan.clone(),
        riemannian: residuals.cartan.max <= tol.landsberg,
        metrizable: residuals.metrizability.max <= tol.metrizability && residuals.euler.max <= tol.homogeneity,
        residuals,
        verdict,
        samples: records,
        wall_time: start.elapsed(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetrizabilitySummary {
    /// `max |δF/δx^i|`
    pub horizontal: ResidualMax,
    /// `max |y^i ∂̇_iF − F|`
    pub euler: ResidualMax,
}

/// Residuals of `d_hF = 0` and `d_CF = F` for the pair `(F, S)`.
pub fn check_metrizability(f: &dyn FinslerField, s: &dyn SprayField, plan: &SamplePlan) -> Result<MetrizabilitySummary> {
    let samples = draw_samples(f.dim(), plan, guard(f, s))?;
    let rows = samples
        .par_iter()
        .map(|smp| {
            let (x, y) = point(smp)?;
            let fj = field_jet(f, &x, &y, Caps::new(0, 1))?;
            let g = spray_jets(s, &x, &y, Caps::new(0, 0))?;
            let scale = 1f64.max(fj.value().abs()).max(sup(g.iter().map(TaylorValue::value)));
            let hd = horizontal_differential(f, s, &x, &y)?;
            let mut e = -fj.value();
            for (i, yi) in smp.y.iter().enumerate() {
                e += yi * fj.partial(&[], &[i])?;
            }
            Ok((sup(hd) / scale, e.abs() / scale, smp.index))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetrizabilitySummary {
        horizontal: ResidualMax::over(rows.iter().map(|r| (r.0, r.2))),
        euler: ResidualMax::over(rows.iter().map(|r| (r.1, r.2))),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViaPSummary {
    /// `max |L|` evaluated from the derivatives of `P`.
    pub via_p: ResidualMax,
    /// `max |L|` from the general definition.
    pub general: ResidualMax,
    /// `max |L_P − L|`
    pub difference: ResidualMax,
}

/// Tolerance on the special-form check `∂̇³G¹ = 0`, `G^μ = P y^μ`.
pub const SPECIAL_FORM_TOL: f64 = 1e-9;

fn via_p_at(f: &dyn FinslerField, s: &dyn SpecialFormSpray, smp: &Sample) -> Result<(f64, f64, f64, f64)> {
    let (x, y) = point(smp)?;
    let n = f.dim();
    let caps = Caps::new(0, 3);
    let g = spray_jets(s, &x, &y, caps)?;
    let p = s.p_jet(&smp.x, &smp.y, caps)?;
    let scale = 1f64.max(sup(g.iter().map(TaylorValue::value)));

    let mut defect = 0.0f64;
    for j in 0..n {
        for k in j..n {
            for h in k..n {
                defect = defect.max(g[0].partial(&[], &[j, k, h])?.abs());
            }
        }
    }
    for (mu, gm) in g.iter().enumerate().skip(1) {
        let py = &p * &crate::jet::seed_point(&smp.x, &smp.y, caps).1[mu];
        defect = defect.max(sup(gm.coeffs().iter().zip(py.coeffs()).map(|(a, b)| a - b)));
    }
    if defect / scale > SPECIAL_FORM_TOL {
        return Err(Error::NotSpecialForm(format!("{} (defect {:e} at sample {})", s.label(), defect, smp.index)));
    }

    let fj = field_jet(f, &x, &y, Caps::new(0, 1))?;
    let fv = fj.value();
    let scale = scale.max(fv.abs());
    let ell: Vec<f64> = (0..n).map(|i| fj.partial(&[], &[i])).collect::<Result<_>>()?;
    let ell_y: f64 = (1..n).map(|mu| ell[mu] * smp.y[mu]).sum();
    let p2 = |a: usize, b: usize| p.partial(&[], &[a, b]);
    let lam = |a: usize| if a == 0 { 0.0 } else { ell[a] };

    let general = crate::geometry::landsberg_tensor(f, s, &x, &y)?;
    let (mut lp_max, mut lg_max, mut diff) = (0.0f64, 0.0f64, 0.0f64);
    for j in 0..n {
        for k in 0..n {
            for h in 0..n {
                let lp = -0.5
                    * fv
                    * (p.partial(&[], &[j, k, h])? * ell_y
                        + p2(j, k)? * lam(h)
                        + p2(k, h)? * lam(j)
                        + p2(h, j)? * lam(k));
                let lg = general[[j, k, h]];
                lp_max = lp_max.max(lp.abs());
                lg_max = lg_max.max(lg.abs());
                diff = diff.max((lp - lg).abs());
            }
        }
    }
    Ok((lp_max / scale, lg_max / scale, diff / scale, defect / scale))
}

/// Evaluates the Landsberg tensor of a special-form spray from its projective
/// factor, `L_jkh = −½F(P_jkh ℓ_μy^μ + P_jk ℓ̂_h + P_kh ℓ̂_j + P_hj ℓ̂_k)` with
/// `ℓ̂ = (0, ℓ_2, …, ℓ_n)`, next to the general definition.
pub fn landsberg_via_p(s: &dyn SpecialFormSpray, f: &dyn FinslerField, plan: &SamplePlan) -> Result<ViaPSummary> {
    let samples = draw_samples(f.dim(), plan, guard(f, s))?;
    let rows = samples
        .par_iter()
        .map(|smp| via_p_at(f, s, smp).map(|r| (r, smp.index)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ViaPSummary {
        via_p: ResidualMax::over(rows.iter().map(|(r, i)| (r.0, *i))),
        general: ResidualMax::over(rows.iter().map(|(r, i)| (r.1, *i))),
        difference: ResidualMax::over(rows.iter().map(|(r, i)| (r.2, *i))),
    })
}

/// Largest relative deviation between two sprays over the plan, comparing all
/// jet coefficients up to `caps`.
pub fn compare_sprays_with_caps(
    a: &dyn SprayField,
    b: &dyn SprayField,
    plan: &SamplePlan,
    caps: Caps,
) -> Result<ResidualMax> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let samples = draw_samples(a.dim(), plan, |x: &[f64], y: &[f64]| a.admissible(x, y) && b.admissible(x, y))?;
    let rows = samples
        .par_iter()
        .map(|smp| {
            let (x, y) = point(smp)?;
            let ga = spray_jets(a, &x, &y, caps)?;
            let gb = spray_jets(b, &x, &y, caps)?;
            let mut scale = 1.0f64;
            let mut dev = 0.0f64;
            for (u, v) in ga.iter().zip(&gb) {
                scale = scale.max(sup(u.coeffs().iter().copied())).max(sup(v.coeffs().iter().copied()));
                dev = dev.max(sup(u.coeffs().iter().zip(v.coeffs()).map(|(p, q)| p - q)));
            }
            Ok((dev / scale, smp.index))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualMax::over(rows))
}

/// [`compare_sprays_with_caps`] on the values `G^i` alone.
pub fn compare_sprays(a: &dyn SprayField, b: &dyn SprayField, plan: &SamplePlan) -> Result<ResidualMax> {
    compare_sprays_with_caps(a, b, plan, Caps::new(0, 0))
}
