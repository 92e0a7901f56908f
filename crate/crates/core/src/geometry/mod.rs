//! The Finsler tensor pipeline at a single point `(x, y)` of the slit tangent bundle.
//!
//! Conventions: `E = F²/2`, `g_ij = ∂̇_i∂̇_j E`, `ℓ_i = ∂̇_i F`,
//! `G^i_j = ∂̇_j G^i`, `G^i_{jk} = ∂̇_k G^i_j`, Berwald tensor
//! `G^i_{jkh} = ∂̇_h G^i_{jk}` and Landsberg tensor `L_{jkh} = −½ F ℓ_i G^i_{jkh}`.
//! Indices are 0-based in code, so `y[0]` is `y¹`.

mod spray;
mod tensors;

use ndarray::{Array2, Array4};

use crate::error::{Error, Result};
use crate::jet::{seed_point, Caps, TaylorValue};
use crate::linalg;

pub use spray::{GeodesicSpray, ZeroSpray};
pub use tensors::PointTensors;

/// Relative determinant threshold below which a metric tensor counts as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

/// Base coordinates `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint(Vec<f64>);

impl ChartPoint {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("chart point must be finite and non-empty: {x:?}")));
        }
        Ok(ChartPoint(x))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Fiber coordinates `y` of a non-zero tangent vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if y.is_empty() || y.iter().any(|v| !v.is_finite()) || y.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidParameter(format!("direction must be finite and non-zero: {y:?}")));
        }
        Ok(Direction(y))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn scaled(&self, lambda: f64) -> Result<Direction> {
        Direction::new(self.0.iter().map(|v| v * lambda).collect())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// A Finsler function evaluable on jet arguments.
pub trait FinslerField: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[TaylorValue], y: &[TaylorValue]) -> Result<TaylorValue>;

    /// Domain guard: whether `(x, y)` is safely inside the region where the
    /// formula is real, smooth and positive.
    fn admissible(&self, _x: &[f64], _y: &[f64]) -> bool {
        true
    }

    fn label(&self) -> String;

    /// Natural size of the Berwald tensor at `x`; the non-Berwald floor is
    /// multiplied by it. For the conformal catalog metrics this is `|f'/f|`.
    fn berwald_weight(&self, _x: &[f64]) -> f64 {
        1.0
    }
}

/// Spray coefficients `G^i` evaluable as jets around a point.
pub trait SprayField: Send + Sync {
    fn dim(&self) -> usize;

    /// Jets of `G^1, …, G^n` at `(x, y)` truncated to `caps`.
    fn eval(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<Vec<TaylorValue>>;

    fn admissible(&self, _x: &[f64], _y: &[f64]) -> bool {
        true
    }

    fn label(&self) -> String;
}

fn check_dims(n: usize, x: &ChartPoint, y: &Direction) -> Result<()> {
    if x.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.dim() });
    }
    if y.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: y.dim() });
    }
    Ok(())
}

/// Evaluates `F` on seeded jets after checking dimensions and the domain guard.
pub fn field_jet(f: &dyn FinslerField, x: &ChartPoint, y: &Direction, caps: Caps) -> Result<TaylorValue> {
    check_dims(f.dim(), x, y)?;
    if !f.admissible(x.as_slice(), y.as_slice()) {
        return Err(Error::Inadmissible(f.label()));
    }
    let (xs, ys) = seed_point(x.as_slice(), y.as_slice(), caps);
    f.eval(&xs, &ys)
}

/// Evaluates `S` after checking dimensions and its domain guard.
pub fn spray_jets(s: &dyn SprayField, x: &ChartPoint, y: &Direction, caps: Caps) -> Result<Vec<TaylorValue>> {
    check_dims(s.dim(), x, y)?;
    if !s.admissible(x.as_slice(), y.as_slice()) {
        return Err(Error::Inadmissible(s.label()));
    }
    s.eval(x.as_slice(), y.as_slice(), caps)
}

/// Errors with [`Error::DegenerateMetric`] when `|det g| < 1e-10·‖g‖_F^n`;
/// returns `det g` otherwise.
pub fn check_nondegenerate(g: &Array2<f64>) -> Result<f64> {
    let n = g.nrows() as i32;
    let frob = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let det = linalg::det(g);
    let threshold = DEGENERACY_THRESHOLD * frob.powi(n);
    if !(det.abs() >= threshold) || frob == 0.0 {
        return Err(Error::DegenerateMetric { det, threshold });
    }
    Ok(det)
}

fn hessian_of_energy(fj: &TaylorValue, n: usize) -> Result<Array2<f64>> {
    let e = fj.square() * 0.5;
    let mut g = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = e.partial(&[], &[i, j])?;
            g[[i, j]] = v;
            g[[j, i]] = v;
        }
    }
    Ok(g)
}

/// `g_ij = ∂̇_i∂̇_j (F²/2)`, rejected when degenerate.
pub fn metric_tensor(f: &dyn FinslerField, x: &ChartPoint, y: &Direction) -> Result<Array2<f64>> {
    let fj = field_jet(f, x, y, Caps::new(0, 2))?;
    let g = hessian_of_energy(&fj, f.dim())?;
    check_nondegenerate(&g)?;
    Ok(g)
}

/// `G^i = ¼ g^{ih}(y^r ∂_r ∂̇_h F² − ∂_h F²)`.
pub fn geodesic_spray(f: &dyn FinslerField, x: &ChartPoint, y: &Direction) -> Result<Vec<f64>> {
    check_dims(f.dim(), x, y)?;
    if !f.admissible(x.as_slice(), y.as_slice()) {
        return Err(Error::Inadmissible(f.label()));
    }
    let jets = spray::derive_spray(f, x.as_slice(), y.as_slice(), Caps::new(0, 0))?;
    Ok(jets.iter().map(TaylorValue::value).collect())
}

/// Third fiber derivatives of the spray, indexed `[i, j, k, h]`.
pub fn berwald_tensor(s: &dyn SprayField, x: &ChartPoint, y: &Direction) -> Result<Array4<f64>> {
    let g = spray_jets(s, x, y, Caps::new(0, 3))?;
    berwald_from_jets(&g)
}

pub(crate) fn berwald_from_jets(g: &[TaylorValue]) -> Result<Array4<f64>> {
    let n = g.len();
    let mut b = Array4::zeros((n, n, n, n));
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                for h in k..n {
                    let v = g[i].partial(&[], &[j, k, h])?;
                    for (a, c, d) in [(j, k, h), (j, h, k), (k, j, h), (k, h, j), (h, j, k), (h, k, j)] {
                        b[[i, a, c, d]] = v;
                    }
                }
            }
        }
    }
    Ok(b)
}

/// `L_{jkh} = −½ F ℓ_i G^i_{jkh}`.
pub fn landsberg_tensor(
    f: &dyn FinslerField,
    s: &dyn SprayField,
    x: &ChartPoint,
    y: &Direction,
) -> Result<ndarray::Array3<f64>> {
    let fj = field_jet(f, x, y, Caps::new(0, 1))?;
    let b = berwald_tensor(s, x, y)?;
    let n = f.dim();
    let ell: Vec<f64> = (0..n).map(|i| fj.partial(&[], &[i])).collect::<Result<_>>()?;
    Ok(tensors::contract_landsberg(fj.value(), &ell, &b))
}

/// `δF/δx^i = ∂_i F − G^j_i ℓ_j`; vanishes when `F` is horizontally constant for `S`.
pub fn horizontal_differential(
    f: &dyn FinslerField,
    s: &dyn SprayField,
    x: &ChartPoint,
    y: &Direction,
) -> Result<Vec<f64>> {
    let fj = field_jet(f, x, y, Caps::new(1, 1))?;
    let g = spray_jets(s, x, y, Caps::new(0, 1))?;
    let n = f.dim();
    let ell: Vec<f64> = (0..n).map(|j| fj.partial(&[], &[j])).collect::<Result<_>>()?;
    (0..n)
        .map(|i| {
            let mut v = fj.partial(&[i], &[])?;
            for (j, gj) in g.iter().enumerate() {
                v -= gj.partial(&[], &[i])? * ell[j];
            }
            Ok(v)
        })
        .collect()
}

/// `|y^i ∂̇_i F − F|`, zero for a positively 1-homogeneous field.
pub fn euler_residual(f: &dyn FinslerField, x: &ChartPoint, y: &Direction) -> Result<f64> {
    let fj = field_jet(f, x, y, Caps::new(0, 1))?;
    let mut acc = -fj.value();
    for (i, yi) in y.as_slice().iter().enumerate() {
        acc += yi * fj.partial(&[], &[i])?;
    }
    Ok(acc.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    struct Euclid(usize);

    impl FinslerField for Euclid {
        fn dim(&self) -> usize {
            self.0
        }
        fn eval(&self, _x: &[TaylorValue], y: &[TaylorValue]) -> Result<TaylorValue> {
            let mut s = y[0].constant_like(0.0);
            for v in y {
                s += &v.square();
            }
            s.sqrt()
        }
        fn label(&self) -> String {
            "euclid".into()
        }
    }

    /// `F²` of the Euclidean norm; 2-homogeneous on purpose.
    struct Squared;

    impl FinslerField for Squared {
        fn dim(&self) -> usize {
            3
        }
        fn eval(&self, x: &[TaylorValue], y: &[TaylorValue]) -> Result<TaylorValue> {
            Ok(Euclid(3).eval(x, y)?.square())
        }
        fn label(&self) -> String {
            "squared".into()
        }
    }

    fn pt(v: &[f64]) -> ChartPoint {
        ChartPoint::new(v.to_vec()).unwrap()
    }

    fn dir(v: &[f64]) -> Direction {
        Direction::new(v.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_metric_is_identity() {
        let g = metric_tensor(&Euclid(3), &pt(&[0.1, 0.2, 0.3]), &dir(&[0.3, -1.0, 2.0])).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(g[[i, j]], if i == j { 1.0 } else { 0.0 }, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn flat_spray_and_tensors_vanish() {
        let (x, y) = (pt(&[0.0; 3]), dir(&[1.0, 0.5, -0.25]));
        assert!(geodesic_spray(&Euclid(3), &x, &y).unwrap().iter().all(|g| g.abs() < 1e-14));
        let s = GeodesicSpray::new(std::sync::Arc::new(Euclid(3)));
        assert!(landsberg_tensor(&Euclid(3), &s, &x, &y).unwrap().iter().all(|v| v.abs() < 1e-12));
        assert!(horizontal_differential(&Euclid(3), &s, &x, &y).unwrap().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn euler_residual_detects_degree_two() {
        let (x, y) = (pt(&[0.0; 3]), dir(&[1.0, 2.0, 2.0]));
        assert!(euler_residual(&Euclid(3), &x, &y).unwrap() < 1e-14);
        // y·∂̇F² − F² = 2F² − F² = F² = 9
        assert_relative_eq!(euler_residual(&Squared, &x, &y).unwrap(), 9.0, epsilon = 1e-12);
    }

    #[test]
    fn dimension_and_direction_checks() {
        assert!(Direction::new(vec![0.0, 0.0]).is_err());
        assert!(ChartPoint::new(vec![f64::NAN]).is_err());
        let err = metric_tensor(&Euclid(3), &pt(&[0.0; 2]), &dir(&[1.0, 0.0, 0.0])).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, found: 2 });
    }

    #[test]
    fn degenerate_metric_reported_with_det() {
        let g = ndarray::array![[1.0, 1.0], [1.0, 1.0]];
        assert!(matches!(check_nondegenerate(&g), Err(Error::DegenerateMetric { det, .. }) if det == 0.0));
    }
}
