use std::sync::Arc;

use ndarray::Array2;

use super::{check_nondegenerate, FinslerField, SprayField};
use crate::error::{Error, Result};
use crate::jet::{seed_point, Caps, Group, TaylorValue};
use crate::linalg;

/// The geodesic spray of a Finsler function, obtained by differentiating `F²`.
///
/// Jets of `G^i` at caps `(cx, cy)` need `F` at `(cx + 1, cy + 2)`, so the
/// Berwald tensor through this path uses the full default caps `(1, 5)`.
#[derive(Clone)]
pub struct GeodesicSpray {
    field: Arc<dyn FinslerField>,
}

impl GeodesicSpray {
    pub fn new(field: Arc<dyn FinslerField>) -> Self {
        GeodesicSpray { field }
    }

    pub fn field(&self) -> &Arc<dyn FinslerField> {
        &self.field
    }

    /// Spray jets of a borrowed field, without the domain guard.
    pub fn derive(f: &dyn FinslerField, x: &[f64], y: &[f64], caps: Caps) -> Result<Vec<TaylorValue>> {
        derive_spray(f, x, y, caps)
    }
}

impl SprayField for GeodesicSpray {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn eval(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<Vec<TaylorValue>> {
        derive_spray(self.field.as_ref(), x, y, caps)
    }

    fn admissible(&self, x: &[f64], y: &[f64]) -> bool {
        self.field.admissible(x, y)
    }

    fn label(&self) -> String {
        format!("geodesic spray of {}", self.field.label())
    }
}

pub(super) fn derive_spray(f: &dyn FinslerField, x: &[f64], y: &[f64], caps: Caps) -> Result<Vec<TaylorValue>> {
    let n = f.dim();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len().min(y.len()) });
    }
    let big = Caps::new(caps.x + 1, caps.y + 2);
    let mid = Caps::new(caps.x, caps.y + 1);
    let (xs, ys) = seed_point(x, y, big);
    let f2 = f.eval(&xs, &ys)?.square();
    let (_, y_mid) = seed_point(x, y, mid);

    let mut dy = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for h in 0..n {
        let d_h = f2.derivative(Group::Y, h)?;
        let mut acc = -f2.derivative(Group::X, h)?.truncate(mid)?;
        for (r, yr) in y_mid.iter().enumerate() {
            acc += &(yr * &d_h.derivative(Group::X, r)?);
        }
        rhs.push((acc * 0.25).truncate(caps)?);
        dy.push(d_h);
    }
    let g: Vec<Vec<TaylorValue>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (dy[j].derivative(Group::Y, i)? * 0.5).truncate(caps))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let g0 = Array2::from_shape_fn((n, n), |(i, j)| g[i][j].value());
    check_nondegenerate(&g0)?;
    linalg::solve(g, rhs)
}

/// `G^i ≡ 0`, the spray of a Minkowski space in linear coordinates.
#[derive(Clone, Copy, Debug)]
pub struct ZeroSpray(pub usize);

impl SprayField for ZeroSpray {
    fn dim(&self) -> usize {
        self.0
    }

    fn eval(&self, x: &[f64], y: &[f64], caps: Caps) -> Result<Vec<TaylorValue>> {
        let n = self.0;
        let zero = TaylorValue::constant(0.0, x.len(), y.len(), caps);
        Ok(vec![zero; n])
    }

    fn label(&self) -> String {
        "flat spray".into()
    }
}
