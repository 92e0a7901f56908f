use ndarray::{Array1, Array2, Array3, Array4};

use super::{berwald_from_jets, check_nondegenerate, field_jet, hessian_of_energy, spray_jets};
use super::{ChartPoint, Direction, FinslerField, SprayField};
use crate::error::Result;
use crate::jet::Caps;
use crate::linalg;

/// Everything the classification needs at one sample.
#[derive(Clone, Debug)]
pub struct PointTensors {
    pub f: f64,
    pub g: Array2<f64>,
    pub g_inv: Array2<f64>,
    pub ell: Array1<f64>,
    /// `G^i`
    pub spray: Array1<f64>,
    /// `G^i_j`, indexed `[i, j]`
    pub connection: Array2<f64>,
    /// `G^i_{jk}`, indexed `[i, j, k]`
    pub berwald_coeffs: Array3<f64>,
    /// `G^i_{jkh}`, indexed `[i, j, k, h]`
    pub berwald: Array4<f64>,
    /// `L_{jkh}`
    pub landsberg: Array3<f64>,
}

pub(super) fn contract_landsberg(f: f64, ell: &[f64], b: &Array4<f64>) -> Array3<f64> {
    let n = ell.len();
    Array3::from_shape_fn((n, n, n), |(j, k, h)| {
        -0.5 * f * (0..n).map(|i| ell[i] * b[[i, j, k, h]]).sum::<f64>()
    })
}

impl PointTensors {
    pub fn compute(f: &dyn FinslerField, s: &dyn SprayField, x: &ChartPoint, y: &Direction) -> Result<Self> {
        let n = f.dim();
        let fj = field_jet(f, x, y, Caps::new(0, 2))?;
        let g = hessian_of_energy(&fj, n)?;
        check_nondegenerate(&g)?;
        let g_inv = linalg::inverse(&g)?;
        let ell = Array1::from(
            (0..n).map(|i| fj.partial(&[], &[i])).collect::<Result<Vec<_>>>()?,
        );
        let gj = spray_jets(s, x, y, Caps::new(0, 3))?;
        let spray = Array1::from_iter(gj.iter().map(|v| v.value()));
        let mut connection = Array2::zeros((n, n));
        let mut berwald_coeffs = Array3::zeros((n, n, n));
        for i in 0..n {
            for j in 0..n {
                connection[[i, j]] = gj[i].partial(&[], &[j])?;
                for k in 0..n {
                    berwald_coeffs[[i, j, k]] = gj[i].partial(&[], &[j, k])?;
                }
            }
        }
        let berwald = berwald_from_jets(&gj)?;
        let landsberg = contract_landsberg(fj.value(), ell.as_slice().expect("contiguous"), &berwald);
        Ok(PointTensors { f: fj.value(), g, g_inv, ell, spray, connection, berwald_coeffs, berwald, landsberg })
    }

    pub fn dim(&self) -> usize {
        self.ell.len()
    }

    /// `max(1, |F|, ‖G‖∞)`, the scale all residuals are divided by.
    pub fn scale(&self) -> f64 {
        let g = self.spray.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        1f64.max(self.f.abs()).max(g)
    }

    pub fn max_abs_landsberg(&self) -> f64 {
        self.landsberg.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_berwald(&self) -> f64 {
        self.berwald.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest deviation of the structural identities:
    /// `g` symmetric, `g·g⁻¹ = I`, `g_ij y^j = F ℓ_i`, `G^i_{jkh} y^h = 0`,
    /// `L_{jkh} y^h = 0` and total symmetry of `L`.
    pub fn identity_defect(&self, y: &Direction) -> f64 {
        let n = self.dim();
        let y = y.as_slice();
        let mut worst = 0.0f64;
        let id = self.g.dot(&self.g_inv);
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.g[[i, j]] - self.g[[j, i]]).abs());
                worst = worst.max((id[[i, j]] - if i == j { 1.0 } else { 0.0 }).abs());
            }
            let gy: f64 = (0..n).map(|j| self.g[[i, j]] * y[j]).sum();
            worst = worst.max((gy - self.f * self.ell[i]).abs());
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let by: f64 = (0..n).map(|h| self.berwald[[i, j, k, h]] * y[h]).sum();
                    worst = worst.max(by.abs());
                    let ly: f64 = (0..n).map(|h| self.landsberg[[j, k, h]] * y[h]).sum();
                    worst = worst.max(ly.abs());
                    let l = self.landsberg[[i, j, k]];
                    for p in [self.landsberg[[j, i, k]], self.landsberg[[k, j, i]], self.landsberg[[i, k, j]]] {
                        worst = worst.max((l - p).abs());
                    }
                }
            }
        }
        worst
    }
}
