//! Truncated multivariate Taylor arithmetic.
//!
//! A [`TaylorValue`] holds the Taylor coefficients of a scalar function of
//! `(x, y)` at one expansion point, truncated separately in the base group
//! (`x`, default order 1) and the fiber group (`y`, default order 5). Every
//! mixed partial up to the caps is exact up to floating-point rounding.
//!
//! Binary operators panic when the two operands have different shapes; use
//! [`arith`] for the checked variant. Division and the elementary functions
//! are fallible because the catalog metrics are singular in some directions.

mod elementary;
mod layout;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

pub use elementary::{elementary, univariate_series, Elementary};
pub use layout::{Caps, Group, MultiIndex};

use crate::error::{Error, Result};
use layout::Layout;

/// Constant terms at or below this magnitude are treated as zero by
/// division, `sqrt`, `ln` and real powers.
pub const SINGULAR_TOL: f64 = 1e-14;

#[derive(Clone)]
pub struct TaylorValue {
    layout: Arc<Layout>,
    coeffs: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked binary arithmetic.
pub fn arith(op: ArithOp, a: &TaylorValue, b: &TaylorValue) -> Result<TaylorValue> {
    a.check_shape(b)?;
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.checked_div(b)?,
    })
}

impl TaylorValue {
    pub fn constant(value: f64, n_x: usize, n_y: usize, caps: Caps) -> Self {
        let layout = layout::layout(n_x, n_y, caps);
        let mut coeffs = vec![0.0; layout.len()];
        coeffs[0] = value;
        TaylorValue { layout, coeffs }
    }

    /// Expansion of the coordinate function `group[index]` around `value`.
    pub fn seed(
        group: Group,
        index: usize,
        value: f64,
        n_x: usize,
        n_y: usize,
        caps: Caps,
    ) -> Result<Self> {
        let dim = match group {
            Group::X => n_x,
            Group::Y => n_y,
        };
        if index >= dim {
            return Err(Error::IndexOutOfRange { group, index, dim });
        }
        if caps.get(group) == 0 {
            return Err(Error::ZeroCap(group));
        }
        let mut v = TaylorValue::constant(value, n_x, n_y, caps);
        let slot = match group {
            Group::X => index,
            Group::Y => n_x + index,
        };
        let mut e = vec![0u8; n_x + n_y];
        e[slot] = 1;
        let k = v.layout.position(&e).expect("unit monomial is always retained");
        v.coeffs[k] = 1.0;
        Ok(v)
    }

    /// Builds a jet from raw coefficients in layout order (see [`TaylorValue::indices`]).
    pub fn from_coefficients(n_x: usize, n_y: usize, caps: Caps, coeffs: Vec<f64>) -> Result<Self> {
        let layout = layout::layout(n_x, n_y, caps);
        if coeffs.len() != layout.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coefficients, got {}",
                layout.len(),
                coeffs.len()
            )));
        }
        Ok(TaylorValue { layout, coeffs })
    }

    /// Number of coefficients for a given shape.
    pub fn len_for(n_x: usize, n_y: usize, caps: Caps) -> usize {
        layout::layout(n_x, n_y, caps).len()
    }

    /// A constant with the same shape as `self`.
    pub fn constant_like(&self, value: f64) -> Self {
        let mut coeffs = vec![0.0; self.coeffs.len()];
        coeffs[0] = value;
        TaylorValue { layout: Arc::clone(&self.layout), coeffs }
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn caps(&self) -> Caps {
        self.layout.caps
    }

    pub fn n_x(&self) -> usize {
        self.layout.n_x
    }

    pub fn n_y(&self) -> usize {
        self.layout.n_y
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.layout.indices
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Raw (factorial-normalized) Taylor coefficient.
    pub fn coefficient(&self, idx: &MultiIndex) -> Result<f64> {
        self.slot(idx).map(|k| self.coeffs[k])
    }

    /// Mixed partial derivative `∂^idx f` at the expansion point.
    pub fn extract(&self, idx: &MultiIndex) -> Result<f64> {
        self.slot(idx).map(|k| self.coeffs[k] * self.layout.factorials[k])
    }

    /// Shorthand for [`extract`](Self::extract) with 0-based variable lists,
    /// e.g. `partial(&[0], &[1, 1])` is `∂_{x¹} ∂̇_{y²} ∂̇_{y²}`.
    pub fn partial(&self, xs: &[usize], ys: &[usize]) -> Result<f64> {
        let idx = MultiIndex::from_partials(self.n_x(), self.n_y(), xs, ys)?;
        self.extract(&idx)
    }

    fn slot(&self, idx: &MultiIndex) -> Result<usize> {
        if idx.n_x() != self.n_x() || idx.n_y() != self.n_y() {
            return Err(Error::ShapeMismatch(format!(
                "multi-index over ({}, {}) variables, jet over ({}, {})",
                idx.n_x(),
                idx.n_y(),
                self.n_x(),
                self.n_y()
            )));
        }
        self.layout.position(idx.exponents()).ok_or_else(|| Error::ExceedsCaps {
            index: idx.to_string(),
            x_cap: self.caps().x,
            y_cap: self.caps().y,
        })
    }

    pub fn check_shape(&self, other: &TaylorValue) -> Result<()> {
        if Arc::ptr_eq(&self.layout, &other.layout) || self.layout.same_shape(&other.layout) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "({}, {}, {:?}) vs ({}, {}, {:?})",
                self.n_x(),
                self.n_y(),
                self.caps(),
                other.n_x(),
                other.n_y(),
                other.caps()
            )))
        }
    }

    /// Drops every monomial outside `caps`.
    pub fn truncate(&self, caps: Caps) -> Result<TaylorValue> {
        if caps.x > self.caps().x || caps.y > self.caps().y {
            return Err(Error::ShapeMismatch(format!(
                "cannot widen caps {:?} to {:?} by truncation",
                self.caps(),
                caps
            )));
        }
        let layout = layout::layout(self.n_x(), self.n_y(), caps);
        let coeffs = layout
            .indices
            .iter()
            .map(|m| self.coeffs[self.layout.position(m.exponents()).expect("subset layout")])
            .collect();
        Ok(TaylorValue { layout, coeffs })
    }

    /// Partial derivative as a jet; the cap of `group` drops by one.
    pub fn derivative(&self, group: Group, index: usize) -> Result<TaylorValue> {
        let (dim, slot) = match group {
            Group::X => (self.n_x(), index),
            Group::Y => (self.n_y(), self.n_x() + index),
        };
        if index >= dim {
            return Err(Error::IndexOutOfRange { group, index, dim });
        }
        let mut caps = self.caps();
        match group {
            Group::X if caps.x == 0 => return Err(Error::ZeroCap(group)),
            Group::Y if caps.y == 0 => return Err(Error::ZeroCap(group)),
            Group::X => caps.x -= 1,
            Group::Y => caps.y -= 1,
        }
        let layout = layout::layout(self.n_x(), self.n_y(), caps);
        let mut e = vec![0u8; self.n_x() + self.n_y()];
        let coeffs = layout
            .indices
            .iter()
            .map(|m| {
                e.copy_from_slice(m.exponents());
                e[slot] += 1;
                let k = self.layout.position(&e).expect("raised index within original caps");
                f64::from(e[slot]) * self.coeffs[k]
            })
            .collect();
        Ok(TaylorValue { layout, coeffs })
    }

    pub fn checked_div(&self, other: &TaylorValue) -> Result<TaylorValue> {
        self.check_shape(other)?;
        Ok(self * &other.recip()?)
    }

    pub fn recip(&self) -> Result<TaylorValue> {
        let b0 = self.value();
        if !(b0.abs() > SINGULAR_TOL) {
            return Err(Error::Singular(b0));
        }
        let n = self.caps().total();
        let mut series = Vec::with_capacity(n + 1);
        let mut c = 1.0 / b0;
        for _ in 0..=n {
            series.push(c);
            c *= -1.0 / b0;
        }
        Ok(self.compose(&series))
    }

    pub fn square(&self) -> TaylorValue {
        self * self
    }

    pub fn sqrt(&self) -> Result<TaylorValue> {
        elementary(Elementary::Sqrt, self)
    }

    pub fn exp(&self) -> Result<TaylorValue> {
        elementary(Elementary::Exp, self)
    }

    pub fn ln(&self) -> Result<TaylorValue> {
        elementary(Elementary::Ln, self)
    }

    pub fn atan(&self) -> Result<TaylorValue> {
        elementary(Elementary::Arctan, self)
    }

    pub fn atanh(&self) -> Result<TaylorValue> {
        elementary(Elementary::Arctanh, self)
    }

    pub fn sin(&self) -> Result<TaylorValue> {
        elementary(Elementary::Sin, self)
    }

    pub fn cos(&self) -> Result<TaylorValue> {
        elementary(Elementary::Cos, self)
    }

    pub fn powf(&self, r: f64) -> Result<TaylorValue> {
        elementary(Elementary::Pow(r), self)
    }

    /// Evaluates `g(self)` given the Taylor coefficients `series[m] = g⁽ᵐ⁾(a₀)/m!`
    /// of `g` at `a₀ = self.value()`. Coefficients beyond the total cap are ignored;
    /// missing ones are taken as zero.
    pub fn compose(&self, series: &[f64]) -> TaylorValue {
        let n = self.caps().total().min(series.len().saturating_sub(1));
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut out = self.constant_like(series.get(n).copied().unwrap_or(0.0));
        for m in (0..n).rev() {
            out = &out * &delta;
            out.coeffs[0] += series[m];
        }
        out
    }

    fn mul_into(&self, other: &TaylorValue, out: &mut [f64]) {
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for &(j, k) in self.layout.row(i) {
                out[k as usize] += a * other.coeffs[j as usize];
            }
        }
    }
}

impl fmt::Debug for TaylorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (idx, c) in self.layout.indices.iter().zip(&self.coeffs) {
            if *c != 0.0 {
                m.entry(&format_args!("{idx}"), c);
            }
        }
        m.finish()
    }
}

fn assert_shape(a: &TaylorValue, b: &TaylorValue) {
    if let Err(e) = a.check_shape(b) {
        panic!("{e}");
    }
}

impl Add<&TaylorValue> for &TaylorValue {
    type Output = TaylorValue;
    fn add(self, rhs: &TaylorValue) -> TaylorValue {
        assert_shape(self, rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        TaylorValue { layout: Arc::clone(&self.layout), coeffs }
    }
}

impl Sub<&TaylorValue> for &TaylorValue {
    type Output = TaylorValue;
    fn sub(self, rhs: &TaylorValue) -> TaylorValue {
        assert_shape(self, rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        TaylorValue { layout: Arc::clone(&self.layout), coeffs }
    }
}

impl Mul<&TaylorValue> for &TaylorValue {
    type Output = TaylorValue;
    fn mul(self, rhs: &TaylorValue) -> TaylorValue {
        assert_shape(self, rhs);
        let mut coeffs = vec![0.0; self.coeffs.len()];
        self.mul_into(rhs, &mut coeffs);
        TaylorValue { layout: Arc::clone(&self.layout), coeffs }
    }
}

impl AddAssign<&TaylorValue> for TaylorValue {
    fn add_assign(&mut self, rhs: &TaylorValue) {
        assert_shape(self, rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Neg for &TaylorValue {
    type Output = TaylorValue;
    fn neg(self) -> TaylorValue {
        TaylorValue {
            layout: Arc::clone(&self.layout),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for TaylorValue {
    type Output = TaylorValue;
    fn neg(mut self) -> TaylorValue {
        self.coeffs.iter_mut().for_each(|c| *c = -*c);
        self
    }
}

impl Add<f64> for &TaylorValue {
    type Output = TaylorValue;
    fn add(self, rhs: f64) -> TaylorValue {
        let mut out = self.clone();
        out.coeffs[0] += rhs;
        out
    }
}

impl Sub<f64> for &TaylorValue {
    type Output = TaylorValue;
    fn sub(self, rhs: f64) -> TaylorValue {
        self + (-rhs)
    }
}

impl Mul<f64> for &TaylorValue {
    type Output = TaylorValue;
    fn mul(self, rhs: f64) -> TaylorValue {
        TaylorValue {
            layout: Arc::clone(&self.layout),
            coeffs: self.coeffs.iter().map(|c| c * rhs).collect(),
        }
    }
}

impl Add<&TaylorValue> for f64 {
    type Output = TaylorValue;
    fn add(self, rhs: &TaylorValue) -> TaylorValue {
        rhs + self
    }
}

impl Sub<&TaylorValue> for f64 {
    type Output = TaylorValue;
    fn sub(self, rhs: &TaylorValue) -> TaylorValue {
        &(-rhs) + self
    }
}

impl Mul<&TaylorValue> for f64 {
    type Output = TaylorValue;
    fn mul(self, rhs: &TaylorValue) -> TaylorValue {
        rhs * self
    }
}

// Owned-operand forwarding.
macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<TaylorValue> for TaylorValue {
            type Output = TaylorValue;
            fn $m(self, rhs: TaylorValue) -> TaylorValue { (&self).$m(&rhs) }
        }
        impl $tr<&TaylorValue> for TaylorValue {
            type Output = TaylorValue;
            fn $m(self, rhs: &TaylorValue) -> TaylorValue { (&self).$m(rhs) }
        }
        impl $tr<TaylorValue> for &TaylorValue {
            type Output = TaylorValue;
            fn $m(self, rhs: TaylorValue) -> TaylorValue { self.$m(&rhs) }
        }
        impl $tr<f64> for TaylorValue {
            type Output = TaylorValue;
            fn $m(self, rhs: f64) -> TaylorValue { (&self).$m(rhs) }
        }
        impl $tr<TaylorValue> for f64 {
            type Output = TaylorValue;
            fn $m(self, rhs: TaylorValue) -> TaylorValue { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

/// Seeds `x` (constants when `caps.x == 0`) and `y` at a point.
pub fn seed_point(x: &[f64], y: &[f64], caps: Caps) -> (Vec<TaylorValue>, Vec<TaylorValue>) {
    let (n_x, n_y) = (x.len(), y.len());
    let xs = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if caps.x == 0 {
                TaylorValue::constant(v, n_x, n_y, caps)
            } else {
                TaylorValue::seed(Group::X, i, v, n_x, n_y, caps).expect("index in range")
            }
        })
        .collect();
    let ys = y
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if caps.y == 0 {
                TaylorValue::constant(v, n_x, n_y, caps)
            } else {
                TaylorValue::seed(Group::Y, i, v, n_x, n_y, caps).expect("index in range")
            }
        })
        .collect();
    (xs, ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn y_seed(i: usize, v: f64) -> TaylorValue {
        TaylorValue::seed(Group::Y, i, v, 1, 3, Caps::default()).unwrap()
    }

    #[test]
    fn seeded_variable_has_unit_linear_term() {
        let v = y_seed(1, 3.0);
        assert_eq!(v.value(), 3.0);
        assert_eq!(v.partial(&[], &[1]).unwrap(), 1.0);
        assert_eq!(v.partial(&[], &[0]).unwrap(), 0.0);
        assert_eq!(v.partial(&[0], &[]).unwrap(), 0.0);
        let nonzero = v.coeffs().iter().filter(|c| **c != 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn seeded_x_at_zero() {
        let v = TaylorValue::seed(Group::X, 0, 0.0, 1, 3, Caps::default()).unwrap();
        assert_eq!(v.value(), 0.0);
        assert_eq!(v.partial(&[0], &[]).unwrap(), 1.0);
    }

    #[test]
    fn seed_errors() {
        assert!(matches!(
            TaylorValue::seed(Group::Y, 3, 1.0, 1, 3, Caps::default()),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert_eq!(
            TaylorValue::seed(Group::X, 0, 1.0, 1, 3, Caps::new(0, 5)).unwrap_err(),
            Error::ZeroCap(Group::X)
        );
    }

    #[test]
    fn square_of_shifted_variable() {
        let y = y_seed(0, 2.0);
        let sq = &y * &y;
        let idx2 = MultiIndex::from_partials(1, 3, &[], &[0, 0]).unwrap();
        assert_eq!(sq.value(), 4.0);
        assert_eq!(sq.partial(&[], &[0]).unwrap(), 4.0);
        assert_eq!(sq.coefficient(&idx2).unwrap(), 1.0);
    }

    #[test]
    fn self_quotient_is_one() {
        let y = y_seed(2, 1.5);
        let a = (&y * &y).exp().unwrap() + &y;
        let q = a.checked_div(&a).unwrap();
        assert_relative_eq!(q.value(), 1.0, epsilon = 1e-15);
        assert!(q.coeffs()[1..].iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn fifth_power_fifth_derivative() {
        let y = y_seed(0, 1.0);
        let mut p = y.clone();
        for _ in 0..4 {
            p = &p * &y;
        }
        assert_relative_eq!(p.partial(&[], &[0, 0, 0, 0, 0]).unwrap(), 120.0, epsilon = 1e-12);
    }

    #[test]
    fn cube_third_derivative() {
        let y = y_seed(1, 2.0);
        let c = &(&y * &y) * &y;
        assert_relative_eq!(c.partial(&[], &[1, 1, 1]).unwrap(), 6.0, epsilon = 1e-12);
    }

    #[test]
    fn extract_zero_index_is_value() {
        let y = y_seed(0, 0.7);
        let f = y.sin().unwrap();
        assert_eq!(f.extract(&MultiIndex::zero(1, 3)).unwrap(), 0.7f64.sin());
    }

    #[test]
    fn extract_beyond_caps_fails() {
        let y = TaylorValue::seed(Group::Y, 0, 1.0, 1, 3, Caps::new(0, 2)).unwrap();
        assert!(matches!(y.partial(&[], &[0, 0, 0]), Err(Error::ExceedsCaps { .. })));
        assert!(matches!(y.partial(&[0], &[]), Err(Error::ExceedsCaps { .. })));
    }

    #[test]
    fn division_by_vanishing_constant() {
        let y = y_seed(0, 0.0);
        assert_eq!(y_seed(1, 1.0).checked_div(&y).unwrap_err(), Error::Singular(0.0));
    }

    #[test]
    fn mismatched_caps_rejected_by_arith() {
        let a = y_seed(0, 1.0);
        let b = TaylorValue::seed(Group::Y, 0, 1.0, 1, 3, Caps::new(1, 4)).unwrap();
        assert!(matches!(arith(ArithOp::Add, &a, &b), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn derivative_lowers_cap_and_matches_extract() {
        let y0 = y_seed(0, 0.3);
        let y1 = y_seed(1, 1.2);
        let f = (&(&y0 * &y1) * &y1).exp().unwrap();
        let d = f.derivative(Group::Y, 1).unwrap();
        assert_eq!(d.caps(), Caps::new(1, 4));
        assert_relative_eq!(
            d.partial(&[], &[0, 1]).unwrap(),
            f.partial(&[], &[0, 1, 1]).unwrap(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn compose_with_geometric_series() {
        let y = y_seed(0, 0.0);
        // 1/(1-h) = Σ h^m
        let g = y.compose(&[1.0; 8]);
        assert_relative_eq!(g.partial(&[], &[0, 0, 0]).unwrap(), 6.0, epsilon = 1e-12);
    }
}
