//! Elementary functions on jets, by composition with their univariate Taylor series.

use super::{TaylorValue, SINGULAR_TOL};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Elementary {
    Sqrt,
    Exp,
    Ln,
    Arctan,
    /// Real branch: `atanh(z)` for `|z| < 1`, `½·ln((z+1)/(z−1))` for `|z| > 1`.
    /// Both share the derivative `1/(1−z²)`.
    Arctanh,
    Sin,
    Cos,
    Pow(f64),
}

impl Elementary {
    pub fn name(&self) -> &'static str {
        match self {
            Elementary::Sqrt => "sqrt",
            Elementary::Exp => "exp",
            Elementary::Ln => "ln",
            Elementary::Arctan => "arctan",
            Elementary::Arctanh => "arctanh",
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Pow(_) => "pow",
        }
    }
}

pub fn elementary(func: Elementary, a: &TaylorValue) -> Result<TaylorValue> {
    let series = univariate_series(func, a.value(), a.caps().total())?;
    Ok(a.compose(&series))
}

/// Taylor coefficients `g⁽ᵐ⁾(t)/m!`, `m = 0..=order`, of `func` at `t`.
pub fn univariate_series(func: Elementary, t: f64, order: usize) -> Result<Vec<f64>> {
    let domain = |ok: bool| {
        if ok && t.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain { func: func.name(), value: t })
        }
    };
    let mut c = Vec::with_capacity(order + 1);
    match func {
        Elementary::Exp => {
            domain(true)?;
            let e = t.exp();
            let mut fact = 1.0;
            for m in 0..=order {
                if m > 0 {
                    fact *= m as f64;
                }
                c.push(e / fact);
            }
        }
        Elementary::Ln => {
            domain(t > SINGULAR_TOL)?;
            c.push(t.ln());
            let mut p = 1.0;
            for m in 1..=order {
                p /= t;
                let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                c.push(sign * p / m as f64);
            }
        }
        Elementary::Sqrt => {
            domain(t > SINGULAR_TOL)?;
            return Ok(binomial_series(0.5, t, order));
        }
        Elementary::Pow(r) => {
            let integral = r.fract() == 0.0;
            domain(t > SINGULAR_TOL || (integral && (r >= 0.0 || t.abs() > SINGULAR_TOL)))?;
            return Ok(binomial_series(r, t, order));
        }
        Elementary::Arctan => {
            domain(true)?;
            // d/dt atan = 1/(1 + t²)
            let d = reciprocal_quadratic([1.0 + t * t, 2.0 * t, 1.0], order);
            c.push(t.atan());
            for m in 1..=order {
                c.push(d[m - 1] / m as f64);
            }
        }
        Elementary::Arctanh => {
            domain((1.0 - t * t).abs() > SINGULAR_TOL)?;
            // d/dt atanh = 1/(1 − t²) on both real branches
            let d = reciprocal_quadratic([1.0 - t * t, -2.0 * t, -1.0], order);
            c.push(if t.abs() < 1.0 {
                t.atanh()
            } else {
                0.5 * ((t + 1.0) / (t - 1.0)).ln()
            });
            for m in 1..=order {
                c.push(d[m - 1] / m as f64);
            }
        }
        Elementary::Sin | Elementary::Cos => {
            domain(true)?;
            let (s, co) = t.sin_cos();
            // derivatives cycle sin, cos, −sin, −cos
            let cycle = if func == Elementary::Sin {
                [s, co, -s, -co]
            } else {
                [co, -s, -co, s]
            };
            let mut fact = 1.0;
            for m in 0..=order {
                if m > 0 {
                    fact *= m as f64;
                }
                c.push(cycle[m % 4] / fact);
            }
        }
    }
    Ok(c)
}

/// Coefficients of `(t + h)^r` in powers of `h`.
fn binomial_series(r: f64, t: f64, order: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(order + 1);
    let mut coef = 1.0;
    for m in 0..=order {
        c.push(coef * t.powf(r - m as f64));
        coef *= (r - m as f64) / (m as f64 + 1.0);
    }
    c
}

/// Series of `1/(q0 + q1 h + q2 h²)` up to `h^(order-1)`.
fn reciprocal_quadratic(q: [f64; 3], order: usize) -> Vec<f64> {
    let mut r: Vec<f64> = Vec::with_capacity(order);
    for m in 0..order {
        let mut v = if m == 0 { 1.0 } else { 0.0 };
        if m >= 1 {
            v -= q[1] * r[m - 1];
        }
        if m >= 2 {
            v -= q[2] * r[m - 2];
        }
        r.push(v / q[0]);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{Caps, Group};
    use approx::assert_relative_eq;

    fn x0(v: f64) -> TaylorValue {
        TaylorValue::seed(Group::X, 0, v, 1, 1, Caps::new(1, 1)).unwrap()
    }

    #[test]
    fn exp_at_zero_in_x() {
        let e = x0(0.0).exp().unwrap();
        assert_eq!(e.value(), 1.0);
        assert_eq!(e.partial(&[0], &[]).unwrap(), 1.0);
    }

    #[test]
    fn sqrt_of_plain_constant() {
        let c = TaylorValue::constant(4.0, 1, 1, Caps::new(0, 0));
        assert_eq!(c.sqrt().unwrap().value(), 2.0);
    }

    #[test]
    fn sqrt_domain_error_carries_value() {
        let c = TaylorValue::constant(-1.0, 1, 1, Caps::new(1, 1));
        assert_eq!(c.sqrt().unwrap_err(), Error::Domain { func: "sqrt", value: -1.0 });
        let z = TaylorValue::constant(0.0, 1, 1, Caps::new(1, 1));
        assert!(z.ln().is_err());
    }

    #[test]
    fn series_match_known_derivatives() {
        let t = 0.4;
        let at = univariate_series(Elementary::Arctan, t, 3).unwrap();
        assert_relative_eq!(at[1], 1.0 / (1.0 + t * t), epsilon = 1e-15);
        assert_relative_eq!(at[2], -t / (1.0 + t * t).powi(2), epsilon = 1e-15);
        let ah = univariate_series(Elementary::Arctanh, t, 2).unwrap();
        assert_relative_eq!(ah[0], t.atanh(), epsilon = 1e-15);
        assert_relative_eq!(ah[2], t / (1.0 - t * t).powi(2), epsilon = 1e-15);
        let ln = univariate_series(Elementary::Ln, 2.0, 3).unwrap();
        assert_relative_eq!(ln[3], 1.0 / 24.0, epsilon = 1e-15);
        let p = univariate_series(Elementary::Pow(-1.5), 2.0, 2).unwrap();
        assert_relative_eq!(p[2], 0.5 * (-1.5) * (-2.5) * 2f64.powf(-3.5), epsilon = 1e-15);
    }

    #[test]
    fn arctanh_outer_branch_is_real() {
        let s = univariate_series(Elementary::Arctanh, 3.0, 2).unwrap();
        assert_relative_eq!(s[0], 0.5 * 2f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(s[1], 1.0 / (1.0 - 9.0), epsilon = 1e-15);
        assert!(univariate_series(Elementary::Arctanh, 1.0, 2).is_err());
    }

    #[test]
    fn integer_powers_of_negative_base() {
        let c = univariate_series(Elementary::Pow(3.0), -2.0, 4).unwrap();
        assert_eq!(c, vec![-8.0, 12.0, -6.0, 1.0, 0.0]);
        assert!(univariate_series(Elementary::Pow(0.5), -2.0, 1).is_err());
    }

    #[test]
    fn sin_cos_cycle() {
        let s = univariate_series(Elementary::Sin, 0.0, 3).unwrap();
        assert_relative_eq!(s[3], -1.0 / 6.0, epsilon = 1e-15);
        let c = univariate_series(Elementary::Cos, 0.0, 4).unwrap();
        assert_relative_eq!(c[4], 1.0 / 24.0, epsilon = 1e-15);
    }
}
