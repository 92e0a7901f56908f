//! Generating functions `φ(s)` of the catalog (α,β)-metrics, with `R = √(1 − s²)`.

use std::f64::consts::FRAC_PI_2;

use crate::alphabeta::PhiFunction;
use crate::error::{Error, Result};
use crate::jet::{TaylorValue, SINGULAR_TOL};

/// `arctan(num/den)`, switching to `±π/2 − arctan(den/num)` when `|num| > |den|`
/// so that a vanishing `den` stays regular. Equal to the principal value wherever
/// both are defined.
pub fn atan_ratio(num: &TaylorValue, den: &TaylorValue) -> Result<TaylorValue> {
    let (n0, d0) = (num.value(), den.value());
    if n0.abs() <= d0.abs() {
        num.checked_div(den)?.atan()
    } else {
        let sign = if (n0 > 0.0) == (d0 >= 0.0) { 1.0 } else { -1.0 };
        Ok(sign * FRAC_PI_2 - &den.checked_div(num)?.atan()?)
    }
}

/// Real branch of `arctanh(num/den)`: `½ln|(1 + z)/(1 − z)|`, which is invariant
/// under `z → 1/z`, so the argument with modulus below 1 is used.
pub fn atanh_ratio(num: &TaylorValue, den: &TaylorValue) -> Result<TaylorValue> {
    let (n0, d0) = (num.value(), den.value());
    if (n0.abs() - d0.abs()).abs() <= SINGULAR_TOL * n0.abs().max(d0.abs()) {
        return Err(Error::Domain { func: "arctanh", value: n0 / d0 });
    }
    if n0.abs() < d0.abs() {
        num.checked_div(den)?.atanh()
    } else {
        den.checked_div(num)?.atanh()
    }
}

/// `φ` of each parametrized family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClassPhi {
    /// `(as + R)·exp(as/(as + R))`
    Class1 { a: f64 },
    /// `((a+1)s + R)^((1+a)/2)·((a−1)s + R)^((1−a)/2)`
    Class2 { a: f64 },
    /// `as + (1 − s²)/(as + 2R)`
    Class3 { a: f64 },
    /// `√(1 + psR + qs²)·exp(…)`, arctanh form for `D = p² − 4q − 4 > 0`,
    /// arctan form for `D < 0`.
    Class4 { p: f64, q: f64 },
    /// `c₄√(1 + s(c₁R + c₃s))·exp(c₁ arctan ψ/√((2+c₃)² − r²))`, `r = √(c₁² + c₃²)`.
    /// `alternate` selects the second of the two equivalent `ψ` formulas.
    Shen { c1: f64, c3: f64, c4: f64, alternate: bool },
    /// `√(1 + gsR)·exp(g arctan ψ/√(4 − g²))`
    Asanov { g: f64 },
}

fn root(s: &TaylorValue) -> Result<TaylorValue> {
    (1.0 - &s.square()).sqrt()
}

impl ClassPhi {
    pub fn discriminant(p: f64, q: f64) -> f64 {
        p * p - 4.0 * q - 4.0
    }

    /// Smallest of the normalized quantities that must stay positive (or away
    /// from a singular value) at `s`; the sampler keeps it above a margin.
    pub fn margin(&self, s: f64) -> f64 {
        let r = (1.0 - s * s).max(0.0).sqrt();
        match *self {
            ClassPhi::Class1 { a } => (a * s + r) / (1.0 + a.abs()),
            ClassPhi::Class2 { a } => {
                (((a + 1.0) * s + r).min((a - 1.0) * s + r)) / (1.0 + a.abs())
            }
            ClassPhi::Class3 { a } => (a * s + 2.0 * r).abs() / (2.0 + a.abs()),
            ClassPhi::Class4 { p, q } => {
                let base = (1.0 + p * s * r + q * s * s) / (1.0 + p.abs() + q.abs());
                let d = Self::discriminant(p, q);
                if d > 0.0 {
                    let (num, den) = ((p * s + 2.0 * r).abs(), (s * d.sqrt()).abs());
                    base.min((num - den).abs() / num.max(den))
                } else {
                    base
                }
            }
            ClassPhi::Shen { c1, c3, .. } => {
                (1.0 + s * (c1 * r + c3 * s)) / (1.0 + c1.abs() + c3.abs())
            }
            ClassPhi::Asanov { g } => (1.0 + g * s * r) / (1.0 + g.abs()),
        }
    }

    /// `Q = pR + qs` for the families where it is affine in `(R, s)`.
    pub fn q_coefficients(&self) -> (f64, f64) {
        match *self {
            ClassPhi::Class1 { a } => (2.0 * a, a * a - 1.0),
            ClassPhi::Class2 { a } => (2.0 * a, a * a - 2.0),
            ClassPhi::Class3 { a } => (1.5 * a, (a * a - 2.0) / 2.0),
            ClassPhi::Class4 { p, q } => (p, q),
            ClassPhi::Shen { c1, c3, .. } => (c1, c3),
            ClassPhi::Asanov { g } => (g, 0.0),
        }
    }
}

impl PhiFunction for ClassPhi {
    fn eval(&self, s: &TaylorValue) -> Result<TaylorValue> {
        let r = root(s)?;
        match *self {
            ClassPhi::Class1 { a } => {
                let base = &(s * a) + &r;
                Ok(&base * &(s * a).checked_div(&base)?.exp()?)
            }
            ClassPhi::Class2 { a } => {
                let u = &(s * (a + 1.0)) + &r;
                let v = &(s * (a - 1.0)) + &r;
                Ok(&u.powf((1.0 + a) / 2.0)? * &v.powf((1.0 - a) / 2.0)?)
            }
            ClassPhi::Class3 { a } => {
                let den = &(s * a) + &(&r * 2.0);
                Ok(&(s * a) + &(1.0 - &s.square()).checked_div(&den)?)
            }
            ClassPhi::Class4 { p, q } => {
                let d = Self::discriminant(p, q);
                let amp = (&(1.0 + &(&(s * p) * &r)) + &(&s.square() * q)).sqrt()?;
                let num = &(s * p) + &(&r * 2.0);
                let expo = if d > 0.0 {
                    atanh_ratio(&num, &(s * d.sqrt()))? * (p / d.sqrt())
                } else if d < 0.0 {
                    let k = (-d).sqrt();
                    atan_ratio(&num, &(s * k))? * (-p / k)
                } else {
                    return Err(Error::InvalidParameter(
                        "class4 with p^2 - 4q - 4 = 0 is evaluated as class1".into(),
                    ));
                };
                Ok(&amp * &expo.exp()?)
            }
            ClassPhi::Shen { c1, c3, c4, alternate } => {
                let rr = (c1 * c1 + c3 * c3).sqrt();
                let delta = (2.0 + c3).powi(2) - rr * rr;
                if !(delta > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "(2 + c3)^2 - (c1^2 + c3^2) must be positive, got {delta}"
                    )));
                }
                let amp = (1.0 + &(s * &(&(&r * c1) + &(s * c3)))).sqrt()?;
                let (num, den) = if alternate {
                    (
                        &(s * ((2.0 + c3) * c3 + rr * (rr - c1))) + &(&r * (c3 * rr - (2.0 + c3) * (rr - c1))),
                        &(&(&r * c3) + &(s * (rr - c1))) * delta.sqrt(),
                    )
                } else {
                    (
                        &(s * (c3 * rr + (2.0 + c3) * (c1 + rr))) + &(&r * (rr * (c1 + rr) - (2.0 + c3) * c3)),
                        &(&(s * c3) + &(&r * (c1 + rr))) * delta.sqrt(),
                    )
                };
                let expo = atan_ratio(&num, &den)? * (c1 / delta.sqrt());
                Ok(&(&amp * &expo.exp()?) * c4)
            }
            ClassPhi::Asanov { g } => {
                let w = (4.0 - g * g).sqrt();
                let amp = (1.0 + &(&(s * g) * &r)).sqrt()?;
                let at = if g > 0.0 {
                    atan_ratio(&(&(s * 2.0) + &(&r * g)), &(&r * w))?
                } else {
                    atan_ratio(&-(&(s * g) + &(&r * 2.0)), &(s * w))?
                };
                Ok(&amp * &(at * (g / w)).exp()?)
            }
        }
    }

    fn label(&self) -> String {
        match *self {
            ClassPhi::Class1 { a } => format!("class1(a = {a})"),
            ClassPhi::Class2 { a } => format!("class2(a = {a})"),
            ClassPhi::Class3 { a } => format!("class3(a = {a})"),
            ClassPhi::Class4 { p, q } => format!("class4(p = {p}, q = {q})"),
            ClassPhi::Shen { c1, c3, c4, .. } => format!("shen(c1 = {c1}, c3 = {c3}, c4 = {c4})"),
            ClassPhi::Asanov { g } => format!("asanov(g = {g})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabeta::q_theta;
    use crate::jet::{Caps, Group};
    use approx::assert_relative_eq;

    fn c(v: f64) -> TaylorValue {
        TaylorValue::seed(Group::X, 0, v, 1, 0, Caps::new(2, 0)).unwrap()
    }

    #[test]
    fn atan_ratio_matches_principal_value_and_stays_smooth() {
        for (n, d) in [(0.3, 2.0), (3.0, 0.5), (-3.0, 0.5), (3.0, -0.5), (-2.0, -1.0)] {
            let v = atan_ratio(&c(n), &c(d)).unwrap();
            assert_relative_eq!(v.value(), (n / d).atan(), epsilon = 1e-15);
            // d/dt arctan(t/d0 …) with num = den = t seeds: derivative of atan(n(t)/d(t))
            let expected = (d - n) / (n * n + d * d);
            assert_relative_eq!(v.partial(&[0], &[]).unwrap(), expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn atanh_ratio_real_branch() {
        let v = atanh_ratio(&c(3.0), &c(1.0)).unwrap();
        assert_relative_eq!(v.value(), 0.5 * 2f64.ln(), epsilon = 1e-15);
        let w = atanh_ratio(&c(1.0), &c(3.0)).unwrap();
        assert_relative_eq!(w.value(), v.value(), epsilon = 1e-15);
        assert!(atanh_ratio(&c(2.0), &c(-2.0)).is_err());
    }

    #[test]
    fn q_is_affine_in_root_and_s() {
        let phis = [
            ClassPhi::Class1 { a: 2.0 },
            ClassPhi::Class1 { a: -0.5 },
            ClassPhi::Class2 { a: -3.0 },
            ClassPhi::Class2 { a: 0.5 },
            ClassPhi::Class3 { a: 2.0 },
            ClassPhi::Class4 { p: 3.0, q: 1.0 },
            ClassPhi::Class4 { p: 1.0, q: 0.0 },
            ClassPhi::Class4 { p: -2.0, q: 3.0 },
            ClassPhi::Shen { c1: 1.0, c3: 0.5, c4: 2.0, alternate: false },
            ClassPhi::Shen { c1: 1.0, c3: 0.5, c4: 2.0, alternate: true },
            ClassPhi::Asanov { g: 1.0 },
            ClassPhi::Asanov { g: -1.5 },
        ];
        for phi in phis {
            let (p, q) = phi.q_coefficients();
            for s in [-0.6, -0.2, 0.15, 0.4, 0.7] {
                if phi.margin(s) < 0.02 {
                    continue;
                }
                let r = (1.0 - s * s).sqrt();
                let qt = q_theta(&phi, s, 1.0).unwrap();
                assert_relative_eq!(qt.q, p * r + q * s, max_relative = 1e-11);
                assert_relative_eq!(qt.theta, p / (2.0 * (1.0 + q) * r), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn shen_psi_forms_agree() {
        let a = ClassPhi::Shen { c1: 1.2, c3: 0.3, c4: 1.0, alternate: false };
        let b = ClassPhi::Shen { c1: 1.2, c3: 0.3, c4: 1.0, alternate: true };
        let mut ratios = Vec::new();
        for s in [-0.5, -0.1, 0.2, 0.6] {
            ratios.push(a.value(s).unwrap() / b.value(s).unwrap());
        }
        for r in &ratios {
            assert_relative_eq!(*r, ratios[0], max_relative = 1e-12);
        }
    }
}
