use landsberg_core::{Caps, Group, TaylorValue};
use proptest::prelude::*;

const CAPS: Caps = Caps::new(2, 3);

fn jet(constant: std::ops::Range<f64>) -> impl Strategy<Value = TaylorValue> {
    let len = TaylorValue::len_for(1, 2, CAPS);
    (constant, prop::collection::vec(-1.0..1.0f64, len - 1)).prop_map(|(c, rest)| {
        let mut coeffs = vec![c];
        coeffs.extend(rest);
        TaylorValue::from_coefficients(1, 2, CAPS, coeffs).unwrap()
    })
}

fn direction() -> impl Strategy<Value = (Group, usize)> {
    prop_oneof![Just((Group::X, 0)), Just((Group::Y, 0)), Just((Group::Y, 1))]
}

fn close(a: &TaylorValue, b: &TaylorValue, tol: f64) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.coeffs().len(), b.coeffs().len());
    for (u, v) in a.coeffs().iter().zip(b.coeffs()) {
        prop_assert!((u - v).abs() <= tol * (1.0 + u.abs().max(v.abs())), "{} vs {}", u, v);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn product_rule(a in jet(-2.0..2.0), b in jet(-2.0..2.0), (g, i) in direction()) {
        let da = a.derivative(g, i).unwrap();
        let db = b.derivative(g, i).unwrap();
        let caps = da.caps();
        let lhs = (&a * &b).derivative(g, i).unwrap();
        let rhs = &(&da * &b.truncate(caps).unwrap()) + &(&a.truncate(caps).unwrap() * &db);
        close(&lhs, &rhs, 1e-12)?;
    }

    #[test]
    fn chain_rule(a in jet(-1.0..1.0), (g, i) in direction()) {
        let da = a.derivative(g, i).unwrap();
        for (outer, d_outer) in [(a.exp().unwrap(), a.exp().unwrap()), (a.sin().unwrap(), a.cos().unwrap())] {
            let lhs = outer.derivative(g, i).unwrap();
            let rhs = &d_outer.truncate(da.caps()).unwrap() * &da;
            close(&lhs, &rhs, 1e-12)?;
        }
    }

    #[test]
    fn exp_inverts_ln(b in jet(0.5..3.0)) {
        close(&b.ln().unwrap().exp().unwrap(), &b, 1e-11)?;
        close(&b.exp().unwrap().ln().unwrap(), &b, 1e-11)?;
    }

    #[test]
    fn truncation_commutes_with_arithmetic(a in jet(-2.0..2.0), b in jet(0.5..2.0), cx in 0u8..=2, cy in 0u8..=3) {
        let caps = Caps::new(cx, cy);
        let (at, bt) = (a.truncate(caps).unwrap(), b.truncate(caps).unwrap());
        close(&(&a * &b).truncate(caps).unwrap(), &(&at * &bt), 1e-13)?;
        close(&a.checked_div(&b).unwrap().truncate(caps).unwrap(), &at.checked_div(&bt).unwrap(), 1e-11)?;
        close(&b.sqrt().unwrap().truncate(caps).unwrap(), &bt.sqrt().unwrap(), 1e-12)?;
    }

    #[test]
    fn sqrt_squares_back(b in jet(0.5..3.0)) {
        close(&b.sqrt().unwrap().square(), &b, 1e-12)?;
    }
}
