use std::sync::Arc;

use approx::assert_relative_eq;
use landsberg_core::alphabeta::AlphaField;
use landsberg_core::catalog::{catalog_entries, expected_berwald_component, SpecialFormSpray};
use landsberg_core::geometry::{
    berwald_tensor, euler_residual, geodesic_spray, horizontal_differential, landsberg_tensor, metric_tensor, ZeroSpray,
};
use landsberg_core::verify::{classify, draw_samples, ClassificationReport, SamplePlan, Verdict};
use landsberg_core::*;

fn f_of(src: &str) -> Arc<dyn ScalarFunction> {
    Arc::new(parse_expr(src).unwrap())
}

fn at(x: &[f64], y: &[f64]) -> (ChartPoint, Direction) {
    (ChartPoint::new(x.to_vec()).unwrap(), Direction::new(y.to_vec()).unwrap())
}

fn spec(class: ClassId, params: ClassParams, form: QuadraticForm, n: usize) -> MetricClassSpec {
    MetricClassSpec::new(class, params, f_of("exp(x1)"), form, n).unwrap()
}

#[test]
fn first_example_spray_by_hand() {
    let s = MetricClassSpec::with_defaults(ClassId::Example31, ClassParams::None, f_of("exp(x1)")).unwrap();
    let m = build_finsler(&s).unwrap();
    let (x, y) = at(&[0.0; 3], &[1.0; 3]);
    let g = geodesic_spray(&m, &x, &y).unwrap();
    assert!(g[0].abs() < 1e-12);
    assert_relative_eq!(g[1], 1.5, epsilon = 1e-12);
    assert_relative_eq!(g[2], 1.5, epsilon = 1e-12);
}

#[test]
fn class1_spray_by_hand() {
    let s = spec(ClassId::Class1, ClassParams::A(2.0), QuadraticForm::Product, 3);
    let m = build_finsler(&s).unwrap();
    let (x, y) = at(&[0.0; 3], &[1.0; 3]);
    let g = geodesic_spray(&m, &x, &y).unwrap();
    assert_relative_eq!(g[0], 0.375, epsilon = 1e-12);
    let p = s.closed_form_spray().unwrap().p_jet(&[0.0; 3], &[1.0; 3], Caps::new(0, 0)).unwrap();
    assert_relative_eq!(p.value(), 1.5, epsilon = 1e-14);
    assert_relative_eq!(g[1], 1.5, epsilon = 1e-12);
}

#[test]
fn alpha_with_unit_factor_is_euclidean() {
    let setup = RiemannSetup::new(f_of("1"), QuadraticForm::Euclid, 3).unwrap();
    let alpha = AlphaField(Arc::new(setup));
    let (x, y) = at(&[0.3, 0.0, 0.0], &[0.2, -0.7, 1.1]);
    let g = metric_tensor(&alpha, &x, &y).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!((g[[i, j]] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-13);
        }
    }
}

#[test]
fn flat_spray_does_not_metrize_a_catalog_metric() {
    let s = spec(ClassId::Class1, ClassParams::A(2.0), QuadraticForm::Product, 3);
    let m = build_finsler(&s).unwrap();
    let (x, y) = at(&[0.1, 0.0, 0.0], &[0.3, 0.8, 0.5]);
    let h = horizontal_differential(&m, &ZeroSpray(3), &x, &y).unwrap();
    assert!(h.iter().map(|v| v.abs()).fold(0.0, f64::max) > 1e-3);
    let closed = s.closed_form_spray().unwrap();
    let h = horizontal_differential(&m, &closed, &x, &y).unwrap();
    assert!(h.iter().all(|v| v.abs() < 1e-12));
}

struct Squared(CatalogMetric);

impl FinslerField for Squared {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, x: &[TaylorValue], y: &[TaylorValue]) -> Result<TaylorValue> {
        Ok(self.0.eval(x, y)?.square())
    }

    fn label(&self) -> String {
        format!("({})^2", self.0.label())
    }
}

#[test]
fn euler_residual_sees_the_degree() {
    let s = spec(ClassId::Class3, ClassParams::A(2.0), QuadraticForm::Euclid, 3);
    let m = build_finsler(&s).unwrap();
    let (x, y) = at(&[0.0; 3], &[0.2, 0.6, -0.4]);
    let f = field_value(&m, &x, &y);
    assert!(euler_residual(&m, &x, &y).unwrap() < 1e-13);
    assert_relative_eq!(euler_residual(&Squared(m), &x, &y).unwrap(), f * f, max_relative = 1e-12);
}

fn field_value(m: &dyn FinslerField, x: &ChartPoint, y: &Direction) -> f64 {
    landsberg_core::geometry::field_jet(m, x, y, Caps::new(0, 0)).unwrap().value()
}

#[test]
fn printed_berwald_components_match() {
    let cases = [
        spec(ClassId::Class1, ClassParams::A(2.0), QuadraticForm::Product, 3),
        spec(ClassId::Class1, ClassParams::A(-0.5), QuadraticForm::Euclid, 3),
        spec(ClassId::Class2, ClassParams::A(2.0), QuadraticForm::Product, 3),
        spec(ClassId::Class2, ClassParams::A(-3.0), QuadraticForm::Euclid, 3),
        spec(ClassId::Class3, ClassParams::A(2.0), QuadraticForm::Product, 3),
        spec(ClassId::Class3, ClassParams::A(0.5), QuadraticForm::Euclid, 3),
        spec(ClassId::Example31, ClassParams::None, QuadraticForm::Product, 3),
        spec(ClassId::Example32, ClassParams::None, QuadraticForm::Euclid, 3),
        spec(ClassId::Example33, ClassParams::None, QuadraticForm::Mixed4, 4),
    ];
    let plan = SamplePlan::new(15, 21);
    for s in cases {
        let m = build_finsler(&s).unwrap();
        let closed = s.closed_form_spray().unwrap();
        let ad = GeodesicSpray::new(Arc::new(build_finsler(&s).unwrap()));
        for smp in draw_samples(s.n, &plan, |x: &[f64], y: &[f64]| m.admissible(x, y)).unwrap() {
            let (x, y) = at(&smp.x, &smp.y);
            let want = expected_berwald_component(&s, &smp.x, &smp.y).unwrap();
            let cf = berwald_tensor(&closed, &x, &y).unwrap()[[1, 1, 1, 1]];
            let by_ad = berwald_tensor(&ad, &x, &y).unwrap()[[1, 1, 1, 1]];
            assert!((cf - want).abs() <= 1e-9 * want.abs().max(1.0), "{}: {cf} vs {want}", s.label());
            assert!((by_ad - want).abs() <= 1e-7 * want.abs().max(1.0), "{}: {by_ad} vs {want}", s.label());
        }
    }
}

#[test]
fn no_printed_component_for_other_families() {
    let s = spec(ClassId::Class4, ClassParams::PQ { p: 3.0, q: 1.0 }, QuadraticForm::Product, 3);
    assert!(matches!(expected_berwald_component(&s, &[0.0; 3], &[0.1, 1.0, 1.0]), Err(Error::NoPrintedComponent(_))));
}

#[test]
fn landsberg_tensor_is_scale_invariant() {
    let s = spec(ClassId::Class2, ClassParams::A(0.5), QuadraticForm::Euclid, 3);
    let m = build_finsler(&s).unwrap();
    let closed = s.closed_form_spray().unwrap();
    let perturbed = landsberg_core::catalog::PerturbedSpray { base: closed, epsilon: 0.1 };
    let (x, y) = at(&[0.2, 0.0, 0.0], &[0.3, 0.6, -0.5]);
    let l1 = landsberg_tensor(&m, &perturbed, &x, &y).unwrap();
    let l2 = landsberg_tensor(&m, &perturbed, &x, &y.scaled(2.5).unwrap()).unwrap();
    assert!(l1.iter().map(|v| v.abs()).fold(0.0, f64::max) > 1e-3);
    for (a, b) in l1.iter().zip(&l2) {
        assert!((a - b).abs() < 1e-11, "{a} vs {b}");
    }
}

#[test]
fn closed_form_spray_is_quadratic_and_p_homogeneous() {
    let s = spec(ClassId::Class4, ClassParams::PQ { p: -2.0, q: 3.0 }, QuadraticForm::Mixed4, 4);
    let closed = s.closed_form_spray().unwrap();
    let (x, y) = ([0.1, 0.0, 0.0, 0.0], [0.2, 0.7, 0.5, -0.3]);
    let y3: Vec<f64> = y.iter().map(|v| 3.0 * v).collect();
    let g = closed.eval(&x, &y, Caps::new(0, 0)).unwrap();
    let g3 = closed.eval(&x, &y3, Caps::new(0, 0)).unwrap();
    for (a, b) in g.iter().zip(&g3) {
        assert_relative_eq!(b.value(), 9.0 * a.value(), max_relative = 1e-13);
    }
    let p = closed.p_jet(&x, &y, Caps::new(0, 1)).unwrap();
    let euler: f64 = (0..4).map(|i| y[i] * p.partial(&[], &[i]).unwrap()).sum();
    assert_relative_eq!(euler, p.value(), max_relative = 1e-13);
    assert!(p.partial(&[], &[0]).unwrap() != 0.0);
}

#[test]
fn every_entry_has_its_expected_verdict_through_ad() {
    let plan = SamplePlan::new(10, 4);
    for entry in catalog_entries() {
        let params = match entry.id {
            ClassId::Class1 | ClassId::Class2 | ClassId::Class3 => ClassParams::A(2.0),
            ClassId::Class4 => ClassParams::PQ { p: 1.0, q: 0.0 },
            ClassId::ShenEq8 => ClassParams::Shen { c1: 1.0, c3: 0.5, c4: 1.0 },
            ClassId::AsanovEq9 => ClassParams::Asanov { g: -1.0 },
            _ => ClassParams::None,
        };
        let s = MetricClassSpec::with_defaults(entry.id, params, f_of("exp(x1)")).unwrap();
        let m = build_finsler(&s).unwrap();
        let r = classify(&m, None, &plan).unwrap();
        assert_eq!(r.verdict, entry.expected, "{}", s.label());
        assert!(r.residuals.identities.max < 1e-7, "{}: {:e}", s.label(), r.residuals.identities.max);
        assert!(!r.riemannian);
    }
}

#[test]
fn closed_form_path_satisfies_the_spray_identities() {
    let plan = SamplePlan::new(20, 5);
    for (class, params) in [
        (ClassId::Class2, ClassParams::A(-3.0)),
        (ClassId::Class3, ClassParams::A(-0.5)),
        (ClassId::ShenEq8, ClassParams::Shen { c1: 3.0, c3: 1.0, c4: 2.0 }),
    ] {
        let s = MetricClassSpec::with_defaults(class, params, f_of("2 + sin(x1)")).unwrap();
        let m = build_finsler(&s).unwrap();
        let r = classify(&m, Some(&s.closed_form_spray().unwrap()), &plan).unwrap();
        assert_eq!(r.verdict, Verdict::LandsbergNonBerwald);
        assert!(r.metrizable);
        assert!(r.residuals.identities.max < 1e-9);
        assert!(r.residuals.spray_match.max < 1e-8);
    }
}

#[test]
fn report_round_trips_through_json() {
    let s = MetricClassSpec::with_defaults(ClassId::Example32, ClassParams::None, f_of("exp(x1)")).unwrap();
    let m = build_finsler(&s).unwrap();
    let r = classify(&m, Some(&s.closed_form_spray().unwrap()), &SamplePlan::new(5, 1)).unwrap();
    let back: ClassificationReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back.to_json(), r.to_json());
    assert_eq!(back.verdict, r.verdict);
}

#[test]
fn riemannian_metric_is_flagged() {
    let setup = Arc::new(RiemannSetup::new(f_of("exp(x1)"), QuadraticForm::Euclid, 3).unwrap());
    let alpha = AlphaField(setup.clone());
    let r = classify(&alpha, None, &SamplePlan::new(10, 2)).unwrap();
    assert!(r.riemannian);
    assert_eq!(r.verdict, Verdict::Berwald);
}
