use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use landsberg_core::{
    build_finsler, classify, parse_expr, Caps, ChartPoint, ClassId, ClassParams, Direction, GeodesicSpray,
    MetricClassSpec, PointTensors, SamplePlan, TaylorValue,
};

fn spec() -> MetricClassSpec {
    let f = Arc::new(parse_expr("2 + sin(x1)").unwrap());
    MetricClassSpec::with_defaults(ClassId::Class2, ClassParams::A(-3.0), f).unwrap()
}

fn jets(c: &mut Criterion) {
    let mut group = c.benchmark_group("jet_product");
    for caps in [Caps::new(1, 3), Caps::new(2, 3), Caps::new(1, 5)] {
        let len = TaylorValue::len_for(1, 3, caps);
        let a = TaylorValue::from_coefficients(1, 3, caps, (0..len).map(|i| 1.0 + i as f64 * 0.01).collect()).unwrap();
        let b = TaylorValue::from_coefficients(1, 3, caps, (0..len).map(|i| 0.5 - i as f64 * 0.02).collect()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("{}x{}", caps.x, caps.y)), &(a, b), |bench, (a, b)| {
            bench.iter(|| black_box(a) * black_box(b))
        });
    }
    group.finish();
}

fn tensors(c: &mut Criterion) {
    let s = spec();
    let m = build_finsler(&s).unwrap();
    let cf = s.closed_form_spray().unwrap();
    let ad = GeodesicSpray::new(Arc::new(build_finsler(&s).unwrap()));
    let r = classify(&m, Some(&cf), &SamplePlan::new(1, 1)).unwrap();
    let x = ChartPoint::new(r.samples[0].x.clone()).unwrap();
    let y = Direction::new(r.samples[0].y.clone()).unwrap();

    let mut group = c.benchmark_group("point_tensors");
    group.bench_function("closed_form", |b| b.iter(|| PointTensors::compute(&m, &cf, black_box(&x), black_box(&y)).unwrap()));
    group.bench_function("ad", |b| b.iter(|| PointTensors::compute(&m, &ad, black_box(&x), black_box(&y)).unwrap()));
    group.finish();
}

fn classification(c: &mut Criterion) {
    let s = spec();
    let m = build_finsler(&s).unwrap();
    let cf = s.closed_form_spray().unwrap();
    let plan = SamplePlan::new(50, 7);

    let mut group = c.benchmark_group("classify_50");
    group.sample_size(20);
    group.bench_function("closed_form", |b| b.iter(|| classify(&m, Some(&cf), &plan).unwrap()));
    group.bench_function("ad", |b| b.iter(|| classify(&m, None, &plan).unwrap()));
    group.finish();
}

criterion_group!(benches, jets, tensors, classification);
criterion_main!(benches);
