use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SamplePlan;
use crate::error::{Error, Result};

/// One admissible point, `y` normalized to unit length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub index: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Draws `plan.n_points` samples accepted by `guard`. Sample `i` uses its own
/// ChaCha stream `(seed, i)`, so the result does not depend on scheduling.
pub fn draw_samples<G>(n: usize, plan: &SamplePlan, guard: G) -> Result<Vec<Sample>>
where
    G: Fn(&[f64], &[f64]) -> bool + Sync,
{
    plan.validate()?;
    let cos_limit = plan.exclusion_angle.cos();
    let results: Vec<std::result::Result<Sample, usize>> = (0..plan.n_points)
        .into_par_iter()
        .map(|index| draw_one(n, plan, cos_limit, index, &guard))
        .collect();
    let mut samples = Vec::with_capacity(results.len());
    let mut attempts = 0usize;
    let mut starved = false;
    for r in results {
        match r {
            Ok(s) => samples.push(s),
            Err(a) => {
                attempts += a;
                starved = true;
            }
        }
    }
    if starved {
        let total = attempts + samples.len();
        return Err(Error::SamplerStarvation {
            accepted: samples.len(),
            requested: plan.n_points,
            attempts: total,
            rejection_rate: attempts as f64 / total.max(1) as f64,
        });
    }
    Ok(samples)
}

fn draw_one<G>(n: usize, plan: &SamplePlan, cos_limit: f64, index: usize, guard: &G) -> std::result::Result<Sample, usize>
where
    G: Fn(&[f64], &[f64]) -> bool,
{
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    rng.set_stream(index as u64);
    let (lo, hi) = plan.x_range;
    for _ in 0..plan.max_attempts {
        let x: Vec<f64> = (0..n).map(|_| if hi > lo { rng.gen_range(lo..hi) } else { lo }).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r2: f64 = y.iter().map(|v| v * v).sum();
        if !(1e-6..=1.0).contains(&r2) {
            continue;
        }
        let r = r2.sqrt();
        let y: Vec<f64> = y.iter().map(|v| v / r).collect();
        if y[0].abs() > cos_limit {
            continue;
        }
        if guard(&x, &y) {
            return Ok(Sample { index, x, y });
        }
    }
    Err(plan.max_attempts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_guarded() {
        let plan = SamplePlan { n_points: 30, seed: 11, ..SamplePlan::default() };
        let guard = |_: &[f64], y: &[f64]| y[1] * y[2] > 0.05;
        let a = draw_samples(3, &plan, guard).unwrap();
        let b = draw_samples(3, &plan, guard).unwrap();
        assert_eq!(a, b);
        for s in &a {
            assert!(s.y[1] * s.y[2] > 0.05);
            assert!(s.y[0].abs() <= plan.exclusion_angle.cos());
            assert!((s.y.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(s.x[0] >= -0.5 && s.x[0] < 0.5);
        }
        let other = draw_samples(3, &SamplePlan { seed: 12, ..plan.clone() }, guard).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn starvation_reports_rate() {
        let plan = SamplePlan { n_points: 4, max_attempts: 50, ..SamplePlan::default() };
        match draw_samples(3, &plan, |_: &[f64], _: &[f64]| false) {
            Err(Error::SamplerStarvation { accepted, rejection_rate, .. }) => {
                assert_eq!(accepted, 0);
                assert_eq!(rejection_rate, 1.0);
            }
            other => panic!("expected starvation, got {other:?}"),
        }
    }
}
