//! Seeded random seed configurations: one SplitMix64 stream per trial.

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;

use crate::affine_fit::barycentric;
use crate::cost::CostModel;
use crate::linalg::vector;

const STREAM_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream `i` starts at state `master ^ (i·0x9E3779B97F4A7C15)`.
pub fn trial_rng(master: u64, trial: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(master ^ trial.wrapping_mul(STREAM_STRIDE))
}

/// Acceptance test for random seed points around `x0 = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeedGuard {
    /// Every barycentric weight of `0` must be at least this.
    pub lambda_min: f64,
    /// Smallest allowed gap between seed `g`-values (radial costs only).
    pub min_a_gap: f64,
    pub max_attempts: usize,
}

impl Default for SeedGuard {
    fn default() -> Self {
        Self { lambda_min: 0.02, min_a_gap: 1e-5, max_attempts: 100_000 }
    }
}

pub fn unit_vector(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = vector::norm(&v);
        if n > 1e-12 {
            return vector::scale(&v, 1.0 / n);
        }
    }
}

/// `d+1` points, each a uniform direction times a radius in `[0.5, 1.5]`.
pub fn raw_seeds(rng: &mut impl Rng, d: usize) -> Vec<Vec<f64>> {
    (0..=d)
        .map(|_| {
            let dir = unit_vector(rng, d);
            vector::scale(&dir, rng.gen_range(0.5..1.5))
        })
        .collect()
}

/// Seeds with `0` well inside their hull, plus the number of rejected draws.
pub fn sample_seeds(rng: &mut impl Rng, d: usize, cost: &CostModel, guard: &SeedGuard) -> Option<(Vec<Vec<f64>>, usize)> {
    let origin = vec![0.0; d];
    for attempt in 0..guard.max_attempts {
        let pts = raw_seeds(rng, d);
        let Ok(b) = barycentric(&origin, &pts) else { continue };
        if b.lambdas.iter().any(|l| *l < guard.lambda_min) {
            continue;
        }
        if cost.is_radial() {
            let mut a: Vec<f64> = match pts.iter().map(|y| cost.g_of(vector::norm(y))).collect() {
                Ok(a) => a,
                Err(_) => continue,
            };
            a.sort_by(|x, y| x.total_cmp(y));
            if a.windows(2).any(|w| w[1] - w[0] < guard.min_a_gap) {
                continue;
            }
        }
        return Some((pts, attempt));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(42, 3).gen()).collect();
        let b: Vec<u64> = (0..4).map(|_| trial_rng(42, 3).gen()).collect();
        assert_eq!(a, b);
        assert_ne!(trial_rng(42, 3).gen::<u64>(), trial_rng(42, 4).gen::<u64>());
        assert_eq!(trial_rng(7, 0).gen::<u64>(), SplitMix64::seed_from_u64(7).gen::<u64>());
    }

    #[test]
    fn guarded_seeds_contain_origin() {
        let c = CostModel::power(0.5).unwrap();
        let mut rng = trial_rng(1, 0);
        for d in 1..=4 {
            let (pts, _) = sample_seeds(&mut rng, d, &c, &SeedGuard::default()).unwrap();
            let b = barycentric(&vec![0.0; d], &pts).unwrap();
            assert!(b.lambdas.iter().all(|l| *l >= 0.02));
            for p in &pts {
                let r = vector::norm(p);
                assert!((0.5..=1.5).contains(&r));
            }
        }
    }
}
