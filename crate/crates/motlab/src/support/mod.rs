//! The structure set `S₀ = {y : c_x(x0, y) = A(y)}` for each cost family.

mod hull;
mod norms;
mod power;
mod radial;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affine_fit::{FitError, Interlacing};
use crate::cost::{CostError, CostModel};
use crate::linalg::{kernel_basis, min_norm_solve, vector, AffineMap, RootError, SquareMatrix};
use crate::lp::LpError;
use crate::signomial::{IsolationOptions, SignomialError};

pub use hull::{
    choquet_check, hull_statuses, interior_check, max_min_weight, max_min_weights, smallest_point_analysis, HullStatus,
    SmallestPoint,
};
pub use norms::{solve_support_norm1, solve_support_norminf, QuadrantPiece};
pub use power::{solve_support_power, solve_support_power_with};
pub use radial::{solve_support_radial, solve_support_radial_with};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SupportError {
    #[error("degenerate seeds: {0}")]
    DegenerateSeeds(FitError),
    #[error("x0 is not strictly inside the hull of the seeds")]
    NotInterior,
    #[error(transparent)]
    Fit(FitError),
    #[error(transparent)]
    Signomial(#[from] SignomialError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("g is not monotone, so the fixed-point scan does not apply")]
    NonMonotoneG,
    #[error("{op} needs {need}")]
    WrongCost { op: &'static str, need: &'static str },
    #[error("operation needs a finite support, found {0} sphere components")]
    InfiniteSupport(usize),
    #[error("two points tie for the smallest distance to x0")]
    TieBreak,
}

impl From<FitError> for SupportError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::DegenerateSimplex { .. } | FitError::WrongPointCount { .. } => Self::DegenerateSeeds(e),
            other => Self::Fit(other),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointClass {
    /// One of the `d+1` input points.
    Seed,
    /// A further root between the seed `g`-values.
    New,
    /// The root beyond the range of seed `g`-values.
    FirstCrossing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolatedPoint {
    pub point: Vec<f64>,
    /// `a = g(|y − x0|)`, the curve parameter.
    pub tvalue: f64,
    pub multiplicity: usize,
    pub class: PointClass,
}

/// `{y ∈ center + span(subspace) : |y − center| = radius}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereComponent {
    pub tvalue: f64,
    pub center: Vec<f64>,
    pub radius: f64,
    pub subspace: Vec<Vec<f64>>,
}

impl SphereComponent {
    pub fn dim(&self) -> usize {
        self.subspace.len()
    }

    /// Whether `y` lies on the sphere, to `tol` relative to its radius.
    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        let w = vector::sub(y, &self.center);
        let inside: f64 = self.subspace.iter().map(|b| vector::dot(&w, b).powi(2)).sum();
        let off = (vector::dot(&w, &w) - inside).max(0.0).sqrt();
        let scale = 1.0 + self.radius;
        off <= tol * scale && (inside.sqrt() - self.radius).abs() <= tol * scale
    }

    /// `n` points spread over the sphere, for residual checks.
    pub fn sample(&self, n: usize) -> Vec<Vec<f64>> {
        let k = self.subspace.len();
        (0..n)
            .map(|s| {
                let theta = std::f64::consts::TAU * s as f64 / n as f64;
                let dir = match k {
                    0 => vec![0.0; self.center.len()],
                    1 => vector::scale(&self.subspace[0], if s % 2 == 0 { 1.0 } else { -1.0 }),
                    _ => {
                        // rotate in the plane of the first two basis vectors, tilted by the rest
                        let mut v = vector::add(
                            &vector::scale(&self.subspace[0], theta.cos()),
                            &vector::scale(&self.subspace[1], theta.sin()),
                        );
                        for b in &self.subspace[2..] {
                            v = vector::axpy(&v, 0.3 * (theta * 1.7).sin(), b);
                        }
                        let n = vector::norm(&v);
                        vector::scale(&v, 1.0 / n)
                    }
                };
                vector::axpy(&self.center, self.radius, &dir)
            })
            .collect()
    }
}

/// Extra output of the solvers, mostly for experiment reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportDiagnostics {
    /// Roots in the solver's own variable with multiplicities.
    pub roots: Vec<(f64, usize)>,
    /// Real eigenvalues of `∇A`.
    pub eigenvalues: Vec<f64>,
    /// Poles of `G`, i.e. the eigenvalues seen from the seeds.
    pub poles: Vec<f64>,
    pub seed_avalues: Vec<f64>,
    pub interlacing: Option<Interlacing>,
    pub descartes: Option<usize>,
    pub predicted: Option<usize>,
    pub missing_seeds: usize,
    pub min_a_gap: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SupportSet {
    pub isolated: Vec<IsolatedPoint>,
    pub spheres: Vec<SphereComponent>,
    pub cost: CostModel,
    pub affine: AffineMap,
    pub x0: Vec<f64>,
    /// Largest `|c_x(x0, y) − A(y)| / (1 + |A(y)|)` over emitted points.
    pub max_residual: f64,
    pub diagnostics: SupportDiagnostics,
}

impl SupportSet {
    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// Isolated multiplicities plus `2·dim` per sphere.
    pub fn weighted_count(&self) -> usize {
        self.isolated.iter().map(|p| p.multiplicity).sum::<usize>() + self.spheres.iter().map(|s| 2 * s.dim()).sum::<usize>()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.isolated.iter().map(|p| p.point.clone()).collect()
    }

    /// Whether the count matches the proved prediction.
    pub fn certified(&self) -> bool {
        self.diagnostics.predicted == Some(self.weighted_count())
    }

    pub fn residual_ok(&self, tol: f64) -> bool {
        self.max_residual <= tol
    }
}

/// Knobs shared by the radial solvers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportOptions {
    pub isolation: IsolationOptions,
    /// Roots within this (relative) distance of an eigenvalue go to the sphere test.
    pub eigen_tol: f64,
    /// Normalized distance under which a root is identified with a seed.
    pub snap_tol: f64,
}

impl Default for SupportOptions {
    fn default() -> Self {
        Self { isolation: IsolationOptions::default(), eigen_tol: 1e-7, snap_tol: 1e-8 }
    }
}

/// `|c_x(x0, y) − A(y)| / (1 + |A(y)|)`.
pub fn relative_residual(c: &CostModel, a: &AffineMap, x0: &[f64], y: &[f64]) -> Result<f64, CostError> {
    let ay = a.apply(y);
    let g = c.grad_x(x0, y)?;
    Ok(vector::norm(&vector::sub(&g, &ay)) / (1.0 + vector::norm(&ay)))
}

fn max_residual(
    c: &CostModel,
    a: &AffineMap,
    x0: &[f64],
    isolated: &[IsolatedPoint],
    spheres: &[SphereComponent],
) -> Result<f64, CostError> {
    let mut worst: f64 = 0.0;
    for p in isolated {
        worst = worst.max(relative_residual(c, a, x0, &p.point)?);
    }
    for s in spheres {
        for y in s.sample(8) {
            worst = worst.max(relative_residual(c, a, x0, &y)?);
        }
    }
    Ok(worst)
}

/// Finite-limit and radius gates at an eigenvalue `t` of `linear`:
/// returns the offset `p_t − x0`, the radius and `ker(tI − ∇A)`.
fn sphere_test(linear: &SquareMatrix, v: &[f64], t: f64, rho: f64) -> Option<(Vec<f64>, f64, Vec<Vec<f64>>)> {
    let m = linear.shifted(t);
    let (w, resid) = min_norm_solve(&m, v);
    if resid > 1e-8 * (1.0 + vector::norm(v)) {
        return None;
    }
    let r2 = rho * rho - vector::dot(&w, &w);
    if r2 < -1e-12 * (1.0 + rho * rho) {
        return None;
    }
    let kernel = kernel_basis(&m, 1e-7);
    if kernel.is_empty() {
        return None;
    }
    Some((w, r2.max(0.0).sqrt(), kernel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::RadialProfile;
    use crate::sampling::{sample_seeds, trial_rng, SeedGuard};

    fn random_support(d: usize, p: f64, trial: u64) -> SupportSet {
        let c = CostModel::power(p).unwrap();
        let mut rng = trial_rng(2024, trial);
        let (seeds, _) = sample_seeds(&mut rng, d, &c, &SeedGuard::default()).unwrap();
        solve_support_power(&c, &vec![0.0; d], &seeds).unwrap()
    }

    #[test]
    fn one_dimensional_symmetric_seeds() {
        let c = CostModel::power(0.5).unwrap();
        let s = solve_support_power(&c, &[0.0], &[vec![-1.0], vec![1.0]]).unwrap();
        // A(0) = 0: the set is the 0-sphere {±1}
        assert_eq!(s.weighted_count(), 2);
        assert!(s.isolated.is_empty());
        assert!(s.spheres[0].contains(&[-1.0], 1e-12) && s.spheres[0].contains(&[1.0], 1e-12));
    }

    #[test]
    fn proved_counts_on_random_seeds() {
        for d in 1..=3 {
            for (p, k) in [(0.5, 2 * d), (1.0, 2 * d), (1.5, 2 * d + 1), (3.0, 2 * d + 1)] {
                for t in 0..30 {
                    let s = random_support(d, p, t);
                    assert_eq!(s.weighted_count(), k, "d={d} p={p} trial {t}: {:?}", s.diagnostics);
                    assert!(s.certified());
                    assert_eq!(s.diagnostics.missing_seeds, 0);
                    assert!(s.residual_ok(1e-7), "residual {}", s.max_residual);
                    assert!(interior_check(&s).unwrap());
                    let seeds = s.isolated.iter().filter(|q| q.class == PointClass::Seed).count();
                    assert_eq!(seeds, d + 1);
                }
            }
        }
    }

    #[test]
    fn radial_scan_agrees_with_power_solver() {
        let cube = CostModel::radial(RadialProfile::new("t^3", |t| t.powi(3), |t| 3.0 * t * t));
        for t in 0..10 {
            let s = random_support(3, 3.0, t);
            let r = solve_support_radial(&cube, &s.x0, &s.affine).unwrap();
            assert_eq!(r.isolated.len(), s.isolated.len());
            for q in &s.isolated {
                let near = r.isolated.iter().map(|w| vector::dist(&w.point, &q.point)).fold(f64::INFINITY, f64::min);
                assert!(near <= 1e-8, "trial {t}: {near:e}");
            }
        }
    }

    #[test]
    fn sphere_from_zero_offset() {
        let c = CostModel::power(3.0).unwrap();
        let a = AffineMap::new(SquareMatrix::diag(&[-3.0, 5.0]), vec![0.0, 0.0]);
        let s = solve_support_radial(&c, &[0.0, 0.0], &a).unwrap();
        assert!(s.isolated.is_empty());
        assert_eq!(s.spheres.len(), 1);
        let sp = &s.spheres[0];
        assert!((sp.radius - 1.0).abs() < 1e-9);
        assert_eq!(sp.dim(), 1);
        assert!(sp.subspace[0][0].abs() > 1.0 - 1e-12);
        assert_eq!(s.weighted_count(), 2);
        assert!(s.max_residual < 1e-12);
    }

    #[test]
    fn repeated_eigenvalue_gives_one_full_sphere() {
        let c = CostModel::power(3.0).unwrap();
        let a = AffineMap::new(SquareMatrix::scalar(3, -3.0), vec![0.0; 3]);
        let s = solve_support_radial(&c, &[0.0; 3], &a).unwrap();
        assert_eq!(s.spheres.len(), 1);
        assert_eq!(s.spheres[0].dim(), 3);
        assert_eq!(s.weighted_count(), 6);
    }

    #[test]
    fn zero_linear_part_single_point() {
        let c = CostModel::power(3.0).unwrap();
        let v = [0.6, -0.8];
        let s = solve_support_radial(&c, &[0.0, 0.0], &AffineMap::constant(v.to_vec())).unwrap();
        assert_eq!(s.isolated.len(), 1);
        let rho = (1.0f64 / 3.0).sqrt();
        let expect = vector::scale(&v, -1.0 / (3.0 * rho));
        assert!(vector::dist(&s.isolated[0].point, &expect) < 1e-9);
    }

    #[test]
    fn choquet_and_smallest_point() {
        for t in 0..10 {
            let s = random_support(2, 0.5, t);
            assert!(choquet_check(&s).unwrap().iter().all(|h| *h == HullStatus::Extreme));
            assert!(matches!(smallest_point_analysis(&s), Err(SupportError::WrongCost { .. })));
            let s = random_support(2, 3.0, t);
            assert!(smallest_point_analysis(&s).unwrap().rest_extreme);
        }
    }
}
