use crate::affine_fit::y_of_a;
use crate::cost::CostModel;
use crate::linalg::{real_eigenvalues, vector, AffineMap};
use crate::signomial::{isolate_positive_roots, RootTarget};

use super::{
    max_residual, sphere_test, IsolatedPoint, PointClass, SphereComponent, SupportDiagnostics, SupportError,
    SupportOptions, SupportSet,
};

/// Scan window for `ln ρ`.
const LOG_RHO_RANGE: f64 = 18.0;

/// `k(ρ) = ln|y(g(ρ)) − x0| − ln ρ`, zero exactly at the fixed points.
struct DistanceGap<'a> {
    cost: &'a CostModel,
    affine: &'a AffineMap,
    v: Vec<f64>,
    pole_rhos: Vec<f64>,
}

impl RootTarget for DistanceGap<'_> {
    fn eval_with_scale(&self, rho: f64) -> (f64, f64) {
        let a = match self.cost.g_of(rho) {
            Ok(a) if a.is_finite() => a,
            _ => return (f64::INFINITY, 1.0),
        };
        let lu = self.affine.linear.shifted(a).lu();
        match lu.solve(&self.v) {
            Some(w) if !lu.is_singular() => (vector::norm(&w).ln() - rho.ln(), 1.0),
            _ => (f64::INFINITY, 1.0),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.pole_rhos.clone()
    }
}

pub fn solve_support_radial(c: &CostModel, x0: &[f64], a: &AffineMap) -> Result<SupportSet, SupportError> {
    solve_support_radial_with(c, x0, a, &SupportOptions::default())
}

/// `S₀` for any radial cost with monotone `g`, by scanning `ρ` for
/// `|y(g(ρ)) − x0| = ρ` and testing each eigenvalue of `∇A` for a sphere.
pub fn solve_support_radial_with(
    c: &CostModel,
    x0: &[f64],
    a: &AffineMap,
    opts: &SupportOptions,
) -> Result<SupportSet, SupportError> {
    if !c.is_radial() {
        return Err(SupportError::WrongCost { op: "solve_support_radial", need: "a radial cost" });
    }
    c.check_monotone().map_err(|_| SupportError::NonMonotoneG)?;
    let v = a.apply(x0);
    let mut eig = real_eigenvalues(&a.linear);
    // a repeated eigenvalue carries one sphere, not one per copy
    eig.dedup_by(|b, a| (*b - *a).abs() <= opts.eigen_tol * (1.0 + a.abs()));
    let eig_rho: Vec<(f64, f64)> = eig.iter().filter_map(|&t| c.g_inverse(t).ok().map(|r| (t, r))).collect();

    let mut spheres = Vec::new();
    for &(t, rho) in &eig_rho {
        if let Some((w, radius, subspace)) = sphere_test(&a.linear, &v, t, rho) {
            spheres.push(SphereComponent { tvalue: t, center: vector::add(x0, &w), radius, subspace });
        }
    }

    let mut isolated: Vec<IsolatedPoint> = Vec::new();
    let mut roots = Vec::new();
    if vector::norm(&v) > 0.0 {
        let target = DistanceGap { cost: c, affine: a, v: v.clone(), pole_rhos: eig_rho.iter().map(|e| e.1).collect() };
        let (lo, hi) = ((-LOG_RHO_RANGE).exp(), LOG_RHO_RANGE.exp());
        roots = isolate_positive_roots(&target, lo, hi, &[], &opts.isolation)?;
        for &(rho, multiplicity) in &roots {
            let t = c.g_of(rho)?;
            if spheres.iter().any(|s| (s.tvalue - t).abs() <= opts.eigen_tol * (1.0 + t.abs())) {
                continue;
            }
            let Ok(point) = y_of_a(a, x0, t) else { continue };
            let dup = isolated.iter().any(|q| vector::dist(&q.point, &point) <= 1e-8 * (1.0 + vector::norm(&point)));
            if !dup {
                isolated.push(IsolatedPoint { point, tvalue: t, multiplicity, class: PointClass::New });
            }
        }
    }

    let max_residual = max_residual(c, a, x0, &isolated, &spheres)?;
    let diagnostics = SupportDiagnostics {
        roots,
        eigenvalues: eig,
        poles: Vec::new(),
        seed_avalues: Vec::new(),
        interlacing: None,
        descartes: None,
        predicted: None,
        missing_seeds: 0,
        min_a_gap: None,
    };
    Ok(SupportSet { isolated, spheres, cost: c.clone(), affine: a.clone(), x0: x0.to_vec(), max_residual, diagnostics })
}
