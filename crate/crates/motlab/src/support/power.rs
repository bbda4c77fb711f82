use crate::affine_fit::{fit_affine, interlacing_check, rational_g, y_of_a, FitError, Normalization, SeedConfiguration};
use crate::cost::CostModel;
use crate::linalg::{real_eigenvalues, vector};
use crate::signomial::{build_chi, predicted_count};

use super::{
    max_residual, sphere_test, IsolatedPoint, PointClass, SphereComponent, SupportDiagnostics, SupportError,
    SupportOptions, SupportSet,
};

pub fn solve_support_power(c: &CostModel, x0: &[f64], seeds: &[Vec<f64>]) -> Result<SupportSet, SupportError> {
    solve_support_power_with(c, x0, seeds, &SupportOptions::default())
}

/// `S₀` for `|x − y|^p` from `d+1` seeds around `x0`, via the roots of χ.
///
/// Works in coordinates `u = s(y − x0)` with the seeds in `[−1, 1]^d`; there
/// `c_x(x0, y) = s^{1−p} c_x(0, u)`, so the structure set is the same.
pub fn solve_support_power_with(
    c: &CostModel,
    x0: &[f64],
    seeds: &[Vec<f64>],
    opts: &SupportOptions,
) -> Result<SupportSet, SupportError> {
    let &CostModel::PowerDistance { p } = c else {
        return Err(SupportError::WrongCost { op: "solve_support_power", need: "a power-distance cost" });
    };
    let d = x0.len();
    let norm = Normalization::fit(x0, seeds);
    let origin = vec![0.0; d];
    let us: Vec<Vec<f64>> = seeds.iter().map(|y| norm.forward(y)).collect();
    let seed = SeedConfiguration::new(c, &origin, &us)?;
    if !seed.interior {
        return Err(SupportError::NotInterior);
    }
    let fitted = fit_affine(c, &origin, &us)?;
    let rg = rational_g(&seed, &fitted)?;
    let interlacing = interlacing_check(&seed, &rg.poles);
    let chi = build_chi(&fitted, &origin, c)?;

    let seed_x: Vec<f64> = seed.avalues.iter().map(|a| chi.x_of_a(*a)).collect();
    let mut hints = seed_x.clone();
    hints.extend(rg.poles.iter().map(|g| chi.x_of_a(*g)).filter(|x| *x > 0.0));
    let roots = chi.isolate(&hints, &opts.isolation)?;

    let eig = real_eigenvalues(&fitted.linear);
    let x_lo = seed_x.iter().copied().fold(f64::INFINITY, f64::min);
    let x_hi = seed_x.iter().copied().fold(0.0, f64::max);
    // a-values and lengths scale by s^{2−p} and 1/s going back
    let s = norm.scale;
    let a_scale = s.powf(2.0 - p);

    let mut isolated: Vec<IsolatedPoint> = Vec::new();
    let mut spheres = Vec::new();
    let mut claimed = vec![false; seeds.len()];
    for &(x, multiplicity) in &roots {
        let a = chi.a_of_x(x);
        if eig.iter().any(|e| (a - e).abs() <= opts.eigen_tol * (1.0 + a.abs())) {
            if let Some((w, radius, subspace)) = sphere_test(&fitted.linear, &chi.v, a, chi.rho_of_x(x)) {
                spheres.push(SphereComponent {
                    tvalue: a * a_scale,
                    center: norm.backward(&w),
                    radius: radius / s,
                    subspace,
                });
                continue;
            }
        }
        let u = match y_of_a(&fitted, &origin, a) {
            Ok(u) => u,
            Err(FitError::AtEigenvalue { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        let snapped = us.iter().position(|ui| vector::norm_inf(&vector::sub(ui, &u)) <= opts.snap_tol);
        let (point, class) = match snapped {
            Some(i) if claimed[i] => continue,
            Some(i) => {
                claimed[i] = true;
                (seeds[i].clone(), PointClass::Seed)
            }
            None => {
                let outside = x < x_lo * (1.0 - 1e-12) || x > x_hi * (1.0 + 1e-12);
                (norm.backward(&u), if outside { PointClass::FirstCrossing } else { PointClass::New })
            }
        };
        let tvalue = c.g_of(vector::dist(&point, x0))?;
        isolated.push(IsolatedPoint { point, tvalue, multiplicity, class });
    }
    let mut missing_seeds = 0;
    for (i, taken) in claimed.iter().enumerate() {
        if !taken && !spheres.iter().any(|sp| sp.contains(&seeds[i], 1e-8)) {
            missing_seeds += 1;
            let tvalue = c.g_of(vector::dist(&seeds[i], x0))?;
            isolated.push(IsolatedPoint { point: seeds[i].clone(), tvalue, multiplicity: 1, class: PointClass::Seed });
        }
    }

    let affine = fitted.pull_back(x0, s, s.powf(1.0 - p));
    let max_residual = max_residual(c, &affine, x0, &isolated, &spheres)?;
    let diagnostics = SupportDiagnostics {
        roots,
        eigenvalues: eig.iter().map(|e| e * a_scale).collect(),
        poles: rg.poles.iter().map(|g| g * a_scale).collect(),
        seed_avalues: seed.avalues.iter().map(|a| a * a_scale).collect(),
        interlacing: Some(interlacing),
        descartes: Some(chi.signomial.descartes_bound()),
        predicted: predicted_count(d, p),
        missing_seeds,
        min_a_gap: Some(seed.min_a_gap() * a_scale),
    };
    Ok(SupportSet { isolated, spheres, cost: c.clone(), affine, x0: x0.to_vec(), max_residual, diagnostics })
}
