//! The one-variable function χ whose positive roots are the points of the
//! structure set, with its Descartes bound and certified roots.
//!
//! ```bash
//! cargo run -p motlab --example chi_roots -- 3 3.0
//! ```

use motlab::affine_fit::fit_affine;
use motlab::cost::CostModel;
use motlab::sampling::{sample_seeds, trial_rng, SeedGuard};
use motlab::signomial::{build_chi, predicted_count, IsolationOptions};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let d: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(3);
    let p: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3.0);
    let c = CostModel::power(p).expect("p must differ from 0 and 2");
    let x0 = vec![0.0; d];
    let (seeds, _) = sample_seeds(&mut trial_rng(1, 0), d, &c, &SeedGuard::default()).expect("guard satisfiable");
    let a = fit_affine(&c, &x0, &seeds).unwrap();
    let chi = build_chi(&a, &x0, &c).unwrap();
    println!("exponent {:.4}, κ = {:.6}, multiplied through: {}", chi.exponent, chi.kappa, chi.shifted);
    for (coef, e) in chi.signomial.terms() {
        println!("  {coef:+.6e} X^{e:.4}");
    }
    println!("Descartes bound {}", chi.signomial.descartes_bound());

    let hints: Vec<f64> = seeds.iter().map(|y| chi.x_of_a(c.g_of(motlab::linalg::vector::norm(y)).unwrap())).collect();
    let roots = chi.isolate(&hints, &IsolationOptions::default()).unwrap();
    println!("{} roots (predicted {:?}):", roots.len(), predicted_count(d, p));
    for (x, m) in roots {
        println!("  X = {x:.10} (multiplicity {m}), radius {:.10}", chi.rho_of_x(x));
    }
}
