//! Structure sets for a general radial cost, cross-checked against the power
//! solver, plus an `A` for which the whole unit sphere is the answer.
//!
//! ```bash
//! cargo run -p motlab --example radial_support
//! ```

use motlab::affine_fit::fit_affine;
use motlab::cost::{CostModel, RadialProfile};
use motlab::linalg::{AffineMap, SquareMatrix};
use motlab::sampling::{sample_seeds, trial_rng, SeedGuard};
use motlab::support::{solve_support_power, solve_support_radial};

fn main() {
    let d = 2;
    let x0 = vec![0.0; d];
    let power = CostModel::power(3.0).unwrap();
    let cubic = CostModel::radial(RadialProfile::new("t³", |t| t.powi(3), |t| 3.0 * t * t));
    let (seeds, _) = sample_seeds(&mut trial_rng(3, 0), d, &power, &SeedGuard::default()).expect("guard satisfiable");

    let by_power = solve_support_power(&power, &x0, &seeds).unwrap();
    let a = fit_affine(&power, &x0, &seeds).unwrap();
    let by_scan = solve_support_radial(&cubic, &x0, &a).unwrap();
    println!("power solver {} points, radial scan {} points", by_power.isolated.len(), by_scan.isolated.len());
    for (u, v) in by_power.points().iter().zip(by_scan.points()) {
        println!("  {u:?}  {v:?}");
    }

    let quintic = CostModel::radial(RadialProfile::new("t³ + t⁵", |t| t.powi(3) + t.powi(5), |t| 3.0 * t * t + 5.0 * t.powi(4)));
    let s = solve_support_radial(&quintic, &x0, &a).unwrap();
    println!("t³ + t⁵ with the same A: {} points, max residual {:.1e}", s.isolated.len(), s.max_residual);

    // A(y) = g(1)·y with g(t) = −3t: c_x(0, y) = A(y) on the whole unit circle
    let sphere = AffineMap::new(SquareMatrix::scalar(d, -3.0), vec![0.0; d]);
    let s = solve_support_radial(&cubic, &x0, &sphere).unwrap();
    for c in &s.spheres {
        println!("sphere: centre {:?}, radius {:.12}, dimension {}", c.center, c.radius, c.dim());
    }
}
