//! Two ellipses: completeness at infinity, the Bézout bound, the real
//! intersections, and the random search for many simple zeros.
//!
//! ```bash
//! cargo run --release -p motlab --example ellipses -- 2000
//! ```

use motlab::algebraic::{
    bezout_bound, complete_at_infinity_d2, nc_lower_experiment, solve_quadratic_system_d2, PolynomialFamily,
};
use motlab::harness::{ellipse_family, grid_family};

fn main() {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    for (name, polys) in [("ellipses", ellipse_family()), ("grid", grid_family())] {
        let fam = PolynomialFamily::new(polys.clone()).unwrap();
        let v = complete_at_infinity_d2(&polys[0], &polys[1]).unwrap();
        println!("{name}: complete {} (resultant {}), Bézout bound {}", v.complete, v.resultant_exact, bezout_bound(&fam).unwrap());
        for s in solve_quadratic_system_d2(&polys[0], &polys[1]).unwrap() {
            println!("  {:?} simple {}", s.point, s.simple);
        }
    }
    let r = nc_lower_experiment(&ellipse_family(), trials, 42).unwrap();
    println!("best {} simple zeros over {} perturbations, first at trial {:?}", r.best, r.trials, r.witness_trial);
    println!("histogram {:?}", r.histogram);
}
