//! From `d+1` seeds to the affine map they determine, the rational function
//! `G` and the interlacing of its poles with the seed values.
//!
//! ```bash
//! cargo run -p motlab --example seed_fit -- 1.5
//! ```

use motlab::affine_fit::{fit_affine, g_via_determinant, interlacing_check, rational_g, y_of_a, SeedConfiguration};
use motlab::cost::CostModel;
use motlab::sampling::{sample_seeds, trial_rng, SeedGuard};

fn main() {
    let p: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1.5);
    let c = CostModel::power(p).expect("p must differ from 0 and 2");
    let x0 = [0.0, 0.0];
    let (seeds, rejected) = sample_seeds(&mut trial_rng(7, 0), 2, &c, &SeedGuard::default()).expect("guard satisfiable");
    println!("seeds {seeds:?} ({rejected} draws rejected)");

    let seed = SeedConfiguration::new(&c, &x0, &seeds).unwrap();
    println!("barycentric weights {:?}, a-values {:?}", seed.lambdas, seed.avalues);
    let a = fit_affine(&c, &x0, &seeds).unwrap();
    println!("∇A = {:?}, A(x0) = {:?}", a.linear.rows(), a.offset);
    for (y, av) in seeds.iter().zip(&seed.avalues) {
        println!("  y(a_i) = {:?} for seed {y:?}", y_of_a(&a, &x0, *av).unwrap());
    }

    let g = rational_g(&seed, &a).unwrap();
    println!("poles {:?}: {:?}", g.poles, interlacing_check(&seed, &g.poles));
    let probe = seed.avalues.iter().sum::<f64>() / 3.0 + 0.123;
    println!("G({probe:.3}) = {:.9} by partial fractions, {:.9} by determinants", g.eval(probe), g_via_determinant(&seed, &a, probe));
}
