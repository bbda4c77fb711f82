//! Marginals built so that the optimal coupling must split each `μ` atom
//! along the structure set; the LP then recovers that structure.
//!
//! ```bash
//! cargo run --release -p motlab --example converse_lp -- 2 0.5 5
//! ```

use std::collections::BTreeMap;
use std::time::Instant;

use motlab::cost::CostModel;
use motlab::mot::{
    build_converse_instance, dual_gap, extract_conditional_supports, solve_mot_lp, structure_residuals,
    ConverseOptions, Sense,
};
use motlab::sampling::{sample_seeds, trial_rng, SeedGuard};
use motlab::support::solve_support_power;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let d: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(2);
    let p: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let grid_n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5);

    let c = CostModel::power(p).expect("p must differ from 0 and 2");
    let (seeds, _) = sample_seeds(&mut trial_rng(42, 0), d, &c, &SeedGuard::default()).expect("guard satisfiable");
    let s0 = solve_support_power(&c, &vec![0.0; d], &seeds).unwrap();
    println!("|S₀| = {}", s0.isolated.len());

    let mut radius = 0.05;
    let built = loop {
        match build_converse_instance(&c, &s0, &ConverseOptions { ball_radius: radius, grid_n, ..Default::default() }) {
            Ok(b) => break b,
            Err(e) if radius > 1e-4 => {
                println!("radius {radius}: {e}");
                radius /= 2.0;
            }
            Err(e) => panic!("{e}"),
        }
    };
    let inst = &built.instance;
    println!("radius {radius}, M = {:.3}, {} μ atoms, {} ν atoms", built.m, inst.mu.len(), inst.nu.len());

    let start = Instant::now();
    let sol = solve_mot_lp(inst, Sense::Max).unwrap();
    let gap = dual_gap(inst, &sol.coupling, &sol.dual).unwrap();
    println!("LP value {:.12} (planted {:.12}), gap {gap:.1e}, {} pivots in {:.2?}", sol.value, built.planted.value(inst), sol.iterations, start.elapsed());

    let supports = extract_conditional_supports(inst, &sol.coupling, 1e-7);
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for s in &supports {
        *sizes.entry(s.len()).or_default() += 1;
    }
    let worst = structure_residuals(&c, inst, &supports).unwrap().into_iter().flatten().fold(0.0, f64::max);
    println!("conditional support sizes {sizes:?}, worst structure residual {worst:.1e}");
}
