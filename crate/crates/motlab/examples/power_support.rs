//! Random seeds around the origin, the full structure set for `|x − y|^p`,
//! and a histogram of point counts.
//!
//! ```bash
//! cargo run --release -p motlab --example power_support -- 3 1.5 200
//! ```

use std::collections::BTreeMap;
use std::time::Instant;

use motlab::cost::CostModel;
use motlab::sampling::{sample_seeds, trial_rng, SeedGuard};
use motlab::support::{solve_support_power, PointClass};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let d: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(2);
    let p: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let trials: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100);

    let cost = CostModel::power(p).expect("p must differ from 0 and 2");
    let start = Instant::now();
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    let mut failures = 0;
    for t in 0..trials {
        let mut rng = trial_rng(42, t);
        let (seeds, _) = sample_seeds(&mut rng, d, &cost, &SeedGuard::default()).expect("guard satisfiable");
        match solve_support_power(&cost, &vec![0.0; d], &seeds) {
            Ok(s) => {
                *histogram.entry(s.weighted_count()).or_default() += 1;
                if t == 0 {
                    for q in &s.isolated {
                        let tag = match q.class {
                            PointClass::Seed => "seed",
                            PointClass::New => "new",
                            PointClass::FirstCrossing => "first-crossing",
                        };
                        println!("{tag:>15} {:?}", q.point);
                    }
                    println!("max residual {:.2e}", s.max_residual);
                }
            }
            Err(e) => {
                failures += 1;
                eprintln!("trial {t}: {e}");
            }
        }
    }
    println!("d={d} p={p}: counts {histogram:?}, {failures} failures, {:.2?}", start.elapsed());
}
