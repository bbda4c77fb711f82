//! A small martingale transport problem solved both ways, with the dual
//! certificate and the conditional supports of the optimizer.
//!
//! ```bash
//! cargo run -p motlab --example mot_lp
//! ```

use motlab::cost::CostModel;
use motlab::mot::{
    check_convex_order, dual_gap, extract_conditional_supports, solve_mot_lp, DiscreteMeasure, MOTInstance, Sense,
};

fn main() {
    let mu = DiscreteMeasure::new(vec![vec![-0.5], vec![0.5]], vec![0.5, 0.5]).unwrap();
    let nu = DiscreteMeasure::uniform(vec![vec![-2.0], vec![-0.5], vec![0.0], vec![0.5], vec![2.0]]).unwrap();
    println!("convex order: {}", check_convex_order(&mu, &nu).unwrap());
    let inst = MOTInstance::from_cost(mu, nu, &CostModel::power(3.0).unwrap()).unwrap();

    for sense in [Sense::Max, Sense::Min] {
        let sol = solve_mot_lp(&inst, sense).unwrap();
        let gap = dual_gap(&inst, &sol.coupling, &sol.dual).unwrap();
        println!("{sense:?}: value {:.9}, gap {gap:.1e}, {} pivots", sol.value, sol.iterations);
        for (i, row) in sol.coupling.pi.iter().enumerate() {
            println!("  from {:?}: {:?}", inst.mu.atoms()[i], row.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>());
        }
        println!("  supports {:?}", extract_conditional_supports(&inst, &sol.coupling, 1e-9));
        println!("  φ = {:?}, h = {:?}", sol.dual.phi, sol.dual.h);
    }
    println!("{}", inst.to_json().unwrap());
}
