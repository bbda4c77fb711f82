//! The cost families side by side: gradients, mixed second derivatives and
//! the radial coefficient `g` with its inverse.
//!
//! ```bash
//! cargo run -p motlab --example cost_gradients
//! ```

use motlab::cost::{CostModel, RadialProfile};
use motlab::multipoly::MultiPoly;

fn main() {
    let x = [0.2, -0.1];
    let y = [1.0, 0.5];
    let quintic = RadialProfile::new("t³ + t⁵", |t| t.powi(3) + t.powi(5), |t| 3.0 * t * t + 5.0 * t.powi(4));
    let q = |i| MultiPoly::var(2, i);
    let costs = [
        CostModel::power(0.5).unwrap(),
        CostModel::power(3.0).unwrap(),
        CostModel::OneNorm,
        CostModel::InfNorm,
        CostModel::radial(quintic),
        CostModel::poly_gradient_std(vec![q(0).pow(2), q(0).mul(&q(1))]).unwrap(),
    ];
    for c in &costs {
        println!("{c:?}");
        println!("  c(x, y)      = {:.6}", c.cost(&x, &y));
        println!("  ∂x c(x, y)   = {:?}", c.grad_x(&x, &y).unwrap());
        if let Ok(m) = c.grad_xy(&x, &y) {
            println!("  ∂y ∂x c      = {:?}", m.rows());
        }
        if c.is_radial() {
            let t = 0.8;
            let a = c.g_of(t).unwrap();
            println!("  g({t}) = {a:.6}, g⁻¹(g({t})) = {:.12}", c.g_inverse(a).unwrap());
        }
    }
}
