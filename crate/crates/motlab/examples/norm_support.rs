//! Structure sets for the 1-norm and the ∞-norm with `A = −Id`: the vertices
//! of the cube and of the cross-polytope.
//!
//! ```bash
//! cargo run -p motlab --example norm_support
//! ```

use motlab::linalg::AffineMap;
use motlab::support::{solve_support_norm1, solve_support_norminf};

fn main() {
    for d in 1..=4 {
        let x0 = vec![0.0; d];
        let a = AffineMap::identity(d).negated();
        let one = solve_support_norm1(&x0, &a).unwrap();
        let inf = solve_support_norminf(&x0, &a).unwrap();
        println!("d={d}: 1-norm {} points, ∞-norm {} points", one.len(), inf.len());
        if d == 2 {
            for q in one.iter().chain(&inf) {
                println!("  {:?} on quadrant {:?}", q.vertex, q.signs);
            }
        }
    }
    // a singular ∇A leaves a face of solutions in one quadrant
    let flat = AffineMap::new(motlab::linalg::SquareMatrix::diag(&[-1.0, 0.0]), vec![0.0, -1.0]);
    for q in solve_support_norm1(&[0.0, 0.0], &flat).unwrap() {
        println!("vertex {:?}, kernel {:?}, is a point: {}", q.vertex, q.kernel, q.is_point());
    }
}
