//! Characteristic polynomial and adjugate series of a small matrix, checked
//! against the determinant and the real eigenvalues.
//!
//! ```bash
//! cargo run -p motlab --example char_poly
//! ```

use motlab::linalg::{adjugate, char_poly_and_adjugate_series, real_eigenvalues, real_roots, SquareMatrix};

fn main() {
    let m = SquareMatrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]]);
    let (chi, series) = char_poly_and_adjugate_series(&m);
    println!("det(tI − M) coefficients, constant first: {:?}", chi.coeffs());
    println!("det M = {:.12}, (−1)^d χ(0) = {:.12}", m.determinant(), -chi.eval(0.0));

    // adj(tI − M) = Σ_k B_k t^k, so at t = 0 it is B_0 = adj(−M)
    let adj0 = adjugate(&m.scale(-1.0));
    let gap = adj0.sub(&series[0]).max_norm();
    println!("|adj(−M) − B_0|_max = {gap:.1e}");

    let bound = chi.root_bound();
    let roots = real_roots(&chi, -bound, bound).expect("bounded interval");
    println!("roots of χ: {roots:?}");
    println!("real eigenvalues: {:?}", real_eigenvalues(&m));
}
