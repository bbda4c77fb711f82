//! Dense linear algebra sized for d up to about 12: determinants, adjugates,
//! characteristic polynomials, real roots and real eigenvalues.

mod affine;
mod matrix;
mod poly;
mod roots;
pub mod vector;

pub use affine::AffineMap;
pub use matrix::{
    adjugate, char_poly_and_adjugate_series, determinant, kernel_basis, min_norm_solve,
    real_eigenvalues, Lu, SquareMatrix,
};
pub use poly::Polynomial;
pub use roots::{real_roots, RootError, MULTIPLICITY_MERGE};
