pub mod affine_fit;
pub mod algebraic;
pub mod cost;
pub mod harness;
pub mod linalg;
pub mod lp;
pub mod mot;
pub mod multipoly;
pub mod output;
pub mod sampling;
pub mod signomial;
pub mod support;
