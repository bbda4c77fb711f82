//! 1-norm and ∞-norm costs: `S₀` is a union of quadrant pieces
//! `(x0 + Q_ε) ∩ (y_ε + ker ∇A)`.

use serde::{Deserialize, Serialize};

use crate::linalg::{kernel_basis, min_norm_solve, vector, AffineMap};
use crate::lp::{LinearProgram, RowKind};

use super::SupportError;

/// `{vertex + K z} ∩ (x0 + open quadrant of signs)`; a single point when `kernel` is empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadrantPiece {
    pub vertex: Vec<f64>,
    /// The gradient on this piece is `−signs`.
    pub signs: Vec<i8>,
    pub kernel: Vec<Vec<f64>>,
    /// Largest depth inside the open quadrant reached by the piece, capped at 1.
    pub margin: f64,
}

impl QuadrantPiece {
    pub fn is_point(&self) -> bool {
        self.kernel.is_empty()
    }
}

#[derive(Clone, Copy)]
enum Norm {
    One,
    Inf,
}

/// Quadrant inequalities `rows·u ≥ δ` for `u = y − x0`.
fn quadrant_rows(norm: Norm, signs: &[i8]) -> Vec<Vec<f64>> {
    let d = signs.len();
    match norm {
        Norm::One => (0..d)
            .map(|i| {
                let mut r = vec![0.0; d];
                r[i] = signs[i] as f64;
                r
            })
            .collect(),
        Norm::Inf => {
            let i = signs.iter().position(|s| *s != 0).expect("a signed unit vector");
            let s = signs[i] as f64;
            let mut rows = Vec::new();
            for j in (0..d).filter(|&j| j != i) {
                for t in [1.0, -1.0] {
                    let mut r = vec![0.0; d];
                    r[i] = s;
                    r[j] = t;
                    rows.push(r);
                }
            }
            if rows.is_empty() {
                let mut r = vec![0.0; d];
                r[i] = s;
                rows.push(r);
            }
            rows
        }
    }
}

/// `max δ ≤ 1` with `rows·(vertex + Kz − x0) ≥ δ`; `None` when no `δ ≥ 0` is feasible.
fn quadrant_margin(
    rows: &[Vec<f64>],
    vertex: &[f64],
    kernel: &[Vec<f64>],
    x0: &[f64],
) -> Result<Option<f64>, SupportError> {
    let base = vector::sub(vertex, x0);
    if kernel.is_empty() {
        let m = rows.iter().map(|r| vector::dot(r, &base)).fold(f64::INFINITY, f64::min);
        return Ok((m >= 0.0).then_some(m.min(1.0)));
    }
    // columns: z⁺ (k), z⁻ (k), δ
    let k = kernel.len();
    let mut lp = LinearProgram::new(2 * k + 1);
    lp.set_cost(2 * k, 1.0);
    for r in rows {
        let mut coeffs = Vec::with_capacity(2 * k + 1);
        for (l, b) in kernel.iter().enumerate() {
            let rk = vector::dot(r, b);
            coeffs.push((l, rk));
            coeffs.push((k + l, -rk));
        }
        coeffs.push((2 * k, -1.0));
        lp.add_row(coeffs, RowKind::Ge, -vector::dot(r, &base))?;
    }
    lp.add_row(vec![(2 * k, 1.0)], RowKind::Le, 1.0)?;
    match lp.maximize() {
        Ok(sol) => Ok(Some(sol.objective)),
        Err(crate::lp::LpError::Infeasible { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn solve_pieces(norm: Norm, x0: &[f64], a: &AffineMap, quadrants: Vec<Vec<i8>>) -> Result<Vec<QuadrantPiece>, SupportError> {
    let kernel = kernel_basis(&a.linear, 1e-10);
    let mut out = Vec::new();
    for signs in quadrants {
        // c_x = −signs on the quadrant, so ∇A·y = −signs − A(0)
        let rhs: Vec<f64> = signs.iter().zip(&a.offset).map(|(s, o)| -(*s as f64) - o).collect();
        let (vertex, resid) = min_norm_solve(&a.linear, &rhs);
        if resid > 1e-9 * (1.0 + vector::norm(&rhs)) {
            continue;
        }
        let rows = quadrant_rows(norm, &signs);
        if let Some(margin) = quadrant_margin(&rows, &vertex, &kernel, x0)? {
            if margin > 1e-9 {
                out.push(QuadrantPiece { vertex, signs, kernel: kernel.clone(), margin });
            }
        }
    }
    Ok(out)
}

/// `S₀` for `c(x, y) = |x − y|₁`.
pub fn solve_support_norm1(x0: &[f64], a: &AffineMap) -> Result<Vec<QuadrantPiece>, SupportError> {
    let d = x0.len();
    let quadrants = (0..1usize << d)
        .map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect())
        .collect();
    solve_pieces(Norm::One, x0, a, quadrants)
}

/// `S₀` for `c(x, y) = |x − y|_∞`.
pub fn solve_support_norminf(x0: &[f64], a: &AffineMap) -> Result<Vec<QuadrantPiece>, SupportError> {
    let d = x0.len();
    let mut quadrants = Vec::with_capacity(2 * d);
    for i in 0..d {
        for s in [-1i8, 1] {
            let mut e = vec![0i8; d];
            e[i] = s;
            quadrants.push(e);
        }
    }
    solve_pieces(Norm::Inf, x0, a, quadrants)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostModel;
    use crate::linalg::SquareMatrix;

    fn reflected_identity(d: usize) -> AffineMap {
        AffineMap::identity(d).negated()
    }

    #[test]
    fn cube_vertices_for_one_norm() {
        for d in 1..=4 {
            let pieces = solve_support_norm1(&vec![0.0; d], &reflected_identity(d)).unwrap();
            assert_eq!(pieces.len(), 1 << d);
            for p in &pieces {
                assert!(p.is_point());
                for (v, s) in p.vertex.iter().zip(&p.signs) {
                    assert!((v - *s as f64).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cross_polytope_for_inf_norm() {
        for d in 1..=4 {
            let pieces = solve_support_norminf(&vec![0.0; d], &reflected_identity(d)).unwrap();
            assert_eq!(pieces.len(), 2 * d);
        }
    }

    #[test]
    fn zero_linear_part() {
        let a = AffineMap::constant(vec![0.3, 2.0]);
        assert!(solve_support_norm1(&[0.0, 0.0], &a).unwrap().is_empty());
        // A(0) = −e_1: the whole quadrant cone is in S₀
        let a = AffineMap::constant(vec![-1.0, 0.0]);
        let pieces = solve_support_norminf(&[0.0, 0.0], &a).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].signs, vec![1, 0]);
        assert_eq!(pieces[0].kernel.len(), 2);
        let a = AffineMap::constant(vec![-1.0, 1.0]);
        let pieces = solve_support_norm1(&[0.0, 0.0], &a).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].signs, vec![1, -1]);
    }

    #[test]
    fn random_invertible_points_satisfy_equation() {
        let mut s = 11u64;
        let mut rnd = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..20 {
            let lin = SquareMatrix::from_fn(3, |_, _| rnd());
            let a = AffineMap::new(lin, vec![rnd(), rnd(), rnd()]);
            let x0 = [0.1 * rnd(), 0.1 * rnd(), 0.1 * rnd()];
            for (pieces, cost) in [
                (solve_support_norm1(&x0, &a).unwrap(), CostModel::OneNorm),
                (solve_support_norminf(&x0, &a).unwrap(), CostModel::InfNorm),
            ] {
                assert!(pieces.len() <= 8);
                for p in pieces {
                    let g = cost.grad_x(&x0, &p.vertex).unwrap();
                    assert!(vector::dist(&g, &a.apply(&p.vertex)) < 1e-9);
                }
            }
        }
    }
}
