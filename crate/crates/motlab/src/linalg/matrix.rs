use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use super::poly::Polynomial;

/// Row-major dense square matrix.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = (0..self.dim).map(|i| self.row(i)).collect();
        f.debug_tuple("SquareMatrix").field(&rows).finish()
    }
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn scalar(dim: usize, s: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = s;
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Panics unless `rows` is a non-empty square array.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "rows must form a square matrix");
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { dim: self.dim, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { dim: self.dim, data }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// `a·I − self`
    pub fn shifted(&self, a: f64) -> Self {
        let mut m = self.scale(-1.0);
        for i in 0..self.dim {
            m[(i, i)] += a;
        }
        m
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute entry.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Induced infinity norm (max row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn lu(&self) -> Lu {
        Lu::new(self)
    }

    pub fn determinant(&self) -> f64 {
        self.lu().det()
    }

    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        self.lu().solve(b)
    }

    /// Drop row `r` and column `c`.
    pub fn minor(&self, r: usize, c: usize) -> Option<Self> {
        if self.dim == 1 {
            return None;
        }
        let d = self.dim - 1;
        Some(Self::from_fn(d, |i, j| {
            let ii = if i < r { i } else { i + 1 };
            let jj = if j < c { j } else { j + 1 };
            self[(ii, jj)]
        }))
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

/// LU factorization with partial pivoting, `P·M = L·U`.
#[derive(Clone, Debug)]
pub struct Lu {
    dim: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn new(m: &SquareMatrix) -> Self {
        let d = m.dim;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..d).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..d {
            let (p, pmax) = (k..d)
                .map(|i| (i, lu[i * d + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..d {
                    lu.swap(k * d + j, p * d + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = lu[k * d + k];
            for i in k + 1..d {
                let f = lu[i * d + k] / piv;
                lu[i * d + k] = f;
                if f != 0.0 {
                    for j in k + 1..d {
                        lu[i * d + j] -= f * lu[k * d + j];
                    }
                }
            }
        }
        Self { dim: d, lu, perm, sign, singular }
    }

    pub fn det(&self) -> f64 {
        if self.singular {
            return 0.0;
        }
        (0..self.dim).fold(self.sign, |acc, i| acc * self.lu[i * self.dim + i])
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Smallest pivot magnitude, a cheap proxy for the distance to singularity.
    pub fn min_pivot(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.lu[i * self.dim + i].abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        if self.singular {
            return None;
        }
        let d = self.dim;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..d {
            let s: f64 = (0..i).map(|j| self.lu[i * d + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..d).rev() {
            let s: f64 = (i + 1..d).map(|j| self.lu[i * d + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * d + i];
        }
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}

pub fn determinant(m: &SquareMatrix) -> f64 {
    m.determinant()
}

/// Transposed comatrix, built from cofactor minors so it stays exact in shape
/// at singular inputs.
pub fn adjugate(m: &SquareMatrix) -> SquareMatrix {
    let d = m.dim;
    if d == 1 {
        return SquareMatrix::identity(1);
    }
    SquareMatrix::from_fn(d, |i, j| {
        // adj[i][j] = (−1)^{i+j} det(minor(j, i))
        let sgn = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        sgn * m.minor(j, i).expect("d > 1").determinant()
    })
}

/// Faddeev–LeVerrier: `det(XI − M)` and `B_0..B_{d−1}` with
/// `adj(XI − M) = Σ B_k X^k`.
pub fn char_poly_and_adjugate_series(m: &SquareMatrix) -> (Polynomial, Vec<SquareMatrix>) {
    let d = m.dim;
    let mut coeffs = vec![0.0; d + 1];
    coeffs[d] = 1.0;
    let mut series = vec![SquareMatrix::zeros(d); d];
    let mut mk = SquareMatrix::zeros(d);
    for k in 1..=d {
        mk = m.mul(&mk);
        for i in 0..d {
            mk[(i, i)] += coeffs[d - k + 1];
        }
        series[d - k] = mk.clone();
        coeffs[d - k] = -m.mul(&mk).trace() / k as f64;
    }
    (Polynomial::new(coeffs), series)
}

/// Real eigenvalues, ascending, from the real Schur form.
pub fn real_eigenvalues(m: &SquareMatrix) -> Vec<f64> {
    let ev = m.to_dmatrix().complex_eigenvalues();
    let scale = 1.0 + m.max_norm();
    let mut out: Vec<f64> = ev
        .iter()
        .filter(|z| z.im.abs() <= 1e-9 * scale)
        .map(|z| z.re)
        .collect();
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// Minimum-norm least-squares solution of `M x = b` and its residual norm.
pub fn min_norm_solve(m: &SquareMatrix, b: &[f64]) -> (Vec<f64>, f64) {
    let a = m.to_dmatrix();
    let svd = a.clone().svd(true, true);
    let tol = 1e-10 * (1.0 + m.max_norm());
    let rhs = nalgebra::DVector::from_column_slice(b);
    let x = svd.solve(&rhs, tol).expect("both factors were computed");
    let resid = (&a * &x - rhs).norm();
    (x.iter().copied().collect(), resid)
}

/// Orthonormal basis of `ker M` using singular values below `rel_tol·(1+‖M‖)`.
pub fn kernel_basis(m: &SquareMatrix, rel_tol: f64) -> Vec<Vec<f64>> {
    let svd = m.to_dmatrix().svd(false, true);
    let vt = svd.v_t.expect("requested");
    let tol = rel_tol * (1.0 + m.max_norm());
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= tol)
        .map(|(k, _)| vt.row(k).iter().copied().collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cofactor_det(m: &SquareMatrix) -> f64 {
        if m.dim() == 1 {
            return m[(0, 0)];
        }
        (0..m.dim())
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                s * m[(0, j)] * cofactor_det(&m.minor(0, j).unwrap())
            })
            .sum()
    }

    fn pseudo_random(d: usize, seed: u64) -> SquareMatrix {
        let mut s = seed;
        SquareMatrix::from_fn(d, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    #[test]
    fn determinant_basics() {
        assert_eq!(determinant(&SquareMatrix::identity(3)), 1.0);
        assert_eq!(determinant(&SquareMatrix::diag(&[2.0, 3.0])), 6.0);
        assert_eq!(determinant(&SquareMatrix::zeros(2)), 0.0);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        for seed in 0..20 {
            let m = pseudo_random(4, seed);
            let a = determinant(&m);
            let b = cofactor_det(&m);
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-3), "{a} vs {b}");
        }
    }

    #[test]
    fn adjugate_closed_forms() {
        assert_eq!(adjugate(&SquareMatrix::identity(4)), SquareMatrix::identity(4));
        let m = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let adj = adjugate(&m);
        assert_eq!(adj, SquareMatrix::from_rows(&[vec![4.0, -2.0], vec![-3.0, 1.0]]));
    }

    #[test]
    fn adjugate_product_identity() {
        for seed in 0..10 {
            let m = pseudo_random(5, seed);
            let adj = adjugate(&m);
            let det = determinant(&m);
            let bound = 1e-10 * (1.0 + det.abs()) * m.max_norm().max(1.0).powi(4);
            let left = adj.mul(&m).sub(&SquareMatrix::scalar(5, det));
            let right = m.mul(&adj).sub(&SquareMatrix::scalar(5, det));
            assert!(left.max_norm() <= bound && right.max_norm() <= bound);
        }
    }

    #[test]
    fn adjugate_of_singular_matrix() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        let adj = adjugate(&m);
        assert!(adj.mul(&m).max_norm() < 1e-14);
        assert_eq!(adj[(0, 0)], 4.0);
    }

    #[test]
    fn char_poly_small_cases() {
        let (p, b) = char_poly_and_adjugate_series(&SquareMatrix::zeros(2));
        assert_eq!(p.coeffs(), &[0.0, 0.0, 1.0]);
        assert_eq!(b[0], SquareMatrix::zeros(2));
        assert_eq!(b[1], SquareMatrix::identity(2));
        let (p, _) = char_poly_and_adjugate_series(&SquareMatrix::diag(&[1.0, 2.0]));
        assert_eq!(p.coeffs(), &[2.0, -3.0, 1.0]);
    }

    #[test]
    fn adjugate_series_matches_pointwise_adjugate() {
        let m = pseudo_random(4, 7);
        let (p, series) = char_poly_and_adjugate_series(&m);
        for &x in &[-1.3f64, 0.2, 2.5] {
            let mut sum = SquareMatrix::zeros(4);
            for (k, bk) in series.iter().enumerate() {
                sum = sum.add(&bk.scale(x.powi(k as i32)));
            }
            let direct = adjugate(&m.shifted(x));
            assert!(sum.sub(&direct).max_norm() < 1e-11);
            assert!((p.eval(x) - m.shifted(x).determinant()).abs() < 1e-11);
        }
    }

    #[test]
    fn char_poly_constant_term_is_signed_determinant() {
        for seed in 0..10 {
            let m = pseudo_random(6, seed + 100);
            let (p, _) = char_poly_and_adjugate_series(&m);
            let det = determinant(&m);
            assert!((p.eval(0.0) - det).abs() <= 1e-9 * (1.0 + det.abs()));
        }
    }

    #[test]
    fn char_poly_vanishes_at_companion_eigenvalues() {
        // oracle: eigenvalues of the companion matrix of the computed polynomial,
        // compared against the Schur eigenvalues of the matrix itself
        for seed in 0..10 {
            let m = pseudo_random(3, seed + 40);
            let (p, _) = char_poly_and_adjugate_series(&m);
            let c = p.coeffs();
            let comp = DMatrix::from_fn(3, 3, |i, j| {
                if j == 2 {
                    -c[i]
                } else if i == j + 1 {
                    1.0
                } else {
                    0.0
                }
            });
            let mut comp_ev: Vec<f64> = comp
                .complex_eigenvalues()
                .iter()
                .filter(|z| z.im.abs() < 1e-9)
                .map(|z| z.re)
                .collect();
            comp_ev.sort_by(|a, b| a.total_cmp(b));
            let ev = real_eigenvalues(&m);
            assert_eq!(ev.len(), comp_ev.len());
            let bound = 1e-8 * (1.0 + m.max_norm()).powi(3);
            for (a, b) in ev.iter().zip(&comp_ev) {
                assert!((a - b).abs() < 1e-8);
                assert!(p.eval(*a).abs() <= bound);
            }
        }
    }

    #[test]
    fn min_norm_and_kernel() {
        let m = SquareMatrix::diag(&[1.0, 0.0, 2.0]);
        let (x, r) = min_norm_solve(&m, &[1.0, 0.0, 4.0]);
        assert!(r < 1e-14);
        assert!((x[0] - 1.0).abs() < 1e-14 && x[1].abs() < 1e-14 && (x[2] - 2.0).abs() < 1e-14);
        let (_, r) = min_norm_solve(&m, &[1.0, 1.0, 4.0]);
        assert!((r - 1.0).abs() < 1e-12);
        let k = kernel_basis(&m, 1e-10);
        assert_eq!(k.len(), 1);
        assert!((k[0][1].abs() - 1.0).abs() < 1e-14);
    }
}
