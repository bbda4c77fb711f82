//! Marginals whose optimal martingale coupling has a prescribed conditional support.
//!
//! With `φ(x) = ½M|x − x0|²` and `h(x) = ∇Aᵀ(x − x0) − A(x0)`, each support point
//! `y_i` is continued to a map `T_i` solving
//! `c_x(x, T_i(x)) − ∇A(T_i(x) − x) = M(x − x0) − h(x)`, `T_i(x0) = y_i`,
//! and `μ` on a small ball is split along the `T_i(x)` with barycentric weights.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

use crate::cost::{CostError, CostModel};
use crate::linalg::{vector, AffineMap, SquareMatrix};
use crate::support::{interior_check, max_min_weights, SupportError, SupportSet};

use super::{Coupling, DiscreteMeasure, MOTInstance, MotError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConverseError {
    #[error("no M up to {m} makes the hedge convex on the grid")]
    MTooSmall { m: f64 },
    #[error("Newton continuation of branch {branch} diverged at {atom:?}")]
    NewtonDiverged { branch: usize, atom: Vec<f64> },
    #[error("{atom:?} leaves the hull of its branch images; shrink the ball")]
    NegativeWeights { atom: Vec<f64> },
    #[error("x0 is not interior to the support hull")]
    NotInterior,
    #[error("support has {0} sphere components; a finite support is required")]
    InfiniteSupport(usize),
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error(transparent)]
    Support(#[from] SupportError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Mot(#[from] MotError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConverseOptions {
    pub ball_radius: f64,
    /// Lattice points per axis across the ball's bounding cube.
    pub grid_n: usize,
    /// Fixed `M`; `None` starts at the convexity gate plus one and doubles.
    pub m: Option<f64>,
    pub max_doublings: u32,
    pub merge_tol: f64,
}

impl Default for ConverseOptions {
    fn default() -> Self {
        Self { ball_radius: 0.02, grid_n: 5, m: None, max_doublings: 10, merge_tol: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConverseInstance {
    #[serde(skip)]
    pub instance: MOTInstance,
    pub m: f64,
    /// `images[a][i] = T_i(x_a)`.
    pub images: Vec<Vec<Vec<f64>>>,
    pub lambdas: Vec<Vec<f64>>,
    /// `ν` atom index of each image.
    pub nu_index: Vec<Vec<usize>>,
    pub planted: Coupling,
    pub support_size: usize,
}

fn lattice(x0: &[f64], radius: f64, n: usize) -> Result<Vec<Vec<f64>>, ConverseError> {
    if n == 0 || !(radius >= 0.0 && radius.is_finite()) {
        return Err(ConverseError::BadGrid(format!("n = {n}, radius = {radius}")));
    }
    if n == 1 || radius == 0.0 {
        return Ok(vec![x0.to_vec()]);
    }
    let d = x0.len();
    let step = 2.0 * radius / (n - 1) as f64;
    let mut out = Vec::new();
    let mut idx = vec![0usize; d];
    loop {
        let x: Vec<f64> = idx.iter().zip(x0).map(|(i, c)| c - radius + step * *i as f64).collect();
        if vector::dist(&x, x0) <= radius * (1.0 + 1e-12) {
            out.push(x);
        }
        let Some(k) = idx.iter().position(|i| *i + 1 < n) else { break };
        idx[k] += 1;
        for i in &mut idx[..k] {
            *i = 0;
        }
    }
    Ok(out)
}

fn min_sym_eigenvalue(m: &SquareMatrix) -> f64 {
    let dm = m.to_dmatrix();
    let sym = (&dm + dm.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.min()
}

/// `MI − (∇A + ∇Aᵀ) − c_xx(x, y)`.
fn hedge_hessian(c: &CostModel, a: &AffineMap, m: f64, x: &[f64], y: &[f64]) -> Result<SquareMatrix, CostError> {
    let d = x.len();
    Ok(SquareMatrix::scalar(d, m).sub(&a.linear.add(&a.linear.transpose())).sub(&c.hess_xx(x, y)?))
}

struct Branches<'a> {
    c: &'a CostModel,
    a: &'a AffineMap,
    x0: &'a [f64],
    m: f64,
}

impl Branches<'_> {
    /// Right-hand side `M(x − x0) − h(x)` plus `∇A·x`.
    fn target(&self, x: &[f64]) -> Vec<f64> {
        let u = vector::sub(x, self.x0);
        let h = vector::sub(&self.a.linear.transpose().mul_vec(&u), &self.a.apply(self.x0));
        vector::sub(&vector::scale(&u, self.m), &h)
    }

    fn residual(&self, x: &[f64], t: &[f64], target: &[f64]) -> Result<Vec<f64>, CostError> {
        let lhs = vector::sub(&self.c.grad_x(x, t)?, &self.a.linear.mul_vec(&vector::sub(t, x)));
        Ok(vector::sub(&lhs, target))
    }

    fn newton(&self, x: &[f64], start: &[f64]) -> Option<Vec<f64>> {
        let target = self.target(x);
        let mut t = start.to_vec();
        let mut r = self.residual(x, &t, &target).ok()?;
        let scale = 1.0 + vector::norm(&target) + vector::norm(&self.c.grad_x(x, &t).ok()?);
        for _ in 0..100 {
            if vector::norm(&r) <= 1e-13 * scale {
                return Some(t);
            }
            let jac = self.c.grad_xy(x, &t).ok()?.sub(&self.a.linear);
            let step = jac.solve(&vector::scale(&r, -1.0))?;
            let mut alpha = 1.0;
            loop {
                let trial = vector::axpy(&t, alpha, &step);
                if let Ok(rt) = self.residual(x, &trial, &target) {
                    if vector::norm(&rt) < vector::norm(&r) || alpha < 1e-3 {
                        t = trial;
                        r = rt;
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-10 {
                    return None;
                }
            }
        }
        (vector::norm(&r) <= 1e-10 * scale).then_some(t)
    }
}

/// `λ ≥ 0` with `Σλ_i t_i = x`, `Σλ_i = 1`: least-norm if nonnegative, else max-min.
fn branch_weights(images: &[Vec<f64>], x: &[f64]) -> Option<Vec<f64>> {
    let (d, k) = (x.len(), images.len());
    let mat = DMatrix::from_fn(d + 1, k, |r, c| if r < d { images[c][r] } else { 1.0 });
    let mut rhs = DVector::from_element(d + 1, 1.0);
    for r in 0..d {
        rhs[r] = x[r];
    }
    if let Ok(sol) = mat.clone().svd(true, true).solve(&rhs, 1e-12) {
        let exact = (&mat * &sol - &rhs).amax() <= 1e-12 * (1.0 + rhs.amax());
        if exact && sol.iter().all(|l| *l > 0.0) {
            return Some(sol.iter().copied().collect());
        }
    }
    match max_min_weights(images, x) {
        Ok(Some((t, w))) if t > 0.0 => Some(w),
        _ => None,
    }
}

fn merge_atom(atoms: &mut Vec<Vec<f64>>, weights: &mut Vec<f64>, y: &[f64], w: f64, tol: f64) -> usize {
    if let Some(j) = atoms.iter().position(|a| vector::norm_inf(&vector::sub(a, y)) <= tol * (1.0 + vector::norm_inf(y))) {
        weights[j] += w;
        return j;
    }
    atoms.push(y.to_vec());
    weights.push(w);
    atoms.len() - 1
}

pub fn build_converse_instance(
    c: &CostModel,
    s0: &SupportSet,
    opts: &ConverseOptions,
) -> Result<ConverseInstance, ConverseError> {
    if !s0.spheres.is_empty() {
        return Err(ConverseError::InfiniteSupport(s0.spheres.len()));
    }
    if !interior_check(s0)? {
        return Err(ConverseError::NotInterior);
    }
    let x0 = s0.x0.as_slice();
    let ys = s0.points();
    let a = &s0.affine;
    let grid = lattice(x0, opts.ball_radius, opts.grid_n)?;

    let m0 = match opts.m {
        Some(m) => m,
        None => {
            let mut gate = f64::NEG_INFINITY;
            for y in &ys {
                gate = gate.max(-min_sym_eigenvalue(&hedge_hessian(c, a, 0.0, x0, y)?));
            }
            (gate + 1.0).max(1.0)
        }
    };
    let doublings = if opts.m.is_some() { 0 } else { opts.max_doublings };
    let mut m = m0;
    for _ in 0..=doublings {
        if let Some(built) = try_build(c, a, x0, &ys, &grid, m, opts)? {
            return Ok(built);
        }
        m *= 2.0;
    }
    Err(ConverseError::MTooSmall { m: m / 2.0 })
}

/// `None` when the convexity gate fails somewhere on the grid.
fn try_build(
    c: &CostModel,
    a: &AffineMap,
    x0: &[f64],
    ys: &[Vec<f64>],
    grid: &[Vec<f64>],
    m: f64,
    opts: &ConverseOptions,
) -> Result<Option<ConverseInstance>, ConverseError> {
    let br = Branches { c, a, x0, m };
    let mut images = Vec::with_capacity(grid.len());
    for x in grid {
        let mut row = Vec::with_capacity(ys.len());
        for (i, y) in ys.iter().enumerate() {
            let t = br.newton(x, y).ok_or_else(|| ConverseError::NewtonDiverged { branch: i, atom: x.clone() })?;
            row.push(t);
        }
        images.push(row);
    }
    for x in grid {
        for t in images.iter().flatten() {
            if min_sym_eigenvalue(&hedge_hessian(c, a, m, x, t)?) <= 0.0 {
                return Ok(None);
            }
        }
    }
    let mut lambdas = Vec::with_capacity(grid.len());
    for (x, row) in grid.iter().zip(&images) {
        lambdas.push(branch_weights(row, x).ok_or_else(|| ConverseError::NegativeWeights { atom: x.clone() })?);
    }

    let mw = 1.0 / grid.len() as f64;
    let (mut atoms, mut weights) = (Vec::new(), Vec::new());
    let mut nu_index = Vec::with_capacity(grid.len());
    for (row, lam) in images.iter().zip(&lambdas) {
        nu_index.push(
            row.iter().zip(lam).map(|(t, l)| merge_atom(&mut atoms, &mut weights, t, mw * l, opts.merge_tol)).collect::<Vec<_>>(),
        );
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut pi = vec![vec![0.0; atoms.len()]; grid.len()];
    for (a_idx, (idx, lam)) in nu_index.iter().zip(&lambdas).enumerate() {
        for (j, l) in idx.iter().zip(lam) {
            pi[a_idx][*j] += mw * l / total;
        }
    }
    let mu = DiscreteMeasure::uniform(grid.to_vec())?;
    let nu = DiscreteMeasure::new(atoms, weights)?;
    let instance = MOTInstance::from_cost(mu, nu, c)?;
    Ok(Some(ConverseInstance {
        instance,
        m,
        images,
        lambdas,
        nu_index,
        planted: Coupling { pi },
        support_size: ys.len(),
    }))
}

/// Per `μ` atom, `max |c_x(x, y) − Â_x(y)| / (1 + max |c_x|)` over its support,
/// with `Â_x` fitted by least squares on that support; `None` below `d+1` points.
pub fn structure_residuals(c: &CostModel, inst: &MOTInstance, supports: &[Vec<usize>]) -> Result<Vec<Option<f64>>, CostError> {
    let d = inst.dim();
    let mut out = Vec::with_capacity(supports.len());
    for (x, js) in inst.mu.atoms().iter().zip(supports) {
        if js.len() < d + 1 {
            out.push(None);
            continue;
        }
        let ys: Vec<&Vec<f64>> = js.iter().map(|j| &inst.nu.atoms()[*j]).collect();
        let grads = ys.iter().map(|y| c.grad_x(x, y)).collect::<Result<Vec<_>, _>>()?;
        let design = DMatrix::from_fn(ys.len(), d + 1, |r, k| if k < d { ys[r][k] } else { 1.0 });
        let svd = design.clone().svd(true, true);
        let scale = 1.0 + grads.iter().map(|g| vector::norm_inf(g)).fold(0.0, f64::max);
        let mut worst: f64 = 0.0;
        for k in 0..d {
            let rhs = DVector::from_iterator(ys.len(), grads.iter().map(|g| g[k]));
            let coef = svd.solve(&rhs, 1e-14).expect("SVD factors were computed");
            worst = worst.max((&design * coef - rhs).amax());
        }
        out.push(Some(worst / scale));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mot::{dual_gap, extract_conditional_supports, solve_mot_lp, Sense};
    use crate::support::solve_support_power;

    fn support(p: f64, seeds: Vec<Vec<f64>>) -> (CostModel, SupportSet) {
        let c = CostModel::power(p).unwrap();
        let d = seeds[0].len();
        let s = solve_support_power(&c, &vec![0.0; d], &seeds).unwrap();
        (c, s)
    }

    #[test]
    fn lattice_in_ball() {
        assert_eq!(lattice(&[0.0, 0.0], 1.0, 5).unwrap().len(), 13);
        assert_eq!(lattice(&[0.0], 1.0, 9).unwrap().len(), 9);
        assert_eq!(lattice(&[0.3, 0.1], 0.0, 5).unwrap(), vec![vec![0.3, 0.1]]);
    }

    #[test]
    fn single_atom_limit() {
        let (c, s) = support(3.0, vec![vec![-1.0], vec![0.7]]);
        let opts = ConverseOptions { ball_radius: 0.0, ..Default::default() };
        let b = build_converse_instance(&c, &s, &opts).unwrap();
        assert_eq!(b.instance.mu.len(), 1);
        let sol = solve_mot_lp(&b.instance, Sense::Max).unwrap();
        let expect: f64 = s.points().iter().zip(&b.lambdas[0]).map(|(y, l)| l * c.cost(&s.x0, y)).sum();
        assert!((sol.value - expect).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_cubic_recovers_three_branches() {
        let (c, s) = support(3.0, vec![vec![-1.0], vec![0.7]]);
        assert_eq!(s.points().len(), 3);
        let opts = ConverseOptions { ball_radius: 0.02, grid_n: 9, ..Default::default() };
        let b = build_converse_instance(&c, &s, &opts).unwrap();
        assert!(b.planted.errors(&b.instance).within(1e-12));
        let sol = solve_mot_lp(&b.instance, Sense::Max).unwrap();
        let supports = extract_conditional_supports(&b.instance, &sol.coupling, 1e-7);
        assert!(supports.iter().all(|s| s.len() == 3), "{supports:?}");
        assert!(dual_gap(&b.instance, &sol.coupling, &sol.dual).unwrap() <= 1e-7 * (1.0 + sol.value.abs()));
        assert!((sol.value - b.planted.value(&b.instance)).abs() <= 1e-9 * (1.0 + sol.value.abs()));
        for r in structure_residuals(&c, &b.instance, &supports).unwrap() {
            assert!(r.unwrap() <= 5e-3);
        }
    }
}
