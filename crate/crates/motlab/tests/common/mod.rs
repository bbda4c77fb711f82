//! Brute-force references shared by the oracle tests and the acceptance run.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use motlab::cost::CostModel;
use motlab::mot::{DiscreteMeasure, MOTInstance, Sense};
use motlab::sampling::trial_rng;
use motlab::linalg::{AffineMap, SquareMatrix};
use motlab::signomial::{build_chi, Chi, IsolationOptions};

/// Equality rows of the martingale transport polytope, one column per `π_ij`.
fn constraint_matrix(inst: &MOTInstance) -> (DMatrix<f64>, DVector<f64>) {
    let (m, n, d) = (inst.mu.len(), inst.nu.len(), inst.dim());
    let rows = m + n + m * d;
    let mut a = DMatrix::zeros(rows, m * n);
    let mut b = DVector::zeros(rows);
    for i in 0..m {
        for j in 0..n {
            let col = i * n + j;
            a[(i, col)] = 1.0;
            a[(m + j, col)] = 1.0;
            for k in 0..d {
                a[(m + n + i * d + k, col)] = inst.nu.atoms()[j][k] - inst.mu.atoms()[i][k];
            }
        }
        b[i] = inst.mu.weights()[i];
    }
    for j in 0..n {
        b[m + j] = inst.nu.weights()[j];
    }
    (a, b)
}

/// Greedy Gram–Schmidt: indices of a maximal set of independent rows.
fn independent_rows(a: &DMatrix<f64>) -> Vec<usize> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut keep = Vec::new();
    for r in 0..a.nrows() {
        let mut v: DVector<f64> = a.row(r).transpose();
        let scale = v.norm();
        for q in &basis {
            let c = q.dot(&v);
            v -= q * c;
        }
        if v.norm() > 1e-9 * (1.0 + scale) {
            basis.push(v.normalize());
            keep.push(r);
        }
    }
    keep
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Optimal value by visiting every basic feasible solution.
pub fn vertex_enumeration(inst: &MOTInstance, sense: Sense) -> Option<f64> {
    let (a_full, b_full) = constraint_matrix(inst);
    let rows = independent_rows(&a_full);
    let r = rows.len();
    let ncols = a_full.ncols();
    let cost: Vec<f64> = inst.cost.iter().flatten().copied().collect();
    let mut best: Option<f64> = None;
    for_each_subset(ncols, r, &mut |cols| {
        let bmat = DMatrix::from_fn(r, r, |i, j| a_full[(rows[i], cols[j])]);
        let rhs = DVector::from_fn(r, |i, _| b_full[rows[i]]);
        let lu = bmat.lu();
        let Some(xs) = lu.solve(&rhs) else { return };
        if xs.iter().any(|v| !v.is_finite() || *v < -1e-11) {
            return;
        }
        let mut x = DVector::zeros(ncols);
        for (k, c) in cols.iter().enumerate() {
            x[*c] = xs[k];
        }
        // singular-but-solved bases can leave the full system unsatisfied
        if (&a_full * &x - &b_full).amax() > 1e-9 {
            return;
        }
        let v: f64 = cols.iter().zip(xs.iter()).map(|(c, x)| cost[*c] * x).sum();
        best = Some(match (best, sense) {
            (None, _) => v,
            (Some(b), Sense::Max) => b.max(v),
            (Some(b), Sense::Min) => b.min(v),
        });
    });
    best
}

/// Small instances in convex order: `ν` atoms at random, `μ` atoms as the
/// barycentres of random kernels onto them.
pub fn small_corpus() -> Vec<MOTInstance> {
    let mut out = Vec::new();
    let costs = [
        Some(CostModel::power(3.0).unwrap()),
        Some(CostModel::power(0.5).unwrap()),
        Some(CostModel::OneNorm),
        None,
    ];
    let mut tag = 0u64;
    for d in 1..=2usize {
        for m in 1..=4usize {
            for n in 1..=4usize {
                if n < 2 && m > 1 {
                    continue;
                }
                for cost in &costs {
                    tag += 1;
                    let mut rng = trial_rng(0xC0FFEE, tag);
                    let ys: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
                    let w: Vec<f64> = {
                        let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.2..1.0)).collect();
                        let s: f64 = raw.iter().sum();
                        raw.iter().map(|v| v / s).collect()
                    };
                    let kernel: Vec<Vec<f64>> = (0..m)
                        .map(|_| {
                            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
                            let s: f64 = raw.iter().sum();
                            raw.iter().map(|v| v / s).collect()
                        })
                        .collect();
                    let xs: Vec<Vec<f64>> = kernel
                        .iter()
                        .map(|k| (0..d).map(|c| k.iter().zip(&ys).map(|(p, y)| p * y[c]).sum()).collect())
                        .collect();
                    let mut nu_w: Vec<f64> = (0..n).map(|j| (0..m).map(|i| w[i] * kernel[i][j]).sum()).collect();
                    let s: f64 = nu_w.iter().sum();
                    nu_w.iter_mut().for_each(|v| *v /= s);
                    let mu = DiscreteMeasure::new(xs, w).unwrap();
                    let nu = DiscreteMeasure::new(ys, nu_w).unwrap();
                    let inst = match cost {
                        Some(c) => MOTInstance::from_cost(mu, nu, c).unwrap(),
                        None => {
                            let table = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
                            MOTInstance::new(mu, nu, table).unwrap()
                        }
                    };
                    out.push(inst);
                }
            }
        }
    }
    out
}

/// χ from its definition: `det(B)² − κX^e|adj(B)v|²` with `B = XI − M`,
/// using `adj(B)v = det(B)·B⁻¹v`; times `X^{−e}` when the solver shifted it.
pub fn chi_direct(chi: &Chi, x: f64) -> f64 {
    let d = chi.v.len();
    let b = DMatrix::from_fn(d, d, |i, j| f64::from(u8::from(i == j)) * x - chi.matrix.row(i)[j]);
    let det = b.determinant();
    let v = DVector::from_column_slice(&chi.v);
    let adjv = b.lu().solve(&v).map(|s| s * det).unwrap_or_else(|| DVector::from_element(d, f64::NAN));
    let quad = adjv.norm_squared();
    if chi.shifted {
        x.powf(-chi.exponent) * det * det - chi.kappa * quad
    } else {
        det * det - chi.kappa * x.powf(chi.exponent) * quad
    }
}

/// Positive roots of `Σ c_i X^{e_i}` (ascending exponents) lie in this interval:
/// at a root some lower term must match the leading one to within a factor `n − 1`,
/// and likewise some higher term must match the lowest one.
pub fn signomial_root_bounds(terms: &[(f64, f64)]) -> (f64, f64) {
    let n = terms.len();
    let k = (n - 1) as f64;
    let (c_hi, e_hi) = terms[n - 1];
    let hi = terms[..n - 1]
        .iter()
        .map(|(c, e)| (k * c.abs() / c_hi.abs()).powf(1.0 / (e_hi - e)))
        .fold(0.0, f64::max);
    let (c_lo, e_lo) = terms[0];
    let lo = terms[1..]
        .iter()
        .map(|(c, e)| (c_lo.abs() / (k * c.abs())).powf(1.0 / (e - e_lo)))
        .fold(f64::INFINITY, f64::min);
    (lo, hi)
}

/// Log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|k| lo * (step * k as f64).exp()).collect()
}

/// Points `c·(1 ± s)` with `s` log-spaced from `1e−14` to `0.1`, where root pairs crowd near a pole.
pub fn ladder(c: f64, n: usize) -> Vec<f64> {
    log_grid(1e-14, 0.1, n).into_iter().flat_map(|s| [c * (1.0 - s), c * (1.0 + s)]).collect()
}

/// Sign changes of `f` over the sorted points, as bracketing pairs.
pub fn scan_points(f: impl Fn(f64) -> f64 + Sync, mut xs: Vec<f64>) -> Vec<(f64, f64)> {
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let vals: Vec<f64> = xs.par_iter().map(|x| f(*x)).collect();
    let mut out = Vec::new();
    let mut last: Option<usize> = None;
    for k in 0..xs.len() {
        if !vals[k].is_finite() || vals[k] == 0.0 {
            continue;
        }
        if let Some(j) = last {
            if vals[j].signum() != vals[k].signum() {
                out.push((xs[j], xs[k]));
            }
        }
        last = Some(k);
    }
    out
}

pub fn cube_vertices(d: usize) -> Vec<Vec<f64>> {
    (0..1usize << d).map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).collect()).collect()
}

pub fn cross_vertices(d: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..d {
        for s in [-1.0, 1.0] {
            let mut e = vec![0.0; d];
            e[i] = s;
            out.push(e);
        }
    }
    out
}

/// Every point of `got` matches a distinct point of `want` within `tol` (max norm), and the sizes agree.
pub fn same_point_set(got: &[Vec<f64>], want: &[Vec<f64>], tol: f64) -> bool {
    if got.len() != want.len() {
        return false;
    }
    let mut used = vec![false; want.len()];
    got.iter().all(|g| {
        let hit = want.iter().enumerate().position(|(k, w)| {
            !used[k] && g.iter().zip(w).all(|(a, b)| (a - b).abs() <= tol)
        });
        match hit {
            Some(k) => {
                used[k] = true;
                true
            }
            None => false,
        }
    })
}

pub const GRID_POINTS: usize = 1_000_000;

/// A random affine map and centre, turned into χ for `|x − y|^p`.
pub fn random_chi(master: u64, trial: u64, d: usize, p: f64) -> Chi {
    let mut rng = trial_rng(master, trial);
    let linear = SquareMatrix::from_fn(d, |_, _| rng.gen_range(-2.0..2.0));
    let offset: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let x0: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect();
    build_chi(&AffineMap::new(linear, offset), &x0, &CostModel::power(p).unwrap()).unwrap()
}

/// Compares the isolated roots with the sign changes of the direct evaluation:
/// the odd-multiplicity roots and the brackets must pair off one to one.
pub fn chi_agrees_with_scan(chi: &Chi) -> Result<usize, String> {
    let roots = chi.isolate(&[], &IsolationOptions::default()).map_err(|e| e.to_string())?;
    let (lo, hi) = signomial_root_bounds(chi.signomial.terms());
    let mut xs = log_grid(0.5 * lo, 2.0 * hi, GRID_POINTS);
    let m = DMatrix::from_fn(chi.dim(), chi.dim(), |i, j| chi.matrix.row(i)[j]);
    for ev in m.complex_eigenvalues().iter().filter(|z| z.im.abs() < 1e-9 && z.re > 0.0) {
        xs.extend(ladder(ev.re, 20_000));
    }
    let brackets = scan_points(|x| chi_direct(chi, x), xs);
    let odd: Vec<f64> = roots.iter().filter(|r| r.1 % 2 == 1).map(|r| r.0).collect();
    if odd.len() != brackets.len() {
        return Err(format!("{} odd roots {odd:?} vs {} sign changes {brackets:?}", odd.len(), brackets.len()));
    }
    for (r, (a, b)) in odd.iter().zip(&brackets) {
        let slack = 1e-9 * b;
        if *r < a - slack || *r > b + slack {
            return Err(format!("root {r} outside bracket ({a}, {b})"));
        }
    }
    Ok(roots.len())
}
