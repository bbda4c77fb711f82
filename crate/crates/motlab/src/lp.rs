//! Revised simplex on `min cᵀx, Ax {≤,=,≥} b, x ≥ 0`, steepest reduced cost with a lexicographic ratio test.

use nalgebra::DMatrix;
use thiserror::Error;

const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 20;
/// Pivots below this fraction of their column are recomputed from a fresh factorization.
const SUSPECT_PIVOT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("infeasible: phase-1 residual {residual:e}")]
    Infeasible { residual: f64 },
    #[error("objective unbounded below along column {column}")]
    Unbounded { column: usize },
    #[error("no progress after {iterations} pivots")]
    CyclingDetected { iterations: usize },
    #[error("basis matrix became singular")]
    SingularBasis,
    #[error("column index {index} out of range for {ncols} columns")]
    BadColumn { index: usize, ncols: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<(usize, f64)>,
    kind: RowKind,
    rhs: f64,
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    ncols: usize,
    cost: Vec<f64>,
    rows: Vec<Row>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// One multiplier per row with `cᵀx = yᵀb` at optimum.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    /// Nonbasic structural columns with zero reduced cost: 0 means a unique optimum.
    pub degenerate_directions: usize,
    pub iterations: usize,
}

impl LinearProgram {
    pub fn new(ncols: usize) -> Self {
        Self { ncols, cost: vec![0.0; ncols], rows: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_cost(&mut self, j: usize, c: f64) {
        self.cost[j] = c;
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, kind: RowKind, rhs: f64) -> Result<usize, LpError> {
        if let Some(&(index, _)) = coeffs.iter().find(|(j, _)| *j >= self.ncols) {
            return Err(LpError::BadColumn { index, ncols: self.ncols });
        }
        self.rows.push(Row { coeffs, kind, rhs });
        Ok(self.rows.len() - 1)
    }

    /// Phase 1 only: is the feasible set nonempty?
    pub fn feasible(&self) -> Result<bool, LpError> {
        match Tableau::build(self).phase_one() {
            Ok(_) => Ok(true),
            Err(LpError::Infeasible { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Smallest phase-1 residual `Σ artificials`, 0 when feasible.
    pub fn infeasibility(&self) -> Result<f64, LpError> {
        let mut t = Tableau::build(self);
        t.run_phase_one()
    }

    pub fn minimize(&self) -> Result<LpSolution, LpError> {
        let mut t = Tableau::build(self);
        t.phase_one()?;
        t.phase_two(self)
    }

    pub fn maximize(&self) -> Result<LpSolution, LpError> {
        let mut neg = self.clone();
        for c in &mut neg.cost {
            *c = -*c;
        }
        let mut sol = neg.minimize()?;
        sol.objective = -sol.objective;
        for y in &mut sol.duals {
            *y = -*y;
        }
        for r in &mut sol.reduced_costs {
            *r = -*r;
        }
        Ok(sol)
    }
}

struct Tableau {
    m: usize,
    nstruct: usize,
    /// structural, then slack/surplus, then artificial columns
    cols: Vec<Vec<(usize, f64)>>,
    first_artificial: usize,
    /// `−1` when a row was negated to make its right-hand side non-negative
    flip: Vec<f64>,
    b: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
    pinned_rows: bool,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp.ncols];
        let mut flip = vec![1.0; m];
        let mut b = vec![0.0; m];
        for (i, row) in lp.rows.iter().enumerate() {
            if row.rhs < 0.0 {
                flip[i] = -1.0;
            }
            b[i] = flip[i] * row.rhs;
            for &(j, a) in &row.coeffs {
                if a != 0.0 {
                    cols[j].push((i, flip[i] * a));
                }
            }
        }
        for c in &mut cols {
            c.sort_by_key(|e| e.0);
            // repeated (row, col) entries add up
            c.dedup_by(|later, earlier| {
                if later.0 == earlier.0 {
                    earlier.1 += later.1;
                    true
                } else {
                    false
                }
            });
        }
        let mut basis = vec![usize::MAX; m];
        for (i, row) in lp.rows.iter().enumerate() {
            let sign = match row.kind {
                RowKind::Le => 1.0,
                RowKind::Ge => -1.0,
                RowKind::Eq => continue,
            };
            let s = flip[i] * sign;
            cols.push(vec![(i, s)]);
            if s > 0.0 {
                basis[i] = cols.len() - 1;
            }
        }
        let first_artificial = cols.len();
        for (i, slot) in basis.iter_mut().enumerate() {
            if *slot == usize::MAX {
                cols.push(vec![(i, 1.0)]);
                *slot = cols.len() - 1;
            }
        }
        let mut is_basic = vec![false; cols.len()];
        for &j in &basis {
            is_basic[j] = true;
        }
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        let xb = b.clone();
        Self {
            m,
            nstruct: lp.ncols,
            cols,
            first_artificial,
            flip,
            b,
            basis,
            is_basic,
            binv,
            xb,
            iterations: 0,
            since_refactor: 0,
            pinned_rows: false,
        }
    }

    fn ncols(&self) -> usize {
        self.cols.len()
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            let cb = cost[j];
            if cb != 0.0 {
                let row = &self.binv[k * m..(k + 1) * m];
                for (yi, r) in y.iter_mut().zip(row) {
                    *yi += cb * r;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, cost: &[f64], y: &[f64], j: usize) -> f64 {
        cost[j] - self.cols[j].iter().map(|&(i, a)| y[i] * a).sum::<f64>()
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        for &(r, a) in &self.cols[j] {
            for (k, al) in alpha.iter_mut().enumerate() {
                *al += self.binv[k * m + r] * a;
            }
        }
        alpha
    }

    fn pivot(&mut self, k_out: usize, j_in: usize, alpha: &[f64]) -> Result<(), LpError> {
        let m = self.m;
        let piv = alpha[k_out];
        for c in 0..m {
            self.binv[k_out * m + c] /= piv;
        }
        self.xb[k_out] /= piv;
        let (pivot_row, pivot_x) = (self.binv[k_out * m..(k_out + 1) * m].to_vec(), self.xb[k_out]);
        for (k, &a) in alpha.iter().enumerate() {
            if k == k_out || a == 0.0 {
                continue;
            }
            for c in 0..m {
                self.binv[k * m + c] -= a * pivot_row[c];
            }
            self.xb[k] -= a * pivot_x;
        }
        self.is_basic[self.basis[k_out]] = false;
        self.is_basic[j_in] = true;
        self.basis[k_out] = j_in;
        self.iterations += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(())
    }

    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut bmat = DMatrix::<f64>::zeros(m, m);
        for (k, &j) in self.basis.iter().enumerate() {
            for &(r, a) in &self.cols[j] {
                bmat[(r, k)] = a;
            }
        }
        let inv = bmat.lu().try_inverse().ok_or(LpError::SingularBasis)?;
        for k in 0..m {
            for c in 0..m {
                self.binv[k * m + c] = inv[(k, c)];
            }
        }
        for k in 0..m {
            self.xb[k] = (0..m).map(|c| self.binv[k * m + c] * self.b[c]).sum();
        }
        self.since_refactor = 0;
        Ok(())
    }

    /// Leaving row for entering column `alpha`: the minimum ratio, ties broken
    /// lexicographically on the rows of `B⁻¹` scaled by `1/alpha`.
    fn ratio_test(&self, alpha: &[f64]) -> Option<usize> {
        let m = self.m;
        let piv_tol = PIVOT_TOL * alpha.iter().fold(1.0, |mx: f64, a| mx.max(a.abs()));
        let mut rows: Vec<usize> = Vec::new();
        let mut best = f64::INFINITY;
        for k in 0..m {
            // artificials left after phase 1 sit on dependent rows, where alpha is roundoff
            if self.pinned_rows && self.basis[k] >= self.first_artificial {
                continue;
            }
            if alpha[k] <= piv_tol {
                continue;
            }
            let ratio = self.xb[k].max(0.0) / alpha[k];
            let tie = best.is_finite() && (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
            if tie {
                rows.push(k);
            } else if ratio < best {
                best = ratio;
                rows.clear();
                rows.push(k);
            }
        }
        let mut c = 0;
        while rows.len() > 1 && c < m {
            let key = |k: usize| self.binv[k * m + c] / alpha[k];
            let lo = rows.iter().map(|&k| key(k)).fold(f64::INFINITY, f64::min);
            let spread = rows.iter().map(|&k| key(k).abs()).fold(1.0, f64::max);
            rows.retain(|&k| key(k) <= lo + 1e-12 * spread);
            c += 1;
        }
        rows.into_iter().min_by(|&a, &b| alpha[b].total_cmp(&alpha[a]))
    }

    /// Most negative reduced cost enters; the lexicographic leaving rule rules out cycles.
    /// `enter_ok` filters candidate columns.
    fn optimize(&mut self, cost: &[f64], enter_ok: impl Fn(usize) -> bool) -> Result<(), LpError> {
        let scale = 1.0 + cost.iter().fold(0.0, |m: f64, c| m.max(c.abs()));
        let opt_tol = 1e-10 * scale;
        let cap = 50_000 + 200 * (self.m + self.ncols());
        loop {
            if self.iterations > cap {
                return Err(LpError::CyclingDetected { iterations: self.iterations });
            }
            let y = self.duals(cost);
            let mut steepest: Option<(usize, f64)> = None;
            for j in (0..self.ncols()).filter(|&j| !self.is_basic[j] && enter_ok(j)) {
                let d = self.reduced_cost(cost, &y, j);
                if d < -opt_tol && steepest.map_or(true, |(_, ds)| d < ds) {
                    steepest = Some((j, d));
                }
            }
            let Some((j, _)) = steepest else {
                return Ok(());
            };
            let alpha = self.ftran(j);
            let Some(k_out) = self.ratio_test(&alpha) else {
                return Err(LpError::Unbounded { column: j });
            };
            let amax = alpha.iter().fold(1.0, |m: f64, a| m.max(a.abs()));
            if alpha[k_out] < SUSPECT_PIVOT * amax && self.since_refactor > 0 {
                self.refactor()?;
                continue;
            }
            self.pivot(k_out, j, &alpha)?;
        }
    }

    fn run_phase_one(&mut self) -> Result<f64, LpError> {
        let cost: Vec<f64> = (0..self.ncols()).map(|j| if j >= self.first_artificial { 1.0 } else { 0.0 }).collect();
        self.optimize(&cost, |_| true)?;
        self.refactor()?;
        Ok(self
            .basis
            .iter()
            .zip(&self.xb)
            .filter(|(j, _)| **j >= self.first_artificial)
            .map(|(_, x)| x.max(0.0))
            .sum())
    }

    fn phase_one(&mut self) -> Result<(), LpError> {
        let residual = self.run_phase_one()?;
        let bscale = 1.0 + self.b.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if residual > 1e-9 * bscale {
            return Err(LpError::Infeasible { residual });
        }
        self.drive_out_artificials()
    }

    /// Pivot zero-level artificials out where possible; the rest sit on redundant rows.
    fn drive_out_artificials(&mut self) -> Result<(), LpError> {
        let m = self.m;
        for k in 0..m {
            if self.basis[k] < self.first_artificial {
                continue;
            }
            let row = self.binv[k * m..(k + 1) * m].to_vec();
            let candidate = (0..self.first_artificial).find(|&j| {
                !self.is_basic[j] && self.cols[j].iter().map(|&(r, a)| row[r] * a).sum::<f64>().abs() > PIVOT_TOL
            });
            if let Some(j) = candidate {
                let alpha = self.ftran(j);
                self.pivot(k, j, &alpha)?;
            }
        }
        self.pinned_rows = true;
        Ok(())
    }

    fn phase_two(mut self, lp: &LinearProgram) -> Result<LpSolution, LpError> {
        let mut cost = vec![0.0; self.ncols()];
        cost[..self.nstruct].copy_from_slice(&lp.cost);
        let first_art = self.first_artificial;
        self.optimize(&cost, |j| j < first_art)?;
        self.refactor()?;

        let mut x = vec![0.0; self.nstruct];
        for (k, &j) in self.basis.iter().enumerate() {
            if j < self.nstruct {
                x[j] = self.xb[k].max(0.0);
            }
        }
        let y = self.duals(&cost);
        let reduced_costs: Vec<f64> = (0..self.nstruct).map(|j| self.reduced_cost(&cost, &y, j)).collect();
        let scale = 1.0 + lp.cost.iter().fold(0.0, |m: f64, c| m.max(c.abs()));
        let degenerate_directions = (0..self.nstruct)
            .filter(|&j| !self.is_basic[j] && reduced_costs[j].abs() <= 1e-9 * scale)
            .count();
        let duals = y.iter().zip(&self.flip).map(|(v, f)| v * f).collect();
        let objective = lp.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { x, objective, duals, reduced_costs, degenerate_directions, iterations: self.iterations })
    }
}
