//! Discrete martingale optimal transport as a dense LP, with dual certificates.

mod converse;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{CostError, CostModel};
use crate::linalg::vector;
use crate::lp::{LinearProgram, LpError, RowKind};

pub use converse::{build_converse_instance, structure_residuals, ConverseError, ConverseInstance, ConverseOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MotError {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("marginals are not in convex order")]
    NotInConvexOrder,
    #[error("infeasible input: {0}")]
    InfeasibleInput(String),
    #[error("unknown cost kind {0:?}")]
    UnknownCostKind(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Cost(#[from] CostError),
}

const WEIGHT_SUM_TOL: f64 = 1e-12;
const ATOM_TOL: f64 = 1e-10;
pub const MARGINAL_TOL: f64 = 1e-9;
pub const DUAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure")]
pub struct DiscreteMeasure {
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawMeasure {
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl TryFrom<RawMeasure> for DiscreteMeasure {
    type Error = MotError;
    fn try_from(r: RawMeasure) -> Result<Self, MotError> {
        Self::new(r.atoms, r.weights)
    }
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self, MotError> {
        let bad = |s: String| Err(MotError::InvalidMeasure(s));
        if atoms.is_empty() || atoms.len() != weights.len() {
            return bad(format!("{} atoms with {} weights", atoms.len(), weights.len()));
        }
        let d = atoms[0].len();
        if d == 0 || atoms.iter().any(|a| a.len() != d || a.iter().any(|v| !v.is_finite())) {
            return bad("atoms must be finite vectors of one common nonzero length".into());
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return bad(format!("weight {w} is not positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return bad(format!("weights sum to {total}"));
        }
        for i in 0..atoms.len() {
            for j in 0..i {
                if vector::norm_inf(&vector::sub(&atoms[i], &atoms[j])) <= ATOM_TOL {
                    return bad(format!("atoms {j} and {i} coincide"));
                }
            }
        }
        Ok(Self { atoms, weights })
    }

    pub fn dirac(x: Vec<f64>) -> Self {
        Self::new(vec![x], vec![1.0]).expect("a single finite atom")
    }

    /// Equal weights on the given atoms.
    pub fn uniform(atoms: Vec<Vec<f64>>) -> Result<Self, MotError> {
        let n = atoms.len().max(1);
        Self::new(atoms, vec![1.0 / n as f64; n])
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].len()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim()];
        for (a, w) in self.atoms.iter().zip(&self.weights) {
            m = vector::axpy(&m, *w, a);
        }
        m
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MOTInstance {
    pub mu: DiscreteMeasure,
    pub nu: DiscreteMeasure,
    /// `cost[i][j] = c(x_i, y_j)`.
    pub cost: Vec<Vec<f64>>,
    /// Set when the matrix was filled from a cost model.
    pub cost_kind: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    d: usize,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cost_kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cost: Option<Vec<Vec<f64>>>,
}

/// `power:<p>`, `one-norm` or `inf-norm`.
pub fn cost_from_kind(kind: &str) -> Result<CostModel, MotError> {
    match kind {
        "one-norm" => Ok(CostModel::OneNorm),
        "inf-norm" => Ok(CostModel::InfNorm),
        _ => {
            let p = kind
                .strip_prefix("power:")
                .and_then(|p| p.parse::<f64>().ok())
                .ok_or_else(|| MotError::UnknownCostKind(kind.to_string()))?;
            Ok(CostModel::power(p)?)
        }
    }
}

pub fn cost_kind_of(c: &CostModel) -> Option<String> {
    match c {
        CostModel::PowerDistance { p } => Some(format!("power:{p}")),
        CostModel::OneNorm => Some("one-norm".into()),
        CostModel::InfNorm => Some("inf-norm".into()),
        _ => None,
    }
}

impl MOTInstance {
    pub fn new(mu: DiscreteMeasure, nu: DiscreteMeasure, cost: Vec<Vec<f64>>) -> Result<Self, MotError> {
        if mu.dim() != nu.dim() {
            return Err(MotError::DimensionMismatch { expected: mu.dim(), got: nu.dim() });
        }
        if cost.len() != mu.len() {
            return Err(MotError::DimensionMismatch { expected: mu.len(), got: cost.len() });
        }
        for row in &cost {
            if row.len() != nu.len() {
                return Err(MotError::DimensionMismatch { expected: nu.len(), got: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(MotError::InvalidMeasure("cost matrix has a non-finite entry".into()));
            }
        }
        Ok(Self { mu, nu, cost, cost_kind: None })
    }

    pub fn from_cost(mu: DiscreteMeasure, nu: DiscreteMeasure, c: &CostModel) -> Result<Self, MotError> {
        let cost = mu.atoms().iter().map(|x| nu.atoms().iter().map(|y| c.cost(x, y)).collect()).collect();
        let mut inst = Self::new(mu, nu, cost)?;
        inst.cost_kind = cost_kind_of(c);
        Ok(inst)
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }

    pub fn cost_scale(&self) -> f64 {
        1.0 + self.cost.iter().flatten().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        crate::output::to_json_string(&InstanceFile {
            d: self.dim(),
            mu: self.mu.clone(),
            nu: self.nu.clone(),
            cost_kind: self.cost_kind.clone(),
            cost: Some(self.cost.clone()),
        })
    }

    /// Reads an explicit cost matrix, or fills one from `cost_kind`.
    pub fn from_json(s: &str) -> Result<Self, MotError> {
        let f: InstanceFile = serde_json::from_str(s).map_err(|e| MotError::InvalidMeasure(e.to_string()))?;
        if f.mu.dim() != f.d {
            return Err(MotError::DimensionMismatch { expected: f.d, got: f.mu.dim() });
        }
        let mut inst = match (f.cost, &f.cost_kind) {
            (Some(cost), _) => Self::new(f.mu, f.nu, cost)?,
            (None, Some(kind)) => Self::from_cost(f.mu, f.nu, &cost_from_kind(kind)?)?,
            (None, None) => return Err(MotError::InvalidMeasure("neither cost nor cost_kind given".into())),
        };
        inst.cost_kind = f.cost_kind;
        Ok(inst)
    }

    fn var(&self, i: usize, j: usize) -> usize {
        i * self.nu.len() + j
    }

    /// Marginal and martingale constraints on `π_ij`, rows ordered
    /// `μ` sums, `ν` sums, then `d` martingale rows per `μ` atom.
    ///
    /// The last `ν` row and the last atom's martingale rows follow from the
    /// others once the means agree, so they are left out.
    fn constraint_lp(&self) -> Result<Option<LinearProgram>, LpError> {
        let (m, n, d) = (self.mu.len(), self.nu.len(), self.dim());
        let gap = vector::norm_inf(&vector::sub(&self.mu.mean(), &self.nu.mean()));
        let spread = self.mu.atoms.iter().chain(&self.nu.atoms).map(|a| vector::norm_inf(a)).fold(1.0, f64::max);
        if gap > MARGINAL_TOL * spread {
            return Ok(None);
        }
        let mut lp = LinearProgram::new(m * n);
        for i in 0..m {
            lp.add_row((0..n).map(|j| (self.var(i, j), 1.0)).collect(), RowKind::Eq, self.mu.weights[i])?;
        }
        for j in 0..n - 1 {
            lp.add_row((0..m).map(|i| (self.var(i, j), 1.0)).collect(), RowKind::Eq, self.nu.weights[j])?;
        }
        for i in 0..m - 1 {
            let x = &self.mu.atoms[i];
            for k in 0..d {
                let coeffs = (0..n)
                    .map(|j| (self.var(i, j), self.nu.atoms[j][k] - x[k]))
                    .filter(|(_, v)| *v != 0.0)
                    .collect();
                lp.add_row(coeffs, RowKind::Eq, 0.0)?;
            }
        }
        Ok(Some(lp))
    }
}

/// Is there a martingale coupling of `mu` and `nu`?
pub fn check_convex_order(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<bool, MotError> {
    if mu.dim() != nu.dim() {
        return Err(MotError::DimensionMismatch { expected: mu.dim(), got: nu.dim() });
    }
    let zero = vec![vec![0.0; nu.len()]; mu.len()];
    let inst = MOTInstance::new(mu.clone(), nu.clone(), zero)?;
    match inst.constraint_lp()? {
        Some(lp) => Ok(lp.feasible()?),
        None => Ok(false),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coupling {
    pub pi: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CouplingErrors {
    pub row: f64,
    pub column: f64,
    /// Worst `|Σ_j π_ij (y_j − x_i)|_∞ / μ_i`.
    pub martingale: f64,
    pub min_entry: f64,
}

impl CouplingErrors {
    pub fn within(&self, tol: f64) -> bool {
        self.row <= tol && self.column <= tol && self.martingale <= tol && self.min_entry >= -tol
    }
}

impl Coupling {
    pub fn errors(&self, inst: &MOTInstance) -> CouplingErrors {
        let (m, n) = (inst.mu.len(), inst.nu.len());
        let mut e = CouplingErrors { row: 0.0, column: 0.0, martingale: 0.0, min_entry: f64::INFINITY };
        for i in 0..m {
            let s: f64 = self.pi[i].iter().sum();
            e.row = e.row.max((s - inst.mu.weights[i]).abs());
            let mut drift = vec![0.0; inst.dim()];
            for j in 0..n {
                drift = vector::axpy(&drift, self.pi[i][j], &vector::sub(&inst.nu.atoms[j], &inst.mu.atoms[i]));
                e.min_entry = e.min_entry.min(self.pi[i][j]);
            }
            e.martingale = e.martingale.max(vector::norm_inf(&drift) / inst.mu.weights[i]);
        }
        for j in 0..n {
            let s: f64 = (0..m).map(|i| self.pi[i][j]).sum();
            e.column = e.column.max((s - inst.nu.weights[j]).abs());
        }
        e
    }

    pub fn value(&self, inst: &MOTInstance) -> f64 {
        self.pi.iter().zip(&inst.cost).map(|(p, c)| vector::dot(p, c)).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sense {
    Max,
    Min,
}

/// `φ ⊕ ψ + h^⊗ ≥ c` for maximization, `≤ c` for minimization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualCertificate {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub h: Vec<Vec<f64>>,
    pub sense: Sense,
}

impl DualCertificate {
    pub fn value(&self, inst: &MOTInstance) -> f64 {
        inst.mu.integrate(&self.phi) + inst.nu.integrate(&self.psi)
    }

    fn hedge(&self, inst: &MOTInstance, i: usize, j: usize) -> f64 {
        let u = vector::sub(&inst.nu.atoms[j], &inst.mu.atoms[i]);
        self.phi[i] + self.psi[j] + vector::dot(&self.h[i], &u)
    }

    /// Largest amount by which the hedge misses the cost on the wrong side.
    pub fn violation(&self, inst: &MOTInstance) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..inst.mu.len() {
            for j in 0..inst.nu.len() {
                let slack = self.hedge(inst, i, j) - inst.cost[i][j];
                let miss = match self.sense {
                    Sense::Max => -slack,
                    Sense::Min => slack,
                };
                worst = worst.max(miss);
            }
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MotSolution {
    pub coupling: Coupling,
    pub value: f64,
    pub dual: DualCertificate,
    /// Nonbasic directions with zero reduced cost; 0 certifies a unique optimum.
    pub face_directions: usize,
    pub iterations: usize,
}

pub fn solve_mot_lp(inst: &MOTInstance, sense: Sense) -> Result<MotSolution, MotError> {
    let (m, n, d) = (inst.mu.len(), inst.nu.len(), inst.dim());
    let mut lp = inst.constraint_lp()?.ok_or(MotError::NotInConvexOrder)?;
    for i in 0..m {
        for j in 0..n {
            lp.set_cost(inst.var(i, j), inst.cost[i][j]);
        }
    }
    let sol = match sense {
        Sense::Max => lp.maximize(),
        Sense::Min => lp.minimize(),
    }
    .map_err(|e| match e {
        LpError::Infeasible { .. } => MotError::NotInConvexOrder,
        e => MotError::Lp(e),
    })?;
    let pi = (0..m).map(|i| (0..n).map(|j| sol.x[inst.var(i, j)].max(0.0)).collect()).collect();
    // dropped rows carry zero multipliers
    let mut y = sol.duals[..m + n - 1].to_vec();
    y.push(0.0);
    y.extend_from_slice(&sol.duals[m + n - 1..]);
    y.resize(m + n + m * d, 0.0);
    let dual = DualCertificate {
        phi: y[..m].to_vec(),
        psi: y[m..m + n].to_vec(),
        h: (0..m).map(|i| y[m + n + i * d..m + n + (i + 1) * d].to_vec()).collect(),
        sense,
    };
    let coupling = Coupling { pi };
    Ok(MotSolution {
        value: coupling.value(inst),
        coupling,
        dual,
        face_directions: sol.degenerate_directions,
        iterations: sol.iterations,
    })
}

/// For each `μ` atom, the `ν` atoms carrying more than `threshold` of its mass.
pub fn extract_conditional_supports(inst: &MOTInstance, coupling: &Coupling, threshold: f64) -> Vec<Vec<usize>> {
    coupling
        .pi
        .iter()
        .zip(inst.mu.weights())
        .map(|(row, w)| row.iter().enumerate().filter(|(_, p)| **p > threshold * w).map(|(j, _)| j).collect())
        .collect()
}

/// `μ(φ) + ν(ψ) − π(c)`, sign-adjusted so it is nonnegative for feasible pairs.
pub fn dual_gap(inst: &MOTInstance, coupling: &Coupling, dual: &DualCertificate) -> Result<f64, MotError> {
    let e = coupling.errors(inst);
    if !e.within(MARGINAL_TOL) {
        return Err(MotError::InfeasibleInput(format!("coupling constraint errors {e:?}")));
    }
    let scale = inst.cost_scale();
    let v = dual.violation(inst);
    if v > DUAL_TOL * scale {
        return Err(MotError::InfeasibleInput(format!("dual constraint violated by {v:e}")));
    }
    let gap = dual.value(inst) - coupling.value(inst);
    let gap = match dual.sense {
        Sense::Max => gap,
        Sense::Min => -gap,
    };
    if gap < -1e-9 * scale {
        return Err(MotError::InfeasibleInput(format!("negative duality gap {gap:e}")));
    }
    Ok(gap.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64], weights: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::new(points.iter().map(|p| vec![*p]).collect(), weights.to_vec()).unwrap()
    }

    #[test]
    fn measure_validation() {
        assert!(DiscreteMeasure::new(vec![vec![0.0]], vec![0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![vec![0.0], vec![0.0]], vec![0.5, 0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![vec![0.0], vec![1.0]], vec![1.0, 0.0]).is_err());
        let m = line(&[-1.0, 1.0], &[0.25, 0.75]);
        assert_eq!(m.mean(), vec![0.5]);
    }

    #[test]
    fn convex_order_cases() {
        let spread = line(&[-1.0, 1.0], &[0.5, 0.5]);
        assert!(check_convex_order(&DiscreteMeasure::dirac(vec![0.0]), &spread).unwrap());
        assert!(!check_convex_order(&DiscreteMeasure::dirac(vec![0.0]), &DiscreteMeasure::dirac(vec![1.0])).unwrap());
        assert!(!check_convex_order(&spread, &DiscreteMeasure::dirac(vec![0.0])).unwrap());
    }

    #[test]
    fn forced_coupling() {
        let inst =
            MOTInstance::from_cost(DiscreteMeasure::dirac(vec![0.0]), line(&[-1.0, 1.0], &[0.5, 0.5]), &CostModel::power(1.0).unwrap())
                .unwrap();
        let sol = solve_mot_lp(&inst, Sense::Max).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-12);
        assert_eq!(sol.coupling.pi, vec![vec![0.5, 0.5]]);
        assert_eq!(extract_conditional_supports(&inst, &sol.coupling, 1e-6), vec![vec![0, 1]]);
        assert!(dual_gap(&inst, &sol.coupling, &sol.dual).unwrap() <= 1e-9);
    }

    #[test]
    fn duals_certify_and_shift_linearly() {
        let mu = line(&[-0.5, 0.5], &[0.5, 0.5]);
        let nu = line(&[-1.0, 0.0, 1.0], &[0.3, 0.4, 0.3]);
        for sense in [Sense::Max, Sense::Min] {
            let inst = MOTInstance::from_cost(mu.clone(), nu.clone(), &CostModel::power(3.0).unwrap()).unwrap();
            let sol = solve_mot_lp(&inst, sense).unwrap();
            assert!(sol.coupling.errors(&inst).within(1e-9));
            let gap = dual_gap(&inst, &sol.coupling, &sol.dual).unwrap();
            assert!(gap <= 1e-7 * (1.0 + sol.value.abs()));
            if sense == Sense::Max {
                let mut bumped = sol.dual.clone();
                bumped.phi[1] += 1.0;
                let g2 = dual_gap(&inst, &sol.coupling, &bumped).unwrap();
                assert!((g2 - gap - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let inst = MOTInstance::from_cost(
            line(&[-0.5, 0.5], &[0.5, 0.5]),
            line(&[-1.0, 1.0], &[0.5, 0.5]),
            &CostModel::power(0.1 + 0.2).unwrap(),
        )
        .unwrap();
        let s = inst.to_json().unwrap();
        assert_eq!(MOTInstance::from_json(&s).unwrap(), inst);
        let kind_only = r#"{"d":1,"mu":{"atoms":[[0.0]],"weights":[1.0]},"nu":{"atoms":[[-1.0],[1.0]],"weights":[0.5,0.5]},"cost_kind":"one-norm"}"#;
        assert_eq!(MOTInstance::from_json(kind_only).unwrap().cost, vec![vec![1.0, 1.0]]);
    }
}
