//! From `x0` and `d+1` seed points: the affine map `A`, barycentric weights,
//! the curve `a ↦ y(a)`, the rational function `G` and its poles.

use serde::Serialize;
use thiserror::Error;

use crate::cost::{CostError, CostModel};
use crate::linalg::{real_roots, vector, AffineMap, Polynomial, RootError, SquareMatrix};

/// Barycentric weights above this are "strictly positive".
pub const INTERIOR_TOL: f64 = 1e-10;
/// `a`-values closer than `COINCIDENT_TOL·(1+|a|)` are one `b`.
pub const COINCIDENT_TOL: f64 = 1e-7;
/// Strict interlacing margin.
pub const INTERLACING_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("seed points are affinely dependent (normalized volume {volume:e})")]
    DegenerateSimplex { volume: f64 },
    #[error("expected {expected} points of dimension {dim}, got {got}")]
    WrongPointCount { expected: usize, dim: usize, got: usize },
    #[error("a = {a} is within 1e-9 of an eigenvalue of the linear part")]
    AtEigenvalue { a: f64 },
    #[error("G cross-check failed at a = {probe}: relative mismatch {mismatch:e}")]
    InconsistentSeed { probe: f64, mismatch: f64 },
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Roots(#[from] RootError),
}

/// Affine rescaling `u = s·(y − x0)` putting the seeds into `[−1, 1]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalization {
    pub x0: Vec<f64>,
    pub scale: f64,
}

impl Normalization {
    pub fn fit(x0: &[f64], points: &[Vec<f64>]) -> Self {
        let spread = points
            .iter()
            .map(|y| vector::norm_inf(&vector::sub(y, x0)))
            .fold(0.0, f64::max);
        let scale = if spread > 0.0 { 1.0 / spread } else { 1.0 };
        Self { x0: x0.to_vec(), scale }
    }

    pub fn identity(d: usize) -> Self {
        Self { x0: vec![0.0; d], scale: 1.0 }
    }

    pub fn forward(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.x0).map(|(a, b)| self.scale * (a - b)).collect()
    }

    pub fn backward(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.x0).map(|(a, b)| b + a / self.scale).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Barycentric {
    pub lambdas: Vec<f64>,
    pub interior: bool,
}

fn check_points(x0: &[f64], pts: &[Vec<f64>]) -> Result<usize, FitError> {
    let d = x0.len();
    if pts.len() != d + 1 || pts.iter().any(|p| p.len() != d) {
        return Err(FitError::WrongPointCount { expected: d + 1, dim: d, got: pts.len() });
    }
    Ok(d)
}

/// `[u_i^T, 1]` rows in normalized coordinates, with the simplex volume gate.
fn design_matrix(norm: &Normalization, pts: &[Vec<f64>]) -> Result<SquareMatrix, FitError> {
    let d = norm.x0.len();
    let us: Vec<Vec<f64>> = pts.iter().map(|p| norm.forward(p)).collect();
    let edges = SquareMatrix::from_fn(d, |i, j| us[i + 1][j] - us[0][j]);
    let factorial: f64 = (1..=d).map(|k| k as f64).product();
    let volume = edges.determinant().abs() / factorial;
    if !(volume > 1e-10) {
        return Err(FitError::DegenerateSimplex { volume });
    }
    Ok(SquareMatrix::from_fn(d + 1, |i, j| if j < d { us[i][j] } else { 1.0 }))
}

pub fn barycentric(x0: &[f64], pts: &[Vec<f64>]) -> Result<Barycentric, FitError> {
    let d = check_points(x0, pts)?;
    let norm = Normalization::fit(x0, pts);
    let m = design_matrix(&norm, pts)?.transpose();
    let mut rhs = vec![0.0; d + 1];
    rhs[d] = 1.0;
    let lambdas = m.solve(&rhs).ok_or(FitError::DegenerateSimplex { volume: 0.0 })?;
    let interior = lambdas.iter().all(|&l| l > INTERIOR_TOL);
    Ok(Barycentric { lambdas, interior })
}

/// The affine map with `A(pt_i) = c_x(x0, pt_i)`.
pub fn fit_affine(c: &CostModel, x0: &[f64], pts: &[Vec<f64>]) -> Result<AffineMap, FitError> {
    let d = check_points(x0, pts)?;
    let grads: Vec<Vec<f64>> = pts.iter().map(|p| c.grad_x(x0, p)).collect::<Result<_, _>>()?;
    fit_affine_values(x0, pts, &grads).map(|a| {
        debug_assert_eq!(a.dim(), d);
        a
    })
}

/// The affine map through prescribed values at `d+1` points.
pub fn fit_affine_values(
    x0: &[f64],
    pts: &[Vec<f64>],
    values: &[Vec<f64>],
) -> Result<AffineMap, FitError> {
    let d = check_points(x0, pts)?;
    let norm = Normalization::fit(x0, pts);
    let lu = design_matrix(&norm, pts)?.lu();
    // A(y) = L'·s(y − x0) + o'  ⇒  ∇A = s·L',  A(0) = o' − s·L'·x0
    let mut lin = SquareMatrix::zeros(d);
    let mut off = vec![0.0; d];
    for k in 0..d {
        let rhs: Vec<f64> = values.iter().map(|g| g[k]).collect();
        let theta = lu.solve(&rhs).ok_or(FitError::DegenerateSimplex { volume: 0.0 })?;
        for j in 0..d {
            lin[(k, j)] = theta[j];
        }
        off[k] = theta[d];
    }
    let a = AffineMap::new(lin, off).pull_back(&norm.x0, norm.scale, 1.0);
    let scale = 1.0 + values.iter().map(|g| vector::norm_inf(g)).fold(0.0, f64::max);
    let resid = pts
        .iter()
        .zip(values)
        .map(|(p, g)| vector::norm_inf(&vector::sub(&a.apply(p), g)))
        .fold(0.0, f64::max);
    if resid > 1e-9 * scale {
        return Err(FitError::DegenerateSimplex { volume: f64::NAN });
    }
    Ok(a)
}

/// `y(a) = x0 + (aI − ∇A)^{-1} A(x0)`.
pub fn y_of_a(a_map: &AffineMap, x0: &[f64], a: f64) -> Result<Vec<f64>, FitError> {
    let m = a_map.linear.shifted(a);
    let lu = m.lu();
    if lu.is_singular() || lu.min_pivot() <= 1e-9 * (1.0 + a_map.linear.max_norm()) {
        return Err(FitError::AtEigenvalue { a });
    }
    let w = lu.solve(&a_map.apply(x0)).ok_or(FitError::AtEigenvalue { a })?;
    Ok(vector::add(x0, &w))
}

/// One distinct value `b` among the seed `a`-values.
#[derive(Clone, Debug, PartialEq)]
pub struct BGroup {
    pub value: f64,
    /// `d_i`: the group has `d_i + 1` members.
    pub extra: usize,
    /// Sum of the members' barycentric weights.
    pub weight: f64,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedConfiguration {
    pub x0: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub lambdas: Vec<f64>,
    pub avalues: Vec<f64>,
    /// Ascending distinct `b_1 < … < b_r`.
    pub groups: Vec<BGroup>,
    pub interior: bool,
}

impl SeedConfiguration {
    pub fn new(c: &CostModel, x0: &[f64], points: &[Vec<f64>]) -> Result<Self, FitError> {
        let bary = barycentric(x0, points)?;
        let avalues = points
            .iter()
            .map(|y| c.g_of(vector::dist(y, x0)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut order: Vec<usize> = (0..avalues.len()).collect();
        order.sort_by(|&i, &j| avalues[i].total_cmp(&avalues[j]));
        let mut groups: Vec<BGroup> = Vec::new();
        for i in order {
            let a = avalues[i];
            match groups.last_mut() {
                Some(g) if (a - g.value).abs() <= COINCIDENT_TOL * (1.0 + g.value.abs()) => {
                    g.extra += 1;
                    g.weight += bary.lambdas[i];
                    g.members.push(i);
                }
                _ => groups.push(BGroup { value: a, extra: 0, weight: bary.lambdas[i], members: vec![i] }),
            }
        }
        Ok(Self {
            x0: x0.to_vec(),
            points: points.to_vec(),
            lambdas: bary.lambdas,
            avalues,
            groups,
            interior: bary.interior,
        })
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// Smallest gap between seed `a`-values, the genericity diagnostic.
    pub fn min_a_gap(&self) -> f64 {
        let mut a = self.avalues.clone();
        a.sort_by(|x, y| x.total_cmp(y));
        a.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// `Σ λ_i / (a − a_i)` over the grouped values.
    pub fn inverse_g(&self, a: f64) -> f64 {
        self.groups.iter().map(|g| g.weight / (a - g.value)).sum()
    }

    /// Barycentric form `y(a) = G(a) Σ λ_i/(a − a_i) y_i`.
    pub fn y_barycentric(&self, a: f64) -> Vec<f64> {
        let d = self.dim();
        let mut num = vec![0.0; d];
        let mut den = 0.0;
        for (i, y) in self.points.iter().enumerate() {
            let w = self.lambdas[i] / (a - self.avalues[i]);
            den += w;
            for k in 0..d {
                num[k] += w * y[k];
            }
        }
        vector::scale(&num, 1.0 / den)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalG {
    pub groups: Vec<BGroup>,
    /// Ascending real poles `γ`.
    pub poles: Vec<f64>,
}

impl RationalG {
    /// `G(a) = (Σ λ_i/(a − a_i))^{-1}`.
    pub fn eval(&self, a: f64) -> f64 {
        1.0 / self.groups.iter().map(|g| g.weight / (a - g.value)).sum::<f64>()
    }
}

/// `G(a) = Π(a − a_i) / det(aI − ∇A)`.
pub fn g_via_determinant(seed: &SeedConfiguration, a_map: &AffineMap, a: f64) -> f64 {
    let num: f64 = seed.avalues.iter().map(|ai| a - ai).product();
    num / a_map.linear.shifted(a).determinant()
}

pub fn rational_g(seed: &SeedConfiguration, a_map: &AffineMap) -> Result<RationalG, FitError> {
    let groups = seed.groups.clone();
    let poles = if seed.interior {
        groups
            .windows(2)
            .map(|w| pole_between(&groups, w[0].value, w[1].value))
            .collect()
    } else {
        poles_general(&groups)?
    };
    let rg = RationalG { groups, poles };

    let lo = rg.groups.first().map_or(0.0, |g| g.value);
    let hi = rg.groups.last().map_or(0.0, |g| g.value);
    let span = (hi - lo) + 1.0 + a_map.linear.max_norm();
    let probes = [hi + 0.37 * span, hi + 1.3 * span, hi + 2.9 * span, lo - 0.61 * span, lo - 1.7 * span];
    for probe in probes {
        let bary = rg.eval(probe);
        let det = g_via_determinant(seed, a_map, probe);
        let mismatch = (bary - det).abs() / bary.abs().max(det.abs()).max(1e-300);
        if !(mismatch <= 1e-8) {
            return Err(FitError::InconsistentSeed { probe, mismatch });
        }
    }
    Ok(rg)
}

fn pole_between(groups: &[BGroup], lo: f64, hi: f64) -> f64 {
    let f = |a: f64| groups.iter().map(|g| g.weight / (a - g.value)).sum::<f64>();
    let (mut a, mut b) = (lo, hi);
    for _ in 0..300 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Real zeros of the numerator `Σ w_j Π_{k≠j}(a − b_k)` when weights may be negative.
fn poles_general(groups: &[BGroup]) -> Result<Vec<f64>, FitError> {
    let mut num = Polynomial::zero();
    for (j, g) in groups.iter().enumerate() {
        let others: Vec<f64> = groups.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, h)| h.value).collect();
        num = num.add(&Polynomial::from_roots(&others).scale(g.weight));
    }
    if num.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let bound = num.root_bound();
    let roots = real_roots(&num, -bound, bound)?;
    Ok(roots
        .into_iter()
        .map(|(r, _)| r)
        .filter(|r| groups.iter().all(|g| (r - g.value).abs() > COINCIDENT_TOL * (1.0 + r.abs())))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Interlacing {
    Holds,
    Violated { index: usize, detail: String },
    /// Seeds on the boundary of their hull: the check does not apply.
    Indeterminate,
}

impl Interlacing {
    pub fn holds(&self) -> bool {
        matches!(self, Self::Holds)
    }
}

/// `b_1 < γ_1 < b_2 < … < γ_{r−1} < b_r` with margin.
pub fn interlacing_check(seed: &SeedConfiguration, poles: &[f64]) -> Interlacing {
    if !seed.interior {
        return Interlacing::Indeterminate;
    }
    let r = seed.groups.len();
    if poles.len() + 1 != r {
        return Interlacing::Violated {
            index: 0,
            detail: format!("{} poles for {} distinct values", poles.len(), r),
        };
    }
    for (i, &g) in poles.iter().enumerate() {
        let (lo, hi) = (seed.groups[i].value, seed.groups[i + 1].value);
        if !(g > lo + INTERLACING_MARGIN && g < hi - INTERLACING_MARGIN) {
            return Interlacing::Violated {
                index: i,
                detail: format!("pole {g} not strictly inside ({lo}, {hi})"),
            };
        }
    }
    Interlacing::Holds
}
