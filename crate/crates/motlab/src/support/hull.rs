//! Convex-hull diagnostics on finite supports, each one a small LP.

use serde::Serialize;

use crate::cost::CostModel;
use crate::linalg::vector;
use crate::lp::{LinearProgram, LpError, RowKind};

use super::{SupportError, SupportSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HullStatus {
    Extreme,
    InHull,
}

/// Is `target` a convex combination of `points`?
fn in_hull(points: &[&Vec<f64>], target: &[f64]) -> Result<bool, LpError> {
    if points.is_empty() {
        return Ok(false);
    }
    let d = target.len();
    let mut lp = LinearProgram::new(points.len());
    for k in 0..d {
        lp.add_row(points.iter().enumerate().map(|(i, p)| (i, p[k])).collect(), RowKind::Eq, target[k])?;
    }
    lp.add_row((0..points.len()).map(|i| (i, 1.0)).collect(), RowKind::Eq, 1.0)?;
    let scale = 1.0 + points.iter().map(|p| vector::norm_inf(p)).fold(vector::norm_inf(target), f64::max);
    Ok(lp.infeasibility()? <= 1e-9 * scale)
}

fn finite_points(s: &SupportSet) -> Result<Vec<Vec<f64>>, SupportError> {
    if !s.spheres.is_empty() {
        return Err(SupportError::InfiniteSupport(s.spheres.len()));
    }
    Ok(s.points())
}

/// For each point, whether it lies in the hull of the others.
pub fn choquet_check(s: &SupportSet) -> Result<Vec<HullStatus>, SupportError> {
    hull_statuses(&finite_points(s)?)
}

pub fn hull_statuses(points: &[Vec<f64>]) -> Result<Vec<HullStatus>, SupportError> {
    (0..points.len())
        .map(|j| {
            let others: Vec<&Vec<f64>> = points.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, p)| p).collect();
            Ok(if in_hull(&others, &points[j])? { HullStatus::InHull } else { HullStatus::Extreme })
        })
        .collect()
}

/// `x0 = Σ μ_i y_i` with every `μ_i ≥ 1e−9`.
pub fn interior_check(s: &SupportSet) -> Result<bool, SupportError> {
    Ok(max_min_weight(&finite_points(s)?, &s.x0)?.is_some_and(|t| t >= 1e-9))
}

/// `max t` over `x0 = Σ μ_i y_i, Σ μ_i = 1, μ_i ≥ t`; `None` if `x0` is outside the hull.
pub fn max_min_weight(points: &[Vec<f64>], x0: &[f64]) -> Result<Option<f64>, LpError> {
    Ok(max_min_weights(points, x0)?.map(|(t, _)| t))
}

/// The optimal `t` and the weights achieving it.
pub fn max_min_weights(points: &[Vec<f64>], x0: &[f64]) -> Result<Option<(f64, Vec<f64>)>, LpError> {
    let n = points.len();
    if n == 0 {
        return Ok(None);
    }
    // columns: μ (n), t
    let mut lp = LinearProgram::new(n + 1);
    lp.set_cost(n, 1.0);
    for k in 0..x0.len() {
        lp.add_row(points.iter().enumerate().map(|(i, p)| (i, p[k])).collect(), RowKind::Eq, x0[k])?;
    }
    lp.add_row((0..n).map(|i| (i, 1.0)).collect(), RowKind::Eq, 1.0)?;
    for i in 0..n {
        lp.add_row(vec![(i, 1.0), (n, -1.0)], RowKind::Ge, 0.0)?;
    }
    match lp.maximize() {
        Ok(sol) => Ok(Some((sol.objective, sol.x[..n].to_vec()))),
        Err(LpError::Infeasible { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmallestPoint {
    pub index: usize,
    pub y0: Vec<f64>,
    /// `y0 ∈ conv(S ∖ {y0})`.
    pub in_hull: bool,
    /// Every point of `S ∖ {y0}` is extreme in that set.
    pub rest_extreme: bool,
}

/// The point nearest `x0` and its hull position, for power costs with `p > 1`.
pub fn smallest_point_analysis(s: &SupportSet) -> Result<SmallestPoint, SupportError> {
    match s.cost {
        CostModel::PowerDistance { p } if p > 1.0 => {}
        _ => return Err(SupportError::WrongCost { op: "smallest_point_analysis", need: "a power cost with p > 1" }),
    }
    let pts = finite_points(s)?;
    let dists: Vec<f64> = pts.iter().map(|y| vector::dist(y, &s.x0)).collect();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| dists[a].total_cmp(&dists[b]));
    let index = order[0];
    if order.len() > 1 && dists[order[1]] - dists[index] <= 1e-9 {
        return Err(SupportError::TieBreak);
    }
    let rest: Vec<Vec<f64>> = pts.iter().enumerate().filter(|(i, _)| *i != index).map(|(_, p)| p.clone()).collect();
    let in_hull = in_hull(&rest.iter().collect::<Vec<_>>(), &pts[index])?;
    let rest_extreme = hull_statuses(&rest)?.iter().all(|h| *h == HullStatus::Extreme);
    Ok(SmallestPoint { index, y0: pts[index].clone(), in_hull, rest_extreme })
}
