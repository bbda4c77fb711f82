//! Build marginals with a planted optimal coupling, solve the LP, and check
//! that the optimizer's conditional supports carry the predicted structure.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::CostModel;
use crate::mot::{
    build_converse_instance, dual_gap, extract_conditional_supports, solve_mot_lp, structure_residuals, ConverseInstance,
    ConverseOptions, MotSolution, Sense,
};
use crate::output::fmt_f64;
use crate::sampling::{sample_seeds, trial_rng, SeedGuard};
use crate::support::solve_support_power;

use super::svg::{padded_range, Panel, Svg, BLUE, GREY, RED};
use super::{fmt_opt, fmt_point, to_csv, to_json, Artifacts, CostSpec, ExperimentConfig, HarnessError};

/// How often the ball radius is halved before a trial gives up.
const MAX_HALVINGS: u32 = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomReport {
    pub atom: Vec<f64>,
    pub weight: f64,
    pub support: Vec<usize>,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpTrialReport {
    pub trial: u64,
    pub seeds: Vec<Vec<f64>>,
    /// `|S₀|` at the centre atom.
    pub support_size: usize,
    pub ball_radius: f64,
    pub m: f64,
    pub mu_atoms: usize,
    pub nu_atoms: usize,
    pub lp_value: f64,
    pub planted_value: f64,
    pub cost_scale: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    /// Conditional support size → number of `μ` atoms.
    pub histogram: BTreeMap<usize, usize>,
    pub fraction_full: f64,
    pub max_structure_residual: Option<f64>,
    pub consistent: bool,
    pub atoms: Vec<AtomReport>,
    /// Coupling entries above the support threshold: `(μ atom, ν atom, mass)`.
    pub coupling: Vec<(usize, usize, f64)>,
    pub nu: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpVerifyReport {
    pub d: usize,
    pub cost: CostSpec,
    pub seed: u64,
    pub grid: usize,
    pub trials: Vec<LpTrialReport>,
    pub failures: Vec<(u64, String)>,
    pub consistent: bool,
}

#[derive(Serialize)]
struct CsvRow {
    trial: u64,
    atom_index: usize,
    atom: String,
    weight: String,
    support_size: usize,
    expected_size: usize,
    structure_residual: String,
    support: String,
}

fn build_with_halving(
    c: &CostModel,
    cfg: &ExperimentConfig,
    seeds: &[Vec<f64>],
) -> Result<(ConverseInstance, f64), String> {
    let s0 = solve_support_power(c, &vec![0.0; cfg.d], seeds).map_err(|e| e.to_string())?;
    let mut radius = cfg.ball;
    let mut last = String::new();
    for _ in 0..=MAX_HALVINGS {
        let opts = ConverseOptions { ball_radius: radius, grid_n: cfg.grid, ..Default::default() };
        match build_converse_instance(c, &s0, &opts) {
            Ok(b) => return Ok((b, radius)),
            Err(e) => last = e.to_string(),
        }
        radius /= 2.0;
    }
    Err(format!("no ball radius down to {radius:e} worked: {last}"))
}

fn one_trial(cfg: &ExperimentConfig, c: &CostModel, trial: u64) -> Result<LpTrialReport, String> {
    let tol = &cfg.tolerances;
    let mut rng = trial_rng(cfg.seed, trial);
    let (seeds, _) = sample_seeds(&mut rng, cfg.d, c, &SeedGuard::default()).ok_or("seed guard never satisfied")?;
    let (b, ball_radius) = build_with_halving(c, cfg, &seeds)?;
    let inst = &b.instance;
    let MotSolution { coupling, value, dual, iterations, .. } =
        solve_mot_lp(inst, Sense::Max).map_err(|e| e.to_string())?;
    let gap = dual_gap(inst, &coupling, &dual).map_err(|e| e.to_string())?;
    let supports = extract_conditional_supports(inst, &coupling, tol.support_threshold);
    let residuals = structure_residuals(c, inst, &supports).map_err(|e| e.to_string())?;

    let mut histogram = BTreeMap::new();
    for s in &supports {
        *histogram.entry(s.len()).or_default() += 1;
    }
    let full = supports.iter().filter(|s| s.len() == b.support_size).count();
    let fraction_full = full as f64 / supports.len() as f64;
    let max_structure_residual = residuals.iter().flatten().copied().reduce(f64::max);
    let cost_scale = inst.cost_scale();
    let consistent = fraction_full >= tol.full_support_fraction
        && gap <= tol.duality_gap * cost_scale
        && max_structure_residual.is_some_and(|r| r <= tol.structure);

    let atoms = inst
        .mu
        .atoms()
        .iter()
        .zip(inst.mu.weights())
        .zip(supports.iter().zip(&residuals))
        .map(|((a, w), (s, r))| AtomReport { atom: a.clone(), weight: *w, support: s.clone(), residual: *r })
        .collect();
    let coupling_entries = coupling
        .pi
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            let w = inst.mu.weights()[i];
            row.iter()
                .enumerate()
                .filter(move |(_, p)| **p > tol.support_threshold * w)
                .map(move |(j, p)| (i, j, *p))
        })
        .collect();

    Ok(LpTrialReport {
        trial,
        seeds,
        support_size: b.support_size,
        ball_radius,
        m: b.m,
        mu_atoms: inst.mu.len(),
        nu_atoms: inst.nu.len(),
        lp_value: value,
        planted_value: b.planted.value(inst),
        cost_scale,
        duality_gap: gap,
        iterations,
        histogram,
        fraction_full,
        max_structure_residual,
        consistent,
        atoms,
        coupling: coupling_entries,
        nu: inst.nu.atoms().to_vec(),
    })
}

/// Segments from each `μ` atom to the `ν` atoms it sends mass to, in the first
/// two coordinates; in one dimension the plane is `(x, y)`.
fn render(t: &LpTrialReport, d: usize) -> String {
    let mut svg = Svg::new(560.0, 520.0);
    let mu_xy = |a: &[f64]| if d == 1 { (a[0], a[0]) } else { (a[0], a[1]) };
    let pair_xy = |i: usize, j: usize| {
        let x = &t.atoms[i].atom;
        let y = &t.nu[j];
        if d == 1 {
            ((x[0], x[0]), (x[0], y[0]))
        } else {
            ((x[0], x[1]), (y[0], y[1]))
        }
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(i, j, _) in &t.coupling {
        let (a, b) = pair_xy(i, j);
        xs.extend([a.0, b.0]);
        ys.extend([a.1, b.1]);
    }
    let panel = Panel { left: 70.0, top: 40.0, width: 440.0, height: 420.0, x_range: padded_range(xs), y_range: padded_range(ys) };
    let (xl, yl) = if d == 1 { ("x", "y") } else { ("coordinate 1", "coordinate 2") };
    svg.frame(&panel, &format!("optimal coupling, {} μ atoms", t.mu_atoms), xl, yl);
    for &(i, j, _) in &t.coupling {
        let (a, b) = pair_xy(i, j);
        svg.polyline(&panel, &[Some(a), Some(b)], GREY);
        svg.marker(&panel, b.0, b.1, RED);
    }
    for a in &t.atoms {
        let (x, y) = mu_xy(&a.atom);
        svg.marker(&panel, x, y, BLUE);
    }
    svg.legend(80.0, 500.0, &[(BLUE, "μ atom"), (RED, "ν atom in a conditional support")]);
    svg.finish()
}

pub fn run_lp_verify(cfg: &ExperimentConfig) -> Result<Artifacts, HarnessError> {
    cfg.validate()?;
    let CostSpec::Power(_) = cfg.cost else {
        return Err(HarnessError::Config(format!("lp-verify needs a power cost, got {}", cfg.cost)));
    };
    let c = cfg.cost.model()?;
    let results: Vec<Result<LpTrialReport, String>> =
        cfg.pool()?.install(|| (0..cfg.trials).into_par_iter().map(|t| one_trial(cfg, &c, t)).collect());
    let mut trials = Vec::new();
    let mut failures = Vec::new();
    for (t, r) in (0..cfg.trials).zip(results) {
        match r {
            Ok(rep) => trials.push(rep),
            Err(e) => failures.push((t, e)),
        }
    }
    let consistent = failures.is_empty() && trials.iter().all(|t| t.consistent);
    let report = LpVerifyReport { d: cfg.d, cost: cfg.cost, seed: cfg.seed, grid: cfg.grid, trials, failures, consistent };

    let mut rows = Vec::new();
    for t in &report.trials {
        for (k, a) in t.atoms.iter().enumerate() {
            rows.push(CsvRow {
                trial: t.trial,
                atom_index: k,
                atom: fmt_point(&a.atom),
                weight: fmt_f64(a.weight),
                support_size: a.support.len(),
                expected_size: t.support_size,
                structure_residual: fmt_opt(a.residual),
                support: a.support.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(" "),
            });
        }
    }
    let svg = report.trials.first().map(|t| render(t, cfg.d));
    let gaps: Vec<String> = report.trials.iter().map(|t| format!("{:.1e}", t.duality_gap)).collect();
    let summary = format!(
        "lp-verify d={} cost={}: {} trials, {} failed, gaps [{}], {}",
        cfg.d,
        cfg.cost,
        report.trials.len(),
        report.failures.len(),
        gaps.join(", "),
        if consistent { "consistent" } else { "INCONSISTENT" }
    );
    let exit_code = if consistent { 0 } else { 3 };
    Ok(Artifacts { csv: to_csv(&rows)?, json: to_json(&report)?, svg, exit_code, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Command;

    #[test]
    fn one_dimensional_cubic_is_consistent() {
        let mut cfg = ExperimentConfig::new(Command::LpVerify, 1, CostSpec::Power(3.0));
        cfg.grid = 9;
        let a = run_lp_verify(&cfg).unwrap();
        assert_eq!(a.exit_code, 0, "{}", a.summary);
        let rep: LpVerifyReport = serde_json::from_str(&a.json).unwrap();
        let t = &rep.trials[0];
        assert_eq!(t.support_size, 3);
        assert_eq!(t.histogram, BTreeMap::from([(3, 9)]));
    }

    #[test]
    fn single_atom_grid_gives_planted_value() {
        let mut cfg = ExperimentConfig::new(Command::LpVerify, 2, CostSpec::Power(0.5));
        cfg.grid = 1;
        let a = run_lp_verify(&cfg).unwrap();
        let rep: LpVerifyReport = serde_json::from_str(&a.json).unwrap();
        let t = &rep.trials[0];
        assert_eq!(t.mu_atoms, 1);
        assert!((t.lp_value - t.planted_value).abs() <= 1e-9 * t.cost_scale);
    }
}
