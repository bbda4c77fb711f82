use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affine_fit::Interlacing;
use crate::cost::CostModel;
use crate::linalg::{AffineMap, SquareMatrix};
use crate::sampling::{sample_seeds, trial_rng, SeedGuard};
use crate::signomial::SignomialError;
use crate::support::{
    choquet_check, smallest_point_analysis, solve_support_norm1, solve_support_norminf, solve_support_power_with,
    HullStatus, IsolatedPoint, PointClass, QuadrantPiece, SphereComponent, SupportError, SupportSet,
};

use super::{fmt_opt, fmt_points, to_csv, to_json, Artifacts, CostSpec, ExperimentConfig, HarnessError, Tolerances};

/// Redraws allowed when the solver rejects a guarded seed draw as degenerate.
const MAX_REDRAWS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialStatus {
    /// The count equals the proved prediction.
    Certified,
    /// No count is proved for this exponent; the count is reported as found.
    Unpredicted,
    /// The count differs from the proved prediction.
    Mismatch,
    /// A root could not be separated from a double root.
    Uncertified,
    /// No acceptable seed draw was found.
    Degenerate,
    Failed,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub seed: usize,
    pub new: usize,
    pub first_crossing: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoquetSummary {
    pub all_extreme: bool,
    /// Nearest point to `x0` lies in the hull of the rest.
    pub nearest_in_hull: Option<bool>,
    pub rest_extreme: Option<bool>,
    /// Whether the expected pattern for this exponent failed.
    pub violation: bool,
}

impl ChoquetSummary {
    fn label(&self) -> String {
        match (self.all_extreme, self.rest_extreme) {
            (true, _) => "all-extreme".into(),
            (false, Some(true)) => "rest-extreme".into(),
            _ => "not-extreme".into(),
        }
    }
}

/// Enough of the solved structure set to redraw it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportDump {
    pub x0: Vec<f64>,
    pub affine_linear: Vec<Vec<f64>>,
    pub affine_offset: Vec<f64>,
    pub points: Vec<IsolatedPoint>,
    pub spheres: Vec<SphereComponent>,
    pub pieces: Vec<QuadrantPiece>,
}

impl SupportDump {
    pub fn affine(&self) -> AffineMap {
        AffineMap::new(SquareMatrix::from_rows(&self.affine_linear), self.affine_offset.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub status: TrialStatus,
    pub seeds: Vec<Vec<f64>>,
    pub rejected_draws: usize,
    /// Multiplicity-weighted size of the structure set.
    pub count: usize,
    pub predicted: Option<usize>,
    pub multiplicities: Vec<usize>,
    pub spheres: usize,
    pub classes: ClassCounts,
    pub interlacing: String,
    pub choquet: Option<ChoquetSummary>,
    pub max_residual: Option<f64>,
    pub error: Option<String>,
    pub support: Option<SupportDump>,
}

/// One CSV line per trial; every field is a plain string so the row round-trips.
#[derive(Serialize)]
struct CsvRow {
    trial: u64,
    status: &'static str,
    count: usize,
    predicted: String,
    multiplicities: String,
    spheres: usize,
    seed_points: usize,
    new_points: usize,
    first_crossing_points: usize,
    interlacing: String,
    choquet: String,
    max_residual: String,
    seeds: String,
    points: String,
    error: String,
}

impl From<&TrialRecord> for CsvRow {
    fn from(r: &TrialRecord) -> Self {
        let points = r
            .support
            .as_ref()
            .map(|s| {
                let mut ps: Vec<Vec<f64>> = s.points.iter().map(|p| p.point.clone()).collect();
                ps.extend(s.pieces.iter().map(|q| q.vertex.clone()));
                fmt_points(&ps)
            })
            .unwrap_or_default();
        Self {
            trial: r.trial,
            status: match r.status {
                TrialStatus::Certified => "certified",
                TrialStatus::Unpredicted => "unpredicted",
                TrialStatus::Mismatch => "mismatch",
                TrialStatus::Uncertified => "uncertified",
                TrialStatus::Degenerate => "degenerate",
                TrialStatus::Failed => "failed",
            },
            count: r.count,
            predicted: r.predicted.map(|p| p.to_string()).unwrap_or_default(),
            multiplicities: r.multiplicities.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" "),
            spheres: r.spheres,
            seed_points: r.classes.seed,
            new_points: r.classes.new,
            first_crossing_points: r.classes.first_crossing,
            interlacing: r.interlacing.clone(),
            choquet: r.choquet.as_ref().map(|c| c.label()).unwrap_or_default(),
            max_residual: fmt_opt(r.max_residual),
            seeds: fmt_points(&r.seeds),
            points,
            error: r.error.clone().unwrap_or_default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SupportSummary {
    /// Weighted count → number of solved trials.
    pub histogram: BTreeMap<usize, u64>,
    pub certified: u64,
    pub unpredicted: u64,
    pub mismatch: u64,
    pub uncertified: u64,
    pub degenerate: u64,
    pub failed: u64,
    pub interlacing_violations: u64,
    /// Radial trials whose weighted count fell below `2d`.
    pub floor_violations: u64,
    pub choquet_violations: u64,
    pub residual_violations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub d: usize,
    pub cost: CostSpec,
    pub trials: u64,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub summary: SupportSummary,
    pub records: Vec<TrialRecord>,
}

pub fn run_support(cfg: &ExperimentConfig) -> Result<Artifacts, HarnessError> {
    let report = support_records(cfg)?;
    let rows: Vec<CsvRow> = report.records.iter().map(CsvRow::from).collect();
    let s = &report.summary;
    let bad = s.uncertified + s.mismatch;
    let exit_code = if bad as f64 > cfg.tolerances.uncertified_fraction * cfg.trials as f64 { 3 } else { 0 };
    let summary = format!(
        "support d={} cost={}: histogram {:?}, {} uncertified, {} off prediction, {} degenerate, {} failed",
        cfg.d, cfg.cost, s.histogram, s.uncertified, s.mismatch, s.degenerate, s.failed
    );
    Ok(Artifacts { csv: to_csv(&rows)?, json: to_json(&report)?, svg: None, exit_code, summary })
}

/// Runs every trial and tallies the summary, without formatting anything.
pub fn support_records(cfg: &ExperimentConfig) -> Result<SupportReport, HarnessError> {
    cfg.validate()?;
    let cost = cfg.cost.model()?;
    let records: Vec<TrialRecord> = cfg
        .pool()?
        .install(|| (0..cfg.trials).into_par_iter().map(|t| one_trial(cfg, &cost, t)).collect());
    let summary = summarize(cfg, &records);
    Ok(SupportReport {
        d: cfg.d,
        cost: cfg.cost,
        trials: cfg.trials,
        seed: cfg.seed,
        tolerances: cfg.tolerances.clone(),
        summary,
        records,
    })
}

fn summarize(cfg: &ExperimentConfig, records: &[TrialRecord]) -> SupportSummary {
    let mut s = SupportSummary::default();
    let radial = cfg.cost.power().is_some();
    for r in records {
        match r.status {
            TrialStatus::Certified => s.certified += 1,
            TrialStatus::Unpredicted => s.unpredicted += 1,
            TrialStatus::Mismatch => s.mismatch += 1,
            TrialStatus::Uncertified => s.uncertified += 1,
            TrialStatus::Degenerate => s.degenerate += 1,
            TrialStatus::Failed => s.failed += 1,
        }
        if r.support.is_some() {
            *s.histogram.entry(r.count).or_default() += 1;
            if radial && r.count < 2 * cfg.d {
                s.floor_violations += 1;
            }
        }
        if r.interlacing.starts_with("violated") {
            s.interlacing_violations += 1;
        }
        if r.choquet.as_ref().is_some_and(|c| c.violation) {
            s.choquet_violations += 1;
        }
        if r.max_residual.is_some_and(|m| m > cfg.tolerances.residual) {
            s.residual_violations += 1;
        }
    }
    s
}

fn empty_record(trial: u64) -> TrialRecord {
    TrialRecord {
        trial,
        status: TrialStatus::Failed,
        seeds: Vec::new(),
        rejected_draws: 0,
        count: 0,
        predicted: None,
        multiplicities: Vec::new(),
        spheres: 0,
        classes: ClassCounts::default(),
        interlacing: "n/a".into(),
        choquet: None,
        max_residual: None,
        error: None,
        support: None,
    }
}

fn one_trial(cfg: &ExperimentConfig, cost: &CostModel, trial: u64) -> TrialRecord {
    match cfg.cost {
        CostSpec::Power(p) => power_trial(cfg, cost, p, trial),
        CostSpec::OneNorm | CostSpec::InfNorm => norm_trial(cfg, trial),
    }
}

fn power_trial(cfg: &ExperimentConfig, cost: &CostModel, p: f64, trial: u64) -> TrialRecord {
    let d = cfg.d;
    let mut rec = empty_record(trial);
    let mut rng = trial_rng(cfg.seed, trial);
    let x0 = vec![0.0; d];
    let opts = cfg.tolerances.support_options();
    let mut last_err = None;
    for _ in 0..MAX_REDRAWS {
        let Some((seeds, rejected)) = sample_seeds(&mut rng, d, cost, &SeedGuard::default()) else { break };
        rec.rejected_draws += rejected;
        match solve_support_power_with(cost, &x0, &seeds, &opts) {
            Ok(s) => {
                rec.seeds = seeds;
                fill_from_support(&mut rec, &s, p);
                return rec;
            }
            Err(e @ (SupportError::DegenerateSeeds(_) | SupportError::NotInterior)) => {
                rec.rejected_draws += 1;
                last_err = Some(e);
            }
            Err(e) => {
                rec.seeds = seeds;
                rec.status = match e {
                    SupportError::Signomial(SignomialError::UncertifiedCount { .. }) => TrialStatus::Uncertified,
                    _ => TrialStatus::Failed,
                };
                rec.error = Some(e.to_string());
                return rec;
            }
        }
    }
    rec.status = TrialStatus::Degenerate;
    rec.error = Some(last_err.map_or_else(|| "seed guard never satisfied".to_string(), |e| e.to_string()));
    rec
}

fn fill_from_support(rec: &mut TrialRecord, s: &SupportSet, p: f64) {
    rec.count = s.weighted_count();
    rec.predicted = s.diagnostics.predicted;
    rec.status = match s.diagnostics.predicted {
        None => TrialStatus::Unpredicted,
        Some(n) if n == rec.count => TrialStatus::Certified,
        Some(_) => TrialStatus::Mismatch,
    };
    rec.multiplicities = s.isolated.iter().map(|q| q.multiplicity).collect();
    rec.spheres = s.spheres.len();
    for q in &s.isolated {
        match q.class {
            PointClass::Seed => rec.classes.seed += 1,
            PointClass::New => rec.classes.new += 1,
            PointClass::FirstCrossing => rec.classes.first_crossing += 1,
        }
    }
    rec.interlacing = match &s.diagnostics.interlacing {
        Some(Interlacing::Holds) => "holds".into(),
        Some(Interlacing::Violated { detail, .. }) => format!("violated: {detail}"),
        Some(Interlacing::Indeterminate) => "indeterminate".into(),
        None => "n/a".into(),
    };
    rec.choquet = choquet_summary(s, p);
    rec.max_residual = Some(s.max_residual);
    rec.support = Some(SupportDump {
        x0: s.x0.clone(),
        affine_linear: s.affine.linear.rows(),
        affine_offset: s.affine.offset.clone(),
        points: s.isolated.clone(),
        spheres: s.spheres.clone(),
        pieces: Vec::new(),
    });
}

/// Below `p = 1` every point should be extreme; above `p = 2` the nearest
/// point should sit in the hull of an all-extreme rest. In between it is only reported.
fn choquet_summary(s: &SupportSet, p: f64) -> Option<ChoquetSummary> {
    if !s.spheres.is_empty() || s.isolated.len() <= s.dim() + 1 {
        return None;
    }
    let statuses = choquet_check(s).ok()?;
    let all_extreme = statuses.iter().all(|h| *h == HullStatus::Extreme);
    let (nearest_in_hull, rest_extreme) = match smallest_point_analysis(s) {
        Ok(sp) => (Some(sp.in_hull), Some(sp.rest_extreme)),
        Err(_) => (None, None),
    };
    let violation = if p <= 1.0 {
        !all_extreme
    } else if p > 2.0 {
        rest_extreme != Some(true)
    } else {
        false
    };
    Some(ChoquetSummary { all_extreme, nearest_in_hull, rest_extreme, violation })
}

/// Trial 0 uses `A = −Id` at `x0 = 0`; later trials draw `A` at random.
fn norm_trial(cfg: &ExperimentConfig, trial: u64) -> TrialRecord {
    let d = cfg.d;
    let mut rec = empty_record(trial);
    let x0 = vec![0.0; d];
    let a = if trial == 0 {
        AffineMap::identity(d).negated()
    } else {
        let mut rng = trial_rng(cfg.seed, trial);
        let linear = SquareMatrix::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
        let offset = (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect();
        AffineMap::new(linear, offset)
    };
    let pieces = match cfg.cost {
        CostSpec::OneNorm => solve_support_norm1(&x0, &a),
        _ => solve_support_norminf(&x0, &a),
    };
    match pieces {
        Ok(pieces) => {
            let points = pieces.iter().filter(|q| q.is_point()).count();
            rec.count = points;
            rec.spheres = pieces.len() - points;
            rec.multiplicities = vec![1; points];
            rec.status = TrialStatus::Certified;
            rec.support = Some(SupportDump {
                x0,
                affine_linear: a.linear.rows(),
                affine_offset: a.offset.clone(),
                points: Vec::new(),
                spheres: Vec::new(),
                pieces,
            });
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Command;

    #[test]
    fn small_power_batch() {
        let mut cfg = ExperimentConfig::new(Command::Support, 2, CostSpec::Power(0.5));
        cfg.trials = 20;
        let r = support_records(&cfg).unwrap();
        assert_eq!(r.summary.histogram, BTreeMap::from([(4, 20)]));
        assert_eq!(r.summary.choquet_violations, 0);
        let again = run_support(&cfg).unwrap();
        assert_eq!(again, run_support(&cfg).unwrap());
        assert!(again.csv.starts_with("trial,status,count,"));
    }

    #[test]
    fn first_norm_trial_is_the_cube() {
        let mut cfg = ExperimentConfig::new(Command::Support, 3, CostSpec::OneNorm);
        cfg.trials = 3;
        let r = support_records(&cfg).unwrap();
        assert_eq!(r.records[0].count, 8);
    }
}
