//! Seeded experiment batches behind the `motlab` command line.
//!
//! Every run returns its CSV, JSON and optional SVG as strings; the binary
//! only writes them next to each other under one path prefix.

mod algebra_run;
mod lp_verify;
mod plot;
mod support_run;
mod svg;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::CostModel;
use crate::output::fmt_f64;

pub use algebra_run::{builtin_families, ellipse_family, grid_family, run_completeness, run_experiment, FamilyFile, FamilySpec, FamilyVerdict};
pub use lp_verify::{run_lp_verify, AtomReport, LpTrialReport, LpVerifyReport};
pub use plot::{plot_data, run_plot, PlotData, PlotMarker};
pub use support_run::{
    run_support, support_records, ChoquetSummary, ClassCounts, SupportDump, SupportReport, SupportSummary, TrialRecord,
    TrialStatus,
};

pub const TOL_ENV: &str = "MOTLAB_TOL_OVERRIDE";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("unsupported dimension d = {0}")]
    UnsupportedDimension(usize),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Internal(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::MissingInput(_) => 2,
            Self::UnsupportedDimension(_) => 4,
            Self::Io { .. } | Self::Internal(_) => 1,
        }
    }
}

/// Numerical thresholds a run checks against; any subset can be replaced
/// through a JSON map in `MOTLAB_TOL_OVERRIDE`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative `|c_x − A|` residual on emitted support points.
    pub residual: f64,
    pub double_root: f64,
    /// Dips closer to zero than this (relative) are reported as uncertified.
    pub ambiguity: f64,
    pub eigen: f64,
    pub snap: f64,
    /// Share of uncertified trials tolerated before exit code 3.
    pub uncertified_fraction: f64,
    /// Coupling mass, relative to the row weight, that counts as support.
    pub support_threshold: f64,
    pub duality_gap: f64,
    pub structure: f64,
    /// Share of `μ` atoms whose conditional support must have full size.
    pub full_support_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-7,
            double_root: 1e-9,
            ambiguity: 1e-7,
            eigen: 1e-7,
            snap: 1e-8,
            uncertified_fraction: 0.01,
            support_threshold: 1e-7,
            duality_gap: 1e-7,
            structure: 5e-3,
            full_support_fraction: 0.95,
        }
    }
}

impl Tolerances {
    pub fn from_json(s: &str) -> Result<Self, HarnessError> {
        let t: Self = serde_json::from_str(s).map_err(|e| HarnessError::Config(format!("{TOL_ENV}: {e}")))?;
        t.validate()?;
        Ok(t)
    }

    /// Defaults, overridden by the environment when the variable is set.
    pub fn from_env() -> Result<Self, HarnessError> {
        match std::env::var(TOL_ENV) {
            Ok(s) if !s.trim().is_empty() => Self::from_json(&s),
            _ => Ok(Self::default()),
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let v = serde_json::to_value(self).expect("plain struct");
        for (k, x) in v.as_object().expect("struct serializes to a map") {
            let x = x.as_f64().unwrap_or(f64::NAN);
            if !(x > 0.0 && x.is_finite()) {
                return Err(HarnessError::Config(format!("tolerance {k} must be positive, got {x}")));
            }
        }
        Ok(())
    }

    pub fn support_options(&self) -> crate::support::SupportOptions {
        let mut o = crate::support::SupportOptions { eigen_tol: self.eigen, snap_tol: self.snap, ..Default::default() };
        o.isolation.double_root_tol = self.double_root;
        o.isolation.ambiguity_tol = self.ambiguity;
        o
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Support,
    Plot,
    LpVerify,
    Completeness,
    Experiment,
}

impl Command {
    pub fn default_trials(self) -> u64 {
        match self {
            Self::Support => 100,
            Self::Experiment => 10_000,
            Self::Plot | Self::LpVerify | Self::Completeness => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "p")]
pub enum CostSpec {
    Power(f64),
    OneNorm,
    InfNorm,
}

impl CostSpec {
    pub fn model(&self) -> Result<CostModel, HarnessError> {
        match *self {
            Self::Power(p) => CostModel::power(p).map_err(|e| HarnessError::Config(e.to_string())),
            Self::OneNorm => Ok(CostModel::OneNorm),
            Self::InfNorm => Ok(CostModel::InfNorm),
        }
    }

    pub fn power(&self) -> Option<f64> {
        match self {
            Self::Power(p) => Some(*p),
            _ => None,
        }
    }
}

impl fmt::Display for CostSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power(p) => write!(f, "power:{p}"),
            Self::OneNorm => f.write_str("one-norm"),
            Self::InfNorm => f.write_str("inf-norm"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub d: usize,
    pub cost: CostSpec,
    pub trials: u64,
    pub seed: u64,
    /// Lattice points per axis for `lp-verify`.
    pub grid: usize,
    /// Starting ball radius for `lp-verify`.
    pub ball: f64,
    /// Worker threads; `None` uses every logical core.
    pub jobs: Option<usize>,
    /// Input file: a support report for `plot`, a family file for `completeness` and `experiment`.
    pub input: Option<PathBuf>,
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn new(command: Command, d: usize, cost: CostSpec) -> Self {
        Self {
            command,
            d,
            cost,
            trials: command.default_trials(),
            seed: 42,
            grid: 5,
            ball: 0.05,
            jobs: None,
            input: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.d == 0 {
            return Err(HarnessError::Config("d must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.grid == 0 {
            return Err(HarnessError::Config("grid must be at least 1".into()));
        }
        if !(self.ball >= 0.0 && self.ball.is_finite()) {
            return Err(HarnessError::Config(format!("ball radius {} is not a nonnegative number", self.ball)));
        }
        if self.jobs == Some(0) {
            return Err(HarnessError::Config("jobs must be at least 1".into()));
        }
        self.cost.model()?;
        self.tolerances.validate()
    }

    fn pool(&self) -> Result<rayon::ThreadPool, HarnessError> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.jobs {
            b = b.num_threads(j);
        }
        b.build().map_err(|e| HarnessError::Internal(e.to_string()))
    }
}

/// What a run produced. `exit_code` is 0, or 3 when the run's own checks failed.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifacts {
    pub csv: String,
    pub json: String,
    pub svg: Option<String>,
    pub exit_code: i32,
    /// One line for the terminal.
    pub summary: String,
}

impl Artifacts {
    /// Writes `PREFIX.csv`, `PREFIX.json` and, when present, `PREFIX.svg`.
    pub fn write(&self, prefix: &Path) -> Result<Vec<PathBuf>, HarnessError> {
        if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.to_path_buf(), source })?;
        }
        let mut written = Vec::new();
        let files = [("csv", Some(&self.csv)), ("json", Some(&self.json)), ("svg", self.svg.as_ref())];
        for (ext, body) in files {
            let Some(body) = body else { continue };
            let mut name = prefix.as_os_str().to_owned();
            name.push(".");
            name.push(ext);
            let path = PathBuf::from(name);
            fs::write(&path, body).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
            written.push(path);
        }
        Ok(written)
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Artifacts, HarnessError> {
    cfg.validate()?;
    match cfg.command {
        Command::Support => run_support(cfg),
        Command::Plot => run_plot(cfg),
        Command::LpVerify => run_lp_verify(cfg),
        Command::Completeness => run_completeness(cfg),
        Command::Experiment => run_experiment(cfg),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, HarnessError> {
    let mut s = crate::output::to_json_string(v).map_err(|e| HarnessError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| HarnessError::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Internal(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv writes UTF-8"))
}

fn fmt_point(p: &[f64]) -> String {
    p.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(" ")
}

fn fmt_points(ps: &[Vec<f64>]) -> String {
    ps.iter().map(|p| fmt_point(p)).collect::<Vec<_>>().join(";")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_overrides() {
        let t = Tolerances::from_json(r#"{"residual": 1e-6}"#).unwrap();
        assert_eq!(t.residual, 1e-6);
        assert_eq!(t.structure, 5e-3);
        let e = Tolerances::from_json(r#"{"residul": 1e-6}"#).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(Tolerances::from_json(r#"{"residual": -1}"#).is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig::new(Command::Support, 2, CostSpec::Power(0.5));
        assert!(c.validate().is_ok());
        c.trials = 0;
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
        let c = ExperimentConfig::new(Command::Support, 2, CostSpec::Power(0.0));
        assert!(c.validate().is_err());
    }
}
