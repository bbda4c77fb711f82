//! Completeness verdicts for polynomial families and the random-perturbation
//! search for many simple real zeros.

use serde::{Deserialize, Serialize};

use crate::algebraic::{
    bezout_bound, complete_at_infinity_d2, complete_monomial, nc_lower_experiment, solve_quadratic_system_d2,
    AlgebraicError, NcReport, PolynomialFamily, RealSolution,
};
use crate::multipoly::MultiPoly;
use crate::output::fmt_f64;

use super::{to_csv, to_json, Artifacts, ExperimentConfig, HarnessError};

/// One family in an input file: explicit polynomials as `[coefficient, exponents]`
/// term lists, or a monomial family `(Y_1^{k_1}, …, Y_d^{k_d})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum FamilySpec {
    Polys { name: String, polys: Vec<Vec<(f64, Vec<u32>)>> },
    Monomial { name: String, monomial: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub families: Vec<FamilySpec>,
}

impl FamilySpec {
    pub fn name(&self) -> &str {
        match self {
            Self::Polys { name, .. } | Self::Monomial { name, .. } => name,
        }
    }

    fn from_polys(name: &str, polys: &[MultiPoly]) -> Self {
        let polys = polys.iter().map(|p| p.terms().map(|(e, c)| (c, e.to_vec())).collect()).collect();
        Self::Polys { name: name.into(), polys }
    }

    pub fn polynomials(&self) -> Result<Vec<MultiPoly>, HarnessError> {
        let Self::Polys { name, polys } = self else {
            return Err(HarnessError::Config(format!("{} is a monomial family", self.name())));
        };
        let nvars = polys.iter().flatten().map(|(_, e)| e.len()).next().unwrap_or(0);
        if nvars == 0 || polys.iter().flatten().any(|(_, e)| e.len() != nvars) {
            return Err(HarnessError::Config(format!("family {name}: exponent vectors must share one nonzero length")));
        }
        Ok(polys.iter().map(|t| MultiPoly::from_terms(nvars, t.iter().map(|(c, e)| (*c, e.as_slice())))).collect())
    }
}

fn y(i: usize) -> MultiPoly {
    MultiPoly::var(2, i)
}

fn k(c: f64) -> MultiPoly {
    MultiPoly::constant(2, c)
}

/// The two ellipses `y₁² + 2y₂² = 3`, `2y₁² + y₂² = 3`.
pub fn ellipse_family() -> Vec<MultiPoly> {
    vec![
        y(0).pow(2).add(&y(1).pow(2).scale(2.0)).add(&k(-3.0)),
        y(0).pow(2).scale(2.0).add(&y(1).pow(2)).add(&k(-3.0)),
    ]
}

/// `(y₁ − 1)(y₁ − 2)`, `(y₂ − 1)(y₂ − 2)`: zeros `{1, 2}²`.
pub fn grid_family() -> Vec<MultiPoly> {
    vec![y(0).add(&k(-1.0)).mul(&y(0).add(&k(-2.0))), y(1).add(&k(-1.0)).mul(&y(1).add(&k(-2.0)))]
}

pub fn builtin_families() -> Vec<FamilySpec> {
    let s = y(0).add(&y(1));
    vec![
        FamilySpec::from_polys("monomial-squares", &[y(0).pow(2), y(1).pow(2)]),
        // top forms share the factor y₁ + y₂
        FamilySpec::from_polys("shared-factor", &[y(0).mul(&s).add(&k(-1.0)), y(1).mul(&s).add(&k(-1.0))]),
        FamilySpec::from_polys("ellipses", &ellipse_family()),
        FamilySpec::from_polys("grid", &grid_family()),
        FamilySpec::Monomial { name: "monomial-3-1-2".into(), monomial: vec![3, 1, 2] },
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyVerdict {
    pub name: String,
    pub dim: usize,
    /// `resultant` or `monomial`.
    pub certificate: &'static str,
    pub complete: bool,
    pub resultant: Option<f64>,
    pub resultant_exact: Option<String>,
    pub bezout_bound: u64,
    /// Real zeros, for complete quadratic pairs only.
    pub real_solutions: Option<Vec<RealSolution>>,
    pub simple_solutions: Option<usize>,
}

fn verdict(spec: &FamilySpec) -> Result<FamilyVerdict, HarnessError> {
    let alg = |e: AlgebraicError| HarnessError::Config(format!("family {}: {e}", spec.name()));
    match spec {
        FamilySpec::Monomial { name, monomial } => Ok(FamilyVerdict {
            name: name.clone(),
            dim: monomial.len(),
            certificate: "monomial",
            complete: complete_monomial(monomial).map_err(alg)?,
            resultant: None,
            resultant_exact: None,
            bezout_bound: monomial.iter().map(|k| *k as u64).product(),
            real_solutions: None,
            simple_solutions: None,
        }),
        FamilySpec::Polys { name, .. } => {
            let polys = spec.polynomials()?;
            let dim = polys[0].nvars();
            if dim != 2 {
                return Err(HarnessError::UnsupportedDimension(dim));
            }
            let fam = PolynomialFamily::new(polys.clone()).map_err(alg)?;
            let bound = bezout_bound(&fam).map_err(alg)?;
            let v = complete_at_infinity_d2(&polys[0], &polys[1]).map_err(alg)?;
            let quadratic = polys.iter().all(|p| p.degree() == Some(2));
            let real_solutions = if v.complete && quadratic {
                Some(solve_quadratic_system_d2(&polys[0], &polys[1]).map_err(alg)?)
            } else {
                None
            };
            let simple_solutions = real_solutions.as_ref().map(|s| s.iter().filter(|r| r.simple).count());
            Ok(FamilyVerdict {
                name: name.clone(),
                dim,
                certificate: "resultant",
                complete: v.complete,
                resultant: Some(v.resultant),
                resultant_exact: Some(v.resultant_exact),
                bezout_bound: bound,
                real_solutions,
                simple_solutions,
            })
        }
    }
}

fn load_families(cfg: &ExperimentConfig) -> Result<Option<Vec<FamilySpec>>, HarnessError> {
    let Some(path) = &cfg.input else { return Ok(None) };
    let text =
        std::fs::read_to_string(path).map_err(|e| HarnessError::MissingInput(format!("{}: {e}", path.display())))?;
    let file: FamilyFile = serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("{} is not a family file: {e}", path.display())))?;
    Ok(Some(file.families))
}

#[derive(Serialize)]
struct VerdictRow {
    name: String,
    dim: usize,
    certificate: &'static str,
    complete: bool,
    resultant: String,
    resultant_exact: String,
    bezout_bound: u64,
    simple_solutions: String,
}

pub fn run_completeness(cfg: &ExperimentConfig) -> Result<Artifacts, HarnessError> {
    let families = match load_families(cfg)? {
        Some(f) => f,
        None if cfg.d == 2 => builtin_families(),
        None => return Err(HarnessError::UnsupportedDimension(cfg.d)),
    };
    let verdicts = families.iter().map(verdict).collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<VerdictRow> = verdicts
        .iter()
        .map(|v| VerdictRow {
            name: v.name.clone(),
            dim: v.dim,
            certificate: v.certificate,
            complete: v.complete,
            resultant: v.resultant.map(fmt_f64).unwrap_or_default(),
            resultant_exact: v.resultant_exact.clone().unwrap_or_default(),
            bezout_bound: v.bezout_bound,
            simple_solutions: v.simple_solutions.map(|s| s.to_string()).unwrap_or_default(),
        })
        .collect();
    let complete = verdicts.iter().filter(|v| v.complete).count();
    let summary = format!("completeness: {complete} of {} families complete at infinity", verdicts.len());
    Ok(Artifacts { csv: to_csv(&rows)?, json: to_json(&verdicts)?, svg: None, exit_code: 0, summary })
}

#[derive(Serialize)]
struct ExperimentReport<'a> {
    family: &'a str,
    seed: u64,
    /// `d + 1 + [d even]`.
    lower_bound: usize,
    attained: bool,
    report: &'a NcReport,
}

#[derive(Serialize)]
struct HistogramRow {
    simple_zeros: usize,
    trials: usize,
}

/// Random perturbations `h_i + a_i0 + a_i1·y₁ + a_i2·y₂` of a complete
/// quadratic family, keeping the largest number of simple real zeros.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Artifacts, HarnessError> {
    if cfg.d != 2 {
        return Err(HarnessError::UnsupportedDimension(cfg.d));
    }
    let spec = match load_families(cfg)? {
        Some(f) => f
            .into_iter()
            .find(|f| matches!(f, FamilySpec::Polys { .. }))
            .ok_or_else(|| HarnessError::Config("family file has no explicit polynomial family".into()))?,
        None => FamilySpec::from_polys("ellipses", &ellipse_family()),
    };
    let polys = spec.polynomials()?;
    if polys.len() != 2 || polys.iter().any(|p| p.nvars() != 2) {
        return Err(HarnessError::UnsupportedDimension(polys[0].nvars()));
    }
    let report = cfg
        .pool()?
        .install(|| nc_lower_experiment(&polys, cfg.trials, cfg.seed))
        .map_err(|e| HarnessError::Config(format!("family {}: {e}", spec.name())))?;
    let lower_bound = cfg.d + 1 + usize::from(cfg.d % 2 == 0);
    let attained = report.best >= lower_bound;
    let rows: Vec<HistogramRow> =
        report.histogram.iter().enumerate().map(|(k, n)| HistogramRow { simple_zeros: k, trials: *n }).collect();
    let json = to_json(&ExperimentReport { family: spec.name(), seed: cfg.seed, lower_bound, attained, report: &report })?;
    let summary = format!(
        "experiment {}: best {} simple zeros over {} trials (lower bound {lower_bound}){}",
        spec.name(),
        report.best,
        report.trials,
        report.witness_trial.map(|t| format!(", first at trial {t}")).unwrap_or_default()
    );
    Ok(Artifacts { csv: to_csv(&rows)?, json, svg: None, exit_code: if attained { 0 } else { 3 }, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{Command, CostSpec};

    #[test]
    fn builtin_verdicts() {
        let cfg = ExperimentConfig::new(Command::Completeness, 2, CostSpec::Power(0.5));
        let v: Vec<FamilyVerdict> = builtin_families().iter().map(|f| verdict(f).unwrap()).collect();
        let complete: Vec<bool> = v.iter().map(|v| v.complete).collect();
        assert_eq!(complete, [true, false, true, true, true]);
        assert_eq!(v[2].simple_solutions, Some(4));
        assert_eq!(v[2].bezout_bound, 4);
        assert_eq!(v[4].bezout_bound, 6);
        assert_eq!(run_completeness(&cfg).unwrap().exit_code, 0);
    }

    #[test]
    fn unsupported_dimension() {
        let spec = FamilySpec::Polys { name: "cubic".into(), polys: vec![vec![(1.0, vec![2, 0, 0])]; 3] };
        assert_eq!(verdict(&spec).unwrap_err().exit_code(), 4);
        let cfg = ExperimentConfig::new(Command::Experiment, 3, CostSpec::Power(0.5));
        assert_eq!(run_experiment(&cfg).unwrap_err().exit_code(), 4);
    }

    #[test]
    fn family_file_round_trip() {
        let f = FamilyFile { families: builtin_families() };
        let back: FamilyFile = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }
}
