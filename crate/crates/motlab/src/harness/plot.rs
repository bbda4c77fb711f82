//! Required radius against attained radius along the curve `y(a)`.
//!
//! For `|x − y|^p`, `g(ρ) = −pρ^{p−2}`, so with `λ = −a` a point of the
//! structure set is a `λ` where `(1/(p−2))·ln(λ/p) = ln|y(−λ) − x0|`.

use serde::{Deserialize, Serialize};

use crate::affine_fit::y_of_a;
use crate::linalg::{real_eigenvalues, vector};
use crate::output::fmt_f64;
use crate::support::PointClass;

use super::support_run::{support_records, SupportDump, SupportReport, TrialRecord};
use super::svg::{padded_range, Panel, Svg, BLUE, GREY, RED, YELLOW};
use super::{fmt_opt, to_csv, to_json, Artifacts, CostSpec, ExperimentConfig, HarnessError};

pub const SAMPLES: usize = 512;
/// Extra `ln ρ` shown on each side of the outermost points.
const RHO_MARGIN: f64 = 1.0;
/// Guard band around each pole, as a share of the plotted `ln λ` width.
const POLE_GUARD: f64 = 0.001;
/// Scan points per drawn sample when counting crossings.
const REFINE: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotMarker {
    pub log_lambda: f64,
    pub log_radius: f64,
    pub class: PointClass,
    pub point: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub trial: u64,
    pub d: usize,
    pub p: f64,
    pub log_lambda: Vec<f64>,
    pub required: Vec<f64>,
    /// `None` inside a pole's guard band.
    pub attained: Vec<Option<f64>>,
    pub pole_log_lambdas: Vec<f64>,
    pub markers: Vec<PlotMarker>,
    /// Sign changes of `attained − required` on one branch, over a scan finer than the samples.
    pub crossings: usize,
}

#[derive(Serialize)]
struct CsvRow {
    log_lambda: String,
    required: String,
    attained: String,
}

/// Curve samples for one solved trial of a power cost.
pub fn plot_data(record: &TrialRecord, p: f64) -> Result<PlotData, HarnessError> {
    let refuse = |why: &str| HarnessError::Config(format!("trial {} cannot be plotted: {why}", record.trial));
    let dump: &SupportDump =
        record.support.as_ref().ok_or_else(|| refuse(record.error.as_deref().unwrap_or("no structure set recorded")))?;
    let d = dump.x0.len();
    if dump.points.is_empty() || dump.affine_linear.len() != d || dump.affine_linear.iter().any(|r| r.len() != d) {
        return Err(refuse("malformed structure set"));
    }
    let a_map = dump.affine();
    let x0 = dump.x0.as_slice();
    let log_lambda_of = |log_rho: f64| p.ln() + (p - 2.0) * log_rho;

    let markers: Vec<PlotMarker> = dump
        .points
        .iter()
        .map(|q| {
            let log_radius = vector::norm(&vector::sub(&q.point, x0)).ln();
            PlotMarker { log_lambda: log_lambda_of(log_radius), log_radius, class: q.class, point: q.point.clone() }
        })
        .collect();
    if markers.iter().any(|m| !m.log_radius.is_finite()) {
        return Err(refuse("a point coincides with x0"));
    }
    let (rlo, rhi) = markers
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| (lo.min(m.log_radius), hi.max(m.log_radius)));
    let (l1, l2) = (log_lambda_of(rlo - RHO_MARGIN), log_lambda_of(rhi + RHO_MARGIN));
    let (llo, lhi) = (l1.min(l2), l1.max(l2));

    let pole_log_lambdas: Vec<f64> =
        real_eigenvalues(&a_map.linear).into_iter().filter(|e| *e < 0.0).map(|e| (-e).ln()).collect();
    let guard = POLE_GUARD * (lhi - llo);
    let attained_at = |l: f64| {
        y_of_a(&a_map, x0, -l.exp()).ok().map(|y| vector::norm(&vector::sub(&y, x0)).ln()).filter(|v| v.is_finite())
    };

    let mut log_lambda = Vec::with_capacity(SAMPLES);
    let mut required = Vec::with_capacity(SAMPLES);
    let mut attained = Vec::with_capacity(SAMPLES);
    for k in 0..SAMPLES {
        let l = llo + (lhi - llo) * k as f64 / (SAMPLES - 1) as f64;
        log_lambda.push(l);
        required.push((l - p.ln()) / (p - 2.0));
        let near_pole = pole_log_lambdas.iter().any(|g| (l - g).abs() < guard);
        attained.push(if near_pole { None } else { attained_at(l) });
    }

    // count on a finer scan so clustered points between close poles separate
    let fine = SAMPLES * REFINE;
    let mut crossings = 0;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..fine {
        let l = llo + (lhi - llo) * k as f64 / (fine - 1) as f64;
        let Some(r) = attained_at(l) else {
            prev = None;
            continue;
        };
        let diff = r - (l - p.ln()) / (p - 2.0);
        if let Some((l0, d0)) = prev {
            let pole_between = pole_log_lambdas.iter().any(|g| (l0 - g) * (l - g) <= 0.0);
            if !pole_between && d0.signum() != diff.signum() {
                crossings += 1;
            }
        }
        prev = Some((l, diff));
    }

    Ok(PlotData { trial: record.trial, d, p, log_lambda, required, attained, pole_log_lambdas, markers, crossings })
}

fn class_color(c: PointClass) -> &'static str {
    match c {
        PointClass::Seed => BLUE,
        PointClass::New => RED,
        PointClass::FirstCrossing => YELLOW,
    }
}

fn render(data: &PlotData) -> String {
    let mut svg = Svg::new(1000.0, 480.0);

    let coords = |pt: &[f64]| (pt[0], pt.get(1).copied().unwrap_or(0.0));
    let xy: Vec<(f64, f64)> = data.markers.iter().map(|m| coords(&m.point)).collect();
    let left = Panel {
        left: 70.0,
        top: 40.0,
        width: 360.0,
        height: 360.0,
        x_range: padded_range(xy.iter().map(|p| p.0).chain([0.0])),
        y_range: padded_range(xy.iter().map(|p| p.1).chain([0.0])),
    };
    let title = format!("structure set, d = {}, p = {}", data.d, data.p);
    svg.frame(&left, &title, "y₁", if data.d > 1 { "y₂" } else { "" });
    svg.marker(&left, 0.0, 0.0, GREY);
    for (m, (x, y)) in data.markers.iter().zip(&xy) {
        svg.marker(&left, *x, *y, class_color(m.class));
    }
    svg.legend(80.0, 460.0, &[(BLUE, "seed"), (RED, "new")]);
    svg.legend(160.0, 460.0, &[(YELLOW, "first crossing")]);

    let finite = data.required.iter().copied().chain(data.attained.iter().flatten().copied());
    let mut y_range = padded_range(finite.chain(data.markers.iter().map(|m| m.log_radius)));
    // keep the blow-ups at the poles from flattening the rest
    let (rlo, rhi) = padded_range(data.markers.iter().map(|m| m.log_radius));
    let span = (rhi - rlo).max(1.0);
    y_range = (y_range.0.max(rlo - 3.0 * span), y_range.1.min(rhi + 3.0 * span));
    let right = Panel {
        left: 560.0,
        top: 40.0,
        width: 400.0,
        height: 360.0,
        x_range: (data.log_lambda[0], data.log_lambda[data.log_lambda.len() - 1]),
        y_range,
    };
    svg.frame(&right, &format!("{} crossings", data.crossings), "ln λ", "ln radius");
    let clip = |v: f64| (v >= y_range.0 && v <= y_range.1).then_some(v);
    let req: Vec<Option<(f64, f64)>> =
        data.log_lambda.iter().zip(&data.required).map(|(x, y)| clip(*y).map(|y| (*x, y))).collect();
    let att: Vec<Option<(f64, f64)>> =
        data.log_lambda.iter().zip(&data.attained).map(|(x, y)| y.and_then(clip).map(|y| (*x, y))).collect();
    svg.polyline(&right, &req, GREY);
    svg.polyline(&right, &att, "black");
    for g in &data.pole_log_lambdas {
        if *g > right.x_range.0 && *g < right.x_range.1 {
            svg.vline(&right, *g, GREY);
        }
    }
    for m in &data.markers {
        svg.marker(&right, m.log_lambda, m.log_radius, class_color(m.class));
    }
    svg.legend(570.0, 460.0, &[(GREY, "required (1/(p−2))·ln(λ/p)"), ("black", "attained ln|y(−λ) − x0|")]);
    svg.finish()
}

fn load_report(cfg: &ExperimentConfig) -> Result<SupportReport, HarnessError> {
    match &cfg.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| HarnessError::MissingInput(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| HarnessError::MissingInput(format!("{} is not a support report: {e}", path.display())))
        }
        None => {
            let mut one = cfg.clone();
            one.trials = 1;
            support_records(&one)
        }
    }
}

pub fn run_plot(cfg: &ExperimentConfig) -> Result<Artifacts, HarnessError> {
    let report = load_report(cfg)?;
    let CostSpec::Power(p) = report.cost else {
        return Err(HarnessError::Config(format!("plot needs a power cost, the report has {}", report.cost)));
    };
    let record = report.records.first().ok_or_else(|| HarnessError::MissingInput("report has no trials".into()))?;
    let data = plot_data(record, p)?;
    let rows: Vec<CsvRow> = data
        .log_lambda
        .iter()
        .zip(&data.required)
        .zip(&data.attained)
        .map(|((l, r), a)| CsvRow { log_lambda: fmt_f64(*l), required: fmt_f64(*r), attained: fmt_opt(*a) })
        .collect();
    let exit_code = 0;
    let summary = format!("plot trial {}: {} crossings, {} points", data.trial, data.crossings, data.markers.len());
    Ok(Artifacts { csv: to_csv(&rows)?, json: to_json(&data)?, svg: Some(render(&data)), exit_code, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Command;

    fn crossings(d: usize, p: f64) -> (usize, usize) {
        let cfg = ExperimentConfig::new(Command::Plot, d, CostSpec::Power(p));
        let r = support_records(&ExperimentConfig { trials: 1, ..cfg }).unwrap();
        let data = plot_data(&r.records[0], p).unwrap();
        (data.crossings, data.markers.len())
    }

    #[test]
    fn crossings_match_points() {
        assert_eq!(crossings(2, 1.9), (5, 5));
        assert_eq!(crossings(3, 2.1), (7, 7));
        assert_eq!(crossings(2, 0.5), (4, 4));
    }

    #[test]
    fn refuses_failed_trial() {
        let cfg = ExperimentConfig::new(Command::Support, 2, CostSpec::Power(0.5));
        let mut r = support_records(&ExperimentConfig { trials: 1, ..cfg }).unwrap().records.remove(0);
        r.support = None;
        assert_eq!(plot_data(&r, 0.5).unwrap_err().exit_code(), 2);
    }
}
