//! `scan-threshold`: bisection for the dephasing rate that stops
//! entanglement generation, numerically and from the analytic rate.

use std::fmt::Write as _;

use pairdyn::lindblad::lindblad_concurrence_rate;
use pairdyn::observables::{analytic_threshold, threshold_scan, ThresholdResult};

use crate::config::{Physics, ScenarioConfig, ThresholdParams};
use crate::error::{CliError, Result};
use crate::output::{fmt_num, write_text, CsvTable, Provenance};
use crate::scenario::{RunContext, RunOutcome};

pub const THRESHOLD_COLUMNS: [&str; 4] = ["lambda", "lambda_ratio", "growth_rate", "analytic_rate"];

#[derive(Debug, Clone)]
pub struct ThresholdOutcome {
    pub omega: f64,
    pub numeric: ThresholdResult,
    pub analytic: ThresholdResult,
    pub table: CsvTable,
}

fn params(config: &ScenarioConfig) -> Result<&ThresholdParams> {
    match &config.physics {
        Physics::ThresholdScan(p) => Ok(p),
        _ => Err(CliError::Usage(format!(
            "scan-threshold needs scenario threshold_scan, got {}",
            config.scenario.name()
        ))),
    }
}

pub fn scan(config: &ScenarioConfig) -> Result<ThresholdOutcome> {
    let p = params(config)?;
    let w = p.omega.abs();
    let range = (p.ratio_range.0 * w, p.ratio_range.1 * w);
    let resolution = p.resolution * w;
    let numeric = threshold_scan(p.omega, range, resolution)?;
    let analytic = analytic_threshold(p.omega, range, resolution)?;

    let mut provenance = Provenance::for_config(config);
    provenance.push("result.lambda_star", fmt_num(numeric.lambda_star));
    provenance.push("result.analytic_lambda_star", fmt_num(analytic.lambda_star));
    let mut table = CsvTable::new(provenance, &THRESHOLD_COLUMNS);
    for &(lambda, rate) in &numeric.scan_points {
        table.rows.push(vec![lambda, lambda / w, rate, lindblad_concurrence_rate(p.omega, lambda)]);
    }
    Ok(ThresholdOutcome { omega: p.omega, numeric, analytic, table })
}

pub fn run_threshold(config: &ScenarioConfig, ctx: &RunContext) -> Result<RunOutcome> {
    let outcome = scan(config)?;
    let stem = config.stem();
    let csv = ctx.path(&format!("{stem}_threshold.csv"));
    outcome.table.write(&csv)?;

    let w = outcome.omega.abs();
    let mut text = outcome.table.provenance.render();
    let _ = writeln!(text);
    for (name, r) in [("numeric", &outcome.numeric), ("analytic", &outcome.analytic)] {
        let _ = writeln!(
            text,
            "{name}: lambda* = {} (lambda*/|omega| = {}), bracket [{}, {}], {} evaluations",
            fmt_num(r.lambda_star),
            fmt_num(r.lambda_star / w),
            fmt_num(r.bracket.0),
            fmt_num(r.bracket.1),
            r.scan_points.len()
        );
    }
    let report = ctx.path(&format!("{stem}_threshold.txt"));
    write_text(&report, &text)?;

    let mut run = RunOutcome::default();
    run.summary.push(format!(
        "lambda*/|omega| = {} (numeric), {} (analytic)",
        fmt_num(outcome.numeric.lambda_star / w),
        fmt_num(outcome.analytic.lambda_star / w)
    ));
    run.files.extend([csv, report]);
    Ok(run)
}
