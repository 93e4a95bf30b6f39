//! Parameter sweeps: one CSV row per grid value, computed in parallel and
//! written in grid order.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write as _;

use pairdyn::lindblad::lindblad_concurrence_rate;
use pairdyn::micro::{env_moments, gravitational_model, reduced_state, GravitationalSpec, Weighting};
use pairdyn::observables::{concurrence, early_growth_rate, fit_power_law, purity};
use rayon::prelude::*;

use crate::config::{default_fit_grid, Physics, ScenarioConfig, SweepKind, SweepSpec, WeightingKind};
use crate::error::{CliError, Result};
use crate::output::{fmt_num, render_row, write_text, CsvTable, Provenance};
use crate::scenario::{micro_random_model, RunContext, RunOutcome};

pub const LAMBDA_RATIO_COLUMNS: [&str; 5] = ["lambda_ratio", "lambda", "growth_rate", "analytic_rate", "clamped_rate"];
pub const GRAVITATIONAL_COLUMNS: [&str; 6] =
    ["n", "sigma_a2", "predicted_sigma_a2", "sigma_b2", "predicted_sigma_b2", "max_abs_diff"];
pub const COUPLING_SCALE_COLUMNS: [&str; 6] =
    ["coupling_scale", "sigma2", "purity_exponent", "purity_prefactor", "prefactor_ratio", "concurrence_slope_ratio"];

const SLOPE_TIME: f64 = 1e-3;

pub fn columns(kind: SweepKind) -> &'static [&'static str] {
    match kind {
        SweepKind::LambdaRatio => &LAMBDA_RATIO_COLUMNS,
        SweepKind::GravitationalN => &GRAVITATIONAL_COLUMNS,
        SweepKind::CouplingScale => &COUPLING_SCALE_COLUMNS,
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn spec(config: &ScenarioConfig) -> Result<&SweepSpec> {
    config.sweep.as_ref().ok_or_else(|| usage("the sweep subcommand needs a `sweep` section in the config"))
}

fn lambda_ratio_row(omega: f64, ratio: f64) -> Result<Vec<f64>> {
    if ratio < 0.0 {
        return Err(usage(format!("lambda_ratio values must be nonnegative, got {ratio}")));
    }
    let lambda = ratio * omega.abs();
    let growth = early_growth_rate(omega, lambda)?;
    let analytic = lindblad_concurrence_rate(omega, lambda);
    Ok(vec![ratio, lambda, growth, analytic, analytic.max(0.0)])
}

fn gravitational_row(base: &GravitationalSpec, weighting: Weighting, value: f64) -> Result<Vec<f64>> {
    let n = value as usize;
    if value.fract() != 0.0 || value < 1.0 {
        return Err(usage(format!("gravitational_n values must be positive integers, got {value}")));
    }
    if n > base.dist_a.len() || n > base.dist_b.len() {
        return Err(usage(format!(
            "N = {n} exceeds the {} distances listed in the base geometry",
            base.dist_a.len().min(base.dist_b.len())
        )));
    }
    let spec = GravitationalSpec { dist_a: base.dist_a[..n].to_vec(), dist_b: base.dist_b[..n].to_vec(), ..base.clone() };
    let gm = gravitational_model(&spec, weighting)?;
    let m = env_moments(&gm.model);
    let diff = (m.sigma_a2 - gm.predicted_sigma_a2).abs().max((m.sigma_b2 - gm.predicted_sigma_b2).abs());
    Ok(vec![value, m.sigma_a2, gm.predicted_sigma_a2, m.sigma_b2, gm.predicted_sigma_b2, diff])
}

fn coupling_scale_row(omega: f64, n_env: u32, base_scale: f64, seed: u64, factor: f64) -> Result<Vec<f64>> {
    if !(factor >= 0.0) {
        return Err(usage(format!("coupling_scale values must be nonnegative, got {factor}")));
    }
    let model = micro_random_model(omega, n_env, base_scale * factor, seed)?;
    let sigma2 = env_moments(&model).mean_variance();
    let scale = omega.abs().max(sigma2.sqrt());
    let t0 = SLOPE_TIME / scale;
    let slope_ratio = concurrence(&reduced_state(&model, t0))? / (2.0 * omega.abs() * t0);
    let (exponent, prefactor) = if sigma2 > 0.0 {
        let samples: Vec<(f64, f64)> = default_fit_grid(sigma2.sqrt())
            .times()
            .into_iter()
            .map(|t| (t, 1.0 - purity(&reduced_state(&model, t))))
            .collect();
        let fit = fit_power_law(&samples)?;
        (fit.exponent, fit.prefactor)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(vec![factor, sigma2, exponent, prefactor, prefactor / sigma2, slope_ratio])
}

fn row(config: &ScenarioConfig, kind: SweepKind, value: f64) -> Result<Vec<f64>> {
    match (kind, &config.physics) {
        (SweepKind::LambdaRatio, Physics::Lindblad(p)) => lambda_ratio_row(p.omega, value),
        (SweepKind::GravitationalN, Physics::MicroGravitational(p)) => {
            let weighting = match p.weighting {
                WeightingKind::Uniform => Weighting::Uniform,
                WeightingKind::RandomSimplex => Weighting::RandomSimplex { seed: config.seed },
            };
            gravitational_row(&p.gravity, weighting, value)
        }
        (SweepKind::CouplingScale, Physics::MicroRandom(p)) => {
            coupling_scale_row(p.omega, p.n_env, p.coupling_scale, config.seed, value)
        }
        (SweepKind::CouplingScale, Physics::Compare(p)) => {
            coupling_scale_row(p.omega, p.n_env, p.coupling_scale, config.seed, value)
        }
        _ => Err(usage(format!("sweep {} does not apply to scenario {}", kind.name(), config.scenario.name()))),
    }
}

pub fn sweep_provenance(config: &ScenarioConfig, spec: &SweepSpec) -> Provenance {
    let mut p = Provenance::for_config(config);
    p.push("sweep.kind", spec.kind.name());
    p.push("sweep.values", spec.values.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(" "));
    p
}

/// Rows already present in a previous output of the same configuration,
/// keyed by the bits of their first cell.
fn resumable_rows(existing: &CsvTable, expected: &Provenance, columns: &[&str]) -> Result<HashMap<u64, Vec<f64>>> {
    if existing.provenance != *expected || existing.columns != columns {
        return Err(usage("existing sweep output was produced by a different configuration; remove it or drop --resume"));
    }
    Ok(existing.rows.iter().map(|r| (r[0].to_bits(), r.clone())).collect())
}

/// Evaluates the grid in chunks of the pool size, in grid order, passing
/// each finished chunk to `sink`. Rows present in `done` are reused.
fn evaluate(
    config: &ScenarioConfig,
    spec: &SweepSpec,
    done: &HashMap<u64, Vec<f64>>,
    mut sink: impl FnMut(&[Vec<f64>]) -> Result<()>,
) -> Result<()> {
    let chunk = rayon::current_num_threads().max(1);
    for values in spec.values.chunks(chunk) {
        let rows = values
            .par_iter()
            .map(|&v| match done.get(&v.to_bits()) {
                Some(r) => Ok(r.clone()),
                None => row(config, spec.kind, v),
            })
            .collect::<Vec<Result<Vec<f64>>>>()
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        sink(&rows)?;
    }
    Ok(())
}

fn previous_rows(config: &ScenarioConfig, spec: &SweepSpec, previous: Option<&CsvTable>) -> Result<HashMap<u64, Vec<f64>>> {
    match previous {
        Some(t) => resumable_rows(t, &sweep_provenance(config, spec), columns(spec.kind)),
        None => Ok(HashMap::new()),
    }
}

/// Builds the sweep table in memory. With `previous`, rows whose grid value
/// already appears there are reused instead of recomputed.
pub fn sweep_table(config: &ScenarioConfig, previous: Option<&CsvTable>) -> Result<CsvTable> {
    let spec = spec(config)?;
    let done = previous_rows(config, spec, previous)?;
    let mut table = CsvTable::new(sweep_provenance(config, spec), columns(spec.kind));
    evaluate(config, spec, &done, |rows| {
        table.rows.extend_from_slice(rows);
        Ok(())
    })?;
    Ok(table)
}

/// `sweep`: writes `<stem>_sweep.csv`, appending rows as chunks finish so an
/// interrupted run leaves a valid prefix for `--resume`.
pub fn run_sweep(config: &ScenarioConfig, ctx: &RunContext, resume: bool) -> Result<RunOutcome> {
    let spec = spec(config)?;
    let path = ctx.path(&format!("{}_sweep.csv", config.stem()));
    let previous = if resume && path.exists() { Some(CsvTable::read(&path)?) } else { None };
    let done = previous_rows(config, spec, previous.as_ref())?;
    let reused = spec.values.iter().filter(|v| done.contains_key(&v.to_bits())).count();

    let header = CsvTable::new(sweep_provenance(config, spec), columns(spec.kind));
    write_text(&path, &header.render())?;
    let io_err = |e| CliError::io(format!("appending to {}", path.display()), e);
    let mut file = OpenOptions::new().append(true).open(&path).map_err(io_err)?;
    let mut written = 0;
    evaluate(config, spec, &done, |rows| {
        let text: String = rows.iter().map(|r| render_row(r)).collect();
        file.write_all(text.as_bytes()).map_err(io_err)?;
        file.flush().map_err(io_err)?;
        written += rows.len();
        Ok(())
    })?;

    let mut outcome = RunOutcome::default();
    outcome.summary.push(format!("sweep {}: {written} rows ({reused} reused)", spec.kind.name()));
    outcome.files.push(path);
    Ok(outcome)
}
