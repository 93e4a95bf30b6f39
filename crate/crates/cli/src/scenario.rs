//! Trajectory scenarios: one CSV row per grid time.

use std::path::{Path, PathBuf};

use pairdyn::lindblad::{
    dephasing_closed_form, dephasing_time_dependent, evolve_trajectory_with, DissipatorMatrix, EvolveOptions,
    LambdaSchedule, LindbladModel, Propagator,
};
use pairdyn::micro::{
    brute_force_reduced_state, env_moments, gravitational_model, reduced_state, MicroModel, OffDiagonals, Weighting,
    MAX_ENV_DIM,
};
use pairdyn::observables::{concurrence, fidelity, purity};
use pairdyn::DensityMatrix;

use crate::config::{
    default_trajectory_grid, GravitationalParams, LindbladParams, LindbladTdepParams, Method, Physics,
    ScenarioConfig, WeightingKind,
};
use crate::error::{CliError, Result};
use crate::output::{fmt_num, CsvTable, Provenance};
use crate::plot::{render_svg, PlotOptions};

pub const TRAJECTORY_COLUMNS: [&str; 13] = [
    "t",
    "concurrence",
    "purity",
    "fidelity_ref",
    "gamma_a_abs",
    "gamma_a_arg",
    "gamma_b_abs",
    "gamma_b_arg",
    "lambda_plus_abs",
    "lambda_plus_arg",
    "lambda_minus_abs",
    "lambda_minus_arg",
    "min_eigenvalue",
];

const MICRO_ORACLE_TOL: f64 = 1e-10;
const ISOLATED_CONCURRENCE_TOL: f64 = 1e-10;
const ISOLATED_PURITY_TOL: f64 = 1e-12;
const LINDBLAD_ORACLE_TOL: f64 = 1e-9;
const TDEP_ORACLE_TOL: f64 = 1e-8;
const VARIANCE_TOL: f64 = 1e-12;

/// Where and how a run writes its files.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub out_dir: PathBuf,
    pub self_check: bool,
}

impl RunContext {
    pub fn path(&self, file: &str) -> PathBuf {
        self.out_dir.join(file)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    /// Human-readable lines for stdout.
    pub summary: Vec<String>,
}

/// States of a trajectory scenario on its grid, plus the ω they evolve under.
#[derive(Debug, Clone)]
pub struct StateSeries {
    pub omega: f64,
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Extra provenance lines (derived quantities such as σ²).
    pub derived: Vec<(String, String)>,
}

pub(crate) fn integrity(msg: impl Into<String>) -> CliError {
    CliError::Integrity(msg.into())
}

/// Environment-free model: ρ(t) of the isolated pair.
pub fn isolated_model(omega: f64) -> MicroModel {
    MicroModel::from_couplings(omega, [vec![0.0], vec![0.0]], [vec![0.0], vec![0.0]], vec![1.0])
        .expect("single-state environment is valid")
}

pub fn isolated_state(omega: f64, t: f64) -> DensityMatrix {
    reduced_state(&isolated_model(omega), t)
}

pub fn micro_random_model(omega: f64, n_env: u32, coupling_scale: f64, seed: u64) -> Result<MicroModel> {
    let model = MicroModel::random(n_env, omega, seed)?;
    if coupling_scale == 1.0 {
        Ok(model)
    } else {
        Ok(model.scaled_couplings(coupling_scale)?)
    }
}

fn weighting(kind: WeightingKind, seed: u64) -> Weighting {
    match kind {
        WeightingKind::Uniform => Weighting::Uniform,
        WeightingKind::RandomSimplex => Weighting::RandomSimplex { seed },
    }
}

pub fn lindblad_model(p: &LindbladParams) -> Result<LindbladModel> {
    let shape = DissipatorMatrix::dephasing(1.0);
    let model = LindbladModel::new(
        p.omega,
        p.dissipator_a.unwrap_or(shape),
        p.dissipator_b.unwrap_or(shape),
        LambdaSchedule::Constant { lambda: p.lambda },
    )?;
    Ok(match p.local_fields {
        Some([c_a, c_b]) => model.with_local_fields(c_a, c_b),
        None => model,
    })
}

fn is_plain_dephasing(p: &LindbladParams) -> bool {
    let shape = Some(DissipatorMatrix::dephasing(1.0));
    (p.dissipator_a.is_none() || p.dissipator_a == shape)
        && (p.dissipator_b.is_none() || p.dissipator_b == shape)
        && p.local_fields.map_or(true, |f| f == [0.0, 0.0])
}

fn max_entry_diff(a: &[DensityMatrix], b: &[DensityMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.matrix().max_abs_diff(y.matrix())).fold(0.0, f64::max)
}

fn check_oracle(label: &str, diff: f64, tol: f64) -> Result<String> {
    if diff <= tol {
        Ok(format!("self-check {label}: max entry difference {} ≤ {}", fmt_num(diff), fmt_num(tol)))
    } else {
        Err(integrity(format!("{label}: max entry difference {} exceeds {}", fmt_num(diff), fmt_num(tol))))
    }
}

fn grid_times(config: &ScenarioConfig, scale: f64) -> Vec<f64> {
    match &config.grid {
        Some(g) => g.times(),
        None => default_trajectory_grid(if scale > 0.0 { scale } else { 1.0 }).times(),
    }
}

fn micro_series(
    config: &ScenarioConfig,
    model: &MicroModel,
    derived: Vec<(String, String)>,
    checks: &mut Vec<String>,
    self_check: bool,
) -> Result<StateSeries> {
    let moments = env_moments(model);
    let sigma = moments.mean_variance().sqrt();
    let times = grid_times(config, model.omega.abs().max(sigma));
    let states: Vec<DensityMatrix> = times.iter().map(|&t| reduced_state(model, t)).collect();
    if self_check {
        if model.env_dim() > MAX_ENV_DIM {
            return Err(CliError::Usage(format!(
                "self-check enumerates the environment; dimension {} exceeds {MAX_ENV_DIM}",
                model.env_dim()
            )));
        }
        let brute = times.iter().map(|&t| brute_force_reduced_state(model, t)).collect::<pairdyn::Result<Vec<_>>>()?;
        checks.push(check_oracle("closed form vs full-space evolution", max_entry_diff(&states, &brute), MICRO_ORACLE_TOL)?);
    }
    let mut derived = derived;
    derived.push(("derived.sigma_a2".into(), fmt_num(moments.sigma_a2)));
    derived.push(("derived.sigma_b2".into(), fmt_num(moments.sigma_b2)));
    derived.push(("derived.sigma_c2".into(), fmt_num(moments.sigma_c2)));
    Ok(StateSeries { omega: model.omega, times, states, derived })
}

fn gravitational_series(
    config: &ScenarioConfig,
    p: &GravitationalParams,
    checks: &mut Vec<String>,
    self_check: bool,
) -> Result<StateSeries> {
    let gm = gravitational_model(&p.gravity, weighting(p.weighting, config.seed))?;
    let derived = vec![
        ("derived.omega".into(), fmt_num(gm.model.omega)),
        ("derived.predicted_sigma_a2".into(), fmt_num(gm.predicted_sigma_a2)),
        ("derived.predicted_sigma_b2".into(), fmt_num(gm.predicted_sigma_b2)),
    ];
    if self_check && p.weighting == WeightingKind::Uniform {
        let m = env_moments(&gm.model);
        let diff = (m.sigma_a2 - gm.predicted_sigma_a2).abs().max((m.sigma_b2 - gm.predicted_sigma_b2).abs());
        if diff > VARIANCE_TOL {
            return Err(integrity(format!("enumerated variance differs from formula by {}", fmt_num(diff))));
        }
        checks.push(format!("self-check variance formula: max difference {} ≤ {}", fmt_num(diff), fmt_num(VARIANCE_TOL)));
    }
    micro_series(config, &gm.model, derived, checks, self_check)
}

fn lindblad_series(
    config: &ScenarioConfig,
    p: &LindbladParams,
    checks: &mut Vec<String>,
    self_check: bool,
) -> Result<StateSeries> {
    let times = grid_times(config, p.omega.abs().max(p.lambda));
    let options = EvolveOptions { tolerance: config.tolerance };
    let rho0 = DensityMatrix::plus_plus();
    let run = |method: Method| -> Result<Vec<DensityMatrix>> {
        match method {
            Method::ClosedForm => Ok(times.iter().map(|&t| dephasing_closed_form(p.omega, p.lambda, t)).collect()),
            Method::Exponential => {
                Ok(evolve_trajectory_with(&lindblad_model(p)?, &rho0, &times, Propagator::Exponential, &options)?)
            }
            Method::Stepped => {
                Ok(evolve_trajectory_with(&lindblad_model(p)?, &rho0, &times, Propagator::Stepped, &options)?)
            }
        }
    };
    let states = run(p.method)?;
    if self_check {
        let mut others = vec![Method::Exponential, Method::Stepped];
        if is_plain_dephasing(p) {
            others.push(Method::ClosedForm);
        }
        for other in others.into_iter().filter(|m| *m != p.method) {
            let label = format!("{} vs {}", p.method.name(), other.name());
            checks.push(check_oracle(&label, max_entry_diff(&states, &run(other)?), LINDBLAD_ORACLE_TOL)?);
        }
    }
    Ok(StateSeries { omega: p.omega, times, states, derived: Vec::new() })
}

fn tdep_series(
    config: &ScenarioConfig,
    p: &LindbladTdepParams,
    checks: &mut Vec<String>,
    self_check: bool,
) -> Result<StateSeries> {
    let times = grid_times(config, p.omega.abs().max(p.lambda_tilde.sqrt()));
    let options = EvolveOptions { tolerance: config.tolerance };
    let run = |method: Method| -> Result<Vec<DensityMatrix>> {
        match method {
            Method::ClosedForm => {
                Ok(times.iter().map(|&t| dephasing_time_dependent(p.omega, p.lambda_tilde, t)).collect())
            }
            _ => {
                let model = LindbladModel::dephasing_linear(p.omega, p.lambda_tilde)?;
                Ok(evolve_trajectory_with(&model, &DensityMatrix::plus_plus(), &times, Propagator::Stepped, &options)?)
            }
        }
    };
    let states = run(p.method)?;
    if self_check {
        let other = if p.method == Method::ClosedForm { Method::Stepped } else { Method::ClosedForm };
        let label = format!("{} vs {}", p.method.name(), other.name());
        checks.push(check_oracle(&label, max_entry_diff(&states, &run(other)?), TDEP_ORACLE_TOL)?);
    }
    Ok(StateSeries { omega: p.omega, times, states, derived: Vec::new() })
}

/// Evolves the configured trajectory scenario. Self-check lines are appended
/// to `checks`.
pub fn state_series(config: &ScenarioConfig, self_check: bool, checks: &mut Vec<String>) -> Result<StateSeries> {
    match &config.physics {
        Physics::Isolated(p) => {
            let model = isolated_model(p.omega);
            let times = grid_times(config, p.omega.abs());
            let states = times.iter().map(|&t| reduced_state(&model, t)).collect();
            Ok(StateSeries { omega: p.omega, times, states, derived: Vec::new() })
        }
        Physics::MicroRandom(p) => {
            let model = micro_random_model(p.omega, p.n_env, p.coupling_scale, config.seed)?;
            micro_series(config, &model, Vec::new(), checks, self_check)
        }
        Physics::MicroGravitational(p) => gravitational_series(config, p, checks, self_check),
        Physics::Lindblad(p) => lindblad_series(config, p, checks, self_check),
        Physics::LindbladTdep(p) => tdep_series(config, p, checks, self_check),
        Physics::Compare(_) | Physics::ThresholdScan(_) => Err(CliError::Usage(format!(
            "scenario {} is not a trajectory; use the `{}` subcommand",
            config.scenario.name(),
            if matches!(config.physics, Physics::Compare(_)) { "compare" } else { "scan-threshold" }
        ))),
    }
}

/// Observables of one state, in [`TRAJECTORY_COLUMNS`] order.
pub fn trajectory_row(rho: &DensityMatrix, omega: f64, t: f64, tolerance: f64) -> Result<Vec<f64>> {
    let report = rho.validate(tolerance);
    if !report.passed() {
        return Err(integrity(format!("state at t = {} is unphysical: {report}", fmt_num(t))));
    }
    let c = concurrence(rho).map_err(|e| integrity(format!("concurrence at t = {}: {e}", fmt_num(t))))?;
    let f = fidelity(rho, &isolated_state(omega, t))
        .map_err(|e| integrity(format!("fidelity at t = {}: {e}", fmt_num(t))))?;
    let off = OffDiagonals::extract(rho.matrix(), omega, t);
    let mut row = vec![t, c, purity(rho), f];
    for z in [off.gamma_a, off.gamma_b, off.lambda_plus, off.lambda_minus] {
        row.push(z.norm());
        row.push(z.arg());
    }
    row.push(report.min_eigenvalue);
    Ok(row)
}

pub fn trajectory_table(config: &ScenarioConfig, series: &StateSeries) -> Result<CsvTable> {
    let mut provenance = Provenance::for_config(config);
    for (k, v) in &series.derived {
        provenance.push(k.clone(), v.clone());
    }
    provenance.push("grid", describe_times(&series.times));
    let mut table = CsvTable::new(provenance, &TRAJECTORY_COLUMNS);
    for (rho, &t) in series.states.iter().zip(&series.times) {
        table.rows.push(trajectory_row(rho, series.omega, t, config.tolerance)?);
    }
    Ok(table)
}

pub fn describe_times(times: &[f64]) -> String {
    match (times.first(), times.last()) {
        (Some(a), Some(b)) => format!("{} points on [{}, {}]", times.len(), fmt_num(*a), fmt_num(*b)),
        _ => "empty".into(),
    }
}

fn isolated_checks(series: &StateSeries, table: &CsvTable) -> Result<String> {
    let c = table.column("concurrence").expect("column present");
    let p = table.column("purity").expect("column present");
    let mut dc: f64 = 0.0;
    let mut dp: f64 = 0.0;
    for ((ci, pi), t) in c.iter().zip(&p).zip(&series.times) {
        dc = dc.max((ci - (2.0 * series.omega * t).sin().abs()).abs());
        dp = dp.max((pi - 1.0).abs());
    }
    if dc > ISOLATED_CONCURRENCE_TOL || dp > ISOLATED_PURITY_TOL {
        return Err(integrity(format!(
            "isolated pair deviates from |sin 2ωt| by {} or from unit purity by {}",
            fmt_num(dc),
            fmt_num(dp)
        )));
    }
    Ok(format!("self-check isolated: concurrence error {}, purity error {}", fmt_num(dc), fmt_num(dp)))
}

/// `simulate`: CSV trajectory and optional SVG.
pub fn run_scenario(config: &ScenarioConfig, ctx: &RunContext) -> Result<RunOutcome> {
    let mut checks = Vec::new();
    let series = state_series(config, ctx.self_check, &mut checks)?;
    let table = trajectory_table(config, &series)?;
    if ctx.self_check && matches!(config.physics, Physics::Isolated(_)) {
        checks.push(isolated_checks(&series, &table)?);
    }
    let stem = config.stem();
    let mut outcome = RunOutcome::default();
    let csv = ctx.path(&format!("{stem}.csv"));
    table.write(&csv)?;
    outcome.files.push(csv);
    if config.output.svg {
        let svg = ctx.path(&format!("{stem}.svg"));
        write_plot(&table, &svg, config.output.log_log)?;
        outcome.files.push(svg);
    }
    outcome.summary.push(format!("{}: {} rows", config.scenario.name(), table.rows.len()));
    outcome.summary.extend(checks);
    Ok(outcome)
}

pub fn write_plot(table: &CsvTable, path: &Path, log_log: bool) -> Result<()> {
    let options = PlotOptions { log_log, ..PlotOptions::default() };
    crate::output::write_text(path, &render_svg(table, &options)?)
}
