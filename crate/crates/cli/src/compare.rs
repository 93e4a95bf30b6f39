//! Microscopic model against its calibrated Lindblad counterparts.

use std::fmt::Write as _;

use pairdyn::lindblad::{
    dephasing_closed_form, dephasing_time_dependent, evolve_trajectory_with, lindblad_concurrence_rate, EvolveOptions,
    LindbladModel, Propagator,
};
use pairdyn::micro::{brute_force_reduced_state, env_moments, reduced_state, EnvMoments, MicroModel, MAX_ENV_DIM};
use pairdyn::observables::{central_difference_slope, concurrence, fidelity, fit_power_law, purity, PowerLawFit};
use pairdyn::DensityMatrix;

use crate::config::{default_fit_grid, default_trajectory_grid, CompareParams, Physics, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::output::{fmt_num, write_text, CsvTable, Provenance};
use crate::scenario::{describe_times, integrity, micro_random_model, write_plot, RunContext, RunOutcome};

pub const COMPARE_COLUMNS: [&str; 9] = [
    "t",
    "micro_concurrence",
    "micro_purity",
    "lindblad_concurrence",
    "lindblad_purity",
    "tdep_concurrence",
    "tdep_purity",
    "fidelity_micro_lindblad",
    "fidelity_micro_tdep",
];

/// Early-time point for slopes, in units of 1/scale.
const SLOPE_TIME: f64 = 1e-3;
const EXPONENT_TOL: f64 = 0.05;
const PREFACTOR_REL_TOL: f64 = 0.05;
const SLOPE_REL_TOL: f64 = 0.01;
const ZERO_SLOPE_TOL: f64 = 1e-10;
const MICRO_ORACLE_TOL: f64 = 1e-10;
const LINDBLAD_ORACLE_TOL: f64 = 1e-9;
const TDEP_ORACLE_TOL: f64 = 1e-8;

/// One checked statement in the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub statement: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: String,
    pub pass: bool,
}

impl Claim {
    fn absolute(statement: &str, measured: f64, expected: f64, tol: f64) -> Self {
        Self {
            statement: statement.into(),
            measured,
            expected,
            tolerance: format!("± {}", fmt_num(tol)),
            pass: (measured - expected).abs() <= tol,
        }
    }

    fn relative(statement: &str, measured: f64, expected: f64, rel: f64) -> Self {
        let pass = if expected == 0.0 {
            measured.abs() <= ZERO_SLOPE_TOL
        } else {
            ((measured - expected) / expected).abs() <= rel
        };
        let tolerance =
            if expected == 0.0 { format!("|x| ≤ {}", fmt_num(ZERO_SLOPE_TOL)) } else { format!("± {}%", rel * 100.0) };
        Self { statement: statement.into(), measured, expected, tolerance, pass }
    }
}

/// Calibrated parameters and every measured quantity of a comparison.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub omega: f64,
    pub moments: EnvMoments,
    pub sigma: f64,
    pub lambda: f64,
    pub lambda_rule: String,
    pub lambda_tilde: f64,
    pub lambda_tilde_rule: String,
    pub micro_fit: PowerLawFit,
    pub lindblad_fit: PowerLawFit,
    pub tdep_fit: PowerLawFit,
    pub micro_slope: f64,
    pub lindblad_slope: f64,
    pub tdep_slope: f64,
    pub slope_time: f64,
    pub min_fidelity_lindblad: f64,
    pub min_fidelity_tdep: f64,
    pub claims: Vec<Claim>,
    pub checks: Vec<String>,
    pub trajectory: CsvTable,
    pub fit_table: CsvTable,
}

impl ComparisonReport {
    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }

    pub fn claim(&self, prefix: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.statement.starts_with(prefix))
    }

    pub fn render(&self, provenance: &Provenance) -> String {
        let mut s = provenance.render();
        let _ = writeln!(s);
        let _ = writeln!(s, "parameters");
        let _ = writeln!(s, "  omega = {}", fmt_num(self.omega));
        let _ = writeln!(s, "  sigma_a2 = {}", fmt_num(self.moments.sigma_a2));
        let _ = writeln!(s, "  sigma_b2 = {}", fmt_num(self.moments.sigma_b2));
        let _ = writeln!(s, "  sigma_c2 = {}", fmt_num(self.moments.sigma_c2));
        let _ = writeln!(s, "  sigma2 = (sigma_a2 + sigma_b2)/2 = {}", fmt_num(self.sigma * self.sigma));
        let _ = writeln!(s, "  lambda = {} ({})", fmt_num(self.lambda), self.lambda_rule);
        let _ = writeln!(s, "  lambda_tilde = {} ({})", fmt_num(self.lambda_tilde), self.lambda_tilde_rule);
        let _ = writeln!(s, "  slope time = {}", fmt_num(self.slope_time));
        let _ = writeln!(s);
        let _ = writeln!(s, "purity deficit fits (1 - P = a t^k)");
        for (name, fit) in [("micro", &self.micro_fit), ("lindblad", &self.lindblad_fit), ("tdep", &self.tdep_fit)] {
            let _ = writeln!(
                s,
                "  {name}: k = {}, a = {}, r2 = {}, window = [{}, {}]",
                fmt_num(fit.exponent),
                fmt_num(fit.prefactor),
                fmt_num(fit.r_squared),
                fmt_num(fit.window.0),
                fmt_num(fit.window.1)
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "early concurrence slopes dC/dt");
        let _ = writeln!(s, "  micro = {}", fmt_num(self.micro_slope));
        let _ = writeln!(s, "  lindblad = {}", fmt_num(self.lindblad_slope));
        let _ = writeln!(s, "  tdep = {}", fmt_num(self.tdep_slope));
        let _ = writeln!(s);
        let _ = writeln!(s, "fidelity between engines (minimum over the trajectory grid)");
        let _ = writeln!(s, "  micro vs lindblad = {}", fmt_num(self.min_fidelity_lindblad));
        let _ = writeln!(s, "  micro vs tdep = {}", fmt_num(self.min_fidelity_tdep));
        let _ = writeln!(s);
        let _ = writeln!(s, "claims");
        for c in &self.claims {
            let _ = writeln!(
                s,
                "  [{}] {}: measured {}, expected {} {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.statement,
                fmt_num(c.measured),
                fmt_num(c.expected),
                c.tolerance
            );
        }
        for line in &self.checks {
            let _ = writeln!(s, "  {line}");
        }
        s
    }
}

struct Engines<'a> {
    micro: &'a MicroModel,
    omega: f64,
    lambda_tilde: f64,
    lindblad: LindbladModel,
    options: EvolveOptions,
}

struct Sampled {
    micro: Vec<DensityMatrix>,
    lindblad: Vec<DensityMatrix>,
    tdep: Vec<DensityMatrix>,
}

impl Engines<'_> {
    fn sample(&self, times: &[f64]) -> Result<Sampled> {
        Ok(Sampled {
            micro: times.iter().map(|&t| reduced_state(self.micro, t)).collect(),
            lindblad: evolve_trajectory_with(
                &self.lindblad,
                &DensityMatrix::plus_plus(),
                times,
                Propagator::Exponential,
                &self.options,
            )?,
            tdep: times.iter().map(|&t| dephasing_time_dependent(self.omega, self.lambda_tilde, t)).collect(),
        })
    }

    fn lindblad_concurrence(&self, t: f64) -> pairdyn::Result<f64> {
        let mut states =
            evolve_trajectory_with(&self.lindblad, &DensityMatrix::plus_plus(), &[t], Propagator::Exponential, &self.options)?;
        concurrence(&states.pop().expect("one time"))
    }
}

fn observe(rho: &DensityMatrix, t: f64, tol: f64) -> Result<(f64, f64)> {
    let report = rho.validate(tol);
    if !report.passed() {
        return Err(integrity(format!("state at t = {} is unphysical: {report}", fmt_num(t))));
    }
    let c = concurrence(rho).map_err(|e| integrity(format!("concurrence at t = {}: {e}", fmt_num(t))))?;
    Ok((c, purity(rho)))
}

fn table(provenance: Provenance, times: &[f64], s: &Sampled, tol: f64) -> Result<CsvTable> {
    let mut table = CsvTable::new(provenance, &COMPARE_COLUMNS);
    for (i, &t) in times.iter().enumerate() {
        let (mc, mp) = observe(&s.micro[i], t, tol)?;
        let (lc, lp) = observe(&s.lindblad[i], t, tol)?;
        let (tc, tp) = observe(&s.tdep[i], t, tol)?;
        let f = |a: &DensityMatrix, b: &DensityMatrix| {
            fidelity(a, b).map_err(|e| integrity(format!("fidelity at t = {}: {e}", fmt_num(t))))
        };
        let fl = f(&s.micro[i], &s.lindblad[i])?;
        let ft = f(&s.micro[i], &s.tdep[i])?;
        table.rows.push(vec![t, mc, mp, lc, lp, tc, tp, fl, ft]);
    }
    Ok(table)
}

fn deficit_fit(table: &CsvTable, column: &str) -> Result<PowerLawFit> {
    let t = table.column("t").expect("column present");
    let p = table.column(column).expect("column present");
    let samples: Vec<(f64, f64)> = t.into_iter().zip(p).map(|(t, p)| (t, 1.0 - p)).filter(|&(t, _)| t > 0.0).collect();
    fit_power_law(&samples).map_err(|e| CliError::Usage(format!("fitting {column}: {e}")))
}

fn oracle(label: &str, a: &[DensityMatrix], b: &[DensityMatrix], tol: f64) -> Result<String> {
    let diff = a.iter().zip(b).map(|(x, y)| x.matrix().max_abs_diff(y.matrix())).fold(0.0, f64::max);
    if diff > tol {
        return Err(integrity(format!("{label}: max entry difference {} exceeds {}", fmt_num(diff), fmt_num(tol))));
    }
    Ok(format!("self-check {label}: max entry difference {} ≤ {}", fmt_num(diff), fmt_num(tol)))
}

fn params(config: &ScenarioConfig) -> Result<&CompareParams> {
    match &config.physics {
        Physics::Compare(p) => Ok(p),
        _ => Err(CliError::Usage(format!(
            "the compare subcommand needs scenario compare, got {}",
            config.scenario.name()
        ))),
    }
}

/// Runs every engine on a shared grid and evaluates the comparison claims.
pub fn build_report(config: &ScenarioConfig, self_check: bool) -> Result<ComparisonReport> {
    let p = params(config)?;
    let micro = micro_random_model(p.omega, p.n_env, p.coupling_scale, config.seed)?;
    build_report_for_model(config, &micro, self_check)
}

pub fn build_report_for_model(config: &ScenarioConfig, micro: &MicroModel, self_check: bool) -> Result<ComparisonReport> {
    let p = params(config)?;
    let omega = p.omega;
    let moments = env_moments(micro);
    let sigma2 = moments.mean_variance();
    let sigma = sigma2.sqrt();
    let (lambda, lambda_rule) = match p.lambda {
        Some(l) => (l, "configured".to_string()),
        None => (sigma, "lambda = sigma".to_string()),
    };
    let (lambda_tilde, lambda_tilde_rule) = match p.lambda_tilde {
        Some(l) => (l, "configured".to_string()),
        None => (sigma2 / 2.0, "lambda_tilde = sigma^2/2".to_string()),
    };
    let scale = [omega.abs(), lambda, sigma, lambda_tilde.sqrt()].into_iter().fold(0.0, f64::max);
    let engines = Engines {
        micro,
        omega,
        lambda_tilde,
        lindblad: LindbladModel::dephasing(omega, lambda)?,
        options: EvolveOptions { tolerance: config.tolerance },
    };

    let linear_times = config.grid.clone().unwrap_or_else(|| default_trajectory_grid(scale)).times();
    let fit_times = default_fit_grid(scale).times();
    let linear = engines.sample(&linear_times)?;
    let logs = engines.sample(&fit_times)?;

    let mut provenance = Provenance::for_config(config);
    provenance.push("derived.sigma2", fmt_num(sigma2));
    provenance.push("derived.lambda", format!("{} ({lambda_rule})", fmt_num(lambda)));
    provenance.push("derived.lambda_tilde", format!("{} ({lambda_tilde_rule})", fmt_num(lambda_tilde)));
    let mut linear_prov = provenance.clone();
    linear_prov.push("grid", describe_times(&linear_times));
    let mut fit_prov = provenance;
    fit_prov.push("grid", format!("log {}", describe_times(&fit_times)));
    let trajectory = table(linear_prov, &linear_times, &linear, config.tolerance)?;
    let fit_table = table(fit_prov, &fit_times, &logs, config.tolerance)?;

    let micro_fit = deficit_fit(&fit_table, "micro_purity")?;
    let lindblad_fit = deficit_fit(&fit_table, "lindblad_purity")?;
    let tdep_fit = deficit_fit(&fit_table, "tdep_purity")?;

    let t0 = SLOPE_TIME / scale;
    let micro_slope = concurrence(&reduced_state(micro, t0))? / t0;
    let tdep_slope = concurrence(&dephasing_time_dependent(omega, lambda_tilde, t0))? / t0;
    let lindblad_slope = central_difference_slope(t0, |t| engines.lindblad_concurrence(t))?;
    let expected_rate = lindblad_concurrence_rate(omega, lambda).max(0.0);

    let min_col = |name: &str| trajectory.column(name).expect("column present").into_iter().fold(1.0, f64::min);
    let claims = vec![
        Claim::absolute("micro purity deficit exponent", micro_fit.exponent, 2.0, EXPONENT_TOL),
        Claim::relative("micro purity deficit prefactor equals sigma^2", micro_fit.prefactor, sigma2, PREFACTOR_REL_TOL),
        Claim::absolute("lindblad purity deficit exponent", lindblad_fit.exponent, 1.0, EXPONENT_TOL),
        Claim::relative("lindblad purity deficit prefactor equals 4 lambda", lindblad_fit.prefactor, 4.0 * lambda, PREFACTOR_REL_TOL),
        Claim::absolute("tdep purity deficit exponent", tdep_fit.exponent, 2.0, EXPONENT_TOL),
        Claim::relative("micro concurrence slope equals 2|omega|", micro_slope, 2.0 * omega.abs(), SLOPE_REL_TOL),
        Claim::relative("lindblad concurrence slope equals the rate formula", lindblad_slope, expected_rate, SLOPE_REL_TOL),
        Claim::relative("tdep concurrence slope equals 2|omega|", tdep_slope, 2.0 * omega.abs(), SLOPE_REL_TOL),
    ];

    let mut checks = Vec::new();
    if self_check {
        if micro.env_dim() > MAX_ENV_DIM {
            return Err(CliError::Usage(format!("self-check cannot enumerate environment dimension {}", micro.env_dim())));
        }
        let brute = fit_times.iter().map(|&t| brute_force_reduced_state(micro, t)).collect::<pairdyn::Result<Vec<_>>>()?;
        checks.push(oracle("micro closed form vs full-space evolution", &logs.micro, &brute, MICRO_ORACLE_TOL)?);
        let exact: Vec<DensityMatrix> = linear_times.iter().map(|&t| dephasing_closed_form(omega, lambda, t)).collect();
        checks.push(oracle("lindblad exponential vs closed form", &linear.lindblad, &exact, LINDBLAD_ORACLE_TOL)?);
        let stepped = evolve_trajectory_with(
            &LindbladModel::dephasing_linear(omega, lambda_tilde)?,
            &DensityMatrix::plus_plus(),
            &linear_times,
            Propagator::Stepped,
            &engines.options,
        )?;
        checks.push(oracle("tdep closed form vs stepped", &linear.tdep, &stepped, TDEP_ORACLE_TOL)?);
    }

    Ok(ComparisonReport {
        omega,
        moments,
        sigma,
        lambda,
        lambda_rule,
        lambda_tilde,
        lambda_tilde_rule,
        micro_fit,
        lindblad_fit,
        tdep_fit,
        micro_slope,
        lindblad_slope,
        tdep_slope,
        slope_time: t0,
        min_fidelity_lindblad: min_col("fidelity_micro_lindblad"),
        min_fidelity_tdep: min_col("fidelity_micro_tdep"),
        claims,
        checks,
        trajectory,
        fit_table,
    })
}

/// `compare`: side-by-side CSVs, text report and optional plots.
pub fn run_compare(config: &ScenarioConfig, ctx: &RunContext) -> Result<RunOutcome> {
    let report = build_report(config, ctx.self_check)?;
    let stem = config.stem();
    let mut outcome = RunOutcome::default();

    let csv = ctx.path(&format!("{stem}.csv"));
    report.trajectory.write(&csv)?;
    let fit_csv = ctx.path(&format!("{stem}_fit.csv"));
    report.fit_table.write(&fit_csv)?;
    let text = ctx.path(&format!("{stem}_report.txt"));
    let mut provenance = Provenance::for_config(config);
    provenance.push("trajectory_grid", describe_times(&report.trajectory.column("t").unwrap_or_default()));
    write_text(&text, &report.render(&provenance))?;
    outcome.files.extend([csv, fit_csv, text]);
    if config.output.svg {
        let svg = ctx.path(&format!("{stem}.svg"));
        write_plot(&report.trajectory, &svg, false)?;
        let fit_svg = ctx.path(&format!("{stem}_fit.svg"));
        write_plot(&report.fit_table, &fit_svg, true)?;
        outcome.files.extend([svg, fit_svg]);
    }
    for c in &report.claims {
        outcome.summary.push(format!(
            "[{}] {}: {} (expected {} {})",
            if c.pass { "PASS" } else { "FAIL" },
            c.statement,
            fmt_num(c.measured),
            fmt_num(c.expected),
            c.tolerance
        ));
    }
    outcome.summary.extend(report.checks.iter().cloned());
    Ok(outcome)
}
