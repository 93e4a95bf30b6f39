//! Command-line surface.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::compare::run_compare;
use crate::config::{Overrides, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::output::{write_text, CsvTable};
use crate::plot::{render_svg, PlotOptions};
use crate::scenario::{run_scenario, RunContext, RunOutcome};
use crate::sweep::run_sweep;
use crate::threshold::run_threshold;

#[derive(Debug, Parser)]
#[command(name = "pairdyn", version, about = "Two-qubit entanglement under microscopic and Lindblad environments")]
pub struct Cli {
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for every file written.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Cross-validate engines against their oracles; mismatches exit with 3.
    #[arg(long, global = true)]
    pub self_check: bool,

    /// Positivity/integrity tolerance for emitted states (default 1e-9).
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a trajectory scenario and write `<name>.csv` (and `<name>.svg`).
    Simulate { config: PathBuf },
    /// Microscopic model vs calibrated Lindblad models.
    Compare { config: PathBuf },
    /// Evaluate the `sweep` grid of a config into `<name>_sweep.csv`.
    Sweep {
        config: PathBuf,
        /// Keep rows already present in an earlier output of the same config.
        #[arg(long)]
        resume: bool,
    },
    /// Locate the dephasing threshold for entanglement generation.
    ScanThreshold { config: PathBuf },
    /// Render a trajectory or comparison CSV as SVG.
    Plot {
        trajectory: PathBuf,
        /// Concurrence and purity deficit on log-log axes.
        #[arg(long)]
        log_log: bool,
        /// Output file; defaults to `<out-dir>/<csv stem>.svg`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

impl Cli {
    fn load(&self, path: &std::path::Path) -> Result<ScenarioConfig> {
        ScenarioConfig::load(path, Overrides { seed: self.seed, tolerance: self.tolerance })
    }

    fn context(&self) -> RunContext {
        RunContext { out_dir: self.out_dir.clone(), self_check: self.self_check }
    }
}

pub fn run(cli: &Cli) -> Result<RunOutcome> {
    if let Some(tol) = cli.tolerance {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::Usage(format!("--tolerance must be positive, got {tol}")));
        }
    }
    let ctx = cli.context();
    match &cli.command {
        Command::Simulate { config } => run_scenario(&cli.load(config)?, &ctx),
        Command::Compare { config } => run_compare(&cli.load(config)?, &ctx),
        Command::Sweep { config, resume } => run_sweep(&cli.load(config)?, &ctx, *resume),
        Command::ScanThreshold { config } => run_threshold(&cli.load(config)?, &ctx),
        Command::Plot { trajectory, log_log, output } => {
            let table = CsvTable::read(trajectory)?;
            let svg = render_svg(&table, &PlotOptions { log_log: *log_log, ..PlotOptions::default() })?;
            let path = output.clone().unwrap_or_else(|| {
                let stem = trajectory.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "plot".into());
                ctx.path(&format!("{stem}.svg"))
            });
            write_text(&path, &svg)?;
            Ok(RunOutcome { files: vec![path], summary: vec![format!("{} rows plotted", table.rows.len())] })
        }
    }
}
