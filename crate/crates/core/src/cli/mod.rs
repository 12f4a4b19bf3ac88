//! Command-line front end: configuration, experiment dispatch and table output.

pub mod config;
pub mod emit;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::benchmarks::{
    barenblatt_grid_from, biot_grid, four_network_grid_from, run_barenblatt, run_biot_table, run_four_network,
    run_spectra, spectra_grid_from, BenchmarkResult,
};
use crate::error::{Error, Result};

pub use config::{parse_grid, resolve_config, Experiment, FileConfig, GridSpec, Grids, MeshSpec, OutputFormat, RunConfig};
pub use emit::{build_table, emit_table, fmt_factor, fmt_sci, fmt_value, render, BiotColumn, ExperimentResults, Table};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MPET_THREADS";

#[derive(Debug, Parser)]
#[command(name = "mpet", version, about = "Mass-conservative MPET solver and benchmark tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Error table of the manufactured Biot problem (tables 1-3).
    BiotErrors {
        /// Table number 1, 2 or 3.
        #[arg(long)]
        table: Option<u8>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// MinRes iterations and factors for the Biot problem.
    BiotMinres {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// MinRes iterations and factors for the two-network cantilever.
    Barenblatt {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// MinRes iterations and factors for the four-network cantilever.
    FourNetwork {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Condition numbers of the preconditioned operator.
    Spectra {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Observed error reduction per mesh halving for a Biot error table.
    Converge {
        /// Table number 1, 2 or 3.
        #[arg(long)]
        table: Option<u8>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs the experiment named by `experiment` in the config file.
    Run {
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Flags shared by every subcommand; each overrides the config file key of
/// the same name.
#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// TOML config file.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Subdivision counts, e.g. `8,16,32`.
    #[arg(long)]
    pub meshes: Option<String>,
    /// Largest accepted subdivision count.
    #[arg(long)]
    pub max_mesh: Option<usize>,
    /// Interior penalty parameter.
    #[arg(long)]
    pub penalty: Option<f64>,
    /// Residual reduction at which iterations are counted.
    #[arg(long)]
    pub reduction_tol: Option<f64>,
    /// Residual reduction the returned solution is polished to (default `1e-13`).
    #[arg(long)]
    pub polish_tol: Option<f64>,
    /// MinRes iteration limit per solve.
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Correction solves on the true residual after MinRes.
    #[arg(long)]
    pub refinement_sweeps: Option<usize>,
    /// Time step used to rescale the cantilever parameters.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Table format.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<String>,
    /// Recorded with the run; every sweep is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
    /// R⁻¹ values, comma separated, e.g. `1E0,1E4`.
    #[arg(long)]
    pub r_inv: Option<String>,
    /// λ values.
    #[arg(long)]
    pub lambda: Option<String>,
    /// α_p values.
    #[arg(long)]
    pub alpha_p: Option<String>,
    /// Barenblatt transfer coefficients β.
    #[arg(long)]
    pub beta: Option<String>,
    /// Barenblatt K₁ multipliers.
    #[arg(long)]
    pub k1_scale: Option<String>,
    /// Barenblatt K₂ multipliers.
    #[arg(long)]
    pub k2_scale: Option<String>,
    /// Four-network λ multipliers.
    #[arg(long)]
    pub lambda_scale: Option<String>,
    /// Four-network multipliers of K₁, K₂, K₄.
    #[arg(long)]
    pub k_scale: Option<String>,
    /// Four-network K₃ multipliers.
    #[arg(long)]
    pub k3_scale: Option<String>,
    /// Network counts of the spectra sweep.
    #[arg(long, value_delimiter = ',')]
    pub networks: Option<Vec<usize>>,
}

impl CommonArgs {
    fn as_overrides(&self, table: Option<u8>) -> FileConfig {
        let grid = |s: &Option<String>| s.clone().map(GridSpec::Text);
        FileConfig {
            experiment: None,
            table,
            meshes: self.meshes.clone().map(MeshSpec::Text),
            max_mesh: self.max_mesh,
            penalty: self.penalty,
            reduction_tol: self.reduction_tol,
            polish_tol: self.polish_tol,
            max_iters: self.max_iters,
            refinement_sweeps: self.refinement_sweeps,
            tau: self.tau,
            format: self.format,
            output: self.output.clone(),
            seed: self.seed,
            r_inv: grid(&self.r_inv),
            lambda: grid(&self.lambda),
            alpha_p: grid(&self.alpha_p),
            beta: grid(&self.beta),
            k1_scale: grid(&self.k1_scale),
            k2_scale: grid(&self.k2_scale),
            lambda_scale: grid(&self.lambda_scale),
            k_scale: grid(&self.k_scale),
            k3_scale: grid(&self.k3_scale),
            networks: self.networks.clone(),
        }
    }
}

impl Command {
    /// Reads the config file, applies flag overrides and validates.
    pub fn run_config(&self) -> Result<RunConfig> {
        let (experiment, table, common) = match self {
            Command::BiotErrors { table, common } => (Some(Experiment::BiotErrors), *table, common),
            Command::BiotMinres { common } => (Some(Experiment::BiotMinres), None, common),
            Command::Barenblatt { common } => (Some(Experiment::Barenblatt), None, common),
            Command::FourNetwork { common } => (Some(Experiment::FourNetwork), None, common),
            Command::Spectra { common } => (Some(Experiment::Spectra), None, common),
            Command::Converge { table, common } => (Some(Experiment::Converge), *table, common),
            Command::Run { common } => (None, None, common),
        };
        let file = match &common.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                FileConfig::from_toml(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let merged = file.merged(common.as_overrides(table));
        let experiment = experiment
            .or(merged.experiment)
            .ok_or_else(|| Error::Config("field `experiment`: required by `run`".into()))?;
        resolve_config(experiment, &merged)
    }
}

/// Results of one run plus solver bookkeeping.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub results: ExperimentResults,
    pub solves: usize,
    pub unconverged: usize,
    /// Largest relative cellwise mass-balance residual over all solves.
    pub max_mass_residual: f64,
}

impl Outcome {
    fn from_solves(results: &[BenchmarkResult], wrap: impl FnOnce(Vec<BenchmarkResult>) -> ExperimentResults) -> Self {
        Outcome {
            solves: results.len(),
            unconverged: results.iter().filter(|r| !r.converged).count(),
            max_mass_residual: results.iter().map(|r| r.mass.relative()).fold(0.0, f64::max),
            results: wrap(results.to_vec()),
        }
    }

    pub fn all_converged(&self) -> bool {
        self.unconverged == 0
    }
}

/// Runs the experiment described by `rc`.
pub fn execute(rc: &RunConfig) -> Result<Outcome> {
    let (n, pen, s) = (&rc.meshes, rc.penalty, &rc.solver);
    Ok(match (&rc.grids, rc.experiment) {
        (Grids::Biot { alpha_p, lambda, r_inv }, e) => {
            let res = run_biot_table(n, &biot_grid(alpha_p, lambda, r_inv), pen, s)?;
            let column = BiotColumn::for_table(rc.table);
            match e {
                Experiment::BiotErrors => Outcome::from_solves(&res, |results| ExperimentResults::Errors { column, results }),
                Experiment::Converge => Outcome::from_solves(&res, ExperimentResults::Converge),
                _ => Outcome::from_solves(&res, ExperimentResults::BiotMinres),
            }
        }
        (Grids::Barenblatt { beta, k2_scale, k1_scale }, _) => {
            let g = barenblatt_grid_from(beta, k2_scale, k1_scale);
            Outcome::from_solves(&run_barenblatt(n, &g, rc.tau, pen, s)?, ExperimentResults::Barenblatt)
        }
        (Grids::FourNetwork { lambda_scale, k_scale, k3_scale }, _) => {
            let g = four_network_grid_from(lambda_scale, k_scale, k3_scale);
            Outcome::from_solves(&run_four_network(n, &g, rc.tau, pen, s)?, ExperimentResults::FourNetwork)
        }
        (Grids::Spectra { networks, lambda, r_inv, alpha_p }, _) => {
            let g = spectra_grid_from(n, networks, lambda, r_inv, alpha_p);
            Outcome {
                results: ExperimentResults::Spectra(run_spectra(&g, pen)?),
                solves: 0,
                unconverged: 0,
                max_mass_residual: 0.0,
            }
        }
    })
}

/// Sizes the global thread pool from [`THREADS_ENV`] and keeps the sparse
/// factorizations sequential, since sweeps already run one job per thread.
pub fn init_threads() -> Result<()> {
    faer::set_global_parallelism(faer::Par::Seq);
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV}: expected a positive integer, got \"{value}\"")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("{THREADS_ENV}: {e}")))
}

/// Exit status: 0 on success, 1 if any solve did not converge, 2 on errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_cli(&cli) {
        Ok(outcome) if outcome.all_converged() => 0,
        Ok(outcome) => {
            eprintln!("{} of {} solves did not converge", outcome.unconverged, outcome.solves);
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run_cli(cli: &Cli) -> Result<Outcome> {
    let rc = cli.command.run_config()?;
    init_threads()?;
    let outcome = execute(&rc)?;
    let text = emit_table(&outcome.results, rc.format);
    match &rc.output {
        Some(path) => std::fs::write(path, &text)?,
        None => print!("{text}"),
    }
    if outcome.solves > 0 {
        eprintln!(
            "{} solves, {} not converged, max relative mass residual {:.2E}",
            outcome.solves, outcome.unconverged, outcome.max_mass_residual
        );
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig> {
        Cli::try_parse_from(std::iter::once("mpet").chain(args.iter().copied()))
            .map_err(|e| Error::Config(e.to_string()))?
            .command
            .run_config()
    }

    #[test]
    fn subcommand_defaults() {
        let rc = parse(&["barenblatt"]).unwrap();
        assert_eq!(rc.meshes, vec![16, 64]);
        assert_eq!(rc.tau, 1.0);
        let rc = parse(&["four-network"]).unwrap();
        assert_eq!(rc.meshes, vec![32, 64]);
        let rc = parse(&["spectra"]).unwrap();
        assert_eq!(rc.meshes, vec![2, 4]);
        let rc = parse(&["biot-errors", "--table", "3"]).unwrap();
        assert_eq!(rc.grids, Grids::Biot {
            alpha_p: vec![1.0, 1e-4, 1e-8, 0.0],
            lambda: vec![1.0],
            r_inv: vec![1e4]
        });
    }

    #[test]
    fn flag_errors_name_the_flag() {
        let err = parse(&["biot-minres", "--r-inv", "1E0,,1E4"]).unwrap_err().to_string();
        assert!(err.contains("r_inv"), "{err}");
        assert!(parse(&["run"]).unwrap_err().to_string().contains("experiment"));
    }

    #[test]
    fn reduction_tolerance_reaches_the_solver() {
        let loose = parse(&["biot-minres", "--meshes", "4", "--r-inv", "1E2", "--alpha-p", "1", "--lambda", "1", "--reduction-tol", "1e-6"]).unwrap();
        let tight = parse(&["biot-minres", "--meshes", "4", "--r-inv", "1E2", "--alpha-p", "1", "--lambda", "1"]).unwrap();
        let it = |rc: &RunConfig| match execute(rc).unwrap().results {
            ExperimentResults::BiotMinres(r) => r[0].iterations,
            _ => unreachable!(),
        };
        assert!(it(&loose) < it(&tight));
    }
}
