//! Run configuration: a flat TOML file, overridden by command-line flags.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::solver::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    BiotErrors,
    BiotMinres,
    Barenblatt,
    FourNetwork,
    Spectra,
    Converge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

/// A parameter grid as written in a config file: an array, a comma-separated
/// string such as `"1E0,1E2"`, or a log-spaced range `{ from, to, points }`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Text(String),
    LogRange { from: f64, to: f64, points: usize },
}

impl GridSpec {
    pub fn resolve(&self, field: &str) -> Result<Vec<f64>> {
        let values = match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Text(t) => parse_grid(field, t)?,
            GridSpec::LogRange { from, to, points } => {
                if !(*from > 0.0 && *to > 0.0) || *points == 0 {
                    return Err(field_error(field, "log range needs positive bounds and points >= 1"));
                }
                if *points == 1 {
                    vec![*from]
                } else {
                    let (a, b) = (from.log10(), to.log10());
                    (0..*points)
                        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (*points - 1) as f64))
                        .collect()
                }
            }
        };
        if values.is_empty() {
            return Err(field_error(field, "grid is empty"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(field_error(field, &format!("invalid grid value {v}")));
        }
        Ok(values)
    }
}

fn field_error(field: &str, msg: &str) -> Error {
    Error::Config(format!("field `{field}`: {msg}"))
}

/// Parses `"1E0,1E2, 1E4"`; empty entries are rejected.
pub fn parse_grid(field: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            if item.is_empty() {
                return Err(field_error(field, &format!("empty entry in \"{text}\"")));
            }
            item.parse::<f64>()
                .map_err(|_| field_error(field, &format!("cannot parse \"{item}\" as a number")))
        })
        .collect()
}

fn parse_meshes(field: &str, text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            if item.is_empty() {
                return Err(field_error(field, &format!("empty entry in \"{text}\"")));
            }
            item.parse::<usize>()
                .map_err(|_| field_error(field, &format!("cannot parse \"{item}\" as a subdivision count")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum MeshSpec {
    List(Vec<usize>),
    Text(String),
}

/// Contents of a config file; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<Experiment>,
    pub table: Option<u8>,
    /// Subdivision counts `N` (`h = 1/N`).
    pub meshes: Option<MeshSpec>,
    pub max_mesh: Option<usize>,
    pub penalty: Option<f64>,
    pub reduction_tol: Option<f64>,
    pub polish_tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub refinement_sweeps: Option<usize>,
    pub tau: Option<f64>,
    pub format: Option<OutputFormat>,
    pub output: Option<String>,
    pub seed: Option<u64>,
    pub r_inv: Option<GridSpec>,
    pub lambda: Option<GridSpec>,
    pub alpha_p: Option<GridSpec>,
    pub beta: Option<GridSpec>,
    pub k1_scale: Option<GridSpec>,
    pub k2_scale: Option<GridSpec>,
    pub lambda_scale: Option<GridSpec>,
    pub k_scale: Option<GridSpec>,
    pub k3_scale: Option<GridSpec>,
    pub networks: Option<Vec<usize>>,
}

impl FileConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// `other` wins wherever it has a value.
    pub fn merged(self, other: FileConfig) -> FileConfig {
        macro_rules! pick {
            ($($f:ident),*) => { FileConfig { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            experiment, table, meshes, max_mesh, penalty, reduction_tol, polish_tol, max_iters,
            refinement_sweeps, tau, format, output, seed, r_inv, lambda, alpha_p, beta, k1_scale,
            k2_scale, lambda_scale, k_scale, k3_scale, networks
        )
    }
}

/// Validated settings of one run with all defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    /// Biot table number (1–3) for `biot-errors` and `converge`.
    pub table: u8,
    pub meshes: Vec<usize>,
    pub penalty: f64,
    pub solver: SolverConfig,
    pub tau: f64,
    pub format: OutputFormat,
    pub output: Option<String>,
    /// Recorded for reproducibility; the current experiments are deterministic.
    pub seed: u64,
    pub grids: Grids,
}

/// Parameter grids of the selected experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Grids {
    /// `(α_p, λ, R⁻¹)` product.
    Biot { alpha_p: Vec<f64>, lambda: Vec<f64>, r_inv: Vec<f64> },
    Barenblatt { beta: Vec<f64>, k2_scale: Vec<f64>, k1_scale: Vec<f64> },
    FourNetwork { lambda_scale: Vec<f64>, k_scale: Vec<f64>, k3_scale: Vec<f64> },
    Spectra { networks: Vec<usize>, lambda: Vec<f64>, r_inv: Vec<f64>, alpha_p: Vec<f64> },
}

pub const DEFAULT_PENALTY: f64 = 10.0;
pub const DEFAULT_MAX_MESH: usize = 256;

fn default_meshes(e: Experiment) -> Vec<usize> {
    match e {
        Experiment::BiotErrors | Experiment::Converge => vec![8, 16, 32, 64],
        Experiment::BiotMinres | Experiment::Barenblatt => vec![16, 64],
        Experiment::FourNetwork => vec![32, 64],
        Experiment::Spectra => vec![2, 4],
    }
}

/// `(α_p, λ, R⁻¹)` defaults of Biot tables 1–4.
fn biot_table_defaults(table: u8) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    use crate::benchmarks::{ALPHA_P_COLUMNS, LAMBDA_COLUMNS, R_INV_COLUMNS};
    match table {
        1 => (vec![1e-4], vec![1e4], R_INV_COLUMNS.to_vec()),
        2 => (vec![0.0], LAMBDA_COLUMNS.to_vec(), vec![1e8]),
        3 => (ALPHA_P_COLUMNS.to_vec(), vec![1.0], vec![1e4]),
        _ => (ALPHA_P_COLUMNS.to_vec(), LAMBDA_COLUMNS.to_vec(), R_INV_COLUMNS.to_vec()),
    }
}

fn grid_or(spec: &Option<GridSpec>, field: &str, default: Vec<f64>) -> Result<Vec<f64>> {
    match spec {
        Some(s) => s.resolve(field),
        None => Ok(default),
    }
}

/// Validates a merged config for `experiment` and fills in defaults.
pub fn resolve_config(experiment: Experiment, fc: &FileConfig) -> Result<RunConfig> {
    use crate::benchmarks::*;
    let table = match (experiment, fc.table) {
        (Experiment::BiotErrors | Experiment::Converge, Some(t)) if (1..=3).contains(&t) => t,
        (Experiment::BiotErrors | Experiment::Converge, Some(t)) => {
            return Err(field_error("table", &format!("expected 1, 2 or 3, got {t}")))
        }
        (Experiment::BiotErrors | Experiment::Converge, None) => 1,
        (Experiment::BiotMinres, _) => 4,
        _ => 0,
    };
    let meshes = match &fc.meshes {
        Some(MeshSpec::List(v)) => v.clone(),
        Some(MeshSpec::Text(t)) => parse_meshes("meshes", t)?,
        None => default_meshes(experiment),
    };
    let cap = fc.max_mesh.unwrap_or(DEFAULT_MAX_MESH);
    if meshes.is_empty() {
        return Err(field_error("meshes", "no mesh sizes given"));
    }
    if let Some(n) = meshes.iter().find(|n| !n.is_power_of_two() || **n > cap) {
        return Err(field_error(
            "meshes",
            &format!("{n} is not a power of two up to the cap {cap}"),
        ));
    }
    let penalty = fc.penalty.unwrap_or(DEFAULT_PENALTY);
    if !(penalty > 0.0) {
        return Err(field_error("penalty", "must be positive"));
    }
    let tau = fc.tau.unwrap_or(1.0);
    if !(tau > 0.0) {
        return Err(field_error("tau", "must be positive"));
    }
    let defaults = SolverConfig::default();
    // error tables polish past the counting tolerance so that errors and the
    // mass balance are measured on an accurate iterate
    let polish = fc.polish_tol.or(match experiment {
        Experiment::Spectra => None,
        _ => benchmark_solver_config().polish_tol,
    });
    let solver = SolverConfig {
        reduction_tol: fc.reduction_tol.unwrap_or(defaults.reduction_tol),
        max_iters: fc.max_iters.unwrap_or(defaults.max_iters),
        polish_tol: polish,
        refinement_sweeps: fc.refinement_sweeps.unwrap_or(0),
        ..defaults
    };
    solver
        .validate()
        .map_err(|e| Error::Config(format!("solver settings: {e}")))?;

    let grids = match experiment {
        Experiment::BiotErrors | Experiment::BiotMinres | Experiment::Converge => {
            let (a, l, r) = biot_table_defaults(table);
            Grids::Biot {
                alpha_p: grid_or(&fc.alpha_p, "alpha_p", a)?,
                lambda: grid_or(&fc.lambda, "lambda", l)?,
                r_inv: grid_or(&fc.r_inv, "r_inv", r)?,
            }
        }
        Experiment::Barenblatt => Grids::Barenblatt {
            beta: grid_or(&fc.beta, "beta", BARENBLATT_BETAS.to_vec())?,
            k2_scale: grid_or(&fc.k2_scale, "k2_scale", BARENBLATT_K2_SCALES.to_vec())?,
            k1_scale: grid_or(&fc.k1_scale, "k1_scale", BARENBLATT_K1_SCALES.to_vec())?,
        },
        Experiment::FourNetwork => Grids::FourNetwork {
            lambda_scale: grid_or(&fc.lambda_scale, "lambda_scale", FOUR_NETWORK_LAMBDA_SCALES.to_vec())?,
            k_scale: grid_or(&fc.k_scale, "k_scale", FOUR_NETWORK_K_SCALES.to_vec())?,
            k3_scale: grid_or(&fc.k3_scale, "k3_scale", FOUR_NETWORK_K3_SCALES.to_vec())?,
        },
        Experiment::Spectra => {
            let networks = fc.networks.clone().unwrap_or_else(|| vec![1, 2]);
            if networks.is_empty() || networks.contains(&0) {
                return Err(field_error("networks", "need at least one positive network count"));
            }
            Grids::Spectra {
                networks,
                lambda: grid_or(&fc.lambda, "lambda", SPECTRA_VALUES.to_vec())?,
                r_inv: grid_or(&fc.r_inv, "r_inv", SPECTRA_VALUES.to_vec())?,
                alpha_p: grid_or(&fc.alpha_p, "alpha_p", SPECTRA_VALUES.to_vec())?,
            }
        }
    };
    Ok(RunConfig {
        experiment,
        table,
        meshes,
        penalty,
        solver,
        tau,
        format: fc.format.unwrap_or_default(),
        output: fc.output.clone(),
        seed: fc.seed.unwrap_or(0),
        grids,
    })
}
