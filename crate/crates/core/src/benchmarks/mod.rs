//! The three experiment families: the manufactured Biot problem (error and
//! MinRes tables), the Barenblatt cantilever and the four-network problem.

mod manufactured;
mod norms;

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

pub use manufactured::{evaluate_manufactured, ExactFields, ManufacturedBiot};
pub use norms::{
    check_mass_conservation, compute_error_norms, norm_edges, ErrorNorms, ExactSolution, HessianFn,
    MassResidual, TensorFn,
};

use crate::assembly::{
    assemble_full_operator, assemble_preconditioner_blocks, assemble_rhs, constant_scalar, constant_vector,
    AssemblyConfig, Block, BlockSystem, BoundaryConditions, DisplacementBc, Discretization, NetworkBc,
    ProblemData,
};
use crate::error::Result;
use crate::mesh::Segment;
use crate::params::{build_lambda_matrices, rescale_parameters, LambdaMatrices, ModelParameters, RescaledParameters};
use crate::solver::{condition_diagnostic, factor_preconditioner, minres_solve, SolveReport, SolverConfig};

/// Quadrature degree for errors and exact traces.
pub const ERROR_QUAD_DEGREE: usize = 10;

/// Column values of the Biot tables.
pub const R_INV_COLUMNS: [f64; 6] = [1.0, 1e2, 1e3, 1e4, 1e8, 1e16];
pub const LAMBDA_COLUMNS: [f64; 3] = [1.0, 1e4, 1e8];
pub const ALPHA_P_COLUMNS: [f64; 4] = [1.0, 1e-4, 1e-8, 0.0];

/// A fully specified static problem.
#[derive(Clone)]
pub struct Problem {
    pub rp: RescaledParameters,
    pub bcs: BoundaryConditions,
    pub data: ProblemData,
    pub exact: Option<ExactSolution>,
}

pub fn biot_problem(m: &ManufacturedBiot) -> Result<Problem> {
    let (a, b, c, d, e, k) = (*m, *m, *m, *m, *m, *m);
    Ok(Problem {
        rp: m.rescaled()?,
        bcs: ManufacturedBiot::boundary_conditions(),
        data: m.problem_data(),
        exact: Some(ExactSolution {
            u: Arc::new(move |x| a.evaluate(x).u),
            grad_u: Arc::new(move |x| b.evaluate(x).grad_u),
            hess_u: Arc::new(move |x| k.evaluate(x).hess_u),
            v: vec![Arc::new(move |x| c.evaluate(x).v)],
            div_v: vec![Arc::new(move |x| d.evaluate(x).div_v)],
            p: vec![Arc::new(move |x| e.evaluate(x).p)],
        }),
    })
}

/// `u = 0` on the left side, traction `(0, −1)` on top, traction-free
/// bottom and right, constant pressures on the whole boundary.
pub fn cantilever_bcs(pressures: &[f64]) -> BoundaryConditions {
    BoundaryConditions {
        displacement: DisplacementBc {
            dirichlet: vec![(Segment::Left, constant_vector([0.0, 0.0]))],
            traction: vec![
                (Segment::Bottom, constant_vector([0.0, 0.0])),
                (Segment::Right, constant_vector([0.0, 0.0])),
                (Segment::Top, constant_vector([0.0, -1.0])),
            ],
        },
        networks: pressures
            .iter()
            .map(|&p| NetworkBc {
                flux: Vec::new(),
                pressure: Segment::ALL.iter().map(|&s| (s, constant_scalar(p))).collect(),
            })
            .collect(),
    }
}

/// Sweep point of the Barenblatt study: multipliers of the base permeabilities
/// and the transfer coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarenblattPoint {
    pub k1_scale: f64,
    pub k2_scale: f64,
    pub beta: f64,
}

/// Physical parameters of one Barenblatt sweep point with time step `tau`.
pub fn barenblatt_parameters(pt: &BarenblattPoint, tau: f64) -> ModelParameters {
    ModelParameters {
        n: 2,
        lambda: 4.2e6,
        mu: 2.4e6,
        alpha: vec![0.95, 0.12],
        c_p: vec![54e-9, 14e-9],
        beta: DMatrix::from_row_slice(2, 2, &[0.0, pt.beta, pt.beta, 0.0]),
        k: vec![6.18e-15 * pt.k1_scale, 27.2e-15 * pt.k2_scale],
        tau,
    }
}

pub fn barenblatt_problem(pt: &BarenblattPoint, tau: f64) -> Result<Problem> {
    Ok(Problem {
        rp: rescale_parameters(&barenblatt_parameters(pt, tau))?,
        bcs: cantilever_bcs(&[2.0, 20.0]),
        data: ProblemData::zero(2),
        exact: None,
    })
}

pub const BARENBLATT_K1_SCALES: [f64; 3] = [1e-2, 1e-1, 1.0];
pub const BARENBLATT_K2_SCALES: [f64; 4] = [1.0, 1e2, 1e4, 1e6];
pub const BARENBLATT_BETAS: [f64; 2] = [5e-10, 1e-8];

/// Sweep point of the four-network study: multipliers of λ, of the common
/// permeability of networks 1, 2, 4, and of K₃.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourNetworkPoint {
    pub lambda_scale: f64,
    pub k_scale: f64,
    pub k3_scale: f64,
}

/// Physical parameters of one four-network sweep point with time step `tau`.
pub fn four_network_parameters(pt: &FourNetworkPoint, tau: f64) -> ModelParameters {
    let k = 1e-10 / 2.67e-3 * pt.k_scale;
    let k3 = 1.4e-14 / 8.9e-4 * pt.k3_scale;
    let mut beta = DMatrix::zeros(4, 4);
    for (i, j, b) in [(0, 1, 1.5e-19), (1, 3, 1.5e-19), (1, 2, 2e-19), (2, 3, 1e-13)] {
        beta[(i, j)] = b;
        beta[(j, i)] = b;
    }
    ModelParameters {
        n: 4,
        lambda: 505.0 * pt.lambda_scale,
        mu: 216.0,
        alpha: vec![0.99; 4],
        c_p: vec![4.5e-10; 4],
        beta,
        k: vec![k, k, k3, k],
        tau,
    }
}

pub fn four_network_problem(pt: &FourNetworkPoint, tau: f64) -> Result<Problem> {
    Ok(Problem {
        rp: rescale_parameters(&four_network_parameters(pt, tau))?,
        bcs: cantilever_bcs(&[2.0, 20.0, 30.0, 40.0]),
        data: ProblemData::zero(4),
        exact: None,
    })
}

pub const FOUR_NETWORK_LAMBDA_SCALES: [f64; 3] = [1.0, 1e4, 1e8];
pub const FOUR_NETWORK_K_SCALES: [f64; 3] = [1e-2, 1.0, 1e2];
pub const FOUR_NETWORK_K3_SCALES: [f64; 6] = [1e-2, 1.0, 1e2, 1e4, 1e6, 1e10];

/// Everything produced by one assembled and solved problem.
pub struct StaticSolution {
    pub disc: Discretization,
    pub cfg: AssemblyConfig,
    pub lm: LambdaMatrices,
    pub sys: BlockSystem,
    /// Full-space solution including constrained values.
    pub full: Vec<f64>,
    pub report: SolveReport,
}

pub fn solve_static(problem: &Problem, n_subdiv: usize, penalty: f64, scfg: &SolverConfig) -> Result<StaticSolution> {
    scfg.validate()?;
    let disc = Discretization::new(n_subdiv)?;
    let mut cfg = AssemblyConfig::new(problem.bcs.clone());
    cfg.penalty = penalty;
    let lm = build_lambda_matrices(&problem.rp)?;
    let mut sys = assemble_full_operator(&disc, &problem.rp, &lm, &cfg)?;
    let rhs = assemble_rhs(&disc, &problem.data, &cfg, problem.rp.n)?;
    sys.load(&rhs);
    let pb = assemble_preconditioner_blocks(&sys, &problem.rp, &lm);
    let (x, report) = {
        let pc = factor_preconditioner(&sys, &pb)?;
        let (mut x, report) = minres_solve(&sys, &pc, &sys.rhs, scfg);
        sys.project_primal(&mut x);
        (x, report)
    };
    let full = sys.expand(&x);
    Ok(StaticSolution {
        disc,
        cfg,
        lm,
        sys,
        full,
        report,
    })
}

/// Parameter values identifying a table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum ParameterPoint {
    Biot(ManufacturedBiot),
    Barenblatt(BarenblattPoint),
    FourNetwork(FourNetworkPoint),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkResult {
    pub n_subdiv: usize,
    pub h: f64,
    pub point: ParameterPoint,
    pub errors: Option<ErrorNorms>,
    pub iterations: usize,
    pub factor: f64,
    pub converged: bool,
    pub mass: MassResidual,
    /// `∫ p_h` per network.
    pub pressure_integrals: Vec<f64>,
}

/// Solver settings used for the tables: counts at the `10⁻⁸` reduction, with
/// the iterate polished further for error and mass-balance measurements.
pub fn benchmark_solver_config() -> SolverConfig {
    SolverConfig {
        polish_tol: Some(1e-13),
        ..SolverConfig::default()
    }
}

pub fn run_problem(
    problem: &Problem,
    point: ParameterPoint,
    n_subdiv: usize,
    penalty: f64,
    scfg: &SolverConfig,
) -> Result<BenchmarkResult> {
    let sol = solve_static(problem, n_subdiv, penalty, scfg)?;
    let errors = problem.exact.as_ref().map(|ex| {
        let edges = norm_edges(&sol.disc, &sol.cfg.bcs);
        compute_error_norms(&sol.disc, &sol.sys, &sol.full, ex, &problem.rp, &sol.lm, &edges, ERROR_QUAD_DEGREE)
    });
    let mass = check_mass_conservation(&sol.disc, &sol.sys, &sol.full, &problem.rp, &problem.data, sol.cfg.rhs_quad_degree);
    let l = &sol.sys.layout;
    let pressure_integrals = (0..problem.rp.n)
        .map(|i| {
            sol.full[l.full_range(Block::P(i))]
                .iter()
                .zip(&sol.sys.areas)
                .map(|(p, a)| p * a)
                .sum()
        })
        .collect();
    Ok(BenchmarkResult {
        n_subdiv,
        h: 1.0 / n_subdiv as f64,
        point,
        errors,
        iterations: sol.report.iterations,
        factor: sol.report.factor,
        converged: sol.report.converged,
        mass,
        pressure_integrals,
    })
}

/// Runs every `(N, point)` pair concurrently; rows come back ordered by mesh
/// first, then grid order.
fn run_grid<P: Sync>(
    n_subdivs: &[usize],
    grid: &[P],
    build: impl Fn(&P) -> Result<(Problem, ParameterPoint)> + Sync,
    penalty: f64,
    scfg: &SolverConfig,
) -> Result<Vec<BenchmarkResult>> {
    let jobs: Vec<(usize, &P)> = n_subdivs
        .iter()
        .flat_map(|&n| grid.iter().map(move |p| (n, p)))
        .collect();
    jobs.par_iter()
        .map(|&(n, p)| {
            let (problem, point) = build(p)?;
            run_problem(&problem, point, n, penalty, scfg)
        })
        .collect()
}

pub fn run_biot_table(
    n_subdivs: &[usize],
    grid: &[ManufacturedBiot],
    penalty: f64,
    scfg: &SolverConfig,
) -> Result<Vec<BenchmarkResult>> {
    run_grid(n_subdivs, grid, |m| Ok((biot_problem(m)?, ParameterPoint::Biot(*m))), penalty, scfg)
}

pub fn run_barenblatt(
    n_subdivs: &[usize],
    grid: &[BarenblattPoint],
    tau: f64,
    penalty: f64,
    scfg: &SolverConfig,
) -> Result<Vec<BenchmarkResult>> {
    run_grid(
        n_subdivs,
        grid,
        |p| Ok((barenblatt_problem(p, tau)?, ParameterPoint::Barenblatt(*p))),
        penalty,
        scfg,
    )
}

pub fn run_four_network(
    n_subdivs: &[usize],
    grid: &[FourNetworkPoint],
    tau: f64,
    penalty: f64,
    scfg: &SolverConfig,
) -> Result<Vec<BenchmarkResult>> {
    run_grid(
        n_subdivs,
        grid,
        |p| Ok((four_network_problem(p, tau)?, ParameterPoint::FourNetwork(*p))),
        penalty,
        scfg,
    )
}

/// Product grid in row-major order `(α_p, λ, R⁻¹)`.
pub fn biot_grid(alpha_ps: &[f64], lambdas: &[f64], r_invs: &[f64]) -> Vec<ManufacturedBiot> {
    let mut g = Vec::new();
    for &alpha_p in alpha_ps {
        for &lambda in lambdas {
            for &r1_inv in r_invs {
                g.push(ManufacturedBiot {
                    lambda,
                    r1_inv,
                    alpha_p,
                });
            }
        }
    }
    g
}

/// Grid of Table 1: `α_p = 10⁻⁴`, `λ = 10⁴`, all R⁻¹ columns.
pub fn table1_grid() -> Vec<ManufacturedBiot> {
    biot_grid(&[1e-4], &[1e4], &R_INV_COLUMNS)
}

/// Grid of Table 2: `α_p = 0`, `R⁻¹ = 10⁸`, λ columns.
pub fn table2_grid() -> Vec<ManufacturedBiot> {
    biot_grid(&[0.0], &LAMBDA_COLUMNS, &[1e8])
}

/// Grid of Table 3: `R⁻¹ = 10⁴`, `λ = 1`, α_p columns.
pub fn table3_grid() -> Vec<ManufacturedBiot> {
    biot_grid(&ALPHA_P_COLUMNS, &[1.0], &[1e4])
}

/// Grid of Table 4.
pub fn table4_grid() -> Vec<ManufacturedBiot> {
    biot_grid(&ALPHA_P_COLUMNS, &LAMBDA_COLUMNS, &R_INV_COLUMNS)
}

/// Product grid ordered `(β, K₂, K₁)`.
pub fn barenblatt_grid_from(betas: &[f64], k2_scales: &[f64], k1_scales: &[f64]) -> Vec<BarenblattPoint> {
    let mut g = Vec::new();
    for &beta in betas {
        for &k2_scale in k2_scales {
            for &k1_scale in k1_scales {
                g.push(BarenblattPoint {
                    k1_scale,
                    k2_scale,
                    beta,
                });
            }
        }
    }
    g
}

pub fn barenblatt_grid() -> Vec<BarenblattPoint> {
    barenblatt_grid_from(&BARENBLATT_BETAS, &BARENBLATT_K2_SCALES, &BARENBLATT_K1_SCALES)
}

/// Product grid ordered `(λ, K, K₃)`.
pub fn four_network_grid_from(lambda_scales: &[f64], k_scales: &[f64], k3_scales: &[f64]) -> Vec<FourNetworkPoint> {
    let mut g = Vec::new();
    for &lambda_scale in lambda_scales {
        for &k_scale in k_scales {
            for &k3_scale in k3_scales {
                g.push(FourNetworkPoint {
                    lambda_scale,
                    k_scale,
                    k3_scale,
                });
            }
        }
    }
    g
}

pub fn four_network_grid() -> Vec<FourNetworkPoint> {
    four_network_grid_from(&FOUR_NETWORK_LAMBDA_SCALES, &FOUR_NETWORK_K_SCALES, &FOUR_NETWORK_K3_SCALES)
}

/// One point of the condition-number sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectraPoint {
    pub n_subdiv: usize,
    pub networks: usize,
    pub lambda: f64,
    pub r_inv: f64,
    pub alpha_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectraResult {
    pub point: SpectraPoint,
    pub kappa: f64,
    pub min_abs: f64,
    pub max_abs: f64,
}

/// Transfer coefficient between the two networks of two-network spectra runs.
pub const SPECTRA_ALPHA_12: f64 = 1.0;

/// Condition number of the preconditioned operator for the clamped,
/// pure-flux problem with equal parameters in every network.
pub fn spectra_point(pt: &SpectraPoint, penalty: f64) -> Result<SpectraResult> {
    let n = pt.networks;
    let mut aij = DMatrix::from_element(n, n, SPECTRA_ALPHA_12);
    aij.fill_diagonal(0.0);
    let rp = RescaledParameters::new(pt.lambda, vec![pt.r_inv; n], vec![pt.alpha_p; n], aij)?;
    let lm = build_lambda_matrices(&rp)?;
    let disc = Discretization::new(pt.n_subdiv)?;
    let mut cfg = AssemblyConfig::new(BoundaryConditions::clamped(n));
    cfg.penalty = penalty;
    let sys = assemble_full_operator(&disc, &rp, &lm, &cfg)?;
    let pb = assemble_preconditioner_blocks(&sys, &rp, &lm);
    let r = condition_diagnostic(&sys, &pb)?;
    Ok(SpectraResult {
        point: *pt,
        kappa: r.kappa,
        min_abs: r.min_abs,
        max_abs: r.max_abs,
    })
}

/// Values swept for each of λ, R⁻¹ and α_p in the condition-number study.
pub const SPECTRA_VALUES: [f64; 3] = [1.0, 1e4, 1e8];

/// Product sweep ordered `(N, n, λ, R⁻¹, α_p)`.
pub fn spectra_grid_from(
    n_subdivs: &[usize],
    networks: &[usize],
    lambdas: &[f64],
    r_invs: &[f64],
    alpha_ps: &[f64],
) -> Vec<SpectraPoint> {
    let mut g = Vec::new();
    for &n_subdiv in n_subdivs {
        for &nw in networks {
            for &lambda in lambdas {
                for &r_inv in r_invs {
                    for &alpha_p in alpha_ps {
                        g.push(SpectraPoint {
                            n_subdiv,
                            networks: nw,
                            lambda,
                            r_inv,
                            alpha_p,
                        });
                    }
                }
            }
        }
    }
    g
}

/// The `(λ, R⁻¹, α_p) ∈ {1, 10⁴, 10⁸}³` sweep for every mesh and network count.
pub fn spectra_grid(n_subdivs: &[usize], networks: &[usize]) -> Vec<SpectraPoint> {
    spectra_grid_from(n_subdivs, networks, &SPECTRA_VALUES, &SPECTRA_VALUES, &SPECTRA_VALUES)
}

pub fn run_spectra(grid: &[SpectraPoint], penalty: f64) -> Result<Vec<SpectraResult>> {
    grid.par_iter().map(|p| spectra_point(p, penalty)).collect()
}

/// Observed convergence ratios `e(h)/e(h/2)` per norm between consecutive
/// meshes for rows sharing the same parameter point.
pub fn convergence_ratios(results: &[BenchmarkResult]) -> Vec<(ParameterPoint, usize, [f64; 3])> {
    let mut out = Vec::new();
    for a in results {
        if let Some(b) = results
            .iter()
            .find(|b| b.point == a.point && b.n_subdiv == 2 * a.n_subdiv)
        {
            if let (Some(ea), Some(eb)) = (a.errors, b.errors) {
                out.push((a.point.clone(), a.n_subdiv, [ea.p / eb.p, ea.v / eb.v, ea.u / eb.u]));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn physical_parameter_sets_validate() {
        for p in barenblatt_grid() {
            barenblatt_parameters(&p, 1.0).validate().unwrap();
        }
        for p in four_network_grid() {
            four_network_parameters(&p, 1.0).validate().unwrap();
        }
        assert_eq!(table4_grid().len(), 72);
        assert_eq!(barenblatt_grid().len(), 24);
        assert_eq!(four_network_grid().len(), 54);
    }

    #[test]
    fn cantilever_bcs_cover_boundary() {
        cantilever_bcs(&[1.0, 2.0, 3.0]).validate(3).unwrap();
    }
}
