//! Backward Euler in time on the rescaled system.
//!
//! States are full-space vectors in rescaled variables `(u, ṽ_i, p̃_i)` with
//! `ṽ_i = τ v_i / α_i` and `p̃_i = α_i p_i / (2μ)`. Boundary data in the
//! assembly config are given in the same variables; body forces and sources
//! come in physical units and are scaled per step.

use std::sync::Arc;

use super::{factor_preconditioner, minres_solve, SolverConfig};
use crate::assembly::{
    assemble_full_operator, assemble_preconditioner_blocks, assemble_rhs, AssemblyConfig, Block,
    BlockSystem, Discretization, ProblemData,
};
use crate::error::{Error, Result};
use crate::params::{build_lambda_matrices, rescale_parameters, ModelParameters, RescaledParameters};
use crate::solver::SolveReport;

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Full-space states, the initial one first.
    pub states: Vec<Vec<f64>>,
    pub reports: Vec<SolveReport>,
}

/// Full-space load of one step: scaled `f(t_k)`, boundary terms, and pressure
/// rows `(τ/α_i)(g_i(t_k), q) − (div u^{k−1}, q) − α_{p_i}(p̃_i^{k−1}, q)`.
pub fn transient_rhs(
    mp: &ModelParameters,
    rp: &RescaledParameters,
    disc: &Discretization,
    sys: &BlockSystem,
    cfg: &AssemblyConfig,
    data: &ProblemData,
    prev: &[f64],
) -> Result<Vec<f64>> {
    let n = mp.n;
    let two_mu = 2.0 * mp.mu;
    let f = data.f.clone();
    let scaled = ProblemData {
        f: Arc::new(move |x| {
            let v = f(x);
            [v[0] / two_mu, v[1] / two_mu]
        }),
        g: (0..n)
            .map(|i| {
                let g = data.g[i].clone();
                let s = mp.tau / mp.alpha[i];
                Arc::new(move |x: [f64; 2]| s * g(x)) as crate::assembly::ScalarFn
            })
            .collect(),
    };
    let mut out = assemble_rhs(disc, &scaled, cfg, n)?;
    let l = &sys.layout;
    let div_u = sys.blocks.b_u.mul(&prev[l.full_range(Block::U)]);
    for i in 0..n {
        let pr = l.full_range(Block::P(i));
        let p_prev = &prev[pr.clone()];
        for (c, k) in pr.enumerate() {
            out[k] -= div_u[c] + rp.alpha_p[i] * sys.areas[c] * p_prev[c];
        }
    }
    Ok(out)
}

/// Runs backward Euler over `times` (uniform spacing `mp.tau`), reusing the
/// operator and preconditioner factorization across steps.
pub fn backward_euler_drive(
    mp: &ModelParameters,
    disc: &Discretization,
    cfg: &AssemblyConfig,
    sources: &dyn Fn(f64) -> ProblemData,
    initial: &[f64],
    times: &[f64],
    scfg: &SolverConfig,
) -> Result<Trajectory> {
    mp.validate()?;
    scfg.validate()?;
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        if (dt - mp.tau).abs() > 1e-12 * mp.tau.max(dt.abs()) {
            return Err(Error::InvalidParameter(format!(
                "time grid spacing {dt} differs from tau = {}",
                mp.tau
            )));
        }
    }
    let rp = rescale_parameters(mp)?;
    let lm = build_lambda_matrices(&rp)?;
    let sys = assemble_full_operator(disc, &rp, &lm, cfg)?;
    if initial.len() != sys.layout.n_full() {
        return Err(Error::DimensionMismatch(format!(
            "initial state of length {} for {} dofs",
            initial.len(),
            sys.layout.n_full()
        )));
    }
    let pb = assemble_preconditioner_blocks(&sys, &rp, &lm);
    let pc = factor_preconditioner(&sys, &pb)?;

    let mut states = vec![initial.to_vec()];
    let mut reports = Vec::new();
    for (step, &t) in times.iter().enumerate().skip(1) {
        let full = transient_rhs(mp, &rp, disc, &sys, cfg, &sources(t), states.last().unwrap())?;
        let b = sys.free_rhs(&full);
        let (mut x, rep) = minres_solve(&sys, &pc, &b, scfg);
        if !rep.converged {
            return Err(Error::StepNotConverged {
                step,
                iterations: rep.iterations,
            });
        }
        sys.project_primal(&mut x);
        states.push(sys.expand(&x));
        reports.push(rep);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        reports,
    })
}
