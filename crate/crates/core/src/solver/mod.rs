//! MinRes with the block-diagonal norm-equivalent preconditioner, spectral
//! diagnostics, a sparse direct reference solve and the backward-Euler driver.

mod minres;
mod precond;
mod spectra;
mod transient;

pub use minres::minres_solve;
pub use precond::{factor_preconditioner, BlockPreconditioner, IdentityPreconditioner};
pub use spectra::{condition_diagnostic, inf_sup_constants, ConditionReport, InfSupConstants, DENSE_SIZE_LIMIT};
pub use transient::{backward_euler_drive, transient_rhs, Trajectory};

use crate::assembly::BlockSystem;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Symmetric operator acting on vectors of length `dim`.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Action of an SPD preconditioner `z = B⁻¹ r`.
pub trait Preconditioner: Sync {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y);
    }
}

impl LinearOperator for BlockSystem {
    fn dim(&self) -> usize {
        BlockSystem::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        BlockSystem::apply(self, x, y);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResidualNorm {
    /// `‖r‖_{B⁻¹}`, available from the recurrence at no extra cost.
    #[default]
    Preconditioner,
    Euclidean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub reduction_tol: f64,
    pub max_iters: usize,
    pub measure_norm: ResidualNorm,
    /// Keep iterating past `reduction_tol` down to this reduction; the
    /// reported iteration count and factor still refer to `reduction_tol`.
    pub polish_tol: Option<f64>,
    /// Correction solves on the recomputed residual after the main solve.
    pub refinement_sweeps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            reduction_tol: 1e-8,
            max_iters: 500,
            measure_norm: ResidualNorm::Preconditioner,
            polish_tol: None,
            refinement_sweeps: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.reduction_tol > 0.0 && self.reduction_tol < 1.0) {
            return Err(Error::InvalidParameter("reduction_tol must lie in (0, 1)".into()));
        }
        if let Some(p) = self.polish_tol {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidParameter("polish_tol must lie in (0, 1)".into()));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Iterations needed to reach the reduction target (all performed ones if never reached).
    pub iterations: usize,
    /// Residual norms `‖r_0‖, ‖r_1‖, …` including any polishing steps.
    pub history: Vec<f64>,
    /// Average convergence factor `(‖r_k‖/‖r_0‖)^{1/k}` at `k = iterations`.
    pub factor: f64,
    pub converged: bool,
}

impl SolveReport {
    fn finish(history: Vec<f64>, iterations: usize, converged: bool) -> Self {
        let factor = if iterations == 0 || history[0] == 0.0 {
            0.0
        } else {
            (history[iterations] / history[0]).powf(1.0 / iterations as f64)
        };
        Self {
            iterations,
            history,
            factor,
            converged,
        }
    }
}

/// Sparse LU solve of the free system with two steps of iterative
/// refinement; mean-zero pressure blocks are handled by bordering with their
/// area vectors.
pub fn direct_solve(sys: &BlockSystem, rhs: &[f64]) -> Result<Vec<f64>> {
    use faer::linalg::solvers::Solve;
    let m = sys.dim();
    let borders: Vec<usize> = (0..sys.n()).filter(|&i| sys.mean_zero[i]).collect();
    let dim = m + borders.len();
    let mut t = crate::sparse::TripletBuilder::with_capacity(dim, dim, sys.matrix.nnz());
    t.add_block(0, 0, &sys.matrix, 1.0);
    for (k, &i) in borders.iter().enumerate() {
        let r = sys.layout.free_range(crate::assembly::Block::P(i));
        for (c, &a) in r.zip(&sys.areas) {
            t.add(c, m + k, a);
            t.add(m + k, c, a);
        }
    }
    let bordered = t.build();
    let lu = bordered
        .to_faer()
        .sp_lu()
        .map_err(|_| Error::Factorization("sparse LU of the full system"))?;
    let mut b = rhs.to_vec();
    b.resize(dim, 0.0);
    let mut x = b.clone();
    lu.solve_in_place(faer::MatMut::from_column_major_slice_mut(&mut x, dim, 1));
    let mut r = vec![0.0; dim];
    for _ in 0..2 {
        bordered.matvec(&x, &mut r);
        r.iter_mut().zip(&b).for_each(|(ri, bi)| *ri = bi - *ri);
        lu.solve_in_place(faer::MatMut::from_column_major_slice_mut(&mut r, dim, 1));
        x.iter_mut().zip(&r).for_each(|(xi, di)| *xi += di);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Factorization("sparse LU of the full system"));
    }
    x.truncate(m);
    Ok(x)
}
