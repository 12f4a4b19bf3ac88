//! Dense generalized eigenvalues of `(A, B)` for small systems.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use crate::assembly::{
    assemble_full_operator, assemble_norm_grams, forms, AssemblyConfig, Block, BlockSystem, BoundaryConditions,
    Discretization, PreconditionerBlocks,
};
use crate::error::{Error, Result};
use crate::params::{build_lambda_matrices, RescaledParameters};

/// Largest free dimension accepted by [`condition_diagnostic`].
pub const DENSE_SIZE_LIMIT: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    /// `max|μ| / min|μ|`
    pub kappa: f64,
    pub min_abs: f64,
    pub max_abs: f64,
    pub min: f64,
    pub max: f64,
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
}

/// Orthonormal basis of the subspace of free vectors whose mean-zero
/// pressure blocks have zero area-weighted sum.
fn constrained_basis(sys: &BlockSystem) -> Option<DMatrix<f64>> {
    let m = sys.dim();
    let nets: Vec<usize> = (0..sys.n()).filter(|&i| sys.mean_zero[i]).collect();
    if nets.is_empty() {
        return None;
    }
    let mut c = DMatrix::zeros(m, nets.len());
    for (k, &i) in nets.iter().enumerate() {
        for (r, &a) in sys.layout.free_range(Block::P(i)).zip(&sys.areas) {
            c[(r, k)] = a;
        }
    }
    // Householder QR of [C | I]: the trailing columns of Q span C^⊥
    let k = nets.len();
    let mut ext = DMatrix::zeros(m, k + m);
    ext.view_mut((0, 0), (m, k)).copy_from(&c);
    ext.view_mut((0, k), (m, m)).fill_with_identity();
    let q = ext.qr().q();
    let basis = q.columns(k, m - k).into_owned();
    Some(basis)
}

fn block_diag(sys: &BlockSystem, pb: &PreconditionerBlocks) -> DMatrix<f64> {
    let m = sys.dim();
    let mut b = DMatrix::zeros(m, m);
    for (blk, r) in [&pb.u, &pb.v, &pb.p].into_iter().zip(sys.layout.field_ranges()) {
        let d = blk.to_dense();
        b.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(&d);
    }
    b
}

/// Generalized eigenvalues of `A μ = B μ` on the constrained subspace.
pub fn condition_diagnostic(sys: &BlockSystem, pb: &PreconditionerBlocks) -> Result<ConditionReport> {
    let m = sys.dim();
    if m > DENSE_SIZE_LIMIT {
        return Err(Error::SizeGuard {
            size: m,
            limit: DENSE_SIZE_LIMIT,
        });
    }
    let mut a = sys.matrix.to_dense();
    let mut b = block_diag(sys, pb);
    if let Some(q) = constrained_basis(sys) {
        a = q.transpose() * &a * &q;
        b = q.transpose() * &b * &q;
    }
    generalized_eigen(a, b)
}

/// Discrete inf-sup constants of the clamped single-network problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfSupConstants {
    /// `inf_q sup_u (div u, q) / (‖u‖_DG ‖q‖)` over mean-zero `q`.
    pub stokes: f64,
    /// `inf_q sup_v (div v, q) / (‖v‖_{H(div)} ‖q‖)` over mean-zero `q`.
    pub darcy: f64,
}

/// Smallest nonzero singular value of `b` between the norms of `x` and `q`.
fn smallest_singular(b: &DMatrix<f64>, x: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<f64> {
    let chol = Cholesky::new(x.clone()).ok_or(Error::Factorization("inf-sup gram"))?;
    let s = b * chol.solve(&b.transpose());
    let r = generalized_eigen(s, q.clone())?;
    let tol = 1e-10 * r.max_abs;
    let min = r
        .eigenvalues
        .iter()
        .copied()
        .filter(|&e| e > tol)
        .fold(f64::INFINITY, f64::min);
    Ok(min.sqrt())
}

/// Computes [`InfSupConstants`] on the `n_subdiv` mesh (dense, small meshes only).
pub fn inf_sup_constants(n_subdiv: usize, penalty: f64) -> Result<InfSupConstants> {
    let disc = Discretization::new(n_subdiv)?;
    let rp = RescaledParameters::biot(1.0, 1.0, 0.0)?;
    let lm = build_lambda_matrices(&rp)?;
    let mut cfg = AssemblyConfig::new(BoundaryConditions::clamped(1));
    cfg.penalty = penalty;
    let sys = assemble_full_operator(&disc, &rp, &lm, &cfg)?;
    if sys.dim() > DENSE_SIZE_LIMIT {
        return Err(Error::SizeGuard {
            size: sys.dim(),
            limit: DENSE_SIZE_LIMIT,
        });
    }
    let l = &sys.layout;
    let a = sys.matrix.to_dense();
    let (ur, vr, pr) = (l.free_range(Block::U), l.free_range(Block::V(0)), l.free_range(Block::P(0)));
    let full_of = |r: &std::ops::Range<usize>, b: Block| -> Vec<usize> {
        l.free[r.clone()].iter().map(|&k| k - l.full_offset(b)).collect()
    };
    let pick = |m: &DMatrix<f64>, idx: &[usize]| DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);

    let grams = assemble_norm_grams(&disc, &sys, &rp, &lm, &cfg);
    // λ = 1 in the Gram; drop the div-div part to get the plain DG norm
    let dd = forms::div_div(&disc.mesh, &disc.u).to_dense();
    let x_u = pick(&(grams.u.to_dense() - dd), &full_of(&ur, Block::U));
    let hdiv = forms::add(
        &forms::vector_mass(&disc.mesh, &disc.v, cfg.quad_degree),
        &forms::div_div(&disc.mesh, &disc.v),
        1.0,
    );
    let x_v = pick(&hdiv.to_dense(), &full_of(&vr, Block::V(0)));
    let q = forms::p0_mass(&disc.mesh).to_dense();
    let b_u = a.view((pr.start, ur.start), (pr.len(), ur.len())).into_owned();
    let b_v = a.view((pr.start, vr.start), (pr.len(), vr.len())).into_owned();
    Ok(InfSupConstants {
        stokes: smallest_singular(&b_u, &x_u, &q)?,
        darcy: smallest_singular(&b_v, &x_v, &q)?,
    })
}

pub(crate) fn generalized_eigen(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<ConditionReport> {
    let l = Cholesky::new(b)
        .ok_or(Error::Factorization("dense preconditioner"))?
        .l();
    let linv = l
        .solve_lower_triangular(&DMatrix::identity(l.nrows(), l.nrows()))
        .ok_or(Error::Factorization("dense preconditioner"))?;
    let mut s = &linv * a * linv.transpose();
    s = (&s + s.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    let abs = ev.iter().map(|v| v.abs());
    let min_abs = abs.clone().fold(f64::INFINITY, f64::min);
    let max_abs = abs.fold(0.0, f64::max);
    Ok(ConditionReport {
        kappa: max_abs / min_abs,
        min_abs,
        max_abs,
        min: ev[0],
        max: *ev.last().unwrap(),
        eigenvalues: ev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_pair_has_unit_spectrum() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 2.0]);
        let r = generalized_eigen(a.clone(), a).unwrap();
        assert!((r.kappa - 1.0).abs() < 1e-12);
        assert!(r.eigenvalues.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn inf_sup_constants_are_positive() {
        let c = inf_sup_constants(2, 10.0).unwrap();
        assert!(c.stokes > 0.05 && c.stokes < 2.0, "{c:?}");
        assert!(c.darcy > 0.05 && c.darcy < 2.0, "{c:?}");
    }

    #[test]
    fn indefinite_pair() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, -8.0]));
        let b = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0]));
        let r = generalized_eigen(a, b).unwrap();
        assert_eq!(r.eigenvalues.len(), 2);
        assert!((r.min + 4.0).abs() < 1e-14 && (r.max - 2.0).abs() < 1e-14);
        assert!((r.kappa - 2.0).abs() < 1e-14);
    }
}
