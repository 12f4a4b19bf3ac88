use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::Side;

use super::Preconditioner;
use crate::assembly::{BlockSystem, PreconditionerBlocks};
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

struct BlockFactor {
    range: std::ops::Range<usize>,
    llt: Llt<usize, f64>,
}

/// `P B⁻¹ Pᵀ` with `B = diag(B_u, B_v, B_p)` applied through sparse Cholesky
/// factors; `P` removes constant pressure modes of pure-flux networks.
pub struct BlockPreconditioner<'a> {
    sys: &'a BlockSystem,
    blocks: Vec<BlockFactor>,
}

fn cholesky(m: &CsrMatrix, what: &'static str) -> Result<Llt<usize, f64>> {
    m.to_faer().sp_cholesky(Side::Lower).map_err(|_| Error::Factorization(what))
}

pub fn factor_preconditioner<'a>(sys: &'a BlockSystem, pb: &PreconditionerBlocks) -> Result<BlockPreconditioner<'a>> {
    let [ru, rv, rp] = sys.layout.field_ranges();
    let mut blocks = Vec::with_capacity(3);
    for (m, r, what) in [
        (&pb.u, ru, "displacement block"),
        (&pb.v, rv, "flux block"),
        (&pb.p, rp, "pressure block"),
    ] {
        if m.nrows != r.len() {
            return Err(Error::DimensionMismatch(format!(
                "{what}: {} rows for {} free dofs",
                m.nrows,
                r.len()
            )));
        }
        if r.is_empty() {
            continue;
        }
        blocks.push(BlockFactor {
            llt: cholesky(m, what)?,
            range: r,
        });
    }
    Ok(BlockPreconditioner { sys, blocks })
}

impl Preconditioner for BlockPreconditioner<'_> {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
        let constrained = self.sys.has_constraints();
        if constrained {
            self.sys.project_dual(z);
        }
        for b in &self.blocks {
            let zs = &mut z[b.range.clone()];
            let len = zs.len();
            b.llt.solve_in_place(faer::MatMut::from_column_major_slice_mut(zs, len, 1));
        }
        if constrained {
            self.sys.project_primal(z);
        }
    }
}
