//! Errors in the parameter-dependent norms and the cellwise mass balance.

use crate::assembly::{forms, Block, BlockSystem, Discretization, ProblemData, ScalarFn, VectorFn};
use crate::fespace::{integrate_cell, CellGeometry, EdgeRule, TriangleRule};
use crate::params::{LambdaMatrices, RescaledParameters};

pub type TensorFn = std::sync::Arc<dyn Fn([f64; 2]) -> [[f64; 2]; 2] + Send + Sync>;
pub type HessianFn = std::sync::Arc<dyn Fn([f64; 2]) -> [[[f64; 2]; 2]; 2] + Send + Sync>;

/// Exact fields against which a discrete solution is measured.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: VectorFn,
    pub grad_u: TensorFn,
    /// `∂²u_k/∂x_i∂x_j` indexed `[k][i][j]`.
    pub hess_u: HessianFn,
    pub v: Vec<VectorFn>,
    pub div_v: Vec<ScalarFn>,
    pub p: Vec<ScalarFn>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub p: f64,
    pub v: f64,
    pub u: f64,
}

/// `‖p−p_h‖_P`, `‖v−v_h‖_V`, `‖u−u_h‖_{U_h}` of a full-space solution vector.
///
/// The displacement norm is the DG norm plus `λ‖div·‖²`: broken gradient,
/// `h_e⁻¹`-weighted tangential jumps on `dg_edges` and `Σ h_K² |·|²_{2,K}`
/// with `h_K` the cell diameter (only the exact field has second derivatives).
pub fn compute_error_norms(
    disc: &Discretization,
    sys: &BlockSystem,
    full: &[f64],
    exact: &ExactSolution,
    rp: &RescaledParameters,
    lm: &LambdaMatrices,
    dg_edges: &[usize],
    degree: usize,
) -> ErrorNorms {
    let n = rp.n;
    let mesh = &disc.mesh;
    let l = &sys.layout;
    let q = TriangleRule::new(degree);
    let u_h = &full[l.full_range(Block::U)];

    let mut gp = vec![0.0; n * n];
    let mut gd = vec![0.0; n * n];
    let mut mass_v = vec![0.0; n];
    let (mut grad2, mut div2, mut hess2) = (0.0, 0.0, 0.0);
    let mut ep = vec![0.0; n];
    let mut ed = vec![0.0; n];
    for c in 0..mesh.n_cells() {
        let g = CellGeometry::new(mesh.cell_vertices(c)).expect("nondegenerate mesh");
        let uf = disc.u.cell_field(u_h, c);
        let vf: Vec<_> = (0..n)
            .map(|i| disc.v.cell_field(&full[l.full_range(Block::V(i))], c))
            .collect();
        let ph: Vec<f64> = (0..n).map(|i| full[l.full_range(Block::P(i)).start + c]).collect();
        let gu_h = uf.grad();
        let [p0, p1, p2] = mesh.cell_vertices(c);
        let diam2 = [(p0, p1), (p1, p2), (p2, p0)]
            .iter()
            .map(|(a, b)| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2))
            .fold(0.0, f64::max);
        for (&xh, &w) in q.points.iter().zip(&q.weights) {
            let x = g.map(xh);
            let wx = w * g.det.abs();
            let gu = (exact.grad_u)(x);
            let mut s = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    s += (gu[a][b] - gu_h[a][b]).powi(2);
                }
            }
            grad2 += wx * s;
            let hu = (exact.hess_u)(x);
            let h2: f64 = hu.iter().flatten().flatten().map(|v| v * v).sum();
            hess2 += wx * diam2 * h2;
            div2 += wx * (gu[0][0] + gu[1][1] - uf.div()).powi(2);
            for i in 0..n {
                ep[i] = (exact.p[i])(x) - ph[i];
                ed[i] = (exact.div_v[i])(x) - vf[i].div();
                let ve = (exact.v[i])(x);
                let vh = vf[i].eval(x);
                mass_v[i] += wx * ((ve[0] - vh[0]).powi(2) + (ve[1] - vh[1]).powi(2));
            }
            for i in 0..n {
                for j in 0..n {
                    gp[i * n + j] += wx * ep[i] * ep[j];
                    gd[i * n + j] += wx * ed[i] * ed[j];
                }
            }
        }
    }

    let eq = EdgeRule::new(degree);
    let mut jump2 = 0.0;
    for &e in dg_edges {
        let [a, b] = mesh.edge_vertices(e);
        let inc = &mesh.edge_cells[e];
        let nrm = if inc.len() == 2 { mesh.edge_normals[e] } else { mesh.outward_normal(e).0 };
        let t = [-nrm[1], nrm[0]];
        let f0 = disc.u.cell_field(u_h, inc[0].0);
        let f1 = inc.get(1).map(|&(c, _)| disc.u.cell_field(u_h, c));
        for (&s, &w) in eq.points.iter().zip(&eq.weights) {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let v0 = f0.eval(x);
            let other = match &f1 {
                Some(f) => f.eval(x),
                None => (exact.u)(x),
            };
            let j = (v0[0] - other[0]) * t[0] + (v0[1] - other[1]) * t[1];
            // (1/h_e)∫_e j² with ∫_e = h_e Σ w
            jump2 += w * j * j;
        }
    }

    let lam = lm.gamma();
    let lt = lm.gamma_tilde();
    let mut p2 = 0.0;
    let mut v2 = 0.0;
    for i in 0..n {
        v2 += rp.r_inv[i] * mass_v[i];
        for j in 0..n {
            p2 += lam[(i, j)] * gp[i * n + j];
            v2 += lt[(i, j)] * gd[i * n + j];
        }
    }
    ErrorNorms {
        p: p2.max(0.0).sqrt(),
        v: v2.max(0.0).sqrt(),
        u: (grad2 + jump2 + hess2 + rp.lambda * div2).sqrt(),
    }
}

/// Largest cellwise violation of the discrete mass balance and the size of
/// the terms it is made of.
///
/// `scale` is the largest cellwise sum of absolute contributions, with the
/// divergences counted edge by edge (`|B||x|`), so `relative()` is a
/// componentwise backward error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassResidual {
    pub max_abs: f64,
    pub scale: f64,
}

impl MassResidual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.max_abs / self.scale
        } else {
            self.max_abs
        }
    }
}

/// Evaluates `−div u − div v_i − (α_{p_i} + α_ii) p_i + Σ_{j≠i} α_ij p_j − Q g_i`
/// on every cell and network.
pub fn check_mass_conservation(
    disc: &Discretization,
    sys: &BlockSystem,
    full: &[f64],
    rp: &RescaledParameters,
    data: &ProblemData,
    degree: usize,
) -> MassResidual {
    let mesh = &disc.mesh;
    let l = &sys.layout;
    let n = rp.n;
    let q = TriangleRule::new(degree);
    let u = &full[l.full_range(Block::U)];
    let div_u = sys.blocks.b_u.mul(u);
    let div_u_abs = sys.blocks.b_u.abs_mul(u);
    let vs: Vec<&[f64]> = (0..n).map(|i| &full[l.full_range(Block::V(i))]).collect();
    let div_v: Vec<Vec<f64>> = vs.iter().map(|v| sys.blocks.b_v.mul(v)).collect();
    let div_v_abs: Vec<Vec<f64>> = vs.iter().map(|v| sys.blocks.b_v.abs_mul(v)).collect();
    let p = |i: usize, c: usize| full[l.full_range(Block::P(i)).start + c];
    let (mut max_abs, mut scale) = (0.0f64, 0.0f64);
    for c in 0..mesh.n_cells() {
        let area = mesh.cell_areas[c];
        for i in 0..n {
            let qg = integrate_cell(mesh, c, &q, |x| (data.g[i])(x)) / area;
            let terms = [
                -div_u[c] / area,
                -div_v[i][c] / area,
                -(rp.alpha_p[i] + rp.alpha_ii(i)) * p(i, c),
                (0..n).filter(|&j| j != i).map(|j| rp.alpha_ij[(i, j)] * p(j, c)).sum(),
                -qg,
            ];
            let r: f64 = terms.iter().sum();
            max_abs = max_abs.max(r.abs());
            let size = (div_u_abs[c] + div_v_abs[i][c]) / area + terms[2..].iter().map(|t| t.abs()).sum::<f64>();
            scale = scale.max(size);
        }
    }
    MassResidual { max_abs, scale }
}

/// Edges carrying jump terms of the discrete displacement norm.
pub fn norm_edges(disc: &Discretization, bcs: &crate::assembly::BoundaryConditions) -> Vec<usize> {
    forms::dg_edges(&disc.mesh, &disc.displacement_dirichlet_edges(bcs))
}
