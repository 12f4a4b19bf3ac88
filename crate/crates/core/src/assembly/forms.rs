//! Matrices of the individual bilinear forms on full (unconstrained) spaces.

use nalgebra::DMatrix;

use crate::fespace::{AffineField, CellGeometry, EdgeRule, FeSpace, TriangleRule};
use crate::mesh::Mesh;
use crate::sparse::{CsrMatrix, TripletBuilder};

fn frob(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

fn apply(m: [[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Assembles `Σ_K |K| · local(φ_i, φ_j)` for cellwise-constant integrands.
fn cell_constant_form(
    mesh: &Mesh,
    space: &FeSpace,
    local: impl Fn(&AffineField, &AffineField) -> f64,
) -> CsrMatrix {
    let d = space.dofmap.dofs_per_cell;
    let mut b = TripletBuilder::with_capacity(space.n_dofs(), space.n_dofs(), mesh.n_cells() * d * d);
    for c in 0..mesh.n_cells() {
        let area = mesh.cell_areas[c];
        let basis = space.cell_basis(c);
        let dofs = space.dofmap.cell(c);
        for i in 0..d {
            for j in 0..d {
                b.add(dofs[i], dofs[j], area * local(&basis[i], &basis[j]));
            }
        }
    }
    b.build()
}

/// `(div u, div w)` on a vector space.
pub fn div_div(mesh: &Mesh, space: &FeSpace) -> CsrMatrix {
    cell_constant_form(mesh, space, |a, b| a.div() * b.div())
}

/// `Σ_K (ε(u), ε(w))_K`
pub fn strain_strain(mesh: &Mesh, space: &FeSpace) -> CsrMatrix {
    cell_constant_form(mesh, space, |a, b| frob(a.strain(), b.strain()))
}

/// `Σ_K (∇u, ∇w)_K`
pub fn grad_grad(mesh: &Mesh, space: &FeSpace) -> CsrMatrix {
    cell_constant_form(mesh, space, |a, b| frob(a.grad(), b.grad()))
}

/// `(u, w)` on a vector space with the given triangle rule.
pub fn vector_mass(mesh: &Mesh, space: &FeSpace, degree: usize) -> CsrMatrix {
    let q = TriangleRule::new(degree);
    let d = space.dofmap.dofs_per_cell;
    let mut b = TripletBuilder::with_capacity(space.n_dofs(), space.n_dofs(), mesh.n_cells() * d * d);
    let mut vals = vec![[0.0; 2]; d];
    for c in 0..mesh.n_cells() {
        let g = CellGeometry::new(mesh.cell_vertices(c)).expect("nondegenerate mesh");
        let basis = space.cell_basis(c);
        let dofs = space.dofmap.cell(c);
        let mut local = vec![0.0; d * d];
        for (&xh, &w) in q.points.iter().zip(&q.weights) {
            let x = g.map(xh);
            let wx = w * g.det.abs();
            for k in 0..d {
                vals[k] = basis[k].eval(x);
            }
            for i in 0..d {
                for j in 0..d {
                    local[i * d + j] += wx * dot2(vals[i], vals[j]);
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                b.add(dofs[i], dofs[j], local[i * d + j]);
            }
        }
    }
    b.build()
}

/// `(div v, q)` as a (P0 × vector space) matrix.
pub fn divergence(mesh: &Mesh, space: &FeSpace) -> CsrMatrix {
    let d = space.dofmap.dofs_per_cell;
    let mut b = TripletBuilder::with_capacity(mesh.n_cells(), space.n_dofs(), mesh.n_cells() * d);
    for c in 0..mesh.n_cells() {
        let area = mesh.cell_areas[c];
        for (phi, &g) in space.cell_basis(c).iter().zip(space.dofmap.cell(c)) {
            b.add(c, g, area * phi.div());
        }
    }
    b.build()
}

/// P0 mass matrix, `diag(|K|)`.
pub fn p0_mass(mesh: &Mesh) -> CsrMatrix {
    CsrMatrix::diagonal(&mesh.cell_areas)
}

/// Contributions of one edge-side basis function at a quadrature point.
#[derive(Clone, Copy)]
struct EdgeTrace {
    dof: usize,
    /// `±(φ · t)` with the jump sign of its side.
    jump_t: f64,
    /// `t · {ε(φ)} n` including the averaging weight.
    avg_traction: f64,
}

/// Edges carrying DG terms: all interior edges plus the flagged boundary edges.
pub fn dg_edges(mesh: &Mesh, boundary: &[bool]) -> Vec<usize> {
    (0..mesh.n_edges())
        .filter(|&e| !mesh.is_boundary(e) || boundary[e])
        .collect()
}

/// Sides of edge `e`: `(cell, jump sign)` and the normal used by the averages.
fn edge_sides(mesh: &Mesh, e: usize) -> (Vec<(usize, f64)>, [f64; 2], f64) {
    let inc = &mesh.edge_cells[e];
    if inc.len() == 2 {
        (vec![(inc[0].0, 1.0), (inc[1].0, -1.0)], mesh.edge_normals[e], 0.5)
    } else {
        let (n, _) = mesh.outward_normal(e);
        (vec![(inc[0].0, 1.0)], n, 1.0)
    }
}

fn edge_traces(
    mesh: &Mesh,
    space: &FeSpace,
    e: usize,
    x: [f64; 2],
    out: &mut Vec<EdgeTrace>,
) {
    out.clear();
    let (sides, n, avg) = edge_sides(mesh, e);
    let t = [-n[1], n[0]];
    for (c, s) in sides {
        for (phi, &g) in space.cell_basis(c).iter().zip(space.dofmap.cell(c)) {
            out.push(EdgeTrace {
                dof: g,
                jump_t: s * dot2(phi.eval(x), t),
                avg_traction: avg * dot2(t, apply(phi.strain(), n)),
            });
        }
    }
}

/// Symmetric interior penalty form on tangential jumps:
/// `−∫{ε(u)}·[w_t] − ∫{ε(w)}·[u_t] + η/h_e ∫[u_t]·[w_t]` over `edges`
/// (with `consistency = false` only the penalty part scaled by `1/h_e`).
pub fn edge_jump_form(
    mesh: &Mesh,
    space: &FeSpace,
    edges: &[usize],
    penalty: f64,
    consistency: bool,
    degree: usize,
) -> CsrMatrix {
    let q = EdgeRule::new(degree);
    let mut b = TripletBuilder::with_capacity(space.n_dofs(), space.n_dofs(), edges.len() * 144);
    let mut tr = Vec::with_capacity(12);
    for &e in edges {
        let [a, bv] = mesh.edge_vertices(e);
        let he = mesh.edge_lengths[e];
        // at most two cells of six dofs share an edge
        let mut local = [0.0; 144];
        let mut dofs = Vec::new();
        for (&t, &w) in q.points.iter().zip(&q.weights) {
            let x = [a[0] + t * (bv[0] - a[0]), a[1] + t * (bv[1] - a[1])];
            edge_traces(mesh, space, e, x, &mut tr);
            let m = tr.len();
            if dofs.is_empty() {
                dofs = tr.iter().map(|z| z.dof).collect();
            }
            let wl = w * he;
            for i in 0..m {
                for j in 0..m {
                    let mut v = penalty / he * tr[i].jump_t * tr[j].jump_t;
                    if consistency {
                        v -= tr[j].avg_traction * tr[i].jump_t + tr[i].avg_traction * tr[j].jump_t;
                    }
                    local[i * m + j] += wl * v;
                }
            }
        }
        let m = dofs.len();
        for i in 0..m {
            for j in 0..m {
                b.add(dofs[i], dofs[j], local[i * m + j]);
            }
        }
    }
    b.build()
}

/// `a_h`: cellwise strain energy plus the interior penalty terms on `edges`.
pub fn dg_elasticity(mesh: &Mesh, space: &FeSpace, edges: &[usize], penalty: f64, degree: usize) -> CsrMatrix {
    let vol = strain_strain(mesh, space);
    let edge = edge_jump_form(mesh, space, edges, penalty, true, degree);
    add(&vol, &edge, 1.0)
}

/// `a + s·b`
pub fn add(a: &CsrMatrix, b: &CsrMatrix, s: f64) -> CsrMatrix {
    let mut t = TripletBuilder::with_capacity(a.nrows, a.ncols, a.nnz() + b.nnz());
    t.add_block(0, 0, a, 1.0);
    t.add_block(0, 0, b, s);
    t.build()
}

/// Block matrix `[w_ij · m]_{ij}` for an n×n weight matrix (zero weights skipped).
pub fn kron(w: &DMatrix<f64>, m: &CsrMatrix) -> CsrMatrix {
    let n = w.nrows();
    let mut t = TripletBuilder::with_capacity(n * m.nrows, n * m.ncols, n * n * m.nnz());
    for i in 0..n {
        for j in 0..n {
            if w[(i, j)] != 0.0 {
                t.add_block(i * m.nrows, j * m.ncols, m, w[(i, j)]);
            }
        }
    }
    t.build()
}
