//! Finite element spaces BDM1 (displacement), RT0 (fluxes) and P0 (pressures).
//!
//! Global dofs: BDM1 edge `e` owns dofs `2e` (flux through `e` along the
//! global normal) and `2e+1` (first Legendre moment along the global tangent);
//! RT0 edge `e` owns dof `e`; P0 cell `c` owns dof `c`. Relative to the local
//! basis the flux moment carries the orientation sign of the (cell, edge)
//! pair, while the first moment needs none: reversing the edge flips both the
//! normal and the parameter `2t − 1`.

pub mod element;
pub mod quadrature;

pub use element::{piola_map, AffineField, CellGeometry, ElementKind, ReferenceElement};
pub use quadrature::{EdgeRule, TriangleRule};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

#[derive(Debug, Clone)]
pub struct DofMap {
    pub kind: ElementKind,
    pub n_dofs: usize,
    pub dofs_per_cell: usize,
    /// Flat `n_cells × dofs_per_cell` global indices.
    pub cell_dofs: Vec<usize>,
    /// Orientation sign of each local dof relative to its global dof.
    pub signs: Vec<f64>,
    /// P0 only: the space is restricted to mean-zero functions.
    pub mean_zero: bool,
}

impl DofMap {
    pub fn new(mesh: &Mesh, kind: ElementKind) -> Self {
        let dpc = kind.dofs_per_cell();
        let mut cell_dofs = Vec::with_capacity(mesh.n_cells() * dpc);
        let mut signs = Vec::with_capacity(mesh.n_cells() * dpc);
        for c in 0..mesh.n_cells() {
            match kind {
                ElementKind::P0 => {
                    cell_dofs.push(c);
                    signs.push(1.0);
                }
                ElementKind::Rt0 => {
                    for &(e, s) in &mesh.cell_edges[c] {
                        cell_dofs.push(e);
                        signs.push(s);
                    }
                }
                ElementKind::Bdm1 => {
                    for &(e, s) in &mesh.cell_edges[c] {
                        cell_dofs.extend([2 * e, 2 * e + 1]);
                        signs.extend([s, 1.0]);
                    }
                }
            }
        }
        let n_dofs = match kind {
            ElementKind::Bdm1 => 2 * mesh.n_edges(),
            ElementKind::Rt0 => mesh.n_edges(),
            ElementKind::P0 => mesh.n_cells(),
        };
        Self {
            kind,
            n_dofs,
            dofs_per_cell: dpc,
            cell_dofs,
            signs,
            mean_zero: false,
        }
    }

    pub fn with_mean_zero(mut self, flag: bool) -> Self {
        self.mean_zero = flag && self.kind == ElementKind::P0;
        self
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cell_dofs[c * self.dofs_per_cell..(c + 1) * self.dofs_per_cell]
    }

    pub fn cell_signs(&self, c: usize) -> &[f64] {
        &self.signs[c * self.dofs_per_cell..(c + 1) * self.dofs_per_cell]
    }
}

/// A space on a mesh with its physical, orientation-signed cell bases.
#[derive(Debug, Clone)]
pub struct FeSpace {
    pub dofmap: DofMap,
    /// Flat `n_cells × dofs_per_cell`; empty for P0.
    basis: Vec<AffineField>,
}

impl FeSpace {
    pub fn new(mesh: &Mesh, kind: ElementKind) -> Result<Self> {
        let dofmap = DofMap::new(mesh, kind);
        let reference = ReferenceElement::new(kind);
        let mut basis = Vec::with_capacity(mesh.n_cells() * reference.basis.len());
        if kind != ElementKind::P0 {
            for c in 0..mesh.n_cells() {
                let g = CellGeometry::new(mesh.cell_vertices(c)).ok_or(Error::DegenerateCell(c))?;
                for (k, f) in reference.basis.iter().enumerate() {
                    let s = dofmap.cell_signs(c)[k];
                    basis.push(g.piola(f).scaled(s));
                }
            }
        }
        Ok(Self { dofmap, basis })
    }

    pub fn kind(&self) -> ElementKind {
        self.dofmap.kind
    }

    pub fn n_dofs(&self) -> usize {
        self.dofmap.n_dofs
    }

    /// Signed physical basis on cell `c`, aligned with `dofmap.cell(c)`.
    pub fn cell_basis(&self, c: usize) -> &[AffineField] {
        let d = self.dofmap.dofs_per_cell;
        &self.basis[c * d..(c + 1) * d]
    }

    /// The discrete vector field restricted to cell `c`.
    pub fn cell_field(&self, coeffs: &[f64], c: usize) -> AffineField {
        let mut f = AffineField::default();
        for (phi, &g) in self.cell_basis(c).iter().zip(self.dofmap.cell(c)) {
            let x = coeffs[g];
            for r in 0..2 {
                f.a[r] += x * phi.a[r];
                for q in 0..2 {
                    f.b[r][q] += x * phi.b[r][q];
                }
            }
        }
        f
    }

    /// Cellwise divergence of a discrete vector field.
    pub fn divergence(&self, coeffs: &[f64], n_cells: usize) -> Vec<f64> {
        (0..n_cells).map(|c| self.cell_field(coeffs, c).div()).collect()
    }
}

/// Canonical edge-moment interpolant of `field` into BDM1 or RT0.
pub fn interpolate_hdiv(
    mesh: &Mesh,
    dofmap: &DofMap,
    field: impl Fn([f64; 2]) -> [f64; 2],
) -> Vec<f64> {
    let q = EdgeRule::new(10);
    let m = dofmap.kind.moments_per_edge();
    let mut out = vec![0.0; dofmap.n_dofs];
    if m == 0 {
        return out;
    }
    for e in 0..mesh.n_edges() {
        let (g0, g1) = edge_moments(mesh, e, &q, &field);
        out[m * e] = g0;
        if m == 2 {
            out[m * e + 1] = g1;
        }
    }
    out
}

/// `(∫_e f·n ds, ∫_e f·n (2t−1) ds)` with the global normal and orientation.
pub fn edge_moments(
    mesh: &Mesh,
    e: usize,
    q: &EdgeRule,
    field: &impl Fn([f64; 2]) -> [f64; 2],
) -> (f64, f64) {
    let [a, b] = mesh.edge_vertices(e);
    let n = mesh.edge_normals[e];
    let len = mesh.edge_lengths[e];
    let (mut g0, mut g1) = (0.0, 0.0);
    for (&t, &w) in q.points.iter().zip(&q.weights) {
        let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        let v = field(x);
        let vn = (v[0] * n[0] + v[1] * n[1]) * w * len;
        g0 += vn;
        g1 += vn * (2.0 * t - 1.0);
    }
    (g0, g1)
}

/// Integrates `f` over cell `c` with the given rule.
pub fn integrate_cell(mesh: &Mesh, c: usize, q: &TriangleRule, f: impl Fn([f64; 2]) -> f64) -> f64 {
    let g = CellGeometry::new(mesh.cell_vertices(c)).expect("nondegenerate mesh");
    let scale = g.det.abs();
    q.points
        .iter()
        .zip(&q.weights)
        .map(|(&xh, &w)| w * f(g.map(xh)))
        .sum::<f64>()
        * scale
}

/// Cellwise L² projection onto P0; removes the mean when the space is mean-zero.
pub fn l2_project(
    mesh: &Mesh,
    dofmap: &DofMap,
    degree: usize,
    f: impl Fn([f64; 2]) -> f64,
) -> Vec<f64> {
    let q = TriangleRule::new(degree);
    let mut out: Vec<f64> = (0..mesh.n_cells())
        .map(|c| integrate_cell(mesh, c, &q, &f) / mesh.cell_areas[c])
        .collect();
    if dofmap.mean_zero {
        remove_mean(&mut out, &mesh.cell_areas);
    }
    out
}

/// Subtracts the area-weighted mean of a P0 vector.
pub fn remove_mean(p: &mut [f64], areas: &[f64]) {
    let total: f64 = areas.iter().sum();
    let mean = p.iter().zip(areas).map(|(x, a)| x * a).sum::<f64>() / total;
    for x in p.iter_mut() {
        *x -= mean;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_structured_mesh;

    fn assert_reproduces(mesh: &Mesh, kind: ElementKind, f: impl Fn([f64; 2]) -> [f64; 2] + Copy) {
        let space = FeSpace::new(mesh, kind).unwrap();
        let x = interpolate_hdiv(mesh, &space.dofmap, f);
        let q = TriangleRule::new(4);
        for c in 0..mesh.n_cells() {
            let fh = space.cell_field(&x, c);
            let g = CellGeometry::new(mesh.cell_vertices(c)).unwrap();
            for &p in &q.points {
                let y = g.map(p);
                let (a, b) = (fh.eval(y), f(y));
                assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn counts() {
        let m = build_structured_mesh(3).unwrap();
        assert_eq!(DofMap::new(&m, ElementKind::Bdm1).n_dofs, 2 * m.n_edges());
        assert_eq!(DofMap::new(&m, ElementKind::Rt0).n_dofs, m.n_edges());
        assert_eq!(DofMap::new(&m, ElementKind::P0).n_dofs, m.n_cells());
    }

    #[test]
    fn reproduces_constants_and_linears() {
        for n in [1, 2, 3] {
            let m = build_structured_mesh(n).unwrap();
            assert_reproduces(&m, ElementKind::Bdm1, |_| [1.0, 0.0]);
            assert_reproduces(&m, ElementKind::Bdm1, |x| [x[0], x[1]]);
            assert_reproduces(&m, ElementKind::Bdm1, |x| [2.0 * x[1] - 0.3, x[0] + 4.0 * x[1]]);
            assert_reproduces(&m, ElementKind::Rt0, |x| [1.0 + x[0], -2.0 + x[1]]);
        }
        let m = build_structured_mesh(2).unwrap();
        let s = FeSpace::new(&m, ElementKind::Bdm1).unwrap();
        let x = interpolate_hdiv(&m, &s.dofmap, |x| [x[0], x[1]]);
        for d in s.divergence(&x, m.n_cells()) {
            assert!((d - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_continuity_across_edges() {
        let m = build_structured_mesh(3).unwrap();
        let s = FeSpace::new(&m, ElementKind::Bdm1).unwrap();
        let x: Vec<f64> = (0..s.n_dofs()).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
        for &e in &m.interior_edges {
            let n = m.edge_normals[e];
            let [a, b] = m.edge_vertices(e);
            let f1 = s.cell_field(&x, m.edge_cells[e][0].0);
            let f2 = s.cell_field(&x, m.edge_cells[e][1].0);
            for t in [0.0, 0.3, 1.0] {
                let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                let (u, v) = (f1.eval(p), f2.eval(p));
                let jump = (u[0] - v[0]) * n[0] + (u[1] - v[1]) * n[1];
                assert!(jump.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn curl_field_has_zero_discrete_divergence() {
        // u = (∂φ/∂y, −∂φ/∂x), φ = x²(x−1)²y²(y−1)²
        let u = |p: [f64; 2]| {
            let (x, y) = (p[0], p[1]);
            let fx = x * x * (x - 1.0) * (x - 1.0);
            let fy = y * y * (y - 1.0) * (y - 1.0);
            let dfx = 2.0 * x * (x - 1.0) * (2.0 * x - 1.0);
            let dfy = 2.0 * y * (y - 1.0) * (2.0 * y - 1.0);
            [fx * dfy, -dfx * fy]
        };
        let m = build_structured_mesh(4).unwrap();
        let s = FeSpace::new(&m, ElementKind::Bdm1).unwrap();
        let x = interpolate_hdiv(&m, &s.dofmap, u);
        for d in s.divergence(&x, m.n_cells()) {
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn l2_projection_examples() {
        let m = build_structured_mesh(2).unwrap();
        let p0 = DofMap::new(&m, ElementKind::P0);
        assert!(l2_project(&m, &p0, 4, |_| 3.0).iter().all(|&v| (v - 3.0).abs() < 1e-14));
        let p0z = p0.clone().with_mean_zero(true);
        assert!(l2_project(&m, &p0z, 4, |_| 3.0).iter().all(|&v| v.abs() < 1e-14));

        let m1 = build_structured_mesh(1).unwrap();
        let p = l2_project(&m1, &DofMap::new(&m1, ElementKind::P0), 2, |x| x[0]);
        // centroids of (0,0),(1,0),(1,1) and (0,0),(1,1),(0,1)
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-14);
    }
}
