//! Reference elements BDM1, RT0, P0 and the contravariant Piola map.
//!
//! Vector bases are affine fields `a + B x`. Local dofs are edge moments of the
//! outward normal component: `∫_e v·n ds` (RT0), and additionally
//! `∫_e v·n (2t−1) ds` (BDM1), with `t ∈ [0,1]` running along local edge `i`
//! from vertex `(i+1)%3` to `(i+2)%3`. BDM1 local dof `2i + m` is moment `m`
//! on edge `i`; RT0 local dof `i` is the flux through edge `i`.

use nalgebra::DMatrix;

use super::quadrature::EdgeRule;
use crate::error::{Error, Result};

pub const REF_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Bdm1,
    Rt0,
    P0,
}

impl ElementKind {
    pub fn dofs_per_cell(self) -> usize {
        match self {
            ElementKind::Bdm1 => 6,
            ElementKind::Rt0 => 3,
            ElementKind::P0 => 1,
        }
    }

    /// Number of moments per edge (0 for the cellwise P0 space).
    pub fn moments_per_edge(self) -> usize {
        match self {
            ElementKind::Bdm1 => 2,
            ElementKind::Rt0 => 1,
            ElementKind::P0 => 0,
        }
    }
}

/// The vector field `x ↦ a + B x`; `b[r][c]` is ∂v_r/∂x_c.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AffineField {
    pub a: [f64; 2],
    pub b: [[f64; 2]; 2],
}

impl AffineField {
    pub fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        [
            self.a[0] + self.b[0][0] * x[0] + self.b[0][1] * x[1],
            self.a[1] + self.b[1][0] * x[0] + self.b[1][1] * x[1],
        ]
    }

    pub fn div(&self) -> f64 {
        self.b[0][0] + self.b[1][1]
    }

    pub fn grad(&self) -> [[f64; 2]; 2] {
        self.b
    }

    /// Symmetric gradient ε(v).
    pub fn strain(&self) -> [[f64; 2]; 2] {
        let off = 0.5 * (self.b[0][1] + self.b[1][0]);
        [[self.b[0][0], off], [off, self.b[1][1]]]
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            a: [s * self.a[0], s * self.a[1]],
            b: [
                [s * self.b[0][0], s * self.b[0][1]],
                [s * self.b[1][0], s * self.b[1][1]],
            ],
        }
    }
}

/// Reference edge `i`: start point, direction (not normalized) and outward unit normal.
pub fn reference_edge(i: usize) -> ([f64; 2], [f64; 2], [f64; 2]) {
    let a = REF_VERTICES[(i + 1) % 3];
    let b = REF_VERTICES[(i + 2) % 3];
    let d = [b[0] - a[0], b[1] - a[1]];
    let len = d[0].hypot(d[1]);
    (a, d, [d[1] / len, -d[0] / len])
}

#[derive(Debug, Clone)]
pub struct ReferenceElement {
    pub kind: ElementKind,
    /// Empty for P0, whose single basis function is the constant 1.
    pub basis: Vec<AffineField>,
}

fn monomials(kind: ElementKind) -> Vec<AffineField> {
    let f = |a: [f64; 2], b: [[f64; 2]; 2]| AffineField { a, b };
    match kind {
        ElementKind::Bdm1 => vec![
            f([1.0, 0.0], [[0.0, 0.0], [0.0, 0.0]]),
            f([0.0, 0.0], [[1.0, 0.0], [0.0, 0.0]]),
            f([0.0, 0.0], [[0.0, 1.0], [0.0, 0.0]]),
            f([0.0, 1.0], [[0.0, 0.0], [0.0, 0.0]]),
            f([0.0, 0.0], [[0.0, 0.0], [1.0, 0.0]]),
            f([0.0, 0.0], [[0.0, 0.0], [0.0, 1.0]]),
        ],
        ElementKind::Rt0 => vec![
            f([1.0, 0.0], [[0.0, 0.0], [0.0, 0.0]]),
            f([0.0, 1.0], [[0.0, 0.0], [0.0, 0.0]]),
            f([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]]),
        ],
        ElementKind::P0 => Vec::new(),
    }
}

impl ReferenceElement {
    pub fn new(kind: ElementKind) -> Self {
        let mono = monomials(kind);
        if mono.is_empty() {
            return Self { kind, basis: mono };
        }
        let n = mono.len();
        let mut d = DMatrix::zeros(n, n);
        for (j, m) in mono.iter().enumerate() {
            let l = reference_moments(kind, |x| m.eval(x));
            for i in 0..n {
                d[(i, j)] = l[i];
            }
        }
        let c = d.try_inverse().expect("reference dof matrix is invertible");
        let basis = (0..n)
            .map(|k| {
                let mut f = AffineField::default();
                for (j, m) in mono.iter().enumerate() {
                    let s = c[(j, k)];
                    for r in 0..2 {
                        f.a[r] += s * m.a[r];
                        for q in 0..2 {
                            f.b[r][q] += s * m.b[r][q];
                        }
                    }
                }
                f
            })
            .collect();
        Self { kind, basis }
    }

    pub fn dofs_per_cell(&self) -> usize {
        self.kind.dofs_per_cell()
    }

    pub fn eval(&self, k: usize, x: [f64; 2]) -> [f64; 2] {
        self.basis[k].eval(x)
    }

    pub fn div(&self, k: usize) -> f64 {
        self.basis[k].div()
    }

    /// Local dof functionals applied to every basis function; the identity.
    pub fn unisolvence_matrix(&self) -> DMatrix<f64> {
        let n = self.basis.len();
        let mut m = DMatrix::zeros(n, n);
        for (j, f) in self.basis.iter().enumerate() {
            let l = reference_moments(self.kind, |x| f.eval(x));
            for i in 0..n {
                m[(i, j)] = l[i];
            }
        }
        m
    }
}

/// Edge-moment dofs of a field on the reference triangle.
pub fn reference_moments(kind: ElementKind, field: impl Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
    let q = EdgeRule::new(6);
    let m = kind.moments_per_edge();
    let mut out = vec![0.0; 3 * m];
    for i in 0..3 {
        let (a, d, n) = reference_edge(i);
        let len = d[0].hypot(d[1]);
        for (&t, &w) in q.points.iter().zip(&q.weights) {
            let v = field([a[0] + t * d[0], a[1] + t * d[1]]);
            let vn = (v[0] * n[0] + v[1] * n[1]) * w * len;
            out[m * i] += vn;
            if m == 2 {
                out[m * i + 1] += vn * (2.0 * t - 1.0);
            }
        }
    }
    out
}

/// Affine map `x = x0 + J x̂` of one cell.
#[derive(Debug, Clone, Copy)]
pub struct CellGeometry {
    pub x0: [f64; 2],
    pub jac: [[f64; 2]; 2],
    pub det: f64,
    pub jac_inv: [[f64; 2]; 2],
}

impl CellGeometry {
    pub fn new(v: [[f64; 2]; 3]) -> Option<Self> {
        let jac = [
            [v[1][0] - v[0][0], v[2][0] - v[0][0]],
            [v[1][1] - v[0][1], v[2][1] - v[0][1]],
        ];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() <= f64::EPSILON * (jac[0][0].abs() + jac[1][1].abs()).powi(2) {
            return None;
        }
        let jac_inv = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        Some(Self {
            x0: v[0],
            jac,
            det,
            jac_inv,
        })
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det.abs()
    }

    pub fn map(&self, xh: [f64; 2]) -> [f64; 2] {
        [
            self.x0[0] + self.jac[0][0] * xh[0] + self.jac[0][1] * xh[1],
            self.x0[1] + self.jac[1][0] * xh[0] + self.jac[1][1] * xh[1],
        ]
    }

    /// Contravariant Piola transform of an affine reference field, expressed
    /// as an affine field in physical coordinates.
    pub fn piola(&self, f: &AffineField) -> AffineField {
        let (j, ji, d) = (self.jac, self.jac_inv, self.det);
        let mut b = [[0.0; 2]; 2];
        for (r, row) in b.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                let mut s = 0.0;
                for k in 0..2 {
                    for l in 0..2 {
                        s += j[r][k] * f.b[k][l] * ji[l][c];
                    }
                }
                *entry = s / d;
            }
        }
        let ja = [
            (j[0][0] * f.a[0] + j[0][1] * f.a[1]) / d,
            (j[1][0] * f.a[0] + j[1][1] * f.a[1]) / d,
        ];
        let a = [
            ja[0] - b[0][0] * self.x0[0] - b[0][1] * self.x0[1],
            ja[1] - b[1][0] * self.x0[0] - b[1][1] * self.x0[1],
        ];
        AffineField { a, b }
    }
}

/// Piola map of a single reference value and divergence on cell `cell`.
pub fn piola_map(
    cell: usize,
    vertices: [[f64; 2]; 3],
    v_hat: [f64; 2],
    div_hat: f64,
) -> Result<([f64; 2], f64)> {
    let g = CellGeometry::new(vertices).ok_or(Error::DegenerateCell(cell))?;
    let v = [
        (g.jac[0][0] * v_hat[0] + g.jac[0][1] * v_hat[1]) / g.det,
        (g.jac[1][0] * v_hat[0] + g.jac[1][1] * v_hat[1]) / g.det,
    ];
    Ok((v, div_hat / g.det))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unisolvence_is_identity() {
        for kind in [ElementKind::Bdm1, ElementKind::Rt0] {
            let e = ReferenceElement::new(kind);
            let m = e.unisolvence_matrix();
            let id = DMatrix::<f64>::identity(m.nrows(), m.ncols());
            assert!((m - id).abs().max() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn rt0_is_subspace_of_bdm1_with_constant_divergence() {
        let e = ReferenceElement::new(ElementKind::Rt0);
        for f in &e.basis {
            assert!((f.b[0][0] - f.b[1][1]).abs() < 1e-14);
            assert!(f.b[0][1].abs() < 1e-14 && f.b[1][0].abs() < 1e-14);
        }
        // divergence of the flux basis: total flux over the reference area 1/2
        for k in 0..3 {
            assert!((e.div(k) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_geometry_keeps_values() {
        let e = ReferenceElement::new(ElementKind::Bdm1);
        let g = CellGeometry::new(REF_VERTICES).unwrap();
        for f in &e.basis {
            let p = g.piola(f);
            for x in [[0.2, 0.3], [0.7, 0.1]] {
                let (u, v) = (f.eval(x), p.eval(x));
                assert!((u[0] - v[0]).abs() < 1e-14 && (u[1] - v[1]).abs() < 1e-14);
            }
        }
        let (v, d) = piola_map(0, REF_VERTICES, [1.0, 2.0], 3.0).unwrap();
        assert_eq!((v, d), ([1.0, 2.0], 3.0));
    }

    #[test]
    fn degenerate_cell_rejected() {
        let v = [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]];
        assert!(matches!(piola_map(7, v, [1.0, 0.0], 0.0), Err(Error::DegenerateCell(7))));
    }

    #[test]
    fn scaled_cell_satisfies_gauss_theorem() {
        let s = 0.37;
        let v = [[0.1, 0.2], [0.1 + s, 0.2], [0.1, 0.2 + s]];
        let g = CellGeometry::new(v).unwrap();
        let e = ReferenceElement::new(ElementKind::Bdm1);
        let q = EdgeRule::new(4);
        for f in &e.basis {
            let p = g.piola(f);
            let vol = p.div() * g.area();
            let mut flux = 0.0;
            for i in 0..3 {
                let a = v[(i + 1) % 3];
                let b = v[(i + 2) % 3];
                let d = [b[0] - a[0], b[1] - a[1]];
                let n = [d[1], -d[0]]; // unnormalized; length absorbs ds
                for (&t, &w) in q.points.iter().zip(&q.weights) {
                    let val = p.eval([a[0] + t * d[0], a[1] + t * d[1]]);
                    flux += w * (val[0] * n[0] + val[1] * n[1]);
                }
            }
            assert!((vol - flux).abs() < 1e-12);
        }
    }

    #[test]
    fn physical_rt0_has_unit_flux_on_own_edge() {
        let v = [[0.3, 0.1], [0.9, 0.4], [0.2, 0.8]];
        let g = CellGeometry::new(v).unwrap();
        let e = ReferenceElement::new(ElementKind::Rt0);
        let q = EdgeRule::new(2);
        for k in 0..3 {
            let p = g.piola(&e.basis[k]);
            for i in 0..3 {
                let a = v[(i + 1) % 3];
                let b = v[(i + 2) % 3];
                let d = [b[0] - a[0], b[1] - a[1]];
                let n = [d[1], -d[0]];
                let flux: f64 = q
                    .points
                    .iter()
                    .zip(&q.weights)
                    .map(|(&t, &w)| {
                        let val = p.eval([a[0] + t * d[0], a[1] + t * d[1]]);
                        w * (val[0] * n[0] + val[1] * n[1])
                    })
                    .sum();
                let expect = if i == k { 1.0 } else { 0.0 };
                assert!((flux - expect).abs() < 1e-12);
            }
        }
    }
}
