//! Block operator, right-hand side, preconditioner blocks and norm Gram
//! matrices of the H(div)-DG discretization.
//!
//! Full-space unknowns are laid out as `(u; v_1..v_n; p_1..p_n)`. Essential
//! normal-trace conditions (u·n on displacement-Dirichlet segments, v_i·n on
//! flux segments) are imposed by eliminating the corresponding dofs; the
//! assembled [`BlockSystem`] acts on the remaining free dofs, which keep the
//! same block order.

pub mod forms;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fespace::{
    edge_moments, integrate_cell, EdgeRule, ElementKind, FeSpace, TriangleRule,
};
use crate::mesh::{build_structured_mesh, Mesh, Segment};
use crate::params::{LambdaMatrices, RescaledParameters};
use crate::sparse::{CsrMatrix, TripletBuilder};

pub type ScalarFn = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>;

pub fn constant_scalar(c: f64) -> ScalarFn {
    Arc::new(move |_| c)
}

pub fn constant_vector(c: [f64; 2]) -> VectorFn {
    Arc::new(move |_| c)
}

/// Displacement boundary data: Dirichlet and traction segments.
#[derive(Clone, Default)]
pub struct DisplacementBc {
    pub dirichlet: Vec<(Segment, VectorFn)>,
    pub traction: Vec<(Segment, VectorFn)>,
}

/// Per-network boundary data: prescribed normal flux `v·n` (outward) or pressure.
#[derive(Clone, Default)]
pub struct NetworkBc {
    pub flux: Vec<(Segment, ScalarFn)>,
    pub pressure: Vec<(Segment, ScalarFn)>,
}

#[derive(Clone, Default)]
pub struct BoundaryConditions {
    pub displacement: DisplacementBc,
    pub networks: Vec<NetworkBc>,
}

fn cover_check<A, B>(what: &str, a: &[(Segment, A)], b: &[(Segment, B)]) -> Result<()> {
    let mut seen = [0usize; 4];
    for s in a.iter().map(|x| x.0).chain(b.iter().map(|x| x.0)) {
        seen[s.index()] += 1;
    }
    for s in Segment::ALL {
        match seen[s.index()] {
            1 => {}
            0 => return Err(Error::Boundary(format!("{what}: segment {s:?} has no condition"))),
            _ => return Err(Error::Boundary(format!("{what}: segment {s:?} has overlapping conditions"))),
        }
    }
    Ok(())
}

impl BoundaryConditions {
    /// Homogeneous clamped displacement and no-flux networks.
    pub fn clamped(n: usize) -> Self {
        let zero_v = constant_vector([0.0, 0.0]);
        let zero_s = constant_scalar(0.0);
        Self {
            displacement: DisplacementBc {
                dirichlet: Segment::ALL.iter().map(|&s| (s, zero_v.clone())).collect(),
                traction: Vec::new(),
            },
            networks: (0..n)
                .map(|_| NetworkBc {
                    flux: Segment::ALL.iter().map(|&s| (s, zero_s.clone())).collect(),
                    pressure: Vec::new(),
                })
                .collect(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.networks.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} network boundary descriptors for {n} networks",
                self.networks.len()
            )));
        }
        cover_check("displacement", &self.displacement.dirichlet, &self.displacement.traction)?;
        for (i, nb) in self.networks.iter().enumerate() {
            cover_check(&format!("network {}", i + 1), &nb.flux, &nb.pressure)?;
        }
        Ok(())
    }

    /// A network whose boundary is entirely of flux type has pressure only up to a constant.
    pub fn is_pure_flux(&self, i: usize) -> bool {
        self.networks[i].pressure.is_empty()
    }

    fn displacement_dirichlet(&self, s: Segment) -> Option<&VectorFn> {
        self.displacement.dirichlet.iter().find(|x| x.0 == s).map(|x| &x.1)
    }

    fn traction(&self, s: Segment) -> Option<&VectorFn> {
        self.displacement.traction.iter().find(|x| x.0 == s).map(|x| &x.1)
    }
}

#[derive(Clone)]
pub struct AssemblyConfig {
    /// Interior penalty parameter η.
    pub penalty: f64,
    /// Quadrature degree for bilinear forms.
    pub quad_degree: usize,
    /// Quadrature degree for loads and sources.
    pub rhs_quad_degree: usize,
    pub bcs: BoundaryConditions,
}

impl AssemblyConfig {
    pub fn new(bcs: BoundaryConditions) -> Self {
        Self {
            penalty: 10.0,
            quad_degree: 4,
            rhs_quad_degree: 10,
            bcs,
        }
    }
}

/// Volume load and network sources.
#[derive(Clone)]
pub struct ProblemData {
    pub f: VectorFn,
    pub g: Vec<ScalarFn>,
}

impl ProblemData {
    pub fn zero(n: usize) -> Self {
        Self {
            f: constant_vector([0.0, 0.0]),
            g: (0..n).map(|_| constant_scalar(0.0)).collect(),
        }
    }
}

/// Mesh and the three spaces built on it.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Mesh,
    pub u: FeSpace,
    pub v: FeSpace,
    pub p: FeSpace,
}

impl Discretization {
    pub fn new(n_subdiv: usize) -> Result<Self> {
        let mesh = build_structured_mesh(n_subdiv)?;
        Self::on(mesh)
    }

    pub fn on(mesh: Mesh) -> Result<Self> {
        let u = FeSpace::new(&mesh, ElementKind::Bdm1)?;
        let v = FeSpace::new(&mesh, ElementKind::Rt0)?;
        let p = FeSpace::new(&mesh, ElementKind::P0)?;
        Ok(Self { mesh, u, v, p })
    }

    /// Boundary edges flagged for displacement Dirichlet conditions.
    pub fn displacement_dirichlet_edges(&self, bcs: &BoundaryConditions) -> Vec<bool> {
        let m = &self.mesh;
        (0..m.n_edges())
            .map(|e| match m.boundary_segment(e) {
                Ok(s) => bcs.displacement_dirichlet(s).is_some(),
                Err(_) => false,
            })
            .collect()
    }
}

/// `a_h(u, w) + λ (div u, div w)` with DG terms on interior and
/// displacement-Dirichlet edges.
pub fn assemble_elasticity_dg(
    disc: &Discretization,
    cfg: &AssemblyConfig,
    lambda: f64,
) -> CsrMatrix {
    let flags = disc.displacement_dirichlet_edges(&cfg.bcs);
    let edges = forms::dg_edges(&disc.mesh, &flags);
    let ah = forms::dg_elasticity(&disc.mesh, &disc.u, &edges, cfg.penalty, cfg.quad_degree);
    let dd = forms::div_div(&disc.mesh, &disc.u);
    forms::add(&ah, &dd, lambda)
}

/// Flux blocks: `M_v,i = R_i⁻¹ · (RT0 mass)` and the divergence `B_v`.
pub struct FluxBlocks {
    pub mass: Vec<CsrMatrix>,
    pub unit_mass: CsrMatrix,
    pub div: CsrMatrix,
}

pub fn assemble_flux_blocks(disc: &Discretization, rp: &RescaledParameters, degree: usize) -> FluxBlocks {
    let unit_mass = forms::vector_mass(&disc.mesh, &disc.v, degree);
    let mass = rp.r_inv.iter().map(|&r| unit_mass.scaled(r)).collect();
    FluxBlocks {
        mass,
        unit_mass,
        div: forms::divergence(&disc.mesh, &disc.v),
    }
}

/// `−((Λ1+Λ2) p, q)` on the n stacked P0 spaces.
pub fn assemble_pressure_block(disc: &Discretization, lm: &LambdaMatrices) -> CsrMatrix {
    forms::kron(&(-lm.coupling()), &forms::p0_mass(&disc.mesh))
}

/// Sizes of the full-space blocks and the free-dof numbering.
#[derive(Debug, Clone)]
pub struct BlockLayout {
    pub n: usize,
    pub n_u: usize,
    pub n_v: usize,
    pub n_p: usize,
    /// Full index of each free dof, ascending.
    pub free: Vec<usize>,
    /// Free index of each full dof, `usize::MAX` when constrained.
    pub full_to_free: Vec<usize>,
    /// Free-numbering start of u, v_1..v_n, p_1..p_n and the end.
    pub free_offsets: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    U,
    V(usize),
    P(usize),
}

impl BlockLayout {
    pub fn n_full(&self) -> usize {
        self.n_u + self.n * (self.n_v + self.n_p)
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn full_offset(&self, b: Block) -> usize {
        match b {
            Block::U => 0,
            Block::V(i) => self.n_u + i * self.n_v,
            Block::P(i) => self.n_u + self.n * self.n_v + i * self.n_p,
        }
    }

    fn block_index(&self, b: Block) -> usize {
        match b {
            Block::U => 0,
            Block::V(i) => 1 + i,
            Block::P(i) => 1 + self.n + i,
        }
    }

    /// Range of a block in the free numbering.
    pub fn free_range(&self, b: Block) -> std::ops::Range<usize> {
        let k = self.block_index(b);
        self.free_offsets[k]..self.free_offsets[k + 1]
    }

    /// Free range of the u block, all flux blocks, and all pressure blocks.
    pub fn field_ranges(&self) -> [std::ops::Range<usize>; 3] {
        let o = &self.free_offsets;
        [o[0]..o[1], o[1]..o[1 + self.n], o[1 + self.n]..o[1 + 2 * self.n]]
    }

    /// Full-space range of one block.
    pub fn full_range(&self, b: Block) -> std::ops::Range<usize> {
        let s = self.full_offset(b);
        let len = match b {
            Block::U => self.n_u,
            Block::V(_) => self.n_v,
            Block::P(_) => self.n_p,
        };
        s..s + len
    }
}

/// Full-space sub-blocks kept for post-processing and time stepping.
#[derive(Debug, Clone)]
pub struct OperatorBlocks {
    pub a_uu: CsrMatrix,
    /// `(div u, q)`: P0 × BDM1.
    pub b_u: CsrMatrix,
    pub flux_mass: CsrMatrix,
    /// `(div v, q)`: P0 × RT0.
    pub b_v: CsrMatrix,
    pub p_mass: CsrMatrix,
    /// Unweighted `(div v, div z)` on RT0.
    pub flux_div_div: CsrMatrix,
    pub c_pp: CsrMatrix,
}

/// The assembled operator on free dofs and its right-hand side.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub layout: BlockLayout,
    /// Full-space operator (all dofs).
    pub full: CsrMatrix,
    /// Free-dof operator.
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Values of constrained dofs (zero at free positions).
    pub constrained: Vec<f64>,
    pub blocks: OperatorBlocks,
    /// Per network: pressure determined up to a constant.
    pub mean_zero: Vec<bool>,
    /// P0 cell areas, the weights of the constant pressure mode.
    pub areas: Vec<f64>,
}

pub fn assemble_full_operator(
    disc: &Discretization,
    rp: &RescaledParameters,
    lm: &LambdaMatrices,
    cfg: &AssemblyConfig,
) -> Result<BlockSystem> {
    let n = rp.n;
    if lm.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "parameter matrices of size {} for {n} networks",
            lm.n()
        )));
    }
    cfg.bcs.validate(n)?;
    let mesh = &disc.mesh;
    let a_uu = assemble_elasticity_dg(disc, cfg, rp.lambda);
    let flux = assemble_flux_blocks(disc, rp, cfg.quad_degree);
    let b_u = forms::divergence(mesh, &disc.u);
    let c_pp = assemble_pressure_block(disc, lm);
    let p_mass = forms::p0_mass(mesh);
    let flux_div_div = forms::div_div(mesh, &disc.v);

    let (n_u, n_v, n_p) = (disc.u.n_dofs(), disc.v.n_dofs(), disc.p.n_dofs());
    let mut layout = BlockLayout {
        n,
        n_u,
        n_v,
        n_p,
        free: Vec::new(),
        full_to_free: Vec::new(),
        free_offsets: Vec::new(),
    };
    let n_full = layout.n_full();

    let b_ut = b_u.transpose();
    let b_vt = flux.div.transpose();
    let mut t = TripletBuilder::new(n_full, n_full);
    t.add_block(0, 0, &a_uu, 1.0);
    for i in 0..n {
        let ov = layout.full_offset(Block::V(i));
        let op = layout.full_offset(Block::P(i));
        t.add_block(ov, ov, &flux.mass[i], 1.0);
        t.add_block(0, op, &b_ut, -1.0);
        t.add_block(op, 0, &b_u, -1.0);
        t.add_block(ov, op, &b_vt, -1.0);
        t.add_block(op, ov, &flux.div, -1.0);
    }
    t.add_block(layout.full_offset(Block::P(0)), layout.full_offset(Block::P(0)), &c_pp, 1.0);
    let full = t.build();

    // essential dofs and their values
    let mut constrained = vec![0.0; n_full];
    let mut is_constrained = vec![false; n_full];
    let q = EdgeRule::new(cfg.rhs_quad_degree);
    for &e in &mesh.boundary_edges {
        let seg = mesh.boundary_segment(e)?;
        if let Some(ud) = cfg.bcs.displacement_dirichlet(seg) {
            let (g0, g1) = edge_moments(mesh, e, &q, &|x| ud(x));
            constrained[2 * e] = g0;
            constrained[2 * e + 1] = g1;
            is_constrained[2 * e] = true;
            is_constrained[2 * e + 1] = true;
        }
        let (_, s_out) = mesh.outward_normal(e);
        for i in 0..n {
            if let Some((_, qn)) = cfg.bcs.networks[i].flux.iter().find(|x| x.0 == seg) {
                let (g0, _) = edge_moments(mesh, e, &q, &|x| {
                    let nn = mesh.edge_normals[e];
                    let val = s_out * qn(x);
                    [val * nn[0], val * nn[1]]
                });
                let k = layout.full_offset(Block::V(i)) + e;
                constrained[k] = g0;
                is_constrained[k] = true;
            }
        }
    }

    let mut full_to_free = vec![usize::MAX; n_full];
    let mut free = Vec::with_capacity(n_full);
    for k in 0..n_full {
        if !is_constrained[k] {
            full_to_free[k] = free.len();
            free.push(k);
        }
    }
    let mut offsets = Vec::with_capacity(2 * n + 2);
    let blocks: Vec<Block> = std::iter::once(Block::U)
        .chain((0..n).map(Block::V))
        .chain((0..n).map(Block::P))
        .collect();
    for b in &blocks {
        let start = layout.full_offset(*b);
        offsets.push(free.partition_point(|&k| k < start));
    }
    offsets.push(free.len());
    layout.free = free;
    layout.full_to_free = full_to_free;
    layout.free_offsets = offsets;

    let matrix = full.select(&layout.free, &layout.full_to_free, layout.n_free());
    let mean_zero = (0..n).map(|i| cfg.bcs.is_pure_flux(i)).collect();
    let mut sys = BlockSystem {
        layout,
        full,
        matrix,
        rhs: Vec::new(),
        constrained,
        blocks: OperatorBlocks {
            a_uu,
            b_u,
            flux_mass: flux.unit_mass,
            b_v: flux.div,
            p_mass,
            flux_div_div,
            c_pp,
        },
        mean_zero,
        areas: mesh.cell_areas.clone(),
    };
    sys.load(&vec![0.0; n_full]);
    Ok(sys)
}

impl BlockSystem {
    pub fn n(&self) -> usize {
        self.layout.n
    }

    pub fn dim(&self) -> usize {
        self.layout.n_free()
    }

    /// Sets the free right-hand side from a full-space load vector, lifting
    /// the constrained values.
    pub fn load(&mut self, full_rhs: &[f64]) {
        self.rhs = self.free_rhs(full_rhs);
    }

    /// Free right-hand side of a full-space load vector (lifted and projected).
    pub fn free_rhs(&self, full_rhs: &[f64]) -> Vec<f64> {
        let ax = self.full.mul(&self.constrained);
        let mut rhs: Vec<f64> = self
            .layout
            .free
            .iter()
            .map(|&k| full_rhs[k] - ax[k])
            .collect();
        self.project_dual(&mut rhs);
        rhs
    }

    /// Free-dof vector → full-space vector including constrained values.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut full = self.constrained.clone();
        for (k, &i) in self.layout.free.iter().enumerate() {
            full[i] = x[k];
        }
        full
    }

    /// Full-space vector → free dofs.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.layout.free.iter().map(|&k| full[k]).collect()
    }

    pub fn has_constraints(&self) -> bool {
        self.mean_zero.iter().any(|&b| b)
    }

    /// Removes the area-weighted mean from each mean-zero pressure block.
    pub fn project_primal<'a>(&self, x: &'a mut [f64]) -> &'a mut [f64] {
        let total: f64 = self.areas.iter().sum();
        for (i, &mz) in self.mean_zero.iter().enumerate() {
            if mz {
                let r = self.layout.free_range(Block::P(i));
                let xs = &mut x[r];
                let mean = xs.iter().zip(&self.areas).map(|(a, w)| a * w).sum::<f64>() / total;
                xs.iter_mut().for_each(|v| *v -= mean);
            }
        }
        x
    }

    /// Adjoint projector: removes the sum from each mean-zero pressure block,
    /// distributed by area.
    pub fn project_dual<'a>(&self, r: &'a mut [f64]) -> &'a mut [f64] {
        let total: f64 = self.areas.iter().sum();
        for (i, &mz) in self.mean_zero.iter().enumerate() {
            if mz {
                let rg = self.layout.free_range(Block::P(i));
                let rs = &mut r[rg];
                let s: f64 = rs.iter().sum();
                rs.iter_mut().zip(&self.areas).for_each(|(v, w)| *v -= s * w / total);
            }
        }
        r
    }

    /// `y = Pᵀ A P x` on free dofs.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        if self.has_constraints() {
            let mut xp = x.to_vec();
            self.project_primal(&mut xp);
            self.matrix.matvec(&xp, y);
            self.project_dual(y);
        } else {
            self.matrix.matvec(x, y);
        }
    }

    /// Extracts one block of a free-dof vector as a full-space block vector.
    pub fn block_full(&self, x: &[f64], b: Block) -> Vec<f64> {
        let full = self.expand(x);
        full[self.layout.full_range(b)].to_vec()
    }
}

/// Full-space load vector: `(f, w)`, tractions, Nitsche lift of tangential
/// displacement data, pressure-Dirichlet flux terms and sources `(g_i, q)`.
pub fn assemble_rhs(
    disc: &Discretization,
    data: &ProblemData,
    cfg: &AssemblyConfig,
    n: usize,
) -> Result<Vec<f64>> {
    cfg.bcs.validate(n)?;
    if data.g.len() != n {
        return Err(Error::DimensionMismatch(format!("{} sources for {n} networks", data.g.len())));
    }
    let mesh = &disc.mesh;
    let (n_u, n_v, n_p) = (disc.u.n_dofs(), disc.v.n_dofs(), disc.p.n_dofs());
    let mut out = vec![0.0; n_u + n * (n_v + n_p)];
    let tri = TriangleRule::new(cfg.rhs_quad_degree);
    let eq = EdgeRule::new(cfg.rhs_quad_degree);

    for c in 0..mesh.n_cells() {
        let g = crate::fespace::CellGeometry::new(mesh.cell_vertices(c)).ok_or(Error::DegenerateCell(c))?;
        let basis = disc.u.cell_basis(c);
        let dofs = disc.u.dofmap.cell(c);
        for (&xh, &w) in tri.points.iter().zip(&tri.weights) {
            let x = g.map(xh);
            let fx = (data.f)(x);
            let wx = w * g.det.abs();
            for (phi, &k) in basis.iter().zip(dofs) {
                let v = phi.eval(x);
                out[k] += wx * (fx[0] * v[0] + fx[1] * v[1]);
            }
        }
        for i in 0..n {
            let off = n_u + n * n_v + i * n_p;
            out[off + c] += integrate_cell(mesh, c, &tri, |x| (data.g[i])(x));
        }
    }

    for &e in &mesh.boundary_edges {
        let seg = mesh.boundary_segment(e)?;
        let (nrm, _) = mesh.outward_normal(e);
        let t = [-nrm[1], nrm[0]];
        let (c, _) = mesh.edge_cells[e][0];
        let he = mesh.edge_lengths[e];
        let [a, b] = mesh.edge_vertices(e);
        let at = |s: f64| [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
        let ub = disc.u.cell_basis(c);
        let ud = disc.u.dofmap.cell(c);
        let traction = cfg.bcs.traction(seg);
        let dirichlet = cfg.bcs.displacement_dirichlet(seg);
        for (&s, &w) in eq.points.iter().zip(&eq.weights) {
            let x = at(s);
            let wl = w * he;
            if let Some(gn) = traction {
                let gv = gn(x);
                for (phi, &k) in ub.iter().zip(ud) {
                    let v = phi.eval(x);
                    out[k] += wl * (gv[0] * v[0] + gv[1] * v[1]);
                }
            }
            if let Some(u_d) = dirichlet {
                let uv = u_d(x);
                let udt = uv[0] * t[0] + uv[1] * t[1];
                for (phi, &k) in ub.iter().zip(ud) {
                    let v = phi.eval(x);
                    let en = {
                        let eps = phi.strain();
                        [eps[0][0] * nrm[0] + eps[0][1] * nrm[1], eps[1][0] * nrm[0] + eps[1][1] * nrm[1]]
                    };
                    let wt = v[0] * t[0] + v[1] * t[1];
                    out[k] += wl * (-udt * (en[0] * t[0] + en[1] * t[1]) + cfg.penalty / he * udt * wt);
                }
            }
        }
        let vb = disc.v.cell_basis(c);
        let vd = disc.v.dofmap.cell(c);
        for i in 0..n {
            if let Some((_, pd)) = cfg.bcs.networks[i].pressure.iter().find(|x| x.0 == seg) {
                let off = n_u + i * n_v;
                for (&s, &w) in eq.points.iter().zip(&eq.weights) {
                    let x = at(s);
                    let pv = pd(x);
                    for (phi, &k) in vb.iter().zip(vd) {
                        let v = phi.eval(x);
                        out[off + k] -= w * he * pv * (v[0] * nrm[0] + v[1] * nrm[1]);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The three diagonal blocks of the preconditioner on free dofs.
#[derive(Debug, Clone)]
pub struct PreconditionerBlocks {
    pub u: CsrMatrix,
    pub v: CsrMatrix,
    pub p: CsrMatrix,
}

/// Flux-norm Gram on the n stacked full RT0 spaces:
/// `(i,i) = R_i⁻¹ M + γ̃_ii D`, `(i,j) = γ̃_ij D`.
fn flux_gram(sys: &BlockSystem, rp: &RescaledParameters, lm: &LambdaMatrices) -> CsrMatrix {
    let n = rp.n;
    let nv = sys.layout.n_v;
    let mut t = TripletBuilder::new(n * nv, n * nv);
    for i in 0..n {
        t.add_block(i * nv, i * nv, &sys.blocks.flux_mass, rp.r_inv[i]);
        for j in 0..n {
            let g = lm.gamma_tilde()[(i, j)];
            if g != 0.0 {
                t.add_block(i * nv, j * nv, &sys.blocks.flux_div_div, g);
            }
        }
    }
    t.build()
}

fn pressure_gram(sys: &BlockSystem, lm: &LambdaMatrices) -> CsrMatrix {
    forms::kron(lm.gamma(), &sys.blocks.p_mass)
}

/// Restricts a full-space matrix on the block range `[start, start+len)` of
/// the full numbering to its free dofs.
fn restrict_range(sys: &BlockSystem, m: &CsrMatrix, start: usize, len: usize) -> CsrMatrix {
    let rows: Vec<usize> = (0..len)
        .filter(|&k| sys.layout.full_to_free[start + k] != usize::MAX)
        .collect();
    let mut map = vec![usize::MAX; len];
    for (new, &old) in rows.iter().enumerate() {
        map[old] = new;
    }
    m.select(&rows, &map, rows.len())
}

pub fn assemble_preconditioner_blocks(
    sys: &BlockSystem,
    rp: &RescaledParameters,
    lm: &LambdaMatrices,
) -> PreconditionerBlocks {
    let l = &sys.layout;
    let u = restrict_range(sys, &sys.blocks.a_uu, 0, l.n_u);
    let v = restrict_range(sys, &flux_gram(sys, rp, lm), l.full_offset(Block::V(0)), l.n * l.n_v);
    let p = restrict_range(sys, &pressure_gram(sys, lm), l.full_offset(Block::P(0)), l.n * l.n_p);
    PreconditionerBlocks { u, v, p }
}

/// Gram matrices of `‖·‖_{U_h}`, `‖·‖_V`, `‖·‖_P` on full-space block vectors.
#[derive(Debug, Clone)]
pub struct NormGrams {
    pub u: CsrMatrix,
    pub v: CsrMatrix,
    pub p: CsrMatrix,
}

pub fn assemble_norm_grams(
    disc: &Discretization,
    sys: &BlockSystem,
    rp: &RescaledParameters,
    lm: &LambdaMatrices,
    cfg: &AssemblyConfig,
) -> NormGrams {
    let flags = disc.displacement_dirichlet_edges(&cfg.bcs);
    let edges = forms::dg_edges(&disc.mesh, &flags);
    let gg = forms::grad_grad(&disc.mesh, &disc.u);
    let jumps = forms::edge_jump_form(&disc.mesh, &disc.u, &edges, 1.0, false, cfg.quad_degree);
    let dd = forms::div_div(&disc.mesh, &disc.u);
    let u = forms::add(&forms::add(&gg, &jumps, 1.0), &dd, rp.lambda);
    NormGrams {
        u,
        v: flux_gram(sys, rp, lm),
        p: pressure_gram(sys, lm),
    }
}

impl NormGrams {
    fn quad(m: &CsrMatrix, x: &[f64]) -> f64 {
        crate::sparse::dot(x, &m.mul(x)).max(0.0).sqrt()
    }

    /// `(‖p‖_P, ‖v‖_V, ‖u‖_{U_h})` of a full-space vector.
    pub fn norms(&self, sys: &BlockSystem, full: &[f64]) -> (f64, f64, f64) {
        let l = &sys.layout;
        let u = &full[0..l.n_u];
        let vs = l.full_offset(Block::V(0));
        let v = &full[vs..vs + l.n * l.n_v];
        let ps = l.full_offset(Block::P(0));
        let p = &full[ps..ps + l.n * l.n_p];
        (Self::quad(&self.p, p), Self::quad(&self.v, v), Self::quad(&self.u, u))
    }
}
