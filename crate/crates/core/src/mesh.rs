//! Structured triangulation of the unit square.
//!
//! Each of the N×N squares is split by its lower-left to upper-right diagonal.
//! Cells are stored counterclockwise. Local edge `i` of a cell is opposite
//! local vertex `i` and runs from vertex `(i+1)%3` to `(i+2)%3`, so its outward
//! normal is the clockwise rotation of that direction. Global edges run from
//! the lower to the higher vertex index and carry the normal obtained the same
//! way; `cell_edges` records `+1` where the two agree.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Segment {
    /// Γ1, y = 0
    Bottom,
    /// Γ2, x = 1
    Right,
    /// Γ3, y = 1
    Top,
    /// Γ4, x = 0
    Left,
}

impl Segment {
    pub const ALL: [Segment; 4] = [Segment::Bottom, Segment::Right, Segment::Top, Segment::Left];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub n_subdiv: usize,
    pub vertices: Vec<[f64; 2]>,
    pub cells: Vec<[usize; 3]>,
    /// Vertex pairs `(lo, hi)` with `lo < hi`.
    pub edges: Vec<[usize; 2]>,
    /// Unit normal of each edge, the clockwise rotation of `x_hi - x_lo`.
    pub edge_normals: Vec<[f64; 2]>,
    /// Per cell, local edge `i` → (global edge, orientation sign).
    pub cell_edges: Vec<[(usize, f64); 3]>,
    /// Per edge, incident (cell, local edge) pairs; the `+1` cell comes first.
    pub edge_cells: Vec<Vec<(usize, usize)>>,
    pub interior_edges: Vec<usize>,
    pub boundary_edges: Vec<usize>,
    boundary_tags: Vec<Option<Segment>>,
    pub edge_lengths: Vec<f64>,
    pub cell_areas: Vec<f64>,
}

pub fn build_structured_mesh(n: usize) -> Result<Mesh> {
    if n < 1 {
        return Err(Error::InvalidMesh("N must be >= 1".into()));
    }
    let nv = n + 1;
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity(nv * nv);
    for j in 0..nv {
        for i in 0..nv {
            vertices.push([i as f64 * h, j as f64 * h]);
        }
    }
    let vid = |i: usize, j: usize| j * nv + i;
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v01, v11) = (vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1));
            cells.push([v00, v10, v11]);
            cells.push([v00, v11, v01]);
        }
    }

    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut cell_edges = Vec::with_capacity(cells.len());
    let mut edge_cells: Vec<Vec<(usize, usize)>> = Vec::new();
    for (c, cell) in cells.iter().enumerate() {
        let mut local = [(0usize, 0.0f64); 3];
        for (i, slot) in local.iter_mut().enumerate() {
            let a = cell[(i + 1) % 3];
            let b = cell[(i + 2) % 3];
            let key = (a.min(b), a.max(b));
            let e = *edge_index.entry(key).or_insert_with(|| {
                edges.push([key.0, key.1]);
                edge_cells.push(Vec::new());
                edges.len() - 1
            });
            let sign = if a < b { 1.0 } else { -1.0 };
            *slot = (e, sign);
            edge_cells[e].push((c, i));
        }
        cell_edges.push(local);
    }

    let mut edge_normals = Vec::with_capacity(edges.len());
    let mut edge_lengths = Vec::with_capacity(edges.len());
    for &[a, b] in &edges {
        let t = [vertices[b][0] - vertices[a][0], vertices[b][1] - vertices[a][1]];
        let len = t[0].hypot(t[1]);
        edge_lengths.push(len);
        edge_normals.push([t[1] / len, -t[0] / len]);
    }
    for inc in edge_cells.iter_mut() {
        inc.sort_by(|x, y| {
            let sx = cell_edges[x.0][x.1].1;
            let sy = cell_edges[y.0][y.1].1;
            sy.partial_cmp(&sx).unwrap()
        });
    }

    let mut interior_edges = Vec::new();
    let mut boundary_edges = Vec::new();
    let mut boundary_tags = vec![None; edges.len()];
    for (e, inc) in edge_cells.iter().enumerate() {
        if inc.len() == 2 {
            interior_edges.push(e);
        } else {
            boundary_edges.push(e);
            let [a, b] = edges[e];
            let m = [
                0.5 * (vertices[a][0] + vertices[b][0]),
                0.5 * (vertices[a][1] + vertices[b][1]),
            ];
            boundary_tags[e] = Some(segment_of_point(m));
        }
    }

    let cell_areas = cells
        .iter()
        .map(|c| {
            let (p0, p1, p2) = (vertices[c[0]], vertices[c[1]], vertices[c[2]]);
            0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
        })
        .collect();

    Ok(Mesh {
        n_subdiv: n,
        vertices,
        cells,
        edges,
        edge_normals,
        cell_edges,
        edge_cells,
        interior_edges,
        boundary_edges,
        boundary_tags,
        edge_lengths,
        cell_areas,
    })
}

fn segment_of_point(m: [f64; 2]) -> Segment {
    const TOL: f64 = 1e-12;
    if m[1].abs() < TOL {
        Segment::Bottom
    } else if (m[0] - 1.0).abs() < TOL {
        Segment::Right
    } else if (m[1] - 1.0).abs() < TOL {
        Segment::Top
    } else {
        Segment::Left
    }
}

impl Mesh {
    pub fn h(&self) -> f64 {
        1.0 / self.n_subdiv as f64
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_boundary(&self, edge: usize) -> bool {
        self.boundary_tags[edge].is_some()
    }

    pub fn boundary_segment(&self, edge: usize) -> Result<Segment> {
        self.boundary_tags
            .get(edge)
            .copied()
            .flatten()
            .ok_or(Error::InteriorEdge(edge))
    }

    pub fn cell_vertices(&self, c: usize) -> [[f64; 2]; 3] {
        let v = self.cells[c];
        [self.vertices[v[0]], self.vertices[v[1]], self.vertices[v[2]]]
    }

    pub fn edge_vertices(&self, e: usize) -> [[f64; 2]; 2] {
        let [a, b] = self.edges[e];
        [self.vertices[a], self.vertices[b]]
    }

    pub fn edge_midpoint(&self, e: usize) -> [f64; 2] {
        let [a, b] = self.edge_vertices(e);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    /// Unit tangent from the lower to the higher vertex.
    pub fn edge_tangent(&self, e: usize) -> [f64; 2] {
        let n = self.edge_normals[e];
        [-n[1], n[0]]
    }

    /// Outward normal of a boundary edge and the sign relating it to the global normal.
    pub fn outward_normal(&self, e: usize) -> ([f64; 2], f64) {
        let (c, i) = self.edge_cells[e][0];
        let s = self.cell_edges[c][i].1;
        let n = self.edge_normals[e];
        ([s * n[0], s * n[1]], s)
    }

    /// Plain-text dump: vertex count, vertices, cell count, cells.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vertices {}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(out, "{:.17e} {:.17e}", v[0], v[1]);
        }
        let _ = writeln!(out, "cells {}", self.cells.len());
        for c in &self.cells {
            let _ = writeln!(out, "{} {} {}", c[0], c[1], c[2]);
        }
        out
    }
}
