//! Gauss rules on the reference interval [0,1] and the reference triangle
//! with vertices (0,0), (1,0), (0,1). Triangle rules are collapsed tensor
//! Gauss–Legendre rules.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Gauss–Legendre nodes and weights mapped to [0,1]; weights sum to 1.
fn legendre_unit(points: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(points.max(1)).unwrap());
    let mut pw: Vec<(f64, f64)> = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    pw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pw
}

#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub degree: usize,
    /// Parameters in [0,1].
    pub points: Vec<f64>,
    /// Weights summing to 1.
    pub weights: Vec<f64>,
}

impl EdgeRule {
    /// Exact for polynomials of degree ≤ `degree`.
    pub fn new(degree: usize) -> Self {
        let pw = legendre_unit(degree / 2 + 1);
        Self {
            degree,
            points: pw.iter().map(|p| p.0).collect(),
            weights: pw.iter().map(|p| p.1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub degree: usize,
    pub points: Vec<[f64; 2]>,
    /// Weights summing to the reference area 1/2.
    pub weights: Vec<f64>,
}

impl TriangleRule {
    /// Exact for polynomials of total degree ≤ `degree`.
    pub fn new(degree: usize) -> Self {
        // x = s, y = t(1-s): the Jacobian (1-s) raises the degree in s by one
        let pw = legendre_unit((degree + 2).div_ceil(2));
        let mut points = Vec::with_capacity(pw.len() * pw.len());
        let mut weights = Vec::with_capacity(pw.len() * pw.len());
        for &(s, ws) in &pw {
            for &(t, wt) in &pw {
                points.push([s, t * (1.0 - s)]);
                weights.push(ws * wt * (1.0 - s));
            }
        }
        Self {
            degree,
            points,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
