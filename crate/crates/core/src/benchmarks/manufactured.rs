//! Smooth Biot solution on the unit square built from the stream function
//! `φ1 = x²(x−1)²y²(y−1)²` and the pressure `φ2 − 1` with `φ2 = 900 φ1`.

use std::sync::Arc;

use crate::assembly::{BoundaryConditions, ProblemData};
use crate::error::Result;
use crate::params::RescaledParameters;

/// Rescaled parameters of a single-network run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedBiot {
    pub lambda: f64,
    pub r1_inv: f64,
    pub alpha_p: f64,
}

/// Exact fields and data at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactFields {
    pub u: [f64; 2],
    /// `grad_u[i][j] = ∂u_i/∂x_j`
    pub grad_u: [[f64; 2]; 2],
    /// `hess_u[k][i][j] = ∂²u_k/∂x_i∂x_j`
    pub hess_u: [[[f64; 2]; 2]; 2],
    pub p: f64,
    pub v: [f64; 2],
    pub div_v: f64,
    pub f: [f64; 2],
    pub g: f64,
}

/// `s(t) = t²(t−1)²` and its first three derivatives.
fn s(t: f64) -> [f64; 4] {
    [
        t * t * (t - 1.0) * (t - 1.0),
        2.0 * t * (t - 1.0) * (2.0 * t - 1.0),
        12.0 * t * t - 12.0 * t + 2.0,
        24.0 * t - 12.0,
    ]
}

impl ManufacturedBiot {
    pub fn rescaled(&self) -> Result<RescaledParameters> {
        RescaledParameters::biot(self.lambda, self.r1_inv, self.alpha_p)
    }

    pub fn evaluate(&self, x: [f64; 2]) -> ExactFields {
        let [a, a1, a2, a3] = s(x[0]);
        let [b, b1, b2, b3] = s(x[1]);
        let r1 = 1.0 / self.r1_inv;
        let phi2 = 900.0 * a * b;
        let lap_phi2 = 900.0 * (a2 * b + a * b2);
        let u = [a * b1, -a1 * b];
        let grad_u = [[a1 * b1, a * b2], [-a2 * b, -a1 * b1]];
        let hess_u = [
            [[a2 * b1, a1 * b2], [a1 * b2, a * b3]],
            [[-a3 * b, -a2 * b1], [-a2 * b1, -a1 * b2]],
        ];
        let grad_p = [900.0 * a1 * b, 900.0 * a * b1];
        // div u = 0, so −div ε(u) − λ∇div u = −Δu/2
        let lap_u = [a2 * b1 + a * b3, -(a3 * b + a1 * b2)];
        ExactFields {
            u,
            grad_u,
            hess_u,
            p: phi2 - 1.0,
            v: [-r1 * grad_p[0], -r1 * grad_p[1]],
            div_v: -r1 * lap_phi2,
            f: [-0.5 * lap_u[0] + grad_p[0], -0.5 * lap_u[1] + grad_p[1]],
            g: r1 * lap_phi2 - self.alpha_p * (phi2 - 1.0),
        }
    }

    pub fn problem_data(&self) -> ProblemData {
        let (m1, m2) = (*self, *self);
        ProblemData {
            f: Arc::new(move |x| m1.evaluate(x).f),
            g: vec![Arc::new(move |x| m2.evaluate(x).g)],
        }
    }

    /// `u = 0` and `v·n = 0` on the whole boundary.
    pub fn boundary_conditions() -> BoundaryConditions {
        BoundaryConditions::clamped(1)
    }
}

pub fn evaluate_manufactured(m: &ManufacturedBiot, x: [f64; 2]) -> ExactFields {
    m.evaluate(x)
}
