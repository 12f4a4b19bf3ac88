//! Strongly mass-conservative H(div)-DG discretization of the flux-based
//! multiple-network poroelasticity (MPET) system on the unit square, with a
//! parameter-robust block-diagonal preconditioner for MinRes.
//!
//! Unknowns are ordered `(u; v_1..v_n; p_1..p_n)` with `u` in BDM1, each flux
//! `v_i` in RT0 and each pressure `p_i` in P0.

pub mod assembly;
pub mod benchmarks;
pub mod cli;
pub mod error;
pub mod fespace;
pub mod mesh;
pub mod params;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
