//! Preconditioned MinRes (Lanczos with Givens-rotation updates).

use super::{LinearOperator, Preconditioner, ResidualNorm, SolveReport, SolverConfig};
use crate::sparse::{dot, norm2};

fn residual_norm(op: &dyn LinearOperator, b: &[f64], x: &[f64], scratch: &mut [f64]) -> f64 {
    op.apply(x, scratch);
    scratch.iter_mut().zip(b).for_each(|(r, bi)| *r = bi - *r);
    norm2(scratch)
}

/// Solves `A x = b` from a zero initial guess.
///
/// The recurrence tracks `‖r_j‖_{B}` (the norm induced by the preconditioner)
/// without forming residuals. With [`ResidualNorm::Euclidean`] the true
/// residual is formed every step instead. After the main solve,
/// `cfg.refinement_sweeps` correction solves on the true residual are added;
/// the report describes the main solve only.
pub fn minres_solve(
    op: &dyn LinearOperator,
    pc: &dyn Preconditioner,
    b: &[f64],
    cfg: &SolverConfig,
) -> (Vec<f64>, SolveReport) {
    let (mut x, report) = minres_core(op, pc, b, cfg);
    if !report.converged {
        return (x, report);
    }
    let mut r = vec![0.0; b.len()];
    for _ in 0..cfg.refinement_sweeps {
        op.apply(&x, &mut r);
        r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
        let (d, rep) = minres_core(op, pc, &r, cfg);
        if !rep.converged || rep.history[0] == 0.0 {
            break;
        }
        x.iter_mut().zip(&d).for_each(|(xi, di)| *xi += di);
    }
    (x, report)
}

fn minres_core(
    op: &dyn LinearOperator,
    pc: &dyn Preconditioner,
    b: &[f64],
    cfg: &SolverConfig,
) -> (Vec<f64>, SolveReport) {
    let n = op.dim();
    assert_eq!(b.len(), n, "rhs length");
    let mut x = vec![0.0; n];
    let mut v_prev = vec![0.0; n];
    let mut v = b.to_vec();
    let mut z = vec![0.0; n];
    pc.apply(&v, &mut z);
    let mut gamma = dot(&z, &v).max(0.0).sqrt();
    let mut gamma_prev = 1.0;

    let euclid = cfg.measure_norm == ResidualNorm::Euclidean;
    let mut scratch = vec![0.0; n];
    let r0 = if euclid { norm2(b) } else { gamma };
    let mut history = vec![r0];
    if r0 == 0.0 {
        return (x, SolveReport::finish(history, 0, true));
    }

    let target = cfg.reduction_tol * r0;
    let final_target = cfg.polish_tol.map_or(target, |p| p.min(cfg.reduction_tol) * r0);
    let mut eta = gamma;
    let (mut s_prev, mut s) = (0.0, 0.0);
    let (mut c_prev, mut c) = (1.0, 1.0);
    let mut w_prev = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut az = vec![0.0; n];
    let mut z_next = vec![0.0; n];
    let mut reached: Option<usize> = None;

    for j in 1..=cfg.max_iters {
        if !(gamma > 0.0) {
            break;
        }
        z.iter_mut().for_each(|zi| *zi /= gamma);
        op.apply(&z, &mut az);
        let delta = dot(&az, &z);
        // v_next overwrites v_prev
        for k in 0..n {
            v_prev[k] = az[k] - (delta / gamma) * v[k] - (gamma / gamma_prev) * v_prev[k];
        }
        std::mem::swap(&mut v_prev, &mut v);
        pc.apply(&v, &mut z_next);
        let gamma_next = dot(&z_next, &v).max(0.0).sqrt();

        let a0 = c * delta - c_prev * s * gamma;
        let a1 = (a0 * a0 + gamma_next * gamma_next).sqrt();
        let a2 = s * delta + c_prev * c * gamma;
        let a3 = s_prev * gamma;
        let (c_next, s_next) = (a0 / a1, gamma_next / a1);
        // w_next overwrites w_prev
        for k in 0..n {
            w_prev[k] = (z[k] - a3 * w_prev[k] - a2 * w[k]) / a1;
        }
        std::mem::swap(&mut w_prev, &mut w);
        for k in 0..n {
            x[k] += c_next * eta * w[k];
        }
        eta *= -s_next;

        gamma_prev = gamma;
        gamma = gamma_next;
        std::mem::swap(&mut z, &mut z_next);
        c_prev = c;
        c = c_next;
        s_prev = s;
        s = s_next;

        let res = if euclid {
            residual_norm(op, b, &x, &mut scratch)
        } else {
            eta.abs()
        };
        history.push(res);
        if reached.is_none() && res <= target {
            reached = Some(j);
        }
        if res <= final_target || !res.is_finite() {
            break;
        }
    }
    match reached {
        Some(k) => (x, SolveReport::finish(history, k, true)),
        None => {
            let k = history.len() - 1;
            (x, SolveReport::finish(history, k, false))
        }
    }
}
