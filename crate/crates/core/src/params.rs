//! Physical and rescaled model parameters and the parameter matrices
//! Λ1..Λ4, Λ = Λ1 + Λ2 + Λ3 + Λ4 and Λ⁻¹.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Physical MPET coefficients.
///
/// `beta` is the symmetric inter-network transfer matrix with zero diagonal;
/// the aggregate `β_ii = Σ_{j≠i} β_ij` is always derived.
#[derive(Debug, Clone)]
pub struct ModelParameters {
    pub n: usize,
    pub lambda: f64,
    pub mu: f64,
    pub alpha: Vec<f64>,
    pub c_p: Vec<f64>,
    pub beta: DMatrix<f64>,
    pub k: Vec<f64>,
    pub tau: f64,
}

impl ModelParameters {
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n < 1 {
            return Err(Error::InvalidParameter("network count must be >= 1".into()));
        }
        if self.alpha.len() != n || self.c_p.len() != n || self.k.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n} entries for alpha, c_p and K"
            )));
        }
        if self.beta.nrows() != n || self.beta.ncols() != n {
            return Err(Error::DimensionMismatch(format!("beta must be {n}x{n}")));
        }
        if !(self.mu > 0.0) {
            return Err(Error::InvalidParameter("mu must be > 0".into()));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidParameter("lambda must be > 0".into()));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidParameter("tau must be > 0".into()));
        }
        for i in 0..n {
            if !(self.k[i] > 0.0) {
                return Err(Error::InvalidParameter(format!("K_{} must be > 0", i + 1)));
            }
            if !(self.alpha[i] > 0.0) {
                return Err(Error::InvalidParameter(format!("alpha_{} must be > 0", i + 1)));
            }
            if !(self.c_p[i] >= 0.0) {
                return Err(Error::InvalidParameter(format!("c_p{} must be >= 0", i + 1)));
            }
            if self.beta[(i, i)] != 0.0 {
                return Err(Error::InvalidParameter(
                    "beta diagonal must be zero (aggregate is derived)".into(),
                ));
            }
            for j in 0..n {
                let b = self.beta[(i, j)];
                if !(b >= 0.0) || b != self.beta[(j, i)] {
                    return Err(Error::InvalidParameter(
                        "beta must be symmetric and nonnegative".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Coefficients of the rescaled system in which every block is dimensionless.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledParameters {
    pub n: usize,
    pub lambda: f64,
    pub r_inv: Vec<f64>,
    pub alpha_p: Vec<f64>,
    /// Symmetric transfer coefficients with zero diagonal.
    pub alpha_ij: DMatrix<f64>,
    pub lambda0: f64,
    pub r: f64,
}

impl RescaledParameters {
    /// Builds rescaled parameters directly; the diagonal of `alpha_ij` is ignored.
    pub fn new(
        lambda: f64,
        r_inv: Vec<f64>,
        alpha_p: Vec<f64>,
        alpha_ij: DMatrix<f64>,
    ) -> Result<Self> {
        let n = r_inv.len();
        if n < 1 {
            return Err(Error::InvalidParameter("network count must be >= 1".into()));
        }
        if alpha_p.len() != n || alpha_ij.nrows() != n || alpha_ij.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n} storage coefficients and a {n}x{n} transfer matrix"
            )));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter("lambda must be finite and > 0".into()));
        }
        for i in 0..n {
            if !(r_inv[i] > 0.0) || !r_inv[i].is_finite() {
                return Err(Error::InvalidParameter(format!("R_{}^-1 must be > 0", i + 1)));
            }
            if !(alpha_p[i] >= 0.0) || !alpha_p[i].is_finite() {
                return Err(Error::InvalidParameter(format!("alpha_p{} must be >= 0", i + 1)));
            }
        }
        let mut a = alpha_ij;
        for i in 0..n {
            a[(i, i)] = 0.0;
            for j in 0..i {
                let (x, y) = (a[(i, j)], a[(j, i)]);
                if !(x >= 0.0) || x != y {
                    return Err(Error::InvalidParameter(
                        "alpha_ij must be symmetric and nonnegative".into(),
                    ));
                }
            }
        }
        let r = 1.0 / r_inv.iter().cloned().fold(f64::MIN, f64::max);
        Ok(Self {
            n,
            lambda,
            r_inv,
            alpha_p,
            alpha_ij: a,
            lambda0: lambda.max(1.0),
            r,
        })
    }

    /// Single-network (Biot) parameters.
    pub fn biot(lambda: f64, r1_inv: f64, alpha_p: f64) -> Result<Self> {
        Self::new(lambda, vec![r1_inv], vec![alpha_p], DMatrix::zeros(1, 1))
    }

    /// Aggregate transfer coefficient `α_ii = Σ_{j≠i} α_ij`.
    pub fn alpha_ii(&self, i: usize) -> f64 {
        (0..self.n).filter(|&j| j != i).map(|j| self.alpha_ij[(i, j)]).sum()
    }
}

/// Divides by 2μ and applies the α-weighted substitutions:
/// `R_i⁻¹ = K_i⁻¹ α_i² / (2μτ)`, `α_{p_i} = 2μ c_{p_i} / α_i²`,
/// `α_ij = 2μ τ β_ij / (α_i α_j)`, `λ ← λ / 2μ`.
pub fn rescale_parameters(mp: &ModelParameters) -> Result<RescaledParameters> {
    mp.validate()?;
    let n = mp.n;
    let two_mu = 2.0 * mp.mu;
    let r_inv = (0..n)
        .map(|i| mp.alpha[i] * mp.alpha[i] / (mp.k[i] * two_mu * mp.tau))
        .collect();
    let alpha_p = (0..n)
        .map(|i| two_mu * mp.c_p[i] / (mp.alpha[i] * mp.alpha[i]))
        .collect();
    let alpha_ij = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            two_mu * mp.tau * mp.beta[(i, j)] / (mp.alpha[i] * mp.alpha[j])
        }
    });
    RescaledParameters::new(mp.lambda / two_mu, r_inv, alpha_p, alpha_ij)
}

#[derive(Debug, Clone)]
pub struct LambdaMatrices {
    pub lambda1: DMatrix<f64>,
    pub lambda2: DMatrix<f64>,
    pub lambda3: DMatrix<f64>,
    pub lambda4: DMatrix<f64>,
    pub lambda: DMatrix<f64>,
    pub lambda_inv: DMatrix<f64>,
}

impl LambdaMatrices {
    /// Entries `γ_ij` of Λ.
    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.lambda
    }

    /// Entries `γ̃_ij` of Λ⁻¹.
    pub fn gamma_tilde(&self) -> &DMatrix<f64> {
        &self.lambda_inv
    }

    pub fn n(&self) -> usize {
        self.lambda.nrows()
    }

    /// Λ1 + Λ2, the pressure coupling of the operator.
    pub fn coupling(&self) -> DMatrix<f64> {
        &self.lambda1 + &self.lambda2
    }
}

pub fn build_lambda_matrices(rp: &RescaledParameters) -> Result<LambdaMatrices> {
    let n = rp.n;
    let lambda1 = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            rp.alpha_ii(i)
        } else {
            -rp.alpha_ij[(i, j)]
        }
    });
    let lambda2 = DMatrix::from_diagonal(&DVector::from_column_slice(&rp.alpha_p));
    let lambda3 = DMatrix::identity(n, n) * rp.r;
    let lambda4 = DMatrix::from_element(n, n, 1.0 / rp.lambda0);
    let lambda = &lambda1 + &lambda2 + &lambda3 + &lambda4;
    if lambda.clone().cholesky().is_none() {
        return Err(Error::SingularLambda);
    }
    let lambda_inv = exact_lambda_inverse(rp)?;
    Ok(LambdaMatrices {
        lambda1,
        lambda2,
        lambda3,
        lambda4,
        lambda,
        lambda_inv,
    })
}

/// Λ⁻¹ by Gauss-Jordan elimination in rational arithmetic on the exact
/// parameter values.
///
/// Summing Λ in floating point rounds away `R` next to `1/λ0` or large
/// transfer terms, and a floating-point inverse of that sum is then off by
/// up to `cond(Λ)·eps`.
fn exact_lambda_inverse(rp: &RescaledParameters) -> Result<DMatrix<f64>> {
    let n = rp.n;
    let q = |x: f64| BigRational::from_float(x).ok_or(Error::SingularLambda);
    let r = q(rp.r)?;
    let rank_one = BigRational::one() / q(rp.lambda0)?;
    let mut a = vec![vec![BigRational::zero(); 2 * n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = if i == j {
                let mut d = &r + &rank_one + q(rp.alpha_p[i])?;
                for k in (0..n).filter(|&k| k != i) {
                    d += q(rp.alpha_ij[(i, k)])?;
                }
                d
            } else {
                &rank_one - q(rp.alpha_ij[(i, j)])?
            };
        }
        a[i][n + i] = BigRational::one();
    }
    for col in 0..n {
        let piv = (col..n).find(|&k| !a[k][col].is_zero()).ok_or(Error::SingularLambda)?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        let pivot_row = a[col].clone();
        for (k, row) in a.iter_mut().enumerate() {
            if k != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    let inv = DMatrix::from_fn(n, n, |i, j| a[i][n + j].to_f64().unwrap_or(f64::NAN));
    if inv.iter().any(|x| !x.is_finite()) {
        return Err(Error::SingularLambda);
    }
    Ok(inv)
}

/// Closed-form inverse of `Λ3 + Λ4 = R·I + (1/λ0)·11ᵀ`.
pub fn tilde_lambda_inverse_closed_form(rp: &RescaledParameters) -> DMatrix<f64> {
    closed_form_inverse(rp.n, rp.r, rp.lambda0)
}

/// Sherman–Morrison inverse of `R·I + (1/λ0)·11ᵀ` for `n` networks.
pub fn closed_form_inverse(n: usize, r: f64, lambda0: f64) -> DMatrix<f64> {
    let nf = n as f64;
    let denom = r * (r * lambda0 + nf);
    // diagonal 1/R − 1/denom written without the cancellation for Rλ0 ≪ n
    let diag = (r * lambda0 + (nf - 1.0)) / denom;
    DMatrix::from_fn(n, n, |i, j| if i == j { diag } else { -1.0 / denom })
}

/// Sum of all entries of the closed-form inverse, `nλ0 / (Rλ0 + n)`.
pub fn closed_form_inverse_sum(n: usize, r: f64, lambda0: f64) -> f64 {
    let nf = n as f64;
    nf * lambda0 / (r * lambda0 + nf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadraticForm {
    Lambda,
    LambdaInv,
    Coupling,
}

pub fn lambda_quadratic_form(lm: &LambdaMatrices, x: &[f64], which: QuadraticForm) -> Result<f64> {
    let n = lm.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for {n}x{n} matrix",
            x.len()
        )));
    }
    let q = |m: &DMatrix<f64>| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += x[i] * m[(i, j)] * x[j];
            }
        }
        s
    };
    let v = match which {
        QuadraticForm::Lambda => q(&lm.lambda),
        QuadraticForm::LambdaInv => q(&lm.lambda_inv),
        QuadraticForm::Coupling => q(&lm.coupling()),
    };
    // the forms are semidefinite; clamp round-off
    Ok(v.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model_n1(two_mu: f64, lambda: f64, k: f64) -> ModelParameters {
        ModelParameters {
            n: 1,
            lambda,
            mu: two_mu / 2.0,
            alpha: vec![1.0],
            c_p: vec![0.0],
            beta: DMatrix::zeros(1, 1),
            k: vec![k],
            tau: 1.0,
        }
    }

    #[test]
    fn identity_scale() {
        let rp = rescale_parameters(&model_n1(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(rp.r_inv, vec![1.0]);
        assert_eq!(rp.alpha_p, vec![0.0]);
        assert_eq!(rp.lambda0, 1.0);
        assert_eq!(rp.r, 1.0);
    }

    #[test]
    fn table_column_1e4() {
        let rp = rescale_parameters(&model_n1(1.0, 1e4, 1e-4)).unwrap();
        assert!((rp.r_inv[0] - 1e4).abs() < 1e-8);
        assert_eq!(rp.lambda0, 1e4);
        assert!((rp.r - 1e-4).abs() < 1e-16);
    }

    #[test]
    fn barenblatt_base_values() {
        let mp = ModelParameters {
            n: 2,
            lambda: 4.2e6,
            mu: 2.4e6,
            alpha: vec![0.95, 0.12],
            c_p: vec![54e-9, 14e-9],
            beta: DMatrix::from_row_slice(2, 2, &[0.0, 5e-10, 5e-10, 0.0]),
            k: vec![6.18e-15, 27.2e-15],
            tau: 1.0,
        };
        let rp = rescale_parameters(&mp).unwrap();
        // hand evaluation with 2μ = 4.8e6
        let r1 = 0.95f64.powi(2) / (6.18e-15 * 4.8e6);
        let r2 = 0.12f64.powi(2) / (27.2e-15 * 4.8e6);
        assert!((rp.r_inv[0] / r1 - 1.0).abs() < 1e-14);
        assert!((rp.r_inv[1] / r2 - 1.0).abs() < 1e-14);
        assert!((rp.r_inv[0] - 3.0425e7).abs() < 1e4);
        assert!((rp.alpha_p[0] - 0.287202).abs() < 1e-6);
        assert!((rp.alpha_p[1] - 4.666667).abs() < 1e-6);
        assert!((rp.alpha_ij[(0, 1)] - 4.8e6 * 5e-10 / (0.95 * 0.12)).abs() < 1e-15);
        assert!((rp.lambda - 0.875).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_models() {
        let mut mp = model_n1(1.0, 1.0, 1.0);
        mp.k[0] = 0.0;
        assert!(rescale_parameters(&mp).is_err());
        let mut mp = model_n1(1.0, 1.0, 1.0);
        mp.mu = 0.0;
        assert!(rescale_parameters(&mp).is_err());
        let mut mp = model_n1(1.0, 1.0, 1.0);
        mp.tau = -1.0;
        assert!(rescale_parameters(&mp).is_err());
        let mut mp = model_n1(1.0, 1.0, 1.0);
        mp.n = 0;
        mp.alpha.clear();
        mp.c_p.clear();
        mp.k.clear();
        mp.beta = DMatrix::zeros(0, 0);
        assert!(rescale_parameters(&mp).is_err());
    }

    #[test]
    fn lambda_n1_trivial() {
        let rp = RescaledParameters::biot(1.0, 1.0, 0.0).unwrap();
        let lm = build_lambda_matrices(&rp).unwrap();
        assert_eq!(lm.lambda[(0, 0)], 2.0);
        assert!((lm.lambda_inv[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lambda_n1_table_point() {
        let rp = RescaledParameters::biot(1e4, 1e4, 1e-4).unwrap();
        let lm = build_lambda_matrices(&rp).unwrap();
        assert!((lm.lambda[(0, 0)] - 3e-4).abs() < 1e-18);
    }

    #[test]
    fn lambda_n2_sum_of_identity_and_ones() {
        let rp = RescaledParameters::new(1.0, vec![1.0, 1.0], vec![0.0, 0.0], DMatrix::zeros(2, 2))
            .unwrap();
        let lm = build_lambda_matrices(&rp).unwrap();
        assert_eq!(lm.lambda, DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]));
        let x = [1.0, -1.0];
        assert_eq!(lambda_quadratic_form(&lm, &x, QuadraticForm::Lambda).unwrap(), 2.0);
        assert_eq!(lambda_quadratic_form(&lm, &[0.0, 0.0], QuadraticForm::LambdaInv).unwrap(), 0.0);
        assert!(lambda_quadratic_form(&lm, &[1.0], QuadraticForm::Lambda).is_err());
    }

    #[test]
    fn lambda1_annihilates_constants() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 3.0, 3.0, 0.0]);
        let rp = RescaledParameters::new(1.0, vec![1.0, 1.0], vec![0.0, 0.0], a).unwrap();
        let lm = build_lambda_matrices(&rp).unwrap();
        let v = lambda_quadratic_form(&lm, &[1.0, 1.0], QuadraticForm::Coupling).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn closed_form_examples() {
        let b = closed_form_inverse(2, 1.0, 1.0);
        let expect = DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]) / 3.0;
        assert!((b - expect).abs().max() < 1e-15);
        assert!((closed_form_inverse_sum(2, 1.0, 1.0) - 2.0 / 3.0).abs() < 1e-15);
        let b = closed_form_inverse(1, 1.0, 1e12);
        assert!((b[(0, 0)] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn rejects_asymmetric_transfer() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(RescaledParameters::new(1.0, vec![1.0, 1.0], vec![0.0, 0.0], a).is_err());
    }
}
