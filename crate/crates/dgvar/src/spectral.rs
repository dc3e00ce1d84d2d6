//! Reduction of (sigma, gamma, delta) to the eigenvalue/loading form used by
//! every characteristic-function formula.
//!
//! With L the Cholesky factor of sigma and O an orthogonal eigenbasis of the
//! symmetric matrix L' * gamma * L, the matrix C = L * O satisfies
//! C C' = sigma and C' gamma C = diag(lambda), where lambda are the
//! eigenvalues of sigma * gamma. The transformed loadings are b = C' delta.

use crate::error::{DgvarError, Result};
use crate::linalg::{cholesky, dot, jacobi_eigh, Mat};

/// Distribution of the risk-factor changes over the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dist {
    Normal,
    /// Multivariate t with the given degrees-of-freedom parameter.
    StudentT { nu: f64 },
}

/// Delta-gamma approximated portfolio: dV = theta*dt + delta'dS + dS'gamma*dS/2
/// with dS distributed per `dist` with scatter matrix `sigma` (already scaled
/// to the horizon).
#[derive(Debug, Clone)]
pub struct DeltaGammaModel {
    pub sigma: Mat,
    pub delta: Vec<f64>,
    pub gamma_matrix: Mat,
    pub theta: f64,
    pub dt: f64,
    pub dist: Dist,
}

impl DeltaGammaModel {
    pub fn dim(&self) -> usize {
        self.delta.len()
    }

    /// Checks shapes, symmetry (within 1e-12 relative), and parameter ranges.
    /// Positive definiteness of sigma is established by the Cholesky step in
    /// [`spectral_transform`].
    pub fn validate(&self) -> Result<()> {
        let p = self.delta.len();
        if p < 1 {
            return Err(DgvarError::InvalidModel("p must be at least 1".into()));
        }
        if self.sigma.rows() != p || self.sigma.cols() != p {
            return Err(DgvarError::InvalidModel(format!(
                "sigma must be {p}x{p}, got {}x{}",
                self.sigma.rows(),
                self.sigma.cols()
            )));
        }
        if self.gamma_matrix.rows() != p || self.gamma_matrix.cols() != p {
            return Err(DgvarError::InvalidModel(format!(
                "gamma must be {p}x{p}, got {}x{}",
                self.gamma_matrix.rows(),
                self.gamma_matrix.cols()
            )));
        }
        if !self.sigma.is_symmetric(1e-12 * self.sigma.frobenius_norm().max(f64::MIN_POSITIVE)) {
            return Err(DgvarError::InvalidModel("sigma is not symmetric".into()));
        }
        if !self
            .gamma_matrix
            .is_symmetric(1e-12 * self.gamma_matrix.frobenius_norm().max(f64::MIN_POSITIVE))
        {
            return Err(DgvarError::InvalidModel("gamma is not symmetric".into()));
        }
        if !(self.dt > 0.0) {
            return Err(DgvarError::InvalidModel("dt must be positive".into()));
        }
        if let Dist::StudentT { nu } = self.dist {
            if !(nu > 0.0) {
                return Err(DgvarError::InvalidModel("nu must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Eigenvalue/loading representation of the model.
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Eigenvalues of sigma*gamma, sorted by descending absolute value, with
    /// entries below 1e-14 * max|lambda| snapped to exactly zero.
    pub lambda: Vec<f64>,
    /// b = C' delta, in the same ordering as `lambda`.
    pub b: Vec<f64>,
    /// The matrix C with C C' = sigma and C' gamma C = diag(lambda).
    pub c_matrix: Mat,
}

impl SpectralData {
    /// Assembles spectral data directly from eigenvalues and loadings, with C
    /// implied only up to basis choice. Intended for models stated directly in
    /// diagonal form.
    pub fn from_parts(lambda: Vec<f64>, b: Vec<f64>) -> Self {
        assert_eq!(lambda.len(), b.len());
        let c = Mat::identity(lambda.len());
        SpectralData {
            lambda,
            b,
            c_matrix: c,
        }
    }

    pub fn all_lambda_zero(&self) -> bool {
        self.lambda.iter().all(|&l| l == 0.0)
    }
}

/// Transforms a model into its spectral representation.
///
/// Eigenvalues are ordered by descending |lambda|, ties broken by descending
/// signed value then original index; |lambda_j| <= 1e-14 * max|lambda| is
/// snapped to exactly zero so downstream subset and domain logic treats those
/// directions as Gaussian.
pub fn spectral_transform(model: &DeltaGammaModel) -> Result<SpectralData> {
    model.validate()?;
    let l = cholesky(&model.sigma)?;
    let lt = l.transpose();
    let m = lt.matmul(&model.gamma_matrix).matmul(&l);
    let (mut lambda, o) = jacobi_eigh(&m)?;
    let c = l.matmul(&o);
    let mut b = c.transpose().matvec(&model.delta);

    let p = lambda.len();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| {
        lambda[j]
            .abs()
            .partial_cmp(&lambda[i].abs())
            .unwrap()
            .then(lambda[j].partial_cmp(&lambda[i]).unwrap())
            .then(i.cmp(&j))
    });

    let sorted_lambda: Vec<f64> = order.iter().map(|&i| lambda[i]).collect();
    let sorted_b: Vec<f64> = order.iter().map(|&i| b[i]).collect();
    let mut sorted_c = Mat::zeros(p, p);
    for (newcol, &oldcol) in order.iter().enumerate() {
        for row in 0..p {
            sorted_c[(row, newcol)] = c[(row, oldcol)];
        }
    }
    lambda = sorted_lambda;
    b = sorted_b;

    let max_abs = lambda.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    for l in lambda.iter_mut() {
        if l.abs() <= 1e-14 * max_abs {
            *l = 0.0;
        }
    }

    Ok(SpectralData {
        lambda,
        b,
        c_matrix: sorted_c,
    })
}

/// delta' sigma delta, the variance of the purely linear part.
pub fn linear_variance(model: &DeltaGammaModel) -> f64 {
    dot(&model.delta, &model.sigma.matvec(&model.delta))
}
