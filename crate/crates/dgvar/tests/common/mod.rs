//! Shared oracles for the integration suites, built on statrs so that the
//! reference values come from an implementation route independent of the
//! library under test.

#![allow(dead_code)]

use dgvar::linalg::Mat;
use dgvar::spectral::{DeltaGammaModel, Dist};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

pub fn oracle_normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

pub fn oracle_chi2_cdf(x: f64, k: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ChiSquared::new(k).unwrap().cdf(x)
}

/// Noncentral chi-square CDF with k degrees of freedom and noncentrality nc,
/// via the Poisson-weighted series of central chi-square CDFs. Weights are
/// accumulated until the remaining Poisson mass is below 1e-14, which bounds
/// the truncation error by the same amount (each CDF term is <= 1).
pub fn oracle_noncentral_chi2_cdf(x: f64, k: f64, nc: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let half = nc / 2.0;
    let mut weight = (-half).exp();
    let mut mass = weight;
    let mut sum = weight * oracle_chi2_cdf(x, k);
    let mut j = 1.0;
    while 1.0 - mass > 1e-14 && j < 10_000.0 {
        weight *= half / j;
        mass += weight;
        sum += weight * oracle_chi2_cdf(x, k + 2.0 * j);
        j += 1.0;
    }
    sum
}

/// p = 1 model with sigma = 1: dV = b z + (lambda/2) z^2 for z ~ N(0,1),
/// realized as delta = b, gamma = lambda.
pub fn scalar_model(lambda: f64, b: f64, dist: Dist) -> DeltaGammaModel {
    DeltaGammaModel {
        sigma: Mat::from_rows(&[&[1.0]]),
        delta: vec![b],
        gamma_matrix: Mat::from_rows(&[&[lambda]]),
        theta: 0.0,
        dt: 1.0,
        dist,
    }
}

/// Exact CDF of b z + (lambda/2) z^2 under z ~ N(0,1), for the three analytic
/// cases used by the acceptance gate.
pub fn scalar_oracle_cdf(lambda: f64, b: f64, x: f64) -> f64 {
    if lambda == 0.0 {
        // pure Gaussian, scale |b|
        oracle_normal_cdf(x / b.abs())
    } else if b == 0.0 {
        // (lambda/2) z^2: chi-square_1 scaled by lambda/2
        oracle_chi2_cdf(2.0 * x / lambda, 1.0)
    } else {
        // complete the square: b z + (lambda/2) z^2
        //   = (lambda/2) (z + b/lambda)^2 - b^2/(2 lambda),
        // so dV + b^2/(2 lambda) is (lambda/2) times a noncentral chi-square
        // with 1 dof and noncentrality (b/lambda)^2.
        let shift = b * b / (2.0 * lambda);
        let nc = (b / lambda) * (b / lambda);
        oracle_noncentral_chi2_cdf(2.0 * (x + shift) / lambda, 1.0, nc)
    }
}
