//! Closed-form characteristic and moment generating functions of the
//! delta-gamma value change, for normal and multivariate-t risk factors.
//!
//! Normal case:
//!   phi(u) = exp(-1/2 sum_j b_j^2 u^2 / (1 - i lambda_j u))
//!            * prod_j (1 - i lambda_j u)^(-1/2)
//! t case (distribution F_x with P(x) = F_x(0)):
//!   phi(u) = (1 - 2 xi(u))^(-nu/2) * prod_j (1 - i lambda_j u)^(-1/2),
//!   xi(u)  = -i u x / nu - 1/(2 nu) sum_j b_j^2 u^2 / (1 - i lambda_j u)
//!
//! Each factor (1 - i lambda_j u)^(-1/2) is taken with the principal square
//! root, factor by factor; every factor has real part 1 so the principal
//! branch is continuous in u. The multiplied-out product is never rooted.
//! Likewise (1 - 2 xi(u))^(-nu/2) goes through the principal log, which is
//! safe because Re(1 - 2 xi(u)) >= 1.

use num_complex::Complex64;

use crate::spectral::SpectralData;

/// Characteristic function for normally distributed risk factors.
pub fn normal_cf(spec: &SpectralData, u: f64) -> Complex64 {
    let mut expo = Complex64::new(0.0, 0.0);
    let mut prod = Complex64::new(1.0, 0.0);
    for (&l, &b) in spec.lambda.iter().zip(&spec.b) {
        let d = Complex64::new(1.0, -l * u);
        expo -= 0.5 * b * b * u * u * d.inv();
        prod *= d.sqrt().inv();
    }
    expo.exp() * prod
}

/// Moment generating function psi(u) = phi(-iu) for the normal case.
///
/// Returns `f64::INFINITY` outside the domain {u : u*lambda_j < 1 for all j};
/// the tail-bound optimizer probes the boundary, so out-of-domain is a value,
/// not an error.
pub fn normal_mgf(spec: &SpectralData, u: f64) -> f64 {
    let mut expo = 0.0;
    let mut log_prod = 0.0;
    for (&l, &b) in spec.lambda.iter().zip(&spec.b) {
        let d = 1.0 - l * u;
        if d <= 0.0 {
            return f64::INFINITY;
        }
        expo += 0.5 * b * b * u * u / d;
        log_prod -= 0.5 * d.ln();
    }
    (expo + log_prod).exp()
}

/// The x-parameterized characteristic function family of the multivariate-t
/// case: `cf`/`mgf` belong to the distribution F_x with P(x) = F_x(0).
#[derive(Debug, Clone)]
pub struct CharFnStudentT<'a> {
    pub spec: &'a SpectralData,
    pub nu: f64,
    pub x: f64,
}

impl<'a> CharFnStudentT<'a> {
    pub fn new(spec: &'a SpectralData, nu: f64, x: f64) -> Self {
        assert!(nu > 0.0, "nu must be positive");
        CharFnStudentT { spec, nu, x }
    }

    pub fn cf(&self, u: f64) -> Complex64 {
        let mut xi = Complex64::new(0.0, -u * self.x / self.nu);
        let mut prod = Complex64::new(1.0, 0.0);
        for (&l, &b) in self.spec.lambda.iter().zip(&self.spec.b) {
            let d = Complex64::new(1.0, -l * u);
            xi -= (0.5 / self.nu) * b * b * u * u * d.inv();
            prod *= d.sqrt().inv();
        }
        let base = Complex64::new(1.0, 0.0) - 2.0 * xi;
        (-0.5 * self.nu * base.ln()).exp() * prod
    }

    /// psi(u) = phi(-iu), finite when lambda_j*u < 1 for all j and
    /// xi(-iu) < 1/2; `f64::INFINITY` otherwise.
    pub fn mgf(&self, u: f64) -> f64 {
        let mut xi = -u * self.x / self.nu;
        let mut log_prod = 0.0;
        for (&l, &b) in self.spec.lambda.iter().zip(&self.spec.b) {
            let d = 1.0 - l * u;
            if d <= 0.0 {
                return f64::INFINITY;
            }
            xi += 0.5 / self.nu * b * b * u * u / d;
            log_prod -= 0.5 * d.ln();
        }
        if xi >= 0.5 {
            return f64::INFINITY;
        }
        // (1 - 2 xi)^(-nu/2) via ln_1p: stable for huge nu where xi = O(1/nu).
        (-0.5 * self.nu * (-2.0 * xi).ln_1p() + log_prod).exp()
    }
}
