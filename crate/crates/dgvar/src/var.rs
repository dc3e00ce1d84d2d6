//! Quantile computation with certificate |P(x*) - gamma| <= epsilon.
//!
//! The theta*dt offset is handled by solving the theta = 0 problem and adding
//! the shift back at the end, so the shift identity holds exactly.
//!
//! epsilon budget: the Fourier scheme is built to epsilon/2 and the bisection
//! terminates at |g - gamma| <= epsilon/2, so the quantile certificate comes
//! out at epsilon.

use crate::bounds::{chernoff_tail_params, decay_params, mgf_domain_edge, TailBoundParams};
use crate::charfn::{normal_cf, normal_mgf, CharFnStudentT};
use crate::error::{DgvarError, Result};
use crate::fourier::{build_scheme, evaluate_g, FourierScheme, DEFAULT_N_CAP};
use crate::special::{inverse_normal_cdf, normal_cdf};
use crate::spectral::{spectral_transform, DeltaGammaModel, Dist, SpectralData};

/// A computed value-at-risk, with scheme-size diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct VarResult {
    /// The reported VaR_gamma, in value units.
    pub x_star: f64,
    pub gamma: f64,
    pub epsilon: f64,
    /// N of the largest scheme built along the way (0 for the analytic
    /// Gaussian fallback).
    pub n_terms_used: usize,
    /// Total characteristic-function evaluations spent on coefficients.
    pub cf_evals: usize,
    pub dist: Dist,
}

const BISECTION_CAP: usize = 200;

fn check_tolerances(gamma: f64, epsilon: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(DgvarError::InvalidModel(format!(
            "gamma must lie in (0,1), got {gamma}"
        )));
    }
    // looseness first: epsilon >= min(gamma, 1-gamma)/2 makes the quantile
    // certificate vacuous regardless of the global (0, 0.1) requirement
    if epsilon >= gamma.min(1.0 - gamma) / 2.0 {
        return Err(DgvarError::ToleranceTooLoose { gamma, epsilon });
    }
    if !(epsilon > 0.0 && epsilon < 0.1) {
        return Err(DgvarError::EpsilonOutOfRange(epsilon));
    }
    Ok(())
}

/// Dispatches on the model distribution.
pub fn var(model: &DeltaGammaModel, gamma: f64, epsilon: f64) -> Result<VarResult> {
    match model.dist {
        Dist::Normal => var_normal(model, gamma, epsilon),
        Dist::StudentT { .. } => var_student_t(model, gamma, epsilon),
    }
}

/// VaR under normally distributed risk factors.
pub fn var_normal(model: &DeltaGammaModel, gamma: f64, epsilon: f64) -> Result<VarResult> {
    if !matches!(model.dist, Dist::Normal) {
        return Err(DgvarError::InvalidModel(
            "var_normal requires a normal model".into(),
        ));
    }
    check_tolerances(gamma, epsilon)?;
    let spec = spectral_transform(model)?;
    let shift = model.theta * model.dt;

    if spec.all_lambda_zero() {
        // Purely linear portfolio: the value change is exactly Gaussian.
        let variance: f64 = spec.b.iter().map(|b| b * b).sum();
        if variance <= 0.0 {
            return Err(DgvarError::DegenerateModel);
        }
        return Ok(VarResult {
            x_star: variance.sqrt() * inverse_normal_cdf(gamma) + shift,
            gamma,
            epsilon,
            n_terms_used: 0,
            cf_evals: 0,
            dist: model.dist,
        });
    }

    let scheme_eps = epsilon / 2.0;
    let mgf = |u: f64| normal_mgf(&spec, u);
    let tail = chernoff_tail_params(mgf, scheme_eps, mgf_domain_edge(&spec.lambda), None)?;
    let decay = decay_params(&spec.lambda, scheme_eps)?;

    let mut d_range = default_d_range(&tail, gamma);
    let mut cf_evals = 0usize;
    let mut scheme: Option<FourierScheme> = None;
    for _ in 0..8 {
        let s = build_scheme(
            |u| normal_cf(&spec, u),
            &tail,
            &decay,
            d_range,
            scheme_eps,
            DEFAULT_N_CAP,
        )?;
        cf_evals += s.coeffs.len();
        let g_lo = evaluate_g(&s, -d_range / 2.0)?;
        let g_hi = evaluate_g(&s, d_range / 2.0)?;
        if g_lo < gamma && g_hi > gamma {
            scheme = Some(s);
            break;
        }
        d_range *= 2.0;
    }
    let scheme = scheme.ok_or(DgvarError::InvalidModel(
        "failed to bracket the quantile even after enlarging the range".into(),
    ))?;

    let mut lo = -d_range / 2.0;
    let mut hi = d_range / 2.0;
    let mut x_star = 0.0;
    for _ in 0..BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        let g = evaluate_g(&scheme, mid)?;
        x_star = mid;
        if (g - gamma).abs() <= epsilon / 2.0 {
            break;
        }
        if g > gamma {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    Ok(VarResult {
        x_star: x_star + shift,
        gamma,
        epsilon,
        n_terms_used: scheme.n_terms,
        cf_evals,
        dist: model.dist,
    })
}

/// VaR under multivariate-t risk factors: P(x) = F_x(0), so each probed x
/// re-solves the Chernoff problem for F_x's MGF (warm-started at the previous
/// u*) and builds a fresh scheme; (B, beta) are x-independent and computed
/// once.
pub fn var_student_t(model: &DeltaGammaModel, gamma: f64, epsilon: f64) -> Result<VarResult> {
    let nu = match model.dist {
        Dist::StudentT { nu } => nu,
        Dist::Normal => {
            return Err(DgvarError::InvalidModel(
                "var_student_t requires a t model".into(),
            ))
        }
    };
    check_tolerances(gamma, epsilon)?;
    let spec = spectral_transform(model)?;
    if spec.all_lambda_zero() {
        // No polynomial decay bound is available from the eigenvalue part
        // alone in the t case.
        return Err(DgvarError::AllEigenvaluesZero);
    }
    let shift = model.theta * model.dt;

    let scheme_eps = epsilon / 2.0;
    let decay = decay_params(&spec.lambda, scheme_eps)?;
    let edge = mgf_domain_edge(&spec.lambda);

    let mut cf_evals = 0usize;
    let mut max_n = 0usize;
    let mut warm: Option<f64> = None;

    let mut probe = |x: f64, warm: Option<f64>| -> Result<(f64, TailBoundParams)> {
        let cfx = CharFnStudentT::new(&spec, nu, x);
        let tail = chernoff_tail_params(|u| cfx.mgf(u), scheme_eps, edge, warm)?;
        let scheme = build_scheme(
            |u| cfx.cf(u),
            &tail,
            &decay,
            1.0, // only x = 0 is ever evaluated
            scheme_eps,
            DEFAULT_N_CAP,
        )?;
        cf_evals += scheme.coeffs.len();
        max_n = max_n.max(scheme.n_terms);
        Ok((evaluate_g(&scheme, 0.0)?, tail))
    };

    // Bracket the quantile by doubling outward from a crude scale estimate.
    let tail_factor = if nu > 2.0 { (nu / (nu - 2.0)).min(10.0) } else { 10.0 };
    let b2: f64 = spec.b.iter().map(|b| b * b).sum();
    let l2: f64 = spec.lambda.iter().map(|l| l * l).sum();
    let scale = ((b2 + 0.5 * l2) * tail_factor).sqrt().max(1e-12);

    let mut lo = -scale;
    let mut hi = scale;
    let mut iters = 0;
    loop {
        let (g, t) = probe(lo, warm)?;
        warm = Some(t.u_star);
        if g < gamma {
            break;
        }
        lo *= 2.0;
        iters += 1;
        if iters > 60 {
            return Err(DgvarError::InvalidModel(
                "failed to bracket the t-quantile from below".into(),
            ));
        }
    }
    iters = 0;
    loop {
        let (g, t) = probe(hi, warm)?;
        warm = Some(t.u_star);
        if g > gamma {
            break;
        }
        hi *= 2.0;
        iters += 1;
        if iters > 60 {
            return Err(DgvarError::InvalidModel(
                "failed to bracket the t-quantile from above".into(),
            ));
        }
    }

    let mut x_star = 0.5 * (lo + hi);
    for _ in 0..BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        let (g, t) = probe(mid, warm)?;
        warm = Some(t.u_star);
        x_star = mid;
        if (g - gamma).abs() <= epsilon / 2.0 {
            break;
        }
        if g > gamma {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    Ok(VarResult {
        x_star: x_star + shift,
        gamma,
        epsilon,
        n_terms_used: max_n,
        cf_evals,
        dist: model.dist,
    })
}

/// P(dV <= x) to within epsilon, via the certified Fourier scheme (analytic
/// shortcut when the value change is exactly Gaussian).
pub fn cdf(model: &DeltaGammaModel, x: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 0.1) {
        return Err(DgvarError::EpsilonOutOfRange(epsilon));
    }
    let spec = spectral_transform(model)?;
    let x0 = x - model.theta * model.dt;
    match model.dist {
        Dist::Normal => {
            if spec.all_lambda_zero() {
                let variance: f64 = spec.b.iter().map(|b| b * b).sum();
                if variance <= 0.0 {
                    return Err(DgvarError::DegenerateModel);
                }
                return Ok(normal_cdf(x0 / variance.sqrt()));
            }
            let mgf = |u: f64| normal_mgf(&spec, u);
            let tail = chernoff_tail_params(mgf, epsilon, mgf_domain_edge(&spec.lambda), None)?;
            let decay = decay_params(&spec.lambda, epsilon)?;
            // Enlarge the range until x is covered.
            let d_range = (2.0 * x0.abs() * 1.0001).max(1.0);
            let scheme = build_scheme(
                |u| normal_cf(&spec, u),
                &tail,
                &decay,
                d_range,
                epsilon,
                DEFAULT_N_CAP,
            )?;
            evaluate_g(&scheme, x0)
        }
        Dist::StudentT { nu } => {
            if spec.all_lambda_zero() {
                return Err(DgvarError::AllEigenvaluesZero);
            }
            let cfx = CharFnStudentT::new(&spec, nu, x0);
            let tail = chernoff_tail_params(
                |u| cfx.mgf(u),
                epsilon,
                mgf_domain_edge(&spec.lambda),
                None,
            )?;
            let decay = decay_params(&spec.lambda, epsilon)?;
            let scheme = build_scheme(
                |u| cfx.cf(u),
                &tail,
                &decay,
                1.0,
                epsilon,
                DEFAULT_N_CAP,
            )?;
            evaluate_g(&scheme, 0.0)
        }
    }
}

/// Default guaranteed range: the Chernoff envelope certifies
/// F(-D/2) <= min(gamma, 1-gamma)/2 and 1 - F(D/2) <= min(gamma, 1-gamma)/2,
/// so the gamma-quantile is bracketed inside [-D/2, D/2].
fn default_d_range(tail: &TailBoundParams, gamma: f64) -> f64 {
    let target = gamma.min(1.0 - gamma) / 2.0;
    2.0 * ((tail.a_const.ln() - target.ln()) / tail.alpha).exp()
}

/// Convenience wrapper exposing the spectral data used by a var call;
/// useful to callers that reuse it (benchmarks, calibration).
pub fn spectral_of(model: &DeltaGammaModel) -> Result<SpectralData> {
    spectral_transform(model)
}
