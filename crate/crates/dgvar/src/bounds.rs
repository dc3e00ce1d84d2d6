//! Certified tail and decay constants feeding the Fourier scheme.
//!
//! Tail side: Chernoff's bounds give F(-y) <= exp(-u y) psi(-u) and
//! 1 - F(y) <= exp(-u y) psi(u). For fixed u > 0 the tightest polynomial
//! envelope A y^(-alpha) tangent to psitilde(u) exp(-u y) has
//! alpha(u) = log(3 psitilde(u) / eps) and
//! A(u) = psitilde(u) exp(-alpha) (alpha/u)^alpha; the scheme cost is
//! proportional to log(3 psitilde(u)/eps)/u, which is minimized over u by a
//! one-dimensional search on the MGF domain.
//!
//! Decay side: |phi(u)| <= B_I |u/2pi|^(-beta_I) with beta_I = |I|/2 and
//! B_I = (2pi)^(-beta_I) prod_{j in I} |lambda_j|^(-1/2) for any index set I
//! of nonzero eigenvalues; the optimal I is a prefix of the descending-|lambda|
//! ordering, so a linear scan suffices.

use crate::error::{DgvarError, Result};

/// Constants (A, alpha) certifying F(-y) <= A y^(-alpha) and
/// 1 - F(y) <= A y^(-alpha) for all y > 0, plus the Chernoff exponent that
/// produced them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBoundParams {
    pub a_const: f64,
    pub alpha: f64,
    pub u_star: f64,
}

/// Constants (B, beta) certifying |phi(u)| <= B |u/2pi|^(-beta), together with
/// the eigenvalue subset that generated them (empty for an explicitly supplied
/// envelope).
#[derive(Debug, Clone, PartialEq)]
pub struct DecayBoundParams {
    pub b_const: f64,
    pub beta: f64,
    /// Positions (into the descending-|lambda| ordering) of the eigenvalues
    /// backing the bound.
    pub subset: Vec<usize>,
}

impl DecayBoundParams {
    /// An envelope supplied directly rather than derived from eigenvalues.
    /// Needed when the characteristic function decays faster than any
    /// eigenvalue-based bound (e.g. a purely Gaussian value change, where no
    /// nonzero eigenvalues exist).
    pub fn explicit(b_const: f64, beta: f64) -> Self {
        assert!(b_const > 0.0 && beta > 0.0);
        DecayBoundParams {
            b_const,
            beta,
            subset: Vec::new(),
        }
    }
}

/// psitilde(u) = max{psi(u), psi(-u)}. Infinite if either side is out of
/// domain.
pub fn psi_tilde<F: Fn(f64) -> f64>(mgf: F, u: f64) -> f64 {
    mgf(u).max(mgf(-u))
}

/// Upper edge of the MGF domain implied by the eigenvalues:
/// min{1/lambda_j : lambda_j > 0}, infinite when no eigenvalue is positive.
/// (For the t case the xi condition may restrict further; the MGF itself
/// reports that region as infinite.)
pub fn mgf_domain_edge(lambda: &[f64]) -> f64 {
    lambda
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| 1.0 / l)
        .fold(f64::INFINITY, f64::min)
}

/// Minimizes log(3 psitilde(u)/epsilon)/u over u in (0, u_edge) and returns
/// the tangency constants (A, alpha) at the minimizer.
///
/// A 64-point log-spaced scan seeds a golden-section refinement; `warm_start`
/// adds an extra seed near a previously found minimizer (used by the per-x
/// re-solve in the t case). Suboptimality is acceptable: the contract is
/// constraint validity, which the tangency construction guarantees at any u.
pub fn chernoff_tail_params<F: Fn(f64) -> f64>(
    mgf: F,
    epsilon: f64,
    u_edge: f64,
    warm_start: Option<f64>,
) -> Result<TailBoundParams> {
    if !(epsilon > 0.0 && epsilon < 0.1) {
        return Err(DgvarError::EpsilonOutOfRange(epsilon));
    }

    let log_3_eps = 3.0f64.ln() - epsilon.ln();
    let objective = |u: f64| -> f64 {
        if u <= 0.0 {
            return f64::INFINITY;
        }
        let p = psi_tilde(&mgf, u);
        if !p.is_finite() || p <= 0.0 {
            return f64::INFINITY;
        }
        (log_3_eps + p.ln()) / u
    };

    let hi = if u_edge.is_finite() {
        u_edge * (1.0 - 1e-9)
    } else {
        1e8
    };
    let lo = hi * 1e-12;

    let mut grid: Vec<f64> = (0..64)
        .map(|i| lo * (hi / lo).powf(i as f64 / 63.0))
        .collect();
    if let Some(w) = warm_start {
        if w > 0.0 && w < hi {
            grid.push(w * 0.9);
            grid.push(w);
            grid.push((w * 1.1).min(hi));
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut best = None;
    for (i, &u) in grid.iter().enumerate() {
        let f = objective(u);
        if f.is_finite() && best.map_or(true, |(_, fb)| f < fb) {
            best = Some((i, f));
        }
    }
    let (i_best, _) = best.ok_or(DgvarError::EmptyDomain)?;

    let mut a = if i_best == 0 { grid[0] * 1e-3 } else { grid[i_best - 1] };
    let mut b = if i_best + 1 < grid.len() {
        grid[i_best + 1]
    } else {
        hi
    };

    // Golden-section search; tolerant of infinite plateaus at the edges.
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    for _ in 0..200 {
        if (b - a) <= 1e-12 * b.abs().max(1e-300) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = objective(x2);
        }
    }
    let u_star = if f1 <= f2 { x1 } else { x2 };
    let psi = psi_tilde(&mgf, u_star);
    if !psi.is_finite() {
        return Err(DgvarError::EmptyDomain);
    }
    let alpha = log_3_eps + psi.ln();
    // A = psitilde exp(-alpha) (alpha/u*)^alpha, assembled in log space.
    let ln_a = psi.ln() - alpha + alpha * (alpha / u_star).ln();
    Ok(TailBoundParams {
        a_const: ln_a.exp(),
        alpha,
        u_star,
    })
}

/// Scans prefixes of the descending-|lambda| ordering for the subset
/// minimizing (6 B_I / (pi epsilon beta_I))^(1/beta_I).
pub fn decay_params(lambda: &[f64], epsilon: f64) -> Result<DecayBoundParams> {
    assert!(epsilon > 0.0, "epsilon must be positive");
    let mut nonzero: Vec<(usize, f64)> = lambda
        .iter()
        .enumerate()
        .filter(|(_, &l)| l != 0.0)
        .map(|(i, &l)| (i, l.abs()))
        .collect();
    if nonzero.is_empty() {
        return Err(DgvarError::AllEigenvaluesZero);
    }
    nonzero.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());

    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    let mut ln_prod = 0.0;
    let mut best: Option<(usize, f64)> = None;
    for k in 1..=nonzero.len() {
        ln_prod -= 0.5 * nonzero[k - 1].1.ln();
        let beta = k as f64 / 2.0;
        let ln_b = -beta * ln_2pi + ln_prod;
        let ln_obj =
            (6.0f64.ln() + ln_b - (std::f64::consts::PI * epsilon * beta).ln()) / beta;
        if best.map_or(true, |(_, o)| ln_obj < o) {
            best = Some((k, ln_obj));
        }
    }
    let (k, _) = best.unwrap();
    let beta = k as f64 / 2.0;
    let ln_b = -beta * ln_2pi - 0.5 * nonzero[..k].iter().map(|(_, l)| l.ln()).sum::<f64>();
    Ok(DecayBoundParams {
        b_const: ln_b.exp(),
        beta,
        subset: nonzero[..k].iter().map(|&(i, _)| i).collect(),
    })
}

/// The scheme-cost objective (6 B / (pi epsilon beta))^(1/beta) a decay bound
/// implies; exposed for the prefix-optimality checks.
pub fn decay_objective(decay: &DecayBoundParams, epsilon: f64) -> f64 {
    ((6.0f64.ln() + decay.b_const.ln()
        - (std::f64::consts::PI * epsilon * decay.beta).ln())
        / decay.beta)
        .exp()
}
