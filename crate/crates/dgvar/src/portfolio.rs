//! Simulated market-maker options book: random vanilla options on a set of
//! independent underlyings, aggregated into a delta-gamma model.
//!
//! Conventions: spots are normalized to 1, so risk factors are per-horizon
//! returns, the scatter entries are return variances, and delta/gamma are in
//! return coordinates. Pricing is Black-Scholes with rate 0 and per-underlying
//! volatility sqrt(sigma_ii).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{DgvarError, Result};
use crate::linalg::Mat;
use crate::special::{normal_cdf, normal_pdf};
use crate::spectral::{DeltaGammaModel, Dist};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionSpec {
    /// 0-based index into the underlying list.
    pub underlying_index: usize,
    pub is_call: bool,
    pub is_long: bool,
    /// Years.
    pub maturity: f64,
    /// Strike over spot.
    pub moneyness: f64,
    pub nominal: f64,
}

#[derive(Debug, Clone)]
pub struct PortfolioConfig {
    pub option_count: usize,
    pub underlying_count: usize,
    /// Horizon in years.
    pub dt: f64,
    /// Annualized return-variance range for the scatter diagonal.
    pub variance_range: (f64, f64),
    pub moneyness_mean: f64,
    pub moneyness_sd: f64,
    pub moneyness_bounds: (f64, f64),
    pub nominal_range: (f64, f64),
    pub maturity_range: (f64, f64),
    pub seed: u64,
}

impl Default for PortfolioConfig {
    fn default() -> Self {
        PortfolioConfig {
            option_count: 10_000,
            underlying_count: 30,
            dt: 10.0 / 252.0,
            variance_range: (0.01, 0.09),
            moneyness_mean: 1.0,
            moneyness_sd: 0.1,
            moneyness_bounds: (0.5, 1.5),
            nominal_range: (1e4, 1e5),
            maturity_range: (10.0 / 252.0, 1.0),
            seed: 0,
        }
    }
}

impl PortfolioConfig {
    pub fn validate(&self) -> Result<()> {
        let ordered = |(a, b): (f64, f64)| a > 0.0 && b > a;
        if self.option_count == 0 || self.underlying_count == 0 {
            return Err(DgvarError::InvalidModel(
                "option and underlying counts must be positive".into(),
            ));
        }
        if !(self.dt > 0.0)
            || !ordered(self.variance_range)
            || !ordered(self.moneyness_bounds)
            || !ordered(self.nominal_range)
            || !ordered(self.maturity_range)
            || !(self.moneyness_sd > 0.0)
        {
            return Err(DgvarError::InvalidModel(
                "portfolio config ranges must be positive and ordered".into(),
            ));
        }
        Ok(())
    }
}

/// Draws the option book and the diagonal annualized scatter. Deterministic
/// per seed.
pub fn simulate_portfolio(config: &PortfolioConfig) -> Result<(Vec<OptionSpec>, Vec<f64>)> {
    config.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);

    let sigma_diag: Vec<f64> = (0..config.underlying_count)
        .map(|_| rng.gen_range(config.variance_range.0..config.variance_range.1))
        .collect();

    let (m_lo, m_hi) = config.moneyness_bounds;
    let mut options = Vec::with_capacity(config.option_count);
    for _ in 0..config.option_count {
        let moneyness = loop {
            // rejection from the untruncated normal; acceptance is near 1
            let z: f64 = rng.sample(StandardNormal);
            let m = config.moneyness_mean + config.moneyness_sd * z;
            if m >= m_lo && m <= m_hi {
                break m;
            }
        };
        options.push(OptionSpec {
            underlying_index: rng.gen_range(0..config.underlying_count),
            is_call: rng.gen::<bool>(),
            is_long: rng.gen::<bool>(),
            maturity: rng.gen_range(config.maturity_range.0..config.maturity_range.1),
            moneyness,
            nominal: rng.gen_range(config.nominal_range.0..config.nominal_range.1),
        });
    }
    Ok((options, sigma_diag))
}

/// Black-Scholes delta and gamma at spot 1, strike = moneyness, rate 0,
/// time to maturity = opt.maturity. Scaled by nominal, sign flipped for
/// shorts.
pub fn bs_greeks(opt: &OptionSpec, vol: f64) -> (f64, f64) {
    assert!(vol > 0.0 && opt.maturity > 0.0);
    let sig_rt = vol * opt.maturity.sqrt();
    let d1 = (-opt.moneyness.ln()) / sig_rt + 0.5 * sig_rt;
    let delta_call = normal_cdf(d1);
    let gamma = normal_pdf(d1) / sig_rt; // spot = 1
    let delta = if opt.is_call {
        delta_call
    } else {
        delta_call - 1.0
    };
    let sign = if opt.is_long { 1.0 } else { -1.0 };
    (sign * opt.nominal * delta, sign * opt.nominal * gamma)
}

/// Sums per-underlying deltas and gammas into a model with scatter dt*Sigma
/// (diagonal) and theta = 0. Cross-gammas are zero since each option has a
/// single underlying.
pub fn aggregate(
    options: &[OptionSpec],
    sigma_diag: &[f64],
    config: &PortfolioConfig,
    dist: Dist,
) -> Result<DeltaGammaModel> {
    let p = sigma_diag.len();
    let mut delta = vec![0.0; p];
    let mut gamma_diag = vec![0.0; p];
    for opt in options {
        if opt.underlying_index >= p {
            return Err(DgvarError::InvalidModel(format!(
                "underlying index {} out of range (p = {p})",
                opt.underlying_index
            )));
        }
        let vol = sigma_diag[opt.underlying_index].sqrt();
        let (d, g) = bs_greeks(opt, vol);
        delta[opt.underlying_index] += d;
        gamma_diag[opt.underlying_index] += g;
    }
    let scaled: Vec<f64> = sigma_diag.iter().map(|v| v * config.dt).collect();
    let model = DeltaGammaModel {
        sigma: Mat::diag(&scaled),
        delta,
        gamma_matrix: Mat::diag(&gamma_diag),
        theta: 0.0,
        dt: config.dt,
        dist,
    };
    model.validate()?;
    Ok(model)
}
