//! Monte Carlo benchmark arm: samplers, the order-statistic quantile, and
//! both accuracy calibrations (theoretical via the normal approximation of the
//! order statistic, experimental via repeated runs scored against the
//! certified CDF).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::error::{DgvarError, Result};
use crate::linalg::{cholesky, Mat};
use crate::special::inverse_normal_cdf;
use crate::spectral::DeltaGammaModel;
use crate::var::cdf;

/// Rows sampled per RNG substream. Fixing the chunk size makes the output a
/// pure function of (inputs, seed), independent of thread count.
const CHUNK_ROWS: usize = 8192;

#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub sample_count: usize,
    pub seed: u64,
    pub repetitions: usize,
    pub confidence_rho: f64,
}

/// m x p sample matrix, rows contiguous.
#[derive(Debug, Clone)]
pub struct Samples {
    pub data: Vec<f64>,
    pub dim: usize,
}

impl Samples {
    pub fn rows(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn sample_chunks<F>(m: usize, p: usize, fill: F) -> Samples
where
    F: Fn(u64, usize, &mut [f64]) + Sync,
{
    let mut data = vec![0.0; m * p];
    data.par_chunks_mut(CHUNK_ROWS * p)
        .enumerate()
        .for_each(|(chunk, slice)| {
            let rows = slice.len() / p;
            fill(chunk as u64, rows, slice);
        });
    Samples { data, dim: p }
}

/// Draws m rows from N(0, sigma). Deterministic per seed.
pub fn sample_normal(sigma: &Mat, m: usize, seed: u64) -> Result<Samples> {
    let l = cholesky(sigma)?;
    let p = sigma.rows();
    Ok(sample_chunks(m, p, |chunk, rows, out| {
        let mut rng = chunk_rng(seed, chunk);
        let mut z = vec![0.0; p];
        for r in 0..rows {
            for zj in z.iter_mut() {
                *zj = rng.sample(StandardNormal);
            }
            let row = &mut out[r * p..(r + 1) * p];
            for i in 0..p {
                let mut acc = 0.0;
                for j in 0..=i {
                    acc += l[(i, j)] * z[j];
                }
                row[i] = acc;
            }
        }
    }))
}

/// Draws m rows from the multivariate t with scatter sigma and nu degrees of
/// freedom: (L z) / sqrt(w / nu) with one chi-square_nu draw w per row.
pub fn sample_student_t(sigma: &Mat, nu: f64, m: usize, seed: u64) -> Result<Samples> {
    if !(nu > 0.0) {
        return Err(DgvarError::InvalidModel("nu must be positive".into()));
    }
    let l = cholesky(sigma)?;
    let p = sigma.rows();
    // chi-square_nu as gamma(nu/2, scale 2), Marsaglia-Tsang under the hood
    let chi2 = Gamma::new(nu / 2.0, 2.0)
        .map_err(|e| DgvarError::InvalidModel(format!("chi-square shape: {e}")))?;
    Ok(sample_chunks(m, p, |chunk, rows, out| {
        let mut rng = chunk_rng(seed, chunk);
        let mut z = vec![0.0; p];
        for r in 0..rows {
            for zj in z.iter_mut() {
                *zj = rng.sample(StandardNormal);
            }
            let w: f64 = chi2.sample(&mut rng);
            let scale = (nu / w).sqrt();
            let row = &mut out[r * p..(r + 1) * p];
            for i in 0..p {
                let mut acc = 0.0;
                for j in 0..=i {
                    acc += l[(i, j)] * z[j];
                }
                row[i] = acc * scale;
            }
        }
    }))
}

/// theta*dt + delta's + s'gamma*s/2 for one sample row.
pub fn delta_v(model: &DeltaGammaModel, s: &[f64]) -> f64 {
    let mut lin = 0.0;
    let mut quad = 0.0;
    for i in 0..s.len() {
        lin += model.delta[i] * s[i];
        for j in 0..s.len() {
            quad += s[i] * model.gamma_matrix[(i, j)] * s[j];
        }
    }
    model.theta * model.dt + lin + 0.5 * quad
}

fn delta_v_sorted(model: &DeltaGammaModel, samples: &Samples) -> Vec<f64> {
    let p = samples.dim;
    let mut dv: Vec<f64> = samples
        .data
        .par_chunks(p)
        .map(|row| delta_v(model, row))
        .collect();
    dv.sort_by(|a, b| a.partial_cmp(b).unwrap());
    dv
}

/// Order-statistic VaR estimate: the ceil(M*gamma)-th smallest of M simulated
/// value changes.
pub fn mc_var(model: &DeltaGammaModel, gamma: f64, config: &McConfig) -> Result<f64> {
    model.validate()?;
    let m = config.sample_count;
    let k = (m as f64 * gamma).ceil() as usize;
    if k < 1 || k > m {
        return Err(DgvarError::SampleTooSmall {
            index: k,
            samples: m,
        });
    }
    let samples = match model.dist {
        crate::spectral::Dist::Normal => sample_normal(&model.sigma, m, config.seed)?,
        crate::spectral::Dist::StudentT { nu } => {
            sample_student_t(&model.sigma, nu, m, config.seed)?
        }
    };
    let dv = delta_v_sorted(model, &samples);
    Ok(dv[k - 1])
}

/// M = ceil(Phi^-1(1 - rho/2)^2 * gamma(1-gamma) / epsilon^2).
pub fn required_samples(gamma: f64, epsilon: f64, rho: f64) -> usize {
    let z = inverse_normal_cdf(1.0 - rho / 2.0);
    (z * z * gamma * (1.0 - gamma) / (epsilon * epsilon)).ceil() as usize
}

/// epsilon ~ Phi^-1(1 - rho/2) * sqrt(gamma(1-gamma)/M).
pub fn epsilon_theoretical(gamma: f64, m: usize, rho: f64) -> f64 {
    inverse_normal_cdf(1.0 - rho / 2.0) * (gamma * (1.0 - gamma) / m as f64).sqrt()
}

fn mix_seed(seed: u64, rep: u64) -> u64 {
    // splitmix64 step; decorrelates repetition streams.
    let mut z = seed.wrapping_add(rep.wrapping_mul(0x9E3779B97F4A7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Internal tolerance for scoring MC quantiles against the certified CDF.
const SCORING_EPS: f64 = 1e-9;

/// Runs the estimator R times, scores each run's x* by gamma* = P(x*)
/// (computed by the certified method at a much tighter tolerance), and
/// reports half the (1-rho) spread of the gamma* sample.
pub fn epsilon_experimental(model: &DeltaGammaModel, gamma: f64, config: &McConfig) -> Result<f64> {
    let r = config.repetitions;
    let rho = config.confidence_rho;
    let lo_idx = (rho / 2.0 * r as f64).floor() as usize;
    if lo_idx < 1 {
        return Err(DgvarError::TooFewRepetitions);
    }
    let hi_idx = ((1.0 - rho / 2.0) * r as f64).ceil() as usize;

    let mut gamma_star = Vec::with_capacity(r);
    for rep in 0..r {
        let cfg = McConfig {
            seed: mix_seed(config.seed, rep as u64),
            ..*config
        };
        let x_star = mc_var(model, gamma, &cfg)?;
        gamma_star.push(cdf(model, x_star, SCORING_EPS)?);
    }
    gamma_star.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(0.5 * (gamma_star[hi_idx - 1] - gamma_star[lo_idx - 1]))
}

/// gamma* scores for each repetition, for coverage-style diagnostics.
pub fn gamma_star_scores(
    model: &DeltaGammaModel,
    gamma: f64,
    config: &McConfig,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(config.repetitions);
    for rep in 0..config.repetitions {
        let cfg = McConfig {
            seed: mix_seed(config.seed, rep as u64),
            ..*config
        };
        let x_star = mc_var(model, gamma, &cfg)?;
        out.push(cdf(model, x_star, SCORING_EPS)?);
    }
    Ok(out)
}
