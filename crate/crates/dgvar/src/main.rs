use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use dgvar::model_io::{parse_model, write_model};
use dgvar::montecarlo::{
    epsilon_experimental, epsilon_theoretical, mc_var, required_samples, McConfig,
};
use dgvar::portfolio::{aggregate, simulate_portfolio, PortfolioConfig};
use dgvar::spectral::{DeltaGammaModel, Dist};
use dgvar::{cdf, var, DgvarError};

const EXIT_PARSE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "dgvar", about = "Delta-gamma VaR with certified error bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute VaR_gamma from a model file
    Var {
        model: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        epsilon: f64,
    },
    /// Generate a synthetic options-book model file
    Simulate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        options: usize,
        /// "normal" or "t"
        #[arg(long, default_value = "normal")]
        dist: String,
        #[arg(long, default_value_t = 6.0)]
        nu: f64,
    },
    /// Reproduce the benchmark CSVs (Fourier vs Monte Carlo)
    Benchmark {
        /// "normal" or "t"
        #[arg(long, default_value = "normal")]
        dist: String,
        #[arg(long, default_value_t = 6.0)]
        nu: f64,
        /// Comma-separated epsilon list
        #[arg(long, default_value = "1e-3,1e-4,1e-5,1e-6")]
        epsilons: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        gamma: f64,
        #[arg(long, default_value_t = 0.01)]
        rho: f64,
        /// Skip MC rows whose required sample count exceeds this
        #[arg(long, default_value_t = 10_000_000)]
        mc_max_m: usize,
        /// Repetitions for the experimental-accuracy series
        #[arg(long, default_value_t = 200)]
        reps: usize,
    },
    /// Evaluate P(dV <= x) from a model file
    Cdf {
        model: PathBuf,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        epsilon: f64,
    },
}

fn error_variant(e: &DgvarError) -> &'static str {
    match e {
        DgvarError::NotPositiveDefinite { .. } => "NotPositiveDefinite",
        DgvarError::EigenNoConvergence { .. } => "EigenNoConvergence",
        DgvarError::EmptyDomain => "EmptyDomain",
        DgvarError::AllEigenvaluesZero => "AllEigenvaluesZero",
        DgvarError::InvalidExponent(_) => "InvalidExponent",
        DgvarError::SchemeTooLarge { .. } => "SchemeTooLarge",
        DgvarError::OutOfRange { .. } => "OutOfRange",
        DgvarError::ToleranceTooLoose { .. } => "ToleranceTooLoose",
        DgvarError::EpsilonOutOfRange(_) => "EpsilonOutOfRange",
        DgvarError::DegenerateModel => "DegenerateModel",
        DgvarError::SampleTooSmall { .. } => "SampleTooSmall",
        DgvarError::TooFewRepetitions => "TooFewRepetitions",
        DgvarError::InvalidModel(_) => "InvalidModel",
    }
}

fn fail(e: DgvarError) -> ExitCode {
    eprintln!("error: {}: {e}", error_variant(&e));
    match e {
        DgvarError::InvalidModel(_) => ExitCode::from(EXIT_PARSE),
        _ => ExitCode::from(EXIT_NUMERICAL),
    }
}

fn load_model(path: &PathBuf) -> Result<DeltaGammaModel, ExitCode> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_PARSE)
    })?;
    parse_model(&text).map_err(|e| {
        eprintln!("error: {}: {e}", error_variant(&e));
        ExitCode::from(EXIT_PARSE)
    })
}

fn parse_dist(name: &str, nu: f64) -> Result<Dist, ExitCode> {
    match name {
        "normal" => Ok(Dist::Normal),
        "t" => Ok(Dist::StudentT { nu }),
        other => {
            eprintln!("error: unknown dist {other:?} (expected \"normal\" or \"t\")");
            Err(ExitCode::from(EXIT_PARSE))
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("DGVAR_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        } else {
            eprintln!("error: DGVAR_THREADS must be an integer");
            return ExitCode::from(EXIT_PARSE);
        }
    }

    let cli = Cli::parse();
    match cli.command {
        Command::Var {
            model,
            gamma,
            epsilon,
        } => {
            let m = match load_model(&model) {
                Ok(m) => m,
                Err(code) => return code,
            };
            let start = Instant::now();
            match var(&m, gamma, epsilon) {
                Ok(r) => {
                    println!("var={:.17e}", r.x_star);
                    println!("gamma={gamma}");
                    println!("epsilon={epsilon}");
                    println!("n_terms={}", r.n_terms_used);
                    println!("cf_evals={}", r.cf_evals);
                    println!("time_s={:.6}", start.elapsed().as_secs_f64());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Simulate {
            seed,
            out,
            options,
            dist,
            nu,
        } => {
            let d = match parse_dist(&dist, nu) {
                Ok(d) => d,
                Err(code) => return code,
            };
            let cfg = PortfolioConfig {
                option_count: options,
                seed,
                ..Default::default()
            };
            let result = simulate_portfolio(&cfg)
                .and_then(|(opts, sigma)| aggregate(&opts, &sigma, &cfg, d));
            match result {
                Ok(model) => {
                    if let Err(e) = fs::write(&out, write_model(&model)) {
                        eprintln!("error: cannot write {}: {e}", out.display());
                        return ExitCode::from(EXIT_PARSE);
                    }
                    println!("out={}", out.display());
                    println!("p={}", model.dim());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Benchmark {
            dist,
            nu,
            epsilons,
            seed,
            out_dir,
            gamma,
            rho,
            mc_max_m,
            reps,
        } => {
            let d = match parse_dist(&dist, nu) {
                Ok(d) => d,
                Err(code) => return code,
            };
            let eps_list: Result<Vec<f64>, _> =
                epsilons.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let eps_list = match eps_list {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: bad --epsilons: {e}");
                    return ExitCode::from(EXIT_PARSE);
                }
            };
            if let Err(e) = fs::create_dir_all(&out_dir) {
                eprintln!("error: cannot create {}: {e}", out_dir.display());
                return ExitCode::from(EXIT_PARSE);
            }
            match run_benchmark(d, &eps_list, seed, &out_dir, gamma, rho, mc_max_m, reps) {
                Ok(()) => ExitCode::SUCCESS,
                Err(BenchError::Numerical(e)) => fail(e),
                Err(BenchError::Io(msg)) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(EXIT_PARSE)
                }
            }
        }
        Command::Cdf { model, x, epsilon } => {
            let m = match load_model(&model) {
                Ok(m) => m,
                Err(code) => return code,
            };
            match cdf(&m, x, epsilon) {
                Ok(p) => {
                    println!("p={:.17e}", p);
                    println!("epsilon={epsilon}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}

enum BenchError {
    Numerical(DgvarError),
    Io(String),
}

impl From<DgvarError> for BenchError {
    fn from(e: DgvarError) -> Self {
        BenchError::Numerical(e)
    }
}

#[allow(clippy::too_many_arguments)]
fn run_benchmark(
    dist: Dist,
    eps_list: &[f64],
    seed: u64,
    out_dir: &PathBuf,
    gamma: f64,
    rho: f64,
    mc_max_m: usize,
    reps: usize,
) -> Result<(), BenchError> {
    let cfg = PortfolioConfig {
        seed,
        ..Default::default()
    };
    let (opts, sigma) = simulate_portfolio(&cfg)?;
    let model = aggregate(&opts, &sigma, &cfg, dist)?;

    let write = |name: &str, body: String| -> Result<(), BenchError> {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
        println!("wrote={}", path.display());
        Ok(())
    };

    let mut fourier = String::from("epsilon,n_terms,time_s\n");
    for &eps in eps_list {
        let start = Instant::now();
        let r = var(&model, gamma, eps)?;
        fourier.push_str(&format!(
            "{eps},{},{:.6}\n",
            r.n_terms_used,
            start.elapsed().as_secs_f64()
        ));
    }
    write("fourier.csv", fourier)?;

    let mut mc = String::from("epsilon,m_samples,time_s\n");
    for &eps in eps_list {
        let m_samples = required_samples(gamma, eps, rho);
        if m_samples > mc_max_m {
            eprintln!("skipping MC at epsilon={eps}: M={m_samples} exceeds cap {mc_max_m}");
            continue;
        }
        let mc_cfg = McConfig {
            sample_count: m_samples,
            seed,
            repetitions: 1,
            confidence_rho: rho,
        };
        let start = Instant::now();
        let _ = mc_var(&model, gamma, &mc_cfg)?;
        mc.push_str(&format!(
            "{eps},{m_samples},{:.6}\n",
            start.elapsed().as_secs_f64()
        ));
    }
    write("mc.csv", mc)?;

    let mut fig1 = String::from("m,eps_experimental,eps_theoretical\n");
    for &m_samples in &[1_000usize, 10_000, 100_000] {
        let mc_cfg = McConfig {
            sample_count: m_samples,
            seed,
            repetitions: reps,
            confidence_rho: rho,
        };
        let exp = epsilon_experimental(&model, gamma, &mc_cfg)?;
        let theo = epsilon_theoretical(gamma, m_samples, rho);
        fig1.push_str(&format!("{m_samples},{exp:.8e},{theo:.8e}\n"));
    }
    let mut m_samples = 1_000usize;
    while m_samples <= 1_000_000_000 {
        let theo = epsilon_theoretical(gamma, m_samples, rho);
        fig1.push_str(&format!("{m_samples},,{theo:.8e}\n"));
        m_samples *= 10;
    }
    write("fig1.csv", fig1)?;
    Ok(())
}
