//! `onebit`: simulate 1-bit measurements, run recovery sweeps and compute
//! complexity parameters from the command line.

mod args;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use onebit_core::complexity::{
    check_c2, effective_dim, gaussian_width, lambda_of, local_width, mu_of, LambdaMethod, ParamEstimate,
};
use onebit_core::estimate::{normalized_error, solve_hinge};
use onebit_core::harness::{emit, read_spec, run_mu_sweep, run_sweep, SweepResult};
use onebit_core::measure::generate_dataset;
use onebit_core::signal_sets::sample_signal;
use onebit_core::{Error, Execution, Result};
use serde_json::json;

use args::{parse_quantizer, parse_set, parse_vector, SimulateSpec};

#[derive(Parser)]
#[command(name = "onebit", version, about = "Robust 1-bit compressed sensing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a ground truth and a quantized Gaussian dataset; optionally solve.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Error-vs-m sweep; writes records.csv, summary.csv, fit.json, spec.json.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run trials on the calling thread only.
        #[arg(long)]
        sequential: bool,
    },
    /// Error-vs-μ sweep over μK with m = ⌈c·μ⁴·s·ln n⌉.
    MuSweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        sequential: bool,
    },
    /// Gaussian width of a signal set, or its local width at an anchor.
    Width {
        /// Set descriptor as JSON, or @path to a JSON file.
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Anchor point (JSON array) for the local width.
        #[arg(long, requires = "t")]
        anchor: Option<String>,
        /// Localization radius.
        #[arg(long, requires = "anchor")]
        t: Option<f64>,
        /// Report w²/scale² (scale = diameter, or t for local widths).
        #[arg(long)]
        effective_dim: bool,
    },
    /// Correlation parameter λ = E[f(g)g].
    Lambda {
        /// sign, bit_flip:P, additive_gaussian:SIGMA, or a JSON descriptor.
        #[arg(long)]
        quantizer: String,
        #[arg(long, value_enum, default_value_t = args::Method::ClosedForm)]
        method: args::Method,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Scaling factor μ = argmin over [0, 1] of the expected hinge risk.
    Mu {
        #[arg(long)]
        quantizer: String,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Smallest binned mean of f(g)·sign(g) (condition C2).
    C2 {
        #[arg(long)]
        quantizer: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_validation() {
        2
    } else if e.is_numerical() {
        3
    } else {
        1
    }
}

/// Caps the worker pool at `ONEBIT_THREADS` when set.
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("ONEBIT_THREADS") else {
        return Ok(());
    };
    let threads: usize =
        raw.trim().parse().ok().filter(|&t| t >= 1).ok_or_else(|| {
            Error::InvalidParameter(format!("ONEBIT_THREADS must be a positive integer, got {raw:?}"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidParameter(format!("cannot configure worker pool: {e}")))
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate { spec, out } => simulate(&spec, &out),
        Command::Sweep { spec, out, sequential } => {
            let spec = read_spec(&spec)?;
            let result = run_sweep(&spec, execution(sequential))?;
            emit(&spec, &result, &out)?;
            print_json(&sweep_summary(&result))
        }
        Command::MuSweep { spec, out, sequential } => {
            let spec = read_spec(&spec)?;
            let result = run_mu_sweep(&spec, execution(sequential))?;
            emit(&spec, &result, &out)?;
            print_json(&sweep_summary(&result))
        }
        Command::Width {
            set,
            samples,
            seed,
            anchor,
            t,
            effective_dim: as_dim,
        } => {
            let set = parse_set(&set)?;
            let (w, scale, method) = match (anchor, t) {
                (Some(anchor), Some(t)) => {
                    let anchor = parse_vector(&anchor)?;
                    (
                        local_width(&set, &anchor, t, samples, seed)?,
                        t,
                        "monte_carlo_local_lower_bound",
                    )
                }
                _ => (gaussian_width(&set, samples, seed)?, set.diameter(), "monte_carlo"),
            };
            let record = if as_dim {
                ParamEstimate {
                    value: effective_dim(&w, scale),
                    // Delta method for w ↦ w²/scale².
                    std_error: 2.0 * w.mean * w.std_error / (scale * scale),
                    method: format!("{method}_effective_dim"),
                    seed: Some(seed),
                }
            } else {
                ParamEstimate {
                    value: w.mean,
                    std_error: w.std_error,
                    method: method.to_string(),
                    seed: Some(seed),
                }
            };
            print_json(&record)
        }
        Command::Lambda {
            quantizer,
            method,
            points,
            samples,
            seed,
        } => {
            let q = parse_quantizer(&quantizer)?;
            let method = match method {
                args::Method::ClosedForm => LambdaMethod::ClosedForm,
                args::Method::Quadrature => LambdaMethod::Quadrature { points },
                args::Method::MonteCarlo => LambdaMethod::MonteCarlo { samples, seed },
            };
            print_json(&lambda_of(&q, method)?)
        }
        Command::Mu { quantizer, points } => {
            let q = parse_quantizer(&quantizer)?;
            print_json(&ParamEstimate {
                value: mu_of(&q, points)?,
                std_error: 0.0,
                method: "golden_section_quadrature".to_string(),
                seed: None,
            })
        }
        Command::C2 {
            quantizer,
            samples,
            bins,
            seed,
        } => {
            let q = parse_quantizer(&quantizer)?;
            let report = check_c2(&q, samples, bins, seed)?;
            print_json(&ParamEstimate {
                value: report.margin,
                std_error: report.margin_std_error,
                method: format!("binned_monte_carlo_{bins}"),
                seed: Some(seed),
            })
        }
    }
}

fn sweep_summary(result: &SweepResult) -> serde_json::Value {
    json!({
        "summary": result.summary,
        "fit": result.fit,
    })
}

fn simulate(spec_path: &Path, out: &Path) -> Result<()> {
    let text = fs::read_to_string(spec_path).map_err(|e| Error::Io {
        path: spec_path.to_path_buf(),
        source: e,
    })?;
    let spec: SimulateSpec = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: spec_path.to_path_buf(),
        detail: e.to_string(),
    })?;
    spec.validate()?;
    let x0 = sample_signal(&spec.signal_kind(), spec.n, spec.seed)?;
    let data = generate_dataset(&x0, spec.m, &spec.quantizer, spec.seed)?;
    data.save(out)?;
    let mut report = json!({ "m": spec.m, "n": spec.n, "seed": spec.seed, "out": out });
    if let Some(set) = &spec.set {
        let est = solve_hinge(&data, set, &spec.solver)?;
        let path = out.join("estimate.json");
        fs::write(&path, serde_json::to_string_pretty(&est)? + "\n").map_err(|e| Error::Io { path, source: e })?;
        est.write_trace_csv(&out.join("trace.csv"))?;
        report["objective"] = json!(est.objective);
        report["iterations_used"] = json!(est.iterations_used);
        report["error"] = json!(normalized_error(&x0, &est.x_hat)?.value);
    }
    print_json(&report)
}
