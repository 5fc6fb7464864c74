//! Command-line front end: sample measurements, run recovery, sweep noise
//! levels, print stability constants, and spot-check design injectivity.
//!
//! Artifacts are JSON (polynomials as arrays of `[re, im]` pairs) or CSV for
//! sweep rows. Every command that writes a file echoes its parameters under
//! a `"meta"` key so artifacts are self-describing; readers ignore the key.
//!
//! Exit codes: 0 on success, 1 when the data itself refuses recovery (signal
//! too small on the circle, ambiguous root count, degenerate norm), 2 for
//! usage and I/O errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiments::{emit_csv, injectivity_trial, noise_sweep, SignalSpec};
use crate::measurements::{measure, MeasurementSet, NoiseDistribution, NoiseSpec};
use crate::polynomial::Poly;
use crate::recovery::{bounds_for, recover, RecoveryConfig};

#[derive(Parser)]
#[command(
    name = "phaserec",
    version,
    about = "Recover complex polynomials from phaseless circle samples"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DistributionArg {
    /// Independent draws uniform in [-epsilon, epsilon].
    UniformSymmetric,
    /// Independent draws of exactly +epsilon or -epsilon.
    AdversarialSign,
}

impl From<DistributionArg> for NoiseDistribution {
    fn from(a: DistributionArg) -> Self {
        match a {
            DistributionArg::UniformSymmetric => NoiseDistribution::UniformSymmetric,
            DistributionArg::AdversarialSign => NoiseDistribution::AdversarialSign,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample the 8d-4 magnitude measurements of a polynomial.
    Measure {
        /// Polynomial coefficients, JSON array of [re, im] pairs.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Per-measurement noise radius.
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        /// Noise RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = DistributionArg::UniformSymmetric)]
        distribution: DistributionArg,
        /// Output file (stdout if omitted).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Reconstruct coefficients (up to a global phase) from a measurement file.
    Recover {
        /// Measurement set as written by `measure`.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Output file (stdout if omitted).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Starting contour quadrature node count (0 = automatic).
        #[arg(long = "quadrature-nodes", default_value_t = 0)]
        quadrature_nodes: usize,
    },
    /// Monte-Carlo noise sweep over one random signal; rows go to a CSV file.
    Sweep {
        /// Degree bound of the random signal.
        #[arg(long)]
        degree: usize,
        /// Smallest noise level of the logarithmic grid.
        #[arg(long = "eps-min")]
        eps_min: f64,
        /// Largest noise level of the logarithmic grid.
        #[arg(long = "eps-max")]
        eps_max: f64,
        /// Number of grid points.
        #[arg(long, default_value_t = 12)]
        points: usize,
        /// Trials per grid point.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Seed for both the signal and the noise streams.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV output file.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Print the stability constants of a known polynomial.
    Bounds {
        /// Polynomial coefficients, JSON array of [re, im] pairs.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
    /// Empirically check that the 4d-4 point design separates random pairs.
    InjectCheck {
        /// Degree bound of the sampled polynomials.
        #[arg(long)]
        degree: usize,
        /// Random pairs to compare.
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        /// Design angle (any value except multiples of pi).
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Runs the CLI against real stdout and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    run_with_output(args, &mut stdout.lock())
}

/// [`run`] with stdout captured, for tests.
pub fn run_with_output<I, T, W>(args: I, out: &mut W) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    eprintln!("{e}");
                    2
                }
            };
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_recoverable() {
                1
            } else {
                2
            }
        }
    }
}

fn dispatch<W: Write>(cmd: Command, out: &mut W) -> Result<()> {
    match cmd {
        Command::Measure {
            input,
            epsilon,
            seed,
            distribution,
            out: out_path,
        } => {
            if epsilon.is_nan() || epsilon < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "noise radius must be non-negative, got {epsilon}"
                )));
            }
            let f: Poly = read_json(&input)?;
            let spec = NoiseSpec {
                epsilon,
                seed,
                distribution: distribution.into(),
            };
            let ms = measure(&f, &spec);
            let mut value = serde_json::to_value(&ms)?;
            value["meta"] = serde_json::json!({
                "input": input.display().to_string(),
                "epsilon": epsilon,
                "seed": seed,
                "distribution": serde_json::to_value(NoiseDistribution::from(distribution))?,
            });
            write_artifact(out_path.as_deref(), &value, out)
        }
        Command::Recover {
            input,
            out: out_path,
            quadrature_nodes,
        } => {
            let ms: MeasurementSet = read_json(&input)?;
            let cfg = RecoveryConfig {
                start_nodes: quadrature_nodes,
                ..RecoveryConfig::default()
            };
            match recover(&ms, &cfg) {
                Ok(rec) => {
                    let mut value = serde_json::to_value(&rec)?;
                    value["meta"] = serde_json::json!({
                        "input": input.display().to_string(),
                        "quadrature_nodes": quadrature_nodes,
                    });
                    write_artifact(out_path.as_deref(), &value, out)
                }
                Err(e) if e.is_recoverable() => {
                    // Leave a machine-readable record of the refusal where
                    // the output was expected, then fail with code 1.
                    let value = serde_json::json!({ "error": e.to_string() });
                    write_artifact(out_path.as_deref(), &value, out)?;
                    Err(e)
                }
                Err(e) => Err(e),
            }
        }
        Command::Sweep {
            degree,
            eps_min,
            eps_max,
            points,
            trials,
            seed,
            out: csv_path,
        } => {
            if !(eps_min > 0.0 && eps_max >= eps_min) {
                return Err(Error::InvalidInput(format!(
                    "need 0 < eps-min <= eps-max, got {eps_min} and {eps_max}"
                )));
            }
            if points == 0 {
                return Err(Error::InvalidInput("need at least one grid point".into()));
            }
            let grid: Vec<f64> = if points == 1 {
                vec![eps_min]
            } else {
                let ratio = eps_max / eps_min;
                (0..points)
                    .map(|i| eps_min * ratio.powf(i as f64 / (points - 1) as f64))
                    .collect()
            };
            let spec = SignalSpec::new(degree, seed);
            let report = noise_sweep(&spec, &grid, trials)?;
            let file = std::fs::File::create(&csv_path)?;
            emit_csv(&report.rows, std::io::BufWriter::new(file))?;
            let meta = serde_json::json!({
                "spec": report.spec,
                "epsilon0": report.epsilon0,
                "alpha": report.alpha,
                "min_modulus": report.min_modulus,
                "rows": report.rows.len(),
                "csv": csv_path.display().to_string(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&meta)?)?;
            Ok(())
        }
        Command::Bounds { input } => {
            let f: Poly = read_json(&input)?;
            let grid = (16 * f.degree_bound()).max(4096);
            let bounds = bounds_for(&f, grid)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&bounds)?)?;
            Ok(())
        }
        Command::InjectCheck {
            degree,
            pairs,
            alpha,
            seed,
        } => {
            let report = injectivity_trial(degree, pairs, alpha, seed)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            Ok(())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn write_artifact<W: Write>(
    path: Option<&Path>,
    value: &serde_json::Value,
    fallback: &mut W,
) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => {
            std::fs::write(p, text + "\n")?;
        }
        None => writeln!(fallback, "{text}")?,
    }
    Ok(())
}
