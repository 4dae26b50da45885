//! `pronet`: file-based driver for the semigroup-network pipeline.
//!
//! Every subcommand is a thin composition of library calls — configs,
//! models, windows, and reports move between stages as JSON/CSV artifacts.
//! Exit codes separate concerns: 0 success, 2 malformed input or I/O, 3 a
//! failed mathematical hypothesis (rank deficiency, ambiguous tags,
//! unobservable modes, ...). Failures print a one-line JSON object
//! (`{"error": ..., "detail": ...}`) on stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use pronet_core::fixtures::by_name;
use pronet_core::io::{
    read_json, read_window_csv, write_json, write_sweep_csv, write_window_csv, NetworkConfig,
};
use pronet_core::{
    add_noise, check_isospectral, cocycle_residual, collapse, intertwining_residual, noise_sweep,
    recover_eigencomponents, reconstruct, reconstruct_from_moments, regression_slope,
    sample_uniform, stability_report, tag_rates, Error, ExponentialModel, Result,
    StabilityConfig, TagOptions, TaggedModel, Tolerances,
};

// ── Arguments ──────────────────────────────────────────────────────────────

#[derive(Parser)]
#[command(
    name = "pronet",
    version,
    about = "Exponential-mixture synthesis, reconstruction, tagging, and stability analysis \
             for time-rescaled semigroup networks"
)]
struct Cli {
    #[command(flatten)]
    tolerances: ToleranceArgs,
    #[command(subcommand)]
    command: Command,
}

/// Overrides for the numeric gates; unset flags keep library defaults.
#[derive(Args)]
struct ToleranceArgs {
    /// Relative closeness for eigenvalue matching.
    #[arg(long, global = true)]
    tol_eig: Option<f64>,
    /// Relative multiplicativity slack for scaling families.
    #[arg(long, global = true)]
    tol_cocycle: Option<f64>,
    /// Amplitudes at or below this magnitude are dropped when merging.
    #[arg(long, global = true)]
    tol_amp: Option<f64>,
    /// Smallest-to-largest singular value ratio accepted by the rank gate.
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    /// Imaginary node residue allowed, relative to the largest node.
    #[arg(long, global = true)]
    tol_imag: Option<f64>,
    /// Observation transfers at or below this magnitude are unobservable.
    #[arg(long, global = true)]
    tol_obs: Option<f64>,
}

impl ToleranceArgs {
    fn build(&self) -> Tolerances {
        let mut tol = Tolerances::default();
        if let Some(v) = self.tol_eig {
            tol.eig = v;
        }
        if let Some(v) = self.tol_cocycle {
            tol.cocycle = v;
        }
        if let Some(v) = self.tol_amp {
            tol.amp = v;
        }
        if let Some(v) = self.tol_rank {
            tol.rank = v;
        }
        if let Some(v) = self.tol_imag {
            tol.imag_rel = v;
        }
        if let Some(v) = self.tol_obs {
            tol.obs = v;
        }
        tol
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a network config: gauges, isospectrality, transfer algebra.
    VerifyNetwork {
        /// Network configuration (JSON).
        #[arg(long)]
        config: PathBuf,
    },
    /// Collapse a configured mixture into its exponential model.
    Synth {
        /// Network configuration with states and observation (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output model path (JSON); stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a model on a uniform time grid, optionally with seeded noise.
    Sample {
        /// Exponential model (JSON).
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        model: Option<PathBuf>,
        /// Synthesize the model from this configuration instead.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Sampling step.
        #[arg(long)]
        h: f64,
        /// Number of samples.
        #[arg(long)]
        count: usize,
        /// Inject noise of this exact Euclidean norm.
        #[arg(long, requires = "seed")]
        noise: Option<f64>,
        /// Seed for the noise direction.
        #[arg(long)]
        seed: Option<u64>,
        /// Output window path (CSV + JSON sidecar).
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover an exponential model from a sampled window.
    Reconstruct {
        /// Window CSV (with sidecar).
        #[arg(long)]
        window: PathBuf,
        /// Model order (number of exponential terms).
        #[arg(short = 'L', long = "order", alias = "L")]
        order: usize,
        /// Treat samples as power moments; recovered nodes are the rates.
        #[arg(long)]
        moments: bool,
        /// Output model path (JSON); stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Attribute recovered rates to sectors of a network.
    Tag {
        /// Exponential model (JSON).
        #[arg(long)]
        model: PathBuf,
        /// Network configuration providing the sector catalogue.
        #[arg(long)]
        config: PathBuf,
        /// Override the capture radius around each eigenvalue.
        #[arg(long)]
        capture_radius: Option<f64>,
        /// Output tagged-model path (JSON); stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Divide tagged amplitudes by observation transfers to recover
    /// eigenspace coefficients.
    RecoverComponents {
        /// Tagged model (JSON).
        #[arg(long)]
        tagged: PathBuf,
        /// Network configuration with states and observation.
        #[arg(long)]
        config: PathBuf,
        /// Output path (JSON); stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Conditioning, gaps, and noise-threshold report for a mixture.
    Stability {
        /// Network configuration with states and observation.
        #[arg(long)]
        config: PathBuf,
        /// Sampling step the report is evaluated at.
        #[arg(long)]
        h: f64,
        /// Node-error response constant.
        #[arg(long)]
        c2: Option<f64>,
        /// Node-to-rate conversion constant; default 2/(h·z_min).
        #[arg(long)]
        c3: Option<f64>,
        /// Prefactor of the a-priori condition bound.
        #[arg(long)]
        c_l: Option<f64>,
        /// Output report path (JSON); stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized noise sweep across a ladder of perturbation levels.
    Sweep {
        /// Network configuration with states and observation.
        #[arg(long)]
        config: PathBuf,
        /// Sampling step.
        #[arg(long)]
        h: f64,
        /// Model order (must match the collapsed mixture).
        #[arg(short = 'L', long = "order", alias = "L")]
        order: usize,
        /// Noise levels: `start:end:count` (log-spaced) or a comma list.
        #[arg(long)]
        epsilons: String,
        /// Trials per noise level.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Base seed; trial k perturbs with seed + k.
        #[arg(long)]
        seed: u64,
        /// Output ladder path (CSV).
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a built-in example configuration to disk.
    Fixture {
        /// One of: ex5, ex6, example1, example1-perturbed, example3, example4.
        name: String,
        /// Directory receiving `<name>.network.json`.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

// ── Entry point ────────────────────────────────────────────────────────────

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let tol = cli.tolerances.build();
    match run(cli.command, &tol) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", json!({ "error": err.name(), "detail": err.to_string() }));
            ExitCode::from(if err.is_mathematical() { 3 } else { 2 })
        }
    }
}

fn run(command: Command, tol: &Tolerances) -> Result<()> {
    match command {
        Command::VerifyNetwork { config } => verify_network(&config, tol),
        Command::Synth { config, out } => {
            let spec = NetworkConfig::load(&config)?.build_mixture(tol)?;
            let model = collapse(&spec, tol)?;
            emit(&model, out.as_deref())
        }
        Command::Sample {
            model,
            config,
            h,
            count,
            noise,
            seed,
            out,
        } => {
            let model: ExponentialModel = match (model, config) {
                (Some(path), _) => read_json(path)?,
                (None, Some(path)) => {
                    let spec = NetworkConfig::load(path)?.build_mixture(tol)?;
                    collapse(&spec, tol)?
                }
                (None, None) => unreachable!("clap enforces model|config"),
            };
            let mut window = sample_uniform(&model, h, count)?;
            if let Some(eps) = noise {
                window = add_noise(&window, eps, seed.expect("clap enforces seed"))?;
            }
            write_window_csv(&window, &out, seed)?;
            println!(
                "{}",
                json!({
                    "wrote": out,
                    "samples": window.values.len(),
                    "h": window.step,
                    "noise_level": window.noise_level,
                })
            );
            Ok(())
        }
        Command::Reconstruct {
            window,
            order,
            moments,
            out,
        } => {
            let window = read_window_csv(window)?;
            let model = if moments {
                reconstruct_from_moments(&window.values, order, tol)?
            } else {
                reconstruct(&window, order, tol)?
            };
            emit(&model, out.as_deref())
        }
        Command::Tag {
            model,
            config,
            capture_radius,
            out,
        } => {
            let model: ExponentialModel = read_json(model)?;
            let config = NetworkConfig::load(config)?;
            let opts = TagOptions {
                tol_eig: tol.eig,
                capture_radius,
                ..TagOptions::default()
            };
            let tagged = tag_rates(&model, &config.sectors, &opts)?;
            emit(&tagged, out.as_deref())
        }
        Command::RecoverComponents {
            tagged,
            config,
            out,
        } => {
            let tagged: TaggedModel = read_json(tagged)?;
            let spec = NetworkConfig::load(config)?.build_mixture(tol)?;
            let components = recover_eigencomponents(&tagged, &spec, tol)?;
            emit(&components, out.as_deref())
        }
        Command::Stability {
            config,
            h,
            c2,
            c3,
            c_l,
            out,
        } => {
            let spec = NetworkConfig::load(config)?.build_mixture(tol)?;
            let mut stability = StabilityConfig::default();
            if let Some(v) = c2 {
                stability.c2 = v;
            }
            stability.c3 = c3.or(stability.c3);
            if let Some(v) = c_l {
                stability.c_l = v;
            }
            let report = stability_report(&spec, h, &stability, tol)?;
            emit(&report, out.as_deref())
        }
        Command::Sweep {
            config,
            h,
            order,
            epsilons,
            trials,
            seed,
            out,
        } => {
            let spec = NetworkConfig::load(config)?.build_mixture(tol)?;
            let epsilons = parse_epsilons(&epsilons)?;
            let records = noise_sweep(&spec, h, order, &epsilons, trials, seed, tol)?;
            write_sweep_csv(&records, &out)?;
            println!(
                "{}",
                json!({
                    "wrote": out,
                    "levels": records.len(),
                    "trials": trials,
                    "slope": regression_slope(&records),
                })
            );
            Ok(())
        }
        Command::Fixture { name, out_dir } => {
            let fixture = by_name(&name)?;
            let path = out_dir.join(format!("{name}.network.json"));
            fixture.config.save(&path)?;
            println!(
                "{}",
                json!({
                    "fixture": fixture.name,
                    "config": path,
                    "step": fixture.step,
                    "order": fixture.order,
                })
            );
            Ok(())
        }
    }
}

// ── Subcommand bodies ──────────────────────────────────────────────────────

fn verify_network(path: &Path, tol: &Tolerances) -> Result<()> {
    let config = NetworkConfig::load(path)?;
    // Build first: it recovers gauges from the scaling matrix and rejects
    // inconsistent spectra; the report below then sees gauged sectors.
    let net = config.build_network(tol)?;
    let isospectral = check_isospectral(&net.sectors, tol.eig)?;
    let cocycle = cocycle_residual(&net, tol.eig)?;
    let intertwining = intertwining_residual(&net, &[0.25, 0.5, 1.0])?;
    println!(
        "{}",
        json!({
            "sectors": net.sector_ids(),
            "isospectral": isospectral.pass,
            "cocycle_residual": cocycle,
            "intertwining_residual": intertwining,
        })
    );
    Ok(())
}

/// Writes `value` as JSON to `out`, or pretty-prints it to stdout.
fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            write_json(path, value)?;
            println!("{}", json!({ "wrote": path }));
        }
        None => println!("{}", serde_json::to_string_pretty(value).map_err(Error::from)?),
    }
    Ok(())
}

/// Parses `start:end:count` (log-spaced, inclusive) or a comma list.
fn parse_epsilons(text: &str) -> Result<Vec<f64>> {
    let invalid = |detail: String| Error::InvalidInput(format!("noise ladder '{text}': {detail}"));
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(invalid("expected start:end:count".into()));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|e| invalid(format!("bad start: {e}")))?;
        let end: f64 = parts[1]
            .parse()
            .map_err(|e| invalid(format!("bad end: {e}")))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|e| invalid(format!("bad count: {e}")))?;
        if !(start > 0.0 && end > 0.0 && start.is_finite() && end.is_finite()) {
            return Err(invalid("levels must be positive and finite".into()));
        }
        if count == 0 {
            return Err(invalid("count must be positive".into()));
        }
        if count == 1 {
            vec![start]
        } else {
            let (lo, hi) = (start.log10(), end.log10());
            (0..count)
                .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (count - 1) as f64))
                .collect()
        }
    } else {
        text.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| invalid(format!("bad level '{p}': {e}"))))
            .collect::<Result<Vec<f64>>>()?
    };
    if values.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
        return Err(invalid("levels must be positive and finite".into()));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    // ── Noise ladder parsing ───────────────────────────────────────────

    #[test]
    fn log_spaced_ladders_hit_both_endpoints() {
        let eps = parse_epsilons("1e-8:1e-4:5").unwrap();
        assert_eq!(eps.len(), 5);
        assert!((eps[0] - 1e-8).abs() <= 1e-20);
        assert!((eps[4] - 1e-4).abs() <= 1e-16);
        assert!((eps[2] - 1e-6).abs() <= 1e-18);
    }

    #[test]
    fn comma_lists_pass_through() {
        let eps = parse_epsilons("1e-3, 5e-2").unwrap();
        assert_eq!(eps, vec![1e-3, 5e-2]);
    }

    #[test]
    fn degenerate_ladders_are_refused() {
        assert!(parse_epsilons("1e-8:1e-4").is_err());
        assert!(parse_epsilons("0:1e-4:3").is_err());
        assert!(parse_epsilons("1e-8:1e-4:0").is_err());
        assert!(parse_epsilons("abc").is_err());
        assert!(parse_epsilons("1e-3,-1e-3").is_err());
    }

    #[test]
    fn single_level_ladders_collapse_to_the_start() {
        assert_eq!(parse_epsilons("1e-5:1e-3:1").unwrap(), vec![1e-5]);
    }

    // ── Tolerance flags ────────────────────────────────────────────────

    #[test]
    fn unset_tolerance_flags_keep_defaults() {
        let args = ToleranceArgs {
            tol_eig: None,
            tol_cocycle: None,
            tol_amp: None,
            tol_rank: Some(1e-12),
            tol_imag: None,
            tol_obs: None,
        };
        let tol = args.build();
        assert_eq!(tol.rank, 1e-12);
        assert_eq!(tol.eig, Tolerances::default().eig);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
