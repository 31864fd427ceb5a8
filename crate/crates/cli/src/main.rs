//! Command-line front end: dataset generation, regret-set construction,
//! regret evaluation, and the benchmark harness.
//!
//! Exit codes: 0 ok, 1 usage or invalid input, 2 I/O failure,
//! 3 algorithm finished but flagged its result as non-certified.
//! All subcommands are deterministic given `--seed`; `REGRETSET_THREADS`
//! caps the worker pool without changing any output byte.

mod bench;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kregret::coreset::{rrs, RRSConfig};
use kregret::datasets::{self, DatasetSpec};
use kregret::eval::{default_direction_count, estimate_regret, regret_samples, RegretReport};
use kregret::exact::{exact_regret_2d, exact_regret_3d_with_cap};
use kregret::greedy::{greedy_regret_set, GreedyConfig, GreedyTarget};
use kregret::hitting::{min_error, rms_hs, HSConfig, NetMode, DEFAULT_MAX_NET};
use kregret::rank::skyline;
use kregret::{Error, PointSet, Preference};

#[derive(Parser)]
#[command(
    name = "kregret",
    about = "k-regret minimizing sets: generators, algorithms, evaluation, benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Sphere,
    Anticor,
    Skypoints,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NetArg {
    Grid,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

impl Toggle {
    fn on(self) -> bool {
        self == Toggle::On
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset and write it as CSV.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// Displacement standard deviation (anticor only).
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        /// Dominated followers per leader (skypoints only).
        #[arg(long, default_value_t = 4)]
        cluster: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report (and optionally write) the skyline of a dataset.
    Skyline {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hitting-set regret set: a (k, 2ε)-regret set via δ-net ranges.
    RmsHs {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "grid")]
        net: NetArg,
        #[arg(long, value_enum, default_value = "on")]
        skyline: Toggle,
        #[arg(long, default_value_t = DEFAULT_MAX_NET)]
        max_net: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Staged randomized regret set driven by sampled estimates.
    RmsRrs {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluation directions per round (default scales with d).
        #[arg(long)]
        samples: Option<usize>,
        /// Directions sampled per round (default scales with ε and d).
        #[arg(long)]
        batch: Option<usize>,
        #[arg(long, default_value_t = 64)]
        rounds: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Greedy (sampled) regret set: fixed direction sample, worst first.
    RmsGreedy {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Target size (exactly one of --r / --eps).
        #[arg(long)]
        r: Option<usize>,
        /// Target sampled regret (exactly one of --r / --eps).
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long, value_enum, default_value = "on")]
        skyline: Toggle,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sampled regret report for a subset against its ground set.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        subset: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append the report as a CSV row.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact maximum regret (d = 2 or d = 3 only).
    Exact {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        subset: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Point cap for the d = 3 candidate enumeration (O(n^4) work).
        #[arg(long, default_value_t = kregret::exact::DEFAULT_3D_POINT_CAP)]
        cap: usize,
    },
    /// Smallest error reachable within a size budget (bicriteria search).
    MinError {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sorted regret samples for histogramming, one value per line.
    Dist {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        subset: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an algorithm x parameter grid from a TOML spec, appending
    /// records to a CSV.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        /// Output CSV (overrides the spec's `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// `off` zeroes wall times for byte-reproducible outputs.
        #[arg(long, value_enum, default_value = "on")]
        timing: Toggle,
        /// Per-cell timeout in seconds.
        #[arg(long, default_value_t = 300)]
        timeout: u64,
    },
}

enum CliError {
    Usage(String),
    Io(String),
    Flagged(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Flagged(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Flagged(m) => m,
        }
    }
}

fn lib_error(e: Error) -> CliError {
    match e {
        Error::Io(_) | Error::Csv { .. } | Error::EmptyColumn { .. } => CliError::Io(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };

    if let Ok(threads) = std::env::var("REGRETSET_THREADS") {
        match threads.parse::<usize>() {
            Ok(t) if t >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            _ => {
                eprintln!("error: REGRETSET_THREADS must be a positive integer");
                return ExitCode::from(1);
            }
        }
    }

    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn load(path: &Path) -> Result<PointSet, CliError> {
    // Anything failing here is a problem with the file's bytes or content.
    datasets::load_csv(path, None).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn positive_samples(samples: Option<usize>, fallback: usize) -> Result<usize, CliError> {
    match samples {
        Some(0) => Err(CliError::Usage("--samples must be positive".into())),
        Some(s) => Ok(s),
        None => Ok(fallback),
    }
}

fn save(path: &Path, p: &PointSet, comment: &str) -> Result<(), CliError> {
    datasets::save_csv(path, p, Some(comment))
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_pair(input: &Path, subset: &Path) -> Result<(PointSet, PointSet), CliError> {
    let p = load(input)?;
    let q = load(subset)?;
    q.ensure_subset_of(&p).map_err(|e| {
        CliError::Usage(format!("{} is not a subset of {}: {e}", subset.display(), input.display()))
    })?;
    Ok((p, q))
}

fn report_json(report: &RegretReport) -> serde_json::Value {
    serde_json::json!({
        "max_regret": report.max_regret,
        "witness": report.witness.direction(),
        "samples": report.sample_count,
        "q85": report.quantile(0.85),
        "q90": report.quantile(0.90),
        "q95": report.quantile(0.95),
        "q100": report.quantile(1.0),
        "seed": report.seed,
    })
}

/// Flat CSV row form of a report (matching `REPORT_HEADER`).
const REPORT_HEADER: &str = "max_regret,samples,q85,q90,q95,q100,seed";

fn report_csv_row(report: &RegretReport) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        report.max_regret,
        report.sample_count,
        report.quantile(0.85).unwrap_or(f64::NAN),
        report.quantile(0.90).unwrap_or(f64::NAN),
        report.quantile(0.95).unwrap_or(f64::NAN),
        report.quantile(1.0).unwrap_or(f64::NAN),
        report.seed
    )
}

fn witness_json(w: &Preference) -> serde_json::Value {
    serde_json::json!(w.direction())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gen {
            kind,
            d,
            n,
            sigma,
            cluster,
            seed,
            out,
        } => {
            let spec = match kind {
                GenKind::Sphere => DatasetSpec::Sphere { d, n, seed },
                GenKind::Anticor => DatasetSpec::AntiCor { d, n, sigma, seed },
                GenKind::Skypoints => DatasetSpec::SkyPoints {
                    d,
                    n,
                    cluster_size: cluster,
                    seed,
                },
            };
            if d < 2 {
                return Err(CliError::Usage("--d must be at least 2".into()));
            }
            if n < 1 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let p: PointSet = spec.materialize().map_err(lib_error)?;
            save(&out, &p, &format!("seed={seed} kind={}", spec.kind()))?;
            println!("wrote {} points (d={}, kind={}) to {}", p.len(), d, spec.kind(), out.display());
            Ok(())
        }
        Command::Skyline { input, out } => {
            let p = load(&input)?;
            let sky = skyline(&p);
            println!("skyline points: {} of {}", sky.len(), p.len());
            if let Some(out) = out {
                save(&out, &sky, "kind=skyline")?;
            }
            Ok(())
        }
        Command::RmsHs {
            input,
            k,
            eps,
            seed,
            net,
            skyline: use_sky,
            max_net,
            out,
        } => {
            let p = load(&input)?;
            let config = HSConfig {
                epsilon: eps,
                k,
                use_skyline: use_sky.on(),
                net_mode: match net {
                    NetArg::Grid => NetMode::Grid,
                    NetArg::Random => NetMode::Random,
                },
                seed,
                max_net,
            };
            let q = rms_hs(&p, &config).map_err(lib_error)?;
            save(&out, &q, &format!("seed={seed} kind=rms-hs eps={eps} k={k}"))?;
            println!("selected {} of {} points (guarantee 2*eps = {})", q.len(), p.len(), 2.0 * eps);
            Ok(())
        }
        Command::RmsRrs {
            input,
            k,
            eps,
            seed,
            samples,
            batch,
            rounds,
            out,
        } => {
            let p = load(&input)?;
            let mut config = RRSConfig::for_dims(p.dims(), eps, k, seed);
            if let Some(samples) = samples {
                config.eval_count = samples;
            }
            if let Some(batch) = batch {
                config.batch_size = batch;
            }
            config.max_rounds = rounds;
            let result = rrs(&p, &config).map_err(lib_error)?;
            save(&out, &result.subset, &format!("seed={seed} kind=rms-rrs eps={eps} k={k}"))?;
            println!(
                "selected {} of {} points in {} rounds, sampled regret {}",
                result.subset.len(),
                p.len(),
                result.rounds,
                result.report.max_regret
            );
            if !result.certified {
                return Err(CliError::Flagged(format!(
                    "round cap hit with sampled regret {} > eps {eps}",
                    result.report.max_regret
                )));
            }
            Ok(())
        }
        Command::RmsGreedy {
            input,
            k,
            r,
            eps,
            samples,
            skyline: use_sky,
            seed,
            out,
        } => {
            let target = match (r, eps) {
                (Some(size), None) => GreedyTarget::Size(size),
                (None, Some(e)) => GreedyTarget::Epsilon(e),
                _ => {
                    return Err(CliError::Usage(
                        "exactly one of --r and --eps must be given".into(),
                    ))
                }
            };
            let p = load(&input)?;
            let config = GreedyConfig {
                k,
                target,
                direction_count: samples,
                seed,
                use_skyline: use_sky.on(),
            };
            let result = greedy_regret_set(&p, &config).map_err(lib_error)?;
            save(&out, &result.subset, &format!("seed={seed} kind=rms-greedy k={k}"))?;
            println!(
                "greedy (sampled): selected {} of {} points, sampled regret {}",
                result.subset.len(),
                p.len(),
                result.sampled_regret
            );
            if !result.reached_target {
                return Err(CliError::Flagged(format!(
                    "target unreachable; sampled regret stuck at {}",
                    result.sampled_regret
                )));
            }
            Ok(())
        }
        Command::Eval {
            input,
            subset,
            k,
            samples,
            seed,
            out,
        } => {
            let (p, q) = load_pair(&input, &subset)?;
            let count = positive_samples(samples, default_direction_count(p.dims()))?;
            let report = estimate_regret(&q, &p, k, count, seed).map_err(lib_error)?;
            println!("{}", report_json(&report));
            if let Some(out) = out {
                append_csv_row(&out, REPORT_HEADER, &report_csv_row(&report))?;
            }
            Ok(())
        }
        Command::Exact {
            input,
            subset,
            k,
            cap,
        } => {
            let (p, q) = load_pair(&input, &subset)?;
            let (value, witness) = match p.dims() {
                2 => exact_regret_2d(&q, &p, k).map_err(lib_error)?,
                3 => exact_regret_3d_with_cap(&q, &p, k, cap).map_err(lib_error)?,
                d => {
                    return Err(CliError::Usage(format!(
                        "exact regret supports d = 2 or 3, got d = {d}; use `eval` instead"
                    )))
                }
            };
            println!(
                "{}",
                serde_json::json!({ "regret": value, "witness": witness_json(&witness), "k": k })
            );
            Ok(())
        }
        Command::MinError {
            input,
            r,
            k,
            seed,
            out,
        } => {
            let p = load(&input)?;
            let result = min_error(&p, r, k, seed).map_err(lib_error)?;
            save(&out, &result.subset, &format!("seed={seed} kind=min-error r={r} k={k}"))?;
            println!(
                "{}",
                serde_json::json!({
                    "epsilon": result.epsilon,
                    "size": result.subset.len(),
                    "certified": result.certified,
                })
            );
            if !result.certified {
                return Err(CliError::Flagged(format!(
                    "search ended without a bracket; reported epsilon {}",
                    result.epsilon
                )));
            }
            Ok(())
        }
        Command::Dist {
            input,
            subset,
            k,
            samples,
            seed,
            out,
        } => {
            let (p, q) = load_pair(&input, &subset)?;
            let count = positive_samples(samples, default_direction_count(p.dims()))?;
            let mut values = regret_samples(&q, &p, k, count, seed).map_err(lib_error)?;
            values.sort_by(|a, b| a.partial_cmp(b).expect("regrets are finite"));
            let mut body = String::with_capacity(values.len() * 20);
            for v in values {
                body.push_str(&format!("{v}\n"));
            }
            std::fs::write(&out, body)
                .map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
            println!("wrote {count} sorted regret samples to {}", out.display());
            Ok(())
        }
        Command::Bench {
            spec,
            out,
            timing,
            timeout,
        } => bench::run_bench(&spec, out.as_deref(), timing.on(), timeout),
    }
}

fn append_csv_row(path: &Path, header: &str, row: &str) -> Result<(), CliError> {
    use std::io::Write;
    let fresh = !path.exists();
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut write = |s: &str| -> std::io::Result<()> { writeln!(file, "{s}") };
    let result = if fresh { write(header).and_then(|_| write(row)) } else { write(row) };
    result.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
