//! Benchmark grid runner: datasets x algorithms x k x (ε or r), repeated
//! with derived seeds, one cell at a time for timing fidelity.

use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use serde::Deserialize;

use kregret::coreset::{rrs, RRSConfig};
use kregret::datasets::DatasetSpec;
use kregret::derive_seed;
use kregret::eval::{default_direction_count, estimate_regret};
use kregret::exact::{exact_regret_2d, exact_regret_3d};
use kregret::greedy::{greedy_regret_set, GreedyConfig};
use kregret::hitting::{min_error, rms_hs, HSConfig};
use kregret::PointSet;

use crate::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_reps")]
    reps: usize,
    /// Evaluation direction count; defaults per dimension.
    #[serde(default)]
    samples: Option<usize>,
    datasets: Vec<DatasetEntry>,
    /// Any of "hs", "rrs", "greedy".
    algorithms: Vec<String>,
    ks: Vec<usize>,
    #[serde(default)]
    epsilons: Vec<f64>,
    /// Size budgets: greedy grows to r, hs runs the min-error search.
    #[serde(default)]
    rs: Vec<usize>,
}

fn default_reps() -> usize {
    5
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetEntry {
    #[serde(default)]
    label: Option<String>,
    kind: String,
    #[serde(default)]
    d: Option<usize>,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    sigma: Option<f64>,
    #[serde(default)]
    cluster: Option<usize>,
    #[serde(default)]
    path: Option<PathBuf>,
    #[serde(default)]
    seed: Option<u64>,
}

impl DatasetEntry {
    fn to_spec(&self, base_seed: u64) -> Result<DatasetSpec, CliError> {
        let seed = self.seed.unwrap_or(base_seed);
        let need = |v: Option<usize>, what: &str| {
            v.ok_or_else(|| CliError::Usage(format!("dataset {}: missing {what}", self.kind)))
        };
        match self.kind.as_str() {
            "sphere" => Ok(DatasetSpec::Sphere {
                d: need(self.d, "d")?,
                n: need(self.n, "n")?,
                seed,
            }),
            "anticor" => Ok(DatasetSpec::AntiCor {
                d: need(self.d, "d")?,
                n: need(self.n, "n")?,
                sigma: self.sigma.unwrap_or(0.1),
                seed,
            }),
            "skypoints" => Ok(DatasetSpec::SkyPoints {
                d: need(self.d, "d")?,
                n: need(self.n, "n")?,
                cluster_size: self.cluster.unwrap_or(4),
                seed,
            }),
            "csv" => Ok(DatasetSpec::Csv {
                path: self
                    .path
                    .clone()
                    .ok_or_else(|| CliError::Usage("dataset csv: missing path".into()))?,
            }),
            other => Err(CliError::Usage(format!("unknown dataset kind {other:?}"))),
        }
    }

    fn label(&self, spec: &DatasetSpec) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match spec {
            DatasetSpec::Sphere { d, n, .. } => format!("sphere-d{d}-n{n}"),
            DatasetSpec::AntiCor { d, n, sigma, .. } => format!("anticor-d{d}-n{n}-s{sigma}"),
            DatasetSpec::SkyPoints { d, n, .. } => format!("skypoints-d{d}-n{n}"),
            DatasetSpec::Csv { path } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "csv".into()),
        }
    }
}

#[derive(Clone, Copy)]
enum Param {
    Eps(f64),
    R(usize),
}

struct Record {
    algorithm: String,
    dataset: String,
    d: usize,
    n: usize,
    k: usize,
    param: Param,
    result_size: Option<f64>,
    max_regret: Option<f64>,
    regret_kind: &'static str,
    q90: Option<f64>,
    q95: Option<f64>,
    wall_time_ms: Option<f64>,
    seed: u64,
    status: &'static str,
    agg: &'static str,
}

const HEADER: &str = "algorithm,dataset,d,n,k,eps,r,result_size,max_regret,regret_kind,q90,q95,wall_time_ms,seed,status,agg";

impl Record {
    fn csv(&self) -> String {
        fn opt(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let (eps, r) = match self.param {
            Param::Eps(e) => (e.to_string(), String::new()),
            Param::R(r) => (String::new(), r.to_string()),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.algorithm,
            self.dataset,
            self.d,
            self.n,
            self.k,
            eps,
            r,
            opt(self.result_size),
            opt(self.max_regret),
            self.regret_kind,
            opt(self.q90),
            opt(self.q95),
            opt(self.wall_time_ms),
            self.seed,
            self.status,
            self.agg
        )
    }
}

fn run_algorithm(
    algo: &str,
    p: &PointSet,
    k: usize,
    param: Param,
    samples: Option<usize>,
    seed: u64,
) -> Result<(PointSet, bool), String> {
    match (algo, param) {
        ("hs", Param::Eps(e)) => rms_hs(p, &HSConfig::new(e, k, seed))
            .map(|q| (q, false))
            .map_err(|e| e.to_string()),
        ("hs", Param::R(r)) => min_error(p, r, k, seed)
            .map(|res| (res.subset, !res.certified))
            .map_err(|e| e.to_string()),
        ("rrs", Param::Eps(e)) => {
            let mut cfg = RRSConfig::for_dims(p.dims(), e, k, seed);
            if let Some(s) = samples {
                cfg.eval_count = s;
            }
            rrs(p, &cfg)
                .map(|res| (res.subset, !res.certified))
                .map_err(|e| e.to_string())
        }
        ("rrs", Param::R(_)) => Err("rrs has no size-budget mode".into()),
        ("greedy", Param::Eps(e)) => {
            let mut cfg = GreedyConfig::by_epsilon(k, e, seed);
            if let Some(s) = samples {
                cfg.direction_count = s;
            }
            greedy_regret_set(p, &cfg)
                .map(|res| (res.subset, !res.reached_target))
                .map_err(|e| e.to_string())
        }
        ("greedy", Param::R(r)) => {
            let mut cfg = GreedyConfig::by_size(k, r, seed);
            if let Some(s) = samples {
                cfg.direction_count = s;
            }
            greedy_regret_set(p, &cfg)
                .map(|res| (res.subset, !res.reached_target))
                .map_err(|e| e.to_string())
        }
        (other, _) => Err(format!("unknown algorithm {other:?}")),
    }
}

/// Exact maximum regret when an exact path is affordable.
fn exact_if_small(q: &PointSet, p: &PointSet, k: usize) -> Option<f64> {
    match p.dims() {
        2 if p.len() <= 400 => exact_regret_2d(q, p, k).ok().map(|(v, _)| v),
        3 if p.len() <= 40 => exact_regret_3d(q, p, k).ok().map(|(v, _)| v),
        _ => None,
    }
}

pub fn run_bench(
    spec_path: &Path,
    out_override: Option<&Path>,
    timing: bool,
    timeout_secs: u64,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(spec_path)
        .map_err(|e| CliError::Io(format!("{}: {e}", spec_path.display())))?;
    let spec: BenchSpec = toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", spec_path.display())))?;
    let out = out_override
        .map(Path::to_path_buf)
        .or_else(|| spec.out.clone())
        .ok_or_else(|| CliError::Usage("no output: pass --out or set `out` in the spec".into()))?;
    if spec.reps == 0 {
        return Err(CliError::Usage("reps must be positive".into()));
    }
    if spec.samples == Some(0) {
        return Err(CliError::Usage("samples must be positive".into()));
    }
    if spec.epsilons.is_empty() && spec.rs.is_empty() {
        return Err(CliError::Usage("spec needs epsilons or rs".into()));
    }

    let mut datasets = Vec::new();
    for entry in &spec.datasets {
        let dspec = entry.to_spec(spec.seed)?;
        let points: PointSet = dspec.materialize().map_err(|e| match e {
            kregret::Error::Io(_) | kregret::Error::Csv { .. } => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        })?;
        datasets.push((entry.label(&dspec), points));
    }

    let params: Vec<Param> = spec
        .epsilons
        .iter()
        .map(|&e| Param::Eps(e))
        .chain(spec.rs.iter().map(|&r| Param::R(r)))
        .collect();

    let mut rows: Vec<String> = Vec::new();
    let mut cell_index = 0u64;
    for (label, points) in &datasets {
        for algo in &spec.algorithms {
            for &k in &spec.ks {
                for &param in &params {
                    cell_index += 1;
                    let cell = describe(algo, label, k, param);
                    eprintln!("bench: {cell}");
                    let records = run_cell(
                        algo,
                        label,
                        points,
                        k,
                        param,
                        &spec,
                        cell_index,
                        timing,
                        timeout_secs,
                    );
                    rows.extend(records.iter().map(Record::csv));
                }
            }
        }
    }

    append_rows(&out, &rows)?;
    eprintln!("bench: wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn describe(algo: &str, label: &str, k: usize, param: Param) -> String {
    match param {
        Param::Eps(e) => format!("{algo} on {label}, k={k}, eps={e}"),
        Param::R(r) => format!("{algo} on {label}, k={k}, r={r}"),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    algo: &str,
    label: &str,
    points: &PointSet,
    k: usize,
    param: Param,
    spec: &BenchSpec,
    cell_index: u64,
    timing: bool,
    timeout_secs: u64,
) -> Vec<Record> {
    let base = Record {
        algorithm: algo.to_string(),
        dataset: label.to_string(),
        d: points.dims(),
        n: points.len(),
        k,
        param,
        result_size: None,
        max_regret: None,
        regret_kind: "",
        q90: None,
        q95: None,
        wall_time_ms: None,
        seed: spec.seed,
        status: "error",
        agg: "run",
    };

    let mut records = Vec::with_capacity(spec.reps + 1);
    for rep in 0..spec.reps {
        let run_seed = derive_seed(spec.seed, (cell_index << 20) | rep as u64);
        let mut record = Record { seed: run_seed, ..clone_base(&base) };

        let (tx, rx) = mpsc::channel();
        let algo_owned = algo.to_string();
        let p = points.clone();
        let samples = spec.samples;
        std::thread::spawn(move || {
            let started = Instant::now();
            let outcome = run_algorithm(&algo_owned, &p, k, param, samples, run_seed);
            let elapsed = started.elapsed().as_millis() as f64;
            let _ = tx.send((outcome, elapsed));
        });

        match rx.recv_timeout(Duration::from_secs(timeout_secs)) {
            Err(_) => {
                record.status = "timeout";
                records.push(record);
            }
            Ok((Err(message), _)) => {
                eprintln!("bench:   {message}");
                record.status = "error";
                records.push(record);
            }
            Ok((Ok((subset, flagged)), elapsed)) => {
                record.status = if flagged { "flagged" } else { "ok" };
                record.result_size = Some(subset.len() as f64);
                record.wall_time_ms = Some(if timing { elapsed } else { 0.0 });
                let count = spec
                    .samples
                    .unwrap_or_else(|| default_direction_count(points.dims()));
                let report =
                    estimate_regret(&subset, points, k, count, derive_seed(run_seed, 1));
                if let Ok(report) = report {
                    record.q90 = report.quantile(0.90);
                    record.q95 = report.quantile(0.95);
                    if let Some(exact) = exact_if_small(&subset, points, k) {
                        record.max_regret = Some(exact);
                        record.regret_kind = "exact";
                    } else {
                        record.max_regret = Some(report.max_regret);
                        record.regret_kind = "sampled";
                    }
                }
                records.push(record);
            }
        }
    }

    // Mean over the runs that produced numbers.
    let done: Vec<&Record> = records
        .iter()
        .filter(|r| r.status == "ok" || r.status == "flagged")
        .collect();
    if !done.is_empty() {
        let mean = |f: fn(&Record) -> Option<f64>| {
            let values: Vec<f64> = done.iter().filter_map(|r| f(r)).collect();
            if values.is_empty() {
                None
            } else {
                Some(values.iter().sum::<f64>() / values.len() as f64)
            }
        };
        let mut m = clone_base(&base);
        m.agg = "mean";
        m.status = "ok";
        m.regret_kind = done[0].regret_kind;
        m.result_size = mean(|r| r.result_size);
        m.max_regret = mean(|r| r.max_regret);
        m.q90 = mean(|r| r.q90);
        m.q95 = mean(|r| r.q95);
        m.wall_time_ms = mean(|r| r.wall_time_ms);
        records.push(m);
    }
    records
}

fn clone_base(base: &Record) -> Record {
    Record {
        algorithm: base.algorithm.clone(),
        dataset: base.dataset.clone(),
        d: base.d,
        n: base.n,
        k: base.k,
        param: base.param,
        result_size: base.result_size,
        max_regret: base.max_regret,
        regret_kind: base.regret_kind,
        q90: base.q90,
        q95: base.q95,
        wall_time_ms: base.wall_time_ms,
        seed: base.seed,
        status: base.status,
        agg: base.agg,
    }
}

fn append_rows(path: &Path, rows: &[String]) -> Result<(), CliError> {
    use std::io::Write;
    let fresh = !path.exists();
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut emit = |line: &str| -> std::io::Result<()> { writeln!(file, "{line}") };
    if fresh {
        emit(HEADER).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    for row in rows {
        emit(row).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
