//! Synthetic dataset generators and CSV ingestion.
//!
//! Generators draw from a single sequential RNG stream per dataset, so a
//! `(spec, seed)` pair always produces the same set byte-for-byte after
//! serialization.
//!
//! CSV dialect: UTF-8, comma-separated, `.` decimal point, first row a
//! header of attribute names, empty cell = missing value, lines starting
//! with `#` are comments. A column literally named `id` carries point ids;
//! otherwise ids are row indices. Missing cells are filled with the
//! minimum of the column's present (raw) values, then every negative value
//! is replaced by its absolute value.

use std::fmt::Write as _;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::scalar::{from_f64, Scalar};

/// A dataset recipe: either a generator with parameters or a CSV path.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    Sphere { d: usize, n: usize, seed: u64 },
    AntiCor { d: usize, n: usize, sigma: f64, seed: u64 },
    SkyPoints { d: usize, n: usize, cluster_size: usize, seed: u64 },
    Csv { path: std::path::PathBuf },
}

impl DatasetSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            DatasetSpec::Sphere { .. } => "sphere",
            DatasetSpec::AntiCor { .. } => "anticor",
            DatasetSpec::SkyPoints { .. } => "skypoints",
            DatasetSpec::Csv { .. } => "csv",
        }
    }

    pub fn materialize<S: Scalar>(&self) -> Result<PointSet<S>> {
        match self {
            DatasetSpec::Sphere { d, n, seed } => Ok(gen_sphere(*d, *n, *seed)),
            DatasetSpec::AntiCor { d, n, sigma, seed } => gen_anticor(*d, *n, *sigma, *seed),
            DatasetSpec::SkyPoints {
                d,
                n,
                cluster_size,
                seed,
            } => gen_skypoints(*d, *n, *cluster_size, *seed),
            DatasetSpec::Csv { path } => load_csv(path, None),
        }
    }
}

/// `n` points uniform on the unit sphere restricted to the positive
/// orthant; every point lies on the skyline.
pub fn gen_sphere<S: Scalar>(d: usize, n: usize, seed: u64) -> PointSet<S> {
    assert!(d >= 2, "sphere needs dimension at least 2");
    assert!(n >= 1, "need at least one point");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    while rows.len() < n {
        rows.push(sphere_point::<S>(d, &mut rng));
    }
    PointSet::from_rows(d, rows).expect("sphere points are valid")
}

fn sphere_point<S: Scalar>(d: usize, rng: &mut ChaCha8Rng) -> Vec<S> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.iter().map(|x| from_f64(x.abs() / norm)).collect();
        }
    }
}

/// Anti-correlated points: uniform on the simplex slice
/// `{x >= 0, ⟨x, 1/√d⟩ = 0.5}`, displaced along the normalized all-ones
/// direction by `N(0, sigma²)`, rejecting anything outside the orthant.
pub fn gen_anticor<S: Scalar>(d: usize, n: usize, sigma: f64, seed: u64) -> Result<PointSet<S>> {
    assert!(d >= 2, "anticor needs dimension at least 2");
    assert!(n >= 1, "need at least one point");
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sqrt_d = (d as f64).sqrt();
    let simplex_sum = 0.5 * sqrt_d;
    let limit = 1000 * n;
    let mut rejected = 0usize;
    let mut rows: Vec<Vec<S>> = Vec::with_capacity(n);
    while rows.len() < n {
        if rejected > limit {
            return Err(Error::RejectionLimit { limit });
        }
        // Exponential spacings give a uniform point on the simplex.
        let e: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = e.iter().sum();
        let t: f64 = rng.sample::<f64, _>(StandardNormal);
        let shift = t * sigma / sqrt_d;
        let p: Vec<f64> = e.iter().map(|x| x / total * simplex_sum + shift).collect();
        if p.iter().all(|&x| x >= 0.0) {
            rows.push(p.into_iter().map(from_f64).collect());
        } else {
            rejected += 1;
        }
    }
    PointSet::from_rows(d, rows)
}

/// Sphere leaders plus `cluster_size` dominated followers per leader:
/// follower = leader minus per-coordinate offsets uniform in (0, 0.02],
/// clipped at 0. `n` must be divisible by `cluster_size + 1`; the leaders
/// come first and are exactly the dataset's skyline.
pub fn gen_skypoints<S: Scalar>(
    d: usize,
    n: usize,
    cluster_size: usize,
    seed: u64,
) -> Result<PointSet<S>> {
    assert!(d >= 2, "skypoints needs dimension at least 2");
    if n == 0 || !n.is_multiple_of(cluster_size + 1) {
        return Err(Error::InvalidParameter(format!(
            "n = {n} is not divisible into leaders with {cluster_size} followers each"
        )));
    }
    let leaders = n / (cluster_size + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<S>> = Vec::with_capacity(n);
    for _ in 0..leaders {
        rows.push(sphere_point::<S>(d, &mut rng));
    }
    for li in 0..leaders {
        let leader: Vec<f64> = rows[li]
            .iter()
            .map(|&x| x.to_f64().expect("finite"))
            .collect();
        for _ in 0..cluster_size {
            let follower: Vec<S> = leader
                .iter()
                .map(|&x| {
                    let offset = 0.02 * (1.0 - rng.random::<f64>()); // (0, 0.02]
                    from_f64((x - offset).max(0.0))
                })
                .collect();
            rows.push(follower);
        }
    }
    PointSet::from_rows(d, rows)
}

/// Loads a point set from CSV (dialect in the module docs). `columns`
/// optionally restricts which header names are used as coordinates.
pub fn load_csv<S: Scalar>(path: &Path, columns: Option<&[String]>) -> Result<PointSet<S>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(0, "<file>", &e.to_string()))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(0, "<header>", &e.to_string()))?
        .iter()
        .map(|h| h.to_string())
        .collect();

    let mut id_col: Option<usize> = None;
    let mut coord_cols: Vec<usize> = Vec::new();
    for (i, name) in headers.iter().enumerate() {
        if name == "id" && id_col.is_none() {
            id_col = Some(i);
        } else if columns.is_none_or(|cs| cs.iter().any(|c| c == name)) {
            coord_cols.push(i);
        }
    }
    if coord_cols.is_empty() {
        return Err(Error::InvalidParameter(
            "no coordinate columns in csv header".into(),
        ));
    }

    let mut ids: Vec<usize> = Vec::new();
    let mut cells: Vec<Vec<Option<f64>>> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(row_idx + 1, "<row>", &e.to_string()))?;
        if let Some(ic) = id_col {
            let raw = record.get(ic).unwrap_or("");
            let id = raw
                .parse::<usize>()
                .map_err(|_| csv_error(row_idx + 1, "id", &format!("bad id {raw:?}")))?;
            ids.push(id);
        } else {
            ids.push(row_idx);
        }
        let mut row = Vec::with_capacity(coord_cols.len());
        for &c in &coord_cols {
            let raw = record.get(c).unwrap_or("");
            if raw.is_empty() {
                row.push(None);
            } else {
                let v = raw.parse::<f64>().map_err(|_| {
                    csv_error(row_idx + 1, &headers[c], &format!("unparseable value {raw:?}"))
                })?;
                if !v.is_finite() {
                    return Err(csv_error(row_idx + 1, &headers[c], "non-finite value"));
                }
                row.push(Some(v));
            }
        }
        cells.push(row);
    }
    if cells.is_empty() {
        return Err(Error::EmptyPointSet);
    }

    // Column minima over present raw values fill the gaps; absolute values
    // are applied afterwards.
    let d = coord_cols.len();
    let mut minima = vec![f64::INFINITY; d];
    for row in &cells {
        for (j, cell) in row.iter().enumerate() {
            if let Some(v) = cell {
                minima[j] = minima[j].min(*v);
            }
        }
    }
    for (j, m) in minima.iter().enumerate() {
        if !m.is_finite() {
            return Err(Error::EmptyColumn {
                name: headers[coord_cols[j]].clone(),
            });
        }
    }
    let rows: Vec<Vec<S>> = cells
        .into_iter()
        .map(|row| {
            row.into_iter()
                .enumerate()
                .map(|(j, cell)| from_f64(cell.unwrap_or(minima[j]).abs()))
                .collect()
        })
        .collect();
    PointSet::from_rows_with_ids(d, rows, ids)
}

fn csv_error(row: usize, column: &str, message: &str) -> Error {
    Error::Csv {
        row,
        column: column.to_string(),
        message: message.to_string(),
    }
}

/// Serializes a point set in the module's CSV dialect, with an optional
/// leading comment line (for generator provenance such as
/// `# seed=7 kind=sphere`), an `id` column, and coordinates named
/// `x0..x{d-1}`.
pub fn to_csv_string<S: Scalar>(p: &PointSet<S>, comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        let _ = writeln!(out, "# {c}");
    }
    let _ = write!(out, "id");
    for j in 0..p.dims() {
        let _ = write!(out, ",x{j}");
    }
    let _ = writeln!(out);
    for (id, coords) in p.iter() {
        let _ = write!(out, "{id}");
        for &v in coords {
            let _ = write!(out, ",{v}");
        }
        let _ = writeln!(out);
    }
    out
}

/// Writes [`to_csv_string`] to a file.
pub fn save_csv<S: Scalar>(path: &Path, p: &PointSet<S>, comment: Option<&str>) -> Result<()> {
    std::fs::write(path, to_csv_string(p, comment))?;
    Ok(())
}
