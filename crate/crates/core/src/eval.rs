//! Sampled regret estimation over random preference directions.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::points::{PointSet, Preference};
use crate::scalar::{from_f64, Scalar};
use crate::util;

/// Quantile levels reported for every regret distribution.
pub const QUANTILE_LEVELS: [f64; 4] = [0.85, 0.90, 0.95, 1.0];

/// Default number of evaluation directions for dimension `d`:
/// 20000 at d = 3, scaled by 3 per dimension, capped at 10^6.
pub fn default_direction_count(d: usize) -> usize {
    let raw = 20_000.0 * 3f64.powi(d as i32 - 3);
    raw.ceil().min(1_000_000.0) as usize
}

/// Sampled regret summary: the maximum over the sample, the direction that
/// attained it, and distribution quantiles at [`QUANTILE_LEVELS`].
#[derive(Debug, Clone)]
pub struct RegretReport<S: Scalar = f64> {
    pub max_regret: S,
    pub witness: Preference<S>,
    pub sample_count: usize,
    pub quantiles: Vec<(f64, S)>,
    pub seed: u64,
}

impl<S: Scalar> RegretReport<S> {
    /// Quantile value at `level`, if reported.
    pub fn quantile(&self, level: f64) -> Option<S> {
        self.quantiles
            .iter()
            .find(|(l, _)| (*l - level).abs() < 1e-12)
            .map(|&(_, v)| v)
    }
}

/// `count` uniform unit directions on the positive-orthant sphere
/// (componentwise absolute value of a standard Gaussian, normalized).
/// The sequence is a deterministic function of `seed`, and a longer sample
/// with the same seed extends a shorter one.
pub fn sample_directions<S: Scalar>(d: usize, count: usize, seed: u64) -> Vec<Preference<S>> {
    assert!(d >= 1, "dimension must be positive");
    assert!(count >= 1, "direction count must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let dir: Vec<S> = v.iter().map(|x| from_f64(x.abs() / norm)).collect();
        out.push(Preference::unit_unchecked(dir));
    }
    out
}

/// Maximum and distribution of `regret_at` over `count` sampled directions.
/// Deterministic given `(inputs, seed, count)`, independent of thread count.
pub fn estimate_regret<S: Scalar>(
    q: &PointSet<S>,
    p: &PointSet<S>,
    k: usize,
    count: usize,
    seed: u64,
) -> Result<RegretReport<S>> {
    let (dirs, regrets) = sampled_regrets(q, p, k, count, seed)?;
    Ok(report_from_samples(&dirs, &regrets, seed))
}

/// Per-direction regrets in sample order (the raw vector behind
/// [`estimate_regret`], for distribution dumps).
pub fn regret_samples<S: Scalar>(
    q: &PointSet<S>,
    p: &PointSet<S>,
    k: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<S>> {
    Ok(sampled_regrets(q, p, k, count, seed)?.1)
}

fn sampled_regrets<S: Scalar>(
    q: &PointSet<S>,
    p: &PointSet<S>,
    k: usize,
    count: usize,
    seed: u64,
) -> Result<(Vec<Preference<S>>, Vec<S>)> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if k == 0 || k > p.len() {
        return Err(Error::InvalidK { k, n: p.len() });
    }
    q.ensure_subset_of(p)?;
    let dirs = sample_directions::<S>(p.dims(), count, seed);
    let raw: Vec<Vec<S>> = dirs.iter().map(|u| u.direction().to_vec()).collect();
    let regrets = util::regrets_over(&raw, q, p, k);
    Ok((dirs, regrets))
}

/// Builds a [`RegretReport`] from per-direction regrets (sorted quantiles,
/// first-index witness).
pub(crate) fn report_from_samples<S: Scalar>(
    dirs: &[Preference<S>],
    regrets: &[S],
    seed: u64,
) -> RegretReport<S> {
    debug_assert_eq!(dirs.len(), regrets.len());
    let best = util::argmax_first(regrets);
    let mut sorted = regrets.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("regrets are finite"));
    let n = sorted.len();
    let quantiles = QUANTILE_LEVELS
        .iter()
        .map(|&level| {
            // Nearest-rank quantile; level 1.0 lands on the maximum.
            let rank = (level * n as f64).ceil() as usize;
            (level, sorted[rank.clamp(1, n) - 1])
        })
        .collect();
    RegretReport {
        max_regret: regrets[best],
        witness: dirs[best].clone(),
        sample_count: n,
        quantiles,
        seed,
    }
}
