//! Sampled-direction greedy baseline.
//!
//! Stands in for the LP-driven greedy regret-set algorithms it is compared
//! against: instead of solving a program for the exact worst-case
//! preference, it scans a fixed seeded sample of directions for the one
//! with the largest current regret and adds that direction's top point.
//! Outputs should be labeled "greedy (sampled)"; fidelity to the LP-based
//! originals is bounded by `direction_count` and measured in benchmarks,
//! not assumed.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::rank::skyline;
use crate::scalar::Scalar;
use crate::{eval, util};

/// Stopping rule: grow to a fixed size, or until the sampled maximum
/// regret drops to a target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreedyTarget<S: Scalar = f64> {
    Size(usize),
    Epsilon(S),
}

/// Configuration for [`greedy_regret_set`].
#[derive(Debug, Clone)]
pub struct GreedyConfig<S: Scalar = f64> {
    pub k: usize,
    pub target: GreedyTarget<S>,
    /// Size of the fixed direction sample scanned per iteration.
    pub direction_count: usize,
    pub seed: u64,
    /// Drop non-skyline points before selecting candidates.
    pub use_skyline: bool,
}

impl<S: Scalar> GreedyConfig<S> {
    pub fn by_size(k: usize, size: usize, seed: u64) -> Self {
        Self {
            k,
            target: GreedyTarget::Size(size),
            direction_count: 20_000,
            seed,
            use_skyline: true,
        }
    }

    pub fn by_epsilon(k: usize, epsilon: S, seed: u64) -> Self {
        Self {
            k,
            target: GreedyTarget::Epsilon(epsilon),
            direction_count: 20_000,
            seed,
            use_skyline: true,
        }
    }
}

/// Result of the greedy construction. `reached_target` is false when an
/// epsilon target was still unmet after every candidate had been added.
#[derive(Debug, Clone)]
pub struct GreedyResult<S: Scalar = f64> {
    pub subset: PointSet<S>,
    /// Sampled maximum regret of the returned subset.
    pub sampled_regret: S,
    pub reached_target: bool,
}

/// Grows a regret set greedily: seed with the witness of the first
/// coordinate's maximum, then repeatedly add the top point of the sampled
/// direction with the largest current regret. Regret is always measured
/// against the full input set; with `use_skyline`, candidates come from
/// the skyline only. Deterministic given the seed.
pub fn greedy_regret_set<S: Scalar>(
    p: &PointSet<S>,
    config: &GreedyConfig<S>,
) -> Result<GreedyResult<S>> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let k = config.k;
    if k == 0 || k > p.len() {
        return Err(Error::InvalidK { k, n: p.len() });
    }
    if config.direction_count == 0 {
        return Err(Error::InvalidParameter("direction_count must be positive".into()));
    }
    match config.target {
        GreedyTarget::Size(s) if s == 0 || s > p.len() => {
            return Err(Error::InvalidParameter(format!(
                "target size {s} out of range 1..={}",
                p.len()
            )));
        }
        GreedyTarget::Epsilon(e) => {
            let e = e.to_f64().unwrap_or(f64::NAN);
            if !(0.0..1.0).contains(&e) {
                return Err(Error::InvalidParameter(format!(
                    "target epsilon must lie in [0, 1), got {e}"
                )));
            }
        }
        _ => {}
    }

    let pool = if config.use_skyline { skyline(p) } else { p.clone() };
    let dirs = eval::sample_directions::<S>(p.dims(), config.direction_count, config.seed);

    let kth: Vec<S> = dirs
        .par_iter()
        .map_init(
            || Vec::with_capacity(p.len()),
            |buf, u| util::kth_score(u.direction(), p, k, buf),
        )
        .collect();

    // Seed point: the first coordinate's maximum within the pool.
    let mut chosen: Vec<usize> = Vec::new();
    let mut in_set = vec![false; pool.len()];
    let seed_row = coord_argmax(&pool, 0);
    chosen.push(seed_row);
    in_set[seed_row] = true;

    let mut best_q: Vec<S> = dirs
        .par_iter()
        .map(|u| util::dot(u.direction(), pool.point(seed_row)))
        .collect();

    let mut reached = true;
    loop {
        let regrets: Vec<S> = kth
            .iter()
            .zip(&best_q)
            .map(|(&wk, &bq)| util::regret_ratio(wk, bq))
            .collect();
        let star = util::argmax_first(&regrets);
        let max_regret = regrets[star];

        match config.target {
            GreedyTarget::Size(s) => {
                if chosen.len() >= s || max_regret <= S::zero() {
                    break;
                }
            }
            GreedyTarget::Epsilon(e) => {
                if max_regret <= e {
                    break;
                }
                if chosen.len() == pool.len() {
                    reached = false;
                    break;
                }
            }
        }
        if max_regret <= S::zero() {
            break;
        }

        let row = top1_pool_row(dirs[star].direction(), &pool);
        if in_set[row] {
            // The worst direction's top point is already in; nothing can
            // reduce the sampled regret further.
            if matches!(config.target, GreedyTarget::Epsilon(_)) {
                reached = false;
            }
            break;
        }
        chosen.push(row);
        in_set[row] = true;
        best_q
            .par_iter_mut()
            .zip(dirs.par_iter())
            .for_each(|(bq, u)| {
                let s = util::dot(u.direction(), pool.point(row));
                if s > *bq {
                    *bq = s;
                }
            });
    }

    let final_regret = kth
        .iter()
        .zip(&best_q)
        .map(|(&wk, &bq)| util::regret_ratio(wk, bq))
        .fold(S::zero(), |a, b| a.max(b));
    let ids: Vec<usize> = chosen.iter().map(|&row| pool.id_at(row)).collect();
    Ok(GreedyResult {
        subset: p.subset(&ids)?,
        sampled_regret: final_regret,
        reached_target: reached,
    })
}

fn coord_argmax<S: Scalar>(p: &PointSet<S>, coord: usize) -> usize {
    let mut best = 0;
    for row in 1..p.len() {
        if p.point(row)[coord] > p.point(best)[coord] {
            best = row;
        }
    }
    best
}

fn top1_pool_row<S: Scalar>(u: &[S], p: &PointSet<S>) -> usize {
    let mut best = 0;
    let mut best_score = util::dot(u, p.point(0));
    for row in 1..p.len() {
        let s = util::dot(u, p.point(row));
        if s > best_score {
            best_score = s;
            best = row;
        }
    }
    best
}
