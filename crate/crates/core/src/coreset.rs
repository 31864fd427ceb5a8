//! Directional width, ε-kernel certificates, and the staged randomized
//! regret-set algorithm (RRS).
//!
//! A subset whose directional width is at least `(1 − ε)` of the full set's
//! in every direction also keeps the best score within `(1 − ε)` in every
//! non-negative direction, so width-preserving subsets are regret sets.
//! RRS exploits this cheaply: sample directions in stages, add the top
//! point of every direction whose regret still exceeds `ε`, and stop once
//! a sampled estimate of the regret ratio drops below `ε`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::{self, RegretReport};
use crate::points::{PointSet, Preference};
use crate::scalar::{from_f64, Scalar};
use crate::util;

/// Configuration for [`rrs`].
#[derive(Debug, Clone)]
pub struct RRSConfig<S: Scalar = f64> {
    /// Target regret ratio, in (0, 1).
    pub epsilon: S,
    /// Rank parameter of the regret being driven down.
    pub k: usize,
    /// Directions sampled per round.
    pub batch_size: usize,
    /// Directions used for the per-round regret estimate.
    pub eval_count: usize,
    /// Round cap; hitting it yields a non-certified result.
    pub max_rounds: usize,
    pub seed: u64,
}

impl<S: Scalar> RRSConfig<S> {
    /// Defaults for dimension `d`: batch `ceil(1/ε^((d−1)/2))`, the standard
    /// evaluation direction count, 64 rounds.
    pub fn for_dims(d: usize, epsilon: S, k: usize, seed: u64) -> Self {
        let eps = epsilon.to_f64().expect("finite epsilon");
        let batch = (1.0 / eps.powf((d as f64 - 1.0) / 2.0)).ceil().max(1.0) as usize;
        Self {
            epsilon,
            k,
            batch_size: batch,
            eval_count: eval::default_direction_count(d),
            max_rounds: 64,
            seed,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let eps = self.epsilon.to_f64().unwrap_or(f64::NAN);
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1), got {eps}"
            )));
        }
        if self.batch_size == 0 || self.eval_count == 0 || self.max_rounds == 0 {
            return Err(Error::InvalidParameter(
                "batch_size, eval_count and max_rounds must be positive".into(),
            ));
        }
        if self.k == 0 || self.k > n {
            return Err(Error::InvalidK { k: self.k, n });
        }
        Ok(())
    }
}

/// Result of [`rrs`]: the subset, the final sampled estimate, whether the
/// estimate reached `ε` before the round cap, and the per-round estimates.
#[derive(Debug, Clone)]
pub struct RrsResult<S: Scalar = f64> {
    pub subset: PointSet<S>,
    pub report: RegretReport<S>,
    pub certified: bool,
    pub rounds: usize,
    pub round_estimates: Vec<S>,
}

/// Spread of `p` along `u`: max score minus min score. Zero for a single
/// point; non-negative always.
pub fn directional_width<S: Scalar>(u: &Preference<S>, p: &PointSet<S>) -> S {
    assert!(!p.is_empty(), "width of an empty set is undefined");
    let mut lo = util::dot(u.direction(), p.point(0));
    let mut hi = lo;
    for i in 1..p.len() {
        let s = util::dot(u.direction(), p.point(i));
        if s < lo {
            lo = s;
        }
        if s > hi {
            hi = s;
        }
    }
    hi - lo
}

/// Sampled ε-kernel certificate: true iff
/// `width(u, q) >= (1 − ε) · width(u, p)` for every supplied direction.
pub fn is_eps_kernel<S: Scalar>(
    q: &PointSet<S>,
    p: &PointSet<S>,
    epsilon: S,
    directions: &[Preference<S>],
) -> bool {
    let keep = S::one() - epsilon;
    directions
        .iter()
        .all(|u| directional_width(u, q) >= keep * directional_width(u, p))
}

/// Staged randomized regret set over `p`.
///
/// Each round samples `batch_size` fresh directions, checks them against
/// the subset as it stood at the round start, and adds the top-1 point of
/// every direction whose regret exceeds `ε` (in sample order). A fixed
/// evaluation sample, reused across rounds, estimates the regret ratio
/// after each round; the loop stops when the estimate reaches `ε` or the
/// round cap is hit, in which case the result is flagged non-certified.
pub fn rrs<S: Scalar>(p: &PointSet<S>, config: &RRSConfig<S>) -> Result<RrsResult<S>> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    config.validate(p.len())?;
    let d = p.dims();
    let k = config.k;
    let eps = config.epsilon;

    let eval_dirs = eval::sample_directions::<S>(d, config.eval_count, util::derive_seed(config.seed, 0));
    // The k-th best scores over the evaluation sample never change; the
    // best-in-subset scores only improve as points are added.
    let eval_kth: Vec<S> = eval_dirs
        .par_iter()
        .map_init(
            || Vec::with_capacity(p.len()),
            |buf, u| util::kth_score(u.direction(), p, k, buf),
        )
        .collect();
    let mut eval_best: Vec<S> = vec![S::zero() - S::one(); eval_dirs.len()];

    let mut chosen: Vec<usize> = Vec::new(); // row indices into p
    let mut member = vec![false; p.len()];
    let mut scored_upto = 0; // rows of `chosen` already folded into eval_best
    let mut round_estimates = Vec::new();
    let mut certified = false;
    let mut rounds = 0;

    for round in 0..config.max_rounds {
        rounds = round + 1;
        let batch =
            eval::sample_directions::<S>(d, config.batch_size, util::derive_seed(config.seed, 1 + round as u64));
        let snapshot = chosen.clone();
        let violators: Vec<Option<usize>> = batch
            .par_iter()
            .map_init(
                || Vec::with_capacity(p.len()),
                |buf, u| {
                    let wk = util::kth_score(u.direction(), p, k, buf);
                    let mut wq = S::zero();
                    let mut any = false;
                    for &row in &snapshot {
                        let s = util::dot(u.direction(), p.point(row));
                        if !any || s > wq {
                            wq = s;
                            any = true;
                        }
                    }
                    if !any {
                        wq = S::zero();
                    }
                    if util::regret_ratio(wk, wq) > eps {
                        Some(top1_row(u.direction(), p))
                    } else {
                        None
                    }
                },
            )
            .collect();
        for row in violators.into_iter().flatten() {
            if !member[row] {
                member[row] = true;
                chosen.push(row);
            }
        }

        let fresh = &chosen[scored_upto..];
        eval_best
            .par_iter_mut()
            .zip(eval_dirs.par_iter())
            .for_each(|(best, dir)| {
                for &row in fresh {
                    let s = util::dot(dir.direction(), p.point(row));
                    if s > *best {
                        *best = s;
                    }
                }
            });
        scored_upto = chosen.len();
        // A still-empty subset scores zero by convention.
        let estimate = eval_kth
            .iter()
            .zip(&eval_best)
            .map(|(&wk, &bq)| util::regret_ratio(wk, bq.max(S::zero())))
            .fold(S::zero(), |a, b| a.max(b));
        round_estimates.push(estimate);
        if estimate <= eps {
            certified = true;
            break;
        }
    }

    let ids: Vec<usize> = chosen.iter().map(|&row| p.id_at(row)).collect();
    let subset = p.subset(&ids)?;
    let regrets: Vec<S> = eval_dirs
        .par_iter()
        .zip(&eval_kth)
        .map(|(u, &wk)| util::regret_ratio(wk, util::best_score(u.direction(), &subset)))
        .collect();
    let report = eval::report_from_samples(&eval_dirs, &regrets, config.seed);

    Ok(RrsResult {
        subset,
        report,
        certified,
        rounds,
        round_estimates,
    })
}

/// Row of the top-scoring point along `u`, score ties by ascending row
/// (rows ascend with ids in a freshly built set).
fn top1_row<S: Scalar>(u: &[S], p: &PointSet<S>) -> usize {
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

/// The k-copied quarter-circle family: `m` evenly spaced unit directions in
/// the first quadrant, each duplicated `copies` times. On this family the
/// k-th best score equals the best score for every preference when
/// `copies >= k`.
pub fn circle_instance<S: Scalar>(m: usize, copies: usize) -> PointSet<S> {
    assert!(m >= 2 && copies >= 1);
    let mut rows = Vec::with_capacity(m * copies);
    for i in 0..m {
        let theta = std::f64::consts::FRAC_PI_2 * i as f64 / (m - 1) as f64;
        let row: Vec<S> = vec![from_f64(theta.cos().max(0.0)), from_f64(theta.sin().max(0.0))];
        for _ in 0..copies {
            rows.push(row.clone());
        }
    }
    PointSet::from_rows(2, rows).expect("circle points are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exact_regret_2d;

    fn pset(rows: Vec<Vec<f64>>) -> PointSet {
        let dims = rows[0].len();
        PointSet::from_rows(dims, rows).unwrap()
    }

    #[test]
    fn width_examples() {
        let p = pset(vec![vec![0.0, 0.0], vec![1.0, 1.0]]);
        let u = Preference::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(directional_width(&u, &p), 1.0);
        let single = pset(vec![vec![0.3, 0.8]]);
        for seed in 0..5 {
            for dir in eval::sample_directions::<f64>(2, 3, seed) {
                assert_eq!(directional_width(&dir, &single), 0.0);
            }
        }
    }

    #[test]
    fn width_matches_scan_oracle() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..4).map(|_| rng.random::<f64>()).collect())
            .collect();
        let p = PointSet::from_rows(4, rows).unwrap();
        for u in eval::sample_directions::<f64>(4, 20, 8) {
            let scores: Vec<f64> = (0..p.len())
                .map(|i| crate::rank::score(&u, p.point(i)).unwrap())
                .collect();
            let expected = scores.iter().cloned().fold(f64::MIN, f64::max)
                - scores.iter().cloned().fold(f64::MAX, f64::min);
            assert!((directional_width(&u, &p) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_certificate_cases() {
        let p = circle_instance::<f64>(5, 1);
        let dirs = eval::sample_directions::<f64>(2, 64, 2);
        assert!(is_eps_kernel(&p, &p, 0.01, &dirs));
        assert!(is_eps_kernel(&p, &p, 1.0, &dirs));

        // Axis endpoints flatten the set at 45 degrees.
        let q = p.subset(&[0, 4]).unwrap();
        let mut with_diag = dirs.clone();
        with_diag.push(Preference::unit(vec![1.0, 1.0]).unwrap());
        assert!(!is_eps_kernel(&q, &p, 0.01, &with_diag));
    }

    #[test]
    fn kernel_implies_score_preservation() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let mut nontrivial = 0;
        for seed in 0..40u64 {
            let n = rng.random_range(4..20);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..3).map(|_| rng.random::<f64>()).collect())
                .collect();
            let p = PointSet::from_rows(3, rows).unwrap();
            let keep: Vec<usize> = (0..n).filter(|i| i % 3 != 1).collect();
            let q = p.subset(&keep).unwrap();
            let dirs = eval::sample_directions::<f64>(3, 50, seed);
            let eps = 0.5;
            if is_eps_kernel(&q, &p, eps, &dirs) {
                nontrivial += 1;
                for u in &dirs {
                    let wq = crate::util::best_score(u.direction(), &q);
                    let wp = crate::util::best_score(u.direction(), &p);
                    assert!(wq >= (1.0 - eps) * wp - 1e-12);
                }
            }
        }
        assert!(nontrivial > 0, "no kernel case exercised");
    }

    #[test]
    fn rrs_terminates_immediately_for_loose_epsilon() {
        let p = pset(vec![vec![1.0, 0.2], vec![0.2, 1.0], vec![0.8, 0.8]]);
        let cfg = RRSConfig::for_dims(2, 0.99, 1, 7);
        let r = rrs(&p, &cfg).unwrap();
        assert!(r.certified);
        assert_eq!(r.rounds, 1);
        assert!(!r.subset.is_empty());
    }

    #[test]
    fn rrs_copied_circle_reaches_exact_epsilon() {
        let p = circle_instance::<f64>(64, 3);
        let mut cfg = RRSConfig::for_dims(2, 0.01, 3, 41);
        cfg.eval_count = 20_000;
        let r = rrs(&p, &cfg).unwrap();
        assert!(r.certified, "estimate stuck at {:?}", r.round_estimates.last());
        assert!(r.subset.is_subset_of(&p));
        let (exact, _) = exact_regret_2d(&r.subset, &p, 3).unwrap();
        assert!(exact <= 0.01, "exact regret {exact}");
    }

    #[test]
    fn rrs_sphere_3d_certified_by_grid_oracle() {
        let p = crate::datasets::gen_sphere::<f64>(3, 500, 13);
        let cfg = RRSConfig::for_dims(3, 0.1, 1, 99);
        let r = rrs(&p, &cfg).unwrap();
        assert!(r.certified);
        let (grid, _) = crate::exact::grid_oracle(&r.subset, &p, 1, 1_000_000);
        assert!(grid <= 0.1 + 0.02, "grid regret {grid}");
    }

    #[test]
    fn rrs_estimates_non_increasing_and_subset_monotone() {
        let p = circle_instance::<f64>(32, 1);
        let mut cfg = RRSConfig::for_dims(2, 0.02, 1, 5);
        cfg.batch_size = 3; // force several rounds
        let r = rrs(&p, &cfg).unwrap();
        for w in r.round_estimates.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
        assert!(r.subset.is_subset_of(&p));
    }

    #[test]
    fn rrs_k_certificate_covers_larger_k() {
        let p = circle_instance::<f64>(48, 1);
        let cfg = RRSConfig::for_dims(2, 0.05, 1, 3);
        let r = rrs(&p, &cfg).unwrap();
        assert!(r.certified);
        let dirs = eval::sample_directions::<f64>(2, cfg.eval_count, util::derive_seed(3, 0));
        for k in [2usize, 5] {
            let worst = dirs
                .iter()
                .map(|u| crate::rank::regret_at(u, &r.subset, &p, k).unwrap())
                .fold(0.0f64, f64::max);
            assert!(worst <= 0.05 + 1e-12, "k={k} regret {worst}");
        }
    }
}
