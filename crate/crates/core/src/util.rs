//! Internal numeric helpers shared by the evaluation paths.

use rayon::prelude::*;

use crate::points::PointSet;
use crate::scalar::Scalar;

#[inline]
pub(crate) fn dot<S: Scalar>(u: &[S], p: &[S]) -> S {
    debug_assert_eq!(u.len(), p.len());
    u.iter().zip(p).map(|(&a, &b)| a * b).fold(S::zero(), |s, x| s + x)
}

/// Best (top-1) score of `ps` along `u`; zero for an empty set.
#[inline]
pub(crate) fn best_score<S: Scalar>(u: &[S], ps: &PointSet<S>) -> S {
    let mut best = S::zero();
    let mut first = true;
    for index in 0..ps.len() {
        let s = dot(u, ps.point(index));
        if first || s > best {
            best = s;
            first = false;
        }
    }
    if first {
        S::zero()
    } else {
        best
    }
}

/// k-th largest score of `ps` along `u`, using `buf` as scratch.
/// Requires `1 <= k <= ps.len()`.
#[inline]
pub(crate) fn kth_score<S: Scalar>(u: &[S], ps: &PointSet<S>, k: usize, buf: &mut Vec<S>) -> S {
    debug_assert!(k >= 1 && k <= ps.len());
    buf.clear();
    buf.extend((0..ps.len()).map(|i| dot(u, ps.point(i))));
    let (_, kth, _) = buf.select_nth_unstable_by(k - 1, |a, b| {
        b.partial_cmp(a).expect("scores are finite")
    });
    *kth
}

/// Regret ratio from the k-th best score in the ground set and the best
/// score in the subset. Zero when the k-th best score is non-positive.
#[inline]
pub(crate) fn regret_ratio<S: Scalar>(wk: S, wq: S) -> S {
    if wk <= S::zero() {
        S::zero()
    } else {
        (wk - wq).max(S::zero()) / wk
    }
}

/// Regret of `q` against `p` along a raw direction slice, with scratch.
#[inline]
pub(crate) fn regret_along<S: Scalar>(
    u: &[S],
    q: &PointSet<S>,
    p: &PointSet<S>,
    k: usize,
    buf: &mut Vec<S>,
) -> S {
    let wk = kth_score(u, p, k, buf);
    regret_ratio(wk, best_score(u, q))
}

/// Regret of `q` against `p` along every direction, in input order.
/// Parallel, but the output is independent of the thread count.
pub(crate) fn regrets_over<S: Scalar>(
    dirs: &[Vec<S>],
    q: &PointSet<S>,
    p: &PointSet<S>,
    k: usize,
) -> Vec<S> {
    dirs.par_iter()
        .map_init(
            || Vec::with_capacity(p.len()),
            |buf, u| regret_along(u, q, p, k, buf),
        )
        .collect()
}

/// Index of the maximum, ties broken by the lowest index.
pub(crate) fn argmax_first<S: Scalar>(values: &[S]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Deterministic stream derivation for seeding sub-generators
/// (SplitMix64 finalizer over the base seed and a stream index).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
