//! Scoring, top-k ranking, per-direction regret, and skyline computation.

use crate::error::{Error, Result};
use crate::points::{PointSet, Preference, RankedResult};
use crate::scalar::Scalar;
use crate::util;

/// Score of a point under a preference: the inner product `⟨u, p⟩`.
pub fn score<S: Scalar>(u: &Preference<S>, p: &[S]) -> Result<S> {
    if u.dims() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: u.dims(),
            got: p.len(),
        });
    }
    Ok(util::dot(u.direction(), p))
}

/// The k highest-scoring points along `u`, scores descending, score ties
/// broken by ascending id. Requires `1 <= k <= |P|`.
pub fn top_k<S: Scalar>(u: &Preference<S>, p: &PointSet<S>, k: usize) -> Result<RankedResult<S>> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if u.dims() != p.dims() {
        return Err(Error::DimensionMismatch {
            expected: u.dims(),
            got: p.dims(),
        });
    }
    if k == 0 || k > p.len() {
        return Err(Error::InvalidK { k, n: p.len() });
    }
    let mut scored: Vec<(usize, S)> = p
        .iter()
        .map(|(id, coords)| (id, util::dot(u.direction(), coords)))
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("scores are finite")
            .then_with(|| a.0.cmp(&b.0))
    });
    scored.truncate(k);
    Ok(RankedResult::new(scored))
}

/// Regret of answering with the best of `q` instead of the k-th best of `p`
/// along `u`: `max{0, ω_k(u,P) − ω(u,Q)} / ω_k(u,P)`, in `[0, 1]`.
///
/// Defined as 0 when `ω_k(u,P) = 0` (non-negative data cannot lose there),
/// and as 1 for an empty `q` when `ω_k(u,P) > 0`. Expects `q ⊆ p` by id;
/// the relation is not re-checked here since algorithm entry points already
/// validate it once.
pub fn regret_at<S: Scalar>(
    u: &Preference<S>,
    q: &PointSet<S>,
    p: &PointSet<S>,
    k: usize,
) -> Result<S> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if u.dims() != p.dims() {
        return Err(Error::DimensionMismatch {
            expected: u.dims(),
            got: p.dims(),
        });
    }
    if !q.is_empty() && q.dims() != p.dims() {
        return Err(Error::DimensionMismatch {
            expected: p.dims(),
            got: q.dims(),
        });
    }
    if k == 0 || k > p.len() {
        return Err(Error::InvalidK { k, n: p.len() });
    }
    let mut buf = Vec::with_capacity(p.len());
    Ok(util::regret_along(u.direction(), q, p, k, &mut buf))
}

/// The points not coordinate-wise dominated by any other point.
///
/// `q` dominates `p` when `q_i >= p_i` in every coordinate with strict
/// inequality somewhere; exact duplicates do not dominate each other, so
/// duplicates of a retained point are retained. Output ids ascend.
pub fn skyline<S: Scalar>(p: &PointSet<S>) -> PointSet<S> {
    let n = p.len();
    // Dominators never come after the dominated in decreasing coordinate-sum
    // order, so each point only needs checking against accepted points.
    let mut order: Vec<usize> = (0..n).collect();
    let sums: Vec<S> = (0..n)
        .map(|i| p.point(i).iter().copied().fold(S::zero(), |a, b| a + b))
        .collect();
    order.sort_by(|&a, &b| {
        sums[b]
            .partial_cmp(&sums[a])
            .expect("sums are finite")
            .then_with(|| a.cmp(&b))
    });

    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        let pi = p.point(i);
        if !kept.iter().any(|&j| dominates(p.point(j), pi)) {
            kept.push(i);
        }
    }
    let ids: Vec<usize> = kept.iter().map(|&i| p.id_at(i)).collect();
    p.subset(&ids).expect("kept ids come from p")
}

/// True when `a` dominates `b`.
pub fn dominates<S: Scalar>(a: &[S], b: &[S]) -> bool {
    let mut strict = false;
    for (&x, &y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}
