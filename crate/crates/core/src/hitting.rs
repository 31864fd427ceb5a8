//! The bicriteria hitting-set pipeline: scaling normalization, δ-nets over
//! unit preferences, near-top-k range systems, greedy hitting set, and the
//! min-error binary search on top of it.
//!
//! Pipeline for a target ratio `ε`: scale each coordinate by its maximum so
//! the top score is pinned within `[1/√d, √d]` for every unit preference;
//! cover the preference space with a δ-net at `δ = ε/(2d)`; for each net
//! direction collect the points scoring at least `(1−ε)` of the k-th best;
//! hit those ranges greedily; and return the hitting set together with the
//! per-coordinate maximum witnesses. The output's regret ratio is at most
//! `2ε` against every preference, not just the net.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval;
use crate::points::{PointSet, Preference};
use crate::rank::skyline;
use crate::scalar::{from_f64, Scalar};
use crate::util;

/// Default net-size budget for [`rms_hs`] and [`min_error`].
pub const DEFAULT_MAX_NET: usize = 1 << 18;

/// Hard ceiling on constructible nets.
const NET_CEILING: u128 = 1 << 27;

/// Per-coordinate maxima of a point set and the ids realizing them.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleTransform<S: Scalar = f64> {
    maxima: Vec<S>,
    basis_ids: Vec<usize>,
}

impl<S: Scalar> ScaleTransform<S> {
    pub fn maxima(&self) -> &[S] {
        &self.maxima
    }

    /// One witness id per coordinate (lowest id on ties); may repeat.
    pub fn basis_ids(&self) -> &[usize] {
        &self.basis_ids
    }

    /// The distinct witness ids, ascending.
    pub fn basis_set(&self) -> Vec<usize> {
        let mut ids = self.basis_ids.clone();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// Per-coordinate maxima of `p` with the lowest-id witness per coordinate.
/// Errors when some coordinate is zero across all points.
pub fn basis<S: Scalar>(p: &PointSet<S>) -> Result<ScaleTransform<S>> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let d = p.dims();
    let mut maxima = vec![S::zero(); d];
    let mut basis_ids = vec![usize::MAX; d];
    for (id, coords) in p.iter() {
        for (j, &v) in coords.iter().enumerate() {
            if v > maxima[j] || (v == maxima[j] && v > S::zero() && id < basis_ids[j]) {
                maxima[j] = v;
                basis_ids[j] = id;
            }
        }
    }
    if let Some(coord) = maxima.iter().position(|&m| m <= S::zero()) {
        return Err(Error::DegenerateCoordinate { coord });
    }
    Ok(ScaleTransform { maxima, basis_ids })
}

/// Divides coordinate `j` of every point by `t.maxima[j]`, mapping the set
/// into `[0, 1]^d` with every coordinate attaining 1 somewhere.
pub fn apply_scale<S: Scalar>(p: &PointSet<S>, t: &ScaleTransform<S>) -> PointSet<S> {
    assert_eq!(p.dims(), t.maxima.len(), "transform dimension mismatch");
    let rows: Vec<Vec<S>> = (0..p.len())
        .map(|i| {
            p.point(i)
                .iter()
                .zip(&t.maxima)
                .map(|(&v, &m)| v / m)
                .collect()
        })
        .collect();
    PointSet::from_rows_with_ids(p.dims(), rows, p.ids().to_vec())
        .expect("scaling preserves validity")
}

/// How a δ-net is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetMode {
    /// Deterministic angular grid with certified covering radius.
    Grid,
    /// Uniform random directions; a net with constant probability only.
    Random,
}

/// A finite set of unit preferences covering the positive-orthant sphere to
/// within angle δ (certified in grid mode, probabilistic in random mode).
#[derive(Debug, Clone)]
pub struct DeltaNet<S: Scalar = f64> {
    directions: Vec<Preference<S>>,
    grid: Option<GridSpec>,
}

#[derive(Debug, Clone)]
struct GridSpec {
    dims: usize,
    per_axis: usize,
}

impl<S: Scalar> DeltaNet<S> {
    pub fn directions(&self) -> &[Preference<S>] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// For grid nets, the index of the member whose angular cell contains
    /// `u`; that member is within the covering radius of `u`. `None` for
    /// random nets.
    pub fn covering_index(&self, u: &Preference<S>) -> Option<usize> {
        let spec = self.grid.as_ref()?;
        debug_assert_eq!(u.dims(), spec.dims);
        let m = spec.per_axis;
        let mut index = 0usize;
        let mut prefix = 1.0_f64;
        for t in 0..spec.dims - 1 {
            let c = u.direction()[t].to_f64().expect("finite");
            let theta = if prefix <= 1e-300 {
                0.0
            } else {
                (c / prefix).clamp(-1.0, 1.0).acos()
            };
            let cell = ((theta / std::f64::consts::FRAC_PI_2) * m as f64).floor() as usize;
            index = index * m + cell.min(m - 1);
            prefix *= theta.sin();
        }
        Some(index)
    }
}

/// Number of directions a grid net at `delta` would have.
pub fn grid_net_len(d: usize, delta: f64) -> u128 {
    let m = grid_steps(d, delta) as u128;
    m.checked_pow(d as u32 - 1).unwrap_or(u128::MAX)
}

/// Theoretical random-net direction count `ceil(c (1/δ)^{d-1} log(1/δ))`
/// with `c = 4`, saturating.
pub fn random_net_len(d: usize, delta: f64) -> u128 {
    let raw = 4.0 * (1.0 / delta).powi(d as i32 - 1) * (1.0 / delta).ln().max(1.0);
    if raw >= u128::MAX as f64 {
        u128::MAX
    } else {
        raw.ceil() as u128
    }
}

fn grid_steps(d: usize, delta: f64) -> usize {
    assert!(d >= 2, "nets need dimension at least 2");
    assert!(
        delta > 0.0 && delta <= std::f64::consts::FRAC_PI_2,
        "delta must lie in (0, pi/2]"
    );
    // Per-axis spacing δ/(d−1): the angular distance between a direction
    // and its cell's center is at most (d−1)·spacing/2 = δ/2.
    let spacing = delta / (d as f64 - 1.0);
    (std::f64::consts::FRAC_PI_2 / spacing).ceil().max(1.0) as usize
}

/// A δ-net of unit preferences in the positive orthant.
///
/// Grid mode: hyperspherical angular grid, cell centers, per-axis spacing
/// `δ/(d−1)`, size `O((1/δ)^{d−1})`; every unit preference is within angle
/// `δ/2` of some member. Random mode: `ceil(4 (1/δ)^{d−1} log(1/δ))`
/// uniform directions (`seed`-deterministic); the covering property then
/// holds with constant probability and is checked statistically in tests,
/// not per call.
pub fn build_net<S: Scalar>(d: usize, delta: f64, mode: NetMode, seed: u64) -> DeltaNet<S> {
    match mode {
        NetMode::Grid => {
            let m = grid_steps(d, delta);
            let total = grid_net_len(d, delta);
            assert!(total <= NET_CEILING, "grid net of {total} directions is too large");
            let axes = d - 1;
            let mut directions = Vec::with_capacity(total as usize);
            let mut idx = vec![0usize; axes];
            loop {
                directions.push(grid_direction::<S>(&idx, m, d));
                // Odometer over the multi-index, last axis fastest.
                let mut axis = axes;
                loop {
                    if axis == 0 {
                        return DeltaNet {
                            directions,
                            grid: Some(GridSpec { dims: d, per_axis: m }),
                        };
                    }
                    axis -= 1;
                    idx[axis] += 1;
                    if idx[axis] < m {
                        break;
                    }
                    idx[axis] = 0;
                }
            }
        }
        NetMode::Random => {
            let count = random_net_len(d, delta);
            assert!(count <= NET_CEILING, "random net of {count} directions is too large");
            DeltaNet {
                directions: eval::sample_directions(d, count as usize, seed),
                grid: None,
            }
        }
    }
}

fn grid_direction<S: Scalar>(idx: &[usize], m: usize, d: usize) -> Preference<S> {
    let mut dir = vec![0.0_f64; d];
    let mut prefix = 1.0_f64;
    for (t, &i) in idx.iter().enumerate() {
        let theta = std::f64::consts::FRAC_PI_2 * (i as f64 + 0.5) / m as f64;
        dir[t] = prefix * theta.cos();
        prefix *= theta.sin();
    }
    dir[d - 1] = prefix;
    Preference::unit_unchecked(dir.into_iter().map(from_f64).collect())
}

/// Ground-set ids plus one near-top-k range per net direction.
#[derive(Debug, Clone)]
pub struct RangeSystem<S: Scalar = f64> {
    ground: Vec<usize>,
    ranges: Vec<Vec<usize>>,
    net: Vec<Preference<S>>,
}

impl<S: Scalar> RangeSystem<S> {
    /// Builds a range system directly from id sets (for tests and tools).
    pub fn from_parts(
        ground: Vec<usize>,
        ranges: Vec<Vec<usize>>,
        net: Vec<Preference<S>>,
    ) -> Self {
        Self { ground, ranges, net }
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn ranges(&self) -> &[Vec<usize>] {
        &self.ranges
    }

    pub fn net(&self) -> &[Preference<S>] {
        &self.net
    }
}

/// One range per net direction `u`: the ids of the points scoring at least
/// `(1 − ε) · ω_k(u, P)`. Every range contains the top-k points of its
/// direction, hence is nonempty.
pub fn build_ranges<S: Scalar>(
    p: &PointSet<S>,
    net: &[Preference<S>],
    k: usize,
    epsilon: S,
) -> RangeSystem<S> {
    assert!(!p.is_empty(), "range system over an empty set");
    assert!(!net.is_empty(), "range system needs net directions");
    assert!(k >= 1 && k <= p.len(), "k out of range");
    let keep = S::one() - epsilon;
    let ranges: Vec<Vec<usize>> = net
        .par_iter()
        .map_init(
            || Vec::with_capacity(p.len()),
            |buf, u| {
                let wk = util::kth_score(u.direction(), p, k, buf);
                let threshold = keep * wk;
                p.iter()
                    .filter(|(_, coords)| util::dot(u.direction(), coords) >= threshold)
                    .map(|(id, _)| id)
                    .collect()
            },
        )
        .collect();
    RangeSystem {
        ground: p.ids().to_vec(),
        ranges,
        net: net.to_vec(),
    }
}

/// Greedy hitting set: repeatedly take the point contained in the most
/// not-yet-hit ranges, ties by ascending id, until every range is hit.
/// Errors on an empty range. The returned ids ascend.
///
/// Classic set-cover analysis bounds the result by `(1 + ln m)` times the
/// optimum for `m` ranges.
pub fn greedy_hitting_set<S: Scalar>(r: &RangeSystem<S>) -> Result<Vec<usize>> {
    let n = r.ground.len();
    let m = r.ranges.len();
    let mut dense = std::collections::HashMap::with_capacity(n);
    // The argmax scan breaks ties by actual id, so it needs the dense
    // order to ascend by id even when the ground list does not.
    let mut order: Vec<usize> = r.ground.clone();
    order.sort_unstable();
    for (di, &id) in order.iter().enumerate() {
        dense.insert(id, di);
    }

    let mut containing: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut count: Vec<usize> = vec![0; n];
    for (ri, range) in r.ranges.iter().enumerate() {
        if range.is_empty() {
            return Err(Error::EmptyRange { index: ri });
        }
        for &id in range {
            let &di = dense.get(&id).ok_or(Error::NotSubset { id })?;
            containing[di].push(ri as u32);
            count[di] += 1;
        }
    }

    let mut hit = vec![false; m];
    let mut remaining = m;
    let mut picked = Vec::new();
    while remaining > 0 {
        let mut best = 0;
        for di in 1..n {
            if count[di] > count[best] {
                best = di;
            }
        }
        debug_assert!(count[best] > 0, "unhit range with no members");
        picked.push(order[best]);
        for &ri in &containing[best] {
            let ri = ri as usize;
            if hit[ri] {
                continue;
            }
            hit[ri] = true;
            remaining -= 1;
            for &id in &r.ranges[ri] {
                count[dense[&id]] -= 1;
            }
        }
    }
    picked.sort_unstable();
    Ok(picked)
}

/// Configuration for [`rms_hs`].
#[derive(Debug, Clone)]
pub struct HSConfig<S: Scalar = f64> {
    /// Half the target regret ratio: the output is a (k, 2ε)-regret set.
    /// Accepted range (0, 1]; 1 makes every positively scored point
    /// acceptable and only arises from the min-error search's upper probes.
    pub epsilon: S,
    pub k: usize,
    /// Restrict to the skyline first (applied only when k = 1).
    pub use_skyline: bool,
    pub net_mode: NetMode,
    pub seed: u64,
    /// Net-size budget: grids beyond it fall back to a random net of this
    /// size, and random nets are truncated to it.
    pub max_net: usize,
}

impl<S: Scalar> HSConfig<S> {
    pub fn new(epsilon: S, k: usize, seed: u64) -> Self {
        Self {
            epsilon,
            k,
            use_skyline: true,
            net_mode: NetMode::Grid,
            seed,
            max_net: DEFAULT_MAX_NET,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let eps = self.epsilon.to_f64().unwrap_or(f64::NAN);
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1], got {eps}"
            )));
        }
        if self.max_net == 0 {
            return Err(Error::InvalidParameter("max_net must be positive".into()));
        }
        if self.k == 0 || self.k > n {
            return Err(Error::InvalidK { k: self.k, n });
        }
        Ok(())
    }
}

/// Net for the pipeline, honoring the mode and the size budget.
fn net_for<S: Scalar>(d: usize, delta: f64, cfg: &HSConfig<S>) -> DeltaNet<S> {
    match cfg.net_mode {
        NetMode::Grid if grid_net_len(d, delta) <= cfg.max_net as u128 => {
            build_net(d, delta, NetMode::Grid, cfg.seed)
        }
        _ => {
            let count = random_net_len(d, delta).min(cfg.max_net as u128) as usize;
            DeltaNet {
                directions: eval::sample_directions(d, count, cfg.seed),
                grid: None,
            }
        }
    }
}

/// Computes a (k, 2ε)-regret set: basis, scale, δ-net at `δ = ε/(2d)`,
/// near-top-k ranges, greedy hitting set, and the union of the hitting set
/// with the basis, mapped back to the input ids.
pub fn rms_hs<S: Scalar>(p: &PointSet<S>, config: &HSConfig<S>) -> Result<PointSet<S>> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    config.validate(p.len())?;
    let work = if config.use_skyline && config.k == 1 {
        skyline(p)
    } else {
        p.clone()
    };
    let transform = basis(&work)?;
    let scaled = apply_scale(&work, &transform);
    let d = p.dims();
    let delta = config.epsilon.to_f64().expect("finite epsilon") / (2.0 * d as f64);
    let net = net_for(d, delta, config);
    let ranges = build_ranges(&scaled, net.directions(), config.k, config.epsilon);
    let mut ids = greedy_hitting_set(&ranges)?;
    ids.extend(transform.basis_set());
    ids.sort_unstable();
    ids.dedup();
    p.subset(&ids)
}

/// Result of the min-error search: a subset of size `O(r log r)`, the
/// error level `ε̂` it was accepted at, and whether the doubling/halving
/// search terminated by its bracketing rule (`certified`). A search that
/// bottoms out below the floor returns the smallest-ε subset seen with
/// `epsilon = 0`, non-certified.
#[derive(Debug, Clone)]
pub struct MinErrorResult<S: Scalar = f64> {
    pub subset: PointSet<S>,
    pub epsilon: S,
    pub certified: bool,
}

/// Smallest achievable error at size budget `r`, bicriteria: binary search
/// over `ε̄` (start 0.5, double when the set outgrows `2 r max(1, ⌈log2 r⌉)`,
/// halve otherwise) running [`rms_hs`] per probe; stops at `ε̂` whose set is
/// strictly inside the budget while the set at `ε̂/2` is strictly outside.
pub fn min_error<S: Scalar>(
    p: &PointSet<S>,
    r: usize,
    k: usize,
    seed: u64,
) -> Result<MinErrorResult<S>> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let d = p.dims();
    if r < d {
        return Err(Error::InvalidParameter(format!(
            "size budget r = {r} cannot hold the {d}-point basis"
        )));
    }
    if k == 0 || k > p.len() {
        return Err(Error::InvalidK { k, n: p.len() });
    }

    let log_r = (r as f64).log2().ceil().max(1.0) as usize;
    let budget = 2 * r * log_r;
    const FLOOR: f64 = 1.0 / (1 << 20) as f64;

    let mut sizes: std::collections::HashMap<u64, usize> = std::collections::HashMap::new();
    let mut best: Option<(f64, PointSet<S>)> = None;
    let mut eps = 0.5_f64;

    // The walk halves at most ~21 times and doubles at most once per level;
    // the cap only trips if a probe lands exactly on the budget forever.
    for _probe in 0..200 {
        let mut cfg = HSConfig::new(from_f64::<S>(eps), k, seed);
        cfg.use_skyline = k == 1;
        let q = rms_hs(p, &cfg)?;
        let size = q.len();
        sizes.insert(eps.to_bits(), size);

        if size > budget {
            if let Some(&above) = sizes.get(&(2.0 * eps).to_bits()) {
                if above < budget {
                    let (be, bq) = best.expect("a sub-budget probe was recorded");
                    debug_assert_eq!(be.to_bits(), (2.0 * eps).to_bits());
                    return Ok(MinErrorResult {
                        subset: bq,
                        epsilon: from_f64(be),
                        certified: true,
                    });
                }
            }
            if eps >= 1.0 {
                return Ok(MinErrorResult {
                    subset: q,
                    epsilon: from_f64(1.0),
                    certified: false,
                });
            }
            eps = (2.0 * eps).min(1.0);
        } else {
            if best.as_ref().is_none_or(|(be, _)| eps < *be) {
                best = Some((eps, q));
            }
            if size < budget {
                if let Some(&below) = sizes.get(&(eps / 2.0).to_bits()) {
                    if below > budget {
                        let (be, bq) = best.expect("current probe is recorded");
                        return Ok(MinErrorResult {
                            subset: bq,
                            epsilon: from_f64(be),
                            certified: true,
                        });
                    }
                }
            }
            if eps / 2.0 < FLOOR {
                // Bottoming out means near-zero regret fits the budget.
                let (_, bq) = best.expect("current probe is recorded");
                return Ok(MinErrorResult {
                    subset: bq,
                    epsilon: S::zero(),
                    certified: false,
                });
            }
            eps /= 2.0;
        }
    }
    let (be, bq) = best.ok_or_else(|| {
        Error::InvalidParameter("min-error search made no sub-budget probe".into())
    })?;
    Ok(MinErrorResult {
        subset: bq,
        epsilon: from_f64(be),
        certified: false,
    })
}
