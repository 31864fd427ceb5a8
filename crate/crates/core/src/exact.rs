//! Exact maximum regret ratio for d = 2 and d = 3, plus a deterministic
//! grid oracle for any dimension.
//!
//! Along any fixed direction the regret ratio only changes where the score
//! order of some pair of points flips, i.e. across hyperplanes through the
//! origin normal to difference vectors `p − q`, or at the orthant boundary.
//! Within each cell of that arrangement the ratio `1 − ω(u,Q)/ω_k(u,P)` is
//! maximized on the cell's one-dimensional boundary rays, so evaluating at
//! those rays gives the global maximum.
//!
//! In 2-d the cells are angular intervals and the rays are event angles; in
//! 3-d every boundary ray is the intersection of two planes from the family.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::points::{PointSet, Preference};
use crate::scalar::{from_f64, Scalar};
use crate::util;

/// Candidate cap for [`exact_regret_3d`]; above it the O(n^4) candidate
/// enumeration is refused.
pub const DEFAULT_3D_POINT_CAP: usize = 40;

/// Exact maximum of `regret_at` over all d = 2 preferences, with a witness
/// direction attaining the returned value.
pub fn exact_regret_2d<S: Scalar>(
    q: &PointSet<S>,
    p: &PointSet<S>,
    k: usize,
) -> Result<(S, Preference<S>)> {
    if p.dims() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: p.dims(),
        });
    }
    validate_instance(q, p, k)?;

    let mut events = event_angles(p);
    events.sort_by(|a, b| a.partial_cmp(b).expect("angles are finite"));
    events.dedup();

    // Event angles plus midpoints of adjacent intervals; midpoints guard
    // against suprema landing strictly inside a cell under rounding.
    let mut angles = Vec::with_capacity(events.len() * 2);
    angles.extend_from_slice(&events);
    for w in events.windows(2) {
        angles.push(0.5 * (w[0] + w[1]));
    }

    let dirs: Vec<Vec<S>> = angles.iter().map(|&a| dir_2d(a)).collect();
    let regrets = util::regrets_over(&dirs, q, p, k);
    let best = util::argmax_first(&regrets);
    let witness = Preference::unit_unchecked(dirs[best].clone());
    Ok((regrets[best], witness))
}

/// Unit direction at angle `a`, exact on the axes so that suprema attained
/// there are hit exactly rather than within one ulp.
fn dir_2d<S: Scalar>(a: f64) -> Vec<S> {
    if a == 0.0 {
        vec![S::one(), S::zero()]
    } else if a == std::f64::consts::FRAC_PI_2 {
        vec![S::zero(), S::one()]
    } else {
        vec![from_f64(a.cos()), from_f64(a.sin())]
    }
}

/// Angles in [0, π/2] where some pair order can change, plus both axes.
fn event_angles<S: Scalar>(p: &PointSet<S>) -> Vec<f64> {
    let n = p.len();
    let mut events = vec![0.0, std::f64::consts::FRAC_PI_2];
    for i in 0..n {
        for j in (i + 1)..n {
            let pi = p.point(i);
            let pj = p.point(j);
            let w0 = (pi[0] - pj[0]).to_f64().expect("finite");
            let w1 = (pi[1] - pj[1]).to_f64().expect("finite");
            if w0 == 0.0 && w1 == 0.0 {
                continue;
            }
            // u(θ)·w = 0 at tan θ = −w0/w1, one solution modulo π.
            let mut theta = (-w0).atan2(w1);
            if theta < 0.0 {
                theta += std::f64::consts::PI;
            }
            if theta >= std::f64::consts::PI {
                theta -= std::f64::consts::PI;
            }
            if (0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
                events.push(theta);
            }
        }
    }
    events
}

/// Exact maximum of `regret_at` over all d = 3 preferences, with witness.
/// Uses [`DEFAULT_3D_POINT_CAP`]; see [`exact_regret_3d_with_cap`].
pub fn exact_regret_3d<S: Scalar>(
    q: &PointSet<S>,
    p: &PointSet<S>,
    k: usize,
) -> Result<(S, Preference<S>)> {
    exact_regret_3d_with_cap(q, p, k, DEFAULT_3D_POINT_CAP)
}

/// Exact d = 3 maximum regret with an explicit point cap. Enumerates every
/// pairwise intersection of the order-change planes and the coordinate
/// planes, keeps the rays meeting the closed positive orthant, and takes
/// the maximum of `regret_at` over them.
pub fn exact_regret_3d_with_cap<S: Scalar>(
    q: &PointSet<S>,
    p: &PointSet<S>,
    k: usize,
    cap: usize,
) -> Result<(S, Preference<S>)> {
    if p.dims() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: p.dims(),
        });
    }
    validate_instance(q, p, k)?;
    if p.len() > cap {
        return Err(Error::TooManyPoints { n: p.len(), cap });
    }

    let mut normals: Vec<[f64; 3]> = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let n = p.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = p.point(i);
            let b = p.point(j);
            let w = [
                (a[0] - b[0]).to_f64().expect("finite"),
                (a[1] - b[1]).to_f64().expect("finite"),
                (a[2] - b[2]).to_f64().expect("finite"),
            ];
            if w != [0.0; 3] {
                normals.push(w);
            }
        }
    }

    let mut dirs: Vec<Vec<S>> = vec![
        vec![S::one(), S::zero(), S::zero()],
        vec![S::zero(), S::one(), S::zero()],
        vec![S::zero(), S::zero(), S::one()],
    ];
    for i in 0..normals.len() {
        for j in (i + 1)..normals.len() {
            if let Some(dir) = orthant_ray(&normals[i], &normals[j]) {
                dirs.push(dir.into_iter().map(from_f64).collect());
            }
        }
    }

    let regrets = util::regrets_over(&dirs, q, p, k);
    let best = util::argmax_first(&regrets);
    let witness = Preference::unit_unchecked(dirs[best].clone());
    Ok((regrets[best], witness))
}

/// Unit direction of the line common to the planes normal to `a` and `b`,
/// mapped into the closed positive orthant. `None` when the planes are
/// parallel or the line meets the orthant only at the origin.
fn orthant_ray(a: &[f64; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut r = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let scale = r.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    if scale <= 1e-12 * norm3(a) * norm3(b) || scale == 0.0 {
        return None;
    }
    // Components within rounding noise of zero count as boundary.
    let tol = 1e-12 * scale;
    for x in &mut r {
        if x.abs() <= tol {
            *x = 0.0;
        }
    }
    if r.iter().all(|&x| x <= 0.0) {
        for x in &mut r {
            *x = -*x;
        }
    }
    if r.iter().any(|&x| x < 0.0) {
        return None;
    }
    let norm = norm3(&r);
    Some([r[0] / norm, r[1] / norm, r[2] / norm])
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Maximum of `regret_at` over a deterministic set of unit directions in
/// the positive orthant; a certified lower bound on the true maximum,
/// since only genuine directions are ever evaluated.
///
/// `resolution` is the direction budget: d = 2 uses `resolution` angular
/// intervals, d = 3 an angular grid with `isqrt(resolution)` steps per
/// axis, and d > 3 the densest simplex lattice whose size stays within the
/// budget, normalized onto the sphere. Grids at budgets `r` and `c·r`
/// (d = 2), or with nested per-axis step counts (d = 3), are nested.
///
/// For d = 2 and d = 3 the uniform pass is followed by a deterministic
/// bisection polish around the strongest grid cells; maxima sitting at
/// ranking kinks between grid points are otherwise off by the local slope
/// times the grid spacing.
pub fn grid_oracle<S: Scalar>(
    q: &PointSet<S>,
    p: &PointSet<S>,
    k: usize,
    resolution: usize,
) -> (S, Preference<S>) {
    assert!(resolution >= 2, "resolution must be at least 2");
    validate_instance(q, p, k).expect("valid oracle instance");
    match p.dims() {
        1 => {
            let dir = vec![S::one()];
            let mut buf = Vec::new();
            let v = util::regret_along(&dir, q, p, k, &mut buf);
            (v, Preference::unit_unchecked(dir))
        }
        2 => oracle_2d(q, p, k, resolution),
        3 => oracle_3d(q, p, k, resolution),
        _ => oracle_simplex(q, p, k, resolution),
    }
}

/// Brackets polished after the uniform pass.
const POLISH_BRACKETS: usize = 8;
const POLISH_LEVELS: usize = 50;

fn oracle_2d<S: Scalar>(
    q: &PointSet<S>,
    p: &PointSet<S>,
    k: usize,
    resolution: usize,
) -> (S, Preference<S>) {
    let h = std::f64::consts::FRAC_PI_2 / resolution as f64;
    let values: Vec<S> = (0..=resolution)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(p.len()),
            |buf, i| {
                let dir: Vec<S> = dir_2d(angle_2d(i, resolution));
                util::regret_along(&dir, q, p, k, buf)
            },
        )
        .collect();

    let eval = |theta: f64, buf: &mut Vec<S>| -> S {
        let dir: Vec<S> = dir_2d(theta.clamp(0.0, std::f64::consts::FRAC_PI_2));
        util::regret_along(&dir, q, p, k, buf)
    };
    let mut buf = Vec::with_capacity(p.len());
    let mut best_value = S::zero() - S::one();
    let mut best_theta = 0.0;
    for i in top_cells(&values, |a, b| a.abs_diff(b) >= 2) {
        let mut value = values[i];
        let mut theta = angle_2d(i, resolution);
        let mut span = h;
        for _ in 0..POLISH_LEVELS {
            for offset in [-0.75, -0.5, -0.25, 0.25, 0.5, 0.75] {
                let candidate = theta + offset * span;
                let v = eval(candidate, &mut buf);
                if v > value {
                    value = v;
                    theta = candidate.clamp(0.0, std::f64::consts::FRAC_PI_2);
                }
            }
            span *= 0.5;
        }
        if value > best_value {
            best_value = value;
            best_theta = theta;
        }
    }
    (best_value, Preference::unit_unchecked(dir_2d(best_theta)))
}

fn angle_2d(i: usize, resolution: usize) -> f64 {
    std::f64::consts::FRAC_PI_2 * i as f64 / resolution as f64
}

fn oracle_3d<S: Scalar>(
    q: &PointSet<S>,
    p: &PointSet<S>,
    k: usize,
    resolution: usize,
) -> (S, Preference<S>) {
    let m = (resolution as f64).sqrt().floor().max(1.0) as usize;
    let side = m + 1;
    let h = std::f64::consts::FRAC_PI_2 / m as f64;
    let values: Vec<S> = (0..side * side)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(p.len()),
            |buf, cell| {
                let dir: Vec<S> = dir_3d((cell / side) as f64 * h, (cell % side) as f64 * h);
                util::regret_along(&dir, q, p, k, buf)
            },
        )
        .collect();

    let eval = |theta: f64, phi: f64, buf: &mut Vec<S>| -> S {
        let dir: Vec<S> = dir_3d(
            theta.clamp(0.0, std::f64::consts::FRAC_PI_2),
            phi.clamp(0.0, std::f64::consts::FRAC_PI_2),
        );
        util::regret_along(&dir, q, p, k, buf)
    };
    let apart = |a: usize, b: usize| {
        let (ai, aj) = (a / side, a % side);
        let (bi, bj) = (b / side, b % side);
        ai.abs_diff(bi) >= 2 || aj.abs_diff(bj) >= 2
    };
    let mut buf = Vec::with_capacity(p.len());
    let mut best_value = S::zero() - S::one();
    let mut best_angles = (0.0, 0.0);
    for cell in top_cells(&values, apart) {
        let mut value = values[cell];
        let mut theta = (cell / side) as f64 * h;
        let mut phi = (cell % side) as f64 * h;
        let mut span = h;
        for _ in 0..POLISH_LEVELS {
            for dt in [-1.0, -0.5, 0.0, 0.5, 1.0] {
                for dp in [-1.0, -0.5, 0.0, 0.5, 1.0] {
                    if dt == 0.0 && dp == 0.0 {
                        continue;
                    }
                    let ct = theta + dt * span;
                    let cp = phi + dp * span;
                    let v = eval(ct, cp, &mut buf);
                    if v > value {
                        value = v;
                        theta = ct.clamp(0.0, std::f64::consts::FRAC_PI_2);
                        phi = cp.clamp(0.0, std::f64::consts::FRAC_PI_2);
                    }
                }
            }
            span *= 0.5;
        }
        if value > best_value {
            best_value = value;
            best_angles = (theta, phi);
        }
    }
    let witness = Preference::unit_unchecked(dir_3d(best_angles.0, best_angles.1));
    (best_value, witness)
}

fn dir_3d<S: Scalar>(theta: f64, phi: f64) -> Vec<S> {
    vec![
        from_f64(phi.sin() * theta.cos()),
        from_f64(phi.sin() * theta.sin()),
        from_f64(phi.cos()),
    ]
}

/// Indices of up to [`POLISH_BRACKETS`] strongest cells, pairwise separated
/// according to `apart`, strongest first.
fn top_cells<S: Scalar>(values: &[S], apart: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .expect("regrets are finite")
            .then_with(|| a.cmp(&b))
    });
    let mut picked: Vec<usize> = Vec::with_capacity(POLISH_BRACKETS);
    for i in order {
        if picked.iter().all(|&j| apart(i, j)) {
            picked.push(i);
            if picked.len() == POLISH_BRACKETS {
                break;
            }
        }
    }
    picked
}

fn oracle_simplex<S: Scalar>(
    q: &PointSet<S>,
    p: &PointSet<S>,
    k: usize,
    resolution: usize,
) -> (S, Preference<S>) {
    let d = p.dims();
    let chunk = d * 1024;
    let mut best_val = S::zero() - S::one();
    let mut best_dir: Vec<S> = Vec::new();
    let mut flat: Vec<S> = Vec::new();
    let mut gen = GridDirections::new(d, resolution);
    loop {
        flat.clear();
        gen.fill(&mut flat, chunk);
        if flat.is_empty() {
            break;
        }
        let regrets: Vec<S> = flat
            .par_chunks(d)
            .map_init(
                || Vec::with_capacity(p.len()),
                |buf, u| util::regret_along(u, q, p, k, buf),
            )
            .collect();
        let idx = util::argmax_first(&regrets);
        if regrets[idx] > best_val {
            best_val = regrets[idx];
            best_dir = flat[idx * d..(idx + 1) * d].to_vec();
        }
    }
    (best_val, Preference::unit_unchecked(best_dir))
}

fn validate_instance<S: Scalar>(q: &PointSet<S>, p: &PointSet<S>, k: usize) -> Result<()> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
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
    q.ensure_subset_of(p)
}

/// Streaming generator for the d > 3 oracle lattice: compositions of a
/// granularity `total` into d non-negative parts, normalized onto the
/// sphere, emitted into a flat row-major buffer.
struct GridDirections {
    d: usize,
    total: usize,
    current: Option<Vec<usize>>,
}

impl GridDirections {
    fn new(d: usize, resolution: usize) -> Self {
        let mut total = 1usize;
        while compositions(total + 1, d) <= resolution as u128 {
            total += 1;
        }
        Self {
            d,
            total,
            current: Some(first_composition(total, d)),
        }
    }

    /// Appends up to `limit` scalars (a whole number of directions).
    fn fill<S: Scalar>(&mut self, out: &mut Vec<S>, limit: usize) {
        while out.len() + self.d <= limit {
            let Some(comp) = self.current.as_ref() else { return };
            let norm = comp.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt();
            for &a in comp {
                out.push(from_f64(a as f64 / norm));
            }
            self.current = next_composition(self.current.take().unwrap(), self.total);
        }
    }
}

/// Number of compositions of `total` into `d` non-negative parts,
/// saturating on overflow.
fn compositions(total: usize, d: usize) -> u128 {
    // C(total + d - 1, d - 1)
    let mut result: u128 = 1;
    for i in 0..(d - 1) as u128 {
        result = match result.checked_mul(total as u128 + i + 1) {
            Some(r) => r / (i + 1),
            None => return u128::MAX,
        };
    }
    result
}

fn first_composition(total: usize, d: usize) -> Vec<usize> {
    let mut c = vec![0; d];
    c[0] = total;
    c
}

/// Lexicographic successor over compositions of `total`; `None` at the end.
fn next_composition(mut c: Vec<usize>, total: usize) -> Option<Vec<usize>> {
    let d = c.len();
    if c[d - 1] == total {
        return None;
    }
    // Find the rightmost position before the last with a nonzero entry,
    // decrement it, and move everything after it (plus the tail) next door.
    let mut i = d - 2;
    while c[i] == 0 {
        i -= 1;
    }
    c[i] -= 1;
    let tail = c[d - 1];
    c[d - 1] = 0;
    c[i + 1] = tail + 1;
    Some(c)
}
