//! Acceptance suite: each criterion runs at its stated tolerance and prints
//! one pass/fail line. The criteria run sequentially inside a single test
//! so the timed ones get the whole machine:
//!
//! ```text
//! cargo test -p kregret-cli --test acceptance -- --nocapture
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use kregret::coreset::{circle_instance, rrs, RRSConfig};
use kregret::datasets::{gen_anticor, gen_skypoints, gen_sphere};
use kregret::eval::{estimate_regret, sample_directions};
use kregret::exact::{exact_regret_2d, exact_regret_3d, grid_oracle};
use kregret::hitting::{
    apply_scale, basis, build_net, greedy_hitting_set, rms_hs, HSConfig, NetMode, RangeSystem,
};
use kregret::rank::{regret_at, score, skyline};
use kregret::{PointSet, Preference};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

type CriterionResult = Result<String, String>;
type Criterion = (&'static str, fn() -> CriterionResult);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 12] = [
        ("oracle equivalence, d=2 sweep vs grid", c01_oracle_2d),
        ("oracle equivalence, d=3 rays vs grid", c02_oracle_3d),
        ("hitting-set output within 2*eps", c03_hs_guarantee),
        ("regret monotonicity suite", c04_monotonicity),
        ("post-scale top-score bounds", c05_scale_bounds),
        ("exact regret invariant under diagonal transforms", c06_transform_invariance),
        ("coreset size trend on the copied circle", c07_coreset_trend),
        ("delta-net covering", c08_net_covering),
        ("greedy hitting set within the log factor", c09_greedy_bound),
        ("hitting-set size non-increasing in k", c10_size_vs_k),
        ("CLI determinism across runs and thread counts", c11_cli_determinism),
        ("dataset invariants", c12_dataset_invariants),
    ];

    let mut failures = Vec::new();
    for (index, (name, run)) in criteria.iter().enumerate() {
        let id = index + 1;
        match run() {
            Ok(detail) => println!("criterion {id:02} PASS - {name} ({detail})"),
            Err(detail) => {
                println!("criterion {id:02} FAIL - {name} ({detail})");
                failures.push(format!("{id:02} {name}: {detail}"));
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}

fn uniform_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> PointSet {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect();
    PointSet::from_rows(d, rows).unwrap()
}

fn random_subset(rng: &mut ChaCha8Rng, p: &PointSet) -> PointSet {
    let mut ids: Vec<usize> = p
        .ids()
        .iter()
        .copied()
        .filter(|_| rng.random::<f64>() < 0.4)
        .collect();
    if ids.is_empty() {
        ids.push(p.id_at(rng.random_range(0..p.len())));
    }
    p.subset(&ids).unwrap()
}

/// 1. On 200 random d=2 instances (n <= 30, k in {1,2,5}), the rotational
///    sweep equals the grid oracle at resolution 10^5 within 1e-6, in
///    under 30 seconds.
fn c01_oracle_2d() -> CriterionResult {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(6..=30);
        let p = uniform_points(&mut rng, n, 2);
        let q = random_subset(&mut rng, &p);
        let k = [1usize, 2, 5][rng.random_range(0..3)].min(n);
        let (exact, witness) = exact_regret_2d(&q, &p, k).map_err(|e| e.to_string())?;
        let (grid, _) = grid_oracle(&q, &p, k, 100_000);
        let diff = (exact - grid).abs();
        worst = worst.max(diff);
        if diff > 1e-6 {
            return Err(format!("exact {exact} vs grid {grid} (n={n}, k={k})"));
        }
        if grid > exact + 1e-12 {
            return Err(format!("grid {grid} above exact {exact}"));
        }
        let replay = regret_at(&witness, &q, &p, k).map_err(|e| e.to_string())?;
        if replay != exact {
            return Err(format!("witness replays {replay}, sweep said {exact}"));
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 30.0 {
        return Err(format!("took {elapsed:.1}s, budget 30s"));
    }
    Ok(format!("200 instances, max diff {worst:.2e}, {elapsed:.1}s"))
}

/// 2. On 50 random d=3 instances (n <= 12, k in {1,2}), candidate-ray
///    enumeration equals the grid oracle at resolution 10^6 within 1e-4,
///    in under 120 seconds.
fn c02_oracle_3d() -> CriterionResult {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(4..=12);
        let p = uniform_points(&mut rng, n, 3);
        let q = random_subset(&mut rng, &p);
        let k = rng.random_range(1..=2);
        let (exact, _) = exact_regret_3d(&q, &p, k).map_err(|e| e.to_string())?;
        let (grid, _) = grid_oracle(&q, &p, k, 1_000_000);
        let diff = (exact - grid).abs();
        worst = worst.max(diff);
        if diff > 1e-4 {
            return Err(format!("exact {exact} vs grid {grid} (n={n}, k={k})"));
        }
        if grid > exact + 1e-12 {
            return Err(format!("grid {grid} above exact {exact}"));
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 120.0 {
        return Err(format!("took {elapsed:.1}s, budget 120s"));
    }
    Ok(format!("50 instances, max diff {worst:.2e}, {elapsed:.1}s"))
}

/// 3. On 100 random instances (d in {2,3}, n <= 200, eps in {0.05,0.1},
///    k in {1,5}), the exact (d=2) or grid-oracle (d=3) regret of the
///    hitting-set output is at most 2*eps + 1e-9. Zero violations.
fn c03_hs_guarantee() -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let mut worst_slack = f64::INFINITY;
    for trial in 0..100u64 {
        let d = if rng.random::<bool>() { 2 } else { 3 };
        let n = rng.random_range(10..=200);
        let p = uniform_points(&mut rng, n, d);
        let eps = if rng.random::<bool>() { 0.05 } else { 0.1 };
        let k = if rng.random::<bool>() { 1 } else { 5 };
        let q = rms_hs(&p, &HSConfig::new(eps, k, trial)).map_err(|e| e.to_string())?;
        let measured = if d == 2 {
            exact_regret_2d(&q, &p, k).map_err(|e| e.to_string())?.0
        } else {
            grid_oracle(&q, &p, k, 100_000).0
        };
        worst_slack = worst_slack.min(2.0 * eps - measured);
        if measured > 2.0 * eps + 1e-9 {
            return Err(format!(
                "regret {measured} above 2*eps = {} (d={d}, n={n}, k={k})",
                2.0 * eps
            ));
        }
    }
    Ok(format!("100 instances, tightest slack {worst_slack:.3}"))
}

/// 4. 10^4 randomized checks each of: (a) scale invariance in u (exact for
///    power-of-two scales, 1e-9 otherwise), (b) anti-monotonicity in the
///    subset, (c) monotonicity in k, (d) sampled estimate below the exact
///    maximum. Zero violations.
fn c04_monotonicity() -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
    for round in 0..10_000u64 {
        let d = rng.random_range(2..=4);
        let n = rng.random_range(3..=14);
        let p = uniform_points(&mut rng, n, d);
        let q2 = random_subset(&mut rng, &p);
        let q1_ids: Vec<usize> = q2.ids().iter().copied().step_by(2).collect();
        let q1 = p.subset(&q1_ids).unwrap();
        let u = Preference::unit((0..d).map(|_| rng.random::<f64>() + 1e-6).collect())
            .map_err(|e| e.to_string())?;
        let k = rng.random_range(1..=n);

        // (a) scale invariance
        let base = regret_at(&u, &q2, &p, k).map_err(|e| e.to_string())?;
        let pow2 = 2.0f64.powi(rng.random_range(-8..=8));
        let scaled = regret_at(&u.scaled(pow2), &q2, &p, k).map_err(|e| e.to_string())?;
        if scaled != base {
            return Err(format!("power-of-two scale changed regret at round {round}"));
        }
        let t = rng.random::<f64>() * 99.9 + 0.1;
        let scaled = regret_at(&u.scaled(t), &q2, &p, k).map_err(|e| e.to_string())?;
        if (scaled - base).abs() > 1e-9 {
            return Err(format!("scale invariance off by {} at round {round}", scaled - base));
        }

        // (b) anti-monotonicity in the subset
        let r1 = regret_at(&u, &q1, &p, k).map_err(|e| e.to_string())?;
        if r1 < base {
            return Err(format!("smaller subset got smaller regret at round {round}"));
        }

        // (c) monotonicity in k
        if k < n {
            let k2 = rng.random_range(k + 1..=n);
            let at_k2 = regret_at(&u, &q2, &p, k2).map_err(|e| e.to_string())?;
            if at_k2 > base + 1e-12 {
                return Err(format!("regret grew with k at round {round}"));
            }
        }

        // (d) sampled estimate never above the exact maximum (d=2)
        if d == 2 {
            let (exact, _) = exact_regret_2d(&q2, &p, k).map_err(|e| e.to_string())?;
            let est = estimate_regret(&q2, &p, k, 50, round).map_err(|e| e.to_string())?;
            if est.max_regret > exact + 1e-12 {
                return Err(format!(
                    "estimate {} above exact {exact} at round {round}",
                    est.max_regret
                ));
            }
        }
    }
    Ok("10^4 rounds of (a)-(d), zero violations".into())
}

/// 5. For 50 random sets (d in 2..=6) and 10^3 random unit preferences
///    each, the post-scaling top score lies in
///    [1/sqrt(d) - 1e-9, sqrt(d) + 1e-9]. Zero violations.
fn c05_scale_bounds() -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC5);
    for trial in 0..50u64 {
        let d = rng.random_range(2..=6);
        let n = rng.random_range(5..=80);
        let p = uniform_points(&mut rng, n, d);
        let transform = basis(&p).map_err(|e| e.to_string())?;
        let scaled = apply_scale(&p, &transform);
        let lo = 1.0 / (d as f64).sqrt() - 1e-9;
        let hi = (d as f64).sqrt() + 1e-9;
        for u in sample_directions::<f64>(d, 1000, trial) {
            let top = scaled
                .iter()
                .map(|(_, coords)| score(&u, coords).unwrap())
                .fold(f64::MIN, f64::max);
            if top < lo || top > hi {
                return Err(format!("top score {top} outside [{lo}, {hi}] at d={d}"));
            }
        }
    }
    Ok("50 sets x 10^3 directions, zero violations".into())
}

/// 6. For 100 random d=2 instances and random positive-diagonal scalings,
///    the exact regret is unchanged within 1e-9.
fn c06_transform_invariance() -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(4..=40);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.random(), rng.random()])
            .collect();
        let p = PointSet::from_rows(2, rows.clone()).unwrap();
        let q = random_subset(&mut rng, &p);
        let k = rng.random_range(1..=n.min(5));
        let m = [rng.random::<f64>() * 9.9 + 0.1, rng.random::<f64>() * 9.9 + 0.1];
        let scaled_rows: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0] * m[0], r[1] * m[1]]).collect();
        let mp = PointSet::from_rows(2, scaled_rows).unwrap();
        let mq = mp.subset(q.ids()).unwrap();
        let (v, _) = exact_regret_2d(&q, &p, k).map_err(|e| e.to_string())?;
        let (mv, _) = exact_regret_2d(&mq, &mp, k).map_err(|e| e.to_string())?;
        worst = worst.max((v - mv).abs());
        if (v - mv).abs() > 1e-9 {
            return Err(format!("regret moved from {v} to {mv} under scaling"));
        }
    }
    Ok(format!("100 instances, max drift {worst:.2e}"))
}

/// 7. On the 3-copied quarter circle with m = 256 positions, the mean RRS
///    output size over 5 seeds at eps = 0.01 is 1.4x to 3x the mean size
///    at eps = 0.04.
fn c07_coreset_trend() -> CriterionResult {
    let p = circle_instance::<f64>(256, 3);
    let mean_size = |eps: f64| -> Result<f64, String> {
        let mut total = 0usize;
        for seed in 0..5u64 {
            let cfg = RRSConfig::for_dims(2, eps, 3, seed);
            let out = rrs(&p, &cfg).map_err(|e| e.to_string())?;
            if !out.certified {
                return Err(format!("rrs uncertified at eps {eps}, seed {seed}"));
            }
            total += out.subset.len();
        }
        Ok(total as f64 / 5.0)
    };
    let coarse = mean_size(0.04)?;
    let fine = mean_size(0.01)?;
    let ratio = fine / coarse;
    if !(1.4..=3.0).contains(&ratio) {
        return Err(format!("size ratio {ratio:.2} outside [1.4, 3] ({coarse} -> {fine})"));
    }
    Ok(format!("mean sizes {coarse} -> {fine}, ratio {ratio:.2}"))
}

/// 8. Grid-mode nets at delta in {0.05, 0.1, 0.2} and d in {2, 3, 4} cover
///    10^5 sampled unit preferences: the covering member's inner product is
///    at least cos(delta). Zero violations.
fn c08_net_covering() -> CriterionResult {
    let mut checked = 0usize;
    for &delta in &[0.05, 0.1, 0.2] {
        for d in 2..=4usize {
            let net = build_net::<f64>(d, delta, NetMode::Grid, 0);
            let threshold = delta.cos();
            for u in sample_directions::<f64>(d, 100_000, 0xC8 + d as u64) {
                let idx = net
                    .covering_index(&u)
                    .ok_or_else(|| "grid net lost its structure".to_string())?;
                let dot = score(&u, net.directions()[idx].direction()).unwrap();
                if dot < threshold {
                    return Err(format!(
                        "direction at angle {} from net member (delta {delta}, d={d})",
                        dot.acos()
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} covering checks, zero violations"))
}

/// 9. On 100 random range systems (<= 12 elements, <= 20 ranges), greedy
///    returns at most (1 + ln m) times the exhaustive optimum.
fn c09_greedy_bound() -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC9);
    for trial in 0..100 {
        let n = rng.random_range(3..=12usize);
        let m = rng.random_range(1..=20usize);
        let ranges: Vec<Vec<usize>> = (0..m)
            .map(|_| {
                let size = rng.random_range(1..=n);
                let mut ids: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    ids.swap(i, rng.random_range(0..=i));
                }
                ids.truncate(size);
                ids.sort_unstable();
                ids
            })
            .collect();
        let system = RangeSystem::<f64>::from_parts((0..n).collect(), ranges.clone(), Vec::new());
        let greedy = greedy_hitting_set(&system).map_err(|e| e.to_string())?;

        let masks: Vec<u32> = ranges
            .iter()
            .map(|r| r.iter().fold(0u32, |acc, &id| acc | (1 << id)))
            .collect();
        let mut opt = n;
        'sizes: for size in 1..=n {
            for subset in 0u32..(1u32 << n) {
                if subset.count_ones() as usize == size
                    && masks.iter().all(|&mask| mask & subset != 0)
                {
                    opt = size;
                    break 'sizes;
                }
            }
        }
        let bound = (1.0 + (m as f64).ln()) * opt as f64;
        if greedy.len() as f64 > bound + 1e-9 {
            return Err(format!(
                "greedy {} vs bound {bound:.2} (opt {opt}, m {m}, trial {trial})",
                greedy.len()
            ));
        }
    }
    Ok("100 systems, all within (1 + ln m) x optimum".into())
}

/// 10. On a d=6 synthetic at eps = 0.01, the mean hitting-set output size
///     over 5 seeds is non-increasing in k across k in {1, 2, 5, 10}.
fn c10_size_vs_k() -> CriterionResult {
    let p = gen_anticor::<f64>(6, 200, 0.1, 0xC10).map_err(|e| e.to_string())?;
    let mut means = Vec::new();
    for &k in &[1usize, 2, 5, 10] {
        let mut total = 0usize;
        for seed in 0..5u64 {
            let mut cfg = HSConfig::new(0.01, k, seed);
            cfg.max_net = 1 << 16;
            let q = rms_hs(&p, &cfg).map_err(|e| e.to_string())?;
            total += q.len();
        }
        means.push(total as f64 / 5.0);
    }
    for pair in means.windows(2) {
        if pair[1] > pair[0] + 1e-9 {
            return Err(format!("sizes not non-increasing in k: {means:?}"));
        }
    }
    Ok(format!("mean sizes over k in {{1,2,5,10}}: {means:?}"))
}

/// 11. Repeating every CLI invocation with identical flags and seed yields
///     byte-identical stdout and output files, including across different
///     REGRETSET_THREADS settings.
fn c11_cli_determinism() -> CriterionResult {
    let runs: Vec<BTreeMap<String, Vec<u8>>> = ["1", "4", "1"]
        .iter()
        .map(|threads| cli_script(threads))
        .collect::<Result<_, String>>()?;
    for (i, later) in runs.iter().enumerate().skip(1) {
        if later != &runs[0] {
            let diff: Vec<&String> = runs[0]
                .iter()
                .filter(|(key, bytes)| later.get(*key) != Some(bytes))
                .map(|(key, _)| key)
                .collect();
            return Err(format!("run {i} differs from run 0 in {diff:?}"));
        }
    }
    Ok(format!(
        "3 runs x {} artifacts identical across REGRETSET_THREADS 1 and 4",
        runs[0].len()
    ))
}

/// Runs every subcommand in a fresh directory and digests all outputs.
fn cli_script(threads: &str) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = "seed = 5\nreps = 2\nsamples = 400\nalgorithms = [\"hs\", \"greedy\"]\nks = [1]\nepsilons = [0.15]\n\n[[datasets]]\nkind = \"sphere\"\nd = 2\nn = 40\n";
    std::fs::write(dir.path().join("grid.toml"), spec).map_err(|e| e.to_string())?;

    let script: &[&[&str]] = &[
        &["gen", "--kind", "sphere", "--d", "3", "--n", "120", "--seed", "7", "--out", "s3.csv"],
        &["gen", "--kind", "anticor", "--d", "4", "--n", "200", "--sigma", "0.1", "--seed", "8", "--out", "a4.csv"],
        &["gen", "--kind", "skypoints", "--d", "3", "--n", "100", "--cluster", "4", "--seed", "9", "--out", "sp.csv"],
        &["skyline", "--in", "a4.csv", "--out", "sky.csv"],
        &["rms-hs", "--in", "s3.csv", "--k", "2", "--eps", "0.1", "--seed", "5", "--out", "hs.csv"],
        &["rms-rrs", "--in", "s3.csv", "--k", "1", "--eps", "0.15", "--samples", "2000", "--seed", "5", "--out", "rrs.csv"],
        &["rms-greedy", "--in", "s3.csv", "--k", "1", "--r", "8", "--samples", "2000", "--seed", "5", "--out", "greedy.csv"],
        &["eval", "--in", "s3.csv", "--subset", "hs.csv", "--k", "2", "--samples", "3000", "--seed", "6", "--out", "eval.csv"],
        &["gen", "--kind", "sphere", "--d", "2", "--n", "24", "--seed", "11", "--out", "s2.csv"],
        &["rms-hs", "--in", "s2.csv", "--k", "1", "--eps", "0.1", "--seed", "11", "--out", "q2.csv"],
        &["exact", "--in", "s2.csv", "--subset", "q2.csv", "--k", "1"],
        &["min-error", "--in", "s2.csv", "--r", "4", "--k", "1", "--seed", "12", "--out", "me.csv"],
        &["dist", "--in", "s3.csv", "--subset", "hs.csv", "--k", "1", "--samples", "500", "--seed", "13", "--out", "dist.txt"],
        &["bench", "--spec", "grid.toml", "--out", "bench.csv", "--timing", "off"],
    ];

    let mut digest = BTreeMap::new();
    for (step, args) in script.iter().enumerate() {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_kregret"))
            .current_dir(dir.path())
            .env("REGRETSET_THREADS", threads)
            .args(*args)
            .output()
            .map_err(|e| e.to_string())?;
        let code = out.status.code().unwrap_or(-1);
        if !matches!(code, 0 | 3) {
            return Err(format!(
                "step {step} ({}) exited {code}: {}",
                args[0],
                String::from_utf8_lossy(&out.stderr)
            ));
        }
        digest.insert(format!("step{step:02}-exit"), vec![code as u8]);
        digest.insert(format!("step{step:02}-stdout"), out.stdout);
    }
    for entry in std::fs::read_dir(dir.path()).map_err(|e| e.to_string())? {
        let entry = entry.map_err(|e| e.to_string())?;
        let name = entry.file_name().to_string_lossy().into_owned();
        let bytes = std::fs::read(entry.path()).map_err(|e| e.to_string())?;
        digest.insert(format!("file-{name}"), bytes);
    }
    Ok(digest)
}

/// 12. Generated spheres are 100% skyline; skypoint sets have exactly their
///     leaders on the skyline; anti-correlated points are non-negative.
fn c12_dataset_invariants() -> CriterionResult {
    let sphere = gen_sphere::<f64>(4, 100, 0xC12);
    if skyline(&sphere).len() != 100 {
        return Err(format!("sphere skyline {} of 100", skyline(&sphere).len()));
    }
    let sky = gen_skypoints::<f64>(3, 500, 4, 0xC12).map_err(|e| e.to_string())?;
    let sky_count = skyline(&sky).len();
    if sky_count != 100 {
        return Err(format!("skypoints skyline {sky_count}, expected 100"));
    }
    let anti = gen_anticor::<f64>(4, 2_000, 0.1, 0xC12).map_err(|e| e.to_string())?;
    for (id, coords) in anti.iter() {
        if coords.iter().any(|&c| c < 0.0) {
            return Err(format!("anticor point {id} has a negative coordinate"));
        }
    }
    Ok("sphere 100/100 skyline, skypoints 100 leaders, anticor non-negative".into())
}

#[allow(dead_code)]
fn debug_dump(path: &Path, bytes: &[u8]) {
    let _ = std::fs::write(path, bytes);
}
