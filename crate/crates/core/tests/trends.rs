//! Algorithm comparability trends at desk scale. These mirror the
//! benchmark harness shapes: matched-size quality on the sphere, head-to-
//! head sizes on anti-correlated data, and the size-versus-k trend in
//! higher dimension.

use kregret::datasets::{gen_anticor, gen_sphere};
use kregret::derive_seed;
use kregret::eval::estimate_regret;
use kregret::greedy::{greedy_regret_set, GreedyConfig};
use kregret::hitting::{rms_hs, HSConfig};

/// On the sphere, the adaptive greedy baseline at the same output size is
/// at worst comparable to the hitting set, and typically better; assert
/// the wide-tolerance direction.
#[test]
fn greedy_matches_hitting_set_quality_on_sphere() {
    let p = gen_sphere::<f64>(3, 500, 42);
    let k = 1;
    let hs = rms_hs(&p, &HSConfig::new(0.1, k, 7)).unwrap();

    let mut cfg = GreedyConfig::by_size(k, hs.len(), 7);
    cfg.direction_count = 20_000;
    let greedy = greedy_regret_set(&p, &cfg).unwrap();
    assert_eq!(greedy.subset.len(), hs.len());

    let eval_seed = derive_seed(7, 99);
    let hs_regret = estimate_regret(&hs, &p, k, 20_000, eval_seed)
        .unwrap()
        .max_regret;
    let greedy_regret = estimate_regret(&greedy.subset, &p, k, 20_000, eval_seed)
        .unwrap()
        .max_regret;
    println!(
        "sphere d=3 n=500, size {}: hs regret {hs_regret:.4}, greedy regret {greedy_regret:.4}",
        hs.len()
    );
    assert!(
        greedy_regret <= 3.0 * hs_regret + 0.02,
        "greedy {greedy_regret} vs hs {hs_regret}"
    );
}

/// Head-to-head on anti-correlated data: greedy chasing eps against the
/// hitting set run at eps/2 gives sets of broadly comparable size. The
/// factor is a report, not a guarantee; only gross blowups fail.
#[test]
fn greedy_and_hitting_set_sizes_comparable_on_anticor() {
    let p = gen_anticor::<f64>(3, 300, 0.1, 5).unwrap();
    let k = 10;

    let mut gcfg = GreedyConfig::by_epsilon(k, 0.05, 3);
    gcfg.direction_count = 20_000;
    let greedy = greedy_regret_set(&p, &gcfg).unwrap();
    assert!(greedy.reached_target);

    let hs = rms_hs(&p, &HSConfig::new(0.025, k, 3)).unwrap();
    let factor = greedy.subset.len() as f64 / hs.len() as f64;
    println!(
        "anticor d=3 n=300 k=10: greedy(eps 0.05) size {}, hs(eps 0.025) size {}, factor {factor:.2}",
        greedy.subset.len(),
        hs.len()
    );
    assert!(
        (0.1..=10.0).contains(&factor),
        "sizes diverged: greedy {} vs hs {}",
        greedy.subset.len(),
        hs.len()
    );
}

/// Size of the hitting-set output is non-increasing in k at fixed eps on a
/// higher-dimensional synthetic (rank correlation of sizes with k <= 0).
#[test]
fn hitting_set_size_trend_in_k_at_d9() {
    let p = gen_anticor::<f64>(9, 120, 0.1, 11).unwrap();
    let ks = [1usize, 2, 5, 10];
    let mut sizes = Vec::new();
    for &k in &ks {
        let mut cfg = HSConfig::new(0.01, k, 4);
        cfg.max_net = 1 << 15;
        sizes.push(rms_hs(&p, &cfg).unwrap().len() as f64);
    }
    println!("d=9 sizes over k {ks:?}: {sizes:?}");
    // Spearman-style check: concordant minus discordant pairs, ties allowed.
    let mut signed = 0i64;
    for i in 0..sizes.len() {
        for j in (i + 1)..sizes.len() {
            if sizes[j] > sizes[i] {
                signed += 1;
            } else if sizes[j] < sizes[i] {
                signed -= 1;
            }
        }
    }
    assert!(signed <= 0, "sizes increase with k: {sizes:?}");
}
