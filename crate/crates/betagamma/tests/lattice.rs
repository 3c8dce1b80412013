//! Lattice-level checks: path independence of log Z, agreement of the
//! ratio recursion with the path-enumeration oracle, all-ones ground
//! truth, and a stationarity smoke test.

mod common;

use betagamma::lattice::{
    brute_force_logz, interior_ratio_samples, log_z, log_z_along, recursion_logz, simulate_field,
    EdgeWeights, Step,
};
use betagamma::models::{stationary_triple, BasicModel, ModelSpec};
use betagamma::rng::{derive_seed, rng_from_seed};
use betagamma::stats::ks_two_sample;
use betagamma::tolerances::{LOGZ_COMBINATORIAL_TOL, LOGZ_ORACLE_TOL, LOGZ_PATH_TOL, TEST_LEVEL};
use rand::seq::SliceRandom;
use rand::Rng;
use statrs::function::gamma::ln_gamma;

fn random_path(m: usize, n: usize, rng: &mut betagamma::rng::SeededRng) -> Vec<Step> {
    let mut steps: Vec<Step> = std::iter::repeat(Step::Right)
        .take(m)
        .chain(std::iter::repeat(Step::Up).take(n))
        .collect();
    steps.shuffle(rng);
    steps
}

#[test]
fn log_z_is_path_independent() {
    let mut rng = rng_from_seed(71);
    let mut worst = 0.0f64;
    let mut pairs = 0;
    'outer: for model in BasicModel::ALL {
        let spec = ModelSpec::preset(model);
        for rep in 0..25u64 {
            let field = simulate_field(&spec, 20, 20, derive_seed(72, rep)).unwrap();
            let a = log_z_along(&field, &random_path(20, 20, &mut rng)).unwrap();
            let b = log_z_along(&field, &random_path(20, 20, &mut rng)).unwrap();
            worst = worst.max((a - b).abs());
            pairs += 1;
            if pairs >= 100 {
                break 'outer;
            }
        }
    }
    assert_eq!(pairs, 100);
    assert!(worst < LOGZ_PATH_TOL, "paths disagree by {worst}");
}

#[test]
fn recursion_matches_path_enumeration() {
    // 50 random weight grids with m + n ≤ 10.
    let mut rng = rng_from_seed(73);
    for grid in 0..50 {
        let m = rng.random_range(1..=9usize);
        let n = rng.random_range(1..=(10 - m).max(1)).min(10 - m).max(1);
        let mut h_rng = rng_from_seed(derive_seed(74, grid));
        let mut v_rng = rng_from_seed(derive_seed(74, grid + 1000));
        let w = EdgeWeights::from_fn(
            m,
            n,
            |_, _| h_rng.random_range(-1.0..1.0),
            |_, _| v_rng.random_range(-1.0..1.0),
        );
        let by_recursion = recursion_logz(&w, m, n).unwrap();
        let by_enumeration = brute_force_logz(&w, m, n).unwrap();
        assert!(
            (by_recursion - by_enumeration).abs() < LOGZ_ORACLE_TOL,
            "{m}×{n}: {by_recursion} vs {by_enumeration}"
        );
    }
}

#[test]
fn field_log_z_matches_path_enumeration() {
    // The field's staircase sum against enumeration over the weights the
    // field realizes, on 5×5 grids for each basic model.
    for (k, model) in BasicModel::ALL.iter().enumerate() {
        let spec = ModelSpec::preset(*model);
        let field = simulate_field(&spec, 5, 5, derive_seed(75, k as u64)).unwrap();
        let w = EdgeWeights::from_field(&field);
        let by_field = log_z(&field, 5, 5).unwrap();
        let by_enumeration = brute_force_logz(&w, 5, 5).unwrap();
        assert!(
            (by_field - by_enumeration).abs() < LOGZ_ORACLE_TOL,
            "{model}: {by_field} vs {by_enumeration}"
        );
        // Interior corners too.
        for (i, j) in [(1usize, 1usize), (3, 2), (5, 4)] {
            let a = log_z(&field, i, j).unwrap();
            let b = brute_force_logz(&w, i, j).unwrap();
            assert!((a - b).abs() < LOGZ_ORACLE_TOL);
        }
    }
}

#[test]
fn all_ones_weights_count_paths_exactly() {
    let ln_choose =
        |m: usize, n: usize| ln_gamma((m + n + 1) as f64) - ln_gamma((m + 1) as f64) - ln_gamma((n + 1) as f64);
    for (m, n) in [(1, 1), (2, 1), (2, 2), (5, 5), (10, 10), (13, 7)] {
        let w = EdgeWeights::all_ones(m, n);
        let got = recursion_logz(&w, m, n).unwrap();
        assert!(
            (got - ln_choose(m, n)).abs() < LOGZ_COMBINATORIAL_TOL,
            "({m}, {n}): {got} vs {}",
            ln_choose(m, n)
        );
    }
    // Z_{2,1} = 3 paths.
    let w = EdgeWeights::all_ones(2, 1);
    assert!((recursion_logz(&w, 2, 1).unwrap() - 3.0f64.ln()).abs() < LOGZ_COMBINATORIAL_TOL);
}

#[test]
fn constant_bulk_weights_reproduce_the_recursion_exactly() {
    // Degenerate sanity mode: all edge weights pinned, Z is deterministic.
    let w = EdgeWeights::from_fn(3, 3, |_, _| 0.25, |_, _| -0.5);
    let by_recursion = recursion_logz(&w, 3, 3).unwrap();
    let by_enumeration = brute_force_logz(&w, 3, 3).unwrap();
    assert!((by_recursion - by_enumeration).abs() < 1e-12);
}

#[test]
fn interior_law_matches_boundary_law_smoke() {
    // Small-n version of the stationarity acceptance run.
    let spec = ModelSpec::preset(BasicModel::LogGamma);
    let triple = stationary_triple(&spec).unwrap();
    let n = 20_000;
    let samples = interior_ratio_samples(&spec, (2, 2), n, 77).unwrap();
    let r1: Vec<f64> = samples.iter().map(|p| p.0).collect();
    let r2: Vec<f64> = samples.iter().map(|p| p.1).collect();
    let r1_ref = triple.r1.sample_n(&mut rng_from_seed(derive_seed(77, 1)), n);
    let r2_ref = triple.r2.sample_n(&mut rng_from_seed(derive_seed(77, 2)), n);
    let a = ks_two_sample("interior R1 law", &r1, &r1_ref, TEST_LEVEL, 77).unwrap();
    let b = ks_two_sample("interior R2 law", &r2, &r2_ref, TEST_LEVEL, 77).unwrap();
    assert!(a.pass, "R1: D = {}", a.statistic);
    assert!(b.pass, "R2: D = {}", b.statistic);
}

#[test]
fn interior_log_ratio_mean_matches_digamma() {
    // Stationarity makes every interior log R1 have mean
    // ln β − ψ(μ−λ) = −ψ(1) = γ for the log-gamma preset. Sites within a
    // field are strongly correlated (measured per-field sd ≈ 0.13), so the
    // check averages 40 replica fields: SE ≈ 0.13/√40 ≈ 0.02, band 4·SE.
    let spec = ModelSpec::preset(BasicModel::LogGamma);
    let mut sum = 0.0;
    let mut count = 0usize;
    for rep in 0..40u64 {
        let field = simulate_field(&spec, 50, 50, derive_seed(79, rep)).unwrap();
        for i in 1..=50 {
            for j in 1..=50 {
                sum += field.log_r1(i, j);
                count += 1;
            }
        }
    }
    let mean = sum / count as f64;
    let gamma_euler = -statrs::function::gamma::digamma(1.0);
    assert!(
        (mean - gamma_euler).abs() < 0.082,
        "interior mean {mean} vs γ = {gamma_euler}"
    );
}
