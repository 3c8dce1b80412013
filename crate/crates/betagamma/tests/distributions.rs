//! Distribution-level checks against independent oracles: quadrature
//! normalization, finite-difference derivatives, reciprocal-sampler
//! identities, and moment sanity.

mod common;

use betagamma::distributions::{DistributionSpec, Family};
use betagamma::rng::rng_from_seed;
use betagamma::stats::ks_two_sample;
use betagamma::tolerances::{DENSITY_NORMALIZATION_TOL, DLOG_FD_REL};
use common::{central_d1, central_d2, fd_agrees, integrate, log_uniform};

const FAMILIES: [Family; 5] = [
    Family::Gamma,
    Family::Beta,
    Family::InverseGamma,
    Family::InverseBeta,
    Family::ShiftedInverseBeta,
];

/// Random admissible (spec, interior point) pairs. Shapes stay in a window
/// where endpoint singularities remain mild enough for plain quadrature.
fn random_pairs(per_family: usize, seed: u64) -> Vec<(DistributionSpec, f64)> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::new();
    for family in FAMILIES {
        for _ in 0..per_family {
            let s1 = log_uniform(&mut rng, 0.6, 4.0);
            let s2 = log_uniform(&mut rng, 0.6, 4.0);
            let spec = DistributionSpec::new(family, s1, s2).unwrap();
            let x = spec.sample(&mut rng);
            out.push((spec, x));
        }
    }
    out
}

#[test]
fn densities_integrate_to_one() {
    for (spec, _) in random_pairs(200, 101) {
        let (lo, hi) = spec.support();
        let mass = integrate(|x| spec.log_pdf(x).exp(), lo, hi, 1e-10);
        assert!(
            (mass - 1.0).abs() < DENSITY_NORMALIZATION_TOL,
            "{spec:?} integrates to {mass}"
        );
    }
}

#[test]
fn derivatives_match_finite_differences() {
    for (spec, x) in random_pairs(200, 102) {
        let (lo, hi) = spec.support();
        // Steps proportional to the distance to the nearest endpoint: the
        // log-density derivatives blow up like powers of 1/gap there.
        let gap = (x - lo).min(if hi.is_finite() { hi - x } else { f64::INFINITY });
        let h1 = 1e-6 * gap;
        let h2 = 1e-4 * gap;

        let d1 = spec.dlog_pdf(x).unwrap();
        assert!(
            fd_agrees(d1, |h| central_d1(|t| spec.log_pdf(t), x, h), h1, DLOG_FD_REL),
            "{spec:?} dlog at {x}: {d1}"
        );

        let d2 = spec.ddlog_pdf(x).unwrap();
        assert!(
            fd_agrees(d2, |h| central_d2(|t| spec.log_pdf(t), x, h), h2, DLOG_FD_REL),
            "{spec:?} ddlog at {x}: {d2}"
        );

        let d3 = spec.d3log_pdf(x).unwrap();
        assert!(
            fd_agrees(
                d3,
                |h| central_d1(|t| spec.ddlog_pdf(t).unwrap(), x, h),
                h1,
                DLOG_FD_REL
            ),
            "{spec:?} d3log at {x}: {d3}"
        );
    }
}

#[test]
fn spec_examples_for_derivatives() {
    // Gamma(α, β): (α−1)/x − β.
    let g = DistributionSpec::gamma(2.5, 1.5).unwrap();
    assert!((g.dlog_pdf(2.0).unwrap() - (1.5 / 2.0 - 1.5)).abs() < 1e-14);
    // Reciprocal beta derivative against a finite difference at x = 2.
    let ib = DistributionSpec::inverse_beta(1.3, 2.2).unwrap();
    let fd = central_d1(|t| ib.log_pdf(t), 2.0, 1e-6);
    assert!((ib.dlog_pdf(2.0).unwrap() - fd).abs() < 1e-6);
    // Beta(2, 2) second derivative at 0.25 against a finite difference.
    let be = DistributionSpec::beta(2.0, 2.0).unwrap();
    let fd2 = central_d2(|t| be.log_pdf(t), 0.25, 1e-4);
    assert!((be.ddlog_pdf(0.25).unwrap() - fd2).abs() < 1e-5);
}

#[test]
fn inverse_gamma_mean_against_quadrature() {
    // Oracle first: E X = ∫ x f(x) dx for InverseGamma(3, 2) is 1.
    let spec = DistributionSpec::inverse_gamma(3.0, 2.0).unwrap();
    let mean_by_quadrature = integrate(|x| x * spec.log_pdf(x).exp(), 0.0, f64::INFINITY, 1e-10);
    assert!(
        (mean_by_quadrature - 1.0).abs() < 1e-7,
        "quadrature mean {mean_by_quadrature}"
    );

    let xs = spec.sample_n(&mut rng_from_seed(103), 200_000);
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    // Var = β²/((α−1)²(α−2)) = 1 for (3, 2); allow 4σ/√n.
    assert!((mean - mean_by_quadrature).abs() < 4.0 / (xs.len() as f64).sqrt());
}

#[test]
fn reciprocal_samplers_match_reciprocal_laws() {
    let n = 100_000;
    let cases = [
        (
            DistributionSpec::inverse_gamma(3.0, 2.0).unwrap(),
            DistributionSpec::gamma(3.0, 2.0).unwrap(),
        ),
        (
            DistributionSpec::inverse_beta(1.5, 2.0).unwrap(),
            DistributionSpec::beta(1.5, 2.0).unwrap(),
        ),
    ];
    for (inv, base) in cases {
        let xs = inv.sample_n(&mut rng_from_seed(104), n);
        let ys: Vec<f64> = base
            .sample_n(&mut rng_from_seed(105), n)
            .into_iter()
            .map(|v| 1.0 / v)
            .collect();
        let report = ks_two_sample("reciprocal identity", &xs, &ys, 0.001, 104).unwrap();
        assert!(report.pass, "{inv:?}: D = {}", report.statistic);
    }
    // Shifted family: 1/X − 1 for X beta.
    let sib = DistributionSpec::shifted_inverse_beta(1.5, 2.0).unwrap();
    let xs = sib.sample_n(&mut rng_from_seed(106), n);
    let ys: Vec<f64> = DistributionSpec::beta(1.5, 2.0)
        .unwrap()
        .sample_n(&mut rng_from_seed(107), n)
        .into_iter()
        .map(|v| 1.0 / v - 1.0)
        .collect();
    let report = ks_two_sample("shifted identity", &xs, &ys, 0.001, 106).unwrap();
    assert!(report.pass, "shifted: D = {}", report.statistic);
}

#[test]
fn mean_log_matches_quadrature() {
    for (spec, _) in random_pairs(4, 108) {
        let (lo, hi) = spec.support();
        let by_quadrature = integrate(|x| x.ln() * spec.log_pdf(x).exp(), lo, hi, 1e-11);
        assert!(
            (spec.mean_log() - by_quadrature).abs() < 1e-5,
            "{spec:?}: digamma {} vs quadrature {by_quadrature}",
            spec.mean_log()
        );
    }
}
