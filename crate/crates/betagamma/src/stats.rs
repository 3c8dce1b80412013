//! Distributional tests: two-sample Kolmogorov–Smirnov, rank-based
//! independence, the invariance test suite, and the gamma/beta
//! characterization checks.
//!
//! Rank-based statistics only: several of the packaged laws have no finite
//! mean, so moment tests would be useless. All tests run at a fixed level
//! with explicit seeds and report enough to be reproduced.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::distributions::{AffineLaw, DistributionSpec};
use crate::error::{Error, Result};
use crate::involution::{apply_thy, invert_g, LinearH};
use crate::models::StationaryTriple;
use crate::rng::{derive_seed, rng_from_seed};
use crate::tolerances::TEST_LEVEL;

/// Outcome of one named check; reproducible from (name, seed, n).
#[derive(Clone, Debug, Serialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub critical: f64,
    pub n: Vec<usize>,
    pub seed: u64,
    pub pass: bool,
}

impl TestReport {
    pub fn new(
        name: impl Into<String>,
        statistic: f64,
        critical: f64,
        n: Vec<usize>,
        seed: u64,
    ) -> Self {
        Self {
            name: name.into(),
            statistic,
            critical,
            n,
            seed,
            pass: statistic < critical,
        }
    }
}

/// Two-sample KS statistic sup |F̂ₓ − F̂ᵧ|.
pub fn ks_statistic(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut x = xs.to_vec();
    let mut y = ys.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut max_diff = 0.0f64;
    while i < x.len() || j < y.len() {
        let xv = x.get(i).copied().unwrap_or(f64::INFINITY);
        let yv = y.get(j).copied().unwrap_or(f64::INFINITY);
        let t = xv.min(yv);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        max_diff = max_diff.max((i as f64 / nx - j as f64 / ny).abs());
    }
    Ok(max_diff)
}

/// Asymptotic two-sided critical value at `level`:
/// c(α)·√((n+m)/(n·m)) with c(α) = √(−ln(α/2)/2).
pub fn ks_critical(n: usize, m: usize, level: f64) -> f64 {
    let c = (-(level / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

pub fn ks_two_sample(
    name: &str,
    xs: &[f64],
    ys: &[f64],
    level: f64,
    seed: u64,
) -> Result<TestReport> {
    let d = ks_statistic(xs, ys)?;
    Ok(TestReport::new(
        name,
        d,
        ks_critical(xs.len(), ys.len(), level),
        vec![xs.len(), ys.len()],
        seed,
    ))
}

/// Midranks (ties averaged), 1-based.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

fn spearman_rho(xs: &[f64], ys: &[f64]) -> f64 {
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = xs.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for k in 0..xs.len() {
        let a = rx[k] - mean;
        let b = ry[k] - mean;
        num += a * b;
        dx += a * a;
        dy += b * b;
    }
    if dx == 0.0 || dy == 0.0 {
        return 0.0;
    }
    num / (dx * dy).sqrt()
}

const INDEP_BINS: usize = 10;

/// Rank-based independence check: Spearman z-test plus a 10×10
/// quantile-bin chi-square. The reported statistic is the larger of the
/// two divided by its own critical value, so pass ⇔ statistic < 1.
pub fn independence_test(
    name: &str,
    pairs: &[(f64, f64)],
    level: f64,
    seed: u64,
) -> Result<TestReport> {
    let n = pairs.len();
    if n < 1000 {
        return Err(Error::InvalidParameter(format!(
            "independence test needs at least 1000 pairs, got {n}"
        )));
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    for (label, v) in [("first", &xs), ("second", &ys)] {
        let (lo, hi) = v
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                (a.min(x), b.max(x))
            });
        if lo == hi {
            return Err(Error::Degenerate(format!("{label} coordinate is constant")));
        }
    }

    let rho = spearman_rho(&xs, &ys);
    let z = rho.abs() * ((n - 1) as f64).sqrt();
    let z_crit = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(1.0 - level / 2.0);

    let rx = ranks(&xs);
    let ry = ranks(&ys);
    let bin = |r: f64| (((r - 0.5) / n as f64) * INDEP_BINS as f64).floor() as usize;
    let mut counts = [[0usize; INDEP_BINS]; INDEP_BINS];
    for k in 0..n {
        counts[bin(rx[k]).min(INDEP_BINS - 1)][bin(ry[k]).min(INDEP_BINS - 1)] += 1;
    }
    let expected = n as f64 / (INDEP_BINS * INDEP_BINS) as f64;
    let chi2: f64 = counts
        .iter()
        .flatten()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    let df = ((INDEP_BINS - 1) * (INDEP_BINS - 1)) as f64;
    let chi2_crit = ChiSquared::new(df)
        .expect("positive dof")
        .inverse_cdf(1.0 - level);

    let statistic = (z / z_crit).max(chi2 / chi2_crit);
    Ok(TestReport::new(name, statistic, 1.0, vec![n], seed))
}

/// The five distributional checks of invariance for a triple and its link:
/// the mapped pair has the (R¹, R²) laws and independent coordinates, the
/// third involution coordinate has the Y law, and the ratio R²/R¹ is
/// independent of it.
pub fn invariance_suite(
    triple: &StationaryTriple,
    h: &LinearH,
    n: usize,
    seed: u64,
    level: f64,
) -> Result<Vec<TestReport>> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let sampler = triple.sampler();
    let mut rng = rng_from_seed(seed);
    let mut t1 = Vec::with_capacity(n);
    let mut t2 = Vec::with_capacity(n);
    let mut t3 = Vec::with_capacity(n);
    let mut ratio = Vec::with_capacity(n);
    for _ in 0..n {
        let (r1, r2, y) = sampler.sample(&mut rng);
        let (a, b) = apply_thy(h, r1, r2, y)?;
        let (s, yt) = invert_g(h, r1, r2)?;
        t1.push(a);
        t2.push(b);
        t3.push(yt);
        ratio.push(s);
    }

    let r1_ref = triple.r1.sample_n(&mut rng_from_seed(derive_seed(seed, 1)), n);
    let r2_ref = triple.r2.sample_n(&mut rng_from_seed(derive_seed(seed, 2)), n);
    let y_ref = triple.y.sample_n(&mut rng_from_seed(derive_seed(seed, 3)), n);

    let pairs12: Vec<(f64, f64)> = t1.iter().copied().zip(t2.iter().copied()).collect();
    let pairs_ratio3: Vec<(f64, f64)> = ratio.iter().copied().zip(t3.iter().copied()).collect();

    Ok(vec![
        ks_two_sample("invariance: T1 has the R1 law", &t1, &r1_ref, level, seed)?,
        ks_two_sample("invariance: T2 has the R2 law", &t2, &r2_ref, level, seed)?,
        independence_test("invariance: T1 independent of T2", &pairs12, level, seed)?,
        ks_two_sample("invariance: T3 has the Y law", &t3, &y_ref, level, seed)?,
        independence_test(
            "invariance: R2/R1 independent of T3",
            &pairs_ratio3,
            level,
            seed,
        )?,
    ])
}

/// Which characterization theorem to exercise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Characterization {
    /// (A+B, A/(A+B)) independent ⇔ both gamma with a common rate.
    Lukacs,
    /// (AB, A(1−B)) independent for gamma ⊗ beta inputs.
    LukacsCorollary,
    /// ((1−B)/(1−AB), 1−AB) independent ⇔ Be(p,q) ⊗ Be(p+q,r).
    SeshadriWesolowski,
}

impl Characterization {
    pub fn name(&self) -> &'static str {
        match self {
            Characterization::Lukacs => "lukacs",
            Characterization::LukacsCorollary => "lukacs-corollary",
            Characterization::SeshadriWesolowski => "seshadri-wesolowski",
        }
    }

    fn transform(&self, a: f64, b: f64) -> (f64, f64) {
        match self {
            Characterization::Lukacs => (a + b, a / (a + b)),
            Characterization::LukacsCorollary => (a * b, a * (1.0 - b)),
            Characterization::SeshadriWesolowski => {
                ((1.0 - b) / (1.0 - a * b), 1.0 - a * b)
            }
        }
    }
}

/// Sample (A, B) from explicit laws, form (C, D), and test independence,
/// optionally with KS checks of C and D against target laws.
pub fn characterization_with_inputs(
    which: Characterization,
    a_law: &DistributionSpec,
    b_law: &DistributionSpec,
    c_law: Option<&DistributionSpec>,
    d_law: Option<&DistributionSpec>,
    n: usize,
    seed: u64,
    level: f64,
) -> Result<Vec<TestReport>> {
    let mut rng = rng_from_seed(seed);
    let asamp = AffineLaw::plain(*a_law);
    let bsamp = AffineLaw::plain(*b_law);
    let a = asamp.sample_n(&mut rng, n);
    let b = bsamp.sample_n(&mut rng, n);
    let cd: Vec<(f64, f64)> = a
        .iter()
        .zip(b.iter())
        .map(|(&x, &y)| which.transform(x, y))
        .collect();
    let mut reports = vec![independence_test(
        &format!("{}: C independent of D", which.name()),
        &cd,
        level,
        seed,
    )?];
    if let Some(cl) = c_law {
        let c: Vec<f64> = cd.iter().map(|p| p.0).collect();
        let c_ref = AffineLaw::plain(*cl).sample_n(&mut rng_from_seed(derive_seed(seed, 11)), n);
        reports.push(ks_two_sample(
            &format!("{}: C has the stated law", which.name()),
            &c,
            &c_ref,
            level,
            seed,
        )?);
    }
    if let Some(dl) = d_law {
        let d: Vec<f64> = cd.iter().map(|p| p.1).collect();
        let d_ref = AffineLaw::plain(*dl).sample_n(&mut rng_from_seed(derive_seed(seed, 12)), n);
        reports.push(ks_two_sample(
            &format!("{}: D has the stated law", which.name()),
            &d,
            &d_ref,
            level,
            seed,
        )?);
    }
    Ok(reports)
}

/// Forward direction of a characterization theorem: sample the hypothesis
/// laws built from `params`, form (C, D), and test independence plus the
/// conclusion laws.
pub fn characterization_check(
    which: Characterization,
    params: [f64; 3],
    n: usize,
    seed: u64,
    level: f64,
) -> Result<Vec<TestReport>> {
    let [p1, p2, p3] = params;
    let (a_law, b_law, c_law, d_law) = match which {
        Characterization::Lukacs => (
            DistributionSpec::gamma(p1, p3)?,
            DistributionSpec::gamma(p2, p3)?,
            DistributionSpec::gamma(p1 + p2, p3)?,
            DistributionSpec::beta(p1, p2)?,
        ),
        Characterization::LukacsCorollary => (
            DistributionSpec::gamma(p1 + p2, p3)?,
            DistributionSpec::beta(p1, p2)?,
            DistributionSpec::gamma(p1, p3)?,
            DistributionSpec::gamma(p2, p3)?,
        ),
        // params = (p, q, r): A ~ Be(p, q), B ~ Be(p+q, r);
        // C ~ Be(r, q), D ~ Be(r+q, p).
        Characterization::SeshadriWesolowski => (
            DistributionSpec::beta(p1, p2)?,
            DistributionSpec::beta(p1 + p2, p3)?,
            DistributionSpec::beta(p3, p2)?,
            DistributionSpec::beta(p3 + p2, p1)?,
        ),
    };
    characterization_with_inputs(
        which,
        &a_law,
        &b_law,
        Some(&c_law),
        Some(&d_law),
        n,
        seed,
        level,
    )
}

/// Default level re-export for callers that do not thread a config.
pub const DEFAULT_LEVEL: f64 = TEST_LEVEL;
