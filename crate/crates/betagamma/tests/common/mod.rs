//! Shared test oracles: adaptive quadrature, centered finite differences,
//! small determinants, and region sampling. These stay independent of the
//! library code paths they check.

#![allow(dead_code)]

use betagamma::models::{ModelClass, ModelSpec};
use betagamma::rng::SeededRng;
use rand::Rng;

/// Adaptive Simpson on a finite interval.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 60)
}

/// ∫_lo^hi f, hi possibly +∞ (mapped through x = lo + t/(1−t)).
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let guard = |v: f64| if v.is_finite() { v } else { 0.0 };
    if hi.is_finite() {
        adaptive_simpson(&|x| guard(f(x)), lo, hi, tol)
    } else {
        let g = |t: f64| {
            if t >= 1.0 {
                return 0.0;
            }
            let x = lo + t / (1.0 - t);
            guard(f(x) / ((1.0 - t) * (1.0 - t)))
        };
        adaptive_simpson(&g, 0.0, 1.0, tol)
    }
}

/// Centered first difference.
pub fn central_d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Centered second difference.
pub fn central_d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Does `analytic` agree with a centered difference of `f` at `x`?
///
/// The comparison runs the stencil at h and h/2; the spread between the
/// two estimates measures the accuracy the stencil itself can resolve
/// (truncation or roundoff, whichever dominates), so points where the
/// analytic terms cancel are not held to an unresolvable tolerance.
pub fn fd_agrees(
    analytic: f64,
    fd: impl Fn(f64) -> f64,
    h: f64,
    rel_tol: f64,
) -> bool {
    let coarse = fd(h);
    let fine = fd(h / 2.0);
    let resolvable = 10.0 * (coarse - fine).abs() + 1e-12 * (1.0 + analytic.abs());
    (analytic - fine).abs() <= rel_tol * analytic.abs().max(fine.abs()) + resolvable
}

pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Relative error against the larger operand, with an absolute floor.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Log-uniform draw on [lo, hi].
pub fn log_uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    lo * (hi / lo).powf(rng.random::<f64>())
}

/// A model spec with random (a, b) in the named sign region, default
/// parameters of the region's basic model.
pub fn random_model_in_region(class: ModelClass, rng: &mut SeededRng) -> ModelSpec {
    let mag = |rng: &mut SeededRng| log_uniform(rng, 0.4, 2.5);
    let (a, b) = match class {
        ModelClass::InverseGamma => (0.0, mag(rng)),
        ModelClass::Gamma => (mag(rng), 0.0),
        ModelClass::Beta | ModelClass::BetaReflected => (mag(rng), -mag(rng)),
        ModelClass::InverseBeta => (-mag(rng), mag(rng)),
        ModelClass::InverseBetaReflected => (mag(rng), mag(rng)),
        ModelClass::Invalid => panic!("no samples in the empty region"),
    };
    let (mu, lambda, beta) = class.basic().expect("non-empty region").default_params();
    let spec = ModelSpec::new(a, b, mu, lambda, beta).expect("valid by construction");
    if class == ModelClass::BetaReflected {
        spec.with_reflected(true).expect("beta region")
    } else {
        spec
    }
}

/// The five non-empty regions.
pub fn regions() -> [ModelClass; 5] {
    [
        ModelClass::InverseGamma,
        ModelClass::Gamma,
        ModelClass::Beta,
        ModelClass::InverseBeta,
        ModelClass::InverseBetaReflected,
    ]
}
