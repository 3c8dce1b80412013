//! Deterministic analytic verification of the density-level invariance
//! identities: the q-condition, the split identity, the κ coefficients,
//! and the fourth-degree polynomial identity together with its nonlinear
//! negative control.
//!
//! All identities are evaluated in log space on reproducible
//! low-discrepancy point plans rejected onto the support product.

use rayon::prelude::*;

use crate::distributions::AffineLaw;
use crate::error::{Error, Result};
use crate::involution::{apply_tab, invert_g, InvolutionPoint, Interval, LinearH};
use crate::models::{ModelClass, StationaryTriple};
use crate::rng::derive_seed;

/// Weight link for identity checks: linear, or a polynomial used only to
/// exhibit the failure of the identities for nonlinear links.
#[derive(Clone, Debug, PartialEq)]
pub enum HSpec {
    Linear(LinearH),
    /// Coefficients c₀ + c₁·y + c₂·y² + …
    Poly(Vec<f64>),
}

impl HSpec {
    pub fn linear(h: LinearH) -> Self {
        HSpec::Linear(h)
    }

    fn poly_derivative(coeffs: &[f64], order: usize) -> Vec<f64> {
        let mut c = coeffs.to_vec();
        for _ in 0..order {
            c = c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &v)| k as f64 * v)
                .collect();
        }
        c
    }

    fn poly_eval(coeffs: &[f64], y: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c)
    }

    fn derivative(&self, y: f64, order: usize) -> f64 {
        match self {
            HSpec::Linear(h) => match order {
                0 => h.eval(y),
                1 => h.slope(),
                _ => 0.0,
            },
            HSpec::Poly(c) => Self::poly_eval(&Self::poly_derivative(c, order), y),
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.derivative(y, 0)
    }

    pub fn d1(&self, y: f64) -> f64 {
        self.derivative(y, 1)
    }

    pub fn d2(&self, y: f64) -> f64 {
        self.derivative(y, 2)
    }

    pub fn d3(&self, y: f64) -> f64 {
        self.derivative(y, 3)
    }

    pub fn d4(&self, y: f64) -> f64 {
        self.derivative(y, 4)
    }
}

/// Product density f1 ⊗ f2 ⊗ f3 with its weight link.
#[derive(Clone, Debug)]
pub struct DensityTriple {
    pub f1: AffineLaw,
    pub f2: AffineLaw,
    pub f3: AffineLaw,
    pub h: HSpec,
}

impl DensityTriple {
    pub fn from_model(triple: &StationaryTriple, h: &LinearH) -> Self {
        Self {
            f1: triple.r1,
            f2: triple.r2,
            f3: triple.y,
            h: HSpec::Linear(*h),
        }
    }

    pub fn contains(&self, p: InvolutionPoint) -> bool {
        self.f1.contains(p.r1) && self.f2.contains(p.r2) && self.f3.contains(p.y)
    }

    fn linear_h(&self) -> Result<&LinearH> {
        match &self.h {
            HSpec::Linear(h) => Ok(h),
            HSpec::Poly(_) => Err(Error::Domain(
                "this check needs the closed-form involution, which exists for linear h only"
                    .into(),
            )),
        }
    }
}

/// log q = log r2 − log |L(s, y)| + Σⱼ log fⱼ.
pub fn log_q(t: &DensityTriple, p: InvolutionPoint) -> Result<f64> {
    if !t.contains(p) {
        return Err(Error::Domain(format!(
            "({}, {}, {}) outside the support product",
            p.r1, p.r2, p.y
        )));
    }
    let s = p.r2 / p.r1;
    let l = s + t.h.d1(p.y);
    if l == 0.0 {
        return Err(Error::Singularity(format!("L({s}, {}) = 0", p.y)));
    }
    Ok(p.r2.ln() - l.abs().ln() + t.f1.log_pdf(p.r1) + t.f2.log_pdf(p.r2) + t.f3.log_pdf(p.y))
}

/// Van der Corput radical inverse.
fn radical_inverse(base: u64, mut i: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Window for the log-uniform map of plan coordinates.
const PLAN_FLOOR: f64 = 1e-3;
const PLAN_SPAN: f64 = 1e6;

fn plan_map(u: f64) -> f64 {
    PLAN_FLOOR * PLAN_SPAN.powf(u)
}

/// Mixed sequence start, so nearby seeds give unrelated plans.
fn plan_start(seed: u64) -> u64 {
    derive_seed(seed, 0x9A17) % 100_000_000 + 1
}

/// Halton plan on the support product of a density triple: bases (2, 3, 5)
/// mapped log-uniformly over [1e−3, 1e3] and rejected onto the supports.
/// The seed offsets the sequence start.
pub fn halton_plan(t: &DensityTriple, n: usize, seed: u64) -> Result<Vec<InvolutionPoint>> {
    let mut out = Vec::with_capacity(n);
    let mut idx = plan_start(seed);
    let mut tries: u64 = 0;
    let cap = 400 * n as u64 + 100_000;
    while out.len() < n {
        tries += 1;
        if tries > cap {
            return Err(Error::Numeric(
                "point plan rejection stalled; supports may not meet the window".into(),
            ));
        }
        let p = InvolutionPoint::new(
            plan_map(radical_inverse(2, idx)),
            plan_map(radical_inverse(3, idx)),
            plan_map(radical_inverse(5, idx)),
        );
        idx += 1;
        if t.contains(p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// 2-D Halton plan on (s, y): s on the ratio set of the supports, y on the
/// support of f3.
pub fn halton_sy_plan(t: &DensityTriple, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let (r1_lo, r1_hi) = t.f1.support();
    let (r2_lo, r2_hi) = t.f2.support();
    let q = Interval::new(r2_lo / r1_hi, r2_hi / r1_lo);
    let (y_lo, y_hi) = t.f3.support();
    let ys = Interval::new(y_lo, y_hi);
    let mut out = Vec::with_capacity(n);
    let mut idx = plan_start(seed);
    let mut tries: u64 = 0;
    let cap = 400 * n as u64 + 100_000;
    while out.len() < n {
        tries += 1;
        if tries > cap {
            return Err(Error::Numeric("point plan rejection stalled".into()));
        }
        let s = plan_map(radical_inverse(2, idx));
        let y = plan_map(radical_inverse(3, idx));
        idx += 1;
        if q.contains(s) && ys.contains(y) {
            out.push((s, y));
        }
    }
    Ok(out)
}

/// Max |log q∘T − log q| over a low-discrepancy plan of `n_points`.
/// Zero (to rounding) exactly when the triple is stationary for its link.
pub fn q_invariance_check(t: &DensityTriple, n_points: usize, seed: u64) -> Result<f64> {
    let h = t.linear_h()?;
    let points = halton_plan(t, n_points, seed)?;
    points
        .par_iter()
        .map(|&p| -> Result<f64> {
            let before = log_q(t, p)?;
            let image = apply_tab(h, p)?;
            let after = log_q(t, image)?;
            Ok((after - before).abs())
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// LHS − RHS of the split identity
/// 1 + r1·η1′(r1) + r2·η2′(r2) = r2·η3′(ỹ)/L(s, ỹ) (linear h).
pub fn split_identity_residual(t: &DensityTriple, p: InvolutionPoint) -> Result<f64> {
    let h = t.linear_h()?;
    if !t.contains(p) {
        return Err(Error::Domain(format!(
            "({}, {}, {}) outside the support product",
            p.r1, p.r2, p.y
        )));
    }
    let s = p.r2 / p.r1;
    let (_, yt) = invert_g(h, p.r1, p.r2)?;
    if !t.f3.contains(yt) {
        return Err(Error::Domain(format!(
            "ỹ = {yt} falls outside the support of f3"
        )));
    }
    let lt = s + h.slope();
    if lt == 0.0 {
        return Err(Error::Singularity(format!("L({s}, ỹ) = 0")));
    }
    let lhs = 1.0 + p.r1 * t.f1.dlog_pdf(p.r1)? + p.r2 * t.f2.dlog_pdf(p.r2)?;
    let rhs = p.r2 * t.f3.dlog_pdf(yt)? / lt;
    Ok(lhs - rhs)
}

/// Max |split residual| over a plan.
pub fn split_identity_max(t: &DensityTriple, n_points: usize, seed: u64) -> Result<f64> {
    let points = halton_plan(t, n_points, seed)?;
    points
        .par_iter()
        .map(|&p| split_identity_residual(t, p).map(f64::abs))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// (κ₂, κ₃, κ₄) at y:
///
/// ```text
/// κ₂ = y·η₃″ + η₃′
/// κ₃ = −y·h″·η₃′ − y·h‴ − 2h″
/// κ₄ = 2y·(h″)²
/// ```
///
/// κ₃ = κ₄ = 0 identically for linear h.
pub fn kappa_coefficients(t: &DensityTriple, y: f64) -> Result<(f64, f64, f64)> {
    if !t.f3.contains(y) {
        return Err(Error::Domain(format!("y = {y} outside the support of f3")));
    }
    let e1 = t.f3.dlog_pdf(y)?;
    let e2 = t.f3.ddlog_pdf(y)?;
    let h2 = t.h.d2(y);
    let h3 = t.h.d3(y);
    Ok((
        y * e2 + e1,
        -y * h2 * e1 - y * h3 - 2.0 * h2,
        2.0 * y * h2 * h2,
    ))
}

/// y-derivatives (κ₂′, κ₃′, κ₄′); κ₂′ needs the third log-density
/// derivative and κ₃′ the fourth derivative of h.
pub fn kappa_primes(t: &DensityTriple, y: f64) -> Result<(f64, f64, f64)> {
    if !t.f3.contains(y) {
        return Err(Error::Domain(format!("y = {y} outside the support of f3")));
    }
    let e1 = t.f3.dlog_pdf(y)?;
    let e2 = t.f3.ddlog_pdf(y)?;
    let e3 = t.f3.d3log_pdf(y)?;
    let h2 = t.h.d2(y);
    let h3 = t.h.d3(y);
    let h4 = t.h.d4(y);
    Ok((
        y * e3 + 2.0 * e2,
        -(h2 * e1 + y * h3 * e1 + y * h2 * e2) - (h3 + y * h4) - 2.0 * h3,
        2.0 * h2 * h2 + 4.0 * y * h2 * h3,
    ))
}

/// The six summands of the polynomial identity at (s, y):
///
/// ```text
/// Σⱼ₌₂⁴ [L^{5−j}, −j·κⱼ·L^{4−j}] · [[2κⱼ, κⱼ′], [s, h″]] · [L, h]ᵀ
/// ```
///
/// Returns the terms and a normalization scale built from the uncancelled
/// constituent magnitudes (|y·η″| + |η′| in place of κ₂ and so on), which
/// is the size of what the identity actually combines. Some packaged
/// models have κ₂ ≡ 0 analytically, so the evaluated terms themselves can
/// be pure rounding noise and are useless as a scale.
pub fn polynomial_identity_terms(
    t: &DensityTriple,
    s: f64,
    y: f64,
) -> Result<(Vec<f64>, f64)> {
    let l = s + t.h.d1(y);
    let hy = t.h.eval(y);
    let h2 = t.h.d2(y);
    let h3 = t.h.d3(y);
    let h4 = t.h.d4(y);
    let e1 = t.f3.dlog_pdf(y)?;
    let e2 = t.f3.ddlog_pdf(y)?;
    let e3 = t.f3.d3log_pdf(y)?;
    let (k2, k3, k4) = kappa_coefficients(t, y)?;
    let (kp2, kp3, kp4) = kappa_primes(t, y)?;
    let k_abs = [
        (y * e2).abs() + e1.abs(),
        (y * h2 * e1).abs() + (y * h3).abs() + (2.0 * h2).abs(),
        (2.0 * y * h2 * h2).abs(),
    ];
    let kp_abs = [
        (y * e3).abs() + (2.0 * e2).abs(),
        (h2 * e1).abs()
            + (y * h3 * e1).abs()
            + (y * h2 * e2).abs()
            + (h3 + y * h4).abs()
            + (2.0 * h3).abs(),
        (2.0 * h2 * h2).abs() + (4.0 * y * h2 * h3).abs(),
    ];
    let kappas = [(2u32, k2, kp2), (3, k3, kp3), (4, k4, kp4)];
    let mut terms = Vec::with_capacity(6);
    let mut scale = 0.0f64;
    for (idx, (j, k, kp)) in kappas.into_iter().enumerate() {
        let lead = l.powi(5 - j as i32) * (2.0 * k * l + kp * hy);
        let trail = -(j as f64) * k * l.powi(4 - j as i32) * (s * l + h2 * hy);
        terms.push(lead);
        terms.push(trail);
        let l_abs = l.abs();
        scale += l_abs.powi(5 - j as i32) * (2.0 * k_abs[idx] * l_abs + kp_abs[idx] * hy.abs())
            + j as f64
                * k_abs[idx]
                * l_abs.powi(4 - j as i32)
                * ((s * l).abs() + (h2 * hy).abs());
    }
    Ok((terms, scale))
}

/// Value of the polynomial identity at (s, y). Vanishes for stationary
/// triples with linear h; at s = −h′(y) it reduces to −8y·h(y)·h″(y)³.
pub fn polynomial_identity_residual(t: &DensityTriple, s: f64, y: f64) -> Result<f64> {
    let (terms, _) = polynomial_identity_terms(t, s, y)?;
    Ok(terms.iter().sum())
}

/// Max |residual| / max(1, largest summand) over a 2-D plan.
pub fn polynomial_identity_max_relative(
    t: &DensityTriple,
    n_points: usize,
    seed: u64,
) -> Result<f64> {
    let points = halton_sy_plan(t, n_points, seed)?;
    points
        .par_iter()
        .map(|&(s, y)| -> Result<f64> {
            let (terms, scale) = polynomial_identity_terms(t, s, y)?;
            let residual: f64 = terms.iter().sum();
            Ok(residual.abs() / scale.max(1.0))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Infimum of |L(s, y)| over random domain points drawn log-uniformly from
/// the support product. Each chunk gets a derived stream.
pub fn l_infimum(t: &DensityTriple, n_points: usize, seed: u64) -> Result<f64> {
    let points = halton_plan(t, n_points, seed)?;
    let mut inf = f64::INFINITY;
    for p in points {
        let l = p.r2 / p.r1 + t.h.d1(p.y);
        inf = inf.min(l.abs());
    }
    // A second, pseudo-random pass over the same budget, so the scan is
    // not limited to the lattice structure of the Halton net.
    use rand::Rng;
    let mut rng = crate::rng::rng_from_seed(derive_seed(seed, 0xC0FFEE));
    let sup = [t.f1.support(), t.f2.support(), t.f3.support()];
    let mut accepted = 0usize;
    let mut tries = 0u64;
    while accepted < n_points && tries < 400 * n_points as u64 + 100_000 {
        tries += 1;
        let draw = |rng: &mut crate::rng::SeededRng| plan_map(rng.random::<f64>());
        let (r1, r2, y) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        if r1 > sup[0].0
            && r1 < sup[0].1
            && r2 > sup[1].0
            && r2 < sup[1].1
            && y > sup[2].0
            && y < sup[2].1
        {
            accepted += 1;
            inf = inf.min((r2 / r1 + t.h.d1(y)).abs());
        }
    }
    Ok(inf)
}

/// Empirical floor for the |L| scan of each packaged model region, under
/// the standard sampling window. The links with b ≥ 0 bound L away from
/// zero by b plus the smallest ratio the window can produce; the beta
/// region's L = s − |b|·(…) can come arbitrarily close to zero on the full
/// domain, so its floor is the observed scan scale.
pub fn l_scan_floor(class: ModelClass) -> Option<f64> {
    match class {
        ModelClass::InverseGamma => Some(1.0),
        ModelClass::Gamma => Some(1e-3),
        ModelClass::Beta | ModelClass::BetaReflected => Some(1e-4),
        ModelClass::InverseBeta | ModelClass::InverseBetaReflected => Some(1.0),
        ModelClass::Invalid => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{basic_triple, BasicModel};

    fn density(model: BasicModel) -> DensityTriple {
        let (mu, lambda, beta) = model.default_params();
        let t = basic_triple(model, mu, lambda, beta).unwrap();
        DensityTriple::from_model(&t, &model.h())
    }

    #[test]
    fn poly_h_derivatives() {
        // h(y) = y²: h′ = 2y, h″ = 2, h‴ = h⁗ = 0.
        let h = HSpec::Poly(vec![0.0, 0.0, 1.0]);
        assert_eq!(h.eval(3.0), 9.0);
        assert_eq!(h.d1(3.0), 6.0);
        assert_eq!(h.d2(3.0), 2.0);
        assert_eq!(h.d3(3.0), 0.0);
        assert_eq!(h.d4(3.0), 0.0);
    }

    #[test]
    fn log_q_gamma_model_reduces_to_log_r1() {
        // h ≡ 1 makes L = s, so r2/|L| = r1.
        let t = density(BasicModel::StrictWeak);
        let p = InvolutionPoint::new(0.8, 1.7, 0.9);
        let expected = p.r1.ln()
            + t.f1.log_pdf(p.r1)
            + t.f2.log_pdf(p.r2)
            + t.f3.log_pdf(p.y);
        assert!((log_q(&t, p).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn log_q_log_gamma_hand_value() {
        // Log-gamma (2, 1, 1) at (1, 1, 1): densities are Ga⁻¹(1,1),
        // Ga⁻¹(1,1), Ga⁻¹(2,1), each with log-density −1 at 1, and
        // log(r2/|s+1|) = −log 2.
        let t = density(BasicModel::LogGamma);
        let got = log_q(&t, InvolutionPoint::new(1.0, 1.0, 1.0)).unwrap();
        assert!((got - (-3.0 - 2.0f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn log_q_outside_support_errors() {
        let t = density(BasicModel::Beta);
        assert!(log_q(&t, InvolutionPoint::new(1.5, 2.0, 0.5)).is_err());
    }

    #[test]
    fn kappa_linear_h_kills_k3_k4() {
        let t = density(BasicModel::LogGamma);
        let (_, k3, k4) = kappa_coefficients(&t, 0.7).unwrap();
        assert_eq!(k3, 0.0);
        assert_eq!(k4, 0.0);
    }

    #[test]
    fn kappa_nonlinear_example() {
        // h(y) = y² gives κ₄ = 2y·(2)² = 8y.
        let mut t = density(BasicModel::StrictWeak);
        t.h = HSpec::Poly(vec![0.0, 0.0, 1.0]);
        let (_, _, k4) = kappa_coefficients(&t, 1.3).unwrap();
        assert!((k4 - 8.0 * 1.3).abs() < 1e-12);
    }

    #[test]
    fn kappa2_constant_for_gamma_y_law() {
        // For Y ~ Ga(μ, β), κ₂(y) = y·η″ + η′ = −β identically.
        let t = density(BasicModel::StrictWeak);
        for y in [0.2, 1.0, 4.5] {
            let (k2, _, _) = kappa_coefficients(&t, y).unwrap();
            assert!((k2 + 1.0).abs() < 1e-12, "κ₂({y}) = {k2}");
        }
    }

    #[test]
    fn split_identity_vanishes_on_the_gamma_model() {
        let t = density(BasicModel::StrictWeak);
        let r = split_identity_residual(&t, InvolutionPoint::new(0.9, 2.1, 0.4)).unwrap();
        assert!(r.abs() < 1e-12, "residual {r}");
    }

    #[test]
    fn nonlinear_control_reduces_to_closed_form() {
        // At s = −h′(y) the identity collapses to −8y·h(y)·h″(y)³, which is
        // −64y³ for h(y) = y².
        let mut t = density(BasicModel::StrictWeak);
        t.h = HSpec::Poly(vec![0.0, 0.0, 1.0]);
        for y in [0.3, 0.9, 2.0] {
            let s = -2.0 * y;
            let r = polynomial_identity_residual(&t, s, y).unwrap();
            let expected = -64.0 * y * y * y;
            assert!(
                (r - expected).abs() <= 1e-10 * expected.abs().max(1.0),
                "y = {y}: {r} vs {expected}"
            );
            assert!(r != 0.0);
        }
    }

    #[test]
    fn linear_h_collapses_to_the_k2_block() {
        let t = density(BasicModel::LogGamma);
        let (terms, _) = polynomial_identity_terms(&t, 1.7, 0.6).unwrap();
        // κ₃ = κ₄ = 0 zeroes the j = 3, 4 summands.
        for &v in &terms[2..] {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn q_invariance_smoke() {
        let t = density(BasicModel::LogGamma);
        let d = q_invariance_check(&t, 2000, 1).unwrap();
        assert!(d < 1e-9, "max discrepancy {d}");
    }

    #[test]
    fn q_invariance_requires_linear_h() {
        let mut t = density(BasicModel::StrictWeak);
        t.h = HSpec::Poly(vec![0.0, 0.0, 1.0]);
        assert!(q_invariance_check(&t, 100, 1).is_err());
    }

    #[test]
    fn halton_plan_is_reproducible_and_in_support() {
        let t = density(BasicModel::Beta);
        let a = halton_plan(&t, 500, 9).unwrap();
        let b = halton_plan(&t, 500, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|&p| t.contains(p)));
        let c = halton_plan(&t, 500, 10).unwrap();
        assert_ne!(a, c);
    }
}
