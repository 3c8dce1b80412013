//! The deterministic maps of the stationary polymer algebra.
//!
//! For a linear weight link h(y) = a + b·y with a ∨ b > 0 the pair map
//! (r1, r2) ↦ (y + h(y)·r1/r2, y·r2/r1 + h(y)) extends to a closed-form
//! involution on (r1, r2, y),
//!
//! ```text
//! T(r1, r2, y) = ( y + (a+by)·r1/r2,  y·r2/r1 + (a+by),  r1·(r2−a)/(r2+b·r1) )
//! ```
//!
//! which factors as (G⊗id) ∘ swap₂₃ ∘ (G⊗id)⁻¹ through the ratio chart
//! G(s, y) = (y + h(y)/s, y·s + h(y)). This module provides those maps,
//! their Jacobians, and the maximal product domains D±.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear weight link h(y) = a + b·y with a ∨ b > 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearH {
    a: f64,
    b: f64,
}

impl LinearH {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || !(a.max(b) > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "h(y) = a + b·y requires finite a, b with max(a, b) > 0, got ({a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.a + self.b * y
    }

    /// h′ ≡ b.
    pub fn slope(&self) -> f64 {
        self.b
    }

    /// h⁻¹ as a linear link; needs b ≠ 0. Maps (a, b) to (−a/b, 1/b).
    pub fn inverse(&self) -> Result<LinearH> {
        if self.b == 0.0 {
            return Err(Error::NotInvertible(format!(
                "h(y) = {} is constant",
                self.a
            )));
        }
        LinearH::new(-self.a / self.b, 1.0 / self.b)
    }
}

/// A point (r1, r2, y) in the involution's domain. Serializes as the
/// array [r1, r2, y].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", from = "[f64; 3]")]
pub struct InvolutionPoint {
    pub r1: f64,
    pub r2: f64,
    pub y: f64,
}

impl InvolutionPoint {
    pub fn new(r1: f64, r2: f64, y: f64) -> Self {
        Self { r1, r2, y }
    }
}

impl From<[f64; 3]> for InvolutionPoint {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<InvolutionPoint> for [f64; 3] {
    fn from(p: InvolutionPoint) -> Self {
        [p.r1, p.r2, p.y]
    }
}

/// Open interval (lo, hi) on the positive half-line; hi may be +∞.
/// `lo >= hi` encodes the empty set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const EMPTY: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    /// Distance from x to the nearest endpoint.
    pub fn gap(&self, x: f64) -> f64 {
        let lo_gap = x - self.lo;
        let hi_gap = if self.hi.is_finite() {
            self.hi - x
        } else {
            f64::INFINITY
        };
        lo_gap.min(hi_gap)
    }

    /// Log-uniform draw over [1e−3, 1e3] rejected onto the interval.
    /// Heavy-tailed coverage for unbounded domains.
    pub fn sample_log_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::Domain("cannot sample the empty interval".into()));
        }
        if self.lo >= SAMPLE_CEIL || (self.hi.is_finite() && self.hi <= SAMPLE_FLOOR) {
            return Err(Error::Domain(format!(
                "interval ({}, {}) does not meet the sampling window",
                self.lo, self.hi
            )));
        }
        for _ in 0..100_000 {
            let u: f64 = rng.random();
            let x = SAMPLE_FLOOR * (SAMPLE_CEIL / SAMPLE_FLOOR).powf(u);
            if self.contains(x) {
                return Ok(x);
            }
        }
        Err(Error::Numeric(format!(
            "rejection sampling stalled on ({}, {})",
            self.lo, self.hi
        )))
    }
}

/// Window for log-uniform domain sampling.
pub const SAMPLE_FLOOR: f64 = 1e-3;
pub const SAMPLE_CEIL: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// The product domain D±_{a,b} = W±_{a,b} × V±_a × W⁺_{a,b}, where
/// W±_{a,b} = {x > 0 : ±(a + b·x) > 0} and V±_a = {x > 0 : ±(x − a) > 0}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainSpec {
    pub sign: Sign,
    pub a: f64,
    pub b: f64,
}

impl DomainSpec {
    pub fn new(sign: Sign, a: f64, b: f64) -> Result<Self> {
        if !(a.max(b) > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "domain requires max(a, b) > 0, got ({a}, {b})"
            )));
        }
        Ok(Self { sign, a, b })
    }

    /// W^s_{a,b} as an interval.
    pub fn w_interval(a: f64, b: f64, sign: Sign) -> Interval {
        let root = -a / b; // sign change of a + b·x (when b ≠ 0)
        match sign {
            Sign::Plus => {
                if b > 0.0 {
                    Interval::new(root.max(0.0), f64::INFINITY)
                } else if b == 0.0 {
                    if a > 0.0 {
                        Interval::new(0.0, f64::INFINITY)
                    } else {
                        Interval::EMPTY
                    }
                } else if root > 0.0 {
                    Interval::new(0.0, root)
                } else {
                    Interval::EMPTY
                }
            }
            Sign::Minus => {
                if b > 0.0 {
                    if root > 0.0 {
                        Interval::new(0.0, root)
                    } else {
                        Interval::EMPTY
                    }
                } else if b == 0.0 {
                    if a < 0.0 {
                        Interval::new(0.0, f64::INFINITY)
                    } else {
                        Interval::EMPTY
                    }
                } else {
                    Interval::new(root.max(0.0), f64::INFINITY)
                }
            }
        }
    }

    /// V^s_a as an interval.
    pub fn v_interval(a: f64, sign: Sign) -> Interval {
        match sign {
            Sign::Plus => Interval::new(a.max(0.0), f64::INFINITY),
            Sign::Minus => {
                if a > 0.0 {
                    Interval::new(0.0, a)
                } else {
                    Interval::EMPTY
                }
            }
        }
    }

    pub fn r1_interval(&self) -> Interval {
        Self::w_interval(self.a, self.b, self.sign)
    }

    pub fn r2_interval(&self) -> Interval {
        Self::v_interval(self.a, self.sign)
    }

    /// Third factor is always W⁺ so that h(y) > 0.
    pub fn y_interval(&self) -> Interval {
        Self::w_interval(self.a, self.b, Sign::Plus)
    }

    pub fn is_empty(&self) -> bool {
        self.r1_interval().is_empty()
            || self.r2_interval().is_empty()
            || self.y_interval().is_empty()
    }

    /// Exact inequality evaluation.
    pub fn contains(&self, p: InvolutionPoint) -> bool {
        self.r1_interval().contains(p.r1)
            && self.r2_interval().contains(p.r2)
            && self.y_interval().contains(p.y)
    }

    /// Random interior point, each coordinate log-uniform with rejection.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<InvolutionPoint> {
        Ok(InvolutionPoint::new(
            self.r1_interval().sample_log_uniform(rng)?,
            self.r2_interval().sample_log_uniform(rng)?,
            self.y_interval().sample_log_uniform(rng)?,
        ))
    }
}

/// Membership of a point in D^sign_{a,b}.
pub fn domain_membership(spec: &DomainSpec, p: InvolutionPoint) -> bool {
    spec.contains(p)
}

/// The pair map (y + h(y)·r1/r2, y·r2/r1 + h(y)) for a concrete y.
///
/// The output ratio equals the input ratio: r̃2/r̃1 = r2/r1.
pub fn apply_thy(h: &LinearH, r1: f64, r2: f64, y: f64) -> Result<(f64, f64)> {
    if !(r1 > 0.0) || !(r2 > 0.0) {
        return Err(Error::Domain(format!(
            "r1, r2 must be positive, got ({r1}, {r2})"
        )));
    }
    let hy = h.eval(y);
    if !(hy > 0.0) {
        return Err(Error::Domain(format!("h({y}) = {hy} is not positive")));
    }
    Ok((y + hy * r1 / r2, y * r2 / r1 + hy))
}

/// G(s, y) = (y + h(y)/s, y·s + h(y)); a bijection between the ratio
/// chart and the pair domain. π₂/π₁ of the output equals s.
pub fn apply_g(h: &LinearH, s: f64, y: f64) -> Result<(f64, f64)> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("ratio s must be positive, got {s}")));
    }
    let hy = h.eval(y);
    if !(hy > 0.0) {
        return Err(Error::Domain(format!("h({y}) = {hy} is not positive")));
    }
    Ok((y + hy / s, y * s + hy))
}

/// G⁻¹(r1, r2) = (r2/r1, r1·(r2 − a)/(r2 + b·r1)).
///
/// The second coordinate is the third coordinate of the involution.
pub fn invert_g(h: &LinearH, r1: f64, r2: f64) -> Result<(f64, f64)> {
    if !(r1 > 0.0) || !(r2 > 0.0) {
        return Err(Error::Domain(format!(
            "r1, r2 must be positive, got ({r1}, {r2})"
        )));
    }
    let denom = r2 + h.b * r1;
    if denom == 0.0 {
        return Err(Error::Singularity(format!(
            "r2 + b·r1 = 0 at ({r1}, {r2}) with b = {}",
            h.b
        )));
    }
    Ok((r2 / r1, r1 * (r2 - h.a) / denom))
}

/// Third coordinate of the involution; has no y-dependence.
pub fn t3(h: &LinearH, r1: f64, r2: f64) -> Result<f64> {
    Ok(invert_g(h, r1, r2)?.1)
}

/// The closed-form involution T^{(a,b)} on D⁺ ∪ D⁻. Applying it twice
/// returns the input; the first two coordinates agree with [`apply_thy`].
pub fn apply_tab(h: &LinearH, p: InvolutionPoint) -> Result<InvolutionPoint> {
    let plus = DomainSpec::new(Sign::Plus, h.a, h.b)?;
    let minus = DomainSpec::new(Sign::Minus, h.a, h.b)?;
    if !plus.contains(p) && !minus.contains(p) {
        return Err(Error::Domain(format!(
            "({}, {}, {}) lies outside both D±_({}, {})",
            p.r1, p.r2, p.y, h.a, h.b
        )));
    }
    let (r1t, r2t) = apply_thy(h, p.r1, p.r2, p.y)?;
    let (_, yt) = invert_g(h, p.r1, p.r2)?;
    Ok(InvolutionPoint::new(r1t, r2t, yt))
}

/// L(s, y) = s + h′(y); the non-vanishing factor controlling injectivity
/// and the Jacobians. Constant in y for linear h.
pub fn l_value(h: &LinearH, s: f64, _y: f64) -> f64 {
    s + h.b
}

pub type Matrix2 = [[f64; 2]; 2];
pub type Matrix3 = [[f64; 3]; 3];

/// Jacobian matrix and determinant of G at (s, y).
pub fn jacobian_g(h: &LinearH, s: f64, y: f64) -> (Matrix2, f64) {
    let l = l_value(h, s, y);
    let hy = h.eval(y);
    let m = [[-hy / (s * s), l / s], [y, l]];
    let det = -(l / s) * (y + hy / s);
    (m, det)
}

/// Jacobian matrix and determinant of G⁻¹ at (r1, r2).
pub fn jacobian_g_inv(h: &LinearH, r1: f64, r2: f64) -> Result<(Matrix2, f64)> {
    let (s, yt) = invert_g(h, r1, r2)?;
    let lt = l_value(h, s, yt);
    if lt == 0.0 {
        return Err(Error::Singularity(format!("L(s, ỹ) = 0 at ({r1}, {r2})")));
    }
    let m = [
        [-s / r1, 1.0 / r1],
        [s * yt / (lt * r1), h.eval(yt) / (s * lt * r1)],
    ];
    let det = -s / (r1 * lt);
    Ok((m, det))
}

/// Jacobian matrix and determinant of the involution at p:
///
/// ```text
///         1   ⎡  h(y)/s    −h(y)/s²    L(s,y)·r1/s ⎤
/// DT =  ─── · ⎢ −y·s        y          L(s,y)·r1   ⎥
///        r1   ⎣  ỹ·s/L̃      h(ỹ)/(s·L̃)  0          ⎦
///
/// det DT = −(y/r1 + h(y)/r2) · L(s,y)/L(s,ỹ)
/// ```
pub fn jacobian_tab(h: &LinearH, p: InvolutionPoint) -> Result<(Matrix3, f64)> {
    let (r1, r2, y) = (p.r1, p.r2, p.y);
    let s = r2 / r1;
    let (_, yt) = invert_g(h, r1, r2)?;
    let l = l_value(h, s, y);
    let lt = l_value(h, s, yt);
    if l == 0.0 || lt == 0.0 {
        return Err(Error::Singularity(format!(
            "L vanishes at s = {s}: L(s,y) = {l}, L(s,ỹ) = {lt}"
        )));
    }
    let hy = h.eval(y);
    let hyt = h.eval(yt);
    let m = [
        [hy / (s * r1), -hy / (s * s * r1), l / s],
        [-y * s / r1, y / r1, l],
        [yt * s / (lt * r1), hyt / (s * lt * r1), 0.0],
    ];
    let det = -(y / r1 + hy / r2) * l / lt;
    Ok((m, det))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn h(a: f64, b: f64) -> LinearH {
        LinearH::new(a, b).unwrap()
    }

    #[test]
    fn linear_h_validation() {
        assert!(LinearH::new(-1.0, -1.0).is_err());
        assert!(LinearH::new(0.0, 0.0).is_err());
        assert!(LinearH::new(0.0, 1.0).is_ok());
        assert!(LinearH::new(1.0, -5.0).is_ok());
    }

    #[test]
    fn thy_symmetric_point() {
        // h(y) = y at (1, 1, 1).
        let (a, b) = apply_thy(&h(0.0, 1.0), 1.0, 1.0, 1.0).unwrap();
        assert_eq!((a, b), (2.0, 2.0));
    }

    #[test]
    fn thy_worked_point() {
        // h ≡ 1 at (2, 3, 1/2).
        let (r1t, r2t) = apply_thy(&h(1.0, 0.0), 2.0, 3.0, 0.5).unwrap();
        assert!((r1t - 7.0 / 6.0).abs() < 1e-15);
        assert!((r2t - 7.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn thy_rejects_nonpositive_h() {
        // h(y) = 1 − y is nonpositive at y ≥ 1.
        assert!(apply_thy(&h(1.0, -1.0), 1.0, 1.0, 1.5).is_err());
        assert!(apply_thy(&h(1.0, -1.0), 0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn g_hand_values() {
        let (g1, g2) = apply_g(&h(1.0, -1.0), 2.0, 0.5).unwrap();
        assert!((g1 - 0.75).abs() < 1e-15);
        assert!((g2 - 1.5).abs() < 1e-15);

        let (g1, g2) = apply_g(&h(0.0, 1.0), 1.0, 0.7).unwrap();
        assert!((g1 - 1.4).abs() < 1e-15 && (g2 - 1.4).abs() < 1e-15);

        assert!(apply_g(&h(1.0, 0.0), 0.0, 1.0).is_err());
    }

    #[test]
    fn invert_g_hand_values() {
        // Continuation of the worked point: G(3/2, 4/3) = (2, 3) for h ≡ 1,
        // so G⁻¹(2, 3) = (3/2, 4/3).
        let (s, yt) = invert_g(&h(1.0, 0.0), 2.0, 3.0).unwrap();
        assert!((s - 1.5).abs() < 1e-15);
        assert!((yt - 4.0 / 3.0).abs() < 1e-15);

        // Symmetric point for h(y) = y.
        let (s, yt) = invert_g(&h(0.0, 1.0), 2.5, 2.5).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        assert!((yt - 1.25).abs() < 1e-15);
    }

    #[test]
    fn invert_g_singularity() {
        // r2 + b·r1 = 0 with b = −1 at r1 = r2.
        assert!(matches!(
            invert_g(&h(1.0, -1.0), 2.0, 2.0),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn g_round_trip() {
        let mut rng = rng_from_seed(3);
        for hh in [h(0.0, 1.0), h(1.0, 0.0), h(1.0, -1.0), h(-1.0, 1.0)] {
            let dom = DomainSpec::new(Sign::Plus, hh.a(), hh.b()).unwrap();
            for _ in 0..200 {
                let s = dom
                    .r2_interval()
                    .sample_log_uniform(&mut rng)
                    .unwrap()
                    .max(1e-2);
                let y = dom.y_interval().sample_log_uniform(&mut rng).unwrap();
                let (r1, r2) = apply_g(&hh, s, y).unwrap();
                let (s2, y2) = invert_g(&hh, r1, r2).unwrap();
                assert!((s2 - s).abs() / s < 1e-12, "s round trip for {hh:?}");
                assert!((y2 - y).abs() / y < 1e-12, "y round trip for {hh:?}");
            }
        }
    }

    #[test]
    fn tab_worked_point_and_involution() {
        let hh = h(1.0, 0.0);
        let p = InvolutionPoint::new(2.0, 3.0, 0.5);
        let q = apply_tab(&hh, p).unwrap();
        assert!((q.r1 - 7.0 / 6.0).abs() < 1e-15);
        assert!((q.r2 - 7.0 / 4.0).abs() < 1e-15);
        assert!((q.y - 4.0 / 3.0).abs() < 1e-15);
        let back = apply_tab(&hh, q).unwrap();
        assert!((back.r1 - 2.0).abs() < 1e-14);
        assert!((back.r2 - 3.0).abs() < 1e-14);
        assert!((back.y - 0.5).abs() < 1e-14);
    }

    #[test]
    fn tab_symmetric_family() {
        // (a, b) = (0, 1): (r, r, y) ↦ (2y, 2y, r/2).
        let hh = h(0.0, 1.0);
        let q = apply_tab(&hh, InvolutionPoint::new(3.0, 3.0, 0.8)).unwrap();
        assert!((q.r1 - 1.6).abs() < 1e-15);
        assert!((q.r2 - 1.6).abs() < 1e-15);
        assert!((q.y - 1.5).abs() < 1e-15);
    }

    #[test]
    fn tab_rejects_outside_domain() {
        // D⁺_{−1,1} = (1, ∞) × (0, ∞) × (1, ∞): r1 ≤ 1 is outside.
        let hh = h(-1.0, 1.0);
        assert!(apply_tab(&hh, InvolutionPoint::new(0.5, 1.0, 2.0)).is_err());
        assert!(apply_tab(&hh, InvolutionPoint::new(1.0, 1.0, 2.0)).is_err());
        assert!(apply_tab(&hh, InvolutionPoint::new(1.5, 1.0, 2.0)).is_ok());
    }

    #[test]
    fn l_value_examples() {
        assert_eq!(l_value(&h(1.0, -1.0), 2.0, 0.3), 1.0);
        assert_eq!(l_value(&h(0.0, 1.0), 2.0, 9.9), 3.0);
    }

    #[test]
    fn jacobian_det_hand_value() {
        // (a, b) = (1, 0) at (2, 3, 1/2): det = −(1/4 + 1/3) = −7/12.
        let (_, det) = jacobian_tab(&h(1.0, 0.0), InvolutionPoint::new(2.0, 3.0, 0.5)).unwrap();
        assert!((det + 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn domain_examples_from_the_classification() {
        // (1, 0): D⁻ empty, D⁺ = (0,∞) × (1,∞) × (0,∞).
        let d = DomainSpec::new(Sign::Minus, 1.0, 0.0).unwrap();
        assert!(d.is_empty());
        let d = DomainSpec::new(Sign::Plus, 1.0, 0.0).unwrap();
        assert!(d.contains(InvolutionPoint::new(1.0, 2.0, 5.0)));
        assert!(!d.contains(InvolutionPoint::new(1.0, 0.5, 5.0)));

        // (1, −1): D⁺ = (0,1) × (1,∞) × (0,1).
        let d = DomainSpec::new(Sign::Plus, 1.0, -1.0).unwrap();
        assert!(d.contains(InvolutionPoint::new(0.5, 2.0, 0.3)));
        assert!(!d.contains(InvolutionPoint::new(1.5, 2.0, 0.3)));
        // D⁻ = (1,∞) × (0,1) × (0,1).
        let d = DomainSpec::new(Sign::Minus, 1.0, -1.0).unwrap();
        assert!(d.contains(InvolutionPoint::new(2.0, 0.5, 0.3)));

        // (−1, 1): D⁺ = (1,∞) × (0,∞) × (1,∞); r1 ≤ 1 excluded.
        let d = DomainSpec::new(Sign::Plus, -1.0, 1.0).unwrap();
        assert!(d.contains(InvolutionPoint::new(2.0, 0.1, 3.0)));
        assert!(!d.contains(InvolutionPoint::new(0.9, 0.1, 3.0)));
        assert!(DomainSpec::new(Sign::Minus, -1.0, 1.0).unwrap().is_empty());
    }

    #[test]
    fn point_serializes_as_array() {
        let p = InvolutionPoint::new(1.0, 2.0, 3.0);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1.0,2.0,3.0]");
    }
}
