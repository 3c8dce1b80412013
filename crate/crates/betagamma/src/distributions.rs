//! Samplers, log-densities, and log-density derivatives for the five
//! distribution families the stationary polymer models use.
//!
//! Conventions: Ga(α, β) has density β^α x^{α−1} e^{−βx} / Γ(α) on (0, ∞)
//! (β is a rate); Be(α, β) is the standard beta on (0, 1). The reciprocal
//! families are laws of 1/X, and the shifted reciprocal beta is the law of
//! 1/X − 1 for X beta. All densities are carried in log space.

use rand::Rng;
use rand_distr::Distribution as _;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};

/// The five families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Gamma,
    Beta,
    InverseGamma,
    InverseBeta,
    ShiftedInverseBeta,
}

/// A parametrized member of the beta-gamma family.
///
/// `shape1` is α. `shape2` is the rate β for the gamma-type families and
/// the second shape for the beta-type families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub family: Family,
    pub shape1: f64,
    pub shape2: f64,
}

fn check_shape(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// log B(a, b)⁻¹ = log Γ(a+b) − log Γ(a) − log Γ(b).
fn ln_beta_norm(a: f64, b: f64) -> f64 {
    ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b)
}

impl DistributionSpec {
    pub fn new(family: Family, shape1: f64, shape2: f64) -> Result<Self> {
        check_shape("shape1", shape1)?;
        check_shape("shape2", shape2)?;
        Ok(Self {
            family,
            shape1,
            shape2,
        })
    }

    pub fn gamma(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Family::Gamma, alpha, beta)
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Family::Beta, alpha, beta)
    }

    pub fn inverse_gamma(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Family::InverseGamma, alpha, beta)
    }

    pub fn inverse_beta(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Family::InverseBeta, alpha, beta)
    }

    pub fn shifted_inverse_beta(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Family::ShiftedInverseBeta, alpha, beta)
    }

    /// Open support interval (lo, hi); hi may be +∞.
    pub fn support(&self) -> (f64, f64) {
        match self.family {
            Family::Gamma | Family::InverseGamma | Family::ShiftedInverseBeta => {
                (0.0, f64::INFINITY)
            }
            Family::Beta => (0.0, 1.0),
            Family::InverseBeta => (1.0, f64::INFINITY),
        }
    }

    /// Strict interior of the support.
    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.support();
        x > lo && x < hi
    }

    fn require_interior(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "x = {x} is not interior to the support of {:?}({}, {})",
                self.family, self.shape1, self.shape2
            )))
        }
    }

    /// One draw, strictly inside the open support.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Sampler::new(self).sample(rng)
    }

    /// n i.i.d. draws. Identical seed, identical output.
    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        let s = Sampler::new(self);
        (0..n).map(|_| s.sample(rng)).collect()
    }

    /// Natural log of the density; −∞ outside the open support. The
    /// reciprocal families carry the x⁻² Jacobian of t ↦ 1/t and the
    /// shifted family translates by one.
    pub fn log_pdf(&self, x: f64) -> f64 {
        if !x.is_finite() || !self.contains(x) {
            return f64::NEG_INFINITY;
        }
        let (a, b) = (self.shape1, self.shape2);
        match self.family {
            Family::Gamma => a * b.ln() - ln_gamma(a) + (a - 1.0) * x.ln() - b * x,
            Family::Beta => {
                ln_beta_norm(a, b) + (a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln()
            }
            Family::InverseGamma => a * b.ln() - ln_gamma(a) - (a + 1.0) * x.ln() - b / x,
            Family::InverseBeta => {
                ln_beta_norm(a, b) + (b - 1.0) * (x - 1.0).ln() - (a + b) * x.ln()
            }
            Family::ShiftedInverseBeta => {
                ln_beta_norm(a, b) + (b - 1.0) * x.ln() - (a + b) * (1.0 + x).ln()
            }
        }
    }

    /// d/dx log f(x) at an interior point.
    pub fn dlog_pdf(&self, x: f64) -> Result<f64> {
        self.require_interior(x)?;
        let (a, b) = (self.shape1, self.shape2);
        Ok(match self.family {
            Family::Gamma => (a - 1.0) / x - b,
            Family::Beta => (a - 1.0) / x - (b - 1.0) / (1.0 - x),
            Family::InverseGamma => -(a + 1.0) / x + b / (x * x),
            Family::InverseBeta => (b - 1.0) / (x - 1.0) - (a + b) / x,
            Family::ShiftedInverseBeta => (b - 1.0) / x - (a + b) / (1.0 + x),
        })
    }

    /// d²/dx² log f(x) at an interior point.
    pub fn ddlog_pdf(&self, x: f64) -> Result<f64> {
        self.require_interior(x)?;
        let (a, b) = (self.shape1, self.shape2);
        let sq = |v: f64| v * v;
        Ok(match self.family {
            Family::Gamma => -(a - 1.0) / sq(x),
            Family::Beta => -(a - 1.0) / sq(x) - (b - 1.0) / sq(1.0 - x),
            Family::InverseGamma => (a + 1.0) / sq(x) - 2.0 * b / (sq(x) * x),
            Family::InverseBeta => -(b - 1.0) / sq(x - 1.0) + (a + b) / sq(x),
            Family::ShiftedInverseBeta => -(b - 1.0) / sq(x) + (a + b) / sq(1.0 + x),
        })
    }

    /// d³/dx³ log f(x) at an interior point.
    pub fn d3log_pdf(&self, x: f64) -> Result<f64> {
        self.require_interior(x)?;
        let (a, b) = (self.shape1, self.shape2);
        let cu = |v: f64| v * v * v;
        Ok(match self.family {
            Family::Gamma => 2.0 * (a - 1.0) / cu(x),
            Family::Beta => 2.0 * (a - 1.0) / cu(x) - 2.0 * (b - 1.0) / cu(1.0 - x),
            Family::InverseGamma => -2.0 * (a + 1.0) / cu(x) + 6.0 * b / (cu(x) * x),
            Family::InverseBeta => 2.0 * (b - 1.0) / cu(x - 1.0) - 2.0 * (a + b) / cu(x),
            Family::ShiftedInverseBeta => 2.0 * (b - 1.0) / cu(x) - 2.0 * (a + b) / cu(1.0 + x),
        })
    }

    /// E[log X] from digamma identities.
    pub fn mean_log(&self) -> f64 {
        let (a, b) = (self.shape1, self.shape2);
        match self.family {
            Family::Gamma => digamma(a) - b.ln(),
            Family::Beta => digamma(a) - digamma(a + b),
            Family::InverseGamma => b.ln() - digamma(a),
            Family::InverseBeta => digamma(a + b) - digamma(a),
            // log(1/X − 1) = log(1 − X) − log X for X beta.
            Family::ShiftedInverseBeta => digamma(b) - digamma(a),
        }
    }
}

/// Reusable sampler; builds the base gamma samplers once.
///
/// Beta draws come from G₁/(G₁+G₂), and the reciprocal and shifted
/// families are deterministic transforms of the base draws, so the
/// distributional identities between the families hold exactly by
/// construction.
#[derive(Clone, Debug)]
pub struct Sampler {
    spec: DistributionSpec,
    base: BaseSampler,
}

#[derive(Clone, Debug)]
enum BaseSampler {
    Gamma(rand_distr::Gamma<f64>),
    GammaPair(rand_distr::Gamma<f64>, rand_distr::Gamma<f64>),
}

impl Sampler {
    pub fn new(spec: &DistributionSpec) -> Self {
        let base = match spec.family {
            Family::Gamma | Family::InverseGamma => BaseSampler::Gamma(
                rand_distr::Gamma::new(spec.shape1, 1.0 / spec.shape2)
                    .expect("shapes validated at construction"),
            ),
            Family::Beta | Family::InverseBeta | Family::ShiftedInverseBeta => {
                BaseSampler::GammaPair(
                    rand_distr::Gamma::new(spec.shape1, 1.0).expect("validated"),
                    rand_distr::Gamma::new(spec.shape2, 1.0).expect("validated"),
                )
            }
        };
        Self { spec: *spec, base }
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // Rounding can land a transform exactly on a support endpoint
        // (e.g. G₁/(G₁+G₂) rounding to 1); redraw to stay in the open set.
        loop {
            let raw = match &self.base {
                BaseSampler::Gamma(g) => g.sample(rng),
                BaseSampler::GammaPair(ga, gb) => {
                    let g1 = ga.sample(rng);
                    let g2 = gb.sample(rng);
                    g1 / (g1 + g2)
                }
            };
            let x = match self.spec.family {
                Family::Gamma | Family::Beta => raw,
                Family::InverseGamma | Family::InverseBeta => 1.0 / raw,
                Family::ShiftedInverseBeta => 1.0 / raw - 1.0,
            };
            if x.is_finite() && self.spec.contains(x) {
                return x;
            }
        }
    }
}

/// An affine transform scale·X + shift of a base family member.
///
/// The classification theorem's model modifications are exactly affine, so
/// packaged stationary triples carry this wrapper instead of new families.
/// `scale` may be negative; it must be nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineLaw {
    pub base: DistributionSpec,
    pub scale: f64,
    pub shift: f64,
}

impl AffineLaw {
    pub fn new(base: DistributionSpec, scale: f64, shift: f64) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "affine wrapper needs nonzero finite scale and finite shift, got ({scale}, {shift})"
            )));
        }
        Ok(Self { base, scale, shift })
    }

    /// The base law untouched.
    pub fn plain(base: DistributionSpec) -> Self {
        Self {
            base,
            scale: 1.0,
            shift: 0.0,
        }
    }

    /// c · self.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.base, c * self.scale, c * self.shift)
    }

    /// c · self + d.
    pub fn affine(&self, c: f64, d: f64) -> Result<Self> {
        Self::new(self.base, c * self.scale, c * self.shift + d)
    }

    /// Open support interval after the transform.
    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.base.support();
        let a = self.scale * lo + self.shift;
        let b = self.scale * hi + self.shift;
        if self.scale > 0.0 {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.support();
        x > lo && x < hi
    }

    fn pullback(&self, x: f64) -> f64 {
        (x - self.shift) / self.scale
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.scale * self.base.sample(rng) + self.shift
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        let s = self.sampler();
        (0..n).map(|_| s.sample(rng)).collect()
    }

    pub fn sampler(&self) -> AffineSampler {
        AffineSampler {
            inner: Sampler::new(&self.base),
            scale: self.scale,
            shift: self.shift,
        }
    }

    /// log-density including the |scale|⁻¹ Jacobian factor.
    pub fn log_pdf(&self, x: f64) -> f64 {
        if !self.contains(x) {
            return f64::NEG_INFINITY;
        }
        self.base.log_pdf(self.pullback(x)) - self.scale.abs().ln()
    }

    pub fn dlog_pdf(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::Domain(format!("x = {x} outside affine support")));
        }
        Ok(self.base.dlog_pdf(self.pullback(x))? / self.scale)
    }

    pub fn ddlog_pdf(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::Domain(format!("x = {x} outside affine support")));
        }
        Ok(self.base.ddlog_pdf(self.pullback(x))? / (self.scale * self.scale))
    }

    pub fn d3log_pdf(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::Domain(format!("x = {x} outside affine support")));
        }
        Ok(self.base.d3log_pdf(self.pullback(x))? / (self.scale * self.scale * self.scale))
    }

    /// E[log X] when the transform is a pure positive scaling.
    pub fn mean_log(&self) -> Option<f64> {
        if self.shift == 0.0 && self.scale > 0.0 {
            Some(self.scale.ln() + self.base.mean_log())
        } else {
            None
        }
    }
}

/// Reusable sampler for an [`AffineLaw`].
#[derive(Clone, Debug)]
pub struct AffineSampler {
    inner: Sampler,
    scale: f64,
    shift: f64,
}

impl AffineSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.scale * self.inner.sample(rng) + self.shift
    }
}
