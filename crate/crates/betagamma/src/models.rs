//! The four basic beta-gamma stationary models, the (a, b) classification,
//! and the reflection and scaling modifications.
//!
//! Basic models and their weight links:
//!
//! | name         | (R¹, R², Y)                                        | h(y)  |
//! |--------------|----------------------------------------------------|-------|
//! | log-gamma    | Ga⁻¹(μ−λ, β) ⊗ Ga⁻¹(λ, β) ⊗ Ga⁻¹(μ, β)             | y     |
//! | strict-weak  | Ga(μ+λ, β) ⊗ Be⁻¹(λ, μ) ⊗ Ga(μ, β)                 | 1     |
//! | beta         | Be(μ+λ, β) ⊗ Be⁻¹(λ, μ) ⊗ Be(μ, β)                 | 1 − y |
//! | inverse-beta | Be⁻¹(μ−λ, β) ⊗ (Be⁻¹(λ, β+μ−λ) − 1) ⊗ Be⁻¹(μ, β)   | y − 1 |
//!
//! For a general link h(y) = a + b·y with a ∨ b > 0 the stationary triple
//! is an affine modification of one of the four, selected by the sign
//! region of (a, b).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{AffineLaw, AffineSampler, DistributionSpec};
use crate::error::{Error, Result};
use crate::involution::{DomainSpec, LinearH, Sign};

/// One of the four basic models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasicModel {
    LogGamma,
    StrictWeak,
    Beta,
    InverseBeta,
}

impl BasicModel {
    pub const ALL: [BasicModel; 4] = [
        BasicModel::LogGamma,
        BasicModel::StrictWeak,
        BasicModel::Beta,
        BasicModel::InverseBeta,
    ];

    /// The canonical weight link of the model.
    pub fn h(&self) -> LinearH {
        let (a, b) = match self {
            BasicModel::LogGamma => (0.0, 1.0),
            BasicModel::StrictWeak => (1.0, 0.0),
            BasicModel::Beta => (1.0, -1.0),
            BasicModel::InverseBeta => (-1.0, 1.0),
        };
        LinearH::new(a, b).expect("canonical links are valid")
    }

    /// Default (μ, λ, β): (2, 1, 1) where μ > λ is required, (1, 1, 1)
    /// otherwise.
    pub fn default_params(&self) -> (f64, f64, f64) {
        match self {
            BasicModel::LogGamma | BasicModel::InverseBeta => (2.0, 1.0, 1.0),
            BasicModel::StrictWeak | BasicModel::Beta => (1.0, 1.0, 1.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BasicModel::LogGamma => "log-gamma",
            BasicModel::StrictWeak => "strict-weak",
            BasicModel::Beta => "beta",
            BasicModel::InverseBeta => "inverse-beta",
        }
    }
}

impl fmt::Display for BasicModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasicModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-gamma" | "inverse-gamma" => Ok(BasicModel::LogGamma),
            "strict-weak" | "gamma" => Ok(BasicModel::StrictWeak),
            "beta" => Ok(BasicModel::Beta),
            "inverse-beta" => Ok(BasicModel::InverseBeta),
            other => Err(Error::InvalidParameter(format!(
                "unknown model name {other:?} (expected log-gamma, strict-weak, beta, inverse-beta)"
            ))),
        }
    }
}

/// Region tag of the (a, b) classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelClass {
    InverseGamma,
    Gamma,
    Beta,
    BetaReflected,
    InverseBeta,
    InverseBetaReflected,
    Invalid,
}

impl ModelClass {
    pub fn tag(&self) -> &'static str {
        match self {
            ModelClass::InverseGamma => "IG",
            ModelClass::Gamma => "G",
            ModelClass::Beta => "B",
            ModelClass::BetaReflected => "B-reflected",
            ModelClass::InverseBeta => "IB",
            ModelClass::InverseBetaReflected => "IB-reflected",
            ModelClass::Invalid => "invalid",
        }
    }

    /// The basic model this region reduces to.
    pub fn basic(&self) -> Option<BasicModel> {
        match self {
            ModelClass::InverseGamma => Some(BasicModel::LogGamma),
            ModelClass::Gamma => Some(BasicModel::StrictWeak),
            ModelClass::Beta | ModelClass::BetaReflected => Some(BasicModel::Beta),
            ModelClass::InverseBeta | ModelClass::InverseBetaReflected => {
                Some(BasicModel::InverseBeta)
            }
            ModelClass::Invalid => None,
        }
    }
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Which sign region of the (a, b) plane the pair falls in.
pub fn classify(a: f64, b: f64) -> ModelClass {
    if a == 0.0 && b > 0.0 {
        ModelClass::InverseGamma
    } else if a > 0.0 && b == 0.0 {
        ModelClass::Gamma
    } else if a > 0.0 && b < 0.0 {
        ModelClass::Beta
    } else if a < 0.0 && b > 0.0 {
        ModelClass::InverseBeta
    } else if a > 0.0 && b > 0.0 {
        ModelClass::InverseBetaReflected
    } else {
        ModelClass::Invalid
    }
}

/// An (a, b) pair with model parameters (μ, λ, β); induces the weight
/// link h(y) = a + b·y and a stationary triple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub a: f64,
    pub b: f64,
    pub mu: f64,
    pub lambda: f64,
    pub beta: f64,
    /// Selects the D⁻ branch of the beta region (the classification's
    /// "either … or"). Only meaningful when the region is `Beta`.
    #[serde(default)]
    pub reflected: bool,
}

impl ModelSpec {
    pub fn new(a: f64, b: f64, mu: f64, lambda: f64, beta: f64) -> Result<Self> {
        let spec = Self {
            a,
            b,
            mu,
            lambda,
            beta,
            reflected: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// A basic model at its canonical (a, b).
    pub fn basic(model: BasicModel, mu: f64, lambda: f64, beta: f64) -> Result<Self> {
        let h = model.h();
        Self::new(h.a(), h.b(), mu, lambda, beta)
    }

    /// A basic model at its default parameters.
    pub fn preset(model: BasicModel) -> Self {
        let (mu, lambda, beta) = model.default_params();
        Self::basic(model, mu, lambda, beta).expect("presets are valid")
    }

    /// Switch to the D⁻ branch of the beta region.
    pub fn with_reflected(mut self, reflected: bool) -> Result<Self> {
        self.reflected = reflected;
        self.validate()?;
        Ok(self)
    }

    pub fn classify(&self) -> ModelClass {
        let c = classify(self.a, self.b);
        if self.reflected && c == ModelClass::Beta {
            ModelClass::BetaReflected
        } else {
            c
        }
    }

    pub fn h(&self) -> LinearH {
        LinearH::new(self.a, self.b).expect("validated at construction")
    }

    /// D⁺ for the packaged triples, D⁻ on the reflected beta branch.
    pub fn domain(&self) -> DomainSpec {
        let sign = if self.reflected { Sign::Minus } else { Sign::Plus };
        DomainSpec::new(sign, self.a, self.b).expect("validated at construction")
    }

    pub fn validate(&self) -> Result<()> {
        let class = classify(self.a, self.b);
        if class == ModelClass::Invalid {
            return Err(Error::InvalidParameter(format!(
                "(a, b) = ({}, {}) lies in the empty region of the classification",
                self.a, self.b
            )));
        }
        if self.reflected && class != ModelClass::Beta {
            return Err(Error::InvalidParameter(format!(
                "the reflected branch only exists for the beta region, not {}",
                class.tag()
            )));
        }
        for (name, v) in [("mu", self.mu), ("lambda", self.lambda), ("beta", self.beta)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        match class {
            ModelClass::InverseGamma
            | ModelClass::InverseBeta
            | ModelClass::InverseBetaReflected => {
                if !(self.mu > self.lambda) {
                    return Err(Error::InvalidParameter(format!(
                        "this region requires mu > lambda > 0, got mu = {}, lambda = {}",
                        self.mu, self.lambda
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Laws of the stationary triple (R¹, R², Y) as affine wrappers around
/// base family members.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryTriple {
    pub r1: AffineLaw,
    pub r2: AffineLaw,
    pub y: AffineLaw,
}

impl StationaryTriple {
    pub fn sampler(&self) -> TripleSampler {
        TripleSampler {
            r1: self.r1.sampler(),
            r2: self.r2.sampler(),
            y: self.y.sampler(),
        }
    }
}

/// Reusable sampler drawing (r1, r2, y) in that fixed order.
pub struct TripleSampler {
    r1: AffineSampler,
    r2: AffineSampler,
    y: AffineSampler,
}

impl TripleSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64, f64) {
        (
            self.r1.sample(rng),
            self.r2.sample(rng),
            self.y.sample(rng),
        )
    }
}

/// The exact stationary triple of a named basic model.
pub fn basic_triple(model: BasicModel, mu: f64, lambda: f64, beta: f64) -> Result<StationaryTriple> {
    let spec = ModelSpec::basic(model, mu, lambda, beta)?;
    let (m, l, b) = (spec.mu, spec.lambda, spec.beta);
    let (r1, r2, y) = match model {
        BasicModel::LogGamma => (
            DistributionSpec::inverse_gamma(m - l, b)?,
            DistributionSpec::inverse_gamma(l, b)?,
            DistributionSpec::inverse_gamma(m, b)?,
        ),
        BasicModel::StrictWeak => (
            DistributionSpec::gamma(m + l, b)?,
            DistributionSpec::inverse_beta(l, m)?,
            DistributionSpec::gamma(m, b)?,
        ),
        BasicModel::Beta => (
            DistributionSpec::beta(m + l, b)?,
            DistributionSpec::inverse_beta(l, m)?,
            DistributionSpec::beta(m, b)?,
        ),
        BasicModel::InverseBeta => (
            DistributionSpec::inverse_beta(m - l, b)?,
            DistributionSpec::shifted_inverse_beta(l, b + m - l)?,
            DistributionSpec::inverse_beta(m, b)?,
        ),
    };
    Ok(StationaryTriple {
        r1: AffineLaw::plain(r1),
        r2: AffineLaw::plain(r2),
        y: AffineLaw::plain(y),
    })
}

/// Stationary triple for (a, b), inverting the affine relations of the
/// classification. Each region maps an affine image of (R¹, R², Y) onto a
/// basic triple; this constructor solves for the laws of (R¹, R², Y).
pub fn stationary_triple(spec: &ModelSpec) -> Result<StationaryTriple> {
    spec.validate()?;
    let (a, b) = (spec.a, spec.b);
    let class = spec.classify();
    let basic = basic_triple(
        class.basic().expect("validated non-invalid"),
        spec.mu,
        spec.lambda,
        spec.beta,
    )?;
    let triple = match class {
        // (R¹, R²/b, Y) basic.
        ModelClass::InverseGamma => StationaryTriple {
            r1: basic.r1,
            r2: basic.r2.scaled(b)?,
            y: basic.y,
        },
        // (R¹, R²/a, Y) basic.
        ModelClass::Gamma => StationaryTriple {
            r1: basic.r1,
            r2: basic.r2.scaled(a)?,
            y: basic.y,
        },
        // (−b/a·R¹, R²/a, −b/a·Y) basic.
        ModelClass::Beta => StationaryTriple {
            r1: basic.r1.scaled(-a / b)?,
            r2: basic.r2.scaled(a)?,
            y: basic.y.scaled(-a / b)?,
        },
        // (R²/a, −b/a·R¹, 1 + b/a·Y) basic: the D⁻ branch. The law of
        // (a/b)(W − 1) for W ~ Be(μ, β) equals (−a/b)·Be(β, μ) exactly.
        ModelClass::BetaReflected => {
            let y_base = match basic.y.base.family {
                crate::distributions::Family::Beta => DistributionSpec::beta(
                    basic.y.base.shape2,
                    basic.y.base.shape1,
                )?,
                _ => unreachable!("beta region basic triple has a beta Y law"),
            };
            StationaryTriple {
                r1: basic.r2.scaled(-a / b)?,
                r2: basic.r1.scaled(a)?,
                y: AffineLaw::new(y_base, -a / b, 0.0)?,
            }
        }
        // (−b/a·R¹, −R²/a, −b/a·Y) basic.
        ModelClass::InverseBeta => StationaryTriple {
            r1: basic.r1.scaled(-a / b)?,
            r2: basic.r2.scaled(-a)?,
            y: basic.y.scaled(-a / b)?,
        },
        // (R²/a, b/a·R¹, 1 + b/a·Y) basic. The Y law is (a/b)(W − 1) for
        // W ~ Be⁻¹(μ, β), i.e. a scaled shifted reciprocal beta.
        ModelClass::InverseBetaReflected => {
            let y_base =
                DistributionSpec::shifted_inverse_beta(basic.y.base.shape1, basic.y.base.shape2)?;
            StationaryTriple {
                r1: basic.r2.scaled(a / b)?,
                r2: basic.r1.scaled(a)?,
                y: AffineLaw::new(y_base, a / b, 0.0)?,
            }
        }
        ModelClass::Invalid => unreachable!("validated"),
    };

    // Injectivity side condition for the beta region: −b must avoid the
    // ratio set {r2/r1}. The packaged supports keep it on the boundary.
    if class == ModelClass::Beta || class == ModelClass::BetaReflected {
        let (r1_lo, r1_hi) = triple.r1.support();
        let (r2_lo, r2_hi) = triple.r2.support();
        let tol = 1e-9 * b.abs();
        if class == ModelClass::Beta {
            let q_lo = r2_lo / r1_hi;
            assert!(
                q_lo >= -b - tol,
                "ratio set ({q_lo}, ...) must not contain −b = {}",
                -b
            );
        } else {
            let q_hi = r2_hi / r1_lo;
            assert!(
                q_hi <= -b + tol,
                "ratio set (..., {q_hi}) must not contain −b = {}",
                -b
            );
        }
    }

    debug_assert!(triple_in_domain(&triple, &spec.domain()));
    Ok(triple)
}

fn triple_in_domain(triple: &StationaryTriple, dom: &DomainSpec) -> bool {
    let inside = |(lo, hi): (f64, f64), iv: crate::involution::Interval| {
        lo >= iv.lo - 1e-12 * (1.0 + iv.lo.abs()) && (hi <= iv.hi || !iv.hi.is_finite())
    };
    inside(triple.r1.support(), dom.r1_interval())
        && inside(triple.r2.support(), dom.r2_interval())
        && inside(triple.y.support(), dom.y_interval())
}

/// Axis interchange: (R̂¹, R̂², Ŷ) = (R², R¹, h(Y)) with ĥ = h⁻¹.
/// Requires an injective link (b ≠ 0).
pub fn reflect(triple: &StationaryTriple, h: &LinearH) -> Result<(StationaryTriple, LinearH)> {
    let h_inv = h.inverse()?;
    let y_hat = triple.y.affine(h.b(), h.a())?;
    Ok((
        StationaryTriple {
            r1: triple.r2,
            r2: triple.r1,
            y: y_hat,
        },
        h_inv,
    ))
}

/// Axis dilation by (c1, c2): (c1·R¹, c2·R², c1·Y) with
/// ȟ(y) = c2·h(y/c1), i.e. (a, b) ↦ (a·c2, b·c2/c1).
pub fn scale(
    triple: &StationaryTriple,
    h: &LinearH,
    c1: f64,
    c2: f64,
) -> Result<(StationaryTriple, LinearH)> {
    if !(c1 > 0.0) || !(c2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scaling constants must be positive, got ({c1}, {c2})"
        )));
    }
    let h_scaled = LinearH::new(h.a() * c2, h.b() * c2 / c1)?;
    Ok((
        StationaryTriple {
            r1: triple.r1.scaled(c1)?,
            r2: triple.r2.scaled(c2)?,
            y: triple.y.scaled(c1)?,
        },
        h_scaled,
    ))
}

/// The scaling constants that land each region on its canonical (a, b).
pub fn canonical_scaling(a: f64, b: f64) -> Option<(f64, f64)> {
    match classify(a, b) {
        ModelClass::InverseGamma => Some((1.0, 1.0 / b)),
        ModelClass::Gamma => Some((1.0, 1.0 / a)),
        ModelClass::Beta | ModelClass::BetaReflected => Some((-b / a, 1.0 / a)),
        ModelClass::InverseBeta => Some((-b / a, -1.0 / a)),
        ModelClass::InverseBetaReflected => Some((b / a, 1.0 / a)),
        ModelClass::Invalid => None,
    }
}

/// Marginal slot of a triple, for targeted perturbations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TripleSlot {
    R1,
    R2,
    Y,
}

/// Which base shape parameter to perturb.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeParam {
    Shape1,
    Shape2,
}

/// Copy of `triple` with one marginal's base shape parameter moved.
/// `delta` is added when `multiplicative` is false, otherwise the shape is
/// multiplied by it. Used for negative controls: a one-sided perturbation
/// breaks the invariance identities while keeping a valid density.
pub fn perturb_triple(
    triple: &StationaryTriple,
    slot: TripleSlot,
    param: ShapeParam,
    delta: f64,
    multiplicative: bool,
) -> Result<StationaryTriple> {
    let mut out = *triple;
    let law = match slot {
        TripleSlot::R1 => &mut out.r1,
        TripleSlot::R2 => &mut out.r2,
        TripleSlot::Y => &mut out.y,
    };
    let (mut s1, mut s2) = (law.base.shape1, law.base.shape2);
    let target = match param {
        ShapeParam::Shape1 => &mut s1,
        ShapeParam::Shape2 => &mut s2,
    };
    *target = if multiplicative {
        *target * delta
    } else {
        *target + delta
    };
    law.base = DistributionSpec::new(law.base.family, s1, s2)?;
    Ok(out)
}
