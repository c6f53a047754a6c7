//! Closed-form tie probabilities for the Gaussian race model.
//!
//! Two skaters with per-race 500-m-equivalent times N(mu1, sigma^2) and
//! N(mu2, sigma^2), independent across the n races of a program, differ in
//! final pointsum by Z ~ N(n*delta, 2n*sigma^2) with delta = mu1 - mu2.
//! The probability that the pointsums land within a window of half-width
//! epsilon is linearized as density-at-the-gap times window width
//! ([`tie_prob_fixed`]), marginalized over delta ~ N(0, tau^2)
//! ([`tie_prob_random_delta`]), or evaluated exactly as a CDF difference
//! ([`tie_prob_exact`]) to validate the linearization.
//!
//! Units: delta, sigma, tau are seconds on the 500-m scale; epsilon is in
//! points. One point equals one second on that scale, so the formulas mix
//! them directly.

use std::f64::consts::{PI, SQRT_2};

use thiserror::Error;

use crate::erf::erfc;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TieProbError {
    #[error("{field} must be {requirement}, got {value}")]
    InvalidField {
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("n_distances must be at least 1")]
    NoDistances,
    #[error("probability is zero: the expected waiting time is infinite")]
    ZeroProbability,
}

/// Mean and spread of one skater's per-race 500-m-equivalent time, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkaterAbility {
    pub mu: f64,
    pub sigma: f64,
}

impl SkaterAbility {
    pub fn new(mu: f64, sigma: f64) -> Result<Self, TieProbError> {
        require_finite("mu", mu, "finite")?;
        require_positive("sigma", sigma)?;
        Ok(Self { mu, sigma })
    }
}

/// Parameter bundle for the tie-probability model.
///
/// `tau = 0` means the ability gap `delta` is treated as fixed.
/// `n_distances = 4` reproduces the sprint-combination constants
/// (Z ~ N(4*delta, 8*sigma^2)); other values generalize to
/// Z ~ N(n*delta, 2n*sigma^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TieScenario {
    pub delta: f64,
    pub sigma: f64,
    pub tau: f64,
    pub epsilon: f64,
    pub n_distances: u32,
}

impl TieScenario {
    pub fn new(
        delta: f64,
        sigma: f64,
        tau: f64,
        epsilon: f64,
        n_distances: u32,
    ) -> Result<Self, TieProbError> {
        require_finite("delta", delta, "finite")?;
        require_positive("sigma", sigma)?;
        require_nonnegative("tau", tau)?;
        require_positive("epsilon", epsilon)?;
        if n_distances == 0 {
            return Err(TieProbError::NoDistances);
        }
        Ok(Self {
            delta,
            sigma,
            tau,
            epsilon,
            n_distances,
        })
    }

    /// Fixed-gap scenario over the four-race sprint combination.
    pub fn fixed(delta: f64, sigma: f64, epsilon: f64) -> Result<Self, TieProbError> {
        Self::new(delta, sigma, 0.0, epsilon, 4)
    }

    /// Two perfectly matched skaters, sigma = 0.5, equality at three
    /// decimals (epsilon = 0.005), four distances.
    pub fn paper_default() -> Self {
        Self {
            delta: 0.0,
            sigma: 0.5,
            tau: 0.0,
            epsilon: 0.005,
            n_distances: 4,
        }
    }

    /// Standard deviation of the pointsum difference, sqrt(2n) * sigma.
    pub fn diff_sd(&self) -> f64 {
        (2.0 * self.n_distances as f64).sqrt() * self.sigma
    }
}

fn require_finite(field: &'static str, value: f64, requirement: &'static str) -> Result<(), TieProbError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(TieProbError::InvalidField {
            field,
            requirement,
            value,
        })
    }
}

fn require_positive(field: &'static str, value: f64) -> Result<(), TieProbError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(TieProbError::InvalidField {
            field,
            requirement: "positive and finite",
            value,
        })
    }
}

fn require_nonnegative(field: &'static str, value: f64) -> Result<(), TieProbError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(TieProbError::InvalidField {
            field,
            requirement: "nonnegative and finite",
            value,
        })
    }
}

/// A probability in [0, 1]. `clamped` is set when a closed form exceeded the
/// unit interval (possible for absurdly wide windows) and was clipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probability {
    value: f64,
    clamped: bool,
}

impl Probability {
    pub fn new(value: f64) -> Result<Self, TieProbError> {
        require_finite("probability", value, "in [0, 1]")?;
        if !(0.0..=1.0).contains(&value) {
            return Err(TieProbError::InvalidField {
                field: "probability",
                requirement: "in [0, 1]",
                value,
            });
        }
        Ok(Self {
            value,
            clamped: false,
        })
    }

    fn clamped_from(raw: f64) -> Self {
        if raw > 1.0 {
            Self {
                value: 1.0,
                clamped: true,
            }
        } else if raw < 0.0 {
            Self {
                value: 0.0,
                clamped: true,
            }
        } else {
            Self {
                value: raw,
                clamped: false,
            }
        }
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn was_clamped(self) -> bool {
        self.clamped
    }

    pub fn per_mille(self) -> f64 {
        self.value * 1000.0
    }
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF via the complementary error function; absolute error
/// well under 1e-10 everywhere and relatively accurate deep into the tails.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Density linearization of the tie probability at a fixed ability gap:
/// `phi(n*delta / sd) * 2*epsilon / sd` with `sd = sqrt(2n) * sigma`.
///
/// For n = 4 this is `(1/sqrt(2*pi)) * exp(-delta^2/sigma^2) *
/// 2*epsilon / (sqrt(8)*sigma)`. Linear in epsilon, symmetric in delta.
/// `tau` is ignored: the result is conditional on the given gap.
pub fn tie_prob_fixed(scenario: &TieScenario) -> Probability {
    let sd = scenario.diff_sd();
    let z = scenario.n_distances as f64 * scenario.delta / sd;
    Probability::clamped_from(normal_pdf(z) * 2.0 * scenario.epsilon / sd)
}

/// Tie probability with the ability gap marginalized over delta ~ N(0, tau^2):
/// the pointsum difference becomes N(0, 2n*sigma^2 + n^2*tau^2), so
///
/// ```text
/// p = (1/sqrt(2*pi)) * (2*epsilon / (sqrt(2n)*sigma))
///       * 1 / sqrt(1 + n*tau^2 / (2*sigma^2))
/// ```
///
/// which for n = 4 is the `1/sqrt(1 + 2*tau^2/sigma^2)` shrinkage factor.
/// Reduces to [`tie_prob_fixed`] at delta = 0 when tau = 0; strictly
/// decreasing in tau.
pub fn tie_prob_random_delta(scenario: &TieScenario) -> Probability {
    let n = scenario.n_distances as f64;
    let total_sd = (2.0 * n * scenario.sigma * scenario.sigma + n * n * scenario.tau * scenario.tau)
        .sqrt();
    Probability::clamped_from(2.0 * scenario.epsilon * normal_pdf(0.0) / total_sd)
}

/// Exact window probability as a CDF difference,
/// `Phi((eps - n*delta)/sd) - Phi((-eps - n*delta)/sd)`.
///
/// Validates the linearization in [`tie_prob_fixed`]: the two agree to
/// relative 1e-4 whenever epsilon <= 0.01 and sigma >= 0.1. `tau` is
/// ignored, as in [`tie_prob_fixed`].
pub fn tie_prob_exact(scenario: &TieScenario) -> Probability {
    let sd = scenario.diff_sd();
    let shift = scenario.n_distances as f64 * scenario.delta;
    let hi = (scenario.epsilon - shift) / sd;
    let lo = (-scenario.epsilon - shift) / sd;
    Probability::clamped_from(normal_cdf(hi) - normal_cdf(lo))
}

/// Expected number of independent competitions before one tie: `1 / p`.
pub fn expected_trials(p: Probability) -> Result<f64, TieProbError> {
    if p.value() == 0.0 {
        return Err(TieProbError::ZeroProbability);
    }
    Ok(1.0 / p.value())
}
