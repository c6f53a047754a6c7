//! Seeded Monte Carlo oracle for the tie probabilities.
//!
//! Each trial draws one 500-m-equivalent time per program distance per
//! skater, maps it back to the raw distance time (x meters/500), applies the
//! official-clock discretization there, and computes exact pointsums through
//! [`crate::samalogue`]. The sampling happens on the 500-m scale because
//! that is where the model lives; the rounding happens on the raw time
//! because that is where real clocks operate — the only order in which
//! epsilon = 0.005 keeps its meaning.
//!
//! Reproducibility contract: trials are partitioned into fixed-size batches
//! and each batch gets its own ChaCha8 stream (`set_stream(batch_index)`
//! on a generator seeded from the config seed). Batch boundaries depend only
//! on the trial index, so parallel execution is bit-identical to serial.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::samalogue::{self, CentiTime, MilliPoints, Program};
use crate::tieprob::TieScenario;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("n_trials must be positive")]
    NoTrials,
    #[error("the exact-pointsum tie rule needs an official-time discretization")]
    ExactRuleNeedsDiscretization,
    #[error("baseline mean must be positive and finite, got {0}")]
    InvalidBaseline(f64),
    #[error("tau is zero; use run() for a fixed ability gap")]
    ZeroTau,
}

/// How raw clock readings are reduced to official hundredths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discretization {
    /// Keep the continuous time (no official clock).
    None,
    /// Truncate to hundredths, as timing systems do. The default.
    TruncateToHundredths,
    /// Round to nearest hundredth, for sensitivity analysis.
    RoundToHundredths,
}

/// What counts as a tie.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieRule {
    /// |X - Y| < epsilon on the pointsums as the configured clock produces
    /// them: continuous when discretization is off, discretized otherwise.
    /// On the discretized sprint lattice (0.005-point steps) the epsilon =
    /// 0.005 window admits only exact equality, about half the continuous
    /// window's mass.
    Window,
    /// Exact equality of the discretized integer pointsums.
    ExactPointsumEquality,
}

/// Full simulation configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scenario: TieScenario,
    pub program: Program,
    pub n_trials: u64,
    pub seed: u64,
    /// Mean 500-m-equivalent time of the slower skater, in seconds.
    /// Irrelevant to the continuous model (the difference distribution
    /// depends only on delta) but marginally relevant under discretization.
    pub baseline: f64,
    pub discretization: Discretization,
    pub tie_rule: TieRule,
}

impl SimConfig {
    /// Scenario plus sprint program, 10^7 trials, seed 42, official
    /// truncation, window tie rule.
    pub fn new(scenario: TieScenario) -> Self {
        Self {
            scenario,
            program: Program::sprint(),
            n_trials: 10_000_000,
            seed: 42,
            baseline: 37.0,
            discretization: Discretization::TruncateToHundredths,
            tie_rule: TieRule::Window,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.n_trials == 0 {
            return Err(SimError::NoTrials);
        }
        if self.tie_rule == TieRule::ExactPointsumEquality
            && self.discretization == Discretization::None
        {
            return Err(SimError::ExactRuleNeedsDiscretization);
        }
        if !(self.baseline.is_finite() && self.baseline > 0.0) {
            return Err(SimError::InvalidBaseline(self.baseline));
        }
        Ok(())
    }
}

/// Estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub ties: u64,
    pub n_trials: u64,
    pub p_hat: f64,
    pub std_error: f64,
    pub seed: u64,
}

impl SimResult {
    fn from_counts(ties: u64, n_trials: u64, seed: u64) -> Self {
        let p_hat = ties as f64 / n_trials as f64;
        Self {
            ties,
            n_trials,
            p_hat,
            std_error: (p_hat * (1.0 - p_hat) / n_trials as f64).sqrt(),
            seed,
        }
    }
}

/// One simulated pair of final pointsums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPointsums {
    /// Continuous pointsums in points (sums of the drawn 500-m equivalents).
    pub continuous: (f64, f64),
    /// Exact integer pointsums after official discretization; `None` when
    /// the discretization is [`Discretization::None`].
    pub official: Option<(MilliPoints, MilliPoints)>,
}

/// The per-batch random stream: ChaCha8 keyed by the seed, one counter
/// stream per batch index.
pub fn stream(seed: u64, stream_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_index);
    rng
}

/// A normal deviate by inverse transform: one 64-bit word per draw, mapped
/// to a uniform strictly inside (0, 1) and through the normal quantile.
/// Deterministic word consumption keeps substreams reproducible.
pub fn sample_normal<R: RngCore>(rng: &mut R, mu: f64, sigma: f64) -> f64 {
    let u = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
    mu + sigma * normal_quantile(u)
}

/// Acklam's rational approximation to the standard normal quantile,
/// relative error below 1.2e-9 over (0, 1). Plenty for Monte Carlo draws.
fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

fn discretize_to_centi(raw_seconds: f64, mode: Discretization) -> CentiTime {
    let cs = match mode {
        Discretization::None => unreachable!("no discretization requested"),
        Discretization::TruncateToHundredths => (raw_seconds * 100.0).floor(),
        Discretization::RoundToHundredths => (raw_seconds * 100.0).round(),
    };
    // a nonpositive clock reading is a ~70-sigma event; clamp so the exact
    // pointsum arithmetic keeps its time > 0 invariant
    CentiTime::new(cs.max(1.0) as u64)
}

/// Draws one full program for both skaters. Skater one has mean
/// `baseline + delta`, skater two `baseline`, both with the scenario sigma,
/// per 500-m-equivalent race time.
pub fn simulate_pair<R: RngCore>(
    rng: &mut R,
    scenario: &TieScenario,
    program: &Program,
    baseline: f64,
    discretization: Discretization,
) -> PairPointsums {
    let mu1 = baseline + scenario.delta;
    let mu2 = baseline;
    let mut cont = (0.0f64, 0.0f64);
    let mut official = (0u64, 0u64);
    for &distance in program.distances() {
        let scale = distance.meters() as f64 / 500.0;
        let x = sample_normal(rng, mu1, scenario.sigma);
        let y = sample_normal(rng, mu2, scenario.sigma);
        cont.0 += x;
        cont.1 += y;
        if discretization != Discretization::None {
            let tx = discretize_to_centi(x * scale, discretization).to_milli();
            let ty = discretize_to_centi(y * scale, discretization).to_milli();
            official.0 += samalogue::to_points(tx, distance).unwrap().value();
            official.1 += samalogue::to_points(ty, distance).unwrap().value();
        }
    }
    PairPointsums {
        continuous: cont,
        official: (discretization != Discretization::None)
            .then(|| (MilliPoints::new(official.0), MilliPoints::new(official.1))),
    }
}

fn is_tie(pair: &PairPointsums, tie_rule: TieRule, epsilon: f64) -> bool {
    match tie_rule {
        TieRule::Window => match pair.official {
            // integer milli-point differences are exact in f64
            Some((x, y)) => (x.value() as f64 - y.value() as f64).abs() < epsilon * 1000.0,
            None => (pair.continuous.0 - pair.continuous.1).abs() < epsilon,
        },
        TieRule::ExactPointsumEquality => {
            let (x, y) = pair.official.expect("validated: discretization present");
            x == y
        }
    }
}

const BATCH: u64 = 4096;

fn run_batches<F>(config: &SimConfig, per_trial: F) -> SimResult
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let n = config.n_trials;
    let n_batches = n.div_ceil(BATCH);
    let ties = (0..n_batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = stream(config.seed, batch);
            let trials = BATCH.min(n - batch * BATCH);
            let mut count = 0u64;
            for _ in 0..trials {
                if per_trial(&mut rng) {
                    count += 1;
                }
            }
            count
        })
        .sum();
    SimResult::from_counts(ties, n, config.seed)
}

/// Runs the simulation at the scenario's fixed ability gap.
pub fn run(config: &SimConfig) -> Result<SimResult, SimError> {
    config.validate()?;
    Ok(run_batches(config, |rng| {
        let pair = simulate_pair(
            rng,
            &config.scenario,
            &config.program,
            config.baseline,
            config.discretization,
        );
        is_tie(&pair, config.tie_rule, config.scenario.epsilon)
    }))
}

/// Runs the simulation drawing a fresh gap delta ~ N(0, tau^2) per trial;
/// the estimate targets [`crate::tieprob::tie_prob_random_delta`].
pub fn run_random_delta(config: &SimConfig) -> Result<SimResult, SimError> {
    config.validate()?;
    if config.scenario.tau == 0.0 {
        return Err(SimError::ZeroTau);
    }
    Ok(run_batches(config, |rng| {
        let delta = sample_normal(rng, 0.0, config.scenario.tau);
        let scenario = TieScenario {
            delta,
            ..config.scenario
        };
        let pair = simulate_pair(
            rng,
            &scenario,
            &config.program,
            config.baseline,
            config.discretization,
        );
        is_tie(&pair, config.tie_rule, config.scenario.epsilon)
    }))
}
