//! Speedskating samalogue analytics.
//!
//! Three layers:
//!
//! * [`samalogue`] — exact integer arithmetic for official times, 500-m-scale
//!   point conversion, pointsums, deficits, and required-time-to-tie.
//! * [`tieprob`] / [`estimate`] — the Gaussian closed forms for the
//!   probability that two skaters finish with identical pointsums, and the
//!   per-race standard deviation estimate that feeds them.
//! * [`mcsim`] — a seeded Monte Carlo oracle that simulates paired race
//!   programs, applies official-time discretization, and cross-validates the
//!   closed forms.
//!
//! [`resultsio`] parses official time strings, results CSV files, and
//! scenario configuration files.

pub mod estimate;
pub mod mcsim;
pub mod resultsio;
pub mod samalogue;
pub mod tieprob;

mod erf;

pub use samalogue::{
    CentiTime, Distance, MilliPoints, MilliTime, Precision, Program, RaceResult,
};
pub use tieprob::{Probability, TieScenario};
