//! Per-race standard deviation estimated from observed results.
//!
//! Observations are 500-m-equivalent times in seconds (exact milli-points
//! divided by 1000 once, at this module's boundary). The spread of one
//! skater is the unbiased sample variance (divisor n-1, deviations about
//! that skater's own mean); the pooled sigma is the square root of the
//! unweighted mean of the per-skater variances.

use thiserror::Error;

use crate::samalogue::{self, RaceResult, SamalogueError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("skater {skater:?} has {got} race(s); the variance needs at least 2")]
    TooFewRaces { skater: String, got: usize },
    #[error("no samples to pool")]
    NoSamples,
}

/// One skater's 500-m-equivalent times in seconds, at least two races.
#[derive(Debug, Clone, PartialEq)]
pub struct SkaterSample {
    pub skater: String,
    pub points_per_race: Vec<f64>,
}

impl SkaterSample {
    pub fn new(skater: impl Into<String>, points_per_race: Vec<f64>) -> Result<Self, EstimateError> {
        let skater = skater.into();
        if points_per_race.len() < 2 {
            return Err(EstimateError::TooFewRaces {
                got: points_per_race.len(),
                skater,
            });
        }
        Ok(Self {
            skater,
            points_per_race,
        })
    }
}

/// Unbiased sample variance with divisor n-1, about the sample mean.
pub fn sample_variance(sample: &SkaterSample) -> Result<f64, EstimateError> {
    let obs = &sample.points_per_race;
    if obs.len() < 2 {
        return Err(EstimateError::TooFewRaces {
            skater: sample.skater.clone(),
            got: obs.len(),
        });
    }
    let n = obs.len() as f64;
    let mean = obs.iter().sum::<f64>() / n;
    let ss = obs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    Ok(ss / (n - 1.0))
}

/// Square root of the unweighted mean of the per-skater sample variances.
pub fn pooled_sigma(samples: &[SkaterSample]) -> Result<f64, EstimateError> {
    if samples.is_empty() {
        return Err(EstimateError::NoSamples);
    }
    let mut total = 0.0;
    for sample in samples {
        total += sample_variance(sample)?;
    }
    Ok((total / samples.len() as f64).sqrt())
}

/// Groups race results by skater (first-appearance order) and converts each
/// race to its 500-m-equivalent time in seconds. Skaters with fewer than two
/// races are returned separately so callers can warn about the exclusion.
pub fn samples_from_results(
    results: &[RaceResult],
) -> Result<(Vec<SkaterSample>, Vec<String>), SamalogueError> {
    let mut order: Vec<String> = Vec::new();
    let mut grouped: Vec<Vec<f64>> = Vec::new();
    for result in results {
        let points = samalogue::to_points(result.time, result.distance)?;
        match order.iter().position(|name| *name == result.skater) {
            Some(i) => grouped[i].push(points.value() as f64 / 1000.0),
            None => {
                order.push(result.skater.clone());
                grouped.push(vec![points.value() as f64 / 1000.0]);
            }
        }
    }
    let mut samples = Vec::new();
    let mut excluded = Vec::new();
    for (skater, points_per_race) in order.into_iter().zip(grouped) {
        if points_per_race.len() < 2 {
            excluded.push(skater);
        } else {
            samples.push(SkaterSample {
                skater,
                points_per_race,
            });
        }
    }
    Ok((samples, excluded))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    fn allan() -> SkaterSample {
        SkaterSample::new("Allan", vec![37.49, 36.41, 37.12, 36.175]).unwrap()
    }

    fn odin() -> SkaterSample {
        SkaterSample::new("Odin", vec![36.75, 36.96, 36.95, 36.535]).unwrap()
    }

    #[test]
    fn variance_of_the_eight_races() {
        // hand-computed sums of squared deviations about each mean, / 3
        close(sample_variance(&allan()).unwrap(), 0.3737395833333333, 1e-12);
        close(sample_variance(&odin()).unwrap(), 0.0402729166666667, 1e-12);
    }

    #[test]
    fn variance_of_constant_sample_is_zero() {
        let s = SkaterSample::new("c", vec![36.5, 36.5, 36.5]).unwrap();
        assert_eq!(sample_variance(&s).unwrap(), 0.0);
    }

    #[test]
    fn variance_needs_two_observations() {
        assert!(SkaterSample::new("solo", vec![36.5]).is_err());
    }

    #[test]
    fn pooled_sigma_of_the_paper_races() {
        // sqrt((0.37374 + 0.04027) / 2); the paper quotes 0.460 instead
        let sigma = pooled_sigma(&[allan(), odin()]).unwrap();
        close(sigma, 0.455, 5e-4);
        assert!((sigma - 0.460).abs() <= 0.01);
    }

    #[test]
    fn pooled_sigma_degenerate_cases() {
        let c = SkaterSample::new("c", vec![36.5, 36.5, 36.5]).unwrap();
        assert_eq!(pooled_sigma(&[c.clone()]).unwrap(), 0.0);
        // duplicating a sample does not move the unweighted mean
        let one = pooled_sigma(&[allan()]).unwrap();
        let two = pooled_sigma(&[allan(), allan()]).unwrap();
        close(one, two, 1e-15);
        assert_eq!(pooled_sigma(&[]), Err(EstimateError::NoSamples));
    }

    #[test]
    fn grouping_excludes_single_race_skaters() {
        use crate::samalogue::{Distance, MilliTime};
        let results = vec![
            RaceResult {
                skater: "A".into(),
                distance: Distance::new(500).unwrap(),
                time: MilliTime::new(37_490),
            },
            RaceResult {
                skater: "B".into(),
                distance: Distance::new(500).unwrap(),
                time: MilliTime::new(36_750),
            },
            RaceResult {
                skater: "A".into(),
                distance: Distance::new(1000).unwrap(),
                time: MilliTime::new(72_820),
            },
        ];
        let (samples, excluded) = samples_from_results(&results).unwrap();
        assert_eq!(samples.len(), 1);
        assert_eq!(samples[0].skater, "A");
        assert_eq!(samples[0].points_per_race, vec![37.49, 36.41]);
        assert_eq!(excluded, vec!["B".to_string()]);
    }
}
