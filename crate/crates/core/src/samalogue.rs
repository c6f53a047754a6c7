//! Exact integer arithmetic for samalogue pointsums.
//!
//! All quantities live in milli-units: times in thousandths of a second,
//! points in thousandths of a samalogue point. A 500-m race maps time to
//! points on the identity scale, every other distance divides by
//! `meters / 500`, truncating toward zero at the third decimal. Each
//! distance contribution is truncated before summation; this is the single
//! normative rounding rule of the crate, and it keeps tie detection
//! bit-exact. No floating point anywhere in this module.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SamalogueError {
    #[error("time must be positive")]
    NonpositiveTime,
    #[error("distance must be a positive number of meters, got {0}")]
    NonpositiveDistance(i64),
    #[error("program must contain at least one distance")]
    EmptyProgram,
    #[error("program expects {expected} results, got {got}")]
    ResultCountMismatch { expected: usize, got: usize },
    #[error("result {index} is on {got} m but the program expects {expected} m")]
    DistanceMismatch {
        index: usize,
        expected: u32,
        got: u32,
    },
    #[error(
        "target {target} milli-points is not above the current sum {current}; \
         no positive time can produce the tie"
    )]
    Infeasible { target: u64, current: u64 },
    #[error("no time at the requested precision contributes exactly {needed} milli-points on {meters} m")]
    NoTyingTime { needed: u64, meters: u32 },
}

/// Display/comparison precision for official times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    /// Official ISU timing resolution, hundredths of a second.
    Hundredths,
    /// Computer-clock resolution, thousandths of a second.
    Thousandths,
}

/// A time in hundredths of a second (official timing resolution).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CentiTime(u64);

impl CentiTime {
    pub const fn new(hundredths: u64) -> Self {
        Self(hundredths)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    /// Embeds exactly into milliseconds, no loss.
    pub const fn to_milli(self) -> MilliTime {
        MilliTime(self.0 * 10)
    }
}

/// A time in thousandths of a second (computer-clock resolution).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MilliTime(u64);

impl MilliTime {
    pub const fn new(millis: u64) -> Self {
        Self(millis)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    pub fn seconds(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    /// The centisecond truncation of this time.
    pub const fn truncate_to_centi(self) -> CentiTime {
        CentiTime(self.0 / 10)
    }
}

impl From<CentiTime> for MilliTime {
    fn from(t: CentiTime) -> Self {
        t.to_milli()
    }
}

/// A race distance in meters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Distance(u32);

impl Distance {
    /// Any positive distance is accepted, not just the classic set, so
    /// hypothetical programs can be evaluated.
    pub fn new(meters: u32) -> Result<Self, SamalogueError> {
        if meters == 0 {
            return Err(SamalogueError::NonpositiveDistance(meters as i64));
        }
        Ok(Self(meters))
    }

    pub const fn meters(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} m", self.0)
    }
}

/// Samalogue points in thousandths of a point (ISU three-decimal scale).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MilliPoints(u64);

impl MilliPoints {
    pub const fn new(milli_points: u64) -> Self {
        Self(milli_points)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    /// Points as a real number, for the statistical layer only.
    pub fn points(self) -> f64 {
        self.0 as f64 / 1000.0
    }
}

impl fmt::Display for MilliPoints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:03}", self.0 / 1000, self.0 % 1000)
    }
}

/// One skater-distance-time record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaceResult {
    pub skater: String,
    pub distance: Distance,
    pub time: MilliTime,
}

/// An ordered list of distances, e.g. the sprint combination 500-1000-500-1000.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program(Vec<Distance>);

impl Program {
    pub fn new(distances: Vec<Distance>) -> Result<Self, SamalogueError> {
        if distances.is_empty() {
            return Err(SamalogueError::EmptyProgram);
        }
        Ok(Self(distances))
    }

    /// The four-race sprint program skated over two days.
    pub fn sprint() -> Self {
        let d500 = Distance::new(500).unwrap();
        let d1000 = Distance::new(1000).unwrap();
        Self(vec![d500, d1000, d500, d1000])
    }

    pub fn distances(&self) -> &[Distance] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }
}

/// Converts a race time to samalogue points on the 500-m scale.
///
/// `floor(time_ms * 500 / meters)` in exact integer arithmetic: truncation
/// toward zero at the third decimal of a point. On 500 m this is the
/// identity scale (milliseconds read as milli-points).
pub fn to_points(time: MilliTime, distance: Distance) -> Result<MilliPoints, SamalogueError> {
    if time.value() == 0 {
        return Err(SamalogueError::NonpositiveTime);
    }
    Ok(MilliPoints(time.value() * 500 / distance.meters() as u64))
}

/// Sums the per-distance point contributions for one skater's results,
/// validated against the program's distances in order and count.
pub fn pointsum(results: &[RaceResult], program: &Program) -> Result<MilliPoints, SamalogueError> {
    let distances = program.distances();
    if results.len() != distances.len() {
        return Err(SamalogueError::ResultCountMismatch {
            expected: distances.len(),
            got: results.len(),
        });
    }
    let mut total = 0u64;
    for (index, (result, &expected)) in results.iter().zip(distances).enumerate() {
        if result.distance != expected {
            return Err(SamalogueError::DistanceMismatch {
                index,
                expected: expected.meters(),
                got: result.distance.meters(),
            });
        }
        total += to_points(result.time, result.distance)?.value();
    }
    Ok(MilliPoints(total))
}

/// Signed point difference `a - b` in milli-points. Antisymmetric.
pub fn deficit(a: MilliPoints, b: MilliPoints) -> i64 {
    a.value() as i64 - b.value() as i64
}

/// A signed time margin in milliseconds, with a flag for whether the
/// underlying rational was exactly representable at the millisecond.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeMargin {
    pub millis: i64,
    pub exact: bool,
}

impl TimeMargin {
    pub fn seconds(self) -> f64 {
        self.millis as f64 / 1000.0
    }
}

/// The time margin on `distance` equivalent to a point deficit:
/// `deficit * meters / 500`, truncated toward zero when not divisible.
pub fn margin_time(points_deficit: i64, distance: Distance) -> TimeMargin {
    let numerator = points_deficit * distance.meters() as i64;
    TimeMargin {
        millis: numerator / 500,
        exact: numerator % 500 == 0,
    }
}

/// The largest time on `last_distance`, on the grid of the given precision,
/// whose truncated point contribution equals `target_total - own_current`.
///
/// Skating exactly this time produces pointsum equality. When several grid
/// times truncate to the same contribution the largest (most lenient) one is
/// returned. Errors when the target is not strictly above the current sum,
/// or when no grid time lands on the required contribution (possible for
/// distances under 500 m, where the point grid is coarser than the clock).
pub fn required_time(
    target_total: MilliPoints,
    own_current: MilliPoints,
    last_distance: Distance,
    precision: Precision,
) -> Result<MilliTime, SamalogueError> {
    if target_total <= own_current {
        return Err(SamalogueError::Infeasible {
            target: target_total.value(),
            current: own_current.value(),
        });
    }
    let needed = target_total.value() - own_current.value();
    let meters = last_distance.meters() as u64;
    // points of a grid time t are floor(t * unit / meters); the largest t with
    // that floor equal to `needed` is ceil((needed + 1) * meters / unit) - 1
    let unit = match precision {
        Precision::Hundredths => 5_000, // centiseconds contribute t * 5000 / meters
        Precision::Thousandths => 500,  // milliseconds contribute t * 500 / meters
    };
    let t = ((needed + 1) * meters - 1) / unit;
    if t == 0 || t * unit / meters != needed {
        return Err(SamalogueError::NoTyingTime {
            needed,
            meters: last_distance.meters(),
        });
    }
    Ok(match precision {
        Precision::Hundredths => CentiTime::new(t).to_milli(),
        Precision::Thousandths => MilliTime::new(t),
    })
}

/// Compares two times at official (hundredths) or computer-clock
/// (thousandths) resolution. Hundredths truncates both values first.
pub fn compare_at_precision(a: MilliTime, b: MilliTime, precision: Precision) -> Ordering {
    match precision {
        Precision::Hundredths => a.truncate_to_centi().cmp(&b.truncate_to_centi()),
        Precision::Thousandths => a.cmp(&b),
    }
}
