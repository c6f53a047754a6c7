//! Parsing and formatting of official time strings, results CSV files, and
//! scenario configuration files.
//!
//! Time grammar: `ss.cc`, `m:ss.cc`, `mm:ss.cc`, each also with three
//! decimals. Seconds stay below 60; hours are out of scope (the longest
//! skating race is about 14 minutes).
//!
//! Results CSV: header `skater,distance_m,time[,session]`, UTF-8, LF or
//! CRLF. Scenario files: flat `key=value` lines with `#` comments.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use thiserror::Error;

use crate::mcsim::{Discretization, SimConfig, TieRule};
use crate::samalogue::{Distance, MilliTime, Precision, RaceResult};
use crate::tieprob::{TieProbError, TieScenario};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid time {text:?} at byte {position}: {message}")]
pub struct ParseTimeError {
    pub text: String,
    pub position: usize,
    pub message: &'static str,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("time has nonzero thousandths ({0} ms) and cannot be formatted at hundredths")]
pub struct FormatTimeError(pub u64);

#[derive(Debug, Error)]
pub enum ResultsError {
    #[error("cannot read results: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed CSV at line {line}: {source}")]
    Csv { line: u64, source: csv::Error },
    #[error("bad header: expected \"skater,distance_m,time[,session]\", found {found:?}")]
    Header { found: Vec<String> },
    #[error("line {line}, column {column}: {message}")]
    Row {
        line: u64,
        column: &'static str,
        message: String,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("line {line}: expected key=value, got {text:?}")]
    NotKeyValue { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    #[error("key {key:?}: cannot parse value {value:?}")]
    BadValue { key: &'static str, value: String },
    #[error("invalid scenario: {0}")]
    Invalid(#[from] TieProbError),
}

fn digits(text: &str, start: usize, end: usize) -> Result<u64, ParseTimeError> {
    let bytes = text.as_bytes();
    let mut value = 0u64;
    for (offset, &b) in bytes[start..end].iter().enumerate() {
        if !b.is_ascii_digit() {
            return Err(ParseTimeError {
                text: text.to_string(),
                position: start + offset,
                message: "expected a digit",
            });
        }
        value = value * 10 + (b - b'0') as u64;
    }
    Ok(value)
}

fn err(text: &str, position: usize, message: &'static str) -> ParseTimeError {
    ParseTimeError {
        text: text.to_string(),
        position,
        message,
    }
}

/// Parses `"ss.cc"`, `"m:ss.cc"`, `"mm:ss.cc"` (two or three decimals) to an
/// exact millisecond count. Total on arbitrary input: every string either
/// parses or yields a positioned error.
pub fn parse_time(text: &str) -> Result<MilliTime, ParseTimeError> {
    let colon = text.find(':');
    if let Some(first) = colon {
        if let Some(second) = text[first + 1..].find(':') {
            return Err(err(text, first + 1 + second, "at most one colon allowed"));
        }
    }
    let (minutes, seconds_start) = match colon {
        None => (0, 0),
        Some(at) => {
            if !(1..=2).contains(&at) {
                return Err(err(text, 0, "minutes must be 1 or 2 digits"));
            }
            (digits(text, 0, at)?, at + 1)
        }
    };
    let dot = match text[seconds_start..].find('.') {
        Some(offset) => seconds_start + offset,
        None => return Err(err(text, text.len(), "missing decimal point")),
    };
    let seconds_len = dot - seconds_start;
    let valid_seconds_len = if colon.is_some() {
        seconds_len == 2
    } else {
        (1..=2).contains(&seconds_len)
    };
    if !valid_seconds_len {
        return Err(err(
            text,
            seconds_start,
            "seconds must be 2 digits after a colon, 1 or 2 otherwise",
        ));
    }
    let seconds = digits(text, seconds_start, dot)?;
    if seconds >= 60 {
        return Err(err(text, seconds_start, "seconds must be below 60"));
    }
    let frac_start = dot + 1;
    let frac_len = text.len() - frac_start;
    if !(2..=3).contains(&frac_len) {
        return Err(err(text, frac_start, "expected 2 or 3 decimals"));
    }
    let frac = digits(text, frac_start, text.len())?;
    let millis = if frac_len == 2 { frac * 10 } else { frac };
    Ok(MilliTime::new(minutes * 60_000 + seconds * 1_000 + millis))
}

/// Canonical formatting: no minutes field when zero, two-digit seconds when
/// minutes are present. Hundredths precision refuses times that carry a
/// nonzero thousandth digit.
pub fn format_time(t: MilliTime, precision: Precision) -> Result<String, FormatTimeError> {
    let v = t.value();
    let minutes = v / 60_000;
    let seconds = (v % 60_000) / 1_000;
    let millis = v % 1_000;
    let frac = match precision {
        Precision::Hundredths => {
            if millis % 10 != 0 {
                return Err(FormatTimeError(v));
            }
            format!("{:02}", millis / 10)
        }
        Precision::Thousandths => format!("{millis:03}"),
    };
    Ok(if minutes > 0 {
        format!("{minutes}:{seconds:02}.{frac}")
    } else {
        format!("{seconds}.{frac}")
    })
}

const HEADER: [&str; 3] = ["skater", "distance_m", "time"];

/// Reads a results CSV: one [`RaceResult`] per row, order preserved. Skater
/// names are trimmed of surrounding whitespace but otherwise byte-preserved;
/// duplicate names are allowed. An empty file yields an empty list.
pub fn read_results<R: Read>(reader: R) -> Result<Vec<RaceResult>, ResultsError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::None)
        .from_reader(reader);

    let headers: Vec<String> = csv
        .headers()
        .map_err(|source| ResultsError::Csv { line: 1, source })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.iter().all(|h| h.is_empty()) {
        return Ok(Vec::new()); // empty input
    }
    let with_session = headers.len() == 4 && headers[3] == "session";
    if !(headers.len() == 3 || with_session) || headers[..3] != HEADER {
        return Err(ResultsError::Header { found: headers });
    }

    let mut results = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|source| {
            let line = source
                .position()
                .map(|p| p.line())
                .unwrap_or(0);
            ResultsError::Csv { line, source }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != headers.len() {
            return Err(ResultsError::Row {
                line,
                column: "row",
                message: format!("expected {} fields, got {}", headers.len(), record.len()),
            });
        }
        let skater = record[0].trim().to_string();
        if skater.is_empty() {
            return Err(ResultsError::Row {
                line,
                column: "skater",
                message: "empty skater name".to_string(),
            });
        }
        let meters: u32 = record[1].trim().parse().map_err(|e| ResultsError::Row {
            line,
            column: "distance_m",
            message: format!("{e}"),
        })?;
        let distance = Distance::new(meters).map_err(|e| ResultsError::Row {
            line,
            column: "distance_m",
            message: e.to_string(),
        })?;
        let time = parse_time(record[2].trim()).map_err(|e| ResultsError::Row {
            line,
            column: "time",
            message: e.to_string(),
        })?;
        results.push(RaceResult {
            skater,
            distance,
            time,
        });
    }
    Ok(results)
}

pub fn read_results_path(path: &Path) -> Result<Vec<RaceResult>, ResultsError> {
    read_results(File::open(path)?)
}

/// A parsed scenario file: the closed-form scenario plus the simulation
/// knobs. Missing keys take the documented defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: TieScenario,
    pub n_trials: u64,
    pub seed: u64,
    pub discretization: Discretization,
    pub tie_rule: TieRule,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: TieScenario::paper_default(),
            n_trials: 1_000_000,
            seed: 42,
            discretization: Discretization::TruncateToHundredths,
            tie_rule: TieRule::Window,
        }
    }
}

impl ScenarioConfig {
    /// Applies this configuration to a [`SimConfig`] over the sprint program.
    pub fn to_sim_config(&self) -> SimConfig {
        let mut config = SimConfig::new(self.scenario);
        config.n_trials = self.n_trials;
        config.seed = self.seed;
        config.discretization = self.discretization;
        config.tie_rule = self.tie_rule;
        config
    }
}

fn parse_value<T: std::str::FromStr>(key: &'static str, value: &str) -> Result<T, ScenarioError> {
    value.parse().map_err(|_| ScenarioError::BadValue {
        key,
        value: value.to_string(),
    })
}

/// Reads a flat `key=value` scenario file. Recognized keys: `delta`,
/// `sigma`, `tau`, `epsilon`, `n_distances`, `n_trials`, `seed`,
/// `discretization` (`none` | `truncate_to_hundredths` |
/// `round_to_hundredths`), `tie_rule` (`window` | `exact_pointsum_equality`).
/// Unknown keys are rejected.
pub fn read_scenario<R: Read>(reader: R) -> Result<ScenarioConfig, ScenarioError> {
    let defaults = ScenarioConfig::default();
    let base = TieScenario::paper_default();
    let (mut delta, mut sigma, mut tau, mut epsilon) = (base.delta, base.sigma, base.tau, base.epsilon);
    let mut n_distances = base.n_distances;
    let mut n_trials = defaults.n_trials;
    let mut seed = defaults.seed;
    let mut discretization = defaults.discretization;
    let mut tie_rule = defaults.tie_rule;

    let mut seen: Vec<String> = Vec::new();
    let buffered = BufReader::new(reader);
    for (index, line) in buffered.lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|_| ScenarioError::NotKeyValue {
            line: line_no,
            text: "<unreadable line>".to_string(),
        })?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ScenarioError::NotKeyValue {
                line: line_no,
                text: content.to_string(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if seen.iter().any(|k| k == key) {
            return Err(ScenarioError::DuplicateKey {
                line: line_no,
                key: key.to_string(),
            });
        }
        seen.push(key.to_string());
        match key {
            "delta" => delta = parse_value("delta", value)?,
            "sigma" => sigma = parse_value("sigma", value)?,
            "tau" => tau = parse_value("tau", value)?,
            "epsilon" => epsilon = parse_value("epsilon", value)?,
            "n_distances" => n_distances = parse_value("n_distances", value)?,
            "n_trials" => n_trials = parse_value("n_trials", value)?,
            "seed" => seed = parse_value("seed", value)?,
            "discretization" => {
                discretization = match value {
                    "none" => Discretization::None,
                    "truncate_to_hundredths" => Discretization::TruncateToHundredths,
                    "round_to_hundredths" => Discretization::RoundToHundredths,
                    _ => {
                        return Err(ScenarioError::BadValue {
                            key: "discretization",
                            value: value.to_string(),
                        })
                    }
                }
            }
            "tie_rule" => {
                tie_rule = match value {
                    "window" => TieRule::Window,
                    "exact_pointsum_equality" => TieRule::ExactPointsumEquality,
                    _ => {
                        return Err(ScenarioError::BadValue {
                            key: "tie_rule",
                            value: value.to_string(),
                        })
                    }
                }
            }
            _ => {
                return Err(ScenarioError::UnknownKey {
                    line: line_no,
                    key: key.to_string(),
                })
            }
        }
    }

    Ok(ScenarioConfig {
        scenario: TieScenario::new(delta, sigma, tau, epsilon, n_distances)?,
        n_trials,
        seed,
        discretization,
        tie_rule,
    })
}

pub fn read_scenario_path(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let file = File::open(path).map_err(|e| ScenarioError::BadValue {
        key: "path",
        value: e.to_string(),
    })?;
    read_scenario(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_time_paper_values() {
        assert_eq!(parse_time("1:12.82").unwrap().value(), 72_820);
        assert_eq!(parse_time("1:45.006").unwrap().value(), 105_006);
        assert_eq!(parse_time("7:21.33").unwrap().value(), 441_330);
        assert_eq!(parse_time("37.49").unwrap().value(), 37_490);
        assert_eq!(parse_time("41:57.63").unwrap().value(), 2_517_630);
        assert_eq!(parse_time("35.94").unwrap().value(), 35_940);
        assert_eq!(parse_time("0.00").unwrap().value(), 0);
    }

    #[test]
    fn parse_time_rejects_malformed_input() {
        assert!(parse_time("1:60.00").is_err());
        assert!(parse_time("60.00").is_err());
        assert!(parse_time("1:12.8").is_err());
        assert!(parse_time("1:12.8200").is_err());
        assert!(parse_time("1:2.82").is_err());
        assert!(parse_time("").is_err());
        assert!(parse_time("1:12:82.00").is_err());
        assert!(parse_time("-1.00").is_err());
        assert!(parse_time("1.0e2").is_err());
        assert!(parse_time("abc").is_err());

        let e = parse_time("1:6x.00").unwrap_err();
        assert_eq!(e.position, 3);
    }

    #[test]
    fn format_time_canonical() {
        assert_eq!(
            format_time(MilliTime::new(72_820), Precision::Hundredths).unwrap(),
            "1:12.82"
        );
        assert_eq!(
            format_time(MilliTime::new(105_006), Precision::Thousandths).unwrap(),
            "1:45.006"
        );
        assert_eq!(
            format_time(MilliTime::new(0), Precision::Hundredths).unwrap(),
            "0.00"
        );
        assert_eq!(
            format_time(MilliTime::new(2_517_630), Precision::Hundredths).unwrap(),
            "41:57.63"
        );
        assert!(format_time(MilliTime::new(105_006), Precision::Hundredths).is_err());
    }

    #[test]
    fn read_results_berlin_fixture() {
        let csv = "skater,distance_m,time\n\
                   An Liu,500,35.94\n\
                   An Liu,500,35.95\n\
                   Tao Yang,500,35.96\n\
                   Xuefeng Sun,500,35.96\n";
        let rows = read_results(csv.as_bytes()).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].skater, "An Liu");
        assert_eq!(rows[1].skater, "An Liu");
        assert_eq!(rows[0].time.value(), 35_940);
        assert_eq!(rows[2].time, rows[3].time);
    }

    #[test]
    fn read_results_with_session_column_and_crlf() {
        let csv = "skater,distance_m,time,session\r\n Allan ,500,37.49,day1\r\n";
        let rows = read_results(csv.as_bytes()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].skater, "Allan"); // trimmed
    }

    #[test]
    fn read_results_edge_cases() {
        assert_eq!(read_results("skater,distance_m,time\n".as_bytes()).unwrap(), vec![]);
        assert_eq!(read_results("".as_bytes()).unwrap(), vec![]);

        let bad_header = read_results("name,distance,time\n".as_bytes());
        assert!(matches!(bad_header, Err(ResultsError::Header { .. })));

        let bad_time = read_results("skater,distance_m,time\nA,500,1:60.00\n".as_bytes());
        match bad_time {
            Err(ResultsError::Row { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, "time");
            }
            other => panic!("expected row error, got {other:?}"),
        }

        let bad_distance = read_results("skater,distance_m,time\nA,0,37.49\n".as_bytes());
        assert!(matches!(
            bad_distance,
            Err(ResultsError::Row {
                column: "distance_m",
                ..
            })
        ));
    }

    #[test]
    fn scenario_defaults_and_overrides() {
        let c = read_scenario("sigma=0.5\nepsilon=0.005\n".as_bytes()).unwrap();
        assert_eq!(c.scenario.delta, 0.0);
        assert_eq!(c.scenario.tau, 0.0);
        assert_eq!(c.scenario.n_distances, 4);
        assert_eq!(c.discretization, Discretization::TruncateToHundredths);

        let c = read_scenario(
            "# the 2.30 per mille case\nsigma = 0.5\ntau = 0.25\nepsilon = 0.005\n".as_bytes(),
        )
        .unwrap();
        assert_eq!(c.scenario.tau, 0.25);

        let c = read_scenario(
            "tie_rule=exact_pointsum_equality\ndiscretization=round_to_hundredths\nseed=7\nn_trials=100\n"
                .as_bytes(),
        )
        .unwrap();
        assert_eq!(c.tie_rule, TieRule::ExactPointsumEquality);
        assert_eq!(c.discretization, Discretization::RoundToHundredths);
        assert_eq!(c.seed, 7);
        assert_eq!(c.n_trials, 100);
    }

    #[test]
    fn scenario_rejects_bad_input() {
        match read_scenario("sigma=-1\n".as_bytes()) {
            Err(ScenarioError::Invalid(TieProbError::InvalidField { field, .. })) => {
                assert_eq!(field, "sigma")
            }
            other => panic!("expected sigma validation error, got {other:?}"),
        }
        assert!(matches!(
            read_scenario("gamma=1\n".as_bytes()),
            Err(ScenarioError::UnknownKey { .. })
        ));
        assert!(matches!(
            read_scenario("sigma=0.5\nsigma=0.6\n".as_bytes()),
            Err(ScenarioError::DuplicateKey { line: 2, .. })
        ));
        assert!(matches!(
            read_scenario("sigma\n".as_bytes()),
            Err(ScenarioError::NotKeyValue { line: 1, .. })
        ));
        assert!(matches!(
            read_scenario("epsilon=five\n".as_bytes()),
            Err(ScenarioError::BadValue { key: "epsilon", .. })
        ));
    }
}
