//! `samalog` — samalogue pointsums, tie probabilities, and the Monte Carlo
//! cross-check, as subcommands with human-readable and CSV output.
//!
//! Exit codes: 0 success, 1 computation-domain error (bad data, mismatched
//! programs), 2 usage or validation error (bad flags, infeasible parameters).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use samalog::estimate;
use samalog::mcsim::{self, Discretization, SimConfig, SimResult, TieRule};
use samalog::resultsio::{self, ScenarioConfig};
use samalog::samalogue::{self, Distance, MilliPoints, Precision, Program, RaceResult};
use samalog::tieprob::{self, Probability, TieScenario};

#[derive(Parser)]
#[command(
    name = "samalog",
    about = "Speedskating samalogue pointsums and tie probabilities",
    version
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Human)]
    output: OutputMode,

    /// Random seed (overrides the scenario file)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Scenario file with key=value defaults for tie-prob, simulate, table
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Human,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DiscretizationArg {
    None,
    Truncate,
    Round,
}

impl From<DiscretizationArg> for Discretization {
    fn from(d: DiscretizationArg) -> Self {
        match d {
            DiscretizationArg::None => Discretization::None,
            DiscretizationArg::Truncate => Discretization::TruncateToHundredths,
            DiscretizationArg::Round => Discretization::RoundToHundredths,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TieRuleArg {
    Window,
    Exact,
}

impl From<TieRuleArg> for TieRule {
    fn from(t: TieRuleArg) -> Self {
        match t {
            TieRuleArg::Window => TieRule::Window,
            TieRuleArg::Exact => TieRule::ExactPointsumEquality,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Pointsum standings from a results CSV
    Points {
        /// Results CSV with header skater,distance_m,time[,session]
        #[arg(long, value_name = "FILE")]
        results: PathBuf,
        /// Comma-separated program distances in meters
        #[arg(long, default_value = "500,1000,500,1000")]
        program: String,
    },
    /// The most lenient official time that exactly ties a target pointsum
    RequiredTime {
        /// Target total pointsum, e.g. 147.195
        #[arg(long)]
        target: String,
        /// Own pointsum before the last distance, e.g. 110.660
        #[arg(long)]
        current: String,
        /// Last distance in meters
        #[arg(long)]
        distance: u32,
    },
    /// Closed-form tie probabilities
    TieProb {
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        n_distances: Option<u32>,
    },
    /// Per-race standard deviation estimated from a results CSV
    EstimateSigma {
        #[arg(long, value_name = "FILE")]
        results: PathBuf,
    },
    /// Monte Carlo estimate cross-checked against the closed form
    Simulate {
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        n_distances: Option<u32>,
        #[arg(long)]
        n_trials: Option<u64>,
        /// Mean 500-m-equivalent time of the slower skater, seconds
        #[arg(long)]
        baseline: Option<f64>,
        #[arg(long, value_enum)]
        discretization: Option<DiscretizationArg>,
        #[arg(long, value_enum)]
        tie_rule: Option<TieRuleArg>,
    },
    /// CSV grid of closed-form probabilities over sigma x tau x epsilon
    Table {
        /// Comma-separated sigma values
        #[arg(long, default_value = "0.5")]
        sigmas: String,
        /// Comma-separated tau values
        #[arg(long, default_value = "0")]
        taus: String,
        /// Comma-separated epsilon values
        #[arg(long, default_value = "0.005")]
        epsilons: String,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value_t = 4)]
        n_distances: u32,
    },
}

enum CmdError {
    /// Bad data or an impossible computation: exit 1.
    Domain(String),
    /// Bad flags or an invalid/infeasible parameter set: exit 2.
    Usage(String),
}

impl CmdError {
    fn domain(e: impl std::fmt::Display) -> Self {
        Self::Domain(e.to_string())
    }

    fn usage(e: impl std::fmt::Display) -> Self {
        Self::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Domain(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CmdError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CmdError> {
    let base = match &cli.config {
        Some(path) => resultsio::read_scenario_path(path).map_err(CmdError::usage)?,
        None => ScenarioConfig::default(),
    };
    match &cli.command {
        Command::Points { results, program } => cmd_points(cli, results, program),
        Command::RequiredTime {
            target,
            current,
            distance,
        } => cmd_required_time(target, current, *distance),
        Command::TieProb {
            delta,
            sigma,
            tau,
            epsilon,
            n_distances,
        } => {
            let scenario = override_scenario(
                base.scenario,
                *delta,
                *sigma,
                *tau,
                *epsilon,
                *n_distances,
            )?;
            cmd_tie_prob(cli, &scenario)
        }
        Command::EstimateSigma { results } => cmd_estimate_sigma(cli, results),
        Command::Simulate {
            delta,
            sigma,
            tau,
            epsilon,
            n_distances,
            n_trials,
            baseline,
            discretization,
            tie_rule,
        } => {
            let scenario = override_scenario(
                base.scenario,
                *delta,
                *sigma,
                *tau,
                *epsilon,
                *n_distances,
            )?;
            let mut config = SimConfig::new(scenario);
            config.n_trials = n_trials.unwrap_or(base.n_trials);
            config.seed = cli.seed.unwrap_or(base.seed);
            config.discretization = discretization
                .map(Into::into)
                .unwrap_or(base.discretization);
            config.tie_rule = tie_rule.map(Into::into).unwrap_or(base.tie_rule);
            if let Some(b) = baseline {
                config.baseline = *b;
            }
            cmd_simulate(cli, &config)
        }
        Command::Table {
            sigmas,
            taus,
            epsilons,
            delta,
            n_distances,
        } => cmd_table(cli, sigmas, taus, epsilons, *delta, *n_distances),
    }
}

fn override_scenario(
    base: TieScenario,
    delta: Option<f64>,
    sigma: Option<f64>,
    tau: Option<f64>,
    epsilon: Option<f64>,
    n_distances: Option<u32>,
) -> Result<TieScenario, CmdError> {
    TieScenario::new(
        delta.unwrap_or(base.delta),
        sigma.unwrap_or(base.sigma),
        tau.unwrap_or(base.tau),
        epsilon.unwrap_or(base.epsilon),
        n_distances.unwrap_or(base.n_distances),
    )
    .map_err(CmdError::usage)
}

/// Parses a pointsum written with up to three decimals ("147.195") into
/// exact milli-points.
fn parse_points(text: &str) -> Result<MilliPoints, CmdError> {
    let bad = || CmdError::usage(format!("invalid pointsum {text:?}: expected e.g. 147.195"));
    let (whole, frac) = match text.split_once('.') {
        Some((w, f)) => (w, f),
        None => (text, ""),
    };
    if whole.is_empty()
        || !whole.bytes().all(|b| b.is_ascii_digit())
        || frac.len() > 3
        || !frac.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let whole: u64 = whole.parse().map_err(|_| bad())?;
    let mut milli = 0u64;
    for (i, b) in frac.bytes().enumerate() {
        milli += (b - b'0') as u64 * 10u64.pow(2 - i as u32);
    }
    Ok(MilliPoints::new(whole * 1000 + milli))
}

fn parse_program(text: &str) -> Result<Program, CmdError> {
    let mut distances = Vec::new();
    for part in text.split(',') {
        let meters: u32 = part
            .trim()
            .parse()
            .map_err(|_| CmdError::usage(format!("invalid distance {part:?} in program")))?;
        distances.push(Distance::new(meters).map_err(CmdError::usage)?);
    }
    Program::new(distances).map_err(CmdError::usage)
}

fn format_probability(p: Probability) -> String {
    format!("{:.6}", p.value())
}

fn emit(cli: &Cli, human: String, csv: String) {
    match cli.output {
        OutputMode::Human => print!("{human}"),
        OutputMode::Csv => print!("{csv}"),
    }
}

fn cmd_points(cli: &Cli, results: &PathBuf, program: &str) -> Result<(), CmdError> {
    let program = parse_program(program)?;
    let rows = resultsio::read_results_path(results).map_err(CmdError::domain)?;
    let skaters = group_by_skater(&rows);
    if skaters.is_empty() {
        return Err(CmdError::domain("no results in file"));
    }

    let mut standings: Vec<(String, MilliPoints)> = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    for (skater, results) in &skaters {
        match samalogue::pointsum(results, &program) {
            Ok(points) => standings.push((skater.clone(), points)),
            Err(e) => failures.push(format!("{skater}: {e}")),
        }
    }
    if !failures.is_empty() {
        return Err(CmdError::Domain(failures.join("\n")));
    }

    // competition ranking: ties share the better rank, the next rank skips
    standings.sort_by(|a, b| a.1.cmp(&b.1));
    let ranked: Vec<(usize, &String, MilliPoints)> = standings
        .iter()
        .map(|(skater, points)| {
            let rank = 1 + standings.iter().filter(|(_, p)| p < points).count();
            (rank, skater, *points)
        })
        .collect();

    let mut human = String::new();
    let mut csv = String::from("rank,skater,points\n");
    let _ = writeln!(human, "{:>4}  {:<24} {:>10}", "rank", "skater", "points");
    for (rank, skater, points) in &ranked {
        let _ = writeln!(human, "{rank:>4}  {skater:<24} {points:>10}");
        let _ = writeln!(csv, "{rank},{skater},{points}");
    }
    emit(cli, human, csv);
    Ok(())
}

fn group_by_skater(rows: &[RaceResult]) -> Vec<(String, Vec<RaceResult>)> {
    let mut grouped: Vec<(String, Vec<RaceResult>)> = Vec::new();
    for row in rows {
        match grouped.iter_mut().find(|(name, _)| *name == row.skater) {
            Some((_, list)) => list.push(row.clone()),
            None => grouped.push((row.skater.clone(), vec![row.clone()])),
        }
    }
    grouped
}

fn cmd_required_time(target: &str, current: &str, distance: u32) -> Result<(), CmdError> {
    let target = parse_points(target)?;
    let current = parse_points(current)?;
    let distance = Distance::new(distance).map_err(CmdError::usage)?;
    let time = samalogue::required_time(target, current, distance, Precision::Hundredths)
        .map_err(CmdError::usage)?;
    let formatted = resultsio::format_time(time, Precision::Hundredths)
        .expect("required_time at hundredths sits on the centisecond grid");
    println!("{formatted}");
    Ok(())
}

fn cmd_tie_prob(cli: &Cli, scenario: &TieScenario) -> Result<(), CmdError> {
    let fixed = tieprob::tie_prob_fixed(scenario);
    let exact = tieprob::tie_prob_exact(scenario);
    let random = (scenario.tau > 0.0).then(|| tieprob::tie_prob_random_delta(scenario));

    let mut rows: Vec<(&str, Probability)> = vec![("fixed", fixed), ("exact_cdf", exact)];
    if let Some(r) = random {
        rows.push(("random_delta", r));
    }

    let mut human = String::new();
    let _ = writeln!(
        human,
        "scenario: delta={} sigma={} tau={} epsilon={} n_distances={}",
        scenario.delta, scenario.sigma, scenario.tau, scenario.epsilon, scenario.n_distances
    );
    let mut csv = String::from("quantity,probability,per_mille,one_in\n");
    for (name, p) in &rows {
        let one_in = tieprob::expected_trials(*p)
            .map(|t| format!("{t:.1}"))
            .unwrap_or_else(|_| "inf".to_string());
        let label = match *name {
            "fixed" => "fixed-delta tie probability",
            "exact_cdf" => "exact CDF tie probability",
            _ => "random-delta tie probability",
        };
        let _ = writeln!(
            human,
            "{label}: {} ({:.3} per mille, 1 in \u{2248}{one_in})",
            format_probability(*p),
            p.per_mille()
        );
        let _ = writeln!(
            csv,
            "{name},{},{:.3},{one_in}",
            format_probability(*p),
            p.per_mille()
        );
        if p.was_clamped() {
            eprintln!("warning: {name} probability exceeded 1 and was clamped");
        }
    }
    emit(cli, human, csv);
    Ok(())
}

fn cmd_estimate_sigma(cli: &Cli, results: &PathBuf) -> Result<(), CmdError> {
    let rows = resultsio::read_results_path(results).map_err(CmdError::domain)?;
    let (samples, excluded) = estimate::samples_from_results(&rows).map_err(CmdError::domain)?;
    for skater in &excluded {
        eprintln!("warning: {skater} has fewer than 2 races and is excluded");
    }
    if samples.is_empty() {
        return Err(CmdError::domain("no skater has at least 2 races"));
    }

    let mut human = String::new();
    let mut csv = String::from("skater,n_races,variance,pooled_sigma\n");
    for sample in &samples {
        let variance = estimate::sample_variance(sample).map_err(CmdError::domain)?;
        let _ = writeln!(
            human,
            "{:<24} {} races, variance {variance:.6}",
            sample.skater,
            sample.points_per_race.len()
        );
        let _ = writeln!(
            csv,
            "{},{},{variance:.6},",
            sample.skater,
            sample.points_per_race.len()
        );
    }
    let sigma = estimate::pooled_sigma(&samples).map_err(CmdError::domain)?;
    let _ = writeln!(human, "pooled sigma: {sigma:.6}");
    let _ = writeln!(
        human,
        "(unbiased per-skater variances, divisor n-1; the worked value in \
         the source material is 0.460)"
    );
    let _ = writeln!(csv, ",,,{sigma:.6}");
    emit(cli, human, csv);
    Ok(())
}

fn closed_form_target(config: &SimConfig) -> Probability {
    if config.scenario.tau > 0.0 {
        tieprob::tie_prob_random_delta(&config.scenario)
    } else {
        tieprob::tie_prob_fixed(&config.scenario)
    }
}

fn cmd_simulate(cli: &Cli, config: &SimConfig) -> Result<(), CmdError> {
    let result: SimResult = if config.scenario.tau > 0.0 {
        mcsim::run_random_delta(config)
    } else {
        mcsim::run(config)
    }
    .map_err(CmdError::usage)?;
    let target = closed_form_target(config);
    let z = if result.std_error > 0.0 {
        (result.p_hat - target.value()) / result.std_error
    } else {
        f64::NAN
    };

    let mut human = String::new();
    let _ = writeln!(
        human,
        "trials {} seed {} ties {}",
        result.n_trials, result.seed, result.ties
    );
    let _ = writeln!(
        human,
        "p_hat {:.6} ({:.3} per mille), std error {:.6}",
        result.p_hat,
        result.p_hat * 1000.0,
        result.std_error
    );
    let _ = writeln!(
        human,
        "closed form {:.6}, z-score {z:.3}",
        target.value()
    );
    let csv = format!(
        "ties,n_trials,p_hat,std_error,seed,closed_form,z\n{},{},{:.6},{:.6},{},{:.6},{z:.3}\n",
        result.ties,
        result.n_trials,
        result.p_hat,
        result.std_error,
        result.seed,
        target.value()
    );
    emit(cli, human, csv);
    Ok(())
}

fn parse_grid(name: &'static str, text: &str) -> Result<Vec<f64>, CmdError> {
    let mut values = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let v: f64 = part
            .parse()
            .map_err(|_| CmdError::usage(format!("invalid {name} value {part:?}")))?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(CmdError::usage(format!("empty {name} grid")));
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("grid values are finite"));
    Ok(values)
}

fn cmd_table(
    cli: &Cli,
    sigmas: &str,
    taus: &str,
    epsilons: &str,
    delta: f64,
    n_distances: u32,
) -> Result<(), CmdError> {
    let sigmas = parse_grid("sigma", sigmas)?;
    let taus = parse_grid("tau", taus)?;
    let epsilons = parse_grid("epsilon", epsilons)?;

    let mut csv = String::from("sigma,tau,epsilon,p_fixed,p_random_delta,p_exact\n");
    let mut human = format!(
        "{:>8} {:>8} {:>8} {:>10} {:>14} {:>10}\n",
        "sigma", "tau", "epsilon", "p_fixed", "p_random_delta", "p_exact"
    );
    for &sigma in &sigmas {
        for &tau in &taus {
            for &epsilon in &epsilons {
                let scenario = TieScenario::new(delta, sigma, tau, epsilon, n_distances)
                    .map_err(CmdError::usage)?;
                let fixed = format_probability(tieprob::tie_prob_fixed(&scenario));
                let random = format_probability(tieprob::tie_prob_random_delta(&scenario));
                let exact = format_probability(tieprob::tie_prob_exact(&scenario));
                let _ = writeln!(csv, "{sigma},{tau},{epsilon},{fixed},{random},{exact}");
                let _ = writeln!(
                    human,
                    "{sigma:>8} {tau:>8} {epsilon:>8} {fixed:>10} {random:>14} {exact:>10}"
                );
            }
        }
    }
    emit(cli, human, csv);
    Ok(())
}
