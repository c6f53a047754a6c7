//! End-to-end tests of the `samalog` binary: exit codes, output formats,
//! and byte-stable seeded simulation output.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_samalog"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

#[test]
fn required_time_reaches_target_exactly() {
    let out = run(&[
        "required-time",
        "--target",
        "147.195",
        "--current",
        "110.660",
        "--distance",
        "1000",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "1:13.07\n");
}

#[test]
fn required_time_infeasible_exits_2() {
    // already past the target before the last distance
    let out = run(&[
        "required-time",
        "--target",
        "110.000",
        "--current",
        "110.660",
        "--distance",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn tie_prob_matches_closed_forms() {
    let out = run(&[
        "--output",
        "csv",
        "tie-prob",
        "--sigma",
        "0.5",
        "--tau",
        "0.25",
        "--epsilon",
        "0.005",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("quantity,probability,per_mille,one_in"));
    assert_eq!(lines.next(), Some("fixed,0.002821,2.821,354.5"));
    assert_eq!(lines.next(), Some("exact_cdf,0.002821,2.821,354.5"));
    assert_eq!(lines.next(), Some("random_delta,0.002303,2.303,434.2"));
    assert_eq!(lines.next(), None);
}

#[test]
fn tie_prob_zero_epsilon_exits_2() {
    let out = run(&["tie-prob", "--epsilon", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("epsilon"));
}

#[test]
fn tie_prob_human_and_csv_agree_on_numbers() {
    let args = ["tie-prob", "--sigma", "0.5", "--epsilon", "0.005"];
    let human = run(&args);
    let csv = run(&["--output", "csv", "tie-prob", "--sigma", "0.5", "--epsilon", "0.005"]);
    assert!(human.status.success());
    assert!(csv.status.success());
    assert!(stdout(&human).contains("0.002821"));
    assert!(stdout(&csv).contains("fixed,0.002821,"));
}

#[test]
fn scenario_file_supplies_defaults_and_flags_override() {
    let cfg = data("paper.cfg");
    let cfg = cfg.to_str().unwrap();
    let base = run(&["--config", cfg, "--output", "csv", "tie-prob"]);
    assert!(base.status.success(), "stderr: {}", stderr(&base));
    assert!(stdout(&base).contains("fixed,0.002821,"));

    let overridden = run(&[
        "--config",
        cfg,
        "--output",
        "csv",
        "tie-prob",
        "--epsilon",
        "0.001",
    ]);
    assert!(overridden.status.success());
    assert!(stdout(&overridden).contains("fixed,0.000564,"));
}

#[test]
fn points_ranks_the_sprint_tie_together() {
    let out = run(&[
        "--output",
        "csv",
        "points",
        "--results",
        data("allan_odin.csv").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rank,skater,points"));
    let rest: Vec<&str> = lines.collect();
    assert_eq!(rest.len(), 2);
    assert!(rest.contains(&"1,Allan Dahl Johansson,147.195"));
    assert!(rest.contains(&"1,Odin By Farstad,147.195"));
}

#[test]
fn points_partial_program_standings() {
    let out = run(&[
        "--output",
        "csv",
        "points",
        "--results",
        data("day1.csv").to_str().unwrap(),
        "--program",
        "500,1000",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("1,Odin By Farstad,73.710"));
    assert!(text.contains("2,Allan Dahl Johansson,73.900"));
}

#[test]
fn points_program_mismatch_exits_1() {
    // two 500-m races per skater cannot fill the four-distance default program
    let out = run(&[
        "points",
        "--results",
        data("berlin_500m.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn points_missing_file_exits_1() {
    let out = run(&["points", "--results", "/nonexistent/results.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn estimate_sigma_pools_per_skater_variances() {
    let out = run(&[
        "--output",
        "csv",
        "estimate-sigma",
        "--results",
        data("allan_odin.csv").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("skater,n_races,variance,pooled_sigma"));
    assert_eq!(lines.next(), Some("Allan Dahl Johansson,4,0.373740,"));
    assert_eq!(lines.next(), Some("Odin By Farstad,4,0.040273,"));
    assert_eq!(lines.next(), Some(",,,0.454979"));
    assert_eq!(lines.next(), None);
}

#[test]
fn estimate_sigma_warns_about_single_race_skaters() {
    let out = run(&[
        "--output",
        "csv",
        "estimate-sigma",
        "--results",
        data("berlin_500m.csv").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let err = stderr(&out);
    assert!(err.contains("Tao Yang"));
    assert!(err.contains("Xuefeng Sun"));
    assert!(err.contains("fewer than 2 races"));
    assert!(stdout(&out).contains("An Liu,2,"));
}

#[test]
fn simulate_is_byte_stable_for_a_fixed_seed() {
    let args = [
        "--output",
        "csv",
        "--seed",
        "42",
        "simulate",
        "--sigma",
        "0.5",
        "--epsilon",
        "0.005",
        "--n-trials",
        "200000",
        "--discretization",
        "none",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success(), "stderr: {}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("ties,n_trials,p_hat,std_error,seed,closed_form,z")
    );
    let row = lines.next().expect("one data row");
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[1], "200000");
    assert_eq!(fields[4], "42");
    assert_eq!(fields[5], "0.002821");
    // the estimate should sit within a few standard errors of the closed form
    let z: f64 = fields[6].parse().expect("numeric z");
    assert!(z.abs() < 4.0, "z-score {z} is implausibly large");
}

#[test]
fn simulate_exact_rule_requires_discretization() {
    let out = run(&[
        "simulate",
        "--n-trials",
        "1000",
        "--tie-rule",
        "exact",
        "--discretization",
        "none",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn table_single_cell_matches_tie_prob() {
    let out = run(&[
        "--output",
        "csv",
        "table",
        "--sigmas",
        "0.5",
        "--taus",
        "0.25",
        "--epsilons",
        "0.001,0.005",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("sigma,tau,epsilon,p_fixed,p_random_delta,p_exact")
    );
    assert_eq!(lines.next(), Some("0.5,0.25,0.001,0.000564,0.000461,0.000564"));
    assert_eq!(lines.next(), Some("0.5,0.25,0.005,0.002821,0.002303,0.002821"));
    assert_eq!(lines.next(), None);
}

#[test]
fn unknown_flag_exits_2() {
    let out = run(&["tie-prob", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}
