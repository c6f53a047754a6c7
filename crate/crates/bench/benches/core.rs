//! Benchmarks for the hot paths: pointsum arithmetic, the closed-form
//! probabilities, and the Monte Carlo inner loop.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use samalog::mcsim::{self, Discretization, SimConfig, TieRule};
use samalog::resultsio::parse_time;
use samalog::samalogue::{self, Distance, MilliTime, Program, RaceResult};
use samalog::tieprob::{self, TieScenario};

fn sprint_results() -> Vec<RaceResult> {
    let rows = [
        (500, "37.49"),
        (1000, "1:12.82"),
        (500, "37.12"),
        (1000, "1:12.35"),
    ];
    rows.iter()
        .map(|&(meters, time)| RaceResult {
            skater: "bench".to_string(),
            distance: Distance::new(meters).unwrap(),
            time: parse_time(time).unwrap(),
        })
        .collect()
}

fn bench_samalogue(c: &mut Criterion) {
    let d1000 = Distance::new(1000).unwrap();
    c.bench_function("to_points 1000m", |b| {
        b.iter(|| samalogue::to_points(black_box(MilliTime::new(72_820)), black_box(d1000)))
    });

    let program = Program::sprint();
    let results = sprint_results();
    c.bench_function("pointsum sprint", |b| {
        b.iter(|| samalogue::pointsum(black_box(&results), black_box(&program)))
    });
}

fn bench_tieprob(c: &mut Criterion) {
    let scenario = TieScenario::paper_default();
    c.bench_function("tie_prob_fixed", |b| {
        b.iter(|| tieprob::tie_prob_fixed(black_box(&scenario)))
    });
    c.bench_function("tie_prob_exact", |b| {
        b.iter(|| tieprob::tie_prob_exact(black_box(&scenario)))
    });
    let random = TieScenario::new(0.0, 0.5, 0.25, 0.005, 4).unwrap();
    c.bench_function("tie_prob_random_delta", |b| {
        b.iter(|| tieprob::tie_prob_random_delta(black_box(&random)))
    });
}

fn bench_mcsim(c: &mut Criterion) {
    let mut config = SimConfig::new(TieScenario::paper_default());
    config.n_trials = 10_000;
    config.discretization = Discretization::None;
    config.tie_rule = TieRule::Window;
    c.bench_function("mcsim run 10k continuous", |b| {
        b.iter(|| mcsim::run(black_box(&config)).unwrap())
    });

    let mut discretized = config.clone();
    discretized.discretization = Discretization::TruncateToHundredths;
    discretized.tie_rule = TieRule::ExactPointsumEquality;
    c.bench_function("mcsim run 10k discretized", |b| {
        b.iter(|| mcsim::run(black_box(&discretized)).unwrap())
    });
}

criterion_group!(benches, bench_samalogue, bench_tieprob, bench_mcsim);
criterion_main!(benches);
