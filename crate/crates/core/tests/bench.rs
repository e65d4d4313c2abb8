use quadproj::bench::{run_trials, write_csv, BenchConfig, Family, TrialStatus};
use quadproj::Method;

fn cfg(family: Family, seed: u64) -> BenchConfig {
    BenchConfig {
        family,
        dims: vec![5, 12],
        trials: 8,
        methods: Method::ALL.to_vec(),
        seed,
        ..BenchConfig::default()
    }
}

fn without_timing(cfg: &BenchConfig) -> Vec<String> {
    let mut buf = Vec::new();
    write_csv(&run_trials(cfg).unwrap(), &mut buf).unwrap();
    String::from_utf8(buf)
        .unwrap()
        .lines()
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            [&cells[..9], &cells[11..]].concat().join(",")
        })
        .collect()
}

#[test]
fn identical_seeds_identical_results() {
    for family in [Family::Ellipsoid, Family::Hyperboloid, Family::PowerStyle] {
        assert_eq!(without_timing(&cfg(family, 3)), without_timing(&cfg(family, 3)), "{family}");
    }
}

#[test]
fn different_seeds_differ() {
    assert_ne!(without_timing(&cfg(Family::Ellipsoid, 3)), without_timing(&cfg(Family::Ellipsoid, 4)));
}

#[test]
fn record_layout() {
    let records = run_trials(&cfg(Family::PowerStyle, 1)).unwrap();
    assert_eq!(records.len(), 2 * 8 * 5);
    for r in &records {
        assert_ne!(r.termination, TrialStatus::Failed);
        assert!(r.precompute_seconds <= r.solve_seconds);
        if !r.method.uses_exact_projection() {
            assert_eq!(r.precompute_seconds, 0.0);
        }
    }
    let keys: Vec<_> = records.iter().map(|r| (r.dim, r.trial, r.method)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}
