use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Family, Instance, InstanceSpec};
use crate::error::Result;
use crate::splitting::{solve_with, Method, QuadricProjector, SolverConfig, Termination};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Feasible,
    MaxIter,
    Cycle,
    /// Instance generation or the solver returned an error.
    Failed,
}

impl From<Termination> for TrialStatus {
    fn from(t: Termination) -> Self {
        match t {
            Termination::Feasible => TrialStatus::Feasible,
            Termination::MaxIter => TrialStatus::MaxIter,
            Termination::Cycle => TrialStatus::Cycle,
        }
    }
}

/// One solve; field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub family: Family,
    pub dim: usize,
    pub trial: usize,
    pub seed: u64,
    pub method: Method,
    pub objective: f64,
    pub deviation: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub precompute_seconds: f64,
    pub solve_seconds: f64,
    pub termination: TrialStatus,
}

impl TrialRecord {
    pub fn is_feasible(&self) -> bool {
        self.termination == TrialStatus::Feasible
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub family: Family,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub box_halfwidth: f64,
    /// `method` is overridden per run.
    pub solver: SolverConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            family: Family::Ellipsoid,
            dims: vec![10, 50, 100],
            trials: 100,
            methods: Method::ALL.to_vec(),
            seed: 0,
            box_halfwidth: 1.0,
            solver: SolverConfig::default(),
        }
    }
}

const fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one trial's instance; independent of scheduling.
pub fn trial_seed(base: u64, family: Family, dim: usize, trial: usize) -> u64 {
    [family.code(), dim as u64, trial as u64]
        .into_iter()
        .fold(splitmix64(base), |h, v| splitmix64(h ^ v))
}

fn failed(family: Family, dim: usize, trial: usize, seed: u64, method: Method) -> TrialRecord {
    TrialRecord {
        family,
        dim,
        trial,
        seed,
        method,
        objective: f64::NAN,
        deviation: f64::NAN,
        iterations: 0,
        restarts: 0,
        precompute_seconds: 0.0,
        solve_seconds: 0.0,
        termination: TrialStatus::Failed,
    }
}

fn run_method(inst: &Instance, cfg: &SolverConfig, meta: (Family, usize, usize, u64)) -> TrialRecord {
    let (family, dim, trial, seed) = meta;
    let start = Instant::now();
    let mut precompute_seconds = 0.0;
    let result = QuadricProjector::new(&inst.quadric).and_then(|p| {
        if cfg.method.uses_exact_projection() {
            let t = Instant::now();
            p.prepare_exact()?;
            precompute_seconds = t.elapsed().as_secs_f64();
        }
        solve_with(&p, &inst.bx, &inst.x0, cfg)
    });
    let solve_seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(out) => TrialRecord {
            family,
            dim,
            trial,
            seed,
            method: cfg.method,
            objective: out.objective,
            deviation: out.deviation,
            iterations: out.trace.iterations(),
            restarts: out.trace.restarts,
            precompute_seconds,
            solve_seconds,
            termination: out.trace.termination.into(),
        },
        Err(_) => failed(family, dim, trial, seed, cfg.method),
    }
}

fn run_one(cfg: &BenchConfig, dim: usize, trial: usize) -> Vec<TrialRecord> {
    let seed = trial_seed(cfg.seed, cfg.family, dim, trial);
    let spec = InstanceSpec {
        family: cfg.family,
        dim,
        seed,
        box_halfwidth: cfg.box_halfwidth,
    };
    let inst = match spec.generate() {
        Ok(inst) => inst,
        Err(_) => {
            return cfg
                .methods
                .iter()
                .map(|&m| failed(cfg.family, dim, trial, seed, m))
                .collect()
        }
    };
    cfg.methods
        .iter()
        .map(|&method| {
            let solver = SolverConfig {
                method,
                ..cfg.solver.clone()
            };
            run_method(&inst, &solver, (cfg.family, dim, trial, seed))
        })
        .collect()
}

/// Runs every method on `trials` fresh instances per dimension. Trials run in
/// parallel; records are sorted by (family, dim, trial, method).
pub fn run_trials(cfg: &BenchConfig) -> Result<Vec<TrialRecord>> {
    if cfg.methods.is_empty() {
        return Ok(Vec::new());
    }
    let jobs: Vec<(usize, usize)> = cfg
        .dims
        .iter()
        .flat_map(|&d| (0..cfg.trials).map(move |t| (d, t)))
        .collect();
    let mut records: Vec<TrialRecord> = jobs
        .par_iter()
        .flat_map_iter(|&(dim, trial)| run_one(cfg, dim, trial))
        .collect();
    records.sort_by_key(|r| (r.family, r.dim, r.trial, r.method));
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_across_keys() {
        let a = trial_seed(1, Family::Ellipsoid, 10, 0);
        assert_ne!(a, trial_seed(1, Family::Ellipsoid, 10, 1));
        assert_ne!(a, trial_seed(1, Family::Ellipsoid, 50, 0));
        assert_ne!(a, trial_seed(1, Family::Hyperboloid, 10, 0));
        assert_ne!(a, trial_seed(2, Family::Ellipsoid, 10, 0));
        assert_eq!(a, trial_seed(1, Family::Ellipsoid, 10, 0));
    }

    #[test]
    fn small_ellipsoid_run() {
        let cfg = BenchConfig {
            dims: vec![10],
            trials: 5,
            methods: vec![Method::Ape],
            seed: 9,
            ..BenchConfig::default()
        };
        let records = run_trials(&cfg).unwrap();
        assert_eq!(records.len(), 5);
        assert!(records.iter().all(|r| r.is_feasible() && r.deviation <= 1e-6));
    }

    #[test]
    fn methods_share_the_instance() {
        let cfg = BenchConfig {
            dims: vec![4],
            trials: 2,
            methods: vec![Method::Ape, Method::Dr],
            seed: 3,
            ..BenchConfig::default()
        };
        let records = run_trials(&cfg).unwrap();
        assert_eq!(records.len(), 4);
        assert_eq!(records[0].seed, records[1].seed);
        assert_eq!((records[0].method, records[1].method), (Method::Ape, Method::Dr));
    }

    #[test]
    fn no_methods_no_records() {
        let cfg = BenchConfig {
            methods: vec![],
            ..BenchConfig::default()
        };
        assert!(run_trials(&cfg).unwrap().is_empty());
    }
}
