use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::{Family, TrialRecord};
use crate::error::Result;
use crate::splitting::Method;

pub const CSV_COLUMNS: [&str; 12] = [
    "family",
    "dim",
    "trial",
    "seed",
    "method",
    "objective",
    "deviation",
    "iterations",
    "restarts",
    "precompute_seconds",
    "solve_seconds",
    "termination",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Stats {
    fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let (mut min, mut max, mut sum, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for v in values.into_iter().filter(|v| v.is_finite()) {
            min = min.min(v);
            max = max.max(v);
            sum += v;
            n += 1;
        }
        (n > 0).then(|| Stats {
            min,
            mean: (sum / n as f64).clamp(min, max),
            max,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub family: Family,
    pub dim: usize,
    pub method: Method,
    pub trials: usize,
    pub feasible: usize,
    /// Trials not terminated `Feasible`; their objectives are left out of `objective`.
    pub timeouts: usize,
    pub objective: Option<Stats>,
    pub deviation: Option<Stats>,
    pub iterations: Option<Stats>,
    pub solve_seconds: Option<Stats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub fn from_records(records: &[TrialRecord]) -> Self {
        let mut groups: BTreeMap<(Family, usize, Method), Vec<&TrialRecord>> = BTreeMap::new();
        for r in records {
            groups.entry((r.family, r.dim, r.method)).or_default().push(r);
        }
        let rows = groups
            .into_iter()
            .map(|((family, dim, method), rs)| {
                let feasible = rs.iter().filter(|r| r.is_feasible()).count();
                SummaryRow {
                    family,
                    dim,
                    method,
                    trials: rs.len(),
                    feasible,
                    timeouts: rs.len() - feasible,
                    objective: Stats::of(rs.iter().filter(|r| r.is_feasible()).map(|r| r.objective)),
                    deviation: Stats::of(rs.iter().map(|r| r.deviation)),
                    iterations: Stats::of(rs.iter().map(|r| r.iterations as f64)),
                    solve_seconds: Stats::of(rs.iter().map(|r| r.solve_seconds)),
                }
            })
            .collect();
        Self { rows }
    }

    pub fn row(&self, family: Family, dim: usize, method: Method) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.family == family && r.dim == dim && r.method == method)
    }
}

fn cell(s: Option<Stats>) -> String {
    match s {
        Some(s) => format!("{:.3e}/{:.3e}/{:.3e}", s.min, s.mean, s.max),
        None => "-".into(),
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<12} {:>5} {:<6} {:>9} {:>8}  {:<32} {:<32} {:<32} {:<32}",
            "family", "dim", "method", "feasible", "timeout",
            "objective min/mean/max", "deviation min/mean/max",
            "iterations min/mean/max", "solve_s min/mean/max"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<12} {:>5} {:<6} {:>9} {:>8}  {:<32} {:<32} {:<32} {:<32}",
                r.family.name(),
                r.dim,
                r.method.name(),
                format!("{}/{}", r.feasible, r.trials),
                r.timeouts,
                cell(r.objective),
                cell(r.deviation),
                cell(r.iterations),
                cell(r.solve_seconds),
            )?;
        }
        Ok(())
    }
}

/// Writes the header and one row per record.
pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the CSV to `out_path` and returns the per-(family, dim, method) summary.
pub fn emit_report(records: &[TrialRecord], out_path: &Path) -> Result<Summary> {
    let file = std::fs::File::create(out_path)?;
    write_csv(records, std::io::BufWriter::new(file))?;
    Ok(Summary::from_records(records))
}
