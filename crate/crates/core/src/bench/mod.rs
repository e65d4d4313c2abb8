//! Randomized benchmark: instance generation, trial runner and CSV report.

mod generate;
mod report;
mod runner;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use generate::{gen_power_style, gen_random_instance, MAX_ATTEMPTS};
pub use report::{emit_report, write_csv, Stats, Summary, SummaryRow, CSV_COLUMNS};
pub use runner::{run_trials, trial_seed, BenchConfig, TrialRecord, TrialStatus};

use crate::error::{Error, Result};
use crate::quadric::Quadric;
use crate::splitting::AxisBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "ellipsoid")]
    Ellipsoid,
    #[serde(rename = "hyperboloid")]
    Hyperboloid,
    #[serde(rename = "power")]
    PowerStyle,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Ellipsoid => "ellipsoid",
            Family::Hyperboloid => "hyperboloid",
            Family::PowerStyle => "power",
        }
    }

    fn code(self) -> u64 {
        match self {
            Family::Ellipsoid => 1,
            Family::Hyperboloid => 2,
            Family::PowerStyle => 3,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ellipsoid" => Ok(Family::Ellipsoid),
            "hyperboloid" => Ok(Family::Hyperboloid),
            "power" | "power-style" | "powerstyle" => Ok(Family::PowerStyle),
            other => Err(Error::InvalidArgument(format!("unknown family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub family: Family,
    pub dim: usize,
    pub seed: u64,
    pub box_halfwidth: f64,
}

impl InstanceSpec {
    pub fn new(family: Family, dim: usize, seed: u64) -> Self {
        Self {
            family,
            dim,
            seed,
            box_halfwidth: 1.0,
        }
    }

    /// Dispatches to the generator of the family.
    pub fn generate(&self) -> Result<Instance> {
        gen_random_instance(self)
    }
}

/// A benchmark problem: project `x0` onto `box ∩ quadric`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub quadric: Quadric,
    pub bx: AxisBox,
    pub x0: DVector<f64>,
    /// Point of `box ∩ quadric` the box was built around.
    pub feasible_point: DVector<f64>,
}
