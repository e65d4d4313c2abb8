use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadric::Quadric;

use super::SolverConfig;

/// Axis-aligned box `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    #[serde(with = "crate::serde_util::dvector")]
    lower: DVector<f64>,
    #[serde(with = "crate::serde_util::dvector")]
    upper: DVector<f64>,
}

impl AxisBox {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if let Some(index) = (0..lower.len()).find(|&i| !(lower[i] <= upper[i])) {
            return Err(Error::InvalidBox { index });
        }
        Ok(Self { lower, upper })
    }

    pub fn from_slices(lower: &[f64], upper: &[f64]) -> Result<Self> {
        Self::new(
            DVector::from_column_slice(lower),
            DVector::from_column_slice(upper),
        )
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &DVector<f64> {
        &self.lower
    }

    pub fn upper(&self) -> &DVector<f64> {
        &self.upper
    }

    pub fn center(&self) -> DVector<f64> {
        (&self.lower + &self.upper) * 0.5
    }

    pub fn diameter(&self) -> f64 {
        (&self.upper - &self.lower).norm()
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        x.len() == self.dim()
            && (0..self.dim()).all(|i| x[i] >= self.lower[i] - tol && x[i] <= self.upper[i] + tol)
    }

    pub(crate) fn clamp(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.dim(), |i, _| x[i].clamp(self.lower[i], self.upper[i]))
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

/// Componentwise clamp onto the box.
pub fn project_box(b: &AxisBox, x: &DVector<f64>) -> Result<DVector<f64>> {
    b.check_dim(x.len())?;
    Ok(b.clamp(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    /// `|x^T B x + b^T x + c|`.
    pub deviation: f64,
    /// Inside the box up to `box_tol`.
    pub in_box: bool,
}

impl Membership {
    pub fn is_feasible(&self, cfg: &SolverConfig) -> bool {
        self.in_box && self.deviation <= cfg.deviation_tol
    }
}

pub fn check_membership(q: &Quadric, b: &AxisBox, x: &DVector<f64>, cfg: &SolverConfig) -> Membership {
    let deviation = if x.len() == q.dim() {
        q.eval_unchecked(x).abs()
    } else {
        f64::INFINITY
    };
    Membership {
        deviation,
        in_box: b.contains(x, cfg.box_tol),
    }
}
