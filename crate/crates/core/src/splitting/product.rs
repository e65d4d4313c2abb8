use std::ops::Range;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{ExactProjector, ProjectionOutcome};
use crate::quadric::Quadric;

/// Cartesian product of quadrics over consecutive coordinate blocks.
#[derive(Debug, Clone)]
pub struct ProductSet {
    blocks: Vec<(ExactProjector, Range<usize>)>,
    dim: usize,
}

impl ProductSet {
    /// `blocks` must partition `0..n` in order, each range matching its quadric's dimension.
    pub fn new(blocks: Vec<(Quadric, Range<usize>)>) -> Result<Self> {
        let mut next = 0;
        let mut out = Vec::with_capacity(blocks.len());
        for (i, (q, r)) in blocks.into_iter().enumerate() {
            if r.start != next || r.end <= r.start {
                return Err(Error::InvalidPartition(format!(
                    "block {i} covers {r:?}, expected to start at {next}"
                )));
            }
            if r.len() != q.dim() {
                return Err(Error::DimensionMismatch {
                    expected: r.len(),
                    found: q.dim(),
                });
            }
            next = r.end;
            out.push((ExactProjector::new(&q)?, r));
        }
        if out.is_empty() {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        Ok(Self { blocks: out, dim: next })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductProjection {
    #[serde(with = "crate::serde_util::dvector")]
    pub point: DVector<f64>,
    /// `||point - x0||`; its square is the sum of the squared block objectives.
    pub objective: f64,
    pub blocks: Vec<ProjectionOutcome>,
}

/// Blockwise exact projection onto a product of quadrics.
pub fn cartesian_project(ps: &ProductSet, x0: &DVector<f64>) -> Result<ProductProjection> {
    if x0.len() != ps.dim {
        return Err(Error::DimensionMismatch {
            expected: ps.dim,
            found: x0.len(),
        });
    }
    let mut point = DVector::zeros(ps.dim);
    let mut blocks = Vec::with_capacity(ps.blocks.len());
    for (proj, r) in &ps.blocks {
        let sub = x0.rows(r.start, r.len()).into_owned();
        let out = proj.project(&sub)?;
        point.rows_mut(r.start, r.len()).copy_from(&out.point);
        blocks.push(out);
    }
    Ok(ProductProjection {
        objective: (&point - x0).norm(),
        point,
        blocks,
    })
}
