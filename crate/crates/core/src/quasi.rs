//! Quasi-projection: move from `x0` along a direction `xi` until the line
//! `x0 + beta xi` meets the quadric.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadric::Quadric;

/// `|b1|` below this fraction of `||B|| ||xi||^2` makes the line equation linear.
pub const LINEAR_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineIntersection {
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub discriminant: f64,
}

/// Line direction.
#[derive(Debug, Clone, PartialEq)]
pub enum Variant {
    /// `xi = x0 - d`.
    Center,
    /// `xi = 2 B x0 + b`.
    Gradient,
    Custom(DVector<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Select {
    /// Smallest `|beta|`; ties go to `beta_plus`.
    Closest,
    /// Largest `|beta|`; ties go to `beta_plus`.
    Farthest,
}

impl LineIntersection {
    pub fn select(&self, select: Select) -> f64 {
        let (p, m) = (self.beta_plus, self.beta_minus);
        match select {
            Select::Closest if m.abs() < p.abs() => m,
            Select::Farthest if m.abs() > p.abs() => m,
            _ => p,
        }
    }
}

/// Roots of `b1 beta^2 + b2 beta + b3 = 0` for the line `x0 + beta xi`.
pub fn line_quadric_intersect(
    q: &Quadric,
    x0: &DVector<f64>,
    xi: &DVector<f64>,
) -> Result<Option<LineIntersection>> {
    for v in [x0, xi] {
        if v.len() != q.dim() {
            return Err(Error::DimensionMismatch {
                expected: q.dim(),
                found: v.len(),
            });
        }
    }
    if xi.iter().all(|&c| c == 0.0) {
        return Err(Error::ZeroDirection);
    }
    let b_xi = q.matrix() * xi;
    let b1 = xi.dot(&b_xi);
    let b2 = 2.0 * x0.dot(&b_xi) + q.linear().dot(xi);
    let b3 = q.eval_unchecked(x0);

    if b1.abs() <= LINEAR_TOL * q.matrix().norm() * xi.norm_squared() {
        if b2 == 0.0 {
            return Ok(None);
        }
        let beta = -b3 / b2;
        return Ok(Some(LineIntersection {
            beta_plus: beta,
            beta_minus: beta,
            b1,
            b2,
            b3,
            discriminant: b2 * b2,
        }));
    }

    let discriminant = b2 * b2 - 4.0 * b1 * b3;
    if discriminant < 0.0 {
        return Ok(None);
    }
    let sq = discriminant.sqrt();
    // cancellation-free pair: t / b1 and b3 / t with t = -(b2 + sign(b2) sqrt(disc)) / 2
    let (beta_plus, beta_minus) = if b2 >= 0.0 {
        let t = -0.5 * (b2 + sq);
        let minus = t / b1;
        let plus = if t == 0.0 { 0.0 } else { b3 / t };
        (plus, minus)
    } else {
        let t = 0.5 * (sq - b2);
        (t / b1, b3 / t)
    };
    Ok(Some(LineIntersection {
        beta_plus,
        beta_minus,
        b1,
        b2,
        b3,
        discriminant,
    }))
}

/// One Newton step on `beta -> Psi(x0 + beta xi)` when it reduces the residual.
fn refine(q: &Quadric, x0: &DVector<f64>, xi: &DVector<f64>, li: &LineIntersection, beta: f64) -> DVector<f64> {
    let x = x0 + xi * beta;
    let r = q.eval_unchecked(&x);
    let slope = 2.0 * li.b1 * beta + li.b2;
    if r == 0.0 || slope == 0.0 {
        return x;
    }
    let candidate = x0 + xi * (beta - r / slope);
    if q.eval_unchecked(&candidate).abs() < r.abs() {
        candidate
    } else {
        x
    }
}

fn direction(q: &Quadric, center: Option<&DVector<f64>>, x0: &DVector<f64>, variant: &Variant) -> Result<DVector<f64>> {
    match variant {
        Variant::Center => {
            let owned;
            let d = match center {
                Some(d) => d,
                None => {
                    owned = q.center()?;
                    &owned
                }
            };
            let xi = x0 - d;
            if xi.norm() <= f64::EPSILON * d.norm() || xi.iter().all(|&c| c == 0.0) {
                return Err(Error::AtCenter);
            }
            Ok(xi)
        }
        Variant::Gradient => {
            let g = q.grad_unchecked(x0);
            let scale = 2.0 * (q.matrix() * x0).norm() + q.linear().norm();
            if g.norm() <= f64::EPSILON * scale || g.iter().all(|&c| c == 0.0) {
                return Err(Error::ZeroGradient);
            }
            Ok(g)
        }
        Variant::Custom(xi) => Ok(xi.clone()),
    }
}

/// Intersection of the line through `x0` in the chosen direction with the
/// quadric, or `None` when the line misses it.
pub fn quasi_project(
    q: &Quadric,
    x0: &DVector<f64>,
    variant: &Variant,
    select: Select,
) -> Result<Option<DVector<f64>>> {
    quasi_project_with_center(q, None, x0, variant, select)
}

/// As [`quasi_project`], reusing a precomputed center for [`Variant::Center`].
pub fn quasi_project_with_center(
    q: &Quadric,
    center: Option<&DVector<f64>>,
    x0: &DVector<f64>,
    variant: &Variant,
    select: Select,
) -> Result<Option<DVector<f64>>> {
    if x0.len() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: x0.len(),
        });
    }
    let xi = direction(q, center, x0, variant)?;
    let Some(li) = line_quadric_intersect(q, x0, &xi)? else {
        return Ok(None);
    };
    Ok(Some(refine(q, x0, &xi, &li, li.select(select))))
}
