//! Reduction of a quadric projection problem to the normal form
//! `min ||z - z0||  s.t.  sum_i lambda_i z_i^2 = 1`, with `z0 >= 0`.
//!
//! The chain applied to a point `x` is: shift by the center `d`, rotate onto the
//! eigenbasis of `B`, reflect each coordinate so that it is nonnegative. The
//! constant `gamma = Psi(d)` is folded into the eigenvalues (`lambda = eig(B)/|gamma|`),
//! so the map is an isometry and distances are preserved. When `gamma > 0` the
//! quadratic is negated first, which leaves the zero set unchanged.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quadric::Quadric;

/// Components of the normalized point below this fraction of the problem's
/// length scale are treated as exactly zero.
pub const ZERO_COMPONENT_TOL: f64 = 1e-12;

/// Affine map between original and normal-form coordinates.
#[derive(Debug, Clone)]
pub struct NormalForm {
    /// Eigenvalues of `+-B/|gamma|`, sorted descending; `lambdas[0] > 0`.
    pub lambdas: DVector<f64>,
    /// Orthogonal matrix whose columns are the eigenvectors matching `lambdas`.
    pub rotation: DMatrix<f64>,
    pub center: DVector<f64>,
    /// `sqrt(|gamma|)`: `Psi(x) = scale^2 * negsign * (sum lambda_i z_i^2 - 1)`.
    pub scale: f64,
    /// Whether `B` and `gamma` were negated to reach the standard form.
    pub negated: bool,
    /// Number of positive entries of `lambdas`.
    pub positives: usize,
}

/// A point expressed in normal-form coordinates, reflected into the first orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedProblem {
    pub lambdas: DVector<f64>,
    pub x0: DVector<f64>,
    /// `+1` or `-1` per coordinate; the unreflected coordinate is `signs[i] * x0[i]`.
    pub signs: DVector<f64>,
}

impl NormalizedProblem {
    /// Builds a normal-form problem directly, reflecting `x0` into the first orthant.
    pub fn new(lambdas: DVector<f64>, x0: DVector<f64>) -> Result<Self> {
        if lambdas.len() != x0.len() {
            return Err(Error::DimensionMismatch {
                expected: lambdas.len(),
                found: x0.len(),
            });
        }
        let signs = x0.map(|v| if v < 0.0 { -1.0 } else { 1.0 });
        Ok(Self {
            lambdas,
            x0: x0.abs(),
            signs,
        })
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// Undo the orthant reflection.
    pub fn unreflect(&self, z: &DVector<f64>) -> DVector<f64> {
        z.component_mul(&self.signs)
    }
}

impl NormalForm {
    /// Validates the quadric and computes its normal form.
    pub fn new(q: &Quadric) -> Result<Self> {
        let analysis = q.analyze();
        analysis.report.to_result()?;
        let (Some(eig), Some(center)) = (analysis.eig, analysis.center) else {
            return Err(Error::SingularMatrix {
                min_abs: analysis.report.min_abs_eigenvalue,
                max_abs: analysis.report.max_abs_eigenvalue,
            });
        };
        let gamma = analysis.report.gamma;
        let n = q.dim();
        let negated = gamma > 0.0;
        let (lambdas, rotation) = if negated {
            // -B reverses the order of the eigenvalues
            let lambdas = DVector::from_iterator(n, (0..n).rev().map(|i| -eig.values[i] / gamma));
            let mut rotation = DMatrix::zeros(n, n);
            for (col, src) in (0..n).rev().enumerate() {
                rotation.set_column(col, &eig.vectors.column(src));
            }
            (lambdas, rotation)
        } else {
            (eig.values / gamma.abs(), eig.vectors)
        };
        let positives = lambdas.iter().filter(|&&l| l > 0.0).count();
        Ok(Self {
            lambdas,
            rotation,
            center,
            scale: gamma.abs().sqrt(),
            negated,
            positives,
        })
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    /// Shift and rotate into normal-form coordinates (no reflection).
    pub fn to_normal(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(x.len())?;
        Ok(self.rotation.tr_mul(&(x - &self.center)))
    }

    /// Inverse of [`NormalForm::to_normal`].
    pub fn from_normal(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(z.len())?;
        Ok(&self.rotation * z + &self.center)
    }

    /// `sum lambda_i z_i^2 - 1` for an unreflected normal-form point.
    pub fn normal_residual(&self, z: &DVector<f64>) -> f64 {
        self.lambdas
            .iter()
            .zip(z.iter())
            .map(|(l, v)| l * v * v)
            .sum::<f64>()
            - 1.0
    }

    /// Maps `Psi` values to normal-form residuals: `Psi = psi_factor * residual`.
    pub fn psi_factor(&self) -> f64 {
        let s2 = self.scale * self.scale;
        if self.negated {
            -s2
        } else {
            s2
        }
    }

    /// Express `x0_raw` as a normal-form problem with a nonnegative point.
    pub fn normalize(&self, x0_raw: &DVector<f64>) -> Result<NormalizedProblem> {
        let u = self.to_normal(x0_raw)?;
        let length = self.length_scale().max(u.norm());
        let threshold = ZERO_COMPONENT_TOL * length;
        let signs = u.map(|v| if v < 0.0 { -1.0 } else { 1.0 });
        let x0 = u.map(|v| if v.abs() <= threshold { 0.0 } else { v.abs() });
        Ok(NormalizedProblem {
            lambdas: self.lambdas.clone(),
            x0,
            signs,
        })
    }

    /// Map a first-orthant normal-form point back to original coordinates.
    pub fn denormalize(&self, np: &NormalizedProblem, z: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(np.dim())?;
        self.check_dim(z.len())?;
        self.from_normal(&np.unreflect(z))
    }

    /// Smallest semi-axis length `1/sqrt(max |lambda|)`.
    fn length_scale(&self) -> f64 {
        let max_abs = self.lambdas.iter().fold(0.0_f64, |a, l| a.max(l.abs()));
        1.0 / max_abs.sqrt()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

pub fn normalize_problem(
    q: &Quadric,
    x0_raw: &DVector<f64>,
) -> Result<(NormalForm, NormalizedProblem)> {
    let nf = NormalForm::new(q)?;
    let np = nf.normalize(x0_raw)?;
    Ok((nf, np))
}

pub fn denormalize_point(
    nf: &NormalForm,
    np: &NormalizedProblem,
    z: &DVector<f64>,
) -> Result<DVector<f64>> {
    nf.denormalize(np, z)
}
