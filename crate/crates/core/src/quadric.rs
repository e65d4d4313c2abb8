//! Quadratic hypersurfaces `Psi(x) = x^T B x + b^T x + c = 0`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, symmetric_eig};

/// Relative tolerance for the singularity and center-on-quadric tests.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// A quadric `{x : x^T B x + b^T x + c = 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadric {
    matrix: DMatrix<f64>,
    linear: DVector<f64>,
    constant: f64,
}

impl Quadric {
    /// Builds a quadric, checking only that the dimensions are consistent.
    /// Use [`Quadric::validate`] to check the central non-cylindrical assumptions.
    pub fn new(matrix: DMatrix<f64>, linear: DVector<f64>, constant: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if linear.len() != matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: linear.len(),
            });
        }
        Ok(Self {
            matrix,
            linear,
            constant,
        })
    }

    /// Convenience constructor from a row-major matrix.
    pub fn from_rows(rows: &[Vec<f64>], linear: &[f64], constant: f64) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(
            DMatrix::from_row_slice(n, n, &flat),
            DVector::from_column_slice(linear),
            constant,
        )
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn linear(&self) -> &DVector<f64> {
        &self.linear
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `Psi(x) = x^T B x + b^T x + c`.
    pub fn evaluate(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.matrix * x)) + self.linear.dot(x) + self.constant
    }

    /// Magnitude of the terms summed in `Psi(x)`, used to scale residual tolerances.
    pub(crate) fn term_scale(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.matrix * x)).abs() + self.linear.dot(x).abs() + self.constant.abs()
    }

    /// `grad Psi(x) = 2 B x + b`.
    pub fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        Ok(self.grad_unchecked(x))
    }

    pub(crate) fn grad_unchecked(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x * 2.0 + &self.linear
    }

    /// Center of symmetry `d = -B^{-1} b / 2`.
    pub fn center(&self) -> Result<DVector<f64>> {
        let lu = self.matrix.clone().lu();
        let rhs = &self.linear * -0.5;
        let mut d = lu.solve(&rhs).ok_or(Error::SingularMatrix {
            min_abs: 0.0,
            max_abs: linalg::max_abs(&self.matrix),
        })?;
        // one step of iterative refinement
        let r = &rhs - &self.matrix * &d;
        if let Some(corr) = lu.solve(&r) {
            d += corr;
        }
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularMatrix {
                min_abs: 0.0,
                max_abs: linalg::max_abs(&self.matrix),
            });
        }
        Ok(d)
    }

    /// `gamma = Psi(d)` at the center, computed as `c + b^T d / 2`.
    pub(crate) fn gamma_at(&self, center: &DVector<f64>) -> f64 {
        self.constant + 0.5 * self.linear.dot(center)
    }

    /// Lists which of the central non-cylindrical assumptions hold.
    pub fn validation_report(&self) -> ValidationReport {
        self.analyze().report
    }

    /// Validation plus the eigendecomposition and center computed along the way.
    pub(crate) fn analyze(&self) -> Analysis {
        let asym = linalg::asymmetry(&self.matrix);
        let symmetric = asym <= linalg::SYMMETRY_TOL * linalg::max_abs(&self.matrix);
        let mut out = Analysis {
            report: ValidationReport {
                symmetric,
                asymmetry: asym,
                nonsingular: false,
                min_abs_eigenvalue: f64::NAN,
                max_abs_eigenvalue: f64::NAN,
                center_off_quadric: false,
                gamma: f64::NAN,
                nonempty: false,
            },
            eig: None,
            center: None,
        };
        if !symmetric || self.dim() == 0 {
            return out;
        }
        let Ok(eig) = symmetric_eig(&self.matrix) else {
            return out;
        };
        let report = &mut out.report;
        let min_abs = eig.values.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
        let max_abs = eig.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        report.min_abs_eigenvalue = min_abs;
        report.max_abs_eigenvalue = max_abs;
        report.nonsingular = max_abs > 0.0 && min_abs > DEGENERACY_TOL * max_abs;
        if !report.nonsingular {
            out.eig = Some(eig);
            return out;
        }
        let Ok(d) = self.center() else {
            out.eig = Some(eig);
            return out;
        };
        let gamma = self.gamma_at(&d);
        report.gamma = gamma;
        let reference = self.constant.abs().max(0.5 * self.linear.dot(&d).abs());
        report.center_off_quadric = gamma.abs() > DEGENERACY_TOL * reference;
        if report.center_off_quadric {
            // standard form sum(lambda_i z_i^2) = 1 needs a positive eigenvalue of -B/gamma
            report.nonempty = if gamma < 0.0 {
                eig.values[0] > 0.0
            } else {
                eig.values[eig.values.len() - 1] < 0.0
            };
        }
        out.eig = Some(eig);
        out.center = Some(d);
        out
    }

    /// Validates the quadric, failing on the first violated assumption.
    pub fn validate(&self) -> Result<ValidationReport> {
        let report = self.validation_report();
        report.to_result()?;
        Ok(report)
    }
}

pub(crate) struct Analysis {
    pub report: ValidationReport,
    pub eig: Option<linalg::SymmetricEig>,
    pub center: Option<DVector<f64>>,
}

/// Outcome of checking the central non-cylindrical quadric assumptions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub symmetric: bool,
    pub asymmetry: f64,
    pub nonsingular: bool,
    pub min_abs_eigenvalue: f64,
    pub max_abs_eigenvalue: f64,
    pub center_off_quadric: bool,
    /// Value of `Psi` at the center.
    pub gamma: f64,
    pub nonempty: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.symmetric && self.nonsingular && self.center_off_quadric && self.nonempty
    }

    pub fn to_result(&self) -> Result<()> {
        if !self.symmetric {
            return Err(Error::AsymmetricMatrix {
                asymmetry: self.asymmetry,
            });
        }
        if !self.nonsingular {
            return Err(Error::SingularMatrix {
                min_abs: self.min_abs_eigenvalue,
                max_abs: self.max_abs_eigenvalue,
            });
        }
        if !self.center_off_quadric {
            return Err(Error::CenterOnQuadric { gamma: self.gamma });
        }
        if !self.nonempty {
            return Err(Error::EmptyQuadric);
        }
        Ok(())
    }
}

pub fn validate_quadric(q: &Quadric) -> Result<ValidationReport> {
    q.validate()
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MatrixRepr {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

#[derive(Serialize, Deserialize)]
struct QuadricRepr {
    #[serde(rename = "B")]
    matrix: MatrixRepr,
    b: Vec<f64>,
    c: f64,
}

impl Serialize for Quadric {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)]).collect())
            .collect();
        QuadricRepr {
            matrix: MatrixRepr::Rows(rows),
            b: self.linear.iter().copied().collect(),
            c: self.constant,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quadric {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = QuadricRepr::deserialize(d)?;
        let n = repr.b.len();
        let flat = match repr.matrix {
            MatrixRepr::Rows(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(D::Error::custom(format!("B must be {n}x{n}")));
                }
                rows.into_iter().flatten().collect::<Vec<_>>()
            }
            MatrixRepr::Flat(v) => {
                if v.len() != n * n {
                    return Err(D::Error::custom(format!(
                        "flat B must have {} entries, found {}",
                        n * n,
                        v.len()
                    )));
                }
                v
            }
        };
        Quadric::new(
            DMatrix::from_row_slice(n, n, &flat),
            DVector::from_vec(repr.b),
            repr.c,
        )
        .map_err(D::Error::custom)
    }
}
