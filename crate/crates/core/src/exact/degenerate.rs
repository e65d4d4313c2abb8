//! KKT points that the secular root cannot reach: for a distinct eigenvalue
//! whose coordinates in `x0` are all zero, the multiplier sits on the pole
//! `-1/lambda` and the free coordinates lie on a sphere.

use nalgebra::DVector;
use serde::Serialize;

use crate::normal_form::NormalizedProblem;

/// Relative tolerance for treating two eigenvalues as equal.
pub const EIGEN_GROUP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerateCandidate {
    /// Zero-based index of the distinct eigenvalue.
    pub group: usize,
    /// Coordinate carrying the positive root (the smallest index of the group).
    pub coordinate: usize,
    #[serde(with = "crate::serde_util::dvector")]
    pub point: DVector<f64>,
}

/// Index ranges of equal eigenvalues; `lambdas` must be sorted.
pub(crate) fn eigen_groups(lambdas: &DVector<f64>) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=lambdas.len() {
        let split = i == lambdas.len() || {
            let (a, b) = (lambdas[start], lambdas[i]);
            (a - b).abs() > EIGEN_GROUP_TOL * a.abs().max(b.abs())
        };
        if split {
            groups.push(start..i);
            start = i;
        }
    }
    groups
}

pub fn degenerate_candidates(np: &NormalizedProblem) -> Vec<DegenerateCandidate> {
    let lambdas = &np.lambdas;
    let mut out = Vec::new();
    for (group, range) in eigen_groups(lambdas).into_iter().enumerate() {
        if range.clone().any(|i| np.x0[i] != 0.0) {
            continue;
        }
        let k = range.start;
        let pole = lambdas[k];
        let mut point = DVector::zeros(np.dim());
        let mut sum = 0.0;
        let mut reflected = false;
        for j in (0..np.dim()).filter(|j| !range.contains(j)) {
            let xj = np.x0[j] / (1.0 - lambdas[j] / pole);
            reflected |= xj < 0.0;
            point[j] = xj;
            sum += lambdas[j] * xj * xj;
        }
        // a KKT point with a coordinate of sign opposite to x0 is beaten by its reflection
        if reflected {
            continue;
        }
        let arg = (1.0 - sum) / pole;
        if arg > 0.0 {
            point[k] = arg.sqrt();
            out.push(DegenerateCandidate {
                group,
                coordinate: k,
                point,
            });
        }
    }
    out
}
