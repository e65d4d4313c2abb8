//! Exact Euclidean projection onto a central quadric.
//!
//! In normal form the KKT points are `x(mu) = x0 / (1 + mu lambda)` for a root
//! `mu` of the secular function, plus the degenerate points attached to
//! eigenvalues whose coordinates vanish in `x0`. The projection is the nearest
//! of these candidates.

pub mod degenerate;
pub mod root;
pub mod secular;

use nalgebra::DVector;
use serde::Serialize;

pub use degenerate::{degenerate_candidates, DegenerateCandidate, EIGEN_GROUP_TOL};
pub use root::{
    double_newton, find_positive_start, newton_guarded, RootResult, ROOT_MAX_ITER, ROOT_TOL,
};
pub use secular::{interval_endpoints, secular_f, secular_f_prime, SecularInterval};

use crate::error::{Error, Result};
use crate::normal_form::{NormalForm, NormalizedProblem};
use crate::quadric::Quadric;

/// Objectives closer than this are considered tied; the root candidate wins ties.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProjectionKind {
    Root,
    /// Zero-based index of the distinct eigenvalue that produced the point.
    Degenerate(usize),
    AlreadyFeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootCandidate {
    pub mu: f64,
    #[serde(with = "crate::serde_util::dvector")]
    pub point: DVector<f64>,
    pub iterations: usize,
    pub residuals: Vec<f64>,
}

/// All KKT candidates of a normal-form problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSet {
    pub root_candidate: Option<RootCandidate>,
    pub degenerate: Vec<DegenerateCandidate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionOutcome {
    #[serde(with = "crate::serde_util::dvector")]
    pub point: DVector<f64>,
    pub objective: f64,
    pub kind: ProjectionKind,
    pub mu: Option<f64>,
    pub newton_iters: usize,
    /// `|Psi(point)|`, or `|sum lambda x^2 - 1|` for normal-form outcomes.
    pub residual: f64,
    /// `|f(mu)|` along the Newton iterates of the winning root search.
    pub newton_residuals: Vec<f64>,
}

fn normal_residual(lambdas: &DVector<f64>, x: &DVector<f64>) -> f64 {
    lambdas.iter().zip(x.iter()).map(|(l, v)| l * v * v).sum::<f64>() - 1.0
}

/// Root of the secular function on `(e1, e2)`, or `None` when `e1 = -inf`.
fn root_candidate(np: &NormalizedProblem) -> Result<Option<RootCandidate>> {
    let interval = interval_endpoints(np);
    if !interval.e1.is_finite() {
        return Ok(None);
    }
    let found = if interval.e2.is_finite() {
        double_newton(np, interval)?
    } else {
        let start = find_positive_start(np, interval.e1)?;
        newton_guarded(np, interval, start, ROOT_TOL, ROOT_MAX_ITER)?
    };
    let mut point = secular::point_at(np, found.mu);
    // radial rescaling lands exactly on the quadric; the shift is O(|f(mu)|)
    let s = normal_residual(&np.lambdas, &point) + 1.0;
    if s > 0.0 {
        point /= s.sqrt();
    }
    Ok(Some(RootCandidate {
        mu: found.mu,
        point,
        iterations: found.iterations,
        residuals: found.residuals,
    }))
}

pub fn candidate_set(np: &NormalizedProblem) -> Result<CandidateSet> {
    Ok(CandidateSet {
        root_candidate: root_candidate(np)?,
        degenerate: degenerate_candidates(np),
    })
}

/// Nearest KKT point of the normal-form problem.
pub fn project_normal_form(np: &NormalizedProblem) -> Result<ProjectionOutcome> {
    if np.lambdas.len() != np.x0.len() {
        return Err(Error::DimensionMismatch {
            expected: np.lambdas.len(),
            found: np.x0.len(),
        });
    }
    let at_zero = secular::eval(np, 0.0);
    if at_zero.value.abs() <= ROOT_TOL * at_zero.scale {
        return Ok(ProjectionOutcome {
            point: np.x0.clone(),
            objective: 0.0,
            kind: ProjectionKind::AlreadyFeasible,
            mu: Some(0.0),
            newton_iters: 0,
            residual: at_zero.value.abs(),
            newton_residuals: vec![at_zero.value.abs()],
        });
    }

    let set = candidate_set(np)?;
    let mut best: Option<ProjectionOutcome> = set.root_candidate.map(|r| ProjectionOutcome {
        objective: (&r.point - &np.x0).norm(),
        residual: normal_residual(&np.lambdas, &r.point).abs(),
        point: r.point,
        kind: ProjectionKind::Root,
        mu: Some(r.mu),
        newton_iters: r.iterations,
        newton_residuals: r.residuals,
    });
    for d in set.degenerate {
        let objective = (&d.point - &np.x0).norm();
        let better = match &best {
            None => true,
            Some(b) => objective < b.objective - TIE_TOL,
        };
        if better {
            let (newton_iters, newton_residuals) = best
                .as_ref()
                .map(|b| (b.newton_iters, b.newton_residuals.clone()))
                .unwrap_or_default();
            best = Some(ProjectionOutcome {
                residual: normal_residual(&np.lambdas, &d.point).abs(),
                point: d.point,
                objective,
                kind: ProjectionKind::Degenerate(d.group),
                mu: Some(-1.0 / np.lambdas[d.coordinate]),
                newton_iters,
                newton_residuals,
            });
        }
    }
    best.ok_or(Error::NoCandidate)
}

/// Reusable projector onto one quadric: the eigendecomposition is computed once.
#[derive(Debug, Clone)]
pub struct ExactProjector {
    quadric: Quadric,
    normal_form: NormalForm,
}

impl ExactProjector {
    pub fn new(q: &Quadric) -> Result<Self> {
        Ok(Self {
            quadric: q.clone(),
            normal_form: NormalForm::new(q)?,
        })
    }

    pub fn quadric(&self) -> &Quadric {
        &self.quadric
    }

    pub fn normal_form(&self) -> &NormalForm {
        &self.normal_form
    }

    pub fn project(&self, x0: &DVector<f64>) -> Result<ProjectionOutcome> {
        let np = self.normal_form.normalize(x0)?;
        let normal = project_normal_form(&np)?;
        let point = if normal.kind == ProjectionKind::AlreadyFeasible {
            x0.clone()
        } else {
            self.normal_form.denormalize(&np, &normal.point)?
        };
        Ok(ProjectionOutcome {
            objective: (&point - x0).norm(),
            residual: self.quadric.eval_unchecked(&point).abs(),
            point,
            ..normal
        })
    }
}

pub fn project_exact(q: &Quadric, x0: &DVector<f64>) -> Result<ProjectionOutcome> {
    ExactProjector::new(q)?.project(x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    fn np(l: &[f64], x: &[f64]) -> NormalizedProblem {
        NormalizedProblem::new(v(l), v(x)).unwrap()
    }

    #[test]
    fn circle_root() {
        let out = project_normal_form(&np(&[1.0, 1.0], &[2.0, 0.0])).unwrap();
        assert_eq!(out.kind, ProjectionKind::Root);
        assert_relative_eq!(out.point, v(&[1.0, 0.0]), epsilon = 1e-12);
        assert_relative_eq!(out.mu.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hyperbola_degenerate() {
        let out = project_normal_form(&np(&[1.0, -1.0], &[0.0, 2.0])).unwrap();
        assert_eq!(out.kind, ProjectionKind::Degenerate(0));
        assert_relative_eq!(out.point, v(&[2f64.sqrt(), 1.0]), epsilon = 1e-15);
    }

    #[test]
    fn ellipse_against_parametrization() {
        let p = np(&[4.0, 1.0], &[1.0, 1.0]);
        let out = project_normal_form(&p).unwrap();
        assert_eq!(out.kind, ProjectionKind::Root);
        // dense sampling of (cos t / 2, sin t) plus golden-section refinement
        let dist = |t: f64| ((0.5 * t.cos() - 1.0).powi(2) + (t.sin() - 1.0).powi(2)).sqrt();
        let n = 1_000_000;
        let step = std::f64::consts::TAU / n as f64;
        let best = (0..n).map(|i| i as f64 * step).min_by(|a, b| dist(*a).total_cmp(&dist(*b))).unwrap();
        let (mut a, mut b) = (best - step, best + step);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let (c, d) = (b - g * (b - a), a + g * (b - a));
            if dist(c) < dist(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let oracle = dist(0.5 * (a + b));
        assert!((out.objective - oracle).abs() <= 1e-6, "{} vs {}", out.objective, oracle);
    }

    #[test]
    fn already_feasible() {
        let out = project_normal_form(&np(&[2.0, -1.0], &[1.0, 1.0])).unwrap();
        assert_eq!(out.kind, ProjectionKind::AlreadyFeasible);
        assert_eq!(out.objective, 0.0);
    }

    #[test]
    fn shifted_circle_exact() {
        let q = Quadric::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[-2.0, 0.0], 0.0).unwrap();
        let out = project_exact(&q, &v(&[3.0, 0.0])).unwrap();
        assert_relative_eq!(out.point, v(&[2.0, 0.0]), epsilon = 1e-12);
        assert_relative_eq!(out.objective, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sphere_center_is_deterministic() {
        let q = Quadric::from_rows(
            &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            &[0.0, 0.0, 0.0],
            -1.0,
        )
        .unwrap();
        let a = project_exact(&q, &v(&[0.0, 0.0, 0.0])).unwrap();
        let b = project_exact(&q, &v(&[0.0, 0.0, 0.0])).unwrap();
        assert!(matches!(a.kind, ProjectionKind::Degenerate(_)));
        assert_relative_eq!(a.objective, 1.0, epsilon = 1e-14);
        assert_eq!(a.point, b.point);
    }

    #[test]
    fn outcome_serializes() {
        let out = project_normal_form(&np(&[1.0, 1.0], &[2.0, 0.0])).unwrap();
        let json = serde_json::to_value(&out).unwrap();
        assert_eq!(json["kind"], "Root");
        assert_eq!(json["point"].as_array().unwrap().len(), 2);
    }

    fn lambda_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(prop_oneof![-4.0f64..-0.1, 0.1f64..4.0], n).prop_map(|mut l| {
            l.sort_by(|a, b| b.total_cmp(a));
            if l[0] < 0.0 {
                l[0] = -l[0];
                l.sort_by(|a, b| b.total_cmp(a));
            }
            l
        })
    }

    proptest! {
        #[test]
        fn secular_is_decreasing(l in lambda_strategy(4), x in proptest::collection::vec(0.05f64..2.0, 4),
                                 s in 0.05f64..0.45, t in 0.55f64..0.95) {
            let p = np(&l, &x);
            let iv = interval_endpoints(&p);
            let lo = if iv.e1.is_finite() { iv.e1 } else { -20.0 };
            let hi = if iv.e2.is_finite() { iv.e2 } else { 20.0 };
            let (m1, m2) = (lo + s * (hi - lo), lo + t * (hi - lo));
            prop_assert!(secular_f(m1, &p).unwrap() > secular_f(m2, &p).unwrap());
        }

        #[test]
        fn secular_is_convex_for_ellipsoids(l in proptest::collection::vec(0.1f64..4.0, 3),
                                            x in proptest::collection::vec(0.05f64..2.0, 3),
                                            t in 0.05f64..0.9) {
            let p = np(&l, &x);
            let e1 = interval_endpoints(&p).e1;
            let mu = e1 + t * (10.0 - e1);
            let h = 1e-3 * (mu - e1);
            let f = |m: f64| secular_f(m, &p).unwrap();
            let second = f(mu - h) - 2.0 * f(mu) + f(mu + h);
            prop_assert!(second >= -1e-9);
        }

        #[test]
        fn output_is_feasible_and_nonnegative(l in lambda_strategy(4),
                                              x in proptest::collection::vec(prop_oneof![Just(0.0), 0.01f64..3.0], 4)) {
            let p = np(&l, &x);
            let out = project_normal_form(&p).unwrap();
            prop_assert!(out.point.iter().all(|&c| c >= 0.0));
            prop_assert!(normal_residual(&p.lambdas, &out.point).abs() <= 1e-9);
            prop_assert!(out.newton_iters <= 60);
            let set = candidate_set(&p).unwrap();
            for c in set.root_candidate.iter().map(|r| &r.point).chain(set.degenerate.iter().map(|d| &d.point)) {
                prop_assert!(normal_residual(&p.lambdas, c).abs() <= 1e-9);
                prop_assert!(c.iter().all(|&v| v >= 0.0));
            }
        }

        #[test]
        fn sign_equivariance(l in lambda_strategy(3), x in proptest::collection::vec(0.05f64..3.0, 3),
                             signs in proptest::collection::vec(any::<bool>(), 3)) {
            let d = DMatrix::from_diagonal(&v(&l));
            let q = Quadric::new(d, DVector::zeros(3), -1.0).unwrap();
            let s = DVector::from_iterator(3, signs.iter().map(|&b| if b { -1.0 } else { 1.0 }));
            let x = v(&x);
            let base = project_exact(&q, &x).unwrap();
            let flipped = project_exact(&q, &x.component_mul(&s)).unwrap();
            prop_assert!((flipped.point - base.point.component_mul(&s)).norm() <= 1e-10);
        }

        #[test]
        fn sphere_closed_form(t in 0.1f64..5.0, x in proptest::collection::vec(-3.0f64..3.0, 4)) {
            let x = v(&x);
            prop_assume!(x.norm() > 1e-3);
            let q = Quadric::new(DMatrix::identity(4, 4) * t, DVector::zeros(4), -1.0).unwrap();
            let out = project_exact(&q, &x).unwrap();
            let expected = &x / (t.sqrt() * x.norm());
            prop_assert!((out.point - expected).norm() <= 1e-10);
        }
    }

}
