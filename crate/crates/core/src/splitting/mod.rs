//! Splitting solvers for `box ∩ quadric`: alternating projections with exact
//! or quasi projections, Douglas-Rachford, and its feasibility variant.

mod ap;
mod boxes;
mod dr;
mod product;

use std::sync::OnceLock;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use ap::ap_solve;
pub use boxes::{check_membership, project_box, AxisBox, Membership};
pub use dr::{dr_solve, drf_solve, DRF_GAMMA_BOUND};
pub use product::{cartesian_project, ProductProjection, ProductSet};

use crate::error::{Error, Result};
use crate::exact::{ExactProjector, ProjectionOutcome};
use crate::normal_form::NormalForm;
use crate::quadric::Quadric;
use crate::quasi::{quasi_project_with_center, Select, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ape,
    Apc,
    Apg,
    Dr,
    Drf,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Ape, Method::Apc, Method::Apg, Method::Dr, Method::Drf];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ape => "ape",
            Method::Apc => "apc",
            Method::Apg => "apg",
            Method::Dr => "dr",
            Method::Drf => "drf",
        }
    }

    /// Whether the method needs the eigendecomposition on every iteration.
    pub fn uses_exact_projection(self) -> bool {
        matches!(self, Method::Ape | Method::Dr | Method::Drf)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method '{s}'")))
    }
}

/// Direction used by the gradient quasi-projection after the first iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GradientAt {
    /// Gradient at the current box-projected point.
    #[default]
    Current,
    /// Gradient at the previous quadric iterate.
    Previous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub method: Method,
    pub max_iter: usize,
    pub deviation_tol: f64,
    pub box_tol: f64,
    pub gamma: f64,
    pub restart: bool,
    pub cycle_tol: f64,
    pub stall_tol: f64,
    pub max_restarts: usize,
    pub gradient_at: GradientAt,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Ape,
            max_iter: 1000,
            deviation_tol: 1e-6,
            box_tol: 1e-9,
            gamma: 0.2,
            restart: true,
            cycle_tol: 1e-10,
            stall_tol: 1e-12,
            max_restarts: 5,
            gradient_at: GradientAt::Current,
        }
    }
}

impl SolverConfig {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Feasible,
    MaxIter,
    Cycle,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Feasible => "feasible",
            Termination::MaxIter => "max_iter",
            Termination::Cycle => "cycle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    #[serde(with = "crate::serde_util::dvector")]
    pub iterate: DVector<f64>,
    /// Deviation of the box-projected iterate.
    pub deviation: f64,
    pub distance: f64,
    /// Restarts fired so far.
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    pub restarts: usize,
    /// Set when a DR-F step size lies outside the range with a convergence guarantee.
    pub gamma_warning: bool,
    /// `||z - y||` at the last DR / DR-F iteration.
    pub final_gap: Option<f64>,
}

impl IterationTrace {
    fn new() -> Self {
        Self {
            records: Vec::new(),
            termination: Termination::MaxIter,
            restarts: 0,
            gamma_warning: false,
            final_gap: None,
        }
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOutput {
    /// In the box; on the quadric up to `deviation_tol` when `Feasible`.
    #[serde(with = "crate::serde_util::dvector")]
    pub point: DVector<f64>,
    pub deviation: f64,
    pub objective: f64,
    pub trace: IterationTrace,
}

/// Quadric projections shared by the solvers; the normal form is built on first use.
#[derive(Debug)]
pub struct QuadricProjector {
    quadric: Quadric,
    center: DVector<f64>,
    exact: OnceLock<ExactProjector>,
}

impl QuadricProjector {
    pub fn new(q: &Quadric) -> Result<Self> {
        Ok(Self {
            quadric: q.clone(),
            center: q.center()?,
            exact: OnceLock::new(),
        })
    }

    pub fn quadric(&self) -> &Quadric {
        &self.quadric
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    /// Builds the normal form now if it has not been built yet.
    pub fn prepare_exact(&self) -> Result<&ExactProjector> {
        if let Some(p) = self.exact.get() {
            return Ok(p);
        }
        let built = ExactProjector::new(&self.quadric)?;
        Ok(self.exact.get_or_init(|| built))
    }

    pub fn normal_form(&self) -> Result<&NormalForm> {
        Ok(self.prepare_exact()?.normal_form())
    }

    pub fn exact(&self, x: &DVector<f64>) -> Result<ProjectionOutcome> {
        self.prepare_exact()?.project(x)
    }

    /// Quasi-projection, or `None` when the line misses or the direction degenerates.
    pub fn quasi(&self, x: &DVector<f64>, variant: &Variant, select: Select) -> Option<DVector<f64>> {
        quasi_project_with_center(&self.quadric, Some(&self.center), x, variant, select)
            .ok()
            .flatten()
    }
}

/// Shared solver state: feasibility test, best-point tracking and trace records.
pub(crate) struct Tracker<'a> {
    q: &'a Quadric,
    bx: &'a AxisBox,
    cfg: &'a SolverConfig,
    x0: &'a DVector<f64>,
    pub trace: IterationTrace,
    best: Option<(DVector<f64>, f64)>,
}

impl<'a> Tracker<'a> {
    pub fn new(q: &'a Quadric, bx: &'a AxisBox, cfg: &'a SolverConfig, x0: &'a DVector<f64>) -> Self {
        Self {
            q,
            bx,
            cfg,
            x0,
            trace: IterationTrace::new(),
            best: None,
        }
    }

    /// A feasible point derived from `z` (itself, or its clamp onto the box), if any.
    /// Also updates the best box point seen so far.
    pub fn accept(&mut self, z: &DVector<f64>) -> Option<DVector<f64>> {
        let m = check_membership(self.q, self.bx, z, self.cfg);
        if m.is_feasible(self.cfg) {
            return Some(z.clone());
        }
        let y = self.bx.clamp(z);
        let dev = self.q.eval_unchecked(&y).abs();
        if self.best.as_ref().is_none_or(|(_, d)| dev < *d) {
            self.best = Some((y.clone(), dev));
        }
        (dev <= self.cfg.deviation_tol).then_some(y)
    }

    pub fn record(&mut self, iterate: &DVector<f64>) {
        let y = self.bx.clamp(iterate);
        self.trace.records.push(IterationRecord {
            deviation: self.q.eval_unchecked(&y).abs(),
            distance: (iterate - self.x0).norm(),
            iterate: iterate.clone(),
            restarts: self.trace.restarts,
        });
    }

    pub fn finish_feasible(mut self, point: DVector<f64>) -> SolveOutput {
        self.trace.termination = Termination::Feasible;
        self.output(point)
    }

    /// Returns the best box point encountered.
    pub fn finish(mut self, termination: Termination, fallback: &DVector<f64>) -> SolveOutput {
        self.trace.termination = termination;
        let point = match self.best.take() {
            Some((p, _)) => p,
            None => self.bx.clamp(fallback),
        };
        self.output(point)
    }

    fn output(self, point: DVector<f64>) -> SolveOutput {
        SolveOutput {
            deviation: self.q.eval_unchecked(&point).abs(),
            objective: (&point - self.x0).norm(),
            point,
            trace: self.trace,
        }
    }
}

/// Escape move for a cycling or stalled iteration: a point on the quadric is
/// sent to the far intersection of its line through the center; any other
/// point is reflected through the box center and clamped.
pub fn restart_flip(q: &Quadric, bx: &AxisBox, x: &DVector<f64>, cfg: &SolverConfig) -> Result<DVector<f64>> {
    bx.check_dim(x.len())?;
    let p = QuadricProjector::new(q)?;
    Ok(flip(&p, bx, x, cfg))
}

pub(crate) fn flip(p: &QuadricProjector, bx: &AxisBox, x: &DVector<f64>, cfg: &SolverConfig) -> DVector<f64> {
    let q = p.quadric();
    let on_quadric = q.eval_unchecked(x).abs() <= cfg.deviation_tol.max(1e-9 * (1.0 + q.term_scale(x)));
    if on_quadric {
        if let Some(far) = p.quasi(x, &Variant::Center, Select::Farthest) {
            return far;
        }
    }
    bx.clamp(&(bx.center() * 2.0 - x))
}

fn check_inputs(q: &Quadric, bx: &AxisBox, x0: &DVector<f64>) -> Result<()> {
    bx.check_dim(q.dim())?;
    bx.check_dim(x0.len())
}

/// Dispatch on `cfg.method`.
pub fn solve(q: &Quadric, bx: &AxisBox, x0: &DVector<f64>, cfg: &SolverConfig) -> Result<SolveOutput> {
    let p = QuadricProjector::new(q)?;
    solve_with(&p, bx, x0, cfg)
}

/// As [`solve`], reusing a projector (and its normal form, if already built).
pub fn solve_with(p: &QuadricProjector, bx: &AxisBox, x0: &DVector<f64>, cfg: &SolverConfig) -> Result<SolveOutput> {
    check_inputs(p.quadric(), bx, x0)?;
    match cfg.method {
        Method::Ape | Method::Apc | Method::Apg => ap::ap_solve_with(p, bx, x0, cfg),
        Method::Dr => dr::dr_solve_with(p, bx, x0, cfg),
        Method::Drf => dr::drf_solve_with(p, bx, x0, cfg),
    }
}
