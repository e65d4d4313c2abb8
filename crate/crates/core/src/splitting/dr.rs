use nalgebra::DVector;

use super::{check_inputs, flip, AxisBox, Method, QuadricProjector, SolveOutput, SolverConfig, Termination, Tracker};
use crate::error::{Error, Result};
use crate::quadric::Quadric;

/// Step sizes below this bound come with a convergence guarantee for DR-F.
pub const DRF_GAMMA_BOUND: f64 = 0.224_744_871_391_588_94;

/// Douglas-Rachford: `y = P_box(x)`, `z = P_Q(2y - x)`, `x += z - y`.
pub fn dr_solve(q: &Quadric, bx: &AxisBox, x0: &DVector<f64>, cfg: &SolverConfig) -> Result<SolveOutput> {
    check_inputs(q, bx, x0)?;
    dr_solve_with(&QuadricProjector::new(q)?, bx, x0, cfg)
}

/// Douglas-Rachford on the squared-distance formulation:
/// `y = (x + gamma P_box(x)) / (1 + gamma)`, `z = P_Q(2y - x)`, `x += z - y`.
pub fn drf_solve(q: &Quadric, bx: &AxisBox, x0: &DVector<f64>, cfg: &SolverConfig) -> Result<SolveOutput> {
    check_inputs(q, bx, x0)?;
    drf_solve_with(&QuadricProjector::new(q)?, bx, x0, cfg)
}

pub(crate) fn dr_solve_with(
    p: &QuadricProjector,
    bx: &AxisBox,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<SolveOutput> {
    if cfg.method != Method::Dr {
        return Err(Error::InvalidArgument(format!("dr_solve cannot run method {}", cfg.method)));
    }
    iterate(p, bx, x0, cfg, |x| bx.clamp(x))
}

pub(crate) fn drf_solve_with(
    p: &QuadricProjector,
    bx: &AxisBox,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<SolveOutput> {
    if cfg.method != Method::Drf {
        return Err(Error::InvalidArgument(format!("drf_solve cannot run method {}", cfg.method)));
    }
    let gamma = cfg.gamma;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidGamma(gamma));
    }
    let mut out = iterate(p, bx, x0, cfg, |x| (x + bx.clamp(x) * gamma) / (1.0 + gamma))?;
    out.trace.gamma_warning = gamma >= DRF_GAMMA_BOUND;
    Ok(out)
}

fn iterate(
    p: &QuadricProjector,
    bx: &AxisBox,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
    box_step: impl Fn(&DVector<f64>) -> DVector<f64>,
) -> Result<SolveOutput> {
    let mut tracker = Tracker::new(p.quadric(), bx, cfg, x0);
    let mut x = x0.clone();
    for _ in 0..cfg.max_iter {
        let y = box_step(&x);
        let z = p.exact(&(&y * 2.0 - &x))?.point;
        let step = &z - &y;
        let gap = step.norm();
        tracker.trace.final_gap = Some(gap);
        tracker.record(&z);
        if let Some(point) = tracker.accept(&z) {
            return Ok(tracker.finish_feasible(point));
        }
        x += step;
        if gap <= cfg.stall_tol {
            if !cfg.restart || tracker.trace.restarts >= cfg.max_restarts {
                return Ok(tracker.finish(Termination::Cycle, &z));
            }
            x = flip(p, bx, &x, cfg);
            tracker.trace.restarts += 1;
        }
    }
    Ok(tracker.finish(Termination::MaxIter, &x))
}
