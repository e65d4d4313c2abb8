use nalgebra::DVector;

use super::{check_inputs, flip, AxisBox, GradientAt, Method, QuadricProjector, SolveOutput, SolverConfig, Termination, Tracker};
use crate::error::{Error, Result};
use crate::quadric::Quadric;
use crate::quasi::{Select, Variant};

/// Alternating projections between the box and the quadric. The quadric step
/// is exact (`Ape`) or a closest quasi-projection along the center (`Apc`) or
/// gradient (`Apg`) direction, falling back to the exact projection when the
/// line misses the quadric.
pub fn ap_solve(q: &Quadric, bx: &AxisBox, x0: &DVector<f64>, cfg: &SolverConfig) -> Result<SolveOutput> {
    check_inputs(q, bx, x0)?;
    ap_solve_with(&QuadricProjector::new(q)?, bx, x0, cfg)
}

pub(crate) fn ap_solve_with(
    p: &QuadricProjector,
    bx: &AxisBox,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<SolveOutput> {
    if !matches!(cfg.method, Method::Ape | Method::Apc | Method::Apg) {
        return Err(Error::InvalidArgument(format!(
            "alternating projections cannot run method {}",
            cfg.method
        )));
    }
    let q = p.quadric();
    let mut tracker = Tracker::new(q, bx, cfg, x0);
    if let Some(point) = tracker.accept(x0) {
        return Ok(tracker.finish_feasible(point));
    }

    // x^{k-2}, x^{k-1}
    let mut history: [Option<DVector<f64>>; 2] = [None, None];
    let mut x = x0.clone();
    for k in 1..=cfg.max_iter {
        let y = bx.clamp(&x);
        let mut next = project_quadric(p, &y, &x, k, cfg)?;
        tracker.record(&next);
        if let Some(point) = tracker.accept(&next) {
            return Ok(tracker.finish_feasible(point));
        }
        let cycling = history[0]
            .as_ref()
            .is_some_and(|old| (&next - old).norm() <= cfg.cycle_tol * next.norm().max(1.0));
        if cycling {
            if !cfg.restart || tracker.trace.restarts >= cfg.max_restarts {
                return Ok(tracker.finish(Termination::Cycle, &next));
            }
            next = flip(p, bx, &next, cfg);
            tracker.trace.restarts += 1;
            history = [None, None];
        }
        history = [history[1].take(), Some(next.clone())];
        x = next;
    }
    Ok(tracker.finish(Termination::MaxIter, &x))
}

/// Quadric step of iteration `k` from the box point `y`; `prev` is the previous quadric iterate.
fn project_quadric(
    p: &QuadricProjector,
    y: &DVector<f64>,
    prev: &DVector<f64>,
    k: usize,
    cfg: &SolverConfig,
) -> Result<DVector<f64>> {
    let variant = match cfg.method {
        Method::Apc => Some(Variant::Center),
        Method::Apg if k == 1 => Some(Variant::Custom(y - p.center())),
        Method::Apg => Some(match cfg.gradient_at {
            GradientAt::Current => Variant::Gradient,
            GradientAt::Previous => Variant::Custom(p.quadric().grad_unchecked(prev)),
        }),
        _ => None,
    };
    if let Some(variant) = variant {
        if let Some(x) = p.quasi(y, &variant, Select::Closest) {
            return Ok(x);
        }
    }
    Ok(p.exact(y)?.point)
}
