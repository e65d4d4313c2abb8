//! Root finding for the secular function: safeguarded Newton, the positive
//! starting-point search, and the two-sided "double Newton" scheme.

use serde::Serialize;

use super::secular::{self, SecularInterval};
use crate::error::{Error, Result};
use crate::normal_form::NormalizedProblem;

/// Default residual tolerance, relative to `max(1, sum |lambda_i| x_i(mu)^2)`.
pub const ROOT_TOL: f64 = 1e-12;
pub const ROOT_MAX_ITER: usize = 100;
/// Halvings allowed when searching a starting point next to a pole.
pub const START_SEARCH_HALVINGS: usize = 200;

/// Result of a root search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootResult {
    pub mu: f64,
    /// Newton updates performed (0 when the start already satisfied the tolerance).
    pub iterations: usize,
    /// `|f|` at each visited iterate, starting point included.
    pub residuals: Vec<f64>,
}

/// Sign bracket `lo < root < hi` with `f(lo) > 0 > f(hi)`.
#[derive(Debug, Clone, Copy)]
struct Bracket {
    lo: f64,
    hi: f64,
}

impl Bracket {
    fn update(&mut self, mu: f64, value: f64) {
        if value > 0.0 {
            self.lo = self.lo.max(mu);
        } else {
            self.hi = self.hi.min(mu);
        }
    }

    fn contains(&self, mu: f64) -> bool {
        mu > self.lo && mu < self.hi
    }

    fn collapsed(&self) -> bool {
        self.lo.is_finite()
            && self.hi.is_finite()
            && self.hi - self.lo <= 4.0 * f64::EPSILON * self.lo.abs().max(self.hi.abs())
    }

    /// Fallback point when a Newton step leaves the bracket.
    fn fallback(&self, mu: f64) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => mu.max(self.lo) + (mu - self.lo).abs().max(1.0),
            (false, true) => mu.min(self.hi) - (self.hi - mu).abs().max(1.0),
            (false, false) => mu,
        }
    }
}

/// One Newton sequence sharing a bracket with its siblings.
struct NewtonSeq {
    mu: f64,
    residuals: Vec<f64>,
    iterations: usize,
    best: (f64, f64),
}

enum Step {
    Converged,
    Stalled,
    Continue,
}

impl NewtonSeq {
    fn new(mu: f64) -> Self {
        Self {
            mu,
            residuals: Vec::new(),
            iterations: 0,
            best: (mu, f64::INFINITY),
        }
    }

    /// Evaluate at the current iterate; on failure to converge, move to the next one.
    fn step(&mut self, np: &NormalizedProblem, bracket: &mut Bracket, tol: f64) -> Step {
        let ev = secular::eval(np, self.mu);
        let residual = ev.value.abs();
        self.residuals.push(residual);
        if residual / ev.scale < self.best.1 {
            self.best = (self.mu, residual / ev.scale);
        }
        if residual <= tol * ev.scale {
            return Step::Converged;
        }
        bracket.update(self.mu, ev.value);
        if bracket.collapsed() {
            return Step::Stalled;
        }
        let mut next = self.mu - ev.value / ev.derivative;
        if !next.is_finite() || !bracket.contains(next) {
            next = bracket.fallback(self.mu);
        }
        if next == self.mu {
            return Step::Stalled;
        }
        self.mu = next;
        self.iterations += 1;
        Step::Continue
    }

    fn into_result(self) -> RootResult {
        RootResult {
            mu: self.mu,
            iterations: self.iterations,
            residuals: self.residuals,
        }
    }

    /// Result at the best iterate, used when floating point prevents reaching `tol`.
    fn into_best(self) -> RootResult {
        RootResult {
            mu: self.best.0,
            iterations: self.iterations,
            residuals: self.residuals,
        }
    }
}

/// Newton's method on `f` from `start`, kept inside the open interval by
/// falling back to the midpoint of the current sign bracket.
pub fn newton_guarded(
    np: &NormalizedProblem,
    interval: SecularInterval,
    start: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RootResult> {
    if !interval.contains(start) {
        return Err(Error::InvalidArgument(format!(
            "start {start} outside ({}, {})",
            interval.e1, interval.e2
        )));
    }
    let mut bracket = Bracket {
        lo: interval.e1,
        hi: interval.e2,
    };
    let mut seq = NewtonSeq::new(start);
    for _ in 0..=max_iter {
        match seq.step(np, &mut bracket, tol) {
            Step::Converged => return Ok(seq.into_result()),
            Step::Stalled => return Ok(seq.into_best()),
            Step::Continue => {}
        }
    }
    Err(Error::NoConvergence {
        best: seq.best.0,
        residual: seq.best.1,
        iterations: seq.iterations,
    })
}

/// Finds `mu0 in (e1, 0]` with `f(mu0) > 0` by halving the distance to `e1`.
pub fn find_positive_start(np: &NormalizedProblem, e1: f64) -> Result<f64> {
    if !e1.is_finite() || e1 >= 0.0 {
        return Err(Error::NotFound);
    }
    if secular::eval(np, 0.0).value > 0.0 {
        return Ok(0.0);
    }
    let mut upper = 0.0;
    for _ in 0..START_SEARCH_HALVINGS {
        let mid = 0.5 * (e1 + upper);
        if mid <= e1 || mid >= upper {
            break;
        }
        if secular::eval(np, mid).value > 0.0 {
            return Ok(mid);
        }
        upper = mid;
    }
    Err(Error::NotFound)
}

/// Bisection from 0 toward `end` until the sign of `f` matches `want_positive`.
fn search_sign(np: &NormalizedProblem, end: f64, want_positive: bool) -> Result<f64> {
    let mut inner = 0.0;
    for _ in 0..START_SEARCH_HALVINGS {
        let mid = 0.5 * (inner + end);
        if mid == inner || mid == end {
            break;
        }
        let v = secular::eval(np, mid).value;
        if (v > 0.0) == want_positive && v != 0.0 {
            return Ok(mid);
        }
        inner = mid;
    }
    Err(Error::NotFound)
}

/// Two interleaved Newton sequences, one from 0 and one from a bisection
/// point on the other side of the root; the first to converge wins.
pub fn double_newton(np: &NormalizedProblem, interval: SecularInterval) -> Result<RootResult> {
    double_newton_with(np, interval, ROOT_TOL, ROOT_MAX_ITER)
}

pub fn double_newton_with(
    np: &NormalizedProblem,
    interval: SecularInterval,
    tol: f64,
    max_iter: usize,
) -> Result<RootResult> {
    if !interval.e1.is_finite() || !interval.e2.is_finite() {
        return Err(Error::InvalidArgument(
            "double Newton needs finite interval endpoints".into(),
        ));
    }
    let at_zero = secular::eval(np, 0.0);
    if at_zero.value.abs() <= tol * at_zero.scale {
        return Ok(RootResult {
            mu: 0.0,
            iterations: 0,
            residuals: vec![at_zero.value.abs()],
        });
    }
    let other = if at_zero.value < 0.0 {
        search_sign(np, interval.e1, true)?
    } else {
        search_sign(np, interval.e2, false)?
    };
    let mut bracket = Bracket {
        lo: 0.0_f64.min(other),
        hi: 0.0_f64.max(other),
    };
    let mut seqs = [NewtonSeq::new(0.0), NewtonSeq::new(other)];
    let mut stalled = [false, false];
    for _ in 0..=max_iter {
        for k in 0..2 {
            if stalled[k] {
                continue;
            }
            match seqs[k].step(np, &mut bracket, tol) {
                Step::Converged => {
                    let [a, b] = seqs;
                    return Ok(if k == 0 { a } else { b }.into_result());
                }
                Step::Stalled => stalled[k] = true,
                Step::Continue => {}
            }
        }
        if stalled[0] && stalled[1] {
            let [a, b] = seqs;
            let winner = if a.best.1 <= b.best.1 { a } else { b };
            return Ok(winner.into_best());
        }
    }
    let [a, b] = seqs;
    let winner = if a.best.1 <= b.best.1 { a } else { b };
    Err(Error::NoConvergence {
        best: winner.best.0,
        residual: winner.best.1,
        iterations: winner.iterations,
    })
}
