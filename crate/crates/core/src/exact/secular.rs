//! The secular function `f(mu) = sum_{i: x0_i != 0} lambda_i (x0_i / (1 + mu lambda_i))^2 - 1`
//! and the interval on which its relevant root lives.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::normal_form::NormalizedProblem;

/// `mu` is rejected when `|1 + mu lambda_i|` drops below this for an active component.
pub const POLE_TOL: f64 = 1e-14;

/// Open interval `(e1, e2)` between the poles that bracket `mu = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecularInterval {
    pub e1: f64,
    pub e2: f64,
}

impl SecularInterval {
    pub fn contains(&self, mu: f64) -> bool {
        mu > self.e1 && mu < self.e2
    }
}

/// Value, derivative and magnitude of the summed terms at one `mu`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SecularEval {
    pub value: f64,
    pub derivative: f64,
    /// `max(1, sum |lambda_i| x_i(mu)^2)`: scale for residual tolerances.
    pub scale: f64,
}

pub(crate) fn eval(np: &NormalizedProblem, mu: f64) -> SecularEval {
    let mut value = -1.0;
    let mut derivative = 0.0;
    let mut mag = 0.0;
    for (&l, &x) in np.lambdas.iter().zip(np.x0.iter()) {
        if x == 0.0 {
            continue;
        }
        let denom = 1.0 + mu * l;
        let xi = x / denom;
        let term = l * xi * xi;
        value += term;
        mag += term.abs();
        derivative -= 2.0 * term * l / denom;
    }
    SecularEval {
        value,
        derivative,
        scale: mag.max(1.0),
    }
}

fn check_pole(np: &NormalizedProblem, mu: f64) -> Result<()> {
    let hit = np
        .lambdas
        .iter()
        .zip(np.x0.iter())
        .any(|(&l, &x)| x != 0.0 && (1.0 + mu * l).abs() <= POLE_TOL);
    if hit {
        return Err(Error::PoleEvaluation { mu });
    }
    Ok(())
}

pub fn secular_f(mu: f64, np: &NormalizedProblem) -> Result<f64> {
    check_pole(np, mu)?;
    Ok(eval(np, mu).value)
}

/// `f'(mu) = -2 sum (lambda_i x0_i)^2 / (1 + mu lambda_i)^3`.
pub fn secular_f_prime(mu: f64, np: &NormalizedProblem) -> Result<f64> {
    check_pole(np, mu)?;
    Ok(eval(np, mu).derivative)
}

/// `e1 = max{-1/lambda_i : lambda_i > 0, x0_i != 0}` (or `-inf`),
/// `e2 = min{-1/lambda_i : lambda_i < 0, x0_i != 0}` (or `+inf`).
pub fn interval_endpoints(np: &NormalizedProblem) -> SecularInterval {
    let mut e1 = f64::NEG_INFINITY;
    let mut e2 = f64::INFINITY;
    for (&l, &x) in np.lambdas.iter().zip(np.x0.iter()) {
        if x == 0.0 {
            continue;
        }
        if l > 0.0 {
            e1 = e1.max(-1.0 / l);
        } else if l < 0.0 {
            e2 = e2.min(-1.0 / l);
        }
    }
    SecularInterval { e1, e2 }
}

/// `x_i(mu) = x0_i / (1 + mu lambda_i)`.
pub(crate) fn point_at(np: &NormalizedProblem, mu: f64) -> nalgebra::DVector<f64> {
    np.x0.zip_map(&np.lambdas, |x, l| if x == 0.0 { 0.0 } else { x / (1.0 + mu * l) })
}
