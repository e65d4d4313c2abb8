use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};

use super::{Family, Instance, InstanceSpec};
use crate::error::{Error, Result};
use crate::exact::project_exact;
use crate::linalg::symmetric_eig;
use crate::quadric::Quadric;
use crate::splitting::AxisBox;

/// Redraws allowed before giving up on an instance.
pub const MAX_ATTEMPTS: usize = 100;
/// `|Psi(p)| / (1 + |c|)` allowed for the point the box is built around.
const FEASIBLE_POINT_TOL: f64 = 1e-9;

fn normal(mean: f64, sd: f64) -> Normal<f64> {
    Normal::new(mean, sd).expect("finite positive standard deviation")
}

fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Box `[p - u, p + v]`, `u, v ~ U(0.2, 1.0) * halfwidth`.
fn box_around(rng: &mut ChaCha8Rng, p: &DVector<f64>, halfwidth: f64) -> AxisBox {
    let offsets = Uniform::new(0.2, 1.0).expect("valid range");
    let lower = p.map(|c| c - offsets.sample(rng) * halfwidth);
    let upper = p.map(|c| c + offsets.sample(rng) * halfwidth);
    AxisBox::new(lower, upper).expect("lower < upper by construction")
}

fn check_spec(spec: &InstanceSpec) -> Result<()> {
    if spec.dim < 2 {
        return Err(Error::InvalidArgument(format!("dimension {} < 2", spec.dim)));
    }
    if !(spec.box_halfwidth > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "box halfwidth {} must be positive",
            spec.box_halfwidth
        )));
    }
    Ok(())
}

/// `A ~ N(1, 1)` entrywise, `B = (A + A^T)/2`, `b ~ N(0, I)`, `c ~ N(-1, 1)`.
/// Ellipsoids shift `B` by `(1 - lambda_min) I` when `lambda_min < 1`;
/// hyperboloids are redrawn until `B` has a negative eigenvalue.
fn draw_random_quadric(rng: &mut ChaCha8Rng, n: usize, family: Family) -> Result<Option<Quadric>> {
    let entry = normal(1.0, 1.0);
    let a = DMatrix::from_fn(n, n, |_, _| entry.sample(rng));
    let mut b = (&a + a.transpose()) * 0.5;
    let lin = gaussian_vector(rng, n);
    let c = normal(-1.0, 1.0).sample(rng);
    let eig = symmetric_eig(&b)?;
    let lambda_min = eig.values[n - 1];
    match family {
        Family::Ellipsoid if lambda_min < 1.0 => {
            for i in 0..n {
                b[(i, i)] += 1.0 - lambda_min;
            }
        }
        Family::Hyperboloid if lambda_min >= 0.0 => return Ok(None),
        _ => {}
    }
    Ok(Some(Quadric::new(b, lin, c)?))
}

/// Off-diagonal `B ~ N(0, 1e-5^2)`, diagonal `N(1e-4, 2e-5^2)` clipped positive,
/// `b ~ N(1, 0.01^2)`, `c ~ N(-100, 1)`.
fn draw_power_quadric(rng: &mut ChaCha8Rng, n: usize) -> Result<Quadric> {
    let off = normal(0.0, 1e-5);
    let diag = normal(1e-4, 2e-5);
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        b[(i, i)] = diag.sample(rng).max(1e-6);
        for j in (i + 1)..n {
            let v = off.sample(rng);
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    let lin_dist = normal(1.0, 0.01);
    let lin = DVector::from_fn(n, |_, _| lin_dist.sample(rng));
    let c = normal(-100.0, 1.0).sample(rng);
    Quadric::new(b, lin, c)
}

/// A point on the quadric: the exact projection of `seed_point`.
fn feasible_point(q: &Quadric, seed_point: &DVector<f64>) -> Option<DVector<f64>> {
    let p = project_exact(q, seed_point).ok()?.point;
    (q.eval_unchecked(&p).abs() <= FEASIBLE_POINT_TOL * (1.0 + q.constant().abs())).then_some(p)
}

/// Random ellipsoid or hyperboloid with a box around one of its points and a
/// start point drawn uniformly in the box.
pub fn gen_random_instance(spec: &InstanceSpec) -> Result<Instance> {
    check_spec(spec)?;
    if spec.family == Family::PowerStyle {
        return gen_power_style(spec);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.dim;
    for _ in 0..MAX_ATTEMPTS {
        let Some(q) = draw_random_quadric(&mut rng, n, spec.family)? else {
            continue;
        };
        if !q.validation_report().is_valid() {
            continue;
        }
        let Some(p) = feasible_point(&q, &gaussian_vector(&mut rng, n)) else {
            continue;
        };
        let bx = box_around(&mut rng, &p, spec.box_halfwidth);
        let x0 = DVector::from_fn(n, |i, _| rng.random_range(bx.lower()[i]..=bx.upper()[i]));
        return Ok(Instance {
            quadric: q,
            bx,
            x0,
            feasible_point: p,
        });
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}

/// Power-system-like quadric (small quadratic terms, linear part near 1,
/// constant near -100) with the start point inside the box within
/// `0.04 ||p||` of a point `p` on the quadric.
pub fn gen_power_style(spec: &InstanceSpec) -> Result<Instance> {
    check_spec(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.dim;
    for _ in 0..MAX_ATTEMPTS {
        let q = draw_power_quadric(&mut rng, n)?;
        if !q.validation_report().is_valid() {
            continue;
        }
        let Some(p) = feasible_point(&q, &gaussian_vector(&mut rng, n)) else {
            continue;
        };
        let bx = box_around(&mut rng, &p, spec.box_halfwidth);
        let dir = gaussian_vector(&mut rng, n);
        let radius = rng.random_range(0.0..0.04) * p.norm();
        let x0 = bx.clamp(&(&p + dir.normalize() * radius));
        return Ok(Instance {
            quadric: q,
            bx,
            x0,
            feasible_point: p,
        });
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}
