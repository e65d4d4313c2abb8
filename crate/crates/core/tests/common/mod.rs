//! Independent reference computations for integration tests. Nothing here
//! calls into the projection code of the library.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use quadproj::Quadric;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

/// Haar-ish random orthogonal matrix from the QR factorization of a Gaussian matrix.
pub fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// A quadric whose normal form is `sum lambda_i z_i^2 = 1` in the frame
/// `z = R^T (x - d)`, scaled by `s` (negative `s` flips the sign of `Psi`).
#[derive(Debug, Clone)]
pub struct Lifted {
    pub quadric: Quadric,
    pub x0: DVector<f64>,
    pub lambdas: Vec<f64>,
    pub z0: Vec<f64>,
    pub rotation: DMatrix<f64>,
    pub center: DVector<f64>,
    pub scale: f64,
}

impl Lifted {
    pub fn to_normal(&self, x: &DVector<f64>) -> DVector<f64> {
        self.rotation.tr_mul(&(x - &self.center))
    }

    pub fn to_original(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.rotation * z + &self.center
    }
}

pub fn lift(rng: &mut ChaCha8Rng, lambdas: &[f64], z0: &[f64]) -> Lifted {
    let magnitude = rng.random_range(0.5..2.0);
    let scale = if rng.random_bool(0.5) { magnitude } else { -magnitude };
    lift_scaled(rng, lambdas, z0, scale)
}

pub fn lift_scaled(rng: &mut ChaCha8Rng, lambdas: &[f64], z0: &[f64], scale: f64) -> Lifted {
    let n = lambdas.len();
    let rotation = random_rotation(rng, n);
    let center = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
    let m = &rotation * DMatrix::from_diagonal(&v(lambdas)) * rotation.transpose();
    let b = (&m + m.transpose()) * (0.5 * scale);
    let lin = -(&b * &center) * 2.0;
    let c = center.dot(&(&b * &center)) - scale;
    let quadric = Quadric::new(b, lin, c).unwrap();
    let x0 = &rotation * v(z0) + &center;
    Lifted {
        quadric,
        x0,
        lambdas: lambdas.to_vec(),
        z0: z0.to_vec(),
        rotation,
        center,
        scale,
    }
}

/// `|x^T B x| + |b^T x| + |c|`: floating-point scale of `Psi(x)`.
pub fn psi_scale(q: &Quadric, x: &DVector<f64>) -> f64 {
    x.dot(&(q.matrix() * x)).abs() + q.linear().dot(x).abs() + q.constant().abs()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn secular(lambdas: &[f64], z0: &[f64], mu: f64) -> f64 {
    lambdas
        .iter()
        .zip(z0)
        .filter(|(_, &x)| x != 0.0)
        .map(|(&l, &x)| l * (x / (1.0 + mu * l)).powi(2))
        .sum::<f64>()
        - 1.0
}

fn x_of_mu(lambdas: &[f64], z0: &[f64], mu: f64) -> Vec<f64> {
    lambdas
        .iter()
        .zip(z0)
        .map(|(&l, &x)| if x == 0.0 { 0.0 } else { x / (1.0 + mu * l) })
        .collect()
}

/// Pole-free interval of the secular function around `mu = 0`.
pub fn secular_interval(lambdas: &[f64], z0: &[f64]) -> (f64, f64) {
    let mut e1 = f64::NEG_INFINITY;
    let mut e2 = f64::INFINITY;
    for (&l, &x) in lambdas.iter().zip(z0) {
        if x == 0.0 {
            continue;
        }
        if l > 0.0 {
            e1 = e1.max(-1.0 / l);
        } else {
            e2 = e2.min(-1.0 / l);
        }
    }
    (e1, e2)
}

pub fn secular_value(lambdas: &[f64], z0: &[f64], mu: f64) -> f64 {
    secular(lambdas, z0, mu)
}

/// Maps `t` in (0, 1) onto the interval, dense near finite ends.
pub fn interval_map(lambdas: &[f64], e1: f64, e2: f64, t: f64) -> f64 {
    let span = lambdas.iter().map(|l| 1.0 / l.abs()).fold(0.0, f64::max) * 10.0;
    match (e1.is_finite(), e2.is_finite()) {
        (true, true) => e1 + (e2 - e1) * t,
        (true, false) => e1 + span * (t / (1.0 - t)),
        (false, true) => e2 - span * ((1.0 - t) / t),
        (false, false) => span * (2.0 * t - 1.0) / (t * (1.0 - t)),
    }
}

/// All roots of the secular function on its pole-free interval around 0,
/// located on a dense grid and refined by bisection.
pub fn secular_roots(lambdas: &[f64], z0: &[f64]) -> Vec<f64> {
    let (e1, e2) = secular_interval(lambdas, z0);
    if e1 == f64::NEG_INFINITY && e2 == f64::INFINITY {
        return Vec::new();
    }
    let map = |t: f64| interval_map(lambdas, e1, e2, t);
    let n = 20_000;
    let ts: Vec<f64> = (1..n)
        .map(|k| 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / n as f64).cos()))
        .collect();
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &t in &ts {
        let mu = map(t);
        let f = secular(lambdas, z0, mu);
        if f == 0.0 {
            roots.push(mu);
        }
        if let Some((pm, pf)) = prev {
            if pf * f < 0.0 {
                let (mut lo, mut hi) = (pm, mu);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if secular(lambdas, z0, mid) * pf > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
        }
        prev = Some((mu, f));
    }
    roots
}

/// Points `x(mu)` at the secular roots, rescaled onto the quadric.
pub fn root_points(lambdas: &[f64], z0: &[f64]) -> Vec<Vec<f64>> {
    secular_roots(lambdas, z0)
        .into_iter()
        .map(|mu| {
            let x = x_of_mu(lambdas, z0, mu);
            let s: f64 = lambdas.iter().zip(&x).map(|(l, v)| l * v * v).sum();
            x.iter().map(|v| v / s.sqrt()).collect()
        })
        .collect()
}

/// Points on the sphere of KKT points attached to each eigenvalue whose
/// coordinates all vanish in `z0` (exact equality of eigenvalues).
pub fn pole_points(lambdas: &[f64], z0: &[f64]) -> Vec<Vec<f64>> {
    let n = lambdas.len();
    let mut out = Vec::new();
    let mut seen = Vec::new();
    for i in 0..n {
        let lb = lambdas[i];
        if seen.contains(&lb) {
            continue;
        }
        seen.push(lb);
        let group: Vec<usize> = (0..n).filter(|&j| lambdas[j] == lb).collect();
        if group.iter().any(|&j| z0[j] != 0.0) {
            continue;
        }
        let mut x = vec![0.0; n];
        let mut sum = 0.0;
        for j in (0..n).filter(|j| !group.contains(j)) {
            x[j] = z0[j] / (1.0 - lambdas[j] / lb);
            sum += lambdas[j] * x[j] * x[j];
        }
        let arg = (1.0 - sum) / lb;
        if arg > 0.0 {
            x[group[0]] = arg.sqrt();
            out.push(x);
        }
    }
    out
}

/// Distance from `z0` to the nearest root or pole point.
pub fn candidate_oracle(lambdas: &[f64], z0: &[f64]) -> f64 {
    if secular(lambdas, z0, 0.0) == 0.0 {
        return 0.0;
    }
    root_points(lambdas, z0)
        .iter()
        .chain(pole_points(lambdas, z0).iter())
        .map(|x| dist(x, z0))
        .fold(f64::INFINITY, f64::min)
}

/// Minimizes `f` over a 1D or 2D parameter box: dense grid, then compass
/// search from the best grid points.
fn grid_then_refine(f: &dyn Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], per_axis: usize) -> f64 {
    let dim = lo.len();
    let steps: Vec<f64> = (0..dim).map(|k| (hi[k] - lo[k]) / per_axis as f64).collect();
    let total = per_axis.pow(dim as u32);
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    let keep = 8;
    let mut p = vec![0.0; dim];
    for idx in 0..total {
        let mut r = idx;
        for k in 0..dim {
            p[k] = lo[k] + (r % per_axis) as f64 * steps[k] + 0.5 * steps[k];
            r /= per_axis;
        }
        let val = f(&p);
        if best.len() < keep || val < best[keep - 1].0 {
            best.push((val, p.clone()));
            best.sort_by(|a, b| a.0.total_cmp(&b.0));
            best.truncate(keep);
        }
    }
    let mut overall = f64::INFINITY;
    for (mut val, mut p) in best {
        let mut step = steps.clone();
        let mut evals = 0;
        while step.iter().any(|s| *s > 1e-14) && evals < 20_000 {
            let mut improved = false;
            for k in 0..dim {
                for sgn in [-1.0, 1.0] {
                    let mut q = p.clone();
                    q[k] += sgn * step[k];
                    let fq = f(&q);
                    evals += 1;
                    if fq < val {
                        val = fq;
                        p = q;
                        improved = true;
                    }
                }
            }
            if !improved {
                step.iter_mut().for_each(|s| *s *= 0.5);
            }
        }
        overall = overall.min(val);
    }
    overall
}

/// Brute-force distance from `z0` to `sum lambda z^2 = 1` by sampling the
/// standard parametrizations of 2D/3D central quadrics (about 1e6 samples)
/// and refining locally. `None` for unsupported signatures.
pub fn parametric_oracle(lambdas: &[f64], z0: &[f64]) -> Option<f64> {
    let axes: Vec<f64> = lambdas.iter().map(|l| 1.0 / l.abs().sqrt()).collect();
    let positives = lambdas.iter().filter(|&&l| l > 0.0).count();
    let norm0 = z0.iter().map(|x| x * x).sum::<f64>().sqrt();
    // no minimizer lies farther from the origin than this
    let reach = norm0 + norm0 + axes[0] + 1.0;
    let hyper_range = |a: f64| (reach / a).asinh() + 1.0;
    let tau = std::f64::consts::TAU;
    let pi = std::f64::consts::PI;
    match (lambdas.len(), positives) {
        (2, 2) => {
            let (a, b) = (axes[0], axes[1]);
            let f = |p: &[f64]| dist(&[a * p[0].cos(), b * p[0].sin()], z0);
            Some(grid_then_refine(&f, &[0.0], &[tau], 1_000_000))
        }
        (2, 1) => {
            let (a, b) = (axes[0], axes[1]);
            let u = hyper_range(b.min(a));
            let mut best = f64::INFINITY;
            for sheet in [1.0, -1.0] {
                let f = |p: &[f64]| dist(&[sheet * a * p[0].cosh(), b * p[0].sinh()], z0);
                best = best.min(grid_then_refine(&f, &[-u], &[u], 500_000));
            }
            Some(best)
        }
        (3, 3) => {
            let (a, b, c) = (axes[0], axes[1], axes[2]);
            let f = |p: &[f64]| {
                let (st, ct) = p[0].sin_cos();
                let (sp, cp) = p[1].sin_cos();
                dist(&[a * st * cp, b * st * sp, c * ct], z0)
            };
            Some(grid_then_refine(&f, &[0.0, 0.0], &[pi, tau], 1000))
        }
        (3, 2) => {
            let (a, b, c) = (axes[0], axes[1], axes[2]);
            let u = hyper_range(c.min(a).min(b));
            let f = |p: &[f64]| {
                let (sp, cp) = p[1].sin_cos();
                dist(&[a * p[0].cosh() * cp, b * p[0].cosh() * sp, c * p[0].sinh()], z0)
            };
            Some(grid_then_refine(&f, &[-u, 0.0], &[u, tau], 1000))
        }
        (3, 1) => {
            let (a, b, c) = (axes[0], axes[1], axes[2]);
            let u = hyper_range(a.min(b).min(c));
            let mut best = f64::INFINITY;
            for sheet in [1.0, -1.0] {
                let f = |p: &[f64]| {
                    let (sp, cp) = p[1].sin_cos();
                    dist(&[sheet * a * p[0].cosh(), b * p[0].sinh() * cp, c * p[0].sinh() * sp], z0)
                };
                best = best.min(grid_then_refine(&f, &[0.0, 0.0], &[u, tau], 708));
            }
            Some(best)
        }
        _ => None,
    }
}

/// Best of the parametrization and candidate oracles.
pub fn oracle_distance(lambdas: &[f64], z0: &[f64]) -> f64 {
    let c = candidate_oracle(lambdas, z0);
    match parametric_oracle(lambdas, z0) {
        Some(p) => c.min(p),
        None => c,
    }
}

/// Normal-form test problem in 2D or 3D covering ellipses, hyperbolas,
/// all 3D central signatures, zero components and repeated eigenvalues.
pub fn random_normal_problem(rng: &mut ChaCha8Rng, kind: usize) -> (Vec<f64>, Vec<f64>) {
    let mag = |rng: &mut ChaCha8Rng| rng.random_range(0.2..5.0);
    let mut l: Vec<f64> = match kind % 8 {
        0 => vec![mag(rng), mag(rng)],
        1 => vec![mag(rng), -mag(rng)],
        2 => {
            let t = mag(rng);
            vec![t, t]
        }
        3 => vec![mag(rng), mag(rng), mag(rng)],
        4 => vec![mag(rng), mag(rng), -mag(rng)],
        5 => vec![mag(rng), -mag(rng), -mag(rng)],
        6 => {
            let t = mag(rng);
            let s = if rng.random_bool(0.5) { mag(rng) } else { -mag(rng) };
            vec![t, t, s]
        }
        _ => {
            let t = mag(rng);
            vec![mag(rng), -t, -t]
        }
    };
    l.sort_by(|a, b| b.total_cmp(a));
    let n = l.len();
    let mut z: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    // about half of the problems get zero coordinates
    if rng.random_bool(0.5) {
        let zeros = rng.random_range(1..=n);
        for _ in 0..zeros {
            let i = rng.random_range(0..n);
            z[i] = 0.0;
        }
    }
    (l, z)
}
