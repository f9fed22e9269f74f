//! All roots of a complex polynomial by simultaneous (Aberth-Ehrlich) iteration.
//!
//! Coefficients are given from low to high degree. Leading coefficients below
//! `1e-14 · max|c|` are stripped (degree drop) and exact zero trailing
//! coefficients are returned as exact roots at the origin. Initial guesses are
//! placed on circles whose radii come from the upper convex hull of
//! `(k, ln|c_k|)` (Newton polygon), which keeps the iteration robust for root
//! sets spread over several orders of magnitude as well as for clusters near
//! the unit circle.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{HardyError, Result};

const DEGREE_DROP: f64 = 1e-14;
const MAX_ITER: usize = 800;
const RESIDUAL_TOL: f64 = 1e-10;

/// Horner evaluation, coefficients low to high.
pub fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Coefficients (low to high) of the monic polynomial with the given roots.
pub fn polynomial_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= ck * r;
        }
        c = next;
    }
    c
}

/// All roots, with multiplicity, of the polynomial `Σ c_k z^k`.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(HardyError::invalid("non-finite polynomial coefficient"));
    }
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Err(HardyError::invalid("all polynomial coefficients are zero"));
    }
    let mut hi = coeffs.len();
    while hi > 0 && coeffs[hi - 1].norm() <= DEGREE_DROP * max {
        hi -= 1;
    }
    let reduced = &coeffs[..hi];
    let zeros_at_origin = reduced.iter().take_while(|c| c.norm() == 0.0).count();
    let body = &reduced[zeros_at_origin..];

    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    let degree = body.len() - 1;
    match degree {
        0 => {}
        1 => roots.push(-body[0] / body[1]),
        _ => roots.extend(aberth(body)?),
    }
    Ok(roots)
}

fn initial_guesses(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let logs: Vec<f64> = coeffs
        .iter()
        .map(|c| if c.norm() > 0.0 { c.norm().ln() } else { f64::NEG_INFINITY })
        .collect();
    // Upper convex hull of (k, ln|c_k|).
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..=n {
        if logs[k] == f64::NEG_INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let (i, j) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (j - i) as f64 * (logs[k] - logs[i]) - (k - i) as f64 * (logs[j] - logs[i]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut guesses = Vec::with_capacity(n);
    let sigma = 0.7;
    for w in hull.windows(2) {
        let (i, j) = (w[0], w[1]);
        let count = j - i;
        let radius = ((logs[i] - logs[j]) / count as f64).exp();
        for m in 0..count {
            let angle = 2.0 * PI * m as f64 / count as f64 + 2.0 * PI * i as f64 / n as f64 + sigma;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}

fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let mut z = initial_guesses(coeffs);
    debug_assert_eq!(z.len(), n);
    let mut done = vec![false; n];
    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = eval_with_derivative(coeffs, z[i]);
            if p.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let step = ratio / (1.0 - ratio * sum);
            if !step.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    // Newton polish, accepting a step only when it reduces the residual.
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval_with_derivative(coeffs, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let cand = *r - p / dp;
            if poly_eval(coeffs, cand).norm() < p.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for r in &z {
        if !r.is_finite() {
            return Err(HardyError::numerical("root iteration diverged"));
        }
        let bound = RESIDUAL_TOL * max * (1.0 + r.norm()).powi(n as i32);
        let res = poly_eval(coeffs, *r).norm();
        if res > bound {
            return Err(HardyError::numerical(format!(
                "root {r} has residual {res:e} above {bound:e}"
            )));
        }
    }
    Ok(z)
}
