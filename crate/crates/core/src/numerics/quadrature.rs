use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{HardyError, Result};

/// Quadrature nodes and positive weights on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLineGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RealLineGrid {
    /// `m`-point rule from the substitution `x = tan(t/2)` with a uniform midpoint grid in
    /// `t ∈ (-π, π)`. Rational integrands decaying like `1/x²` become smooth periodic
    /// functions of `t`, so the rule converges geometrically.
    pub fn tan_substitution(m: usize) -> Result<Self> {
        if m < 4 {
            return Err(HardyError::invalid(format!("need at least 4 nodes, got {m}")));
        }
        let h = 2.0 * PI / m as f64;
        let (nodes, weights) = (0..m)
            .map(|k| {
                let t = -PI + (k as f64 + 0.5) * h;
                let x = (t / 2.0).tan();
                (x, h * (1.0 + x * x) / 2.0)
            })
            .unzip();
        Ok(RealLineGrid { nodes, weights })
    }

    /// Composite Gauss-Legendre rule on `[a, b]` with panels of width at most `width`.
    pub fn gauss_panels(a: f64, b: f64, width: f64, order: usize) -> Result<Self> {
        if !(a < b) || !(width > 0.0) || order == 0 {
            return Err(HardyError::invalid("empty interval, panel width or order"));
        }
        let panels = ((b - a) / width).ceil() as usize;
        let h = (b - a) / panels as f64;
        let (gx, gw) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        Ok(RealLineGrid { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sample(&self, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    pub fn try_sample(&self, f: impl Fn(f64) -> Result<Complex64>) -> Result<Vec<Complex64>> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    /// `∫ f(x) conj(g(x)) dx` by the weighted sum.
    pub fn inner(&self, f: &[Complex64], g: &[Complex64]) -> Result<Complex64> {
        if f.len() != self.len() || g.len() != self.len() {
            return Err(HardyError::invalid(format!(
                "grid mismatch: grid has {} nodes, got {} and {} samples",
                self.len(),
                f.len(),
                g.len()
            )));
        }
        Ok(f.iter()
            .zip(g)
            .zip(&self.weights)
            .map(|((a, b), w)| a * b.conj() * *w)
            .sum())
    }

    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton iteration on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Where an inner product is taken.
#[derive(Debug, Clone, Copy)]
pub enum InnerDomain<'a> {
    /// Uniform samples of the circle, normalised measure `dθ/2π`.
    Torus,
    /// Samples at the nodes of a real-line rule, Lebesgue measure.
    Line(&'a RealLineGrid),
}

pub fn inner_product(f: &[Complex64], g: &[Complex64], domain: InnerDomain<'_>) -> Result<Complex64> {
    match domain {
        InnerDomain::Torus => {
            if f.len() != g.len() || f.is_empty() {
                return Err(HardyError::invalid(format!(
                    "grid mismatch: {} vs {} samples",
                    f.len(),
                    g.len()
                )));
            }
            let s: Complex64 = f.iter().zip(g).map(|(a, b)| a * b.conj()).sum();
            Ok(s / f.len() as f64)
        }
        InnerDomain::Line(grid) => grid.inner(f, g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tan_grid_is_monotone_with_positive_weights() {
        let g = RealLineGrid::tan_substitution(256).unwrap();
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(g.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn cauchy_integral_is_pi() {
        for m in [256, 1024] {
            let g = RealLineGrid::tan_substitution(m).unwrap();
            let v = g.integrate(|x| Complex64::new(1.0 / (x * x + 1.0), 0.0));
            assert!((v.re - PI).abs() < 1e-10);
        }
    }

    #[test]
    fn cauchy_kernel_norm() {
        // ∫ |1/(x+i)|² dx = π by residues.
        let g = RealLineGrid::tan_substitution(1024).unwrap();
        let f = g.sample(|x| 1.0 / Complex64::new(x, 1.0));
        let v = inner_product(&f, &f, InnerDomain::Line(&g)).unwrap();
        assert!((v.re - PI).abs() < 1e-9 && v.im.abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12);
        for p in 0..24 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((s - exact).abs() < 1e-14, "degree {p}: {s} vs {exact}");
        }
    }

    #[test]
    fn gauss_panels_match_closed_form() {
        let g = RealLineGrid::gauss_panels(-3.0, 5.0, 0.5, 10).unwrap();
        let v = g.integrate(|x| Complex64::new(x.sin(), 0.0));
        assert!((v.re - ((-3.0f64).cos() - 5.0f64.cos())).abs() < 1e-14);
    }

    #[test]
    fn torus_orthogonality_of_exponentials() {
        let n = 64;
        let sample = |k: i32| -> Vec<Complex64> {
            (0..n)
                .map(|j| Complex64::from_polar(1.0, 2.0 * PI * (j as f64) * k as f64 / n as f64))
                .collect()
        };
        for a in 0..16 {
            for b in 0..16 {
                let v = inner_product(&sample(a), &sample(b), InnerDomain::Torus).unwrap();
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((v - e).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn mismatched_lengths_error() {
        let g = RealLineGrid::tan_substitution(8).unwrap();
        let f = vec![Complex64::new(1.0, 0.0); 7];
        assert!(g.inner(&f, &f).is_err());
        assert!(inner_product(&f, &f[..3], InnerDomain::Torus).is_err());
    }
}
