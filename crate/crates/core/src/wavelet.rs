//! Dyadic wavelet basis of the upper half-plane Hardy space.
//!
//! `G(x) = sin π(i - x)/sin π(i + x)` is the Blaschke product with zeros `j + i`,
//! `G_n` keeps the zeros with `j ≤ n`, `φ(x) = Γ(x - 1 + i)/(√π Γ(x - i))` generates the
//! orthogonal complement of `G H²`, and `φ_{n,j}(x) = 2^{n/2} φ(2ⁿx - j) 𝓑(2ⁿx)` with
//! `𝓑(x) = Π_{j<0} G(2ʲx)` is the wavelet family.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{HardyError, Result};
use crate::numerics::{ln_gamma, RealLineGrid};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Distance to a Γ pole below which evaluation is refused.
pub const POLE_PROXIMITY: f64 = 1e-6;
/// Half-width of the window on which the tail constant is measured.
pub const WORKING_WINDOW: f64 = 8.0;
/// Target bound for the neglected factors of `𝓑_n`.
pub const TAIL_BOUND: f64 = 1e-8;
pub const DEFAULT_DEPTH: usize = 40;

fn check_upper(x: Complex64) -> Result<()> {
    if !x.is_finite() {
        return Err(HardyError::invalid("non-finite argument"));
    }
    if x.im < 0.0 {
        return Err(HardyError::domain(format!("argument {x} below the real axis")));
    }
    Ok(())
}

fn check_gamma_arg(z: Complex64) -> Result<()> {
    let k = z.re.round();
    if k <= 0.0 && (z - k).norm() < POLE_PROXIMITY {
        return Err(HardyError::domain(format!("Γ pole near {z}")));
    }
    Ok(())
}

/// `G(x)` through `q = e^{2πix}`: `G = (q - e^{-2π})/(1 - e^{-2π} q)`, which stays
/// bounded for every `Im x ≥ 0`.
pub fn g_eval(x: Complex64) -> Result<Complex64> {
    check_upper(x)?;
    Ok(g_unchecked(x))
}

fn g_unchecked(x: Complex64) -> Complex64 {
    let e = (-2.0 * PI).exp();
    let q = if x.im == 0.0 {
        let t = x.re - x.re.round();
        Complex64::from_polar(1.0, 2.0 * PI * t)
    } else {
        let t = Complex64::new(x.re - x.re.round(), x.im);
        (2.0 * PI * I * t).exp()
    };
    (q - e) / (1.0 - e * q)
}

/// `G_n(x) = Γ(-i-n)/Γ(i-n) · Γ(x-n+i)/Γ(x-n-i)`.
pub fn g_n_eval(n: i64, x: Complex64) -> Result<Complex64> {
    check_upper(x)?;
    let nf = n as f64;
    let top = x - nf + I;
    let bottom = x - nf - I;
    check_gamma_arg(top)?;
    check_gamma_arg(bottom)?;
    let lead = ln_gamma(-I - nf)? - ln_gamma(I - nf)?;
    Ok((lead + ln_gamma(top)? - ln_gamma(bottom)?).exp())
}

/// The defining product of `G_n` over `j ∈ [-m, n]`, with the `O(1/m)` truncation
/// error removed by Richardson extrapolation of its logarithm between `m/2` and `m`.
pub fn g_n_partial_product(n: i64, x: Complex64, m: usize) -> Result<Complex64> {
    check_upper(x)?;
    if m < 4 || (m as i64) < -n {
        return Err(HardyError::invalid(format!("truncation {m} too small for n = {n}")));
    }
    let log_factor = |j: i64| {
        let jf = j as f64;
        ((jf - I) / (jf + I)).ln() + ((x - jf - I) / (x - jf + I)).ln()
    };
    let half = (m / 2) as i64;
    let inner: Complex64 = (-half..=n).map(log_factor).sum();
    let outer: Complex64 = (-(m as i64)..-half).map(log_factor).sum();
    let coarse = inner;
    let fine = inner + outer;
    let out = (2.0 * fine - coarse).exp();
    if !out.is_finite() {
        return Err(HardyError::domain(format!("partial product undefined at {x}")));
    }
    Ok(out)
}

/// `φ(x) = Γ(x - 1 + i)/(√π Γ(x - i))`.
pub fn phi_eval(x: Complex64) -> Result<Complex64> {
    check_upper(x)?;
    let top = x - 1.0 + I;
    let bottom = x - I;
    check_gamma_arg(top)?;
    check_gamma_arg(bottom)?;
    Ok((ln_gamma(top)? - ln_gamma(bottom)?).exp() / PI.sqrt())
}

/// `|φ(x - n) - Γ(i-n)/Γ(-i-n) · G_n(x)/(√π (x - (n+1) + i))|`.
pub fn phi_shift_identity_check(n: i64, x: Complex64) -> Result<f64> {
    let nf = n as f64;
    let lhs = phi_eval(x - nf)?;
    let lead = (ln_gamma(I - nf)? - ln_gamma(-I - nf)?).exp();
    let rhs = lead * g_n_eval(n, x)? / (PI.sqrt() * (x - (nf + 1.0) + I));
    Ok((lhs - rhs).norm())
}

/// Measured `max |1 - G(2ʲx)|/2ʲ` over `|x| ≤ window` and `j ∈ [-50, 0]`.
pub fn measure_tail_constant(window: f64) -> f64 {
    let samples = 1601;
    let mut c: f64 = 0.0;
    for j in -50..=0 {
        let s = 2f64.powi(j);
        for i in 0..samples {
            let x = -window + 2.0 * window * i as f64 / (samples - 1) as f64;
            c = c.max((1.0 - g_unchecked(Complex64::new(s * x, 0.0))).norm() / s);
        }
    }
    c
}

/// Truncated dyadic products and wavelets `φ_{n,j}` for `n ∈ [n_lo, n_hi]`, `|j| ≤ j_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicWaveletBasis {
    n_lo: i32,
    n_hi: i32,
    j_max: i64,
    depth: usize,
    tail_constant: f64,
}

impl DyadicWaveletBasis {
    /// The depth is the smallest `T ≥ 40` with `C 2^{n_hi - T} ≤ 1e-8`, `C` measured on
    /// `|x| ≤ 8`.
    pub fn new(n_lo: i32, n_hi: i32, j_max: i64) -> Result<Self> {
        if n_lo > n_hi || j_max < 0 || n_hi.abs() > 30 || n_lo.abs() > 30 {
            return Err(HardyError::invalid(format!(
                "scale range [{n_lo}, {n_hi}] or shift bound {j_max} not usable"
            )));
        }
        let c = measure_tail_constant(WORKING_WINDOW);
        let needed = (c * 2f64.powi(n_hi) / TAIL_BOUND).log2().ceil().max(0.0) as usize;
        Ok(DyadicWaveletBasis {
            n_lo,
            n_hi,
            j_max,
            depth: needed.max(DEFAULT_DEPTH),
            tail_constant: c,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn tail_constant(&self) -> f64 {
        self.tail_constant
    }

    /// `Σ_{j < n_hi - T} C 2ʲ = C 2^{n_hi - T}`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_constant * 2f64.powi(self.n_hi - self.depth as i32)
    }

    pub fn scales(&self) -> std::ops::RangeInclusive<i32> {
        self.n_lo..=self.n_hi
    }

    pub fn shifts(&self) -> std::ops::RangeInclusive<i64> {
        -self.j_max..=self.j_max
    }

    /// `(n, j)` pairs ordered by scale, then shift.
    pub fn indices(&self) -> Vec<(i32, i64)> {
        self.scales()
            .flat_map(|n| self.shifts().map(move |j| (n, j)))
            .collect()
    }

    /// `𝓑_n(x) = Π_{k=n-T}^{n-1} G(2ᵏx)`.
    pub fn script_b(&self, n: i32, x: f64) -> Result<Complex64> {
        if !x.is_finite() {
            return Err(HardyError::invalid("non-finite abscissa"));
        }
        Ok(((n - self.depth as i32)..n)
            .map(|k| g_unchecked(Complex64::new(2f64.powi(k) * x, 0.0)))
            .product())
    }

    fn check_index(&self, n: i32, j: i64) -> Result<()> {
        let count = self.indices().len();
        if n < self.n_lo || n > self.n_hi {
            return Err(HardyError::IndexOutOfRange {
                index: (n - self.n_lo).unsigned_abs() as usize,
                count,
            });
        }
        if j.abs() > self.j_max {
            return Err(HardyError::IndexOutOfRange {
                index: j.unsigned_abs() as usize,
                count,
            });
        }
        Ok(())
    }

    /// `φ_{n,j}(x) = 2^{n/2} φ(2ⁿx - j) 𝓑(2ⁿx)`.
    pub fn wavelet(&self, n: i32, j: i64, x: f64) -> Result<Complex64> {
        self.check_index(n, j)?;
        let y = 2f64.powi(n) * x;
        let phi = phi_eval(Complex64::new(y - j as f64, 0.0))?;
        Ok(2f64.powf(n as f64 / 2.0) * phi * self.script_b(0, y)?)
    }

    /// `(x, φ_{n,j}(x))` on `samples` equispaced points of `[x_min, x_max]`.
    pub fn table(&self, n: i32, j: i64, x_min: f64, x_max: f64, samples: usize) -> Result<Vec<(f64, Complex64)>> {
        if !(x_min < x_max) || samples < 2 {
            return Err(HardyError::invalid("empty window or fewer than two samples"));
        }
        (0..samples)
            .map(|i| {
                let x = x_min + (x_max - x_min) * i as f64 / (samples - 1) as f64;
                Ok((x, self.wavelet(n, j, x)?))
            })
            .collect()
    }

    /// Gram matrix of the listed wavelets.
    pub fn gram(&self, indices: &[(i32, i64)], quad: &WaveletQuadrature) -> Result<Vec<Vec<Complex64>>> {
        for &(n, j) in indices {
            self.check_index(n, j)?;
        }
        quad.gram(indices.len(), |k, x| {
            let (n, j) = indices[k];
            self.wavelet(n, j, x)
        })
    }
}

/// Gram matrices on the real line: Gauss-Legendre panels on `[-4L, 4L]`, with the
/// integrals over `[-L, L]`, `[-2L, 2L]` and `[-4L, 4L]` combined to cancel the
/// `1/L` and `1/L²` tail terms of integrands decaying like `1/x²`.
#[derive(Debug, Clone)]
pub struct WaveletQuadrature {
    grid: RealLineGrid,
    cutoff: f64,
}

impl WaveletQuadrature {
    pub fn new(cutoff: f64, panel_width: f64, order: usize) -> Result<Self> {
        if !(cutoff > 0.0) || !(panel_width > 0.0) || (cutoff / panel_width).fract() != 0.0 {
            return Err(HardyError::invalid("cutoff must be a positive multiple of the panel width"));
        }
        Ok(WaveletQuadrature {
            grid: RealLineGrid::gauss_panels(-4.0 * cutoff, 4.0 * cutoff, panel_width, order)?,
            cutoff,
        })
    }

    /// `L = 250`, panels of width `1/4`, order 16.
    pub fn standard() -> Self {
        WaveletQuadrature::new(250.0, 0.25, 16).expect("valid quadrature parameters")
    }

    pub fn grid(&self) -> &RealLineGrid {
        &self.grid
    }

    pub fn gram(
        &self,
        count: usize,
        f: impl Fn(usize, f64) -> Result<Complex64>,
    ) -> Result<Vec<Vec<Complex64>>> {
        let nodes = self.grid.nodes();
        let weights = self.grid.weights();
        let values: Vec<Vec<Complex64>> = (0..count)
            .map(|k| nodes.iter().map(|&x| f(k, x)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let band = |x: f64| {
            if x.abs() <= self.cutoff {
                0
            } else if x.abs() <= 2.0 * self.cutoff {
                1
            } else {
                2
            }
        };
        let bands: Vec<usize> = nodes.iter().map(|&x| band(x)).collect();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); count]; count];
        for a in 0..count {
            for b in a..count {
                let mut parts = [Complex64::new(0.0, 0.0); 3];
                for i in 0..nodes.len() {
                    parts[bands[i]] += values[a][i] * values[b][i].conj() * weights[i];
                }
                let i1 = parts[0];
                let i2 = i1 + parts[1];
                let i4 = i2 + parts[2];
                let v = (8.0 * i4 - 6.0 * i2 + i1) / 3.0;
                out[a][b] = v;
                out[b][a] = v.conj();
            }
        }
        Ok(out)
    }
}

/// Largest entrywise deviation of a square matrix from the identity.
pub fn identity_deviation(m: &[Vec<Complex64>]) -> f64 {
    m.iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(move |(j, v)| (v - if i == j { 1.0 } else { 0.0 }).norm())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn g_special_values() {
        assert!((g_eval(c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!((g_eval(c(0.5, 0.0)).unwrap() + 1.0).norm() < 1e-15);
        for n in -5..=5 {
            assert!((g_eval(c(n as f64, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        }
        assert!(g_eval(c(0.0, -0.1)).is_err());
    }

    #[test]
    fn g_matches_sine_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let x = c(rng.gen_range(-5.0..5.0), rng.gen_range(0.0..3.0));
            let direct = (PI * (I - x)).sin() / (PI * (I + x)).sin();
            assert!((g_eval(x).unwrap() - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn g_is_inner() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let x: f64 = rng.gen_range(-100.0..100.0);
            assert!((g_eval(c(x, 0.0)).unwrap().norm() - 1.0).abs() < 1e-12);
            let z = c(x, rng.gen_range(0.01..500.0));
            assert!(g_eval(z).unwrap().norm() < 1.0);
        }
    }

    #[test]
    fn g_n_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..10 {
            let n = rng.gen_range(-3..=3);
            let x = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.0..2.0));
            let exact = g_n_eval(n, x).unwrap();
            let oracle = g_n_partial_product(n, x, 10_000).unwrap();
            assert!((exact - oracle).norm() < 1e-6, "n = {n}, x = {x}");
        }
    }

    #[test]
    fn g_n_is_unimodular_and_divides_g() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..50 {
            let n = rng.gen_range(-4..=4);
            let x = c(rng.gen_range(-20.0..20.0), 0.0);
            let gn = g_n_eval(n, x).unwrap();
            assert!((gn.norm() - 1.0).abs() < 1e-10);
            assert!(((g_eval(x).unwrap() / gn).norm() - 1.0).abs() < 1e-10);
            let z = c(x.re, rng.gen_range(0.1..5.0));
            assert!(g_n_eval(n, z).unwrap().norm() < 1.0);
        }
    }

    #[test]
    fn g_n_refuses_zero_neighborhood() {
        assert!(matches!(g_n_eval(0, c(0.0, 1.0)), Err(HardyError::Domain(_))));
        assert!(matches!(g_n_eval(2, c(1.0, 1.0 + 1e-8)), Err(HardyError::Domain(_))));
    }

    #[test]
    fn phi_shift_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..20 {
            let n = rng.gen_range(-4..=4);
            let x = c(rng.gen_range(-5.0..5.0), rng.gen_range(0.0..3.0));
            assert!(phi_shift_identity_check(n, x).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn phi_shifts_are_orthonormal() {
        let quad = WaveletQuadrature::standard();
        let g = quad
            .gram(7, |k, x| phi_eval(c(x - (k as f64 - 3.0), 0.0)))
            .unwrap();
        assert!(identity_deviation(&g) <= 1e-6, "{}", identity_deviation(&g));
    }

    #[test]
    fn script_b_properties() {
        let basis = DyadicWaveletBasis::new(-1, 1, 3).unwrap();
        assert!(basis.tail_bound() <= TAIL_BOUND);
        assert!(basis.tail_constant() > 2.0 * PI && basis.tail_constant() < 8.0 * 2.0 * PI * 1.01);
        assert_eq!(basis.script_b(0, 0.0).unwrap(), c(1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for _ in 0..50 {
            let x: f64 = rng.gen_range(-8.0..8.0);
            for n in -3..=3 {
                let b = basis.script_b(n, x).unwrap();
                assert!((b.norm() - 1.0).abs() < 1e-10);
                let scaled = basis.script_b(0, 2f64.powi(n) * x).unwrap();
                assert!((b - scaled).norm() <= 1e-10);
            }
            assert!((basis.script_b(-40, x).unwrap() - 1.0).norm() < 1e-8);
        }
    }

    #[test]
    fn dilation_covariance() {
        let basis = DyadicWaveletBasis::new(-1, 1, 3).unwrap();
        for &x in &[-3.7, -0.2, 0.0, 1.1, 6.4] {
            for n in -1..=1 {
                for j in -3..=3 {
                    let lhs = basis.wavelet(n, j, x).unwrap();
                    let rhs = 2f64.powf(n as f64 / 2.0) * basis.wavelet(0, j, 2f64.powi(n) * x).unwrap();
                    assert!((lhs - rhs).norm() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn wavelet_range_checks() {
        let basis = DyadicWaveletBasis::new(-1, 1, 3).unwrap();
        assert!(matches!(basis.wavelet(2, 0, 0.0), Err(HardyError::IndexOutOfRange { .. })));
        assert!(matches!(basis.wavelet(0, 4, 0.0), Err(HardyError::IndexOutOfRange { .. })));
        assert!(DyadicWaveletBasis::new(1, 0, 3).is_err());
    }

    #[test]
    fn two_scale_gram_is_identity() {
        let basis = DyadicWaveletBasis::new(0, 1, 3).unwrap();
        let idx: Vec<(i32, i64)> = [(0, -1), (0, 0), (0, 2), (1, -1), (1, 0), (1, 3)].to_vec();
        let g = basis.gram(&idx, &WaveletQuadrature::standard()).unwrap();
        assert!(identity_deviation(&g) <= 1e-6, "{}", identity_deviation(&g));
    }
}
