use std::cell::RefCell;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{HardyError, Result};

/// Default number of samples on the unit circle.
pub const DEFAULT_GRID_N: usize = 4096;

/// Uniform samples of a function on the unit circle; sample `j` sits at `exp(2πij/N)`.
///
/// `N` is a power of two and at least 4.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusSignal {
    samples: Vec<Complex64>,
}

fn check_len(n: usize) -> Result<()> {
    if n < 4 || !n.is_power_of_two() {
        return Err(HardyError::invalid(format!(
            "grid length must be a power of two >= 4, got {n}"
        )));
    }
    Ok(())
}

thread_local! {
    // Plans are pure functions of the length; a per-thread cache only saves the twiddle setup.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let fft = PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        if inverse {
            planner.plan_fft_inverse(buf.len())
        } else {
            planner.plan_fft_forward(buf.len())
        }
    });
    fft.process(buf);
}

/// Signed frequency of DFT bin `k` on an `n`-point grid. The Nyquist bin counts as negative.
fn signed_freq(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

impl TorusSignal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        check_len(samples.len())?;
        if let Some(j) = samples.iter().position(|s| !s.is_finite()) {
            return Err(HardyError::invalid(format!("sample {j} is not finite")));
        }
        Ok(TorusSignal { samples })
    }

    /// Samples `f` at the `n` grid points of the circle.
    pub fn from_fn(n: usize, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        check_len(n)?;
        let samples = (0..n).map(|j| f(Self::grid_point(j, n))).collect();
        Self::new(samples)
    }

    /// Same as [`TorusSignal::from_fn`] for fallible evaluators.
    pub fn try_from_fn(n: usize, f: impl Fn(Complex64) -> Result<Complex64>) -> Result<Self> {
        check_len(n)?;
        let samples = (0..n)
            .map(|j| f(Self::grid_point(j, n)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples)
    }

    /// Builds a signal from DFT coefficients `c_k`, `k` taken modulo `N` (bin layout of the FFT).
    pub fn from_coefficients(mut coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(coeffs.len())?;
        fft_in_place(&mut coeffs, true);
        Self::new(coeffs)
    }

    /// Point `exp(2πij/n)` of the `n`-point grid.
    pub fn grid_point(j: usize, n: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        let n = self.len();
        (0..n).map(move |j| Self::grid_point(j, n))
    }

    /// Normalised DFT coefficients `c_k = (1/N) Σ_j f_j exp(-2πijk/N)`, stored in FFT bin order.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let mut buf = self.samples.clone();
        fft_in_place(&mut buf, false);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    /// Mean over the grid, i.e. the 0-th Fourier coefficient (value at 0 of an analytic signal).
    pub fn mean(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() / self.len() as f64
    }

    /// `L²(T)` norm with the normalised measure `dθ/2π`.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.len() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    /// `⟨self, other⟩ = (1/N) Σ f_j conj(g_j)`.
    pub fn inner(&self, other: &TorusSignal) -> Result<Complex64> {
        if self.len() != other.len() {
            return Err(HardyError::invalid(format!(
                "grid mismatch: {} vs {} samples",
                self.len(),
                other.len()
            )));
        }
        let s: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(f, g)| f * g.conj())
            .sum();
        Ok(s / self.len() as f64)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> TorusSignal {
        TorusSignal {
            samples: self.samples.iter().map(|&s| f(s)).collect(),
        }
    }

    pub fn conj(&self) -> TorusSignal {
        self.map(|s| s.conj())
    }

    pub fn scale(&self, c: Complex64) -> TorusSignal {
        self.map(|s| s * c)
    }

    /// Pointwise combination of two signals on the same grid.
    pub fn zip_with(
        &self,
        other: &TorusSignal,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<TorusSignal> {
        if self.len() != other.len() {
            return Err(HardyError::invalid(format!(
                "grid mismatch: {} vs {} samples",
                self.len(),
                other.len()
            )));
        }
        TorusSignal::new(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// Largest deviation of `|f|` from 1 over the grid.
    pub fn unimodularity_error(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Winding number of the sampled closed curve around the origin.
    ///
    /// Requires the curve to stay away from 0 and to be sampled finely enough that
    /// consecutive arguments differ by less than π.
    pub fn winding_number(&self) -> i64 {
        let n = self.len();
        let total: f64 = (0..n)
            .map(|j| (self.samples[(j + 1) % n] / self.samples[j]).arg())
            .sum();
        (total / (2.0 * PI)).round() as i64
    }

    /// Spectral resampling to `n` points (zero padding or truncation of the spectrum).
    pub fn resample(&self, n: usize) -> Result<TorusSignal> {
        check_len(n)?;
        let m = self.len();
        if n == m {
            return Ok(self.clone());
        }
        let coeffs = self.coefficients();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        let half = m.min(n) / 2;
        for (k, c) in coeffs.iter().enumerate() {
            let f = signed_freq(k, m);
            if f >= -(half as i64) && f < half as i64 {
                out[f.rem_euclid(n as i64) as usize] = *c;
            }
        }
        TorusSignal::from_coefficients(out)
    }

    /// Negative-frequency energy as a fraction of the total energy.
    pub fn negative_frequency_fraction(&self) -> f64 {
        let coeffs = self.coefficients();
        let n = self.len();
        let total: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let neg: f64 = coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| signed_freq(*k, n) < 0)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        neg / total
    }
}

impl Add for &TorusSignal {
    type Output = TorusSignal;
    fn add(self, rhs: &TorusSignal) -> TorusSignal {
        assert_eq!(self.len(), rhs.len(), "grid mismatch");
        TorusSignal {
            samples: self.samples.iter().zip(&rhs.samples).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &TorusSignal {
    type Output = TorusSignal;
    fn sub(self, rhs: &TorusSignal) -> TorusSignal {
        assert_eq!(self.len(), rhs.len(), "grid mismatch");
        TorusSignal {
            samples: self.samples.iter().zip(&rhs.samples).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &TorusSignal {
    type Output = TorusSignal;
    fn mul(self, rhs: &TorusSignal) -> TorusSignal {
        assert_eq!(self.len(), rhs.len(), "grid mismatch");
        TorusSignal {
            samples: self.samples.iter().zip(&rhs.samples).map(|(a, b)| a * b).collect(),
        }
    }
}

/// Orthogonal projection of `L²(T)` onto `H²`: DFT coefficients of negative index
/// (including the Nyquist bin) are zeroed, the others are kept.
pub fn analytic_projection(f: &TorusSignal) -> Result<TorusSignal> {
    if let Some(j) = f.samples().iter().position(|s| !s.is_finite()) {
        return Err(HardyError::invalid(format!("sample {j} is not finite")));
    }
    let n = f.len();
    let mut coeffs = f.coefficients();
    for (k, c) in coeffs.iter_mut().enumerate() {
        if signed_freq(k, n) < 0 {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    TorusSignal::from_coefficients(coeffs)
}

/// Analytic completion `u + i ũ` of real samples `u`: the mean is kept, positive
/// frequencies are doubled, negative ones dropped. The Nyquist bin is kept with
/// weight one so that the real part reproduces `u` exactly on the grid.
pub fn analytic_completion_real(u: &[f64]) -> Result<TorusSignal> {
    let n = u.len();
    check_len(n)?;
    if u.iter().any(|x| !x.is_finite()) {
        return Err(HardyError::invalid("non-finite real samples"));
    }
    let sig = TorusSignal {
        samples: u.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    };
    let mut coeffs = sig.coefficients();
    for (k, c) in coeffs.iter_mut().enumerate() {
        if k == 0 {
            *c = Complex64::new(c.re, 0.0);
        } else if k < n / 2 {
            *c *= 2.0;
        } else if k == n / 2 {
            *c = Complex64::new(c.re, 0.0);
        } else {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    TorusSignal::from_coefficients(coeffs)
}
