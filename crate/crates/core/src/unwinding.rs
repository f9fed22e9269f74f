//! Blaschke factorization `F = B·G` on the FFT grid and the unwinding series
//! `F = a_1 B_1 + a_2 B_1 B_2 + ...`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{HardyError, Result};
use crate::mt::ComplexRepr;
use crate::numerics::{analytic_completion_real, poly_eval, poly_roots, TorusSignal};

/// Relative floor applied to `|F|` before taking logarithms.
pub const FLOOR_REL: f64 = 1e-9;
/// Largest fraction of grid points allowed below the floor.
pub const MAX_FLOORED_FRACTION: f64 = 0.01;
/// Largest negative-frequency energy fraction accepted by [`unwind`].
pub const ANALYTIC_TOL: f64 = 1e-8;
/// Default relative residual energy at which [`unwind`] stops.
pub const DEFAULT_STOP_TOL: f64 = 1e-10;

const DEFLATION_REMAINDER_TOL: f64 = 1e-8;
const MAX_DEFLATIONS: usize = 64;
const MAX_ZERO_ESTIMATES: usize = 64;
/// Oversampling factor of the internal factorization grid.
const OVERSAMPLE: usize = 16;
const MAX_INTERNAL_GRID: usize = 1 << 18;
/// Largest spectral coefficient of `ln|F|` tolerated in the upper half of the band.
const RESOLUTION_TOL: f64 = 1e-12;

/// Result of [`weiss_factor`]: `F = B·G` with `B` unimodular and `G` outer.
#[derive(Debug, Clone, PartialEq)]
pub struct WeissFactors {
    pub blaschke: TorusSignal,
    pub outer: TorusSignal,
}

fn floor_count(f: &TorusSignal, eps: f64) -> usize {
    f.samples().iter().filter(|s| s.norm() < eps).count()
}

fn outer_from_modulus(f: &TorusSignal, eps: f64) -> Result<TorusSignal> {
    let logs: Vec<f64> = f.samples().iter().map(|s| s.norm().max(eps).ln()).collect();
    Ok(analytic_completion_real(&logs)?.map(|c| c.exp()))
}

/// Divides the grid polynomial of `f` by `(z - ζ)`; returns the quotient samples and
/// the remainder `f(ζ)`.
fn deflate(f: &TorusSignal, zeta: Complex64) -> Result<(TorusSignal, Complex64)> {
    let c = f.coefficients();
    let n = c.len();
    let mut q = vec![Complex64::new(0.0, 0.0); n];
    let mut carry = Complex64::new(0.0, 0.0);
    for k in (1..n).rev() {
        carry = c[k] + zeta * carry;
        q[k - 1] = carry;
    }
    let remainder = c[0] + zeta * carry;
    Ok((TorusSignal::from_coefficients(q)?, remainder))
}

/// `F = B·G` with `G = exp(ln|F| + i·conj(ln|F|))` computed by FFT.
///
/// `ln|F|` is floored at `1e-9·‖F‖_∞`; more than 1% floored points is an
/// ill-conditioned input. Zeros of an analytic input that fall on grid points are
/// divided out of its grid polynomial exactly and returned as part of the outer
/// factor, which avoids the `O(ln ε / N)` bias a floored logarithmic singularity
/// would leave in `G`.
pub fn weiss_factor(f: &TorusSignal) -> Result<WeissFactors> {
    check_conditioning(f)?;
    let n = f.len();
    let mut fine = f.resample(internal_grid(n))?;
    while fine.len() < MAX_INTERNAL_GRID && !log_modulus_resolved(&fine) {
        fine = fine.resample(2 * fine.len())?;
    }
    let w = factor_on_grid(&fine)?;
    Ok(WeissFactors {
        blaschke: decimate(&w.blaschke, n)?,
        outer: decimate(&w.outer, n)?,
    })
}

fn check_finite(f: &TorusSignal) -> Result<()> {
    if let Some(j) = f.samples().iter().position(|s| !s.is_finite()) {
        return Err(HardyError::invalid(format!("sample {j} is not finite")));
    }
    Ok(())
}

/// Size of the grid the factorization actually runs on.
pub fn internal_grid(n: usize) -> usize {
    (n * OVERSAMPLE).max(n).min(MAX_INTERNAL_GRID.max(n))
}

/// True when the DFT of `ln max(|f|, ε)` is negligible on the upper half of the band.
fn log_modulus_resolved(f: &TorusSignal) -> bool {
    let eps = FLOOR_REL * f.sup_norm();
    if eps == 0.0 {
        return true;
    }
    let logs: Vec<Complex64> = f
        .samples()
        .iter()
        .map(|s| Complex64::new(s.norm().max(eps).ln(), 0.0))
        .collect();
    let Ok(sig) = TorusSignal::new(logs) else {
        return true;
    };
    let c = sig.coefficients();
    let n = c.len();
    c[n / 4..n / 2].iter().all(|v| v.norm() <= RESOLUTION_TOL)
}

/// Keeps every `fine.len()/n`-th sample.
fn decimate(fine: &TorusSignal, n: usize) -> Result<TorusSignal> {
    let step = fine.len() / n;
    TorusSignal::new(fine.samples().iter().step_by(step).copied().collect())
}

/// Rejects non-finite input and input that vanishes (below the floor) on more than
/// 1% of the grid; returns the number of floored points.
fn check_conditioning(f: &TorusSignal) -> Result<usize> {
    check_finite(f)?;
    let sup = f.sup_norm();
    if sup == 0.0 {
        return Err(HardyError::IllConditioned("signal vanishes identically".into()));
    }
    let n = f.len();
    let floored = floor_count(f, FLOOR_REL * sup);
    if floored as f64 > MAX_FLOORED_FRACTION * n as f64 {
        return Err(HardyError::IllConditioned(format!(
            "|F| is below the floor at {floored} of {n} grid points"
        )));
    }
    Ok(floored)
}

fn factor_on_grid(f: &TorusSignal) -> Result<WeissFactors> {
    let floored = check_conditioning(f)?;
    let n = f.len();

    let mut reduced = f.clone();
    let mut boundary = TorusSignal::from_fn(n, |_| Complex64::new(1.0, 0.0))?;
    if floored > 0 && f.negative_frequency_fraction() <= ANALYTIC_TOL {
        for _ in 0..MAX_DEFLATIONS {
            let (j, m) = reduced
                .samples()
                .iter()
                .enumerate()
                .map(|(j, s)| (j, s.norm()))
                .fold((0, f64::MAX), |a, b| if b.1 < a.1 { b } else { a });
            if m >= FLOOR_REL * reduced.sup_norm() {
                break;
            }
            let zeta = TorusSignal::grid_point(j, n);
            let (q, r) = deflate(&reduced, zeta)?;
            if r.norm() > DEFLATION_REMAINDER_TOL * reduced.sup_norm() || q.sup_norm() == 0.0 {
                break;
            }
            reduced = q;
            boundary = boundary.zip_with(&TorusSignal::from_fn(n, |z| z - zeta)?, |a, b| a * b)?;
        }
    }

    let eps_reduced = FLOOR_REL * reduced.sup_norm();
    let g_reduced = outer_from_modulus(&reduced, eps_reduced)?;
    let blaschke = reduced.zip_with(&g_reduced, |a, b| a / b)?;
    let outer = g_reduced.zip_with(&boundary, |a, b| a * b)?;
    Ok(WeissFactors { blaschke, outer })
}

/// Coefficients, stage factors and residual of an unwinding expansion.
///
/// `F = Σ_k a_k B_1⋯B_k + residual`, where `residual = B_1⋯B_K R_K`. Stage factors
/// and the residual are sampled on the internal grid ([`internal_grid`]); later stages
/// have zeros close to the circle whose spectra do not fit on the input grid.
#[derive(Debug, Clone, PartialEq)]
pub struct UnwindingExpansion {
    /// Size of the caller's grid.
    pub input_grid: usize,
    pub coefficients: Vec<Complex64>,
    pub stage_factors: Vec<TorusSignal>,
    pub residual: TorusSignal,
    pub input_norm: f64,
    /// `‖F - partial sum through stage k‖` for `k = 1..=K`.
    pub residual_norms: Vec<f64>,
    /// Set when a stage failed and the expansion was cut short.
    pub truncated: bool,
}

/// Energy bookkeeping `‖F‖² = Σ|a_k|² + ‖R‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyLedger {
    pub input_energy: f64,
    pub coefficient_energy: f64,
    pub residual_energy: f64,
    /// `|input - coefficients - residual| / input`.
    pub relative_defect: f64,
}

impl UnwindingExpansion {
    pub fn stages(&self) -> usize {
        self.coefficients.len()
    }

    pub fn energy_ledger(&self) -> EnergyLedger {
        let input_energy = self.input_norm * self.input_norm;
        let coefficient_energy: f64 = self.coefficients.iter().map(|a| a.norm_sqr()).sum();
        let residual_energy = self.residual.norm_sqr();
        let defect = (input_energy - coefficient_energy - residual_energy).abs();
        EnergyLedger {
            input_energy,
            coefficient_energy,
            residual_energy,
            relative_defect: if input_energy > 0.0 { defect / input_energy } else { defect },
        }
    }

    /// Products `B_1⋯B_k` for `k = 1..=K`.
    pub fn cumulative_products(&self) -> Vec<TorusSignal> {
        let mut out: Vec<TorusSignal> = Vec::with_capacity(self.stage_factors.len());
        for b in &self.stage_factors {
            let next = match out.last() {
                Some(prev) => prev * b,
                None => b.clone(),
            };
            out.push(next);
        }
        out
    }

    /// The terms `a_k B_1⋯B_k`.
    pub fn terms(&self) -> Vec<TorusSignal> {
        self.cumulative_products()
            .iter()
            .zip(&self.coefficients)
            .map(|(p, a)| p.scale(*a))
            .collect()
    }

    fn internal_partial_sum(&self, stages: usize) -> TorusSignal {
        let n = self.residual.len();
        let mut acc = TorusSignal::from_fn(n, |_| Complex64::new(0.0, 0.0)).expect("valid grid");
        for t in self.terms().iter().take(stages) {
            acc = &acc + t;
        }
        acc
    }

    /// `Σ_{k ≤ stages} a_k B_1⋯B_k` on the input grid.
    pub fn partial_sum(&self, stages: usize) -> TorusSignal {
        decimate(&self.internal_partial_sum(stages), self.input_grid).expect("valid grid")
    }

    /// The full partial sum plus the stored residual on the input grid; equals the input.
    pub fn reconstruct(&self) -> TorusSignal {
        let full = &self.internal_partial_sum(self.stages()) + &self.residual;
        decimate(&full, self.input_grid).expect("valid grid")
    }

    /// Zero estimates of every stage factor (see [`blaschke_zeros_from_samples`]).
    pub fn stage_zero_estimates(&self) -> Result<Vec<Vec<Complex64>>> {
        self.stage_factors.iter().map(blaschke_zeros_from_samples).collect()
    }

    pub fn to_json(&self, with_zeros: bool) -> Result<UnwindingJson> {
        let stage_zero_estimates = if with_zeros {
            Some(
                self.stage_zero_estimates()?
                    .into_iter()
                    .map(|zs| zs.into_iter().map(ComplexRepr::from).collect())
                    .collect(),
            )
        } else {
            None
        };
        Ok(UnwindingJson {
            coefficients: self.coefficients.iter().map(|&a| a.into()).collect(),
            stage_zero_estimates,
            residual_norm: self.residual.norm(),
            energy_ledger: self.energy_ledger(),
            truncated: self.truncated,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnwindingJson {
    pub coefficients: Vec<ComplexRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage_zero_estimates: Option<Vec<Vec<ComplexRepr>>>,
    pub residual_norm: f64,
    pub energy_ledger: EnergyLedger,
    pub truncated: bool,
}

/// Unwinding with the default stopping tolerance.
pub fn unwind(f: &TorusSignal, max_stages: usize) -> Result<UnwindingExpansion> {
    unwind_with_tol(f, max_stages, DEFAULT_STOP_TOL)
}

/// `F = B_1 G_1`, `a_1 = G_1(0)`, then `G_k - a_k = B_{k+1} G_{k+1}` until `max_stages`
/// or until the residual energy drops to `stop_tol·‖F‖²`.
pub fn unwind_with_tol(f: &TorusSignal, max_stages: usize, stop_tol: f64) -> Result<UnwindingExpansion> {
    if max_stages == 0 {
        return Err(HardyError::invalid("need at least one stage"));
    }
    let neg = f.negative_frequency_fraction();
    if neg > ANALYTIC_TOL {
        return Err(HardyError::invalid(format!(
            "input is not analytic: negative-frequency energy fraction {neg:e}"
        )));
    }
    check_conditioning(f)?;
    let n = f.len();
    let input_norm = f.norm();
    let target = stop_tol * input_norm * input_norm;
    let mut coefficients = Vec::new();
    let mut stage_factors: Vec<TorusSignal> = Vec::new();
    let mut residual_norms = Vec::new();
    let mut cumulative: Option<TorusSignal> = None;
    let mut current = f.resample(internal_grid(n))?;
    let mut residual = current.clone();
    let mut truncated = false;

    for stage in 0..max_stages {
        while current.len() < MAX_INTERNAL_GRID && !log_modulus_resolved(&current) {
            let m = 2 * current.len();
            current = current.resample(m)?;
            if let Some(c) = &cumulative {
                cumulative = Some(c.resample(m)?);
            }
            for b in stage_factors.iter_mut() {
                *b = b.resample(m)?;
            }
        }
        let WeissFactors { blaschke, outer } = match factor_on_grid(&current) {
            Ok(w) => w,
            Err(e) if stage == 0 => return Err(e),
            Err(_) => {
                truncated = true;
                break;
            }
        };
        let a = outer.mean();
        let rest = outer.map(|g| g - a);
        let cum = match &cumulative {
            Some(prev) => prev * &blaschke,
            None => blaschke.clone(),
        };
        residual = &cum * &rest;
        coefficients.push(a);
        stage_factors.push(blaschke);
        residual_norms.push(residual.norm());
        cumulative = Some(cum);
        current = rest;
        if residual.norm_sqr() <= target {
            break;
        }
    }
    Ok(UnwindingExpansion {
        input_grid: n,
        coefficients,
        stage_factors,
        residual,
        input_norm,
        residual_norms,
        truncated,
    })
}

/// Zeros of a sampled finite Blaschke product.
///
/// The power sums `Σ z_j^p` are the grid means of `z^p · z B'(z)/B(z)` (argument
/// principle, `B'` by spectral differentiation); Newton's identities turn them into a
/// polynomial whose roots are refined by Newton's method on the Taylor series of `B`.
/// Zeros are ordered by modulus, then argument.
pub fn blaschke_zeros_from_samples(b: &TorusSignal) -> Result<Vec<Complex64>> {
    let n = b.len();
    if b.samples().iter().any(|s| s.norm() < 1e-12) {
        return Err(HardyError::IllConditioned("stage factor vanishes on the grid".into()));
    }
    let coeffs = b.coefficients();
    let taylor: Vec<Complex64> = coeffs[..n / 2].to_vec();
    let deriv = TorusSignal::from_coefficients(
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k < n / 2 { c * k as f64 } else { Complex64::new(0.0, 0.0) })
            .collect(),
    )?;
    // z B'/B on the circle.
    let log_deriv = deriv.zip_with(b, |d, v| d / v)?;
    let count = log_deriv.mean().re.round();
    if !(0.0..=MAX_ZERO_ESTIMATES as f64).contains(&count) {
        return Err(HardyError::numerical(format!(
            "zero count {count} outside the supported range for zero estimation"
        )));
    }
    let m = count as usize;
    if m == 0 {
        return Ok(Vec::new());
    }
    let power_sums: Vec<Complex64> = (1..=m)
        .map(|p| {
            log_deriv
                .samples()
                .iter()
                .enumerate()
                .map(|(j, v)| v * TorusSignal::grid_point((j * p) % n, n))
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    // Newton's identities: k e_k = Σ_{i=1}^k (-1)^{i-1} e_{k-i} s_i.
    let mut e = vec![Complex64::new(1.0, 0.0)];
    for k in 1..=m {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * power_sums[i - 1];
        }
        e.push(acc / k as f64);
    }
    // Π (z - z_j) = Σ_k (-1)^k e_k z^{m-k}, low to high.
    let poly: Vec<Complex64> = (0..=m)
        .map(|d| {
            let k = m - d;
            if k % 2 == 0 { e[k] } else { -e[k] }
        })
        .collect();
    let dtaylor: Vec<Complex64> = taylor
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();
    let mut roots = poly_roots(&poly)?;
    for r in roots.iter_mut() {
        for _ in 0..8 {
            if r.norm() >= 1.0 {
                break;
            }
            let fv = poly_eval(&taylor, *r);
            let dv = poly_eval(&dtaylor, *r);
            if dv.norm() == 0.0 {
                break;
            }
            let step = fv / dv;
            *r -= step;
            if step.norm() < 1e-15 {
                break;
            }
        }
    }
    roots.sort_by(|a, b| {
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.arg().partial_cmp(&b.arg()).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(roots)
}
