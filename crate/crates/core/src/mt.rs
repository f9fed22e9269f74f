//! Malmquist-Takenaka bases on the torus and on the real line.
//!
//! Disk: `φ_n(z) = P(z) Π_{j<n} (z - a_j)/(1 - conj(a_j) z) · √(1 - |a_n|²)/(1 - conj(a_n) z)`
//! with an optional inner prefix `P`.
//! Half-plane: `φ_n(x) = √(Im a_n / π) Π_{j<n} (x - a_j)/(x - conj(a_j)) · 1/(x - conj(a_n))`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::{Domain, FiniteBlaschke};
use crate::error::{HardyError, Result};
use crate::numerics::{analytic_projection, RealLineGrid, TorusSignal};

/// Disk zeros closer than this to the circle are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-6;
const UNIMODULAR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BasisRepr", into = "BasisRepr")]
pub struct MTBasis {
    domain: Domain,
    zeros: Vec<Complex64>,
    prefix: Option<FiniteBlaschke>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRepr {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexRepr {
    fn from(z: Complex64) -> Self {
        ComplexRepr { re: z.re, im: z.im }
    }
}

impl From<ComplexRepr> for Complex64 {
    fn from(z: ComplexRepr) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Serialize, Deserialize)]
struct BasisRepr {
    domain: Domain,
    zeros: Vec<ComplexRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prefix: Option<FiniteBlaschke>,
}

impl TryFrom<BasisRepr> for MTBasis {
    type Error = HardyError;

    fn try_from(r: BasisRepr) -> Result<Self> {
        let zeros: Vec<Complex64> = r.zeros.into_iter().map(Into::into).collect();
        match r.domain {
            Domain::Disk => MTBasis::disk(&zeros, r.prefix),
            Domain::Halfplane => {
                if r.prefix.is_some() {
                    return Err(HardyError::invalid("half-plane bases take no prefix"));
                }
                MTBasis::halfplane(&zeros)
            }
        }
    }
}

impl From<MTBasis> for BasisRepr {
    fn from(b: MTBasis) -> Self {
        BasisRepr {
            domain: b.domain,
            zeros: b.zeros.into_iter().map(Into::into).collect(),
            prefix: b.prefix,
        }
    }
}

/// Basis coefficients together with the basis that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MTCoefficients {
    pub basis: MTBasis,
    pub coefficients: Vec<ComplexRepr>,
}

impl MTBasis {
    pub fn disk(zeros: &[Complex64], prefix: Option<FiniteBlaschke>) -> Result<Self> {
        for (j, a) in zeros.iter().enumerate() {
            if !a.is_finite() || a.norm() > 1.0 - BOUNDARY_MARGIN {
                return Err(HardyError::invalid(format!(
                    "zero {j} = {a} is too close to (or outside) the unit circle"
                )));
            }
        }
        if let Some(p) = &prefix {
            if p.domain() != Domain::Disk {
                return Err(HardyError::invalid("prefix must be a disk product"));
            }
        }
        Ok(MTBasis {
            domain: Domain::Disk,
            zeros: zeros.to_vec(),
            prefix,
        })
    }

    pub fn halfplane(zeros: &[Complex64]) -> Result<Self> {
        for (j, a) in zeros.iter().enumerate() {
            if !a.is_finite() || a.im < BOUNDARY_MARGIN {
                return Err(HardyError::invalid(format!(
                    "zero {j} = {a} is too close to (or below) the real line"
                )));
            }
        }
        Ok(MTBasis {
            domain: Domain::Halfplane,
            zeros: zeros.to_vec(),
            prefix: None,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn prefix(&self) -> Option<&FiniteBlaschke> {
        self.prefix.as_ref()
    }

    pub fn count(&self) -> usize {
        self.zeros.len()
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n >= self.count() {
            return Err(HardyError::IndexOutOfRange {
                index: n,
                count: self.count(),
            });
        }
        Ok(())
    }

    fn factor(&self, a: Complex64, z: Complex64) -> Complex64 {
        match self.domain {
            Domain::Disk => (z - a) / (1.0 - a.conj() * z),
            Domain::Halfplane => (z - a) / (z - a.conj()),
        }
    }

    fn kernel(&self, a: Complex64, z: Complex64) -> Complex64 {
        match self.domain {
            Domain::Disk => (1.0 - a.norm_sqr()).sqrt() / (1.0 - a.conj() * z),
            Domain::Halfplane => (a.im / PI).sqrt() / (z - a.conj()),
        }
    }

    fn prefix_at(&self, z: Complex64) -> Result<Complex64> {
        match &self.prefix {
            Some(p) => p.evaluate(z),
            None => Ok(Complex64::new(1.0, 0.0)),
        }
    }

    /// `φ_n(z)`.
    pub fn evaluate(&self, n: usize, z: Complex64) -> Result<Complex64> {
        self.check_index(n)?;
        let mut acc = self.prefix_at(z)?;
        for &a in &self.zeros[..n] {
            acc *= self.factor(a, z);
        }
        let v = acc * self.kernel(self.zeros[n], z);
        if !v.is_finite() {
            return Err(HardyError::domain(format!("basis function {n} is singular at {z}")));
        }
        Ok(v)
    }

    /// Values of `φ_0, ..., φ_{k-1}` at the points `zs`, built with a running product.
    fn sample_first(&self, k: usize, zs: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        if k > self.count() {
            return Err(HardyError::IndexOutOfRange {
                index: k,
                count: self.count(),
            });
        }
        let mut running: Vec<Complex64> = zs.iter().map(|&z| self.prefix_at(z)).collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(k);
        for &a in &self.zeros[..k] {
            let phi: Vec<Complex64> = zs
                .iter()
                .zip(&running)
                .map(|(&z, &r)| r * self.kernel(a, z))
                .collect();
            if phi.iter().any(|v| !v.is_finite()) {
                return Err(HardyError::domain("basis function singular on the sampling grid"));
            }
            out.push(phi);
            for (r, &z) in running.iter_mut().zip(zs) {
                *r *= self.factor(a, z);
            }
        }
        Ok(out)
    }

    fn require(&self, domain: Domain) -> Result<()> {
        if self.domain != domain {
            return Err(HardyError::invalid(format!(
                "operation needs a {domain:?} basis, got {:?}",
                self.domain
            )));
        }
        Ok(())
    }

    /// `φ_0, ..., φ_{k-1}` sampled on the `n`-point torus grid.
    pub fn torus_functions(&self, k: usize, n: usize) -> Result<Vec<TorusSignal>> {
        self.require(Domain::Disk)?;
        let zs: Vec<Complex64> = (0..n).map(|j| TorusSignal::grid_point(j, n)).collect();
        self.sample_first(k, &zs)?
            .into_iter()
            .map(TorusSignal::new)
            .collect()
    }

    /// `φ_0, ..., φ_{k-1}` sampled at the nodes of a real-line grid.
    pub fn line_functions(&self, k: usize, grid: &RealLineGrid) -> Result<Vec<Vec<Complex64>>> {
        self.require(Domain::Halfplane)?;
        let xs: Vec<Complex64> = grid.nodes().iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.sample_first(k, &xs)
    }

    /// `c_n = ⟨f, φ_n⟩` for `n < k`, on the torus.
    pub fn analyze_torus(&self, f: &TorusSignal, k: usize) -> Result<Vec<Complex64>> {
        self.torus_functions(k, f.len())?
            .iter()
            .map(|phi| f.inner(phi))
            .collect()
    }

    /// `Σ c_n φ_n` on the `n`-point torus grid.
    pub fn synthesize_torus(&self, coeffs: &[Complex64], n: usize) -> Result<TorusSignal> {
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        for (c, phi) in coeffs.iter().zip(self.torus_functions(coeffs.len(), n)?) {
            for (a, v) in acc.iter_mut().zip(phi.samples()) {
                *a += c * v;
            }
        }
        TorusSignal::new(acc)
    }

    /// `c_n = ∫ f conj(φ_n) dx` for `n < k`, with `f` sampled at the grid nodes.
    pub fn analyze_line(&self, f: &[Complex64], grid: &RealLineGrid, k: usize) -> Result<Vec<Complex64>> {
        self.line_functions(k, grid)?
            .iter()
            .map(|phi| grid.inner(f, phi))
            .collect()
    }

    pub fn synthesize_line(&self, coeffs: &[Complex64], grid: &RealLineGrid) -> Result<Vec<Complex64>> {
        let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (c, phi) in coeffs.iter().zip(self.line_functions(coeffs.len(), grid)?) {
            for (a, v) in acc.iter_mut().zip(&phi) {
                *a += c * v;
            }
        }
        Ok(acc)
    }

    /// Gram matrix of all basis functions on the `n`-point torus grid.
    pub fn gram_torus(&self, n: usize) -> Result<Vec<Vec<Complex64>>> {
        let fs = self.torus_functions(self.count(), n)?;
        fs.iter()
            .map(|f| fs.iter().map(|g| f.inner(g)).collect())
            .collect()
    }

    /// Gram matrix of all basis functions under the real-line quadrature.
    pub fn gram_line(&self, grid: &RealLineGrid) -> Result<Vec<Vec<Complex64>>> {
        let fs = self.line_functions(self.count(), grid)?;
        fs.iter()
            .map(|f| fs.iter().map(|g| grid.inner(f, g)).collect())
            .collect()
    }
}

/// Largest entry of `|G - I|`.
pub fn identity_deviation(gram: &[Vec<Complex64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, row) in gram.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).norm());
        }
    }
    worst
}

/// Block bases: block `m` has the zeros `blocks[m]` and the prefix
/// `B_0 ⋯ B_{m-1}`, where `B_i` is the Blaschke product with zeros `blocks[i]`.
pub fn block_bases(blocks: &[Vec<Complex64>]) -> Result<Vec<MTBasis>> {
    let mut prefix = FiniteBlaschke::monomial(0);
    let mut out = Vec::with_capacity(blocks.len());
    for block in blocks {
        out.push(MTBasis::disk(block, Some(prefix.clone()))?);
        let b = FiniteBlaschke::disk(0.0, 0, block)?;
        prefix = prefix.product(&b)?;
    }
    Ok(out)
}

/// The dyadic ring `(1 - 2^{-n}) e^{2πij/2^n}`, `1 ≤ n ≤ n_max`, `0 ≤ j < 2^n`,
/// ordered by `n` then `j`.
pub fn dyadic_ring_zeros(n_max: u32) -> Result<Vec<Complex64>> {
    if !(1..=12).contains(&n_max) {
        return Err(HardyError::invalid(format!("n_max must lie in 1..=12, got {n_max}")));
    }
    let mut out = Vec::with_capacity((1usize << (n_max + 1)) - 2);
    for n in 1..=n_max {
        let count = 1usize << n;
        let r = 1.0 - (-(n as f64)).exp2();
        for j in 0..count {
            out.push(Complex64::from_polar(r, 2.0 * PI * j as f64 / count as f64));
        }
    }
    Ok(out)
}

/// Orthogonal projection onto `u H²`: `u · ℋ(conj(u) f)`.
pub fn project_invariant(u: &FiniteBlaschke, f: &TorusSignal) -> Result<TorusSignal> {
    if u.domain() != Domain::Disk {
        return Err(HardyError::invalid("invariant-subspace projection needs a disk product"));
    }
    let n = f.len();
    let us = TorusSignal::try_from_fn(n, |z| u.evaluate(z))?;
    let dev = us.unimodularity_error();
    if dev > UNIMODULAR_TOL {
        return Err(HardyError::invalid(format!(
            "inner function deviates from modulus 1 by {dev:e} on the grid"
        )));
    }
    let pulled = &us.conj() * f;
    Ok(&us * &analytic_projection(&pulled)?)
}
