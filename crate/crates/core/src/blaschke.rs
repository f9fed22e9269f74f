//! Finite Blaschke products on the unit disk and on the upper half-plane.
//!
//! Zeros are stored as roots: a disk product is
//! `B(z) = e^{iθ} z^ν Π_j ((z - z_j) / (1 - conj(z_j) z))^{m_j}`
//! and a half-plane product is `B(x) = e^{iθ} Π_j ((x - a_j) / (x - conj(a_j)))^{m_j}`.
//! A factor written `(z + a)/(1 + conj(a) z)` therefore has stored zero `-a`
//! (see [`FiniteBlaschke::from_plus_form`]).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HardyError, Result};
use crate::numerics::poly_roots;

/// Default cap on the degree of explicitly expanded iterates.
pub const DEFAULT_DEGREE_CAP: usize = 4096;

const ZERO_MARGIN: f64 = 1e-14;
const POLE_TOL: f64 = 1e-13;
const PREIMAGE_TOL: f64 = 1e-8;
const PHASE_MATCH_TOL: f64 = 1e-8;
const PHASE_TEST_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Disk,
    Halfplane,
}

/// A zero together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub value: Complex64,
    pub mult: u32,
}

impl Zero {
    pub fn simple(value: Complex64) -> Self {
        Zero { value, mult: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlaschkeRepr", into = "BlaschkeRepr")]
pub struct FiniteBlaschke {
    domain: Domain,
    theta: f64,
    nu: u32,
    zeros: Vec<Zero>,
}

#[derive(Serialize, Deserialize)]
struct ZeroRepr {
    re: f64,
    im: f64,
    #[serde(default = "one")]
    mult: u32,
}

fn one() -> u32 {
    1
}

#[derive(Serialize, Deserialize)]
struct BlaschkeRepr {
    domain: Domain,
    #[serde(default)]
    theta: f64,
    #[serde(default)]
    nu: u32,
    #[serde(default)]
    zeros: Vec<ZeroRepr>,
}

impl TryFrom<BlaschkeRepr> for FiniteBlaschke {
    type Error = HardyError;

    fn try_from(r: BlaschkeRepr) -> Result<Self> {
        FiniteBlaschke::new(
            r.domain,
            r.theta,
            r.nu,
            r.zeros
                .into_iter()
                .map(|z| Zero {
                    value: Complex64::new(z.re, z.im),
                    mult: z.mult,
                })
                .collect(),
        )
    }
}

impl From<FiniteBlaschke> for BlaschkeRepr {
    fn from(b: FiniteBlaschke) -> Self {
        BlaschkeRepr {
            domain: b.domain,
            theta: b.theta,
            nu: b.nu,
            zeros: b
                .zeros
                .iter()
                .map(|z| ZeroRepr {
                    re: z.value.re,
                    im: z.value.im,
                    mult: z.mult,
                })
                .collect(),
        }
    }
}

impl FiniteBlaschke {
    pub fn new(domain: Domain, theta: f64, nu: u32, zeros: Vec<Zero>) -> Result<Self> {
        if !theta.is_finite() {
            return Err(HardyError::invalid("phase constant must be finite"));
        }
        if domain == Domain::Halfplane && nu != 0 {
            return Err(HardyError::invalid("half-plane products have no monomial part"));
        }
        for (j, z) in zeros.iter().enumerate() {
            if z.mult == 0 {
                return Err(HardyError::invalid(format!("zero {j} has multiplicity 0")));
            }
            let ok = match domain {
                Domain::Disk => z.value.is_finite() && z.value.norm() < 1.0 - ZERO_MARGIN,
                Domain::Halfplane => z.value.is_finite() && z.value.im > ZERO_MARGIN,
            };
            if !ok {
                return Err(HardyError::invalid(format!(
                    "zero {j} = {} violates the {:?} constraint",
                    z.value, domain
                )));
            }
        }
        Ok(FiniteBlaschke {
            domain,
            theta,
            nu,
            zeros,
        })
    }

    /// Disk product with simple zeros.
    pub fn disk(theta: f64, nu: u32, zeros: &[Complex64]) -> Result<Self> {
        Self::new(
            Domain::Disk,
            theta,
            nu,
            zeros.iter().map(|&z| Zero::simple(z)).collect(),
        )
    }

    /// Half-plane product with simple zeros (all with positive imaginary part).
    pub fn halfplane(theta: f64, zeros: &[Complex64]) -> Result<Self> {
        Self::new(
            Domain::Halfplane,
            theta,
            0,
            zeros.iter().map(|&z| Zero::simple(z)).collect(),
        )
    }

    /// `e^{iθ} z^ν Π (z + a_j)/(1 + conj(a_j) z)`: the factors are given by `a_j`, so the
    /// stored zeros are `-a_j`.
    pub fn from_plus_form(theta: f64, nu: u32, a: &[Complex64]) -> Result<Self> {
        let negated: Vec<Complex64> = a.iter().map(|x| -x).collect();
        Self::disk(theta, nu, &negated)
    }

    /// `B(z) = z^ν`.
    pub fn monomial(nu: u32) -> Self {
        FiniteBlaschke {
            domain: Domain::Disk,
            theta: 0.0,
            nu,
            zeros: Vec::new(),
        }
    }

    pub fn identity() -> Self {
        Self::monomial(1)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn zeros(&self) -> &[Zero] {
        &self.zeros
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    /// Number of zeros counted with multiplicity (including the monomial part).
    pub fn degree(&self) -> usize {
        self.nu as usize + self.zeros.iter().map(|z| z.mult as usize).sum::<usize>()
    }

    /// All zeros with multiplicity, the monomial part included as zeros at the origin.
    pub fn all_zeros(&self) -> Vec<Zero> {
        let mut out = Vec::with_capacity(self.zeros.len() + 1);
        if self.nu > 0 {
            out.push(Zero {
                value: Complex64::new(0.0, 0.0),
                mult: self.nu,
            });
        }
        out.extend_from_slice(&self.zeros);
        out
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::from_polar(1.0, self.theta);
        match self.domain {
            Domain::Disk => {
                if self.nu > 0 {
                    acc *= z.powu(self.nu);
                }
                for zero in &self.zeros {
                    let den = 1.0 - zero.value.conj() * z;
                    if den.norm() < POLE_TOL {
                        return Err(HardyError::domain(format!(
                            "{z} is a pole of the Blaschke product"
                        )));
                    }
                    acc *= ((z - zero.value) / den).powu(zero.mult);
                }
            }
            Domain::Halfplane => {
                for zero in &self.zeros {
                    let den = z - zero.value.conj();
                    if den.norm() < POLE_TOL {
                        return Err(HardyError::domain(format!(
                            "{z} is a pole of the Blaschke product"
                        )));
                    }
                    acc *= ((z - zero.value) / den).powu(zero.mult);
                }
            }
        }
        Ok(acc)
    }

    /// Complex derivative of a disk product.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        if self.domain != Domain::Disk {
            return Err(HardyError::invalid("derivative is implemented for disk products"));
        }
        let unit = Complex64::from_polar(1.0, self.theta);
        // At a zero the logarithmic derivative is singular: differentiate the vanishing
        // factor explicitly.
        if self.nu > 0 && z.norm() == 0.0 {
            if self.nu > 1 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let rest = self
                .zeros
                .iter()
                .fold(unit, |acc, zr| acc * (-zr.value).powu(zr.mult));
            return Ok(rest);
        }
        if let Some(idx) = self.zeros.iter().position(|zr| (z - zr.value).norm() < 1e-300) {
            let zr = self.zeros[idx];
            if zr.mult > 1 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let mut rest = unit * z.powu(self.nu);
            for (k, other) in self.zeros.iter().enumerate() {
                if k != idx {
                    rest *= ((z - other.value) / (1.0 - other.value.conj() * z)).powu(other.mult);
                }
            }
            return Ok(rest / (1.0 - zr.value.norm_sqr()));
        }
        let value = self.evaluate(z)?;
        let mut log_deriv = if self.nu > 0 {
            self.nu as f64 / z
        } else {
            Complex64::new(0.0, 0.0)
        };
        for zr in &self.zeros {
            let c = zr.value.conj();
            log_deriv += zr.mult as f64 * (1.0 / (z - zr.value) + c / (1.0 - c * z));
        }
        Ok(value * log_deriv)
    }

    /// Pointwise product of two products on the same domain.
    pub fn product(&self, other: &FiniteBlaschke) -> Result<FiniteBlaschke> {
        if self.domain != other.domain {
            return Err(HardyError::invalid("cannot multiply products on different domains"));
        }
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.zeros);
        FiniteBlaschke::new(
            self.domain,
            self.theta + other.theta,
            self.nu + other.nu,
            merge_zeros(zeros),
        )
    }

    /// Numerator and denominator polynomials (low to high) of a disk product:
    /// `B = N / D` with `D(0) = 1`.
    fn polynomials(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut num = vec![Complex64::new(0.0, 0.0); self.nu as usize];
        num.push(Complex64::from_polar(1.0, self.theta));
        let mut den = vec![Complex64::new(1.0, 0.0)];
        for zr in &self.zeros {
            for _ in 0..zr.mult {
                num = mul_linear(&num, -zr.value, Complex64::new(1.0, 0.0));
                den = mul_linear(&den, Complex64::new(1.0, 0.0), -zr.value.conj());
            }
        }
        (num, den)
    }

    /// All solutions in the disk of `B(z) = w` for `|w| < 1`, each of multiplicity one
    /// unless `w = 0`, in which case the zeros of `B` are returned.
    pub fn preimages(&self, w: Complex64) -> Result<Vec<Zero>> {
        if self.domain != Domain::Disk {
            return Err(HardyError::invalid("preimages are implemented for disk products"));
        }
        if w.norm() >= 1.0 {
            return Err(HardyError::invalid(format!("preimage target {w} is not in the disk")));
        }
        if w.norm() == 0.0 {
            return Ok(self.all_zeros());
        }
        let (num, den) = self.polynomials();
        let len = num.len().max(den.len());
        let coeffs: Vec<Complex64> = (0..len)
            .map(|k| {
                num.get(k).copied().unwrap_or_default() - w * den.get(k).copied().unwrap_or_default()
            })
            .collect();
        let mut roots = poly_roots(&coeffs)?;
        for r in roots.iter_mut() {
            for _ in 0..4 {
                let (Ok(f), Ok(df)) = (self.evaluate(*r), self.derivative(*r)) else {
                    break;
                };
                if df.norm() == 0.0 {
                    break;
                }
                let cand = *r - (f - w) / df;
                match self.evaluate(cand) {
                    Ok(fc) if (fc - w).norm() < (f - w).norm() => *r = cand,
                    _ => break,
                }
            }
            let res = (self.evaluate(*r)? - w).norm();
            if res > PREIMAGE_TOL || r.norm() >= 1.0 - ZERO_MARGIN {
                return Err(HardyError::numerical(format!(
                    "preimage {r} of {w} has residual {res:e}"
                )));
            }
        }
        Ok(roots.into_iter().map(Zero::simple).collect())
    }
}

fn mul_linear(p: &[Complex64], c0: Complex64, c1: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); p.len() + 1];
    for (k, a) in p.iter().enumerate() {
        out[k] += a * c0;
        out[k + 1] += a * c1;
    }
    out
}

/// Merges entries with identical zero values.
fn merge_zeros(zeros: Vec<Zero>) -> Vec<Zero> {
    let mut out: Vec<Zero> = Vec::with_capacity(zeros.len());
    for z in zeros {
        if let Some(existing) = out.iter_mut().find(|e| e.value == z.value) {
            existing.mult += z.mult;
        } else {
            out.push(z);
        }
    }
    out
}

/// Splits a zero list into the multiplicity at the origin and the remaining zeros.
fn split_origin(zeros: Vec<Zero>) -> (u32, Vec<Zero>) {
    let mut nu = 0;
    let mut rest = Vec::with_capacity(zeros.len());
    for z in zeros {
        if z.value.norm() == 0.0 {
            nu += z.mult;
        } else {
            rest.push(z);
        }
    }
    (nu, rest)
}

fn phase_test_points() -> impl Iterator<Item = Complex64> {
    (0..PHASE_TEST_POINTS)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.3) / PHASE_TEST_POINTS as f64))
}

/// Explicit zero list of `outer ∘ inner` (disk products only).
///
/// Zeros are the preimages under `inner` of the zeros of `outer`; the phase
/// constant is fitted against direct evaluation at boundary test points.
pub fn compose(outer: &FiniteBlaschke, inner: &FiniteBlaschke) -> Result<FiniteBlaschke> {
    if outer.domain != Domain::Disk || inner.domain != Domain::Disk {
        return Err(HardyError::invalid("composition is implemented for disk products"));
    }
    let mut zeros = Vec::new();
    for w in outer.all_zeros() {
        for p in inner.preimages(w.value)? {
            zeros.push(Zero {
                value: p.value,
                mult: p.mult * w.mult,
            });
        }
    }
    let (nu, zeros) = split_origin(merge_zeros(zeros));
    let bare = FiniteBlaschke::new(Domain::Disk, 0.0, nu, zeros)?;
    fit_phase(bare, |z| outer.evaluate(inner.evaluate(z)?))
}

fn fit_phase(
    bare: FiniteBlaschke,
    target: impl Fn(Complex64) -> Result<Complex64>,
) -> Result<FiniteBlaschke> {
    let mut pairs = Vec::with_capacity(PHASE_TEST_POINTS);
    let mut ratio_sum = Complex64::new(0.0, 0.0);
    for z in phase_test_points() {
        let t = target(z)?;
        let b = bare.evaluate(z)?;
        ratio_sum += t / b;
        pairs.push((t, b));
    }
    let theta = ratio_sum.arg();
    let unit = Complex64::from_polar(1.0, theta);
    let mismatch = pairs
        .iter()
        .map(|(t, b)| (t - unit * b).norm())
        .fold(0.0, f64::max);
    if mismatch > PHASE_MATCH_TOL {
        return Err(HardyError::numerical(format!(
            "composed product deviates from pointwise evaluation by {mismatch:e}"
        )));
    }
    Ok(bare.with_theta(theta))
}

/// `n`-th iterate `B ∘ ... ∘ B` as an explicit product, with `B_{k+1} = B_k ∘ B`.
pub fn iterate(b: &FiniteBlaschke, n: usize, degree_cap: usize) -> Result<FiniteBlaschke> {
    if b.domain != Domain::Disk {
        return Err(HardyError::invalid("iteration is implemented for disk products"));
    }
    if n == 0 {
        return Err(HardyError::invalid("iteration count must be positive"));
    }
    let deg = b.degree();
    if deg == 0 {
        return Err(HardyError::invalid("cannot iterate a constant"));
    }
    check_cap(deg, n, degree_cap)?;
    let mut current = b.clone();
    for _ in 1..n {
        current = compose(&current, b)?;
    }
    Ok(current)
}

fn check_cap(deg: usize, n: usize, cap: usize) -> Result<()> {
    let total = (deg as f64).powi(n as i32);
    if total > cap as f64 {
        return Err(HardyError::Resource(format!(
            "degree {deg}^{n} exceeds the cap {cap}"
        )));
    }
    Ok(())
}

/// A composition `maps[k-1] ∘ ... ∘ maps[0]` evaluated pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeChain {
    maps: Vec<FiniteBlaschke>,
}

impl BlaschkeChain {
    /// Chain of `maps`, with `maps[0]` applied first.
    pub fn new(maps: Vec<FiniteBlaschke>) -> Self {
        BlaschkeChain { maps }
    }

    pub fn iterate(b: &FiniteBlaschke, n: usize) -> Self {
        BlaschkeChain {
            maps: vec![b.clone(); n],
        }
    }

    pub fn maps(&self) -> &[FiniteBlaschke] {
        &self.maps
    }

    pub fn degree(&self) -> f64 {
        self.maps.iter().map(|m| m.degree() as f64).product()
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        self.maps.iter().try_fold(z, |acc, m| m.evaluate(acc))
    }
}

/// An iterate that is explicit below the degree cap and lazy above it.
#[derive(Debug, Clone, PartialEq)]
pub enum Iterate {
    Explicit(FiniteBlaschke),
    Chain(BlaschkeChain),
}

impl Iterate {
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Iterate::Explicit(b) => b.evaluate(z),
            Iterate::Chain(c) => c.evaluate(z),
        }
    }
}

pub fn iterate_or_chain(b: &FiniteBlaschke, n: usize, degree_cap: usize) -> Result<Iterate> {
    match iterate(b, n, degree_cap) {
        Ok(explicit) => Ok(Iterate::Explicit(explicit)),
        Err(HardyError::Resource(_)) => Ok(Iterate::Chain(BlaschkeChain::iterate(b, n))),
        Err(e) => Err(e),
    }
}

/// Level-by-level zeros of the iterates `F_n` of `F = z B`.
///
/// Level 1 holds all zeros of `F`; level `n ≥ 2` holds the zeros of `F_n / F_{n-1}`,
/// the preimages under `F` of the previous level (level 1 enters the recursion
/// through the zeros of `B`).
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroLadder {
    levels: Vec<Vec<Zero>>,
    cumulative: Vec<usize>,
}

impl ZeroLadder {
    pub fn levels(&self) -> &[Vec<Zero>] {
        &self.levels
    }

    /// New zeros at level `n` (1-based).
    pub fn level(&self, n: usize) -> &[Zero] {
        &self.levels[n - 1]
    }

    /// Number of zeros of `F_n`, counted with multiplicity, for `n = 1, 2, ...`.
    pub fn cumulative_counts(&self) -> &[usize] {
        &self.cumulative
    }
}

fn count(zeros: &[Zero]) -> usize {
    zeros.iter().map(|z| z.mult as usize).sum()
}

pub fn zero_ladder(f: &FiniteBlaschke, n_max: usize, degree_cap: usize) -> Result<ZeroLadder> {
    if f.domain != Domain::Disk || f.nu == 0 {
        return Err(HardyError::invalid(
            "zero ladder needs a disk product of the form z·B (monomial order >= 1)",
        ));
    }
    if f.degree() < 2 {
        return Err(HardyError::invalid("zero ladder needs degree >= 2"));
    }
    if n_max == 0 {
        return Err(HardyError::invalid("n_max must be positive"));
    }
    check_cap(f.degree(), n_max, degree_cap)?;

    let level1 = f.all_zeros();
    // Zeros of B = F / z.
    let mut seed = f.zeros.clone();
    if f.nu > 1 {
        seed.insert(
            0,
            Zero {
                value: Complex64::new(0.0, 0.0),
                mult: f.nu - 1,
            },
        );
    }
    let mut levels = vec![level1];
    let mut cumulative = vec![f.degree()];
    let mut previous = seed;
    for _ in 1..n_max {
        let mut next = Vec::new();
        for w in &previous {
            for p in f.preimages(w.value)? {
                next.push(Zero {
                    value: p.value,
                    mult: p.mult * w.mult,
                });
            }
        }
        let next = merge_zeros(next);
        cumulative.push(cumulative.last().unwrap() + count(&next));
        levels.push(next.clone());
        previous = next;
    }
    Ok(ZeroLadder { levels, cumulative })
}

/// Zeros of every iterate `F_1, ..., F_{n_max}`; works for any disk product of degree >= 1.
pub fn iterate_zero_sets(
    f: &FiniteBlaschke,
    n_max: usize,
    degree_cap: usize,
) -> Result<Vec<Vec<Zero>>> {
    if f.domain != Domain::Disk || f.degree() == 0 {
        return Err(HardyError::invalid("need a disk product of degree >= 1"));
    }
    check_cap(f.degree(), n_max, degree_cap)?;
    let mut sets = vec![f.all_zeros()];
    for _ in 1..n_max {
        let mut next = Vec::new();
        for w in sets.last().unwrap() {
            for p in f.preimages(w.value)? {
                next.push(Zero {
                    value: p.value,
                    mult: p.mult * w.mult,
                });
            }
        }
        sets.push(merge_zeros(next));
    }
    Ok(sets)
}

/// Reduces an angle into `(-π, π]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let r = theta.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// The arctan sigmoid `σ(u) = arctan(u) + π/2`.
pub fn sigmoid(u: f64) -> f64 {
    u.atan() + PI / 2.0
}

/// Phase of a half-plane product on the real line written as a sum of sigmoids:
/// `θ(x) = θ_0 + Σ_j m_j · 2σ((x - α_j)/β_j)` reduced into `(-π, π]`, where
/// `a_j = α_j + iβ_j`. Each factor `(x - a)/(x - conj a)` has argument `2σ(u) - 2π`.
pub fn phase_layer(b: &FiniteBlaschke, x: f64) -> Result<f64> {
    if b.domain != Domain::Halfplane {
        return Err(HardyError::invalid("phase layer needs a half-plane product"));
    }
    if !x.is_finite() {
        return Err(HardyError::invalid("phase layer needs a finite abscissa"));
    }
    let total = b.zeros.iter().fold(b.theta, |acc, z| {
        acc + z.mult as f64 * 2.0 * sigmoid((x - z.value.re) / z.value.im)
    });
    Ok(wrap_phase(total))
}
