//! Fixed points of `B(z) = ((z + a)/(1 + conj(a) z))²`, the cardioid criterion, the
//! zero-modulus bounds `g`, `h` for `F(z) = z (z^k - a^k)/(1 - conj(a)^k z^k)` and
//! tail sums `Σ (1 - |z_j|)` over the zeros of iterates.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::blaschke::{iterate_zero_sets, zero_ladder, Domain, FiniteBlaschke, Zero};
use crate::error::{HardyError, Result};
use crate::mt::ComplexRepr;
use crate::numerics::{poly_eval, poly_roots};

/// `|Q|` at or below this is treated as lying on the cardioid.
pub const CARDIOID_TOL: f64 = 1e-6;
/// `||z| - 1|` at or below this counts as a boundary fixed point.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// A fixed point attracts when `|B'(z)| < 1 - ATTRACTION_MARGIN`.
pub const ATTRACTION_MARGIN: f64 = 1e-9;
/// Iterations used for the empirical limit of `B_n(0)`.
pub const ORBIT_STEPS: usize = 200;

const SANDWICH_SLACK: f64 = 1e-12;
const FIXED_POINT_TOL: f64 = 1e-9;
const LIMIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Interior,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// `Q < 0`: a unique fixed point inside the disk.
    InteriorFixedPoint,
    /// `Q > 0`: all fixed points on the circle.
    AllBoundary,
    /// `|Q| ≤ 1e-6`: classification by roots only.
    NearCardioid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub z: ComplexRepr,
    pub location: Location,
    pub multiplier: ComplexRepr,
    pub attracting: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub a: ComplexRepr,
    #[serde(rename = "Q")]
    pub q: f64,
    pub status: Classification,
    pub fixed_points: Vec<FixedPoint>,
    /// Roots of the fixed-point cubic outside the closed disk (reflections of interior ones).
    pub exterior_roots: Vec<ComplexRepr>,
    /// `B_200(0)`.
    pub limit_of_iterates: ComplexRepr,
    /// Whether `B_200(0)` is within 1e-6 of the attracting fixed point.
    pub limit_matches_attracting: bool,
    /// Whether the root count agrees with the sign of `Q` (always true on the cardioid).
    pub consistent_with_q: bool,
    /// Largest `|B(z) - z|` over the reported fixed points.
    pub max_residual: f64,
}

impl FixedPointReport {
    pub fn interior_count(&self) -> usize {
        self.fixed_points
            .iter()
            .filter(|p| p.location == Location::Interior)
            .count()
    }

    pub fn attracting(&self) -> Vec<&FixedPoint> {
        self.fixed_points.iter().filter(|p| p.attracting).collect()
    }
}

/// `Q = 27|a|⁴ - 18|a|² + 8 Re a - 1`.
pub fn cardioid_q(a: Complex64) -> f64 {
    let s = a.norm_sqr();
    27.0 * s * s - 18.0 * s + 8.0 * a.re - 1.0
}

/// `B(z) = ((z + a)/(1 + conj(a) z))²`.
pub fn square_example(a: Complex64) -> Result<FiniteBlaschke> {
    FiniteBlaschke::new(Domain::Disk, 0.0, 0, vec![Zero { value: -a, mult: 2 }])
}

/// `B'(z) = 2 (z + a)(1 - |a|²)/(1 + conj(a) z)³`.
pub fn square_example_derivative(a: Complex64, z: Complex64) -> Complex64 {
    2.0 * (z + a) * (1.0 - a.norm_sqr()) / (1.0 + a.conj() * z).powu(3)
}

/// Coefficients, low to high, of `conj(a)² z³ + (2 conj(a) - 1) z² - (2a - 1) z - a²`.
pub fn fixed_point_cubic(a: Complex64) -> [Complex64; 4] {
    let ab = a.conj();
    [-a * a, -(2.0 * a - 1.0), 2.0 * ab - 1.0, ab * ab]
}

/// The real cubic `P(x)` whose real roots are the real parts of the unimodular
/// fixed points; coefficients low to high.
pub fn real_part_polynomial(a: Complex64) -> [f64; 4] {
    let (t, u) = (a.re, a.im);
    let s = t * t + u * u;
    let c3 = 4.0 * s * s;
    let c2 = 8.0 * t * s - 4.0 * t * t + 4.0 * u * u;
    let c1 = -3.0 * s * s - 4.0 * t.powi(3) + 12.0 * t * u * u + 6.0 * t * t + 2.0 * u * u - 4.0 * t + 1.0;
    let c0 = -(t * t + 2.0 * t * u - u * u + 2.0 * t - 2.0 * u - 1.0)
        * (t * t - 2.0 * t * u - u * u + 2.0 * t + 2.0 * u - 1.0);
    [c0, c1, c2, c3]
}

fn polish_fixed_point(a: Complex64, b: &FiniteBlaschke, mut z: Complex64) -> Complex64 {
    for _ in 0..6 {
        let Ok(v) = b.evaluate(z) else { break };
        let d = square_example_derivative(a, z) - 1.0;
        if d.norm() < 1e-12 {
            break;
        }
        let cand = z - (v - z) / d;
        match b.evaluate(cand) {
            Ok(vc) if (vc - cand).norm() < (v - z).norm() => z = cand,
            _ => break,
        }
    }
    z
}

/// Fixed points, multipliers and the cardioid classification for the squared example.
pub fn classify_square_example(a: Complex64) -> Result<FixedPointReport> {
    if !a.is_finite() || a.norm() >= 1.0 {
        return Err(HardyError::invalid(format!("parameter {a} must lie in the open disk")));
    }
    let b = square_example(a)?;
    let q = cardioid_q(a);
    let roots = poly_roots(&fixed_point_cubic(a))?;

    let mut fixed_points = Vec::new();
    let mut exterior_roots = Vec::new();
    let mut max_residual: f64 = 0.0;
    for r in roots {
        let modulus = r.norm();
        if modulus > 1.0 + BOUNDARY_TOL {
            exterior_roots.push(r.into());
            continue;
        }
        let z = polish_fixed_point(a, &b, r);
        let location = if (z.norm() - 1.0).abs() <= BOUNDARY_TOL {
            Location::Boundary
        } else {
            Location::Interior
        };
        max_residual = max_residual.max((b.evaluate(z)? - z).norm());
        let multiplier = square_example_derivative(a, z);
        fixed_points.push(FixedPoint {
            z: z.into(),
            location,
            multiplier: multiplier.into(),
            attracting: multiplier.norm() < 1.0 - ATTRACTION_MARGIN,
        });
    }

    let interior = fixed_points
        .iter()
        .filter(|p| p.location == Location::Interior)
        .count();
    let status = if q.abs() <= CARDIOID_TOL {
        Classification::NearCardioid
    } else if q < 0.0 {
        Classification::InteriorFixedPoint
    } else {
        Classification::AllBoundary
    };
    let consistent_with_q = match status {
        Classification::NearCardioid => true,
        Classification::InteriorFixedPoint => interior == 1,
        Classification::AllBoundary => interior == 0 && fixed_points.len() == 3,
    };
    if max_residual > FIXED_POINT_TOL && status != Classification::NearCardioid {
        return Err(HardyError::numerical(format!(
            "fixed-point residual {max_residual:e} above {FIXED_POINT_TOL:e}"
        )));
    }

    let mut z = Complex64::new(0.0, 0.0);
    for _ in 0..ORBIT_STEPS {
        z = b.evaluate(z)?;
    }
    let limit_matches_attracting = fixed_points
        .iter()
        .filter(|p| p.attracting)
        .any(|p| (Complex64::from(p.z) - z).norm() <= LIMIT_TOL);

    Ok(FixedPointReport {
        a: a.into(),
        q,
        status,
        fixed_points,
        exterior_roots,
        limit_of_iterates: z.into(),
        limit_matches_attracting,
        consistent_with_q,
        max_residual,
    })
}

/// The polynomial `R(w)` whose roots are the reciprocal multipliers, its shift
/// `R_1(w) = R(1 + w)` and the checks built on them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultantReport {
    /// `R` coefficients, low to high.
    pub r_coefficients: [f64; 4],
    pub r_roots: Vec<ComplexRepr>,
    /// `R_1` coefficients, low to high.
    pub r1_coefficients: [f64; 4],
    pub r1_sign_variations: usize,
    pub has_real_root_above_one: bool,
    /// Largest `min_z |w B'(z) - 1|` over the roots `w`, with `z` ranging over all
    /// roots of the fixed-point cubic.
    pub reciprocal_residual: f64,
}

/// `R(w)` coefficients, low to high, in `s = |a|²` and `t = Re a`.
pub fn resultant_coefficients(a: Complex64) -> [f64; 4] {
    let s = a.norm_sqr();
    let t = a.re;
    [
        (s - 1.0) * (s - 1.0),
        2.0 * (3.0 * s + 1.0) * (s - 1.0),
        12.0 * s * s - 4.0 * s + 8.0 * t,
        8.0 * s * (s - 1.0),
    ]
}

/// `R_1(w) = R(1 + w)` coefficients, low to high.
pub fn shifted_resultant_coefficients(a: Complex64) -> [f64; 4] {
    let s = a.norm_sqr();
    let q = cardioid_q(a);
    [
        q,
        2.0 * q,
        4.0 * (9.0 * s * s - 7.0 * s + 2.0 * a.re),
        8.0 * s * (s - 1.0),
    ]
}

pub fn sign_variations(coeffs: &[f64]) -> usize {
    let signs: Vec<f64> = coeffs
        .iter()
        .filter(|c| **c != 0.0)
        .map(|c| c.signum())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

pub fn multiplier_resultant(a: Complex64) -> Result<ResultantReport> {
    if !a.is_finite() || a.norm() >= 1.0 || a.norm() == 0.0 {
        return Err(HardyError::invalid(format!(
            "parameter {a} must lie in the punctured open disk"
        )));
    }
    let r = resultant_coefficients(a);
    let r_complex: Vec<Complex64> = r.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let roots = poly_roots(&r_complex)?;
    let fixed = poly_roots(&fixed_point_cubic(a))?;
    let reciprocal_residual = roots
        .iter()
        .map(|w| {
            fixed
                .iter()
                .map(|z| (w * square_example_derivative(a, *z) - 1.0).norm())
                .fold(f64::MAX, f64::min)
        })
        .fold(0.0, f64::max);
    let scale = roots.iter().map(|w| w.norm()).fold(1.0, f64::max);
    let has_real_root_above_one = roots
        .iter()
        .any(|w| w.im.abs() <= 1e-9 * scale && w.re > 1.0);
    let r1 = shifted_resultant_coefficients(a);
    Ok(ResultantReport {
        r_coefficients: r,
        r_roots: roots.into_iter().map(Into::into).collect(),
        r1_coefficients: r1,
        r1_sign_variations: sign_variations(&r1),
        has_real_root_above_one,
        reciprocal_residual,
    })
}

fn cardioid_quartic(r: f64, cos_alpha: f64) -> f64 {
    let r2 = r * r;
    27.0 * r2 * r2 - 18.0 * r2 + 8.0 * r * cos_alpha - 1.0
}

/// Points `(t, u)` of the cardioid `27(t²+u²)² - 18(t²+u²) + 8t - 1 = 0`.
///
/// The polar angles `α_k = π(2k - (n-1))/n` are symmetric about 0 and avoid the
/// cusp at `α = π`, which lies on the unit circle. For each angle the radius is the
/// root in `(0, 1)` of `27r⁴ - 18r² + 8r cos α - 1`, found by bisection.
pub fn cardioid_curve(n_samples: usize) -> Result<Vec<(f64, f64)>> {
    if n_samples < 16 {
        return Err(HardyError::invalid(format!("need at least 16 samples, got {n_samples}")));
    }
    let n = n_samples as f64;
    (0..n_samples)
        .map(|k| {
            let alpha = PI * (2.0 * k as f64 - (n - 1.0)) / n;
            let c = alpha.cos();
            let r = bisect(|r| cardioid_quartic(r, c), 0.0, 1.0)?;
            Ok((r * alpha.cos(), r * alpha.sin()))
        })
        .collect()
}

/// Root of an increasing-through-zero `f` on `[lo, hi]` with `f(lo) ≤ 0 ≤ f(hi)`,
/// bisected until the bracket stops shrinking.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(HardyError::numerical(format!(
            "bisection bracket [{lo}, {hi}] does not contain a sign change"
        )));
    }
    let rising = fhi > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Numerical inverses `g = ψ⁻¹` and `h = φ⁻¹` of
/// `ψ(r) = r(r^k + ρ^k)/(1 + r^k ρ^k)` and `φ(r) = r(r^k - ρ^k)/(1 - r^k ρ^k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPair {
    rho: f64,
    k: u32,
}

pub fn bound_pair(rho: f64, k: u32) -> Result<BoundPair> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(HardyError::invalid(format!("modulus {rho} must lie in (0, 1)")));
    }
    if k == 0 {
        return Err(HardyError::invalid("k must be at least 1"));
    }
    Ok(BoundPair { rho, k })
}

impl BoundPair {
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn psi(&self, r: f64) -> f64 {
        let rk = r.powi(self.k as i32);
        let pk = self.rho.powi(self.k as i32);
        r * (rk + pk) / (1.0 + rk * pk)
    }

    pub fn phi(&self, r: f64) -> f64 {
        let rk = r.powi(self.k as i32);
        let pk = self.rho.powi(self.k as i32);
        r * (rk - pk) / (1.0 - rk * pk)
    }

    fn check_arg(t: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&t) {
            return Err(HardyError::invalid(format!("argument {t} outside [0, 1]")));
        }
        Ok(())
    }

    /// `g(t) = ψ⁻¹(t)`.
    pub fn g(&self, t: f64) -> Result<f64> {
        Self::check_arg(t)?;
        if t == 0.0 || t == 1.0 {
            return Ok(t);
        }
        bisect(|r| self.psi(r) - t, 0.0, 1.0)
    }

    /// `h(t) = φ⁻¹(t)`, with values in `[ρ, 1]`.
    pub fn h(&self, t: f64) -> Result<f64> {
        Self::check_arg(t)?;
        if t == 0.0 {
            return Ok(self.rho);
        }
        if t == 1.0 {
            return Ok(1.0);
        }
        bisect(|r| self.phi(r) - t, self.rho, 1.0)
    }

    /// `g_n(t)`, the `n`-fold composition.
    pub fn g_iter(&self, n: usize, t: f64) -> Result<f64> {
        (0..n).try_fold(t, |acc, _| self.g(acc))
    }

    pub fn h_iter(&self, n: usize, t: f64) -> Result<f64> {
        (0..n).try_fold(t, |acc, _| self.h(acc))
    }

    /// `g'(1) = 1/(1 + k(1 - ρ^k)/(1 + ρ^k))`.
    pub fn g_derivative_at_one(&self) -> f64 {
        let pk = self.rho.powi(self.k as i32);
        1.0 / (1.0 + self.k as f64 * (1.0 - pk) / (1.0 + pk))
    }

    /// `h'(1) = 1/(1 + k(1 + ρ^k)/(1 - ρ^k))`.
    pub fn h_derivative_at_one(&self) -> f64 {
        let pk = self.rho.powi(self.k as i32);
        1.0 / (1.0 + self.k as f64 * (1.0 + pk) / (1.0 - pk))
    }
}

/// `F(z) = z (z^k - a^k)/(1 - conj(a)^k z^k)`, whose zeros besides 0 are `a ω^j`.
pub fn sandwich_map(a: Complex64, k: u32) -> Result<FiniteBlaschke> {
    if k == 0 {
        return Err(HardyError::invalid("k must be at least 1"));
    }
    let zeros: Vec<Complex64> = (0..k)
        .map(|j| a * Complex64::from_polar(1.0, 2.0 * PI * j as f64 / k as f64))
        .collect();
    FiniteBlaschke::disk(0.0, 1, &zeros)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichLevel {
    /// Ladder level (new zeros of `F_level`).
    pub level: usize,
    pub lower: f64,
    pub upper: f64,
    pub min_modulus: f64,
    pub max_modulus: f64,
    pub count: usize,
    /// Closed containment `g ≤ |w| ≤ h`, up to a relative slack of `1e-12`.
    pub holds: bool,
    /// Open containment `g < |w| < h`.
    pub strict: bool,
}

/// For every ladder level `L ≥ 2`, checks that the new zeros satisfy
/// `g_{L-1}(|a|) ≤ |w| ≤ h_{L-1}(|a|)`, and records whether the inequalities are strict.
/// Both bounds are attained when preimages line up with the zeros they map to, as
/// happens on the real axis for real `a`.
pub fn sandwich_check(
    a: Complex64,
    k: u32,
    n_max: usize,
    degree_cap: usize,
) -> Result<Vec<SandwichLevel>> {
    let rho = a.norm();
    let pair = bound_pair(rho, k)?;
    let f = sandwich_map(a, k)?;
    let ladder = zero_ladder(&f, n_max + 1, degree_cap)?;
    let mut out = Vec::with_capacity(n_max);
    for level in 2..=n_max + 1 {
        let n = level - 1;
        let lower = pair.g_iter(n, rho)?;
        let upper = pair.h_iter(n, rho)?;
        let zeros = ladder.level(level);
        let (min_modulus, max_modulus) = zeros.iter().fold((f64::MAX, 0.0f64), |(lo, hi), z| {
            let m = z.value.norm();
            (lo.min(m), hi.max(m))
        });
        out.push(SandwichLevel {
            level,
            lower,
            upper,
            min_modulus,
            max_modulus,
            count: zeros.iter().map(|z| z.mult as usize).sum(),
            holds: lower - SANDWICH_SLACK * lower <= min_modulus
                && max_modulus <= upper + SANDWICH_SLACK * upper,
            strict: lower < min_modulus && max_modulus < upper,
        });
    }
    Ok(out)
}

/// Per-level contributions to `Σ (1 - |z_j|)` over the zeros of the iterates, and the
/// orbit gaps `1 - |B_n(0)|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub increments: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// `1 - |B_n(0)|` for `n = 1, 2, ...` while it stays above `1e-14`.
    pub orbit_gaps: Vec<f64>,
}

impl TailReport {
    /// Mean ratio of consecutive orbit gaps over the last half of the recorded orbit.
    pub fn orbit_gap_ratio(&self) -> Option<f64> {
        let g = &self.orbit_gaps;
        if g.len() < 4 {
            return None;
        }
        let start = g.len() / 2;
        let span = (g.len() - 1 - start) as f64;
        Some((g[g.len() - 1] / g[start]).powf(1.0 / span))
    }
}

fn tail_increment(zeros: &[Zero]) -> f64 {
    zeros.iter().map(|z| z.mult as f64 * (1.0 - z.value.norm())).sum()
}

/// Tail sums over the zeros of `F_1, ..., F_{n_max}`: for `F = zB` the new zeros of each
/// ladder level, otherwise all zeros of each iterate. The orbit of 0 is followed for
/// `orbit_steps` iterations.
pub fn zero_tail_sum(
    f: &FiniteBlaschke,
    n_max: usize,
    orbit_steps: usize,
    degree_cap: usize,
) -> Result<TailReport> {
    let levels: Vec<Vec<Zero>> = if f.nu() >= 1 && f.degree() >= 2 {
        zero_ladder(f, n_max, degree_cap)?.levels().to_vec()
    } else {
        iterate_zero_sets(f, n_max, degree_cap)?
    };
    let increments: Vec<f64> = levels.iter().map(|l| tail_increment(l)).collect();
    let partial_sums = increments
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    let mut orbit_gaps = Vec::new();
    let mut z = Complex64::new(0.0, 0.0);
    for _ in 0..orbit_steps {
        z = f.evaluate(z)?;
        let gap = 1.0 - z.norm();
        if gap < 1e-14 {
            break;
        }
        orbit_gaps.push(gap);
    }
    Ok(TailReport {
        increments,
        partial_sums,
        orbit_gaps,
    })
}

/// Value of `P` at `x` scaled by its largest coefficient.
pub fn scaled_real_part_residual(a: Complex64, x: f64) -> f64 {
    let p = real_part_polynomial(a);
    let scale = p.iter().map(|c| c.abs()).fold(0.0, f64::max).max(1e-300);
    let pc: Vec<Complex64> = p.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    poly_eval(&pc, Complex64::new(x, 0.0)).norm() / scale
}
