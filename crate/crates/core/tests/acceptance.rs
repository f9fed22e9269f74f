//! Acceptance suite: one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hardy_core::blaschke::{compose, iterate_or_chain, FiniteBlaschke, DEFAULT_DEGREE_CAP};
use hardy_core::dynamics::{
    bound_pair, cardioid_q, classify_square_example, multiplier_resultant, sandwich_check,
    sandwich_map, square_example, zero_tail_sum,
};
use hardy_core::mt::{identity_deviation, MTBasis};
use hardy_core::numerics::{poly_eval, polynomial_from_roots, TorusSignal};
use hardy_core::render::{sample_field, RenderMode, RenderSpec};
use hardy_core::unwinding::{unwind, weiss_factor};
use hardy_core::wavelet::{
    g_n_eval, g_n_partial_product, identity_deviation as wavelet_identity_deviation,
    phi_shift_identity_check, DyadicWaveletBasis, WaveletQuadrature,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: usize = 4096;

struct Outcome {
    pass: bool,
    detail: String,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn disk_point(rng: &mut ChaCha8Rng, r_max: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.0..r_max), rng.gen_range(0.0..2.0 * PI))
}

fn mt_orthonormality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let k = rng.gen_range(1..=16);
        let zeros: Vec<Complex64> = (0..k).map(|_| disk_point(&mut rng, 0.9)).collect();
        let basis = MTBasis::disk(&zeros, None).expect("zeros inside the disk");
        worst = worst.max(identity_deviation(&basis.gram_torus(N).expect("gram")));
    }
    Outcome {
        pass: worst <= 1e-8,
        detail: format!("max |Gram - I| = {worst:.2e} over 20 zero sets (limit 1e-8)"),
    }
}

fn fourier_degeneration() -> Outcome {
    let basis = MTBasis::disk(&[Complex64::default(); 16], None).expect("basis");
    let fs = basis.torus_functions(16, N).expect("samples");
    let mut mono: f64 = 0.0;
    for (n, f) in fs.iter().enumerate() {
        for (j, v) in f.samples().iter().enumerate() {
            mono = mono.max((v - TorusSignal::grid_point(j, N).powu(n as u32)).norm());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut lemma: f64 = 0.0;
    for _ in 0..20 {
        let a = disk_point(&mut rng, 0.9);
        let g: Vec<Complex64> = (0..=16)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let lhs = TorusSignal::from_fn(N, |z| (z - a) * poly_eval(&g, z)).expect("signal");
        let kernel =
            TorusSignal::from_fn(N, |z| (1.0 - a.norm_sqr()).sqrt() / (1.0 - a.conj() * z)).expect("signal");
        lemma = lemma.max(lhs.inner(&kernel).expect("inner").norm());
    }
    Outcome {
        pass: mono <= 1e-14 && lemma <= 1e-10,
        detail: format!(
            "max |phi_n - z^n| = {mono:.2e} (limit 1e-14); max |<(z-a)g, k_a>| = {lemma:.2e} (limit 1e-10)"
        ),
    }
}

fn weiss_factorization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let (mut unimod, mut recon): (f64, f64) = (0.0, 0.0);
    let mut winding_ok = true;
    for _ in 0..20 {
        let k = rng.gen_range(1..=8);
        let zeros: Vec<Complex64> = (0..k).map(|_| disk_point(&mut rng, 0.9)).collect();
        let b = FiniteBlaschke::disk(rng.gen_range(0.0..2.0 * PI), 0, &zeros).expect("product");
        let roots: Vec<Complex64> = (0..rng.gen_range(1..=6))
            .map(|_| Complex64::from_polar(rng.gen_range(1.2..3.0), rng.gen_range(0.0..2.0 * PI)))
            .collect();
        let p = polynomial_from_roots(&roots);
        let f = TorusSignal::try_from_fn(N, |z| Ok(b.evaluate(z)? * poly_eval(&p, z))).expect("signal");
        let w = weiss_factor(&f).expect("factorization");
        unimod = unimod.max(w.blaschke.unimodularity_error());
        let bg = w.blaschke.zip_with(&w.outer, |x, y| x * y).expect("grid");
        let defect = bg.zip_with(&f, |x, y| x - y).expect("grid");
        recon = recon.max(defect.sup_norm() / f.sup_norm());
        winding_ok &= w.blaschke.winding_number() == k as i64;
    }
    let jensen = {
        let f = TorusSignal::from_fn(N, |z| 2.0 + z).expect("signal");
        (weiss_factor(&f).expect("factorization").outer.mean() - 2.0).norm()
    };
    Outcome {
        pass: unimod <= 1e-6 && recon <= 1e-8 && winding_ok && jensen <= 1e-8,
        detail: format!(
            "||B|-1| = {unimod:.2e} (1e-6), |F-BG|/|F| = {recon:.2e} (1e-8), windings match: {winding_ok}, |G(0)-2| = {jensen:.2e} (1e-8)"
        ),
    }
}

fn unwinding() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let (mut ledger, mut ortho): (f64, f64) = (0.0, 0.0);
    for _ in 0..5 {
        let coeffs: Vec<Complex64> = (0..=32)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let f = TorusSignal::from_fn(N, |z| poly_eval(&coeffs, z)).expect("signal");
        let e = unwind(&f, 64).expect("unwinding");
        ledger = ledger.max(e.energy_ledger().relative_defect);
        let terms = e.terms();
        for k in 0..terms.len() {
            for l in 0..k {
                ortho = ortho.max(terms[k].inner(&terms[l]).expect("inner").norm());
            }
        }
    }
    let f = TorusSignal::from_fn(N, |z| z + z * z).expect("signal");
    let e = unwind(&f, 4).expect("unwinding");
    let mut padded = e.coefficients.clone();
    padded.resize(4, Complex64::default());
    let simple = padded
        .iter()
        .zip([1.0, 1.0, 0.0, 0.0])
        .map(|(a, t)| (a - t).norm())
        .fold(0.0, f64::max);
    Outcome {
        pass: ledger <= 1e-6 && ortho <= 1e-6 && simple <= 1e-8,
        detail: format!(
            "ledger defect = {ledger:.2e} (1e-6), max |<term_k, term_l>| = {ortho:.2e} (1e-6), z+z^2 coefficient error = {simple:.2e} (1e-8)"
        ),
    }
}

fn classification() -> Outcome {
    let mut cases = 0;
    let mut agree = 0;
    let mut residual: f64 = 0.0;
    let mut reciprocal: f64 = 0.0;
    let mut r1_ok = true;
    for i in 0..20 {
        for j in 0..20 {
            let a = c(-0.95 + 1.9 * i as f64 / 19.0, -0.95 + 1.9 * j as f64 / 19.0);
            if a.norm() >= 1.0 || cardioid_q(a).abs() <= 1e-3 {
                continue;
            }
            cases += 1;
            let report = classify_square_example(a).expect("classification");
            if report.consistent_with_q {
                agree += 1;
            }
            residual = residual.max(report.max_residual);
            let r = multiplier_resultant(a).expect("resultant");
            reciprocal = reciprocal.max(r.reciprocal_residual);
            if report.q > 0.0 {
                r1_ok &= r.r1_sign_variations == 1 && r.has_real_root_above_one;
            }
        }
    }
    let third = cardioid_q(c(1.0 / 3.0, 0.0)).abs();
    Outcome {
        pass: agree == cases && third <= 1e-12 && residual <= 1e-9 && reciprocal <= 1e-6 && r1_ok,
        detail: format!(
            "{agree}/{cases} agree with sign(Q), |Q(1/3)| = {third:.1e}, residual = {residual:.1e} (1e-9), reciprocal = {reciprocal:.1e} (1e-6), R1/R checks: {r1_ok}"
        ),
    }
}

fn sandwich() -> Outcome {
    let mut strict = true;
    let mut closed = true;
    let mut touching = Vec::new();
    for k in [1, 3, 5] {
        for level in sandwich_check(c(0.5, 0.0), k, 4, 1 << 13).expect("ladder") {
            strict &= level.strict;
            closed &= level.holds;
            if !level.strict {
                touching.push(format!("k={k} n={}", level.level - 1));
            }
        }
    }
    let pair = bound_pair(0.5, 1).expect("bounds");
    let g_half = pair.g(0.5).expect("g");
    let g_err = (g_half - 0.593070).abs();
    let gp = (pair.g_derivative_at_one() - 0.75).abs();
    let hp = (pair.h_derivative_at_one() - 0.25).abs();
    let touching = if touching.is_empty() {
        String::from("none")
    } else {
        touching.join(", ")
    };
    Outcome {
        pass: strict && g_err <= 1e-6 && gp <= 1e-9 && hp <= 1e-9,
        detail: format!(
            "strict containment: {strict} (bound attained at {touching}); closed containment: {closed}; g(0.5) = {g_half:.6}, |g'(1)-0.75| = {gp:.1e}, |h'(1)-0.25| = {hp:.1e}"
        ),
    }
}

fn divergence() -> Outcome {
    let f = sandwich_map(c(0.5, 0.0), 1).expect("map");
    let tail = zero_tail_sum(&f, 6, 10, DEFAULT_DEGREE_CAP).expect("tail");
    let inc = &tail.increments;
    let proxy = inc[5] >= 0.5 * inc[2];
    let a = c(0.6, 0.0);
    let boundary = zero_tail_sum(&square_example(a).expect("map"), 8, 200, DEFAULT_DEGREE_CAP).expect("tail");
    let ratio = boundary.orbit_gap_ratio().unwrap_or(f64::NAN);
    Outcome {
        pass: proxy && ratio < 1.0,
        detail: format!(
            "increments level 3 = {:.4}, level 6 = {:.4}; orbit gap ratio for a = 0.6: {ratio:.4}",
            inc[2], inc[5]
        ),
    }
}

fn wavelets() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    let mut gn: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(-3..=3);
        let x = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.0..2.0));
        let exact = g_n_eval(n, x).expect("G_n");
        let oracle = g_n_partial_product(n, x, 10_000).expect("product");
        gn = gn.max((exact - oracle).norm());
    }
    let mut shift: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(-4..=4);
        let x = c(rng.gen_range(-5.0..5.0), rng.gen_range(0.0..3.0));
        shift = shift.max(phi_shift_identity_check(n, x).expect("identity"));
    }
    let basis = DyadicWaveletBasis::new(-1, 1, 3).expect("basis");
    let gram = basis
        .gram(&basis.indices(), &WaveletQuadrature::standard())
        .expect("gram");
    let dev = wavelet_identity_deviation(&gram);
    Outcome {
        pass: gn <= 1e-6 && shift <= 1e-8 && dev <= 1e-5,
        detail: format!(
            "G_n vs product = {gn:.2e} (1e-6), phi shift = {shift:.2e} (1e-8), 21x21 Gram |G - I| = {dev:.2e} (1e-5)"
        ),
    }
}

fn composition_degree() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let random_product = |rng: &mut ChaCha8Rng| {
        let degree = rng.gen_range(1..=6);
        let nu = rng.gen_range(0..=degree.min(2));
        let zeros: Vec<Complex64> = (0..degree - nu).map(|_| disk_point(rng, 0.9)).collect();
        FiniteBlaschke::disk(rng.gen_range(0.0..2.0 * PI), nu as u32, &zeros).expect("product")
    };
    let mut degrees_ok = true;
    let mut eval: f64 = 0.0;
    for _ in 0..50 {
        let b1 = random_product(&mut rng);
        let b2 = random_product(&mut rng);
        let composed = compose(&b2, &b1).expect("composition");
        degrees_ok &= composed.degree() == b1.degree() * b2.degree();
        for _ in 0..8 {
            let z = disk_point(&mut rng, 1.0);
            let direct = b2.evaluate(b1.evaluate(z).expect("eval")).expect("eval");
            eval = eval.max((composed.evaluate(z).expect("eval") - direct).norm());
        }
    }
    Outcome {
        pass: degrees_ok && eval <= 1e-8,
        detail: format!("degrees multiply: {degrees_ok}; max evaluation mismatch = {eval:.2e} (1e-8)"),
    }
}

fn render_determinism() -> Outcome {
    let f = sandwich_map(c(0.5, 0.0), 1).expect("map");
    let f5 = iterate_or_chain(&f, 5, DEFAULT_DEGREE_CAP).expect("iterate");
    let mut spec = RenderSpec {
        x_min: -PI,
        x_max: PI,
        y_min: 0.0,
        y_max: 2.0,
        width: 1024,
        height: 1024,
        mode: RenderMode::Phase,
    };
    let phase = sample_field(&spec, |z| f5.evaluate(z)).expect("render");
    let again = sample_field(&spec, |z| f5.evaluate(z)).expect("render");
    let identical = phase.to_ppm() == again.to_ppm();
    let in_range = phase.values().iter().all(|v| *v > -PI && *v <= PI);
    spec.mode = RenderMode::NegLog;
    let neglog = sample_field(&spec, |z| f5.evaluate(z)).expect("render");
    let identical = identical && neglog.to_ppm() == sample_field(&spec, |z| f5.evaluate(z)).expect("render").to_ppm();
    let zeros = neglog.count_regional_maxima();
    Outcome {
        pass: identical && in_range && zeros == 32,
        detail: format!("byte-identical: {identical}; phases in (-pi, pi]: {in_range}; zero count: {zeros} (32)"),
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 10] = [
        ("MT orthonormality", mt_orthonormality, Some(Duration::from_secs(10))),
        ("Fourier degeneration", fourier_degeneration, None),
        ("Weiss factorization", weiss_factorization, None),
        ("Unwinding", unwinding, None),
        ("Fixed-point classification", classification, Some(Duration::from_secs(30))),
        ("Sandwich bounds", sandwich, None),
        ("Divergence diagnostics", divergence, None),
        ("Wavelets", wavelets, Some(Duration::from_secs(60))),
        ("Composition degree", composition_degree, None),
        ("Render determinism", render_determinism, None),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = outcome.pass && in_time;
        if !pass {
            failures += 1;
        }
        let budget = budget.map_or(String::new(), |b| format!(", budget {}s", b.as_secs()));
        println!(
            "criterion {:>2} {}: {name}: {} [{:.2}s{budget}]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
