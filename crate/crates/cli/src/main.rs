mod error;
mod io;
mod maps;

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hardy_core::blaschke::{zero_ladder, DEFAULT_DEGREE_CAP};
use hardy_core::dynamics::{
    bound_pair, cardioid_curve, classify_square_example, multiplier_resultant, zero_tail_sum,
    FixedPointReport, ResultantReport, TailReport,
};
use hardy_core::mt::{dyadic_ring_zeros, ComplexRepr, MTBasis, MTCoefficients};
use hardy_core::numerics::TorusSignal;
use hardy_core::render::{sample_field, RenderMode, RenderSpec};
use hardy_core::unwinding::{blaschke_zeros_from_samples, unwind_with_tol, weiss_factor, DEFAULT_STOP_TOL};
use hardy_core::wavelet::DyadicWaveletBasis;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::CliError;
use crate::maps::{Iterated, Map, MapArgs};

#[derive(Debug, Parser)]
#[command(name = "hardy", version, about = "Hardy-space decompositions, Blaschke dynamics and renders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Phase,
    Neglog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// Rings (1 - 2^-n) e^{2πij/2^n}, n = 1..=n_max.
    Dyadic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CurveKind {
    /// The curve Q(a) = 0, as (t, u) = (Re a, Im a).
    Cardioid,
    /// The zero-modulus bounds g and h.
    Bounds,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render the phase or -ln|F| of an iterate at z = exp(-y + ix) as a binary PPM.
    Render {
        #[command(flatten)]
        target: MapArgs,
        #[arg(long, default_value_t = 1)]
        iterate: usize,
        #[arg(long, value_enum, default_value_t = Mode::Phase)]
        mode: Mode,
        #[arg(long, default_value_t = -PI, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, default_value_t = PI, allow_hyphen_values = true)]
        x_max: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        y_min: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        y_max: f64,
        #[arg(long, default_value_t = 512)]
        width: usize,
        #[arg(long, default_value_t = 512)]
        height: usize,
        /// Output PPM path.
        #[arg(long)]
        out: PathBuf,
        /// Print the number of regional maxima of -ln|F| (zeros in the window).
        #[arg(long)]
        count_zeros: bool,
    },
    /// Unwinding series of a signal: JSON with coefficients, residual and energy ledger.
    Unwind {
        /// CSV with header index,re,im (or index,re for real signals).
        #[arg(long)]
        input: PathBuf,
        /// Number of stages K; the coefficient list is padded to K.
        #[arg(long, default_value_t = 8)]
        stages: usize,
        /// Grid size N (else UNWIND_GRID_N, else 4096).
        #[arg(long)]
        grid_n: Option<usize>,
        /// Stop once the residual energy falls below this fraction of the input energy.
        #[arg(long, default_value_t = DEFAULT_STOP_TOL)]
        tol: f64,
        /// Include per-stage zero estimates.
        #[arg(long)]
        zeros: bool,
    },
    /// Blaschke-outer factorization F = B G of a signal.
    Factor {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        grid_n: Option<usize>,
        /// Include the zeros of B.
        #[arg(long)]
        zeros: bool,
        /// Write the samples of B and G as CSV files with this prefix.
        #[arg(long)]
        samples_prefix: Option<PathBuf>,
    },
    /// Malmquist-Takenaka coefficients of a signal.
    Mt {
        /// CSV with header re,im listing the zeros in basis order.
        #[arg(long, conflicts_with = "preset")]
        zeros_file: Option<PathBuf>,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long, default_value_t = 1)]
        n_max: u32,
        #[arg(long)]
        input: PathBuf,
        /// Number of coefficients (default: all basis functions).
        #[arg(long)]
        stages: Option<usize>,
        #[arg(long)]
        grid_n: Option<usize>,
    },
    /// Fixed points, multipliers and cardioid classification of ((z+a)/(1+conj(a)z))².
    FixedPoints {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a_re: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a_im: f64,
    },
    /// Two-column CSV curves: the cardioid, or the bounds g and h.
    Curves {
        #[arg(long, value_enum)]
        kind: CurveKind,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        /// |a| for the bounds.
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        /// k for the bounds.
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Table of the wavelet φ_{n,j} as CSV x,re,im.
    Wavelet {
        #[arg(long, allow_hyphen_values = true)]
        n: i32,
        #[arg(long, allow_hyphen_values = true)]
        j: i64,
        #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
        x_max: f64,
        #[arg(long, default_value_t = 1025)]
        samples: usize,
    },
    /// Explicit iterate of a finite Blaschke product, its zero ladder and tail sums.
    Iterate {
        #[command(flatten)]
        target: MapArgs,
        #[arg(long)]
        n: usize,
        /// Include the tail sums of 1 - |z| over the zeros of the iterates.
        #[arg(long)]
        tail: bool,
    },
}

fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    emit(&serde_json::to_string_pretty(value)?)
}

fn reprs(zs: &[Complex64]) -> Vec<ComplexRepr> {
    zs.iter().map(|&z| z.into()).collect()
}

#[derive(Serialize)]
struct FactorJson {
    grid: usize,
    winding: i64,
    outer_at_origin: ComplexRepr,
    unimodularity_error: f64,
    reconstruction_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    zeros: Option<Vec<ComplexRepr>>,
}

#[derive(Serialize)]
struct FixedPointsJson {
    report: FixedPointReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    resultant: Option<ResultantReport>,
}

#[derive(Serialize)]
struct IterateJson {
    n: usize,
    degree: usize,
    iterate: hardy_core::blaschke::FiniteBlaschke,
    #[serde(skip_serializing_if = "Option::is_none")]
    ladder_counts: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail: Option<TailReport>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Render {
            target,
            iterate,
            mode,
            x_min,
            x_max,
            y_min,
            y_max,
            width,
            height,
            out,
            count_zeros,
        } => {
            let spec = RenderSpec {
                x_min,
                x_max,
                y_min,
                y_max,
                width,
                height,
                mode: match mode {
                    Mode::Phase => RenderMode::Phase,
                    Mode::Neglog => RenderMode::NegLog,
                },
            };
            spec.validate()?;
            if count_zeros && mode != Mode::Neglog {
                return Err(CliError::Validation("--count-zeros needs --mode neglog".into()));
            }
            let f = Iterated::new(target.resolve()?, iterate)?;
            let field = sample_field(&spec, |z| f.evaluate(z))?;
            std::fs::write(&out, field.to_ppm())
                .map_err(|e| CliError::Validation(format!("{}: {e}", out.display())))?;
            if count_zeros {
                emit(&field.count_regional_maxima().to_string())?;
            }
            Ok(())
        }
        Command::Unwind {
            input,
            stages,
            grid_n,
            tol,
            zeros,
        } => {
            if stages == 0 {
                return Err(CliError::Validation("--stages must be at least 1".into()));
            }
            let f = io::load_signal(&input, grid_n)?;
            let expansion = unwind_with_tol(&f, stages, tol)?;
            let mut json = expansion.to_json(zeros)?;
            json.coefficients.resize(stages, ComplexRepr { re: 0.0, im: 0.0 });
            emit_json(&json)
        }
        Command::Factor {
            input,
            grid_n,
            zeros,
            samples_prefix,
        } => {
            let f = io::load_signal(&input, grid_n)?;
            let w = weiss_factor(&f)?;
            let product = w.blaschke.zip_with(&w.outer, |b, g| b * g)?;
            let defect = product.zip_with(&f, |p, s| p - s)?;
            let json = FactorJson {
                grid: f.len(),
                winding: w.blaschke.winding_number(),
                outer_at_origin: w.outer.mean().into(),
                unimodularity_error: w.blaschke.unimodularity_error(),
                reconstruction_error: defect.sup_norm() / f.sup_norm(),
                zeros: if zeros {
                    Some(reprs(&blaschke_zeros_from_samples(&w.blaschke)?))
                } else {
                    None
                },
            };
            if let Some(prefix) = samples_prefix {
                for (suffix, s) in [("blaschke", &w.blaschke), ("outer", &w.outer)] {
                    let path = PathBuf::from(format!("{}_{suffix}.csv", prefix.display()));
                    std::fs::write(&path, io::write_signal_csv(s))
                        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
                }
            }
            emit_json(&json)
        }
        Command::Mt {
            zeros_file,
            preset,
            n_max,
            input,
            stages,
            grid_n,
        } => {
            let zeros = match (zeros_file, preset) {
                (Some(path), None) => io::read_zeros(&path)?,
                (None, Some(Preset::Dyadic)) => dyadic_ring_zeros(n_max)?,
                _ => {
                    return Err(CliError::Validation(
                        "exactly one of --zeros-file or --preset is required".into(),
                    ))
                }
            };
            let basis = MTBasis::disk(&zeros, None)?;
            let k = stages.unwrap_or(basis.count());
            let f: TorusSignal = io::load_signal(&input, grid_n)?;
            let coefficients = basis.analyze_torus(&f, k)?;
            emit_json(&MTCoefficients {
                basis,
                coefficients: reprs(&coefficients),
            })
        }
        Command::FixedPoints { a_re, a_im } => {
            let a = Complex64::new(a_re, a_im);
            let report = classify_square_example(a)?;
            let resultant = if a.norm() > 0.0 {
                Some(multiplier_resultant(a)?)
            } else {
                None
            };
            emit_json(&FixedPointsJson { report, resultant })
        }
        Command::Curves {
            kind,
            samples,
            rho,
            k,
        } => {
            let mut text = String::new();
            match kind {
                CurveKind::Cardioid => {
                    text.push_str("t,u\n");
                    for (t, u) in cardioid_curve(samples)? {
                        text.push_str(&format!("{t},{u}\n"));
                    }
                }
                CurveKind::Bounds => {
                    if samples < 2 {
                        return Err(CliError::Validation("--samples must be at least 2".into()));
                    }
                    let pair = bound_pair(rho, k)?;
                    text.push_str("t,g,h\n");
                    for i in 0..samples {
                        let t = i as f64 / (samples - 1) as f64;
                        text.push_str(&format!("{t},{},{}\n", pair.g(t)?, pair.h(t)?));
                    }
                }
            }
            emit(&text)
        }
        Command::Wavelet {
            n,
            j,
            x_min,
            x_max,
            samples,
        } => {
            let basis = DyadicWaveletBasis::new(n, n, j.abs())?;
            let mut text = String::from("x,re,im\n");
            for (x, v) in basis.table(n, j, x_min, x_max, samples)? {
                text.push_str(&format!("{x},{},{}\n", v.re, v.im));
            }
            emit(&text)
        }
        Command::Iterate { target, n, tail } => {
            let b = match target.resolve()? {
                Map::Finite(b) => b,
                Map::Sine => {
                    return Err(CliError::Validation(
                        "the sine map is not a finite Blaschke product".into(),
                    ))
                }
            };
            if n == 0 {
                return Err(CliError::Validation("--n must be at least 1".into()));
            }
            let explicit = hardy_core::blaschke::iterate(&b, n, DEFAULT_DEGREE_CAP)?;
            let ladder_counts = if b.nu() >= 1 && b.degree() >= 2 {
                Some(zero_ladder(&b, n, DEFAULT_DEGREE_CAP)?.cumulative_counts().to_vec())
            } else {
                None
            };
            let tail = if tail {
                Some(zero_tail_sum(&b, n, 200, DEFAULT_DEGREE_CAP)?)
            } else {
                None
            };
            emit_json(&IterateJson {
                n,
                degree: explicit.degree(),
                iterate: explicit,
                ladder_counts,
                tail,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hardy: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
