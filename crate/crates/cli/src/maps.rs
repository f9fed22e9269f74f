//! Maps that the render and iterate commands operate on.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use hardy_core::blaschke::{iterate_or_chain, FiniteBlaschke, Iterate, DEFAULT_DEGREE_CAP};
use hardy_core::dynamics::{sandwich_map, square_example};
use hardy_core::error::HardyError;
use hardy_core::wavelet::g_eval;
use num_complex::Complex64;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapPreset {
    /// z(z - 1/2)/(1 - z/2)
    SandwichK1,
    /// z(z² - 1/4)/(1 - z²/4)
    SandwichK2,
    /// G(i(1 - z)/(1 + z)) with G(w) = sin π(i - w)/sin π(i + w)
    Sine,
    /// ((z + a)/(1 + conj(a) z))², parameter from --a-re/--a-im
    Square,
}

#[derive(Debug, Clone, Args)]
pub struct MapArgs {
    /// Built-in map.
    #[arg(long, value_enum, conflicts_with = "blaschke_file")]
    pub map: Option<MapPreset>,
    /// Finite Blaschke product as JSON: {"domain": "disk", "theta", "nu", "zeros": [{re, im, mult}]}.
    #[arg(long)]
    pub blaschke_file: Option<PathBuf>,
    /// Real part of the parameter of the square map.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a_re: f64,
    /// Imaginary part of the parameter of the square map.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a_im: f64,
}

pub enum Map {
    Finite(FiniteBlaschke),
    Sine,
}

/// `F(z) = G(w)` with `w = i(1 - z)/(1 + z)`; the imaginary part of `w` is formed as
/// `(1 - |z|²)/|1 + z|²` so that it keeps its sign on the closed disk.
pub fn sine_map(z: Complex64) -> Result<Complex64, HardyError> {
    let d = (1.0 + z).norm_sqr();
    if d == 0.0 {
        return Err(HardyError::Domain("sine map is singular at z = -1".into()));
    }
    let w = Complex64::new(2.0 * z.im / d, (1.0 - z.norm_sqr()) / d);
    g_eval(w)
}

impl MapArgs {
    pub fn resolve(&self) -> Result<Map, CliError> {
        if let Some(path) = &self.blaschke_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            let b: FiniteBlaschke = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            return Ok(Map::Finite(b));
        }
        let half = Complex64::new(0.5, 0.0);
        Ok(match self.map {
            Some(MapPreset::SandwichK1) => Map::Finite(sandwich_map(half, 1)?),
            Some(MapPreset::SandwichK2) => Map::Finite(sandwich_map(half, 2)?),
            Some(MapPreset::Sine) => Map::Sine,
            Some(MapPreset::Square) => {
                let a = Complex64::new(self.a_re, self.a_im);
                if !(a.norm() < 1.0) {
                    return Err(CliError::Validation(format!("parameter {a} must lie in the open disk")));
                }
                Map::Finite(square_example(a)?)
            }
            None => {
                return Err(CliError::Validation(
                    "one of --map or --blaschke-file is required".into(),
                ))
            }
        })
    }
}

/// The `n`-th iterate as an evaluator.
pub enum Iterated {
    Blaschke(Iterate),
    Sine(usize),
}

impl Iterated {
    pub fn new(map: Map, n: usize) -> Result<Self, CliError> {
        if n == 0 {
            return Err(CliError::Validation("iterate count must be at least 1".into()));
        }
        Ok(match map {
            Map::Finite(b) => {
                if b.domain() != hardy_core::blaschke::Domain::Disk {
                    return Err(CliError::Validation("only disk products can be iterated".into()));
                }
                Iterated::Blaschke(iterate_or_chain(&b, n, DEFAULT_DEGREE_CAP)?)
            }
            Map::Sine => Iterated::Sine(n),
        })
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64, HardyError> {
        match self {
            Iterated::Blaschke(it) => it.evaluate(z),
            Iterated::Sine(n) => (0..*n).try_fold(z, |acc, _| sine_map(acc)),
        }
    }
}
