//! Phase and modulus fields of maps on the disk, sampled at `z = exp(-y + ix)`, and
//! their encoding as binary PPM images.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::blaschke::wrap_phase;
use crate::error::{HardyError, Result};

/// Largest fraction of pixels allowed to fail evaluation.
pub const MAX_FAILED_FRACTION: f64 = 1e-3;
/// `-ln|F|` is clipped to `[0, NEGLOG_CLIP]` before the grayscale map.
pub const NEGLOG_CLIP: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    /// `arg F` in `(-π, π]` on a cyclic hue wheel.
    Phase,
    /// `-ln|F|` clipped to `[0, 10]` in grayscale.
    NegLog,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub width: usize,
    pub height: usize,
    pub mode: RenderMode,
}

impl RenderSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width < 16 || self.height < 16 {
            return Err(HardyError::invalid(format!(
                "image must be at least 16x16, got {}x{}",
                self.width, self.height
            )));
        }
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.x_min < self.x_max) || !(self.y_min < self.y_max) {
            return Err(HardyError::invalid("x and y ranges must be finite and nonempty"));
        }
        Ok(())
    }

    /// Pixel-center coordinates `(x, y)`; row 0 is the top, at the largest `y`.
    pub fn pixel_coordinates(&self, row: usize, col: usize) -> (f64, f64) {
        let dx = (self.x_max - self.x_min) / self.width as f64;
        let dy = (self.y_max - self.y_min) / self.height as f64;
        (
            self.x_min + (col as f64 + 0.5) * dx,
            self.y_max - (row as f64 + 0.5) * dy,
        )
    }

    /// `exp(-y + ix)` at the pixel center.
    pub fn pixel_point(&self, row: usize, col: usize) -> Complex64 {
        let (x, y) = self.pixel_coordinates(row, col);
        Complex64::from_polar((-y).exp(), x)
    }

    /// Whether the x-range spans exactly one period of the angle.
    pub fn wraps_x(&self) -> bool {
        (self.x_max - self.x_min - 2.0 * PI).abs() <= 1e-12
    }
}

/// Sampled field values in row-major order; failed pixels hold `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    spec: RenderSpec,
    values: Vec<f64>,
    failed: usize,
}

/// Samples `f` on the pixel grid. Phases are wrapped to `(-π, π]`; the modulus field
/// holds the unclipped `-ln|F|`, which is `+∞` at exact zeros.
pub fn sample_field(spec: &RenderSpec, f: impl Fn(Complex64) -> Result<Complex64>) -> Result<Field> {
    spec.validate()?;
    let mut values = Vec::with_capacity(spec.width * spec.height);
    let mut failed = 0;
    for row in 0..spec.height {
        for col in 0..spec.width {
            let v = match f(spec.pixel_point(row, col)) {
                Ok(w) if w.is_finite() => match spec.mode {
                    RenderMode::Phase => wrap_phase(w.arg()),
                    RenderMode::NegLog => -w.norm().ln(),
                },
                _ => f64::NAN,
            };
            if v.is_nan() {
                failed += 1;
            }
            values.push(v);
        }
    }
    let total = spec.width * spec.height;
    if failed as f64 > MAX_FAILED_FRACTION * total as f64 {
        return Err(HardyError::numerical(format!(
            "evaluation failed at {failed} of {total} pixels"
        )));
    }
    Ok(Field {
        spec: *spec,
        values,
        failed,
    })
}

/// Cyclic hue wheel: entry `k` is the fully saturated color at hue `k/256` of a turn.
pub const HUE_TABLE: [[u8; 3]; 256] = hue_table();

const fn hue_table() -> [[u8; 3]; 256] {
    let mut table = [[0u8; 3]; 256];
    let mut k = 0;
    while k < 256 {
        let pos = k * 6;
        let f = (pos % 256) as u8;
        let g = 255 - f;
        table[k] = match pos / 256 {
            0 => [255, f, 0],
            1 => [g, 255, 0],
            2 => [0, 255, f],
            3 => [0, g, 255],
            4 => [f, 0, 255],
            _ => [255, 0, g],
        };
        k += 1;
    }
    table
}

fn phase_color(theta: f64) -> [u8; 3] {
    let idx = ((theta + PI) / (2.0 * PI) * 256.0).floor() as i64;
    HUE_TABLE[idx.clamp(0, 255) as usize]
}

fn neglog_gray(v: f64) -> [u8; 3] {
    let g = (v.clamp(0.0, NEGLOG_CLIP) / NEGLOG_CLIP * 255.0).round() as u8;
    [g, g, g]
}

impl Field {
    pub fn spec(&self) -> &RenderSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.spec.width + col]
    }

    pub fn failed_pixels(&self) -> usize {
        self.failed
    }

    /// Binary PPM (P6) encoding; failed pixels are black.
    pub fn to_ppm(&self) -> Vec<u8> {
        let header = format!("P6\n{} {}\n255\n", self.spec.width, self.spec.height);
        let mut out = Vec::with_capacity(header.len() + 3 * self.values.len());
        out.extend_from_slice(header.as_bytes());
        for &v in &self.values {
            let rgb = if v.is_nan() {
                [0, 0, 0]
            } else {
                match self.spec.mode {
                    RenderMode::Phase => phase_color(v),
                    RenderMode::NegLog => neglog_gray(v),
                }
            };
            out.extend_from_slice(&rgb);
        }
        out
    }

    fn neighbors(&self, row: usize, col: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (w, h) = (self.spec.width as i64, self.spec.height as i64);
        let wrap = self.spec.wraps_x();
        (-1i64..=1)
            .flat_map(|dr| (-1i64..=1).map(move |dc| (dr, dc)))
            .filter(|&(dr, dc)| dr != 0 || dc != 0)
            .filter_map(move |(dr, dc)| {
                let r = row as i64 + dr;
                let mut c = col as i64 + dc;
                if r < 0 || r >= h {
                    return None;
                }
                if c < 0 || c >= w {
                    if !wrap {
                        return None;
                    }
                    c = c.rem_euclid(w);
                }
                Some((r as usize, c as usize))
            })
    }

    /// Number of regional maxima: 8-connected plateaus of equal value with no higher
    /// neighbor. The x direction wraps when the range spans one period. Failed pixels
    /// are ignored.
    pub fn count_regional_maxima(&self) -> usize {
        let (w, h) = (self.spec.width, self.spec.height);
        let mut seen = vec![false; w * h];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..w * h {
            if seen[start] || self.values[start].is_nan() {
                continue;
            }
            let level = self.values[start];
            let mut is_max = true;
            seen[start] = true;
            queue.push_back(start);
            while let Some(p) = queue.pop_front() {
                for (r, c) in self.neighbors(p / w, p % w) {
                    let q = r * w + c;
                    let v = self.values[q];
                    if v.is_nan() {
                        continue;
                    }
                    if v > level {
                        is_max = false;
                    } else if v == level && !seen[q] {
                        seen[q] = true;
                        queue.push_back(q);
                    }
                }
            }
            if is_max {
                count += 1;
            }
        }
        count
    }
}

pub fn write_ppm(path: &std::path::Path, field: &Field) -> std::io::Result<()> {
    std::fs::write(path, field.to_ppm())
}
