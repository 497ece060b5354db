use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{omega_width_to_nm, rad_per_s_to_thz};

use super::amplitude::SpectralAmplitude;
use super::grid::FrequencyGrid;

/// `S = |F|²` elementwise.
pub fn spectral_intensity(f: &SpectralAmplitude) -> Vec<f64> {
    f.values().iter().map(|v| v.norm_sqr()).collect()
}

/// Positions of the outermost crossings of `level` on a uniform grid,
/// linearly interpolated between samples. A level already exceeded at an
/// end sample crosses at that end.
pub fn outermost_crossings(values: &[f64], x0: f64, dx: f64, level: f64) -> Option<(f64, f64)> {
    let first = values.iter().position(|&v| v >= level)?;
    let last = values.iter().rposition(|&v| v >= level)?;
    let cross = |i: usize, j: usize| {
        let (a, b) = (values[i], values[j]);
        let t = if b == a { 0.5 } else { (level - a) / (b - a) };
        x0 + (i as f64 + t * (j as f64 - i as f64)) * dx
    };
    let left = if first == 0 { x0 } else { cross(first - 1, first) };
    let right = if last + 1 == values.len() { x0 + last as f64 * dx } else { cross(last, last + 1) };
    Some((left, right))
}

/// Number of local maxima (plateaus counted once) whose topographic
/// prominence is at least `min_prominence`. Of two peaks with exactly equal
/// height only the right one keeps the full prominence.
pub fn peak_count(values: &[f64], min_prominence: f64) -> usize {
    let n = values.len();
    let mut count = 0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[j + 1] == values[i] {
            j += 1;
        }
        let v = values[i];
        let is_max = (i == 0 || values[i - 1] < v) && (j + 1 == n || values[j + 1] < v);
        if is_max {
            let left = values[..i].iter().rev().take_while(|&&x| x <= v).fold(v, |m, &x| m.min(x));
            let right = values[j + 1..].iter().take_while(|&&x| x < v).fold(v, |m, &x| m.min(x));
            // a constant signal is one peak
            if v - left.max(right) >= min_prominence || (i == 0 && j + 1 == n) {
                count += 1;
            }
        }
        i = j + 1;
    }
    count
}

/// A width in the three units the outputs use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Width {
    pub rad_per_s: f64,
    pub thz: f64,
    /// At the signal center wavelength; `NaN` when no center is given.
    pub nm: f64,
}

impl Width {
    pub fn new(rad_per_s: f64, center_um: Option<f64>) -> Self {
        Width {
            rad_per_s,
            thz: rad_per_s_to_thz(rad_per_s),
            nm: center_um.map_or(f64::NAN, |c| omega_width_to_nm(rad_per_s, c)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthReport {
    pub fwhm: Width,
    pub range_width: Width,
    pub threshold: f64,
    /// Standard deviation of `S` read as a distribution.
    pub rms: Width,
    pub peak_count: usize,
    /// A crossing fell on the grid edge, so the spectrum is truncated.
    pub truncated: bool,
}

pub const DEFAULT_THRESHOLD: f64 = 0.05;
pub const PEAK_PROMINENCE: f64 = 0.1;

pub fn width_metrics(s: &[f64], grid: &FrequencyGrid, threshold: f64, center_um: Option<f64>) -> Result<WidthReport> {
    width_metrics_uniform(s, grid.omega(0), grid.spacing(), threshold, center_um)
}

pub fn width_metrics_uniform(s: &[f64], x0: f64, dx: f64, threshold: f64, center_um: Option<f64>) -> Result<WidthReport> {
    let peak = s.iter().copied().fold(0.0f64, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Degenerate("spectrum is identically zero".into()));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::config("threshold must lie in (0, 1)"));
    }
    let norm: Vec<f64> = s.iter().map(|v| v / peak).collect();
    let (fl, fr) = outermost_crossings(&norm, x0, dx, 0.5).expect("peak exceeds half level");
    let (rl, rr) = outermost_crossings(&norm, x0, dx, threshold).expect("peak exceeds threshold");
    let truncated = norm[0] >= threshold || norm[s.len() - 1] >= threshold;

    let total: f64 = norm.iter().sum();
    let mean = norm.iter().enumerate().map(|(j, v)| v * (x0 + j as f64 * dx)).sum::<f64>() / total;
    let var = norm
        .iter()
        .enumerate()
        .map(|(j, v)| v * (x0 + j as f64 * dx - mean).powi(2))
        .sum::<f64>()
        / total;

    Ok(WidthReport {
        fwhm: Width::new(fr - fl, center_um),
        range_width: Width::new(rr - rl, center_um),
        threshold,
        rms: Width::new(var.sqrt(), center_um),
        peak_count: peak_count(&norm, PEAK_PROMINENCE),
        truncated,
    })
}

/// Trapezoid area of `|F|²` with the pre-normalization scale restored.
pub fn absolute_area(f: &SpectralAmplitude) -> f64 {
    let scale2 = f.scale() * f.scale();
    let s = spectral_intensity(f);
    trapezoid(&s, f.grid().spacing()) * scale2
}

/// Integral intensity relative to a reference spectrum.
pub fn integral_intensity(f: &SpectralAmplitude, reference: &SpectralAmplitude) -> Result<f64> {
    let r = absolute_area(reference);
    if !(r > 0.0) {
        return Err(Error::Degenerate("reference spectrum has zero area".into()));
    }
    Ok(absolute_area(f) / r)
}

pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dx * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}
