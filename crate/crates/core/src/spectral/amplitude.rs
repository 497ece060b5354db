use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_matching::{MismatchComponents, MismatchEvaluator, PhaseMode};

use super::grid::FrequencyGrid;

/// `sin(x)/x` with the series used near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Closed-form amplitude of a homogeneous crystal,
/// `L·e^{iΔkL/2}·sinc(ΔkL/2) = ∫₀^L e^{iΔk z} dz`.
pub fn homogeneous_factor(delta_k: f64, length: f64) -> Complex64 {
    let x = 0.5 * delta_k * length;
    Complex64::from_polar(length * sinc(x), x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Maximum change between successive doublings relative to the peak.
    pub tol: f64,
    pub max_panels: usize,
    /// Use the exact section sum when every control is piecewise constant.
    pub section_sum: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { tol: 1e-6, max_panels: 1 << 20, section_sum: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    /// Largest panel count used at any grid point.
    pub max_panels: usize,
    /// Largest final change relative to the peak.
    pub max_relative_change: f64,
    pub unconverged_points: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Model that produced the amplitude.
    pub source: String,
    pub phase_mode: Option<PhaseMode>,
    /// m
    pub length_used: f64,
}

/// Complex `F(Ω)` on a grid, normalized to unit peak magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralAmplitude {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
    /// Peak magnitude before normalization, m.
    scale: f64,
    provenance: Provenance,
    convergence: Option<ConvergenceReport>,
}

impl SpectralAmplitude {
    /// Normalizes `raw` to unit peak magnitude, keeping the scale.
    pub fn from_raw(grid: FrequencyGrid, raw: Vec<Complex64>, provenance: Provenance) -> Result<Self> {
        if raw.len() != grid.len() {
            return Err(Error::config("amplitude length differs from grid size"));
        }
        if raw.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Degenerate("amplitude has non-finite samples".into()));
        }
        let scale = raw.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        if !(scale > 0.0) {
            return Err(Error::Degenerate("amplitude is identically zero".into()));
        }
        let values = raw.into_iter().map(|v| v / scale).collect();
        Ok(SpectralAmplitude { grid, values, scale, provenance, convergence: None })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn convergence(&self) -> Option<&ConvergenceReport> {
        self.convergence.as_ref()
    }

    /// Same magnitude with the spectral phase removed.
    pub fn zero_phase(&self) -> Self {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v = Complex64::new(v.norm(), 0.0);
        }
        out.provenance.source = format!("{} (phase removed)", self.provenance.source);
        out
    }
}

/// Closed-form amplitude for a z-independent mismatch.
pub fn amplitude_homogeneous(ev: &MismatchEvaluator<'_>, grid: &FrequencyGrid) -> Result<SpectralAmplitude> {
    if !ev.is_z_independent() {
        return Err(Error::config("closed-form amplitude needs a z-independent mismatch"));
    }
    let length = ev.length();
    let raw = grid
        .omegas()
        .into_par_iter()
        .map(|w| {
            let c = ev.components(w)?;
            Ok(homogeneous_factor(ev.delta_k_with(&c, 0.0), length))
        })
        .collect::<Result<Vec<_>>>()?;
    SpectralAmplitude::from_raw(
        *grid,
        raw,
        Provenance { source: format!("closed form, {}", ev.label().describe()), phase_mode: None, length_used: length },
    )
}

/// Running composite-Simpson state for one grid point.
struct Simpson {
    comps: MismatchComponents,
    panels: usize,
    ends: Complex64,
    /// Sum over interior nodes of the previous level.
    interior: Complex64,
    value: Complex64,
    change: f64,
    done: bool,
}

impl Simpson {
    fn refine(&mut self, ev: &MismatchEvaluator<'_>, mode: PhaseMode, length: f64) {
        let (old_panels, old_value) = (self.panels, self.value);
        let n = 2 * old_panels;
        let h = length / n as f64;
        let odd: Complex64 = (0..old_panels)
            .map(|j| Complex64::cis(ev.phase_with(&self.comps, (2 * j + 1) as f64 * h, mode)))
            .sum();
        self.value = (self.ends + 4.0 * odd + 2.0 * self.interior) * (h / 3.0);
        self.interior += odd;
        self.panels = n;
        self.change = (self.value - old_value).norm();
    }
}

/// `F(Ω) ∝ ∫₀^L exp(iφ(Ω, z)) dz`.
///
/// With accumulated phase and piecewise-constant controls the integral is an
/// exact sum over sections. Otherwise composite Simpson with panel doubling:
/// a point stops refining once its change falls below `tol` times the current
/// peak, and the run is unconverged if any point reaches the panel cap first.
pub fn amplitude_inhomogeneous(
    ev: &MismatchEvaluator<'_>,
    grid: &FrequencyGrid,
    mode: PhaseMode,
    quad: &QuadratureSpec,
) -> Result<SpectralAmplitude> {
    if !(quad.tol > 0.0) || quad.max_panels < 4 {
        return Err(Error::config("quadrature tolerance must be positive and the panel cap at least 4"));
    }
    if mode == PhaseMode::Accumulated && quad.section_sum {
        if let Some(z) = ev.step_boundaries() {
            return amplitude_sections(ev, grid, &z, quad.tol);
        }
    }
    amplitude_simpson(ev, grid, mode, quad)
}

/// Sum of `e^{iφ(z_j)}·∫₀^{h_j} e^{iΔk_j s} ds` over constant sections.
fn amplitude_sections(ev: &MismatchEvaluator<'_>, grid: &FrequencyGrid, z: &[f64], tol: f64) -> Result<SpectralAmplitude> {
    let length = ev.length();
    let raw = grid
        .omegas()
        .into_par_iter()
        .map(|w| {
            let c = ev.components(w)?;
            Ok(z.windows(2)
                .map(|p| {
                    let h = p[1] - p[0];
                    let dk = ev.delta_k_with(&c, 0.5 * (p[0] + p[1]));
                    Complex64::cis(ev.phase_with(&c, p[0], PhaseMode::Accumulated)) * homogeneous_factor(dk, h)
                })
                .sum())
        })
        .collect::<Result<Vec<Complex64>>>()?;
    let mut amp = SpectralAmplitude::from_raw(
        *grid,
        raw,
        Provenance {
            source: format!("exact section sum, {}", ev.label().describe()),
            phase_mode: Some(PhaseMode::Accumulated),
            length_used: length,
        },
    )?;
    amp.convergence = Some(ConvergenceReport {
        converged: true,
        max_panels: z.len() - 1,
        max_relative_change: 0.0,
        unconverged_points: 0,
        tol,
    });
    Ok(amp)
}

fn amplitude_simpson(
    ev: &MismatchEvaluator<'_>,
    grid: &FrequencyGrid,
    mode: PhaseMode,
    quad: &QuadratureSpec,
) -> Result<SpectralAmplitude> {
    let length = ev.length();
    let mut states = grid
        .omegas()
        .into_par_iter()
        .map(|w| {
            let comps = ev.components(w)?;
            // start fine enough that one panel never spans more than ~1 rad
            let max_dk = (0..=64)
                .map(|j| ev.delta_k_with(&comps, length * j as f64 / 64.0).abs())
                .fold(0.0f64, f64::max);
            let start = ((max_dk * length).ceil() as usize).max(32).next_power_of_two();
            let start = start.min(quad.max_panels / 2).max(2);
            // seed the level below `start` so the first refinement lands on it
            let half = start / 2;
            let h = length / start as f64;
            let ends = Complex64::cis(ev.phase_with(&comps, 0.0, mode)) + Complex64::cis(ev.phase_with(&comps, length, mode));
            let odd: Complex64 = (0..half).map(|j| Complex64::cis(ev.phase_with(&comps, (2 * j + 1) as f64 * h, mode))).sum();
            let even: Complex64 = (1..half).map(|j| Complex64::cis(ev.phase_with(&comps, (2 * j) as f64 * h, mode))).sum();
            let value = (ends + 4.0 * odd + 2.0 * even) * (h / 3.0);
            let mut s = Simpson { comps, panels: start, ends, interior: odd + even, value, change: f64::INFINITY, done: false };
            s.refine(ev, mode, length);
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut converged = true;
    loop {
        let peak = states.iter().map(|s| s.value.norm()).fold(0.0f64, f64::max);
        let limit = quad.tol * peak;
        let mut active = 0;
        for s in states.iter_mut() {
            if !s.done && s.change <= limit {
                s.done = true;
            }
            if !s.done && s.panels >= quad.max_panels {
                s.done = true;
                converged = false;
            }
            if !s.done {
                active += 1;
            }
        }
        if active == 0 {
            break;
        }
        states.par_iter_mut().filter(|s| !s.done).for_each(|s| s.refine(ev, mode, length));
    }

    let peak = states.iter().map(|s| s.value.norm()).fold(0.0f64, f64::max);
    let report = ConvergenceReport {
        converged,
        max_panels: states.iter().map(|s| s.panels).max().unwrap_or(0),
        max_relative_change: states.iter().map(|s| s.change).fold(0.0f64, f64::max) / peak,
        unconverged_points: states.iter().filter(|s| s.change > quad.tol * peak).count(),
        tol: quad.tol,
    };
    let raw = states.into_iter().map(|s| s.value).collect();
    let mut amp = SpectralAmplitude::from_raw(
        *grid,
        raw,
        Provenance { source: format!("quadrature, {}", ev.label().describe()), phase_mode: Some(mode), length_used: length },
    )?;
    amp.convergence = Some(report);
    Ok(amp)
}
