//! First- and second-order correlation functions, HOM dips and the
//! application metrics derived from them.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::UniformCubicSpline;
use crate::spectral::{outermost_crossings, spectral_intensity, FrequencyGrid, SpectralAmplitude};
use crate::units::SPEED_OF_LIGHT;

/// Symmetric uniform delay grid `τ_j = −τ_max + j·dτ` with an odd count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauGrid {
    half_span: f64,
    n_points: usize,
}

impl TauGrid {
    pub fn new(half_span: f64, n_points: usize) -> Result<Self> {
        if !(half_span.is_finite() && half_span > 0.0) || n_points < 3 || n_points.is_multiple_of(2) {
            return Err(Error::config("delay grid needs a positive span and an odd count >= 3"));
        }
        Ok(TauGrid { half_span, n_points })
    }

    pub fn half_span(&self) -> f64 {
        self.half_span
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_span / (self.n_points - 1) as f64
    }

    pub fn center_index(&self) -> usize {
        self.n_points / 2
    }

    pub fn tau(&self, j: usize) -> f64 {
        (j as isize - self.center_index() as isize) as f64 * self.spacing()
    }

    pub fn taus(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.tau(j)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceKind {
    G1,
    G2,
    Hom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceNormalization {
    ValueAtZeroOne,
    GlobalMaxOne,
    AsymptoteOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTrace {
    pub kind: TraceKind,
    pub tau: TauGrid,
    pub values: Vec<f64>,
    pub normalization: TraceNormalization,
}

/// Trapezoid weights on a uniform grid.
fn weights(n: usize, d: f64) -> Vec<f64> {
    let mut w = vec![d; n];
    w[0] *= 0.5;
    w[n - 1] *= 0.5;
    w
}

/// `g⁽¹⁾(τ) ∝ ∫ S(Ω) cos(Ωτ) dΩ`, normalized to one at zero delay.
pub fn g1(s: &[f64], grid: &FrequencyGrid, tau: &TauGrid) -> Result<CorrelationTrace> {
    if s.len() != grid.len() {
        return Err(Error::config("intensity length differs from grid size"));
    }
    if s.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::config("spectral intensity must be non-negative"));
    }
    let w = weights(grid.len(), grid.spacing());
    let omegas = grid.omegas();
    let norm: f64 = s.iter().zip(&w).map(|(a, b)| a * b).sum();
    if !(norm > 0.0) {
        return Err(Error::Degenerate("spectral intensity is identically zero".into()));
    }
    let c = tau.center_index();
    // evaluate τ ≥ 0 and mirror so the trace is exactly even
    let half: Vec<f64> = (c..tau.len())
        .into_par_iter()
        .map(|j| {
            let t = tau.tau(j);
            s.iter().zip(&w).zip(&omegas).map(|((a, b), o)| a * b * (o * t).cos()).sum::<f64>() / norm
        })
        .collect();
    let values = (0..tau.len()).map(|j| half[j.abs_diff(c)]).collect();
    Ok(CorrelationTrace { kind: TraceKind::G1, tau: *tau, values, normalization: TraceNormalization::ValueAtZeroOne })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeAmplitude {
    pub tau: TauGrid,
    pub values: Vec<Complex64>,
    /// `∫|F̃|²dτ / (2π ∫|F|²dΩ)`.
    pub parseval_ratio: f64,
    /// The delay grid misses part of the support.
    pub coverage_warning: bool,
}

pub const PARSEVAL_TOLERANCE: f64 = 1e-3;

/// `F̃(τ) = ∫ F(Ω) e^{iΩτ} dΩ` by the trapezoid rule.
pub fn time_amplitude(f: &SpectralAmplitude, tau: &TauGrid) -> TimeAmplitude {
    let grid = f.grid();
    let w = weights(grid.len(), grid.spacing());
    let omegas = grid.omegas();
    let vals = f.values();
    let values: Vec<Complex64> = tau
        .taus()
        .into_par_iter()
        .map(|t| vals.iter().zip(&w).zip(&omegas).map(|((v, b), o)| v * Complex64::cis(o * t) * *b).sum())
        .collect();
    let wt = weights(tau.len(), tau.spacing());
    let time_energy: f64 = values.iter().zip(&wt).map(|(v, b)| v.norm_sqr() * b).sum();
    let freq_energy: f64 = vals.iter().zip(&w).map(|(v, b)| v.norm_sqr() * b).sum();
    let parseval_ratio = time_energy / (2.0 * std::f64::consts::PI * freq_energy);
    TimeAmplitude {
        tau: *tau,
        values,
        parseval_ratio,
        coverage_warning: (parseval_ratio - 1.0).abs() > PARSEVAL_TOLERANCE,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum G2Form {
    /// `|F̃(τ)|²`.
    #[default]
    ComplexExponential,
    /// `|∫F(Ω) cos(Ωτ) dΩ|²`.
    Cosine,
}

/// Second-order correlation, normalized to unit global maximum.
pub fn g2(f: &SpectralAmplitude, tau: &TauGrid, form: G2Form) -> Result<CorrelationTrace> {
    let raw: Vec<f64> = match form {
        G2Form::ComplexExponential => time_amplitude(f, tau).values.iter().map(|v| v.norm_sqr()).collect(),
        G2Form::Cosine => {
            let grid = f.grid();
            let w = weights(grid.len(), grid.spacing());
            let omegas = grid.omegas();
            tau.taus()
                .into_par_iter()
                .map(|t| {
                    f.values()
                        .iter()
                        .zip(&w)
                        .zip(&omegas)
                        .map(|((v, b), o)| v * ((o * t).cos() * b))
                        .sum::<Complex64>()
                        .norm_sqr()
                })
                .collect()
        }
    };
    let peak = raw.iter().copied().fold(0.0f64, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Degenerate("second-order correlation vanishes".into()));
    }
    Ok(CorrelationTrace {
        kind: TraceKind::G2,
        tau: *tau,
        values: raw.into_iter().map(|v| v / peak).collect(),
        normalization: TraceNormalization::GlobalMaxOne,
    })
}

/// Coincidence rate `R_c(τ) = 1 − g⁽¹⁾(2τ)`, with `g⁽¹⁾` interpolated by a
/// natural cubic spline.
pub fn hom_dip(g1_trace: &CorrelationTrace, tau: &TauGrid) -> Result<CorrelationTrace> {
    if g1_trace.kind != TraceKind::G1 {
        return Err(Error::config("HOM dip needs a first-order trace"));
    }
    let g = &g1_trace.tau;
    let spline = UniformCubicSpline::new(g.tau(0), g.spacing(), g1_trace.values.clone());
    let values = tau
        .taus()
        .iter()
        .map(|&t| {
            let x = 2.0 * t;
            // land exactly on nodes when the grids align
            let idx = (x - g.tau(0)) / g.spacing();
            let near = idx.round();
            let v = if (idx - near).abs() < 1e-9 && near >= 0.0 && (near as usize) < g.len() {
                Some(g1_trace.values[near as usize])
            } else {
                spline.eval(x)
            };
            v.map(|v| 1.0 - v).ok_or_else(|| {
                Error::config(format!("delay {x:e} s lies outside the first-order trace"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationTrace { kind: TraceKind::Hom, tau: *tau, values, normalization: TraceNormalization::AsymptoteOne })
}

/// FWHM of a trace; for a HOM dip, the full width at half depth.
pub fn correlation_widths(trace: &CorrelationTrace) -> Result<f64> {
    let v: Vec<f64> = match trace.kind {
        TraceKind::Hom => trace.values.iter().map(|r| 1.0 - r).collect(),
        _ => trace.values.clone(),
    };
    let peak = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Degenerate("trace has no positive peak".into()));
    }
    let norm: Vec<f64> = v.iter().map(|x| x / peak).collect();
    if norm[0] >= 0.5 || norm[norm.len() - 1] >= 0.5 {
        return Err(Error::Degenerate("trace does not fall to half level inside the delay grid".into()));
    }
    let (l, r) = outermost_crossings(&norm, trace.tau.tau(0), trace.tau.spacing(), 0.5).expect("peak above half");
    Ok(r - l)
}

/// Effective wavelength `λ/2` of a biphoton made of photons at `λ`.
pub fn effective_wavelength(wavelength_nm: f64) -> Result<f64> {
    if !(wavelength_nm > 0.0) {
        return Err(Error::config("wavelength must be positive"));
    }
    Ok(0.5 * wavelength_nm)
}

/// Axial resolutions `(c·Δτ, c·Δτ/2)` in metres for classical and quantum OCT.
pub fn tomography_resolutions(coherence_time: f64) -> Result<(f64, f64)> {
    if !(coherence_time > 0.0) {
        return Err(Error::config("coherence time must be positive"));
    }
    let oct = SPEED_OF_LIGHT * coherence_time;
    Ok((oct, 0.5 * oct))
}

/// Delay grid covering eight coherence times and the group-delay spread of
/// the amplitude, sampled at a sixteenth of the coherence time.
pub fn auto_tau_grid(f: &SpectralAmplitude, max_points: usize) -> Result<TauGrid> {
    let grid = f.grid();
    let s = spectral_intensity(f);
    let rep = crate::spectral::width_metrics(&s, grid, 0.05, None)?;
    let coherence = 5.0 / rep.fwhm.rad_per_s.max(grid.spacing());
    let dw = grid.spacing();
    let mut spread: f64 = 0.0;
    let v = f.values();
    for j in 1..v.len() {
        if s[j] > 1e-3 && s[j - 1] > 1e-3 {
            let d = (v[j] * v[j - 1].conj()).arg() / dw;
            spread = spread.max(d.abs());
        }
    }
    let half = (8.0 * coherence).max(1.5 * spread);
    // the transform of a band-limited amplitude needs dτ well below π/Ω_max
    let step = (coherence / 16.0).min(0.25 * std::f64::consts::PI / grid.half_span());
    let mut n = 2 * (half / step).ceil() as usize + 1;
    if n > max_points {
        n = if max_points % 2 == 1 { max_points } else { max_points - 1 };
    }
    TauGrid::new(half, n.max(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Provenance;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn prov() -> Provenance {
        Provenance { source: "test".into(), phase_mode: None, length_used: 1.0 }
    }

    fn amp(grid: FrequencyGrid, f: impl Fn(f64) -> Complex64) -> SpectralAmplitude {
        SpectralAmplitude::from_raw(grid, grid.omegas().into_iter().map(f).collect(), prov()).unwrap()
    }

    #[test]
    fn rectangle_first_zero() {
        let g = FrequencyGrid::new(2.0, 4001).unwrap();
        let dw = 2.0;
        let s: Vec<f64> = g.omegas().iter().map(|w| if w.abs() <= 1.0 + 1e-12 { 1.0 } else { 0.0 }).collect();
        let tau = TauGrid::new(10.0, 2001).unwrap();
        let t = g1(&s, &g, &tau).unwrap();
        assert_eq!(t.values[tau.center_index()], 1.0);
        // g = sinc(ΔΩτ/2), first zero at 2π/ΔΩ
        let j = tau.center_index() + (2.0 * PI / dw / tau.spacing()).round() as usize;
        assert!(t.values[j].abs() < 5e-3);
        for (k, v) in t.values.iter().enumerate() {
            assert!(*v <= 1.0 + 1e-12);
            assert_eq!(*v, t.values[tau.len() - 1 - k]);
        }
    }

    #[test]
    fn gaussian_time_bandwidth() {
        let g = FrequencyGrid::new(10.0, 2001).unwrap();
        let s: Vec<f64> = g.omegas().iter().map(|w| (-w * w / 2.0).exp()).collect();
        let tau = TauGrid::new(10.0, 4001).unwrap();
        let t = g1(&s, &g, &tau).unwrap();
        let dt = correlation_widths(&t).unwrap();
        let dw = 2.0 * (2.0 * 2f64.ln()).sqrt();
        assert_relative_eq!(dt * dw, 8.0 * 2f64.ln(), max_relative = 1e-2);
    }

    #[test]
    fn scaling_the_spectrum_rescales_delay() {
        let g = FrequencyGrid::new(20.0, 4001).unwrap();
        let narrow: Vec<f64> = g.omegas().iter().map(|w| (-w * w / 2.0).exp()).collect();
        let wide: Vec<f64> = g.omegas().iter().map(|w| (-w * w / 8.0).exp()).collect();
        let tau = TauGrid::new(8.0, 1601).unwrap();
        let a = correlation_widths(&g1(&narrow, &g, &tau).unwrap()).unwrap();
        let b = correlation_widths(&g1(&wide, &g, &tau).unwrap()).unwrap();
        assert_relative_eq!(a / b, 2.0, max_relative = 1e-3);
        // g_{sS}(τ) = g_S(sτ) checked at matching samples
        let ga = g1(&narrow, &g, &tau).unwrap();
        let gb = g1(&wide, &g, &tau).unwrap();
        let c = tau.center_index();
        for k in 0..200 {
            assert!((gb.values[c + k] - ga.values[c + 2 * k]).abs() < 1e-6);
        }
    }

    #[test]
    fn real_gaussian_transforms_to_real_gaussian() {
        let g = FrequencyGrid::new(12.0, 2001).unwrap();
        let f = amp(g, |w| Complex64::new((-w * w / 2.0).exp(), 0.0));
        let tau = TauGrid::new(12.0, 1201).unwrap();
        let ta = time_amplitude(&f, &tau);
        for (v, t) in ta.values.iter().zip(tau.taus()) {
            assert!(v.im.abs() < 1e-9);
            assert!((v.re - (2.0 * PI).sqrt() * (-t * t / 2.0).exp()).abs() < 1e-9);
        }
        assert!((ta.parseval_ratio - 1.0).abs() < 1e-3);
        assert!(!ta.coverage_warning);
        let short = time_amplitude(&f, &TauGrid::new(0.5, 101).unwrap());
        assert!(short.coverage_warning);
    }

    #[test]
    fn linear_phase_shifts_time_amplitude() {
        let g = FrequencyGrid::new(12.0, 2001).unwrap();
        let t0 = 3.0;
        let f = amp(g, |w| Complex64::from_polar((-w * w / 2.0).exp(), w * t0));
        let tau = TauGrid::new(12.0, 1201).unwrap();
        let ta = time_amplitude(&f, &tau);
        let (j, _) = ta.values.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap();
        assert!((tau.tau(j) + t0).abs() <= tau.spacing());
    }

    #[test]
    fn forms_coincide_for_even_real_amplitude() {
        let g = FrequencyGrid::new(10.0, 1001).unwrap();
        let f = amp(g, |w| Complex64::new((-w * w / 3.0).exp() * (1.0 + 0.2 * w * w), 0.0));
        let tau = TauGrid::new(6.0, 601).unwrap();
        let a = g2(&f, &tau, G2Form::ComplexExponential).unwrap();
        let b = g2(&f, &tau, G2Form::Cosine).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn chirp_lengthens_second_order_width() {
        let g = FrequencyGrid::new(4.0, 2001).unwrap();
        let flat = amp(g, |w| Complex64::new(if w.abs() <= 2.0 { 1.0 } else { 0.0 }, 0.0));
        let chirped = amp(g, |w| Complex64::from_polar(if w.abs() <= 2.0 { 1.0 } else { 0.0 }, 2.0 * w * w));
        let tau = TauGrid::new(40.0, 4001).unwrap();
        let a = correlation_widths(&g2(&flat, &tau, G2Form::ComplexExponential).unwrap()).unwrap();
        let b = correlation_widths(&g2(&chirped, &tau, G2Form::ComplexExponential).unwrap()).unwrap();
        assert!(b > a);
    }

    #[test]
    fn gaussian_second_order_limit() {
        // transform-limited Gaussian: |F̃|² FWHM times |F|² FWHM is 4 ln 2
        let g = FrequencyGrid::new(10.0, 2001).unwrap();
        let f = amp(g, |w| Complex64::new((-w * w / 4.0).exp(), 0.0));
        let tau = TauGrid::new(10.0, 2001).unwrap();
        let dt = correlation_widths(&g2(&f, &tau, G2Form::ComplexExponential).unwrap()).unwrap();
        let dw = 2.0 * (2.0 * 2f64.ln()).sqrt();
        assert_relative_eq!(dt * dw, 4.0 * 2f64.ln(), max_relative = 2e-2);
    }

    #[test]
    fn hom_dip_is_half_width() {
        let g = FrequencyGrid::new(10.0, 2001).unwrap();
        let s: Vec<f64> = g.omegas().iter().map(|w| (-w * w / 2.0).exp()).collect();
        let tau = TauGrid::new(10.0, 2001).unwrap();
        let t1 = g1(&s, &g, &tau).unwrap();
        let hom = hom_dip(&t1, &TauGrid::new(5.0, 2001).unwrap()).unwrap();
        assert!(hom.values[hom.tau.center_index()].abs() < 1e-12);
        let ratio = correlation_widths(&hom).unwrap() / correlation_widths(&t1).unwrap();
        assert_relative_eq!(ratio, 0.5, max_relative = 1e-3);
        assert!(hom.values.iter().all(|v| *v >= -1e-12 && *v <= 1.0 + 1e-9));
        assert!(hom_dip(&t1, &TauGrid::new(6.0, 101).unwrap()).is_err());
    }

    #[test]
    fn hom_tracks_first_order_on_aligned_grid() {
        let g = FrequencyGrid::new(2.0, 2001).unwrap();
        let s: Vec<f64> = g.omegas().iter().map(|w| if w.abs() <= 1.0 + 1e-12 { 1.0 } else { 0.0 }).collect();
        let tau = TauGrid::new(20.0, 2001).unwrap();
        let t1 = g1(&s, &g, &tau).unwrap();
        let half = TauGrid::new(10.0, 1001).unwrap();
        let hom = hom_dip(&t1, &half).unwrap();
        for j in 0..half.len() {
            let k = tau.center_index() as isize + 2 * (j as isize - half.center_index() as isize);
            assert!((hom.values[j] - (1.0 - t1.values[k as usize])).abs() < 1e-9);
        }
    }

    #[test]
    fn metric_helpers() {
        assert_eq!(effective_wavelength(702.2).unwrap(), 351.1);
        assert_eq!(effective_wavelength(1000.0).unwrap(), 500.0);
        assert_eq!(effective_wavelength(effective_wavelength(800.0).unwrap()).unwrap(), 200.0);
        let (oct, qoct) = tomography_resolutions(10e-15).unwrap();
        assert_relative_eq!(oct, 2.99792458e-6, max_relative = 1e-12);
        assert_eq!(qoct, oct / 2.0);
        let (oct2, _) = tomography_resolutions(20e-15).unwrap();
        assert_eq!(oct2, 2.0 * oct);
        assert!(tomography_resolutions(0.0).is_err());
    }
}
