use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_matching::{MismatchComponents, PhaseMatcher, Poling, Wave};

use super::amplitude::homogeneous_factor;
use super::grid::FrequencyGrid;
use super::metrics::width_metrics_uniform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PumpEnvelope {
    #[default]
    Gaussian,
}

/// `F(Ω_s, Ω_i)` for signal `ω_s0 + Ω_s` and idler `ω_i0 − Ω_i`, so that the
/// pump detuning is `Ω_s − Ω_i` and a monochromatic pump confines the
/// amplitude to `Ω_s = Ω_i`. Exchanging the photons maps `(Ω_s, Ω_i)` to
/// `(−Ω_i, −Ω_s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSpectralAmplitude {
    signal: FrequencyGrid,
    idler: FrequencyGrid,
    /// Row-major, one row per signal sample.
    values: Vec<Complex64>,
    pump_width: f64,
    envelope: PumpEnvelope,
    /// Monochromatic pump sampled as a one-cell-wide line.
    line_limit: bool,
}

impl JointSpectralAmplitude {
    /// Samples an arbitrary model, normalized to unit peak.
    pub fn from_fn<F>(signal: FrequencyGrid, idler: FrequencyGrid, pump_width: f64, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        let ws = signal.omegas();
        let wi = idler.omegas();
        let values: Vec<Complex64> = ws
            .par_iter()
            .flat_map_iter(|&a| wi.iter().map(move |&b| (a, b)).collect::<Vec<_>>())
            .map(|(a, b)| f(a, b))
            .collect();
        Self::normalized(signal, idler, values, pump_width, false)
    }

    fn normalized(
        signal: FrequencyGrid,
        idler: FrequencyGrid,
        mut values: Vec<Complex64>,
        pump_width: f64,
        line_limit: bool,
    ) -> Result<Self> {
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Degenerate("joint amplitude has non-finite samples".into()));
        }
        let peak = values.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        if !(peak > 0.0) {
            return Err(Error::Degenerate("joint amplitude is identically zero".into()));
        }
        values.iter_mut().for_each(|v| *v /= peak);
        Ok(JointSpectralAmplitude { signal, idler, values, pump_width, envelope: PumpEnvelope::Gaussian, line_limit })
    }

    pub fn signal_grid(&self) -> &FrequencyGrid {
        &self.signal
    }

    pub fn idler_grid(&self) -> &FrequencyGrid {
        &self.idler
    }

    pub fn pump_width(&self) -> f64 {
        self.pump_width
    }

    pub fn envelope(&self) -> PumpEnvelope {
        self.envelope
    }

    pub fn is_line_limit(&self) -> bool {
        self.line_limit
    }

    pub fn value(&self, is: usize, ii: usize) -> Complex64 {
        self.values[is * self.idler.len() + ii]
    }

    /// `∫|F|² dΩ_i` per signal sample.
    pub fn signal_marginal(&self) -> Vec<f64> {
        let n = self.idler.len();
        let d = self.idler.spacing();
        self.values
            .chunks(n)
            .map(|row| {
                let s: Vec<f64> = row.iter().map(|v| v.norm_sqr()).collect();
                super::metrics::trapezoid(&s, d)
            })
            .collect()
    }

    /// `|F(Ω_s, Ω_i)|²` along the signal axis at idler sample `ii`.
    pub fn conditional_slice(&self, ii: usize) -> Vec<f64> {
        (0..self.signal.len()).map(|is| self.value(is, ii).norm_sqr()).collect()
    }
}

/// Joint amplitude with a Gaussian pump envelope of width `pump_width` (rad/s)
/// and exact dispersion for all three waves. `pump_width = 0` gives the line
/// limit; `∞` removes the envelope.
pub fn joint_spectral_amplitude(
    m: &PhaseMatcher<'_>,
    signal: &FrequencyGrid,
    idler: &FrequencyGrid,
    pump_width: f64,
    temperature: f64,
    field: f64,
) -> Result<JointSpectralAmplitude> {
    if !(pump_width >= 0.0) {
        return Err(Error::config("pump spectral width must be non-negative"));
    }
    let kg = match m.config().poling {
        Poling::Chirped { .. } => return Err(Error::config("joint amplitude needs a z-independent grating")),
        p => p.wavenumber(0.0),
    };
    let (wp, ws0, wi0) = m.omegas();
    let length = m.config().crystal_length;
    let dt = temperature - m.crystal().reference_temperature;
    let ks = signal
        .omegas()
        .into_par_iter()
        .map(|w| m.wave_components(Wave::Signal, ws0 + w))
        .collect::<Result<Vec<_>>>()?;
    let ki = idler
        .omegas()
        .into_par_iter()
        .map(|w| m.wave_components(Wave::Idler, wi0 - w))
        .collect::<Result<Vec<_>>>()?;

    let (ns, ni) = (signal.len(), idler.len());
    let same_spacing = signal.spacing() == idler.spacing();
    // pump detunings take ns + ni − 1 distinct values on a shared spacing
    let kp_cache: Vec<MismatchComponents> = if same_spacing {
        let h = signal.spacing();
        let shift = idler.center_index() as isize - signal.center_index() as isize;
        (0..ns + ni - 1)
            .into_par_iter()
            .map(|k| {
                let d = k as isize - (ni as isize - 1) + shift;
                m.wave_components(Wave::Pump, wp + d as f64 * h)
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let line_limit = pump_width == 0.0;
    let cell = 0.5 * signal.spacing().min(idler.spacing());
    let values = (0..ns * ni)
        .into_par_iter()
        .map(|idx| {
            let (is, ii) = (idx / ni, idx % ni);
            let (a, b) = (signal.omega(is), idler.omega(ii));
            let kp = if same_spacing {
                kp_cache[is + ni - 1 - ii]
            } else {
                m.wave_components(Wave::Pump, wp + a - b)?
            };
            let dk = (kp + ks[is] + ki[ii]).at(dt, field) - kg;
            let env = if line_limit {
                if (a - b).abs() <= cell { 1.0 } else { 0.0 }
            } else {
                (-(a - b).powi(2) / (2.0 * pump_width * pump_width)).exp()
            };
            Ok(homogeneous_factor(dk, length) * env)
        })
        .collect::<Result<Vec<_>>>()?;
    JointSpectralAmplitude::normalized(*signal, *idler, values, pump_width, line_limit)
}

/// Ratio of the unconditional (marginal) to the conditional signal FWHM,
/// conditioned at the center idler sample.
pub fn fedorov_ratio(jsa: &JointSpectralAmplitude) -> Result<f64> {
    fedorov_ratio_at(jsa, jsa.idler.center_index())
}

pub fn fedorov_ratio_at(jsa: &JointSpectralAmplitude, idler_index: usize) -> Result<f64> {
    if idler_index >= jsa.idler.len() {
        return Err(Error::config("conditioning index outside the idler grid"));
    }
    let g = &jsa.signal;
    let marginal = width_metrics_uniform(&jsa.signal_marginal(), g.omega(0), g.spacing(), 0.05, None)?;
    let conditional = width_metrics_uniform(&jsa.conditional_slice(idler_index), g.omega(0), g.spacing(), 0.05, None)
        .map_err(|_| Error::Degenerate("conditional slice is zero".into()))?;
    if !(conditional.fwhm.rad_per_s > 0.0) {
        return Err(Error::Degenerate("conditional distribution has zero width".into()));
    }
    Ok(marginal.fwhm.rad_per_s / conditional.fwhm.rad_per_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crystal::test_records::kdp;
    use crate::phase_matching::{solve_pump_axis_angle, MatchingConfig, MatchingType};

    fn grid(span: f64, n: usize) -> FrequencyGrid {
        FrequencyGrid::new(span, n).unwrap()
    }

    #[test]
    fn separable_model_has_unit_ratio() {
        let g = grid(5.0, 401);
        let jsa = JointSpectralAmplitude::from_fn(g, g, 1.0, |a, b| {
            Complex64::new((-a * a / 2.0).exp() * (-b * b / 2.0).exp(), 0.0)
        })
        .unwrap();
        assert!((fedorov_ratio(&jsa).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gaussian_model_closed_form() {
        // |F|² = exp(−(a+b)²/A² − (a−b)²/B²) gives R = (A² + B²)/(2AB)
        let (big, small) = (1.0, 0.1);
        let g = grid(3.0, 1201);
        let jsa = JointSpectralAmplitude::from_fn(g, g, small, |a, b| {
            Complex64::new((-(a + b).powi(2) / (2.0 * big * big) - (a - b).powi(2) / (2.0 * small * small)).exp(), 0.0)
        })
        .unwrap();
        let expected = (big * big + small * small) / (2.0 * big * small);
        assert!((fedorov_ratio(&jsa).unwrap() / expected - 1.0).abs() < 0.01);
    }

    #[test]
    fn kdp_exchange_symmetry_and_envelope_limit() {
        let r = kdp();
        let mut cfg = MatchingConfig::degenerate("KDP", 0.3511, MatchingType::TypeI, 0.0, 0.02);
        cfg.pump_axis_angle = solve_pump_axis_angle(&r, &cfg).unwrap();
        let m = PhaseMatcher::new(&r, cfg).unwrap();
        let g = grid(2e14, 129);
        let t = r.reference_temperature;
        let jsa = joint_spectral_amplitude(&m, &g, &g, 2e13, t, 0.0).unwrap();
        let n = g.len();
        for is in (0..n).step_by(7) {
            for ii in (0..n).step_by(5) {
                let a = jsa.value(is, ii).norm();
                let b = jsa.value(n - 1 - ii, n - 1 - is).norm();
                assert!((a - b).abs() < 1e-9, "{is} {ii}");
            }
        }
        // without envelope the magnitude is the normalized phase-matching factor
        let open = joint_spectral_amplitude(&m, &g, &g, f64::INFINITY, t, 0.0).unwrap();
        let (is, ii) = (40, 90);
        let dk = (m.wave_components(Wave::Pump, m.omegas().0 + g.omega(is) - g.omega(ii)).unwrap()
            + m.wave_components(Wave::Signal, m.omegas().1 + g.omega(is)).unwrap()
            + m.wave_components(Wave::Idler, m.omegas().2 - g.omega(ii)).unwrap())
        .at(0.0, 0.0);
        // the raw peak is L·sinc(0) at the exactly matched center
        let expect = super::super::amplitude::sinc(0.5 * dk * 0.02).abs();
        assert!((open.value(is, ii).norm() - expect).abs() < 1e-9);
    }

    #[test]
    fn monochromatic_pump_is_line() {
        let r = kdp();
        let mut cfg = MatchingConfig::degenerate("KDP", 0.3511, MatchingType::TypeI, 0.0, 0.02);
        cfg.pump_axis_angle = solve_pump_axis_angle(&r, &cfg).unwrap();
        let m = PhaseMatcher::new(&r, cfg).unwrap();
        let g = grid(2e14, 129);
        let jsa = joint_spectral_amplitude(&m, &g, &g, 0.0, 25.0, 0.0).unwrap();
        assert!(jsa.is_line_limit());
        assert_eq!(jsa.value(10, 11).norm(), 0.0);
        assert!(jsa.value(64, 64).norm() > 0.9);
    }
}
