use serde::{Deserialize, Serialize};

use crate::crystal::{wavenumber_derivatives, WavenumberDerivatives};
use crate::error::{Error, Result};
use crate::units::SPEED_OF_LIGHT;

use super::config::Wave;
use super::mismatch::PhaseMatcher;

/// Quadratic model `Δk ≈ d0 + d1·Ω + d2·Ω²` around the centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorCoefficients {
    /// rad/m
    pub d0: f64,
    /// s/m
    pub d1: f64,
    /// s²/m
    pub d2: f64,
    pub pump: WavenumberDerivatives,
    pub signal: WavenumberDerivatives,
    pub idler: WavenumberDerivatives,
}

impl TaylorCoefficients {
    pub fn eval(&self, omega: f64) -> f64 {
        self.d0 + omega * (self.d1 + omega * self.d2)
    }

    /// Error estimate for `d1` from the difference stencils.
    pub fn d1_error(&self) -> f64 {
        self.signal.k1_error + self.idler.k1_error
    }
}

/// Collinear Taylor coefficients; `d0` is the exact mismatch at `Ω = 0`.
pub fn taylor_coefficients(m: &PhaseMatcher<'_>, temperature: f64, field: f64) -> Result<TaylorCoefficients> {
    let (wp, ws, wi) = m.omegas();
    let c = m.crystal();
    let pump = wavenumber_derivatives(c, m.polarization(Wave::Pump, 0.0), wp, temperature, field)?;
    let signal = wavenumber_derivatives(c, m.polarization(Wave::Signal, 0.0), ws, temperature, field)?;
    let idler = wavenumber_derivatives(c, m.polarization(Wave::Idler, 0.0), wi, temperature, field)?;
    Ok(TaylorCoefficients {
        d0: m.collinear_mismatch(0.0, temperature, field)?,
        d1: -(signal.k1 - idler.k1),
        d2: -0.5 * (signal.k2 + idler.k2),
        pump,
        signal,
        idler,
    })
}

/// Tolerances for the broadband-matching report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionTolerances {
    /// rad/m
    pub phase: f64,
    /// s/m
    pub group_velocity: f64,
    /// s²/m
    pub dispersion: f64,
}

impl Default for ConditionTolerances {
    fn default() -> Self {
        ConditionTolerances { phase: 1e-3, group_velocity: 1e-15, dispersion: 1e-30 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    pub tolerance: f64,
    pub satisfied: bool,
}

impl Residual {
    fn new(value: f64, tolerance: f64) -> Self {
        Residual { value, tolerance, satisfied: value.abs() <= tolerance }
    }
}

/// Residuals of the three broadband-matching conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BroadbandReport {
    /// `k_p − k_s0 − k_i0 − k_g`, rad/m.
    pub phase_matching: Residual,
    /// `k′_s0 − k′_i0`, s/m.
    pub group_velocity_matching: Residual,
    /// `k″_s0 + k″_i0`, s²/m.
    pub dispersion_cancellation: Residual,
}

pub fn broadband_conditions_report(
    m: &PhaseMatcher<'_>,
    temperature: f64,
    field: f64,
    tol: ConditionTolerances,
) -> Result<BroadbandReport> {
    let t = taylor_coefficients(m, temperature, field)?;
    Ok(BroadbandReport {
        phase_matching: Residual::new(t.d0, tol.phase),
        group_velocity_matching: Residual::new(t.signal.k1 - t.idler.k1, tol.group_velocity),
        dispersion_cancellation: Residual::new(t.signal.k2 + t.idler.k2, tol.dispersion),
    })
}

/// Effective `(k̃′, k̃″)` seen by a pulse whose front is tilted by `tilt`
/// between elements with dispersion angle `dispersion` (both rad).
pub fn tilted_front_modified(k: f64, k1: f64, k2: f64, tilt: f64, dispersion: f64) -> Result<(f64, f64)> {
    if !(k > 0.0) {
        return Err(Error::config("wavenumber must be positive"));
    }
    if !(dispersion.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(Error::config("dispersion angle must satisfy |phi| < pi/2"));
    }
    let rho = tilt.tan();
    let alpha = dispersion.tan() / SPEED_OF_LIGHT;
    Ok((k1 + alpha * rho, k2 - alpha * alpha / k))
}

/// Second-order series of the noncollinear mismatch, coefficients printed in
/// the usual small-angle expansion: `Δk_⊥ ≈ p0 + p1·Ω + p2·Ω²`,
/// `Δk_∥ ≈ s0 + s1·Ω + s2·Ω²`. Diagnostic only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoncollinearSeries {
    pub perpendicular: [f64; 3],
    pub parallel: [f64; 3],
}

pub fn noncollinear_series(m: &PhaseMatcher<'_>, q: f64, temperature: f64, field: f64) -> Result<NoncollinearSeries> {
    let cfg = m.config();
    let (ts, ti) = (cfg.signal_angle(), cfg.idler_angle());
    let (wp, ws, wi) = m.omegas();
    let c = m.crystal();
    let kp = m.wavenumber(Wave::Pump, 0.0, wp, temperature, field)?;
    let s = wavenumber_derivatives(c, m.polarization(Wave::Signal, -ts), ws, temperature, field)?;
    let i = wavenumber_derivatives(c, m.polarization(Wave::Idler, ti), wi, temperature, field)?;
    let kg = cfg.poling.wavenumber(0.0);
    Ok(NoncollinearSeries {
        perpendicular: [
            q + s.k * ts.sin() - i.k * ti.sin(),
            s.k1 * ts.sin() + i.k1 * ti.sin(),
            0.5 * (s.k2 * ts.sin() - i.k2 * ti.sin()),
        ],
        parallel: [
            kp - kg - s.k * ts.cos() - i.k * ti.cos(),
            -(s.k1 * ts.cos() - i.k1 * ti.cos()),
            -0.5 * (s.k2 * ts.cos() + i.k2 * ti.cos()),
        ],
    })
}

/// A width bound in rad/s, or the statement that the model does not limit it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "kebab-case")]
pub enum WidthValue {
    Finite(f64),
    UnboundedAtThisOrder,
}

impl WidthValue {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            WidthValue::Finite(v) => Some(v),
            WidthValue::UnboundedAtThisOrder => None,
        }
    }

    fn ratio(num: f64, den: f64) -> Self {
        let v = num / den;
        if den == 0.0 || !v.is_finite() {
            WidthValue::UnboundedAtThisOrder
        } else {
            WidthValue::Finite(v)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthEntry {
    pub label: String,
    pub value: WidthValue,
}

/// Roots `Ω_p/2 ± √(γ·Ω_p)` of the finite-pump-bandwidth condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpBandwidthRoots {
    /// `γ = (k′_p0 − k′_0)/k″_0`, rad/s.
    pub gamma: f64,
    pub pump_detuning: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Closed-form roots for a pump detuning `omega_p`; requires `γ·Ω_p ≥ 0`.
pub fn pump_bandwidth_roots(gamma: f64, omega_p: f64) -> Option<PumpBandwidthRoots> {
    let prod = gamma * omega_p;
    if prod < 0.0 || !prod.is_finite() {
        return None;
    }
    let r = prod.sqrt();
    Some(PumpBandwidthRoots { gamma, pump_detuning: omega_p, lower: 0.5 * omega_p - r, upper: 0.5 * omega_p + r })
}

/// Analytic width bounds derived from the quadratic mismatch model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticWidths {
    /// `|Δk(Ω)| ≤ 2π/L` on the Taylor model; the bound on `|Ω|`.
    pub homogeneous: WidthEntry,
    pub focused_pump_transverse: Option<WidthEntry>,
    pub focused_pump_longitudinal: Option<WidthEntry>,
    pub pump_bandwidth: Option<WidthEntry>,
    pub pump_bandwidth_roots: Option<PumpBandwidthRoots>,
    /// Whether the homogeneous entry used the quadratic (`d1 = 0`) branch.
    pub quadratic_branch: bool,
}

impl AnalyticWidths {
    pub fn entries(&self) -> Vec<&WidthEntry> {
        let mut v = vec![&self.homogeneous];
        v.extend(self.focused_pump_transverse.iter());
        v.extend(self.focused_pump_longitudinal.iter());
        v.extend(self.pump_bandwidth.iter());
        v
    }

    /// Largest finite bound.
    pub fn largest_finite(&self) -> Option<f64> {
        self.entries().iter().filter_map(|e| e.value.finite()).reduce(f64::max)
    }
}

pub fn width_limits(m: &PhaseMatcher<'_>, temperature: f64, field: f64) -> Result<AnalyticWidths> {
    let cfg = m.config();
    let length = cfg.crystal_length;
    let t = taylor_coefficients(m, temperature, field)?;
    let two_pi_l = 2.0 * std::f64::consts::PI / length;

    let quadratic = t.d1.abs() <= t.d1_error().max(1e-12 * t.signal.k1);
    let homogeneous = if quadratic {
        WidthEntry {
            label: "homogeneous: |dk| <= 2pi/L, quadratic mismatch".into(),
            value: if t.d2 == 0.0 { WidthValue::UnboundedAtThisOrder } else { WidthValue::ratio(two_pi_l, t.d2.abs()).sqrt_value() },
        }
    } else {
        WidthEntry {
            label: "homogeneous: |dk| <= 2pi/L, linear mismatch".into(),
            value: WidthValue::ratio(two_pi_l, t.d1.abs()),
        }
    };

    let (mut transverse, mut longitudinal) = (None, None);
    if let super::config::Geometry::Noncollinear { signal_angle, .. } = cfg.geometry {
        let ws = m.omegas().1;
        let k0 = wavenumber_derivatives(m.crystal(), m.polarization(Wave::Signal, -signal_angle), ws, temperature, field)?;
        transverse = Some(WidthEntry {
            label: "focused pump: transverse matching over the pump angular width".into(),
            value: WidthValue::ratio(cfg.pump_angular_width, 2.0 * k0.k1 * signal_angle.sin()),
        });
        longitudinal = Some(WidthEntry {
            label: "focused pump: longitudinal matching with quadratic mismatch".into(),
            value: WidthValue::ratio(two_pi_l, k0.k2 * signal_angle.cos()).sqrt_value(),
        });
    }

    let (mut pump_bandwidth, mut roots) = (None, None);
    if cfg.pump_spectral_width > 0.0 {
        let gamma = (t.pump.k1 - t.signal.k1) / t.signal.k2;
        let dw = if gamma < 0.0 { -cfg.pump_spectral_width } else { cfg.pump_spectral_width };
        roots = pump_bandwidth_roots(gamma, dw);
        pump_bandwidth = Some(WidthEntry {
            label: "finite pump bandwidth: upper root at the pump width".into(),
            value: match roots {
                Some(r) if r.upper.is_finite() => WidthValue::Finite(r.upper.abs()),
                _ => WidthValue::UnboundedAtThisOrder,
            },
        });
    }

    Ok(AnalyticWidths {
        homogeneous,
        focused_pump_transverse: transverse,
        focused_pump_longitudinal: longitudinal,
        pump_bandwidth,
        pump_bandwidth_roots: roots,
        quadratic_branch: quadratic,
    })
}

impl WidthValue {
    fn sqrt_value(self) -> Self {
        match self {
            WidthValue::Finite(v) if v >= 0.0 => WidthValue::Finite(v.sqrt()),
            WidthValue::Finite(v) => WidthValue::Finite(v.abs().sqrt()),
            u => u,
        }
    }
}
