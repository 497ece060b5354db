use serde::{Deserialize, Serialize};

use crate::crystal::{Polarization, Symmetry};
use crate::error::{Error, Result};
use crate::units::omega_from_wavelength_um;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchingType {
    /// Signal and idler share the polarization orthogonal to the pump.
    #[serde(rename = "type-I")]
    TypeI,
    /// Signal and idler orthogonal.
    #[serde(rename = "type-II")]
    TypeII,
    /// All three waves extraordinary (quasi-phase-matched d33 interaction).
    #[serde(rename = "type-0")]
    Type0,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Geometry {
    Collinear,
    /// Internal signal and idler angles to the pump, rad.
    Noncollinear { signal_angle: f64, idler_angle: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Poling {
    None,
    /// Period in µm.
    Uniform { period_um: f64 },
    /// `k_g(z) = kg0 + chirp·z` with `kg0` in rad/µm and `chirp` in rad/µm².
    Chirped { kg0: f64, chirp: f64 },
}

impl Poling {
    /// Poling wavenumber at `z` (m), rad/m.
    pub fn wavenumber(&self, z: f64) -> f64 {
        match *self {
            Poling::None => 0.0,
            Poling::Uniform { period_um } => 2.0 * std::f64::consts::PI / (period_um * 1e-6),
            Poling::Chirped { kg0, chirp } => (kg0 + chirp * z * 1e6) * 1e6,
        }
    }
}

/// Geometry and frequencies of a down-conversion process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingConfig {
    pub crystal: String,
    pub pump_wavelength_um: f64,
    pub matching_type: MatchingType,
    pub degenerate: bool,
    pub signal_wavelength_um: f64,
    pub idler_wavelength_um: f64,
    pub geometry: Geometry,
    pub poling: Poling,
    /// Angle between pump and optic axis (crystal cut), rad.
    pub pump_axis_angle: f64,
    /// m
    pub crystal_length: f64,
    /// Width of the pump transverse wave-vector distribution, rad/m.
    pub pump_angular_width: f64,
    /// Pump spectral width, rad/s.
    pub pump_spectral_width: f64,
}

/// The three interacting waves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wave {
    Pump,
    Signal,
    Idler,
}

impl MatchingConfig {
    /// Collinear degenerate configuration with `λ_s = λ_i = 2λ_p`.
    pub fn degenerate(
        crystal: &str,
        pump_wavelength_um: f64,
        matching_type: MatchingType,
        pump_axis_angle: f64,
        crystal_length: f64,
    ) -> Self {
        MatchingConfig {
            crystal: crystal.to_string(),
            pump_wavelength_um,
            matching_type,
            degenerate: true,
            signal_wavelength_um: 2.0 * pump_wavelength_um,
            idler_wavelength_um: 2.0 * pump_wavelength_um,
            geometry: Geometry::Collinear,
            poling: Poling::None,
            pump_axis_angle,
            crystal_length,
            pump_angular_width: 0.0,
            pump_spectral_width: 0.0,
        }
    }

    /// Collinear configuration with the idler fixed by energy conservation.
    pub fn nondegenerate(
        crystal: &str,
        pump_wavelength_um: f64,
        signal_wavelength_um: f64,
        matching_type: MatchingType,
        pump_axis_angle: f64,
        crystal_length: f64,
    ) -> Self {
        let idler = 1.0 / (1.0 / pump_wavelength_um - 1.0 / signal_wavelength_um);
        let mut cfg = Self::degenerate(crystal, pump_wavelength_um, matching_type, pump_axis_angle, crystal_length);
        cfg.signal_wavelength_um = signal_wavelength_um;
        cfg.idler_wavelength_um = idler;
        cfg.degenerate = false;
        cfg
    }

    pub fn with_geometry(mut self, geometry: Geometry) -> Self {
        self.geometry = geometry;
        self
    }

    pub fn with_poling(mut self, poling: Poling) -> Self {
        self.poling = poling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.pump_wavelength_um)
            || !positive(self.signal_wavelength_um)
            || !positive(self.idler_wavelength_um)
        {
            return Err(Error::config("wavelengths must be positive"));
        }
        let (wp, ws, wi) = (
            omega_from_wavelength_um(self.pump_wavelength_um),
            omega_from_wavelength_um(self.signal_wavelength_um),
            omega_from_wavelength_um(self.idler_wavelength_um),
        );
        if ((ws + wi - wp) / wp).abs() >= 1e-12 {
            return Err(Error::config(format!(
                "center frequencies violate energy conservation: relative error {:e}",
                ((ws + wi - wp) / wp).abs()
            )));
        }
        let two_lp = 2.0 * self.pump_wavelength_um;
        let is_degenerate = ((self.signal_wavelength_um - two_lp) / two_lp).abs() < 1e-12
            && ((self.idler_wavelength_um - two_lp) / two_lp).abs() < 1e-12;
        if is_degenerate != self.degenerate {
            return Err(Error::config("degenerate flag disagrees with the center wavelengths"));
        }
        if !positive(self.crystal_length) {
            return Err(Error::config("crystal length must be positive"));
        }
        if let Poling::Uniform { period_um } = self.poling {
            if !positive(period_um) {
                return Err(Error::config("poling period must be positive"));
            }
        }
        if let Poling::Chirped { kg0, chirp } = self.poling {
            if !(kg0.is_finite() && chirp.is_finite()) {
                return Err(Error::config("chirped poling coefficients must be finite"));
            }
        }
        if !(self.pump_axis_angle.is_finite() && self.pump_axis_angle >= 0.0 && self.pump_axis_angle <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::config("pump axis angle must lie in [0, pi/2]"));
        }
        if !(self.pump_angular_width >= 0.0 && self.pump_spectral_width >= 0.0) {
            return Err(Error::config("pump widths must be non-negative"));
        }
        Ok(())
    }

    /// `(ω_p, ω_s0, ω_i0)` with `ω_i0 = ω_p − ω_s0` exactly.
    pub fn center_omegas(&self) -> (f64, f64, f64) {
        let wp = omega_from_wavelength_um(self.pump_wavelength_um);
        let ws = if self.degenerate {
            0.5 * wp
        } else {
            omega_from_wavelength_um(self.signal_wavelength_um)
        };
        (wp, ws, wp - ws)
    }

    pub fn signal_angle(&self) -> f64 {
        match self.geometry {
            Geometry::Collinear => 0.0,
            Geometry::Noncollinear { signal_angle, .. } => signal_angle,
        }
    }

    pub fn idler_angle(&self) -> f64 {
        match self.geometry {
            Geometry::Collinear => 0.0,
            Geometry::Noncollinear { idler_angle, .. } => idler_angle,
        }
    }

    /// Which waves are extraordinary: for a negative crystal type-I is
    /// o + o → e and type-II is o(signal) + e(idler) → e; a positive crystal
    /// swaps o and e.
    pub fn extraordinary_waves(&self, symmetry: Symmetry) -> [bool; 3] {
        let negative = match self.matching_type {
            MatchingType::TypeI => [true, false, false],
            MatchingType::TypeII => [true, false, true],
            MatchingType::Type0 => [true, true, true],
        };
        match (symmetry, self.matching_type) {
            (Symmetry::UniaxialNegative, _) | (_, MatchingType::Type0) => negative,
            (Symmetry::UniaxialPositive, _) => negative.map(|e| !e),
        }
    }

    /// Polarization of a wave whose internal direction makes `offset` with the pump.
    pub fn polarization(&self, symmetry: Symmetry, wave: Wave, offset: f64) -> Polarization {
        let ext = self.extraordinary_waves(symmetry);
        let idx = match wave {
            Wave::Pump => 0,
            Wave::Signal => 1,
            Wave::Idler => 2,
        };
        if ext[idx] {
            Polarization::extraordinary_folded(self.pump_axis_angle + offset)
        } else {
            Polarization::Ordinary
        }
    }

    /// Human-readable polarization assignment, recorded in outputs.
    pub fn polarization_assignment(&self, symmetry: Symmetry) -> String {
        let ext = self.extraordinary_waves(symmetry);
        let tag = |e: bool| if e { "e" } else { "o" };
        format!("signal {} + idler {} -> pump {}", tag(ext[1]), tag(ext[2]), tag(ext[0]))
    }
}
