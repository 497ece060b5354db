use crate::crystal::{CrystalRecord, Polarization};
use crate::error::{Error, Result};
use crate::profile::{LongitudinalProfile, Quantity};
use crate::units::{omega_from_wavelength_um, wavelength_um_from_omega, SPEED_OF_LIGHT};

use super::config::{Geometry, MatchingConfig, Poling, Wave};

/// `Δk` split into the parts that multiply `(T − T_ref)` and `E`.
/// Poling is not included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchComponents {
    /// rad/m
    pub base: f64,
    /// rad/(m·K)
    pub per_kelvin: f64,
    /// rad/V
    pub per_field: f64,
}

impl MismatchComponents {
    pub fn at(&self, delta_t: f64, field: f64) -> f64 {
        self.base + self.per_kelvin * delta_t + self.per_field * field
    }

    fn add_wave(&mut self, crystal: &CrystalRecord, pol: Polarization, omega: f64, weight: f64) -> Result<()> {
        let comp = crystal.index_components(pol, wavelength_um_from_omega(omega))?;
        let scale = weight * omega / SPEED_OF_LIGHT;
        self.base += scale * comp.base;
        self.per_kelvin += scale * comp.thermo;
        self.per_field += scale * comp.electro;
        Ok(())
    }
}

impl std::ops::Add for MismatchComponents {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        MismatchComponents {
            base: self.base + o.base,
            per_kelvin: self.per_kelvin + o.per_kelvin,
            per_field: self.per_field + o.per_field,
        }
    }
}

/// Wave-vector mismatch of a configured three-wave process in one crystal.
#[derive(Debug, Clone)]
pub struct PhaseMatcher<'a> {
    crystal: &'a CrystalRecord,
    cfg: MatchingConfig,
    omegas: (f64, f64, f64),
}

impl<'a> PhaseMatcher<'a> {
    pub fn new(crystal: &'a CrystalRecord, cfg: MatchingConfig) -> Result<Self> {
        cfg.validate()?;
        let omegas = cfg.center_omegas();
        Ok(PhaseMatcher { crystal, cfg, omegas })
    }

    pub fn crystal(&self) -> &'a CrystalRecord {
        self.crystal
    }

    pub fn config(&self) -> &MatchingConfig {
        &self.cfg
    }

    /// `(ω_p, ω_s0, ω_i0)` in rad/s.
    pub fn omegas(&self) -> (f64, f64, f64) {
        self.omegas
    }

    /// Same process with another crystal cut.
    pub fn with_angle(&self, pump_axis_angle: f64) -> Self {
        let mut cfg = self.cfg.clone();
        cfg.pump_axis_angle = pump_axis_angle;
        PhaseMatcher { crystal: self.crystal, cfg, omegas: self.omegas }
    }

    pub fn with_poling(&self, poling: Poling) -> Self {
        let mut cfg = self.cfg.clone();
        cfg.poling = poling;
        PhaseMatcher { crystal: self.crystal, cfg, omegas: self.omegas }
    }

    pub fn with_length(&self, length: f64) -> Result<Self> {
        let mut cfg = self.cfg.clone();
        cfg.crystal_length = length;
        PhaseMatcher::new(self.crystal, cfg)
    }

    pub fn polarization(&self, wave: Wave, offset: f64) -> Polarization {
        self.cfg.polarization(self.crystal.symmetry, wave, offset)
    }

    /// Detuning range over which signal and idler stay inside the
    /// transparency window.
    pub fn transparency_span(&self) -> (f64, f64) {
        let [lmin, lmax] = self.crystal.transparency;
        let (w_lo, w_hi) = (omega_from_wavelength_um(lmax), omega_from_wavelength_um(lmin));
        let (_, ws, wi) = self.omegas;
        let lo = (w_lo - ws).max(wi - w_hi);
        let hi = (w_hi - ws).min(wi - w_lo);
        (lo * (1.0 - 1e-9), hi * (1.0 - 1e-9))
    }

    /// Collinear components at signal `ω_s0 + Ω`, idler `ω_i0 − Ω`.
    pub fn collinear_components(&self, omega: f64) -> Result<MismatchComponents> {
        let (wp, ws, wi) = self.omegas;
        self.components_at(wp, ws + omega, wi - omega, 0.0, 0.0)
    }

    /// Parallel components for the configured geometry.
    pub fn components(&self, omega: f64) -> Result<MismatchComponents> {
        let (wp, ws, wi) = self.omegas;
        self.components_at(wp, ws + omega, wi - omega, self.cfg.signal_angle(), self.cfg.idler_angle())
    }

    /// Parallel components for arbitrary frequencies. The signal travels at
    /// `θ_s` on one side of the pump and the idler at `θ_i` on the other.
    pub fn components_at(
        &self,
        omega_p: f64,
        omega_s: f64,
        omega_i: f64,
        theta_s: f64,
        theta_i: f64,
    ) -> Result<MismatchComponents> {
        let mut c = MismatchComponents { base: 0.0, per_kelvin: 0.0, per_field: 0.0 };
        c.add_wave(self.crystal, self.polarization(Wave::Pump, 0.0), omega_p, 1.0)?;
        c.add_wave(self.crystal, self.polarization(Wave::Signal, -theta_s), omega_s, -theta_s.cos())?;
        c.add_wave(self.crystal, self.polarization(Wave::Idler, theta_i), omega_i, -theta_i.cos())?;
        Ok(c)
    }

    /// Signed contribution of one wave to the parallel mismatch for the
    /// configured angles: `+k_p`, `−k_s·cos θ_s`, `−k_i·cos θ_i`.
    pub fn wave_components(&self, wave: Wave, omega: f64) -> Result<MismatchComponents> {
        let (ts, ti) = (self.cfg.signal_angle(), self.cfg.idler_angle());
        let (pol, weight) = match wave {
            Wave::Pump => (self.polarization(Wave::Pump, 0.0), 1.0),
            Wave::Signal => (self.polarization(Wave::Signal, -ts), -ts.cos()),
            Wave::Idler => (self.polarization(Wave::Idler, ti), -ti.cos()),
        };
        let mut c = MismatchComponents { base: 0.0, per_kelvin: 0.0, per_field: 0.0 };
        c.add_wave(self.crystal, pol, omega, weight)?;
        Ok(c)
    }

    fn delta_t(&self, temperature: f64) -> f64 {
        temperature - self.crystal.reference_temperature
    }

    /// Collinear `Δk(Ω) = k_p − k_s(ω_s0+Ω) − k_i(ω_i0−Ω) − k_g` (poling at z = 0).
    pub fn collinear_mismatch(&self, omega: f64, temperature: f64, field: f64) -> Result<f64> {
        let c = self.collinear_components(omega)?;
        Ok(c.at(self.delta_t(temperature), field) - self.cfg.poling.wavenumber(0.0))
    }

    /// `(Δk_⊥, Δk_∥)` with exact wavenumbers at the detuned frequencies.
    pub fn noncollinear_mismatch(&self, omega: f64, q: f64, temperature: f64, field: f64) -> Result<(f64, f64)> {
        let (ts, ti) = (self.cfg.signal_angle(), self.cfg.idler_angle());
        let (_, ws, wi) = self.omegas;
        let parallel = self.components(omega)?.at(self.delta_t(temperature), field) - self.cfg.poling.wavenumber(0.0);
        let k_s = self.wavenumber(Wave::Signal, -ts, ws + omega, temperature, field)?;
        let k_i = self.wavenumber(Wave::Idler, ti, wi - omega, temperature, field)?;
        Ok((q + k_s * ts.sin() - k_i * ti.sin(), parallel))
    }

    /// Wavenumber of one wave travelling at `offset` from the pump direction.
    pub fn wavenumber(&self, wave: Wave, offset: f64, omega: f64, temperature: f64, field: f64) -> Result<f64> {
        let n = self.crystal.refractive_index(
            self.polarization(wave, offset),
            wavelength_um_from_omega(omega),
            temperature,
            field,
        )?;
        Ok(n * omega / SPEED_OF_LIGHT)
    }

    /// Noncollinear matcher with the given internal angles.
    pub fn with_geometry(&self, geometry: Geometry) -> Self {
        let mut cfg = self.cfg.clone();
        cfg.geometry = geometry;
        PhaseMatcher { crystal: self.crystal, cfg, omegas: self.omegas }
    }
}

/// Which physical model a mismatch evaluator realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MismatchLabel {
    /// z-independent detuning.
    Homogeneous,
    /// Uniform poling grating.
    QuasiPhaseMatched,
    /// Poling wavenumber varying along z.
    ChirpedPoling,
    /// Temperature varying along z.
    TemperatureProfile,
    /// Static field varying along z.
    FieldProfile,
}

impl MismatchLabel {
    pub fn describe(&self) -> &'static str {
        match self {
            MismatchLabel::Homogeneous => "homogeneous crystal",
            MismatchLabel::QuasiPhaseMatched => "quasi-phase-matched, uniform grating",
            MismatchLabel::ChirpedPoling => "quasi-phase-matched, chirped grating",
            MismatchLabel::TemperatureProfile => "longitudinal temperature profile",
            MismatchLabel::FieldProfile => "longitudinal field profile",
        }
    }
}

/// Anything mapping `(Ω, z)` to a mismatch in rad/m.
pub trait MismatchFn: Sync {
    fn delta_k(&self, omega: f64, z: f64) -> Result<f64>;
}

/// Closure-backed evaluator, handy for synthetic models.
pub struct FnMismatch<F>(pub F);

impl<F> MismatchFn for FnMismatch<F>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    fn delta_k(&self, omega: f64, z: f64) -> Result<f64> {
        Ok((self.0)(omega, z))
    }
}

/// A control quantity along z, with its exact running integral.
#[derive(Debug, Clone, Copy)]
enum Control<'p> {
    Affine { v0: f64, slope: f64 },
    Profile { profile: &'p LongitudinalProfile, scale: f64 },
}

impl Control<'_> {
    fn constant(v: f64) -> Self {
        Control::Affine { v0: v, slope: 0.0 }
    }

    fn value(&self, z: f64) -> f64 {
        match *self {
            Control::Affine { v0, slope } => v0 + slope * z,
            Control::Profile { profile, scale } => scale * profile.value(z),
        }
    }

    fn integral(&self, z: f64) -> f64 {
        match *self {
            Control::Affine { v0, slope } => v0 * z + 0.5 * slope * z * z,
            Control::Profile { profile, scale } => scale * profile.integral(z),
        }
    }

    fn step_boundaries(&self, length: f64) -> Option<Vec<f64>> {
        match *self {
            Control::Affine { slope: 0.0, .. } => Some(vec![0.0, length]),
            Control::Affine { .. } => None,
            Control::Profile { profile, .. } => profile.step_boundaries(),
        }
    }

    fn is_constant(&self) -> bool {
        match *self {
            Control::Affine { slope, .. } => slope == 0.0,
            Control::Profile { profile, .. } => profile.is_uniform(),
        }
    }
}

/// How the phase accumulated up to `z` is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMode {
    /// `φ(z) = ∫₀^z Δk dz′`.
    #[default]
    Accumulated,
    /// `φ(z) = Δk(z)·z`.
    LocalProduct,
}

/// `Δk(Ω, z)` for a crystal with optional longitudinal control.
#[derive(Debug, Clone)]
pub struct MismatchEvaluator<'a> {
    matcher: PhaseMatcher<'a>,
    temperature: Control<'a>,
    field: Control<'a>,
    poling: Control<'a>,
    label: MismatchLabel,
}

impl<'a> MismatchEvaluator<'a> {
    /// Uniform temperature (°C) and field (V/m).
    pub fn homogeneous(matcher: PhaseMatcher<'a>, temperature: f64, field: f64) -> Self {
        let poling = poling_control(matcher.config().poling);
        let label = match matcher.config().poling {
            Poling::None => MismatchLabel::Homogeneous,
            Poling::Uniform { .. } => MismatchLabel::QuasiPhaseMatched,
            Poling::Chirped { .. } => MismatchLabel::ChirpedPoling,
        };
        MismatchEvaluator {
            matcher,
            temperature: Control::constant(temperature),
            field: Control::constant(field),
            poling,
            label,
        }
    }

    /// The profile replaces the corresponding uniform control; the others keep
    /// `temperature` and `field`.
    pub fn with_profile(
        matcher: PhaseMatcher<'a>,
        profile: &'a LongitudinalProfile,
        temperature: f64,
        field: f64,
    ) -> Result<Self> {
        let length = matcher.config().crystal_length;
        if (profile.length() - length).abs() > 1e-12 * length {
            return Err(Error::config(format!(
                "profile length {} m differs from crystal length {} m",
                profile.length(),
                length
            )));
        }
        let mut ev = Self::homogeneous(matcher, temperature, field);
        let control = Control::Profile { profile, scale: 1.0 };
        match profile.quantity() {
            Quantity::Temperature => {
                ev.temperature = control;
                ev.label = MismatchLabel::TemperatureProfile;
            }
            Quantity::Field => {
                ev.field = control;
                ev.label = MismatchLabel::FieldProfile;
            }
            Quantity::PolingWavenumber => {
                ev.poling = Control::Profile { profile, scale: 1e6 };
                ev.label = MismatchLabel::ChirpedPoling;
            }
        }
        Ok(ev)
    }

    pub fn matcher(&self) -> &PhaseMatcher<'a> {
        &self.matcher
    }

    pub fn label(&self) -> MismatchLabel {
        self.label
    }

    pub fn length(&self) -> f64 {
        self.matcher.config().crystal_length
    }

    /// Whether `Δk` is independent of z.
    pub fn is_z_independent(&self) -> bool {
        self.temperature.is_constant() && self.field.is_constant() && self.poling.is_constant()
    }

    pub fn components(&self, omega: f64) -> Result<MismatchComponents> {
        self.matcher.components(omega)
    }

    pub fn temperature_at(&self, z: f64) -> f64 {
        self.temperature.value(z)
    }

    pub fn field_at(&self, z: f64) -> f64 {
        self.field.value(z)
    }

    pub fn poling_at(&self, z: f64) -> f64 {
        self.poling.value(z)
    }

    /// Merged section boundaries when every control is piecewise constant in z.
    pub fn step_boundaries(&self) -> Option<Vec<f64>> {
        let length = self.length();
        let mut z = Vec::new();
        for c in [&self.temperature, &self.field, &self.poling] {
            z.extend(c.step_boundaries(length)?);
        }
        z.sort_by(f64::total_cmp);
        z.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * length);
        Some(z)
    }

    /// `Δk` at `z` given the components for the current `Ω`.
    pub fn delta_k_with(&self, c: &MismatchComponents, z: f64) -> f64 {
        let t_ref = self.matcher.crystal().reference_temperature;
        c.base + c.per_kelvin * (self.temperature.value(z) - t_ref) + c.per_field * self.field.value(z)
            - self.poling.value(z)
    }

    /// Phase at `z` given the components for the current `Ω`.
    pub fn phase_with(&self, c: &MismatchComponents, z: f64, mode: PhaseMode) -> f64 {
        match mode {
            PhaseMode::LocalProduct => self.delta_k_with(c, z) * z,
            PhaseMode::Accumulated => {
                let t_ref = self.matcher.crystal().reference_temperature;
                c.base * z + c.per_kelvin * (self.temperature.integral(z) - t_ref * z)
                    + c.per_field * self.field.integral(z)
                    - self.poling.integral(z)
            }
        }
    }
}

fn poling_control<'p>(p: Poling) -> Control<'p> {
    match p {
        Poling::None => Control::constant(0.0),
        Poling::Uniform { .. } => Control::constant(p.wavenumber(0.0)),
        Poling::Chirped { kg0, chirp } => Control::Affine { v0: kg0 * 1e6, slope: chirp * 1e12 },
    }
}

impl MismatchFn for MismatchEvaluator<'_> {
    fn delta_k(&self, omega: f64, z: f64) -> Result<f64> {
        let length = self.length();
        if !(z >= -1e-12 * length && z <= length * (1.0 + 1e-12)) {
            return Err(Error::OutsideDomain { z, length });
        }
        let c = self.components(omega)?;
        Ok(self.delta_k_with(&c, z))
    }
}
