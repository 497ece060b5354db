//! Physical constants and unit conversions used at module boundaries.

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Angular frequency (rad/s) of light with vacuum wavelength `wavelength_um` (µm).
pub fn omega_from_wavelength_um(wavelength_um: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (wavelength_um * 1e-6)
}

/// Vacuum wavelength in µm of light with angular frequency `omega` (rad/s).
pub fn wavelength_um_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega * 1e6
}

/// Angular frequency detuning (rad/s) to ordinary frequency in THz.
pub fn rad_per_s_to_thz(omega: f64) -> f64 {
    omega / (2.0 * PI) * 1e-12
}

pub fn thz_to_rad_per_s(thz: f64) -> f64 {
    thz * 1e12 * 2.0 * PI
}

/// Width in nm corresponding to a frequency width `delta_omega` around `center_um`.
pub fn omega_width_to_nm(delta_omega: f64, center_um: f64) -> f64 {
    let lambda = center_um * 1e-6;
    lambda * lambda * delta_omega / (2.0 * PI * SPEED_OF_LIGHT) * 1e9
}

pub fn kv_per_cm_to_v_per_m(kv_per_cm: f64) -> f64 {
    kv_per_cm * 1e5
}

pub fn v_per_m_to_kv_per_cm(v_per_m: f64) -> f64 {
    v_per_m * 1e-5
}
