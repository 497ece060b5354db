use serde::Serialize;

use super::{CrystalRecord, Polarization};
use crate::error::Result;
use crate::units::{wavelength_um_from_omega, SPEED_OF_LIGHT};

/// Relative step in ω for the difference stencils.
pub const RELATIVE_STEP: f64 = 1e-3;

/// Wavenumber and its first two ω-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavenumberDerivatives {
    /// rad/m
    pub k: f64,
    /// s/m
    pub k1: f64,
    /// s²/m
    pub k2: f64,
    /// Richardson error estimates for `k1` and `k2`.
    pub k1_error: f64,
    pub k2_error: f64,
}

/// `k = n(ω)·ω/c` with `k′ = (n + ω n′)/c` and `k″ = (2n′ + ω n″)/c`, where
/// `n′` and `n″` come from central differences of `n(ω)` refined once by
/// Richardson extrapolation.
pub fn wavenumber_derivatives(
    crystal: &CrystalRecord,
    pol: Polarization,
    omega: f64,
    temperature: f64,
    field: f64,
) -> Result<WavenumberDerivatives> {
    let index = |w: f64| crystal.refractive_index(pol, wavelength_um_from_omega(w), temperature, field);
    let h = RELATIVE_STEP * omega;
    let n0 = index(omega)?;
    let (np1, nm1) = (index(omega + h)?, index(omega - h)?);
    let (np2, nm2) = (index(omega + 0.5 * h)?, index(omega - 0.5 * h)?);

    let d1_coarse = (np1 - nm1) / (2.0 * h);
    let d1_fine = (np2 - nm2) / h;
    let n1 = (4.0 * d1_fine - d1_coarse) / 3.0;

    let d2_coarse = (np1 - 2.0 * n0 + nm1) / (h * h);
    let d2_fine = (np2 - 2.0 * n0 + nm2) / (0.25 * h * h);
    let n2 = (4.0 * d2_fine - d2_coarse) / 3.0;

    let c = SPEED_OF_LIGHT;
    Ok(WavenumberDerivatives {
        k: n0 * omega / c,
        k1: (n0 + omega * n1) / c,
        k2: (2.0 * n1 + omega * n2) / c,
        k1_error: omega * (n1 - d1_fine).abs() / c,
        k2_error: (2.0 * (n1 - d1_fine).abs() + omega * (n2 - d2_fine).abs()) / c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crystal::test_records::{flat, kdp};
    use crate::units::omega_from_wavelength_um;
    use approx::assert_relative_eq;

    #[test]
    fn dispersionless_medium() {
        let r = flat(1.7);
        let w = omega_from_wavelength_um(0.8);
        let d = wavenumber_derivatives(&r, Polarization::Ordinary, w, 20.0, 0.0).unwrap();
        assert_relative_eq!(d.k1, 1.7 / SPEED_OF_LIGHT, max_relative = 1e-10);
        assert!(d.k2.abs() <= 1e-10 * d.k1 / w);
    }

    #[test]
    fn kdp_wavenumber_matches_formula() {
        let r = kdp();
        let t = 24.0;
        let w = omega_from_wavelength_um(0.7022);
        let d = wavenumber_derivatives(&r, Polarization::Ordinary, w, t, 0.0).unwrap();
        let n = r.refractive_index(Polarization::Ordinary, 0.7022, t, 0.0).unwrap();
        assert_relative_eq!(d.k, n * w / SPEED_OF_LIGHT, max_relative = 1e-9);
    }

    #[test]
    fn kdp_normal_dispersion_sign() {
        // Oracle: second difference of k on a dense wavelength grid.
        let r = kdp();
        let k_of = |w: f64| {
            r.refractive_index(Polarization::Ordinary, wavelength_um_from_omega(w), 24.0, 0.0).unwrap() * w
                / SPEED_OF_LIGHT
        };
        let w0 = omega_from_wavelength_um(0.7022);
        for i in -5..=5 {
            let w = w0 * (1.0 + 0.01 * i as f64);
            let h = 1e-2 * w;
            assert!(k_of(w + h) - 2.0 * k_of(w) + k_of(w - h) > 0.0);
        }
        let d = wavenumber_derivatives(&r, Polarization::Ordinary, w0, 24.0, 0.0).unwrap();
        assert!(d.k2 > 0.0);
    }

    #[test]
    fn central_difference_consistency_over_two_decades() {
        let r = kdp();
        let pol = Polarization::Extraordinary { theta: 0.87 };
        let w = omega_from_wavelength_um(0.3511);
        let d = wavenumber_derivatives(&r, pol, w, 24.0, 0.0).unwrap();
        let k_of = |w: f64| {
            r.refractive_index(pol, wavelength_um_from_omega(w), 24.0, 0.0).unwrap() * w / SPEED_OF_LIGHT
        };
        for rel in [1e-6, 1e-5, 1e-4] {
            let h = rel * w;
            let naive = (k_of(w + h) - k_of(w - h)) / (2.0 * h);
            // Reported error plus the naive stencil's own truncation and rounding.
            let slack = d.k1_error + 1e-7 * d.k1.abs();
            assert!((naive - d.k1).abs() <= slack, "h = {rel}: {naive} vs {}", d.k1);
        }
    }

    #[test]
    fn stencil_outside_transparency_is_an_error() {
        let r = kdp();
        let w = omega_from_wavelength_um(1.5);
        assert!(wavenumber_derivatives(&r, Polarization::Ordinary, w, 24.0, 0.0).is_err());
    }
}
