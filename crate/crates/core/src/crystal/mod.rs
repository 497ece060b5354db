//! Crystal dispersion records: Sellmeier data, thermo- and electro-optic
//! coefficients, and refractive-index evaluation for uniaxial crystals.

mod catalog;
mod derivatives;

pub use catalog::{builtin_catalog, BUILTIN_CATALOG, load_catalog, parse_catalog, serialize_catalog, validate_record, Catalog};
pub use derivatives::{wavenumber_derivatives, WavenumberDerivatives};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    UniaxialNegative,
    UniaxialPositive,
}

/// One `B·λ²/(λ² − C)` resonance term, `C` in µm².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceTerm {
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SellmeierFormId {
    Standard,
}

/// `n²(λ) = A + Σ Bᵢ·λ²/(λ² − Cᵢ) − D·λ²`, λ in µm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierForm {
    pub form_id: SellmeierFormId,
    #[serde(rename = "A")]
    pub a: f64,
    pub terms: Vec<ResonanceTerm>,
    #[serde(rename = "D", default)]
    pub d: f64,
}

impl SellmeierForm {
    pub fn n_squared(&self, wavelength_um: f64) -> f64 {
        let l2 = wavelength_um * wavelength_um;
        let resonances: f64 = self.terms.iter().map(|t| t.b * l2 / (l2 - t.c)).sum();
        self.a + resonances - self.d * l2
    }

    pub fn index(&self, wavelength_um: f64) -> f64 {
        self.n_squared(wavelength_um).sqrt()
    }
}

/// Thermo-optic coefficient dn/dT in 1/K; tables hold `(wavelength µm, η)`
/// pairs interpolated linearly and held constant beyond the end points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermoOptic {
    Constant(f64),
    Table(Vec<(f64, f64)>),
}

impl ThermoOptic {
    pub fn at(&self, wavelength_um: f64) -> f64 {
        match self {
            ThermoOptic::Constant(eta) => *eta,
            ThermoOptic::Table(rows) => crate::interp::linear_clamped(rows, wavelength_um),
        }
    }
}

/// Polarization of a wave relative to the optic axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Polarization {
    Ordinary,
    /// `theta` is the angle (rad) between propagation and the optic axis.
    Extraordinary { theta: f64 },
}

impl Polarization {
    /// Extraordinary wave at an arbitrary propagation angle, folded into [0, π/2].
    pub fn extraordinary_folded(theta: f64) -> Self {
        let mut t = theta.abs() % std::f64::consts::PI;
        if t > std::f64::consts::FRAC_PI_2 {
            t = std::f64::consts::PI - t;
        }
        Polarization::Extraordinary { theta: t }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalRecord {
    pub name: String,
    pub symmetry: Symmetry,
    pub sellmeier_o: SellmeierForm,
    pub sellmeier_e: SellmeierForm,
    pub thermo_optic_o: ThermoOptic,
    pub thermo_optic_e: ThermoOptic,
    /// dn/dE in m/V.
    #[serde(default)]
    pub electro_optic_o: f64,
    #[serde(default)]
    pub electro_optic_e: f64,
    /// `[λ_min, λ_max]` in µm.
    pub transparency: [f64; 2],
    /// °C at which the Sellmeier base values hold.
    pub reference_temperature: f64,
}

/// Linear decomposition `n = base + thermo·(T − T_ref) + electro·E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexComponents {
    pub base: f64,
    /// 1/K
    pub thermo: f64,
    /// m/V
    pub electro: f64,
}

impl IndexComponents {
    pub fn at(&self, delta_t: f64, field: f64) -> f64 {
        self.base + self.thermo * delta_t + self.electro * field
    }
}

impl CrystalRecord {
    pub fn check_transparency(&self, wavelength_um: f64) -> Result<()> {
        let [min, max] = self.transparency;
        if wavelength_um.is_finite() && wavelength_um >= min && wavelength_um <= max {
            Ok(())
        } else {
            Err(Error::OutsideTransparency {
                wavelength_um,
                min,
                max,
            })
        }
    }

    /// Index components for a polarization. For an extraordinary wave the base
    /// index combines the axes with the uniaxial angle formula and the
    /// coefficients are the exact linearization of that formula at the base
    /// indices, so the result stays linear in temperature and field.
    pub fn index_components(&self, pol: Polarization, wavelength_um: f64) -> Result<IndexComponents> {
        self.check_transparency(wavelength_um)?;
        let n_o = self.sellmeier_o.index(wavelength_um);
        let eta_o = self.thermo_optic_o.at(wavelength_um);
        match pol {
            Polarization::Ordinary => Ok(IndexComponents {
                base: n_o,
                thermo: eta_o,
                electro: self.electro_optic_o,
            }),
            Polarization::Extraordinary { theta } => {
                let n_e = self.sellmeier_e.index(wavelength_um);
                let eta_e = self.thermo_optic_e.at(wavelength_um);
                let n = extraordinary_index_at_angle(n_o, n_e, theta);
                let (s, c) = theta.sin_cos();
                let n3 = n * n * n;
                let d_no = n3 * c * c / (n_o * n_o * n_o);
                let d_ne = n3 * s * s / (n_e * n_e * n_e);
                Ok(IndexComponents {
                    base: n,
                    thermo: d_no * eta_o + d_ne * eta_e,
                    electro: d_no * self.electro_optic_o + d_ne * self.electro_optic_e,
                })
            }
        }
    }

    /// Refractive index at wavelength (µm), temperature (°C) and static field (V/m).
    pub fn refractive_index(
        &self,
        pol: Polarization,
        wavelength_um: f64,
        temperature: f64,
        field: f64,
    ) -> Result<f64> {
        let comp = self.index_components(pol, wavelength_um)?;
        Ok(comp.at(temperature - self.reference_temperature, field))
    }

    /// Thermo-optic coefficient of the given wave (1/K).
    pub fn thermo_optic(&self, pol: Polarization, wavelength_um: f64) -> Result<f64> {
        Ok(self.index_components(pol, wavelength_um)?.thermo)
    }
}

/// Index of an extraordinary wave travelling at `theta` to the optic axis:
/// `1/n² = cos²θ/n_o² + sin²θ/n_e²`.
pub fn extraordinary_index_at_angle(n_o: f64, n_e: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    (c * c / (n_o * n_o) + s * s / (n_e * n_e)).sqrt().recip()
}


#[cfg(test)]
mod tests {
    use super::test_records::*;
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn angle_formula_limits() {
        assert_relative_eq!(extraordinary_index_at_angle(1.5, 1.4, 0.0), 1.5, epsilon = 1e-15);
        assert_relative_eq!(
            extraordinary_index_at_angle(1.5, 1.4, std::f64::consts::FRAC_PI_2),
            1.4,
            epsilon = 1e-15
        );
    }

    #[test]
    fn angle_formula_at_45_degrees() {
        // 1/n² = 0.5/2.25 + 0.5/1.96
        let oracle = (0.5f64 / 2.25 + 0.5 / 1.96).powf(-0.5);
        let n = extraordinary_index_at_angle(1.5, 1.4, std::f64::consts::FRAC_PI_4);
        assert_relative_eq!(n, oracle, epsilon = 1e-14);
        assert!((n - 1.4474).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn isotropic_angle_formula(n in 1.01f64..3.0, theta in 0.0f64..std::f64::consts::FRAC_PI_2) {
            prop_assert!((extraordinary_index_at_angle(n, n, theta) - n).abs() < 1e-13);
        }

        #[test]
        fn angle_formula_monotone(theta1 in 0.0f64..1.57, dtheta in 0.0f64..0.5) {
            let theta2 = (theta1 + dtheta).min(std::f64::consts::FRAC_PI_2);
            let a = extraordinary_index_at_angle(1.5, 1.4, theta1);
            let b = extraordinary_index_at_angle(1.5, 1.4, theta2);
            prop_assert!(b <= a + 1e-15);
            prop_assert!(a <= 1.5 + 1e-15 && b >= 1.4 - 1e-15);
        }

        #[test]
        fn index_linear_in_temperature(delta in -80.0f64..80.0, theta in 0.0f64..1.5) {
            let kdp = kdp();
            let pol = Polarization::Extraordinary { theta };
            let t0 = kdp.reference_temperature;
            let n0 = kdp.refractive_index(pol, 0.5, t0, 0.0).unwrap();
            let n1 = kdp.refractive_index(pol, 0.5, t0 + delta, 0.0).unwrap();
            let n2 = kdp.refractive_index(pol, 0.5, t0 + 2.0 * delta, 0.0).unwrap();
            prop_assert!(((n2 - n1) - (n1 - n0)).abs() < 1e-15);
        }
    }

    #[test]
    fn reference_temperature_gives_pure_sellmeier() {
        let kdp = kdp();
        let n = kdp
            .refractive_index(Polarization::Ordinary, 0.7022, kdp.reference_temperature, 0.0)
            .unwrap();
        assert_eq!(n, kdp.sellmeier_o.index(0.7022));
    }

    #[test]
    fn kdp_ordinary_heated_matches_hand_evaluation() {
        let kdp = kdp();
        let l: f64 = 0.7022;
        let l2 = l * l;
        // Original Zernike-form coefficients.
        let n_base = (2.259276 + 0.01008956 / (l2 - 0.012942625) + 13.00522 * l2 / (l2 - 400.0)).sqrt();
        let eta = kdp.thermo_optic_o.at(l);
        let t = kdp.reference_temperature + 100.0;
        let n = kdp.refractive_index(Polarization::Ordinary, l, t, 0.0).unwrap();
        assert_relative_eq!(n, n_base + eta * 100.0, max_relative = 1e-9);
    }

    #[test]
    fn out_of_range_wavelength_is_rejected() {
        let kdp = kdp();
        let err = kdp.refractive_index(Polarization::Ordinary, 2.5, 25.0, 0.0);
        assert!(matches!(err, Err(Error::OutsideTransparency { .. })));
    }

    #[test]
    fn thermo_table_interpolates_and_clamps() {
        let t = ThermoOptic::Table(vec![(0.4, 1.0), (0.8, 3.0)]);
        assert!((t.at(0.6) - 2.0).abs() < 1e-12);
        assert_eq!(t.at(0.1), 1.0);
        assert_eq!(t.at(2.0), 3.0);
    }

    #[test]
    fn folded_extraordinary_angle() {
        let p = Polarization::extraordinary_folded(-0.3);
        assert_eq!(p, Polarization::Extraordinary { theta: 0.3 });
        let p = Polarization::extraordinary_folded(std::f64::consts::PI - 0.2);
        match p {
            Polarization::Extraordinary { theta } => assert!((theta - 0.2).abs() < 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn flat_record_is_dispersionless() {
        let r = flat(1.5);
        for l in [0.3, 0.7, 2.0] {
            assert_eq!(r.refractive_index(Polarization::Ordinary, l, 20.0, 0.0).unwrap(), 1.5);
        }
    }
}
