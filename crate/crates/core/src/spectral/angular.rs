use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_matching::{find_root, Geometry, PhaseMatcher};

use super::amplitude::sinc;

/// Nodes of the Gaussian pump angular envelope, spanning ±3 widths.
const PUMP_NODES: usize = 33;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularSpectrum {
    /// Internal signal angles, rad.
    pub theta_s: Vec<f64>,
    pub intensity: Vec<f64>,
    /// Samples where no idler direction cancels the transverse mismatch.
    pub no_root: Vec<bool>,
}

/// Intensity versus signal angle at fixed detuning `omega`. For each angle
/// the idler angle is solved from `Δk_⊥ = 0` and the intensity is
/// `sinc²(Δk_∥·L/2)`, averaged over a Gaussian pump angular distribution of
/// width `pump_angular_width` (rad/m) when it is positive.
pub fn angular_spectrum(
    m: &PhaseMatcher<'_>,
    omega: f64,
    theta_s: &[f64],
    pump_angular_width: f64,
    temperature: f64,
    field: f64,
) -> Result<AngularSpectrum> {
    if !(pump_angular_width >= 0.0) {
        return Err(Error::config("pump angular width must be non-negative"));
    }
    let nodes: Vec<(f64, f64)> = if pump_angular_width == 0.0 {
        vec![(0.0, 1.0)]
    } else {
        (0..PUMP_NODES)
            .map(|j| {
                let u = -3.0 + 6.0 * j as f64 / (PUMP_NODES - 1) as f64;
                (u * pump_angular_width, (-u * u).exp())
            })
            .collect()
    };
    let total: f64 = nodes.iter().map(|n| n.1).sum();
    let length = m.config().crystal_length;

    let rows = theta_s
        .par_iter()
        .map(|&ts| {
            let mut acc = 0.0;
            let mut missed = false;
            for &(q, w) in &nodes {
                let at = |ti: f64| m.with_geometry(Geometry::Noncollinear { signal_angle: ts, idler_angle: ti });
                let perp = |ti: f64| at(ti).noncollinear_mismatch(omega, q, temperature, field).map(|r| r.0);
                match find_root(perp, -1.2, 1.2, 1e-6, "idler angle") {
                    Ok(ti) => {
                        let par = at(ti).noncollinear_mismatch(omega, q, temperature, field)?.1;
                        acc += w * sinc(0.5 * par * length).powi(2);
                    }
                    Err(Error::NoRoot { .. }) | Err(Error::NoConvergence { .. }) => missed = true,
                    Err(e) => return Err(e),
                }
            }
            Ok((acc / total, missed))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AngularSpectrum {
        theta_s: theta_s.to_vec(),
        intensity: rows.iter().map(|r| r.0).collect(),
        no_root: rows.iter().map(|r| r.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crystal::test_records::kdp;
    use crate::phase_matching::{solve_pump_axis_angle, MatchingConfig, MatchingType};
    use crate::spectral::metrics::width_metrics_uniform;

    fn detuned(r: &crate::CrystalRecord, length: f64) -> PhaseMatcher<'_> {
        let mut cfg = MatchingConfig::degenerate("KDP", 0.3511, MatchingType::TypeI, 0.0, length);
        // a slightly larger cut angle opens a cone of noncollinear matching
        cfg.pump_axis_angle = solve_pump_axis_angle(r, &cfg).unwrap() + 0.3f64.to_radians();
        PhaseMatcher::new(r, cfg).unwrap()
    }

    #[test]
    fn ordinary_pair_is_even_in_signal_angle() {
        let r = kdp();
        let m = detuned(&r, 0.02);
        let thetas: Vec<f64> = (0..41).map(|j| -0.06 + 0.003 * j as f64).collect();
        let a = angular_spectrum(&m, 0.0, &thetas, 0.0, r.reference_temperature, 0.0).unwrap();
        for j in 0..thetas.len() {
            assert!((a.intensity[j] - a.intensity[thetas.len() - 1 - j]).abs() < 1e-9);
        }
        assert!(a.no_root.iter().all(|&x| !x));
    }

    #[test]
    fn angular_width_scales_inversely_with_length() {
        let r = kdp();
        let width = |length: f64| {
            let m = detuned(&r, length);
            let n = 2001;
            let (lo, hi) = (0.0, 0.06);
            let thetas: Vec<f64> = (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect();
            let a = angular_spectrum(&m, 0.0, &thetas, 0.0, r.reference_temperature, 0.0).unwrap();
            width_metrics_uniform(&a.intensity, lo, (hi - lo) / (n - 1) as f64, 0.05, None).unwrap().fwhm.rad_per_s
        };
        let ratio = width(0.01) / width(0.02);
        assert!((ratio - 2.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn pump_divergence_broadens() {
        let r = kdp();
        let m = detuned(&r, 0.02);
        let n = 801;
        let thetas: Vec<f64> = (0..n).map(|j| 0.06 * j as f64 / (n - 1) as f64).collect();
        let w = |dq: f64| {
            let a = angular_spectrum(&m, 0.0, &thetas, dq, r.reference_temperature, 0.0).unwrap();
            width_metrics_uniform(&a.intensity, 0.0, 0.06 / (n - 1) as f64, 0.05, None).unwrap().fwhm.rad_per_s
        };
        assert!(w(2e4) > w(0.0));
    }
}
