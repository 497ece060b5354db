use super::{LongitudinalProfile, ProfileKind, Quantity};
use crate::error::{Error, Result};

/// Sectioned heater under a rod-shaped crystal.
///
/// Steady state of `−κ·T″ = p(z) − h·(T − T_cold)` with `T(0) = T_cold` at the
/// cooled end and zero flux at the far end. `κ` (`rod_conductance`) is in W·m/K,
/// `h` (`ambient_loss_coefficient`) in W/(K·m), and each section's power is
/// spread uniformly over its length.
#[derive(Debug, Clone, PartialEq)]
pub struct HeaterSpec {
    pub n_sections: usize,
    /// m
    pub section_length: f64,
    /// W per section
    pub section_powers: Vec<f64>,
    pub rod_conductance: f64,
    /// °C
    pub cold_end_temperature: f64,
    pub ambient_loss_coefficient: f64,
}

impl HeaterSpec {
    pub fn length(&self) -> f64 {
        self.n_sections as f64 * self.section_length
    }

    fn validate(&self) -> Result<()> {
        if self.n_sections == 0 {
            return Err(Error::config("heater needs at least one section"));
        }
        if self.section_powers.len() != self.n_sections {
            return Err(Error::config(format!(
                "heater has {} sections but {} powers",
                self.n_sections,
                self.section_powers.len()
            )));
        }
        if self.section_powers.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::config("heater powers must be finite and non-negative"));
        }
        if !(self.rod_conductance.is_finite() && self.rod_conductance > 0.0) {
            return Err(Error::config("rod conductance must be positive"));
        }
        if !(self.section_length.is_finite() && self.section_length > 0.0) {
            return Err(Error::config("section length must be positive"));
        }
        if !(self.ambient_loss_coefficient.is_finite() && self.ambient_loss_coefficient >= 0.0) {
            return Err(Error::config("ambient loss coefficient must be non-negative"));
        }
        Ok(())
    }

    /// Source power per unit length integrated over `[a, b]`.
    fn power_between(&self, a: f64, b: f64) -> f64 {
        let s = self.section_length;
        self.section_powers
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let (lo, hi) = (i as f64 * s, (i + 1) as f64 * s);
                let overlap = (b.min(hi) - a.max(lo)).max(0.0);
                p / s * overlap
            })
            .sum()
    }
}

/// Finite-volume solve of the heater model on `grid_points` nodes.
pub fn steady_state_temperature(spec: &HeaterSpec, grid_points: usize) -> Result<LongitudinalProfile> {
    spec.validate()?;
    if grid_points < 8 {
        return Err(Error::config(format!("heater grid needs at least 8 points, got {grid_points}")));
    }
    let length = spec.length();
    let m = grid_points;
    let dz = length / (m - 1) as f64;
    let kappa = spec.rod_conductance;
    let loss = spec.ambient_loss_coefficient;

    // Unknowns are the rises above the cold end at nodes 1..m-1.
    let n = m - 1;
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for row in 0..n {
        let j = row + 1;
        let z = j as f64 * dz;
        if j < m - 1 {
            let width = dz;
            lower[row] = -kappa / dz;
            diag[row] = 2.0 * kappa / dz + loss * width;
            upper[row] = -kappa / dz;
            rhs[row] = spec.power_between(z - 0.5 * dz, z + 0.5 * dz);
        } else {
            let width = 0.5 * dz;
            lower[row] = -kappa / dz;
            diag[row] = kappa / dz + loss * width;
            rhs[row] = spec.power_between(z - 0.5 * dz, z);
        }
    }
    let rise = solve_tridiagonal(&lower, &diag, &upper, &rhs)
        .ok_or_else(|| Error::config("heater system is singular"))?;

    let t0 = spec.cold_end_temperature;
    let mut points = Vec::with_capacity(m);
    points.push((0.0, t0));
    for (row, r) in rise.iter().enumerate() {
        let z = if row + 1 == m - 1 { length } else { (row + 1) as f64 * dz };
        points.push((z, t0 + r));
    }
    LongitudinalProfile::new(Quantity::Temperature, ProfileKind::Tabulated(points), length)
}

/// Thomas algorithm; `None` on a vanishing pivot.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot.abs() < f64::MIN_POSITIVE {
        return None;
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot.abs() < f64::MIN_POSITIVE || !pivot.is_finite() {
            return None;
        }
        c[i] = upper[i] / pivot;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Some(x)
}
