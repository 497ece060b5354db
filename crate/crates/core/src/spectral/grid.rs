use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 129;

/// Uniform detuning grid `Ω_j = −Ω_max + j·dΩ`, odd so that `Ω = 0` is a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    /// rad/s
    half_span: f64,
    n_points: usize,
}

impl FrequencyGrid {
    pub fn new(half_span: f64, n_points: usize) -> Result<Self> {
        if !(half_span.is_finite() && half_span > 0.0) {
            return Err(Error::config("grid half-span must be positive"));
        }
        if n_points < MIN_POINTS || n_points.is_multiple_of(2) {
            return Err(Error::config(format!("grid needs an odd number of points >= {MIN_POINTS}, got {n_points}")));
        }
        Ok(FrequencyGrid { half_span, n_points })
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

    pub fn omega(&self, j: usize) -> f64 {
        let c = self.center_index() as isize;
        (j as isize - c) as f64 * self.spacing()
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.omega(j)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_symmetric_with_zero_sample() {
        let g = FrequencyGrid::new(1e14, 129).unwrap();
        assert_eq!(g.omega(g.center_index()), 0.0);
        assert_eq!(g.omega(0), -g.omega(128));
        assert!((g.omega(128) - 1e14).abs() < 1e-2);
        assert!((g.spacing() - 2e14 / 128.0).abs() < 1e-3);
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(FrequencyGrid::new(1e14, 128).is_err());
        assert!(FrequencyGrid::new(1e14, 127).is_err());
        assert!(FrequencyGrid::new(0.0, 129).is_err());
    }
}
