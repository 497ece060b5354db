//! Biphoton spectral amplitudes, joint spectra, angular spectra and width metrics.

pub mod amplitude;
pub mod angular;
pub mod estimate;
pub mod grid;
pub mod jsa;
pub mod metrics;

pub use amplitude::{
    amplitude_homogeneous, amplitude_inhomogeneous, homogeneous_factor, sinc, ConvergenceReport, Provenance,
    QuadratureSpec, SpectralAmplitude,
};
pub use angular::{angular_spectrum, AngularSpectrum};
pub use estimate::{estimate_half_span, estimate_width_by_roots, RootStatus, RootWidthEstimate};
pub use grid::{FrequencyGrid, MIN_POINTS as MIN_GRID_POINTS};
pub use jsa::{fedorov_ratio, fedorov_ratio_at, joint_spectral_amplitude, JointSpectralAmplitude, PumpEnvelope};
pub use metrics::{
    absolute_area, integral_intensity, outermost_crossings, peak_count, spectral_intensity, trapezoid, width_metrics,
    width_metrics_uniform, Width, WidthReport, DEFAULT_THRESHOLD, PEAK_PROMINENCE,
};
