//! Spectral engineering of biphoton fields from spontaneous parametric
//! down-conversion: crystal dispersion, phase matching, longitudinal control
//! profiles, spectral amplitudes, correlation functions and inverse design.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod correlation;
pub mod crystal;
pub mod design;
pub mod error;
pub mod interp;
pub mod io;
pub mod phase_matching;
pub mod profile;
pub mod spectral;
pub mod units;

pub use crystal::{Catalog, CrystalRecord, Polarization, SellmeierForm};
pub use error::{Error, Result};
pub use phase_matching::{MatchingConfig, MatchingType};
pub use profile::{LongitudinalProfile, Quantity};
pub use spectral::{FrequencyGrid, SpectralAmplitude};
