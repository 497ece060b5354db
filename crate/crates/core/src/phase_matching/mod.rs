//! Phase mismatch for collinear, noncollinear and quasi-phase-matched
//! geometries, matching solvers and analytic bandwidth estimates.

pub mod config;
pub mod mismatch;
pub mod solve;
pub mod taylor;

pub use config::{Geometry, MatchingConfig, MatchingType, Poling, Wave};
pub use mismatch::{
    FnMismatch, MismatchComponents, MismatchEvaluator, MismatchFn, MismatchLabel, PhaseMatcher, PhaseMode,
};
pub use solve::{
    discover_bracket, find_root, solve_matched_frequency, solve_poling_period, solve_pump_axis_angle,
    solve_pump_axis_angle_at,
};
pub use taylor::{
    broadband_conditions_report, noncollinear_series, pump_bandwidth_roots, taylor_coefficients,
    tilted_front_modified, width_limits, AnalyticWidths, BroadbandReport, ConditionTolerances, TaylorCoefficients,
    WidthValue,
};
