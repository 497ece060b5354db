use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_matching::solve::DEFAULT_TOL_K;
use crate::phase_matching::{discover_bracket, solve_matched_frequency, width_limits, MismatchEvaluator, MismatchFn};

/// Outcome of the end-root width estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootStatus {
    Ok,
    NoRootAtStart,
    NoRootAtEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootWidthEstimate {
    pub status: RootStatus,
    /// `Ω̃` at z = 0 and z = L, rad/s.
    pub start_root: Option<f64>,
    pub end_root: Option<f64>,
    /// `|Ω̃(0) − Ω̃(L)|`, rad/s.
    pub width: Option<f64>,
    /// Roots of a degenerate config come in ± pairs; the positive one is used.
    pub positive_branch: bool,
    /// Width of the symmetric spectrum spanned by both branches.
    pub two_sided_width: Option<f64>,
}

/// Matched frequency at one end. A degenerate mismatch that touches zero at
/// `Ω = 0` (to ten times the solver tolerance) has its double root there.
fn end_root(ev: &MismatchEvaluator<'_>, z: f64, degenerate: bool) -> Result<Option<f64>> {
    let f0 = ev.delta_k(0.0, z)?;
    if f0.abs() <= 10.0 * DEFAULT_TOL_K {
        return Ok(Some(0.0));
    }
    let span = ev.matcher().transparency_span();
    let seed = 1e-4 * ev.matcher().omegas().1;
    let span = if degenerate { (0.0, span.1) } else { span };
    match discover_bracket(ev, z, seed, span)? {
        Some(b) => solve_matched_frequency(ev, z, b).map(Some),
        None => Ok(None),
    }
}

/// Width estimated from the matched frequencies at the two crystal ends.
pub fn estimate_width_by_roots(ev: &MismatchEvaluator<'_>) -> Result<RootWidthEstimate> {
    let degenerate = ev.matcher().config().degenerate
        && ev.matcher().polarization(crate::phase_matching::Wave::Signal, 0.0)
            == ev.matcher().polarization(crate::phase_matching::Wave::Idler, 0.0);
    let a = end_root(ev, 0.0, degenerate)?;
    let b = end_root(ev, ev.length(), degenerate)?;
    let status = match (a, b) {
        (None, _) => RootStatus::NoRootAtStart,
        (_, None) => RootStatus::NoRootAtEnd,
        _ => RootStatus::Ok,
    };
    let width = match (a, b) {
        (Some(x), Some(y)) => Some((x - y).abs()),
        _ => None,
    };
    let two_sided_width = match (a, b) {
        (Some(x), Some(y)) if degenerate => Some(2.0 * x.abs().max(y.abs())),
        _ => width,
    };
    Ok(RootWidthEstimate { status, start_root: a, end_root: b, width, positive_branch: degenerate, two_sided_width })
}

/// Grid half-span: three times the largest of the end-root estimate and the
/// analytic limits, clamped to the transparency window.
pub fn estimate_half_span(ev: &MismatchEvaluator<'_>, temperature: f64, field: f64) -> Result<f64> {
    let mut widest: f64 = 0.0;
    if let Ok(est) = estimate_width_by_roots(ev) {
        for v in [est.two_sided_width.map(|w| 0.5 * w), est.start_root, est.end_root].into_iter().flatten() {
            widest = widest.max(v.abs());
        }
        if let Some(w) = est.width {
            widest = widest.max(w);
        }
    }
    if let Ok(limits) = width_limits(ev.matcher(), temperature, field) {
        if let Some(w) = limits.largest_finite() {
            widest = widest.max(w);
        }
    }
    let (lo, hi) = ev.matcher().transparency_span();
    let cap = hi.min(-lo);
    if !(widest > 0.0) {
        return Err(Error::Degenerate("no finite width estimate for the grid span".into()));
    }
    Ok((3.0 * widest).min(cap))
}
