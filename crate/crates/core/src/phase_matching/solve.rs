use std::f64::consts::{FRAC_PI_2, PI};

use crate::crystal::CrystalRecord;
use crate::error::{Error, Result};

use super::config::{MatchingConfig, Poling};
use super::mismatch::{MismatchFn, PhaseMatcher};

/// Residual tolerance on `Δk`, rad/m.
pub const DEFAULT_TOL_K: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 200;
/// Sign-scan resolution for the bracket fallback.
pub const SCAN_POINTS: usize = 2048;

/// Bracketed root of `f` on `[lo, hi]`: false position with the Illinois
/// modification, falling back to bisection whenever the bracket fails to halve.
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, tol_f: f64, context: &str) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa.abs() < tol_f {
        return Ok(a);
    }
    if fb.abs() < tol_f {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoRoot { lo: a, hi: b, context: context.to_string() });
    }
    let mut side = 0i8;
    let mut width = b - a;
    let (mut best_x, mut best_f) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for iter in 0..MAX_ITERATIONS {
        let mut x = (a * fb - b * fa) / (fb - fa);
        // every third step must at least halve the bracket
        if !(x > a && x < b) || (iter % 3 == 2 && b - a > 0.5 * width) {
            x = 0.5 * (a + b);
        }
        if iter % 3 == 2 {
            width = b - a;
        }
        let fx = f(x)?;
        if fx.abs() < best_f.abs() {
            best_x = x;
            best_f = fx;
        }
        if fx.abs() < tol_f {
            return Ok(x);
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS, best_x, residual: best_f })
}

/// Cut angle giving `Δk(0) = 0` at the reference temperature and zero field.
pub fn solve_pump_axis_angle(crystal: &CrystalRecord, cfg: &MatchingConfig) -> Result<f64> {
    solve_pump_axis_angle_at(crystal, cfg, crystal.reference_temperature, 0.0)
}

/// Cut angle giving `Δk(0) = 0` at the given temperature (°C) and field (V/m).
pub fn solve_pump_axis_angle_at(crystal: &CrystalRecord, cfg: &MatchingConfig, temperature: f64, field: f64) -> Result<f64> {
    if cfg.poling != Poling::None {
        return Err(Error::config("angle tuning is solved for unpoled crystals only"));
    }
    let matcher = PhaseMatcher::new(crystal, cfg.clone())?;
    let f = |theta: f64| matcher.with_angle(theta).collinear_mismatch(0.0, temperature, field);
    let context = format!("pump axis angle for {}", crystal.name);
    let (lo, hi) = scan_bracket(&f, 0.0, FRAC_PI_2, 64)?
        .ok_or_else(|| Error::NoRoot { lo: 0.0, hi: FRAC_PI_2, context: context.clone() })?;
    find_root(f, lo, hi, DEFAULT_TOL_K, &context)
}

/// First-order grating period (µm) cancelling `k_p − k_s0 − k_i0`.
pub fn solve_poling_period(crystal: &CrystalRecord, cfg: &MatchingConfig, temperature: f64, field: f64) -> Result<f64> {
    let matcher = PhaseMatcher::new(crystal, cfg.clone())?.with_poling(Poling::None);
    let residual = matcher.collinear_mismatch(0.0, temperature, field)?;
    let k_p = matcher.omegas().0 * crystal.sellmeier_o.index(cfg.pump_wavelength_um) / crate::units::SPEED_OF_LIGHT;
    if !(residual > 1e-9 * k_p) {
        return Err(Error::NonPositiveMismatch(residual));
    }
    Ok(2.0 * PI / residual * 1e6)
}

/// `Ω̃(z)` with `Δk(Ω̃, z) = 0` inside a sign-changing bracket.
pub fn solve_matched_frequency(ev: &dyn MismatchFn, z: f64, bracket: (f64, f64)) -> Result<f64> {
    find_root(|w| ev.delta_k(w, z), bracket.0, bracket.1, DEFAULT_TOL_K, "matched frequency")
}

/// Bracket for a root of `Δk(·, z)`. Expands geometrically from `seed` on both
/// sides of zero (positive side first), then falls back to a dense sign scan
/// over `span`. Returns `None` when no sign change exists.
pub fn discover_bracket(ev: &dyn MismatchFn, z: f64, seed: f64, span: (f64, f64)) -> Result<Option<(f64, f64)>> {
    let f0 = ev.delta_k(0.0, z)?;
    let seed = seed.abs().max(1.0);
    for &dir in &[1.0, -1.0] {
        let limit = if dir > 0.0 { span.1 } else { -span.0 };
        let mut prev = 0.0;
        let mut x = seed.min(limit);
        while x > 0.0 {
            let fx = ev.delta_k(dir * x, z)?;
            if fx.signum() != f0.signum() {
                let (p, q) = (dir * prev, dir * x);
                return Ok(Some((p.min(q), p.max(q))));
            }
            if x >= limit {
                break;
            }
            prev = x;
            x = (2.0 * x).min(limit);
        }
    }
    let g = |w: f64| ev.delta_k(w, z);
    scan_bracket(&g, span.0, span.1, SCAN_POINTS)
}

fn scan_bracket<F>(f: &F, lo: f64, hi: f64, n: usize) -> Result<Option<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut prev_x = lo;
    let mut prev_f = f(lo)?;
    for j in 1..=n {
        let x = lo + (hi - lo) * j as f64 / n as f64;
        let fx = f(x)?;
        if prev_f == 0.0 || fx.signum() != prev_f.signum() {
            return Ok(Some((prev_x, x)));
        }
        prev_x = x;
        prev_f = fx;
    }
    Ok(None)
}
