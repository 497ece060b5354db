use std::fmt::Write as _;
use std::io::Write;

use biphoton_core::config::{AngleSpec, PolingSection, ProfileQuantity, ProfileSection, ProfileShape, SimulationConfig};
use biphoton_core::io::{format_float, to_json};
use biphoton_core::phase_matching::{PhaseMatcher, Wave};
use biphoton_core::spectral::{
    absolute_area, angular_spectrum, joint_spectral_amplitude, trapezoid, width_metrics, width_metrics_uniform,
};
use biphoton_core::units::wavelength_um_from_omega;
use biphoton_core::profile::profile_extremes;
use biphoton_core::{FrequencyGrid, Quantity};
use serde::Serialize;

use super::spectrum::spectrum_warnings;
use super::{compute_spectrum, finish, load, ConfigEcho};
use crate::cli::{RunArgs, SweepParam};
use crate::exit::{CliError, CliResult, ExitCode};

/// Signal-angle samples of the pump-dq sweep.
const ANGLE_POINTS: usize = 401;
/// Points per axis of the joint amplitude in the pump-dwp sweep.
const JSA_POINTS: usize = 401;

/// `a,b,c` or `start:stop:count`.
pub fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |what: &str| CliError::config(format!("--values: {what} in `{text}`"));
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [a, b, n] = parts[..] else { return Err(bad("expected start:stop:count")) };
        let a: f64 = a.trim().parse().map_err(|_| bad("bad start"))?;
        let b: f64 = b.trim().parse().map_err(|_| bad("bad stop"))?;
        let n: usize = n.trim().parse().map_err(|_| bad("bad count"))?;
        if n < 2 || !a.is_finite() || !b.is_finite() {
            return Err(bad("count must be at least 2 and bounds finite"));
        }
        return Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect());
    }
    let v = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| bad("unreadable number"))?;
    if v.is_empty() {
        return Err(bad("no values"));
    }
    Ok(v)
}

struct Row {
    value: f64,
    fwhm: f64,
    range_width: f64,
    peak_count: usize,
    integral_intensity: f64,
    root_width: f64,
}

#[derive(Debug, Serialize)]
struct SweepSummary<'a> {
    command: &'static str,
    config: ConfigEcho,
    param: &'static str,
    column: &'static str,
    values: &'a [f64],
    fwhm: Vec<f64>,
    range_width: Vec<f64>,
    /// Width unit of the table.
    width_unit: &'static str,
    fwhm_nondecreasing: bool,
    warnings: &'a [String],
    files: &'a [String],
}

pub fn sweep(
    args: &RunArgs,
    param: SweepParam,
    values: &str,
    resolve_angle: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<ExitCode> {
    let values = parse_values(values)?;
    let mut l = load(args)?;
    // hold the solved angle and period fixed across the sweep
    let mut base = l.raw.clone();
    base.matching.pump_axis_angle = AngleSpec::Degrees(l.resolved.matching.pump_axis_angle.to_degrees());
    if let Some(period_um) = l.resolved.solved_period_um {
        base.matching.poling = PolingSection::Uniform { period_um };
    }
    let base_run = compute_spectrum(&l.resolved)?;
    let mut warnings = Vec::new();
    let mut unconverged = false;

    let (rows, width_unit) = match param {
        SweepParam::PumpDq | SweepParam::PumpDwp => {
            if l.resolved.profile.is_some() {
                return Err(CliError::config(format!("{} sweep needs a config without a profile", param.name())));
            }
            let rows = pump_sweep(&l, &base_run, param, &values, &mut warnings)?;
            (rows, if param == SweepParam::PumpDq { "rad" } else { "rad/s" })
        }
        _ => {
            let mut rows = Vec::with_capacity(values.len());
            for &v in &values {
                let mut cfg = apply(&base, param, v)?;
                let mut r = cfg.resolve(&l.base_dir)?;
                if resolve_angle {
                    let hottest = match &r.profile {
                        Some(p) if p.quantity() == Quantity::Temperature => profile_extremes(p).max,
                        _ => r.temperature,
                    };
                    cfg.matching.pump_axis_angle = AngleSpec::Solve { temperature_c: Some(hottest), field_kv_cm: None };
                    r = cfg.resolve(&l.base_dir)?;
                }
                let run = compute_spectrum(&r)?;
                unconverged |= !run.converged();
                for w in spectrum_warnings(&run) {
                    warnings.push(format!("{} = {v}: {w}", param.name()));
                }
                rows.push(Row {
                    value: v,
                    fwhm: run.widths.fwhm.rad_per_s,
                    range_width: run.widths.range_width.rad_per_s,
                    peak_count: run.widths.peak_count,
                    integral_intensity: absolute_area(&run.amplitude) / base_run.reference_area,
                    root_width: run.root_estimate.and_then(|e| e.two_sided_width).unwrap_or(f64::NAN),
                });
            }
            (rows, "rad/s")
        }
    };

    let header = if width_unit == "rad" {
        format!("{},fwhm_rad,range_width_rad,peak_count,integral_intensity", param.column())
    } else {
        format!(
            "{},fwhm_rad_per_s,fwhm_thz,range_width_rad_per_s,range_width_thz,peak_count,integral_intensity,root_width_rad_per_s",
            param.column()
        )
    };
    let mut csv = header + "\n";
    for row in &rows {
        if width_unit == "rad" {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                format_float(row.value),
                format_float(row.fwhm),
                format_float(row.range_width),
                row.peak_count,
                format_float(row.integral_intensity)
            );
        } else {
            let thz = |w: f64| format_float(biphoton_core::units::rad_per_s_to_thz(w));
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                format_float(row.value),
                format_float(row.fwhm),
                thz(row.fwhm),
                format_float(row.range_width),
                thz(row.range_width),
                row.peak_count,
                format_float(row.integral_intensity),
                format_float(row.root_width)
            );
        }
    }
    let suffix = format!("sweep_{}", param.name().replace('-', "_"));
    let y = if width_unit == "rad" { 2 } else { 3 };
    l.outputs.write_csv(&format!("{suffix}.csv"), &csv, 1, y, (param.column(), "FWHM"))?;
    let mut files = l.outputs.written.clone();
    files.push(l.outputs.file_name(&format!("{suffix}.json")));
    let fwhm: Vec<f64> = rows.iter().map(|r| r.fwhm).collect();
    let summary = SweepSummary {
        command: "sweep",
        config: ConfigEcho::new(&l.resolved),
        param: param.name(),
        column: param.column(),
        values: &values,
        fwhm_nondecreasing: fwhm.windows(2).all(|w| w[1] >= w[0]),
        range_width: rows.iter().map(|r| r.range_width).collect(),
        fwhm,
        width_unit,
        warnings: &warnings,
        files: &files,
    };
    l.outputs.write(&format!("{suffix}.json"), &to_json(&summary))?;
    let _ = writeln!(out, "{} rows for {}", rows.len(), param.name());
    l.outputs.report(out);
    Ok(finish(&warnings, unconverged, args.strict, err))
}

/// The base config with the swept parameter set to `v`.
fn apply(base: &SimulationConfig, param: SweepParam, v: f64) -> CliResult<SimulationConfig> {
    let mut cfg = base.clone();
    let quantity = cfg.profile.as_ref().map(|p| p.quantity);
    let conflict = |q: ProfileQuantity| {
        if quantity == Some(q) {
            Err(CliError::config(format!("{} sweep conflicts with the config's {q:?} profile", param.name())))
        } else {
            Ok(())
        }
    };
    match param {
        SweepParam::DeltaT | SweepParam::Gradient => {
            conflict(ProfileQuantity::Field)?;
            conflict(ProfileQuantity::PolingWavenumber)?;
            let delta = if param == SweepParam::DeltaT { v } else { v * cfg.matching.length_mm };
            cfg.profile = Some(ProfileSection {
                quantity: ProfileQuantity::Temperature,
                shape: ProfileShape::Linear { start: cfg.temperature_c, delta },
            });
        }
        SweepParam::Chirp => {
            conflict(ProfileQuantity::PolingWavenumber)?;
            let kg0_rad_per_um = match cfg.matching.poling {
                PolingSection::Uniform { period_um } => 2.0 * std::f64::consts::PI / period_um,
                PolingSection::Chirped { kg0_rad_per_um, .. } => kg0_rad_per_um,
                _ => return Err(CliError::config("chirp sweep needs uniform or chirped poling in matching.poling")),
            };
            cfg.matching.poling = PolingSection::Chirped { kg0_rad_per_um, chirp_rad_per_um2: v };
        }
        SweepParam::Field => {
            conflict(ProfileQuantity::Field)?;
            cfg.field_kv_cm = v;
        }
        SweepParam::Length => cfg.matching.length_mm = v,
        SweepParam::PumpDq | SweepParam::PumpDwp => unreachable!("pump sweeps do not rebuild the config"),
    }
    Ok(cfg)
}

fn pump_sweep(
    l: &super::Loaded,
    base_run: &super::SpectrumRun,
    param: SweepParam,
    values: &[f64],
    warnings: &mut Vec<String>,
) -> CliResult<Vec<Row>> {
    let r = &l.resolved;
    let m = PhaseMatcher::new(&r.crystal, r.matching.clone())?;
    let threshold = r.analysis.threshold;
    let mut rows: Vec<Row> = Vec::with_capacity(values.len());
    let mut first_area = None;
    if param == SweepParam::PumpDq {
        // a few angular acceptances sqrt(2π/(k_s L)) around the signal direction
        let ks = m.wavenumber(Wave::Signal, r.matching.signal_angle(), m.omegas().1, r.temperature, r.field)?;
        let half = 4.0 * (2.0 * std::f64::consts::PI / (ks * r.matching.crystal_length)).sqrt();
        let center = r.matching.signal_angle();
        let dx = 2.0 * half / (ANGLE_POINTS - 1) as f64;
        let theta: Vec<f64> = (0..ANGLE_POINTS).map(|j| center - half + j as f64 * dx).collect();
        for &v in values {
            let a = angular_spectrum(&m, 0.0, &theta, v, r.temperature, r.field)?;
            let missed = a.no_root.iter().filter(|b| **b).count();
            if missed > 0 {
                warnings.push(format!("pump-dq = {v}: no idler direction at {missed} signal angles"));
            }
            let w = width_metrics_uniform(&a.intensity, theta[0], dx, threshold, None)?;
            if w.truncated {
                warnings.push(format!("pump-dq = {v}: angular spectrum reaches the scan edge; widths are truncated"));
            }
            let area = trapezoid(&a.intensity, dx);
            let first = *first_area.get_or_insert(area);
            rows.push(Row {
                value: v,
                fwhm: w.fwhm.rad_per_s,
                range_width: w.range_width.rad_per_s,
                peak_count: w.peak_count,
                integral_intensity: area / first,
                root_width: f64::NAN,
            });
        }
    } else {
        let n = r.grid.n_points.min(JSA_POINTS);
        let grid = FrequencyGrid::new(base_run.amplitude.grid().half_span(), n)?;
        let center = Some(wavelength_um_from_omega(base_run.signal_omega));
        for &v in values {
            let jsa = joint_spectral_amplitude(&m, &grid, &grid, v, r.temperature, r.field)?;
            let marginal = jsa.signal_marginal();
            let w = width_metrics(&marginal, &grid, threshold, center)?;
            if w.truncated {
                warnings.push(format!("pump-dwp = {v}: marginal reaches the grid edge; widths are truncated"));
            }
            let area = trapezoid(&marginal, grid.spacing());
            let first = *first_area.get_or_insert(area);
            rows.push(Row {
                value: v,
                fwhm: w.fwhm.rad_per_s,
                range_width: w.range_width.rad_per_s,
                peak_count: w.peak_count,
                integral_intensity: area / first,
                root_width: f64::NAN,
            });
        }
    }
    Ok(rows)
}
