use std::fmt::Write as _;
use std::io::Write;

use biphoton_core::io::{format_float, to_json};
use biphoton_core::phase_matching::{
    broadband_conditions_report, taylor_coefficients, width_limits, AnalyticWidths, BroadbandReport,
    ConditionTolerances, MismatchFn, PhaseMatcher, TaylorCoefficients,
};
use biphoton_core::units::rad_per_s_to_thz;
use serde::Serialize;

use super::{grid_for, load, ConfigEcho};
use crate::cli::RunArgs;
use crate::exit::{CliResult, ExitCode};

#[derive(Debug, Serialize)]
struct PhaseMatchSummary<'a> {
    command: &'static str,
    config: ConfigEcho,
    model: &'a str,
    taylor: TaylorCoefficients,
    /// `(k′_p − k′_s)/k″_s`, rad/s.
    gamma_rad_per_s: Option<f64>,
    broadband: BroadbandReport,
    width_limits: AnalyticWidths,
    files: &'a [String],
}

pub fn phase_match(args: &RunArgs, out: &mut dyn Write, _err: &mut dyn Write) -> CliResult<ExitCode> {
    let mut l = load(args)?;
    let r = &l.resolved;
    let m = PhaseMatcher::new(&r.crystal, r.matching.clone())?;
    let ev = super::evaluator(r, m.clone())?;
    let (grid, _) = grid_for(r, &ev)?;
    let taylor = taylor_coefficients(&m, r.temperature, r.field)?;
    let broadband = broadband_conditions_report(&m, r.temperature, r.field, ConditionTolerances::default())?;
    let limits = width_limits(&m, r.temperature, r.field)?;
    let gamma = (taylor.pump.k1 - taylor.signal.k1) / taylor.signal.k2;

    let mut csv = String::from("omega_rad_per_s,nu_detuning_thz,delta_k_rad_per_m,delta_k_taylor_rad_per_m\n");
    for w in grid.omegas() {
        let dk = ev.delta_k(w, 0.0)?;
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            format_float(w),
            format_float(rad_per_s_to_thz(w)),
            format_float(dk),
            format_float(taylor.eval(w))
        );
    }
    l.outputs.write_csv("phase_match.csv", &csv, 2, 3, ("detuning (THz)", "mismatch (rad/m)"))?;
    let mut files = l.outputs.written.clone();
    files.push(l.outputs.file_name("phase_match.json"));
    let summary = PhaseMatchSummary {
        command: "phase-match",
        config: ConfigEcho::new(r),
        model: ev.label().describe(),
        taylor,
        gamma_rad_per_s: gamma.is_finite().then_some(gamma),
        broadband,
        width_limits: limits,
        files: &files,
    };
    l.outputs.write("phase_match.json", &to_json(&summary))?;
    let _ = writeln!(
        out,
        "pump axis angle {:.4} deg{}, d0 {:.3e} rad/m, d1 {:.3e} s/m, d2 {:.3e} s^2/m",
        r.matching.pump_axis_angle.to_degrees(),
        if r.solved_angle { " (solved)" } else { "" },
        taylor.d0,
        taylor.d1,
        taylor.d2
    );
    l.outputs.report(out);
    Ok(ExitCode::Ok)
}
