use std::fmt::Write as _;
use std::io::Write;

use biphoton_core::design::{design_profile, flatness, DesignResult};
use biphoton_core::io::{format_float, to_json};
use biphoton_core::units::rad_per_s_to_thz;
use serde::Serialize;

use super::{load, ConfigEcho};
use crate::cli::RunArgs;
use crate::exit::{CliError, CliResult, ExitCode};

#[derive(Debug, Serialize)]
struct DesignSummary<'a> {
    command: &'static str,
    config: ConfigEcho,
    /// Best parameters in the units of the config's `design.parameters`.
    parameters: Vec<f64>,
    achieved_flatness: Option<f64>,
    result: &'a DesignResult,
    files: &'a [String],
}

pub fn design(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<ExitCode> {
    let mut l = load(args)?;
    if l.raw.design.is_none() {
        return Err(CliError::config("design: section missing from the config"));
    }
    let (problem, scales) = l.raw.design_problem(&l.resolved, &l.base_dir)?;
    let result = design_profile(&problem, &l.resolved.crystal)?;

    let grid = problem.target.grid;
    let mut csv = String::from("omega_rad_per_s,nu_detuning_thz,target,achieved\n");
    for (j, w) in grid.omegas().iter().enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            format_float(*w),
            format_float(rad_per_s_to_thz(*w)),
            format_float(problem.target.values[j]),
            format_float(result.achieved[j])
        );
    }
    l.outputs.write_csv("design_spectrum.csv", &csv, 2, 4, ("detuning (THz)", "S"))?;
    let mut files = l.outputs.written.clone();
    files.push(l.outputs.file_name("design.json"));
    let summary = DesignSummary {
        command: "design",
        config: ConfigEcho::new(&l.resolved),
        parameters: result.parameters.iter().zip(&scales).map(|(p, s)| p / s).collect(),
        achieved_flatness: flatness(&result.achieved),
        result: &result,
        files: &files,
    };
    l.outputs.write("design.json", &to_json(&summary))?;
    let _ = writeln!(
        out,
        "loss {:.3e} after {} evaluations, parameters {:?}",
        result.loss, result.evaluations, summary.parameters
    );
    l.outputs.report(out);
    if !result.converged {
        let _ = writeln!(err, "warning: no restart met the simplex tolerance");
        if args.strict {
            return Ok(ExitCode::NotConverged);
        }
    }
    Ok(ExitCode::Ok)
}
