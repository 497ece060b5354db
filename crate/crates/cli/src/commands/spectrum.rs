use std::io::Write;

use biphoton_core::io::{spectrum_csv, to_json};
use biphoton_core::spectral::{ConvergenceReport, Provenance, RootWidthEstimate, WidthReport};
use serde::Serialize;

use super::{compute_spectrum, finish, load, ConfigEcho, SpectrumRun};
use crate::cli::RunArgs;
use crate::exit::{CliResult, ExitCode};

#[derive(Debug, Serialize)]
struct GridEcho {
    half_span_rad_per_s: f64,
    n_points: usize,
    estimated: bool,
}

#[derive(Debug, Serialize)]
struct SpectrumSummary<'a> {
    command: &'static str,
    config: ConfigEcho,
    model: &'a str,
    provenance: &'a Provenance,
    /// Set when the control is uniform, so the closed form applies.
    homogeneous_equivalent: bool,
    grid: GridEcho,
    widths: &'a WidthReport,
    integral_intensity_ratio: f64,
    root_estimate: Option<&'a RootWidthEstimate>,
    convergence: Option<&'a ConvergenceReport>,
    notes: Vec<String>,
    warnings: &'a [String],
    files: &'a [String],
}

pub(crate) fn spectrum_warnings(run: &SpectrumRun) -> Vec<String> {
    let mut w = Vec::new();
    if let Some(c) = run.amplitude.convergence() {
        if !c.converged {
            w.push(format!("quadrature did not converge at {} grid points (tol {:e})", c.unconverged_points, c.tol));
        }
    }
    if run.widths.truncated {
        w.push("spectrum reaches the grid edge above the range threshold; widths are truncated".into());
    }
    w
}

pub fn spectrum(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<ExitCode> {
    let mut l = load(args)?;
    let r = &l.resolved;
    let run = compute_spectrum(r)?;
    let warnings = spectrum_warnings(&run);
    let mut notes = Vec::new();
    if run.homogeneous_equivalent {
        notes.push("homogeneous-equivalent".to_string());
    }
    l.outputs.write_csv("spectrum.csv", &spectrum_csv(&run.amplitude, run.signal_omega), 2, 6, ("detuning (THz)", "S"))?;
    let mut files = l.outputs.written.clone();
    files.push(l.outputs.file_name("spectrum.json"));
    let grid = run.amplitude.grid();
    let summary = SpectrumSummary {
        command: "spectrum",
        config: ConfigEcho::new(r),
        model: &run.label,
        provenance: run.amplitude.provenance(),
        homogeneous_equivalent: run.homogeneous_equivalent,
        grid: GridEcho { half_span_rad_per_s: grid.half_span(), n_points: grid.len(), estimated: run.half_span_estimated },
        widths: &run.widths,
        integral_intensity_ratio: run.integral_intensity,
        root_estimate: run.root_estimate.as_ref(),
        convergence: run.amplitude.convergence(),
        notes,
        warnings: &warnings,
        files: &files,
    };
    l.outputs.write("spectrum.json", &to_json(&summary))?;
    let w = &run.widths;
    let _ = writeln!(
        out,
        "FWHM {:.4} THz, range width {:.4} THz, {} peak(s), integral intensity {:.6}",
        w.fwhm.thz, w.range_width.thz, w.peak_count, run.integral_intensity
    );
    l.outputs.report(out);
    Ok(finish(&warnings, !run.converged(), args.strict, err))
}
