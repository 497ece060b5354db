use std::io::Write;

use biphoton_core::correlation::{
    auto_tau_grid, correlation_widths, effective_wavelength, g1, g2, hom_dip, time_amplitude, tomography_resolutions,
    CorrelationTrace, TauGrid, PARSEVAL_TOLERANCE,
};
use biphoton_core::io::{to_json, trace_csv};
use biphoton_core::spectral::spectral_intensity;
use biphoton_core::units::wavelength_um_from_omega;
use serde::Serialize;

use super::spectrum::spectrum_warnings;
use super::{compute_spectrum, finish, load, ConfigEcho};
use crate::cli::RunArgs;
use crate::exit::{CliResult, ExitCode};

#[derive(Debug, Serialize)]
struct Widths {
    /// FWHM of g1, s.
    delta1_tau: Option<f64>,
    /// FWHM of g2, s.
    delta2_tau: Option<f64>,
    /// FWHM of g2 recomputed with the phase of F removed, s.
    delta2_tau_zero_phase: Option<f64>,
    /// Above one when the spectrum is not Fourier limited.
    delta2_ratio: Option<f64>,
    /// Full width at half depth of the HOM dip, s.
    hom_width: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Reciprocity {
    spectral_fwhm_rad_per_s: f64,
    /// `Δ⁽¹⁾τ · ΔΩ`
    delta1_tau_times_width: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Resolutions {
    /// `c·Δ⁽¹⁾τ`, m
    oct_m: Option<f64>,
    /// `c·Δ⁽¹⁾τ/2`, m
    qoct_m: Option<f64>,
    effective_wavelength_nm: f64,
}

#[derive(Debug, Serialize)]
struct CorrelationSummary<'a> {
    command: &'static str,
    config: ConfigEcho,
    tau_half_span_s: f64,
    tau_points: usize,
    g2_form: biphoton_core::correlation::G2Form,
    widths: Widths,
    reciprocity: Reciprocity,
    resolutions: Resolutions,
    parseval_ratio: f64,
    hom_minimum: f64,
    warnings: &'a [String],
    files: &'a [String],
}

fn width(trace: &CorrelationTrace, name: &str, warnings: &mut Vec<String>) -> Option<f64> {
    match correlation_widths(trace) {
        Ok(w) => Some(w),
        Err(e) => {
            warnings.push(format!("{name} width: {e}"));
            None
        }
    }
}

pub fn correlations(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<ExitCode> {
    let mut l = load(args)?;
    let r = &l.resolved;
    let run = compute_spectrum(r)?;
    let mut warnings = spectrum_warnings(&run);
    let f = &run.amplitude;
    let tau = auto_tau_grid(f, r.analysis.max_tau_points)?;
    let s = spectral_intensity(f);
    let first = g1(&s, f.grid(), &tau)?;
    let second = g2(f, &tau, r.analysis.g2_form)?;
    let flat = g2(&f.zero_phase(), &tau, r.analysis.g2_form)?;
    // 2τ of the dip grid falls on nodes of the g1 grid
    let hom_tau = TauGrid::new(0.5 * tau.half_span(), tau.len())?;
    let hom = hom_dip(&first, &hom_tau)?;
    let amp = time_amplitude(f, &tau);
    if amp.coverage_warning {
        warnings.push("delay grid misses part of the time amplitude".into());
    }
    if (amp.parseval_ratio - 1.0).abs() > PARSEVAL_TOLERANCE {
        warnings.push(format!("Parseval ratio {:.6} outside 1 ± {PARSEVAL_TOLERANCE}", amp.parseval_ratio));
    }

    let d1 = width(&first, "g1", &mut warnings);
    let d2 = width(&second, "g2", &mut warnings);
    let d2_flat = width(&flat, "zero-phase g2", &mut warnings);
    let dh = width(&hom, "HOM", &mut warnings);
    let (oct, qoct) = match d1.map(tomography_resolutions) {
        Some(Ok((a, b))) => (Some(a), Some(b)),
        _ => (None, None),
    };
    let lambda_nm = wavelength_um_from_omega(run.signal_omega) * 1e3;

    l.outputs.write_csv("g1.csv", &trace_csv(&first), 1, 2, ("delay (s)", "g1"))?;
    l.outputs.write_csv("g2.csv", &trace_csv(&second), 1, 2, ("delay (s)", "g2"))?;
    l.outputs.write_csv("hom.csv", &trace_csv(&hom), 1, 2, ("delay (s)", "coincidences"))?;
    let mut files = l.outputs.written.clone();
    files.push(l.outputs.file_name("correlations.json"));
    let dw = run.widths.fwhm.rad_per_s;
    let summary = CorrelationSummary {
        command: "correlations",
        config: ConfigEcho::new(r),
        tau_half_span_s: tau.half_span(),
        tau_points: tau.len(),
        g2_form: r.analysis.g2_form,
        widths: Widths {
            delta1_tau: d1,
            delta2_tau: d2,
            delta2_tau_zero_phase: d2_flat,
            delta2_ratio: d2.zip(d2_flat).map(|(a, b)| a / b),
            hom_width: dh,
        },
        reciprocity: Reciprocity { spectral_fwhm_rad_per_s: dw, delta1_tau_times_width: d1.map(|t| t * dw) },
        resolutions: Resolutions { oct_m: oct, qoct_m: qoct, effective_wavelength_nm: effective_wavelength(lambda_nm)? },
        parseval_ratio: amp.parseval_ratio,
        hom_minimum: hom.values.iter().copied().fold(f64::INFINITY, f64::min),
        warnings: &warnings,
        files: &files,
    };
    l.outputs.write("correlations.json", &to_json(&summary))?;
    let fs = |v: Option<f64>| v.map_or("n/a".to_string(), |t| format!("{:.3} fs", t * 1e15));
    let _ = writeln!(out, "g1 width {}, g2 width {}, HOM width {}", fs(d1), fs(d2), fs(dh));
    l.outputs.report(out);
    Ok(finish(&warnings, !run.converged(), args.strict, err))
}
