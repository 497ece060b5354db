mod catalog;
mod correlations;
mod design;
mod phase_match;
mod spectrum;
mod sweep;

use std::io::Write;
use std::path::{Path, PathBuf};

use biphoton_core::config::{ResolvedConfig, SimulationConfig};
use biphoton_core::io::{gnuplot_script, write_atomic};
use biphoton_core::phase_matching::{MismatchEvaluator, PhaseMatcher, Poling};
use biphoton_core::spectral::{
    absolute_area, amplitude_homogeneous, amplitude_inhomogeneous, estimate_half_span, estimate_width_by_roots, integral_intensity,
    spectral_intensity, width_metrics, RootWidthEstimate, WidthReport,
};
use biphoton_core::units::wavelength_um_from_omega;
use biphoton_core::{FrequencyGrid, SpectralAmplitude};
use serde::Serialize;

use crate::cli::{Cli, Command, RunArgs};
use crate::exit::{CliError, CliResult, ExitCode};

pub use catalog::catalog_validate;
pub use correlations::correlations;
pub use design::design;
pub use phase_match::phase_match;
pub use spectrum::spectrum;
pub use sweep::{parse_values, sweep};

pub fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<ExitCode> {
    match &cli.command {
        Command::CatalogValidate { path } => catalog_validate(path, out),
        Command::Spectrum(a) => spectrum(a, out, err),
        Command::Sweep { run, param, values, resolve_angle } => sweep(run, *param, values, *resolve_angle, out, err),
        Command::Correlations(a) => correlations(a, out, err),
        Command::Design(a) => design(a, out, err),
        Command::PhaseMatch(a) => phase_match(a, out, err),
    }
}

/// A config read from disk together with its resolved form.
pub(crate) struct Loaded {
    pub raw: SimulationConfig,
    pub base_dir: PathBuf,
    pub resolved: ResolvedConfig,
    pub outputs: Outputs,
}

pub(crate) fn load(args: &RunArgs) -> CliResult<Loaded> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", args.config.display())))?;
    let raw = SimulationConfig::from_json_str(&text)?;
    let base_dir = args.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let resolved = raw.resolve(&base_dir)?;
    let dir = args.out_dir.clone().unwrap_or_else(|| resolved.output_dir.clone());
    let outputs = Outputs { dir, stem: resolved.output_stem.clone(), gnuplot: args.gnuplot, written: Vec::new() };
    Ok(Loaded { raw, base_dir, resolved, outputs })
}

/// Atomic writer that remembers what it produced.
pub(crate) struct Outputs {
    pub dir: PathBuf,
    pub stem: String,
    pub gnuplot: bool,
    pub written: Vec<String>,
}

impl Outputs {
    pub fn file_name(&self, suffix: &str) -> String {
        format!("{}_{suffix}", self.stem)
    }

    pub fn write(&mut self, suffix: &str, contents: &str) -> CliResult<()> {
        let name = self.file_name(suffix);
        write_atomic(self.dir.join(&name), contents.as_bytes())?;
        self.written.push(name);
        Ok(())
    }

    /// CSV plus, with `--gnuplot`, a script plotting column `y` against `x`.
    pub fn write_csv(&mut self, suffix: &str, contents: &str, x: usize, y: usize, labels: (&str, &str)) -> CliResult<()> {
        self.write(suffix, contents)?;
        if self.gnuplot {
            let csv = self.file_name(suffix);
            let script = gnuplot_script(&csv, x, y, labels.0, labels.1);
            let gp = format!("{}.gp", suffix.trim_end_matches(".csv"));
            self.write(&gp, &script)?;
        }
        Ok(())
    }

    pub fn report(&self, out: &mut dyn Write) {
        for name in &self.written {
            let _ = writeln!(out, "wrote {}", self.dir.join(name).display());
        }
    }
}

/// Spectrum of a resolved config and the figures every command reports about it.
pub(crate) struct SpectrumRun {
    pub amplitude: SpectralAmplitude,
    pub widths: WidthReport,
    pub integral_intensity: f64,
    /// Area of the homogeneous reference spectrum.
    pub reference_area: f64,
    pub homogeneous_equivalent: bool,
    pub label: String,
    pub root_estimate: Option<RootWidthEstimate>,
    pub half_span_estimated: bool,
    pub signal_omega: f64,
}

impl SpectrumRun {
    pub fn converged(&self) -> bool {
        self.amplitude.convergence().is_none_or(|c| c.converged)
    }
}

fn evaluator<'a>(r: &'a ResolvedConfig, m: PhaseMatcher<'a>) -> biphoton_core::Result<MismatchEvaluator<'a>> {
    match &r.profile {
        Some(p) => MismatchEvaluator::with_profile(m, p, r.temperature, r.field),
        None => Ok(MismatchEvaluator::homogeneous(m, r.temperature, r.field)),
    }
}

fn amplitude(ev: &MismatchEvaluator<'_>, grid: &FrequencyGrid, r: &ResolvedConfig) -> biphoton_core::Result<SpectralAmplitude> {
    if ev.is_z_independent() {
        amplitude_homogeneous(ev, grid)
    } else {
        amplitude_inhomogeneous(ev, grid, r.phase_mode, &r.quadrature)
    }
}

pub(crate) fn grid_for(r: &ResolvedConfig, ev: &MismatchEvaluator<'_>) -> biphoton_core::Result<(FrequencyGrid, bool)> {
    let (half, estimated) = match r.grid.half_span_rad_per_s {
        Some(h) => (h, false),
        None => (estimate_half_span(ev, r.temperature, r.field)?, true),
    };
    Ok((FrequencyGrid::new(half, r.grid.n_points)?, estimated))
}

pub(crate) fn compute_spectrum(r: &ResolvedConfig) -> biphoton_core::Result<SpectrumRun> {
    let m = PhaseMatcher::new(&r.crystal, r.matching.clone())?;
    let ev = evaluator(r, m.clone())?;
    let (grid, half_span_estimated) = grid_for(r, &ev)?;
    let amplitude = amplitude(&ev, &grid, r)?;

    // the crystal without its longitudinal control
    let base = match r.matching.poling {
        Poling::Chirped { kg0, .. } => m.with_poling(Poling::Uniform { period_um: 2.0 * std::f64::consts::PI / kg0 }),
        _ => m.clone(),
    };
    let reference = amplitude_homogeneous(&MismatchEvaluator::homogeneous(base, r.temperature, r.field), &grid)?;

    let signal_omega = m.omegas().1;
    let s = spectral_intensity(&amplitude);
    let widths = width_metrics(&s, &grid, r.analysis.threshold, Some(wavelength_um_from_omega(signal_omega)))?;
    let homogeneous_equivalent = match &r.profile {
        Some(p) => p.is_uniform() && !matches!(r.matching.poling, Poling::Chirped { .. }),
        None => ev.is_z_independent(),
    };
    Ok(SpectrumRun {
        integral_intensity: integral_intensity(&amplitude, &reference)?,
        reference_area: absolute_area(&reference),
        widths,
        homogeneous_equivalent,
        label: ev.label().describe().to_string(),
        root_estimate: estimate_width_by_roots(&ev).ok(),
        half_span_estimated,
        signal_omega,
        amplitude,
    })
}

/// Fields of the config echoed into every summary.
#[derive(Debug, Serialize)]
pub(crate) struct ConfigEcho {
    pub crystal: String,
    pub matching_type: biphoton_core::MatchingType,
    pub pump_wavelength_nm: f64,
    pub signal_wavelength_nm: f64,
    pub length_mm: f64,
    pub pump_axis_angle_deg: f64,
    pub angle_solved: bool,
    pub poling_period_um: Option<f64>,
    pub temperature_c: f64,
    pub field_kv_per_cm: f64,
}

impl ConfigEcho {
    pub fn new(r: &ResolvedConfig) -> Self {
        let cfg = &r.matching;
        ConfigEcho {
            crystal: r.crystal.name.clone(),
            matching_type: cfg.matching_type,
            pump_wavelength_nm: cfg.pump_wavelength_um * 1e3,
            signal_wavelength_nm: cfg.signal_wavelength_um * 1e3,
            length_mm: cfg.crystal_length * 1e3,
            pump_axis_angle_deg: cfg.pump_axis_angle.to_degrees(),
            angle_solved: r.solved_angle,
            poling_period_um: match cfg.poling {
                Poling::Uniform { period_um } => Some(period_um),
                _ => None,
            },
            temperature_c: r.temperature,
            field_kv_per_cm: r.field / biphoton_core::config::KV_PER_CM,
        }
    }
}

/// Print each warning; non-convergence becomes exit 4 under `--strict`.
pub(crate) fn finish(warnings: &[String], unconverged: bool, strict: bool, err: &mut dyn Write) -> ExitCode {
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    if unconverged && strict {
        ExitCode::Numerical
    } else {
        ExitCode::Ok
    }
}
