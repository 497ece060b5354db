//! Simulation configuration documents. Units at this boundary are nm, °C,
//! kV/cm and mm; [`SimulationConfig::resolve`] converts to the SI units of
//! the library.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::correlation::G2Form;
use crate::design::{forward_spectrum, Bound, DesignProblem, LossNorm, Parameterization, SimplexSpec, Target};
use crate::interp::linear_clamped;
use crate::crystal::{builtin_catalog, load_catalog, Catalog, CrystalRecord};
use crate::error::{Error, Result};
use crate::phase_matching::{
    solve_poling_period, solve_pump_axis_angle_at, Geometry, MatchingConfig, MatchingType, PhaseMode, Poling,
};
use crate::profile::{steady_state_temperature, HeaterSpec, Interpolation, LongitudinalProfile, ProfileKind, Quantity};
use crate::spectral::{FrequencyGrid, QuadratureSpec};
use crate::units::thz_to_rad_per_s;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the default catalog file.
pub const CATALOG_ENV: &str = "BIPHOTON_CATALOG";

/// kV/cm to V/m.
pub const KV_PER_CM: f64 = 1e5;

fn default_temperature() -> f64 {
    20.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub schema_version: u32,
    /// Relative paths resolve against the config file's directory.
    #[serde(default)]
    pub catalog: Option<PathBuf>,
    pub crystal: String,
    pub matching: MatchingSection,
    #[serde(default = "default_temperature")]
    pub temperature_c: f64,
    #[serde(default)]
    pub field_kv_cm: f64,
    #[serde(default)]
    pub profile: Option<ProfileSection>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub phase_mode: PhaseMode,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub output: OutputSection,
    /// Inverse-design problem; only the design command reads it.
    #[serde(default)]
    pub design: Option<DesignSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingSection {
    pub pump_wavelength_nm: f64,
    /// Degenerate when absent.
    #[serde(default)]
    pub signal_wavelength_nm: Option<f64>,
    #[serde(rename = "type")]
    pub matching_type: MatchingType,
    #[serde(default)]
    pub pump_axis_angle: AngleSpec,
    pub length_mm: f64,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub poling: PolingSection,
    /// Pump transverse wavevector spread, rad/m.
    #[serde(default)]
    pub pump_angular_width_rad_per_m: f64,
    /// Pump spectral width, rad/s.
    #[serde(default)]
    pub pump_spectral_width_rad_per_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum AngleSpec {
    Degrees(f64),
    /// Solve for collinear matching at the center frequencies; defaults to the
    /// config temperature and field.
    Solve {
        #[serde(default)]
        temperature_c: Option<f64>,
        #[serde(default)]
        field_kv_cm: Option<f64>,
    },
}

impl Default for AngleSpec {
    fn default() -> Self {
        AngleSpec::Solve { temperature_c: None, field_kv_cm: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeometrySection {
    #[default]
    Collinear,
    Noncollinear { signal_angle_deg: f64, idler_angle_deg: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolingSection {
    #[default]
    None,
    Uniform { period_um: f64 },
    Chirped { kg0_rad_per_um: f64, chirp_rad_per_um2: f64 },
    /// First-order period solved at the given (or config) temperature.
    Solve {
        #[serde(default)]
        temperature_c: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileQuantity {
    /// °C
    Temperature,
    /// kV/cm
    Field,
    /// rad/µm
    PolingWavenumber,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub quantity: ProfileQuantity,
    pub shape: ProfileShape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileShape {
    Uniform {
        value: f64,
    },
    /// `start` at `z = 0`, `start + delta` at `z = L`.
    Linear {
        start: f64,
        delta: f64,
    },
    /// Equal sections unless `boundaries_mm` (n + 1 ascending values from 0 to L) is given.
    Sectioned {
        values: Vec<f64>,
        #[serde(default)]
        boundaries_mm: Option<Vec<f64>>,
        #[serde(default)]
        interpolation: Interpolation,
    },
    /// `[z_mm, value]` nodes.
    Tabulated {
        points: Vec<[f64; 2]>,
    },
    /// Two-column CSV of `z` in metres and the value.
    Csv {
        path: PathBuf,
    },
    /// Steady state of a sectioned heater; temperature only.
    Heater {
        section_powers_w: Vec<f64>,
        rod_conductance_w_m_per_k: f64,
        #[serde(default)]
        ambient_loss_w_per_k_m: f64,
        cold_end_c: f64,
        #[serde(default = "default_heater_points")]
        grid_points: usize,
    },
}

fn default_heater_points() -> usize {
    401
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Estimated from the mismatch roots when absent.
    #[serde(default)]
    pub half_span_rad_per_s: Option<f64>,
    #[serde(default = "default_points")]
    pub n_points: usize,
}

fn default_points() -> usize {
    4097
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { half_span_rad_per_s: None, n_points: default_points() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    /// Range-width level relative to the peak.
    pub threshold: f64,
    pub g2_form: G2Form,
    /// Upper bound on delay-grid points.
    pub max_tau_points: usize,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection { threshold: 0.05, g2_form: G2Form::default(), max_tau_points: 8193 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub stem: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out"), stem: "biphoton".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    pub parameters: DesignParameters,
    pub target: TargetSpec,
    #[serde(default)]
    pub loss: LossNorm,
    #[serde(default)]
    pub optimizer: SimplexSpec,
}

/// Free parameters in config units; bounds are `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DesignParameters {
    /// One temperature (°C) per equal section.
    SectionedTemperature {
        bounds_c: Vec<[f64; 2]>,
        #[serde(default)]
        interpolation: Interpolation,
    },
    /// Gradient in K/mm from `temperature_c` at the input face.
    LinearGradient { bounds_k_per_mm: [f64; 2] },
    /// One field (kV/cm) per equal section.
    SectionedField {
        bounds_kv_cm: Vec<[f64; 2]>,
        #[serde(default)]
        interpolation: Interpolation,
    },
    PolingChirp { kg0_rad_per_um: f64, bounds_rad_per_um2: [f64; 2] },
}

/// Target spectral intensity on the design grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetSpec {
    Gaussian {
        fwhm_thz: f64,
        #[serde(default)]
        center_thz: f64,
    },
    FlatTop {
        width_thz: f64,
        #[serde(default)]
        center_thz: f64,
    },
    /// Two columns: detuning in THz and intensity; linear interpolation,
    /// zero outside the tabulated range.
    Csv { path: PathBuf },
    /// The forward model at known parameters, in the units of `parameters`.
    Forward { values: Vec<f64> },
}

/// Configuration converted to library units, with the crystal looked up and
/// any requested angle or period solved.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub crystal: CrystalRecord,
    pub matching: MatchingConfig,
    /// °C
    pub temperature: f64,
    /// V/m
    pub field: f64,
    pub profile: Option<LongitudinalProfile>,
    pub grid: GridSection,
    pub quadrature: QuadratureSpec,
    pub phase_mode: PhaseMode,
    pub analysis: AnalysisSection,
    pub output_dir: PathBuf,
    pub output_stem: String,
    pub solved_angle: bool,
    pub solved_period_um: Option<f64>,
}

fn at(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{path}: {msg}"))
}

fn json_error(e: serde_path_to_error::Error<serde_json::Error>) -> Error {
    let path = e.path().to_string();
    let inner = e.into_inner();
    Error::Parse {
        line: inner.line(),
        column: inner.column(),
        message: if path == "." { inner.to_string() } else { format!("{path}: {inner}") },
    }
}

/// Deserialize JSON, reporting the offending field path.
pub fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(json_error)
}

impl SimulationConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: SimulationConfig = from_json(text)?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(at("schema_version", format!("expected {SCHEMA_VERSION}, got {}", cfg.schema_version)));
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Catalog from the config, else from [`CATALOG_ENV`], else the built-in one.
    pub fn catalog(&self, base_dir: &Path) -> Result<Catalog> {
        match &self.catalog {
            Some(p) => load_catalog(base_dir.join(p)),
            None => match std::env::var_os(CATALOG_ENV) {
                Some(p) if !p.is_empty() => load_catalog(PathBuf::from(p)),
                _ => Ok(builtin_catalog()),
            },
        }
    }

    pub fn resolve(&self, base_dir: &Path) -> Result<ResolvedConfig> {
        let catalog = self.catalog(base_dir)?;
        self.resolve_with(&catalog, base_dir)
    }

    pub fn resolve_with(&self, catalog: &Catalog, base_dir: &Path) -> Result<ResolvedConfig> {
        let crystal = catalog
            .get(&self.crystal)
            .ok_or_else(|| at("crystal", format!("`{}` not found in catalog", self.crystal)))?
            .clone();
        let m = &self.matching;
        let finite = |v: f64| v.is_finite();
        if !(m.pump_wavelength_nm > 0.0) {
            return Err(at("matching.pump_wavelength_nm", "must be positive"));
        }
        if !(m.length_mm > 0.0) {
            return Err(at("matching.length_mm", "must be positive"));
        }
        if !finite(self.temperature_c) {
            return Err(at("temperature_c", "must be finite"));
        }
        if !finite(self.field_kv_cm) {
            return Err(at("field_kv_cm", "must be finite"));
        }
        let length = m.length_mm * 1e-3;
        let lp = m.pump_wavelength_nm * 1e-3;
        let mut cfg = match m.signal_wavelength_nm {
            None => MatchingConfig::degenerate(&crystal.name, lp, m.matching_type, 0.0, length),
            Some(ls) => {
                if !(ls > m.pump_wavelength_nm) {
                    return Err(at("matching.signal_wavelength_nm", "must exceed the pump wavelength"));
                }
                MatchingConfig::nondegenerate(&crystal.name, lp, ls * 1e-3, m.matching_type, 0.0, length)
            }
        };
        cfg.pump_angular_width = m.pump_angular_width_rad_per_m;
        cfg.pump_spectral_width = m.pump_spectral_width_rad_per_s;
        cfg.geometry = match m.geometry {
            GeometrySection::Collinear => Geometry::Collinear,
            GeometrySection::Noncollinear { signal_angle_deg, idler_angle_deg } => Geometry::Noncollinear {
                signal_angle: signal_angle_deg.to_radians(),
                idler_angle: idler_angle_deg.to_radians(),
            },
        };
        let temperature = self.temperature_c;
        let field = self.field_kv_cm * KV_PER_CM;
        let mut solved_angle = false;
        match m.pump_axis_angle {
            AngleSpec::Degrees(d) => {
                if !(0.0..=90.0).contains(&d) {
                    return Err(at("matching.pump_axis_angle.degrees", "must lie in [0, 90]"));
                }
                cfg.pump_axis_angle = d.to_radians();
            }
            AngleSpec::Solve { temperature_c, field_kv_cm } => {
                if !matches!(m.poling, PolingSection::None) {
                    return Err(at("matching.pump_axis_angle", "give the angle explicitly for a poled crystal"));
                }
                let t = temperature_c.unwrap_or(temperature);
                let e = field_kv_cm.map_or(field, |f| f * KV_PER_CM);
                cfg.pump_axis_angle = solve_pump_axis_angle_at(&crystal, &cfg, t, e)
                    .map_err(|err| at("matching.pump_axis_angle", err))?;
                solved_angle = true;
            }
        }
        let mut solved_period_um = None;
        cfg.poling = match m.poling {
            PolingSection::None => Poling::None,
            PolingSection::Uniform { period_um } => {
                if !(period_um > 0.0) {
                    return Err(at("matching.poling.period_um", "must be positive"));
                }
                Poling::Uniform { period_um }
            }
            PolingSection::Chirped { kg0_rad_per_um, chirp_rad_per_um2 } => {
                if !(finite(kg0_rad_per_um) && finite(chirp_rad_per_um2)) {
                    return Err(at("matching.poling", "chirp parameters must be finite"));
                }
                Poling::Chirped { kg0: kg0_rad_per_um, chirp: chirp_rad_per_um2 }
            }
            PolingSection::Solve { temperature_c } => {
                let t = temperature_c.unwrap_or(temperature);
                let period_um =
                    solve_poling_period(&crystal, &cfg, t, field).map_err(|err| at("matching.poling", err))?;
                solved_period_um = Some(period_um);
                Poling::Uniform { period_um }
            }
        };
        cfg.validate().map_err(|err| at("matching", err))?;

        let profile = match &self.profile {
            None => None,
            Some(p) => Some(build_profile(p, length, base_dir)?),
        };
        if let (Some(_), Some(sec)) = (&profile, &self.profile) {
            if sec.quantity == ProfileQuantity::PolingWavenumber && !matches!(cfg.poling, Poling::None) {
                return Err(at("profile.quantity", "a poling profile replaces matching.poling; set it to none"));
            }
        }
        let n = self.grid.n_points;
        if n < crate::spectral::MIN_GRID_POINTS || n.is_multiple_of(2) {
            return Err(at(
                "grid.n_points",
                format!("must be odd and at least {}", crate::spectral::MIN_GRID_POINTS),
            ));
        }
        if let Some(h) = self.grid.half_span_rad_per_s {
            if !(h > 0.0 && h.is_finite()) {
                return Err(at("grid.half_span_rad_per_s", "must be positive"));
            }
        }
        if !(self.quadrature.tol > 0.0) || self.quadrature.max_panels < 4 {
            return Err(at("quadrature", "tol must be positive and max_panels at least 4"));
        }
        if !(self.analysis.threshold > 0.0 && self.analysis.threshold < 1.0) {
            return Err(at("analysis.threshold", "must lie in (0, 1)"));
        }
        if self.analysis.max_tau_points < 3 {
            return Err(at("analysis.max_tau_points", "must be at least 3"));
        }
        Ok(ResolvedConfig {
            crystal,
            matching: cfg,
            temperature,
            field,
            profile,
            grid: self.grid,
            quadrature: self.quadrature,
            phase_mode: self.phase_mode,
            analysis: self.analysis,
            output_dir: base_dir.join(&self.output.dir),
            output_stem: self.output.stem.clone(),
            solved_angle,
            solved_period_um,
        })
    }
}

impl DesignParameters {
    fn to_library(&self) -> Result<(Parameterization, Vec<f64>)> {
        let bound = |b: &[f64; 2], scale: f64| Bound::new(b[0] * scale, b[1] * scale);
        Ok(match self {
            DesignParameters::SectionedTemperature { bounds_c, interpolation } => (
                Parameterization::SectionedTemperature {
                    bounds: bounds_c.iter().map(|b| bound(b, 1.0)).collect(),
                    interpolation: *interpolation,
                },
                vec![1.0; bounds_c.len()],
            ),
            DesignParameters::LinearGradient { bounds_k_per_mm } => {
                (Parameterization::LinearGradient { bounds: bound(bounds_k_per_mm, 1e3) }, vec![1e3])
            }
            DesignParameters::SectionedField { bounds_kv_cm, interpolation } => (
                Parameterization::SectionedField {
                    bounds: bounds_kv_cm.iter().map(|b| bound(b, KV_PER_CM)).collect(),
                    interpolation: *interpolation,
                },
                vec![KV_PER_CM; bounds_kv_cm.len()],
            ),
            DesignParameters::PolingChirp { kg0_rad_per_um, bounds_rad_per_um2 } => {
                if !(kg0_rad_per_um.is_finite() && *kg0_rad_per_um > 0.0) {
                    return Err(at("design.parameters.kg0_rad_per_um", "must be positive"));
                }
                (
                    Parameterization::PolingChirp { kg0: *kg0_rad_per_um, bounds: bound(bounds_rad_per_um2, 1.0) },
                    vec![1.0],
                )
            }
        })
    }
}

impl SimulationConfig {
    /// Design problem on the configured grid; `grid.half_span_rad_per_s` is required.
    pub fn design_problem(&self, resolved: &ResolvedConfig, base_dir: &Path) -> Result<(DesignProblem, Vec<f64>)> {
        let d = self.design.as_ref().ok_or_else(|| at("design", "section missing"))?;
        let half_span = self.grid.half_span_rad_per_s.ok_or_else(|| at("grid.half_span_rad_per_s", "required for design"))?;
        let grid = FrequencyGrid::new(half_span, self.grid.n_points).map_err(|e| at("grid", e))?;
        let (parameterization, scales) = d.parameters.to_library()?;
        let mut problem = DesignProblem {
            cfg: resolved.matching.clone(),
            parameterization,
            target: Target { grid, values: vec![1.0; grid.len()] },
            forward_grid: None,
            loss: d.loss,
            optimizer: d.optimizer,
            temperature: resolved.temperature,
            field: resolved.field,
            phase_mode: resolved.phase_mode,
            quadrature: resolved.quadrature,
        };
        problem.validate().map_err(|e| at("design", e))?;
        let nu: Vec<f64> = grid.omegas().iter().map(|w| w / thz_to_rad_per_s(1.0)).collect();
        let values = match &d.target {
            TargetSpec::Gaussian { fwhm_thz, center_thz } => {
                if !(*fwhm_thz > 0.0) {
                    return Err(at("design.target.fwhm_thz", "must be positive"));
                }
                let s = fwhm_thz / (8.0 * std::f64::consts::LN_2).sqrt();
                nu.iter().map(|v| (-0.5 * ((v - center_thz) / s).powi(2)).exp()).collect()
            }
            TargetSpec::FlatTop { width_thz, center_thz } => {
                if !(*width_thz > 0.0) {
                    return Err(at("design.target.width_thz", "must be positive"));
                }
                nu.iter().map(|v| if (v - center_thz).abs() <= 0.5 * width_thz { 1.0 } else { 0.0 }).collect()
            }
            TargetSpec::Csv { path } => {
                let rows = read_target_csv(&base_dir.join(path)).map_err(|e| at("design.target.path", e))?;
                let (lo, hi) = (rows[0].0, rows[rows.len() - 1].0);
                nu.iter().map(|&v| if v < lo || v > hi { 0.0 } else { linear_clamped(&rows, v) }).collect()
            }
            TargetSpec::Forward { values } => {
                if values.len() != scales.len() {
                    return Err(at("design.target.values", format!("expected {} values", scales.len())));
                }
                let p: Vec<f64> = values.iter().zip(&scales).map(|(v, s)| v * s).collect();
                forward_spectrum(&problem, &resolved.crystal, &p)?
            }
        };
        problem.target = Target::normalized(grid, values).map_err(|e| at("design.target", e))?;
        Ok((problem, scales))
    }
}

fn read_target_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path).map_err(csv_error)?;
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_error)?;
        let parsed: Option<(f64, f64)> = match (rec.get(0), rec.get(1)) {
            (Some(a), Some(b)) => a.parse().ok().zip(b.parse().ok()),
            _ => None,
        };
        match parsed {
            Some(r) => rows.push(r),
            None if rows.is_empty() => continue,
            None => return Err(Error::config(format!("unreadable row {:?}", rec.position().map(|p| p.line())))),
        }
    }
    if rows.len() < 2 || rows.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::config("target needs at least two rows with increasing detuning"));
    }
    Ok(rows)
}

fn csv_error(e: csv::Error) -> Error {
    Error::config(e.to_string())
}

fn build_profile(p: &ProfileSection, length: f64, base_dir: &Path) -> Result<LongitudinalProfile> {
    let (quantity, scale) = match p.quantity {
        ProfileQuantity::Temperature => (Quantity::Temperature, 1.0),
        ProfileQuantity::Field => (Quantity::Field, KV_PER_CM),
        ProfileQuantity::PolingWavenumber => (Quantity::PolingWavenumber, 1.0),
    };
    let wrap = |e: Error| at("profile.shape", e);
    let kind = match &p.shape {
        ProfileShape::Uniform { value } => ProfileKind::Uniform(value * scale),
        ProfileShape::Linear { start, delta } => {
            ProfileKind::Linear { start: start * scale, gradient: delta * scale / length }
        }
        ProfileShape::Sectioned { values, boundaries_mm, interpolation } => {
            if values.is_empty() {
                return Err(at("profile.shape.values", "needs at least one section"));
            }
            let boundaries = match boundaries_mm {
                Some(b) => b.iter().map(|z| z * 1e-3).collect(),
                None => (0..=values.len()).map(|i| length * i as f64 / values.len() as f64).collect(),
            };
            ProfileKind::Sectioned {
                boundaries,
                values: values.iter().map(|v| v * scale).collect(),
                interpolation: *interpolation,
            }
        }
        ProfileShape::Tabulated { points } => {
            ProfileKind::Tabulated(points.iter().map(|[z, v]| (z * 1e-3, v * scale)).collect())
        }
        ProfileShape::Csv { path } => {
            let prof = LongitudinalProfile::from_csv(base_dir.join(path), quantity, length).map_err(wrap)?;
            if scale == 1.0 {
                return Ok(prof);
            }
            match prof.kind() {
                ProfileKind::Tabulated(pts) => ProfileKind::Tabulated(pts.iter().map(|(z, v)| (*z, v * scale)).collect()),
                other => other.clone(),
            }
        }
        ProfileShape::Heater {
            section_powers_w,
            rod_conductance_w_m_per_k,
            ambient_loss_w_per_k_m,
            cold_end_c,
            grid_points,
        } => {
            if quantity != Quantity::Temperature {
                return Err(at("profile.shape", "a heater profile must be a temperature profile"));
            }
            let n = section_powers_w.len();
            let spec = HeaterSpec {
                n_sections: n,
                section_length: length / n.max(1) as f64,
                section_powers: section_powers_w.clone(),
                rod_conductance: *rod_conductance_w_m_per_k,
                cold_end_temperature: *cold_end_c,
                ambient_loss_coefficient: *ambient_loss_w_per_k_m,
            };
            return steady_state_temperature(&spec, *grid_points).map_err(wrap);
        }
    };
    LongitudinalProfile::new(quantity, kind, length).map_err(wrap)
}
