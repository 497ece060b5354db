//! Longitudinal control profiles along the crystal: temperature, static
//! field, or poling wavenumber as a function of position `z ∈ [0, L]`.

mod heater;

pub use heater::{steady_state_temperature, HeaterSpec};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// °C
    Temperature,
    /// V/m
    Field,
    /// rad/µm
    PolingWavenumber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    /// Half-open sections `[z_{i−1}, z_i)`; the last section includes `L`.
    Step,
    /// Section values anchored at section midpoints, linear in between,
    /// held constant before the first and after the last midpoint.
    #[default]
    MidpointLinear,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    Uniform(f64),
    /// `v(z) = start + gradient·z`, gradient per metre.
    Linear { start: f64, gradient: f64 },
    Sectioned {
        boundaries: Vec<f64>,
        values: Vec<f64>,
        interpolation: Interpolation,
    },
    /// Sorted `(z, v)` nodes, linear in between, end values held outside.
    Tabulated(Vec<(f64, f64)>),
}

/// Piecewise representation over `[0, L]` with cumulative integrals at nodes.
#[derive(Debug, Clone, PartialEq)]
enum Pieces {
    Closed,
    Linear { z: Vec<f64>, v: Vec<f64>, cum: Vec<f64> },
    Steps { z: Vec<f64>, v: Vec<f64>, cum: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongitudinalProfile {
    quantity: Quantity,
    kind: ProfileKind,
    length: f64,
    pieces: Pieces,
}

/// Minimum and maximum of a profile with their positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub min: f64,
    pub max: f64,
    pub argmin: f64,
    pub argmax: f64,
}

impl Extremes {
    pub fn span(&self) -> f64 {
        self.max - self.min
    }
}

impl LongitudinalProfile {
    pub fn new(quantity: Quantity, kind: ProfileKind, length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::config(format!("profile length must be positive, got {length}")));
        }
        let pieces = build_pieces(&kind, length)?;
        Ok(LongitudinalProfile {
            quantity,
            kind,
            length,
            pieces,
        })
    }

    pub fn uniform(quantity: Quantity, value: f64, length: f64) -> Result<Self> {
        Self::new(quantity, ProfileKind::Uniform(value), length)
    }

    pub fn linear(quantity: Quantity, start: f64, gradient: f64, length: f64) -> Result<Self> {
        Self::new(quantity, ProfileKind::Linear { start, gradient }, length)
    }

    /// Sections of equal length.
    pub fn sectioned_equal(
        quantity: Quantity,
        values: Vec<f64>,
        interpolation: Interpolation,
        length: f64,
    ) -> Result<Self> {
        let n = values.len();
        let boundaries = (0..=n).map(|i| length * i as f64 / n.max(1) as f64).collect();
        Self::new(
            quantity,
            ProfileKind::Sectioned {
                boundaries,
                values,
                interpolation,
            },
            length,
        )
    }

    /// Two-column CSV of `(z in metres, value)`; a non-numeric header row is skipped.
    pub fn from_csv(path: impl AsRef<Path>, quantity: Quantity, length: f64) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::config(format!("profile CSV: {e}")))?;
        let mut points = Vec::new();
        for (row, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::config(format!("profile CSV: {e}")))?;
            if rec.len() < 2 {
                return Err(Error::Parse {
                    line: row + 1,
                    column: 1,
                    message: "expected two columns (z, value)".into(),
                });
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(z), Ok(v)) => points.push((z, v)),
                _ if row == 0 => continue,
                _ => {
                    return Err(Error::Parse {
                        line: row + 1,
                        column: 1,
                        message: format!("non-numeric row `{}`", rec.iter().collect::<Vec<_>>().join(",")),
                    })
                }
            }
        }
        Self::new(quantity, ProfileKind::Tabulated(points), length)
    }

    pub fn quantity(&self) -> Quantity {
        self.quantity
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Section boundaries when the profile is piecewise constant.
    pub fn step_boundaries(&self) -> Option<Vec<f64>> {
        match &self.kind {
            ProfileKind::Uniform(_) => Some(vec![0.0, self.length]),
            ProfileKind::Sectioned { boundaries, interpolation: Interpolation::Step, .. } => Some(boundaries.clone()),
            _ if self.is_uniform() => Some(vec![0.0, self.length]),
            _ => None,
        }
    }

    pub fn is_uniform(&self) -> bool {
        match &self.kind {
            ProfileKind::Uniform(_) => true,
            ProfileKind::Linear { gradient, .. } => *gradient == 0.0,
            _ => {
                let e = profile_extremes(self);
                e.min == e.max
            }
        }
    }

    /// Value at `z`; errors outside `[0, L]`.
    pub fn evaluate(&self, z: f64) -> Result<f64> {
        let slack = 1e-12 * self.length;
        if !(z >= -slack && z <= self.length + slack) {
            return Err(Error::OutsideDomain { z, length: self.length });
        }
        Ok(self.value(z.clamp(0.0, self.length)))
    }

    /// Value at `z` clamped into the domain.
    pub fn value(&self, z: f64) -> f64 {
        match (&self.kind, &self.pieces) {
            (ProfileKind::Uniform(v), _) => *v,
            (ProfileKind::Linear { start, gradient }, _) => start + gradient * z,
            (_, Pieces::Linear { z: zs, v, .. }) => {
                let i = segment(zs, z);
                let t = (z - zs[i]) / (zs[i + 1] - zs[i]);
                v[i] + (v[i + 1] - v[i]) * t
            }
            (_, Pieces::Steps { z: zs, v, .. }) => v[segment(zs, z)],
            (_, Pieces::Closed) => unreachable!("closed forms handled above"),
        }
    }

    /// Exact `∫₀^z v(z′) dz′`.
    pub fn integral(&self, z: f64) -> f64 {
        let z = z.clamp(0.0, self.length);
        match (&self.kind, &self.pieces) {
            (ProfileKind::Uniform(v), _) => v * z,
            (ProfileKind::Linear { start, gradient }, _) => start * z + 0.5 * gradient * z * z,
            (_, Pieces::Linear { z: zs, v, cum }) => {
                let i = segment(zs, z);
                let dz = z - zs[i];
                let slope = (v[i + 1] - v[i]) / (zs[i + 1] - zs[i]);
                cum[i] + v[i] * dz + 0.5 * slope * dz * dz
            }
            (_, Pieces::Steps { z: zs, v, cum }) => {
                let i = segment(zs, z);
                cum[i] + v[i] * (z - zs[i])
            }
            (_, Pieces::Closed) => unreachable!(),
        }
    }

    /// Values at both crystal ends, `(v(0), v(L))`.
    pub fn end_values(&self) -> (f64, f64) {
        (self.value(0.0), self.value(self.length))
    }

    /// Same profile mirrored in `z`.
    pub fn reversed(&self) -> Result<Self> {
        let l = self.length;
        let kind = match &self.kind {
            ProfileKind::Uniform(v) => ProfileKind::Uniform(*v),
            ProfileKind::Linear { start, gradient } => ProfileKind::Linear {
                start: start + gradient * l,
                gradient: -gradient,
            },
            ProfileKind::Sectioned {
                boundaries,
                values,
                interpolation,
            } => ProfileKind::Sectioned {
                boundaries: boundaries.iter().rev().map(|b| l - b).collect(),
                values: values.iter().rev().copied().collect(),
                interpolation: *interpolation,
            },
            ProfileKind::Tabulated(points) => {
                ProfileKind::Tabulated(points.iter().rev().map(|(z, v)| (l - z, *v)).collect())
            }
        };
        Self::new(self.quantity, kind, l)
    }

    /// Node positions where the piecewise form changes slope or value.
    fn nodes(&self) -> Vec<f64> {
        match &self.pieces {
            Pieces::Closed => vec![0.0, self.length],
            Pieces::Linear { z, .. } | Pieces::Steps { z, .. } => z.clone(),
        }
    }
}

/// Index `i` of the piece with `z[i] <= x < z[i+1]` (last piece includes the end).
fn segment(z: &[f64], x: f64) -> usize {
    let i = z.partition_point(|zi| *zi <= x);
    i.saturating_sub(1).min(z.len() - 2)
}

fn build_pieces(kind: &ProfileKind, length: f64) -> Result<Pieces> {
    let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
    match kind {
        ProfileKind::Uniform(v) => {
            if !v.is_finite() {
                return Err(Error::config("uniform profile value not finite"));
            }
            Ok(Pieces::Closed)
        }
        ProfileKind::Linear { start, gradient } => {
            if !(start.is_finite() && gradient.is_finite()) {
                return Err(Error::config("linear profile coefficients not finite"));
            }
            Ok(Pieces::Closed)
        }
        ProfileKind::Sectioned {
            boundaries,
            values,
            interpolation,
        } => {
            let n = values.len();
            if n == 0 || boundaries.len() != n + 1 {
                return Err(Error::config(format!(
                    "sectioned profile needs N >= 1 values and N + 1 boundaries, got {} and {}",
                    n,
                    boundaries.len()
                )));
            }
            if !finite(values) || !finite(boundaries) {
                return Err(Error::config("sectioned profile contains non-finite numbers"));
            }
            let tol = 1e-12 * length;
            if (boundaries[0]).abs() > tol || (boundaries[n] - length).abs() > tol {
                return Err(Error::config("section boundaries must start at 0 and end at L"));
            }
            if boundaries.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::config("section boundaries must be strictly increasing"));
            }
            let mut b = boundaries.clone();
            b[0] = 0.0;
            b[n] = length;
            match interpolation {
                Interpolation::Step => {
                    let mut cum = vec![0.0; n + 1];
                    for i in 0..n {
                        cum[i + 1] = cum[i] + values[i] * (b[i + 1] - b[i]);
                    }
                    let mut v = values.clone();
                    v.push(values[n - 1]);
                    Ok(Pieces::Steps { z: b, v, cum })
                }
                Interpolation::MidpointLinear => {
                    let mut z = vec![0.0];
                    let mut v = vec![values[0]];
                    for i in 0..n {
                        z.push(0.5 * (b[i] + b[i + 1]));
                        v.push(values[i]);
                    }
                    z.push(length);
                    v.push(values[n - 1]);
                    Ok(linear_pieces(z, v))
                }
            }
        }
        ProfileKind::Tabulated(points) => {
            if points.is_empty() {
                return Err(Error::config("tabulated profile needs at least one node"));
            }
            if points.iter().any(|(z, v)| !z.is_finite() || !v.is_finite()) {
                return Err(Error::config("tabulated profile contains non-finite numbers"));
            }
            let tol = 1e-12 * length;
            if points.iter().any(|(z, _)| *z < -tol || *z > length + tol) {
                return Err(Error::config("tabulated nodes must lie within [0, L]"));
            }
            if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(Error::config("tabulated nodes must be strictly increasing in z"));
            }
            let mut z: Vec<f64> = Vec::with_capacity(points.len() + 2);
            let mut v = Vec::with_capacity(points.len() + 2);
            if points[0].0 > tol {
                z.push(0.0);
                v.push(points[0].1);
            }
            for (zi, vi) in points {
                z.push(zi.clamp(0.0, length));
                v.push(*vi);
            }
            let last = *z.last().unwrap();
            if last < length - tol {
                z.push(length);
                v.push(*v.last().unwrap());
            } else {
                *z.last_mut().unwrap() = length;
            }
            if z.len() == 1 {
                z.push(length);
                v.push(v[0]);
            }
            Ok(linear_pieces(z, v))
        }
    }
}

fn linear_pieces(z: Vec<f64>, v: Vec<f64>) -> Pieces {
    let mut cum = vec![0.0; z.len()];
    for i in 0..z.len() - 1 {
        cum[i + 1] = cum[i] + 0.5 * (v[i] + v[i + 1]) * (z[i + 1] - z[i]);
    }
    Pieces::Linear { z, v, cum }
}

const EXTREME_SCAN_POINTS: usize = 4096;

/// Minimum and maximum over `[0, L]`. Closed forms are exact; other kinds use
/// a 4096-point scan plus the profile nodes, refined around the best cells.
pub fn profile_extremes(profile: &LongitudinalProfile) -> Extremes {
    let l = profile.length;
    match profile.kind {
        ProfileKind::Uniform(v) => Extremes {
            min: v,
            max: v,
            argmin: 0.0,
            argmax: 0.0,
        },
        ProfileKind::Linear { start, gradient } => {
            let end = start + gradient * l;
            if gradient >= 0.0 {
                Extremes { min: start, max: end, argmin: 0.0, argmax: l }
            } else {
                Extremes { min: end, max: start, argmin: l, argmax: 0.0 }
            }
        }
        _ => {
            let mut candidates: Vec<f64> = (0..=EXTREME_SCAN_POINTS)
                .map(|i| l * i as f64 / EXTREME_SCAN_POINTS as f64)
                .collect();
            candidates.extend(profile.nodes());
            let mut e = Extremes {
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
                argmin: 0.0,
                argmax: 0.0,
            };
            for &z in &candidates {
                let v = profile.value(z);
                if v < e.min {
                    e.min = v;
                    e.argmin = z;
                }
                if v > e.max {
                    e.max = v;
                    e.argmax = z;
                }
            }
            let cell = l / EXTREME_SCAN_POINTS as f64;
            let (zmin, vmin) = refine(profile, e.argmin, cell, 1.0);
            if vmin < e.min {
                e.min = vmin;
                e.argmin = zmin;
            }
            let (zmax, vmax) = refine(profile, e.argmax, cell, -1.0);
            if -vmax < -e.max {
                e.max = vmax;
                e.argmax = zmax;
            }
            e
        }
    }
}

/// Golden-section search for the extremum of `sign·v` within a cell either side of `z0`.
fn refine(profile: &LongitudinalProfile, z0: f64, cell: f64, sign: f64) -> (f64, f64) {
    let (mut a, mut b) = ((z0 - cell).max(0.0), (z0 + cell).min(profile.length));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |z: f64| sign * profile.value(z);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..60 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let z = 0.5 * (a + b);
    (z, profile.value(z))
}
