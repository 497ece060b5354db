//! Inverse design of longitudinal profiles: bounded simplex search for the
//! parameters whose spectrum best matches a target shape.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crystal::CrystalRecord;
use crate::error::{Error, Result};
use crate::interp::UniformCubicSpline;
use crate::phase_matching::{MatchingConfig, MismatchEvaluator, PhaseMatcher, PhaseMode, Poling};
use crate::profile::{Interpolation, LongitudinalProfile, Quantity};
use crate::spectral::{
    amplitude_inhomogeneous, outermost_crossings, spectral_intensity, FrequencyGrid, QuadratureSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub lower: f64,
    pub upper: f64,
}

impl Bound {
    pub fn new(lower: f64, upper: f64) -> Self {
        Bound { lower, upper }
    }

    pub fn is_collapsed(&self) -> bool {
        self.lower == self.upper
    }

    fn value_at_logit(self, u: f64) -> f64 {
        if self.is_collapsed() {
            return self.lower;
        }
        self.lower + (self.upper - self.lower) / (1.0 + (-u).exp())
    }

    fn logit_of(self, x: f64) -> f64 {
        let r = ((x - self.lower) / (self.upper - self.lower)).clamp(1e-12, 1.0 - 1e-12);
        (r / (1.0 - r)).ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Parameterization {
    /// Equal-length sections, one temperature (°C) per bound.
    SectionedTemperature {
        bounds: Vec<Bound>,
        #[serde(default)]
        interpolation: Interpolation,
    },
    /// Temperature gradient (K/m) starting from the problem temperature at `z = 0`.
    LinearGradient { bounds: Bound },
    /// Equal-length sections, one field (V/m) per bound.
    SectionedField {
        bounds: Vec<Bound>,
        #[serde(default)]
        interpolation: Interpolation,
    },
    /// Poling chirp rate (rad/µm²) around the base wavenumber `kg0` (rad/µm).
    PolingChirp { kg0: f64, bounds: Bound },
}

impl Parameterization {
    pub fn bounds(&self) -> Vec<Bound> {
        match self {
            Parameterization::SectionedTemperature { bounds, .. } | Parameterization::SectionedField { bounds, .. } => {
                bounds.clone()
            }
            Parameterization::LinearGradient { bounds } | Parameterization::PolingChirp { bounds, .. } => vec![*bounds],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LossNorm {
    /// Root-mean-square difference.
    #[default]
    L2,
    /// Mean absolute difference.
    L1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimplexSpec {
    pub seed: u64,
    pub restarts: usize,
    pub max_evaluations: usize,
    /// Stop once the loss spread across the simplex falls below this.
    pub tolerance: f64,
    /// Edge of the initial simplex in sigmoid coordinates.
    pub initial_step: f64,
}

impl Default for SimplexSpec {
    fn default() -> Self {
        SimplexSpec { seed: 0, restarts: 8, max_evaluations: 2000, tolerance: 1e-12, initial_step: 1.0 }
    }
}

/// Peak-normalized target sampled on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub grid: FrequencyGrid,
    pub values: Vec<f64>,
}

impl Target {
    /// Rescales `values` to unit peak.
    pub fn normalized(grid: FrequencyGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::config("target length differs from its grid"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::config("target must be finite and non-negative"));
        }
        let peak = values.iter().copied().fold(0.0f64, f64::max);
        if !(peak > 0.0) {
            return Err(Error::config("target is identically zero"));
        }
        Ok(Target { grid, values: values.into_iter().map(|v| v / peak).collect() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignProblem {
    pub cfg: MatchingConfig,
    pub parameterization: Parameterization,
    pub target: Target,
    /// Grid of the forward model; the target grid when absent.
    #[serde(default)]
    pub forward_grid: Option<FrequencyGrid>,
    #[serde(default)]
    pub loss: LossNorm,
    #[serde(default)]
    pub optimizer: SimplexSpec,
    /// Uniform temperature (°C) for controls the parameterization leaves free.
    pub temperature: f64,
    /// Uniform field (V/m) for controls the parameterization leaves free.
    #[serde(default)]
    pub field: f64,
    #[serde(default)]
    pub phase_mode: PhaseMode,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

impl DesignProblem {
    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        let bounds = self.parameterization.bounds();
        if bounds.is_empty() {
            return Err(Error::config("design problem has no parameters"));
        }
        for (i, b) in bounds.iter().enumerate() {
            if !(b.lower.is_finite() && b.upper.is_finite()) || b.lower > b.upper {
                return Err(Error::config(format!("parameter {i}: bounds must be finite and ordered")));
            }
        }
        if self.target.values.len() != self.target.grid.len() {
            return Err(Error::config("target length differs from its grid"));
        }
        let peak = self.target.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if (peak - 1.0).abs() > 1e-12 || self.target.values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::config("target must be non-negative with unit peak"));
        }
        if let Some(g) = self.forward_grid {
            if g.half_span() < self.target.grid.half_span() * (1.0 - 1e-12) {
                return Err(Error::config("forward grid does not cover the target grid"));
            }
        }
        if self.optimizer.restarts == 0 || self.optimizer.max_evaluations == 0 {
            return Err(Error::config("optimizer needs at least one restart and one evaluation"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub start: Vec<f64>,
    pub best: Vec<f64>,
    pub loss: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    pub parameters: Vec<f64>,
    /// Peak-normalized achieved spectrum on the target grid.
    pub achieved: Vec<f64>,
    pub loss: f64,
    /// Loss per evaluation, restarts concatenated in index order.
    pub loss_trace: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
    pub best_restart: usize,
    /// Candidates whose forward model failed; they were scored `+∞`.
    pub failed_evaluations: usize,
    pub restarts: Vec<RestartSummary>,
}

/// Distance between two peak-normalized spectra on the same grid.
pub fn loss(achieved: &[f64], target: &[f64], norm: LossNorm) -> Result<f64> {
    if achieved.len() != target.len() || target.is_empty() {
        return Err(Error::config("loss needs two spectra of equal, non-zero length"));
    }
    let n = target.len() as f64;
    let diffs = achieved.iter().zip(target).map(|(a, t)| a - t);
    Ok(match norm {
        LossNorm::L2 => (diffs.map(|d| d * d).sum::<f64>() / n).sqrt(),
        LossNorm::L1 => diffs.map(f64::abs).sum::<f64>() / n,
    })
}

/// `std/mean` over the central 80% of the range where `S` exceeds 5% of its peak.
pub fn flatness(s: &[f64]) -> Option<f64> {
    let peak = s.iter().copied().fold(0.0f64, f64::max);
    if !(peak > 0.0) {
        return None;
    }
    let (l, r) = outermost_crossings(s, 0.0, 1.0, 0.05 * peak)?;
    let (a, b) = (l + 0.1 * (r - l), r - 0.1 * (r - l));
    let band: Vec<f64> = (a.ceil() as usize..=b.floor() as usize).map(|j| s[j]).collect();
    if band.len() < 2 {
        return None;
    }
    let mean = band.iter().sum::<f64>() / band.len() as f64;
    let var = band.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / band.len() as f64;
    Some(var.sqrt() / mean)
}

fn normalize_peak(mut s: Vec<f64>) -> Vec<f64> {
    let peak = s.iter().copied().fold(0.0f64, f64::max);
    if peak > 0.0 {
        s.iter_mut().for_each(|v| *v /= peak);
    }
    s
}

/// Peak-normalized spectrum of the forward model at `params`, sampled on the
/// target grid.
pub fn forward_spectrum(problem: &DesignProblem, crystal: &CrystalRecord, params: &[f64]) -> Result<Vec<f64>> {
    let cfg = &problem.cfg;
    let length = cfg.crystal_length;
    let grid = problem.forward_grid.unwrap_or(problem.target.grid);
    let matcher = PhaseMatcher::new(crystal, cfg.clone())?;
    let (t, e) = (problem.temperature, problem.field);
    let profile = match &problem.parameterization {
        Parameterization::SectionedTemperature { interpolation, .. } => Some(LongitudinalProfile::sectioned_equal(
            Quantity::Temperature,
            params.to_vec(),
            *interpolation,
            length,
        )?),
        Parameterization::SectionedField { interpolation, .. } => Some(LongitudinalProfile::sectioned_equal(
            Quantity::Field,
            params.to_vec(),
            *interpolation,
            length,
        )?),
        Parameterization::LinearGradient { .. } => Some(LongitudinalProfile::linear(Quantity::Temperature, t, params[0], length)?),
        Parameterization::PolingChirp { .. } => None,
    };
    let amp = match (&problem.parameterization, &profile) {
        (Parameterization::PolingChirp { kg0, .. }, _) => {
            let m = matcher.with_poling(Poling::Chirped { kg0: *kg0, chirp: params[0] });
            let ev = MismatchEvaluator::homogeneous(m, t, e);
            amplitude_inhomogeneous(&ev, &grid, problem.phase_mode, &problem.quadrature)?
        }
        (_, Some(p)) => {
            let ev = MismatchEvaluator::with_profile(matcher, p, t, e)?;
            amplitude_inhomogeneous(&ev, &grid, problem.phase_mode, &problem.quadrature)?
        }
        _ => unreachable!("every profile parameterization builds a profile"),
    };
    let s = spectral_intensity(&amp);
    if grid == problem.target.grid {
        return Ok(normalize_peak(s));
    }
    let spline = UniformCubicSpline::new(grid.omega(0), grid.spacing(), s);
    let sampled = problem
        .target
        .grid
        .omegas()
        .iter()
        .map(|&w| spline.eval(w).map(|v| v.max(0.0)))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::config("target grid lies outside the forward grid"))?;
    Ok(normalize_peak(sampled))
}

struct Outcome {
    summary: RestartSummary,
    trace: Vec<f64>,
    failed: usize,
}

/// One Nelder–Mead descent from `u0`. `f` returns `None` once the evaluation
/// budget is spent. Returns the best vertex and whether the loss spread fell
/// below `tol`.
fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> Option<f64>,
    u0: &[f64],
    f0: f64,
    step: f64,
    tol: f64,
) -> (Vec<f64>, f64, bool) {
    let n = u0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(u0.to_vec(), f0)];
    for k in 0..n {
        let mut v = u0.to_vec();
        v[k] += step;
        match f(&v) {
            Some(fv) => simplex.push((v, fv)),
            None => return (u0.to_vec(), f0, false),
        }
    }
    let best = |s: &[(Vec<f64>, f64)]| s.iter().min_by(|a, b| a.1.total_cmp(&b.1)).cloned().expect("vertex");
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread.is_finite() && spread <= tol {
            let (u, l) = best(&simplex);
            return (u, l, true);
        }
        let centroid: Vec<f64> = (0..n).map(|k| simplex[..n].iter().map(|p| p.0[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64, worst: &[f64]| -> Vec<f64> { centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(1.0, &simplex[n].0);
        let Some(fr) = f(&xr) else { break };
        if fr < simplex[0].1 {
            let xe = along(2.0, &simplex[n].0);
            let Some(fe) = f(&xe) else {
                simplex[n] = (xr, fr);
                break;
            };
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let t = if fr < simplex[n].1 { 0.5 } else { -0.5 };
            let xc = along(t, &simplex[n].0);
            let Some(fc) = f(&xc) else { break };
            if fc < fr.min(simplex[n].1) {
                simplex[n] = (xc, fc);
            } else {
                // shrink toward the best vertex
                let b = simplex[0].0.clone();
                for p in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = b.iter().zip(&p.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                    let Some(fv) = f(&v) else {
                        let (u, l) = best(&simplex);
                        return (u, l, false);
                    };
                    *p = (v, fv);
                }
            }
        }
    }
    let (u, l) = best(&simplex);
    (u, l, false)
}

/// Nelder–Mead on the sigmoid-transformed box, re-seeded at its best vertex
/// after each collapse until a descent stops improving or the budget runs out.
fn run_restart(problem: &DesignProblem, crystal: &CrystalRecord, bounds: &[Bound], index: usize) -> Outcome {
    let spec = &problem.optimizer;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let start: Vec<f64> = bounds
        .iter()
        .map(|b| if b.is_collapsed() { b.lower } else { b.lower + (b.upper - b.lower) * rng.gen_range(0.1..0.9) })
        .collect();
    let free: Vec<usize> = (0..bounds.len()).filter(|&i| !bounds[i].is_collapsed()).collect();
    let decode = |u: &[f64]| -> Vec<f64> {
        let mut x = start.clone();
        for (k, &i) in free.iter().enumerate() {
            x[i] = bounds[i].value_at_logit(u[k]);
        }
        x
    };

    let mut trace = Vec::new();
    let mut failed = 0;
    let mut f = |u: &[f64]| -> Option<f64> {
        if trace.len() >= spec.max_evaluations {
            return None;
        }
        let l = forward_spectrum(problem, crystal, &decode(u))
            .and_then(|s| loss(&s, &problem.target.values, problem.loss))
            .unwrap_or_else(|_| {
                failed += 1;
                f64::INFINITY
            });
        trace.push(l);
        // the simplex runs on the squared RMS, which is smooth at the optimum
        Some(match problem.loss {
            LossNorm::L2 => l * l,
            LossNorm::L1 => l,
        })
    };

    let mut u: Vec<f64> = free.iter().map(|&i| bounds[i].logit_of(start[i])).collect();
    let mut l = f(&u).expect("budget allows one evaluation");
    let mut converged = free.is_empty();
    let mut from = u.clone();
    let mut from_loss = l;
    // descend, re-seed at the best vertex while that helps, then hop to a
    // perturbed point until the budget is spent
    while !free.is_empty() {
        let (nu, nl, collapsed) = nelder_mead(&mut f, &from, from_loss, spec.initial_step, spec.tolerance);
        let improved = nl < l - spec.tolerance;
        if nl < l {
            u = nu.clone();
            l = nl;
            converged = collapsed;
        }
        if !collapsed {
            break;
        }
        if improved && nl <= l {
            from = nu;
            from_loss = nl;
            continue;
        }
        from = u.iter().map(|x| x + 3.0 * spec.initial_step * (2.0 * rng.gen::<f64>() - 1.0)).collect();
        match f(&from) {
            Some(v) => from_loss = v,
            None => break,
        }
    }
    // the best vertex is also the best evaluation, reported in the chosen norm
    let best_loss = trace.iter().copied().fold(f64::INFINITY, f64::min);
    Outcome {
        summary: RestartSummary { start: start.clone(), best: decode(&u), loss: best_loss, evaluations: trace.len(), converged },
        trace,
        failed,
    }
}

/// Restarts run in parallel; the winner is chosen by `(loss, restart index)`.
pub fn design_profile(problem: &DesignProblem, crystal: &CrystalRecord) -> Result<DesignResult> {
    problem.validate()?;
    let bounds = problem.parameterization.bounds();
    let outcomes: Vec<Outcome> = (0..problem.optimizer.restarts)
        .into_par_iter()
        .map(|i| run_restart(problem, crystal, &bounds, i))
        .collect();
    let (best_restart, best) = outcomes
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.summary.loss.total_cmp(&b.1.summary.loss).then(a.0.cmp(&b.0)))
        .expect("at least one restart");
    if !best.summary.loss.is_finite() {
        return Err(Error::Degenerate("forward model failed at every candidate".into()));
    }
    let achieved = forward_spectrum(problem, crystal, &best.summary.best)?;
    Ok(DesignResult {
        parameters: best.summary.best.clone(),
        achieved,
        loss: best.summary.loss,
        loss_trace: outcomes.iter().flat_map(|o| o.trace.iter().copied()).collect(),
        evaluations: outcomes.iter().map(|o| o.trace.len()).sum(),
        converged: best.summary.converged,
        best_restart,
        failed_evaluations: outcomes.iter().map(|o| o.failed).sum(),
        restarts: outcomes.into_iter().map(|o| o.summary).collect(),
    })
}
