//! Numerical checks of the decay, characterization, equivalence, inclusion
//! and factorization statements, plus the survival-curve and envelope tools
//! they share.

mod jn;
mod inequalities;

pub use jn::{jn_analysis, jn_bound_check, verify_jn, CubeCurve, JnAnalysis, JnKind};
pub use inequalities::{
    exponential_bounds, verify_characterization, verify_equivalences, verify_factorization, verify_inclusions,
    weak_restricted_strong_check, CharacterizationInput, CharacterizationKind, ExponentialBounds, FactorizationKind,
    InclusionFamily, InclusionThresholds,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::content::{Content, ContentParams};
use crate::error::{Error, Result};
use crate::grid::{CubeSpec, Grid, StepFunction};
use crate::report::extended_f64;

/// Floor for fitted decay rates.
pub const MIN_DECAY_RATE: f64 = 1e-6;
/// Log-domain slack used when re-checking fitted envelopes.
pub const ENVELOPE_SLACK: f64 = 1e-12;

/// Named test functions, discretized at cell centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FunctionFamily {
    /// ln|x| on [−1,1]^n.
    LogAbs { n: usize },
    /// −ln|x| on [−1,1]^n.
    NegLogAbs { n: usize },
    /// 2 on [0,1) and 0 on [1,2), n = 1.
    Minimizer,
    /// `height` on the first cell of the unit cube, 0 elsewhere.
    Spike { n: usize, height: f64 },
    /// A constant on the unit cube.
    Constant { n: usize, value: f64 },
}

impl FunctionFamily {
    pub fn grid(&self, depth: u32) -> Result<Grid> {
        match *self {
            FunctionFamily::LogAbs { n } | FunctionFamily::NegLogAbs { n } => Grid::new(n, depth, 2.0, vec![-1.0; n]),
            FunctionFamily::Minimizer => Grid::cube(1, depth, 2.0),
            FunctionFamily::Spike { n, .. } | FunctionFamily::Constant { n, .. } => Grid::cube(n, depth, 1.0),
        }
    }

    pub fn discretize(&self, depth: u32) -> Result<StepFunction> {
        let g = self.grid(depth)?;
        let norm = |i: usize| g.cell_center(i).iter().map(|x| x * x).sum::<f64>().sqrt();
        match *self {
            FunctionFamily::LogAbs { .. } => StepFunction::from_fn(&g, |i| norm(i).ln()),
            FunctionFamily::NegLogAbs { .. } => StepFunction::from_fn(&g, |i| -norm(i).ln()),
            FunctionFamily::Minimizer => StepFunction::from_fn(&g, |i| if g.cell_center(i)[0] < 1.0 { 2.0 } else { 0.0 }),
            FunctionFamily::Spike { height, .. } => StepFunction::from_fn(&g, |i| if i == 0 { height } else { 0.0 }),
            FunctionFamily::Constant { value, .. } => StepFunction::constant(&g, value),
        }
    }
}

/// Seeded random step functions: values uniform in [−3, 3], about a fifth of them zero.
pub fn random_functions(grid: &Grid, count: usize, seed: u64) -> Result<Vec<StepFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v = (0..grid.cell_count())
                .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(-3.0..3.0) })
                .collect();
            StepFunction::new(grid, v)
        })
        .collect()
}

/// Content (or weighted content) of {x ∈ Q : |f(x) − center| > t} at each t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub t_samples: Vec<f64>,
    pub survival: Vec<f64>,
    pub normalizer: f64,
}

pub(crate) fn survival_curve_with(
    h: &Content,
    f: &StepFunction,
    center: f64,
    cube: &CubeSpec,
    weight: Option<&StepFunction>,
    t_grid: &[f64],
) -> SurvivalCurve {
    let cells = cube.cells(f.grid());
    let mut ts: Vec<f64> = t_grid.to_vec();
    ts.extend(cells.iter().map(|&i| (f.value(i) - center).abs()));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let w = |i: usize| weight.map_or(1.0, |w| w.value(i));
    let normalizer = match weight {
        Some(_) => h.integrate_cube(cube, &w),
        None => h.of_cube(cube).expect("cube checked"),
    };
    let survival = ts
        .iter()
        .map(|&t| {
            if cells.iter().all(|&i| (f.value(i) - center).abs() <= t) {
                0.0
            } else {
                h.integrate_cube(cube, &|i| if (f.value(i) - center).abs() > t { w(i) } else { 0.0 })
            }
        })
        .collect();
    SurvivalCurve { t_samples: ts, survival, normalizer }
}

pub fn survival_curve(
    f: &StepFunction,
    center: f64,
    cube: &CubeSpec,
    weight: Option<&StepFunction>,
    params: ContentParams,
    t_grid: &[f64],
) -> Result<SurvivalCurve> {
    cube.check(f.grid())?;
    if t_grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("t grid must be increasing and non-negative".into()));
    }
    if let Some(w) = weight {
        if w.grid() != f.grid() {
            return Err(Error::GridMismatch);
        }
        w.require_positive()?;
    }
    let h = Content::new(f.grid(), params)?;
    Ok(survival_curve_with(&h, f, center, cube, weight, t_grid))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFit {
    #[serde(with = "extended_f64")]
    pub c: f64,
    #[serde(with = "extended_f64")]
    pub prefactor: f64,
    pub pass: bool,
    /// Sample index where the envelope is tight, if any sample is positive.
    pub witness: Option<usize>,
}

pub fn fit_envelope(curve: &SurvivalCurve, seminorm: f64) -> Result<EnvelopeFit> {
    if !(seminorm > 0.0) {
        return Err(Error::InvalidParameter(format!("seminorm {seminorm} must be positive")));
    }
    let pts: Vec<(usize, f64, f64)> = curve
        .t_samples
        .iter()
        .zip(&curve.survival)
        .enumerate()
        .filter(|(_, (_, s))| **s > 0.0)
        .map(|(k, (t, s))| (k, t / seminorm, (s / curve.normalizer).ln()))
        .collect();
    if pts.is_empty() {
        return Ok(EnvelopeFit { c: f64::INFINITY, prefactor: 1.0, pass: true, witness: None });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let my = pts.iter().map(|p| -p.2).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.1 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.1 - mx) * (-p.2 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let c = (slope / 2.0).max(MIN_DECAY_RATE);
    let (witness, log_c) = prefactor_at(curve, seminorm, c);
    let prefactor = log_c.exp();
    Ok(EnvelopeFit { c, prefactor, pass: c > 0.0 && prefactor.is_finite(), witness })
}

/// Smallest C with survival ≤ C·normalizer·e^{−c t/seminorm} at every sample, as ln C.
pub(crate) fn prefactor_at(curve: &SurvivalCurve, seminorm: f64, c: f64) -> (Option<usize>, f64) {
    curve
        .t_samples
        .iter()
        .zip(&curve.survival)
        .enumerate()
        .filter(|(_, (_, s))| **s > 0.0)
        .map(|(k, (t, s))| (k, (s / curve.normalizer).ln() + c * t / seminorm))
        .fold((None, f64::NEG_INFINITY), |b, (k, v)| if v > b.1 { (Some(k), v) } else { b })
}

/// Checks survival ≤ C·normalizer·e^{−c t/seminorm} at every sample, in log form.
/// Returns the largest log excess (≤ 0 when the bound holds).
pub fn envelope_excess(curve: &SurvivalCurve, seminorm: f64, c: f64, prefactor: f64) -> f64 {
    let (_, log_c) = prefactor_at(curve, seminorm, c);
    if log_c == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    log_c - prefactor.ln()
}

pub fn envelope_holds(curve: &SurvivalCurve, seminorm: f64, fit: &EnvelopeFit) -> bool {
    !fit.c.is_finite() && curve.survival.iter().all(|&s| s == 0.0)
        || envelope_excess(curve, seminorm, fit.c, fit.prefactor) <= ENVELOPE_SLACK
}
