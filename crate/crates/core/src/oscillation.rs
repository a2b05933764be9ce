//! Mean, signed-average and lower oscillation seminorms, the weighted q-power
//! variant, and the per-cube objective F(c) with its minimizer interval.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choquet::signed_average_with;
use crate::content::{Content, ContentParams};
use crate::error::{Error, Result};
use crate::grid::{enumerate_cubes, CubeFamilyPolicy, CubeSpec, StepFunction};

/// Default resolution of the search over centers.
pub const DEFAULT_TOL: f64 = 1e-9;

/// F(c) = (1/w_H(Q)) ∫_Q |f − c|^q w dH̃ on one cube, with w ≡ 1 when absent.
pub(crate) struct Objective<'a> {
    h: &'a Content,
    f: &'a StepFunction,
    w: Option<&'a StepFunction>,
    q: f64,
    cube: &'a CubeSpec,
    norm: f64,
    single: Option<usize>,
}

impl<'a> Objective<'a> {
    pub(crate) fn new(
        h: &'a Content,
        f: &'a StepFunction,
        w: Option<&'a StepFunction>,
        q: f64,
        cube: &'a CubeSpec,
    ) -> Self {
        let single = (cube.side_cells == 1).then(|| h.grid().cell_index(&cube.corner).expect("cube checked"));
        let norm = match w {
            Some(w) => h.integrate_cube(cube, &|i| w.value(i)),
            None => h.of_cube(cube).expect("cube checked"),
        };
        Objective { h, f, w, q, cube, norm, single }
    }

    pub(crate) fn eval(&self, c: f64) -> f64 {
        if let Some(i) = self.single {
            return (self.f.value(i) - c).abs().powf(self.q);
        }
        let q = self.q;
        let integral = match self.w {
            Some(w) => self
                .h
                .integrate_cube(self.cube, &|i| (self.f.value(i) - c).abs().powf(q) * w.value(i)),
            None => self.h.integrate_cube(self.cube, &|i| (self.f.value(i) - c).abs().powf(q)),
        };
        integral / self.norm
    }

    fn value_range(&self) -> (f64, f64) {
        self.cube
            .cells(self.h.grid())
            .iter()
            .map(|&i| self.f.value(i))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
    }

    fn distinct_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.cube.cells(self.h.grid()).iter().map(|&i| self.f.value(i)).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// Golden-section search for the minimum of a convex function on [a, b].
fn golden_min(obj: &Objective, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = obj.eval(x1);
    let mut f2 = obj.eval(x2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = obj.eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = obj.eval(x2);
        }
        if !(x1 > a && x2 < b) {
            break;
        }
    }
    let mid = 0.5 * (a + b);
    let fm = obj.eval(mid);
    [(x1, f1), (x2, f2), (mid, fm)]
        .into_iter()
        .fold((mid, fm), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Minimum of F over c, also tried at the given extra centers.
pub(crate) fn minimize(obj: &Objective, extra: &[f64], tol: f64) -> (f64, f64) {
    let (lo, hi) = obj.value_range();
    if lo == hi {
        return (lo, obj.eval(lo));
    }
    let mut best = if obj.q >= 1.0 {
        golden_min(obj, lo - 1.0, hi + 1.0, tol)
    } else {
        grid_min(obj, tol).0
    };
    for &c in extra {
        let v = obj.eval(c);
        if v < best.1 {
            best = (c, v);
        }
    }
    best
}

fn grid_candidates(obj: &Objective) -> Vec<f64> {
    let vals = obj.distinct_values();
    let (lo, hi) = (vals[0], vals[vals.len() - 1]);
    let mut cand = vals.clone();
    cand.extend(vals.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let steps = 1000;
    cand.extend((0..=steps).map(|k| lo - 1.0 + (hi - lo + 2.0) * k as f64 / steps as f64));
    cand.sort_by(f64::total_cmp);
    cand.dedup();
    cand
}

/// Exhaustive search over value breakpoints, midpoints and a uniform grid.
fn grid_min(obj: &Objective, tol: f64) -> ((f64, f64), (f64, f64)) {
    let cand = grid_candidates(obj);
    let vals: Vec<f64> = cand.iter().map(|&c| obj.eval(c)).collect();
    let (k, &m) = vals
        .iter()
        .enumerate()
        .fold((0, &vals[0]), |b, c| if c.1 < b.1 { c } else { b });
    let inside: Vec<f64> = cand
        .iter()
        .zip(&vals)
        .filter(|(_, &v)| v <= m + tol)
        .map(|(&c, _)| c)
        .collect();
    ((cand[k], m), (inside[0], inside[inside.len() - 1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaInterval {
    pub lo: f64,
    pub hi: f64,
    pub min_value: f64,
    pub argmin: f64,
    pub tol: f64,
    /// Set when q < 1 and the interval comes from a grid search instead of
    /// the convex search.
    pub grid_search: bool,
}

pub fn oscillation_objective(
    f: &StepFunction,
    w: Option<&StepFunction>,
    q: f64,
    cube: &CubeSpec,
    params: ContentParams,
    c: f64,
) -> Result<f64> {
    let h = prepare(f, w, q, params)?;
    cube.check(f.grid())?;
    Ok(Objective::new(&h, f, w, q, cube).eval(c))
}

fn prepare(f: &StepFunction, w: Option<&StepFunction>, q: f64, params: ContentParams) -> Result<Content> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("q = {q} must be positive")));
    }
    if let Some(w) = w {
        if w.grid() != f.grid() {
            return Err(Error::GridMismatch);
        }
        w.require_positive()?;
    }
    Content::new(f.grid(), params)
}

/// Walks from `inside` (F ≤ thr) towards `outside` (F > thr) and returns the
/// last point found with F ≤ thr.
fn plateau_edge(obj: &Objective, mut inside: f64, mut outside: f64, thr: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if obj.eval(mid) <= thr {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

pub fn gamma_interval(
    f: &StepFunction,
    w: Option<&StepFunction>,
    q: f64,
    cube: &CubeSpec,
    params: ContentParams,
    tol: f64,
) -> Result<GammaInterval> {
    let h = prepare(f, w, q, params)?;
    cube.check(f.grid())?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol = {tol} must be positive")));
    }
    let obj = Objective::new(&h, f, w, q, cube);
    if q < 1.0 {
        let ((argmin, min_value), (lo, hi)) = grid_min(&obj, tol);
        return Ok(GammaInterval { lo, hi, min_value, argmin, tol, grid_search: true });
    }
    let (vlo, vhi) = obj.value_range();
    let (argmin, min_value) = minimize(&obj, &[], tol);
    let thr = min_value + tol;
    let mut left = vlo - 1.0;
    while obj.eval(left) <= thr {
        left -= 2.0 * (argmin - left).max(1.0);
    }
    let mut right = vhi + 1.0;
    while obj.eval(right) <= thr {
        right += 2.0 * (right - argmin).max(1.0);
    }
    Ok(GammaInterval {
        lo: plateau_edge(&obj, argmin, left, thr),
        hi: plateau_edge(&obj, argmin, right, thr),
        min_value,
        argmin,
        tol,
        grid_search: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    InfC,
    FQDelta,
}

/// Which oscillation a seminorm measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Oscillation {
    /// inf over c of the average of |f − c|.
    Bmo,
    /// Average of |f − f_{Q,δ}|.
    BmoTilde,
    /// Average of f − esinf.
    Blo,
    /// [average of (f − esinf)^q]^{1/q}.
    BloQ { q: f64 },
    /// inf over c of [w-average of |f − c|^q]^{1/q}.
    Weighted { q: f64 },
}

impl Oscillation {
    fn q(&self) -> f64 {
        match *self {
            Oscillation::BloQ { q } | Oscillation::Weighted { q } => q,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeOscillation {
    pub cube: CubeSpec,
    pub center: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub value: f64,
    pub worst_cube: CubeSpec,
    pub per_cube_centers: BTreeMap<String, f64>,
    pub per_cube: Vec<CubeOscillation>,
}

impl SeminormReport {
    fn assemble(per_cube: Vec<CubeOscillation>) -> Self {
        let worst = per_cube
            .iter()
            .enumerate()
            .fold(0, |b, (k, c)| if c.value > per_cube[b].value { k } else { b });
        SeminormReport {
            value: per_cube[worst].value,
            worst_cube: per_cube[worst].cube.clone(),
            per_cube_centers: per_cube.iter().map(|c| (c.cube.to_string(), c.center)).collect(),
            per_cube,
        }
    }
}

pub(crate) fn cube_oscillation(
    h: &Content,
    f: &StepFunction,
    w: Option<&StepFunction>,
    kind: Oscillation,
    cube: &CubeSpec,
    tol: f64,
) -> CubeOscillation {
    let q = kind.q();
    let weight = match kind {
        Oscillation::Weighted { .. } => w,
        _ => None,
    };
    let obj = Objective::new(h, f, weight, q, cube);
    let (esinf, esup) = obj.value_range();
    let (center, raw) = match kind {
        Oscillation::Bmo | Oscillation::Weighted { .. } => {
            let fq = signed_average_with(h, f, cube).value;
            minimize(&obj, &[fq, esinf, esup], tol)
        }
        Oscillation::BmoTilde => {
            let fq = signed_average_with(h, f, cube).value;
            (fq, obj.eval(fq))
        }
        Oscillation::Blo | Oscillation::BloQ { .. } => (esinf, obj.eval(esinf)),
    };
    CubeOscillation { cube: cube.clone(), center, value: raw.powf(1.0 / q) }
}

pub fn seminorm_on_cubes(
    f: &StepFunction,
    w: Option<&StepFunction>,
    kind: Oscillation,
    params: ContentParams,
    cubes: &[CubeSpec],
) -> Result<SeminormReport> {
    let h = prepare(f, w, kind.q(), params)?;
    if matches!(kind, Oscillation::Weighted { .. }) && w.is_none() {
        return Err(Error::InvalidParameter("weighted seminorm needs a weight".into()));
    }
    if cubes.is_empty() {
        return Err(Error::InvalidParameter("empty cube family".into()));
    }
    for c in cubes {
        c.check(f.grid())?;
    }
    let per_cube: Vec<CubeOscillation> = cubes
        .par_iter()
        .map(|c| cube_oscillation(&h, f, w, kind, c, DEFAULT_TOL))
        .collect();
    Ok(SeminormReport::assemble(per_cube))
}

pub fn bmo_seminorm(
    f: &StepFunction,
    params: ContentParams,
    policy: &CubeFamilyPolicy,
    centering: Centering,
) -> Result<SeminormReport> {
    let kind = match centering {
        Centering::InfC => Oscillation::Bmo,
        Centering::FQDelta => Oscillation::BmoTilde,
    };
    seminorm_on_cubes(f, None, kind, params, &enumerate_cubes(f.grid(), policy))
}

pub fn blo_seminorm(f: &StepFunction, params: ContentParams, policy: &CubeFamilyPolicy) -> Result<SeminormReport> {
    seminorm_on_cubes(f, None, Oscillation::Blo, params, &enumerate_cubes(f.grid(), policy))
}

pub fn blo_q_seminorm(
    f: &StepFunction,
    q: f64,
    params: ContentParams,
    policy: &CubeFamilyPolicy,
) -> Result<SeminormReport> {
    seminorm_on_cubes(f, None, Oscillation::BloQ { q }, params, &enumerate_cubes(f.grid(), policy))
}

pub fn weighted_bmo_seminorm(
    f: &StepFunction,
    w: &StepFunction,
    q: f64,
    params: ContentParams,
    policy: &CubeFamilyPolicy,
) -> Result<SeminormReport> {
    seminorm_on_cubes(f, Some(w), Oscillation::Weighted { q }, params, &enumerate_cubes(f.grid(), policy))
}
