//! The content maximal operator, grid A_p and A_1 constants, the (M g)^α
//! generator, A_1 factorization and the weighted L¹ comparison.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choquet::{choquet_wrt, cube_average, WeightedContent};
use crate::content::{Content, ContentParams};
use crate::error::{Error, Result};
use crate::grid::{enumerate_cubes, CubeFamilyPolicy, CubeSpec, DyadicSet, StepFunction};
use crate::report::extended_f64;

/// Constants above this are reported as infinite.
pub const INFINITE_CONSTANT: f64 = 1e15;
/// Default cap for "finite" in the factorization search.
pub const DEFAULT_FACTORIZATION_CAP: f64 = 1e6;
/// Relative slack for comparisons that are exact in real arithmetic.
pub const ROUNDING_SLACK: f64 = 1e-12;

pub fn default_gamma_grid() -> Vec<f64> {
    (0..=10).map(|k| 0.5f64.powi(k)).collect()
}

fn mark_infinite(x: f64) -> f64 {
    if x > INFINITE_CONSTANT {
        f64::INFINITY
    } else {
        x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightReport {
    #[serde(with = "extended_f64")]
    pub ap_constant: f64,
    pub p: f64,
    pub worst_cube: CubeSpec,
    pub policy: CubeFamilyPolicy,
}

/// Maximal function together with, per cell, the index of a maximizing cube.
#[derive(Debug, Clone)]
pub(crate) struct Maximal {
    pub values: Vec<f64>,
    pub argmax: Vec<usize>,
}

pub(crate) fn cube_averages(h: &Content, g: &[f64], cubes: &[CubeSpec]) -> Vec<f64> {
    cubes.par_iter().map(|c| cube_average(h, c, &|i| g[i])).collect()
}

pub(crate) fn maximal_with(h: &Content, w: &[f64], cubes: &[CubeSpec]) -> Maximal {
    let grid = h.grid();
    let avgs = cube_averages(h, w, cubes);
    let mut values = vec![f64::NEG_INFINITY; grid.cell_count()];
    let mut argmax = vec![usize::MAX; grid.cell_count()];
    for (k, cube) in cubes.iter().enumerate() {
        for cell in cube.cells(grid) {
            if avgs[k] > values[cell] {
                values[cell] = avgs[k];
                argmax[cell] = k;
            }
        }
    }
    Maximal { values, argmax }
}

pub fn maximal_function(w: &StepFunction, params: ContentParams, policy: &CubeFamilyPolicy) -> Result<StepFunction> {
    w.require_nonnegative()?;
    let h = Content::new(w.grid(), params)?;
    let cubes = enumerate_cubes(w.grid(), policy);
    StepFunction::new(w.grid(), maximal_with(&h, w.values(), &cubes).values)
}

/// Per-cube products (avg w)(avg w^{−1/(p−1)})^{p−1}.
pub(crate) fn ap_products(h: &Content, w: &StepFunction, p: f64, cubes: &[CubeSpec]) -> Vec<f64> {
    let sigma: Vec<f64> = w.values().iter().map(|v| v.powf(-1.0 / (p - 1.0))).collect();
    let a = cube_averages(h, w.values(), cubes);
    let b = cube_averages(h, &sigma, cubes);
    a.iter().zip(&b).map(|(x, y)| x * y.powf(p - 1.0)).collect()
}

pub(crate) fn ap_constant_on(h: &Content, w: &StepFunction, p: f64, cubes: &[CubeSpec]) -> Result<(f64, usize)> {
    let prods = ap_products(h, w, p, cubes);
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (k, &v) in prods.iter().enumerate() {
        if v < 1.0 - ROUNDING_SLACK {
            return Err(Error::Invariant(format!(
                "A_p product {v} below 1 on cube {} contradicts Hölder",
                cubes[k]
            )));
        }
        if v > best.0 {
            best = (v, k);
        }
    }
    Ok((mark_infinite(best.0), best.1))
}

pub fn ap_constant(w: &StepFunction, p: f64, params: ContentParams, policy: &CubeFamilyPolicy) -> Result<WeightReport> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p = {p} must exceed 1")));
    }
    w.require_positive()?;
    let h = Content::new(w.grid(), params)?;
    let cubes = enumerate_cubes(w.grid(), policy);
    let (value, k) = ap_constant_on(&h, w, p, &cubes)?;
    Ok(WeightReport { ap_constant: value, p, worst_cube: cubes[k].clone(), policy: *policy })
}

pub(crate) fn a1_constant_on(h: &Content, w: &StepFunction, cubes: &[CubeSpec]) -> (f64, CubeSpec) {
    let m = maximal_with(h, w.values(), cubes);
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (i, (&mv, &wv)) in m.values.iter().zip(w.values()).enumerate() {
        let r = mv / wv;
        if r > best.0 {
            best = (r, i);
        }
    }
    (mark_infinite(best.0), cubes[m.argmax[best.1]].clone())
}

pub fn a1_constant(w: &StepFunction, params: ContentParams, policy: &CubeFamilyPolicy) -> Result<WeightReport> {
    w.require_positive()?;
    let h = Content::new(w.grid(), params)?;
    let cubes = enumerate_cubes(w.grid(), policy);
    let (value, worst_cube) = a1_constant_on(&h, w, &cubes);
    Ok(WeightReport { ap_constant: value, p: 1.0, worst_cube, policy: *policy })
}

pub fn power_maximal_weight(
    g: &StepFunction,
    alpha: f64,
    params: ContentParams,
    policy: &CubeFamilyPolicy,
) -> Result<StepFunction> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0,1)")));
    }
    if g.values().iter().all(|&v| v == 0.0) {
        return Err(Error::Precondition("generator is identically zero".into()));
    }
    let m = maximal_function(&g.abs(), params, policy)?;
    m.map(|v| v.powf(alpha))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A1Factorization {
    pub b: StepFunction,
    pub base: StepFunction,
    pub alpha: f64,
    pub gamma: f64,
    /// Grid A_1 constant of w^{1+γ}.
    pub power_a1_constant: f64,
    pub b_min: f64,
    pub b_max: f64,
    /// Largest relative deviation of b·(M base)^α from w.
    pub residual: f64,
}

pub fn a1_factorize(
    w: &StepFunction,
    params: ContentParams,
    gamma_grid: &[f64],
    policy: &CubeFamilyPolicy,
) -> Result<A1Factorization> {
    a1_factorize_with_cap(w, params, gamma_grid, policy, DEFAULT_FACTORIZATION_CAP)
}

pub fn a1_factorize_with_cap(
    w: &StepFunction,
    params: ContentParams,
    gamma_grid: &[f64],
    policy: &CubeFamilyPolicy,
    cap: f64,
) -> Result<A1Factorization> {
    w.require_positive()?;
    if gamma_grid.is_empty() {
        return Err(Error::InvalidParameter("empty gamma grid".into()));
    }
    if let Some(g) = gamma_grid.iter().find(|g| !(**g > 0.0) || !g.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma {g} must be positive")));
    }
    let h = Content::new(w.grid(), params)?;
    let cubes = enumerate_cubes(w.grid(), policy);
    let (a1, _) = a1_constant_on(&h, w, &cubes);
    if !a1.is_finite() {
        return Err(Error::Precondition("weight has no finite grid A_1 constant".into()));
    }
    let mut gammas = gamma_grid.to_vec();
    gammas.sort_by(|a, b| b.total_cmp(a));
    for gamma in gammas {
        let base = w.map(|v| v.powf(1.0 + gamma));
        let Ok(base) = base else { continue };
        let (c, _) = a1_constant_on(&h, &base, &cubes);
        if !(c.is_finite() && c <= cap) {
            continue;
        }
        let alpha = 1.0 / (1.0 + gamma);
        let mb = maximal_with(&h, base.values(), &cubes).values;
        let b = StepFunction::new(
            w.grid(),
            w.values().iter().zip(&mb).map(|(wv, m)| wv * m.powf(-alpha)).collect(),
        )?;
        let residual = w
            .values()
            .iter()
            .zip(b.values().iter().zip(&mb))
            .map(|(wv, (bv, m))| ((bv * m.powf(alpha) - wv) / wv).abs())
            .fold(0.0, f64::max);
        return Ok(A1Factorization {
            b_min: b.min_value(),
            b_max: b.max_value(),
            b,
            base,
            alpha,
            gamma,
            power_a1_constant: c,
            residual,
        });
    }
    Err(Error::Precondition(format!("A_1 constant of w^(1+γ) exceeds the cap {cap} for every γ")))
}

/// Returns (lhs, mid) = (∫|f| w dH̃, ∫|f| d w_H̃) over the root.
pub fn weighted_l1_comparison(f: &StepFunction, w: &StepFunction, params: ContentParams) -> Result<(f64, f64)> {
    if f.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    w.require_positive()?;
    let h = Content::new(f.grid(), params)?;
    let lhs = h.integrate_root(&|i| f.value(i).abs() * w.value(i));
    let wc = WeightedContent::from_content(&h, w)?;
    let mid = choquet_wrt(&f.abs(), &DyadicSet::full(f.grid()), &wc)?;
    Ok((lhs, mid))
}

/// sup_Q [avg_Q w^{1+γ}]^{1/(1+γ)} / avg_Q w for each γ.
pub fn reverse_holder_probe(
    w: &StepFunction,
    params: ContentParams,
    policy: &CubeFamilyPolicy,
    gammas: &[f64],
) -> Result<Vec<(f64, f64)>> {
    w.require_positive()?;
    let h = Content::new(w.grid(), params)?;
    let cubes = enumerate_cubes(w.grid(), policy);
    let base = cube_averages(&h, w.values(), &cubes);
    gammas
        .iter()
        .map(|&g| {
            let pw: Vec<f64> = w.values().iter().map(|v| v.powf(1.0 + g)).collect();
            let hi = cube_averages(&h, &pw, &cubes);
            let r = hi
                .iter()
                .zip(&base)
                .map(|(a, b)| a.powf(1.0 / (1.0 + g)) / b)
                .fold(f64::NEG_INFINITY, f64::max);
            Ok((g, mark_infinite(r)))
        })
        .collect()
}
