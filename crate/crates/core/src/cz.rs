//! Weighted Calderón–Zygmund stopping-time decomposition over dyadic subcubes.

use serde::{Deserialize, Serialize};

use crate::content::{Content, ContentParams};
use crate::error::{Error, Result};
use crate::grid::{CubeSpec, StepFunction};
use crate::report::VerificationReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CZResult {
    pub selected: Vec<CubeSpec>,
    pub lambda: f64,
    /// Average of |f| over each selected cube divided by lambda.
    pub ratios: Vec<f64>,
    /// w_H̃(parent) / w_H̃(cube) for each selected cube.
    pub parent_ratios: Vec<f64>,
}

struct Averager<'a> {
    h: Content,
    f: &'a StepFunction,
    w: &'a StepFunction,
}

impl<'a> Averager<'a> {
    fn new(f: &'a StepFunction, w: &'a StepFunction, params: ContentParams) -> Result<Self> {
        if f.grid() != w.grid() {
            return Err(Error::GridMismatch);
        }
        w.require_positive()?;
        Ok(Averager { h: Content::new(f.grid(), params)?, f, w })
    }

    fn mass(&self, cube: &CubeSpec) -> f64 {
        self.h.integrate_cube(cube, &|i| self.w.value(i))
    }

    /// (1/w_H̃(Q)) ∫_Q |f| w dH̃, which on a single cell is |f| there.
    fn average(&self, cube: &CubeSpec) -> f64 {
        if cube.side_cells == 1 {
            let cell = self.h.grid().cell_index(&cube.corner).expect("cube checked");
            return self.f.value(cell).abs();
        }
        self.h.integrate_cube(cube, &|i| self.f.value(i).abs() * self.w.value(i)) / self.mass(cube)
    }

    fn descend(&self, cube: &CubeSpec, lambda: f64, out: &mut Vec<CubeSpec>) {
        if cube.side_cells == 1 {
            return;
        }
        for child in cube.children() {
            if self.average(&child) > lambda {
                out.push(child);
            } else {
                self.descend(&child, lambda, out);
            }
        }
    }

    fn dyadic_subcubes(&self, root: &CubeSpec) -> Vec<CubeSpec> {
        let mut all = vec![root.clone()];
        let mut k = 0;
        while k < all.len() {
            if all[k].side_cells > 1 {
                let kids = all[k].children();
                all.extend(kids);
            }
            k += 1;
        }
        all
    }
}

fn check_root(f: &StepFunction, cube: &CubeSpec) -> Result<()> {
    cube.check(f.grid())?;
    if !cube.is_dyadic() {
        return Err(Error::NotDyadic(cube.to_string()));
    }
    Ok(())
}

pub fn cz_decompose(
    f: &StepFunction,
    w: &StepFunction,
    cube: &CubeSpec,
    lambda: f64,
    params: ContentParams,
) -> Result<CZResult> {
    check_root(f, cube)?;
    let avg = Averager::new(f, w, params)?;
    let root_avg = avg.average(cube);
    if !(lambda > 0.0) || lambda < root_avg {
        return Err(Error::Precondition(format!(
            "lambda = {lambda} must be positive and at least the average {root_avg} over {cube}"
        )));
    }
    let mut selected = Vec::new();
    avg.descend(cube, lambda, &mut selected);
    selected.sort();
    let ratios = selected.iter().map(|c| avg.average(c) / lambda).collect();
    let parent_ratios = selected
        .iter()
        .map(|c| avg.mass(&c.parent(f.grid()).expect("selected cubes are strict subcubes")) / avg.mass(c))
        .collect();
    Ok(CZResult { selected, lambda, ratios, parent_ratios })
}

pub fn cz_verify(
    f: &StepFunction,
    w: &StepFunction,
    cube: &CubeSpec,
    lambda: f64,
    params: ContentParams,
    result: &CZResult,
) -> Result<VerificationReport> {
    check_root(f, cube)?;
    if result.lambda != lambda
        || result.ratios.len() != result.selected.len()
        || result.parent_ratios.len() != result.selected.len()
    {
        return Err(Error::InvalidParameter("result does not belong to these inputs".into()));
    }
    let grid = f.grid();
    let avg = Averager::new(f, w, params)?;
    let mut rep = VerificationReport::new("cz", 0);
    rep.param("cube", cube.to_string()).param("lambda", crate::report::num(lambda)).param("delta", crate::report::num(params.delta));

    // (a) dyadic, inside Q, pairwise disjoint, maximal.
    let sel = &result.selected;
    for (k, c) in sel.iter().enumerate() {
        if c.check(grid).is_err() || !c.is_dyadic() || !cube.contains_cube(c) || c == cube {
            rep.fail(format!("(a) {c} is not a dyadic strict subcube of {cube}"));
        }
        for d in &sel[k + 1..] {
            if c.intersects(d) {
                rep.fail(format!("(a) {c} and {d} overlap"));
            }
        }
    }
    let covered = |q: &CubeSpec| sel.iter().any(|s| s.contains_cube(q));
    for q in avg.dyadic_subcubes(cube) {
        let a = avg.average(&q);
        let is_sel = sel.contains(&q);
        let has_sel_below = sel.iter().any(|s| q.contains_cube(s) && *s != q);
        if a > lambda && !covered(&q) {
            rep.fail(format!("(a) {q} has average {a} > lambda but no selected cube covers it"));
        }
        // (d), strict ancestors
        if has_sel_below && a > lambda {
            rep.fail(format!("(d) ancestor {q} has average {a} > lambda"));
        }
        if is_sel && a <= lambda {
            rep.fail(format!("(b) {q} has average {a} <= lambda"));
        }
    }
    // (c) cell-wise bound off the selected union.
    let mut bad_cells = 0usize;
    for cell in cube.cells(grid) {
        if !sel.iter().any(|s| s.contains_cell(grid, cell)) && f.value(cell).abs() > lambda {
            bad_cells += 1;
            if bad_cells <= 8 {
                rep.fail(format!("(c) |f| = {} > lambda at cell {cell}", f.value(cell).abs()));
            }
        }
    }
    // (d), the computable form of the C0 lambda bound.
    let mut max_parent_ratio = 0f64;
    let mut max_ratio = 0f64;
    for (k, c) in sel.iter().enumerate() {
        let Some(parent) = c.parent(grid) else { continue };
        let pr = avg.mass(&parent) / avg.mass(c);
        let a = avg.average(c);
        max_parent_ratio = max_parent_ratio.max(pr);
        max_ratio = max_ratio.max(a / lambda);
        if a > lambda * pr {
            rep.fail(format!("(d) {c}: average {a} > lambda * parent ratio {pr}"));
        }
        if pr != result.parent_ratios[k] {
            rep.fail(format!("recorded parent ratio {} for {c} differs from {pr}", result.parent_ratios[k]));
        }
    }
    rep.constant("selected", sel.len() as f64)
        .constant("max_parent_ratio", max_parent_ratio)
        .constant("max_ratio", max_ratio);
    Ok(rep)
}
