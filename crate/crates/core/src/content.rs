//! Dyadic Hausdorff content of cell sets and the staircase kernel behind every
//! Choquet integral.
//!
//! Covers are restricted to dyadic subcubes of the root. A dyadic cube strictly
//! containing the root has side at least `root_side`, so it costs at least
//! `root_side^delta`, which is already the cost of covering by the root itself.
//! Hence the minimum over subcubes of the root is the dyadic content of any
//! subset of the root, and the tree recursion below is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CubeSpec, DyadicSet, Grid, StepFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContentParams {
    pub delta: f64,
}

impl ContentParams {
    pub fn new(delta: f64) -> Self {
        ContentParams { delta }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= grid.n as f64) {
            return Err(Error::DeltaOutOfRange { delta: self.delta, n: grid.n });
        }
        Ok(())
    }
}

/// The set function E ↦ H̃^δ(E) on one grid, with its power table.
#[derive(Debug, Clone)]
pub struct Content {
    grid: Grid,
    delta: f64,
    pow: Vec<f64>,
    unit: Vec<usize>,
}

/// Non-increasing step function of t: value `vals[j]` on `[ends[j-1], ends[j])`.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Staircase {
    ends: Vec<f64>,
    vals: Vec<f64>,
}

impl Staircase {
    fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    fn push(&mut self, end: f64, val: f64) {
        match self.vals.last() {
            Some(&last) if last == val => *self.ends.last_mut().unwrap() = end,
            _ => {
                self.ends.push(end);
                self.vals.push(val);
            }
        }
    }

    pub(crate) fn integral(&self) -> f64 {
        let mut prev = 0.0;
        let mut total = 0.0;
        for (&e, &v) in self.ends.iter().zip(&self.vals) {
            total += (e - prev) * v;
            prev = e;
        }
        total
    }
}

enum Clip<'a> {
    None,
    Cube(&'a CubeSpec),
}

impl Content {
    pub fn new(grid: &Grid, params: ContentParams) -> Result<Self> {
        grid.validate()?;
        params.validate(grid)?;
        let pow = (0..=grid.depth)
            .map(|k| (grid.root_side / (1u64 << k) as f64).powf(params.delta))
            .collect();
        let strides = grid.strides();
        let n = grid.n;
        let unit = (0..1usize << n)
            .map(|b| (0..n).map(|a| ((b >> (n - 1 - a)) & 1) * strides[a]).sum())
            .collect();
        Ok(Content { grid: grid.clone(), delta: params.delta, pow, unit })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn params(&self) -> ContentParams {
        ContentParams::new(self.delta)
    }

    /// `l^delta` for a dyadic cube at the given tree level.
    pub fn level_power(&self, level: u32) -> f64 {
        self.pow[level as usize]
    }

    fn half(&self, level: u32) -> usize {
        1usize << (self.grid.depth - level - 1)
    }

    fn corner_index(&self, cube: &CubeSpec) -> usize {
        let m = self.grid.cells_per_axis();
        cube.corner.iter().fold(0usize, |acc, &c| acc * m + c)
    }

    fn node_meets(&self, level: u32, corner: usize, cube: &CubeSpec) -> bool {
        let side = 1usize << (self.grid.depth - level);
        let coords = self.grid.cell_coords(corner);
        coords
            .iter()
            .zip(&cube.corner)
            .all(|(&x, &c)| x < c + cube.side_cells && c < x + side)
    }

    fn dp(&self, level: u32, corner: usize, mask: &[bool]) -> f64 {
        if level == self.grid.depth {
            return if mask[corner] { self.pow[level as usize] } else { 0.0 };
        }
        let half = self.half(level);
        let mut sum = 0.0;
        for &u in &self.unit {
            sum += self.dp(level + 1, corner + half * u, mask);
        }
        sum.min(self.pow[level as usize])
    }

    fn check_mask(&self, mask: &[bool]) -> Result<()> {
        if mask.len() != self.grid.cell_count() {
            return Err(Error::LengthMismatch { got: mask.len(), expected: self.grid.cell_count() });
        }
        Ok(())
    }

    /// Content of the cells flagged in `mask`.
    pub fn of_mask(&self, mask: &[bool]) -> Result<f64> {
        self.check_mask(mask)?;
        Ok(self.dp(0, 0, mask))
    }

    pub fn of_set(&self, set: &DyadicSet) -> Result<f64> {
        if set.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.dp(0, 0, set.mask()))
    }

    /// Content of a whole cube (equal to `l^delta` for dyadic cubes).
    pub fn of_cube(&self, cube: &CubeSpec) -> Result<f64> {
        cube.check(&self.grid)?;
        if let Some(level) = cube.level(&self.grid) {
            let mask = DyadicSet::from_cube(&self.grid, cube)?;
            return Ok(self.dp(level, self.corner_index(cube), mask.mask()));
        }
        let mask = DyadicSet::from_cube(&self.grid, cube)?;
        Ok(self.dp(0, 0, mask.mask()))
    }

    /// Content of `set ∩ cube`.
    pub fn of_set_in_cube(&self, set: &DyadicSet, cube: &CubeSpec) -> Result<f64> {
        let inter = set.intersection(&DyadicSet::from_cube(&self.grid, cube)?)?;
        self.of_set(&inter)
    }

    fn stair(&self, level: u32, corner: usize, g: &dyn Fn(usize) -> f64, clip: &Clip) -> Staircase {
        if let Clip::Cube(c) = clip {
            if !self.node_meets(level, corner, c) {
                return Staircase::default();
            }
        }
        let cap = self.pow[level as usize];
        if level == self.grid.depth {
            let v = g(corner);
            return if v > 0.0 {
                Staircase { ends: vec![v], vals: vec![cap] }
            } else {
                Staircase::default()
            };
        }
        let half = self.half(level);
        let kids: Vec<Staircase> = self
            .unit
            .iter()
            .map(|&u| self.stair(level + 1, corner + half * u, g, clip))
            .filter(|s| !s.is_empty())
            .collect();
        match kids.len() {
            0 => Staircase::default(),
            1 => {
                let only = &kids[0];
                let mut out = Staircase::default();
                for (&e, &v) in only.ends.iter().zip(&only.vals) {
                    out.push(e, v.min(cap));
                }
                out
            }
            _ => merge_capped(&kids, cap),
        }
    }

    /// Choquet integral of the non-negative cell function `g` over the whole root.
    /// Cells with `g <= 0` contribute nothing.
    pub(crate) fn integrate_root(&self, g: &dyn Fn(usize) -> f64) -> f64 {
        self.stair(0, 0, g, &Clip::None).integral()
    }

    /// Choquet integral of `g` restricted to `cube`.
    pub(crate) fn integrate_cube(&self, cube: &CubeSpec, g: &dyn Fn(usize) -> f64) -> f64 {
        if let Some(level) = cube.level(&self.grid) {
            return self.stair(level, self.corner_index(cube), g, &Clip::None).integral();
        }
        let grid = &self.grid;
        let masked = |i: usize| {
            if cube.contains_cell(grid, i) {
                g(i)
            } else {
                0.0
            }
        };
        self.stair(0, 0, &masked, &Clip::Cube(cube)).integral()
    }

    /// Cells of `set` as a step function restricted to `g`, integrated.
    pub(crate) fn integrate_mask(&self, mask: &[bool], g: &dyn Fn(usize) -> f64) -> f64 {
        let masked = |i: usize| if mask[i] { g(i) } else { 0.0 };
        self.stair(0, 0, &masked, &Clip::None).integral()
    }
}

fn merge_capped(kids: &[Staircase], cap: f64) -> Staircase {
    let mut ends: Vec<f64> = kids.iter().flat_map(|k| k.ends.iter().copied()).collect();
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    let mut ptr = vec![0usize; kids.len()];
    let mut out = Staircase::default();
    for &e in &ends {
        let mut sum = 0.0;
        for (k, p) in kids.iter().zip(ptr.iter_mut()) {
            while *p < k.ends.len() && k.ends[*p] < e {
                *p += 1;
            }
            if *p < k.vals.len() {
                sum += k.vals[*p];
            }
        }
        out.push(e, sum.min(cap));
    }
    out
}

pub fn dyadic_content(grid: &Grid, set: &DyadicSet, params: ContentParams) -> Result<f64> {
    Content::new(grid, params)?.of_set(set)
}

/// `w_H(E)`: Choquet integral of `w · 1_E`.
pub fn weighted_content(grid: &Grid, w: &StepFunction, set: &DyadicSet, params: ContentParams) -> Result<f64> {
    if w.grid() != grid || set.grid() != grid {
        return Err(Error::GridMismatch);
    }
    w.require_nonnegative()?;
    let h = Content::new(grid, params)?;
    Ok(h.integrate_mask(set.mask(), &|i| w.value(i)))
}
