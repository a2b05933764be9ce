//! Dyadic grids over a root cube, cell sets, step functions and cube families.
//!
//! Cells are half-open boxes `[a, a + h)^n` stored in row-major order (axis 0
//! varies slowest). Cubes are addressed by their corner cell and side in cells.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of cells (2^24).
pub const MAX_CELLS_LOG2: u32 = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub depth: u32,
    pub root_side: f64,
    pub origin: Vec<f64>,
}

impl Grid {
    pub fn new(n: usize, depth: u32, root_side: f64, origin: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if !(root_side > 0.0) || !root_side.is_finite() {
            return Err(Error::InvalidGrid(format!("root side {root_side} must be positive")));
        }
        if origin.len() != n {
            return Err(Error::InvalidGrid(format!(
                "origin has {} coordinates, expected {n}",
                origin.len()
            )));
        }
        if origin.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        if (n as u64) * (depth as u64) > MAX_CELLS_LOG2 as u64 {
            return Err(Error::InvalidGrid(format!(
                "2^(n*depth) = 2^{} cells exceeds the budget of 2^{MAX_CELLS_LOG2}",
                n as u64 * depth as u64
            )));
        }
        Ok(Grid { n, depth, root_side, origin })
    }

    /// Grid anchored at the origin of coordinates.
    pub fn cube(n: usize, depth: u32, root_side: f64) -> Result<Self> {
        Grid::new(n, depth, root_side, vec![0.0; n])
    }

    pub fn validate(&self) -> Result<()> {
        Grid::new(self.n, self.depth, self.root_side, self.origin.clone()).map(|_| ())
    }

    pub fn cells_per_axis(&self) -> usize {
        1usize << self.depth
    }

    pub fn cell_count(&self) -> usize {
        1usize << (self.n as u32 * self.depth)
    }

    pub fn cell_side(&self) -> f64 {
        self.root_side / self.cells_per_axis() as f64
    }

    /// Linear-index stride of each axis.
    pub fn strides(&self) -> Vec<usize> {
        let m = self.cells_per_axis();
        let mut s = vec![1usize; self.n];
        for a in (0..self.n.saturating_sub(1)).rev() {
            s[a] = s[a + 1] * m;
        }
        s
    }

    pub fn cell_index(&self, coords: &[usize]) -> Result<usize> {
        let m = self.cells_per_axis();
        if coords.len() != self.n || coords.iter().any(|&c| c >= m) {
            return Err(Error::CellOutOfRange {
                index: usize::MAX,
                count: self.cell_count(),
            });
        }
        Ok(coords.iter().fold(0usize, |acc, &c| acc * m + c))
    }

    pub fn cell_coords(&self, index: usize) -> Vec<usize> {
        let m = self.cells_per_axis();
        let mut out = vec![0usize; self.n];
        let mut rest = index;
        for a in (0..self.n).rev() {
            out[a] = rest % m;
            rest /= m;
        }
        out
    }

    pub fn cell_center(&self, index: usize) -> Vec<f64> {
        let h = self.cell_side();
        self.cell_coords(index)
            .iter()
            .zip(&self.origin)
            .map(|(&c, &o)| o + (c as f64 + 0.5) * h)
            .collect()
    }

    pub fn root_cube(&self) -> CubeSpec {
        CubeSpec {
            corner: vec![0; self.n],
            side_cells: self.cells_per_axis(),
        }
    }

    /// Same geometry with every length multiplied by `s`.
    pub fn rescaled(&self, s: f64) -> Result<Grid> {
        Grid::new(
            self.n,
            self.depth,
            self.root_side * s,
            self.origin.iter().map(|o| o * s).collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicSet {
    grid: Grid,
    members: Vec<bool>,
}

impl DyadicSet {
    pub fn empty(grid: &Grid) -> Self {
        DyadicSet {
            grid: grid.clone(),
            members: vec![false; grid.cell_count()],
        }
    }

    pub fn full(grid: &Grid) -> Self {
        DyadicSet {
            grid: grid.clone(),
            members: vec![true; grid.cell_count()],
        }
    }

    pub fn from_mask(grid: &Grid, members: Vec<bool>) -> Result<Self> {
        if members.len() != grid.cell_count() {
            return Err(Error::LengthMismatch {
                got: members.len(),
                expected: grid.cell_count(),
            });
        }
        Ok(DyadicSet { grid: grid.clone(), members })
    }

    pub fn from_cube(grid: &Grid, cube: &CubeSpec) -> Result<Self> {
        cube.check(grid)?;
        let mut set = DyadicSet::empty(grid);
        for idx in cube.cells(grid) {
            set.members[idx] = true;
        }
        Ok(set)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mask(&self) -> &[bool] {
        &self.members
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.members[cell]
    }

    pub fn insert(&mut self, cell: usize) {
        self.members[cell] = true;
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    fn zip_with(&self, other: &DyadicSet, op: impl Fn(bool, bool) -> bool) -> Result<DyadicSet> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(DyadicSet {
            grid: self.grid.clone(),
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }

    pub fn union(&self, other: &DyadicSet) -> Result<DyadicSet> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &DyadicSet) -> Result<DyadicSet> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &DyadicSet) -> Result<DyadicSet> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn is_subset(&self, other: &DyadicSet) -> bool {
        self.grid == other.grid
            && self
                .members
                .iter()
                .zip(&other.members)
                .all(|(&a, &b)| !a || b)
    }

    pub fn complement(&self) -> DyadicSet {
        DyadicSet {
            grid: self.grid.clone(),
            members: self.members.iter().map(|b| !b).collect(),
        }
    }
}

pub fn set_from_cells(grid: &Grid, cells: &[usize]) -> Result<DyadicSet> {
    let mut set = DyadicSet::empty(grid);
    let count = grid.cell_count();
    for &c in cells {
        if c >= count {
            return Err(Error::CellOutOfRange { index: c, count });
        }
        set.members[c] = true;
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionFile", into = "FunctionFile")]
pub struct StepFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                expected: grid.cell_count(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(StepFunction { grid: grid.clone(), values })
    }

    pub fn constant(grid: &Grid, c: f64) -> Result<Self> {
        StepFunction::new(grid, vec![c; grid.cell_count()])
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(usize) -> f64) -> Result<Self> {
        StepFunction::new(grid, (0..grid.cell_count()).map(f).collect())
    }

    pub fn indicator(set: &DyadicSet) -> Self {
        StepFunction {
            grid: set.grid.clone(),
            values: set.members.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, cell: usize) -> f64 {
        self.values[cell]
    }

    /// Cell-wise image under `op`; fails if a result is not finite.
    pub fn map(&self, op: impl Fn(f64) -> f64) -> Result<StepFunction> {
        StepFunction::new(&self.grid, self.values.iter().map(|&v| op(v)).collect())
    }

    pub fn zip_map(&self, other: &StepFunction, op: impl Fn(f64, f64) -> f64) -> Result<StepFunction> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        StepFunction::new(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        )
    }

    pub fn abs(&self) -> StepFunction {
        StepFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn require_positive(&self) -> Result<()> {
        match self.values.iter().position(|&v| !(v > 0.0)) {
            Some(cell) => Err(Error::NonPositiveWeight { cell, value: self.values[cell] }),
            None => Ok(()),
        }
    }

    pub fn require_nonnegative(&self) -> Result<()> {
        match self.values.iter().position(|&v| v < 0.0) {
            Some(cell) => Err(Error::NegativeValue { cell, value: self.values[cell] }),
            None => Ok(()),
        }
    }
}

/// On-disk form of a step function: values in row-major order, either flat
/// or nested one array level per axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionFile {
    pub grid: Grid,
    pub values: serde_json::Value,
}

fn flatten_values(v: &serde_json::Value, out: &mut Vec<f64>) -> Result<()> {
    match v {
        serde_json::Value::Array(items) => items.iter().try_for_each(|x| flatten_values(x, out)),
        serde_json::Value::Number(x) => {
            out.push(x.as_f64().ok_or_else(|| Error::InvalidParameter("non-finite value".into()))?);
            Ok(())
        }
        other => Err(Error::InvalidParameter(format!("expected a number, found {other}"))),
    }
}

impl TryFrom<FunctionFile> for StepFunction {
    type Error = Error;

    fn try_from(file: FunctionFile) -> Result<Self> {
        file.grid.validate()?;
        let mut values = Vec::new();
        flatten_values(&file.values, &mut values)?;
        StepFunction::new(&file.grid, values)
    }
}

impl From<StepFunction> for FunctionFile {
    fn from(f: StepFunction) -> Self {
        FunctionFile { grid: f.grid, values: serde_json::Value::from(f.values) }
    }
}

/// On-disk form of a cell set: multi-indices of the member cells.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetFile {
    pub grid: Grid,
    pub cells: Vec<Vec<usize>>,
}

impl TryFrom<SetFile> for DyadicSet {
    type Error = Error;

    fn try_from(file: SetFile) -> Result<Self> {
        file.grid.validate()?;
        let idx = file
            .cells
            .iter()
            .map(|c| {
                file.grid.cell_index(c).map_err(|_| {
                    Error::InvalidParameter(format!("cell {c:?} outside the {}-dimensional grid", file.grid.n))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        set_from_cells(&file.grid, &idx)
    }
}

impl From<&DyadicSet> for SetFile {
    fn from(s: &DyadicSet) -> Self {
        SetFile { grid: s.grid.clone(), cells: s.cells().map(|i| s.grid.cell_coords(i)).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
}

impl Comparator {
    pub fn test(self, v: f64, t: f64) -> bool {
        match self {
            Comparator::Gt => v > t,
            Comparator::Ge => v >= t,
            Comparator::Lt => v < t,
            Comparator::Le => v <= t,
        }
    }
}

pub fn level_set(f: &StepFunction, cmp: Comparator, threshold: f64) -> DyadicSet {
    DyadicSet {
        grid: f.grid.clone(),
        members: f.values.iter().map(|&v| cmp.test(v, threshold)).collect(),
    }
}

/// Axis-aligned cube of `side_cells` cells per axis with lower corner `corner`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CubeSpec {
    pub corner: Vec<usize>,
    pub side_cells: usize,
}

impl CubeSpec {
    pub fn new(corner: Vec<usize>, side_cells: usize) -> Self {
        CubeSpec { corner, side_cells }
    }

    pub fn single_cell(grid: &Grid, cell: usize) -> Self {
        CubeSpec { corner: grid.cell_coords(cell), side_cells: 1 }
    }

    pub fn check(&self, grid: &Grid) -> Result<()> {
        let m = grid.cells_per_axis();
        if self.side_cells == 0
            || self.corner.len() != grid.n
            || self.corner.iter().any(|&c| c + self.side_cells > m)
        {
            return Err(Error::CubeOutOfRange(self.to_string()));
        }
        Ok(())
    }

    pub fn is_dyadic(&self) -> bool {
        self.side_cells.is_power_of_two() && self.corner.iter().all(|c| c % self.side_cells == 0)
    }

    /// Tree level of a dyadic cube (0 for the root).
    pub fn level(&self, grid: &Grid) -> Option<u32> {
        if !self.is_dyadic() || self.side_cells > grid.cells_per_axis() {
            return None;
        }
        Some(grid.depth - self.side_cells.trailing_zeros())
    }

    pub fn side_length(&self, grid: &Grid) -> f64 {
        self.side_cells as f64 * grid.cell_side()
    }

    pub fn cell_count(&self, n: usize) -> usize {
        self.side_cells.pow(n as u32)
    }

    pub fn contains_coords(&self, coords: &[usize]) -> bool {
        coords
            .iter()
            .zip(&self.corner)
            .all(|(&x, &c)| x >= c && x < c + self.side_cells)
    }

    pub fn contains_cell(&self, grid: &Grid, cell: usize) -> bool {
        self.contains_coords(&grid.cell_coords(cell))
    }

    pub fn contains_cube(&self, other: &CubeSpec) -> bool {
        other
            .corner
            .iter()
            .zip(&self.corner)
            .all(|(&o, &c)| o >= c && o + other.side_cells <= c + self.side_cells)
    }

    pub fn intersects(&self, other: &CubeSpec) -> bool {
        other
            .corner
            .iter()
            .zip(&self.corner)
            .all(|(&o, &c)| o < c + self.side_cells && c < o + other.side_cells)
    }

    /// Linear indices of the cells of the cube, in row-major order.
    pub fn cells(&self, grid: &Grid) -> Vec<usize> {
        let n = grid.n;
        let strides = grid.strides();
        let base: usize = self.corner.iter().zip(&strides).map(|(c, s)| c * s).sum();
        let mut out = Vec::with_capacity(self.cell_count(n));
        let mut offs = vec![0usize; n];
        loop {
            out.push(base + offs.iter().zip(&strides).map(|(o, s)| o * s).sum::<usize>());
            let mut a = n;
            loop {
                if a == 0 {
                    return out;
                }
                a -= 1;
                offs[a] += 1;
                if offs[a] < self.side_cells {
                    break;
                }
                offs[a] = 0;
            }
        }
    }

    /// Dyadic parent, or `None` for the root.
    pub fn parent(&self, grid: &Grid) -> Option<CubeSpec> {
        if !self.is_dyadic() || self.side_cells >= grid.cells_per_axis() {
            return None;
        }
        let s = self.side_cells * 2;
        Some(CubeSpec {
            corner: self.corner.iter().map(|c| c - c % s).collect(),
            side_cells: s,
        })
    }

    /// The 2^n dyadic children, in row-major order of their corners.
    pub fn children(&self) -> Vec<CubeSpec> {
        if self.side_cells < 2 {
            return Vec::new();
        }
        let n = self.corner.len();
        let h = self.side_cells / 2;
        (0..1usize << n)
            .map(|b| CubeSpec {
                corner: (0..n)
                    .map(|a| self.corner[a] + h * ((b >> (n - 1 - a)) & 1))
                    .collect(),
                side_cells: h,
            })
            .collect()
    }

    /// Whether the closed cube contains the given point.
    pub fn closure_contains_point(&self, grid: &Grid, x: &[f64]) -> bool {
        let h = grid.cell_side();
        self.corner.iter().zip(&grid.origin).zip(x).all(|((&c, &o), &p)| {
            let lo = o + c as f64 * h;
            let hi = o + (c + self.side_cells) as f64 * h;
            lo <= p && p <= hi
        })
    }
}

impl fmt::Display for CubeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let corner: Vec<String> = self.corner.iter().map(|c| c.to_string()).collect();
        write!(f, "{}:{}", corner.join(","), self.side_cells)
    }
}

impl FromStr for CubeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cube '{s}' is not of the form i,j,...:side"));
        let (corner, side) = s.trim().split_once(':').ok_or_else(bad)?;
        let corner = corner
            .split(',')
            .map(|c| c.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        let side_cells = side.trim().parse::<usize>().map_err(|_| bad())?;
        Ok(CubeSpec { corner, side_cells })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Dyadic,
    Lattice,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeFamilyPolicy {
    pub kind: FamilyKind,
    pub sample_count: usize,
    pub rng_seed: u64,
}

impl CubeFamilyPolicy {
    pub fn dyadic() -> Self {
        CubeFamilyPolicy { kind: FamilyKind::Dyadic, sample_count: 0, rng_seed: 0 }
    }

    pub fn lattice() -> Self {
        CubeFamilyPolicy { kind: FamilyKind::Lattice, sample_count: 0, rng_seed: 0 }
    }

    pub fn sampled(sample_count: usize, rng_seed: u64) -> Self {
        CubeFamilyPolicy { kind: FamilyKind::Sampled, sample_count, rng_seed }
    }

    /// Parses `dyadic`, `lattice` or `sampled:N`.
    pub fn parse(s: &str, seed: u64) -> Result<Self> {
        match s.trim() {
            "dyadic" => Ok(CubeFamilyPolicy { rng_seed: seed, ..Self::dyadic() }),
            "lattice" => Ok(CubeFamilyPolicy { rng_seed: seed, ..Self::lattice() }),
            other => {
                let count = other
                    .strip_prefix("sampled:")
                    .and_then(|c| c.parse::<usize>().ok())
                    .filter(|&c| c > 0)
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "family '{other}' is not dyadic, lattice or sampled:N"
                        ))
                    })?;
                Ok(Self::sampled(count, seed))
            }
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            FamilyKind::Dyadic => "dyadic".into(),
            FamilyKind::Lattice => "lattice".into(),
            FamilyKind::Sampled => format!("sampled:{}", self.sample_count),
        }
    }
}

impl Default for CubeFamilyPolicy {
    fn default() -> Self {
        Self::dyadic()
    }
}

/// All dyadic subcubes of the root, coarsest level first.
pub fn dyadic_cubes(grid: &Grid) -> Vec<CubeSpec> {
    let mut out = Vec::new();
    for level in 0..=grid.depth {
        let side = 1usize << (grid.depth - level);
        let per_axis = 1usize << level;
        push_corners(grid.n, per_axis, side, side, &mut out);
    }
    out
}

fn push_corners(n: usize, positions: usize, step: usize, side: usize, out: &mut Vec<CubeSpec>) {
    let total = positions.pow(n as u32);
    for k in 0..total {
        let mut corner = vec![0usize; n];
        let mut rest = k;
        for a in (0..n).rev() {
            corner[a] = (rest % positions) * step;
            rest /= positions;
        }
        out.push(CubeSpec { corner, side_cells: side });
    }
}

fn lattice_count_for_side(n: usize, m: usize, s: usize) -> usize {
    (m - s + 1).pow(n as u32)
}

/// Every axis-aligned cube of whole cells, largest side first.
pub fn lattice_cubes(grid: &Grid) -> Vec<CubeSpec> {
    let m = grid.cells_per_axis();
    let mut out = Vec::new();
    for s in (1..=m).rev() {
        push_corners(grid.n, m - s + 1, 1, s, &mut out);
    }
    out
}

pub fn lattice_count(grid: &Grid) -> usize {
    let m = grid.cells_per_axis();
    (1..=m).map(|s| lattice_count_for_side(grid.n, m, s)).sum()
}

fn nth_lattice_cube(grid: &Grid, mut k: usize) -> CubeSpec {
    let m = grid.cells_per_axis();
    for s in (1..=m).rev() {
        let c = lattice_count_for_side(grid.n, m, s);
        if k < c {
            let positions = m - s + 1;
            let mut corner = vec![0usize; grid.n];
            for a in (0..grid.n).rev() {
                corner[a] = k % positions;
                k /= positions;
            }
            return CubeSpec { corner, side_cells: s };
        }
        k -= c;
    }
    unreachable!("lattice index out of range")
}

pub fn enumerate_cubes(grid: &Grid, policy: &CubeFamilyPolicy) -> Vec<CubeSpec> {
    match policy.kind {
        FamilyKind::Dyadic => dyadic_cubes(grid),
        FamilyKind::Lattice => lattice_cubes(grid),
        FamilyKind::Sampled => {
            let mut out = dyadic_cubes(grid);
            let total = lattice_count(grid);
            let mut rng = ChaCha8Rng::seed_from_u64(policy.rng_seed);
            for _ in 0..policy.sample_count {
                out.push(nth_lattice_cube(grid, rng.gen_range(0..total)));
            }
            out
        }
    }
}
