//! Choquet integrals with respect to the dyadic content, the signed average
//! f_{Q,δ}, capacitary essential bounds and the two Jensen-type inequalities.

use serde::{Deserialize, Serialize};

use crate::content::{Content, ContentParams};
use crate::error::{Error, Result};
use crate::grid::{level_set, Comparator, CubeSpec, DyadicSet, StepFunction};

/// Monotone set function with `mu(∅) = 0`.
pub trait SetFunction {
    fn measure(&self, set: &DyadicSet) -> Result<f64>;
}

impl SetFunction for Content {
    fn measure(&self, set: &DyadicSet) -> Result<f64> {
        self.of_set(set)
    }
}

/// E ↦ ∫_E w dH̃.
#[derive(Debug, Clone)]
pub struct WeightedContent {
    content: Content,
    w: StepFunction,
}

impl WeightedContent {
    pub fn new(w: &StepFunction, params: ContentParams) -> Result<Self> {
        w.require_nonnegative()?;
        Ok(WeightedContent { content: Content::new(w.grid(), params)?, w: w.clone() })
    }

    pub fn from_content(content: &Content, w: &StepFunction) -> Result<Self> {
        if w.grid() != content.grid() {
            return Err(Error::GridMismatch);
        }
        w.require_nonnegative()?;
        Ok(WeightedContent { content: content.clone(), w: w.clone() })
    }

    pub fn of_cube(&self, cube: &CubeSpec) -> f64 {
        self.content.integrate_cube(cube, &|i| self.w.value(i))
    }
}

impl SetFunction for WeightedContent {
    fn measure(&self, set: &DyadicSet) -> Result<f64> {
        if set.grid() != self.content.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(self.content.integrate_mask(set.mask(), &|i| self.w.value(i)))
    }
}

fn check_nonnegative_on(f: &StepFunction, cells: impl Iterator<Item = usize>) -> Result<()> {
    for i in cells {
        let v = f.value(i);
        if v < 0.0 {
            return Err(Error::NegativeValue { cell: i, value: v });
        }
    }
    Ok(())
}

/// ∫_region f dH̃ for f ≥ 0 on the region.
pub fn choquet(f: &StepFunction, region: &DyadicSet, params: ContentParams) -> Result<f64> {
    if f.grid() != region.grid() {
        return Err(Error::GridMismatch);
    }
    check_nonnegative_on(f, region.cells())?;
    let h = Content::new(f.grid(), params)?;
    Ok(h.integrate_mask(region.mask(), &|i| f.value(i)))
}

/// ∫_Q f dH̃ for f ≥ 0 on the cube.
pub fn choquet_on_cube(f: &StepFunction, cube: &CubeSpec, params: ContentParams) -> Result<f64> {
    cube.check(f.grid())?;
    check_nonnegative_on(f, cube.cells(f.grid()).into_iter())?;
    let h = Content::new(f.grid(), params)?;
    Ok(h.integrate_cube(cube, &|i| f.value(i)))
}

/// Layer-cake sum Σ (v_k − v_{k−1}) · mu(region ∩ {f ≥ v_k}) over the distinct
/// positive values of f on the region.
pub fn choquet_wrt(f: &StepFunction, region: &DyadicSet, mu: &dyn SetFunction) -> Result<f64> {
    if f.grid() != region.grid() {
        return Err(Error::GridMismatch);
    }
    check_nonnegative_on(f, region.cells())?;
    let mut values: Vec<f64> = region.cells().map(|i| f.value(i)).filter(|&v| v > 0.0).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut prev = 0.0;
    let mut total = 0.0;
    for v in values {
        let level = level_set(f, Comparator::Ge, v).intersection(region)?;
        total += (v - prev) * mu.measure(&level)?;
        prev = v;
    }
    Ok(total)
}

/// Average (1/H̃(Q)) ∫_Q g dH̃ of a non-negative cell function; exact on single cells.
pub(crate) fn cube_average(h: &Content, cube: &CubeSpec, g: &dyn Fn(usize) -> f64) -> f64 {
    if cube.side_cells == 1 {
        let cell = h.grid().cell_index(&cube.corner).expect("cube checked");
        return g(cell);
    }
    h.integrate_cube(cube, g) / h.of_cube(cube).expect("cube checked")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedAverage {
    pub value: f64,
    pub pos_part_integral: f64,
    pub neg_part_integral: f64,
    pub pos_content: f64,
    pub neg_content: f64,
}

pub(crate) fn signed_average_with(h: &Content, f: &StepFunction, cube: &CubeSpec) -> SignedAverage {
    let pos_part_integral = h.integrate_cube(cube, &|i| f.value(i));
    let neg_part_integral = h.integrate_cube(cube, &|i| -f.value(i));
    let pos_content = h.integrate_cube(cube, &|i| if f.value(i) >= 0.0 { 1.0 } else { 0.0 });
    let neg_content = h.integrate_cube(cube, &|i| if f.value(i) < 0.0 { 1.0 } else { 0.0 });
    SignedAverage {
        value: (pos_part_integral - neg_part_integral) / (pos_content + neg_content),
        pos_part_integral,
        neg_part_integral,
        pos_content,
        neg_content,
    }
}

pub fn signed_average(f: &StepFunction, cube: &CubeSpec, params: ContentParams) -> Result<SignedAverage> {
    cube.check(f.grid())?;
    let h = Content::new(f.grid(), params)?;
    Ok(signed_average_with(&h, f, cube))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssentialBounds {
    pub esinf: f64,
    pub esup: f64,
}

/// Minimum and maximum cell value on the cube. Every cell has positive
/// content, so these are the capacitary essential bounds (taken over all real t).
pub fn essential_bounds(f: &StepFunction, cube: &CubeSpec) -> Result<EssentialBounds> {
    cube.check(f.grid())?;
    let mut esinf = f64::INFINITY;
    let mut esup = f64::NEG_INFINITY;
    for i in cube.cells(f.grid()) {
        let v = f.value(i);
        esinf = esinf.min(v);
        esup = esup.max(v);
    }
    Ok(EssentialBounds { esinf, esup })
}

/// Both sides of e^{f_Q} ≤ (1/H̃(Q))[∫_{E+} e^f + ∫_{E−} e^f] and its mirror for −f.
/// When `log_domain` is set every field holds the natural logarithm of the side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JensenSides {
    pub lhs_pos: f64,
    pub rhs_pos: f64,
    pub lhs_neg: f64,
    pub rhs_neg: f64,
    pub log_domain: bool,
}

impl JensenSides {
    pub fn holds(&self) -> bool {
        self.lhs_pos <= self.rhs_pos && self.lhs_neg <= self.rhs_neg
    }

    /// Largest relative excess of a left side over its right side (0 when both hold).
    pub fn excess(&self) -> f64 {
        let rel = |l: f64, r: f64| {
            if self.log_domain {
                (l - r).max(0.0)
            } else {
                ((l - r) / r).max(0.0)
            }
        };
        rel(self.lhs_pos, self.rhs_pos).max(rel(self.lhs_neg, self.rhs_neg))
    }
}

/// Exponent threshold beyond which the sides are evaluated in log space.
pub const EXP_LIMIT: f64 = 700.0;

pub(crate) fn jensen_sides_with(h: &Content, f: &StepFunction, cube: &CubeSpec) -> Result<JensenSides> {
    let avg = signed_average_with(h, f, cube).value;
    let hq = h.of_cube(cube)?;
    let cells = cube.cells(f.grid());
    let pos: Vec<bool> = (0..f.grid().cell_count()).map(|i| f.value(i) >= 0.0).collect();
    // (log of) ∫_{E+} e^{s f − m} + ∫_{E−} e^{s f − m}, then shifted back by m.
    let side = |s: f64, m: f64| -> f64 {
        let a = h.integrate_cube(cube, &|i| if pos[i] { (s * f.value(i) - m).exp() } else { 0.0 });
        let b = h.integrate_cube(cube, &|i| if !pos[i] { (s * f.value(i) - m).exp() } else { 0.0 });
        a + b
    };
    let big = cells.iter().any(|&i| f.value(i).abs() > EXP_LIMIT) || avg.abs() > EXP_LIMIT;
    if !big {
        let direct = JensenSides {
            lhs_pos: avg.exp(),
            rhs_pos: side(1.0, 0.0) / hq,
            lhs_neg: (-avg).exp(),
            rhs_neg: side(-1.0, 0.0) / hq,
            log_domain: false,
        };
        if [direct.lhs_pos, direct.rhs_pos, direct.lhs_neg, direct.rhs_neg]
            .iter()
            .all(|v| v.is_finite())
        {
            return Ok(direct);
        }
    }
    let max_pos = cells.iter().map(|&i| f.value(i)).fold(f64::NEG_INFINITY, f64::max);
    let max_neg = cells.iter().map(|&i| -f.value(i)).fold(f64::NEG_INFINITY, f64::max);
    let out = JensenSides {
        lhs_pos: avg,
        rhs_pos: max_pos + side(1.0, max_pos).ln() - hq.ln(),
        lhs_neg: -avg,
        rhs_neg: max_neg + side(-1.0, max_neg).ln() - hq.ln(),
        log_domain: true,
    };
    if [out.rhs_pos, out.rhs_neg].iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow(format!("Jensen sides on cube {cube} are not representable")));
    }
    Ok(out)
}

pub fn jensen_sides(f: &StepFunction, cube: &CubeSpec, params: ContentParams) -> Result<JensenSides> {
    cube.check(f.grid())?;
    let h = Content::new(f.grid(), params)?;
    jensen_sides_with(&h, f, cube)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::dyadic_content;
    use crate::grid::{set_from_cells, Grid};
    use proptest::prelude::*;

    /// Riemann sum of t ↦ H̃({f > t}) over a fine uniform t-grid refined by the
    /// value breakpoints (the integrand is constant between breakpoints).
    fn riemann(f: &StepFunction, region: &DyadicSet, delta: f64, steps: usize) -> f64 {
        let h = Content::new(f.grid(), ContentParams::new(delta)).unwrap();
        let top = region.cells().map(|i| f.value(i)).fold(0.0, f64::max);
        let mut ts: Vec<f64> = (0..=steps).map(|k| top * k as f64 / steps as f64).collect();
        ts.extend(region.cells().map(|i| f.value(i)));
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let mut total = 0.0;
        for w in ts.windows(2) {
            let level = level_set(f, Comparator::Gt, w[0]).intersection(region).unwrap();
            total += (w[1] - w[0]) * h.of_set(&level).unwrap();
        }
        total
    }

    fn counterexample(delta: f64, sign: f64) -> (StepFunction, ContentParams) {
        let g = Grid::cube(2, 2, 4.0).unwrap();
        let f = StepFunction::from_fn(&g, |i| {
            let c = g.cell_coords(i);
            sign * if c == [3, 3] {
                1.0
            } else if c[1] < 2 {
                -2.0
            } else {
                0.0
            }
        })
        .unwrap();
        (f, ContentParams::new(delta))
    }

    #[test]
    fn indicator_integrates_to_content() {
        let g = Grid::cube(2, 2, 4.0).unwrap();
        let e = set_from_cells(&g, &[0, 5, 6, 15]).unwrap();
        let p = ContentParams::new(0.8);
        let v = choquet(&StepFunction::indicator(&e), &DyadicSet::full(&g), p).unwrap();
        assert_eq!(v, dyadic_content(&g, &e, p).unwrap());
    }

    #[test]
    fn minimizer_integral() {
        let g = Grid::cube(1, 1, 2.0).unwrap();
        let f = StepFunction::new(&g, vec![2.0, 0.0]).unwrap();
        let v = choquet(&f, &DyadicSet::full(&g), ContentParams::new(1.0)).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_level_integral_matches_riemann() {
        let g = Grid::cube(1, 1, 2.0).unwrap();
        let f = StepFunction::new(&g, vec![3.0, 1.0]).unwrap();
        let full = DyadicSet::full(&g);
        let v = choquet(&f, &full, ContentParams::new(0.5)).unwrap();
        assert!((v - (2.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((v - riemann(&f, &full, 0.5, 1000)).abs() < 1e-12);
    }

    #[test]
    fn choquet_wrt_specializations() {
        let g = Grid::cube(1, 2, 4.0).unwrap();
        let p = ContentParams::new(1.0);
        let f = StepFunction::new(&g, vec![2.0, 0.0, 0.0, 0.0]).unwrap();
        let w = StepFunction::new(&g, vec![1.0, 1.0, 4.0, 4.0]).unwrap();
        let full = DyadicSet::full(&g);
        let wc = WeightedContent::new(&w, p).unwrap();
        assert!((choquet_wrt(&f, &full, &wc).unwrap() - 2.0).abs() < 1e-12);
        let f = StepFunction::new(&g, vec![0.5, 3.0, 1.0, 2.0]).unwrap();
        let h = Content::new(&g, p).unwrap();
        let direct = choquet(&f, &full, p).unwrap();
        assert!((choquet_wrt(&f, &full, &h).unwrap() - direct).abs() < 1e-12);
        let ones = WeightedContent::new(&StepFunction::constant(&g, 1.0).unwrap(), p).unwrap();
        assert!((choquet_wrt(&f, &full, &ones).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn negative_values_rejected_and_empty_region_is_zero() {
        let g = Grid::cube(1, 1, 2.0).unwrap();
        let f = StepFunction::new(&g, vec![-1.0, 2.0]).unwrap();
        let p = ContentParams::new(1.0);
        assert!(choquet(&f, &DyadicSet::full(&g), p).is_err());
        assert_eq!(choquet(&f, &set_from_cells(&g, &[1]).unwrap(), p).unwrap(), 2.0);
        assert_eq!(choquet(&f, &DyadicSet::empty(&g), p).unwrap(), 0.0);
    }

    #[test]
    fn counterexample_averages() {
        for delta in [0.25, 0.5, 1.0] {
            let (f, p) = counterexample(delta, 1.0);
            let root = f.grid().root_cube();
            let a = signed_average(&f, &root, p).unwrap();
            let k = 2f64.powf(1.0 + 2.0 * delta);
            assert!((a.value - (1.0 - k) / k).abs() < 1e-12, "{delta} {a:?}");
            let (g, p) = counterexample(delta, -1.0);
            let b = signed_average(&g, &root, p).unwrap();
            assert!((b.value - (k - 1.0) / (1.0 + 4f64.powf(delta))).abs() < 1e-12);
        }
        let (f, p) = counterexample(1.0, 1.0);
        assert!((signed_average(&f, &f.grid().root_cube(), p).unwrap().value + 7.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn nonnegative_average_is_plain_average() {
        let g = Grid::cube(2, 2, 1.0).unwrap();
        let f = StepFunction::from_fn(&g, |i| (i % 5) as f64).unwrap();
        let p = ContentParams::new(1.2);
        for cube in crate::grid::lattice_cubes(&g) {
            let a = signed_average(&f, &cube, p).unwrap();
            let direct = choquet_on_cube(&f, &cube, p).unwrap() / Content::new(&g, p).unwrap().of_cube(&cube).unwrap();
            assert!((a.value - direct).abs() <= 1e-12 * direct.max(1.0));
            assert_eq!(a.neg_content, 0.0);
        }
    }

    #[test]
    fn bounds_examples() {
        let g = Grid::cube(1, 1, 2.0).unwrap();
        let root = g.root_cube();
        let c = StepFunction::constant(&g, 3.5).unwrap();
        assert_eq!(essential_bounds(&c, &root).unwrap(), EssentialBounds { esinf: 3.5, esup: 3.5 });
        let f = StepFunction::new(&g, vec![2.0, 0.0]).unwrap();
        assert_eq!(essential_bounds(&f, &root).unwrap(), EssentialBounds { esinf: 0.0, esup: 2.0 });
        let f = StepFunction::new(&g, vec![2.0, -1.0]).unwrap();
        assert!(essential_bounds(&f, &root).unwrap().esinf < 0.0);
    }

    #[test]
    fn jensen_examples() {
        let g = Grid::cube(2, 2, 4.0).unwrap();
        let root = g.root_cube();
        let p = ContentParams::new(1.0);
        let c = StepFunction::constant(&g, 1.5).unwrap();
        let s = jensen_sides(&c, &root, p).unwrap();
        assert!((s.lhs_pos - 1.5f64.exp()).abs() < 1e-12 && (s.rhs_pos - s.lhs_pos).abs() < 1e-12);
        let c = StepFunction::constant(&g, -2.0).unwrap();
        let s = jensen_sides(&c, &root, p).unwrap();
        assert!((s.lhs_neg - 2f64.exp()).abs() < 1e-12 && (s.rhs_neg - s.lhs_neg).abs() < 1e-12);
        let (f, p) = counterexample(1.0, 1.0);
        let s = jensen_sides(&f, &root, p).unwrap();
        assert!((s.lhs_pos - (-0.875f64).exp()).abs() < 1e-12);
        assert!(s.lhs_pos < s.rhs_pos && s.holds());
    }

    #[test]
    fn jensen_switches_to_log_space() {
        let g = Grid::cube(1, 2, 1.0).unwrap();
        let f = StepFunction::new(&g, vec![900.0, -800.0, 5.0, 0.0]).unwrap();
        let s = jensen_sides(&f, &g.root_cube(), ContentParams::new(0.7)).unwrap();
        assert!(s.log_domain && s.holds());
        let small = StepFunction::new(&g, vec![9.0, -8.0, 5.0, 0.0]).unwrap();
        let scaled = small.map(|v| v * 100.0).unwrap();
        let a = jensen_sides(&scaled, &g.root_cube(), ContentParams::new(0.7)).unwrap();
        assert!(a.log_domain && a.holds());
    }

    #[test]
    fn single_cell_average_is_exact() {
        let g = Grid::cube(2, 3, 0.37).unwrap();
        let h = Content::new(&g, ContentParams::new(1.3)).unwrap();
        let f = StepFunction::from_fn(&g, |i| 0.1 + (i as f64).sqrt()).unwrap();
        for i in 0..g.cell_count() {
            let cube = CubeSpec::single_cell(&g, i);
            assert_eq!(cube_average(&h, &cube, &|j| f.value(j)), f.value(i));
            let mut cur = cube.clone();
            while let Some(parent) = cur.parent(&g) {
                cur = parent;
            }
            assert_eq!(cur, g.root_cube());
        }
    }

    fn small_fn() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..5.0, 16)
    }

    proptest! {
        #[test]
        fn layer_cake_agrees(vals in small_fn(), delta in 0.1f64..2.0) {
            let g = Grid::cube(2, 2, 1.5).unwrap();
            let f = StepFunction::new(&g, vals).unwrap();
            let full = DyadicSet::full(&g);
            let p = ContentParams::new(delta);
            let a = choquet(&f, &full, p).unwrap();
            let b = choquet_wrt(&f, &full, &Content::new(&g, p).unwrap()).unwrap();
            let c = riemann(&f, &full, delta, 64);
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
            prop_assert!((a - c).abs() <= 1e-12 * a.max(1.0));
        }

        #[test]
        fn homogeneous_monotone_sublinear(a in small_fn(), b in small_fn(), s in 0.0f64..10.0, delta in 0.1f64..2.0) {
            let g = Grid::cube(2, 2, 1.0).unwrap();
            let p = ContentParams::new(delta);
            let full = DyadicSet::full(&g);
            let f = StepFunction::new(&g, a).unwrap();
            let h = StepFunction::new(&g, b).unwrap();
            let i = |x: &StepFunction| choquet(x, &full, p).unwrap();
            let sum = f.zip_map(&h, |x, y| x + y).unwrap();
            let mx = f.zip_map(&h, f64::max).unwrap();
            prop_assert!(i(&sum) <= (i(&f) + i(&h)) * (1.0 + 1e-12));
            prop_assert!(i(&f) <= i(&mx) && i(&h) <= i(&mx));
            let scaled = f.map(|v| s * v).unwrap();
            prop_assert!((i(&scaled) - s * i(&f)).abs() <= 1e-12 * i(&scaled).max(1.0));
        }
    }
}
