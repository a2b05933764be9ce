use serde::{Deserialize, Serialize};
use serde_json::json;

use super::FunctionFamily;
use crate::choquet::{cube_average, signed_average_with};
use crate::content::{Content, ContentParams};
use crate::error::{Error, Result};
use crate::grid::{enumerate_cubes, CubeFamilyPolicy, CubeSpec, DyadicSet, StepFunction};
use crate::oscillation::{seminorm_on_cubes, Oscillation};
use crate::report::{num, VerificationReport};
use crate::weights::{a1_constant_on, ap_constant_on, maximal_function, ROUNDING_SLACK};

/// Absolute slack for bounds that compare searched infima against each other.
const SEARCH_SLACK: f64 = 1e-8;

fn le(a: f64, b: f64) -> bool {
    a <= b + ROUNDING_SLACK * b.abs().max(1.0)
}

/// Log forms of e^{(ln w)_{Q,δ}} ≤ 2·avg_Q w and
/// e^{−(ln w)_{Q,δ}/(p−1)} ≤ 2·avg_Q w^{−1/(p−1)}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialBounds {
    pub log_lhs_pos: f64,
    pub log_rhs_pos: f64,
    pub log_lhs_neg: f64,
    pub log_rhs_neg: f64,
}

impl ExponentialBounds {
    pub fn holds(&self) -> bool {
        le(self.log_lhs_pos, self.log_rhs_pos) && le(self.log_lhs_neg, self.log_rhs_neg)
    }
}

fn exponential_with(h: &Content, w: &StepFunction, lnw: &StepFunction, p: f64, cube: &CubeSpec) -> ExponentialBounds {
    let a = signed_average_with(h, lnw, cube).value;
    let e = -1.0 / (p - 1.0);
    ExponentialBounds {
        log_lhs_pos: a,
        log_rhs_pos: 2f64.ln() + cube_average(h, cube, &|i| w.value(i)).ln(),
        log_lhs_neg: -a / (p - 1.0),
        log_rhs_neg: 2f64.ln() + cube_average(h, cube, &|i| w.value(i).powf(e)).ln(),
    }
}

pub fn exponential_bounds(w: &StepFunction, p: f64, cube: &CubeSpec, params: ContentParams) -> Result<ExponentialBounds> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must exceed 1")));
    }
    w.require_positive()?;
    cube.check(w.grid())?;
    let h = Content::new(w.grid(), params)?;
    let lnw = w.map(f64::ln)?;
    Ok(exponential_with(&h, w, &lnw, p, cube))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacterizationKind {
    BmoAp,
    BloA1,
}

fn default_p() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "input", rename_all = "snake_case")]
pub enum CharacterizationInput {
    /// Forward direction: a weight.
    Weight {
        w: StepFunction,
        #[serde(default = "default_p")]
        p: f64,
    },
    /// Reverse direction: a function family refined over depths.
    Function {
        family: FunctionFamily,
        depths: Vec<u32>,
        #[serde(default = "crate::weights::default_gamma_grid")]
        gammas: Vec<f64>,
        #[serde(default = "default_p")]
        p: f64,
    },
}

pub fn verify_characterization(
    kind: CharacterizationKind,
    input: &CharacterizationInput,
    params: ContentParams,
    policy: &CubeFamilyPolicy,
) -> Result<VerificationReport> {
    let name = match kind {
        CharacterizationKind::BmoAp => "thm-bmo-ap",
        CharacterizationKind::BloA1 => "thm-blo-a1",
    };
    let mut rep = VerificationReport::new(name, policy.rng_seed);
    rep.param("delta", num(params.delta)).param("family", policy.label());
    match input {
        CharacterizationInput::Weight { w, p } => forward(kind, w, *p, params, policy, &mut rep)?,
        CharacterizationInput::Function { family, depths, gammas, p } => {
            reverse(kind, family, depths, gammas, *p, params, policy, &mut rep)?
        }
    }
    Ok(rep)
}

fn forward(
    kind: CharacterizationKind,
    w: &StepFunction,
    p: f64,
    params: ContentParams,
    policy: &CubeFamilyPolicy,
    rep: &mut VerificationReport,
) -> Result<()> {
    w.require_positive()?;
    let h = Content::new(w.grid(), params)?;
    let cubes = enumerate_cubes(w.grid(), policy);
    let lnw = w.map(f64::ln)?;
    rep.param("direction", "forward");
    match kind {
        CharacterizationKind::BmoAp => {
            if !(p > 1.0) {
                return Err(Error::InvalidParameter(format!("p = {p} must exceed 1")));
            }
            rep.param("p", num(p));
            let bmo = seminorm_on_cubes(&lnw, None, Oscillation::Bmo, params, &cubes)?.value;
            let tilde = seminorm_on_cubes(&lnw, None, Oscillation::BmoTilde, params, &cubes)?.value;
            let (ap, _) = ap_constant_on(&h, w, p, &cubes)?;
            let (a2, _) = ap_constant_on(&h, w, 2.0, &cubes)?;
            let mut bad = 0usize;
            for cube in &cubes {
                for q in [p, 2.0] {
                    let e = exponential_with(&h, w, &lnw, q, cube);
                    if !e.holds() {
                        bad += 1;
                        if bad <= 8 {
                            rep.fail(format!("(a) exponential bound with constant 2 fails on {cube} at p = {q}: {e:?}"));
                        }
                    }
                }
            }
            rep.require(le(tilde, 4.0 * a2), || format!("(b) tilde-BMO of ln w = {tilde} exceeds 4 [w]_A2 = {}", 4.0 * a2));
            rep.constant("bmo_ln_w", bmo)
                .constant("bmo_tilde_ln_w", tilde)
                .constant("ap_constant", ap)
                .constant("a2_constant", a2)
                .constant("realized_c", bmo / ap.powf(1f64.max(1.0 / (p - 1.0))))
                .constant("exponential_violations", bad as f64);
        }
        CharacterizationKind::BloA1 => {
            let blo = seminorm_on_cubes(&lnw, None, Oscillation::Blo, params, &cubes)?;
            let (a1, _) = a1_constant_on(&h, w, &cubes);
            let mut worst = 0f64;
            let mut bad = 0usize;
            for (cube, co) in cubes.iter().zip(&blo.per_cube) {
                let m = co.center;
                let avg = cube_average(&h, cube, &|i| (lnw.value(i) - m).exp());
                worst = worst.max(avg);
                if !le(avg, a1) || !le(co.value, avg.ln()) {
                    bad += 1;
                    if bad <= 8 {
                        rep.fail(format!(
                            "(c) on {cube}: avg e^(ln w - esinf) = {avg}, [w]_A1 = {a1}, contribution {}",
                            co.value
                        ));
                    }
                }
            }
            rep.require(le(blo.value, a1.ln()), || format!("BLO of ln w = {} exceeds ln [w]_A1 = {}", blo.value, a1.ln()));
            rep.constant("blo_ln_w", blo.value)
                .constant("a1_constant", a1)
                .constant("ln_a1_constant", a1.ln())
                .constant("ln_c", 0.0)
                .constant("max_cube_exp_average", worst)
                .constant("cube_violations", bad as f64);
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn reverse(
    kind: CharacterizationKind,
    family: &FunctionFamily,
    depths: &[u32],
    gammas: &[f64],
    p: f64,
    params: ContentParams,
    policy: &CubeFamilyPolicy,
    rep: &mut VerificationReport,
) -> Result<()> {
    if depths.is_empty() || gammas.is_empty() {
        return Err(Error::InvalidParameter("reverse direction needs depths and gammas".into()));
    }
    if gammas.iter().any(|g| !(*g > 0.0)) {
        return Err(Error::InvalidParameter("gammas must be positive".into()));
    }
    if kind == CharacterizationKind::BmoAp && !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must exceed 1")));
    }
    rep.param("direction", "reverse").param("p", num(p)).param("depths", json!(depths));
    let osc = match kind {
        CharacterizationKind::BmoAp => Oscillation::Bmo,
        CharacterizationKind::BloA1 => Oscillation::Blo,
    };
    struct Level {
        f: StepFunction,
        norm: f64,
        h: Content,
        cubes: Vec<CubeSpec>,
    }
    let levels: Vec<Level> = depths
        .iter()
        .map(|&d| {
            let f = family.discretize(d)?;
            let cubes = enumerate_cubes(f.grid(), policy);
            let norm = seminorm_on_cubes(&f, None, osc, params, &cubes)?.value;
            Ok(Level { h: Content::new(f.grid(), params)?, f, norm, cubes })
        })
        .collect::<Result<_>>()?;
    rep.constant_value("seminorms", json!(levels.iter().map(|l| num(l.norm)).collect::<Vec<_>>()));
    let mut sorted = gammas.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut table = Vec::new();
    let mut largest = None;
    let mut smallest_passes = false;
    for (k, &g) in sorted.iter().enumerate() {
        let mut consts = Vec::new();
        for l in &levels {
            let s = if l.norm > 0.0 { g / l.norm } else { 0.0 };
            let w = l.f.map(|v| (s * v).exp())?;
            let c = match kind {
                CharacterizationKind::BmoAp => ap_constant_on(&l.h, &w, p, &l.cubes)?.0,
                CharacterizationKind::BloA1 => a1_constant_on(&l.h, &w, &l.cubes).0,
            };
            consts.push(c);
        }
        let pass = consts.iter().all(|c| c.is_finite())
            && consts.windows(2).all(|c| c[0].max(c[1]) <= 2.0 * c[0].min(c[1]));
        if pass && largest.is_none() {
            largest = Some(g);
        }
        if k + 1 == sorted.len() {
            smallest_passes = pass;
        }
        table.push(json!({"gamma": num(g), "constants": consts.iter().map(|&c| num(c)).collect::<Vec<_>>(), "pass": pass}));
    }
    rep.constant_value("gamma_table", json!(table));
    rep.constant("largest_passing_gamma", largest.unwrap_or(0.0));
    rep.require(smallest_passes, || format!("constants unstable across depths at the smallest gamma {}", sorted[sorted.len() - 1]));
    Ok(())
}

pub fn verify_equivalences(
    functions: &[StepFunction],
    w: &StepFunction,
    q_list: &[f64],
    params: ContentParams,
    policy: &CubeFamilyPolicy,
) -> Result<VerificationReport> {
    w.require_positive()?;
    if functions.iter().any(|f| f.grid() != w.grid()) {
        return Err(Error::GridMismatch);
    }
    if q_list.iter().any(|q| !(*q > 0.0)) {
        return Err(Error::InvalidParameter("q values must be positive".into()));
    }
    let mut rep = VerificationReport::new("equiv", policy.rng_seed);
    rep.param("delta", num(params.delta))
        .param("family", policy.label())
        .param("functions", functions.len())
        .param("q", json!(q_list.iter().map(|&q| num(q)).collect::<Vec<_>>()));
    let h = Content::new(w.grid(), params)?;
    let cubes = enumerate_cubes(w.grid(), policy);
    if let Ok((a2, _)) = ap_constant_on(&h, w, 2.0, &cubes) {
        rep.constant("weight_a2_constant", a2);
    }
    let mut wr = vec![(f64::INFINITY, 0.0f64); q_list.len()];
    let mut br = vec![(f64::INFINITY, 0.0f64); q_list.len()];
    let mut chain = 0f64;
    for (k, f) in functions.iter().enumerate() {
        let bmo = seminorm_on_cubes(f, None, Oscillation::Bmo, params, &cubes)?.value;
        let tilde = seminorm_on_cubes(f, None, Oscillation::BmoTilde, params, &cubes)?.value;
        let blo = seminorm_on_cubes(f, None, Oscillation::Blo, params, &cubes)?.value;
        rep.require(bmo <= tilde && le(tilde, 3.0 * bmo), || {
            format!("function {k}: chain BMO {bmo} <= tilde {tilde} <= 3 BMO fails")
        });
        if bmo > 0.0 {
            chain = chain.max(tilde / bmo);
        }
        for (j, &q) in q_list.iter().enumerate() {
            let wq = seminorm_on_cubes(f, Some(w), Oscillation::Weighted { q }, params, &cubes)?.value;
            let bq = seminorm_on_cubes(f, None, Oscillation::BloQ { q }, params, &cubes)?.value;
            for (val, base, slot, label) in [(wq, bmo, &mut wr[j], "weighted"), (bq, blo, &mut br[j], "BLO^q")] {
                if base > 0.0 {
                    let r = val / base;
                    rep.require(r > 0.0 && r.is_finite(), || format!("function {k}: {label} ratio {r} at q = {q}"));
                    slot.0 = slot.0.min(r);
                    slot.1 = slot.1.max(r);
                } else {
                    rep.require(val == 0.0, || format!("function {k}: {label} seminorm {val} of a constant at q = {q}"));
                }
            }
        }
    }
    rep.constant("max_tilde_over_bmo", chain);
    for (j, &q) in q_list.iter().enumerate() {
        let fix = |x: f64| if x.is_finite() { x } else { 0.0 };
        rep.constant(&format!("weighted_ratio_min_q{q}"), fix(wr[j].0))
            .constant(&format!("weighted_ratio_max_q{q}"), wr[j].1)
            .constant(&format!("bloq_ratio_min_q{q}"), fix(br[j].0))
            .constant(&format!("bloq_ratio_max_q{q}"), br[j].1);
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InclusionFamily {
    /// ±ln|x| on [−1,1]^2.
    Log,
    /// A constant function; every probe degenerates.
    Constant,
}

/// Factors for the boundedness probes, pinned from a reference run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InclusionThresholds {
    /// Allowed max/min spread of ‖−ln|x|‖_BLO across depths.
    pub blo_factor: f64,
    /// Allowed max/min spread of ‖ln|x|‖_BMO across depths.
    pub bmo_factor: f64,
}

impl Default for InclusionThresholds {
    fn default() -> Self {
        InclusionThresholds { blo_factor: 1.5, bmo_factor: 1.5 }
    }
}

fn spread(v: &[f64]) -> f64 {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(0.0, f64::max);
    if hi == 0.0 {
        1.0
    } else {
        hi / lo
    }
}

pub fn verify_inclusions(
    depths: &[u32],
    params: ContentParams,
    family: InclusionFamily,
    thresholds: InclusionThresholds,
    policy: &CubeFamilyPolicy,
) -> Result<VerificationReport> {
    if depths.len() < 2 || depths.windows(2).any(|d| d[0] >= d[1]) {
        return Err(Error::InvalidParameter("need at least two increasing depths".into()));
    }
    let (pos, neg) = match family {
        InclusionFamily::Log => (FunctionFamily::LogAbs { n: 2 }, FunctionFamily::NegLogAbs { n: 2 }),
        InclusionFamily::Constant => {
            let c = FunctionFamily::Constant { n: 2, value: 1.0 };
            (c, c)
        }
    };
    let mut rep = VerificationReport::new("inclusions", policy.rng_seed);
    rep.param("delta", num(params.delta))
        .param("family", policy.label())
        .param("depths", json!(depths))
        .param("functions", serde_json::to_value(family).expect("plain enum"));
    let (mut a, mut sup, mut b, mut c) = (vec![], vec![], vec![], vec![]);
    for &d in depths {
        let fp = pos.discretize(d)?;
        let fneg = neg.discretize(d)?;
        let cubes = enumerate_cubes(fp.grid(), policy);
        let origin = vec![0.0; fp.grid().n];
        let at_origin: Vec<CubeSpec> =
            cubes.iter().filter(|q| q.closure_contains_point(fp.grid(), &origin)).cloned().collect();
        a.push(seminorm_on_cubes(&fneg, None, Oscillation::Blo, params, &cubes)?.value);
        sup.push(fneg.sup_norm());
        b.push(seminorm_on_cubes(&fp, None, Oscillation::Bmo, params, &cubes)?.value);
        c.push(seminorm_on_cubes(&fp, None, Oscillation::Blo, params, &at_origin)?.value);
    }
    let v = |x: &[f64]| json!(x.iter().map(|&y| num(y)).collect::<Vec<_>>());
    rep.constant_value("probe_a_blo", v(&a))
        .constant_value("probe_a_sup_norm", v(&sup))
        .constant_value("probe_b_bmo", v(&b))
        .constant_value("probe_c_blo_origin", v(&c))
        .constant("probe_a_spread", spread(&a))
        .constant("probe_b_spread", spread(&b));
    rep.require(spread(&a) <= thresholds.blo_factor, || format!("(a) BLO spread {} > {}", spread(&a), thresholds.blo_factor));
    rep.require(spread(&b) <= thresholds.bmo_factor, || format!("(b) BMO spread {} > {}", spread(&b), thresholds.bmo_factor));
    match family {
        InclusionFamily::Log => {
            rep.require(sup.windows(2).all(|s| s[1] > s[0]), || "(a) sup norm does not grow".into());
            rep.require(c.windows(2).all(|s| s[1] > s[0]), || format!("(c) not strictly increasing: {c:?}"));
        }
        InclusionFamily::Constant => {
            rep.require(a.iter().chain(&b).chain(&c).all(|&x| x == 0.0), || "constant control is not flat".into());
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorizationKind {
    Bmo,
    Blo,
}

#[allow(clippy::too_many_arguments)]
pub fn verify_factorization(
    alpha: f64,
    beta: f64,
    g1: &StepFunction,
    g2: Option<&StepFunction>,
    b: &StepFunction,
    kind: FactorizationKind,
    params: ContentParams,
    policy: &CubeFamilyPolicy,
) -> Result<VerificationReport> {
    if !(alpha >= 0.0) || !(beta >= 0.0) {
        return Err(Error::InvalidParameter("alpha and beta must be non-negative".into()));
    }
    if kind == FactorizationKind::Blo && beta != 0.0 {
        return Err(Error::InvalidParameter("the BLO form has a single generator (beta = 0)".into()));
    }
    if g1.grid() != b.grid() || g2.is_some_and(|g| g.grid() != b.grid()) {
        return Err(Error::GridMismatch);
    }
    let log_max = |g: &StepFunction| -> Result<StepFunction> {
        if g.values().iter().all(|&v| v == 0.0) {
            return Err(Error::Precondition("generator is identically zero".into()));
        }
        maximal_function(&g.abs(), params, policy)?.map(f64::ln)
    };
    let l1 = log_max(g1)?;
    let l2 = match (beta > 0.0, g2) {
        (true, Some(g)) => log_max(g)?,
        (true, None) => return Err(Error::InvalidParameter("beta > 0 needs a second generator".into())),
        (false, _) => StepFunction::constant(b.grid(), 0.0)?,
    };
    let f = StepFunction::new(
        b.grid(),
        (0..b.grid().cell_count())
            .map(|i| alpha * l1.value(i) + beta * l2.value(i) + b.value(i))
            .collect(),
    )?;
    let osc = match kind {
        FactorizationKind::Bmo => Oscillation::Bmo,
        FactorizationKind::Blo => Oscillation::Blo,
    };
    let cubes = enumerate_cubes(b.grid(), policy);
    let s = |g: &StepFunction| seminorm_on_cubes(g, None, osc, params, &cubes).map(|r| r.value);
    let (sf, s1, s2) = (s(&f)?, s(&l1)?, s(&l2)?);
    let bound = alpha * s1 + beta * s2 + 2.0 * b.sup_norm();
    let mut rep = VerificationReport::new("factorization", policy.rng_seed);
    rep.param("alpha", num(alpha))
        .param("beta", num(beta))
        .param("kind", serde_json::to_value(kind).expect("plain enum"))
        .param("delta", num(params.delta))
        .param("family", policy.label());
    rep.constant("seminorm", sf)
        .constant("seminorm_ln_mg1", s1)
        .constant("seminorm_ln_mg2", s2)
        .constant("b_sup_norm", b.sup_norm())
        .constant("bound", bound);
    rep.require(sf.is_finite() && sf <= bound * (1.0 + ROUNDING_SLACK) + SEARCH_SLACK, || {
        format!("seminorm {sf} exceeds the assembled bound {bound}")
    });
    Ok(rep)
}

pub fn weak_restricted_strong_check(
    f: &StepFunction,
    e: &DyadicSet,
    p: f64,
    r: f64,
    params: ContentParams,
    policy: &CubeFamilyPolicy,
) -> Result<VerificationReport> {
    if !(p >= 1.0) || !(r > 0.0) || r >= p {
        return Err(Error::InvalidParameter(format!("need p >= 1 and 0 < r < p, got p = {p}, r = {r}")));
    }
    if e.grid() != f.grid() {
        return Err(Error::GridMismatch);
    }
    let h = Content::new(f.grid(), params)?;
    let mf = maximal_function(&f.abs(), params, policy)?;
    let norm = h.integrate_root(&|i| f.value(i).abs().powf(p)).powf(1.0 / p);
    let he = h.of_set(e)?;
    let left = h.integrate_mask(e.mask(), &|i| mf.value(i).powf(r)).powf(1.0 / r);
    let mut rep = VerificationReport::new("weak-strong", policy.rng_seed);
    rep.param("p", num(p)).param("r", num(r)).param("delta", num(params.delta)).param("family", policy.label());
    if norm == 0.0 {
        rep.witness("f vanishes, trivial pass");
        rep.constant("left", left).constant("right", 0.0);
        return Ok(rep);
    }
    // sup over λ of λ·H̃({Mf > λ})^{1/p} is attained as λ rises to a value of Mf.
    let mut levels: Vec<f64> = mf.values().to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let weak = levels
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * h.of_mask(&mf.values().iter().map(|&m| m >= v).collect::<Vec<_>>()).expect("grid mask").powf(1.0 / p))
        .fold(0.0, f64::max)
        / norm;
    let right = weak * (p / (p - r)).powf(1.0 / r) * he.powf(1.0 / r - 1.0 / p) * norm;
    rep.constant("left", left)
        .constant("right", right)
        .constant("weak_constant", weak)
        .constant("lp_norm", norm)
        .constant("set_content", he)
        .constant("slack", if left > 0.0 { right / left } else { f64::INFINITY });
    rep.require(le(left, right), || format!("left {left} exceeds right {right}"));
    Ok(rep)
}
