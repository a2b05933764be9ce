//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use capbmo_core::cz::{cz_decompose, cz_verify};
use capbmo_core::oscillation::{bmo_seminorm, gamma_interval, oscillation_objective, Centering};
use capbmo_core::verify::*;
use capbmo_core::weights::{a1_constant, power_maximal_weight, weighted_l1_comparison, ROUNDING_SLACK};
use capbmo_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn le(a: f64, b: f64) -> bool {
    a <= b + ROUNDING_SLACK * a.abs().max(b.abs()).max(1.0)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn within(start: Instant, budget: Duration) -> std::result::Result<(), String> {
    let t = start.elapsed();
    if t > budget {
        Err(format!("runtime {t:?} over budget {budget:?}"))
    } else {
        Ok(())
    }
}

fn pinned() -> Value {
    let text = include_str!("fixtures/pinned.json");
    serde_json::from_str(text).expect("pinned fixture parses")
}

fn random_fn(rng: &mut ChaCha8Rng, g: &Grid, lo: f64, hi: f64) -> StepFunction {
    let v = (0..g.cell_count())
        .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(lo..hi) })
        .collect();
    StepFunction::new(g, v).unwrap()
}

fn random_grid(rng: &mut ChaCha8Rng, max_n: usize, max_depth: u32) -> Grid {
    let n = rng.gen_range(1..=max_n);
    Grid::cube(n, rng.gen_range(1..=max_depth), rng.gen_range(0.5..4.0)).unwrap()
}

fn random_cube(rng: &mut ChaCha8Rng, g: &Grid) -> CubeSpec {
    let side = 1usize << rng.gen_range(0..=g.depth);
    let per = g.cells_per_axis() / side;
    CubeSpec::new((0..g.n).map(|_| rng.gen_range(0..per) * side).collect(), side)
}

/// The n = 2, depth-2, side-4 grid with E at cell (3,3) and F the slab of cells with coords[1] < 2.
fn counterexample_grid() -> (Grid, DyadicSet, DyadicSet) {
    let g = Grid::cube(2, 2, 4.0).unwrap();
    let e = set_from_cells(&g, &[g.cell_index(&[3, 3]).unwrap()]).unwrap();
    let f_cells: Vec<usize> = (0..16).filter(|&i| g.cell_coords(i)[1] < 2).collect();
    let f = set_from_cells(&g, &f_cells).unwrap();
    (g, e, f)
}

fn c1() -> Outcome {
    let start = Instant::now();
    let (g, e, slab) = counterexample_grid();
    let f = StepFunction::from_fn(&g, |i| if e.contains(i) { 1.0 } else if slab.contains(i) { -2.0 } else { 0.0 }).unwrap();
    let neg = f.map(|v| -v).unwrap();
    let root = g.root_cube();
    for delta in [0.25, 0.5, 1.0] {
        let p = ContentParams::new(delta);
        let k = 2f64.powf(1.0 + 2.0 * delta);
        let a = signed_average(&f, &root, p).unwrap().value;
        let b = signed_average(&neg, &root, p).unwrap().value;
        ensure!((a - (1.0 - k) / k).abs() <= 1e-12, "delta {delta}: average {a}");
        ensure!((b - (k - 1.0) / (1.0 + 4f64.powf(delta))).abs() <= 1e-12, "delta {delta}: negated average {b}");
        ensure!(b != -a, "delta {delta}: averages are antisymmetric");
    }
    within(start, Duration::from_secs(1))?;
    Ok("both signed averages match at delta 0.25, 0.5, 1".into())
}

fn c2() -> Outcome {
    let start = Instant::now();
    let (g, e, slab) = counterexample_grid();
    let full = DyadicSet::full(&g);
    for delta in [0.1, 0.25, 0.5, 0.75, 1.0] {
        let p = ContentParams::new(delta);
        let h = |s: &DyadicSet| dyadic_content(&g, s, p).unwrap();
        let four = 4f64.powf(delta);
        ensure!((h(&e) - 1.0).abs() <= 1e-12, "H(E) = {}", h(&e));
        ensure!((h(&slab) - four).abs() <= 1e-12, "H(F) = {}", h(&slab));
        ensure!((h(&full.difference(&slab).unwrap()) - four).abs() <= 1e-12, "H(Q minus F)");
        ensure!((h(&full.difference(&e).unwrap()) - four).abs() <= 1e-12, "H(Q minus E)");
    }
    within(start, Duration::from_secs(1))?;
    Ok("four identities hold for delta in {0.1, 0.25, 0.5, 0.75, 1}".into())
}

fn c3() -> Outcome {
    let start = Instant::now();
    let f = FunctionFamily::Minimizer.discretize(1).unwrap();
    let root = f.grid().root_cube();
    let p = ContentParams::new(1.0);
    let gi = gamma_interval(&f, None, 1.0, &root, p, 1e-11).unwrap();
    ensure!(gi.lo.abs() <= 1e-9 && (gi.hi - 2.0).abs() <= 1e-9, "interval [{}, {}]", gi.lo, gi.hi);
    ensure!((gi.min_value - 1.0).abs() <= 1e-9, "min {}", gi.min_value);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let c: f64 = rng.gen_range(-4.0..6.0);
        let expect = if (0.0..=2.0).contains(&c) { 1.0 } else { (c - 1.0).abs() };
        let got = oscillation_objective(&f, None, 1.0, &root, p, c).unwrap();
        ensure!((got - expect).abs() <= 1e-9, "F({c}) = {got}, expected {expect}");
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!("interval [{:.1e}, 2{:+.1e}], min 1, 50 samples agree", gi.lo, gi.hi - 2.0))
}

/// Exhaustive cover search on the n = 2, depth-2 grid: every subset of the 21
/// dyadic cubes, then a superset-minimum over the 16-bit cell masks.
fn cover_oracle(delta: f64) -> Vec<f64> {
    let g = Grid::cube(2, 2, 1.0).unwrap();
    let mut cubes: Vec<(u32, f64)> = Vec::new();
    for (side, len) in [(4usize, 1.0f64), (2, 0.5), (1, 0.25)] {
        for y in (0..4).step_by(side) {
            for x in (0..4).step_by(side) {
                let c = CubeSpec::new(vec![y, x], side);
                let mask = c.cells(&g).iter().fold(0u32, |m, &i| m | (1 << i));
                cubes.push((mask, len.powf(delta)));
            }
        }
    }
    let mut best = vec![f64::INFINITY; 1 << 16];
    let k = cubes.len();
    for sel in 0u32..(1 << k) {
        let (mut mask, mut cost) = (0u32, 0.0);
        for (j, c) in cubes.iter().enumerate() {
            if sel >> j & 1 == 1 {
                mask |= c.0;
                cost += c.1;
            }
        }
        let b = &mut best[mask as usize];
        if cost < *b {
            *b = cost;
        }
    }
    for bit in 0..16 {
        for m in (0..1usize << 16).rev() {
            if m >> bit & 1 == 0 {
                let up = best[m | 1 << bit];
                if up < best[m] {
                    best[m] = up;
                }
            }
        }
    }
    best
}

fn c4() -> Outcome {
    let start = Instant::now();
    let g = Grid::cube(2, 2, 1.0).unwrap();
    let mut worst = 0f64;
    for delta in [0.3, 1.0, 1.7] {
        let oracle = cover_oracle(delta);
        let h = Content::new(&g, ContentParams::new(delta)).unwrap();
        for m in 0..1usize << 16 {
            let mask: Vec<bool> = (0..16).map(|i| m >> i & 1 == 1).collect();
            let dp = h.of_mask(&mask).unwrap();
            worst = worst.max((dp - oracle[m]).abs());
            // Same minimum cover, summed in a different order.
            ensure!((dp - oracle[m]).abs() <= 4.0 * f64::EPSILON * dp.max(1.0), "delta {delta}, mask {m:#06x}: DP {dp} vs oracle {}", oracle[m]);
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("3 x 65536 subsets, max difference {worst:e}"))
}

fn c5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..1000 {
        let g = random_grid(&mut rng, 2, 3);
        let p = ContentParams::new(rng.gen_range(0.05..=g.n as f64));
        let f = random_fn(&mut rng, &g, 0.0, 3.0);
        let h = random_fn(&mut rng, &g, 0.0, 3.0);
        let region = DyadicSet::from_cube(&g, &random_cube(&mut rng, &g)).unwrap();
        let i = |u: &StepFunction| choquet(u, &region, p).unwrap();
        let sum = f.zip_map(&h, |a, b| a + b).unwrap();
        ensure!(le(i(&sum), i(&f) + i(&h)), "#{k} sublinearity");
        let prod = f.zip_map(&h, |a, b| a * b).unwrap();
        let sq = |u: &StepFunction| i(&u.map(|v| v * v).unwrap());
        ensure!(le(i(&prod), sq(&f).sqrt() * sq(&h).sqrt()), "#{k} Hölder");
        ensure!(le(sq(&sum).sqrt(), sq(&f).sqrt() + sq(&h).sqrt()), "#{k} Minkowski");
        let c = rng.gen_range(0.0..2.0);
        let shifted = f.map(|v| v + c).unwrap();
        let hr = dyadic_content(&g, &region, p).unwrap();
        ensure!(close(i(&shifted), i(&f) + c * hr, 1e-12), "#{k} constant addition");
        let a = rng.gen_range(0.0..5.0);
        ensure!(close(i(&f.map(|v| a * v).unwrap()), a * i(&f), 1e-12), "#{k} homogeneity");
        let bigger = f.zip_map(&h, |a, b| a + 0.5 * b).unwrap();
        ensure!(le(i(&f), i(&bigger)), "#{k} monotonicity");
        let mu = Content::new(&g, p).unwrap();
        ensure!(close(i(&f), choquet_wrt(&f, &region, &mu).unwrap(), 1e-12), "#{k} layer cake");
    }
    within(start, Duration::from_secs(30))?;
    Ok("1000 functions x 7 properties, zero violations".into())
}

fn c6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0f64;
    for k in 0..1000 {
        let g = random_grid(&mut rng, 2, 3);
        let p = ContentParams::new(rng.gen_range(0.05..=g.n as f64));
        let f = random_fn(&mut rng, &g, -4.0, 4.0);
        let cube = random_cube(&mut rng, &g);
        let j = jensen_sides(&f, &cube, p).unwrap();
        worst = worst.max(j.excess());
        ensure!(j.excess() <= ROUNDING_SLACK, "#{k}: {j:?}");
    }
    for a in [-3.0, -0.5, 0.0, 0.7, 2.0] {
        let g = Grid::cube(2, 2, 1.0).unwrap();
        let f = StepFunction::constant(&g, a).unwrap();
        let j = jensen_sides(&f, &g.root_cube(), ContentParams::new(1.3)).unwrap();
        ensure!(close(j.lhs_pos, j.rhs_pos, 1e-12) && close(j.lhs_neg, j.rhs_neg, 1e-12), "constant {a}: {j:?}");
    }
    Ok(format!("1000 triples, max relative excess {worst:e}; equality on constants"))
}

fn c7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0f64;
    for k in 0..500 {
        let g = random_grid(&mut rng, 2, 2);
        let p = ContentParams::new(rng.gen_range(0.05..=g.n as f64));
        let w = StepFunction::new(&g, (0..g.cell_count()).map(|_| rng.gen_range(0.0f64..3.0).exp() * rng.gen_range(0.01..1.0)).collect()).unwrap();
        let input = CharacterizationInput::Weight { w, p: rng.gen_range(1.1..4.0) };
        let r = verify_characterization(CharacterizationKind::BmoAp, &input, p, &CubeFamilyPolicy::lattice()).unwrap();
        ensure!(r.pass, "#{k}: {:?}", r.witnesses);
        worst = worst.max(r.get_constant("bmo_tilde_ln_w").unwrap() / r.get_constant("a2_constant").unwrap());
    }
    Ok(format!("500 weights; constant-2 bounds hold; max tilde-BMO(ln w)/[w]_A2 = {worst:.3} <= 4"))
}

fn c8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0f64;
    for k in 0..500 {
        let g = random_grid(&mut rng, 2, 3);
        let p = ContentParams::new(rng.gen_range(0.05..=g.n as f64));
        let f = random_fn(&mut rng, &g, -3.0, 3.0);
        let pol = CubeFamilyPolicy::dyadic();
        let bmo = bmo_seminorm(&f, p, &pol, Centering::InfC).unwrap().value;
        let tilde = bmo_seminorm(&f, p, &pol, Centering::FQDelta).unwrap().value;
        ensure!(bmo <= tilde && le(tilde, 3.0 * bmo), "#{k}: BMO {bmo}, tilde {tilde}");
        if bmo > 0.0 {
            worst = worst.max(tilde / bmo);
        }
    }
    Ok(format!("500 functions; max tilde/BMO = {worst:.4} <= 3"))
}

/// Maximal dyadic subcubes whose weighted average of |f| exceeds lambda, by full scan.
fn cz_oracle(f: &StepFunction, w: &StepFunction, lambda: f64, p: ContentParams) -> Vec<CubeSpec> {
    let g = f.grid();
    let fw = f.zip_map(w, |a, b| a.abs() * b).unwrap();
    let avg = |c: &CubeSpec| {
        if c.side_cells == 1 {
            return f.value(g.cell_index(&c.corner).unwrap()).abs();
        }
        let s = DyadicSet::from_cube(g, c).unwrap();
        choquet(&fw, &s, p).unwrap() / weighted_content(g, w, &s, p).unwrap()
    };
    let mut all = vec![];
    for level in 0..=g.depth {
        let side = g.cells_per_axis() >> level;
        let per = 1usize << level;
        for k in 0..per.pow(g.n as u32) {
            let corner = (0..g.n).map(|a| (k / per.pow((g.n - 1 - a) as u32)) % per * side).collect();
            all.push(CubeSpec::new(corner, side));
        }
    }
    let hot: Vec<CubeSpec> = all.into_iter().filter(|c| avg(c) > lambda).collect();
    let mut out: Vec<CubeSpec> = hot.iter().filter(|c| !hot.iter().any(|d| d != *c && d.contains_cube(c))).cloned().collect();
    out.sort();
    out
}

fn c9() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut selected = 0usize;
    let mut max_pr = 0f64;
    for k in 0..500 {
        let g = Grid::cube(rng.gen_range(1..=2), rng.gen_range(1..=3), rng.gen_range(0.5..4.0)).unwrap();
        let p = ContentParams::new(rng.gen_range(0.05..=g.n as f64));
        let f = StepFunction::new(&g, (0..g.cell_count()).map(|_| rng.gen_range(-4.0..4.0) * rng.gen_range(0.0f64..1.0).powi(4)).collect()).unwrap();
        let w = StepFunction::new(&g, (0..g.cell_count()).map(|_| rng.gen_range(0.05..5.0)).collect()).unwrap();
        let root = g.root_cube();
        let fw = f.zip_map(&w, |a, b| a.abs() * b).unwrap();
        let full = DyadicSet::full(&g);
        let root_avg = choquet(&fw, &full, p).unwrap() / weighted_content(&g, &w, &full, p).unwrap();
        let lambda = root_avg.max(1e-6) * rng.gen_range(1.0..4.0);
        let r = cz_decompose(&f, &w, &root, lambda, p).unwrap();
        ensure!(r.selected == cz_oracle(&f, &w, lambda, p), "#{k}: recursion differs from the oracle");
        let rep = cz_verify(&f, &w, &root, lambda, p, &r).unwrap();
        ensure!(rep.pass, "#{k}: {:?}", rep.witnesses);
        selected += r.selected.len();
        max_pr = max_pr.max(r.parent_ratios.iter().cloned().fold(0.0, f64::max));
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("500 instances, {selected} selected cubes, max parent ratio {max_pr:.3}"))
}

fn c10() -> Outcome {
    let pin = pinned();
    let p = ContentParams::new(1.0);
    let pol = CubeFamilyPolicy::dyadic();
    let mut notes = vec![];
    for (name, fam) in [("log_abs", FunctionFamily::LogAbs { n: 2 }), ("minimizer", FunctionFamily::Minimizer)] {
        for kind in [JnKind::Bmo, JnKind::Blo] {
            let mut prev: Option<(f64, f64)> = None;
            for d in 3..=6u32 {
                let a = jn_analysis(kind, &fam.discretize(d).unwrap(), None, 1.0, p, &pol).unwrap();
                if d <= 5 {
                    ensure!(a.report.pass && a.c > 0.0 && a.prefactor.is_finite(), "{name} {kind:?} depth {d}: {:?}", a.report.witnesses);
                }
                if let Some((c, big_c)) = prev {
                    let (ok, excess) = jn_bound_check(&a, c, 2.0 * big_c);
                    ensure!(ok, "{name} {kind:?}: depth {} pair fails at depth {d} (log excess {excess})", d - 1);
                }
                let row = pin["jn"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .find(|r| r["function"] == name && r["kind"] == serde_json::to_value(kind).unwrap() && r["depth"] == d)
                    .expect("pinned row");
                let (pc, pp) = (row["c"].as_f64().unwrap(), row["prefactor"].as_f64().unwrap());
                ensure!(close(a.c, pc, 1e-9) && close(a.prefactor, pp, 1e-9), "{name} {kind:?} depth {d}: (c, C) = ({}, {}) vs pinned ({pc}, {pp})", a.c, a.prefactor);
                if d == 5 {
                    notes.push(format!("{name}/{kind:?} c={:.3e} C={:.3}", a.c, a.prefactor));
                }
                prev = Some((a.c, a.prefactor));
            }
        }
    }
    Ok(format!("depths 3-5 uniform, carried to d+1 with 2C; at depth 5: {}", notes.join(", ")))
}

fn c11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut lo, mut hi) = (f64::INFINITY, 0f64);
    for k in 0..500 {
        let g = random_grid(&mut rng, 2, 3);
        let p = ContentParams::new(rng.gen_range(0.05..=g.n as f64));
        let f = random_fn(&mut rng, &g, -3.0, 3.0);
        if f.values().iter().all(|&v| v == 0.0) {
            continue;
        }
        let w = StepFunction::new(&g, (0..g.cell_count()).map(|_| rng.gen_range(0.05..10.0)).collect()).unwrap();
        let (lhs, mid) = weighted_l1_comparison(&f, &w, p).unwrap();
        let r = mid / lhs;
        ensure!(r > 0.0 && r.is_finite(), "#{k}: ratio {r}");
        lo = lo.min(r);
        hi = hi.max(r);
    }
    ensure!(lo >= 0.25, "min ratio {lo} below 1/4");
    Ok(format!("500 pairs, mid/lhs in [{lo:.6}, {hi:.4}], min >= 1/4"))
}

fn c12() -> Outcome {
    let p = ContentParams::new(1.0);
    let pol = CubeFamilyPolicy::dyadic();
    let mut notes = vec![];
    for alpha in [0.3, 0.7] {
        let mut consts = vec![];
        for d in 4..=6u32 {
            let g = Grid::cube(2, d, 1.0).unwrap();
            let cell = StepFunction::from_fn(&g, |i| if i == 0 { 1.0 } else { 0.0 }).unwrap();
            let w = power_maximal_weight(&cell, alpha, p, &pol).unwrap();
            let a1 = a1_constant(&w, p, &pol).unwrap().ap_constant;
            ensure!(a1.is_finite(), "alpha {alpha} depth {d}: A1 constant infinite");
            consts.push(a1);
            let r = verify_characterization(CharacterizationKind::BloA1, &CharacterizationInput::Weight { w, p: 2.0 }, p, &pol).unwrap();
            ensure!(r.pass, "alpha {alpha} depth {d}: {:?}", r.witnesses);
        }
        let (lo, hi) = consts.iter().fold((f64::INFINITY, 0f64), |(a, b), &c| (a.min(c), b.max(c)));
        ensure!(hi <= 2.0 * lo, "alpha {alpha}: A1 constants {consts:?}");
        notes.push(format!("alpha {alpha}: A1 {lo:.3}..{hi:.3}"));
    }
    let input = CharacterizationInput::Function {
        family: FunctionFamily::LogAbs { n: 2 },
        depths: vec![3, 4, 5],
        gammas: capbmo_core::weights::default_gamma_grid(),
        p: 2.0,
    };
    let r = verify_characterization(CharacterizationKind::BmoAp, &input, p, &pol).unwrap();
    let gamma = r.get_constant("largest_passing_gamma").unwrap();
    ensure!(r.pass && gamma > 0.0, "reverse search: {:?}", r.witnesses);
    let pin = pinned()["reverse_bmo_ap_log_abs"]["largest_passing_gamma"].as_f64().unwrap();
    ensure!(gamma == pin, "largest passing gamma {gamma} vs pinned {pin}");
    Ok(format!("{}; ln|x| reverse gamma {gamma}", notes.join(", ")))
}

fn c13() -> Outcome {
    let start = Instant::now();
    let pin = pinned();
    let th: InclusionThresholds = serde_json::from_value(pin["inclusions"]["thresholds"].clone()).unwrap();
    let r = verify_inclusions(&[3, 4, 5, 6], ContentParams::new(1.0), InclusionFamily::Log, th, &CubeFamilyPolicy::dyadic()).unwrap();
    ensure!(r.pass, "{:?}", r.witnesses);
    let c = &r.constants["probe_c_blo_origin"];
    let pinned_c = &pin["inclusions"]["constants"]["probe_c_blo_origin"];
    ensure!(c == pinned_c, "probe (c) {c} vs pinned {pinned_c}");
    within(start, Duration::from_secs(120))?;
    Ok(format!(
        "(a) spread {:.3} <= {}, (b) spread {:.3} <= {}, (c) {}",
        r.get_constant("probe_a_spread").unwrap(),
        th.blo_factor,
        r.get_constant("probe_b_spread").unwrap(),
        th.bmo_factor,
        c
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("counterexample averages", c1),
        ("content identities", c2),
        ("minimizer interval", c3),
        ("content DP vs exhaustive covers", c4),
        ("Choquet calculus suite", c5),
        ("Jensen suite", c6),
        ("exponential constants", c7),
        ("norm-equivalence chain", c8),
        ("CZ decomposition", c9),
        ("JN uniformity", c10),
        ("weighted L1 comparison", c11),
        ("characterization round trip", c12),
        ("strict-inclusion probes", c13),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(msg) => println!("[PASS] criterion {:>2} {name}: {msg} ({:.2?})", k + 1, t.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] criterion {:>2} {name}: {msg} ({:.2?})", k + 1, t.elapsed())
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed in {:.2?}", criteria.len() - failed, start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
