mod fixture;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use capbmo_core::cz::{cz_decompose, cz_verify};
use capbmo_core::oscillation::{
    blo_q_seminorm, blo_seminorm, bmo_seminorm, gamma_interval, oscillation_objective, weighted_bmo_seminorm, Centering,
};
use capbmo_core::verify::{
    jn_analysis, random_functions, verify_characterization, verify_equivalences, verify_factorization,
    verify_inclusions, weak_restricted_strong_check, CharacterizationInput, CharacterizationKind, FactorizationKind,
    FunctionFamily, InclusionFamily, JnKind,
};
use capbmo_core::weights::{a1_constant, a1_factorize, ap_constant, default_gamma_grid, maximal_function};
use capbmo_core::{
    choquet, dyadic_content, set_from_cells, signed_average, ContentParams, CubeFamilyPolicy, CubeSpec, DyadicSet,
    FunctionFile, Grid, SetFile, StepFunction, VerificationReport,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fixture::Fixture;

#[derive(Parser)]
#[command(name = "capbmo", version, about = "Dyadic content, Choquet averages and capacitary oscillation checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Content exponent.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Cube family: dyadic, lattice or sampled:N.
    #[arg(long, default_value = "dyadic")]
    family: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report envelope here.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn params(&self) -> ContentParams {
        ContentParams::new(self.delta)
    }

    fn policy(&self) -> Result<CubeFamilyPolicy> {
        Ok(CubeFamilyPolicy::parse(&self.family, self.seed)?)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Dyadic content of a cell set.
    Content {
        #[arg(long)]
        set: PathBuf,
        /// Grid file, used when the set file carries no grid.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Choquet integral of a step function over a set (default: the whole grid).
    Choquet {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long)]
        set: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Signed content average over a cube.
    Avg {
        #[arg(long = "fn")]
        func: PathBuf,
        /// Cube as "i,j,...:side" in cells, or "root".
        #[arg(long, default_value = "root")]
        cube: String,
        #[command(flatten)]
        common: Common,
    },
    /// Oscillation seminorms.
    Seminorm {
        #[arg(value_enum)]
        kind: SeminormKind,
        #[arg(long = "fn")]
        func: PathBuf,
        /// Weight, required for bmoqw.
        #[arg(long)]
        wt: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Weight constants and transforms.
    Weight {
        #[command(subcommand)]
        cmd: WeightCmd,
    },
    /// Calderon-Zygmund selection of maximal cubes.
    Czd {
        #[arg(long = "fn")]
        func: PathBuf,
        /// Weight; defaults to 1.
        #[arg(long)]
        wt: Option<PathBuf>,
        #[arg(long, default_value = "root")]
        cube: String,
        #[arg(long)]
        lambda: f64,
        /// Also run the property checks; exit 1 if one fails.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run a check on a fixture file.
    Verify {
        #[arg(value_enum)]
        check: Check,
        #[arg(long)]
        fixture: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV of survival curves (JN checks only).
        #[arg(long)]
        curves: Option<PathBuf>,
    },
    /// Recompute the built-in worked examples.
    Reproduce {
        #[arg(value_enum)]
        example: Example,
        /// Content exponent; each example has its own default set.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 1e-11)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum WeightCmd {
    /// Grid A_p constant.
    Ap {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Grid A_1 constant.
    A1 {
        #[arg(long = "fn")]
        func: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Content maximal function, written as a function file.
    Maximal {
        #[arg(long = "fn")]
        func: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Split an A_1 weight as b (M base)^alpha.
    A1Factorize {
        #[arg(long = "fn")]
        func: PathBuf,
        /// Comma-separated gamma candidates.
        #[arg(long, value_delimiter = ',')]
        gamma_grid: Option<Vec<f64>>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SeminormKind {
    Bmo,
    BmoTilde,
    Blo,
    Bloq,
    Bmoqw,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    JnBmo,
    JnBlo,
    JnWeighted,
    ThmBmoAp,
    ThmBloA1,
    Equiv,
    Inclusions,
    Factorization,
    WeakStrong,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    RemarkAverage,
    GammaInterval,
    ContentIdentities,
}

/// Result of one subcommand: the JSON body and whether it passed.
struct Outcome {
    body: Value,
    pass: bool,
}

impl Outcome {
    fn ok(body: Value) -> Self {
        Outcome { body, pass: true }
    }

    fn report(rep: &VerificationReport) -> Result<Self> {
        Ok(Outcome { body: serde_json::to_value(rep)?, pass: rep.pass })
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_function(path: &Path) -> Result<StepFunction> {
    read_json(path)
}

fn read_set(path: &Path, grid: Option<&Grid>) -> Result<DyadicSet> {
    let mut v: Value = read_json(path)?;
    if let (Some(obj), Some(g)) = (v.as_object_mut(), grid) {
        obj.entry("grid").or_insert(serde_json::to_value(g)?);
    }
    let file: SetFile = serde_json::from_value(v).with_context(|| format!("parsing {}", path.display()))?;
    Ok(DyadicSet::try_from(file)?)
}

fn parse_cube(s: &str, grid: &Grid) -> Result<CubeSpec> {
    let cube = if s == "root" { grid.root_cube() } else { s.parse::<CubeSpec>()? };
    cube.check(grid)?;
    Ok(cube)
}

fn seminorm_cmd(kind: SeminormKind, f: &StepFunction, wt: Option<&Path>, q: f64, c: &Common) -> Result<Outcome> {
    let (p, pol) = (c.params(), c.policy()?);
    let rep = match kind {
        SeminormKind::Bmo => bmo_seminorm(f, p, &pol, Centering::InfC)?,
        SeminormKind::BmoTilde => bmo_seminorm(f, p, &pol, Centering::FQDelta)?,
        SeminormKind::Blo => blo_seminorm(f, p, &pol)?,
        SeminormKind::Bloq => blo_q_seminorm(f, q, p, &pol)?,
        SeminormKind::Bmoqw => {
            let w = read_function(wt.ok_or_else(|| anyhow!("bmoqw needs --wt"))?)?;
            weighted_bmo_seminorm(f, &w, q, p, &pol)?
        }
    };
    let name = kind.to_possible_value().expect("no skipped variants").get_name().to_string();
    Ok(Outcome::ok(json!({
        "seminorm": name, "q": q, "delta": c.delta, "family": pol.label(), "seed": c.seed, "report": rep,
    })))
}

fn weight_cmd(cmd: &WeightCmd) -> Result<(Outcome, Option<PathBuf>)> {
    let (body, out) = match cmd {
        WeightCmd::Ap { func, p, common } => {
            let w = read_function(func)?;
            (json!({"seed": common.seed, "report": ap_constant(&w, *p, common.params(), &common.policy()?)?}), &common.out)
        }
        WeightCmd::A1 { func, common } => {
            let w = read_function(func)?;
            (json!({"seed": common.seed, "report": a1_constant(&w, common.params(), &common.policy()?)?}), &common.out)
        }
        WeightCmd::Maximal { func, common } => {
            let w = read_function(func)?;
            let m = maximal_function(&w, common.params(), &common.policy()?)?;
            (serde_json::to_value(FunctionFile::from(m))?, &common.out)
        }
        WeightCmd::A1Factorize { func, gamma_grid, common } => {
            let w = read_function(func)?;
            let grid = gamma_grid.clone().unwrap_or_else(default_gamma_grid);
            let fac = a1_factorize(&w, common.params(), &grid, &common.policy()?)?;
            (json!({"seed": common.seed, "factorization": fac}), &common.out)
        }
    };
    Ok((Outcome::ok(body), out.clone()))
}

/// The function a single-function check runs on: "f", or the only entry.
fn main_function(fx: &Fixture) -> Result<StepFunction> {
    if fx.functions.len() == 1 {
        let name = fx.functions.keys().next().expect("one entry").clone();
        return fx.function(&name);
    }
    fx.function("f")
}

fn main_weight(fx: &Fixture) -> Result<Option<StepFunction>> {
    match fx.weights.len() {
        0 => Ok(None),
        1 => {
            let name = fx.weights.keys().next().expect("one entry").clone();
            fx.weight(&name).map(Some)
        }
        _ => fx.weight("w").map(Some),
    }
}

fn verify_cmd(check: Check, fx: &Fixture, curves: Option<&Path>) -> Result<Outcome> {
    let params = fx.params();
    let policy = fx.policy()?;
    let pm = &fx.parameters;
    let jn = |kind: JnKind| -> Result<Outcome> {
        let f = main_function(fx)?;
        let w = main_weight(fx)?;
        if kind == JnKind::Weighted && w.is_none() {
            bail!("jn-weighted needs a weight in the fixture");
        }
        let a = jn_analysis(kind, &f, w.as_ref(), pm.q.unwrap_or(1.0), params, &policy)?;
        if let Some(path) = curves {
            output::write_curves(path, &a.curves)?;
        }
        Outcome::report(&a.report)
    };
    let out = match check {
        Check::JnBmo => jn(JnKind::Bmo)?,
        Check::JnBlo => jn(JnKind::Blo)?,
        Check::JnWeighted => jn(JnKind::Weighted)?,
        Check::ThmBmoAp | Check::ThmBloA1 => {
            let kind = match check {
                Check::ThmBmoAp => CharacterizationKind::BmoAp,
                _ => CharacterizationKind::BloA1,
            };
            let p = pm.p.unwrap_or(2.0);
            let input = match main_weight(fx)? {
                Some(w) => CharacterizationInput::Weight { w, p },
                None => CharacterizationInput::Function {
                    family: pm.family.ok_or_else(|| anyhow!("reverse direction needs parameters.family"))?,
                    depths: fx.depths()?,
                    gammas: pm.gamma_grid.clone().unwrap_or_else(default_gamma_grid),
                    p,
                },
            };
            Outcome::report(&verify_characterization(kind, &input, params, &policy)?)?
        }
        Check::Equiv => {
            let mut functions = fx.all_functions()?;
            let grid = functions
                .first()
                .map(|f| f.grid().clone())
                .or_else(|| fx.grid.clone())
                .ok_or_else(|| anyhow!("equiv needs a grid or at least one function"))?;
            if let Some(k) = pm.random_functions {
                functions.extend(random_functions(&grid, k, fx.seed())?);
            }
            let w = match main_weight(fx)? {
                Some(w) => w,
                None => StepFunction::constant(&grid, 1.0)?,
            };
            let qs = pm.q_list.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
            Outcome::report(&verify_equivalences(&functions, &w, &qs, params, &policy)?)?
        }
        Check::Inclusions => {
            let fam = pm.inclusion_family.unwrap_or(InclusionFamily::Log);
            let th = pm.thresholds.unwrap_or_default();
            Outcome::report(&verify_inclusions(&fx.depths()?, params, fam, th, &policy)?)?
        }
        Check::Factorization => {
            let kind = match pm.kind.as_deref().unwrap_or("bmo") {
                "bmo" => FactorizationKind::Bmo,
                "blo" => FactorizationKind::Blo,
                other => bail!("parameters.kind '{other}' is not bmo or blo"),
            };
            let alpha = pm.alpha.ok_or_else(|| anyhow!("factorization needs parameters.alpha"))?;
            let beta = pm.beta.unwrap_or(0.0);
            let g1 = fx.function("g1")?;
            let g2 = if fx.functions.contains_key("g2") { Some(fx.function("g2")?) } else { None };
            let b = fx.function("b")?;
            Outcome::report(&verify_factorization(alpha, beta, &g1, g2.as_ref(), &b, kind, params, &policy)?)?
        }
        Check::WeakStrong => {
            let f = main_function(fx)?;
            let e = fx.set("e", f.grid())?;
            let p = pm.p.ok_or_else(|| anyhow!("weak-strong needs parameters.p"))?;
            let r = pm.r.ok_or_else(|| anyhow!("weak-strong needs parameters.r"))?;
            Outcome::report(&weak_restricted_strong_check(&f, &e, p, r, params, &policy)?)?
        }
    };
    Ok(match &fx.expectations {
        Some(exp) => Outcome { body: json!({"report": out.body, "expectations": exp}), pass: out.pass },
        None => out,
    })
}

struct Row {
    quantity: String,
    expected: f64,
    computed: f64,
    tol: f64,
}

impl Row {
    fn ok(&self) -> bool {
        (self.expected - self.computed).abs() <= self.tol
    }
}

fn counterexample() -> Result<(Grid, DyadicSet, DyadicSet)> {
    let g = Grid::cube(2, 2, 4.0)?;
    let e = set_from_cells(&g, &[g.cell_index(&[3, 3])?])?;
    let slab: Vec<usize> = (0..g.cell_count()).filter(|&i| g.cell_coords(i)[1] < 2).collect();
    let f = set_from_cells(&g, &slab)?;
    Ok((g, e, f))
}

/// Rounds to 9 decimals and clears negative zero for display.
fn tidy(x: f64) -> f64 {
    (x * 1e9).round() / 1e9 + 0.0
}

fn reproduce_cmd(example: Example, delta: Option<f64>, tol: f64) -> Result<(Vec<Row>, &'static str)> {
    let mut rows = Vec::new();
    let source = match example {
        Example::RemarkAverage => {
            let (g, e, slab) = counterexample()?;
            let f = StepFunction::from_fn(&g, |i| if e.contains(i) { 1.0 } else if slab.contains(i) { -2.0 } else { 0.0 })?;
            let neg = f.map(|v| -v)?;
            let root = g.root_cube();
            let deltas = delta.map(|d| vec![d]).unwrap_or_else(|| vec![0.25, 0.5, 1.0]);
            for d in deltas {
                let p = ContentParams::new(d);
                let k = 2f64.powf(1.0 + 2.0 * d);
                rows.push(Row {
                    quantity: format!("f_Q at delta {d}"),
                    expected: (1.0 - k) / k,
                    computed: signed_average(&f, &root, p)?.value,
                    tol: 1e-12,
                });
                rows.push(Row {
                    quantity: format!("(-f)_Q at delta {d}"),
                    expected: (k - 1.0) / (1.0 + 4f64.powf(d)),
                    computed: signed_average(&neg, &root, p)?.value,
                    tol: 1e-12,
                });
            }
            "counterexample: f = 1 on E, -2 on F, 0 on G"
        }
        Example::GammaInterval => {
            let f = FunctionFamily::Minimizer.discretize(1)?;
            let root = f.grid().root_cube();
            let p = ContentParams::new(delta.unwrap_or(1.0));
            let gi = gamma_interval(&f, None, 1.0, &root, p, tol)?;
            let check = 1e-9;
            rows.push(Row { quantity: "Gamma lower end".into(), expected: 0.0, computed: tidy(gi.lo), tol: check });
            rows.push(Row { quantity: "Gamma upper end".into(), expected: 2.0, computed: tidy(gi.hi), tol: check });
            rows.push(Row { quantity: "min F".into(), expected: 1.0, computed: tidy(gi.min_value), tol: check });
            for c in [-1.0, 0.5, 1.5, 3.0] {
                rows.push(Row {
                    quantity: format!("F({c})"),
                    expected: if (0.0..=2.0).contains(&c) { 1.0 } else { (c - 1.0f64).abs() },
                    computed: oscillation_objective(&f, None, 1.0, &root, p, c)?,
                    tol: check,
                });
            }
            "minimizer: 2 on [0,1), 0 on [1,2)"
        }
        Example::ContentIdentities => {
            let (g, e, slab) = counterexample()?;
            let full = DyadicSet::full(&g);
            let deltas = delta.map(|d| vec![d]).unwrap_or_else(|| vec![0.25, 0.5, 1.0]);
            for d in deltas {
                if !(d > 0.0 && d <= 1.0) {
                    bail!("the identities need 0 < delta <= 1, got {d}");
                }
                let p = ContentParams::new(d);
                let four = 4f64.powf(d);
                let h = |s: &DyadicSet| dyadic_content(&g, s, p);
                for (label, set, expect) in [
                    ("E", e.clone(), 1.0),
                    ("F", slab.clone(), four),
                    ("Q minus F", full.difference(&slab)?, four),
                    ("Q minus E", full.difference(&e)?, four),
                ] {
                    rows.push(Row { quantity: format!("H({label}) at delta {d}"), expected: expect, computed: h(&set)?, tol: 1e-12 });
                }
            }
            "counterexample grid, dyadic content"
        }
    };
    Ok((rows, source))
}

fn print_table(rows: &[Row], source: &str) {
    println!("{:<28} {:>18} {:>18}  {:<5} source", "quantity", "expected", "computed", "match");
    for r in rows {
        println!(
            "{:<28} {:>18.12} {:>18.12}  {:<5} {}",
            r.quantity,
            r.expected,
            r.computed,
            if r.ok() { "yes" } else { "NO" },
            source
        );
    }
}

fn run(cli: Cli) -> Result<bool> {
    let (outcome, out) = match cli.cmd {
        Cmd::Content { set, grid, common } => {
            let g = grid.as_deref().map(read_json::<Grid>).transpose()?;
            let s = read_set(&set, g.as_ref())?;
            let v = dyadic_content(s.grid(), &s, common.params())?;
            (Outcome::ok(json!({"content": v, "delta": common.delta})), common.out)
        }
        Cmd::Choquet { func, set, common } => {
            let f = read_function(&func)?;
            let region = match set {
                Some(p) => read_set(&p, Some(f.grid()))?,
                None => DyadicSet::full(f.grid()),
            };
            let v = choquet(&f, &region, common.params())?;
            (Outcome::ok(json!({"choquet": v, "delta": common.delta})), common.out)
        }
        Cmd::Avg { func, cube, common } => {
            let f = read_function(&func)?;
            let q = parse_cube(&cube, f.grid())?;
            let a = signed_average(&f, &q, common.params())?;
            (Outcome::ok(json!({"cube": q.to_string(), "delta": common.delta, "average": a})), common.out)
        }
        Cmd::Seminorm { kind, func, wt, q, common } => {
            let f = read_function(&func)?;
            (seminorm_cmd(kind, &f, wt.as_deref(), q, &common)?, common.out)
        }
        Cmd::Weight { cmd } => weight_cmd(&cmd)?,
        Cmd::Czd { func, wt, cube, lambda, verify, common } => {
            let f = read_function(&func)?;
            let w = match wt {
                Some(p) => read_function(&p)?,
                None => StepFunction::constant(f.grid(), 1.0)?,
            };
            let q = parse_cube(&cube, f.grid())?;
            let res = cz_decompose(&f, &w, &q, lambda, common.params())?;
            let mut body = json!({"cube": q.to_string(), "delta": common.delta, "result": res});
            let mut pass = true;
            if verify {
                let rep = cz_verify(&f, &w, &q, lambda, common.params(), &res)?;
                pass = rep.pass;
                body["verification"] = serde_json::to_value(&rep)?;
            }
            (Outcome { body, pass }, common.out)
        }
        Cmd::Verify { check, fixture, out, curves } => {
            let fx = Fixture::load(&fixture)?;
            (verify_cmd(check, &fx, curves.as_deref())?, out)
        }
        Cmd::Reproduce { example, delta, tol, out } => {
            let (rows, source) = reproduce_cmd(example, delta, tol)?;
            print_table(&rows, source);
            let pass = rows.iter().all(Row::ok);
            let body = json!({
                "source": source,
                "rows": rows.iter().map(|r| json!({
                    "quantity": r.quantity, "expected": r.expected, "computed": r.computed, "match": r.ok(),
                })).collect::<Vec<_>>(),
            });
            if let Some(path) = &out {
                output::write_report(path, &body)?;
            }
            return Ok(pass);
        }
    };
    println!("{}", serde_json::to_string_pretty(&outcome.body)?);
    if let Some(path) = &out {
        output::write_report(path, &outcome.body)?;
    }
    Ok(outcome.pass)
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("CAPBMO_THREADS") {
        let n: usize = v.parse().map_err(|_| anyhow!("CAPBMO_THREADS = '{v}' is not a thread count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|_| run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
