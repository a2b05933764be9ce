//! Reference run that pins the realized constants used by the acceptance suite.
//!
//! cargo run --release -p capbmo-core --example prerun > crates/core/tests/fixtures/pinned.json

use capbmo_core::oscillation::{bmo_seminorm, Centering};
use capbmo_core::verify::*;
use capbmo_core::weights::{a1_constant, default_gamma_grid, power_maximal_weight};
use capbmo_core::{ContentParams, CubeFamilyPolicy, Grid, StepFunction};
use serde_json::json;

fn main() {
    let p = ContentParams::new(1.0);
    let pol = CubeFamilyPolicy::dyadic();

    let mut jn = Vec::new();
    for (name, fam) in [("log_abs", FunctionFamily::LogAbs { n: 2 }), ("minimizer", FunctionFamily::Minimizer)] {
        for kind in [JnKind::Bmo, JnKind::Blo] {
            for d in 3..=6u32 {
                let a = jn_analysis(kind, &fam.discretize(d).unwrap(), None, 1.0, p, &pol).unwrap();
                jn.push(json!({"function": name, "kind": kind, "depth": d, "seminorm": a.seminorm, "c": a.c, "prefactor": a.prefactor}));
            }
        }
    }

    let mut a1 = Vec::new();
    for alpha in [0.3, 0.7] {
        for d in 4..=6u32 {
            let g = Grid::cube(2, d, 1.0).unwrap();
            let cell = StepFunction::from_fn(&g, |i| if i == 0 { 1.0 } else { 0.0 }).unwrap();
            let w = power_maximal_weight(&cell, alpha, p, &pol).unwrap();
            a1.push(json!({"alpha": alpha, "depth": d, "a1": a1_constant(&w, p, &pol).unwrap().ap_constant}));
        }
    }

    let input = CharacterizationInput::Function {
        family: FunctionFamily::LogAbs { n: 2 },
        depths: vec![3, 4, 5],
        gammas: default_gamma_grid(),
        p: 2.0,
    };
    let rev = verify_characterization(CharacterizationKind::BmoAp, &input, p, &pol).unwrap();

    let incl = verify_inclusions(&[3, 4, 5, 6], p, InclusionFamily::Log, InclusionThresholds::default(), &pol).unwrap();

    let log_bmo: Vec<f64> = (3..=8u32)
        .map(|d| {
            let f = FunctionFamily::LogAbs { n: 2 }.discretize(d).unwrap();
            bmo_seminorm(&f, p, &pol, Centering::InfC).unwrap().value
        })
        .collect();

    let out = json!({
        "delta": 1.0,
        "family": "dyadic",
        "jn": jn,
        "a1_power_weights": a1,
        "reverse_bmo_ap_log_abs": {
            "largest_passing_gamma": rev.get_constant("largest_passing_gamma"),
            "gamma_table": rev.constants["gamma_table"],
        },
        "inclusions": {
            "thresholds": InclusionThresholds::default(),
            "constants": incl.constants,
        },
        "log_abs_bmo_depths_3_to_8": log_bmo,
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
}
