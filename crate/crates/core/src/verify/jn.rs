use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{envelope_excess, fit_envelope, survival_curve_with, EnvelopeFit, SurvivalCurve, ENVELOPE_SLACK};
use crate::content::{Content, ContentParams};
use crate::error::{Error, Result};
use crate::grid::{enumerate_cubes, CubeFamilyPolicy, CubeSpec, StepFunction};
use crate::oscillation::{cube_oscillation, Oscillation, DEFAULT_TOL};
use crate::report::{num, VerificationReport};

/// Uniform t samples added to the breakpoints of each curve.
pub const JN_T_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JnKind {
    Bmo,
    Blo,
    Weighted,
}

impl JnKind {
    pub fn name(&self) -> &'static str {
        match self {
            JnKind::Bmo => "jn-bmo",
            JnKind::Blo => "jn-blo",
            JnKind::Weighted => "jn-weighted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeCurve {
    pub cube: CubeSpec,
    pub center: f64,
    pub curve: SurvivalCurve,
    pub fit: EnvelopeFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JnAnalysis {
    pub kind: JnKind,
    pub seminorm: f64,
    /// Uniform decay rate (min over cubes).
    pub c: f64,
    /// Uniform prefactor (max over cubes).
    pub prefactor: f64,
    pub curves: Vec<CubeCurve>,
    pub report: VerificationReport,
}

/// Survival curves, per-cube envelopes and the uniform (c, C) pair over a cube family.
pub fn jn_analysis(
    kind: JnKind,
    f: &StepFunction,
    w: Option<&StepFunction>,
    q: f64,
    params: ContentParams,
    policy: &CubeFamilyPolicy,
) -> Result<JnAnalysis> {
    let osc = match kind {
        JnKind::Bmo => Oscillation::Bmo,
        JnKind::Blo => Oscillation::Blo,
        JnKind::Weighted => {
            if !(q > 0.0) {
                return Err(Error::InvalidParameter(format!("q = {q} must be positive")));
            }
            Oscillation::Weighted { q }
        }
    };
    let weight = match (kind, w) {
        (JnKind::Weighted, None) => return Err(Error::InvalidParameter("weighted kind needs a weight".into())),
        (JnKind::Weighted, Some(w)) => {
            if w.grid() != f.grid() {
                return Err(Error::GridMismatch);
            }
            w.require_positive()?;
            Some(w)
        }
        _ => None,
    };
    let h = Content::new(f.grid(), params)?;
    let cubes = enumerate_cubes(f.grid(), policy);
    let mut report = VerificationReport::new(kind.name(), policy.rng_seed);
    report
        .param("delta", num(params.delta))
        .param("family", policy.label())
        .param("depth", f.grid().depth)
        .param("n", f.grid().n);
    if kind == JnKind::Weighted {
        report.param("q", num(q));
    }

    let centers: Vec<(f64, f64)> = cubes
        .par_iter()
        .map(|c| {
            let o = cube_oscillation(&h, f, weight, osc, c, DEFAULT_TOL);
            (o.center, o.value)
        })
        .collect();
    let seminorm = centers.iter().map(|c| c.1).fold(0.0, f64::max);
    report.constant("seminorm", seminorm);
    if seminorm == 0.0 {
        report.witness("zero seminorm, trivial pass");
        report.constant("c", f64::INFINITY).constant("prefactor", 1.0);
        return Ok(JnAnalysis { kind, seminorm, c: f64::INFINITY, prefactor: 1.0, curves: Vec::new(), report });
    }

    let span = f.max_value() - f.min_value();
    let t_grid: Vec<f64> = (0..JN_T_POINTS).map(|k| span * k as f64 / (JN_T_POINTS - 1) as f64).collect();
    let curves: Vec<CubeCurve> = cubes
        .par_iter()
        .zip(&centers)
        .map(|(cube, &(center, _))| {
            let curve = survival_curve_with(&h, f, center, cube, weight, &t_grid);
            let fit = fit_envelope(&curve, seminorm).expect("seminorm is positive");
            CubeCurve { cube: cube.clone(), center, curve, fit }
        })
        .collect();

    for cc in &curves {
        let s = &cc.curve.survival;
        if s.windows(2).any(|v| v[1] > v[0]) {
            report.fail(format!("survival on {} is not non-increasing", cc.cube));
        }
        if s[0] > cc.curve.normalizer * (1.0 + ENVELOPE_SLACK) {
            report.fail(format!("survival on {} exceeds its normalizer", cc.cube));
        }
        if !cc.fit.pass || envelope_excess(&cc.curve, seminorm, cc.fit.c, cc.fit.prefactor) > ENVELOPE_SLACK {
            report.fail(format!("per-cube envelope fails on {}", cc.cube));
        }
    }

    let (kc, c) = curves
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (k, cc)| if cc.fit.c < b.1 { (k, cc.fit.c) } else { b });
    let (kp, prefactor) = curves
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |b, (k, cc)| if cc.fit.prefactor > b.1 { (k, cc.fit.prefactor) } else { b });
    let tight = curves
        .iter()
        .map(|cc| super::prefactor_at(&cc.curve, seminorm, c).1)
        .fold(f64::NEG_INFINITY, f64::max)
        .exp();
    report
        .constant("c", c)
        .constant("prefactor", prefactor)
        .constant("prefactor_at_uniform_c", tight)
        .constant("cubes", curves.len() as f64)
        .witness(format!("c attained on {}", curves[kc].cube))
        .witness(format!("prefactor attained on {}", curves[kp].cube));
    let mut analysis = JnAnalysis { kind, seminorm, c, prefactor, curves, report };
    let (ok, worst) = jn_bound_check(&analysis, c, prefactor);
    analysis.report.constant("max_log_excess", worst);
    analysis.report.require(ok && c > 0.0 && prefactor.is_finite(), || {
        format!("uniform pair (c = {c}, C = {prefactor}) fails with log excess {worst}")
    });
    Ok(analysis)
}

/// Whether every curve satisfies survival ≤ C·normalizer·e^{−c t/‖f‖}; also
/// returns the largest log excess.
pub fn jn_bound_check(analysis: &JnAnalysis, c: f64, prefactor: f64) -> (bool, f64) {
    let worst = analysis
        .curves
        .iter()
        .map(|cc| envelope_excess(&cc.curve, analysis.seminorm, c, prefactor))
        .fold(f64::NEG_INFINITY, f64::max);
    (worst <= ENVELOPE_SLACK, worst)
}

pub fn verify_jn(
    kind: JnKind,
    f: &StepFunction,
    w: Option<&StepFunction>,
    q: f64,
    params: ContentParams,
    policy: &CubeFamilyPolicy,
) -> Result<VerificationReport> {
    Ok(jn_analysis(kind, f, w, q, params, policy)?.report)
}
