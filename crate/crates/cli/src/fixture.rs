//! Fixture files for the `verify` subcommands.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use capbmo_core::verify::{FunctionFamily, InclusionFamily, InclusionThresholds};
use capbmo_core::{ContentParams, CubeFamilyPolicy, DyadicSet, Grid, SetFile, StepFunction};
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    #[serde(default)]
    pub grid: Option<Grid>,
    #[serde(default)]
    pub functions: BTreeMap<String, Value>,
    #[serde(default)]
    pub weights: BTreeMap<String, Value>,
    #[serde(default)]
    pub sets: BTreeMap<String, Value>,
    #[serde(default)]
    pub parameters: Parameters,
    /// Pinned reference values; carried into reports, never used as inputs.
    #[serde(default)]
    pub expectations: Option<Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub delta: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub q_list: Option<Vec<f64>>,
    pub r: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub kind: Option<String>,
    pub gamma_grid: Option<Vec<f64>>,
    pub depth_range: Option<[u32; 2]>,
    pub policy: Option<String>,
    pub seed: Option<u64>,
    pub family: Option<FunctionFamily>,
    pub random_functions: Option<usize>,
    pub inclusion_family: Option<InclusionFamily>,
    pub thresholds: Option<InclusionThresholds>,
}

impl Fixture {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading fixture {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing fixture {}", path.display()))
    }

    pub fn params(&self) -> ContentParams {
        ContentParams::new(self.parameters.delta.unwrap_or(1.0))
    }

    pub fn seed(&self) -> u64 {
        self.parameters.seed.unwrap_or(0)
    }

    pub fn policy(&self) -> Result<CubeFamilyPolicy> {
        let label = self.parameters.policy.as_deref().unwrap_or("dyadic");
        Ok(CubeFamilyPolicy::parse(label, self.seed())?)
    }

    pub fn depths(&self) -> Result<Vec<u32>> {
        let [a, b] = self.parameters.depth_range.ok_or_else(|| anyhow!("parameters.depth_range is required"))?;
        if a > b {
            bail!("parameters.depth_range [{a}, {b}] is empty");
        }
        Ok((a..=b).collect())
    }

    fn resolve(&self, section: &str, name: &str, entry: &Value) -> Result<StepFunction> {
        let ctx = || format!("{section}.{name}");
        if entry.get("family").is_some() {
            let family: FunctionFamily = serde_json::from_value(entry.clone()).with_context(ctx)?;
            let depth = entry
                .get("depth")
                .and_then(Value::as_u64)
                .ok_or_else(|| anyhow!("{section}.{name}: a family entry needs an integer depth"))?;
            return family.discretize(depth as u32).with_context(ctx);
        }
        let mut entry = entry.clone();
        if let (Some(obj), Some(grid)) = (entry.as_object_mut(), &self.grid) {
            obj.entry("grid").or_insert(serde_json::to_value(grid)?);
        }
        serde_json::from_value(entry).with_context(ctx)
    }

    pub fn function(&self, name: &str) -> Result<StepFunction> {
        let entry = self.functions.get(name).ok_or_else(|| anyhow!("fixture has no function '{name}'"))?;
        self.resolve("functions", name, entry)
    }

    pub fn weight(&self, name: &str) -> Result<StepFunction> {
        let entry = self.weights.get(name).ok_or_else(|| anyhow!("fixture has no weight '{name}'"))?;
        self.resolve("weights", name, entry)
    }

    pub fn all_functions(&self) -> Result<Vec<StepFunction>> {
        self.functions.iter().map(|(k, v)| self.resolve("functions", k, v)).collect()
    }

    pub fn set(&self, name: &str, grid: &Grid) -> Result<DyadicSet> {
        let Some(entry) = self.sets.get(name) else {
            return Ok(DyadicSet::full(grid));
        };
        let mut entry = entry.clone();
        if let Some(obj) = entry.as_object_mut() {
            obj.entry("grid").or_insert(serde_json::to_value(grid)?);
        }
        let file: SetFile = serde_json::from_value(entry).with_context(|| format!("sets.{name}"))?;
        Ok(DyadicSet::try_from(file)?)
    }
}
