//! Report records shared by the verifiers and the command-line front end.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// JSON form of a real that may be infinite: finite values stay numbers,
/// the rest become the strings `"inf"`, `"-inf"` or `"nan"`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn parse_num(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            _ => None,
        },
        _ => None,
    }
}

/// Serde adapter for `f64` fields that may carry the +∞ marker.
pub mod extended_f64 {
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Value;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        super::num(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let v = Value::deserialize(d)?;
        super::parse_num(&v).ok_or_else(|| D::Error::custom("expected a number or \"inf\""))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub params: BTreeMap<String, Value>,
    pub pass: bool,
    pub constants: BTreeMap<String, Value>,
    pub witnesses: Vec<String>,
    pub seed: u64,
}

impl VerificationReport {
    pub fn new(check_name: &str, seed: u64) -> Self {
        VerificationReport {
            check_name: check_name.to_string(),
            params: BTreeMap::new(),
            pass: true,
            constants: BTreeMap::new(),
            witnesses: Vec::new(),
            seed,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn constant(&mut self, key: &str, value: f64) -> &mut Self {
        self.constants.insert(key.to_string(), num(value));
        self
    }

    pub fn constant_value(&mut self, key: &str, value: Value) -> &mut Self {
        self.constants.insert(key.to_string(), value);
        self
    }

    pub fn get_constant(&self, key: &str) -> Option<f64> {
        self.constants.get(key).and_then(parse_num)
    }

    /// Records a failed sub-check; the report fails as a whole.
    pub fn fail(&mut self, witness: impl Into<String>) -> &mut Self {
        self.pass = false;
        self.witnesses.push(witness.into());
        self
    }

    pub fn witness(&mut self, witness: impl Into<String>) -> &mut Self {
        self.witnesses.push(witness.into());
        self
    }

    /// Asserts `cond`, recording `witness` on failure.
    pub fn require(&mut self, cond: bool, witness: impl FnOnce() -> String) -> bool {
        if !cond {
            self.fail(witness());
        }
        cond
    }
}
