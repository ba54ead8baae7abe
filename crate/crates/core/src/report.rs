//! Machine-readable solver reports.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// `{value, allocation, method, certificate, guarantee, runtime_ms, ...}`.
///
/// Command-specific fields (verdicts, counts) go in `extra` and are
/// flattened into the top-level object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub value: Value,
    pub allocation: Option<Vec<f64>>,
    pub method: String,
    pub certificate: Value,
    pub guarantee: Option<String>,
    pub runtime_ms: f64,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl SolveReport {
    pub fn new(method: impl Into<String>, value: impl Into<Value>) -> Self {
        Self {
            value: value.into(),
            allocation: None,
            method: method.into(),
            certificate: Value::Null,
            guarantee: None,
            runtime_ms: 0.0,
            extra: Map::new(),
        }
    }

    pub fn allocation(mut self, x: &[f64]) -> Self {
        self.allocation = Some(x.to_vec());
        self
    }

    pub fn certificate(mut self, c: impl Serialize) -> Self {
        self.certificate = serde_json::to_value(c).expect("certificate serializes");
        self
    }

    pub fn guarantee(mut self, g: impl Into<String>) -> Self {
        self.guarantee = Some(g.into());
        self
    }

    pub fn with(mut self, key: &str, v: impl Serialize) -> Self {
        self.extra.insert(key.to_string(), serde_json::to_value(v).expect("field serializes"));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    /// JSON with `runtime_ms` zeroed, for reproducibility comparisons.
    pub fn to_json_without_runtime(&self) -> String {
        Self { runtime_ms: 0.0, ..self.clone() }.to_json()
    }
}
