//! Report documents written by `run` and `suite`.

use serde::Serialize;
use serde_json::Value;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub precision: &'static str,
    pub fiber_dim: usize,
    pub max_degree: usize,
    pub seed: u64,
    pub rng: &'static str,
    pub default_tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisResult {
    pub index: usize,
    pub label: String,
    pub kind: &'static str,
    pub passed: bool,
    pub tolerance: f64,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub all_passed: bool,
}

impl Summary {
    pub fn from_flags(flags: impl IntoIterator<Item = bool>) -> Self {
        let (mut total, mut passed) = (0, 0);
        for f in flags {
            total += 1;
            passed += usize::from(f);
        }
        Self {
            total,
            passed,
            failed: total - passed,
            all_passed: passed == total,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub timestamp: String,
    pub scenario: Value,
    pub environment: Environment,
    pub results: Vec<AnalysisResult>,
    pub summary: Summary,
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Serialized report with the timestamp blanked, for determinism checks.
pub fn without_timestamp<T: Serialize>(report: &T) -> Value {
    let mut v = serde_json::to_value(report).expect("reports serialize");
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timestamp");
    }
    v
}

/// Non-finite floats have no JSON form; they are written as strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(x.to_string())
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().copied().map(num).collect())
}
