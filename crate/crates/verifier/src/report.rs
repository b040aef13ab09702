//! Verification reports and their JSON form.
//!
//! Reals are written with 17 significant digits; non-finite values become
//! `null`. Object keys are sorted, so two reports of the same run differ only
//! in `timestamp_unix`.

use serde_json::{Map, Number, Value};

use crate::config::VerifyConfig;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Lossless JSON number, or `null` when `v` is not finite.
pub fn real(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let text = format!("{v:.16e}");
    match text.parse::<Number>() {
        Ok(n) => Value::Number(n),
        Err(_) => Value::Null,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub description: String,
    pub tolerance: f64,
    /// Largest absolute residual over the samples.
    pub max_residual: f64,
    /// Largest `residual / max(1, magnitude)` over the samples.
    pub max_scaled_residual: f64,
    /// Sample index of `max_scaled_residual`.
    pub worst_sample: Option<usize>,
    pub samples_used: usize,
    pub passed: bool,
}

impl CheckRecord {
    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), self.name.clone().into());
        m.insert("description".into(), self.description.clone().into());
        m.insert("tolerance".into(), real(self.tolerance));
        m.insert("max_residual".into(), real(self.max_residual));
        m.insert("max_scaled_residual".into(), real(self.max_scaled_residual));
        m.insert("worst_sample".into(), self.worst_sample.map_or(Value::Null, Value::from));
        m.insert("samples_used".into(), self.samples_used.into());
        m.insert("passed".into(), self.passed.into());
        Value::Object(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryReport {
    pub checks: Vec<CheckRecord>,
    pub overall_pass: bool,
    pub seed: u64,
    pub samples: usize,
    pub config: VerifyConfig,
    pub notes: Vec<String>,
    pub timestamp_unix: u64,
}

impl GeometryReport {
    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> Value {
        let cfg = &self.config;
        let mut tol = Map::new();
        for (k, v) in &cfg.tolerances {
            tol.insert(k.clone(), real(*v));
        }
        let mut echo = Map::new();
        echo.insert("metric".into(), cfg.metric.to_string().into());
        echo.insert("h".into(), cfg.h.to_string().into());
        echo.insert("samples".into(), cfg.samples.into());
        echo.insert("seed".into(), cfg.seed.into());
        echo.insert("k".into(), real(cfg.k));
        echo.insert("tolerance_overrides".into(), Value::Object(tol));

        let mut m = Map::new();
        m.insert("artifact_version".into(), ARTIFACT_VERSION.into());
        m.insert("seed".into(), self.seed.into());
        m.insert("samples".into(), self.samples.into());
        m.insert("config".into(), Value::Object(echo));
        m.insert("checks".into(), self.checks.iter().map(CheckRecord::to_json).collect());
        m.insert("overall_pass".into(), self.overall_pass.into());
        m.insert("notes".into(), self.notes.clone().into());
        m.insert("timestamp_unix".into(), self.timestamp_unix.into());
        Value::Object(m)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        let v = real(0.1);
        assert_eq!(v.to_string(), "1.0000000000000001e-1");
        assert_eq!(v.as_f64(), Some(0.1));
        let third = real(1.0 / 3.0);
        assert_eq!(third.as_f64(), Some(1.0 / 3.0));
    }

    #[test]
    fn non_finite_is_null() {
        assert_eq!(real(f64::NAN), Value::Null);
        assert_eq!(real(f64::INFINITY), Value::Null);
    }
}
