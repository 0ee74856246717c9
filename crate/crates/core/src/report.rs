//! JSON report written by `stepfit fit`.
//!
//! The layout is described by `schema/fit_report.schema.json` in the crate
//! root. Floats are written in shortest round-trip form, so a report parses
//! back to an identical value.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::FitConfig;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::solver::{FitResult, Strategy};

pub const SCHEMA_VERSION: &str = "stepfit/1";

/// The JSON schema for [`FitReport`].
pub const JSON_SCHEMA: &str = include_str!("../schema/fit_report.schema.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    /// Hex SHA-256 of the dataset in canonical `p,x` CSV form.
    pub sha256: String,
    pub observations: usize,
    pub coordinates: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl InputDigest {
    pub fn of(data: &Dataset, source: Option<String>) -> Self {
        let mut buf = Vec::new();
        data.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        InputDigest {
            sha256: hex::encode(Sha256::digest(&buf)),
            observations: data.len(),
            coordinates: data.coordinate_count(),
            source,
        }
    }
}

/// One row of the fitted step table: step `k` takes `value` on `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub k: usize,
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema: String,
    pub input: InputDigest,
    pub config: FitConfig,
    pub strategy: Strategy,
    pub result: FitResult,
    pub blocks: Vec<BlockRow>,
}

impl FitReport {
    pub fn new(
        input: InputDigest,
        config: FitConfig,
        strategy: Strategy,
        result: FitResult,
    ) -> Self {
        let blocks = result
            .curve
            .blocks()
            .enumerate()
            .map(|(i, b)| BlockRow {
                k: i + 1,
                start: b.start,
                end: b.end,
                value: b.value,
            })
            .collect();
        FitReport {
            schema: SCHEMA_VERSION.to_owned(),
            input,
            config,
            strategy,
            result,
            blocks,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: FitReport = serde_json::from_str(text)?;
        if report.schema != SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported report schema {:?}, expected {SCHEMA_VERSION:?}",
                report.schema
            )));
        }
        Ok(report)
    }
}

/// Checks `value` against the subset of JSON Schema used by the report
/// schema: `type`, `required`, `properties`, `items`, `enum`, `$ref`
/// into `$defs`, and `oneOf`.
fn conforms(value: &Value, schema: &Value, root: &Value) -> std::result::Result<(), String> {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let name = r.trim_start_matches("#/$defs/");
        return conforms(value, &root["$defs"][name], root);
    }
    if let Some(options) = schema.get("oneOf").and_then(Value::as_array) {
        let hits = options
            .iter()
            .filter(|s| conforms(value, s, root).is_ok())
            .count();
        return if hits == 1 {
            Ok(())
        } else {
            Err(format!("{hits} oneOf branches match {value}"))
        };
    }
    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(value) {
            return Err(format!("{value} not in {allowed:?}"));
        }
    }
    if let Some(c) = schema.get("const") {
        if c != value {
            return Err(format!("{value} != {c}"));
        }
    }
    if let Some(ty) = schema.get("type") {
        let types: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        let ok = types.iter().any(|t| match *t {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "number" => value.is_number(),
            "integer" => value.is_u64() || value.is_i64(),
            "boolean" => value.is_boolean(),
            "null" => value.is_null(),
            _ => false,
        });
        if !ok {
            return Err(format!("{value} is not {types:?}"));
        }
    }
    if let Some(req) = schema.get("required").and_then(Value::as_array) {
        for key in req.iter().filter_map(Value::as_str) {
            if value.get(key).is_none() {
                return Err(format!("missing key {key}"));
            }
        }
    }
    if let (Some(props), Some(obj)) = (
        schema.get("properties").and_then(Value::as_object),
        value.as_object(),
    ) {
        for (key, sub) in props {
            if let Some(v) = obj.get(key) {
                conforms(v, sub, root).map_err(|e| format!("{key}: {e}"))?;
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), value.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            conforms(v, items, root).map_err(|e| format!("[{i}]: {e}"))?;
        }
    }
    Ok(())
}

/// Validate a JSON document against [`JSON_SCHEMA`]. On failure the message
/// names the offending path.
pub fn validate_json(doc: &Value) -> std::result::Result<(), String> {
    let schema: Value = serde_json::from_str(JSON_SCHEMA).unwrap();
    conforms(doc, &schema, &schema)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DuplicatePolicy;
    use crate::solver::fit;

    fn report() -> FitReport {
        let data = Dataset::from_rows(
            [
                (0.0, 10.1),
                (1.0, 9.7),
                (2.5, 6.0),
                (3.0, 6.2),
                (4.0, 1.0 / 3.0),
            ],
            DuplicatePolicy::Reject,
        )
        .unwrap();
        let cfg = FitConfig::new(2);
        let result = fit(&data, &cfg, Strategy::Rlx).unwrap();
        FitReport::new(
            InputDigest::of(&data, Some("mem".into())),
            cfg,
            Strategy::Rlx,
            result,
        )
    }

    #[test]
    fn roundtrip() {
        let r = report();
        let back = FitReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn block_table() {
        let r = report();
        assert_eq!(r.blocks.len(), r.result.curve.num_blocks());
        assert_eq!(r.blocks[0].k, 1);
        assert_eq!(r.blocks[0].start, 0.0);
        assert_eq!(r.blocks[1].start, 4.0);
    }

    #[test]
    fn digest_is_content_based() {
        let a = Dataset::from_rows([(2.0, 1.0), (1.0, 2.0)], DuplicatePolicy::Reject).unwrap();
        let b = Dataset::from_rows([(1.0, 2.0), (2.0, 1.0)], DuplicatePolicy::Reject).unwrap();
        let c = Dataset::from_rows([(1.0, 2.0), (2.0, 1.5)], DuplicatePolicy::Reject).unwrap();
        assert_eq!(InputDigest::of(&a, None), InputDigest::of(&b, None));
        assert_ne!(
            InputDigest::of(&a, None).sha256,
            InputDigest::of(&c, None).sha256
        );
        assert_eq!(InputDigest::of(&a, None).sha256.len(), 64);
    }

    #[test]
    fn rejects_other_schema() {
        let text = report().to_json().replace(SCHEMA_VERSION, "stepfit/0");
        assert!(FitReport::from_json(&text).is_err());
    }

    #[test]
    fn report_matches_schema() {
        let doc: Value = serde_json::from_str(&report().to_json()).unwrap();
        validate_json(&doc).unwrap();
        let timed = {
            let mut r = report();
            r.config.time_limit = Some(std::time::Duration::from_millis(5));
            r.config.cost = crate::cost::CostModel::Quantile(0.25);
            serde_json::to_value(&r).unwrap()
        };
        validate_json(&timed).unwrap();
    }

    #[test]
    fn schema_catches_missing_fields() {
        let mut doc: Value = serde_json::from_str(&report().to_json()).unwrap();
        doc["result"]["bounds"]
            .as_object_mut()
            .unwrap()
            .remove("best_lb_final");
        assert!(validate_json(&doc).is_err());
        let mut doc: Value = serde_json::from_str(&report().to_json()).unwrap();
        doc["strategy"] = Value::from("fast");
        assert!(validate_json(&doc).is_err());
    }
}
