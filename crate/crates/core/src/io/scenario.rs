//! Scenario documents: the JSON file format for named single-outcome and
//! binary-classification scenarios.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::econ::{
    evaluate_binary, evaluate_single, BinaryOutcomeScenario, BinaryVariant, EvaluationResult, LlmPricing, PriceUnit,
    SingleOutcomeScenario, TransactionProfile,
};
use crate::error::{Error, Result};
use crate::sensitivity::{CostUnits, ParameterVector};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Single(SingleOutcomeScenario),
    Binary(BinaryOutcomeScenario),
}

impl Scenario {
    /// `variant` only affects binary scenarios.
    pub fn evaluate(&self, variant: BinaryVariant) -> EvaluationResult {
        match self {
            Scenario::Single(s) => evaluate_single(s),
            Scenario::Binary(b) => evaluate_binary(b, variant),
        }
    }
}

impl Scenario {
    /// The scenario as a point of the closed-form sensitivity model. That
    /// model prices input tokens only, so output-token and extra costs must
    /// be zero.
    pub fn parameter_vector(&self, units: CostUnits) -> Result<ParameterVector> {
        let (pricing, tx) = match self {
            Scenario::Single(s) => {
                if s.extra_cost_per_transaction() != 0.0 {
                    return Err(Error::validation(
                        "extra_cost_per_transaction",
                        "the sensitivity model has no extra cost term",
                    ));
                }
                (s.pricing(), s.transaction())
            }
            Scenario::Binary(b) => (b.pricing(), b.transaction()),
        };
        if pricing.output_price_per_million() * tx.output_tokens() as f64 != 0.0 {
            return Err(Error::validation(
                "transaction.output_tokens",
                "the sensitivity model prices input tokens only",
            ));
        }
        let price = match units {
            CostUnits::PerMillion => pricing.input_price_per_million(),
            CostUnits::PerToken => pricing.input_price_per_token(),
        };
        let tokens = tx.input_tokens() as f64;
        Ok(match self {
            Scenario::Single(s) => ParameterVector::single(s.gain(), s.loss(), price, s.p_success(), tokens),
            Scenario::Binary(b) => {
                ParameterVector::binary(b.gain(), b.loss_fp(), b.loss_fn(), price, b.p_fp(), b.p_fn(), b.p_tp(), tokens)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedScenario {
    pub name: String,
    pub scenario: Scenario,
}

/// A validated scenario file with defaults resolved and prices normalized to
/// per-million tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDocument {
    pub schema_version: String,
    pub scenarios: Vec<NamedScenario>,
}

impl ScenarioDocument {
    pub fn get(&self, name: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.name == name).map(|s| &s.scenario)
    }

    /// The named single-outcome scenario, or a validation error naming it.
    pub fn single(&self, name: &str) -> Result<&SingleOutcomeScenario> {
        match self.get(name) {
            Some(Scenario::Single(s)) => Ok(s),
            Some(Scenario::Binary(_)) => Err(Error::validation(
                "scenarios",
                format!("`{name}` is a binary scenario; a single-outcome one is required"),
            )),
            None => Err(Error::validation("scenarios", format!("no scenario named `{name}`"))),
        }
    }

    /// All single-outcome scenarios in document order.
    pub fn singles(&self) -> Vec<(String, SingleOutcomeScenario)> {
        self.scenarios
            .iter()
            .filter_map(|n| match &n.scenario {
                Scenario::Single(s) => Some((n.name.clone(), s.clone())),
                Scenario::Binary(_) => None,
            })
            .collect()
    }

    /// Normalized JSON form; parsing it yields an equal document.
    pub fn to_value(&self) -> Value {
        json!({
            "schema_version": self.schema_version,
            "scenarios": self.scenarios.iter().map(named_to_value).collect::<Vec<_>>(),
        })
    }
}

fn pricing_to_value(p: &LlmPricing) -> Value {
    json!({
        "name": p.name(),
        "unit": "per_million_tokens",
        "input": p.input_price_per_million(),
        "output": p.output_price_per_million(),
    })
}

fn transaction_to_value(t: &TransactionProfile) -> Value {
    json!({"input_tokens": t.input_tokens(), "output_tokens": t.output_tokens()})
}

fn named_to_value(n: &NamedScenario) -> Value {
    match &n.scenario {
        Scenario::Single(s) => json!({
            "name": n.name,
            "type": "single",
            "pricing": pricing_to_value(s.pricing()),
            "transaction": transaction_to_value(s.transaction()),
            "gain": s.gain(),
            "loss": s.loss(),
            "p_success": s.p_success(),
            "extra_cost_per_transaction": s.extra_cost_per_transaction(),
        }),
        Scenario::Binary(b) => json!({
            "name": n.name,
            "type": "binary",
            "pricing": pricing_to_value(b.pricing()),
            "transaction": transaction_to_value(b.transaction()),
            "gain": b.gain(),
            "loss_fp": b.loss_fp(),
            "loss_fn": b.loss_fn(),
            "p_tp": b.p_tp(),
            "p_fp": b.p_fp(),
            "p_fn": b.p_fn(),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
enum ScenarioType {
    Single,
    Binary,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPricing {
    name: Option<String>,
    #[serde(default)]
    unit: PriceUnit,
    input: f64,
    #[serde(default)]
    output: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransaction {
    input_tokens: u64,
    #[serde(default)]
    output_tokens: u64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDefaults {
    pricing: Option<RawPricing>,
    transaction: Option<RawTransaction>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawScenario {
    name: String,
    #[serde(rename = "type", default = "single_type")]
    kind: ScenarioType,
    pricing: Option<RawPricing>,
    transaction: Option<RawTransaction>,
    gain: Option<f64>,
    loss: Option<f64>,
    p_success: Option<f64>,
    extra_cost_per_transaction: Option<f64>,
    loss_fp: Option<f64>,
    loss_fn: Option<f64>,
    p_tp: Option<f64>,
    p_fp: Option<f64>,
    p_fn: Option<f64>,
}

fn single_type() -> ScenarioType {
    ScenarioType::Single
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    schema_version: String,
    #[serde(default)]
    defaults: RawDefaults,
    scenarios: Vec<RawScenario>,
}

/// Deserialize JSON text, reporting failures with the JSON path and
/// position of the offending value.
pub fn from_json_text<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse {
            path: if path == "." { String::new() } else { path },
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    Ok(value)
}

/// Deserialize an already-parsed JSON value, reporting the JSON path.
pub fn from_json_value<T: DeserializeOwned>(value: Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse {
            path: if path == "." { String::new() } else { path },
            line: 0,
            column: 0,
            message: e.into_inner().to_string(),
        }
    })
}

fn required(value: Option<f64>, field: &str, kind: &str) -> Result<f64> {
    value.ok_or_else(|| Error::validation(field, format!("required for {kind} scenarios")))
}

fn forbidden(present: bool, field: &str, kind: &str) -> Result<()> {
    if present {
        return Err(Error::validation(field, format!("not allowed in {kind} scenarios")));
    }
    Ok(())
}

impl RawScenario {
    fn build(&self, defaults: &RawDefaults) -> Result<NamedScenario> {
        if self.name.trim().is_empty() {
            return Err(Error::validation("name", "scenario name must be nonempty"));
        }
        let raw_pricing = self
            .pricing
            .as_ref()
            .or(defaults.pricing.as_ref())
            .ok_or_else(|| Error::validation("pricing", "no pricing given and no default"))?;
        let pricing_name = raw_pricing.name.clone().unwrap_or_else(|| self.name.clone());
        let pricing = LlmPricing::with_unit(pricing_name, raw_pricing.unit, raw_pricing.input, raw_pricing.output)
            .map_err(|e| e.at("pricing"))?;
        let raw_tx = self
            .transaction
            .or(defaults.transaction)
            .ok_or_else(|| Error::validation("transaction", "no transaction given and no default"))?;
        let transaction =
            TransactionProfile::new(raw_tx.input_tokens, raw_tx.output_tokens).map_err(|e| e.at("transaction"))?;

        let scenario = match self.kind {
            ScenarioType::Single => {
                for (present, field) in [
                    (self.loss_fp.is_some(), "loss_fp"),
                    (self.loss_fn.is_some(), "loss_fn"),
                    (self.p_tp.is_some(), "p_tp"),
                    (self.p_fp.is_some(), "p_fp"),
                    (self.p_fn.is_some(), "p_fn"),
                ] {
                    forbidden(present, field, "single")?;
                }
                let s = SingleOutcomeScenario::new(
                    required(self.gain, "gain", "single")?,
                    required(self.loss, "loss", "single")?,
                    required(self.p_success, "p_success", "single")?,
                    pricing,
                    transaction,
                )?;
                Scenario::Single(s.with_extra_cost(self.extra_cost_per_transaction.unwrap_or(0.0))?)
            }
            ScenarioType::Binary => {
                for (present, field) in [
                    (self.loss.is_some(), "loss"),
                    (self.p_success.is_some(), "p_success"),
                    (self.extra_cost_per_transaction.is_some(), "extra_cost_per_transaction"),
                ] {
                    forbidden(present, field, "binary")?;
                }
                Scenario::Binary(BinaryOutcomeScenario::new(
                    required(self.gain, "gain", "binary")?,
                    required(self.loss_fp, "loss_fp", "binary")?,
                    required(self.loss_fn, "loss_fn", "binary")?,
                    required(self.p_tp, "p_tp", "binary")?,
                    required(self.p_fp, "p_fp", "binary")?,
                    required(self.p_fn, "p_fn", "binary")?,
                    pricing,
                    transaction,
                )?)
            }
        };
        Ok(NamedScenario {
            name: self.name.clone(),
            scenario,
        })
    }
}

/// Parse a single scenario object (the element type of `scenarios`).
pub fn parse_scenario_value(value: Value) -> Result<NamedScenario> {
    let raw: RawScenario = from_json_value(value)?;
    raw.build(&RawDefaults::default())
}

/// Parse and validate a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioDocument> {
    let raw: RawDocument = from_json_text(text)?;
    build_document(raw)
}

/// As [`parse_scenario`], for a document already parsed as JSON.
pub fn parse_scenario_document_value(value: Value) -> Result<ScenarioDocument> {
    build_document(from_json_value(value)?)
}

fn build_document(raw: RawDocument) -> Result<ScenarioDocument> {
    if raw.schema_version != SCHEMA_VERSION {
        return Err(Error::validation(
            "schema_version",
            format!("unsupported schema version `{}`, expected `{SCHEMA_VERSION}`", raw.schema_version),
        ));
    }
    if raw.scenarios.is_empty() {
        return Err(Error::validation("scenarios", "at least one scenario is required"));
    }
    let mut scenarios: Vec<NamedScenario> = Vec::with_capacity(raw.scenarios.len());
    for (i, s) in raw.scenarios.iter().enumerate() {
        let at = format!("scenarios[{i}]");
        let built = s.build(&raw.defaults).map_err(|e| e.at(&at))?;
        if scenarios.iter().any(|o| o.name == built.name) {
            return Err(Error::validation(format!("{at}.name"), format!("duplicate scenario name `{}`", built.name)));
        }
        scenarios.push(built);
    }
    Ok(ScenarioDocument {
        schema_version: raw.schema_version,
        scenarios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ::evaluate_single;

    const EXAMPLE: &str = r#"{
      "schema_version": "1",
      "defaults": {"transaction": {"input_tokens": 1000, "output_tokens": 0}},
      "scenarios": [
        {"name": "llm-1", "type": "single", "pricing": {"unit": "per_million_tokens", "input": 10.0, "output": 30.0},
         "gain": 10.0, "loss": 1.0, "p_success": 0.95},
        {"name": "llm-2", "pricing": {"unit": "per_token", "input": 5e-7, "output": 1.5e-6},
         "gain": 10.0, "loss": 1.0, "p_success": 0.80}
      ]
    }"#;

    #[test]
    fn parameter_vector_of_the_example() {
        let doc = parse_scenario(EXAMPLE).unwrap();
        let p = doc.get("llm-1").unwrap().parameter_vector(CostUnits::PerMillion).unwrap();
        assert_eq!(p.values(), &[10.0, 1.0, 10.0, 0.95, 1000.0]);
        let p = doc.get("llm-2").unwrap().parameter_vector(CostUnits::PerToken).unwrap();
        assert!((p.get("C").unwrap() - 5e-7).abs() < 1e-20);
    }

    #[test]
    fn worked_example() {
        let doc = parse_scenario(EXAMPLE).unwrap();
        assert_eq!(doc.scenarios.len(), 2);
        let r1 = evaluate_single(doc.single("llm-1").unwrap());
        assert!((r1.earnings - 9.44).abs() < 1e-9);
        let s2 = doc.single("llm-2").unwrap();
        assert!((s2.pricing().input_price_per_million() - 0.5).abs() < 1e-12);
        let r2 = evaluate_single(s2);
        assert!((r2.earnings - 7.7995).abs() < 1e-9);
        assert_eq!(doc.singles().len(), 2);
        assert!(doc.single("nope").is_err());
    }

    #[test]
    fn round_trips_through_value() {
        let doc = parse_scenario(EXAMPLE).unwrap();
        let again = parse_scenario_document_value(doc.to_value()).unwrap();
        assert_eq!(doc, again);
    }

    #[test]
    fn validation_errors_carry_paths() {
        let err = parse_scenario(&EXAMPLE.replace("0.95", "1.3")).unwrap_err();
        assert_eq!(err.field(), Some("scenarios[0].p_success"));

        let err = parse_scenario(r#"{"schema_version":"1","scenarios":[]}"#).unwrap_err();
        assert_eq!(err.field(), Some("scenarios"));

        let err = parse_scenario(&EXAMPLE.replace("\"llm-2\"", "\"llm-1\"")).unwrap_err();
        assert_eq!(err.field(), Some("scenarios[1].name"));

        let err = parse_scenario(&EXAMPLE.replace("\"input\": 10.0", "\"input\": -10.0")).unwrap_err();
        assert_eq!(err.field(), Some("scenarios[0].pricing.input"));
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse_scenario(&EXAMPLE.replace("\"gain\": 10.0, \"loss\": 1.0, \"p_success\": 0.95", "\"gain\": \"ten\"")).unwrap_err();
        match err {
            Error::Parse { path, line, .. } => {
                assert_eq!(path, "scenarios[0].gain");
                assert_eq!(line, 6);
            }
            other => panic!("{other:?}"),
        }
        let err = parse_scenario(&EXAMPLE.replace("\"gain\": 10.0, \"loss\": 1.0, \"p_success\": 0.95}", "\"gian\": 1}")).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn binary_scenarios() {
        let text = r#"{"schema_version":"1","scenarios":[{"name":"clf","type":"binary",
            "pricing":{"input":5.0},"transaction":{"input_tokens":1000},
            "gain":10,"loss_fp":1,"loss_fn":2,"p_tp":0.2,"p_fp":0.05,"p_fn":0.05}]}"#;
        let doc = parse_scenario(text).unwrap();
        match doc.get("clf").unwrap() {
            Scenario::Binary(b) => assert!((b.p_tn() - 0.7).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let err = parse_scenario(&text.replace("\"p_fn\":0.05", "\"p_fn\":0.8")).unwrap_err();
        assert_eq!(err.field(), Some("scenarios[0].p_tp"));
        let err = parse_scenario(&text.replace("\"loss_fn\":2", "\"loss\":2")).unwrap_err();
        assert_eq!(err.field(), Some("scenarios[0].loss"));
    }
}
