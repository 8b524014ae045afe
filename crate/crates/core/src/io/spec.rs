//! Sobol spec files.
//!
//! ```json
//! {"model": "single-earnings", "samples_exponent": 16, "second_order": true,
//!  "seed": 42, "bootstrap": 100, "cost_units": "per-million",
//!  "ranges": {"G": {"min": 1, "max": 1000}, "...": {}}}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::scenario::{from_json_text, from_json_value};
use crate::econ::BinaryVariant;
use crate::error::{Error, Result};
use crate::sensitivity::{
    CostUnits, SamplerKind, SobolModel, SobolSettings, SobolSpec, VariableRange, DEFAULT_BOOTSTRAP_RESAMPLES,
};

/// Largest accepted `samples_exponent`.
pub const MAX_SAMPLES_EXPONENT: u32 = 30;
/// Smallest accepted `samples_exponent` (eight base samples).
pub const MIN_SAMPLES_EXPONENT: u32 = 3;

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawRange {
    min: f64,
    max: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    model: SobolModel,
    #[serde(default)]
    variant: Option<BinaryVariant>,
    #[serde(default)]
    cost_units: CostUnits,
    samples_exponent: u32,
    #[serde(default)]
    second_order: bool,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_bootstrap")]
    bootstrap: usize,
    #[serde(default)]
    sampler: SamplerKind,
    ranges: BTreeMap<String, RawRange>,
}

fn default_bootstrap() -> usize {
    DEFAULT_BOOTSTRAP_RESAMPLES
}

/// Command-line or request overrides applied on top of a spec file.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpecOverrides {
    pub samples_exponent: Option<u32>,
    pub second_order: Option<bool>,
    pub seed: Option<u64>,
    pub bootstrap: Option<usize>,
    pub variant: Option<BinaryVariant>,
    pub cost_units: Option<CostUnits>,
}

pub fn check_samples_exponent(e: u32) -> Result<usize> {
    if !(MIN_SAMPLES_EXPONENT..=MAX_SAMPLES_EXPONENT).contains(&e) {
        return Err(Error::validation(
            "samples_exponent",
            format!("must lie in [{MIN_SAMPLES_EXPONENT}, {MAX_SAMPLES_EXPONENT}], got {e}"),
        ));
    }
    Ok(1usize << e)
}

fn build(raw: RawSpec, o: SpecOverrides) -> Result<SobolSpec> {
    let exponent = o.samples_exponent.unwrap_or(raw.samples_exponent);
    let base_samples = check_samples_exponent(exponent)?;
    let kind = raw.model.kind(BinaryVariant::Canonical);
    let mut ranges = Vec::with_capacity(kind.variables().len());
    for name in kind.variables() {
        let r = raw
            .ranges
            .get(*name)
            .ok_or_else(|| Error::validation(format!("ranges.{name}"), "missing range"))?;
        ranges.push(VariableRange::new(*name, r.min, r.max));
    }
    if let Some(extra) = raw.ranges.keys().find(|k| !kind.variables().contains(&k.as_str())) {
        return Err(Error::validation(
            format!("ranges.{extra}"),
            format!("not a variable of the {} model", raw.model.label()),
        ));
    }
    let spec = SobolSpec {
        model: raw.model,
        variant: o.variant.or(raw.variant).unwrap_or(BinaryVariant::PaperCompat),
        cost_units: o.cost_units.unwrap_or(raw.cost_units),
        ranges,
        settings: SobolSettings {
            base_samples,
            second_order: o.second_order.unwrap_or(raw.second_order),
            seed: o.seed.unwrap_or(raw.seed),
            bootstrap_resamples: o.bootstrap.unwrap_or(raw.bootstrap),
            sampler: raw.sampler,
        },
    };
    spec.validate()?;
    Ok(spec)
}

pub fn parse_sobol_spec(text: &str) -> Result<SobolSpec> {
    parse_sobol_spec_with(text, SpecOverrides::default())
}

pub fn parse_sobol_spec_with(text: &str, overrides: SpecOverrides) -> Result<SobolSpec> {
    build(from_json_text(text)?, overrides)
}

pub fn parse_sobol_spec_value(value: Value) -> Result<SobolSpec> {
    build(from_json_value(value)?, SpecOverrides::default())
}

/// File form of a spec. `base_samples` must be a power of two.
pub fn sobol_spec_to_value(spec: &SobolSpec) -> Value {
    let ranges: serde_json::Map<String, Value> = spec
        .ranges
        .iter()
        .map(|r| (r.name.clone(), json!({"min": r.min, "max": r.max})))
        .collect();
    json!({
        "model": spec.model,
        "variant": spec.variant,
        "cost_units": spec.cost_units,
        "samples_exponent": spec.settings.base_samples.trailing_zeros(),
        "second_order": spec.settings.second_order,
        "seed": spec.settings.seed,
        "bootstrap": spec.settings.bootstrap_resamples,
        "sampler": spec.settings.sampler,
        "ranges": ranges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensitivity::Target;

    const TABLE1: &str = r#"{
      "model": "single-earnings", "samples_exponent": 12, "second_order": true, "seed": 42,
      "ranges": {"G": {"min": 1, "max": 1000}, "L": {"min": 0, "max": 1000}, "C": {"min": 0.01, "max": 100},
                 "P": {"min": 0.1, "max": 1}, "T": {"min": 50, "max": 128000}}
    }"#;

    #[test]
    fn parses_table1() {
        let spec = parse_sobol_spec(TABLE1).unwrap();
        let preset = SobolSpec::table1(
            Target::Earnings,
            SobolSettings::new(4096, true, 42).with_bootstrap(DEFAULT_BOOTSTRAP_RESAMPLES),
        );
        assert_eq!(spec, preset);
        assert_eq!(parse_sobol_spec_value(sobol_spec_to_value(&spec)).unwrap(), spec);
    }

    #[test]
    fn overrides_apply() {
        let o = SpecOverrides {
            samples_exponent: Some(5),
            seed: Some(7),
            bootstrap: Some(0),
            ..Default::default()
        };
        let spec = parse_sobol_spec_with(TABLE1, o).unwrap();
        assert_eq!(spec.settings.base_samples, 32);
        assert_eq!(spec.settings.seed, 7);
        assert_eq!(spec.settings.bootstrap_resamples, 0);
    }

    #[test]
    fn rejects_bad_specs() {
        let err = parse_sobol_spec(&TABLE1.replace("\"samples_exponent\": 12", "\"samples_exponent\": 2")).unwrap_err();
        assert_eq!(err.field(), Some("samples_exponent"));
        let err = parse_sobol_spec(&TABLE1.replace("\"P\"", "\"Q\"")).unwrap_err();
        assert_eq!(err.field(), Some("ranges.P"));
        let err = parse_sobol_spec(&TABLE1.replace("\"min\": 50", "\"min\": 500000")).unwrap_err();
        assert_eq!(err.field(), Some("ranges.T"));
        assert!(matches!(parse_sobol_spec("{\"model\": \"x\"}"), Err(Error::Parse { .. })));
    }
}
