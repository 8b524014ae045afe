//! File formats: scenario and Sobol spec parsing, result documents, charts.

pub mod canonical;
pub mod chart;
mod result;
mod scenario;
mod spec;

pub use canonical::{format_float, round_significant, to_canonical_json, value_to_canonical};
pub use result::{
    evaluate_document, format_currency, format_ratio, pairwise_deltas, parse_result_document, write_results, NamedResult, OutputFormat,
    PairDelta, ResultDocument, TOOL_NAME, TOOL_VERSION,
};
pub use scenario::{
    from_json_text, from_json_value, parse_scenario, parse_scenario_document_value, parse_scenario_value, NamedScenario,
    Scenario, ScenarioDocument, SCHEMA_VERSION,
};
pub use spec::{
    check_samples_exponent, parse_sobol_spec, parse_sobol_spec_value, parse_sobol_spec_with, sobol_spec_to_value,
    SpecOverrides, MAX_SAMPLES_EXPONENT, MIN_SAMPLES_EXPONENT,
};
