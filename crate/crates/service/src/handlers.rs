use std::collections::BTreeMap;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::Response;
use llm_roi_core::econ::{
    anecdotal_earnings_roi, breakeven_solution, expected_utility, sweep as run_sweep, AnecdotalScenario,
    BinaryVariant, Outcome, OutcomeLottery, SingleOutcomeScenario, SolveFor, SweepVariable,
};
use llm_roi_core::io::{
    evaluate_document, from_json_text, from_json_value, pairwise_deltas, parse_scenario_document_value,
    parse_scenario_value, parse_sobol_spec_value, sobol_spec_to_value, Scenario, ScenarioDocument, SCHEMA_VERSION,
    TOOL_VERSION,
};
use llm_roi_core::sensitivity::{
    local_report, sobol_analyze_with_progress, CostUnits, ModelKind, ParameterVector, SobolSpec, Target,
};
use llm_roi_core::Error;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{ApiError, ErrorBody};
use crate::jobs::{JobRecord, JobState};
use crate::{canonical_response, AppState};

type Reply = Result<Response, ApiError>;

fn ok<T: serde::Serialize + ?Sized>(value: &T) -> Reply {
    Ok(canonical_response(StatusCode::OK, value))
}

fn parse_body(body: &Bytes) -> Result<Value, Error> {
    let text = std::str::from_utf8(body).map_err(|e| Error::Parse {
        path: String::new(),
        line: 0,
        column: 0,
        message: format!("body is not UTF-8: {e}"),
    })?;
    from_json_text(text)
}

fn into_object(value: Value) -> Result<Map<String, Value>, Error> {
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(Error::validation("", "request body must be a JSON object")),
    }
}

/// Deserialize `map[key]`, prefixing error paths with the key.
fn take<T: DeserializeOwned>(map: &mut Map<String, Value>, key: &str) -> Result<Option<T>, Error> {
    match map.remove(key) {
        None => Ok(None),
        Some(v) => from_json_value(v).map(Some).map_err(|e| match e {
            Error::Parse { path, line, column, message } => Error::Parse {
                path: if path.is_empty() { key.to_string() } else { format!("{key}.{path}") },
                line,
                column,
                message,
            },
            other => other.at(key),
        }),
    }
}

fn require<T>(value: Option<T>, key: &str) -> Result<T, Error> {
    value.ok_or_else(|| Error::validation(key, "required"))
}

/// Parse what is left of `map` as a scenario document; `schema_version`
/// may be omitted.
fn document(mut map: Map<String, Value>) -> Result<ScenarioDocument, Error> {
    map.entry("schema_version").or_insert_with(|| json!(SCHEMA_VERSION));
    parse_scenario_document_value(Value::Object(map))
}

fn single_scenario(value: Value, at: &str) -> Result<(String, SingleOutcomeScenario), Error> {
    let named = parse_scenario_value(value).map_err(|e| e.at(at))?;
    match named.scenario {
        Scenario::Single(s) => Ok((named.name, s)),
        Scenario::Binary(_) => Err(Error::validation(format!("{at}.type"), "a single-outcome scenario is required")),
    }
}

fn singles_of(doc: &ScenarioDocument) -> Result<Vec<(String, SingleOutcomeScenario)>, Error> {
    let singles = doc.singles();
    if singles.len() != doc.scenarios.len() {
        return Err(Error::validation("scenarios", "only single-outcome scenarios are supported here"));
    }
    Ok(singles)
}

pub async fn health() -> Reply {
    ok(&json!({"status": "ok", "version": TOOL_VERSION}))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnecdotalRequest {
    total_transactions: u64,
    gain_transactions: u64,
    loss_transactions: u64,
    gain_per_success: f64,
    loss_per_failure: f64,
    transaction_cost: f64,
}

/// Accepts a scenario object, `{"scenario": ..., "variant": ...}`,
/// `{"anecdotal": {...}}` or `{"lottery": [{probability, utility}, ...]}`.
pub async fn evaluate(body: Bytes) -> Reply {
    let mut map = into_object(parse_body(&body)?)?;
    if map.contains_key("anecdotal") || map.contains_key("lottery") {
        let anecdotal: Option<AnecdotalRequest> = take(&mut map, "anecdotal")?;
        let lottery: Option<Vec<Outcome>> = take(&mut map, "lottery")?;
        if let Some(extra) = map.keys().next() {
            return Err(Error::validation(extra.as_str(), "unexpected field").into());
        }
        return match (anecdotal, lottery) {
            (Some(a), None) => {
                let s = AnecdotalScenario::new(
                    a.total_transactions,
                    a.gain_transactions,
                    a.loss_transactions,
                    a.gain_per_success,
                    a.loss_per_failure,
                    a.transaction_cost,
                )
                .map_err(|e| e.at("anecdotal"))?;
                let (earnings, roi) = anecdotal_earnings_roi(&s)?;
                ok(&json!({"earnings": earnings, "roi": roi, "warnings": s.warnings()}))
            }
            (None, Some(outcomes)) => {
                let lottery = OutcomeLottery::new(outcomes).map_err(|e| e.at("lottery"))?;
                ok(&json!({"expected_utility": expected_utility(&lottery)}))
            }
            _ => Err(Error::validation("", "give either `anecdotal` or `lottery`, not both").into()),
        };
    }
    let (scenario, variant) = if map.contains_key("scenario") {
        let scenario: Value = require(take(&mut map, "scenario")?, "scenario")?;
        let variant: Option<BinaryVariant> = take(&mut map, "variant")?;
        if let Some(extra) = map.keys().next() {
            return Err(Error::validation(extra.as_str(), "unexpected field").into());
        }
        (parse_scenario_value(scenario).map_err(|e| e.at("scenario"))?, variant.unwrap_or_default())
    } else {
        (parse_scenario_value(Value::Object(map))?, BinaryVariant::default())
    };
    ok(&scenario.scenario.evaluate(variant))
}

/// A scenario document (with `schema_version` optional) plus `variant`.
pub async fn compare(body: Bytes) -> Reply {
    let mut map = into_object(parse_body(&body)?)?;
    let variant: Option<BinaryVariant> = take(&mut map, "variant")?;
    let doc = document(map)?;
    if doc.scenarios.len() < 2 {
        return Err(Error::validation("scenarios", "compare needs at least two scenarios").into());
    }
    let results = evaluate_document(&doc, variant.unwrap_or_default());
    let deltas = pairwise_deltas(&results);
    ok(&json!({"results": results, "deltas": deltas}))
}

/// Set each `VAR=value` of `at` on `s`.
pub fn apply_overrides(
    s: &SingleOutcomeScenario,
    at: &BTreeMap<String, f64>,
    context: &str,
) -> Result<SingleOutcomeScenario, Error> {
    let mut out = s.clone();
    for (name, value) in at {
        let var: SweepVariable = name.parse().map_err(|e: Error| e.at("at"))?;
        out = var.set(&out, *value).map_err(|e| e.at(context))?;
    }
    Ok(out)
}

/// `{"reference": scenario, "candidate": scenario, "solve_for": ...,
/// "at": {"T": 128000}}`; `at` applies to both scenarios.
pub async fn breakeven(body: Bytes) -> Reply {
    let mut map = into_object(parse_body(&body)?)?;
    let solve_for: SolveFor = require(take(&mut map, "solve_for")?, "solve_for")?;
    let at: BTreeMap<String, f64> = take(&mut map, "at")?.unwrap_or_default();
    let reference: Value = require(take(&mut map, "reference")?, "reference")?;
    let candidate: Value = require(take(&mut map, "candidate")?, "candidate")?;
    if let Some(extra) = map.keys().next() {
        return Err(Error::validation(extra.as_str(), "unexpected field").into());
    }
    let (_, reference) = single_scenario(reference, "reference")?;
    let (_, candidate) = single_scenario(candidate, "candidate")?;
    let reference = apply_overrides(&reference, &at, "reference")?;
    let candidate = apply_overrides(&candidate, &at, "candidate")?;
    ok(&breakeven_solution(solve_for, &reference, &candidate)?)
}

/// A scenario document plus `var`, `from`, `to` and `steps`.
pub async fn sweep(body: Bytes) -> Reply {
    let mut map = into_object(parse_body(&body)?)?;
    let var: SweepVariable = require(take(&mut map, "var")?, "var")?;
    let from: f64 = require(take(&mut map, "from")?, "from")?;
    let to: f64 = require(take(&mut map, "to")?, "to")?;
    let steps: usize = require(take(&mut map, "steps")?, "steps")?;
    let doc = document(map)?;
    ok(&run_sweep(&singles_of(&doc)?, var, from, to, steps)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LocalRequest {
    model: ModelKind,
    target: Target,
    #[serde(default)]
    cost_units: CostUnits,
    point: Option<BTreeMap<String, f64>>,
    scenario: Option<Value>,
}

/// Gradient and Hessian at `point` (variable name to value) or at the
/// point of a `scenario`.
pub async fn local_sensitivity(body: Bytes) -> Reply {
    let req: LocalRequest = from_json_value(parse_body(&body)?)?;
    let point = match (req.point, req.scenario) {
        (Some(p), None) => ParameterVector::from_map(req.model, &p)?,
        (None, Some(s)) => {
            let named = parse_scenario_value(s).map_err(|e| e.at("scenario"))?;
            let matches = matches!(
                (&named.scenario, req.model),
                (Scenario::Single(_), ModelKind::Single)
                    | (Scenario::Binary(_), ModelKind::BinaryCanonical | ModelKind::BinaryPaperCompat)
            );
            if !matches {
                return Err(Error::validation("model", "does not match the scenario type").into());
            }
            named.scenario.parameter_vector(req.cost_units).map_err(|e| e.at("scenario"))?
        }
        _ => return Err(Error::validation("point", "give exactly one of `point` or `scenario`").into()),
    };
    ok(&local_report(&point, req.model, req.target, req.cost_units)?)
}

async fn run_job(state: AppState, id: String, spec: SobolSpec) -> JobRecord {
    let permit = state.permits.clone().acquire_owned().await.expect("job semaphore is never closed");
    state.jobs.start(&id);
    let jobs = state.jobs.clone();
    let job_id = id.clone();
    let outcome = tokio::task::spawn_blocking(move || {
        let progress = move |done: u64, total: u64| jobs.set_progress(&job_id, done as f64 / total as f64);
        sobol_analyze_with_progress(&spec, &progress)
    })
    .await;
    drop(permit);
    let outcome = match outcome {
        Ok(Ok(indices)) => Ok(indices),
        Ok(Err(e)) => {
            tracing::warn!(job = %id, "sobol job failed: {e}");
            Err(ErrorBody::from(&e))
        }
        Err(e) => Err(ApiError::internal(format!("job task failed: {e}")).body),
    };
    let failed = outcome.as_ref().err().cloned();
    state.jobs.finish(&id, outcome).unwrap_or_else(|| JobRecord {
        id,
        state: if failed.is_some() { JobState::Failed } else { JobState::Done },
        progress: 1.0,
        submitted_at: chrono::Utc::now(),
        finished_at: Some(chrono::Utc::now()),
        spec: Value::Null,
        result: None,
        error: failed,
    })
}

/// Small specs run inline and answer 200 with the finished record; larger
/// ones answer 202 and run in the background.
pub async fn submit_sobol(State(state): State<AppState>, body: Bytes) -> Reply {
    let spec = parse_sobol_spec_value(parse_body(&body)?)?;
    let evaluations = spec.settings.evaluations(spec.ranges.len());
    let record = state.jobs.submit(sobol_spec_to_value(&spec));
    if evaluations < state.config.sync_threshold {
        let done = run_job(state.clone(), record.id.clone(), spec).await;
        if let (JobState::Failed, Some(body)) = (done.state, &done.error) {
            return Err(ApiError {
                status: StatusCode::UNPROCESSABLE_ENTITY,
                body: body.clone(),
            });
        }
        return ok(&done);
    }
    tracing::info!(job = %record.id, evaluations, "queued sobol job");
    tokio::spawn(run_job(state, record.id.clone(), spec));
    Ok(canonical_response(StatusCode::ACCEPTED, &record))
}

pub async fn poll_job(State(state): State<AppState>, Path(id): Path<String>) -> Reply {
    match state.jobs.get(&id) {
        Some(record) => ok(&record),
        None => Err(ApiError::not_found(format!("no job `{id}`"))),
    }
}
