use std::fs;
use std::net::SocketAddr;
use std::path::Path;
use std::time::Duration;

use llm_roi_core::econ::{breakeven_solution, sweep as run_sweep, SingleOutcomeScenario};
use llm_roi_core::io::chart::{sobol_bar_chart, sobol_heatmap, sweep_chart};
use llm_roi_core::io::{
    evaluate_document, pairwise_deltas, parse_scenario, parse_sobol_spec_with, sobol_spec_to_value, write_results,
    ResultDocument, ScenarioDocument, SpecOverrides,
};
use llm_roi_core::sensitivity::{local_report, sobol_analyze, ModelKind};
use llm_roi_core::Error;
use serde_json::json;

use crate::{BreakevenArgs, CliError, EvaluateArgs, LocalArgs, OutputArgs, ServeArgs, SobolArgs, SweepArgs};

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn emit(doc: &ResultDocument, output: &OutputArgs) -> Result<(), CliError> {
    let text = write_results(doc, output.format);
    match &output.out {
        Some(path) => write(path, &text),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("standard output: {e}")))
        }
    }
}

/// The document restricted to `names`, in the order given; all of it when
/// `names` is empty.
fn select(mut doc: ScenarioDocument, names: &[String]) -> Result<ScenarioDocument, CliError> {
    if names.is_empty() {
        return Ok(doc);
    }
    let mut picked = Vec::with_capacity(names.len());
    for name in names {
        let i = doc
            .scenarios
            .iter()
            .position(|s| &s.name == name)
            .ok_or_else(|| Error::validation("name", format!("no scenario named `{name}`")))?;
        picked.push(doc.scenarios.remove(i));
    }
    doc.scenarios = picked;
    Ok(doc)
}

fn singles(doc: &ScenarioDocument) -> Result<Vec<(String, SingleOutcomeScenario)>, CliError> {
    let singles = doc.singles();
    if singles.len() != doc.scenarios.len() {
        return Err(Error::validation("scenarios", "only single-outcome scenarios are supported by this command").into());
    }
    Ok(singles)
}

pub fn evaluate(a: &EvaluateArgs, compare: bool) -> Result<(), CliError> {
    let doc = select(parse_scenario(&read(&a.scenario)?)?, &a.name)?;
    if compare && doc.scenarios.len() < 2 {
        return Err(Error::validation("scenarios", "compare needs at least two scenarios").into());
    }
    let command = if compare { "compare" } else { "evaluate" };
    let mut out = ResultDocument::new(command, json!({"scenarios": doc.to_value(), "variant": a.variant}));
    out.results = evaluate_document(&doc, a.variant);
    if compare {
        out.deltas = pairwise_deltas(&out.results);
    }
    emit(&out, &a.output)
}

pub fn breakeven(a: &BreakevenArgs) -> Result<(), CliError> {
    let doc = parse_scenario(&read(&a.scenario)?)?;
    let names: Vec<String> = doc.singles().into_iter().map(|(n, _)| n).collect();
    let reference = a.reference.clone().or_else(|| names.first().cloned());
    let candidate = a.candidate.clone().or_else(|| names.get(1).cloned());
    let (Some(reference), Some(candidate)) = (reference, candidate) else {
        return Err(Error::validation("scenarios", "break-even needs two single-outcome scenarios").into());
    };
    let mut r = doc.single(&reference)?.clone();
    let mut c = doc.single(&candidate)?.clone();
    for (var, value) in &a.at {
        r = var.set(&r, *value)?;
        c = var.set(&c, *value)?;
    }
    let at: serde_json::Map<String, serde_json::Value> =
        a.at.iter().map(|(v, x)| (v.label().to_string(), json!(x))).collect();
    let mut out = ResultDocument::new(
        "breakeven",
        json!({
            "scenarios": doc.to_value(),
            "reference": reference,
            "candidate": candidate,
            "solve_for": a.solve_for,
            "at": at,
        }),
    );
    out.breakeven = Some(breakeven_solution(a.solve_for, &r, &c)?);
    emit(&out, &a.output)
}

pub fn sweep(a: &SweepArgs) -> Result<(), CliError> {
    let doc = select(parse_scenario(&read(&a.scenario)?)?, &a.name)?;
    let table = run_sweep(&singles(&doc)?, a.var, a.from, a.to, a.steps)?;
    if let Some(path) = &a.chart {
        let title = format!("Earnings as a function of {}", a.var.label());
        write(path, &sweep_chart(&title, &table)?)?;
    }
    let mut out = ResultDocument::new(
        "sweep",
        json!({"scenarios": doc.to_value(), "var": a.var, "from": a.from, "to": a.to, "steps": a.steps}),
    );
    out.series = Some(table);
    emit(&out, &a.output)
}

pub fn sobol(a: &SobolArgs) -> Result<(), CliError> {
    let overrides = SpecOverrides {
        samples_exponent: a.samples_exponent,
        second_order: a.second_order,
        seed: a.seed,
        bootstrap: a.bootstrap,
        variant: a.variant,
        cost_units: a.cost_units,
    };
    let spec = parse_sobol_spec_with(&read(&a.spec)?, overrides)?;
    let indices = sobol_analyze(&spec)?;
    if let Some(dir) = &a.chart_dir {
        let label = spec.model.label();
        write(&dir.join(format!("{label}-indices.svg")), &sobol_bar_chart(label, &indices)?)?;
        if indices.second_order.is_some() {
            write(&dir.join(format!("{label}-second-order.svg")), &sobol_heatmap(label, &indices)?)?;
        }
    }
    let mut out = ResultDocument::new("sobol", json!({"spec": sobol_spec_to_value(&spec)}));
    out.seeds = vec![spec.settings.seed];
    out.sobol = Some(indices);
    emit(&out, &a.output)
}

pub fn local_sensitivity(a: &LocalArgs) -> Result<(), CliError> {
    let doc = parse_scenario(&read(&a.scenario)?)?;
    let named = match &a.name {
        Some(name) => doc
            .scenarios
            .iter()
            .find(|s| &s.name == name)
            .ok_or_else(|| Error::validation("name", format!("no scenario named `{name}`")))?,
        None => &doc.scenarios[0],
    };
    let model = match named.scenario {
        llm_roi_core::io::Scenario::Single(_) => ModelKind::Single,
        llm_roi_core::io::Scenario::Binary(_) => ModelKind::binary(a.variant),
    };
    let point = named.scenario.parameter_vector(a.cost_units)?;
    let mut out = ResultDocument::new(
        "local-sens",
        json!({
            "scenario": named.name,
            "scenarios": doc.to_value(),
            "target": a.target,
            "variant": a.variant,
            "cost_units": a.cost_units,
        }),
    );
    out.local_sensitivity = Some(local_report(&point, model, a.target, a.cost_units)?);
    emit(&out, &a.output)
}

pub fn serve(a: &ServeArgs) -> Result<(), CliError> {
    let config = llm_roi_service::ServiceConfig {
        sync_threshold: a.sync_threshold,
        max_concurrent_jobs: a.max_jobs.max(1),
        retention: Duration::from_secs(a.retention_secs),
        local_cors: true,
    };
    let addr = SocketAddr::new(a.bind, a.port);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Engine(format!("cannot start runtime: {e}")))?;
    runtime
        .block_on(llm_roi_service::serve(addr, config))
        .map_err(|e| CliError::Io(format!("{addr}: {e}")))
}
