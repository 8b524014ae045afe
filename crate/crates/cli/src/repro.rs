//! The reproduction bundle: example table, break-even, earnings-versus-size
//! chart and the Sobol indices of both models for both targets.

use std::path::PathBuf;

use llm_roi_core::econ::{breakeven_solution, sweep, BinaryVariant, SolveFor, SweepVariable};
use llm_roi_core::io::chart::{sobol_bar_chart, sobol_heatmap, sweep_chart};
use llm_roi_core::io::{
    evaluate_document, pairwise_deltas, parse_scenario, parse_sobol_spec_with, sobol_spec_to_value, write_results,
    OutputFormat, ResultDocument, SpecOverrides,
};
use llm_roi_core::sensitivity::sobol_analyze;
use llm_roi_core::Error;
use serde_json::json;

use crate::commands::{read, write};
use crate::{CliError, ReproArgs};

const SCENARIOS: &str = include_str!("../../../scenarios/worked-example.json");

const SPECS: [(&str, &str, &str); 4] = [
    ("table1-earnings", "Earnings, commercial operation", include_str!("../../../specs/table1.json")),
    ("table1-roi", "RoI, commercial operation", include_str!("../../../specs/table1-roi.json")),
    ("table2-earnings", "Earnings, binary classification", include_str!("../../../specs/table2.json")),
    ("table2-roi", "RoI, binary classification", include_str!("../../../specs/table2-roi.json")),
];

pub const DEFAULT_EXPONENT: u32 = 16;
pub const FULL_EXPONENT: u32 = 20;

const LARGE_TRANSACTION: f64 = 128_000.0;
const SWEEP_FROM: f64 = 1_000.0;
const SWEEP_TO: f64 = 250_000.0;
const SWEEP_STEPS: usize = 250;

pub fn run(a: &ReproArgs) -> Result<(), CliError> {
    let exponent = if a.full { FULL_EXPONENT } else { a.samples_exponent.unwrap_or(DEFAULT_EXPONENT) };
    let text = match &a.scenario {
        Some(path) => read(path)?,
        None => SCENARIOS.to_string(),
    };
    let doc = parse_scenario(&text)?;
    let mut written: Vec<PathBuf> = Vec::new();
    let mut put = |name: &str, contents: &str| -> Result<(), CliError> {
        let path = a.out.join(name);
        write(&path, contents)?;
        written.push(path);
        Ok(())
    };

    let variant = BinaryVariant::Canonical;
    let mut example = ResultDocument::new("compare", json!({"scenarios": doc.to_value(), "variant": variant}));
    example.results = evaluate_document(&doc, variant);
    example.deltas = pairwise_deltas(&example.results);
    put("example.json", &write_results(&example, OutputFormat::Json))?;
    put("example.txt", &write_results(&example, OutputFormat::Table))?;

    let singles = doc.singles();
    if singles.len() < 2 {
        return Err(Error::validation("scenarios", "the bundle needs two single-outcome scenarios").into());
    }
    let (reference, candidate) = (&singles[0], &singles[1]);
    let mut be = ResultDocument::new(
        "breakeven",
        json!({
            "scenarios": doc.to_value(),
            "reference": reference.0,
            "candidate": candidate.0,
            "solve_for": SolveFor::Probability,
            "at": {"T": LARGE_TRANSACTION},
        }),
    );
    be.breakeven = Some(breakeven_solution(
        SolveFor::Probability,
        &SweepVariable::T.set(&reference.1, LARGE_TRANSACTION)?,
        &SweepVariable::T.set(&candidate.1, LARGE_TRANSACTION)?,
    )?);
    put("breakeven.json", &write_results(&be, OutputFormat::Json))?;

    let table = sweep(&singles, SweepVariable::T, SWEEP_FROM, SWEEP_TO, SWEEP_STEPS)?;
    put("earnings-sweep.svg", &sweep_chart("Earnings per transaction as a function of size", &table)?)?;
    let mut sw = ResultDocument::new(
        "sweep",
        json!({"scenarios": doc.to_value(), "var": "T", "from": SWEEP_FROM, "to": SWEEP_TO, "steps": SWEEP_STEPS}),
    );
    sw.series = Some(table);
    put("sweep.json", &write_results(&sw, OutputFormat::Json))?;

    for (stem, title, text) in SPECS {
        let spec = parse_sobol_spec_with(
            text,
            SpecOverrides {
                samples_exponent: Some(exponent),
                ..SpecOverrides::default()
            },
        )?;
        tracing::info!(spec = stem, exponent, "running Sobol analysis");
        let indices = sobol_analyze(&spec)?;
        put(&format!("sobol-{stem}-indices.svg"), &sobol_bar_chart(title, &indices)?)?;
        put(&format!("sobol-{stem}-second-order.svg"), &sobol_heatmap(title, &indices)?)?;
        let mut doc = ResultDocument::new("sobol", json!({"spec": sobol_spec_to_value(&spec)}));
        doc.seeds = vec![spec.settings.seed];
        doc.sobol = Some(indices);
        put(&format!("sobol-{stem}.json"), &write_results(&doc, OutputFormat::Json))?;
    }

    for path in &written {
        println!("{}", path.display());
    }
    Ok(())
}
