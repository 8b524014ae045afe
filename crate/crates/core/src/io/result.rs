//! Result documents and their JSON, CSV and table renderings.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::canonical::{format_float, to_canonical_json};
use super::scenario::{from_json_text, ScenarioDocument};
use crate::econ::{BinaryVariant, BreakevenSolution, CompressionTradeoff, EvaluationResult, SweepTable};
use crate::error::{Error, Result};
use crate::sensitivity::{LocalSensitivity, SobolIndices};

pub const TOOL_NAME: &str = "llm-roi";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedResult {
    pub name: String,
    pub result: EvaluationResult,
}

/// Earnings and RoI differences `second − first` for one scenario pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDelta {
    pub first: String,
    pub second: String,
    pub earnings_delta: f64,
    pub roi_delta: Option<f64>,
}

impl PairDelta {
    pub fn between(first: &NamedResult, second: &NamedResult) -> Self {
        Self {
            first: first.name.clone(),
            second: second.name.clone(),
            earnings_delta: second.result.earnings - first.result.earnings,
            roi_delta: match (first.result.roi, second.result.roi) {
                (Some(a), Some(b)) => Some(b - a),
                _ => None,
            },
        }
    }
}

/// Every scenario of `doc` evaluated in document order.
pub fn evaluate_document(doc: &ScenarioDocument, variant: BinaryVariant) -> Vec<NamedResult> {
    doc.scenarios
        .iter()
        .map(|n| NamedResult {
            name: n.name.clone(),
            result: n.scenario.evaluate(variant),
        })
        .collect()
}

/// Every pair `(i, j)` with `i < j`, in order.
pub fn pairwise_deltas(results: &[NamedResult]) -> Vec<PairDelta> {
    let mut out = Vec::new();
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            out.push(PairDelta::between(&results[i], &results[j]));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Echo of the inputs that produced the document.
    pub inputs: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub results: Vec<NamedResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deltas: Vec<PairDelta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakeven: Option<BreakevenSolution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SweepTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compression: Option<CompressionTradeoff>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_sensitivity: Option<LocalSensitivity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sobol: Option<SobolIndices>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
}

impl ResultDocument {
    pub fn new(command: impl Into<String>, inputs: Value) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            command: command.into(),
            inputs,
            results: Vec::new(),
            deltas: Vec::new(),
            breakeven: None,
            series: None,
            compression: None,
            local_sensitivity: None,
            sobol: None,
            seeds: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Table,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "table" => Ok(OutputFormat::Table),
            other => Err(Error::validation("format", format!("expected json, csv or table, got `{other}`"))),
        }
    }
}

pub fn parse_result_document(text: &str) -> Result<ResultDocument> {
    from_json_text(text)
}

pub fn write_results(doc: &ResultDocument, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_canonical_json(doc),
        OutputFormat::Csv => write_csv(doc),
        OutputFormat::Table => write_table(doc),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

/// The CSV view holds the document's main table: Sobol indices, sweep
/// points, the local gradient, the break-even solution, or the per-scenario
/// results, whichever the command produced.
fn write_csv(doc: &ResultDocument) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut row = |fields: Vec<String>| w.write_record(&fields).expect("in-memory csv write");
    if let Some(s) = &doc.sobol {
        row(["variable", "first_order", "total_order", "noise_bound"].map(String::from).to_vec());
        for (i, v) in s.variables.iter().enumerate() {
            row(vec![
                v.clone(),
                format_float(s.first_order[i]),
                format_float(s.total_order[i]),
                format_float(s.noise_bound[i]),
            ]);
        }
    } else if let Some(t) = &doc.series {
        row(["series", "variable", "value", "earnings", "roi"].map(String::from).to_vec());
        for series in &t.series {
            for p in &series.points {
                row(vec![
                    series.name.clone(),
                    t.variable.label().to_string(),
                    format_float(p.value),
                    format_float(p.earnings),
                    opt(p.roi),
                ]);
            }
        }
    } else if let Some(l) = &doc.local_sensitivity {
        row(["variable", "value", "gradient", "finite_difference"].map(String::from).to_vec());
        for (i, name) in l.evaluated_at.names().iter().enumerate() {
            row(vec![
                name.clone(),
                format_float(l.evaluated_at.values()[i]),
                format_float(l.gradient[i]),
                format_float(l.finite_difference_gradient[i]),
            ]);
        }
    } else if let Some(b) = &doc.breakeven {
        row(["solve_for", "value", "reference_earnings", "candidate_earnings"].map(String::from).to_vec());
        row(vec![
            serde_json::to_value(b.solve_for).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            format_float(b.value),
            format_float(b.reference_earnings),
            format_float(b.candidate_earnings),
        ]);
    } else {
        row(["scenario", "earnings", "roi", "roi_undefined", "transaction_cost"].map(String::from).to_vec());
        for r in &doc.results {
            row(vec![
                r.name.clone(),
                format_float(r.result.earnings),
                opt(r.result.roi),
                r.result.roi_undefined.to_string(),
                format_float(r.result.transaction_cost),
            ]);
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv output is utf-8")
}

/// Currency at presentation precision (five decimals).
pub fn format_currency(x: f64) -> String {
    format!("{x:.5}")
}

/// Ratio with thousands separators and at most two decimals, e.g. `15,599`.
pub fn format_ratio(x: f64) -> String {
    let fixed = format!("{:.2}", x.abs());
    let (int, frac) = fixed.split_once('.').expect("fixed format has a point");
    let mut grouped = String::new();
    for (i, ch) in int.chars().enumerate() {
        if i > 0 && (int.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    let frac = frac.trim_end_matches('0');
    let sign = if x < 0.0 && fixed.bytes().any(|b| b.is_ascii_digit() && b != b'0') { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{grouped}")
    } else {
        format!("{sign}{grouped}.{frac}")
    }
}

fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut out, header.to_vec());
    line(&mut out, widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for r in rows {
        line(&mut out, r.iter().map(String::as_str).collect());
    }
    out
}

fn write_table(doc: &ResultDocument) -> String {
    let mut out = String::new();
    let roi = |r: Option<f64>| r.map(format_ratio).unwrap_or_else(|| "undefined".into());
    if !doc.results.is_empty() {
        let rows: Vec<Vec<String>> = doc
            .results
            .iter()
            .map(|r| {
                vec![
                    r.name.clone(),
                    format_currency(r.result.earnings),
                    roi(r.result.roi),
                    format_currency(r.result.transaction_cost),
                ]
            })
            .collect();
        out.push_str(&render_table(&["scenario", "earnings", "roi", "transaction_cost"], &rows));
    }
    if !doc.deltas.is_empty() {
        out.push('\n');
        let rows: Vec<Vec<String>> = doc
            .deltas
            .iter()
            .map(|d| {
                vec![
                    format!("{} -> {}", d.first, d.second),
                    format_currency(d.earnings_delta),
                    roi(d.roi_delta),
                ]
            })
            .collect();
        out.push_str(&render_table(&["pair", "earnings_delta", "roi_delta"], &rows));
    }
    if let Some(b) = &doc.breakeven {
        if !out.is_empty() {
            out.push('\n');
        }
        let what = serde_json::to_value(b.solve_for).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        writeln!(out, "break-even {what}: {:.4}", b.value).unwrap();
        writeln!(out, "reference earnings: {}", format_currency(b.reference_earnings)).unwrap();
        writeln!(out, "candidate earnings: {}", format_currency(b.candidate_earnings)).unwrap();
    }
    if let Some(t) = &doc.series {
        if !out.is_empty() {
            out.push('\n');
        }
        let rows: Vec<Vec<String>> = t
            .series
            .iter()
            .flat_map(|s| {
                s.points.iter().map(move |p| {
                    vec![s.name.clone(), format!("{}", p.value), format_currency(p.earnings), roi(p.roi)]
                })
            })
            .collect();
        out.push_str(&render_table(&["series", t.variable.label(), "earnings", "roi"], &rows));
        for c in &t.crossings {
            writeln!(out, "crossing {} / {} at {} = {:.2} (earnings {})", c.first, c.second, t.variable.label(), c.value, format_currency(c.earnings)).unwrap();
        }
    }
    if let Some(c) = &doc.compression {
        if !out.is_empty() {
            out.push('\n');
        }
        writeln!(out, "cost saved: {}", format_currency(c.cost_saved)).unwrap();
        writeln!(out, "earnings delta: {}", format_currency(c.earnings_delta)).unwrap();
    }
    if let Some(l) = &doc.local_sensitivity {
        if !out.is_empty() {
            out.push('\n');
        }
        let rows: Vec<Vec<String>> = l
            .evaluated_at
            .names()
            .iter()
            .enumerate()
            .map(|(i, n)| {
                vec![
                    n.clone(),
                    format!("{}", l.evaluated_at.values()[i]),
                    format!("{:.6e}", l.gradient[i]),
                    format!("{:.6e}", l.finite_difference_gradient[i]),
                ]
            })
            .collect();
        out.push_str(&render_table(&["variable", "value", "gradient", "finite_difference"], &rows));
        writeln!(out, "value: {:.6e}", l.value).unwrap();
        writeln!(out, "max gradient deviation: {:.3e}", l.max_gradient_deviation).unwrap();
        writeln!(out, "hessian nonzeros: {} of {}", l.hessian_nonzeros, l.gradient.len() * l.gradient.len()).unwrap();
    }
    if let Some(s) = &doc.sobol {
        if !out.is_empty() {
            out.push('\n');
        }
        let rows: Vec<Vec<String>> = s
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| {
                vec![
                    v.clone(),
                    format!("{:.4}", s.first_order[i]),
                    format!("{:.4}", s.total_order[i]),
                    format!("{:.4}", s.noise_bound[i]),
                ]
            })
            .collect();
        out.push_str(&render_table(&["variable", "first_order", "total_order", "noise_bound"], &rows));
        if let Some(m) = &s.second_order {
            out.push('\n');
            let mut header = vec!["second_order"];
            header.extend(s.variables.iter().map(String::as_str));
            let rows: Vec<Vec<String>> = m
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut row = vec![s.variables[i].clone()];
                    row.extend(r.iter().enumerate().map(|(j, v)| if i == j { "-".to_string() } else { format!("{v:.4}") }));
                    row
                })
                .collect();
            out.push_str(&render_table(&header, &rows));
        }
        writeln!(out, "output variance: {:.6e}", s.output_variance).unwrap();
        writeln!(out, "evaluations: {}", s.evaluations_used).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ::{evaluate_single, LlmPricing, SingleOutcomeScenario, TransactionProfile};

    fn example_results() -> Vec<NamedResult> {
        [("llm-1", 10.0, 0.95), ("llm-2", 0.5, 0.80)]
            .iter()
            .map(|&(name, price, p)| {
                let s = SingleOutcomeScenario::new(
                    10.0,
                    1.0,
                    p,
                    LlmPricing::new(name, price, 0.0).unwrap(),
                    TransactionProfile::new(1000, 0).unwrap(),
                )
                .unwrap();
                NamedResult {
                    name: name.into(),
                    result: evaluate_single(&s),
                }
            })
            .collect()
    }

    fn doc() -> ResultDocument {
        let mut d = ResultDocument::new("evaluate", serde_json::json!({"scenario": "worked-example.json"}));
        d.results = example_results();
        d.deltas = pairwise_deltas(&d.results);
        d
    }

    #[test]
    fn ratio_formatting() {
        assert_eq!(format_ratio(15_599.0), "15,599");
        assert_eq!(format_ratio(944.0), "944");
        assert_eq!(format_ratio(1_234_567.5), "1,234,567.5");
        assert_eq!(format_ratio(-0.25), "-0.25");
        assert_eq!(format_ratio(-0.001), "0");
        assert_eq!(format_currency(7.7995), "7.79950");
    }

    #[test]
    fn csv_rows() {
        let text = write_results(&doc(), OutputFormat::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "scenario,earnings,roi,roi_undefined,transaction_cost");
        assert!(lines[1].starts_with("llm-1,9.44,944.0,"));
        assert!(lines[2].starts_with("llm-2,7.7995,15599.0,"));

        let empty = ResultDocument::new("evaluate", Value::Null);
        assert_eq!(write_results(&empty, OutputFormat::Csv).lines().count(), 1);
    }

    #[test]
    fn table_shows_example_values() {
        let text = write_results(&doc(), OutputFormat::Table);
        for needle in ["9.44000", "944", "7.79950", "15,599"] {
            assert!(text.contains(needle), "{needle} missing from\n{text}");
        }
    }

    #[test]
    fn json_reserializes_byte_identically() {
        let text = write_results(&doc(), OutputFormat::Json);
        let parsed = parse_result_document(&text).unwrap();
        assert_eq!(write_results(&parsed, OutputFormat::Json), text);
        assert_eq!(parsed.results.len(), 2);
        assert!((parsed.results[0].result.earnings - 9.44).abs() < 1e-12);
    }
}
