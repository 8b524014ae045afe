//! Variance-based global sensitivity: first-, total- and second-order Sobol'
//! indices estimated on a Saltelli design.
//!
//! Model outputs are computed in parallel over fixed chunks of base samples;
//! every reduction afterwards runs sequentially in row order, so results are
//! bit-identical for any number of worker threads.

use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{CostUnits, EconModel, Matrix, ModelKind, Target};
use super::saltelli::{SaltelliDesign, SamplerKind, VariableRange};
use crate::econ::BinaryVariant;
use crate::error::{Error, Result};

/// Smallest base sample count accepted for analysis.
pub const MIN_ANALYSIS_SAMPLES: usize = 8;
pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 100;
const CONFIDENCE_LEVEL: f64 = 0.95;
/// Base samples evaluated per parallel work item.
const CHUNK_BLOCKS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SobolModel {
    SingleEarnings,
    SingleRoi,
    BinaryEarnings,
    BinaryRoi,
}

impl SobolModel {
    pub fn target(self) -> Target {
        match self {
            SobolModel::SingleEarnings | SobolModel::BinaryEarnings => Target::Earnings,
            SobolModel::SingleRoi | SobolModel::BinaryRoi => Target::Roi,
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(self, SobolModel::BinaryEarnings | SobolModel::BinaryRoi)
    }

    pub fn kind(self, variant: BinaryVariant) -> ModelKind {
        if self.is_binary() {
            ModelKind::binary(variant)
        } else {
            ModelKind::Single
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SobolModel::SingleEarnings => "single-earnings",
            SobolModel::SingleRoi => "single-roi",
            SobolModel::BinaryEarnings => "binary-earnings",
            SobolModel::BinaryRoi => "binary-roi",
        }
    }
}

impl std::str::FromStr for SobolModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single-earnings" => Ok(SobolModel::SingleEarnings),
            "single-roi" => Ok(SobolModel::SingleRoi),
            "binary-earnings" => Ok(SobolModel::BinaryEarnings),
            "binary-roi" => Ok(SobolModel::BinaryRoi),
            other => Err(Error::validation("model", format!("unknown Sobol model `{other}`"))),
        }
    }
}

/// Sampling budget and reproducibility controls, independent of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SobolSettings {
    pub base_samples: usize,
    pub second_order: bool,
    pub seed: u64,
    pub bootstrap_resamples: usize,
    #[serde(default)]
    pub sampler: SamplerKind,
}

impl SobolSettings {
    pub fn new(base_samples: usize, second_order: bool, seed: u64) -> Self {
        Self {
            base_samples,
            second_order,
            seed,
            bootstrap_resamples: 0,
            sampler: SamplerKind::Sobol,
        }
    }

    pub fn with_bootstrap(mut self, resamples: usize) -> Self {
        self.bootstrap_resamples = resamples;
        self
    }

    pub fn with_sampler(mut self, sampler: SamplerKind) -> Self {
        self.sampler = sampler;
        self
    }

    /// Model evaluations the design will use.
    pub fn evaluations(&self, dims: usize) -> u64 {
        let per = if self.second_order { 2 * dims + 2 } else { dims + 2 };
        self.base_samples as u64 * per as u64
    }
}

/// A Sobol run over one of the closed-form models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolSpec {
    pub model: SobolModel,
    #[serde(default = "paper_compat")]
    pub variant: BinaryVariant,
    #[serde(default)]
    pub cost_units: CostUnits,
    /// One range per model variable, in model order.
    pub ranges: Vec<VariableRange>,
    #[serde(flatten)]
    pub settings: SobolSettings,
}

fn paper_compat() -> BinaryVariant {
    BinaryVariant::PaperCompat
}

impl SobolSpec {
    /// Ranges of the success/failure model used for the commercial operation.
    pub fn table1(target: Target, settings: SobolSettings) -> Self {
        let model = match target {
            Target::Earnings => SobolModel::SingleEarnings,
            Target::Roi => SobolModel::SingleRoi,
        };
        Self {
            model,
            variant: BinaryVariant::PaperCompat,
            cost_units: CostUnits::PerMillion,
            ranges: vec![
                VariableRange::new("G", 1.0, 1000.0),
                VariableRange::new("L", 0.0, 1000.0),
                VariableRange::new("C", 0.01, 100.0),
                VariableRange::new("P", 0.10, 1.0),
                VariableRange::new("T", 50.0, 128_000.0),
            ],
            settings,
        }
    }

    /// Ranges of the binary classification model.
    pub fn table2(target: Target, settings: SobolSettings) -> Self {
        let model = match target {
            Target::Earnings => SobolModel::BinaryEarnings,
            Target::Roi => SobolModel::BinaryRoi,
        };
        Self {
            model,
            variant: BinaryVariant::PaperCompat,
            cost_units: CostUnits::PerMillion,
            ranges: vec![
                VariableRange::new("G", 1.0, 1000.0),
                VariableRange::new("L_FP", 0.0, 1000.0),
                VariableRange::new("L_FN", 0.0, 1000.0),
                VariableRange::new("C", 0.01, 100.0),
                VariableRange::new("P_FP", 0.0, 0.1),
                VariableRange::new("P_FN", 0.0, 0.1),
                VariableRange::new("P_TP", 0.0, 0.3),
                VariableRange::new("T", 50.0, 128_000.0),
            ],
            settings,
        }
    }

    pub fn econ_model(&self) -> EconModel {
        EconModel::new(self.model.kind(self.variant), self.model.target(), self.cost_units)
    }

    pub fn validate(&self) -> Result<()> {
        let expected = self.model.kind(self.variant).variables();
        let names: Vec<&str> = self.ranges.iter().map(|r| r.name.as_str()).collect();
        if names != expected {
            return Err(Error::validation(
                "ranges",
                format!("{} expects variables {expected:?} in that order, got {names:?}", self.model.label()),
            ));
        }
        super::saltelli::validate_ranges(&self.ranges)?;
        let get = |name: &str| self.ranges.iter().find(|r| r.name == name).expect("layout checked");
        if self.model.is_binary() {
            let sum: f64 = ["P_TP", "P_FP", "P_FN"].iter().map(|n| get(n).max).sum();
            if sum > 1.0 + 1e-12 {
                return Err(Error::validation(
                    "ranges.P_TP.max",
                    format!("P_TP + P_FP + P_FN maxima sum to {sum}, leaving P_TN negative"),
                ));
            }
            for n in ["P_TP", "P_FP", "P_FN"] {
                if get(n).min < 0.0 {
                    return Err(Error::validation(format!("ranges.{n}.min"), "probability cannot be negative"));
                }
            }
        } else {
            let p = get("P");
            if p.min < 0.0 || p.max > 1.0 {
                return Err(Error::validation("ranges.P", "probability range must lie in [0, 1]"));
            }
        }
        if self.model.target() == Target::Roi {
            for n in ["C", "T"] {
                if get(n).min <= 0.0 {
                    return Err(Error::validation(
                        format!("ranges.{n}.min"),
                        "RoI needs C·T > 0 over the whole box",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Percentile bootstrap intervals, one `(low, high)` per index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceIntervals {
    pub level: f64,
    pub resamples: usize,
    pub first_order: Vec<(f64, f64)>,
    pub total_order: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_order: Option<Vec<Vec<(f64, f64)>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolIndices {
    pub variables: Vec<String>,
    pub first_order: Vec<f64>,
    pub total_order: Vec<f64>,
    /// Symmetric, zero diagonal. Present iff second order was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_order: Option<Matrix>,
    pub output_variance: f64,
    pub evaluations_used: u64,
    /// Three standard errors of the per-variable `S_Ti − S_i` estimate.
    pub noise_bound: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence_intervals: Option<ConfidenceIntervals>,
}

impl SobolIndices {
    /// Index of the variable with the largest first-order index.
    pub fn top_first_order(&self) -> usize {
        argmax(&self.first_order)
    }

    /// `(i, j)` with `i < j` maximizing the second-order index.
    pub fn top_second_order_pair(&self) -> Option<(usize, usize)> {
        let s2 = self.second_order.as_ref()?;
        let mut best = None;
        let mut best_v = f64::NEG_INFINITY;
        for i in 0..s2.len() {
            for j in i + 1..s2.len() {
                if s2[i][j] > best_v {
                    best_v = s2[i][j];
                    best = Some((i, j));
                }
            }
        }
        best
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Progress callback receiving `(evaluations_done, evaluations_total)`.
/// Calls are serialized and `evaluations_done` never decreases.
pub type Progress<'a> = &'a (dyn Fn(u64, u64) + Sync);

pub fn sobol_analyze(spec: &SobolSpec) -> Result<SobolIndices> {
    sobol_analyze_with_progress(spec, &|_, _| {})
}

pub fn sobol_analyze_with_progress(spec: &SobolSpec, progress: Progress<'_>) -> Result<SobolIndices> {
    spec.validate()?;
    let model = spec.econ_model();
    sobol_analyze_with(|x| model.evaluate(x), &spec.ranges, &spec.settings, progress)
}

/// Analyze a caller-supplied model over `ranges`.
pub fn sobol_analyze_with<F>(f: F, ranges: &[VariableRange], settings: &SobolSettings, progress: Progress<'_>) -> Result<SobolIndices>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if settings.base_samples < MIN_ANALYSIS_SAMPLES {
        return Err(Error::validation(
            "base_samples",
            format!("need at least {MIN_ANALYSIS_SAMPLES}, got {}", settings.base_samples),
        ));
    }
    let design = SaltelliDesign::new(
        ranges,
        settings.base_samples,
        settings.second_order,
        settings.seed,
        settings.sampler,
    )?;
    let outputs = evaluate_design(&design, &f, progress)?;
    let est = Estimator::new(&design, &outputs);
    let all: Vec<usize> = (0..design.base_samples()).collect();
    let point = est.indices(&all)?;

    let confidence_intervals = if settings.bootstrap_resamples > 0 {
        Some(est.bootstrap(settings.bootstrap_resamples, settings.seed)?)
    } else {
        None
    };

    Ok(SobolIndices {
        variables: ranges.iter().map(|r| r.name.clone()).collect(),
        first_order: point.first,
        total_order: point.total,
        second_order: point.second,
        output_variance: point.variance,
        evaluations_used: design.rows() as u64,
        noise_bound: est.noise_bound(&point.mean, point.variance),
        confidence_intervals,
    })
}

fn evaluate_design<F>(design: &SaltelliDesign, f: &F, progress: Progress<'_>) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = design.dims();
    let block = design.block_len();
    let n = design.base_samples();
    let total = design.rows() as u64;
    let mut outputs = vec![0.0; design.rows()];
    let done = Mutex::new(0u64);

    let errors: Vec<Error> = outputs
        .par_chunks_mut(CHUNK_BLOCKS * block)
        .enumerate()
        .filter_map(|(c, out)| {
            let first = c * CHUNK_BLOCKS;
            let mut rows = vec![0.0; block * d];
            for (k, j) in (first..n.min(first + CHUNK_BLOCKS)).enumerate() {
                design.fill_block(j, &mut rows);
                for (r, x) in rows.chunks(d).enumerate() {
                    let y = f(x);
                    if !y.is_finite() {
                        return Some(Error::NonFiniteOutput { row: x.to_vec(), value: y });
                    }
                    out[k * block + r] = y;
                }
            }
            let mut done = done.lock().unwrap_or_else(|e| e.into_inner());
            *done += out.len() as u64;
            progress(*done, total);
            None
        })
        .collect();

    // filter_map + collect preserves chunk order, so the first error is the
    // one at the lowest row.
    match errors.into_iter().next() {
        Some(e) => Err(e),
        None => Ok(outputs),
    }
}

struct PointEstimate {
    first: Vec<f64>,
    total: Vec<f64>,
    second: Option<Matrix>,
    variance: f64,
    mean: f64,
}

struct Estimator<'a> {
    outputs: &'a [f64],
    dims: usize,
    block: usize,
    second_order: bool,
}

impl<'a> Estimator<'a> {
    fn new(design: &SaltelliDesign, outputs: &'a [f64]) -> Self {
        Self {
            outputs,
            dims: design.dims(),
            block: design.block_len(),
            second_order: design.second_order(),
        }
    }

    fn a(&self, j: usize) -> f64 {
        self.outputs[j * self.block]
    }

    fn b(&self, j: usize) -> f64 {
        self.outputs[j * self.block + self.block - 1]
    }

    fn ab(&self, j: usize, i: usize) -> f64 {
        self.outputs[j * self.block + 1 + i]
    }

    fn ba(&self, j: usize, i: usize) -> f64 {
        self.outputs[j * self.block + 1 + self.dims + i]
    }

    /// Indices over the base samples listed in `rows` (repeats allowed).
    fn indices(&self, rows: &[usize]) -> Result<PointEstimate> {
        let n = rows.len() as f64;
        let d = self.dims;

        let mut sum = 0.0;
        let mut peak = 0.0f64;
        for &j in rows {
            sum += self.a(j) + self.b(j);
            peak = peak.max(self.a(j).abs()).max(self.b(j).abs());
        }
        let mean = sum / (2.0 * n);
        let mut ss = 0.0;
        for &j in rows {
            ss += (self.a(j) - mean).powi(2) + (self.b(j) - mean).powi(2);
        }
        let variance = ss / (2.0 * n);
        let floor = (f64::EPSILON * peak).powi(2);
        if variance <= floor {
            return Err(Error::DegenerateModel(format!(
                "output variance {variance:e} is zero within rounding; the model is constant over the box"
            )));
        }

        let mut first = vec![0.0; d];
        let mut total = vec![0.0; d];
        for i in 0..d {
            let (mut s1, mut st) = (0.0, 0.0);
            for &j in rows {
                let (a, b, ab) = (self.a(j) - mean, self.b(j) - mean, self.ab(j, i) - mean);
                s1 += b * (ab - a);
                st += (a - ab).powi(2);
            }
            first[i] = s1 / n / variance;
            total[i] = 0.5 * st / n / variance;
        }

        let second = self.second_order.then(|| {
            let mut s2 = vec![vec![0.0; d]; d];
            for i in 0..d {
                for k in i + 1..d {
                    let mut acc = 0.0;
                    for &j in rows {
                        let (a, b) = (self.a(j) - mean, self.b(j) - mean);
                        acc += (self.ba(j, i) - mean) * (self.ab(j, k) - mean) - a * b;
                    }
                    let v = acc / n / variance - first[i] - first[k];
                    s2[i][k] = v;
                    s2[k][i] = v;
                }
            }
            s2
        });

        Ok(PointEstimate {
            first,
            total,
            second,
            variance,
            mean,
        })
    }

    fn noise_bound(&self, mean: &f64, variance: f64) -> Vec<f64> {
        let n = self.outputs.len() / self.block;
        (0..self.dims)
            .map(|i| {
                let diff: Vec<f64> = (0..n)
                    .map(|j| {
                        let (a, b, ab) = (self.a(j) - mean, self.b(j) - mean, self.ab(j, i) - mean);
                        0.5 * (a - ab).powi(2) - b * (ab - a)
                    })
                    .collect();
                let m = diff.iter().sum::<f64>() / n as f64;
                let var = diff.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n as f64 - 1.0);
                3.0 * var.sqrt() / (n as f64).sqrt() / variance
            })
            .collect()
    }

    fn bootstrap(&self, resamples: usize, seed: u64) -> Result<ConfidenceIntervals> {
        let n = self.outputs.len() / self.block;
        let estimates: Vec<PointEstimate> = (0..resamples)
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(r as u64 + 1);
                let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                self.indices(&rows)
            })
            .collect::<Result<_>>()?;

        let d = self.dims;
        let interval = |values: Vec<f64>| percentile_interval(values, CONFIDENCE_LEVEL);
        let first_order = (0..d).map(|i| interval(estimates.iter().map(|e| e.first[i]).collect())).collect();
        let total_order = (0..d).map(|i| interval(estimates.iter().map(|e| e.total[i]).collect())).collect();
        let second_order = self.second_order.then(|| {
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|k| {
                            if i == k {
                                (0.0, 0.0)
                            } else {
                                interval(estimates.iter().map(|e| e.second.as_ref().expect("second order")[i][k]).collect())
                            }
                        })
                        .collect()
                })
                .collect()
        });
        Ok(ConfidenceIntervals {
            level: CONFIDENCE_LEVEL,
            resamples,
            first_order,
            total_order,
            second_order,
        })
    }
}

fn percentile_interval(mut values: Vec<f64>, level: f64) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    (quantile(&values, tail), quantile(&values, 1.0 - tail))
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit(d: usize) -> Vec<VariableRange> {
        (0..d).map(|i| VariableRange::new(format!("x{}", i + 1), 0.0, 1.0)).collect()
    }

    fn run<F: Fn(&[f64]) -> f64 + Sync>(f: F, ranges: &[VariableRange], settings: SobolSettings) -> Result<SobolIndices> {
        sobol_analyze_with(f, ranges, &settings, &|_, _| {})
    }

    #[test]
    fn additive_linear_function() {
        let r = run(|x| x[0] + 2.0 * x[1], &unit(2), SobolSettings::new(1 << 14, true, 7)).unwrap();
        // Var = (1 + 4)/12, so S1 = 1/5 and S2 = 4/5.
        assert!((r.first_order[0] - 0.2).abs() < 0.01, "{:?}", r.first_order);
        assert!((r.first_order[1] - 0.8).abs() < 0.01);
        assert!((r.total_order[0] - 0.2).abs() < 0.01);
        assert!(r.second_order.as_ref().unwrap()[0][1].abs() < 0.01);
        assert!((r.first_order.iter().sum::<f64>() - 1.0).abs() < 0.01);
        assert!((r.output_variance - 5.0 / 12.0).abs() < 0.01);
        assert_eq!(r.evaluations_used, (1 << 14) * 6);
    }

    #[test]
    fn ishigami_function() {
        let (a, b) = (7.0, 0.1);
        let pi4 = PI.powi(4);
        let pi8 = PI.powi(8);
        let v = a * a / 8.0 + b * pi4 / 5.0 + b * b * pi8 / 18.0 + 0.5;
        let v1 = 0.5 * (1.0 + b * pi4 / 5.0).powi(2);
        let v2 = a * a / 8.0;
        let v13 = 8.0 * b * b * pi8 / 225.0;
        let expected_s1 = [v1 / v, v2 / v, 0.0];
        let expected_st = [(v1 + v13) / v, v2 / v, v13 / v];

        let ranges: Vec<VariableRange> = (1..=3).map(|i| VariableRange::new(format!("x{i}"), -PI, PI)).collect();
        let f = move |x: &[f64]| x[0].sin() + a * x[1].sin().powi(2) + b * x[2].powi(4) * x[0].sin();
        let r = run(f, &ranges, SobolSettings::new(1 << 16, true, 3)).unwrap();
        for i in 0..3 {
            assert!((r.first_order[i] - expected_s1[i]).abs() < 0.02, "S1 {:?}", r.first_order);
            assert!((r.total_order[i] - expected_st[i]).abs() < 0.02, "ST {:?}", r.total_order);
        }
        let s2 = r.second_order.unwrap();
        assert!((s2[0][2] - v13 / v).abs() < 0.02, "S13 {}", s2[0][2]);
        assert!(s2[0][1].abs() < 0.02 && s2[1][2].abs() < 0.02);
    }

    #[test]
    fn identical_across_thread_counts() {
        let spec = SobolSpec::table1(Target::Earnings, SobolSettings::new(1 << 12, true, 42).with_bootstrap(10));
        let runs: Vec<SobolIndices> = [1, 3, 8]
            .iter()
            .map(|&t| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .unwrap()
                    .install(|| sobol_analyze(&spec).unwrap())
            })
            .collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[0], runs[2]);
    }

    #[test]
    fn total_order_dominates_first_order() {
        let spec = SobolSpec::table2(Target::Earnings, SobolSettings::new(1 << 12, false, 1));
        let r = sobol_analyze(&spec).unwrap();
        for i in 0..8 {
            assert!(r.total_order[i] >= r.first_order[i] - r.noise_bound[i], "{i}: {r:?}");
        }
    }

    #[test]
    fn bootstrap_brackets_estimate() {
        let r = run(|x| x[0] + 2.0 * x[1] * x[0], &unit(2), SobolSettings::new(1 << 10, true, 5).with_bootstrap(50)).unwrap();
        let ci = r.confidence_intervals.unwrap();
        assert_eq!(ci.resamples, 50);
        for i in 0..2 {
            let (lo, hi) = ci.first_order[i];
            assert!(lo <= hi);
            assert!(lo - 0.05 <= r.first_order[i] && r.first_order[i] <= hi + 0.05);
        }
        assert!(ci.second_order.is_some());
    }

    #[test]
    fn progress_is_monotone_and_complete() {
        let seen = Mutex::new(Vec::new());
        let settings = SobolSettings::new(4096, true, 1);
        sobol_analyze_with(|x| x[0], &unit(3), &settings, &|d, t| seen.lock().unwrap().push((d, t))).unwrap();
        let seen = seen.into_inner().unwrap();
        assert!(seen.windows(2).all(|w| w[0].0 < w[1].0));
        assert_eq!(seen.last().unwrap(), &(4096 * 8, 4096 * 8));
    }

    #[test]
    fn constant_model_is_degenerate() {
        let err = run(|_| 3.25, &unit(2), SobolSettings::new(64, false, 1)).unwrap_err();
        assert!(matches!(err, Error::DegenerateModel(_)));
    }

    #[test]
    fn non_finite_output_reports_the_row() {
        let err = run(|x| if x[0] > 0.5 { f64::NAN } else { x[0] }, &unit(2), SobolSettings::new(64, false, 1)).unwrap_err();
        match err {
            Error::NonFiniteOutput { row, .. } => assert!(row[0] > 0.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        let settings = SobolSettings::new(64, false, 1);
        let mut spec = SobolSpec::table2(Target::Earnings, settings);
        assert!(spec.validate().is_ok());
        spec.ranges[6].max = 0.9;
        assert_eq!(spec.validate().unwrap_err().field(), Some("ranges.P_TP.max"));

        let mut spec = SobolSpec::table1(Target::Roi, settings);
        spec.ranges[2].min = 0.0;
        assert_eq!(spec.validate().unwrap_err().field(), Some("ranges.C.min"));

        let mut spec = SobolSpec::table1(Target::Earnings, settings);
        spec.ranges.swap(0, 1);
        assert!(spec.validate().is_err());

        let spec = SobolSpec::table1(Target::Earnings, SobolSettings::new(4, false, 1));
        assert_eq!(sobol_analyze(&spec).unwrap_err().field(), Some("base_samples"));
    }

    #[test]
    fn spread_shrinks_with_budget() {
        let f = |x: &[f64]| x[0] + 2.0 * x[1] * x[1] + x[0] * x[2];
        let spread = |n: usize| {
            let s: Vec<f64> = (0..5)
                .map(|seed| run(f, &unit(3), SobolSettings::new(n, false, seed)).unwrap().first_order[0])
                .collect();
            let m = s.iter().sum::<f64>() / 5.0;
            s.iter().map(|x| (x - m).powi(2)).sum::<f64>()
        };
        let (a, b, c) = (spread(1 << 8), spread(1 << 10), spread(1 << 12));
        assert!(a > b && b > c, "{a} {b} {c}");
    }
}
