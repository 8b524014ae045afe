//! Saltelli cross-matrix sampling design.
//!
//! Base row `j` draws one point of a `2D`-dimensional sequence; the first `D`
//! coordinates form row `j` of `A`, the last `D` row `j` of `B`. The design is
//! index-addressable, so any block of rows can be generated independently of
//! the others.

use serde::{Deserialize, Serialize};

use super::qmc::{ScrambledSobol, UniformPoints, MAX_DIMENSIONS};
use crate::error::{Error, Result};

/// Smallest base sample count accepted by [`SaltelliDesign::new`].
pub const MIN_BASE_SAMPLES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableRange {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

impl VariableRange {
    pub fn new(name: impl Into<String>, min: f64, max: f64) -> Self {
        Self {
            name: name.into(),
            min,
            max,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::validation(format!("ranges.{}", self.name), "bounds must be finite"));
        }
        if self.min >= self.max {
            return Err(Error::validation(
                format!("ranges.{}", self.name),
                format!("min {} must be below max {}", self.min, self.max),
            ));
        }
        Ok(())
    }

    fn scale(&self, u: f64) -> f64 {
        self.min + (self.max - self.min) * u
    }
}

pub(crate) fn validate_ranges(ranges: &[VariableRange]) -> Result<()> {
    if ranges.is_empty() {
        return Err(Error::validation("ranges", "at least one variable is required"));
    }
    if 2 * ranges.len() > MAX_DIMENSIONS {
        return Err(Error::validation(
            "ranges",
            format!("at most {} variables are supported", MAX_DIMENSIONS / 2),
        ));
    }
    for (i, r) in ranges.iter().enumerate() {
        if ranges[..i].iter().any(|o| o.name == r.name) {
            return Err(Error::validation(format!("ranges.{}", r.name), "duplicate variable"));
        }
        r.validate()?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    /// Scrambled Sobol' sequence.
    #[default]
    Sobol,
    /// Independent uniform draws from a seeded stream.
    Uniform,
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sobol" => Ok(SamplerKind::Sobol),
            "uniform" => Ok(SamplerKind::Uniform),
            other => Err(Error::validation("sampler", format!("expected sobol or uniform, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
enum Generator {
    Sobol(ScrambledSobol),
    Uniform(UniformPoints),
}

#[derive(Debug, Clone)]
pub struct SaltelliDesign {
    ranges: Vec<VariableRange>,
    base_samples: usize,
    second_order: bool,
    generator: Generator,
}

/// Which matrix a design row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    A,
    /// `A` with column `i` taken from `B`.
    AB(usize),
    /// `B` with column `i` taken from `A`.
    BA(usize),
    B,
}

impl SaltelliDesign {
    pub fn new(
        ranges: &[VariableRange],
        base_samples: usize,
        second_order: bool,
        seed: u64,
        sampler: SamplerKind,
    ) -> Result<Self> {
        validate_ranges(ranges)?;
        if base_samples < MIN_BASE_SAMPLES {
            return Err(Error::validation(
                "base_samples",
                format!("need at least {MIN_BASE_SAMPLES}, got {base_samples}"),
            ));
        }
        if base_samples > u32::MAX as usize {
            return Err(Error::validation("base_samples", "exceeds 2^32 - 1"));
        }
        let dims = 2 * ranges.len();
        let generator = match sampler {
            SamplerKind::Sobol => Generator::Sobol(ScrambledSobol::new(dims, seed)?),
            SamplerKind::Uniform => Generator::Uniform(UniformPoints::new(dims, seed)),
        };
        Ok(Self {
            ranges: ranges.to_vec(),
            base_samples,
            second_order,
            generator,
        })
    }

    pub fn dims(&self) -> usize {
        self.ranges.len()
    }

    pub fn ranges(&self) -> &[VariableRange] {
        &self.ranges
    }

    pub fn base_samples(&self) -> usize {
        self.base_samples
    }

    pub fn second_order(&self) -> bool {
        self.second_order
    }

    /// Rows generated per base sample: `D + 2`, or `2D + 2` with second order.
    pub fn block_len(&self) -> usize {
        if self.second_order {
            2 * self.dims() + 2
        } else {
            self.dims() + 2
        }
    }

    pub fn rows(&self) -> usize {
        self.base_samples * self.block_len()
    }

    /// Kind of row `k` inside a block, in block order
    /// `A, AB_1..AB_D, [BA_1..BA_D], B`.
    pub fn row_kind(&self, k: usize) -> RowKind {
        let d = self.dims();
        match k {
            0 => RowKind::A,
            k if k <= d => RowKind::AB(k - 1),
            k if self.second_order && k <= 2 * d => RowKind::BA(k - d - 1),
            _ => RowKind::B,
        }
    }

    /// Scaled `(A_j, B_j)` rows for base sample `j`.
    pub fn base_pair(&self, j: usize) -> (Vec<f64>, Vec<f64>) {
        let d = self.dims();
        let mut u = vec![0.0; 2 * d];
        self.unit_point(j, &mut u);
        let a = (0..d).map(|i| self.ranges[i].scale(u[i])).collect();
        let b = (0..d).map(|i| self.ranges[i].scale(u[d + i])).collect();
        (a, b)
    }

    fn unit_point(&self, j: usize, out: &mut [f64]) {
        let index = u32::try_from(j).expect("index bounded by base_samples");
        match &self.generator {
            Generator::Sobol(g) => g.point_into(index, out),
            Generator::Uniform(g) => g.point_into(index, out),
        }
    }

    /// Write the `block_len() × D` rows of block `j` into `out`, row-major.
    pub fn fill_block(&self, j: usize, out: &mut [f64]) {
        let d = self.dims();
        let (a, b) = self.base_pair(j);
        for k in 0..self.block_len() {
            let row = &mut out[k * d..(k + 1) * d];
            match self.row_kind(k) {
                RowKind::A => row.copy_from_slice(&a),
                RowKind::B => row.copy_from_slice(&b),
                RowKind::AB(i) => {
                    row.copy_from_slice(&a);
                    row[i] = b[i];
                }
                RowKind::BA(i) => {
                    row.copy_from_slice(&b);
                    row[i] = a[i];
                }
            }
        }
    }

    /// All design matrices. Memory grows as `rows() × D`; prefer
    /// [`SaltelliDesign::fill_block`] for large budgets.
    pub fn materialize(&self) -> SaltelliSample {
        let d = self.dims();
        let n = self.base_samples;
        let mut sample = SaltelliSample {
            a: Vec::with_capacity(n),
            b: Vec::with_capacity(n),
            ab: vec![Vec::with_capacity(n); d],
            ba: if self.second_order {
                Some(vec![Vec::with_capacity(n); d])
            } else {
                None
            },
        };
        let mut block = vec![0.0; self.block_len() * d];
        for j in 0..n {
            self.fill_block(j, &mut block);
            for (k, row) in block.chunks(d).enumerate() {
                match self.row_kind(k) {
                    RowKind::A => sample.a.push(row.to_vec()),
                    RowKind::B => sample.b.push(row.to_vec()),
                    RowKind::AB(i) => sample.ab[i].push(row.to_vec()),
                    RowKind::BA(i) => sample.ba.as_mut().expect("second order")[i].push(row.to_vec()),
                }
            }
        }
        sample
    }
}

/// Materialized design: `A`, `B` and the cross matrices, each `N × D`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaltelliSample {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub ab: Vec<Vec<Vec<f64>>>,
    pub ba: Option<Vec<Vec<Vec<f64>>>>,
}

impl SaltelliSample {
    pub fn rows(&self) -> usize {
        let per = |m: &Vec<Vec<Vec<f64>>>| m.iter().map(Vec::len).sum::<usize>();
        self.a.len() + self.b.len() + per(&self.ab) + self.ba.as_ref().map_or(0, per)
    }
}

pub fn saltelli_sample(ranges: &[VariableRange], base_samples: usize, second_order: bool, seed: u64) -> Result<SaltelliSample> {
    Ok(SaltelliDesign::new(ranges, base_samples, second_order, seed, SamplerKind::Sobol)?.materialize())
}
