//! Parameter vectors and the raw model functions the sensitivity tools
//! differentiate and sample.
//!
//! Variables are ordered `(G, L, C, P, T)` for the success/failure model and
//! `(G, L_FP, L_FN, C, P_FP, P_FN, P_TP, T)` for the binary model. `C` is the
//! price variable; the transaction cost is `s·C·T` where `s` comes from
//! [`CostUnits`].

use serde::{Deserialize, Serialize};

use crate::econ::BinaryVariant;
use crate::error::{Error, Result};

pub const SINGLE_VARIABLES: [&str; 5] = ["G", "L", "C", "P", "T"];
pub const BINARY_VARIABLES: [&str; 8] = ["G", "L_FP", "L_FN", "C", "P_FP", "P_FN", "P_TP", "T"];

mod single_idx {
    pub const G: usize = 0;
    pub const L: usize = 1;
    pub const C: usize = 2;
    pub const P: usize = 3;
    pub const T: usize = 4;
}

mod binary_idx {
    pub const G: usize = 0;
    pub const L_FP: usize = 1;
    pub const L_FN: usize = 2;
    pub const C: usize = 3;
    pub const P_FP: usize = 4;
    pub const P_FN: usize = 5;
    pub const P_TP: usize = 6;
    pub const T: usize = 7;
}

/// How the price variable `C` relates to the transaction cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CostUnits {
    /// `C` is quoted per million tokens: cost = `C·T / 1e6`.
    #[default]
    PerMillion,
    /// `C` is the raw price of one token: cost = `C·T`.
    PerToken,
}

impl CostUnits {
    pub fn scale(self) -> f64 {
        match self {
            CostUnits::PerMillion => 1e-6,
            CostUnits::PerToken => 1.0,
        }
    }
}

impl std::str::FromStr for CostUnits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-million" | "per_million" | "per_million_tokens" => Ok(CostUnits::PerMillion),
            "per-token" | "per_token" => Ok(CostUnits::PerToken),
            other => Err(Error::validation(
                "cost_units",
                format!("expected per-million or per-token, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Earnings,
    Roi,
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "earnings" => Ok(Target::Earnings),
            "roi" => Ok(Target::Roi),
            other => Err(Error::validation("target", format!("expected earnings or roi, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Single,
    BinaryCanonical,
    BinaryPaperCompat,
}

impl ModelKind {
    pub fn binary(variant: BinaryVariant) -> Self {
        match variant {
            BinaryVariant::Canonical => ModelKind::BinaryCanonical,
            BinaryVariant::PaperCompat => ModelKind::BinaryPaperCompat,
        }
    }

    pub fn variables(self) -> &'static [&'static str] {
        match self {
            ModelKind::Single => &SINGLE_VARIABLES,
            _ => &BINARY_VARIABLES,
        }
    }

    fn cost_indices(self) -> (usize, usize) {
        match self {
            ModelKind::Single => (single_idx::C, single_idx::T),
            _ => (binary_idx::C, binary_idx::T),
        }
    }
}

/// Named, ordered model inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    names: Vec<String>,
    values: Vec<f64>,
}

impl ParameterVector {
    pub fn new(names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if names.len() != values.len() {
            return Err(Error::validation(
                "values",
                format!("{} names but {} values", names.len(), values.len()),
            ));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::validation(name.as_str(), "duplicate variable name"));
            }
        }
        Ok(Self { names, values })
    }

    /// Point in the `(G, L, C, P, T)` model.
    pub fn single(gain: f64, loss: f64, price: f64, p_success: f64, tokens: f64) -> Self {
        Self::for_model(ModelKind::Single, &[gain, loss, price, p_success, tokens])
            .expect("five values for five variables")
    }

    /// Point in the `(G, L_FP, L_FN, C, P_FP, P_FN, P_TP, T)` model.
    #[allow(clippy::too_many_arguments)]
    pub fn binary(gain: f64, loss_fp: f64, loss_fn: f64, price: f64, p_fp: f64, p_fn: f64, p_tp: f64, tokens: f64) -> Self {
        Self::for_model(ModelKind::BinaryCanonical, &[gain, loss_fp, loss_fn, price, p_fp, p_fn, p_tp, tokens])
            .expect("eight values for eight variables")
    }

    pub fn for_model(model: ModelKind, values: &[f64]) -> Result<Self> {
        Self::new(model.variables().iter().map(|s| s.to_string()).collect(), values.to_vec())
    }

    /// Point taken from a name-to-value map, which must hold exactly the
    /// model's variables.
    pub fn from_map(model: ModelKind, values: &std::collections::BTreeMap<String, f64>) -> Result<Self> {
        if let Some(extra) = values.keys().find(|k| !model.variables().contains(&k.as_str())) {
            return Err(Error::validation(format!("point.{extra}"), "not a variable of this model"));
        }
        let ordered = model
            .variables()
            .iter()
            .map(|name| {
                values
                    .get(*name)
                    .copied()
                    .ok_or_else(|| Error::validation(format!("point.{name}"), "missing value"))
            })
            .collect::<Result<Vec<f64>>>()?;
        Self::for_model(model, &ordered)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub(crate) fn expect_layout(&self, model: ModelKind) -> Result<()> {
        let expected = model.variables();
        if self.names.len() != expected.len() || self.names.iter().zip(expected).any(|(a, b)| a != b) {
            return Err(Error::validation(
                "point",
                format!("expected variables {expected:?}, got {:?}", self.names),
            ));
        }
        Ok(())
    }
}

/// One of the closed-form models with its target and cost scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EconModel {
    pub kind: ModelKind,
    pub target: Target,
    pub cost_units: CostUnits,
}

pub type Matrix = Vec<Vec<f64>>;

/// Pieces shared by every model: the business value `K` (gains net of
/// losses, before any cost) with its derivatives, and the cost `D = s·C·T`.
struct Parts {
    k: f64,
    k_grad: Vec<f64>,
    k_hess: Matrix,
    c: f64,
    t: f64,
    d: f64,
    /// Indices of the probabilities weighted by `2D` in the substituted form.
    doubled: &'static [usize],
}

impl EconModel {
    pub fn new(kind: ModelKind, target: Target, cost_units: CostUnits) -> Self {
        Self { kind, target, cost_units }
    }

    pub fn variables(&self) -> &'static [&'static str] {
        self.kind.variables()
    }

    pub fn dims(&self) -> usize {
        self.variables().len()
    }

    fn scale(&self) -> f64 {
        self.cost_units.scale()
    }

    /// Model output at raw coordinates. RoI at zero cost is ±inf or NaN.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let s = self.scale();
        match self.kind {
            ModelKind::Single => {
                use single_idx::*;
                let k = x[G] * x[P] - x[L] * (1.0 - x[P]);
                let d = s * x[C] * x[T];
                match self.target {
                    Target::Earnings => k - d,
                    Target::Roi => k / d - 1.0,
                }
            }
            ModelKind::BinaryCanonical | ModelKind::BinaryPaperCompat => {
                use binary_idx::*;
                let k = x[G] * x[P_TP] - x[L_FN] * x[P_FN] - x[L_FP] * x[P_FP];
                let d = s * x[C] * x[T];
                if self.kind == ModelKind::BinaryCanonical {
                    match self.target {
                        Target::Earnings => k - d,
                        Target::Roi => k / d - 1.0,
                    }
                } else {
                    let e = (x[G] - 2.0 * d) * x[P_TP]
                        - (x[L_FN] + 2.0 * d) * x[P_FN]
                        - (x[L_FP] + 2.0 * d) * x[P_FP]
                        - d;
                    match self.target {
                        Target::Earnings => e,
                        Target::Roi => e / d,
                    }
                }
            }
        }
    }

    fn parts(&self, x: &[f64]) -> Parts {
        let n = self.dims();
        let mut k_grad = vec![0.0; n];
        let mut k_hess = vec![vec![0.0; n]; n];
        let bilinear = |h: &mut Matrix, i: usize, j: usize, v: f64| {
            h[i][j] = v;
            h[j][i] = v;
        };
        match self.kind {
            ModelKind::Single => {
                use single_idx::*;
                k_grad[G] = x[P];
                k_grad[L] = x[P] - 1.0;
                k_grad[P] = x[G] + x[L];
                bilinear(&mut k_hess, G, P, 1.0);
                bilinear(&mut k_hess, L, P, 1.0);
                Parts {
                    k: x[G] * x[P] - x[L] * (1.0 - x[P]),
                    k_grad,
                    k_hess,
                    c: x[C],
                    t: x[T],
                    d: self.scale() * x[C] * x[T],
                    doubled: &[],
                }
            }
            _ => {
                use binary_idx::*;
                k_grad[G] = x[P_TP];
                k_grad[L_FP] = -x[P_FP];
                k_grad[L_FN] = -x[P_FN];
                k_grad[P_FP] = -x[L_FP];
                k_grad[P_FN] = -x[L_FN];
                k_grad[P_TP] = x[G];
                bilinear(&mut k_hess, G, P_TP, 1.0);
                bilinear(&mut k_hess, L_FP, P_FP, -1.0);
                bilinear(&mut k_hess, L_FN, P_FN, -1.0);
                Parts {
                    k: x[G] * x[P_TP] - x[L_FN] * x[P_FN] - x[L_FP] * x[P_FP],
                    k_grad,
                    k_hess,
                    c: x[C],
                    t: x[T],
                    d: self.scale() * x[C] * x[T],
                    doubled: if self.kind == ModelKind::BinaryPaperCompat {
                        &[P_FP, P_FN, P_TP]
                    } else {
                        &[]
                    },
                }
            }
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dims() {
            return Err(Error::validation(
                "point",
                format!("expected {} coordinates, got {}", self.dims(), x.len()),
            ));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(self.variables()[i], "must be finite"));
        }
        if self.kind != ModelKind::Single {
            let sum = x[binary_idx::P_TP] + x[binary_idx::P_FP] + x[binary_idx::P_FN];
            if sum > 1.0 + 1e-12 {
                return Err(Error::validation(
                    "P_TP",
                    format!("P_TP + P_FP + P_FN = {sum} exceeds 1"),
                ));
            }
        }
        if self.target == Target::Roi {
            let (ci, ti) = self.kind.cost_indices();
            if x[ci] * x[ti] == 0.0 {
                return Err(Error::Singular("RoI is undefined where C·T = 0".into()));
            }
        }
        Ok(())
    }

    /// Closed-form gradient in variable order.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let s = self.scale();
        let (ci, ti) = self.kind.cost_indices();
        let p = self.parts(x);
        let mut g = p.k_grad.clone();
        match self.target {
            Target::Earnings => {
                // E = K − D·Q with Q = 1 + 2·(sum of doubled probabilities).
                let q = 1.0 + 2.0 * p.doubled.iter().map(|&i| x[i]).sum::<f64>();
                for &i in p.doubled {
                    g[i] -= 2.0 * p.d;
                }
                g[ci] = -s * p.t * q;
                g[ti] = -s * p.c * q;
            }
            Target::Roi => {
                // R = K/D − Q.
                for v in g.iter_mut() {
                    *v /= p.d;
                }
                for &i in p.doubled {
                    g[i] -= 2.0;
                }
                g[ci] = -p.k / (p.d * p.c);
                g[ti] = -p.k / (p.d * p.t);
            }
        }
        Ok(g)
    }

    /// Closed-form Hessian in variable order.
    pub fn hessian(&self, x: &[f64]) -> Result<Matrix> {
        self.check_point(x)?;
        let s = self.scale();
        let (ci, ti) = self.kind.cost_indices();
        let p = self.parts(x);
        let mut h = p.k_hess.clone();
        let set = |h: &mut Matrix, i: usize, j: usize, v: f64| {
            h[i][j] = v;
            h[j][i] = v;
        };
        match self.target {
            Target::Earnings => {
                let q = 1.0 + 2.0 * p.doubled.iter().map(|&i| x[i]).sum::<f64>();
                set(&mut h, ci, ti, -s * q);
                for &i in p.doubled {
                    set(&mut h, ci, i, -2.0 * s * p.t);
                    set(&mut h, ti, i, -2.0 * s * p.c);
                }
            }
            Target::Roi => {
                for row in h.iter_mut() {
                    for v in row.iter_mut() {
                        *v /= p.d;
                    }
                }
                for (a, &ka) in p.k_grad.iter().enumerate() {
                    if a == ci || a == ti {
                        continue;
                    }
                    set(&mut h, a, ci, -ka / (p.d * p.c));
                    set(&mut h, a, ti, -ka / (p.d * p.t));
                }
                set(&mut h, ci, ci, 2.0 * p.k / (p.d * p.c * p.c));
                set(&mut h, ti, ti, 2.0 * p.k / (p.d * p.t * p.t));
                set(&mut h, ci, ti, p.k / (p.d * p.c * p.t));
            }
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_vector_rejects_duplicates() {
        let err = ParameterVector::new(vec!["G".into(), "G".into()], vec![1.0, 2.0]).unwrap_err();
        assert_eq!(err.field(), Some("G"));
        assert!(ParameterVector::new(vec!["G".into()], vec![]).is_err());
        let p = ParameterVector::single(10.0, 1.0, 1e-5, 0.95, 1000.0);
        assert_eq!(p.get("P"), Some(0.95));
        assert_eq!(p.get("Q"), None);
        assert!(p.expect_layout(ModelKind::Single).is_ok());
        assert!(p.expect_layout(ModelKind::BinaryCanonical).is_err());
    }

    #[test]
    fn evaluate_agrees_with_econ_models() {
        use crate::econ::*;
        let pricing = LlmPricing::new("m", 10.0, 0.0).unwrap();
        let profile = TransactionProfile::new(1000, 0).unwrap();
        let s = SingleOutcomeScenario::new(10.0, 1.0, 0.95, pricing.clone(), profile).unwrap();
        let x = [10.0, 1.0, 10.0, 0.95, 1000.0];
        let e = EconModel::new(ModelKind::Single, Target::Earnings, CostUnits::PerMillion);
        let r = EconModel::new(ModelKind::Single, Target::Roi, CostUnits::PerMillion);
        assert!((e.evaluate(&x) - evaluate_single(&s).earnings).abs() < 1e-12);
        assert!((r.evaluate(&x) - evaluate_single(&s).roi.unwrap()).abs() < 1e-9);

        let b = BinaryOutcomeScenario::new(10.0, 1.0, 2.0, 0.2, 0.05, 0.05, pricing, profile).unwrap();
        let xb = [10.0, 1.0, 2.0, 10.0, 0.05, 0.05, 0.2, 1000.0];
        for variant in [BinaryVariant::Canonical, BinaryVariant::PaperCompat] {
            let direct = evaluate_binary(&b, variant);
            let m = EconModel::new(ModelKind::binary(variant), Target::Earnings, CostUnits::PerMillion);
            assert!((m.evaluate(&xb) - direct.earnings).abs() < 1e-12);
            let m = EconModel::new(ModelKind::binary(variant), Target::Roi, CostUnits::PerMillion);
            assert!((m.evaluate(&xb) - direct.roi.unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn roi_singularity() {
        let m = EconModel::new(ModelKind::Single, Target::Roi, CostUnits::PerToken);
        assert!(matches!(m.gradient(&[1.0, 1.0, 0.0, 0.5, 10.0]), Err(Error::Singular(_))));
        let m = EconModel::new(ModelKind::Single, Target::Earnings, CostUnits::PerToken);
        assert!(m.gradient(&[1.0, 1.0, 0.0, 0.5, 10.0]).is_ok());
    }
}
