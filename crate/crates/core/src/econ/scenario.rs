//! Per-transaction expected earnings and RoI for the success/failure model
//! and the confusion-matrix (binary classification) model.

use serde::{Deserialize, Serialize};

use super::pricing::{transaction_cost, LlmPricing, TransactionProfile};
use crate::error::{check_nonneg, check_probability, Error, Result};

/// Slack allowed when checking that the three stored confusion-matrix
/// probabilities leave a nonnegative true-negative mass.
const PROBABILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleOutcomeScenario {
    gain: f64,
    loss: f64,
    p_success: f64,
    pricing: LlmPricing,
    transaction: TransactionProfile,
    extra_cost_per_transaction: f64,
}

impl SingleOutcomeScenario {
    pub fn new(
        gain: f64,
        loss: f64,
        p_success: f64,
        pricing: LlmPricing,
        transaction: TransactionProfile,
    ) -> Result<Self> {
        Ok(Self {
            gain: check_nonneg("gain", gain)?,
            loss: check_nonneg("loss", loss)?,
            p_success: check_probability("p_success", p_success)?,
            pricing,
            transaction,
            extra_cost_per_transaction: 0.0,
        })
    }

    pub fn with_extra_cost(mut self, extra: f64) -> Result<Self> {
        self.extra_cost_per_transaction = check_nonneg("extra_cost_per_transaction", extra)?;
        Ok(self)
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }
    pub fn loss(&self) -> f64 {
        self.loss
    }
    pub fn p_success(&self) -> f64 {
        self.p_success
    }
    pub fn pricing(&self) -> &LlmPricing {
        &self.pricing
    }
    pub fn transaction(&self) -> &TransactionProfile {
        &self.transaction
    }
    pub fn extra_cost_per_transaction(&self) -> f64 {
        self.extra_cost_per_transaction
    }

    pub fn with_p_success(&self, p: f64) -> Result<Self> {
        Self::new(self.gain, self.loss, p, self.pricing.clone(), self.transaction)?
            .with_extra_cost(self.extra_cost_per_transaction)
    }

    pub fn with_input_tokens(&self, tokens: u64) -> Result<Self> {
        let profile = TransactionProfile::new(tokens, self.transaction.output_tokens())?;
        Self::new(self.gain, self.loss, self.p_success, self.pricing.clone(), profile)?
            .with_extra_cost(self.extra_cost_per_transaction)
    }

    pub fn with_input_price(&self, input_per_million: f64) -> Result<Self> {
        let pricing = self.pricing.with_input_price(input_per_million)?;
        Self::new(self.gain, self.loss, self.p_success, pricing, self.transaction)?
            .with_extra_cost(self.extra_cost_per_transaction)
    }

    pub fn transaction_cost(&self) -> f64 {
        transaction_cost(&self.pricing, &self.transaction, self.extra_cost_per_transaction)
    }

    /// Real-valued view used by sweeps and solvers.
    pub(crate) fn point(&self) -> SinglePoint {
        SinglePoint {
            gain: self.gain,
            loss: self.loss,
            p_success: self.p_success,
            input_price: self.pricing.input_price_per_million(),
            output_price: self.pricing.output_price_per_million(),
            input_tokens: self.transaction.input_tokens() as f64,
            output_tokens: self.transaction.output_tokens() as f64,
            extra: self.extra_cost_per_transaction,
        }
    }
}

/// Unvalidated real-valued parameters of the success/failure model. Token
/// counts may be fractional (compressed prompts, sweep grid points).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SinglePoint {
    pub gain: f64,
    pub loss: f64,
    pub p_success: f64,
    pub input_price: f64,
    pub output_price: f64,
    pub input_tokens: f64,
    pub output_tokens: f64,
    pub extra: f64,
}

impl SinglePoint {
    pub fn llm_cost(&self) -> f64 {
        (self.input_tokens * self.input_price + self.output_tokens * self.output_price)
            / super::pricing::TOKENS_PER_MILLION
    }

    pub fn cost(&self) -> f64 {
        self.llm_cost() + self.extra
    }

    /// `G·P − L·(1 − P)`, the expected business value before cost.
    pub fn expected_value(&self) -> f64 {
        self.gain * self.p_success - self.loss * (1.0 - self.p_success)
    }

    pub fn earnings(&self) -> f64 {
        self.expected_value() - self.cost()
    }

    pub fn evaluate(&self) -> EvaluationResult {
        let cost = self.cost();
        let p = self.p_success;
        let earnings = self.earnings();
        EvaluationResult::new(
            earnings,
            cost,
            vec![
                OutcomeContribution::new("success", p, (self.gain - cost) * p),
                OutcomeContribution::new("failure", 1.0 - p, -(self.loss + cost) * (1.0 - p)),
            ],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BinaryVariant {
    /// Expected earnings with the true-negative probability eliminated
    /// correctly: `G·P_TP − L_FN·P_FN − L_FP·P_FP − C_t`.
    #[default]
    Canonical,
    /// The substituted expression
    /// `(G−2C_t)P_TP − (L_FN+2C_t)P_FN − (L_FP+2C_t)P_FP − C_t`, kept for
    /// reproducing published figures. It differs from the canonical form by
    /// `2·C_t·(P_TP + P_FN + P_FP)`.
    PaperCompat,
}

impl std::str::FromStr for BinaryVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(BinaryVariant::Canonical),
            "paper-compat" | "paper_compat" => Ok(BinaryVariant::PaperCompat),
            other => Err(Error::validation(
                "variant",
                format!("expected `canonical` or `paper-compat`, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryOutcomeScenario {
    gain: f64,
    loss_fp: f64,
    loss_fn: f64,
    p_tp: f64,
    p_fp: f64,
    p_fn: f64,
    pricing: LlmPricing,
    transaction: TransactionProfile,
}

impl BinaryOutcomeScenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        gain: f64,
        loss_fp: f64,
        loss_fn: f64,
        p_tp: f64,
        p_fp: f64,
        p_fn: f64,
        pricing: LlmPricing,
        transaction: TransactionProfile,
    ) -> Result<Self> {
        let p_tp = check_probability("p_tp", p_tp)?;
        let p_fp = check_probability("p_fp", p_fp)?;
        let p_fn = check_probability("p_fn", p_fn)?;
        let sum = p_tp + p_fp + p_fn;
        if sum > 1.0 + PROBABILITY_SLACK {
            return Err(Error::validation(
                "p_tp",
                format!("p_tp + p_fp + p_fn = {sum} exceeds 1, leaving no true-negative mass"),
            ));
        }
        Ok(Self {
            gain: check_nonneg("gain", gain)?,
            loss_fp: check_nonneg("loss_fp", loss_fp)?,
            loss_fn: check_nonneg("loss_fn", loss_fn)?,
            p_tp,
            p_fp,
            p_fn,
            pricing,
            transaction,
        })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }
    pub fn loss_fp(&self) -> f64 {
        self.loss_fp
    }
    pub fn loss_fn(&self) -> f64 {
        self.loss_fn
    }
    pub fn p_tp(&self) -> f64 {
        self.p_tp
    }
    pub fn p_fp(&self) -> f64 {
        self.p_fp
    }
    pub fn p_fn(&self) -> f64 {
        self.p_fn
    }
    pub fn pricing(&self) -> &LlmPricing {
        &self.pricing
    }
    pub fn transaction(&self) -> &TransactionProfile {
        &self.transaction
    }

    /// Always derived from the other three outcomes.
    pub fn p_tn(&self) -> f64 {
        (1.0 - (self.p_tp + self.p_fp + self.p_fn)).max(0.0)
    }

    pub fn transaction_cost(&self) -> f64 {
        transaction_cost(&self.pricing, &self.transaction, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeContribution {
    pub outcome: String,
    pub probability: f64,
    pub contribution: f64,
}

impl OutcomeContribution {
    fn new(outcome: &str, probability: f64, contribution: f64) -> Self {
        Self {
            outcome: outcome.to_string(),
            probability,
            contribution,
        }
    }
}

/// Expected earnings and RoI of one transaction.
///
/// `roi` is `None` (and `roi_undefined` set) when the transaction is free.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub earnings: f64,
    pub roi: Option<f64>,
    pub roi_undefined: bool,
    pub transaction_cost: f64,
    pub outcomes: Vec<OutcomeContribution>,
}

impl EvaluationResult {
    fn new(earnings: f64, transaction_cost: f64, outcomes: Vec<OutcomeContribution>) -> Self {
        // RoI is earnings over cost; equal to (expected value)/C_t − 1.
        let roi = (transaction_cost > 0.0).then(|| earnings / transaction_cost);
        Self {
            earnings,
            roi,
            roi_undefined: roi.is_none(),
            transaction_cost,
            outcomes,
        }
    }
}

/// Expected earnings `G·P − L·(1−P) − C_t` and RoI `E / C_t`.
pub fn evaluate_single(s: &SingleOutcomeScenario) -> EvaluationResult {
    s.point().evaluate()
}

pub fn evaluate_binary(s: &BinaryOutcomeScenario, variant: BinaryVariant) -> EvaluationResult {
    let cost = s.transaction_cost();
    let p_tn = s.p_tn();
    match variant {
        BinaryVariant::Canonical => {
            let tp = (s.gain - cost) * s.p_tp;
            let tn = -cost * p_tn;
            let fn_ = -(s.loss_fn + cost) * s.p_fn;
            let fp = -(s.loss_fp + cost) * s.p_fp;
            EvaluationResult::new(
                tp + tn + fn_ + fp,
                cost,
                vec![
                    OutcomeContribution::new("true_positive", s.p_tp, tp),
                    OutcomeContribution::new("true_negative", p_tn, tn),
                    OutcomeContribution::new("false_negative", s.p_fn, fn_),
                    OutcomeContribution::new("false_positive", s.p_fp, fp),
                ],
            )
        }
        BinaryVariant::PaperCompat => {
            let tp = (s.gain - 2.0 * cost) * s.p_tp;
            let fn_ = -(s.loss_fn + 2.0 * cost) * s.p_fn;
            let fp = -(s.loss_fp + 2.0 * cost) * s.p_fp;
            let base = -cost;
            EvaluationResult::new(
                tp + fn_ + fp + base,
                cost,
                vec![
                    OutcomeContribution::new("true_positive", s.p_tp, tp),
                    OutcomeContribution::new("true_negative", p_tn, base),
                    OutcomeContribution::new("false_negative", s.p_fn, fn_),
                    OutcomeContribution::new("false_positive", s.p_fp, fp),
                ],
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ::utility::{expected_utility, OutcomeLottery};
    use proptest::prelude::*;

    fn scenario(p: f64, price: f64, tokens: u64) -> SingleOutcomeScenario {
        SingleOutcomeScenario::new(
            10.0,
            1.0,
            p,
            LlmPricing::new("m", price, 3.0 * price).unwrap(),
            TransactionProfile::new(tokens, 0).unwrap(),
        )
        .unwrap()
    }

    fn binary(g: f64, lfn: f64, lfp: f64, tp: f64, fn_: f64, fp: f64, cost: f64) -> BinaryOutcomeScenario {
        // 1000 input tokens at `cost * 1000` per million gives C_t = cost.
        BinaryOutcomeScenario::new(
            g,
            lfp,
            lfn,
            tp,
            fp,
            fn_,
            LlmPricing::new("m", cost * 1000.0, 0.0).unwrap(),
            TransactionProfile::new(1000, 0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn worked_example() {
        let r1 = evaluate_single(&scenario(0.95, 10.0, 1000));
        assert!((r1.earnings - 9.44).abs() < 1e-9);
        assert!((r1.roi.unwrap() - 944.0).abs() < 1e-9);
        let r2 = evaluate_single(&scenario(0.80, 0.5, 1000));
        assert!((r2.earnings - 7.7995).abs() < 1e-9);
        assert!((r2.roi.unwrap() - 15_599.0).abs() < 1e-9);
    }

    #[test]
    fn free_model_certain_success() {
        let s = scenario(1.0, 0.0, 1000);
        let r = evaluate_single(&s);
        assert_eq!(r.earnings, 10.0);
        assert!(r.roi_undefined && r.roi.is_none());
    }

    #[test]
    fn contributions_sum_to_earnings() {
        let r = evaluate_single(&scenario(0.8, 0.5, 1000));
        let total: f64 = r.outcomes.iter().map(|o| o.contribution).sum();
        let prob: f64 = r.outcomes.iter().map(|o| o.probability).sum();
        assert!((total - r.earnings).abs() < 1e-12);
        assert!((prob - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binary_examples() {
        let s = binary(10.0, 2.0, 1.0, 0.2, 0.05, 0.05, 0.005);
        let c = evaluate_binary(&s, BinaryVariant::Canonical);
        assert!((c.earnings - 1.845).abs() < 1e-12, "{}", c.earnings);
        assert!((c.roi.unwrap() - 369.0).abs() < 1e-9);
        let p = evaluate_binary(&s, BinaryVariant::PaperCompat);
        assert!((p.earnings - 1.842).abs() < 1e-12, "{}", p.earnings);
        assert!((c.earnings - p.earnings - 0.003).abs() < 1e-12);

        let all_tn = binary(10.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.005);
        for v in [BinaryVariant::Canonical, BinaryVariant::PaperCompat] {
            assert!((evaluate_binary(&all_tn, v).earnings + 0.005).abs() < 1e-15);
        }
    }

    #[test]
    fn binary_rejects_excess_probability() {
        let err = BinaryOutcomeScenario::new(
            1.0,
            1.0,
            1.0,
            0.5,
            0.3,
            0.3,
            LlmPricing::new("m", 1.0, 1.0).unwrap(),
            TransactionProfile::new(1, 0).unwrap(),
        )
        .unwrap_err();
        assert_eq!(err.field(), Some("p_tp"));
    }

    #[test]
    fn variant_parses() {
        assert_eq!("paper-compat".parse::<BinaryVariant>().unwrap(), BinaryVariant::PaperCompat);
        assert!("other".parse::<BinaryVariant>().is_err());
    }

    proptest! {
        #[test]
        fn single_matches_expected_utility(
            g in 0.0..1000.0f64, l in 0.0..1000.0f64, p in 0.0..=1.0f64,
            price in 0.0..100.0f64, tokens in 1u64..200_000,
        ) {
            let s = SingleOutcomeScenario::new(g, l, p,
                LlmPricing::new("m", price, 0.0).unwrap(),
                TransactionProfile::new(tokens, 0).unwrap()).unwrap();
            let c = s.transaction_cost();
            let lottery = OutcomeLottery::from_pairs(&[(p, g - c), (1.0 - p, -l - c)]).unwrap();
            let eu = expected_utility(&lottery);
            let e = evaluate_single(&s).earnings;
            prop_assert!((eu - e).abs() <= 1e-12 * eu.abs().max(g + l + c).max(1.0));
        }
    }
}
