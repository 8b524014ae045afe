//! Token pricing and transaction cost.
//!
//! Prices are held per million tokens, the way providers publish them. A
//! transaction's LLM cost is `(input_tokens * input_price + output_tokens *
//! output_price) / 1e6`; an optional per-transaction extra covers every other
//! variable cost of the operation.

use serde::{Deserialize, Serialize};

use crate::error::{check_nonneg, check_positive, Error, Result};

/// Tokens per pricing unit.
pub const TOKENS_PER_MILLION: f64 = 1_000_000.0;

/// Unit in which a price is quoted on input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PriceUnit {
    #[default]
    PerMillionTokens,
    PerToken,
}

impl PriceUnit {
    /// Multiplier that converts a price in this unit to a per-million price.
    pub fn to_per_million(self) -> f64 {
        match self {
            PriceUnit::PerMillionTokens => 1.0,
            PriceUnit::PerToken => TOKENS_PER_MILLION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmPricing {
    name: String,
    input_price_per_million: f64,
    output_price_per_million: f64,
}

impl LlmPricing {
    pub fn new(name: impl Into<String>, input_per_million: f64, output_per_million: f64) -> Result<Self> {
        Self::with_unit(name, PriceUnit::PerMillionTokens, input_per_million, output_per_million)
    }

    /// Build from prices quoted in `unit`; stored normalized to per-million.
    pub fn with_unit(name: impl Into<String>, unit: PriceUnit, input: f64, output: f64) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::validation("name", "pricing name must be nonempty"));
        }
        let input = check_nonneg("input", input)? * unit.to_per_million();
        let output = check_nonneg("output", output)? * unit.to_per_million();
        Ok(Self {
            name,
            input_price_per_million: input,
            output_price_per_million: output,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn input_price_per_million(&self) -> f64 {
        self.input_price_per_million
    }

    pub fn output_price_per_million(&self) -> f64 {
        self.output_price_per_million
    }

    /// Input price of a single token.
    pub fn input_price_per_token(&self) -> f64 {
        self.input_price_per_million / TOKENS_PER_MILLION
    }

    pub fn with_input_price(&self, input_per_million: f64) -> Result<Self> {
        Self::new(self.name.clone(), input_per_million, self.output_price_per_million)
    }

    /// LLM cost of a transaction with real-valued token counts.
    pub(crate) fn cost_of(&self, input_tokens: f64, output_tokens: f64) -> f64 {
        (input_tokens * self.input_price_per_million + output_tokens * self.output_price_per_million)
            / TOKENS_PER_MILLION
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransactionProfile {
    input_tokens: u64,
    output_tokens: u64,
}

impl TransactionProfile {
    pub fn new(input_tokens: u64, output_tokens: u64) -> Result<Self> {
        if input_tokens.saturating_add(output_tokens) == 0 {
            return Err(Error::validation(
                "input_tokens",
                "a transaction needs at least one token",
            ));
        }
        Ok(Self {
            input_tokens,
            output_tokens,
        })
    }

    pub fn input_tokens(&self) -> u64 {
        self.input_tokens
    }

    pub fn output_tokens(&self) -> u64 {
        self.output_tokens
    }

    pub fn total_tokens(&self) -> u64 {
        self.input_tokens + self.output_tokens
    }
}

/// Cost of one transaction: LLM tokens at list price plus `extra`.
pub fn transaction_cost(pricing: &LlmPricing, profile: &TransactionProfile, extra: f64) -> f64 {
    pricing.cost_of(profile.input_tokens as f64, profile.output_tokens as f64) + extra
}

/// Time-interval billing (e.g. a reserved instance) expressed per token.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalPricing {
    cost_per_interval: f64,
    transactions_per_interval: f64,
    mean_transaction_tokens: f64,
}

impl IntervalPricing {
    pub fn new(cost_per_interval: f64, transactions_per_interval: f64, mean_transaction_tokens: f64) -> Result<Self> {
        Ok(Self {
            cost_per_interval: check_nonneg("cost_per_interval", cost_per_interval)?,
            transactions_per_interval: check_positive("transactions_per_interval", transactions_per_interval)?,
            mean_transaction_tokens: check_positive("mean_transaction_tokens", mean_transaction_tokens)?,
        })
    }
}

/// Cost per token implied by interval billing: `C_i / (N_ti * T_mean)`.
pub fn cost_per_token(interval: &IntervalPricing) -> f64 {
    interval.cost_per_interval / (interval.transactions_per_interval * interval.mean_transaction_tokens)
}

/// Total project cost split into fixed and variable parts, the variable part
/// further split into LLM usage and everything else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct CostBreakdown {
    pub fixed: f64,
    pub llm_variable: f64,
    pub other_variable: f64,
}

impl CostBreakdown {
    pub fn new(fixed: f64, llm_variable: f64, other_variable: f64) -> Result<Self> {
        Ok(Self {
            fixed: check_nonneg("fixed_cost", fixed)?,
            llm_variable: check_nonneg("llm_variable_cost", llm_variable)?,
            other_variable: check_nonneg("other_variable_cost", other_variable)?,
        })
    }

    pub fn variable(&self) -> f64 {
        self.llm_variable + self.other_variable
    }

    pub fn total(&self) -> f64 {
        self.fixed + self.variable()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_k_input() -> TransactionProfile {
        TransactionProfile::new(1000, 0).unwrap()
    }

    #[test]
    fn transaction_cost_matches_list_prices() {
        let cases = [(10.0, 30.0, 0.01), (0.5, 1.5, 0.0005), (5.0, 15.0, 0.005)];
        for (input, output, expected) in cases {
            let pricing = LlmPricing::new("m", input, output).unwrap();
            let cost = transaction_cost(&pricing, &one_k_input(), 0.0);
            assert!((cost - expected).abs() < 1e-15, "{cost} vs {expected}");
        }
    }

    #[test]
    fn output_tokens_and_extra_are_charged() {
        let pricing = LlmPricing::new("m", 10.0, 30.0).unwrap();
        let profile = TransactionProfile::new(1000, 500).unwrap();
        let cost = transaction_cost(&pricing, &profile, 0.002);
        assert!((cost - (0.01 + 0.015 + 0.002)).abs() < 1e-15);
    }

    #[test]
    fn per_token_unit_is_normalized() {
        let a = LlmPricing::with_unit("m", PriceUnit::PerToken, 1e-5, 3e-5).unwrap();
        assert!((a.input_price_per_million() - 10.0).abs() < 1e-12);
        assert!((a.output_price_per_million() - 30.0).abs() < 1e-12);
    }

    #[test]
    fn pricing_rejects_bad_input() {
        assert!(LlmPricing::new("", 1.0, 1.0).is_err());
        let err = LlmPricing::new("m", -1.0, 1.0).unwrap_err();
        assert_eq!(err.field(), Some("input"));
        assert!(TransactionProfile::new(0, 0).is_err());
    }

    #[test]
    fn interval_cost_per_token() {
        let c = cost_per_token(&IntervalPricing::new(36.0, 1000.0, 1200.0).unwrap());
        assert!((c - 3.0e-5).abs() < 1e-18);
        assert_eq!(cost_per_token(&IntervalPricing::new(7.5, 1.0, 1.0).unwrap()), 7.5);
        assert_eq!(cost_per_token(&IntervalPricing::new(0.0, 10.0, 10.0).unwrap()), 0.0);
        assert!(IntervalPricing::new(1.0, 0.0, 10.0).is_err());
        assert!(IntervalPricing::new(1.0, 10.0, 0.0).is_err());
    }

    #[test]
    fn cost_breakdown_totals() {
        let c = CostBreakdown::new(100.0, 20.0, 5.0).unwrap();
        assert_eq!(c.variable(), 25.0);
        assert_eq!(c.total(), 125.0);
        assert!(CostBreakdown::new(-1.0, 0.0, 0.0).is_err());
    }
}
