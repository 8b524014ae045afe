//! Prompt compression: token savings against a drop in success probability.

use serde::{Deserialize, Serialize};

use super::scenario::{EvaluationResult, SingleOutcomeScenario};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionTradeoff {
    /// Input-token cost removed per transaction.
    pub cost_saved: f64,
    /// Compressed minus uncompressed expected earnings.
    pub earnings_delta: f64,
    pub compressed: EvaluationResult,
}

/// Compress the input side of the transaction by `factor` while the success
/// probability drops by `success_delta`.
pub fn compression_tradeoff(s: &SingleOutcomeScenario, factor: f64, success_delta: f64) -> Result<CompressionTradeoff> {
    if !(factor.is_finite() && factor > 1.0) {
        return Err(Error::validation("compression_factor", format!("must be > 1, got {factor}")));
    }
    if !(success_delta.is_finite() && success_delta >= 0.0) {
        return Err(Error::validation("success_delta", format!("must be >= 0, got {success_delta}")));
    }
    if success_delta > s.p_success() {
        return Err(Error::validation(
            "success_delta",
            format!("drop {success_delta} exceeds p_success {}", s.p_success()),
        ));
    }
    let before = s.point();
    let mut after = before;
    after.input_tokens = before.input_tokens / factor;
    after.p_success = before.p_success - success_delta;
    let before_input_cost = before.input_tokens * before.input_price / super::pricing::TOKENS_PER_MILLION;
    let compressed = after.evaluate();
    Ok(CompressionTradeoff {
        cost_saved: before_input_cost * (1.0 - 1.0 / factor),
        earnings_delta: compressed.earnings - before.earnings(),
        compressed,
    })
}
