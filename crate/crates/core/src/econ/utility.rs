//! Expected utility of a discrete lottery and the composite business-success
//! probability.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_probability, Error, Result};

const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub probability: f64,
    pub utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeLottery {
    outcomes: Vec<Outcome>,
}

impl OutcomeLottery {
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::validation("outcomes", "a lottery needs at least one outcome"));
        }
        for (i, o) in outcomes.iter().enumerate() {
            check_probability("probability", o.probability).map_err(|e| e.at(&format!("outcomes[{i}]")))?;
            check_finite("utility", o.utility).map_err(|e| e.at(&format!("outcomes[{i}]")))?;
        }
        let sum: f64 = outcomes.iter().map(|o| o.probability).sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::validation(
                "outcomes",
                format!("probabilities sum to {sum}, expected 1"),
            ));
        }
        Ok(Self { outcomes })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(probability, utility)| Outcome { probability, utility })
                .collect(),
        )
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }
}

/// `Σ p_i · u_i`.
pub fn expected_utility(lottery: &OutcomeLottery) -> f64 {
    lottery.outcomes.iter().map(|o| o.probability * o.utility).sum()
}

/// Task-level success and the conditional business-success probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessDecomposition {
    p_task: f64,
    p_business_given_task: f64,
    p_business_given_task_failure: f64,
}

impl SuccessDecomposition {
    pub fn new(p_task: f64, p_business_given_task: f64, p_business_given_task_failure: f64) -> Result<Self> {
        Ok(Self {
            p_task: check_probability("p_task", p_task)?,
            p_business_given_task: check_probability("p_business_given_task", p_business_given_task)?,
            p_business_given_task_failure: check_probability(
                "p_business_given_task_failure",
                p_business_given_task_failure,
            )?,
        })
    }
}

/// Business-success probability by total probability over task success.
pub fn composite_success_probability(d: &SuccessDecomposition) -> f64 {
    let p = d.p_business_given_task * d.p_task + d.p_business_given_task_failure * (1.0 - d.p_task);
    p.clamp(0.0, 1.0)
}
