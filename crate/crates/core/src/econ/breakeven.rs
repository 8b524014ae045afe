//! Closed-form break-even solves between two success/failure scenarios.

use serde::{Deserialize, Serialize};

use super::pricing::TOKENS_PER_MILLION;
use super::scenario::{SinglePoint, SingleOutcomeScenario};
use crate::error::{Error, Result};

/// Roots this close outside `[0, 1]` are rounding noise and get clamped.
const PROBABILITY_EDGE_SLACK: f64 = 1e-12;

/// The unknown to solve for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveFor {
    /// Candidate success probability; the reference is fixed.
    Probability,
    /// Input tokens per transaction shared by both scenarios: where their
    /// earnings-versus-size lines cross.
    Tokens,
    /// Candidate input tokens only; the reference is fixed.
    CandidateTokens,
    /// Candidate input price per million tokens; the reference is fixed.
    UnitPrice,
}

impl std::str::FromStr for SolveFor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "probability" => Ok(SolveFor::Probability),
            "tokens" => Ok(SolveFor::Tokens),
            "candidate-tokens" => Ok(SolveFor::CandidateTokens),
            "unit-price" => Ok(SolveFor::UnitPrice),
            other => Err(Error::validation(
                "solve_for",
                format!("expected probability, tokens, candidate-tokens or unit-price, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakevenSolution {
    pub solve_for: SolveFor,
    pub value: f64,
    /// Reference earnings at the solution.
    pub reference_earnings: f64,
    /// Candidate earnings at the solution.
    pub candidate_earnings: f64,
}

/// Value of the unknown at which the candidate's expected earnings equal the
/// reference's. The candidate's current value for the unknown is ignored.
pub fn breakeven(solve_for: SolveFor, reference: &SingleOutcomeScenario, candidate: &SingleOutcomeScenario) -> Result<f64> {
    breakeven_solution(solve_for, reference, candidate).map(|s| s.value)
}

pub fn breakeven_solution(
    solve_for: SolveFor,
    reference: &SingleOutcomeScenario,
    candidate: &SingleOutcomeScenario,
) -> Result<BreakevenSolution> {
    let mut r = reference.point();
    let mut c = candidate.point();
    let value = match solve_for {
        SolveFor::Probability => {
            let slope = c.gain + c.loss;
            if slope == 0.0 {
                return Err(Error::NoSolution(
                    "candidate gain + loss is zero, earnings do not depend on probability".into(),
                ));
            }
            let root = (r.earnings() + c.loss + c.cost()) / slope;
            let p = if (-PROBABILITY_EDGE_SLACK..=1.0 + PROBABILITY_EDGE_SLACK).contains(&root) {
                root.clamp(0.0, 1.0)
            } else {
                return Err(Error::OutOfDomain {
                    value: root,
                    domain: "[0, 1]".into(),
                });
            };
            c.p_success = p;
            p
        }
        SolveFor::Tokens => {
            let slope = r.input_price - c.input_price;
            if slope == 0.0 {
                return Err(Error::NoSolution(
                    "both scenarios have the same input price, earnings lines are parallel".into(),
                ));
            }
            let root = (fixed_part(&r) - fixed_part(&c)) * TOKENS_PER_MILLION / slope;
            let t = positive_root(root, "(0, inf) tokens")?;
            r.input_tokens = t;
            c.input_tokens = t;
            t
        }
        SolveFor::CandidateTokens => {
            if c.input_price == 0.0 {
                return Err(Error::NoSolution("candidate input price is zero".into()));
            }
            let root = (fixed_part(&c) - r.earnings()) * TOKENS_PER_MILLION / c.input_price;
            let t = positive_root(root, "(0, inf) tokens")?;
            c.input_tokens = t;
            t
        }
        SolveFor::UnitPrice => {
            if c.input_tokens == 0.0 {
                return Err(Error::NoSolution("candidate has no input tokens to price".into()));
            }
            let root = (fixed_part(&c) - r.earnings()) * TOKENS_PER_MILLION / c.input_tokens;
            let price = positive_root(root, "(0, inf) per million tokens")?;
            c.input_price = price;
            price
        }
    };
    Ok(BreakevenSolution {
        solve_for,
        value,
        reference_earnings: r.earnings(),
        candidate_earnings: c.earnings(),
    })
}

/// Earnings with the input-token cost removed: everything that does not
/// scale with input tokens or input price.
fn fixed_part(p: &SinglePoint) -> f64 {
    let output_cost = p.output_tokens * p.output_price / TOKENS_PER_MILLION;
    p.expected_value() - output_cost - p.extra
}

fn positive_root(root: f64, domain: &str) -> Result<f64> {
    if root > 0.0 && root.is_finite() {
        Ok(root)
    } else {
        Err(Error::OutOfDomain {
            value: root,
            domain: domain.into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ::pricing::{LlmPricing, TransactionProfile};

    fn scenario(p: f64, price: f64, tokens: u64) -> SingleOutcomeScenario {
        SingleOutcomeScenario::new(
            10.0,
            1.0,
            p,
            LlmPricing::new("m", price, 0.0).unwrap(),
            TransactionProfile::new(tokens, 0).unwrap(),
        )
        .unwrap()
    }

    fn assert_resubstitutes(sol: &BreakevenSolution) {
        let tol = 1e-9 * sol.reference_earnings.abs().max(1.0);
        assert!(
            (sol.candidate_earnings - sol.reference_earnings).abs() <= tol,
            "{sol:?}"
        );
    }

    #[test]
    fn probability_at_large_transactions() {
        let reference = scenario(0.95, 10.0, 128_000);
        let candidate = scenario(0.80, 0.5, 128_000);
        let sol = breakeven_solution(SolveFor::Probability, &reference, &candidate).unwrap();
        assert!((sol.reference_earnings - 8.17).abs() < 1e-12);
        assert!((sol.value - (8.17 + 1.0 + 0.064) / 11.0).abs() < 1e-12);
        assert!((sol.value - 0.8395).abs() < 5e-4);
        assert_resubstitutes(&sol);

        // Independent check: scan candidate probabilities for the sign change.
        let e_ref = sol.reference_earnings;
        let grid: Vec<f64> = (0..=10_000).map(|i| i as f64 / 10_000.0).collect();
        let crossing = grid
            .windows(2)
            .find(|w| {
                let lo = crate::econ::evaluate_single(&candidate.with_p_success(w[0]).unwrap()).earnings - e_ref;
                let hi = crate::econ::evaluate_single(&candidate.with_p_success(w[1]).unwrap()).earnings - e_ref;
                lo <= 0.0 && hi > 0.0
            })
            .unwrap();
        assert!(crossing[0] <= sol.value && sol.value <= crossing[1]);
    }

    #[test]
    fn symmetric_probability() {
        let s = scenario(0.73, 2.0, 5000);
        let p = breakeven(SolveFor::Probability, &s, &s).unwrap();
        assert!((p - 0.73).abs() < 1e-12);
    }

    #[test]
    fn shared_tokens_crossing() {
        let reference = scenario(0.95, 10.0, 1000);
        let candidate = scenario(0.80, 0.5, 1000);
        let sol = breakeven_solution(SolveFor::Tokens, &reference, &candidate).unwrap();
        // 1.65 / 9.5e-6
        assert!((sol.value - 173_684.210_526_315_8).abs() < 1e-6, "{}", sol.value);
        assert_resubstitutes(&sol);
    }

    #[test]
    fn candidate_tokens_and_price() {
        let reference = scenario(0.95, 10.0, 1000);
        let candidate = scenario(0.95, 5.0, 1000);
        let t = breakeven_solution(SolveFor::CandidateTokens, &reference, &candidate).unwrap();
        assert!((t.value - 2000.0).abs() < 1e-6);
        assert_resubstitutes(&t);
        let price = breakeven_solution(SolveFor::UnitPrice, &reference, &candidate).unwrap();
        assert!((price.value - 10.0).abs() < 1e-9);
        assert_resubstitutes(&price);
    }

    #[test]
    fn degenerate_and_out_of_domain() {
        let zero = SingleOutcomeScenario::new(
            0.0,
            0.0,
            0.5,
            LlmPricing::new("m", 1.0, 0.0).unwrap(),
            TransactionProfile::new(10, 0).unwrap(),
        )
        .unwrap();
        let reference = scenario(0.95, 10.0, 1000);
        assert!(matches!(
            breakeven(SolveFor::Probability, &reference, &zero),
            Err(Error::NoSolution(_))
        ));
        assert!(matches!(
            breakeven(SolveFor::Tokens, &reference, &reference),
            Err(Error::NoSolution(_))
        ));
        // A much richer reference needs P > 1 from the candidate.
        let rich = SingleOutcomeScenario::new(
            100.0,
            1.0,
            0.99,
            LlmPricing::new("m", 1.0, 0.0).unwrap(),
            TransactionProfile::new(10, 0).unwrap(),
        )
        .unwrap();
        match breakeven(SolveFor::Probability, &rich, &reference) {
            Err(Error::OutOfDomain { value, .. }) => assert!(value > 1.0),
            other => panic!("{other:?}"),
        }
        // llm-1 dominates an identically-priced but weaker model: no positive size.
        let weaker = scenario(0.80, 10.0, 1000);
        let cheap_weak = scenario(0.80, 20.0, 1000);
        assert!(matches!(
            breakeven(SolveFor::Tokens, &reference, &cheap_weak),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(breakeven(SolveFor::CandidateTokens, &reference, &weaker).is_err());
    }
}
