//! Closed-form economic models of LLM usage.

mod breakeven;
mod pricing;
mod project;
mod scenario;
mod sweep;
mod tradeoff;
mod utility;

pub use breakeven::{breakeven, breakeven_solution, BreakevenSolution, SolveFor};
pub use pricing::{
    cost_per_token, transaction_cost, CostBreakdown, IntervalPricing, LlmPricing, PriceUnit, TransactionProfile,
    TOKENS_PER_MILLION,
};
pub use project::{anecdotal_earnings_roi, project_earnings_roi, AnecdotalScenario, ProjectLedger};
pub use scenario::{
    evaluate_binary, evaluate_single, BinaryOutcomeScenario, BinaryVariant, EvaluationResult, OutcomeContribution,
    SingleOutcomeScenario,
};
pub use sweep::{sweep, Crossing, SweepPoint, SweepSeries, SweepTable, SweepVariable};
pub use tradeoff::{compression_tradeoff, CompressionTradeoff};
pub use utility::{
    composite_success_probability, expected_utility, Outcome, OutcomeLottery, SuccessDecomposition,
};
