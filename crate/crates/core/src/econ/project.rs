//! Project-level accounting: earnings and RoI from benefits and costs, and
//! the success-count model commonly used in industry business cases.

use serde::{Deserialize, Serialize};

use super::pricing::CostBreakdown;
use crate::error::{check_finite, check_nonneg, Error, Result};

const BENEFIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectLedger {
    pub benefits: f64,
    pub gains: f64,
    pub losses: f64,
    pub costs: CostBreakdown,
}

impl ProjectLedger {
    /// Ledger whose benefits are the gains net of losses.
    pub fn new(gains: f64, losses: f64, costs: CostBreakdown) -> Result<Self> {
        let gains = check_nonneg("gains", gains)?;
        let losses = check_nonneg("losses", losses)?;
        Ok(Self {
            benefits: gains - losses,
            gains,
            losses,
            costs,
        })
    }

    /// Ledger with explicitly stated benefits; they must equal gains − losses.
    pub fn with_benefits(benefits: f64, gains: f64, losses: f64, costs: CostBreakdown) -> Result<Self> {
        let benefits = check_finite("benefits", benefits)?;
        let ledger = Self::new(gains, losses, costs)?;
        let scale = benefits.abs().max(ledger.benefits.abs()).max(1.0);
        if (benefits - ledger.benefits).abs() > BENEFIT_TOLERANCE * scale {
            return Err(Error::validation(
                "benefits",
                format!(
                    "benefits {benefits} disagree with gains - losses = {}",
                    ledger.benefits
                ),
            ));
        }
        Ok(Self { benefits, ..ledger })
    }

    pub fn total_cost(&self) -> f64 {
        self.costs.total()
    }
}

/// Earnings `B_p − C_p` and RoI `E / C_p` of a project.
pub fn project_earnings_roi(ledger: &ProjectLedger) -> Result<(f64, f64)> {
    let cost = ledger.total_cost();
    let earnings = ledger.benefits - cost;
    if cost == 0.0 {
        return Err(Error::DivisionByZero("project cost is zero, RoI undefined".into()));
    }
    Ok((earnings, earnings / cost))
}

/// Success-count business case over `N` transactions: `M` produce a gain,
/// `Q` produce a loss, and every transaction costs `C_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnecdotalScenario {
    total_transactions: u64,
    gain_transactions: u64,
    loss_transactions: u64,
    gain_per_success: f64,
    loss_per_failure: f64,
    transaction_cost: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
}

impl AnecdotalScenario {
    pub fn new(
        total_transactions: u64,
        gain_transactions: u64,
        loss_transactions: u64,
        gain_per_success: f64,
        loss_per_failure: f64,
        transaction_cost: f64,
    ) -> Result<Self> {
        if total_transactions == 0 {
            return Err(Error::validation("total_transactions", "must be >= 1"));
        }
        if gain_transactions > total_transactions {
            return Err(Error::validation(
                "gain_transactions",
                format!("{gain_transactions} exceeds total_transactions {total_transactions}"),
            ));
        }
        if loss_transactions > total_transactions {
            return Err(Error::validation(
                "loss_transactions",
                format!("{loss_transactions} exceeds total_transactions {total_transactions}"),
            ));
        }
        let mut warnings = Vec::new();
        if loss_transactions > gain_transactions {
            let msg = format!(
                "loss_transactions ({loss_transactions}) exceeds gain_transactions ({gain_transactions}); \
                 the model assumes losses are rare"
            );
            tracing::warn!("{msg}");
            warnings.push(msg);
        }
        Ok(Self {
            total_transactions,
            gain_transactions,
            loss_transactions,
            gain_per_success: check_nonneg("gain_per_success", gain_per_success)?,
            loss_per_failure: check_nonneg("loss_per_failure", loss_per_failure)?,
            transaction_cost: check_nonneg("transaction_cost", transaction_cost)?,
            warnings,
        })
    }

    /// Diagnostics raised at construction (not errors).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn total_spend(&self) -> f64 {
        self.total_transactions as f64 * self.transaction_cost
    }

    pub fn earnings(&self) -> f64 {
        self.gain_per_success * self.gain_transactions as f64
            - self.total_spend()
            - self.loss_per_failure * self.loss_transactions as f64
    }
}

/// Earnings `G·M − N·C_t − L·Q` and RoI over the spend `N·C_t`.
pub fn anecdotal_earnings_roi(s: &AnecdotalScenario) -> Result<(f64, f64)> {
    let spend = s.total_spend();
    if spend == 0.0 {
        return Err(Error::DivisionByZero("total spend N*C_t is zero, RoI undefined".into()));
    }
    let earnings = s.earnings();
    Ok((earnings, earnings / spend))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn costs(total: f64) -> CostBreakdown {
        CostBreakdown::new(total, 0.0, 0.0).unwrap()
    }

    #[test]
    fn project_examples() {
        let (e, r) = project_earnings_roi(&ProjectLedger::new(100.0, 0.0, costs(50.0)).unwrap()).unwrap();
        assert_eq!((e, r), (50.0, 1.0));
        let (e, r) = project_earnings_roi(&ProjectLedger::new(0.0, 0.0, costs(10.0)).unwrap()).unwrap();
        assert_eq!((e, r), (-10.0, -1.0));
        let split = CostBreakdown::new(1.0, 1.5, 0.5).unwrap();
        let (e, r) = project_earnings_roi(&ProjectLedger::new(10.0, 1.0, split).unwrap()).unwrap();
        assert_eq!((e, r), (6.0, 2.0));
    }

    #[test]
    fn zero_cost_roi_is_an_error() {
        let ledger = ProjectLedger::new(5.0, 0.0, CostBreakdown::default()).unwrap();
        assert!(matches!(project_earnings_roi(&ledger), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn stated_benefits_must_match() {
        assert!(ProjectLedger::with_benefits(9.0, 10.0, 1.0, costs(1.0)).is_ok());
        let err = ProjectLedger::with_benefits(8.0, 10.0, 1.0, costs(1.0)).unwrap_err();
        assert_eq!(err.field(), Some("benefits"));
    }

    #[test]
    fn anecdotal_examples() {
        let s = AnecdotalScenario::new(1000, 100, 0, 10.0, 0.0, 0.005).unwrap();
        let (e, r) = anecdotal_earnings_roi(&s).unwrap();
        assert!((e - 995.0).abs() < 1e-9 && (r - 199.0).abs() < 1e-9);

        let s = AnecdotalScenario::new(1000, 100, 10, 10.0, 5.0, 0.005).unwrap();
        let (e, r) = anecdotal_earnings_roi(&s).unwrap();
        assert!((e - 945.0).abs() < 1e-9 && (r - 189.0).abs() < 1e-9);

        let s = AnecdotalScenario::new(1000, 0, 0, 10.0, 5.0, 0.005).unwrap();
        assert!((s.earnings() + 5.0).abs() < 1e-12);
    }

    #[test]
    fn anecdotal_validation_and_warning() {
        assert!(AnecdotalScenario::new(10, 11, 0, 1.0, 1.0, 1.0).is_err());
        assert!(AnecdotalScenario::new(10, 1, 11, 1.0, 1.0, 1.0).is_err());
        assert!(AnecdotalScenario::new(0, 0, 0, 1.0, 1.0, 1.0).is_err());
        let s = AnecdotalScenario::new(10, 1, 5, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(s.warnings().len(), 1);
        let free = AnecdotalScenario::new(10, 1, 0, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(anecdotal_earnings_roi(&free), Err(Error::DivisionByZero(_))));
    }
}
