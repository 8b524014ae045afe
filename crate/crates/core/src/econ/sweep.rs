//! One-variable sweeps of earnings and RoI with crossing detection.

use serde::{Deserialize, Serialize};

use super::scenario::{SinglePoint, SingleOutcomeScenario};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepVariable {
    /// Input tokens per transaction.
    T,
    /// Success probability.
    P,
    /// Input price per million tokens.
    C,
    /// Gain per success.
    G,
    /// Loss per failure.
    L,
}

impl SweepVariable {
    pub fn label(self) -> &'static str {
        match self {
            SweepVariable::T => "T",
            SweepVariable::P => "P",
            SweepVariable::C => "C",
            SweepVariable::G => "G",
            SweepVariable::L => "L",
        }
    }

    /// Copy of `s` with this variable set to `value`. Token counts must be
    /// whole numbers.
    pub fn set(self, s: &SingleOutcomeScenario, value: f64) -> Result<SingleOutcomeScenario> {
        let field = self.label();
        if !value.is_finite() {
            return Err(Error::validation(field, format!("must be finite, got {value}")));
        }
        match self {
            SweepVariable::T => {
                if value < 0.0 || value.fract() != 0.0 || value > u64::MAX as f64 {
                    return Err(Error::validation(field, format!("token count must be a whole number, got {value}")));
                }
                s.with_input_tokens(value as u64)
            }
            SweepVariable::P => s.with_p_success(value),
            SweepVariable::C => s.with_input_price(value),
            SweepVariable::G => SingleOutcomeScenario::new(value, s.loss(), s.p_success(), s.pricing().clone(), *s.transaction())?
                .with_extra_cost(s.extra_cost_per_transaction()),
            SweepVariable::L => SingleOutcomeScenario::new(s.gain(), value, s.p_success(), s.pricing().clone(), *s.transaction())?
                .with_extra_cost(s.extra_cost_per_transaction()),
        }
    }

    fn apply(self, point: &mut SinglePoint, value: f64) {
        match self {
            SweepVariable::T => point.input_tokens = value,
            SweepVariable::P => point.p_success = value,
            SweepVariable::C => point.input_price = value,
            SweepVariable::G => point.gain = value,
            SweepVariable::L => point.loss = value,
        }
    }
}

impl std::str::FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" | "tokens" => Ok(SweepVariable::T),
            "P" | "p_success" => Ok(SweepVariable::P),
            "C" | "unit_price" | "unit-price" => Ok(SweepVariable::C),
            "G" | "gain" => Ok(SweepVariable::G),
            "L" | "loss" => Ok(SweepVariable::L),
            other => Err(Error::validation("var", format!("unknown sweep variable `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub earnings: f64,
    pub roi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSeries {
    pub name: String,
    pub points: Vec<SweepPoint>,
}

/// Where the earnings curves of two series cross.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub first: String,
    pub second: String,
    pub value: f64,
    pub earnings: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub variable: SweepVariable,
    pub series: Vec<SweepSeries>,
    pub crossings: Vec<Crossing>,
}

/// Evaluate each scenario at `steps` evenly spaced values of `variable` in
/// `[from, to]`, and locate pairwise earnings crossings by linear
/// interpolation between adjacent grid points.
pub fn sweep(
    scenarios: &[(String, SingleOutcomeScenario)],
    variable: SweepVariable,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<SweepTable> {
    if scenarios.is_empty() {
        return Err(Error::validation("scenarios", "nothing to sweep"));
    }
    if steps < 2 {
        return Err(Error::validation("steps", format!("need at least 2 steps, got {steps}")));
    }
    if !(from.is_finite() && to.is_finite()) || from >= to {
        return Err(Error::validation("from", format!("invalid range [{from}, {to}]")));
    }
    if from < 0.0 {
        return Err(Error::validation("from", format!("{} cannot be negative", variable.label())));
    }
    if variable == SweepVariable::P && to > 1.0 {
        return Err(Error::validation("to", format!("probability range exits [0, 1]: {to}")));
    }

    let grid: Vec<f64> = (0..steps)
        .map(|i| {
            if i == steps - 1 {
                to
            } else {
                from + (to - from) * i as f64 / (steps - 1) as f64
            }
        })
        .collect();

    let series: Vec<SweepSeries> = scenarios
        .iter()
        .map(|(name, scenario)| {
            let base = scenario.point();
            let points = grid
                .iter()
                .map(|&value| {
                    let mut p = base;
                    variable.apply(&mut p, value);
                    let r = p.evaluate();
                    SweepPoint {
                        value,
                        earnings: r.earnings,
                        roi: r.roi,
                    }
                })
                .collect();
            SweepSeries {
                name: name.clone(),
                points,
            }
        })
        .collect();

    let mut crossings = Vec::new();
    for i in 0..series.len() {
        for j in i + 1..series.len() {
            crossings.extend(find_crossings(&series[i], &series[j]));
        }
    }

    Ok(SweepTable {
        variable,
        series,
        crossings,
    })
}

fn find_crossings(a: &SweepSeries, b: &SweepSeries) -> Vec<Crossing> {
    let diff: Vec<f64> = a
        .points
        .iter()
        .zip(&b.points)
        .map(|(pa, pb)| pa.earnings - pb.earnings)
        .collect();
    let mut out = Vec::new();
    let mut push = |value: f64, earnings: f64| {
        out.push(Crossing {
            first: a.name.clone(),
            second: b.name.clone(),
            value,
            earnings,
        })
    };
    for k in 0..diff.len() {
        if diff[k] == 0.0 {
            // Exact touch at a grid point; only report it once.
            if k == 0 || diff[k - 1] != 0.0 {
                push(a.points[k].value, a.points[k].earnings);
            }
            continue;
        }
        if k + 1 < diff.len() && diff[k + 1] != 0.0 && (diff[k] < 0.0) != (diff[k + 1] < 0.0) {
            let (x0, x1) = (a.points[k].value, a.points[k + 1].value);
            let w = diff[k] / (diff[k] - diff[k + 1]);
            let value = x0 + (x1 - x0) * w;
            let (e0, e1) = (a.points[k].earnings, a.points[k + 1].earnings);
            push(value, e0 + (e1 - e0) * w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ::pricing::{LlmPricing, TransactionProfile};
    use crate::econ::{breakeven, evaluate_single, SolveFor};

    fn scenario(g: f64, p: f64, price: f64) -> SingleOutcomeScenario {
        SingleOutcomeScenario::new(
            g,
            1.0,
            p,
            LlmPricing::new("m", price, 0.0).unwrap(),
            TransactionProfile::new(1000, 0).unwrap(),
        )
        .unwrap()
    }

    fn pair() -> Vec<(String, SingleOutcomeScenario)> {
        vec![
            ("llm-1".into(), scenario(10.0, 0.95, 10.0)),
            ("llm-2".into(), scenario(10.0, 0.80, 0.5)),
        ]
    }

    #[test]
    fn crossing_over_tokens_matches_breakeven() {
        let table = sweep(&pair(), SweepVariable::T, 50.0, 200_000.0, 101).unwrap();
        assert_eq!(table.crossings.len(), 1);
        let pair = pair();
        let exact = breakeven(SolveFor::Tokens, &pair[0].1, &pair[1].1).unwrap();
        assert!((table.crossings[0].value - exact).abs() < 1e-6 * exact);
        assert!((table.crossings[0].value - 173_684.21).abs() < 0.01);
    }

    #[test]
    fn two_steps_hit_the_endpoints() {
        let s = scenario(10.0, 0.9, 2.0);
        let table = sweep(&[("s".into(), s.clone())], SweepVariable::G, 5.0, 50.0, 2).unwrap();
        for (pt, g) in table.series[0].points.iter().zip([5.0, 50.0]) {
            let direct = evaluate_single(&scenario(g, 0.9, 2.0));
            assert_eq!(pt.value, g);
            assert_eq!(pt.earnings, direct.earnings);
            assert_eq!(pt.roi, direct.roi);
        }
    }

    #[test]
    fn earnings_fall_with_size() {
        let table = sweep(&pair()[..1], SweepVariable::T, 50.0, 200_000.0, 50).unwrap();
        let e: Vec<f64> = table.series[0].points.iter().map(|p| p.earnings).collect();
        assert!(e.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn set_single_variables() {
        let s = scenario(10.0, 0.8, 0.5);
        let t = SweepVariable::T.set(&s, 128_000.0).unwrap();
        assert_eq!(t.transaction().input_tokens(), 128_000);
        assert!(SweepVariable::T.set(&s, 10.5).is_err());
        assert_eq!(SweepVariable::G.set(&s, 3.0).unwrap().gain(), 3.0);
        assert_eq!(SweepVariable::P.set(&s, 1.5).unwrap_err().field(), Some("p_success"));
        assert_eq!(SweepVariable::C.set(&s, 2.0).unwrap().pricing().input_price_per_million(), 2.0);
    }

    #[test]
    fn invalid_ranges() {
        assert!(sweep(&pair(), SweepVariable::T, 10.0, 5.0, 10).is_err());
        assert!(sweep(&pair(), SweepVariable::T, 5.0, 10.0, 1).is_err());
        let err = sweep(&pair(), SweepVariable::P, 0.5, 1.2, 10).unwrap_err();
        assert_eq!(err.field(), Some("to"));
        assert!(sweep(&[], SweepVariable::T, 1.0, 2.0, 3).is_err());
    }
}
