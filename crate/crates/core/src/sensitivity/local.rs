//! Local sensitivity: closed-form gradients and Hessians, cross-checked by
//! central finite differences.

use serde::{Deserialize, Serialize};

use super::model::{CostUnits, EconModel, Matrix, ModelKind, ParameterVector, Target};
use crate::econ::BinaryVariant;
use crate::error::{Error, Result};

/// Relative step used by [`local_report`] for its finite-difference check.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-6;

pub fn gradient_single(point: &ParameterVector, target: Target, units: CostUnits) -> Result<Vec<f64>> {
    point.expect_layout(ModelKind::Single)?;
    EconModel::new(ModelKind::Single, target, units).gradient(point.values())
}

pub fn hessian_single(point: &ParameterVector, target: Target, units: CostUnits) -> Result<Matrix> {
    point.expect_layout(ModelKind::Single)?;
    EconModel::new(ModelKind::Single, target, units).hessian(point.values())
}

pub fn gradient_binary(
    point: &ParameterVector,
    target: Target,
    variant: BinaryVariant,
    units: CostUnits,
) -> Result<Vec<f64>> {
    let kind = ModelKind::binary(variant);
    point.expect_layout(kind)?;
    EconModel::new(kind, target, units).gradient(point.values())
}

pub fn hessian_binary(point: &ParameterVector, target: Target, variant: BinaryVariant, units: CostUnits) -> Result<Matrix> {
    let kind = ModelKind::binary(variant);
    point.expect_layout(kind)?;
    EconModel::new(kind, target, units).hessian(point.values())
}

fn step(x: f64, relative_step: f64) -> f64 {
    relative_step * x.abs().max(1.0)
}

fn check_step(relative_step: f64) -> Result<()> {
    if !(relative_step > 0.0 && relative_step <= 1e-2) {
        return Err(Error::validation(
            "relative_step",
            format!("must lie in (0, 1e-2], got {relative_step}"),
        ));
    }
    Ok(())
}

/// Central-difference gradient with per-coordinate step
/// `relative_step · max(|x_i|, 1)`.
pub fn finite_difference_gradient<F>(f: F, point: &[f64], relative_step: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    check_step(relative_step)?;
    let mut probe = point.to_vec();
    let eval = |probe: &[f64]| {
        f(probe).map_err(|e| Error::Evaluator {
            probe: probe.to_vec(),
            message: e.to_string(),
        })
    };
    let mut grad = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        let h = step(point[i], relative_step);
        probe[i] = point[i] + h;
        let up = eval(&probe)?;
        probe[i] = point[i] - h;
        let down = eval(&probe)?;
        probe[i] = point[i];
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

/// Hessian by central differences of a gradient function.
pub fn finite_difference_hessian<F>(grad: F, point: &[f64], relative_step: f64) -> Result<Matrix>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    check_step(relative_step)?;
    let n = point.len();
    let mut h = vec![vec![0.0; n]; n];
    let mut probe = point.to_vec();
    for j in 0..n {
        let dj = step(point[j], relative_step);
        probe[j] = point[j] + dj;
        let up = grad(&probe)?;
        probe[j] = point[j] - dj;
        let down = grad(&probe)?;
        probe[j] = point[j];
        for i in 0..n {
            h[i][j] = (up[i] - down[i]) / (2.0 * dj);
        }
    }
    Ok(h)
}

/// Largest per-coordinate deviation between an analytic and a
/// finite-difference gradient, relative to
/// `max(|analytic_i|, |f(x)| / max(|x_i|, 1))`. The second term is the
/// natural size of a derivative and bounds the rounding noise of the
/// difference quotient.
pub fn gradient_deviation(analytic: &[f64], numeric: &[f64], value: f64, point: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .zip(point)
        .map(|((a, n), x)| {
            let scale = a.abs().max(value.abs() / x.abs().max(1.0)).max(f64::MIN_POSITIVE);
            (a - n).abs() / scale
        })
        .fold(0.0, f64::max)
}

/// Largest `|H_ij − H_ji|` relative to the largest entry magnitude.
pub fn hessian_asymmetry(h: &Matrix) -> f64 {
    let scale = h.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for i in 0..h.len() {
        for j in 0..i {
            worst = worst.max((h[i][j] - h[j][i]).abs());
        }
    }
    worst / scale
}

/// Gradient, Hessian and finite-difference residuals at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSensitivity {
    pub model: ModelKind,
    pub target: Target,
    pub cost_units: CostUnits,
    pub evaluated_at: ParameterVector,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Matrix,
    pub finite_difference_gradient: Vec<f64>,
    /// Largest relative deviation between analytic and numeric gradients.
    pub max_gradient_deviation: f64,
    pub hessian_nonzeros: usize,
}

pub fn local_report(point: &ParameterVector, model: ModelKind, target: Target, units: CostUnits) -> Result<LocalSensitivity> {
    point.expect_layout(model)?;
    let m = EconModel::new(model, target, units);
    let x = point.values();
    let gradient = m.gradient(x)?;
    let hessian = m.hessian(x)?;
    let value = m.evaluate(x);
    let numeric = finite_difference_gradient(|p| Ok(m.evaluate(p)), x, DEFAULT_RELATIVE_STEP)?;
    let hessian_nonzeros = hessian.iter().flatten().filter(|v| **v != 0.0).count();
    Ok(LocalSensitivity {
        model,
        target,
        cost_units: units,
        evaluated_at: point.clone(),
        value,
        max_gradient_deviation: gradient_deviation(&gradient, &numeric, value, x),
        gradient,
        hessian,
        finite_difference_gradient: numeric,
        hessian_nonzeros,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn llm1() -> ParameterVector {
        // C = 1e-5 per token, T = 1000: C·T = 0.01.
        ParameterVector::single(10.0, 1.0, 1e-5, 0.95, 1000.0)
    }

    #[test]
    fn earnings_gradient_at_worked_example() {
        let g = gradient_single(&llm1(), Target::Earnings, CostUnits::PerToken).unwrap();
        assert_eq!(g[0], 0.95);
        assert!((g[1] + 0.05).abs() < 1e-15);
        assert_eq!(g[2], -1000.0);
        assert_eq!(g[3], 11.0);
        assert_eq!(g[4], -1e-5);
    }

    #[test]
    fn roi_gradient_against_finite_differences() {
        // C = 10 per million, T = 1000: C·T = 0.01 again, with every
        // coordinate well scaled for the step rule.
        let m = EconModel::new(ModelKind::Single, Target::Roi, CostUnits::PerMillion);
        let x = ParameterVector::single(10.0, 1.0, 10.0, 0.95, 1000.0);
        let g = gradient_single(&x, Target::Roi, CostUnits::PerMillion).unwrap();
        let fd = finite_difference_gradient(|p| Ok(m.evaluate(p)), x.values(), 1e-6).unwrap();
        assert!((g[0] - 95.0).abs() < 1e-9);
        assert!((fd[0] - 95.0).abs() < 1e-6 * 95.0);
        assert!(gradient_deviation(&g, &fd, m.evaluate(x.values()), x.values()) < 1e-6);
    }

    #[test]
    fn earnings_hessian_zero_pattern() {
        for units in [CostUnits::PerToken, CostUnits::PerMillion] {
            let h = hessian_single(&llm1(), Target::Earnings, units).unwrap();
            let nonzero: Vec<(usize, usize)> = (0..5)
                .flat_map(|i| (0..5).map(move |j| (i, j)))
                .filter(|&(i, j)| h[i][j] != 0.0)
                .collect();
            // (G,P), (L,P), (C,T) and their mirrors.
            assert_eq!(nonzero, vec![(0, 3), (1, 3), (2, 4), (3, 0), (3, 1), (4, 2)]);
        }
        let h = hessian_single(&llm1(), Target::Earnings, CostUnits::PerToken).unwrap();
        assert_eq!((h[0][3], h[1][3], h[2][4]), (1.0, 1.0, -1.0));
    }

    #[test]
    fn roi_hessian_entries() {
        let x = llm1();
        let h = hessian_single(&x, Target::Roi, CostUnits::PerToken).unwrap();
        let ct = 1e-5 * 1000.0;
        assert!((h[0][3] - 1.0 / ct).abs() < 1e-9);
        assert_eq!(h[0][0], 0.0);
        assert!(hessian_asymmetry(&h) < 1e-10);
        // Differentiating ∂R/∂L = −(1−P)/(CT) in P gives +1/(CT).
        assert!((h[1][3] - 1.0 / ct).abs() < 1e-9);
    }

    #[test]
    fn roi_hessian_against_finite_differences() {
        let x = ParameterVector::single(200.0, 40.0, 2.5, 0.7, 4000.0);
        let m = EconModel::new(ModelKind::Single, Target::Roi, CostUnits::PerMillion);
        let h = m.hessian(x.values()).unwrap();
        let fd = finite_difference_hessian(|p| m.gradient(p), x.values(), 1e-6).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let scale = h[i][j].abs().max(1e-6 * m.evaluate(x.values()).abs());
                assert!((h[i][j] - fd[i][j]).abs() <= 1e-5 * scale.max(1.0), "({i},{j}) {} vs {}", h[i][j], fd[i][j]);
            }
        }
    }

    #[test]
    fn paper_compat_binary_gradient() {
        // P_TN = 1 − 0.3 = 0.7, T = 1000 → ∂E/∂C = T(2·P_TN − 3) = −1600.
        let x = ParameterVector::binary(100.0, 5.0, 20.0, 2e-5, 0.05, 0.05, 0.2, 1000.0);
        let g = gradient_binary(&x, Target::Earnings, BinaryVariant::PaperCompat, CostUnits::PerToken).unwrap();
        assert!((g[3] + 1600.0).abs() < 1e-9);
        assert_eq!(g[0], 0.2);
        let ct = 2e-5 * 1000.0;
        assert!((g[6] - (100.0 - 2.0 * ct)).abs() < 1e-12);
        let c = gradient_binary(&x, Target::Earnings, BinaryVariant::Canonical, CostUnits::PerToken).unwrap();
        assert_eq!(c[3], -1000.0);
    }

    #[test]
    fn binary_hessian_nonzero_counts() {
        let x = ParameterVector::binary(100.0, 5.0, 20.0, 2.0, 0.05, 0.05, 0.2, 1000.0);
        let count = |v| {
            hessian_binary(&x, Target::Earnings, v, CostUnits::PerMillion)
                .unwrap()
                .iter()
                .flatten()
                .filter(|h| **h != 0.0)
                .count()
        };
        assert_eq!(count(BinaryVariant::Canonical), 8);
        // 10 symmetric pairs in the substituted form: 44 zeros out of 64.
        assert_eq!(count(BinaryVariant::PaperCompat), 20);
    }

    #[test]
    fn finite_differences_on_simple_functions() {
        let g = finite_difference_gradient(|_| Ok(3.0), &[1.0, 2.0], 1e-4).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
        let g = finite_difference_gradient(|x| Ok(x.iter().sum()), &[1.0, -2.0, 300.0], 1e-4).unwrap();
        assert!(g.iter().all(|v| (v - 1.0).abs() < 1e-9));
        assert!(finite_difference_gradient(|_| Ok(0.0), &[1.0], 0.1).is_err());
        let err = finite_difference_gradient(
            |x| if x[0] > 1.0 { Err(Error::Singular("boom".into())) } else { Ok(x[0]) },
            &[1.0],
            1e-3,
        )
        .unwrap_err();
        match err {
            Error::Evaluator { probe, .. } => assert!(probe[0] > 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn local_report_bundles_checks() {
        let r = local_report(&llm1(), ModelKind::Single, Target::Earnings, CostUnits::PerToken).unwrap();
        assert!(r.max_gradient_deviation < 1e-6);
        assert_eq!(r.hessian_nonzeros, 6);

        let flat = ParameterVector::single(0.0, 0.0, 1e-5, 0.4, 1000.0);
        let r = local_report(&flat, ModelKind::Single, Target::Earnings, CostUnits::PerToken).unwrap();
        assert_eq!(r.gradient[3], 0.0);

        assert!(local_report(&llm1(), ModelKind::BinaryCanonical, Target::Earnings, CostUnits::PerToken).is_err());
    }
}
