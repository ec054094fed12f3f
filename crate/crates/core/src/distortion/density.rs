//! Densities `dQ/dP`, their quantile functions and upper-tail means, and the
//! density-quantile minorant check.

use crate::error::{Error, Result};
use crate::monetary::upper_tail_mean;
use crate::numeric::PROB_TOL;
use crate::space::{ProbabilityMeasure, RandomVariable};

use super::DistortionFunction;

/// The distribution of `dQ/dP` under `P`: density values in increasing order
/// with their `P`-weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DensityProfile {
    /// Lower quantile `q(s) = inf{x : P(dQ/dP ≤ x) ≥ s}` for `s ∈ (0,1]`.
    pub fn quantile(&self, s: f64) -> f64 {
        let mut cum = 0.0;
        for (v, w) in self.values.iter().zip(&self.weights) {
            cum += w;
            if cum >= s {
                return *v;
            }
        }
        self.values[self.values.len() - 1]
    }

    /// `(1/(1−α)) ∫_α^1 q(s) ds`, with `α = 1` giving the largest density.
    pub fn expected_shortfall(&self, alpha: f64) -> f64 {
        upper_tail_mean(&self.values, &self.weights, alpha)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

/// Builds the profile of `dQ/dP`; outcomes with `P(ω) = 0` are dropped and
/// must have `Q(ω) = 0`.
pub fn density_quantile(q: &ProbabilityMeasure, p: &ProbabilityMeasure) -> Result<DensityProfile> {
    if q.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    let mut pairs = Vec::with_capacity(p.dim());
    for (i, (&qi, &pi)) in q.weights().iter().zip(p.weights()).enumerate() {
        if pi == 0.0 {
            if qi > 0.0 {
                return Err(Error::NotAbsolutelyContinuous { outcome: i });
            }
            continue;
        }
        pairs.push((qi / pi, pi));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let profile = DensityProfile {
        values: pairs.iter().map(|x| x.0).collect(),
        weights: pairs.iter().map(|x| x.1).collect(),
    };
    debug_assert!((profile.mean() - 1.0).abs() <= PROB_TOL * 10.0);
    Ok(profile)
}

/// Expected shortfall at level `α ∈ (0,1]` of the density `dQ/dP`.
pub fn density_es(q: &ProbabilityMeasure, p: &ProbabilityMeasure, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("{alpha} not in (0,1]"),
        });
    }
    Ok(density_quantile(q, p)?.expected_shortfall(alpha))
}

/// Result of [`check_minorant`].
#[derive(Debug, Clone)]
pub struct MinorantReport {
    /// `q_Q(1−p) ≤ T′(p)` at every checked point.
    pub premise_holds: bool,
    /// First point where the premise fails, with `q_Q(1−p)` and `T′(p)`.
    pub premise_witness: Option<(f64, f64, f64)>,
    /// Corpus members with `Q(X>0) > T(P(X>0))`, with both sides.
    pub conclusion_violations: Vec<(RandomVariable, f64, f64)>,
    pub points_checked: usize,
}

impl MinorantReport {
    /// A violated conclusion under a satisfied premise.
    pub fn hard_failure(&self) -> bool {
        self.premise_holds && !self.conclusion_violations.is_empty()
    }
}

/// Checks `q_Q(1−p) ≤ T′(p)` at the cell midpoints `(k + ½)/resolution`,
/// then `Q(X>0) ≤ T(P(X>0))` on every corpus member.
///
/// Midpoints stay off the knots of grid-aligned piecewise-linear `T`, where
/// `T′` is the constant slope of the surrounding segment.
pub fn check_minorant(
    t: &DistortionFunction,
    q: &ProbabilityMeasure,
    p: &ProbabilityMeasure,
    corpus: &[RandomVariable],
    resolution: usize,
) -> Result<MinorantReport> {
    let profile = density_quantile(q, p)?;
    let premise_witness = (0..resolution).find_map(|k| {
        let s = (k as f64 + 0.5) / resolution as f64;
        let lhs = profile.quantile(1.0 - s);
        let rhs = t.left_slope(s);
        (lhs > rhs + 1e-12).then_some((s, lhs, rhs))
    });
    let conclusion_violations = corpus
        .iter()
        .filter_map(|x| {
            let lhs = q.pd(x);
            let rhs = t.eval(p.pd(x));
            (lhs > rhs + 1e-12).then(|| (x.clone(), lhs, rhs))
        })
        .collect();
    Ok(MinorantReport {
        premise_holds: premise_witness.is_none(),
        premise_witness,
        conclusion_violations,
        points_checked: resolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(w: &[f64]) -> ProbabilityMeasure {
        ProbabilityMeasure::new(w.to_vec()).unwrap()
    }

    #[test]
    fn density_examples() {
        let p = pm(&[0.5, 0.5]);
        for a in [0.1, 0.5, 0.9, 1.0] {
            assert!((density_es(&p, &p, a).unwrap() - 1.0).abs() < 1e-15);
        }
        let q = pm(&[0.25, 0.75]);
        let profile = density_quantile(&q, &p).unwrap();
        assert_eq!(profile.values, vec![0.5, 1.5]);
        assert_eq!(density_es(&q, &p, 0.5).unwrap(), 1.5);
        // (1/0.75)(0.25·0.5 + 0.5·1.5)
        let oracle = (0.25 * 0.5 + 0.5 * 1.5) / 0.75;
        assert!((density_es(&q, &p, 0.25).unwrap() - oracle).abs() < 1e-15);
        assert!((oracle - 1.1666667).abs() < 1e-7);
        assert!(density_es(&q, &p, 0.0).is_err());
    }

    #[test]
    fn absolute_continuity_required() {
        let p = pm(&[1.0, 0.0]);
        let q = pm(&[0.5, 0.5]);
        assert!(matches!(
            density_quantile(&q, &p),
            Err(Error::NotAbsolutelyContinuous { outcome: 1 })
        ));
        assert!(density_quantile(&p, &q).is_ok());
    }
}
