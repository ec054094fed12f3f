//! Monetary risk measures: monotone, cash-additive functionals with `R(0)=0`.
//!
//! Sign convention follows the customers: positive values are losses, so
//! `R(X + m) = R(X) + m` and larger `X` means more risk.

use std::fmt;
use std::sync::Arc;

use crate::capacity::Capacity;
use crate::error::{invalid, Result};
use crate::space::{Event, ProbabilityMeasure, RandomVariable};

type Functional = Arc<dyn Fn(&RandomVariable) -> f64 + Send + Sync>;

/// A monetary risk measure `R: B_b → ℝ`.
#[derive(Clone)]
pub enum MonetaryRiskMeasure {
    /// `E_P(X)`
    Expectation(ProbabilityMeasure),
    /// `VaR^α_P(X) = inf{m : P(X > m) ≤ α}` with `α ∈ (0,1)` a tail probability.
    ValueAtRisk { measure: ProbabilityMeasure, alpha: f64 },
    /// `(1/(1-β)) ∫_β^1 q_X(s) ds` with `β ∈ [0,1)` a confidence level.
    ExpectedShortfall { measure: ProbabilityMeasure, level: f64 },
    /// Choquet integral against a capacity.
    Choquet(Capacity),
    /// `sup X`, the worst case over all outcomes.
    Sup,
    /// Any user functional; monetary axioms are the caller's responsibility.
    Custom { name: String, f: Functional },
}

impl fmt::Debug for MonetaryRiskMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Expectation(p) => write!(f, "Expectation({:?})", p.weights()),
            Self::ValueAtRisk { alpha, .. } => write!(f, "ValueAtRisk(α={alpha})"),
            Self::ExpectedShortfall { level, .. } => write!(f, "ExpectedShortfall(β={level})"),
            Self::Choquet(c) => write!(f, "Choquet(n={})", c.dim()),
            Self::Sup => write!(f, "Sup"),
            Self::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl MonetaryRiskMeasure {
    pub fn expectation(p: ProbabilityMeasure) -> Self {
        Self::Expectation(p)
    }

    pub fn value_at_risk(measure: ProbabilityMeasure, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid("alpha", format!("{alpha} not in (0,1)")));
        }
        Ok(Self::ValueAtRisk { measure, alpha })
    }

    pub fn expected_shortfall(measure: ProbabilityMeasure, level: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&level) {
            return Err(invalid("level", format!("{level} not in [0,1)")));
        }
        Ok(Self::ExpectedShortfall { measure, level })
    }

    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(&RandomVariable) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Expectation(_) => "expectation".into(),
            Self::ValueAtRisk { alpha, .. } => format!("var({alpha})"),
            Self::ExpectedShortfall { level, .. } => format!("es({level})"),
            Self::Choquet(_) => "choquet".into(),
            Self::Sup => "sup".into(),
            Self::Custom { name, .. } => name.clone(),
        }
    }

    pub fn evaluate(&self, x: &RandomVariable) -> f64 {
        match self {
            Self::Expectation(p) => p.expectation(x),
            Self::ValueAtRisk { measure, alpha } => {
                level_scan(x, |a| measure.prob(a), *alpha)
            }
            Self::ExpectedShortfall { measure, level } => {
                upper_tail_mean(x.values(), measure.weights(), *level)
            }
            Self::Choquet(c) => c.choquet(x),
            Self::Sup => x.sup(),
            Self::Custom { f, .. } => f(x),
        }
    }
}

/// Smallest distinct value `v` of `X` with `c({X > v}) ≤ α`.
///
/// For a monotone set function `c` this is `inf{m : c({X > m}) ≤ α}`: the
/// map `m ↦ c({X > m})` is a right-continuous step function that only jumps
/// at values of `X`, is `c(Ω)` below `inf X` and `c(∅)` at `sup X`.
pub(crate) fn level_scan(x: &RandomVariable, c: impl Fn(&Event) -> f64, alpha: f64) -> f64 {
    let values = x.distinct_sorted();
    for &v in &values {
        if c(&x.upper_level_set(v)) <= alpha {
            return v;
        }
    }
    // c(∅) > α cannot happen for a capacity; fall back to sup X.
    values[values.len() - 1]
}

/// `(1/(1-β)) ∫_β^1 q(s) ds` for the distribution putting `weights[i]` on
/// `values[i]`; `β = 1` returns the largest value with positive weight.
pub(crate) fn upper_tail_mean(values: &[f64], weights: &[f64], level: f64) -> f64 {
    let mut pairs: Vec<(f64, f64)> = values
        .iter()
        .copied()
        .zip(weights.iter().copied())
        .filter(|&(_, w)| w > 0.0)
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let tail = 1.0 - level;
    if tail <= 0.0 {
        return pairs[0].0;
    }
    let mut remaining = tail;
    let mut acc = 0.0;
    for (v, w) in pairs {
        let take = w.min(remaining);
        acc += take * v;
        remaining -= take;
        if remaining <= 0.0 {
            break;
        }
    }
    acc / tail
}

/// Violations of the monetary axioms found on a corpus.
#[derive(Debug, Clone, Default)]
pub struct MonetaryAudit {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl MonetaryAudit {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Audits monotonicity, `R(0)=0`, cash additivity and (optionally) positive
/// homogeneity of `r` on `corpus`, each to absolute tolerance `tol`.
pub fn audit_monetary(
    r: &MonetaryRiskMeasure,
    corpus: &[RandomVariable],
    homogeneous: bool,
    tol: f64,
) -> MonetaryAudit {
    let mut audit = MonetaryAudit::default();
    let Some(first) = corpus.first() else {
        return audit;
    };
    let n = first.dim();
    let r0 = r.evaluate(&RandomVariable::zero(n));
    audit.checked += 1;
    if r0.abs() > tol {
        audit.violations.push(format!("R(0) = {r0}"));
    }
    for x in corpus {
        let rx = r.evaluate(x);
        for m in [-2.5, -0.5, 0.25, 1.0, 7.0] {
            audit.checked += 1;
            let shifted = r.evaluate(&x.shift(m));
            if (shifted - rx - m).abs() > tol * (1.0 + m.abs() + rx.abs()) {
                audit
                    .violations
                    .push(format!("cash additivity: R({x} + {m}) = {shifted}, R(X) + m = {}", rx + m));
            }
            if m > 0.0 && shifted + tol < rx {
                audit.violations.push(format!("monotonicity: R({x} + {m}) < R(X)"));
            }
        }
        if homogeneous {
            for lambda in [0.5, 2.0, 10.0] {
                audit.checked += 1;
                let scaled = r.evaluate(&x.scale(lambda).expect("positive"));
                if (scaled - lambda * rx).abs() > tol * (1.0 + lambda * rx.abs()) {
                    audit
                        .violations
                        .push(format!("homogeneity: R({lambda}·{x}) = {scaled}, λR(X) = {}", lambda * rx));
                }
            }
        }
    }
    for x in corpus {
        for y in corpus {
            let lo = x.min(y).expect("same space");
            audit.checked += 1;
            if r.evaluate(&lo) > r.evaluate(x) + tol {
                audit
                    .violations
                    .push(format!("monotonicity: R({lo}) > R({x}) although {lo} ≤ {x}"));
            }
        }
    }
    audit
}
