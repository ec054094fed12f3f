//! Default risk measures: monotone maps `ϱ: C → [0,1]` with `ϱ(0) = 0` and
//! `ϱ(m) = 1` for constants `m > 0`.
//!
//! Constructors do not assume the axioms; [`check_axioms`](crate::checks::check_axioms)
//! audits them on a corpus.

mod extension;

pub use extension::{
    extend, extend_sup, CompatibilityViolation, Extension, ExtensionValue, MonotoneMap, SupExtension,
};

use std::fmt;
use std::sync::Arc;

use crate::capacity::Capacity;
use crate::distortion::DistortionFunction;
use crate::error::{invalid, Error, Result};
use crate::monetary::MonetaryRiskMeasure;
use crate::space::{ProbabilityMeasure, RandomVariable};
use crate::var::GeneralizedQuantileFamily;

type Evaluator = Arc<dyn Fn(&RandomVariable) -> f64 + Send + Sync>;

/// A default risk measure together with its construction.
#[derive(Clone)]
pub enum DefaultRiskMeasure {
    /// `P(X > 0)`
    Pd(ProbabilityMeasure),
    /// `T(P(X > 0))`
    DistortedPd {
        measure: ProbabilityMeasure,
        distortion: DistortionFunction,
    },
    /// `max_i Q_i(X > 0)`
    WorstCasePd(Vec<ProbabilityMeasure>),
    /// `R(1{X>0})`
    FromRiskMeasure(MonetaryRiskMeasure),
    /// `0` if `R(X) ≤ 0`, else `1`
    Binary(MonetaryRiskMeasure),
    /// `ϱ₀(X)` if `ϱ_c(X − 1/γ) = 0`, else `ϱ_c(X)`
    WarningSignal {
        base: Box<DefaultRiskMeasure>,
        conservative: Box<DefaultRiskMeasure>,
        gamma: f64,
    },
    /// `0` if `R(X) ≤ 0`, else `max{Q_i(X > 0) : α_i ≤ R(X)}`
    IncreasingConservatism {
        measures: Vec<ProbabilityMeasure>,
        thresholds: Vec<f64>,
        risk: MonetaryRiskMeasure,
    },
    /// `c({X > 0})`
    Capacity(Capacity),
    Extension(Arc<Extension>),
    ExtensionSup(Arc<SupExtension>),
    /// `inf({α : R^α(X) ≤ 0} ∪ {1})`
    Recovered(Arc<GeneralizedQuantileFamily>),
    Custom {
        name: String,
        f: Evaluator,
        indicator_representable: bool,
    },
}

impl fmt::Debug for DefaultRiskMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl DefaultRiskMeasure {
    pub fn pd(p: ProbabilityMeasure) -> Self {
        Self::Pd(p)
    }

    /// Accepts any distortion with values in `[0,1]`; a nonmonotone `T` gives
    /// a map that is not a default risk measure, which
    /// [`is_monotone_by_construction`](Self::is_monotone_by_construction) reports.
    pub fn distorted_pd(p: ProbabilityMeasure, t: DistortionFunction) -> Self {
        Self::DistortedPd {
            measure: p,
            distortion: t,
        }
    }

    pub fn worst_case_pd(measures: Vec<ProbabilityMeasure>) -> Result<Self> {
        let Some(first) = measures.first() else {
            return Err(invalid("measures", "worst-case PD needs at least one measure"));
        };
        check_same_dim(first.dim(), measures.iter().map(|q| q.dim()))?;
        Ok(Self::WorstCasePd(measures))
    }

    pub fn from_risk_measure(r: MonetaryRiskMeasure) -> Self {
        Self::FromRiskMeasure(r)
    }

    pub fn binary(r: MonetaryRiskMeasure) -> Self {
        Self::Binary(r)
    }

    pub fn warning_signal(base: Self, conservative: Self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid("gamma", format!("{gamma} must be positive")));
        }
        Ok(Self::WarningSignal {
            base: Box::new(base),
            conservative: Box::new(conservative),
            gamma,
        })
    }

    pub fn increasing_conservatism(
        measures: Vec<ProbabilityMeasure>,
        thresholds: Vec<f64>,
        risk: MonetaryRiskMeasure,
    ) -> Result<Self> {
        if measures.is_empty() || measures.len() != thresholds.len() {
            return Err(invalid(
                "thresholds",
                format!("{} measures but {} thresholds", measures.len(), thresholds.len()),
            ));
        }
        check_same_dim(measures[0].dim(), measures.iter().map(|q| q.dim()))?;
        if let Some(a) = thresholds.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return Err(invalid("thresholds", format!("{a} is not a nonnegative real")));
        }
        let min = thresholds.iter().copied().fold(f64::INFINITY, f64::min);
        if min != 0.0 {
            return Err(invalid("thresholds", format!("smallest threshold is {min}, must be 0")));
        }
        Ok(Self::IncreasingConservatism {
            measures,
            thresholds,
            risk,
        })
    }

    pub fn from_capacity(c: Capacity) -> Self {
        Self::Capacity(c)
    }

    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(&RandomVariable) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::Custom {
            name: name.into(),
            f: Arc::new(f),
            indicator_representable: false,
        }
    }

    /// A custom evaluator known to satisfy `ϱ(X) = ϱ(1{X>0})`; enables exact
    /// breakpoint scans in [`rho_var`](crate::var::rho_var).
    pub fn custom_indicator(
        name: impl Into<String>,
        f: impl Fn(&RandomVariable) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::Custom {
            name: name.into(),
            f: Arc::new(f),
            indicator_representable: true,
        }
    }

    pub fn evaluate(&self, x: &RandomVariable) -> f64 {
        match self {
            Self::Pd(p) => p.pd(x),
            Self::DistortedPd {
                measure,
                distortion,
            } => distortion.eval(measure.pd(x)),
            Self::WorstCasePd(ms) => ms.iter().map(|q| q.pd(x)).fold(f64::NEG_INFINITY, f64::max),
            Self::FromRiskMeasure(r) => r.evaluate(&x.default_event().indicator()),
            Self::Binary(r) => {
                if r.evaluate(x) <= 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
            Self::WarningSignal {
                base,
                conservative,
                gamma,
            } => {
                if conservative.evaluate(&x.shift(-1.0 / gamma)) == 0.0 {
                    base.evaluate(x)
                } else {
                    conservative.evaluate(x)
                }
            }
            Self::IncreasingConservatism {
                measures,
                thresholds,
                risk,
            } => {
                let r = risk.evaluate(x);
                if r <= 0.0 {
                    return 0.0;
                }
                measures
                    .iter()
                    .zip(thresholds)
                    .filter(|(_, a)| **a <= r)
                    .map(|(q, _)| q.pd(x))
                    .fold(0.0, f64::max)
            }
            Self::Capacity(c) => c.value(&x.default_event()),
            Self::Extension(e) => e.evaluate(x).value,
            Self::ExtensionSup(e) => e.evaluate(x),
            Self::Recovered(family) => family.recover(x),
            Self::Custom { f, .. } => f(x),
        }
    }

    /// [`evaluate`](Self::evaluate) with a dimension check.
    pub fn checked_evaluate(&self, x: &RandomVariable) -> Result<f64> {
        if let Some(n) = self.dim() {
            if x.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: x.dim(),
                });
            }
        }
        Ok(self.evaluate(x))
    }

    /// Number of outcomes, when fixed by the construction.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Pd(p) | Self::DistortedPd { measure: p, .. } => Some(p.dim()),
            Self::WorstCasePd(ms) | Self::IncreasingConservatism { measures: ms, .. } => {
                Some(ms[0].dim())
            }
            Self::Capacity(c) => Some(c.dim()),
            Self::WarningSignal {
                base, conservative, ..
            } => base.dim().or(conservative.dim()),
            Self::Extension(e) => Some(e.dim()),
            Self::ExtensionSup(e) => Some(e.dim()),
            Self::FromRiskMeasure(r) | Self::Binary(r) => monetary_dim(r),
            Self::Recovered(_) | Self::Custom { .. } => None,
        }
    }

    /// Whether the construction guarantees `ϱ(X) = ϱ(1{X>0})`.
    pub fn is_indicator_representable(&self) -> bool {
        match self {
            Self::Pd(_)
            | Self::DistortedPd { .. }
            | Self::WorstCasePd(_)
            | Self::FromRiskMeasure(_)
            | Self::Capacity(_) => true,
            Self::Custom {
                indicator_representable,
                ..
            } => *indicator_representable,
            _ => false,
        }
    }

    /// False for constructions known to break monotonicity (a distorted PD
    /// with a nonmonotone `T`); true otherwise, which is no guarantee.
    pub fn is_monotone_by_construction(&self) -> bool {
        match self {
            Self::DistortedPd { distortion, .. } => distortion.is_nondecreasing(),
            Self::WarningSignal {
                base, conservative, ..
            } => base.is_monotone_by_construction() && conservative.is_monotone_by_construction(),
            _ => true,
        }
    }

    /// Short kind name, as used in configuration files.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Pd(_) => "pd",
            Self::DistortedPd { .. } => "distorted_pd",
            Self::WorstCasePd(_) => "worst_case_pd",
            Self::FromRiskMeasure(_) => "from_risk_measure",
            Self::Binary(_) => "binary",
            Self::WarningSignal { .. } => "warning_signal",
            Self::IncreasingConservatism { .. } => "increasing_conservatism",
            Self::Capacity(_) => "capacity",
            Self::Extension(_) => "extend",
            Self::ExtensionSup(_) => "extend_sup",
            Self::Recovered(_) => "recovered",
            Self::Custom { .. } => "custom",
        }
    }

    /// Kind plus parameters, for reports.
    pub fn describe(&self) -> String {
        match self {
            Self::Pd(p) => format!("pd(P={:?})", p.weights()),
            Self::DistortedPd {
                measure,
                distortion,
            } => format!("distorted_pd(P={:?}, T={})", measure.weights(), distortion.name()),
            Self::WorstCasePd(ms) => format!("worst_case_pd({} measures)", ms.len()),
            Self::FromRiskMeasure(r) => format!("from_risk_measure({})", r.name()),
            Self::Binary(r) => format!("binary({})", r.name()),
            Self::WarningSignal {
                base,
                conservative,
                gamma,
            } => format!(
                "warning_signal({}, {}, γ={gamma})",
                base.describe(),
                conservative.describe()
            ),
            Self::IncreasingConservatism {
                thresholds, risk, ..
            } => format!("increasing_conservatism(α={thresholds:?}, R={})", risk.name()),
            Self::Capacity(c) => format!("capacity(n={})", c.dim()),
            Self::Extension(e) => format!("extend(|C|={}, F={})", e.roster_len(), e.map().name()),
            Self::ExtensionSup(e) => format!("extend_sup(|C|={})", e.roster_len()),
            Self::Recovered(family) => format!("recovered({})", family.name()),
            Self::Custom { name, .. } => format!("custom({name})"),
        }
    }
}

/// Customers where the warning-signal premise `ϱ₀ ≤ ϱ_c` fails.
pub fn warning_order_violations<'a>(
    base: &DefaultRiskMeasure,
    conservative: &DefaultRiskMeasure,
    corpus: &'a [RandomVariable],
) -> Vec<&'a RandomVariable> {
    corpus
        .iter()
        .filter(|x| base.evaluate(x) > conservative.evaluate(x))
        .collect()
}

fn check_same_dim(n: usize, dims: impl Iterator<Item = usize>) -> Result<()> {
    for d in dims {
        if d != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: d,
            });
        }
    }
    Ok(())
}

fn monetary_dim(r: &MonetaryRiskMeasure) -> Option<usize> {
    match r {
        MonetaryRiskMeasure::Expectation(p)
        | MonetaryRiskMeasure::ValueAtRisk { measure: p, .. }
        | MonetaryRiskMeasure::ExpectedShortfall { measure: p, .. } => Some(p.dim()),
        MonetaryRiskMeasure::Choquet(c) => Some(c.dim()),
        MonetaryRiskMeasure::Sup | MonetaryRiskMeasure::Custom { .. } => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Event;

    fn p1() -> ProbabilityMeasure {
        ProbabilityMeasure::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap()
    }

    fn p2() -> ProbabilityMeasure {
        ProbabilityMeasure::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap()
    }

    fn rv(v: &[f64]) -> RandomVariable {
        RandomVariable::from_slice(v)
    }

    fn x() -> RandomVariable {
        rv(&[-1.0, 0.0, 2.0, 5.0])
    }

    #[test]
    fn pd_examples() {
        let rho = DefaultRiskMeasure::pd(p1());
        assert_eq!(rho.evaluate(&x()), 0.2 + 0.1);
        assert_eq!(rho.evaluate(&rv(&[-1.0, 0.0, -3.0, 0.0])), 0.0);
        assert!((rho.evaluate(&RandomVariable::constant(4, 3.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn distorted_pd_examples() {
        let rho = DefaultRiskMeasure::distorted_pd(p1(), DistortionFunction::sqrt());
        assert_eq!(rho.evaluate(&x()), (0.2f64 + 0.1).sqrt());
        assert!((rho.evaluate(&x()) - 0.5477226).abs() < 1e-7);
        let id = DefaultRiskMeasure::distorted_pd(p1(), DistortionFunction::identity());
        assert_eq!(id.evaluate(&x()), DefaultRiskMeasure::pd(p1()).evaluate(&x()));
        let case = DistortionFunction::case_study();
        assert!((case.eval(0.04) - 0.044).abs() < 1e-15);
    }

    #[test]
    fn worst_case_examples() {
        let rho = DefaultRiskMeasure::worst_case_pd(vec![p1(), p2()]).unwrap();
        assert_eq!(rho.evaluate(&x()), (0.2f64 + 0.1).max(0.3 + 0.4));
        assert!(DefaultRiskMeasure::worst_case_pd(vec![]).is_err());
        let single = DefaultRiskMeasure::worst_case_pd(vec![p1()]).unwrap();
        assert_eq!(single.evaluate(&x()), DefaultRiskMeasure::pd(p1()).evaluate(&x()));
        assert_eq!(rho.evaluate(&rv(&[0.0, -1.0, -2.0, 0.0])), 0.0);
    }

    #[test]
    fn from_risk_measure_examples() {
        let rho = DefaultRiskMeasure::from_risk_measure(MonetaryRiskMeasure::expectation(p1()));
        assert_eq!(rho.evaluate(&x()), DefaultRiskMeasure::pd(p1()).evaluate(&x()));
        assert_eq!(rho.evaluate(&rv(&[-2.0, 0.0, 0.0, -1.0])), 0.0);
        assert!((rho.evaluate(&RandomVariable::constant(4, 0.5)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn binary_examples() {
        let uniform = MonetaryRiskMeasure::expectation(ProbabilityMeasure::uniform(2));
        let rho = DefaultRiskMeasure::binary(uniform);
        assert_eq!(rho.evaluate(&rv(&[-3.0, 1.0])), 0.0);
        assert_eq!(rho.evaluate(&rv(&[0.0, 0.0])), 0.0);
        let skewed = ProbabilityMeasure::new(vec![0.1, 0.9]).unwrap();
        let rho = DefaultRiskMeasure::binary(MonetaryRiskMeasure::expectation(skewed));
        assert_eq!(rho.evaluate(&rv(&[-3.0, 1.0])), 1.0);
    }

    #[test]
    fn warning_signal_examples() {
        let base = DefaultRiskMeasure::pd(p1());
        let cons = DefaultRiskMeasure::worst_case_pd(vec![p1(), p2()]).unwrap();
        let rho = DefaultRiskMeasure::warning_signal(base.clone(), cons.clone(), 1.0).unwrap();
        // X - 1 = (-2,-1,1,4) defaults on {ω3,ω4}, so the conservative branch applies
        assert!(cons.evaluate(&x().shift(-1.0)) > 0.0);
        assert_eq!(rho.evaluate(&x()), cons.evaluate(&x()));
        assert_eq!(rho.evaluate(&rv(&[-1.0, 0.0, 0.0, 0.0])), 0.0);
        // sup Y = 0.5 ≤ 1/γ: the base branch applies
        let y = rv(&[-1.0, 0.0, 0.5, 0.25]);
        assert_eq!(rho.evaluate(&y), base.evaluate(&y));
        assert!(DefaultRiskMeasure::warning_signal(base, cons, 0.0).is_err());
    }

    #[test]
    fn increasing_conservatism_examples() {
        let r = MonetaryRiskMeasure::expectation(p1());
        // E_{P1}(X) = -0.4 + 0.4 + 0.5 = 0.5
        let rho = DefaultRiskMeasure::increasing_conservatism(vec![p1(), p2()], vec![0.0, 10.0], r.clone())
            .unwrap();
        assert_eq!(rho.evaluate(&x()), p1().pd(&x()));
        assert_eq!(rho.evaluate(&rv(&[0.0, -1.0, 0.0, 0.0])), 0.0);
        let rho = DefaultRiskMeasure::increasing_conservatism(vec![p1(), p2()], vec![0.0, 0.5], r.clone())
            .unwrap();
        assert_eq!(rho.evaluate(&x()), p2().pd(&x()));
        assert!(DefaultRiskMeasure::increasing_conservatism(vec![p1(), p2()], vec![0.1, 0.5], r).is_err());
    }

    #[test]
    fn capacity_measure_reads_default_event() {
        let c = Capacity::from_table(2, vec![0.0, 0.6, 0.4, 1.0]).unwrap();
        let rho = DefaultRiskMeasure::from_capacity(c);
        assert_eq!(rho.evaluate(&rv(&[3.0, -1.0])), 0.6);
        assert_eq!(rho.evaluate(&Event::full(2).indicator()), 1.0);
    }

    #[test]
    fn checked_evaluate_rejects_dimension() {
        let rho = DefaultRiskMeasure::pd(p1());
        assert!(rho.checked_evaluate(&rv(&[1.0])).is_err());
    }
}
