//! JSON constructor blocks for measures and regulatory runs.
//!
//! Every measure block carries a `kind` tag; probability weights default to
//! the reference measure of the surrounding space when omitted.

use serde::{Deserialize, Serialize};

use crate::capacity::{Capacity, CapacityDocument};
use crate::distortion::DistortionSpec;
use crate::error::{Error, Result};
use crate::measure::{extend, extend_sup, DefaultRiskMeasure, MonotoneMap};
use crate::monetary::MonetaryRiskMeasure;
use crate::regulatory::{nonmonotone_scenario, MocPolicy, RatingSystem};
use crate::space::{ProbabilityMeasure, RandomVariable};

fn measure_from(weights: &Option<Vec<f64>>, reference: &ProbabilityMeasure) -> Result<ProbabilityMeasure> {
    match weights {
        None => Ok(reference.clone()),
        Some(w) => {
            if w.len() != reference.dim() {
                return Err(Error::DimensionMismatch {
                    expected: reference.dim(),
                    found: w.len(),
                });
            }
            ProbabilityMeasure::new(w.clone())
        }
    }
}

fn measures_from(list: &[Vec<f64>], reference: &ProbabilityMeasure) -> Result<Vec<ProbabilityMeasure>> {
    list.iter().map(|w| measure_from(&Some(w.clone()), reference)).collect()
}

fn roster_from(list: &[Vec<f64>], n: usize) -> Result<Vec<RandomVariable>> {
    list.iter()
        .map(|v| {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            RandomVariable::new(v.clone())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RiskSpec {
    Expectation {
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    Var {
        #[serde(default)]
        weights: Option<Vec<f64>>,
        alpha: f64,
    },
    Es {
        #[serde(default)]
        weights: Option<Vec<f64>>,
        level: f64,
    },
    Choquet {
        capacity: CapacityDocument,
    },
    Sup,
}

impl RiskSpec {
    pub fn build(&self, reference: &ProbabilityMeasure) -> Result<MonetaryRiskMeasure> {
        match self {
            Self::Expectation { weights } => Ok(MonetaryRiskMeasure::expectation(measure_from(weights, reference)?)),
            Self::Var { weights, alpha } => {
                MonetaryRiskMeasure::value_at_risk(measure_from(weights, reference)?, *alpha)
            }
            Self::Es { weights, level } => {
                MonetaryRiskMeasure::expected_shortfall(measure_from(weights, reference)?, *level)
            }
            Self::Choquet { capacity } => {
                let c = Capacity::from_document(capacity)?;
                if c.dim() != reference.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: reference.dim(),
                        found: c.dim(),
                    });
                }
                Ok(MonetaryRiskMeasure::Choquet(c))
            }
            Self::Sup => Ok(MonetaryRiskMeasure::Sup),
        }
    }

    fn build_map(&self, reference: &ProbabilityMeasure) -> Result<MonotoneMap> {
        match self {
            Self::Sup => Ok(MonotoneMap::Sup),
            other => Ok(MonotoneMap::Monetary(other.build(reference)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    Pd {
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    DistortedPd {
        #[serde(default)]
        weights: Option<Vec<f64>>,
        distortion: DistortionSpec,
    },
    WorstCasePd {
        measures: Vec<Vec<f64>>,
    },
    FromRiskMeasure {
        risk: RiskSpec,
    },
    Binary {
        risk: RiskSpec,
    },
    WarningSignal {
        base: Box<MeasureSpec>,
        conservative: Box<MeasureSpec>,
        gamma: f64,
    },
    IncreasingConservatism {
        measures: Vec<Vec<f64>>,
        thresholds: Vec<f64>,
        risk: RiskSpec,
    },
    Capacity {
        capacity: CapacityDocument,
    },
    Extend {
        base: Box<MeasureSpec>,
        roster: Vec<Vec<f64>>,
        map: RiskSpec,
    },
    ExtendSup {
        base: Box<MeasureSpec>,
        roster: Vec<Vec<f64>>,
    },
    /// `P(X > 0) + shift`: violates the axioms for `shift ≠ 0`; meant for
    /// exercising the checkers.
    ShiftedPd {
        #[serde(default)]
        weights: Option<Vec<f64>>,
        shift: f64,
    },
}

impl MeasureSpec {
    pub fn build(&self, reference: &ProbabilityMeasure) -> Result<DefaultRiskMeasure> {
        let n = reference.dim();
        match self {
            Self::Pd { weights } => Ok(DefaultRiskMeasure::pd(measure_from(weights, reference)?)),
            Self::DistortedPd { weights, distortion } => Ok(DefaultRiskMeasure::distorted_pd(
                measure_from(weights, reference)?,
                distortion.build()?,
            )),
            Self::WorstCasePd { measures } => DefaultRiskMeasure::worst_case_pd(measures_from(measures, reference)?),
            Self::FromRiskMeasure { risk } => Ok(DefaultRiskMeasure::from_risk_measure(risk.build(reference)?)),
            Self::Binary { risk } => Ok(DefaultRiskMeasure::binary(risk.build(reference)?)),
            Self::WarningSignal {
                base,
                conservative,
                gamma,
            } => DefaultRiskMeasure::warning_signal(base.build(reference)?, conservative.build(reference)?, *gamma),
            Self::IncreasingConservatism {
                measures,
                thresholds,
                risk,
            } => DefaultRiskMeasure::increasing_conservatism(
                measures_from(measures, reference)?,
                thresholds.clone(),
                risk.build(reference)?,
            ),
            Self::Capacity { capacity } => {
                let c = Capacity::from_document(capacity)?;
                if c.dim() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: c.dim(),
                    });
                }
                Ok(DefaultRiskMeasure::from_capacity(c))
            }
            Self::Extend { base, roster, map } => extend(
                &base.build(reference)?,
                &roster_from(roster, n)?,
                map.build_map(reference)?,
            ),
            Self::ExtendSup { base, roster } => extend_sup(&base.build(reference)?, &roster_from(roster, n)?),
            Self::ShiftedPd { weights, shift } => {
                let p = measure_from(weights, reference)?;
                let shift = *shift;
                Ok(DefaultRiskMeasure::custom(format!("ShiftedPd({shift})"), move |x| {
                    p.pd(x) + shift
                }))
            }
        }
    }
}

/// PDs of the rating classes: an explicit increasing list or a geometric scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassSpec {
    List(Vec<f64>),
    Geometric { first: f64, ratio: f64, count: usize },
}

impl Default for ClassSpec {
    fn default() -> Self {
        Self::Geometric {
            first: 1e-4,
            ratio: 1.5,
            count: 22,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicySpec {
    Constant { moc: f64 },
    Distortion { distortion: DistortionSpec },
    /// The distortion of [`nonmonotone_scenario`] on the configured classes.
    NonmonotoneScenario,
}

impl PolicySpec {
    pub fn build(&self, rs: &RatingSystem) -> Result<MocPolicy> {
        match self {
            Self::Constant { moc } => MocPolicy::constant(*moc),
            Self::Distortion { distortion } => MocPolicy::distortion(distortion.build()?),
            Self::NonmonotoneScenario => MocPolicy::distortion(nonmonotone_scenario(rs)?),
        }
    }
}

fn default_ead() -> f64 {
    1.0
}

fn default_lgd() -> f64 {
    0.4
}

fn default_policies() -> Vec<PolicySpec> {
    vec![
        PolicySpec::Distortion {
            distortion: DistortionSpec::CaseStudy,
        },
        PolicySpec::Constant { moc: 0.52 },
    ]
}

/// `{ "classes": .., "ead": .., "lgd": .., "policies": [a, b] }`; every field
/// has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegulatoryConfig {
    #[serde(default)]
    pub classes: ClassSpec,
    #[serde(default = "default_ead")]
    pub ead: f64,
    #[serde(default = "default_lgd")]
    pub lgd: f64,
    #[serde(default = "default_policies")]
    pub policies: Vec<PolicySpec>,
}

impl Default for RegulatoryConfig {
    fn default() -> Self {
        Self {
            classes: ClassSpec::default(),
            ead: default_ead(),
            lgd: default_lgd(),
            policies: default_policies(),
        }
    }
}

impl RegulatoryConfig {
    pub fn rating_system(&self) -> Result<RatingSystem> {
        match &self.classes {
            ClassSpec::List(pds) => {
                RatingSystem::new(pds.iter().enumerate().map(|(i, p)| (i + 1, *p)).collect(), self.ead, self.lgd)
            }
            ClassSpec::Geometric { first, ratio, count } => {
                RatingSystem::geometric(*first, *ratio, *count, self.ead, self.lgd)
            }
        }
    }

    /// The two policies compared by the case study.
    pub fn policies(&self, rs: &RatingSystem) -> Result<(MocPolicy, MocPolicy)> {
        match self.policies.as_slice() {
            [a, b] => Ok((a.build(rs)?, b.build(rs)?)),
            other => Err(Error::Config(format!(
                "a case study compares exactly two policies, got {}",
                other.len()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> ProbabilityMeasure {
        ProbabilityMeasure::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap()
    }

    #[test]
    fn builds_from_json() {
        let spec: MeasureSpec =
            serde_json::from_str(r#"{"kind":"distorted_pd","distortion":{"kind":"sqrt"}}"#).unwrap();
        let rho = spec.build(&reference()).unwrap();
        let x = RandomVariable::from_slice(&[-1.0, 0.0, 2.0, 5.0]);
        assert!((rho.evaluate(&x) - 0.3f64.sqrt()).abs() < 1e-15);

        let spec: MeasureSpec = serde_json::from_str(
            r#"{"kind":"warning_signal","gamma":1,
                "base":{"kind":"pd"},
                "conservative":{"kind":"worst_case_pd","measures":[[0.4,0.3,0.2,0.1],[0.25,0.25,0.25,0.25]]}}"#,
        )
        .unwrap();
        assert!(spec.build(&reference()).is_ok());
    }

    #[test]
    fn rejects_bad_blocks() {
        let bad: MeasureSpec = serde_json::from_str(r#"{"kind":"pd","weights":[0.5,0.5]}"#).unwrap();
        assert!(matches!(bad.build(&reference()), Err(Error::DimensionMismatch { .. })));
        assert!(serde_json::from_str::<MeasureSpec>(r#"{"kind":"nope"}"#).is_err());
    }

    #[test]
    fn spec_roundtrip() {
        let spec = MeasureSpec::Extend {
            base: Box::new(MeasureSpec::Pd { weights: None }),
            roster: vec![vec![0.0, 0.0, 2.0, 5.0]],
            map: RiskSpec::Sup,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<MeasureSpec>(&text).unwrap(), spec);
    }

    #[test]
    fn regulatory_defaults() {
        let cfg: RegulatoryConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, RegulatoryConfig::default());
        let rs = cfg.rating_system().unwrap();
        assert_eq!(rs.classes().len(), 22);
        assert!(cfg.policies(&rs).is_ok());
        let cfg: RegulatoryConfig =
            serde_json::from_str(r#"{"classes":[0.01,0.02],"policies":[{"kind":"constant","moc":0.1}]}"#).unwrap();
        let rs = cfg.rating_system().unwrap();
        assert!(cfg.policies(&rs).is_err());
    }
}
