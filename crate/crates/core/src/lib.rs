//! Default risk measures on finite probability spaces.
//!
//! A default risk measure maps a customer `X` (positive values mean default)
//! to a number in `[0,1]`. The crate provides the standard constructors,
//! the ρ-value-at-risk bridge to monetary risk measures, capacities and
//! their Choquet integrals, distortion functions, corpus-based property
//! checkers, and the IRB risk-weight layer.
//!
//! ```
//! use defrisk::{DefaultRiskMeasure, DistortionFunction, ProbabilityMeasure, RandomVariable};
//!
//! let p = ProbabilityMeasure::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
//! let x = RandomVariable::from_slice(&[-1.0, 0.0, 2.0, 5.0]);
//! assert!((DefaultRiskMeasure::pd(p.clone()).evaluate(&x) - 0.3).abs() < 1e-15);
//! let rho = DefaultRiskMeasure::distorted_pd(p, DistortionFunction::sqrt());
//! assert!((rho.evaluate(&x) - 0.3f64.sqrt()).abs() < 1e-15);
//! ```

pub mod capacity;
pub mod checks;
pub mod config;
pub mod corpus;
pub mod distortion;
pub mod error;
pub mod measure;
pub mod monetary;
pub mod numeric;
pub mod regulatory;
pub mod space;
pub mod var;

pub use capacity::{Capacity, CapacityDocument, CoherentEnvelope, TwoAlternatingReport};
pub use checks::{
    check_axioms, check_invariance, equivalence_suite, AxiomReport, EquivalenceReport, InvarianceKind,
    InvarianceReport, InvarianceWitness, Violation,
};
pub use config::{MeasureSpec, RegulatoryConfig, RiskSpec};
pub use distortion::{moc, DistortionFunction, DistortionSpec};
pub use error::{Error, Result};
pub use measure::{extend, extend_sup, DefaultRiskMeasure, MonotoneMap};
pub use monetary::MonetaryRiskMeasure;
pub use regulatory::{rwa, rwa_with_sign, MocPolicy, RatingSystem, SignConvention};
pub use space::{Event, FiniteSpace, ProbabilityMeasure, RandomVariable, SpaceDocument};
pub use var::{quantile_family, recover_drm, rho_var, GeneralizedQuantileFamily};
