//! Distortion functions `T: [0,1] → [0,1]` with `T(0)=0`, `T(1)=1`.
//!
//! Closed forms, piecewise-linear knot lists and step functions are exact;
//! custom closures are audited on a grid.

mod density;
mod extraction;
mod shape;

pub use density::{check_minorant, density_es, density_quantile, DensityProfile, MinorantReport};
pub use extraction::{
    extract_distortion, has_ordered_subset, DistortionExtraction, LawInvarianceViolation,
    OrderedSubset,
};
pub use shape::{
    is_concave, is_star_shaped, star_condition, star_shaped_envelope, two_chord_decomposition,
    ShapeReport,
};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{float_threshold, unit_grid};

/// Default resolution of the `[0,1]` grid used by shape checks.
pub const DEFAULT_RESOLUTION: usize = 1024;

type Curve = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Concrete representation of a distortion function.
#[derive(Clone)]
pub enum DistortionKind {
    Identity,
    Sqrt,
    /// `p^γ`, `γ > 0`
    Power(f64),
    /// `p + (√p − p)/40`
    CaseStudy,
    /// `min(s·p, 1)`, `s ≥ 1`
    Capped(f64),
    /// Linear interpolation between sorted knots from `(0,0)` to `(1,1)`.
    PiecewiseLinear(Vec<(f64, f64)>),
    /// Constant between knots. Right-continuous steps take the value of the
    /// last knot `≤ p`, left-continuous ones the value of the first knot `≥ p`.
    Step {
        knots: Vec<(f64, f64)>,
        right_continuous: bool,
    },
    Custom { name: String, f: Curve },
}

impl fmt::Debug for DistortionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => write!(f, "Identity"),
            Self::Sqrt => write!(f, "Sqrt"),
            Self::Power(g) => write!(f, "Power({g})"),
            Self::CaseStudy => write!(f, "CaseStudy"),
            Self::Capped(s) => write!(f, "Capped({s})"),
            Self::PiecewiseLinear(k) => write!(f, "PiecewiseLinear({k:?})"),
            Self::Step {
                knots,
                right_continuous,
            } => write!(f, "Step({knots:?}, right_continuous={right_continuous})"),
            Self::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// A validated distortion function.
#[derive(Debug, Clone)]
pub struct DistortionFunction {
    kind: DistortionKind,
    nondecreasing: bool,
}

impl DistortionFunction {
    pub fn identity() -> Self {
        Self::trusted(DistortionKind::Identity)
    }

    pub fn sqrt() -> Self {
        Self::trusted(DistortionKind::Sqrt)
    }

    pub fn power(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidDistortion(format!("power exponent {gamma} must be positive")));
        }
        Ok(Self::trusted(DistortionKind::Power(gamma)))
    }

    /// `T(p) = p + (√p − p)/40`.
    pub fn case_study() -> Self {
        Self::trusted(DistortionKind::CaseStudy)
    }

    /// `T(p) = min(slope·p, 1)`.
    pub fn capped(slope: f64) -> Result<Self> {
        if !(slope >= 1.0 && slope.is_finite()) {
            return Err(Error::InvalidDistortion(format!("slope {slope} must be at least 1")));
        }
        Ok(Self::trusted(DistortionKind::Capped(slope)))
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        validate_knots(&knots)?;
        let nondecreasing = knots.windows(2).all(|w| w[0].1 <= w[1].1);
        Ok(Self {
            kind: DistortionKind::PiecewiseLinear(knots),
            nondecreasing,
        })
    }

    /// A step function; knots must start at `p=0` and end at `p=1`.
    pub fn step(knots: Vec<(f64, f64)>, right_continuous: bool) -> Result<Self> {
        validate_knots(&knots)?;
        let nondecreasing = knots.windows(2).all(|w| w[0].1 <= w[1].1);
        Ok(Self {
            kind: DistortionKind::Step {
                knots,
                right_continuous,
            },
            nondecreasing,
        })
    }

    /// A user curve; range and endpoints are audited on a grid of
    /// [`DEFAULT_RESOLUTION`] cells, monotonicity is recorded as a flag.
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let f: Curve = Arc::new(f);
        if f(0.0) != 0.0 || f(1.0) != 1.0 {
            return Err(Error::InvalidDistortion(format!(
                "custom distortion needs T(0)=0 and T(1)=1, got {} and {}",
                f(0.0),
                f(1.0)
            )));
        }
        let grid = unit_grid(DEFAULT_RESOLUTION);
        let values: Vec<f64> = grid.iter().map(|&p| f(p)).collect();
        if let Some(i) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidDistortion(format!(
                "T({}) = {} outside [0,1]",
                grid[i], values[i]
            )));
        }
        let nondecreasing = values.windows(2).all(|w| w[0] <= w[1]);
        Ok(Self {
            kind: DistortionKind::Custom {
                name: name.into(),
                f,
            },
            nondecreasing,
        })
    }

    fn trusted(kind: DistortionKind) -> Self {
        Self {
            kind,
            nondecreasing: true,
        }
    }

    pub fn kind(&self) -> &DistortionKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            DistortionKind::Identity => "identity".into(),
            DistortionKind::Sqrt => "sqrt".into(),
            DistortionKind::Power(g) => format!("power({g})"),
            DistortionKind::CaseStudy => "case_study".into(),
            DistortionKind::Capped(s) => format!("capped({s})"),
            DistortionKind::PiecewiseLinear(k) => format!("piecewise_linear({} knots)", k.len()),
            DistortionKind::Step { knots, .. } => format!("step({} knots)", knots.len()),
            DistortionKind::Custom { name, .. } => name.clone(),
        }
    }

    /// Whether `T` is nondecreasing: exact for closed forms and knot lists,
    /// grid-based for custom curves.
    pub fn is_nondecreasing(&self) -> bool {
        self.nondecreasing
    }

    /// `Some(true)` if `T` is lower semicontinuous, `None` for custom curves.
    ///
    /// Continuous representations qualify. A nondecreasing step is lower
    /// semicontinuous exactly when it is left-continuous at every upward jump.
    pub fn is_lower_semicontinuous(&self) -> Option<bool> {
        match &self.kind {
            DistortionKind::Step {
                knots,
                right_continuous,
            } => {
                // right-continuous: upward jumps break it; left-continuous: downward ones
                Some(knots.windows(2).all(|w| {
                    if *right_continuous {
                        w[1].1 <= w[0].1
                    } else {
                        w[1].1 >= w[0].1
                    }
                }))
            }
            DistortionKind::Custom { .. } => None,
            _ => Some(true),
        }
    }

    /// `T(p)`; arguments are clamped to `[0,1]`.
    pub fn eval(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match &self.kind {
            DistortionKind::Identity => p,
            DistortionKind::Sqrt => p.sqrt(),
            DistortionKind::Power(g) => p.powf(*g),
            DistortionKind::CaseStudy => p + (p.sqrt() - p) / 40.0,
            DistortionKind::Capped(s) => (s * p).min(1.0),
            DistortionKind::PiecewiseLinear(knots) => interpolate(knots, p),
            DistortionKind::Step {
                knots,
                right_continuous,
            } => step_value(knots, p, *right_continuous),
            DistortionKind::Custom { f, .. } => f(p),
        }
    }

    /// Left derivative `T′(p)` for `p ∈ (0,1]`; zero for steps.
    pub fn left_slope(&self, p: f64) -> f64 {
        match &self.kind {
            DistortionKind::Identity => 1.0,
            DistortionKind::Sqrt => 0.5 / p.sqrt(),
            DistortionKind::Power(g) => g * p.powf(g - 1.0),
            DistortionKind::CaseStudy => 1.0 + (0.5 / p.sqrt() - 1.0) / 40.0,
            DistortionKind::Capped(s) => {
                if s * p <= 1.0 {
                    *s
                } else {
                    0.0
                }
            }
            DistortionKind::PiecewiseLinear(knots) => {
                let i = knots.partition_point(|k| k.0 < p).clamp(1, knots.len() - 1);
                let (a, b) = (knots[i - 1], knots[i]);
                (b.1 - a.1) / (b.0 - a.0)
            }
            DistortionKind::Step { .. } => 0.0,
            DistortionKind::Custom { f, .. } => {
                let h = 1e-7_f64.min(p);
                (f(p) - f(p - h)) / h
            }
        }
    }

    /// Knot abscissae for piecewise representations, empty otherwise.
    pub fn knots(&self) -> Vec<(f64, f64)> {
        match &self.kind {
            DistortionKind::PiecewiseLinear(k) | DistortionKind::Step { knots: k, .. } => {
                k.clone()
            }
            _ => Vec::new(),
        }
    }

    pub fn to_spec(&self) -> Option<DistortionSpec> {
        Some(match &self.kind {
            DistortionKind::Identity => DistortionSpec::Identity,
            DistortionKind::Sqrt => DistortionSpec::Sqrt,
            DistortionKind::Power(gamma) => DistortionSpec::Power { gamma: *gamma },
            DistortionKind::CaseStudy => DistortionSpec::CaseStudy,
            DistortionKind::Capped(slope) => DistortionSpec::Capped { slope: *slope },
            DistortionKind::PiecewiseLinear(k) => DistortionSpec::PiecewiseLinear {
                knots: k.iter().map(|&(p, v)| [p, v]).collect(),
            },
            DistortionKind::Step {
                knots,
                right_continuous,
            } => DistortionSpec::Step {
                knots: knots.iter().map(|&(p, v)| [p, v]).collect(),
                right_continuous: *right_continuous,
            },
            DistortionKind::Custom { .. } => return None,
        })
    }
}

/// Margin of conservatism `T(p)/p − 1`.
pub fn moc(t: &DistortionFunction, p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: format!("{p} not in (0,1]"),
        });
    }
    Ok(t.eval(p) / p - 1.0)
}

/// A float representative of `T^{-1}(a) = inf{b ∈ [0,1] : T(b) > a}`, with
/// `inf ∅ = 1`, for nondecreasing `T`.
///
/// Let `b*` be the smallest float with `T(b*) > a`. When `T` is lower
/// semicontinuous the set `{T > a}` is open, so the infimum lies below `b*`
/// and the largest float with `T(b) ≤ a` is returned; otherwise `b*` itself.
/// For float arguments `p` this makes `p ≤ T^{-1}(a) ⇔ T(p) ≤ a` whenever
/// `T` is lower semicontinuous.
pub fn generalized_inverse(t: &DistortionFunction, a: f64) -> Result<f64> {
    if !t.is_nondecreasing() {
        return Err(Error::InvalidDistortion(format!(
            "generalized inverse needs a nondecreasing T, got {}",
            t.name()
        )));
    }
    if a < 0.0 {
        return Ok(0.0);
    }
    if t.eval(1.0) <= a {
        return Ok(1.0);
    }
    let first = float_threshold(0.0, 1.0, |b| t.eval(b) > a);
    if t.is_lower_semicontinuous() == Some(false) {
        Ok(first)
    } else {
        Ok(prev_float(first))
    }
}

fn prev_float(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        f64::from_bits(x.to_bits() - 1)
    }
}

fn validate_knots(knots: &[(f64, f64)]) -> Result<()> {
    if knots.len() < 2 {
        return Err(Error::InvalidDistortion("need at least two knots".into()));
    }
    if knots[0] != (0.0, 0.0) {
        return Err(Error::InvalidDistortion(format!(
            "first knot must be (0,0), got {:?}",
            knots[0]
        )));
    }
    let last = knots[knots.len() - 1];
    if last != (1.0, 1.0) {
        return Err(Error::InvalidDistortion(format!(
            "last knot must be (1,1), got {last:?}"
        )));
    }
    for w in knots.windows(2) {
        if !(w[0].0 < w[1].0) {
            return Err(Error::InvalidDistortion(format!(
                "knot abscissae must increase strictly: {} then {}",
                w[0].0, w[1].0
            )));
        }
    }
    if let Some(k) = knots
        .iter()
        .find(|k| !k.1.is_finite() || !(0.0..=1.0).contains(&k.1))
    {
        return Err(Error::InvalidDistortion(format!(
            "knot value {} outside [0,1]",
            k.1
        )));
    }
    Ok(())
}

/// Linear interpolation; exact knot values at knot abscissae.
fn interpolate(knots: &[(f64, f64)], p: f64) -> f64 {
    let i = knots.partition_point(|k| k.0 < p);
    if i < knots.len() && knots[i].0 == p {
        return knots[i].1;
    }
    let (a, b) = (knots[i - 1], knots[i]);
    a.1 + (b.1 - a.1) * (p - a.0) / (b.0 - a.0)
}

fn step_value(knots: &[(f64, f64)], p: f64, right_continuous: bool) -> f64 {
    if right_continuous {
        let i = knots.partition_point(|k| k.0 <= p);
        knots[i - 1].1
    } else {
        let i = knots.partition_point(|k| k.0 < p);
        knots[i].1
    }
}

/// JSON form of a distortion: a named closed form or a knot list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistortionSpec {
    Identity,
    Sqrt,
    Power {
        gamma: f64,
    },
    CaseStudy,
    Capped {
        slope: f64,
    },
    PiecewiseLinear {
        knots: Vec<[f64; 2]>,
    },
    Step {
        knots: Vec<[f64; 2]>,
        #[serde(default = "default_true")]
        right_continuous: bool,
    },
}

fn default_true() -> bool {
    true
}

impl DistortionSpec {
    pub fn build(&self) -> Result<DistortionFunction> {
        let pairs = |k: &[[f64; 2]]| k.iter().map(|&[p, v]| (p, v)).collect();
        match self {
            Self::Identity => Ok(DistortionFunction::identity()),
            Self::Sqrt => Ok(DistortionFunction::sqrt()),
            Self::Power { gamma } => DistortionFunction::power(*gamma),
            Self::CaseStudy => Ok(DistortionFunction::case_study()),
            Self::Capped { slope } => DistortionFunction::capped(*slope),
            Self::PiecewiseLinear { knots } => DistortionFunction::piecewise_linear(pairs(knots)),
            Self::Step {
                knots,
                right_continuous,
            } => DistortionFunction::step(pairs(knots), *right_continuous),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moc_examples() {
        assert_eq!(moc(&DistortionFunction::sqrt(), 0.25).unwrap(), 1.0);
        for p in [0.01, 0.3, 0.77, 1.0] {
            assert_eq!(moc(&DistortionFunction::identity(), p).unwrap(), 0.0);
        }
        let t = DistortionFunction::case_study();
        // 0.04 + (0.2 - 0.04)/40 = 0.044
        assert!((t.eval(0.04) - 0.044).abs() < 1e-15);
        assert!((moc(&t, 0.04).unwrap() - 0.1).abs() < 1e-12);
        assert!(moc(&t, 0.0).is_err());
        assert!(moc(&t, -0.5).is_err());
    }

    #[test]
    fn generalized_inverse_examples() {
        let sq = DistortionFunction::power(2.0).unwrap();
        assert_eq!(generalized_inverse(&sq, 0.25).unwrap(), 0.5);
        let step = DistortionFunction::step(vec![(0.0, 0.0), (0.5, 1.0), (1.0, 1.0)], true).unwrap();
        assert_eq!(step.is_lower_semicontinuous(), Some(false));
        assert_eq!(generalized_inverse(&step, 0.3).unwrap(), 0.5);
        let left = DistortionFunction::step(vec![(0.0, 0.0), (0.5, 0.0), (1.0, 1.0)], false).unwrap();
        assert_eq!(left.is_lower_semicontinuous(), Some(true));
        assert_eq!(left.eval(0.5), 0.0);
        assert_eq!(generalized_inverse(&left, 0.3).unwrap(), 0.5);
        let id = DistortionFunction::identity();
        assert_eq!(generalized_inverse(&id, 0.3).unwrap(), 0.3);
        assert_eq!(generalized_inverse(&id, 1.0).unwrap(), 1.0);
        assert_eq!(generalized_inverse(&id, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn knot_validation() {
        assert!(DistortionFunction::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0)]).is_ok());
        assert!(DistortionFunction::piecewise_linear(vec![(0.0, 0.1), (1.0, 1.0)]).is_err());
        assert!(DistortionFunction::piecewise_linear(vec![(0.0, 0.0), (0.5, 1.2), (1.0, 1.0)]).is_err());
        assert!(DistortionFunction::piecewise_linear(vec![(0.0, 0.0), (0.5, 0.2), (0.5, 0.3), (1.0, 1.0)]).is_err());
        let t = DistortionFunction::piecewise_linear(vec![(0.0, 0.0), (0.3, 0.6), (0.7, 0.4), (1.0, 1.0)]).unwrap();
        assert!(!t.is_nondecreasing());
        assert!(DistortionFunction::custom("bad", |p| 2.0 * p).is_err());
    }

    #[test]
    fn piecewise_linear_evaluation() {
        let t = DistortionFunction::piecewise_linear(vec![(0.0, 0.0), (0.25, 0.5), (1.0, 1.0)]).unwrap();
        assert_eq!(t.eval(0.25), 0.5);
        assert_eq!(t.eval(0.125), 0.25);
        assert!((t.eval(0.625) - 0.75).abs() < 1e-15);
        assert_eq!(t.left_slope(0.25), 2.0);
        assert!((t.left_slope(0.5) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn spec_roundtrip() {
        let specs = [
            r#"{"kind":"sqrt"}"#,
            r#"{"kind":"power","gamma":2}"#,
            r#"{"kind":"piecewise_linear","knots":[[0,0],[0.5,0.8],[1,1]]}"#,
            r#"{"kind":"step","knots":[[0,0],[0.5,1],[1,1]]}"#,
        ];
        for s in specs {
            let spec: DistortionSpec = serde_json::from_str(s).unwrap();
            let t = spec.build().unwrap();
            assert_eq!(t.to_spec().unwrap(), spec);
        }
    }
}
