//! Extending a default risk measure from a finite customer set `C` to all
//! customers.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::monetary::MonetaryRiskMeasure;
use crate::space::RandomVariable;

use super::DefaultRiskMeasure;

type MapFn = Arc<dyn Fn(&RandomVariable) -> f64 + Send + Sync>;

/// A monotone functional `F` with `F(0) = 0` deciding admissibility
/// `F(X − X₀) ≤ 0`.
#[derive(Clone)]
pub enum MonotoneMap {
    Sup,
    Monetary(MonetaryRiskMeasure),
    Custom { name: String, f: MapFn },
}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl MonotoneMap {
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
            Self::Sup => "sup".into(),
            Self::Monetary(r) => r.name(),
            Self::Custom { name, .. } => name.clone(),
        }
    }

    pub fn eval(&self, x: &RandomVariable) -> f64 {
        match self {
            Self::Sup => x.sup(),
            Self::Monetary(r) => r.evaluate(x),
            Self::Custom { f, .. } => f(x),
        }
    }
}

/// `ϱ_F(X)` with provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionValue {
    pub value: f64,
    /// No admissible member of `C` or constant exists; `value` is clamped to 1.
    pub unreachable: bool,
}

/// `ϱ_F(X) = inf{ϱ(X₀) : X₀ ∈ C ∪ ℝ, F(X − X₀) ≤ 0}`.
///
/// Constants enter analytically: `F(X − c)` is nonincreasing in `c`, so the
/// value 0 is admissible iff `F(X) ≤ 0`, and the value 1 iff
/// `F(X − c_max) ≤ 0` with `c_max = max(1, 2·sup X + 1)`.
#[derive(Debug, Clone)]
pub struct Extension {
    n: usize,
    roster: Vec<(RandomVariable, f64)>,
    map: MonotoneMap,
}

/// A pair in `C` with `F(X − Y) ≤ 0` but `ϱ(X) > ϱ(Y)`.
#[derive(Debug, Clone)]
pub struct CompatibilityViolation {
    pub x: RandomVariable,
    pub y: RandomVariable,
    pub rho_x: f64,
    pub rho_y: f64,
}

impl Extension {
    /// Builds from `ϱ` given on `C` as `(X₀, ϱ(X₀))` pairs.
    pub fn from_values(roster: Vec<(RandomVariable, f64)>, map: MonotoneMap, n: usize) -> Result<Self> {
        check_roster(&roster, n)?;
        Ok(Self { n, roster, map })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn roster_len(&self) -> usize {
        self.roster.len()
    }

    pub fn roster(&self) -> &[(RandomVariable, f64)] {
        &self.roster
    }

    pub fn map(&self) -> &MonotoneMap {
        &self.map
    }

    pub fn evaluate(&self, x: &RandomVariable) -> ExtensionValue {
        let mut best = f64::INFINITY;
        if self.map.eval(x) <= 0.0 {
            best = 0.0;
        }
        for (x0, v) in &self.roster {
            if *v < best && self.map.eval(&x.sub(x0).expect("roster shares the space")) <= 0.0 {
                best = *v;
            }
        }
        if best > 1.0 {
            let c_max = (2.0 * x.sup() + 1.0).max(1.0);
            if self.map.eval(&x.shift(-c_max)) <= 0.0 {
                best = 1.0;
            }
        }
        if best.is_infinite() {
            ExtensionValue {
                value: 1.0,
                unreachable: true,
            }
        } else {
            ExtensionValue {
                value: best,
                unreachable: false,
            }
        }
    }

    /// Pairs of `C` violating `F(X − Y) ≤ 0 ⇒ ϱ(X) ≤ ϱ(Y)`.
    pub fn compatibility_violations(&self) -> Vec<CompatibilityViolation> {
        let mut out = Vec::new();
        for (x, vx) in &self.roster {
            for (y, vy) in &self.roster {
                if vx > vy && self.map.eval(&x.sub(y).expect("same space")) <= 0.0 {
                    out.push(CompatibilityViolation {
                        x: x.clone(),
                        y: y.clone(),
                        rho_x: *vx,
                        rho_y: *vy,
                    });
                }
            }
        }
        out
    }
}

/// `ϱ_sup(X) = min{ϱ(X₀) : X₀ ∈ C ∪ ℝ, X ≤ X₀}`, computed by direct
/// pointwise comparison; constants contribute 0 when `X ≤ 0` and 1 otherwise.
#[derive(Debug, Clone)]
pub struct SupExtension {
    n: usize,
    roster: Vec<(RandomVariable, f64)>,
}

impl SupExtension {
    pub fn from_values(roster: Vec<(RandomVariable, f64)>, n: usize) -> Result<Self> {
        check_roster(&roster, n)?;
        Ok(Self { n, roster })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn roster_len(&self) -> usize {
        self.roster.len()
    }

    pub fn evaluate(&self, x: &RandomVariable) -> f64 {
        let constant = if x.sup() <= 0.0 { 0.0 } else { 1.0 };
        self.roster
            .iter()
            .filter(|(x0, _)| x.le(x0))
            .map(|(_, v)| *v)
            .fold(constant, f64::min)
    }
}

/// `ϱ_F` for `ϱ` restricted to `roster`.
pub fn extend(rho: &DefaultRiskMeasure, roster: &[RandomVariable], map: MonotoneMap) -> Result<DefaultRiskMeasure> {
    let n = roster_dim(rho, roster)?;
    let values = roster.iter().map(|x| (x.clone(), rho.evaluate(x))).collect();
    Ok(DefaultRiskMeasure::Extension(Arc::new(Extension::from_values(values, map, n)?)))
}

/// `ϱ_sup` for `ϱ` restricted to `roster`.
pub fn extend_sup(rho: &DefaultRiskMeasure, roster: &[RandomVariable]) -> Result<DefaultRiskMeasure> {
    let n = roster_dim(rho, roster)?;
    let values = roster.iter().map(|x| (x.clone(), rho.evaluate(x))).collect();
    Ok(DefaultRiskMeasure::ExtensionSup(Arc::new(SupExtension::from_values(values, n)?)))
}

fn roster_dim(rho: &DefaultRiskMeasure, roster: &[RandomVariable]) -> Result<usize> {
    rho.dim()
        .or_else(|| roster.first().map(|x| x.dim()))
        .ok_or_else(|| Error::InvalidParameter {
            name: "roster",
            reason: "cannot infer the space size from an empty roster".into(),
        })
}

fn check_roster(roster: &[(RandomVariable, f64)], n: usize) -> Result<()> {
    for (x, v) in roster {
        if x.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.dim(),
            });
        }
        if !v.is_finite() {
            return Err(Error::InvalidParameter {
                name: "roster",
                reason: format!("value {v} at {x} is not finite"),
            });
        }
    }
    Ok(())
}
