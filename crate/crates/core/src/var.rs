//! The `ϱ`-value at risk `VaR^α_ϱ(X) = inf{m : ϱ(X − m) ≤ α}`, generalized
//! quantile families and their inversion, and the closed forms for worst-case
//! and distorted PDs.

use std::fmt;
use std::sync::Arc;

use crate::distortion::{generalized_inverse, DistortionFunction};
use crate::error::{invalid, Error, Result};
use crate::measure::DefaultRiskMeasure;
use crate::monetary::level_scan;
use crate::numeric::float_threshold;
use crate::space::{ProbabilityMeasure, RandomVariable};

/// Tolerance of the family and round-trip checks.
pub const VAR_TOL: f64 = 1e-9;

/// Offset used to probe `sup_{β>α} R^β` just right of a grid point.
const RIGHT_PROBE: f64 = 1e-10;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(invalid("alpha", format!("{alpha} not in (0,1)")))
    }
}

/// `VaR^α_ϱ(X)`.
///
/// For measures with `ϱ(X) = ϱ(1{X>0})` the map `m ↦ ϱ(X − m)` is a
/// right-continuous step with breakpoints at the values of `X`, and the
/// breakpoints are scanned. Otherwise the search runs over `[inf X − 1, sup X]`,
/// where `ϱ(X − sup X) = 0` and `ϱ(X − inf X + 1) = 1`, bisecting on the float
/// grid down to adjacent floats.
pub fn rho_var(rho: &DefaultRiskMeasure, alpha: f64, x: &RandomVariable) -> Result<f64> {
    check_alpha(alpha)?;
    if let Some(n) = rho.dim() {
        if n != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.dim(),
            });
        }
    }
    Ok(rho_var_unchecked(rho, alpha, x))
}

fn rho_var_unchecked(rho: &DefaultRiskMeasure, alpha: f64, x: &RandomVariable) -> f64 {
    if rho.is_indicator_representable() {
        return level_scan(x, |a| rho.evaluate(&a.indicator()), alpha);
    }
    let lo = x.inf() - 1.0;
    let hi = x.sup();
    float_threshold(lo, hi, |m| rho.evaluate(&x.shift(-m)) <= alpha) + 0.0
}

/// Classical `VaR^α_P(X) = inf{m : P(X > m) ≤ α}`; `α = 1` gives `inf X`.
pub fn classical_var(p: &ProbabilityMeasure, alpha: f64, x: &RandomVariable) -> f64 {
    level_scan(x, |a| p.prob(a), alpha)
}

/// `max_i VaR^α_{Q_i}(X)`, the value at risk of the worst-case PD.
pub fn rho_var_worst_case(measures: &[ProbabilityMeasure], alpha: f64, x: &RandomVariable) -> Result<f64> {
    check_alpha(alpha)?;
    if measures.is_empty() {
        return Err(invalid("measures", "need at least one measure"));
    }
    Ok(measures
        .iter()
        .map(|q| classical_var(q, alpha, x))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Output of [`rho_var_distorted`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortedVar {
    pub value: f64,
    /// The classical level `T^{-1}(α)` used.
    pub level: f64,
    /// Whether `T` is lower semicontinuous, under which the closed form is
    /// guaranteed to equal the generic value; `None` when unknown.
    pub lower_semicontinuous: Option<bool>,
}

impl DistortedVar {
    pub fn identity_guaranteed(&self) -> bool {
        self.lower_semicontinuous != Some(false)
    }
}

/// `VaR^{T^{-1}(α)}_P(X)` for nondecreasing `T`.
pub fn rho_var_distorted(
    p: &ProbabilityMeasure,
    t: &DistortionFunction,
    alpha: f64,
    x: &RandomVariable,
) -> Result<DistortedVar> {
    check_alpha(alpha)?;
    let level = generalized_inverse(t, alpha)?;
    Ok(DistortedVar {
        value: classical_var(p, level, x),
        level,
        lower_semicontinuous: t.is_lower_semicontinuous(),
    })
}

type FamilyFn = Arc<dyn Fn(f64, &RandomVariable) -> f64 + Send + Sync>;

/// A family `α ↦ R^α` of monetary risk measures, sampled on a grid for checks.
#[derive(Clone)]
pub struct GeneralizedQuantileFamily {
    name: String,
    f: FamilyFn,
    grid: Vec<f64>,
}

impl fmt::Debug for GeneralizedQuantileFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GeneralizedQuantileFamily({}, {} grid points)", self.name, self.grid.len())
    }
}

/// Violations found by [`GeneralizedQuantileFamily::verify`].
#[derive(Debug, Clone, Default)]
pub struct FamilyReport {
    pub monetary: Vec<String>,
    pub antitone: Vec<String>,
    pub right_envelope: Vec<String>,
    pub checked: usize,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.monetary.is_empty() && self.antitone.is_empty() && self.right_envelope.is_empty()
    }
}

impl GeneralizedQuantileFamily {
    /// `grid` must be strictly increasing inside `(0,1)`.
    pub fn new(
        name: impl Into<String>,
        grid: Vec<f64>,
        f: impl Fn(f64, &RandomVariable) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if grid.is_empty() {
            return Err(invalid("grid", "empty α grid"));
        }
        if let Some(a) = grid.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(invalid("grid", format!("{a} not in (0,1)")));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("grid", "α grid must increase strictly"));
        }
        Ok(Self {
            name: name.into(),
            f: Arc::new(f),
            grid,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// `R^α(X)`.
    pub fn value(&self, alpha: f64, x: &RandomVariable) -> f64 {
        (self.f)(alpha, x)
    }

    /// `inf({α ∈ (0,1) : R^α(X) ≤ 0} ∪ {1})`, located to adjacent floats.
    pub fn recover(&self, x: &RandomVariable) -> f64 {
        let a = float_threshold(0.0, 1.0, |alpha| (self.f)(alpha, x) <= 0.0);
        // feasible down to the smallest subnormal: the infimum over (0,1) is 0
        if a == f64::from_bits(1) {
            0.0
        } else {
            a
        }
    }

    /// Checks, on the grid and the corpus: cash additivity and monotonicity of
    /// each member, antitonicity in `α`, and `R^α = sup_{β>α} R^β`, with the
    /// supremum probed at `α + 1e-10`.
    pub fn verify(&self, corpus: &[RandomVariable], tol: f64) -> FamilyReport {
        let mut report = FamilyReport::default();
        for x in corpus {
            let values: Vec<f64> = self.grid.iter().map(|&a| self.value(a, x)).collect();
            for (i, &a) in self.grid.iter().enumerate() {
                report.checked += 1;
                if i + 1 < values.len() && values[i + 1] > values[i] + tol {
                    report.antitone.push(format!(
                        "R^{}({x}) = {} > R^{a}({x}) = {}",
                        self.grid[i + 1],
                        values[i + 1],
                        values[i]
                    ));
                }
                let right = self.value(a + RIGHT_PROBE, x);
                if (right - values[i]).abs() > tol {
                    report.right_envelope.push(format!(
                        "R^{a}({x}) = {} but R^{}({x}) = {right}",
                        values[i],
                        a + RIGHT_PROBE
                    ));
                }
                for m in [-1.5, 0.5, 2.0] {
                    let shifted = self.value(a, &x.shift(m));
                    if (shifted - values[i] - m).abs() > tol * (1.0 + values[i].abs() + m.abs()) {
                        report.monetary.push(format!(
                            "cash additivity at α={a}: R({x} + {m}) = {shifted}, R(X) + m = {}",
                            values[i] + m
                        ));
                    }
                }
            }
        }
        let head = &corpus[..corpus.len().min(16)];
        for x in head {
            for y in head {
                let lo = x.min(y).expect("same space");
                for &a in &self.grid {
                    report.checked += 1;
                    if self.value(a, &lo) > self.value(a, x) + tol {
                        report
                            .monetary
                            .push(format!("monotonicity at α={a}: R({lo}) > R({x})"));
                    }
                }
            }
        }
        report
    }
}

/// The family `α ↦ VaR^α_ϱ`.
pub fn quantile_family(rho: &DefaultRiskMeasure, grid: Vec<f64>) -> Result<GeneralizedQuantileFamily> {
    let rho = rho.clone();
    let name = format!("var[{}]", rho.describe());
    GeneralizedQuantileFamily::new(name, grid, move |a, x| rho_var_unchecked(&rho, a, x))
}

/// The default risk measure `inf({α : R^α(X) ≤ 0} ∪ {1})` of a family.
pub fn recover_drm(family: GeneralizedQuantileFamily) -> DefaultRiskMeasure {
    DefaultRiskMeasure::Recovered(Arc::new(family))
}

/// The grid `k/(points+1)`, `k = 1..=points`.
pub fn alpha_grid(points: usize) -> Vec<f64> {
    (1..=points).map(|k| k as f64 / (points + 1) as f64).collect()
}

/// `(α, VaR^α_ϱ(X))` over a grid.
pub fn var_curve(rho: &DefaultRiskMeasure, x: &RandomVariable, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.iter().map(|&a| Ok((a, rho_var(rho, a, x)?))).collect()
}

/// A failure of `VaR^α_ϱ(λX) = λ VaR^α_ϱ(X)` on `X ≥ 0`.
#[derive(Debug, Clone)]
pub struct HomogeneityWitness {
    pub x: RandomVariable,
    pub alpha: f64,
    pub lambda: f64,
    pub scaled: f64,
    pub expected: f64,
}

/// Positive homogeneity of each `VaR^α_ϱ` on the nonnegative corpus members.
pub fn check_var_homogeneity(
    rho: &DefaultRiskMeasure,
    corpus: &[RandomVariable],
    alphas: &[f64],
    lambdas: &[f64],
) -> Result<Option<HomogeneityWitness>> {
    for x in corpus.iter().filter(|x| x.is_nonnegative()) {
        for &alpha in alphas {
            let base = rho_var(rho, alpha, x)?;
            for &lambda in lambdas {
                let scaled = rho_var(rho, alpha, &x.scale(lambda)?)?;
                if (scaled - lambda * base).abs() > VAR_TOL * (1.0 + lambda * base.abs()) {
                    return Ok(Some(HomogeneityWitness {
                        x: x.clone(),
                        alpha,
                        lambda,
                        scaled,
                        expected: lambda * base,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// A failure of midpoint convexity of `VaR^α_ϱ`.
#[derive(Debug, Clone)]
pub struct ConvexityWitness {
    pub x: RandomVariable,
    pub y: RandomVariable,
    pub alpha: f64,
    pub midpoint: f64,
    pub chord: f64,
}

/// Midpoint convexity `VaR((X+Y)/2) ≤ (VaR X + VaR Y)/2` over corpus pairs.
pub fn check_var_convexity(
    rho: &DefaultRiskMeasure,
    corpus: &[RandomVariable],
    alphas: &[f64],
) -> Result<Option<ConvexityWitness>> {
    for (i, x) in corpus.iter().enumerate() {
        for y in &corpus[i + 1..] {
            let mid = x.mix(y, 0.5)?;
            for &alpha in alphas {
                let midpoint = rho_var(rho, alpha, &mid)?;
                let chord = 0.5 * (rho_var(rho, alpha, x)? + rho_var(rho, alpha, y)?);
                if midpoint > chord + VAR_TOL {
                    return Ok(Some(ConvexityWitness {
                        x: x.clone(),
                        y: y.clone(),
                        alpha,
                        midpoint,
                        chord,
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monetary::MonetaryRiskMeasure;

    fn p1() -> ProbabilityMeasure {
        ProbabilityMeasure::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap()
    }

    fn p2() -> ProbabilityMeasure {
        ProbabilityMeasure::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap()
    }

    fn x() -> RandomVariable {
        RandomVariable::from_slice(&[-1.0, 0.0, 2.0, 5.0])
    }

    #[test]
    fn rho_var_examples() {
        let pd = DefaultRiskMeasure::pd(p1());
        assert_eq!(rho_var(&pd, 0.25, &x()).unwrap(), 2.0);
        let zero = RandomVariable::zero(4);
        assert_eq!(rho_var(&pd, 0.4, &zero).unwrap(), 0.0);
        let custom = DefaultRiskMeasure::custom("pd", move |y: &RandomVariable| p1().pd(y));
        let v = rho_var(&custom, 0.4, &zero).unwrap();
        assert_eq!(v.to_bits(), 0.0f64.to_bits());
        assert!(rho_var(&pd, 0.0, &x()).is_err());
        assert!(rho_var(&pd, 1.0, &x()).is_err());
    }

    #[test]
    fn binary_var_is_the_risk_measure() {
        let r = MonetaryRiskMeasure::expectation(p1());
        let rho = DefaultRiskMeasure::binary(r.clone());
        for a in [0.01, 0.3, 0.99] {
            let v = rho_var(&rho, a, &x()).unwrap();
            assert!((v - r.evaluate(&x())).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn worst_case_example() {
        assert_eq!(classical_var(&p1(), 0.25, &x()), 2.0);
        assert_eq!(classical_var(&p2(), 0.25, &x()), 5.0);
        assert_eq!(rho_var_worst_case(&[p1(), p2()], 0.25, &x()).unwrap(), 5.0);
        assert!(rho_var_worst_case(&[], 0.25, &x()).is_err());
    }

    #[test]
    fn distorted_identity_is_classical() {
        let id = DistortionFunction::identity();
        for a in [0.05, 0.25, 0.3, 0.6, 0.95] {
            let d = rho_var_distorted(&p1(), &id, a, &x()).unwrap();
            assert_eq!(d.value, classical_var(&p1(), a, &x()));
        }
    }

    #[test]
    fn family_grid_validation() {
        assert!(GeneralizedQuantileFamily::new("f", vec![0.5, 0.2], |_, _| 0.0).is_err());
        assert!(GeneralizedQuantileFamily::new("f", vec![0.0, 0.2], |_, _| 0.0).is_err());
        assert_eq!(alpha_grid(3), vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn recover_falls_back_to_one() {
        let fam = GeneralizedQuantileFamily::new("positive", alpha_grid(9), |_, x: &RandomVariable| x.sup() + 1.0)
            .unwrap();
        assert_eq!(fam.recover(&RandomVariable::zero(2)), 1.0);
        let fam = GeneralizedQuantileFamily::new("negative", alpha_grid(9), |_, _: &RandomVariable| -1.0).unwrap();
        assert_eq!(fam.recover(&RandomVariable::zero(2)), 0.0);
    }
}
