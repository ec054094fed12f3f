//! Finite outcome spaces, events, random variables and probability measures.
//!
//! Outcomes are indexed `0..n`; an [`Event`] is a bitmask over them, so a
//! space holds at most [`MAX_OUTCOMES`] outcomes. Anything that enumerates
//! all `2^n` events is additionally capped at [`MAX_EXHAUSTIVE`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::PROB_TOL;

/// Largest number of outcomes representable by an [`Event`] mask.
pub const MAX_OUTCOMES: usize = 64;

/// Largest number of outcomes for which a full `2^n` event table is built.
pub const MAX_EXHAUSTIVE: usize = 24;

/// A finite measurable space with the power set as sigma-algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSpace {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl FiniteSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpace("a space needs at least one outcome".into()));
        }
        if n > MAX_OUTCOMES {
            return Err(Error::InvalidSpace(format!(
                "{n} outcomes exceed the event-mask limit of {MAX_OUTCOMES}"
            )));
        }
        Ok(Self { n, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut space = Self::new(labels.len())?;
        space.labels = Some(labels);
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("ω{}", i + 1),
        }
    }

    /// Fails unless `2^n` events can be tabulated.
    pub fn ensure_exhaustive(&self) -> Result<()> {
        ensure_exhaustive(self.n)
    }

    pub fn events(&self) -> Result<impl Iterator<Item = Event>> {
        Event::all(self.n)
    }
}

pub(crate) fn ensure_exhaustive(n: usize) -> Result<()> {
    if n > MAX_EXHAUSTIVE {
        Err(Error::InvalidSpace(format!(
            "exhaustive event enumeration needs n <= {MAX_EXHAUSTIVE}, got {n}"
        )))
    } else {
        Ok(())
    }
}

/// A subset of outcomes, encoded as a bitmask (bit `i` = outcome `i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Event {
    bits: u64,
    n: u8,
}

impl Event {
    pub fn from_bits(bits: u64, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_OUTCOMES {
            return Err(Error::InvalidSpace(format!("unsupported space size {n}")));
        }
        if n < 64 && bits >> n != 0 {
            return Err(Error::InvalidParameter {
                name: "bits",
                reason: format!("mask {bits:#x} has bits outside {n} outcomes"),
            });
        }
        Ok(Self { bits, n: n as u8 })
    }

    pub(crate) fn from_bits_unchecked(bits: u64, n: usize) -> Self {
        Self { bits, n: n as u8 }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_bits_unchecked(0, n)
    }

    pub fn full(n: usize) -> Self {
        Self::from_bits_unchecked(full_mask(n), n)
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &i in indices {
            if i >= n {
                return Err(Error::InvalidParameter {
                    name: "indices",
                    reason: format!("outcome {i} outside 0..{n}"),
                });
            }
            bits |= 1 << i;
        }
        Self::from_bits(bits, n)
    }

    /// Every event of an `n`-point space, in mask order.
    pub fn all(n: usize) -> Result<impl Iterator<Item = Event>> {
        ensure_exhaustive(n)?;
        Ok((0..1u64 << n).map(move |b| Event::from_bits_unchecked(b, n)))
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == full_mask(self.dim())
    }

    pub fn union(&self, other: &Event) -> Event {
        Event::from_bits_unchecked(self.bits | other.bits, self.dim())
    }

    pub fn intersection(&self, other: &Event) -> Event {
        Event::from_bits_unchecked(self.bits & other.bits, self.dim())
    }

    pub fn complement(&self) -> Event {
        Event::from_bits_unchecked(!self.bits & full_mask(self.dim()), self.dim())
    }

    pub fn is_subset(&self, other: &Event) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).filter(move |&i| self.contains(i))
    }

    /// The indicator function of the event as a random variable.
    pub fn indicator(&self) -> RandomVariable {
        RandomVariable::indicator(self)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.indices().map(|i| format!("ω{}", i + 1)).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A customer: `values[i]` is the default pressure in outcome `i`; the total
/// cash flow there is `-values[i]`, so positive entries mean default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RandomVariable {
    values: Vec<f64>,
}

impl TryFrom<Vec<f64>> for RandomVariable {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<RandomVariable> for Vec<f64> {
    fn from(x: RandomVariable) -> Self {
        x.values
    }
}

impl RandomVariable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() > MAX_OUTCOMES {
            return Err(Error::InvalidSpace(format!(
                "random variable needs 1..={MAX_OUTCOMES} entries, got {}",
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values })
    }

    /// Builds from a slice known to be finite; panics otherwise.
    pub fn from_slice(values: &[f64]) -> Self {
        Self::new(values.to_vec()).expect("finite values")
    }

    pub fn constant(n: usize, m: f64) -> Self {
        Self::from_slice(&vec![m; n])
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    pub fn indicator(event: &Event) -> Self {
        let values = (0..event.dim())
            .map(|i| if event.contains(i) { 1.0 } else { 0.0 })
            .collect();
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `{X > 0}`, with the literal strict inequality.
    pub fn default_event(&self) -> Event {
        self.default_event_with_tolerance(0.0)
    }

    /// `{X > eps_zero}`; a positive tolerance treats tiny positives as zero.
    pub fn default_event_with_tolerance(&self, eps_zero: f64) -> Event {
        let bits = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > eps_zero)
            .fold(0u64, |acc, (i, _)| acc | 1 << i);
        Event::from_bits_unchecked(bits, self.dim())
    }

    /// `{X > t}`.
    pub fn upper_level_set(&self, t: f64) -> Event {
        let bits = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > t)
            .fold(0u64, |acc, (i, _)| acc | 1 << i);
        Event::from_bits_unchecked(bits, self.dim())
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &RandomVariable) -> bool {
        self.dim() == other.dim() && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    /// Distinct values in increasing order.
    pub fn distinct_sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    fn check_dim(&self, other: &RandomVariable) -> Result<()> {
        if self.dim() != other.dim() {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            })
        } else {
            Ok(())
        }
    }

    fn zip_with(&self, other: &RandomVariable, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_dim(other)?;
        Self::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `X ∧ Y`
    pub fn min(&self, other: &RandomVariable) -> Result<Self> {
        self.zip_with(other, f64::min)
    }

    /// `X ∨ Y`
    pub fn max(&self, other: &RandomVariable) -> Result<Self> {
        self.zip_with(other, f64::max)
    }

    pub fn add(&self, other: &RandomVariable) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RandomVariable) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `X⁺ = X·1{X>0}`
    pub fn pos_part(&self) -> Self {
        self.map(|v| if v > 0.0 { v } else { 0.0 })
    }

    /// `X⁻ = -X·1{X<0}`
    pub fn neg_part(&self) -> Self {
        self.map(|v| if v < 0.0 { -v } else { 0.0 })
    }

    /// `λX` for `λ > 0`.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("scale factor must be positive and finite, got {lambda}"),
            });
        }
        Ok(self.map(|v| lambda * v))
    }

    /// `X + m`
    pub fn shift(&self, m: f64) -> Self {
        self.map(|v| v + m)
    }

    /// `λX + (1-λ)Y`
    pub fn mix(&self, other: &RandomVariable, lambda: f64) -> Result<Self> {
        self.zip_with(other, |a, b| lambda * a + (1.0 - lambda) * b)
    }

    /// `X + m·1_A`
    pub fn add_on(&self, event: &Event, m: f64) -> Self {
        Self {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| if event.contains(i) { v + m } else { v })
                .collect(),
        }
    }
}

impl fmt::Display for RandomVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| format!("{v}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Nonnegative weights on `n` outcomes summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityMeasure {
    weights: Vec<f64>,
}

impl TryFrom<Vec<f64>> for ProbabilityMeasure {
    type Error = Error;

    fn try_from(weights: Vec<f64>) -> Result<Self> {
        Self::new(weights)
    }
}

impl From<ProbabilityMeasure> for Vec<f64> {
    fn from(p: ProbabilityMeasure) -> Self {
        p.weights
    }
}

impl ProbabilityMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.len() > MAX_OUTCOMES {
            return Err(Error::InvalidProbability(format!(
                "need 1..={MAX_OUTCOMES} weights, got {}",
                weights.len()
            )));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidProbability(format!(
                "weight {} at outcome {i} is negative or non-finite",
                weights[i]
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidProbability(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// `P(A)`; panics if `A` lives on a different space.
    pub fn prob(&self, event: &Event) -> f64 {
        assert_eq!(event.dim(), self.dim(), "event and measure dimensions differ");
        event.indices().map(|i| self.weights[i]).sum()
    }

    /// `P(X > 0)`.
    pub fn pd(&self, x: &RandomVariable) -> f64 {
        self.prob(&x.default_event())
    }

    pub fn expectation(&self, x: &RandomVariable) -> f64 {
        assert_eq!(x.dim(), self.dim(), "variable and measure dimensions differ");
        self.weights.iter().zip(x.values()).map(|(w, v)| w * v).sum()
    }
}

/// Checked `P(A)`.
pub fn event_prob(p: &ProbabilityMeasure, event: &Event) -> Result<f64> {
    if p.dim() != event.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: event.dim(),
        });
    }
    Ok(p.prob(event))
}

/// `{X > 0}`.
pub fn default_event(x: &RandomVariable) -> Event {
    x.default_event()
}

/// The JSON literal for a space with a reference measure and named variables:
/// `{ "n": 4, "weights": [..], "variables": { "X": [..] } }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceDocument {
    pub n: usize,
    pub weights: Vec<f64>,
    #[serde(default)]
    pub variables: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// A validated [`SpaceDocument`].
#[derive(Debug, Clone)]
pub struct LoadedSpace {
    pub space: FiniteSpace,
    pub measure: ProbabilityMeasure,
    pub variables: BTreeMap<String, RandomVariable>,
}

impl SpaceDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(self) -> Result<LoadedSpace> {
        let space = match self.labels {
            Some(labels) => {
                if labels.len() != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        found: labels.len(),
                    });
                }
                FiniteSpace::with_labels(labels)?
            }
            None => FiniteSpace::new(self.n)?,
        };
        if self.weights.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: self.weights.len(),
            });
        }
        let measure = ProbabilityMeasure::new(self.weights)?;
        let mut variables = BTreeMap::new();
        for (name, values) in self.variables {
            if values.len() != self.n {
                return Err(Error::Config(format!(
                    "variable `{name}` has {} entries, space has {}",
                    values.len(),
                    self.n
                )));
            }
            variables.insert(name, RandomVariable::new(values)?);
        }
        Ok(LoadedSpace {
            space,
            measure,
            variables,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(v: &[f64]) -> RandomVariable {
        RandomVariable::from_slice(v)
    }

    #[test]
    fn default_event_examples() {
        let x = rv(&[-1.0, 0.0, 2.0, 5.0]);
        assert_eq!(x.default_event(), Event::from_indices(4, &[2, 3]).unwrap());
        assert!(rv(&[0.0; 4]).default_event().is_empty());
        assert!(rv(&[1.0; 4]).default_event().is_full());
    }

    #[test]
    fn tolerance_treats_small_values_as_zero() {
        let x = rv(&[1e-14, 0.5]);
        assert_eq!(x.default_event().len(), 2);
        assert_eq!(x.default_event_with_tolerance(1e-12).len(), 1);
    }

    #[test]
    fn event_prob_examples() {
        let p = ProbabilityMeasure::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let a = Event::from_indices(4, &[2, 3]).unwrap();
        // direct summation oracle
        let oracle = p.weights()[2] + p.weights()[3];
        assert_eq!(event_prob(&p, &a).unwrap(), oracle);
        assert!((oracle - 0.3).abs() < 1e-15);
        assert_eq!(event_prob(&p, &Event::empty(4)).unwrap(), 0.0);
        assert!((event_prob(&p, &Event::full(4)).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            event_prob(&p, &Event::empty(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lattice_examples() {
        let x = rv(&[-1.0, 2.0]);
        let y = rv(&[1.0, 0.0]);
        assert_eq!(x.min(&y).unwrap(), rv(&[-1.0, 0.0]));
        assert_eq!(x.max(&y).unwrap(), rv(&[1.0, 2.0]));
        let x = rv(&[-1.0, 0.0, 2.0, 5.0]);
        assert_eq!(x.pos_part(), rv(&[0.0, 0.0, 2.0, 5.0]));
        assert_eq!(x.neg_part(), rv(&[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(x.shift(0.0), x);
        assert!(x.scale(0.0).is_err());
        assert!(x.scale(-2.0).is_err());
        assert!(x.min(&rv(&[1.0])).is_err());
    }

    #[test]
    fn measure_validation() {
        assert!(ProbabilityMeasure::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityMeasure::new(vec![1.2, -0.2]).is_err());
        assert!(ProbabilityMeasure::new(vec![]).is_err());
        assert!(RandomVariable::new(vec![f64::NAN]).is_err());
        assert!(FiniteSpace::new(0).is_err());
        assert!(FiniteSpace::new(25).unwrap().ensure_exhaustive().is_err());
    }

    #[test]
    fn event_display() {
        let a = Event::from_indices(4, &[2, 3]).unwrap();
        assert_eq!(a.to_string(), "{ω3,ω4}");
        assert_eq!(Event::empty(2).to_string(), "∅");
        assert_eq!(a.complement(), Event::from_indices(4, &[0, 1]).unwrap());
    }

    #[test]
    fn space_document_roundtrip() {
        let text = r#"{ "n": 4, "weights": [0.4, 0.3, 0.2, 0.1],
                        "variables": { "X": [-1, 0, 2, 5] } }"#;
        let loaded = SpaceDocument::from_json(text).unwrap().load().unwrap();
        assert_eq!(loaded.space.len(), 4);
        assert_eq!(loaded.variables["X"], rv(&[-1.0, 0.0, 2.0, 5.0]));
        let bad = r#"{ "n": 3, "weights": [0.4, 0.3, 0.2, 0.1] }"#;
        assert!(SpaceDocument::from_json(bad).unwrap().load().is_err());
    }
}
