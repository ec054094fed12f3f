//! Capacities on finite spaces, Choquet integrals, the 2-alternating check and
//! coherent envelopes built from chain measures.
//!
//! A capacity is stored as a dense table indexed by event mask, so `n` is
//! limited to [`MAX_EXHAUSTIVE`](crate::space::MAX_EXHAUSTIVE). Full pairwise
//! 2-alternating audits run for `n ≤ 12`, full permutation envelopes for
//! `n ≤ 8`; above those sizes both fall back to seeded sampling.
//!
//! On a finite space every increasing or decreasing sequence of events is
//! eventually constant, so continuity from below and above holds for every
//! capacity; the countable-additivity questions behind those properties have
//! no content here.

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distortion::DistortionFunction;
use crate::error::{Error, Result};
use crate::measure::DefaultRiskMeasure;
use crate::space::{ensure_exhaustive, full_mask, Event, ProbabilityMeasure, RandomVariable};

/// Tolerance for capacity inequalities (monotonicity, 2-alternation, dominance).
pub const CAPACITY_TOL: f64 = 1e-12;

/// Largest `n` for which [`Capacity::is_two_alternating`] checks every pair.
pub const EXHAUSTIVE_PAIRS_MAX: usize = 12;

/// Largest `n` for which [`Capacity::coherent_envelope`] enumerates all `n!`
/// permutations.
pub const EXHAUSTIVE_PERMUTATIONS_MAX: usize = 8;

/// A normalized monotone set function `c`, `c(∅)=0`, `c(Ω)=1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Capacity {
    n: usize,
    table: Arc<Vec<f64>>,
}

impl Capacity {
    /// Validates range, normalization and monotonicity of a full table.
    pub fn from_table(n: usize, table: Vec<f64>) -> Result<Self> {
        ensure_exhaustive(n)?;
        if n == 0 {
            return Err(Error::InvalidCapacity("empty space".into()));
        }
        let size = 1usize << n;
        if table.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: table.len(),
            });
        }
        if let Some(a) = table.iter().position(|v| !v.is_finite() || !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidCapacity(format!(
                "c({}) = {} outside [0,1]",
                Event::from_bits_unchecked(a as u64, n),
                table[a]
            )));
        }
        if table[0] != 0.0 {
            return Err(Error::InvalidCapacity(format!("c(∅) = {} ≠ 0", table[0])));
        }
        if table[size - 1] != 1.0 {
            return Err(Error::InvalidCapacity(format!("c(Ω) = {} ≠ 1", table[size - 1])));
        }
        if let Some((a, b)) = monotonicity_witness(n, &table) {
            return Err(Error::InvalidCapacity(format!(
                "not monotone: c({}) = {} > c({}) = {}",
                Event::from_bits_unchecked(a, n),
                table[a as usize],
                Event::from_bits_unchecked(b, n),
                table[b as usize]
            )));
        }
        Ok(Self {
            n,
            table: Arc::new(table),
        })
    }

    pub fn from_fn(n: usize, f: impl Fn(&Event) -> f64) -> Result<Self> {
        let table = Event::all(n)?.map(|a| f(&a)).collect();
        Self::from_table(n, table)
    }

    /// `c(A) = ϱ(1_A)`.
    pub fn from_measure(rho: &DefaultRiskMeasure, n: usize) -> Result<Self> {
        Self::from_fn(n, |a| rho.evaluate(&a.indicator()))
    }

    /// The additive capacity `c = P`.
    pub fn additive(p: &ProbabilityMeasure) -> Self {
        let n = p.dim();
        let mut table = subset_sums(n, p.weights());
        // pin the normalization exactly; the subset sum of all weights may be 1 ± ulp
        let last = table.len() - 1;
        table[last] = 1.0;
        Self::from_table(n, table.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
            .expect("probability measures induce capacities")
    }

    /// `c(A) = T(P(A))`; requires a nondecreasing `T`.
    pub fn distorted(p: &ProbabilityMeasure, t: &DistortionFunction) -> Result<Self> {
        let n = p.dim();
        ensure_exhaustive(n)?;
        let probs = subset_sums(n, p.weights());
        let last = probs.len() - 1;
        let table = probs
            .iter()
            .enumerate()
            .map(|(a, &q)| if a == last { 1.0 } else { t.eval(q.min(1.0)) })
            .collect();
        Self::from_table(n, table)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn value(&self, a: &Event) -> f64 {
        assert_eq!(a.dim(), self.n, "event and capacity dimensions differ");
        self.table[a.bits() as usize]
    }

    /// Choquet integral by the layer formula:
    /// `v₁ + Σ_{i≥2} (v_i − v_{i−1})·c({X > v_{i−1}})` over the sorted distinct
    /// values `v₁ < … < v_k` of `X`.
    pub fn choquet(&self, x: &RandomVariable) -> f64 {
        assert_eq!(x.dim(), self.n, "variable and capacity dimensions differ");
        let values = x.distinct_sorted();
        let mut acc = values[0];
        for w in values.windows(2) {
            acc += (w[1] - w[0]) * self.value(&x.upper_level_set(w[0]));
        }
        acc
    }

    /// Checks `c(A∪B) + c(A∩B) ≤ c(A) + c(B)`: every pair for
    /// `n ≤ 12`, otherwise `samples` seeded random pairs.
    pub fn is_two_alternating(&self, samples: usize, seed: u64) -> TwoAlternatingReport {
        let size = 1u64 << self.n;
        let t = &self.table;
        let violates = |a: u64, b: u64| {
            t[(a | b) as usize] + t[(a & b) as usize] > t[a as usize] + t[b as usize] + CAPACITY_TOL
        };
        if self.n <= EXHAUSTIVE_PAIRS_MAX {
            let witness = (0..size)
                .into_par_iter()
                .find_map_first(|a| ((a + 1)..size).find(|&b| violates(a, b)).map(|b| (a, b)));
            TwoAlternatingReport {
                witness: witness.map(|(a, b)| self.pair(a, b)),
                pairs_checked: size * (size - 1) / 2,
                exhaustive: true,
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mask = full_mask(self.n);
            let witness = (0..samples).find_map(|_| {
                let a = rng.random::<u64>() & mask;
                let b = rng.random::<u64>() & mask;
                violates(a, b).then_some((a, b))
            });
            TwoAlternatingReport {
                witness: witness.map(|(a, b)| self.pair(a, b)),
                pairs_checked: samples as u64,
                exhaustive: false,
            }
        }
    }

    fn pair(&self, a: u64, b: u64) -> (Event, Event) {
        (
            Event::from_bits_unchecked(a, self.n),
            Event::from_bits_unchecked(b, self.n),
        )
    }

    /// The chain measure along `perm`:
    /// `Q(ω_{π(k)}) = c({π(1..k)}) − c({π(1..k−1)})`.
    pub fn chain_measure(&self, perm: &[usize]) -> Result<ProbabilityMeasure> {
        if perm.len() != self.n || !is_permutation(perm) {
            return Err(Error::InvalidParameter {
                name: "perm",
                reason: format!("{perm:?} is not a permutation of 0..{}", self.n),
            });
        }
        Ok(self.chain_measure_unchecked(perm))
    }

    fn chain_measure_unchecked(&self, perm: &[usize]) -> ProbabilityMeasure {
        let mut weights = vec![0.0; self.n];
        let mut prefix = 0u64;
        let mut prev = 0.0;
        for &i in perm {
            prefix |= 1 << i;
            let cur = self.table[prefix as usize];
            weights[i] = (cur - prev).max(0.0);
            prev = cur;
        }
        ProbabilityMeasure::new(weights).expect("telescoping differences sum to one")
    }

    /// The set of chain measures over all permutations (`n ≤ 8`) or over
    /// `samples` seeded random permutations, with tightness and dominance
    /// verified on every event. Refuses capacities that are not 2-alternating.
    pub fn coherent_envelope(&self, samples: usize, seed: u64) -> Result<CoherentEnvelope> {
        if let Some((a, b)) = self.is_two_alternating(samples.max(1 << 16), seed).witness {
            return Err(Error::NotTwoAlternating { a, b });
        }
        Ok(self.envelope_unchecked(samples, seed))
    }

    pub(crate) fn envelope_unchecked(&self, samples: usize, seed: u64) -> CoherentEnvelope {
        let n = self.n;
        let exhaustive = n <= EXHAUSTIVE_PERMUTATIONS_MAX;
        let perms: Vec<Vec<usize>> = if exhaustive {
            (0..n).permutations(n).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples.max(1))
                .map(|_| {
                    let mut p: Vec<usize> = (0..n).collect();
                    p.shuffle(&mut rng);
                    p
                })
                .collect()
        };
        let mut measures: Vec<ProbabilityMeasure> = perms
            .par_iter()
            .map(|p| self.chain_measure_unchecked(p))
            .collect();
        measures.sort_by(|a, b| {
            a.weights()
                .iter()
                .zip(b.weights())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        measures.dedup();
        CoherentEnvelope::verify(self, measures, exhaustive)
    }

    pub fn to_document(&self) -> CapacityDocument {
        CapacityDocument {
            n: self.n,
            values: self
                .table
                .iter()
                .enumerate()
                .map(|(a, &v)| (a.to_string(), v))
                .collect(),
        }
    }

    pub fn from_document(doc: &CapacityDocument) -> Result<Self> {
        ensure_exhaustive(doc.n)?;
        let size = 1usize << doc.n;
        let mut table = vec![f64::NAN; size];
        for (key, &v) in &doc.values {
            let mask: usize = key
                .parse()
                .map_err(|_| Error::Config(format!("event mask `{key}` is not an integer")))?;
            if mask >= size {
                return Err(Error::Config(format!("event mask {mask} outside 2^{}", doc.n)));
            }
            table[mask] = v;
        }
        if let Some(a) = table.iter().position(|v| v.is_nan()) {
            return Err(Error::Config(format!("capacity value for mask {a} missing")));
        }
        Self::from_table(doc.n, table)
    }
}

/// JSON form of a capacity: `{ "n": 2, "values": { "0": 0, "1": 0.3, ... } }`
/// with decimal event masks as keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityDocument {
    pub n: usize,
    pub values: BTreeMap<String, f64>,
}

/// Outcome of [`Capacity::is_two_alternating`].
#[derive(Debug, Clone)]
pub struct TwoAlternatingReport {
    pub witness: Option<(Event, Event)>,
    pub pairs_checked: u64,
    pub exhaustive: bool,
}

impl TwoAlternatingReport {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// A finite set of probability measures realizing a capacity from above.
#[derive(Debug, Clone)]
pub struct CoherentEnvelope {
    pub measures: Vec<ProbabilityMeasure>,
    /// `max_Q Q(A) = c(A)` on every event (within [`CAPACITY_TOL`]).
    pub tight: bool,
    /// `Q(A) ≤ c(A)` for every measure and event.
    pub dominated: bool,
    /// Largest `|max_Q Q(A) − c(A)|` over events.
    pub max_gap: f64,
    /// Whether every permutation was used.
    pub exhaustive: bool,
}

impl CoherentEnvelope {
    fn verify(c: &Capacity, measures: Vec<ProbabilityMeasure>, exhaustive: bool) -> Self {
        let n = c.dim();
        let size = 1usize << n;
        let mut upper = vec![f64::NEG_INFINITY; size];
        let mut dominated = true;
        for q in &measures {
            let sums = subset_sums(n, q.weights());
            for (a, &s) in sums.iter().enumerate() {
                if s > c.table[a] + CAPACITY_TOL {
                    dominated = false;
                }
                upper[a] = upper[a].max(s);
            }
        }
        let max_gap = upper
            .iter()
            .zip(c.table.iter())
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
        Self {
            measures,
            tight: max_gap <= CAPACITY_TOL,
            dominated,
            max_gap,
            exhaustive,
        }
    }

    /// `max_Q Q(A)`.
    pub fn upper_probability(&self, a: &Event) -> f64 {
        self.measures
            .iter()
            .map(|q| q.prob(a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max_Q E_Q(X)`.
    pub fn upper_expectation(&self, x: &RandomVariable) -> f64 {
        self.measures
            .iter()
            .map(|q| q.expectation(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Merges several envelopes (the union of their measure sets).
    pub fn union(c: &Capacity, parts: Vec<CoherentEnvelope>) -> Self {
        let exhaustive = parts.iter().all(|p| p.exhaustive);
        let measures = parts.into_iter().flat_map(|p| p.measures).collect();
        Self::verify(c, measures, exhaustive)
    }
}

/// `sums[A] = Σ_{i∈A} w_i` for all masks, by the lowest-bit recurrence.
pub(crate) fn subset_sums(n: usize, w: &[f64]) -> Vec<f64> {
    let size = 1usize << n;
    let mut sums = vec![0.0; size];
    for a in 1..size {
        // Sum in increasing index order so values match ProbabilityMeasure::prob.
        let high = usize::BITS - 1 - a.leading_zeros();
        sums[a] = sums[a & !(1 << high)] + w[high as usize];
    }
    sums
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&i| i < perm.len() && !std::mem::replace(&mut seen[i], true))
}

fn monotonicity_witness(n: usize, table: &[f64]) -> Option<(u64, u64)> {
    let size = 1u64 << n;
    (0..size).find_map(|a| {
        (0..n)
            .filter(|&i| a >> i & 1 == 0)
            .map(|i| a | 1 << i)
            .find(|&b| table[a as usize] > table[b as usize] + CAPACITY_TOL)
            .map(|b| (a, b))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p4() -> ProbabilityMeasure {
        ProbabilityMeasure::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap()
    }

    #[test]
    fn subset_sums_match_prob() {
        let p = p4();
        let sums = subset_sums(4, p.weights());
        for a in Event::all(4).unwrap() {
            assert_eq!(sums[a.bits() as usize], p.prob(&a), "{a}");
        }
    }

    #[test]
    fn table_validation() {
        assert!(Capacity::from_table(1, vec![0.0, 1.0]).is_ok());
        assert!(Capacity::from_table(1, vec![0.1, 1.0]).is_err());
        assert!(Capacity::from_table(1, vec![0.0, 0.9]).is_err());
        assert!(Capacity::from_table(2, vec![0.0, 0.8, 0.2, 0.7]).is_err());
        assert!(Capacity::from_table(2, vec![0.0, 0.5, 0.5]).is_err());
    }

    #[test]
    fn choquet_of_indicator_and_constant() {
        let c = Capacity::from_table(2, vec![0.0, 0.3, 0.6, 1.0]).unwrap();
        let a = Event::from_indices(2, &[1]).unwrap();
        assert_eq!(c.choquet(&a.indicator()), 0.6);
        assert_eq!(c.choquet(&RandomVariable::constant(2, -3.5)), -3.5);
    }

    #[test]
    fn chain_measure_rejects_bad_permutations() {
        let c = Capacity::additive(&p4());
        assert!(c.chain_measure(&[0, 1, 1, 2]).is_err());
        assert!(c.chain_measure(&[0, 1, 2]).is_err());
        let q = c.chain_measure(&[3, 1, 0, 2]).unwrap();
        for (a, b) in q.weights().iter().zip(p4().weights()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn document_roundtrip() {
        let c = Capacity::from_table(2, vec![0.0, 0.3, 0.6, 1.0]).unwrap();
        let doc = c.to_document();
        let json = serde_json::to_string(&doc).unwrap();
        let back: CapacityDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(Capacity::from_document(&back).unwrap(), c);
        let mut broken = doc.clone();
        broken.values.remove("2");
        assert!(Capacity::from_document(&broken).is_err());
    }

    #[test]
    fn sampled_check_above_exhaustive_limit() {
        let n = 14;
        let c = Capacity::additive(&ProbabilityMeasure::uniform(n));
        let r = c.is_two_alternating(1000, 7);
        assert!(r.holds());
        assert!(!r.exhaustive);
        assert_eq!(r.pairs_checked, 1000);
    }
}
