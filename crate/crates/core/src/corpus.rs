//! Seeded test corpora: random variables, probability measures and capacities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capacity::Capacity;
use crate::distortion::DistortionFunction;
use crate::error::Result;
use crate::space::{Event, ProbabilityMeasure, RandomVariable};

/// Denominator of the dyadic weights drawn by [`random_measure`].
pub const WEIGHT_DENOMINATOR: u32 = 1 << 10;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer-valued variable with entries in `−5..=5`, so ties and zeros are common.
pub fn random_variable(rng: &mut impl Rng, n: usize) -> RandomVariable {
    RandomVariable::from_slice(&(0..n).map(|_| rng.random_range(-5..=5) as f64).collect::<Vec<_>>())
}

/// `count` variables on `n` outcomes.
pub fn random_corpus(n: usize, count: usize, seed: u64) -> Vec<RandomVariable> {
    let mut rng = rng(seed);
    (0..count).map(|_| random_variable(&mut rng, n)).collect()
}

/// Weights `k/1024` summing to one; about one outcome in five gets weight 0
/// when `allow_zero` is set.
pub fn random_measure(rng: &mut impl Rng, n: usize, allow_zero: bool) -> ProbabilityMeasure {
    let d = WEIGHT_DENOMINATOR;
    loop {
        let raw: Vec<u32> = (0..n)
            .map(|_| {
                if allow_zero && rng.random_bool(0.2) {
                    0
                } else {
                    rng.random_range(1..=16)
                }
            })
            .collect();
        let total: u32 = raw.iter().sum();
        if total == 0 {
            continue;
        }
        let mut k: Vec<u32> = raw.iter().map(|r| r * d / total).collect();
        let assigned: u32 = k.iter().sum();
        let last = raw.iter().rposition(|r| *r > 0).expect("total > 0");
        k[last] += d - assigned;
        let weights = k.iter().map(|v| *v as f64 / d as f64).collect();
        return ProbabilityMeasure::new(weights).expect("dyadic weights sum to one");
    }
}

/// Indicators of all `2^n` events, in mask order.
pub fn all_indicators(n: usize) -> Result<Vec<RandomVariable>> {
    Ok(Event::all(n)?.map(|a| a.indicator()).collect())
}

/// Mixture of `k` concave distortions of random measures: a 2-alternating
/// capacity.
pub fn random_two_alternating(rng: &mut impl Rng, n: usize, k: usize) -> Result<Capacity> {
    let k = k.max(1);
    let parts: Vec<(ProbabilityMeasure, DistortionFunction)> = (0..k)
        .map(|_| {
            let t = match rng.random_range(0..3) {
                0 => DistortionFunction::power(rng.random_range(1..=8) as f64 / 8.0)?,
                1 => DistortionFunction::capped(rng.random_range(1..=4) as f64)?,
                _ => DistortionFunction::identity(),
            };
            Ok((random_measure(rng, n, true), t))
        })
        .collect::<Result<_>>()?;
    Capacity::from_fn(n, |a| {
        parts.iter().map(|(q, t)| t.eval(q.prob(a))).sum::<f64>() / k as f64
    })
}

/// Monotone capacity with random increments; generally not 2-alternating.
pub fn random_capacity(rng: &mut impl Rng, n: usize) -> Result<Capacity> {
    let size = 1usize << n;
    let mut table = vec![0.0; size];
    for mask in 1..size {
        let floor = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| table[mask & !(1 << i)])
            .fold(0.0, f64::max);
        table[mask] = floor + rng.random_range(0..=4) as f64 / 16.0;
    }
    let top = table[size - 1];
    let mut table: Vec<f64> = table.iter().map(|v| if top > 0.0 { v / top } else { 0.0 }).collect();
    table[size - 1] = 1.0;
    Capacity::from_table(n, table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic() {
        assert_eq!(random_corpus(4, 10, 7), random_corpus(4, 10, 7));
        assert_ne!(random_corpus(4, 10, 7), random_corpus(4, 10, 8));
    }

    #[test]
    fn measures_are_dyadic() {
        let mut r = rng(3);
        for n in 1..8 {
            let p = random_measure(&mut r, n, true);
            assert_eq!(p.weights().iter().sum::<f64>(), 1.0);
            for w in p.weights() {
                assert_eq!((w * 1024.0).fract(), 0.0);
            }
        }
    }

    #[test]
    fn mixtures_are_two_alternating() {
        let mut r = rng(5);
        for n in 2..6 {
            let c = random_two_alternating(&mut r, n, 3).unwrap();
            assert!(c.is_two_alternating(0, 0).holds());
        }
        assert_eq!(all_indicators(3).unwrap().len(), 8);
    }
}
