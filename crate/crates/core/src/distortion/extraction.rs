//! Recovering a distortion function from a law-invariant default risk measure,
//! and ordered subsets of customer sets.

use crate::error::{Error, Result};
use crate::measure::DefaultRiskMeasure;
use crate::space::{Event, ProbabilityMeasure, RandomVariable};

use super::DistortionFunction;

/// Two PD levels closer than this are treated as the same level.
const LEVEL_TOL: f64 = 1e-12;

/// Two customers whose default events have the same probability but receive
/// different risk.
#[derive(Debug, Clone)]
pub struct LawInvarianceViolation {
    pub x: RandomVariable,
    pub y: RandomVariable,
    pub pd: f64,
    pub rho_x: f64,
    pub rho_y: f64,
}

/// Output of [`extract_distortion`].
#[derive(Debug, Clone)]
pub struct DistortionExtraction {
    /// Right-continuous step function through the attainable levels.
    pub distortion: DistortionFunction,
    /// Attainable PD levels with the extracted values, increasing in `p`.
    pub levels: Vec<(f64, f64)>,
    pub law_invariance_violations: Vec<LawInvarianceViolation>,
    /// Customers with `ϱ(X) ≠ ϱ(1{X>0})`.
    pub indicator_violations: Vec<RandomVariable>,
}

impl DistortionExtraction {
    pub fn reliable(&self) -> bool {
        self.law_invariance_violations.is_empty() && self.indicator_violations.is_empty()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.distortion.is_nondecreasing()
    }
}

/// `T(p) = ϱ(1_{A_p})` where `A_p` is the default event of a customer whose PD
/// is the largest attainable level `≤ p`; the constants `0` and `1` are
/// always part of the customer set.
pub fn extract_distortion(
    rho: &DefaultRiskMeasure,
    customers: &[RandomVariable],
    p: &ProbabilityMeasure,
) -> Result<DistortionExtraction> {
    let n = p.dim();
    if let Some(x) = customers.iter().find(|x| x.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.dim(),
        });
    }
    let mut members: Vec<(f64, RandomVariable, f64)> = customers
        .iter()
        .chain([RandomVariable::zero(n), RandomVariable::constant(n, 1.0)].iter())
        .map(|x| (snap(p.pd(x)), x.clone(), rho.evaluate(x)))
        .collect();
    members.sort_by(|a, b| a.0.total_cmp(&b.0));

    let indicator_violations = members
        .iter()
        .filter(|(_, x, v)| rho.evaluate(&x.default_event().indicator()) != *v)
        .map(|(_, x, _)| x.clone())
        .collect();

    let mut levels: Vec<(f64, f64)> = Vec::new();
    let mut law_invariance_violations = Vec::new();
    let mut start = 0;
    while start < members.len() {
        let level = members[start].0;
        let end = start
            + members[start..]
                .iter()
                .take_while(|m| m.0 - level <= LEVEL_TOL)
                .count();
        let rep = &members[start];
        let value = rho.evaluate(&rep.1.default_event().indicator());
        for m in &members[start + 1..end] {
            if (m.2 - rep.2).abs() > LEVEL_TOL {
                law_invariance_violations.push(LawInvarianceViolation {
                    x: rep.1.clone(),
                    y: m.1.clone(),
                    pd: level,
                    rho_x: rep.2,
                    rho_y: m.2,
                });
            }
        }
        levels.push((level, value));
        start = end;
    }
    // the constants pin the end points to (0,0) and (1,1)
    let distortion = DistortionFunction::step(levels.clone(), true)?;
    Ok(DistortionExtraction {
        distortion,
        levels,
        law_invariance_violations,
        indicator_violations,
    })
}

fn snap(pd: f64) -> f64 {
    if pd <= LEVEL_TOL {
        0.0
    } else if pd >= 1.0 - LEVEL_TOL {
        1.0
    } else {
        pd
    }
}

/// Output of [`has_ordered_subset`].
#[derive(Debug, Clone)]
pub struct OrderedSubset {
    /// One default event per attainable level, nested, if such a choice exists.
    pub chain: Option<Vec<Event>>,
    pub levels: Vec<f64>,
}

impl OrderedSubset {
    pub fn holds(&self) -> bool {
        self.chain.is_some()
    }
}

/// Looks for default events `A_{p₁} ⊂ A_{p₂} ⊂ …`, one per attainable PD level,
/// among the customers and the constants.
///
/// Levels are processed in increasing order; at each level the candidate
/// events containing the previous choice are tried in turn, backtracking when
/// a later level has no superset available.
pub fn has_ordered_subset(customers: &[RandomVariable], p: &ProbabilityMeasure) -> Result<OrderedSubset> {
    let n = p.dim();
    if let Some(x) = customers.iter().find(|x| x.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.dim(),
        });
    }
    let mut events: Vec<(f64, Event)> = customers
        .iter()
        .map(|x| x.default_event())
        .chain([Event::empty(n), Event::full(n)])
        .map(|a| (snap(p.prob(&a)), a))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    events.dedup_by(|a, b| a.1 == b.1);

    let mut groups: Vec<(f64, Vec<Event>)> = Vec::new();
    for (level, a) in events {
        match groups.last_mut() {
            Some((l, g)) if level - *l <= LEVEL_TOL => g.push(a),
            _ => groups.push((level, vec![a])),
        }
    }
    let levels = groups.iter().map(|g| g.0).collect();
    let mut chain = Vec::with_capacity(groups.len());
    let found = search(&groups, 0, None, &mut chain);
    Ok(OrderedSubset {
        chain: found.then_some(chain),
        levels,
    })
}

fn search(groups: &[(f64, Vec<Event>)], i: usize, prev: Option<Event>, chain: &mut Vec<Event>) -> bool {
    if i == groups.len() {
        return true;
    }
    for a in &groups[i].1 {
        if prev.map_or(true, |b| b.is_subset(a)) {
            chain.push(*a);
            if search(groups, i + 1, Some(*a), chain) {
                return true;
            }
            chain.pop();
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(v: &[f64]) -> RandomVariable {
        RandomVariable::from_slice(v)
    }

    #[test]
    fn ordered_subset_examples() {
        let p = ProbabilityMeasure::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let c = vec![rv(&[0.0, 0.0, 0.0, 3.0]), rv(&[-1.0, 0.0, 2.0, 5.0])];
        let r = has_ordered_subset(&c, &p).unwrap();
        let chain = r.chain.unwrap();
        let bits: Vec<u64> = chain.iter().map(|a| a.bits()).collect();
        assert_eq!(bits, vec![0b0000, 0b1000, 0b1100, 0b1111]);

        let p2 = ProbabilityMeasure::new(vec![0.3, 0.7]).unwrap();
        let c2 = vec![rv(&[1.0, 0.0]), rv(&[0.0, 1.0])];
        assert!(!has_ordered_subset(&c2, &p2).unwrap().holds());

        let consts = has_ordered_subset(&[], &p).unwrap();
        assert_eq!(consts.levels, vec![0.0, 1.0]);
        assert!(consts.holds());
    }

    #[test]
    fn backtracking_finds_chain_greedy_would_miss() {
        // level 0.25 offers {ω1} and {ω2}; only {ω2} extends to the 0.5 level
        let p = ProbabilityMeasure::uniform(4);
        let c = vec![
            rv(&[1.0, 0.0, 0.0, 0.0]),
            rv(&[0.0, 1.0, 0.0, 0.0]),
            rv(&[0.0, 1.0, 1.0, 0.0]),
        ];
        let r = has_ordered_subset(&c, &p).unwrap();
        assert_eq!(r.chain.unwrap()[1].bits(), 0b0010);
    }
}
