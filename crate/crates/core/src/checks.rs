//! Corpus-based audits of the default-risk-measure axioms and of the
//! invariance properties linking a measure to its capacity.
//!
//! Nothing here proves a property: a pass means no counterexample was found
//! among the trials, and reports say so.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::DefaultRiskMeasure;
use crate::space::RandomVariable;

/// Absolute tolerance of every comparison in this module.
pub const CHECK_TOL: f64 = 1e-12;

/// Deterministic scale factors of the scaling check.
pub const LAMBDA_GRID: [f64; 4] = [0.5, 1.0, 2.0, 10.0];

/// Deterministic amounts of the liquidity and illiquidity checks.
pub const M_GRID: [f64; 3] = [0.1, 1.0, 10.0];

const POSITIVE_CONSTANTS: [f64; 5] = [1e-6, 0.1, 1.0, 10.0, 1e3];
const SHIFTS: [f64; 7] = [-2.0, -0.5, -0.1, 0.0, 0.1, 0.5, 2.0];

/// A failed property with a human-readable witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub property: &'static str,
    pub witness: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.property, self.witness)
    }
}

/// Result of [`check_axioms`].
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub measure: String,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Audits range, `ϱ(0) = 0`, `ϱ(m) = 1` for sampled `m > 0`, and monotonicity
/// over comparable corpus pairs, lattice pairs `X∧Y ≤ X ≤ X∨Y` and shift
/// families `m ↦ X + m`.
pub fn check_axioms(rho: &DefaultRiskMeasure, corpus: &[RandomVariable]) -> AxiomReport {
    let mut report = AxiomReport {
        measure: rho.describe(),
        checked: 0,
        violations: Vec::new(),
    };
    let Some(n) = rho.dim().or_else(|| corpus.first().map(|x| x.dim())) else {
        return report;
    };
    let push = |report: &mut AxiomReport, property, witness: String| {
        report.violations.push(Violation { property, witness });
    };

    report.checked += 1;
    let zero = rho.evaluate(&RandomVariable::zero(n));
    if zero.abs() > CHECK_TOL {
        push(&mut report, "normalization", format!("ϱ(0) = {zero}"));
    }
    for m in POSITIVE_CONSTANTS {
        report.checked += 1;
        let v = rho.evaluate(&RandomVariable::constant(n, m));
        if (v - 1.0).abs() > CHECK_TOL {
            push(&mut report, "normalization", format!("ϱ({m}) = {v}, expected 1"));
        }
    }

    let values: Vec<f64> = corpus.iter().map(|x| rho.evaluate(x)).collect();
    for (x, &v) in corpus.iter().zip(&values) {
        report.checked += 1;
        if !(-CHECK_TOL..=1.0 + CHECK_TOL).contains(&v) {
            push(&mut report, "range", format!("ϱ({x}) = {v} outside [0,1]"));
        }
        let shifted: Vec<f64> = SHIFTS.iter().map(|&m| rho.evaluate(&x.shift(m))).collect();
        for i in 1..SHIFTS.len() {
            report.checked += 1;
            if shifted[i - 1] > shifted[i] + CHECK_TOL {
                push(
                    &mut report,
                    "monotonicity",
                    format!(
                        "ϱ({x} + {}) = {} > ϱ({x} + {}) = {}",
                        SHIFTS[i - 1],
                        shifted[i - 1],
                        SHIFTS[i],
                        shifted[i]
                    ),
                );
            }
        }
    }

    for (i, x) in corpus.iter().enumerate() {
        for (j, y) in corpus.iter().enumerate() {
            if i == j || x.dim() != y.dim() {
                continue;
            }
            report.checked += 1;
            if x.le(y) && values[i] > values[j] + CHECK_TOL {
                push(
                    &mut report,
                    "monotonicity",
                    format!("{x} ≤ {y} but ϱ = {} > {}", values[i], values[j]),
                );
            }
            if j > i {
                let lo = x.min(y).expect("same space");
                let hi = x.max(y).expect("same space");
                let (vlo, vhi) = (rho.evaluate(&lo), rho.evaluate(&hi));
                report.checked += 1;
                if vlo > values[i].min(values[j]) + CHECK_TOL {
                    push(
                        &mut report,
                        "monotonicity",
                        format!("ϱ({lo}) = {vlo} exceeds ϱ of {x} or {y}"),
                    );
                }
                if vhi + CHECK_TOL < values[i].max(values[j]) {
                    push(
                        &mut report,
                        "monotonicity",
                        format!("ϱ({hi}) = {vhi} is below ϱ of {x} or {y}"),
                    );
                }
            }
        }
    }
    report
}

/// The invariance properties checked by [`check_invariance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InvarianceKind {
    Scaling,
    Liquidity,
    Illiquidity,
    IndicatorRepresentation,
    Submodular,
    QuasiConvex,
}

impl InvarianceKind {
    pub const ALL: [InvarianceKind; 6] = [
        Self::Scaling,
        Self::Liquidity,
        Self::Illiquidity,
        Self::IndicatorRepresentation,
        Self::Submodular,
        Self::QuasiConvex,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Scaling => "scaling",
            Self::Liquidity => "liquidity",
            Self::Illiquidity => "illiquidity",
            Self::IndicatorRepresentation => "indicator_representation",
            Self::Submodular => "submodular",
            Self::QuasiConvex => "quasi_convex",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for InvarianceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A counterexample: `lhs` and `rhs` are the two sides that should agree
/// (or satisfy the property's inequality).
#[derive(Debug, Clone)]
pub struct InvarianceWitness {
    pub x: RandomVariable,
    pub y: Option<RandomVariable>,
    pub parameter: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for InvarianceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X={}", self.x)?;
        if let Some(y) = &self.y {
            write!(f, ", Y={y}")?;
        }
        if let Some(p) = self.parameter {
            write!(f, ", parameter={p}")?;
        }
        write!(f, ": {} vs {}", self.lhs, self.rhs)
    }
}

/// Result of one invariance check.
#[derive(Debug, Clone)]
pub struct InvarianceReport {
    pub kind: InvarianceKind,
    pub trials: usize,
    pub witness: Option<InvarianceWitness>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

impl fmt::Display for InvarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "{}: no counterexample found in {} trials", self.kind, self.trials),
            Some(w) => write!(f, "{}: counterexample {w}", self.kind),
        }
    }
}

/// The derived variables on which the invariance checks run.
///
/// For every corpus member `X` with default event `A`: the base `X⁺`; the
/// base `e·1_A` with `e = min(min{X(ω) : X(ω) > 0}, 1)`; liquidity probes
/// `X⁺ − m·1{X⁺=0}` for `m` in [`M_GRID`], seeded draws and `−inf X`; and
/// illiquidity probes `Y + m·1{Y>0}` for both bases with `m` in the grid,
/// seeded draws and `E = max(sup X, 1)`.
///
/// The extra amounts make the probes bracket `X` and `1_A` from both sides,
/// so for a monotone `ϱ`, indicator representation on this family holds
/// exactly when both liquidity and illiquidity invariance do.
#[derive(Debug, Clone)]
pub struct ProbeFamily {
    pub corpus: Vec<RandomVariable>,
    pub liquidity: Vec<(RandomVariable, f64, RandomVariable)>,
    pub illiquidity: Vec<(RandomVariable, f64, RandomVariable)>,
    pub scaling: Vec<(RandomVariable, f64)>,
}

impl ProbeFamily {
    pub fn new(corpus: &[RandomVariable], samples: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut liquidity = Vec::new();
        let mut illiquidity = Vec::new();
        let mut scaling = Vec::new();
        for x in corpus {
            let pos = x.pos_part();
            let a = x.default_event();
            let draws: Vec<f64> = (0..samples).map(|_| rng.random_range(0.001..20.0)).collect();

            let mut ms: Vec<f64> = M_GRID.iter().copied().chain(draws.iter().copied()).collect();
            if x.inf() < 0.0 {
                ms.push(-x.inf());
            }
            let zero = a.complement();
            for &m in &ms {
                liquidity.push((pos.clone(), m, pos.add_on(&zero, -m)));
            }

            let mut bases = vec![pos.clone()];
            if !a.is_empty() {
                let e = a.indices().map(|i| x.values()[i]).fold(1.0, f64::min);
                bases.push(a.indicator().scale(e).expect("e > 0"));
            }
            let big = x.sup().max(1.0);
            let ms: Vec<f64> = M_GRID
                .iter()
                .copied()
                .chain(draws.iter().copied())
                .chain([big])
                .collect();
            for base in &bases {
                let event = base.default_event();
                for &m in &ms {
                    illiquidity.push((base.clone(), m, base.add_on(&event, m)));
                }
            }

            let lambdas = LAMBDA_GRID
                .iter()
                .copied()
                .chain((0..samples).map(|_| 10f64.powf(rng.random_range(-2.0..2.0))));
            for lambda in lambdas {
                scaling.push((pos.clone(), lambda));
            }
        }
        Self {
            corpus: corpus.to_vec(),
            liquidity,
            illiquidity,
            scaling,
        }
    }

    /// Every variable on which indicator representation is checked: corpus,
    /// bases and probes.
    pub fn representation_targets(&self) -> Vec<&RandomVariable> {
        self.corpus
            .iter()
            .chain(self.liquidity.iter().flat_map(|(b, _, p)| [b, p]))
            .chain(self.illiquidity.iter().flat_map(|(b, _, p)| [b, p]))
            .collect()
    }
}

/// Runs one invariance check on the probe family of `corpus`; `samples`
/// seeded random parameters are drawn per corpus member.
pub fn check_invariance(
    rho: &DefaultRiskMeasure,
    kind: InvarianceKind,
    corpus: &[RandomVariable],
    samples: usize,
    seed: u64,
) -> InvarianceReport {
    let family = ProbeFamily::new(corpus, samples, seed);
    check_on_family(rho, kind, &family, samples, seed)
}

fn differs(a: f64, b: f64) -> bool {
    (a - b).abs() > CHECK_TOL
}

/// Runs one check on a prebuilt [`ProbeFamily`].
pub fn check_on_family(
    rho: &DefaultRiskMeasure,
    kind: InvarianceKind,
    family: &ProbeFamily,
    samples: usize,
    seed: u64,
) -> InvarianceReport {
    let mut trials = 0;
    let mut witness = None;
    let mut record = |trials: &mut usize, w: Option<InvarianceWitness>| {
        *trials += 1;
        if witness.is_none() {
            witness = w;
        }
    };
    match kind {
        InvarianceKind::Scaling => {
            for (x, lambda) in &family.scaling {
                let lhs = rho.evaluate(x);
                let rhs = rho.evaluate(&x.scale(*lambda).expect("positive λ"));
                record(
                    &mut trials,
                    differs(lhs, rhs).then(|| InvarianceWitness {
                        x: x.clone(),
                        y: None,
                        parameter: Some(*lambda),
                        lhs,
                        rhs,
                    }),
                );
            }
        }
        InvarianceKind::Liquidity | InvarianceKind::Illiquidity => {
            let probes = if kind == InvarianceKind::Liquidity {
                &family.liquidity
            } else {
                &family.illiquidity
            };
            for (base, m, probe) in probes {
                let lhs = rho.evaluate(base);
                let rhs = rho.evaluate(probe);
                record(
                    &mut trials,
                    differs(lhs, rhs).then(|| InvarianceWitness {
                        x: base.clone(),
                        y: Some(probe.clone()),
                        parameter: Some(*m),
                        lhs,
                        rhs,
                    }),
                );
            }
        }
        InvarianceKind::IndicatorRepresentation => {
            for x in family.representation_targets() {
                let lhs = rho.evaluate(x);
                let rhs = rho.evaluate(&x.default_event().indicator());
                record(
                    &mut trials,
                    differs(lhs, rhs).then(|| InvarianceWitness {
                        x: x.clone(),
                        y: None,
                        parameter: None,
                        lhs,
                        rhs,
                    }),
                );
            }
        }
        InvarianceKind::Submodular => {
            let c = &family.corpus;
            let values: Vec<f64> = c.iter().map(|x| rho.evaluate(x)).collect();
            for i in 0..c.len() {
                for j in (i + 1)..c.len() {
                    let lo = c[i].min(&c[j]).expect("same space");
                    let hi = c[i].max(&c[j]).expect("same space");
                    let lhs = rho.evaluate(&lo) + rho.evaluate(&hi);
                    let rhs = values[i] + values[j];
                    record(
                        &mut trials,
                        (lhs > rhs + CHECK_TOL).then(|| InvarianceWitness {
                            x: c[i].clone(),
                            y: Some(c[j].clone()),
                            parameter: None,
                            lhs,
                            rhs,
                        }),
                    );
                }
            }
        }
        InvarianceKind::QuasiConvex => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let c = &family.corpus;
            let values: Vec<f64> = c.iter().map(|x| rho.evaluate(x)).collect();
            for i in 0..c.len() {
                for j in (i + 1)..c.len() {
                    let lambdas = [0.25, 0.5, 0.75]
                        .into_iter()
                        .chain((0..samples).map(|_| rng.random_range(0.0..1.0)));
                    for lambda in lambdas {
                        let mix = c[i].mix(&c[j], lambda).expect("same space");
                        let lhs = rho.evaluate(&mix);
                        let rhs = values[i].max(values[j]);
                        record(
                            &mut trials,
                            (lhs > rhs + CHECK_TOL).then(|| InvarianceWitness {
                                x: c[i].clone(),
                                y: Some(c[j].clone()),
                                parameter: Some(lambda),
                                lhs,
                                rhs,
                            }),
                        );
                    }
                }
            }
        }
    }
    InvarianceReport {
        kind,
        trials,
        witness,
    }
}

/// The three equivalent conditions for `ϱ(X) = ϱ(1{X>0})`, checked side by side.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub indicator: InvarianceReport,
    pub liquidity: InvarianceReport,
    pub illiquidity: InvarianceReport,
    pub scaling: InvarianceReport,
    /// `ϱ(X) = ϱ(X⁺)` on the corpus.
    pub positive_part: Option<InvarianceWitness>,
    /// `ϱ(X) = ϱ(X + ε1{X>0})` on `X⁺`, with `ε` below both `1e-9` and half
    /// the smallest gap between distinct values of `X⁺`.
    pub epsilon: Option<InvarianceWitness>,
}

impl EquivalenceReport {
    /// Indicator representation ⇔ (liquidity ∧ illiquidity) on the family.
    pub fn consistent(&self) -> bool {
        self.indicator.passed() == (self.liquidity.passed() && self.illiquidity.passed())
    }

    /// Scaling invariance with `ϱ(X) = ϱ(X⁺) = inf_ε ϱ(X + ε1{X>0})`.
    pub fn scaling_condition(&self) -> bool {
        self.scaling.passed() && self.positive_part.is_none() && self.epsilon.is_none()
    }

    /// The first counterexample among the liquidity and illiquidity checks.
    pub fn invariance_witness(&self) -> Option<(InvarianceKind, &InvarianceWitness)> {
        self.liquidity
            .witness
            .as_ref()
            .map(|w| (InvarianceKind::Liquidity, w))
            .or(self
                .illiquidity
                .witness
                .as_ref()
                .map(|w| (InvarianceKind::Illiquidity, w)))
    }
}

pub fn equivalence_suite(
    rho: &DefaultRiskMeasure,
    corpus: &[RandomVariable],
    samples: usize,
    seed: u64,
) -> EquivalenceReport {
    let family = ProbeFamily::new(corpus, samples, seed);
    let run = |kind| check_on_family(rho, kind, &family, samples, seed);
    let positive_part = corpus.iter().find_map(|x| {
        let (lhs, rhs) = (rho.evaluate(x), rho.evaluate(&x.pos_part()));
        differs(lhs, rhs).then(|| InvarianceWitness {
            x: x.clone(),
            y: None,
            parameter: None,
            lhs,
            rhs,
        })
    });
    let epsilon = corpus.iter().find_map(|x| {
        let pos = x.pos_part();
        let values = pos.distinct_sorted();
        let gap = values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        let eps = (gap / 2.0).min(1e-9);
        let (lhs, rhs) = (
            rho.evaluate(&pos),
            rho.evaluate(&pos.add_on(&pos.default_event(), eps)),
        );
        differs(lhs, rhs).then(|| InvarianceWitness {
            x: pos.clone(),
            y: None,
            parameter: Some(eps),
            lhs,
            rhs,
        })
    });
    EquivalenceReport {
        indicator: run(InvarianceKind::IndicatorRepresentation),
        liquidity: run(InvarianceKind::Liquidity),
        illiquidity: run(InvarianceKind::Illiquidity),
        scaling: run(InvarianceKind::Scaling),
        positive_part,
        epsilon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distortion::DistortionFunction;
    use crate::monetary::MonetaryRiskMeasure;
    use crate::space::ProbabilityMeasure;

    fn rv(v: &[f64]) -> RandomVariable {
        RandomVariable::from_slice(v)
    }

    fn p() -> ProbabilityMeasure {
        ProbabilityMeasure::new(vec![0.5, 0.25, 0.125, 0.125]).unwrap()
    }

    fn corpus() -> Vec<RandomVariable> {
        vec![
            rv(&[-1.0, 0.0, 2.0, 5.0]),
            rv(&[3.0, -2.0, 0.0, 1.0]),
            rv(&[0.0, 0.0, 0.0, 0.0]),
            rv(&[1.0, 1.0, -4.0, 2.0]),
            rv(&[-3.0, 1.0, 0.5, -0.5]),
        ]
    }

    #[test]
    fn pd_passes_all_but_quasi_convexity() {
        let rho = DefaultRiskMeasure::pd(p());
        assert!(check_axioms(&rho, &corpus()).passed());
        for kind in InvarianceKind::ALL {
            let r = check_invariance(&rho, kind, &corpus(), 3, 1);
            if kind == InvarianceKind::QuasiConvex {
                // a mixture can default where neither component does
                let w = r.witness.expect("pd is not quasi-convex");
                assert!(w.lhs > w.rhs);
            } else {
                assert!(r.passed(), "{r}");
                assert!(r.to_string().contains("no counterexample found in"));
            }
        }
    }

    #[test]
    fn binary_expectation_is_quasi_convex() {
        let rho = DefaultRiskMeasure::binary(MonetaryRiskMeasure::expectation(p()));
        assert!(check_invariance(&rho, InvarianceKind::QuasiConvex, &corpus(), 5, 2).passed());
    }

    #[test]
    fn shifted_pd_breaks_range() {
        let pm = p();
        let rho = DefaultRiskMeasure::custom("shifted", move |x: &RandomVariable| pm.pd(x) - 0.1);
        let report = check_axioms(&rho, &corpus());
        assert!(report.violations.iter().any(|v| v.property == "range"));
        assert!(report.violations.iter().any(|v| v.property == "normalization"));
    }

    #[test]
    fn nonmonotone_distortion_breaks_monotonicity() {
        let t = DistortionFunction::piecewise_linear(vec![(0.0, 0.0), (0.25, 0.6), (0.5, 0.4), (1.0, 1.0)])
            .unwrap();
        let rho = DefaultRiskMeasure::distorted_pd(ProbabilityMeasure::uniform(4), t);
        let corpus = vec![rv(&[1.0, 0.0, 0.0, 0.0]), rv(&[1.0, 1.0, 0.0, 0.0])];
        let report = check_axioms(&rho, &corpus);
        assert!(report.violations.iter().any(|v| v.property == "monotonicity"), "{report:?}");
    }

    #[test]
    fn binary_is_scaling_but_not_indicator() {
        let rho = DefaultRiskMeasure::binary(MonetaryRiskMeasure::expectation(p()));
        assert!(check_invariance(&rho, InvarianceKind::Scaling, &corpus(), 3, 1).passed());
        let r = check_invariance(&rho, InvarianceKind::IndicatorRepresentation, &corpus(), 3, 1);
        let w = r.witness.expect("mixed-sign witness");
        assert!(w.x.values().iter().any(|v| *v < 0.0) && w.x.values().iter().any(|v| *v > 0.0));
        let eq = equivalence_suite(&rho, &corpus(), 3, 1);
        assert!(eq.consistent());
        assert!(eq.invariance_witness().is_some());
    }

    #[test]
    fn warning_signal_fails_indicator_representation() {
        let base = DefaultRiskMeasure::pd(p());
        let cons = DefaultRiskMeasure::worst_case_pd(vec![p(), ProbabilityMeasure::uniform(4)]).unwrap();
        let rho = DefaultRiskMeasure::warning_signal(base, cons, 1.0).unwrap();
        // 1{X>0} never exceeds 1/γ = 1 while X does
        let corpus = vec![rv(&[0.0, 0.0, 2.0, 0.0]), rv(&[0.0, 0.5, 2.0, 0.0])];
        let r = check_invariance(&rho, InvarianceKind::IndicatorRepresentation, &corpus, 2, 3);
        assert!(!r.passed());
        let eq = equivalence_suite(&rho, &corpus, 2, 3);
        assert!(eq.consistent());
    }

    #[test]
    fn kind_names_roundtrip() {
        for k in InvarianceKind::ALL {
            assert_eq!(InvarianceKind::parse(k.name()), Some(k));
        }
        assert_eq!(InvarianceKind::parse("bogus"), None);
    }
}
