//! Rating systems stressed by a margin of conservatism.

use std::fmt::Write as _;

use crate::distortion::DistortionFunction;
use crate::error::{invalid, Result};
use crate::numeric::sig9;

use super::{rwa_with_sign, SignConvention};

/// Stressed PDs are clamped into `[STRESS_FLOOR, STRESS_CEILING]`.
pub const STRESS_FLOOR: f64 = 1e-12;
pub const STRESS_CEILING: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RatingSystem {
    classes: Vec<(usize, f64)>,
    ead: f64,
    lgd: f64,
}

impl RatingSystem {
    pub fn new(classes: Vec<(usize, f64)>, ead: f64, lgd: f64) -> Result<Self> {
        if classes.is_empty() {
            return Err(invalid("classes", "a rating system needs at least one class"));
        }
        for (k, p) in &classes {
            if !(*p > 0.0 && *p < 1.0) {
                return Err(invalid("classes", format!("pd {p} of class {k} is not in (0,1)")));
            }
        }
        if let Some(w) = classes.windows(2).find(|w| w[1].1 <= w[0].1) {
            return Err(invalid(
                "classes",
                format!("pd of class {} does not exceed class {}", w[1].0, w[0].0),
            ));
        }
        if !(ead.is_finite() && ead >= 0.0) {
            return Err(invalid("ead", format!("{ead} is not a nonnegative number")));
        }
        if !(0.0..=1.0).contains(&lgd) {
            return Err(invalid("lgd", format!("{lgd} is not in [0,1]")));
        }
        Ok(Self { classes, ead, lgd })
    }

    /// Classes `1..=count` with `pd_k = first · ratio^{k−1}`.
    pub fn geometric(first: f64, ratio: f64, count: usize, ead: f64, lgd: f64) -> Result<Self> {
        let classes = (1..=count)
            .map(|k| (k, first * ratio.powi(k as i32 - 1)))
            .collect();
        Self::new(classes, ead, lgd)
    }

    /// 22 classes from `0.0001` growing by `1.5`, `EaD = 1`, `LGD = 0.4`.
    pub fn default_scale() -> Self {
        Self::geometric(1e-4, 1.5, 22, 1.0, 0.4).expect("default scale is valid")
    }

    pub fn classes(&self) -> &[(usize, f64)] {
        &self.classes
    }

    pub fn ead(&self) -> f64 {
        self.ead
    }

    pub fn lgd(&self) -> f64 {
        self.lgd
    }
}

#[derive(Debug, Clone)]
pub enum MocPolicy {
    /// `pd ↦ pd · (1 + moc)`.
    Constant(f64),
    /// `pd ↦ T(pd)`.
    Distortion(DistortionFunction),
}

impl MocPolicy {
    pub fn constant(moc: f64) -> Result<Self> {
        if !(moc.is_finite() && moc >= 0.0) {
            return Err(invalid("moc", format!("{moc} is not a nonnegative number")));
        }
        Ok(Self::Constant(moc))
    }

    pub fn distortion(t: DistortionFunction) -> Result<Self> {
        if !t.is_nondecreasing() {
            return Err(invalid("distortion", format!("{} is not nondecreasing", t.name())));
        }
        Ok(Self::Distortion(t))
    }

    pub fn name(&self) -> String {
        match self {
            Self::Constant(m) => format!("constant({m})"),
            Self::Distortion(t) => t.name(),
        }
    }

    /// Stressed PD before clamping.
    pub fn stress(&self, pd: f64) -> f64 {
        match self {
            Self::Constant(m) => pd * (1.0 + m),
            Self::Distortion(t) => t.eval(pd),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseStudyRow {
    pub class: usize,
    pub pd: f64,
    pub stressed_a: f64,
    pub stressed_b: f64,
    pub rwa_raw: f64,
    pub rwa_a: f64,
    pub rwa_b: f64,
    pub growth_a: f64,
    pub growth_b: f64,
}

/// A stressed PD that left `[STRESS_FLOOR, STRESS_CEILING]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClampEvent {
    pub class: usize,
    pub policy: char,
    pub raw: f64,
    pub clamped: f64,
}

#[derive(Debug, Clone)]
pub struct CaseStudyTable {
    pub rows: Vec<CaseStudyRow>,
    pub clamps: Vec<ClampEvent>,
}

impl CaseStudyTable {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("class,pd,stressed_pd_a,stressed_pd_b,rwa_raw,rwa_a,rwa_b,growth_a,growth_b\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.class,
                sig9(r.pd),
                sig9(r.stressed_a),
                sig9(r.stressed_b),
                sig9(r.rwa_raw),
                sig9(r.rwa_a),
                sig9(r.rwa_b),
                sig9(r.growth_a),
                sig9(r.growth_b)
            );
        }
        out
    }

    /// Classes where policy `a` stresses strictly more than policy `b`.
    pub fn a_exceeds_b(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.stressed_a > r.stressed_b)
            .map(|r| r.class)
            .collect()
    }
}

fn clamp(class: usize, policy: char, raw: f64, clamps: &mut Vec<ClampEvent>) -> f64 {
    let clamped = raw.clamp(STRESS_FLOOR, STRESS_CEILING);
    if clamped != raw {
        clamps.push(ClampEvent {
            class,
            policy,
            raw,
            clamped,
        });
    }
    clamped
}

pub fn case_study(
    rs: &RatingSystem,
    a: &MocPolicy,
    b: &MocPolicy,
    sign: SignConvention,
) -> Result<CaseStudyTable> {
    let mut rows = Vec::with_capacity(rs.classes.len());
    let mut clamps = Vec::new();
    for &(class, pd) in &rs.classes {
        let stressed_a = clamp(class, 'a', a.stress(pd), &mut clamps);
        let stressed_b = clamp(class, 'b', b.stress(pd), &mut clamps);
        let rwa_raw = rwa_with_sign(pd, rs.ead, rs.lgd, sign)?;
        let rwa_a = rwa_with_sign(stressed_a, rs.ead, rs.lgd, sign)?;
        let rwa_b = rwa_with_sign(stressed_b, rs.ead, rs.lgd, sign)?;
        rows.push(CaseStudyRow {
            class,
            pd,
            stressed_a,
            stressed_b,
            rwa_raw,
            rwa_a,
            rwa_b,
            growth_a: rwa_a / rwa_raw,
            growth_b: rwa_b / rwa_raw,
        });
    }
    Ok(CaseStudyTable { rows, clamps })
}

/// A nondecreasing distortion with MoC `1` on classes `1..=4` and `18..`, and
/// `0.35` in between, interpolated linearly between the class PDs.
pub fn nonmonotone_scenario(rs: &RatingSystem) -> Result<DistortionFunction> {
    let mut knots = vec![(0.0, 0.0)];
    for &(k, p) in &rs.classes {
        let moc = if k <= 4 || k >= 18 { 1.0 } else { 0.35 };
        knots.push((p, (p * (1.0 + moc)).min(1.0)));
    }
    knots.push((1.0, 1.0));
    let t = DistortionFunction::piecewise_linear(knots)?;
    if !t.is_nondecreasing() {
        return Err(invalid("classes", "the scenario distortion is not nondecreasing on this scale"));
    }
    Ok(t)
}
