//! Risk-weighted assets under the IRB formula for corporate exposures with
//! maturity fixed at one year, and rating-system case studies.

mod case_study;
mod normal;

pub use case_study::{
    case_study, nonmonotone_scenario, CaseStudyRow, CaseStudyTable, ClampEvent, MocPolicy,
    RatingSystem, STRESS_CEILING, STRESS_FLOOR,
};
pub use normal::{std_normal_cdf, std_normal_inv, std_normal_pdf};

use std::fmt::Write as _;

use crate::error::{invalid, Result};
use crate::numeric::sig9;

/// Confidence level of the capital formula.
pub const CONFIDENCE: f64 = 0.999;

/// Sign in front of `√R(p)·G(0.999)` in the RWA kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignConvention {
    #[default]
    Plus,
    /// The variant with a minus sign; produces negative weights.
    Literal,
}

/// `R(p) = 0.12·w(p) + 0.24·(1 − w(p))` with `w(p) = (1 − e^{−50p}) / (1 − e^{−50})`.
pub fn correlation(p: f64) -> f64 {
    let w = (-50.0 * p).exp_m1() / (-50.0f64).exp_m1();
    0.12 * w + 0.24 * (1.0 - w)
}

pub fn expected_loss(p: f64, ead: f64, lgd: f64) -> f64 {
    p * ead * lgd
}

fn check_exposure(ead: f64, lgd: f64) -> Result<()> {
    if !(ead.is_finite() && ead >= 0.0) {
        return Err(invalid("ead", format!("{ead} is not a nonnegative number")));
    }
    if !(0.0..=1.0).contains(&lgd) {
        return Err(invalid("lgd", format!("{lgd} is not in [0,1]")));
    }
    Ok(())
}

/// RWA with the plus sign.
pub fn rwa(p: f64, ead: f64, lgd: f64) -> Result<f64> {
    rwa_with_sign(p, ead, lgd, SignConvention::Plus)
}

/// `1.06 · 12.5 · EaD · LGD · (N((G(p) ± √R(p)·G(0.999)) / √(1 − R(p))) − p)`
/// on `(0,1)`, with `RWA(0) = 0` and `RWA(1) = 1`.
pub fn rwa_with_sign(p: f64, ead: f64, lgd: f64, sign: SignConvention) -> Result<f64> {
    check_exposure(ead, lgd)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid("p", format!("{p} is not in [0,1]")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let r = correlation(p);
    let tail = r.sqrt() * std_normal_inv(CONFIDENCE)?;
    let shifted = match sign {
        SignConvention::Plus => std_normal_inv(p)? + tail,
        SignConvention::Literal => std_normal_inv(p)? - tail,
    };
    let k = std_normal_cdf(shifted / (1.0 - r).sqrt()) - p;
    Ok(1.06 * 12.5 * ead * lgd * k)
}

/// `(i/points, RWA(i/points))` for `i = 0..=points`.
pub fn rwa_curve(points: usize, ead: f64, lgd: f64, sign: SignConvention) -> Result<Vec<(f64, f64)>> {
    if points == 0 {
        return Err(invalid("points", "the grid needs at least one interval"));
    }
    (0..=points)
        .map(|i| {
            let p = i as f64 / points as f64;
            Ok((p, rwa_with_sign(p, ead, lgd, sign)?))
        })
        .collect()
}

pub fn curve_csv(curve: &[(f64, f64)]) -> String {
    let mut out = String::from("p,rwa\n");
    for (p, v) in curve {
        let _ = writeln!(out, "{},{}", sig9(*p), sig9(*v));
    }
    out
}

/// Qualitative shape of the RWA curve on the interior grid `i/(points+1)`.
#[derive(Debug, Clone)]
pub struct RwaShape {
    pub argmax: (f64, f64),
    /// Smallest value on the interior grid.
    pub min_interior: f64,
    /// Consecutive grid points with `p ≥ 0.9` are strictly decreasing.
    pub decreasing_final_decile: bool,
    /// Some `p₁ < p₂` with `RWA(p₁) > RWA(p₂)`.
    pub nonmonotone_witness: Option<(f64, f64)>,
}

impl RwaShape {
    pub fn interior_argmax(&self) -> bool {
        self.argmax.0 > 0.0 && self.argmax.0 < 1.0
    }
}

pub fn rwa_shape(points: usize, ead: f64, lgd: f64, sign: SignConvention) -> Result<RwaShape> {
    let grid: Vec<(f64, f64)> = (1..=points)
        .map(|i| {
            let p = i as f64 / (points + 1) as f64;
            Ok((p, rwa_with_sign(p, ead, lgd, sign)?))
        })
        .collect::<Result<_>>()?;
    if grid.is_empty() {
        return Err(invalid("points", "the grid is empty"));
    }
    let argmax = grid
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let min_interior = grid.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
    let decreasing_final_decile = grid
        .windows(2)
        .filter(|w| w[0].0 >= 0.9)
        .all(|w| w[1].1 < w[0].1);
    let nonmonotone_witness = grid.windows(2).find(|w| w[1].1 < w[0].1).map(|w| (w[0].0, w[1].0));
    Ok(RwaShape {
        argmax,
        min_interior,
        decreasing_final_decile,
        nonmonotone_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correlation_bounds() {
        assert!((correlation(1.0) - 0.12).abs() < 1e-15);
        assert!((correlation(1e-12) - 0.24).abs() < 1e-9);
        assert!((correlation(0.01) - 0.192783679166).abs() < 1e-11);
    }

    #[test]
    fn rwa_reference_values() {
        assert_eq!(rwa(0.0, 1.0, 0.4).unwrap(), 0.0);
        assert_eq!(rwa(1.0, 1.0, 0.4).unwrap(), 1.0);
        assert!((rwa(0.01, 1.0, 0.4).unwrap() - 0.690445195820).abs() < 1e-9);
        let literal = rwa_with_sign(0.01, 1.0, 0.4, SignConvention::Literal).unwrap();
        assert!((literal + 0.052890265622).abs() < 1e-9);
        assert!(rwa(1.5, 1.0, 0.4).is_err());
        assert!(rwa(0.5, 1.0, 1.4).is_err());
    }

    #[test]
    fn expected_loss_examples() {
        assert_eq!(expected_loss(0.0, 1.0, 0.4), 0.0);
        assert_eq!(expected_loss(1.0, 1.0, 0.4), 0.4);
        assert!((expected_loss(0.01, 1e6, 0.4) - 4000.0).abs() < 1e-9);
    }

    #[test]
    fn curve_has_boundary_rows() {
        let c = rwa_curve(100, 1.0, 0.4, SignConvention::Plus).unwrap();
        assert_eq!(c[0], (0.0, 0.0));
        assert_eq!(c[100], (1.0, 1.0));
        let csv = curve_csv(&c);
        assert!(csv.starts_with("p,rwa\n0,0\n"));
        assert!(csv.contains("\n0.01,0.690445196\n"));
    }

    #[test]
    fn shape_on_coarse_grid() {
        let s = rwa_shape(1000, 1.0, 0.4, SignConvention::Plus).unwrap();
        assert!(s.interior_argmax());
        assert!((s.argmax.0 - 0.31).abs() < 0.01);
        assert!(s.decreasing_final_decile);
        assert!(s.min_interior > 0.0);
        assert!(s.nonmonotone_witness.is_some());
    }
}
