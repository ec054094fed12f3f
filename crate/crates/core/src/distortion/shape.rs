//! Concavity, the star-shaped chord condition and two-chord decompositions.

use crate::capacity::{Capacity, CoherentEnvelope};
use crate::error::{Error, Result};
use crate::space::ProbabilityMeasure;

use super::DistortionFunction;

/// Slack allowed in the chord-slope comparisons.
const SHAPE_TOL: f64 = 1e-9;

/// Outcome of a grid-based shape check.
#[derive(Debug, Clone)]
pub struct ShapeReport {
    /// First violating point (concavity) or pair `(p, q)` (star shape).
    pub witness: Option<(f64, f64)>,
    pub points_checked: usize,
}

impl ShapeReport {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// The two-sided chord condition at `p < q`:
/// `T(p)/p ≥ (T(q) − T(p))/(q − p) ≥ (1 − T(q))/(1 − q)`.
pub fn star_condition(t: &DistortionFunction, p: f64, q: f64) -> bool {
    star_condition_values(p, t.eval(p), q, t.eval(q))
}

fn star_condition_values(p: f64, tp: f64, q: f64, tq: f64) -> bool {
    let left = tp / p;
    let mid = (tq - tp) / (q - p);
    let right = (1.0 - tq) / (1.0 - q);
    left + SHAPE_TOL >= mid && mid + SHAPE_TOL >= right
}

/// Star-shaped check over all pairs `p < q` of interior grid points
/// `k/resolution`.
pub fn is_star_shaped(t: &DistortionFunction, resolution: usize) -> ShapeReport {
    let points: Vec<f64> = (1..resolution).map(|k| k as f64 / resolution as f64).collect();
    star_shaped_on(t, &points)
}

fn star_shaped_on(t: &DistortionFunction, points: &[f64]) -> ShapeReport {
    let values: Vec<f64> = points.iter().map(|&p| t.eval(p)).collect();
    let mut checked = 0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            checked += 1;
            if !star_condition_values(points[i], values[i], points[j], values[j]) {
                return ShapeReport {
                    witness: Some((points[i], points[j])),
                    points_checked: checked,
                };
            }
        }
    }
    ShapeReport {
        witness: None,
        points_checked: checked,
    }
}

/// Concavity via second differences on the grid `k/resolution`, `k=0..=resolution`.
/// The witness is `(p, second difference)`.
pub fn is_concave(t: &DistortionFunction, resolution: usize) -> ShapeReport {
    let values: Vec<f64> = (0..=resolution)
        .map(|k| t.eval(k as f64 / resolution as f64))
        .collect();
    let witness = values.windows(3).enumerate().find_map(|(i, w)| {
        let d2 = w[0] - 2.0 * w[1] + w[2];
        (d2 > 1e-12).then(|| ((i + 1) as f64 / resolution as f64, d2))
    });
    ShapeReport {
        witness,
        points_checked: resolution.saturating_sub(1),
    }
}

/// One concave two-chord function per anchor `p₀ ∈ (0,1)`: slope `T(p₀)/p₀`
/// up to `p₀`, then the chord to `(1,1)`.
///
/// Refuses `T` unless the chord condition holds on all pairs drawn from the
/// anchors together with the interior grid of the given resolution.
pub fn two_chord_decomposition(
    t: &DistortionFunction,
    anchors: &[f64],
    resolution: usize,
) -> Result<Vec<DistortionFunction>> {
    if let Some(&a) = anchors.iter().find(|&&a| !(a > 0.0 && a < 1.0)) {
        return Err(Error::InvalidParameter {
            name: "anchors",
            reason: format!("anchor {a} not in (0,1)"),
        });
    }
    let mut points: Vec<f64> = (1..resolution)
        .map(|k| k as f64 / resolution as f64)
        .chain(anchors.iter().copied())
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    if let Some((p, q)) = star_shaped_on(t, &points).witness {
        return Err(Error::NotStarShaped { p, q });
    }
    anchors
        .iter()
        .map(|&p0| DistortionFunction::piecewise_linear(vec![(0.0, 0.0), (p0, t.eval(p0)), (1.0, 1.0)]))
        .collect()
}

/// Coherent envelope of `A ↦ T(P(A))` for star-shaped `T`, assembled from the
/// chain-measure envelopes of the concave two-chord components anchored at
/// every attainable interior value of `P(A)`.
pub fn star_shaped_envelope(
    p: &ProbabilityMeasure,
    t: &DistortionFunction,
    resolution: usize,
) -> Result<CoherentEnvelope> {
    let target = Capacity::distorted(p, t)?;
    let mut anchors: Vec<f64> = target_levels(p)?
        .into_iter()
        .filter(|&a| a > 0.0 && a < 1.0)
        .collect();
    anchors.sort_by(f64::total_cmp);
    anchors.dedup();
    let components = two_chord_decomposition(t, &anchors, resolution)?;
    let mut parts = Vec::with_capacity(components.len() + 1);
    if components.is_empty() {
        // every event has probability 0 or 1, so T∘P = P
        parts.push(Capacity::additive(p).envelope_unchecked(1, 0));
    }
    for c in &components {
        parts.push(Capacity::distorted(p, c)?.envelope_unchecked(1 << 12, 0));
    }
    Ok(CoherentEnvelope::union(&target, parts))
}

fn target_levels(p: &ProbabilityMeasure) -> Result<Vec<f64>> {
    Ok(crate::space::Event::all(p.dim())?
        .map(|a| p.prob(&a))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chord_examples() {
        let capped = DistortionFunction::capped(2.0).unwrap();
        assert!(is_star_shaped(&capped, 1024).holds());
        assert!(is_concave(&capped, 1024).holds());
        let sq = DistortionFunction::power(2.0).unwrap();
        // T(p)/p = 0.25 < (0.25 - 0.0625)/0.25 = 0.75
        assert!(!star_condition(&sq, 0.25, 0.5));
        assert!(!is_star_shaped(&sq, 1024).holds());
        assert!(!is_concave(&sq, 1024).holds());
        assert!(is_star_shaped(&DistortionFunction::identity(), 1024).holds());
    }

    #[test]
    fn two_chord_examples() {
        let id = DistortionFunction::identity();
        let parts = two_chord_decomposition(&id, &[0.3], 64).unwrap();
        for k in 0..=64 {
            let p = k as f64 / 64.0;
            assert!((parts[0].eval(p) - p).abs() < 1e-15);
        }
        let sqrt = DistortionFunction::sqrt();
        let parts = two_chord_decomposition(&sqrt, &[0.25], 1024).unwrap();
        assert_eq!(parts[0].eval(0.25), 0.5);
        assert_eq!(parts[0].eval(0.125), 0.25);
        assert!((parts[0].eval(0.625) - 0.75).abs() < 1e-15);
        let capped = DistortionFunction::capped(2.0).unwrap();
        let parts = two_chord_decomposition(&capped, &[0.5], 1024).unwrap();
        for k in 0..=1024 {
            let p = k as f64 / 1024.0;
            assert_eq!(parts[0].eval(p), capped.eval(p));
        }
        let sq = DistortionFunction::power(2.0).unwrap();
        assert!(matches!(
            two_chord_decomposition(&sq, &[0.5], 16),
            Err(Error::NotStarShaped { .. })
        ));
    }
}
