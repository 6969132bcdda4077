use serde::{Deserialize, Serialize};

use super::SweepPoint;
use crate::error::{Error, Result};

/// Finite-size window `(α−, α+)` over which the satisfiable fraction falls
/// from `1 − δ` to `δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingWindow {
    pub delta: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    /// No swept density had a fraction above `1 − δ`; `alpha_minus` is the
    /// first grid point.
    pub minus_clamped: bool,
    /// No swept density had a fraction below `δ`; `alpha_plus` is the last
    /// grid point.
    pub plus_clamped: bool,
}

impl ScalingWindow {
    pub fn width(&self) -> f64 {
        self.alpha_plus - self.alpha_minus
    }
}

/// `α+` is the smallest swept density with fraction `< δ`, `α−` the largest
/// density before it with fraction `> 1 − δ`. Each is then refined by linear
/// interpolation toward the neighbouring grid point to where the fraction
/// equals the threshold.
pub fn estimate_scaling_window(points: &[SweepPoint], delta: f64) -> Result<ScalingWindow> {
    if points.is_empty() {
        return Err(Error::EmptySweep);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie strictly between 0 and 1, got {delta}"
        )));
    }
    if points.windows(2).any(|w| w[0].alpha >= w[1].alpha) {
        return Err(Error::InvalidParameter(
            "sweep densities must be strictly increasing".into(),
        ));
    }
    let last = points.len() - 1;
    let lerp = |i: usize, j: usize, target: f64| {
        let (a, b) = (&points[i], &points[j]);
        let t = (a.sat_fraction - target) / (a.sat_fraction - b.sat_fraction);
        a.alpha + t * (b.alpha - a.alpha)
    };

    let plus_idx = points.iter().position(|p| p.sat_fraction < delta);
    let (alpha_plus, plus_clamped) = match plus_idx {
        None => (points[last].alpha, true),
        Some(0) => (points[0].alpha, false),
        Some(i) => (lerp(i - 1, i, delta).max(points[i - 1].alpha), false),
    };

    let upper = plus_idx.unwrap_or(points.len());
    let hi = 1.0 - delta;
    let minus_idx = points[..upper].iter().rposition(|p| p.sat_fraction > hi);
    let (alpha_minus, minus_clamped) = match minus_idx {
        None => (points[0].alpha, true),
        Some(i) if i == last => (points[i].alpha, false),
        Some(i) => (lerp(i, i + 1, hi).min(points[i + 1].alpha), false),
    };

    Ok(ScalingWindow {
        delta,
        alpha_minus: alpha_minus.min(alpha_plus),
        alpha_plus,
        minus_clamped,
        plus_clamped,
    })
}
