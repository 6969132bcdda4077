//! Ensemble sweeps over clause density and their outputs.

mod config;
mod output;
mod sweep;
mod window;

use serde::{Deserialize, Serialize};

pub use config::{Densities, SweepConfig, SweepMode};
pub use output::{
    emit_csv, emit_plot_script, emit_timing_csv, emit_window_csv, plot_script, read_csv,
    sweep_csv, SweepTable,
};
pub use sweep::{
    run_gibbs_sweep, run_satisfiability_sweep, run_sweep, DensityTiming, SweepOptions, SweepRun,
};
pub use window::{estimate_scaling_window, ScalingWindow};

/// Mean, sample standard deviation and standard error of the mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
}

impl Stats {
    /// Sums in slice order, so the result is reproducible bit for bit.
    /// The standard deviation uses the `n − 1` denominator and is 0 for `n = 1`.
    pub fn of(values: &[f64]) -> Stats {
        let n = values.len();
        if n == 0 {
            return Stats::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Stats {
                mean,
                std: 0.0,
                stderr: 0.0,
            };
        }
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let std = var.sqrt();
        Stats {
            mean,
            std,
            stderr: std / (n as f64).sqrt(),
        }
    }
}

/// Median of a sample; mean of the two middle values for even sizes.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Solver effort at one density, in decisions + propagations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkSummary {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupancyStats {
    pub beta: f64,
    pub p: Stats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GibbsSummary {
    /// One entry per configured β, in config order.
    pub occupancy: Vec<OccupancyStats>,
    /// Statistics of the minimal β reaching the threshold occupancy.
    pub beta_star: Stats,
}

/// Ensemble statistics at one clause density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Grid value as configured.
    pub alpha_nominal: f64,
    /// Realized `M / N`.
    pub alpha: f64,
    pub m_clauses: usize,
    pub n_instances: usize,
    /// Fraction of satisfiable instances (λ_min = 0 in gibbs mode).
    pub sat_fraction: f64,
    pub work: Option<WorkSummary>,
    pub gibbs: Option<GibbsSummary>,
}

impl SweepPoint {
    /// Mean occupancy at the `i`-th configured β.
    pub fn p_mean(&self, i: usize) -> Option<f64> {
        self.gibbs.as_ref().map(|g| g.occupancy[i].p.mean)
    }
}

/// Linear-interpolated density at which the satisfiable fraction first drops
/// to 1/2. `None` if the sweep never crosses.
pub fn half_crossing(points: &[SweepPoint]) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        if a.sat_fraction >= 0.5 && b.sat_fraction < 0.5 {
            let t = (a.sat_fraction - 0.5) / (a.sat_fraction - b.sat_fraction);
            Some(a.alpha + t * (b.alpha - a.alpha))
        } else {
            None
        }
    })
}

/// Density of the first point maximizing `key`.
pub fn argmax_alpha(points: &[SweepPoint], key: impl Fn(&SweepPoint) -> f64) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for p in points {
        let v = key(p);
        if best.map_or(true, |(bv, _)| v > bv) {
            best = Some((v, p.alpha));
        }
    }
    best.map(|(_, a)| a)
}

/// Density of the first point minimizing `key`.
pub fn argmin_alpha(points: &[SweepPoint], key: impl Fn(&SweepPoint) -> f64) -> Option<f64> {
    argmax_alpha(points, |p| -key(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_basic() {
        let s = Stats::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.stderr - s.std / 2.0).abs() < 1e-15);
        assert_eq!(Stats::of(&[7.0]), Stats { mean: 7.0, std: 0.0, stderr: 0.0 });
    }

    #[test]
    fn median_odd_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    fn point(alpha: f64, sat: f64) -> SweepPoint {
        SweepPoint {
            alpha_nominal: alpha,
            alpha,
            m_clauses: 0,
            n_instances: 1,
            sat_fraction: sat,
            work: None,
            gibbs: None,
        }
    }

    #[test]
    fn crossing_interpolates() {
        let pts = [point(1.0, 1.0), point(2.0, 0.8), point(3.0, 0.2), point(4.0, 0.0)];
        assert!((half_crossing(&pts).unwrap() - 2.5).abs() < 1e-12);
        assert_eq!(argmax_alpha(&pts, |p| p.sat_fraction), Some(1.0));
        assert_eq!(argmin_alpha(&pts, |p| p.sat_fraction), Some(4.0));
        assert!(half_crossing(&pts[..2]).is_none());
    }
}
