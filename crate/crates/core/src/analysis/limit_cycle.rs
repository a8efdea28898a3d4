use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::signal::local_maxima;

/// Number of trailing peaks inspected for convergence.
pub const MIN_PEAKS: usize = 5;
/// Largest relative change between successive peak heights (and spacings)
/// still counted as converged.
pub const RELATIVE_SPREAD: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCycleReport {
    pub converged: bool,
    /// Mean spacing of the last peaks.
    pub period: f64,
    /// Mean drop from each of the last peaks to the trough before the next one.
    pub amplitude: f64,
    pub peaks_in_tail: usize,
    pub max_height_change: f64,
    pub max_spacing_change: f64,
}

/// Peak-based limit-cycle diagnostic on the final `tail_fraction` of the
/// trajectory's time span.
pub fn limit_cycle_report(traj: &Trajectory, component: usize, tail_fraction: f64) -> Result<LimitCycleReport> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidInput(format!("tail fraction must lie in (0, 1], got {tail_fraction}")));
    }
    if component >= traj.model.dimension {
        return Err(Error::InvalidInput(format!(
            "component {component} out of range for a {}-dimensional trajectory",
            traj.model.dimension
        )));
    }
    if traj.is_empty() {
        return Err(Error::InsufficientOscillations {
            found: 0,
            needed: MIN_PEAKS,
        });
    }
    let t_start = traj.times[0];
    let t_end = *traj.times.last().expect("nonempty");
    let cut = t_end - tail_fraction * (t_end - t_start);
    let first = traj.times.partition_point(|&t| t < cut);
    let times = &traj.times[first..];
    let values: Vec<f64> = traj.states[first..].iter().map(|s| s[component]).collect();

    let peaks = local_maxima(&values);
    if peaks.len() < MIN_PEAKS {
        return Err(Error::InsufficientOscillations {
            found: peaks.len(),
            needed: MIN_PEAKS,
        });
    }
    let last = &peaks[peaks.len() - MIN_PEAKS..];
    let heights: Vec<f64> = last.iter().map(|&i| values[i]).collect();
    let spacings: Vec<f64> = last.windows(2).map(|w| times[w[1]] - times[w[0]]).collect();

    let max_rel_change = |xs: &[f64]| {
        xs.windows(2)
            .map(|w| (w[1] - w[0]).abs() / w[0].abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    };
    let max_height_change = max_rel_change(&heights);
    let max_spacing_change = max_rel_change(&spacings);

    let drops: Vec<f64> = last
        .windows(2)
        .map(|w| {
            let trough = values[w[0]..w[1]].iter().copied().fold(f64::INFINITY, f64::min);
            values[w[0]] - trough
        })
        .collect();

    Ok(LimitCycleReport {
        converged: max_height_change < RELATIVE_SPREAD && max_spacing_change < RELATIVE_SPREAD,
        period: spacings.iter().sum::<f64>() / spacings.len() as f64,
        amplitude: drops.iter().sum::<f64>() / drops.len() as f64,
        peaks_in_tail: peaks.len(),
        max_height_change,
        max_spacing_change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::SolverStats;
    use crate::model::{ModelKind, ModelSpec};

    fn series(f: impl Fn(f64) -> f64, n: usize, dt: f64) -> Trajectory {
        let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let states = times.iter().map(|&t| vec![f(t)]).collect();
        Trajectory {
            times,
            states,
            model: ModelSpec::new(ModelKind::Exponential),
            schedule_id: "synthetic".into(),
            stats: SolverStats::default(),
        }
    }

    #[test]
    fn constant_series_has_no_oscillations() {
        let traj = series(|_| 2.0, 1000, 0.1);
        assert!(matches!(
            limit_cycle_report(&traj, 0, 0.5),
            Err(Error::InsufficientOscillations { found: 0, .. })
        ));
    }

    #[test]
    fn sine_wave_converges() {
        let period = 7.0;
        let traj = series(|t| 3.0 + (2.0 * std::f64::consts::PI * t / period).sin(), 10_000, 0.01);
        let r = limit_cycle_report(&traj, 0, 0.5).unwrap();
        assert!(r.converged);
        assert!((r.period - period).abs() < 0.02);
        assert!((r.amplitude - 2.0).abs() < 1e-3);
    }

    #[test]
    fn growing_oscillation_does_not_converge() {
        let traj = series(|t| (0.05 * t).exp() * t.sin(), 10_000, 0.01);
        let r = limit_cycle_report(&traj, 0, 0.8).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn bad_arguments() {
        let traj = series(|t| t.sin(), 100, 0.1);
        assert!(limit_cycle_report(&traj, 0, 0.0).is_err());
        assert!(limit_cycle_report(&traj, 0, 1.5).is_err());
        assert!(limit_cycle_report(&traj, 3, 0.5).is_err());
    }
}
