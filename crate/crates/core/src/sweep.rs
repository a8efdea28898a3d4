//! Upward-sweep detection around schedule breakpoints.
//!
//! For each breakpoint the population series is compared over a window
//! before and a window after the breakpoint. The window defaults to one
//! oscillation period measured just before the breakpoint, so the "before"
//! level is a whole-cycle quantity independent of phase.
//!
//! Two comparison metrics are offered. [`SweepMetric::CycleMean`] (the
//! default) compares the time-averaged level of the series over each window;
//! it sees level shifts of the whole cycle, including a rising trough.
//! [`SweepMetric::EnvelopeMax`] compares the window maxima, i.e. the upper
//! envelope only. Because `N <= kmax` whenever `W >= 0`, envelope ratios are
//! capped by the ratio of carrying capacities across the breakpoint, which
//! is why the mean-level metric is the default.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::signal::local_maxima;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMetric {
    CycleMean,
    EnvelopeMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepWindow {
    /// Spacing of the last two peaks before the breakpoint (within the same
    /// schedule phase), or `fallback` when fewer than two peaks exist.
    PrePeriod { fallback: f64 },
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub metric: SweepMetric,
    pub threshold: f64,
    pub window: SweepWindow,
    /// State component inspected (population by default).
    pub component: usize,
}

impl SweepConfig {
    pub const DEFAULT_MEAN_THRESHOLD: f64 = 1.05;
    pub const DEFAULT_MAX_THRESHOLD: f64 = 1.5;
    pub const DEFAULT_FALLBACK_WINDOW: f64 = 500.0;

    /// Envelope-maximum comparison with threshold 1.5.
    pub fn envelope_max() -> Self {
        Self {
            metric: SweepMetric::EnvelopeMax,
            threshold: Self::DEFAULT_MAX_THRESHOLD,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold.is_finite() && self.threshold > 1.0) {
            return Err(Error::InvalidInput(format!(
                "sweep threshold must be a finite ratio above 1, got {}",
                self.threshold
            )));
        }
        let w = match self.window {
            SweepWindow::PrePeriod { fallback } => fallback,
            SweepWindow::Fixed(w) => w,
        };
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidInput(format!("sweep window must be positive, got {w}")));
        }
        Ok(())
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            metric: SweepMetric::CycleMean,
            threshold: Self::DEFAULT_MEAN_THRESHOLD,
            window: SweepWindow::PrePeriod {
                fallback: Self::DEFAULT_FALLBACK_WINDOW,
            },
            component: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEvent {
    pub breakpoint_time: f64,
    pub window: f64,
    pub pre_envelope_max: f64,
    pub post_envelope_max: f64,
    pub pre_level: f64,
    pub post_level: f64,
    /// Post/pre ratio under the configured metric.
    pub ratio: f64,
    pub detected: bool,
}

/// Strict local maxima `(t, value)` of one component.
pub fn envelope_maxima(traj: &Trajectory, component: usize) -> Vec<(f64, f64)> {
    let values = traj.component(component);
    local_maxima(&values)
        .into_iter()
        .map(|i| (traj.times[i], values[i]))
        .collect()
}

pub fn detect_sweeps(traj: &Trajectory, breakpoints: &[f64], cfg: &SweepConfig) -> Result<Vec<SweepEvent>> {
    cfg.validate()?;
    if breakpoints.is_empty() {
        return Ok(Vec::new());
    }
    if cfg.component >= traj.model.dimension {
        return Err(Error::InvalidInput(format!(
            "sweep component {} out of range for a {}-dimensional trajectory",
            cfg.component, traj.model.dimension
        )));
    }
    if traj.len() < 2 {
        return Err(Error::InvalidInput("trajectory too short for sweep detection".into()));
    }
    let values = traj.component(cfg.component);
    let times = &traj.times;
    let t_start = times[0];
    let t_end = *times.last().expect("nonempty");
    let peaks = local_maxima(&values);

    let mut sorted = breakpoints.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mut events = Vec::with_capacity(sorted.len());
    for (k, &bp) in sorted.iter().enumerate() {
        let phase_start = if k == 0 { t_start } else { sorted[k - 1] };
        let window = match cfg.window {
            SweepWindow::Fixed(w) => w,
            SweepWindow::PrePeriod { fallback } => {
                let pre: Vec<f64> = peaks
                    .iter()
                    .map(|&i| times[i])
                    .filter(|&t| t > phase_start && t <= bp)
                    .collect();
                match pre.as_slice() {
                    [.., a, b] => b - a,
                    _ => fallback,
                }
            }
        };
        let from = bp - window;
        let to = bp + window;
        let slack = 1e-9 * t_end.abs().max(1.0);
        if from < t_start - slack || to > t_end + slack {
            return Err(Error::WindowOutOfRange { breakpoint: bp, from, to });
        }
        let pre = window_range(times, from, bp);
        let post = window_range(times, bp, to);
        if pre.is_empty() || post.is_empty() {
            return Err(Error::WindowOutOfRange { breakpoint: bp, from, to });
        }
        let pre_envelope_max = max_of(&values[pre.clone()]);
        let post_envelope_max = max_of(&values[post.clone()]);
        let pre_level = time_mean(&times[pre.clone()], &values[pre]);
        let post_level = time_mean(&times[post.clone()], &values[post]);
        let ratio = match cfg.metric {
            SweepMetric::CycleMean => ratio(post_level, pre_level),
            SweepMetric::EnvelopeMax => ratio(post_envelope_max, pre_envelope_max),
        };
        events.push(SweepEvent {
            breakpoint_time: bp,
            window,
            pre_envelope_max,
            post_envelope_max,
            pre_level,
            post_level,
            ratio,
            detected: ratio >= cfg.threshold,
        });
    }
    Ok(events)
}

/// Sample indices with `from < t <= to`.
fn window_range(times: &[f64], from: f64, to: f64) -> std::ops::Range<usize> {
    let lo = times.partition_point(|&t| t <= from);
    let hi = times.partition_point(|&t| t <= to);
    lo..hi
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Trapezoidal time average; a single sample is its own average.
fn time_mean(times: &[f64], values: &[f64]) -> f64 {
    if times.len() == 1 {
        return values[0];
    }
    let mut area = 0.0;
    for i in 1..times.len() {
        area += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
    }
    area / (times[times.len() - 1] - times[0])
}

fn ratio(post: f64, pre: f64) -> f64 {
    if pre > 0.0 {
        post / pre
    } else if post > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::SolverStats;
    use crate::model::{ModelKind, ModelSpec};

    fn synthetic(f: impl Fn(f64) -> f64) -> Trajectory {
        let times: Vec<f64> = (0..=4000).map(f64::from).collect();
        let states = times.iter().map(|&t| vec![f(t), 0.0, 0.0]).collect();
        Trajectory {
            times,
            states,
            model: ModelSpec::new(ModelKind::TurchinKorotayev),
            schedule_id: "synthetic".into(),
            stats: SolverStats::default(),
        }
    }

    fn wave(t: f64) -> f64 {
        (2.0 * std::f64::consts::PI * t / 100.0).sin()
    }

    #[test]
    fn step_up_detected_under_both_metrics() {
        let traj = synthetic(|t| if t <= 2000.0 { 2.0 + wave(t) } else { 4.0 + wave(t) });
        let ev = detect_sweeps(&traj, &[2000.0], &SweepConfig::default()).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0].window - 100.0).abs() < 1e-9);
        assert!(ev[0].detected && (ev[0].ratio - 2.0).abs() < 1e-3, "{ev:?}");
        let ev = detect_sweeps(&traj, &[2000.0], &SweepConfig::envelope_max()).unwrap();
        assert!(ev[0].detected && (ev[0].ratio - 5.0 / 3.0).abs() < 1e-3, "{ev:?}");
    }

    #[test]
    fn unchanged_series_not_detected() {
        let traj = synthetic(|t| 2.0 + wave(t));
        let ev = detect_sweeps(&traj, &[1000.0, 2000.0], &SweepConfig::default()).unwrap();
        assert!(ev.iter().all(|e| !e.detected && (e.ratio - 1.0).abs() < 1e-3));
    }

    #[test]
    fn rising_trough_is_a_level_shift() {
        // same peak height, trough lifted from 0 to 1.5
        let traj = synthetic(|t| {
            let w = 0.5 * (1.0 + wave(t));
            if t <= 2000.0 {
                2.0 * w
            } else {
                1.5 + 0.5 * w
            }
        });
        let mean = detect_sweeps(&traj, &[2000.0], &SweepConfig::default()).unwrap();
        assert!(mean[0].detected);
        let max = detect_sweeps(&traj, &[2000.0], &SweepConfig::envelope_max()).unwrap();
        assert!(!max[0].detected);
    }

    #[test]
    fn no_breakpoints_no_events() {
        let traj = synthetic(|t| 2.0 + wave(t));
        assert!(detect_sweeps(&traj, &[], &SweepConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn window_must_fit_inside_trajectory() {
        let traj = synthetic(|t| 2.0 + wave(t));
        let cfg = SweepConfig {
            window: SweepWindow::Fixed(500.0),
            ..SweepConfig::default()
        };
        assert!(matches!(
            detect_sweeps(&traj, &[3800.0], &cfg),
            Err(Error::WindowOutOfRange { .. })
        ));
        // no peaks before t = 50: fallback window reaches before the start
        assert!(matches!(
            detect_sweeps(&traj, &[50.0], &SweepConfig::default()),
            Err(Error::WindowOutOfRange { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let bad = SweepConfig {
            threshold: 1.0,
            ..SweepConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SweepConfig {
            window: SweepWindow::Fixed(-1.0),
            ..SweepConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn envelope_maxima_of_wave() {
        let traj = synthetic(|t| 2.0 + wave(t));
        let m = envelope_maxima(&traj, 0);
        assert_eq!(m.len(), 40);
        assert_eq!(m[0].0, 25.0);
    }
}
