//! Piecewise-constant parameter schedules.
//!
//! A schedule assigns a [`ParamSet`] to each half-open interval
//! `[t_i, t_{i+1})`; the final segment extends to (and includes) the horizon.
//! At a breakpoint the new segment's values apply.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelKind, ParamSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub params: ParamSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSchedule {
    pub label: String,
    segments: Vec<Segment>,
    horizon_end: f64,
}

impl ParamSchedule {
    pub fn new(label: impl Into<String>, segments: Vec<Segment>, horizon_end: f64) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::InvalidSchedule("schedule has no segments".into()))?;
        let kind = first.params.kind();
        if !horizon_end.is_finite() {
            return Err(Error::InvalidSchedule("horizon end must be finite".into()));
        }
        for (i, seg) in segments.iter().enumerate() {
            if !seg.start.is_finite() {
                return Err(Error::InvalidSchedule(format!("segment {i} has a non-finite start")));
            }
            if seg.params.kind() != kind {
                return Err(Error::InvalidSchedule(format!(
                    "segment {i} is a {} parameter set in a {kind} schedule",
                    seg.params.kind()
                )));
            }
            seg.params.validate()?;
            if i > 0 && seg.start <= segments[i - 1].start {
                return Err(Error::InvalidSchedule(format!(
                    "segment starts must be strictly increasing (segment {i} starts at {} after {})",
                    seg.start,
                    segments[i - 1].start
                )));
            }
            if seg.start >= horizon_end {
                return Err(Error::InvalidSchedule(format!(
                    "segment {i} starts at {} which is not before the horizon end {horizon_end}",
                    seg.start
                )));
            }
        }
        Ok(Self {
            label: label.into(),
            segments,
            horizon_end,
        })
    }

    /// A single segment covering `[start, end]`.
    pub fn constant(label: impl Into<String>, params: ParamSet, start: f64, end: f64) -> Result<Self> {
        Self::new(label, vec![Segment { start, params }], end)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start(&self) -> f64 {
        self.segments[0].start
    }

    pub fn horizon_end(&self) -> f64 {
        self.horizon_end
    }

    pub fn kind(&self) -> ModelKind {
        self.segments[0].params.kind()
    }

    /// Start times of every segment after the first.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments[1..].iter().map(|s| s.start).collect()
    }

    pub fn covers(&self, t0: f64, tf: f64) -> bool {
        self.start() <= t0 && tf <= self.horizon_end
    }

    fn segment_index(&self, t: f64) -> Result<usize> {
        if !(t >= self.start() && t <= self.horizon_end) {
            return Err(Error::OutOfSchedule {
                t,
                start: self.start(),
                end: self.horizon_end,
            });
        }
        Ok(self.segments.partition_point(|s| s.start <= t) - 1)
    }

    pub fn params_at(&self, t: f64) -> Result<&ParamSet> {
        self.segment_index(t).map(|i| &self.segments[i].params)
    }

    /// Splits `[t0, tf]` into constant-parameter pieces.
    pub fn pieces(&self, t0: f64, tf: f64) -> Result<Vec<(f64, f64, ParamSet)>> {
        if !self.covers(t0, tf) {
            return Err(Error::InvalidSchedule(format!(
                "schedule covers [{}, {}] but the span is [{t0}, {tf}]",
                self.start(),
                self.horizon_end
            )));
        }
        let first = self.segment_index(t0)?;
        let mut out = Vec::new();
        let mut a = t0;
        for i in first..self.segments.len() {
            let b = self.segments.get(i + 1).map_or(tf, |s| s.start.min(tf));
            if b > a {
                out.push((a, b, self.segments[i].params));
            }
            if b >= tf {
                break;
            }
            a = b;
        }
        Ok(out)
    }
}
