//! Enumeration of parameter subsets switched at two breakpoints, with sweep
//! detection on each resulting run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{integrate, uniform_grid, SolverConfig};
use crate::model::{ModelKind, ModelSpec, TkParam, TkParams};
use crate::schedule::{ParamSchedule, Segment};
use crate::sweep::{detect_sweeps, SweepConfig, SweepEvent};

/// Multiplicative factors applied to each parameter in the second and third
/// phase of a scan run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseFactors([(f64, f64); 9]);

impl PhaseFactors {
    pub fn new(factors: [(f64, f64); 9]) -> Result<Self> {
        for (p, (f2, f3)) in TkParam::ALL.iter().zip(factors) {
            if !(f2 > 0.0 && f3 > 0.0 && f2.is_finite() && f3.is_finite()) {
                return Err(Error::InvalidInput(format!("phase factors for {p} must be positive, got ({f2}, {f3})")));
            }
        }
        Ok(Self(factors))
    }

    pub fn get(&self, p: TkParam) -> (f64, f64) {
        self.0[p as usize]
    }
}

impl Default for PhaseFactors {
    fn default() -> Self {
        Self([
            (1.0 / 3.0, 1.0 / 9.0),              // a
            (3.0, 9.0),                          // b
            (3.0, 9.0),                          // c
            (5.0 / 3.0, 7.0 / 3.0),              // kmax
            (0.095 / 0.015, 0.15 / 0.015),       // r0
            (3.0, 9.0),                          // alpha
            (1.0 / 3.0, 1.0 / 9.0),              // beta
            (9.5, 0.95 / 0.1),                   // delta
            (1.0 / 3.0, 1.0 / 9.0),              // rho0
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub y0: [f64; 3],
    pub t_span: (f64, f64),
    pub breakpoints: (f64, f64),
    pub solver: SolverConfig,
    pub grid_points: usize,
    pub sweep: SweepConfig,
    pub max_subset_size: usize,
    /// Worker threads; `None` lets the pool decide.
    pub threads: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            y0: [1.0, 0.0, 1.0],
            t_span: (1.0, 4000.0),
            breakpoints: (1000.0, 2000.0),
            solver: SolverConfig::default(),
            grid_points: 4000,
            sweep: SweepConfig::default(),
            max_subset_size: 4,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    /// Position in the canonical enumeration (size, then lexicographic).
    pub index: usize,
    pub subset: Vec<TkParam>,
    pub factors: Vec<(TkParam, f64, f64)>,
    pub events: Vec<SweepEvent>,
    /// Largest sweep ratio over the breakpoints; `None` for failed runs.
    pub max_ratio: Option<f64>,
    pub error: Option<String>,
}

impl ScanResult {
    pub fn label(&self) -> String {
        self.subset.iter().map(|p| p.name()).collect::<Vec<_>>().join("+")
    }

    pub fn detected_at(&self, breakpoint: f64) -> bool {
        self.events.iter().any(|e| e.breakpoint_time == breakpoint && e.detected)
    }

    pub fn detected_everywhere(&self) -> bool {
        !self.events.is_empty() && self.events.iter().all(|e| e.detected)
    }
}

/// All subsets of the nine parameters with sizes `1..=max_size`, ordered by
/// size and then lexicographically.
pub fn subsets(max_size: usize) -> Vec<Vec<TkParam>> {
    fn extend(start: usize, size: usize, current: &mut Vec<TkParam>, out: &mut Vec<Vec<TkParam>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..TkParam::ALL.len() {
            current.push(TkParam::ALL[i]);
            extend(i + 1, size, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    for size in 1..=max_size.min(TkParam::ALL.len()) {
        extend(0, size, &mut Vec::new(), &mut out);
    }
    out
}

/// Baseline parameters on `[t0, b1)`, then the subset scaled by the phase-2
/// factors on `[b1, b2)` and by the phase-3 factors from `b2` on.
pub fn three_phase_schedule(
    base: &TkParams,
    subset: &[TkParam],
    factors: &PhaseFactors,
    t_span: (f64, f64),
    breakpoints: (f64, f64),
) -> Result<ParamSchedule> {
    let mut phase2 = *base;
    let mut phase3 = *base;
    for &p in subset {
        let (f2, f3) = factors.get(p);
        phase2.set(p, base.get(p) * f2);
        phase3.set(p, base.get(p) * f3);
    }
    let label = subset.iter().map(|p| p.name()).collect::<Vec<_>>().join("+");
    ParamSchedule::new(
        label,
        vec![
            Segment { start: t_span.0, params: (*base).into() },
            Segment { start: breakpoints.0, params: phase2.into() },
            Segment { start: breakpoints.1, params: phase3.into() },
        ],
        t_span.1,
    )
}

fn run_subset(
    index: usize,
    subset: Vec<TkParam>,
    base: &TkParams,
    factors: &PhaseFactors,
    cfg: &ScanConfig,
    grid: &[f64],
) -> ScanResult {
    let applied = subset
        .iter()
        .map(|&p| {
            let (f2, f3) = factors.get(p);
            (p, f2, f3)
        })
        .collect();
    let outcome = three_phase_schedule(base, &subset, factors, cfg.t_span, cfg.breakpoints)
        .and_then(|schedule| {
            integrate(
                ModelSpec::new(ModelKind::TurchinKorotayev),
                &schedule,
                &cfg.y0,
                cfg.t_span,
                &cfg.solver,
                Some(grid),
            )
        })
        .and_then(|traj| detect_sweeps(&traj, &[cfg.breakpoints.0, cfg.breakpoints.1], &cfg.sweep));
    match outcome {
        Ok(events) => {
            let max_ratio = events.iter().map(|e| e.ratio).fold(f64::NEG_INFINITY, f64::max);
            ScanResult {
                index,
                subset,
                factors: applied,
                events,
                max_ratio: Some(max_ratio),
                error: None,
            }
        }
        Err(e) => ScanResult {
            index,
            subset,
            factors: applied,
            events: Vec::new(),
            max_ratio: None,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every subset and returns the results ranked by descending maximum
/// sweep ratio (failed runs last, ties in canonical order). Per-subset
/// failures are recorded in the result rather than aborting the scan.
pub fn scan_subsets(base: &TkParams, factors: &PhaseFactors, cfg: &ScanConfig) -> Result<Vec<ScanResult>> {
    use rayon::prelude::*;

    base.validate()?;
    cfg.solver.validate()?;
    cfg.sweep.validate()?;
    let (t0, tf) = cfg.t_span;
    let (b1, b2) = cfg.breakpoints;
    if !(t0 < b1 && b1 < b2 && b2 < tf) {
        return Err(Error::InvalidInput(format!(
            "scan needs t0 < b1 < b2 < tf, got t_span ({t0}, {tf}) and breakpoints ({b1}, {b2})"
        )));
    }
    if cfg.max_subset_size == 0 {
        return Err(Error::InvalidInput("max subset size must be at least 1".into()));
    }
    let grid = uniform_grid(t0, tf, cfg.grid_points)?;
    let all = subsets(cfg.max_subset_size);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    let mut results: Vec<ScanResult> = pool.install(|| {
        all.into_par_iter()
            .enumerate()
            .map(|(i, subset)| run_subset(i, subset, base, factors, cfg, &grid))
            .collect()
    });
    results.sort_by(|a, b| match (a.max_ratio, b.max_ratio) {
        (Some(x), Some(y)) => y.total_cmp(&x).then(a.index.cmp(&b.index)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.index.cmp(&b.index),
    });
    Ok(results)
}
