//! Adaptive Dormand-Prince 5(4) integration of schedule-switched vector fields.
//!
//! Each constant-parameter piece of a [`ParamSchedule`] is integrated on its
//! own: the solver stops exactly on every breakpoint and restarts with a fresh
//! step-size estimate. Components flagged nonnegative are handled the way the
//! classic `NonNegative` ODE-suite option does it: the derivative of a
//! component sitting at (or below) zero may not point further down, a step
//! whose solution overshoots below zero by more than `abs_tol` is rejected
//! and halved, and accepted solutions are projected onto the orthant before
//! the derivative is re-evaluated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelSpec, ParamSet};
use crate::schedule::ParamSchedule;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// Per-component nonnegativity flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NonNegativeMask {
    Uniform(bool),
    PerComponent(Vec<bool>),
}

impl NonNegativeMask {
    pub fn resolve(&self, dim: usize) -> Result<Vec<bool>> {
        match self {
            NonNegativeMask::Uniform(flag) => Ok(vec![*flag; dim]),
            NonNegativeMask::PerComponent(mask) if mask.len() == dim => Ok(mask.clone()),
            NonNegativeMask::PerComponent(mask) => Err(Error::InvalidSolverConfig(format!(
                "nonnegative mask has {} entries for a {dim}-component state",
                mask.len()
            ))),
        }
    }
}

impl Default for NonNegativeMask {
    fn default() -> Self {
        NonNegativeMask::Uniform(true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// First trial step of every piece; estimated when absent.
    pub h_init: Option<f64>,
    pub h_min: f64,
    /// Largest step; one tenth of the integration span when absent.
    pub h_max: Option<f64>,
    pub nonnegative: NonNegativeMask,
    pub max_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-10,
            h_init: None,
            h_min: 1e-12,
            h_max: None,
            nonnegative: NonNegativeMask::default(),
            max_steps: 1_000_000,
        }
    }
}

impl SolverConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidSolverConfig(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("h_min", self.h_min)?;
        if let Some(h) = self.h_init {
            positive("h_init", h)?;
        }
        if let Some(h) = self.h_max {
            positive("h_max", h)?;
            if self.h_min > h {
                return Err(Error::InvalidSolverConfig(format!(
                    "h_min ({}) exceeds h_max ({h})",
                    self.h_min
                )));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidSolverConfig("max_steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverStats {
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub rhs_evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub model: ModelSpec,
    pub schedule_id: String,
    pub stats: SolverStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn component(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[index]).collect()
    }

    pub fn last_state(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }
}

/// Outcome of a single embedded-pair step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    /// Fifth-order solution.
    pub y_next: Vec<f64>,
    /// Componentwise difference between the fifth- and fourth-order solutions.
    pub error: Vec<f64>,
    /// Scaled max-norm of `error`; the step is acceptable when `<= 1`.
    pub error_norm: f64,
    pub h_suggest: f64,
}

/// One Dormand-Prince 5(4) step of size `h` from `(t, y)`.
pub fn step<F>(rhs: &mut F, t: f64, y: &[f64], h: f64, cfg: &SolverConfig) -> Result<StepResult>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("step size must be positive, got {h}")));
    }
    let mut stages = Stages::new(y.len());
    let mut k1 = vec![0.0; y.len()];
    eval(rhs, t, y, &mut k1)?;
    stages.k[0].copy_from_slice(&k1);
    stages.advance(rhs, t, y, h)?;
    let error_norm = stages.error_norm(y, cfg.rel_tol, cfg.abs_tol);
    Ok(StepResult {
        y_next: stages.y_next.clone(),
        error: stages.err.clone(),
        error_norm,
        h_suggest: h * step_factor(error_norm, false),
    })
}

/// Fixed-step Dormand-Prince integration (fifth-order solution propagated,
/// no error control).
pub fn integrate_fixed<F>(rhs: &mut F, t0: f64, y0: &[f64], h: f64, n_steps: usize) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let mut stages = Stages::new(y0.len());
    let mut y = y0.to_vec();
    for i in 0..n_steps {
        let t = t0 + i as f64 * h;
        let mut k1 = vec![0.0; y.len()];
        eval(rhs, t, &y, &mut k1)?;
        stages.k[0] = k1;
        stages.advance(rhs, t, &y, h)?;
        y.copy_from_slice(&stages.y_next);
    }
    Ok(y)
}

fn step_factor(error_norm: f64, after_reject: bool) -> f64 {
    let fac = if error_norm == 0.0 {
        FAC_MAX
    } else {
        (SAFETY * error_norm.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
    };
    if after_reject {
        fac.min(1.0)
    } else {
        fac
    }
}

fn eval<F>(rhs: &mut F, t: f64, y: &[f64], out: &mut [f64]) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    rhs(t, y, out)?;
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState {
            context: format!("in derivative at t = {t}"),
        });
    }
    Ok(())
}

struct Stages {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_next: Vec<f64>,
    err: Vec<f64>,
}

impl Stages {
    fn new(dim: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
            y_next: vec![0.0; dim],
            err: vec![0.0; dim],
        }
    }

    /// Computes stages 2..7 given `k[0] = f(t, y)`.
    fn advance<F>(&mut self, rhs: &mut F, t: f64, y: &[f64], h: f64) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        let n = y.len();
        let rows: [(f64, &[f64]); 5] = [
            (C2, &[A21]),
            (C3, &[A31, A32]),
            (C4, &[A41, A42, A43]),
            (C5, &[A51, A52, A53, A54]),
            (1.0, &[A61, A62, A63, A64, A65]),
        ];
        for (stage, (c, a)) in rows.iter().enumerate() {
            for i in 0..n {
                let incr: f64 = a.iter().enumerate().map(|(j, aj)| aj * self.k[j][i]).sum();
                self.tmp[i] = y[i] + h * incr;
            }
            eval(rhs, t + c * h, &self.tmp, &mut self.k[stage + 1])?;
        }
        for i in 0..n {
            let k = &self.k;
            self.y_next[i] = y[i]
                + h * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
        }
        if self.y_next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState {
                context: format!("in step solution at t = {}", t + h),
            });
        }
        let (head, tail) = self.k.split_at_mut(6);
        eval(rhs, t + h, &self.y_next, &mut tail[0])?;
        for i in 0..n {
            self.err[i] = h
                * (E1 * head[0][i] + E3 * head[2][i] + E4 * head[3][i] + E5 * head[4][i] + E6 * head[5][i]
                    + E7 * tail[0][i]);
        }
        Ok(())
    }

    fn error_norm(&self, y: &[f64], rel_tol: f64, abs_tol: f64) -> f64 {
        y.iter()
            .zip(&self.y_next)
            .zip(&self.err)
            .map(|((y0, y1), e)| e.abs() / (abs_tol + rel_tol * y0.abs().max(y1.abs())))
            .fold(0.0, f64::max)
    }
}

/// Accepted nodes of one constant-parameter piece.
struct PieceNodes {
    t: Vec<f64>,
    y: Vec<Vec<f64>>,
    f: Vec<Vec<f64>>,
}

impl PieceNodes {
    fn interpolate(&self, t: f64, out: &mut [f64]) {
        let idx = self.t.partition_point(|&x| x < t);
        if idx < self.t.len() && self.t[idx] == t {
            out.copy_from_slice(&self.y[idx]);
            return;
        }
        let i = idx.clamp(1, self.t.len() - 1) - 1;
        hermite(self.t[i], &self.y[i], &self.f[i], self.t[i + 1], &self.y[i + 1], &self.f[i + 1], t, out);
    }
}

#[allow(clippy::too_many_arguments)]
fn hermite(t0: f64, y0: &[f64], f0: &[f64], t1: f64, y1: &[f64], f1: &[f64], t: f64, out: &mut [f64]) {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    for i in 0..out.len() {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
}

/// Integrates `model` under `schedule` from `y0` over `t_span`.
///
/// With `output_grid = None` the trajectory holds every accepted step (each
/// breakpoint appears exactly once); otherwise it is sampled on the grid by
/// cubic Hermite interpolation between accepted steps.
pub fn integrate(
    model: ModelSpec,
    schedule: &ParamSchedule,
    y0: &[f64],
    t_span: (f64, f64),
    cfg: &SolverConfig,
    output_grid: Option<&[f64]>,
) -> Result<Trajectory> {
    model.validate()?;
    cfg.validate()?;
    let (t0, tf) = t_span;
    if !(t0.is_finite() && tf.is_finite() && t0 < tf) {
        return Err(Error::InvalidInput(format!("t_span must satisfy t0 < tf, got ({t0}, {tf})")));
    }
    if schedule.kind() != model.kind {
        return Err(Error::InvalidInput(format!(
            "schedule `{}` holds {} parameters but the model is {}",
            schedule.label,
            schedule.kind(),
            model.kind
        )));
    }
    let dim = model.dimension;
    if y0.len() != dim {
        return Err(Error::InvalidInput(format!("initial state has {} components, expected {dim}", y0.len())));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState {
            context: "in initial state".into(),
        });
    }
    let mask = cfg.nonnegative.resolve(dim)?;
    if let Some(i) = (0..dim).find(|&i| mask[i] && y0[i] < 0.0) {
        return Err(Error::InvalidInput(format!(
            "initial component {i} = {} violates the nonnegativity mask",
            y0[i]
        )));
    }
    if let Some(grid) = output_grid {
        validate_grid(grid, t0, tf)?;
    }
    let pieces = schedule.pieces(t0, tf)?;
    let h_max = cfg.h_max.unwrap_or(0.1 * (tf - t0));

    let mut stats = SolverStats::default();
    let mut nodes: Vec<PieceNodes> = Vec::with_capacity(pieces.len());
    let mut y = y0.to_vec();
    for (a, b, params) in pieces {
        let piece = integrate_piece(&params, &mask, a, b, &y, cfg, h_max, &mut stats)?;
        y.clone_from(piece.y.last().expect("piece has nodes"));
        nodes.push(piece);
    }

    let (times, states) = match output_grid {
        None => {
            let mut times = Vec::new();
            let mut states = Vec::new();
            for (pi, piece) in nodes.iter().enumerate() {
                let skip = usize::from(pi > 0);
                times.extend_from_slice(&piece.t[skip..]);
                states.extend(piece.y[skip..].iter().cloned());
            }
            (times, states)
        }
        Some(grid) => {
            let mut states = Vec::with_capacity(grid.len());
            let mut pi = 0;
            for &t in grid {
                while pi + 1 < nodes.len() && t > *nodes[pi].t.last().expect("nonempty") {
                    pi += 1;
                }
                let mut out = vec![0.0; dim];
                nodes[pi].interpolate(t, &mut out);
                for (v, &nonneg) in out.iter_mut().zip(&mask) {
                    if nonneg && *v < 0.0 {
                        *v = 0.0;
                    }
                }
                states.push(out);
            }
            (grid.to_vec(), states)
        }
    };

    Ok(Trajectory {
        times,
        states,
        model,
        schedule_id: schedule.label.clone(),
        stats,
    })
}

/// `count` evenly spaced points from `start` to `end` inclusive.
pub fn uniform_grid(start: f64, end: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(start.is_finite() && end.is_finite() && start < end) {
        return Err(Error::InvalidInput(format!(
            "uniform grid needs start < end and at least 2 points, got [{start}, {end}] with {count}"
        )));
    }
    let dt = (end - start) / (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count).map(|i| start + i as f64 * dt).collect();
    grid[count - 1] = end;
    Ok(grid)
}

fn validate_grid(grid: &[f64], t0: f64, tf: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("output grid is empty".into()));
    }
    for (i, &t) in grid.iter().enumerate() {
        if !(t >= t0 && t <= tf) {
            return Err(Error::InvalidInput(format!("grid point {t} lies outside [{t0}, {tf}]")));
        }
        if i > 0 && t <= grid[i - 1] {
            return Err(Error::InvalidInput("output grid must be strictly increasing".into()));
        }
    }
    Ok(())
}

/// Derivative with the nonnegativity clamp applied.
fn masked_rhs(params: &ParamSet, mask: &[bool], y: &[f64], dy: &mut [f64]) -> Result<()> {
    params.rhs(y, dy)?;
    for i in 0..y.len() {
        if mask[i] && y[i] <= 0.0 && dy[i] < 0.0 {
            dy[i] = 0.0;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn integrate_piece(
    params: &ParamSet,
    mask: &[bool],
    a: f64,
    b: f64,
    y0: &[f64],
    cfg: &SolverConfig,
    h_max: f64,
    stats: &mut SolverStats,
) -> Result<PieceNodes> {
    let dim = y0.len();
    let mut evals = 0usize;
    let mut rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        evals += 1;
        masked_rhs(params, mask, y, dy)
    };

    let mut t = a;
    let mut y = y0.to_vec();
    let mut f = vec![0.0; dim];
    eval(&mut rhs, t, &y, &mut f)?;

    let span = b - a;
    let mut h = match cfg.h_init {
        Some(h) => h,
        None => initial_step(&mut rhs, t, &y, &f, cfg, h_max.min(span)),
    }
    .min(h_max)
    .min(span)
    .max(cfg.h_min.min(span));

    let mut nodes = PieceNodes {
        t: vec![t],
        y: vec![y.clone()],
        f: vec![f.clone()],
    };
    let mut stages = Stages::new(dim);
    let mut rejected_last = false;
    let mut stage_failure: Option<Error> = None;

    while t < b {
        if stats.steps_accepted + stats.steps_rejected >= cfg.max_steps {
            stats.rhs_evaluations += evals;
            return Err(Error::StepBudgetExceeded {
                t,
                max_steps: cfg.max_steps,
            });
        }
        let h_floor = cfg.h_min.max(16.0 * f64::EPSILON * t.abs());
        let last = t + 1.01 * h >= b;
        if last {
            h = b - t;
        } else if h < h_floor {
            stats.rhs_evaluations += evals;
            return Err(stage_failure.take().unwrap_or(Error::StepUnderflow { t, h }));
        }

        stages.k[0].copy_from_slice(&f);
        // A trial step may leave the domain of the vector field at an
        // internal stage; shrink and retry. If the step size collapses, the
        // domain error itself is reported.
        match stages.advance(&mut rhs, t, &y, h) {
            Ok(()) => {}
            Err(e @ (Error::SingularCarryingCapacity { .. } | Error::NonFiniteState { .. })) => {
                stats.steps_rejected += 1;
                h *= FAC_MIN;
                rejected_last = true;
                stage_failure = Some(e);
                continue;
            }
            Err(e) => {
                stats.rhs_evaluations += evals;
                return Err(e);
            }
        }
        let err = stages.error_norm(&y, cfg.rel_tol, cfg.abs_tol);

        if err > 1.0 {
            stats.steps_rejected += 1;
            h *= step_factor(err, false).min(1.0);
            rejected_last = true;
            continue;
        }
        let overshoot = (0..dim)
            .filter(|&i| mask[i])
            .map(|i| -stages.y_next[i])
            .fold(0.0, f64::max);
        if overshoot > cfg.abs_tol {
            stats.steps_rejected += 1;
            h *= 0.5;
            rejected_last = true;
            continue;
        }

        stats.steps_accepted += 1;
        stage_failure = None;
        t = if last { b } else { t + h };
        y.copy_from_slice(&stages.y_next);
        let mut projected = false;
        for i in 0..dim {
            if mask[i] && y[i] < 0.0 {
                y[i] = 0.0;
                projected = true;
            }
        }
        if projected {
            eval(&mut rhs, t, &y, &mut f)?;
        } else {
            f.copy_from_slice(&stages.k[6]);
        }
        nodes.t.push(t);
        nodes.y.push(y.clone());
        nodes.f.push(f.clone());

        h = (h * step_factor(err, rejected_last)).min(h_max);
        rejected_last = false;
    }
    stats.rhs_evaluations += evals;
    Ok(nodes)
}

/// Starting step size from the local derivative scales.
fn initial_step<F>(rhs: &mut F, t: f64, y: &[f64], f: &[f64], cfg: &SolverConfig, h_max: f64) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let scale: Vec<f64> = y.iter().map(|v| cfg.abs_tol + cfg.rel_tol * v.abs()).collect();
    let rms = |v: &mut dyn Iterator<Item = f64>| {
        let (sum, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x * x, n + 1));
        (sum / n as f64).sqrt()
    };
    let d0 = rms(&mut y.iter().zip(&scale).map(|(v, s)| v / s));
    let d1 = rms(&mut f.iter().zip(&scale).map(|(v, s)| v / s));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(h_max);

    let y1: Vec<f64> = y.iter().zip(f).map(|(v, d)| v + h0 * d).collect();
    let mut f1 = vec![0.0; y.len()];
    if eval(rhs, t + h0, &y1, &mut f1).is_err() {
        return h0;
    }
    let d2 = rms(&mut f1.iter().zip(f).zip(&scale).map(|((a, b), s)| (a - b) / s)) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(0.2)
    };
    (100.0 * h0).min(h1).min(h_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{tk_rhs, LvParams, ModelKind, State3, TkParams};
    use crate::schedule::Segment;

    fn exp_rhs(_t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        dy[0] = y[0];
        Ok(())
    }

    #[test]
    fn single_step_matches_exponential() {
        let r = step(&mut exp_rhs, 0.0, &[1.0], 0.1, &SolverConfig::default()).unwrap();
        assert!((r.y_next[0] - 0.1f64.exp()).abs() < 1e-9, "{}", r.y_next[0]);
        assert!(r.error[0].abs() < 1e-7);
    }

    #[test]
    fn zero_field_step_is_identity() {
        let mut zero = |_t: f64, _y: &[f64], dy: &mut [f64]| {
            dy.fill(0.0);
            Ok(())
        };
        for h in [1e-3, 0.7, 50.0] {
            let y = [3.0, -1.5, 0.25];
            let r = step(&mut zero, 2.0, &y, h, &SolverConfig::default()).unwrap();
            assert_eq!(r.y_next, y.to_vec());
            assert!(r.error.iter().all(|&e| e == 0.0));
            assert_eq!(r.h_suggest, 5.0 * h);
        }
    }

    #[test]
    fn critical_point_is_stationary_under_step() {
        let p = TkParams::BASELINE;
        let x = [351.0 / 160.0, 118401.0 / 256000.0, 3.0 / 80.0];
        let mut rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy.copy_from_slice(&tk_rhs(State3::from_slice(y), &p)?.to_array());
            Ok(())
        };
        for h in [1e-3, 0.1, 0.5, 1.0] {
            let r = step(&mut rhs, 1.0, &x, h, &SolverConfig::default()).unwrap();
            for i in 0..3 {
                assert!((r.y_next[i] - x[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn step_rejects_non_finite_stage() {
        let mut blowup = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = if y[0] > 1.0 { f64::NAN } else { 1.0 };
            Ok(())
        };
        let err = step(&mut blowup, 0.0, &[0.5], 1.0, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteState { .. }));
        assert!(step(&mut exp_rhs, 0.0, &[1.0], -0.1, &SolverConfig::default()).is_err());
    }

    #[test]
    fn step_suggestion_is_clamped() {
        let mut stiff = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = -1e4 * y[0];
            Ok(())
        };
        let r = step(&mut stiff, 0.0, &[1.0], 1.0, &SolverConfig::default()).unwrap();
        assert!(r.error_norm > 1.0);
        assert!((r.h_suggest - 0.2).abs() < 1e-15);
    }

    #[test]
    fn solver_config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            rel_tol: -1e-6,
            ..SolverConfig::default()
        };
        let msg = bad.validate().unwrap_err().to_string();
        assert!(msg.contains("rel_tol"), "{msg}");
        let bad = SolverConfig {
            h_min: 1.0,
            h_max: Some(0.5),
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            max_steps: 0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn mask_resolution() {
        assert_eq!(NonNegativeMask::Uniform(true).resolve(2).unwrap(), vec![true, true]);
        assert_eq!(
            NonNegativeMask::PerComponent(vec![true, false, true]).resolve(3).unwrap(),
            vec![true, false, true]
        );
        assert!(NonNegativeMask::PerComponent(vec![true]).resolve(3).is_err());
    }

    #[test]
    fn budget_and_underflow_errors() {
        let model = ModelSpec::new(ModelKind::LotkaVolterra);
        let sched = ParamSchedule::constant("lv", LvParams::BASELINE.into(), 1.0, 350.0).unwrap();
        let cfg = SolverConfig {
            max_steps: 10,
            ..SolverConfig::default()
        };
        let err = integrate(model, &sched, &[100.0, 100.0], (1.0, 350.0), &cfg, None).unwrap_err();
        assert!(matches!(err, Error::StepBudgetExceeded { .. }), "{err}");

        let cfg = SolverConfig {
            h_min: 0.5,
            rel_tol: 1e-12,
            abs_tol: 1e-12,
            ..SolverConfig::default()
        };
        let err = integrate(model, &sched, &[100.0, 100.0], (1.0, 350.0), &cfg, None).unwrap_err();
        assert!(matches!(err, Error::StepUnderflow { .. }), "{err}");
    }

    #[test]
    fn rejects_inconsistent_inputs() {
        let model = ModelSpec::new(ModelKind::TurchinKorotayev);
        let sched = ParamSchedule::constant("tk", TkParams::BASELINE.into(), 1.0, 10.0).unwrap();
        let cfg = SolverConfig::default();
        assert!(integrate(model, &sched, &[1.0, 0.0], (1.0, 10.0), &cfg, None).is_err());
        assert!(integrate(model, &sched, &[-1.0, 0.0, 1.0], (1.0, 10.0), &cfg, None).is_err());
        assert!(integrate(model, &sched, &[1.0, 0.0, 1.0], (10.0, 1.0), &cfg, None).is_err());
        assert!(integrate(model, &sched, &[1.0, 0.0, 1.0], (0.0, 10.0), &cfg, None).is_err());
        let grid = [2.0, 1.5];
        assert!(integrate(model, &sched, &[1.0, 0.0, 1.0], (1.0, 10.0), &cfg, Some(&grid)).is_err());
        let lv = ModelSpec::new(ModelKind::LotkaVolterra);
        assert!(integrate(lv, &sched, &[1.0, 1.0], (1.0, 10.0), &cfg, None).is_err());
    }

    #[test]
    fn singular_capacity_propagates() {
        // c large enough that the initial conflict level already exceeds capacity
        let p = TkParams {
            c: 4.0,
            ..TkParams::BASELINE
        };
        let model = ModelSpec::new(ModelKind::TurchinKorotayev);
        let sched = ParamSchedule::constant("tk", p.into(), 1.0, 100.0).unwrap();
        let err = integrate(model, &sched, &[1.0, 0.0, 1.0], (1.0, 100.0), &SolverConfig::default(), None)
            .unwrap_err();
        assert!(matches!(err, Error::SingularCarryingCapacity { .. }), "{err}");
    }

    #[test]
    fn breakpoints_hit_exactly_and_once() {
        let p1 = TkParams::BASELINE;
        let p2 = TkParams { kmax: 5.0, ..p1 };
        let sched = ParamSchedule::new(
            "two",
            vec![
                Segment { start: 1.0, params: p1.into() },
                Segment { start: 123.456, params: p2.into() },
            ],
            300.0,
        )
        .unwrap();
        let traj = integrate(
            ModelSpec::new(ModelKind::TurchinKorotayev),
            &sched,
            &[1.0, 0.0, 1.0],
            (1.0, 300.0),
            &SolverConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(traj.times.iter().filter(|&&t| t == 123.456).count(), 1);
        assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*traj.times.last().unwrap(), 300.0);
        assert_eq!(traj.times.len(), traj.stats.steps_accepted + 1);
    }
}
