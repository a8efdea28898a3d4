//! Run configuration files.
//!
//! A config is a JSON object:
//!
//! ```json
//! {
//!   "name": "tk-table2",
//!   "model": "turchin-korotayev",
//!   "initial_state": [1.0, 0.0, 1.0],
//!   "t_span": [1.0, 4000.0],
//!   "solver": { "rel_tol": 1e-6, "abs_tol": 1e-10 },
//!   "schedule": { "segments": [ { "start": 1.0, "params": { "r0": 0.015, ... } } ] },
//!   "grid_points": 4000,
//!   "outputs": { "trajectory_csv": true, "analysis_json": false, "plot_svg": true },
//!   "output_dir": "out"
//! }
//! ```
//!
//! `schedule` may instead name a preset (`{ "preset": "tk-table2" }`), in
//! which case that preset's segments are used. `solver`, `grid_points`,
//! `outputs`, `output_dir`, `sweep` and `scan` are optional. Unknown keys are
//! rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sweepdyn_core::integrator::SolverConfig;
use sweepdyn_core::model::{LvParams, ModelKind, ModelSpec, ParamSet, TkParams};
use sweepdyn_core::schedule::{ParamSchedule, Segment};
use sweepdyn_core::sweep::SweepConfig;

use crate::error::CliError;
use crate::presets;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    pub model: ModelKind,
    pub initial_state: Vec<f64>,
    pub t_span: [f64; 2],
    #[serde(default)]
    pub solver: SolverConfig,
    pub schedule: ScheduleSpec,
    /// Uniform output grid over `t_span`; accepted steps when absent.
    #[serde(default)]
    pub grid_points: Option<usize>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSettings>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<SegmentSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub start: f64,
    /// Parameter object of the config's model kind.
    pub params: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub trajectory_csv: bool,
    pub analysis_json: bool,
    pub plot_svg: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            trajectory_csv: true,
            analysis_json: false,
            plot_svg: false,
        }
    }
}

/// Scan options; everything not given falls back to the scanner defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSettings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_subset_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    /// Per-parameter `[phase2, phase3]` factors overriding the defaults.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<std::collections::BTreeMap<String, [f64; 2]>>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("`{path}`: {}", e.into_inner()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn model_spec(&self) -> ModelSpec {
        ModelSpec::new(self.model)
    }

    pub fn span(&self) -> (f64, f64) {
        (self.t_span[0], self.t_span[1])
    }

    /// Checks everything that can be checked without integrating.
    pub fn validate(&self) -> Result<(), CliError> {
        let field = |name: &str, msg: String| CliError::Config(format!("`{name}`: {msg}"));
        if self.name.trim().is_empty() {
            return Err(field("name", "must not be empty".into()));
        }
        if self.name.contains(['/', '\\']) {
            return Err(field("name", "must not contain path separators".into()));
        }
        let dim = self.model.dimension();
        if self.initial_state.len() != dim {
            return Err(field(
                "initial_state",
                format!("{} model needs {dim} components, got {}", self.model, self.initial_state.len()),
            ));
        }
        if let Some(i) = self.initial_state.iter().position(|v| !v.is_finite()) {
            return Err(field(&format!("initial_state[{i}]"), "must be finite".into()));
        }
        let [t0, tf] = self.t_span;
        if !(t0.is_finite() && tf.is_finite() && t0 < tf) {
            return Err(field("t_span", format!("needs finite t0 < tf, got [{t0}, {tf}]")));
        }
        self.solver.validate().map_err(|e| solver_field_error(&e.to_string()))?;
        if let Ok(mask) = self.solver.nonnegative.resolve(dim) {
            if let Some(i) = (0..dim).find(|&i| mask[i] && self.initial_state[i] < 0.0) {
                return Err(field(
                    &format!("initial_state[{i}]"),
                    "is negative but the component is flagged nonnegative".into(),
                ));
            }
        } else {
            return Err(field("solver.nonnegative", format!("needs one flag per component ({dim})")));
        }
        if let Some(n) = self.grid_points {
            if n < 2 {
                return Err(field("grid_points", format!("needs at least 2 points, got {n}")));
            }
        }
        if let Some(sweep) = &self.sweep {
            sweep.validate().map_err(|e| field("sweep", e.to_string()))?;
        }
        if let Some(scan) = &self.scan {
            if scan.max_subset_size == Some(0) {
                return Err(field("scan.max_subset_size", "must be at least 1".into()));
            }
            if let Some(n) = scan.grid_points {
                if n < 2 {
                    return Err(field("scan.grid_points", format!("needs at least 2 points, got {n}")));
                }
            }
        }
        let schedule = self.schedule()?;
        if !schedule.covers(t0, tf) {
            return Err(field(
                "schedule",
                format!(
                    "covers [{}, {}] but t_span is [{t0}, {tf}]",
                    schedule.start(),
                    schedule.horizon_end()
                ),
            ));
        }
        Ok(())
    }

    /// Materializes the schedule, ending at `t_span[1]`.
    pub fn schedule(&self) -> Result<ParamSchedule, CliError> {
        let segments = match (&self.schedule.preset, &self.schedule.segments) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("`schedule`: give either `preset` or `segments`, not both".into()))
            }
            (None, None) => return Err(CliError::Config("`schedule`: needs `preset` or `segments`".into())),
            (Some(name), None) => {
                let preset = presets::preset(name)
                    .ok_or_else(|| CliError::Config(format!("`schedule.preset`: unknown preset `{name}`")))?;
                if preset.model != self.model {
                    return Err(CliError::Config(format!(
                        "`schedule.preset`: preset `{name}` is a {} schedule but the model is {}",
                        preset.model, self.model
                    )));
                }
                preset.schedule.segments.expect("presets list their segments")
            }
            (None, Some(segments)) => segments.clone(),
        };
        if segments.is_empty() {
            return Err(CliError::Config("`schedule.segments`: needs at least one segment".into()));
        }
        let mut parsed = Vec::with_capacity(segments.len());
        for (i, seg) in segments.iter().enumerate() {
            let path = format!("schedule.segments[{i}].params");
            let params = parse_params(self.model, &seg.params).map_err(|m| CliError::Config(format!("`{path}`: {m}")))?;
            params
                .validate()
                .map_err(|e| CliError::Config(format!("`{path}`: {e}")))?;
            parsed.push(Segment { start: seg.start, params });
        }
        ParamSchedule::new(self.name.clone(), parsed, self.t_span[1])
            .map_err(|e| CliError::Config(format!("`schedule`: {e}")))
    }
}

fn parse_params(model: ModelKind, value: &Value) -> Result<ParamSet, String> {
    fn typed<T: serde::de::DeserializeOwned>(value: &Value) -> Result<T, String> {
        serde_path_to_error::deserialize(value.clone()).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                e.into_inner().to_string()
            } else {
                format!("{path}: {}", e.into_inner())
            }
        })
    }
    match model {
        ModelKind::TurchinKorotayev => typed::<TkParams>(value).map(ParamSet::from),
        ModelKind::LotkaVolterra => typed::<LvParams>(value).map(ParamSet::from),
        ModelKind::Exponential => match value {
            Value::Object(m) if m.is_empty() => Ok(ParamSet::Exponential),
            Value::Null => Ok(ParamSet::Exponential),
            _ => Err("the exponential model takes no parameters".into()),
        },
    }
}

fn solver_field_error(msg: &str) -> CliError {
    // core messages start with the offending field name after the prefix
    let detail = msg.strip_prefix("invalid solver configuration: ").unwrap_or(msg);
    let name = detail.split_whitespace().next().unwrap_or("solver");
    CliError::Config(format!("`solver.{name}`: {detail}"))
}
