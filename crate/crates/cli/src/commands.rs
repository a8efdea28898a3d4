use std::path::{Path, PathBuf};

use sweepdyn_core::analysis::{limit_cycle_report, stability_report};
use sweepdyn_core::integrator::{integrate, uniform_grid, Trajectory};
use sweepdyn_core::model::{ModelKind, TkParam};
use sweepdyn_core::scan::{scan_subsets, PhaseFactors, ScanConfig, ScanResult};
use sweepdyn_core::schedule::ParamSchedule;
use sweepdyn_core::sweep::detect_sweeps;

use crate::config::RunConfig;
use crate::csv::trajectory_csv;
use crate::error::CliError;
use crate::fsio::write_atomic;
use crate::presets::{self, FigureKind};
use crate::report::{scan_csv, AnalysisReport, RunSummary, ScanReport};
use crate::svg::{line_plot, phase_plot, Axis, Series, PALETTE};

pub const THREADS_ENV: &str = "SWEEPDYN_THREADS";

/// Tail of the run inspected by the limit-cycle diagnostic.
const TAIL_FRACTION: f64 = 0.5;

/// Reads the scan thread cap from the environment.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

pub fn output_dir(cfg: &RunConfig, flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn run_trajectory(cfg: &RunConfig, schedule: &ParamSchedule) -> Result<Trajectory, CliError> {
    let (t0, tf) = cfg.span();
    let grid = cfg.grid_points.map(|n| uniform_grid(t0, tf, n)).transpose()?;
    Ok(integrate(
        cfg.model_spec(),
        schedule,
        &cfg.initial_state,
        (t0, tf),
        &cfg.solver,
        grid.as_deref(),
    )?)
}

fn summarize(cfg: &RunConfig, schedule: &ParamSchedule, traj: &Trajectory) -> RunSummary {
    let mut notes = Vec::new();
    let breakpoints = schedule.breakpoints();
    let sweeps = if cfg.model == ModelKind::TurchinKorotayev && !breakpoints.is_empty() {
        let sweep_cfg = cfg.sweep.clone().unwrap_or_default();
        match detect_sweeps(traj, &breakpoints, &sweep_cfg) {
            Ok(ev) => Some(ev),
            Err(e) => {
                notes.push(format!("sweep detection skipped: {e}"));
                None
            }
        }
    } else {
        None
    };
    let limit_cycle = match limit_cycle_report(traj, 0, TAIL_FRACTION) {
        Ok(r) => Some(r),
        Err(e) => {
            notes.push(format!("limit-cycle diagnostic skipped: {e}"));
            None
        }
    };
    RunSummary {
        name: cfg.name.clone(),
        model: cfg.model,
        rows: traj.len(),
        solver_stats: traj.stats,
        breakpoints,
        sweeps,
        limit_cycle,
        files: Vec::new(),
        notes,
    }
}

fn plot(traj: &Trajectory, kind: FigureKind, title: &str) -> String {
    let times = &traj.times;
    match kind {
        FigureKind::TkSeries => {
            let (n, s, w) = (traj.component(0), traj.component(1), traj.component(2));
            line_plot(
                title,
                "t",
                times,
                &[
                    Series { label: "S", values: &s, axis: Axis::Left, color: PALETTE[0] },
                    Series { label: "N", values: &n, axis: Axis::Right, color: PALETTE[1] },
                    Series { label: "W", values: &w, axis: Axis::Right, color: PALETTE[2] },
                ],
                "S",
                "N, W",
            )
        }
        FigureKind::Phase => phase_plot(title, "prey R", "predator C", &traj.component(0), &traj.component(1)),
        FigureKind::PreySeries => {
            let r = traj.component(0);
            line_plot(
                title,
                "t",
                times,
                &[Series { label: "R", values: &r, axis: Axis::Left, color: PALETTE[0] }],
                "prey R",
                "",
            )
        }
    }
}

fn default_plot_kind(model: ModelKind) -> Option<FigureKind> {
    match model {
        ModelKind::TurchinKorotayev => Some(FigureKind::TkSeries),
        ModelKind::LotkaVolterra => Some(FigureKind::Phase),
        ModelKind::Exponential => None,
    }
}

fn exp_plot(traj: &Trajectory, title: &str) -> String {
    let y = traj.component(0);
    line_plot(
        title,
        "t",
        &traj.times,
        &[Series { label: "y", values: &y, axis: Axis::Left, color: PALETTE[0] }],
        "y",
        "",
    )
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub struct SimulateOutcome {
    pub trajectory: Trajectory,
    pub summary: RunSummary,
}

/// Integrates the configured run and writes the requested artifacts into
/// `out_dir` as `<name>.csv`, `<name>.svg` and `<name>.json`.
pub fn simulate(cfg: &RunConfig, out_dir: &Path) -> Result<SimulateOutcome, CliError> {
    let schedule = cfg.schedule()?;
    let traj = run_trajectory(cfg, &schedule)?;
    let mut summary = summarize(cfg, &schedule, &traj);
    let mut files = Vec::new();
    if cfg.outputs.trajectory_csv {
        let path = out_dir.join(format!("{}.csv", cfg.name));
        write_atomic(&path, trajectory_csv(&traj).as_bytes())?;
        files.push(path);
    }
    if cfg.outputs.plot_svg {
        let path = out_dir.join(format!("{}.svg", cfg.name));
        let svg = match default_plot_kind(cfg.model) {
            Some(kind) => plot(&traj, kind, &cfg.name),
            None => exp_plot(&traj, &cfg.name),
        };
        write_atomic(&path, svg.as_bytes())?;
        files.push(path);
    }
    if cfg.outputs.analysis_json {
        files.push(out_dir.join(format!("{}.json", cfg.name)));
    }
    summary.files = files.iter().map(|p| p.display().to_string()).collect();
    if cfg.outputs.analysis_json {
        write_atomic(files.last().expect("just pushed"), to_json(&summary).as_bytes())?;
    }
    Ok(SimulateOutcome {
        trajectory: traj,
        summary,
    })
}

/// Stability report for the parameters in force at `t_span[0]`, plus solver
/// statistics and the limit-cycle diagnostic of the configured run.
pub fn analyze(cfg: &RunConfig) -> Result<AnalysisReport, CliError> {
    if cfg.model != ModelKind::TurchinKorotayev {
        return Err(CliError::Config(format!(
            "`model`: analyze needs a turchin-korotayev config, got {}",
            cfg.model
        )));
    }
    let schedule = cfg.schedule()?;
    let params = *schedule
        .params_at(cfg.t_span[0])?
        .as_tk()
        .expect("schedule kind checked against the model");
    let stability = stability_report(&params)?;
    let mut report = AnalysisReport::new(&cfg.name, params, &stability);
    if schedule.segments().len() > 1 {
        report.notes.push(format!(
            "stability computed for the first segment; the schedule switches at {:?}",
            schedule.breakpoints()
        ));
    }
    let traj = run_trajectory(cfg, &schedule)?;
    report.solver_stats = Some(traj.stats);
    match limit_cycle_report(&traj, 0, TAIL_FRACTION) {
        Ok(lc) => report.limit_cycle = Some(lc),
        Err(e) => report.notes.push(format!("limit-cycle diagnostic skipped: {e}")),
    }
    Ok(report)
}

pub fn analysis_json(report: &AnalysisReport) -> String {
    to_json(report)
}

pub struct ScanOutcome {
    pub report: ScanReport,
    pub csv: String,
}

pub fn scan_config(cfg: &RunConfig, max_subset_size: Option<usize>, threads: Option<usize>) -> Result<ScanConfig, CliError> {
    let settings = cfg.scan.clone().unwrap_or_default();
    let defaults = ScanConfig::default();
    let y0: [f64; 3] = cfg
        .initial_state
        .as_slice()
        .try_into()
        .map_err(|_| CliError::Config("`initial_state`: scan needs three components".into()))?;
    let bps = settings.breakpoints.map_or(defaults.breakpoints, |[a, b]| (a, b));
    Ok(ScanConfig {
        y0,
        t_span: cfg.span(),
        breakpoints: bps,
        solver: cfg.solver.clone(),
        grid_points: settings.grid_points.or(cfg.grid_points).unwrap_or(defaults.grid_points),
        sweep: cfg.sweep.clone().unwrap_or_default(),
        max_subset_size: max_subset_size.or(settings.max_subset_size).unwrap_or(defaults.max_subset_size),
        threads,
    })
}

fn phase_factors(cfg: &RunConfig) -> Result<PhaseFactors, CliError> {
    let mut raw: [(f64, f64); 9] = std::array::from_fn(|i| PhaseFactors::default().get(TkParam::ALL[i]));
    if let Some(overrides) = cfg.scan.as_ref().and_then(|s| s.factors.as_ref()) {
        for (name, [f2, f3]) in overrides {
            let p: TkParam = name
                .parse()
                .map_err(|_| CliError::Config(format!("`scan.factors.{name}`: unknown parameter")))?;
            raw[p as usize] = (*f2, *f3);
        }
    }
    PhaseFactors::new(raw).map_err(|e| CliError::Config(format!("`scan.factors`: {e}")))
}

/// Runs the subset scan on the parameters in force at `t_span[0]`.
pub fn scan(cfg: &RunConfig, max_subset_size: Option<usize>, threads: Option<usize>) -> Result<ScanOutcome, CliError> {
    if cfg.model != ModelKind::TurchinKorotayev {
        return Err(CliError::Config(format!("`model`: scan needs a turchin-korotayev config, got {}", cfg.model)));
    }
    if max_subset_size == Some(0) {
        return Err(CliError::Config("--max-subset-size must be at least 1".into()));
    }
    let schedule = cfg.schedule()?;
    let base = *schedule.params_at(cfg.t_span[0])?.as_tk().expect("schedule kind checked against the model");
    let scan_cfg = scan_config(cfg, max_subset_size, threads)?;
    let factors = phase_factors(cfg)?;
    let results: Vec<ScanResult> = scan_subsets(&base, &factors, &scan_cfg)?;
    if !results.is_empty() && results.iter().all(|r| r.error.is_some()) {
        return Err(CliError::Numerical(format!(
            "every subset run failed; first error: {}",
            results[0].error.as_deref().unwrap_or("unknown")
        )));
    }
    let bps = [scan_cfg.breakpoints.0, scan_cfg.breakpoints.1];
    let csv = scan_csv(&results, bps);
    let report = ScanReport {
        name: cfg.name.clone(),
        base,
        breakpoints: bps,
        threshold: scan_cfg.sweep.threshold,
        rows: results.len(),
        failed: results.iter().filter(|r| r.error.is_some()).count(),
        detected_everywhere: results.iter().filter(|r| r.detected_everywhere()).count(),
        results,
    };
    Ok(ScanOutcome { report, csv })
}

pub fn write_scan(outcome: &ScanOutcome, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let csv_path = out_dir.join(format!("{}-scan.csv", outcome.report.name));
    let json_path = out_dir.join(format!("{}-scan.json", outcome.report.name));
    write_atomic(&csv_path, outcome.csv.as_bytes())?;
    write_atomic(&json_path, to_json(&outcome.report).as_bytes())?;
    Ok(vec![csv_path, json_path])
}

/// Re-creates one figure as `<id>.csv` and `<id>.svg` in `out_dir`.
pub fn reproduce(figure: &str, out_dir: &Path) -> Result<RunSummary, CliError> {
    let known: Vec<&str> = presets::FIGURES.iter().map(|f| f.0).collect();
    let (cfg, kind) = presets::figure(figure)
        .ok_or_else(|| CliError::Config(format!("unknown figure id `{figure}`; known ids: {}", known.join(", "))))?;
    let schedule = cfg.schedule()?;
    let traj = run_trajectory(&cfg, &schedule)?;
    let mut summary = summarize(&cfg, &schedule, &traj);
    let csv_path = out_dir.join(format!("{figure}.csv"));
    let svg_path = out_dir.join(format!("{figure}.svg"));
    write_atomic(&csv_path, trajectory_csv(&traj).as_bytes())?;
    write_atomic(&svg_path, plot(&traj, kind, &format!("{figure}: {}", cfg.name)).as_bytes())?;
    summary.files = vec![csv_path.display().to_string(), svg_path.display().to_string()];
    Ok(summary)
}

pub fn summary_json(summary: &RunSummary) -> String {
    to_json(summary)
}
