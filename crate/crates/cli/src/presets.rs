//! Named scenario presets.
//!
//! Each preset is a complete [`RunConfig`]. The same configs are checked in
//! under `presets/` so they can be copied and edited.

use sweepdyn_core::integrator::SolverConfig;
use sweepdyn_core::model::{LvParams, ModelKind, TkParams};

use crate::config::{Outputs, RunConfig, ScheduleSpec, SegmentSpec};

pub const NAMES: [&str; 10] = [
    "tk-baseline",
    "tk-table2",
    "tk-table3",
    "tk-table4",
    "tk-kmax-only",
    "tk-r0-only",
    "tk-delta-only",
    "lv-baseline",
    "lv-switched-text",
    "lv-switched-code",
];

const TK: TkParams = TkParams::BASELINE;
const LV: LvParams = LvParams::BASELINE;

fn tk_segments(rows: &[(f64, TkParams)]) -> Vec<SegmentSpec> {
    rows.iter()
        .map(|(start, p)| SegmentSpec {
            start: *start,
            params: serde_json::to_value(p).expect("parameters serialize"),
        })
        .collect()
}

fn lv_segments(rows: &[(f64, f64)]) -> Vec<SegmentSpec> {
    rows.iter()
        .map(|&(start, gamma)| SegmentSpec {
            start,
            params: serde_json::to_value(LvParams { gamma, ..LV }).expect("parameters serialize"),
        })
        .collect()
}

fn tk_run(name: &str, phase2: TkParams, phase3: TkParams) -> RunConfig {
    let rows = if phase2 == TK && phase3 == TK {
        vec![(1.0, TK)]
    } else {
        vec![(1.0, TK), (1000.0, phase2), (2000.0, phase3)]
    };
    RunConfig {
        name: name.into(),
        model: ModelKind::TurchinKorotayev,
        initial_state: vec![1.0, 0.0, 1.0],
        t_span: [1.0, 4000.0],
        solver: SolverConfig::default(),
        schedule: ScheduleSpec {
            preset: None,
            segments: Some(tk_segments(&rows)),
        },
        grid_points: Some(4000),
        outputs: Outputs {
            trajectory_csv: true,
            analysis_json: true,
            plot_svg: true,
        },
        output_dir: None,
        sweep: None,
        scan: None,
    }
}

fn lv_run(name: &str, t_end: f64, rows: &[(f64, f64)]) -> RunConfig {
    RunConfig {
        name: name.into(),
        model: ModelKind::LotkaVolterra,
        initial_state: vec![100.0, 100.0],
        t_span: [1.0, t_end],
        solver: SolverConfig::default(),
        schedule: ScheduleSpec {
            preset: None,
            segments: Some(lv_segments(rows)),
        },
        grid_points: None,
        outputs: Outputs {
            trajectory_csv: true,
            analysis_json: false,
            plot_svg: true,
        },
        output_dir: None,
        sweep: None,
        scan: None,
    }
}

pub fn preset(name: &str) -> Option<RunConfig> {
    let cfg = match name {
        "tk-baseline" => tk_run(name, TK, TK),
        "tk-table2" => tk_run(
            name,
            TkParams { kmax: 5.0, r0: 0.095, delta: 0.45, ..TK },
            TkParams { kmax: 7.0, r0: 0.15, delta: 0.95, ..TK },
        ),
        "tk-table3" => tk_run(
            name,
            TkParams { kmax: 5.0, beta: 1.0 / 12.0, rho0: 1.0 / 3.0, ..TK },
            TkParams { kmax: 7.0, beta: 1.0 / 36.0, rho0: 1.0 / 9.0, ..TK },
        ),
        "tk-table4" => tk_run(
            name,
            TkParams { a: 1.0 / 300.0, b: 0.15, alpha: 0.3, ..TK },
            TkParams { a: 1.0 / 900.0, b: 0.45, alpha: 0.9, ..TK },
        ),
        "tk-kmax-only" => tk_run(name, TkParams { kmax: 5.0, ..TK }, TkParams { kmax: 7.0, ..TK }),
        "tk-r0-only" => tk_run(name, TkParams { r0: 0.095, ..TK }, TkParams { r0: 0.15, ..TK }),
        "tk-delta-only" => tk_run(name, TkParams { delta: 0.45, ..TK }, TkParams { delta: 0.95, ..TK }),
        "lv-baseline" => lv_run(name, 350.0, &[(1.0, 0.1)]),
        "lv-switched-text" => lv_run(name, 3500.0, &[(1.0, 0.1), (500.0, 0.2), (1000.0, 0.3), (3000.0, 0.1)]),
        "lv-switched-code" => lv_run(name, 350.0, &[(1.0, 0.1), (50.0, 0.2), (100.0, 0.3), (300.0, 0.1)]),
        _ => return None,
    };
    Some(cfg)
}

/// What a figure id reproduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    /// `N`, `S`, `W` against time, `S` on the left axis.
    TkSeries,
    /// Predator against prey.
    Phase,
    /// Prey against time.
    PreySeries,
}

pub const FIGURES: [(&str, &str, FigureKind); 10] = [
    ("fig2", "tk-baseline", FigureKind::TkSeries),
    ("fig3", "lv-baseline", FigureKind::Phase),
    ("fig4", "lv-switched-code", FigureKind::Phase),
    ("fig5", "lv-switched-code", FigureKind::PreySeries),
    ("fig6", "tk-table2", FigureKind::TkSeries),
    ("fig7", "tk-kmax-only", FigureKind::TkSeries),
    ("fig8", "tk-r0-only", FigureKind::TkSeries),
    ("fig9", "tk-delta-only", FigureKind::TkSeries),
    ("fig10", "tk-table3", FigureKind::TkSeries),
    ("fig11", "tk-table4", FigureKind::TkSeries),
];

pub fn figure(id: &str) -> Option<(RunConfig, FigureKind)> {
    FIGURES
        .iter()
        .find(|(fig, _, _)| *fig == id)
        .map(|&(_, name, kind)| (preset(name).expect("figure presets exist"), kind))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves_and_validates() {
        for name in NAMES {
            let cfg = preset(name).unwrap();
            assert_eq!(cfg.name, name);
            cfg.validate().unwrap();
        }
        assert!(preset("tk-nothing").is_none());
    }

    #[test]
    fn table_rows_match() {
        let s = preset("tk-table2").unwrap().schedule().unwrap();
        let at = |t: f64| *s.params_at(t).unwrap().as_tk().unwrap();
        assert_eq!((at(999.0).kmax, at(999.0).r0, at(999.0).delta), (3.0, 0.015, 0.1));
        assert_eq!((at(1000.0).kmax, at(1000.0).r0, at(1000.0).delta), (5.0, 0.095, 0.45));
        assert_eq!((at(2000.0).kmax, at(2000.0).r0, at(2000.0).delta), (7.0, 0.15, 0.95));

        let s = preset("tk-table3").unwrap().schedule().unwrap();
        let p = *s.params_at(1500.0).unwrap().as_tk().unwrap();
        assert!((p.beta - 0.0833333333).abs() < 1e-9 && (p.rho0 - 0.3333333333).abs() < 1e-9);

        let s = preset("tk-table4").unwrap().schedule().unwrap();
        let p = *s.params_at(3000.0).unwrap().as_tk().unwrap();
        assert!((p.a - 0.0011111111).abs() < 1e-9 && p.b == 0.45 && p.alpha == 0.9);
    }

    #[test]
    fn predator_prey_switch_timings() {
        let s = preset("lv-switched-code").unwrap().schedule().unwrap();
        let gamma = |t: f64| s.params_at(t).unwrap().as_lv().unwrap().gamma;
        assert_eq!([gamma(49.9), gamma(50.0), gamma(100.0), gamma(300.0)], [0.1, 0.2, 0.3, 0.1]);
        let s = preset("lv-switched-text").unwrap().schedule().unwrap();
        assert_eq!(s.breakpoints(), vec![500.0, 1000.0, 3000.0]);
        assert_eq!(s.horizon_end(), 3500.0);
    }

    #[test]
    fn figure_ids() {
        assert_eq!(figure("fig6").unwrap().0.name, "tk-table2");
        assert_eq!(figure("fig3").unwrap().1, FigureKind::Phase);
        assert!(figure("fig99").is_none());
    }
}
