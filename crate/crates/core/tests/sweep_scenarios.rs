use sweepdyn_core::integrator::{integrate, uniform_grid, SolverConfig, Trajectory};
use sweepdyn_core::model::{ModelKind, ModelSpec, TkParam, TkParams};
use sweepdyn_core::scan::{scan_subsets, three_phase_schedule, PhaseFactors, ScanConfig};
use sweepdyn_core::schedule::{ParamSchedule, Segment};
use sweepdyn_core::sweep::{detect_sweeps, SweepConfig, SweepEvent};

const BASE: TkParams = TkParams::BASELINE;

fn three_rows(phase2: TkParams, phase3: TkParams) -> ParamSchedule {
    ParamSchedule::new(
        "three-phase",
        vec![
            Segment { start: 1.0, params: BASE.into() },
            Segment { start: 1000.0, params: phase2.into() },
            Segment { start: 2000.0, params: phase3.into() },
        ],
        4000.0,
    )
    .unwrap()
}

fn run(schedule: &ParamSchedule) -> Trajectory {
    let grid = uniform_grid(1.0, 4000.0, 4000).unwrap();
    integrate(
        ModelSpec::new(ModelKind::TurchinKorotayev),
        schedule,
        &[1.0, 0.0, 1.0],
        (1.0, 4000.0),
        &SolverConfig::default(),
        Some(&grid),
    )
    .unwrap()
}

fn events(schedule: &ParamSchedule) -> Vec<SweepEvent> {
    detect_sweeps(&run(schedule), &schedule.breakpoints(), &SweepConfig::default()).unwrap()
}

#[test]
fn rising_capacity_growth_and_war_severity_sweeps_twice() {
    let schedule = three_rows(
        TkParams { kmax: 5.0, r0: 0.095, delta: 0.45, ..BASE },
        TkParams { kmax: 7.0, r0: 0.15, delta: 0.95, ..BASE },
    );
    let ev = events(&schedule);
    assert_eq!(ev.len(), 2);
    assert!(ev.iter().all(|e| e.detected && e.ratio >= 1.05), "{ev:?}");
}

#[test]
fn rising_capacity_with_falling_fiscal_rates_sweeps_twice() {
    let schedule = three_rows(
        TkParams { kmax: 5.0, beta: 0.25 / 3.0, rho0: 1.0 / 3.0, ..BASE },
        TkParams { kmax: 7.0, beta: 0.25 / 9.0, rho0: 1.0 / 9.0, ..BASE },
    );
    assert!(events(&schedule).iter().all(|e| e.detected));
}

#[test]
fn calmer_conflict_dynamics_sweep_twice() {
    let schedule = three_rows(
        TkParams { a: 0.01 / 3.0, b: 0.15, alpha: 0.3, ..BASE },
        TkParams { a: 0.01 / 9.0, b: 0.45, alpha: 0.9, ..BASE },
    );
    let ev = events(&schedule);
    assert_eq!(ev.len(), 2);
    assert!(ev.iter().all(|e| e.detected), "{ev:?}");
}

#[test]
fn war_severity_alone_does_not_sweep() {
    let schedule = three_rows(TkParams { delta: 0.45, ..BASE }, TkParams { delta: 0.95, ..BASE });
    let ev = events(&schedule);
    assert_eq!(ev.len(), 2);
    assert!(ev.iter().all(|e| !e.detected), "{ev:?}");
}

#[test]
fn capacity_alone_sweeps() {
    let schedule = three_rows(TkParams { kmax: 5.0, ..BASE }, TkParams { kmax: 7.0, ..BASE });
    assert!(events(&schedule).iter().all(|e| e.detected));
}

#[test]
fn envelope_metric_is_capped_by_capacity_ratio() {
    // With W >= 0 the population never exceeds kmax, so the envelope ratio
    // across a breakpoint cannot exceed the ratio of carrying capacities.
    let schedule = three_rows(
        TkParams { a: 0.01 / 3.0, b: 0.15, alpha: 0.3, ..BASE },
        TkParams { a: 0.01 / 9.0, b: 0.45, alpha: 0.9, ..BASE },
    );
    let traj = run(&schedule);
    let n_max = traj.component(0).into_iter().fold(0.0, f64::max);
    assert!(n_max <= BASE.kmax);
    let ev = detect_sweeps(&traj, &[1000.0, 2000.0], &SweepConfig::envelope_max()).unwrap();
    assert!(ev.iter().all(|e| e.ratio < 1.5 && !e.detected), "{ev:?}");
}

#[test]
fn scan_covers_every_subset_and_flags_the_tabulated_experiments() {
    use TkParam::*;
    let cfg = ScanConfig::default();
    let results = scan_subsets(&BASE, &PhaseFactors::default(), &cfg).unwrap();
    assert_eq!(results.len(), 255);
    let find = |subset: &[TkParam]| results.iter().find(|r| r.subset == subset).unwrap();
    for subset in [&[Kmax, R0, Delta][..], &[Kmax, Beta, Rho0], &[A, B, Alpha]] {
        let r = find(subset);
        assert!(r.detected_at(1000.0) && r.detected_at(2000.0), "{}: {:?}", r.label(), r.events);
    }
    let delta = find(&[Delta]);
    assert!(delta.error.is_none() && !delta.detected_at(1000.0) && !delta.detected_at(2000.0));

    // ranked by max ratio, failures last
    let ratios: Vec<f64> = results.iter().filter_map(|r| r.max_ratio).collect();
    assert!(ratios.windows(2).all(|w| w[0] >= w[1]));
    let first_failure = results.iter().position(|r| r.error.is_some()).unwrap_or(results.len());
    assert!(results[first_failure..].iter().all(|r| r.error.is_some()));
}

#[test]
fn scan_is_independent_of_thread_count() {
    let cfg = ScanConfig {
        max_subset_size: 2,
        ..ScanConfig::default()
    };
    let one = scan_subsets(&BASE, &PhaseFactors::default(), &ScanConfig { threads: Some(1), ..cfg.clone() }).unwrap();
    let four = scan_subsets(&BASE, &PhaseFactors::default(), &ScanConfig { threads: Some(4), ..cfg.clone() }).unwrap();
    let again = scan_subsets(&BASE, &PhaseFactors::default(), &ScanConfig { threads: Some(4), ..cfg }).unwrap();
    assert_eq!(one.len(), 45);
    assert_eq!(one, four);
    assert_eq!(four, again);
}

#[test]
fn scan_factors_rebuild_the_capacity_growth_war_schedule() {
    use TkParam::*;
    let s = three_phase_schedule(&BASE, &[Kmax, R0, Delta], &PhaseFactors::default(), (1.0, 4000.0), (1000.0, 2000.0))
        .unwrap();
    let p2 = *s.params_at(1000.0).unwrap().as_tk().unwrap();
    let p3 = *s.params_at(2000.0).unwrap().as_tk().unwrap();
    assert!((p2.kmax - 5.0).abs() < 1e-12 && (p2.r0 - 0.095).abs() < 1e-12);
    assert!((p3.kmax - 7.0).abs() < 1e-12 && (p3.r0 - 0.15).abs() < 1e-12 && (p3.delta - 0.95).abs() < 1e-12);
    // the code's phase-two war factor gives 0.95, not the tabulated 0.45
    assert!((p2.delta - 0.95).abs() < 1e-12);
}
