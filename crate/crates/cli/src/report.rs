//! JSON and CSV report shapes.

use std::fmt::Write;

use serde::Serialize;
use sweepdyn_core::analysis::{LimitCycleReport, StabilityReport, Validity};
use sweepdyn_core::integrator::SolverStats;
use sweepdyn_core::model::{ModelKind, State3, TkParams};
use sweepdyn_core::scan::ScanResult;
use sweepdyn_core::sweep::SweepEvent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

/// Output of `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub name: String,
    pub params: TkParams,
    pub critical_point: State3,
    pub jacobian: [[f64; 3]; 3],
    pub eigenvalues: Vec<ComplexJson>,
    pub classification: String,
    pub validity: Validity,
    /// `[c3, c2, c1, c0]` of `det(J - lambda I)`.
    pub char_poly: [f64; 4],
    pub residual: f64,
    pub solver_stats: Option<SolverStats>,
    pub limit_cycle: Option<LimitCycleReport>,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn new(name: &str, params: TkParams, r: &StabilityReport) -> Self {
        Self {
            name: name.into(),
            params,
            critical_point: r.critical_point,
            jacobian: r.jacobian.0,
            eigenvalues: r.eigenvalues.iter().map(|z| ComplexJson { re: z.re, im: z.im }).collect(),
            classification: r.classification.as_str().into(),
            validity: r.validity,
            char_poly: r.char_poly.coefficients(),
            residual: r.residual,
            solver_stats: None,
            limit_cycle: None,
            notes: Vec::new(),
        }
    }
}

/// Output of `simulate` and `reproduce`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub model: ModelKind,
    pub rows: usize,
    pub solver_stats: SolverStats,
    pub breakpoints: Vec<f64>,
    pub sweeps: Option<Vec<SweepEvent>>,
    pub limit_cycle: Option<LimitCycleReport>,
    pub files: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub name: String,
    pub base: TkParams,
    pub breakpoints: [f64; 2],
    pub threshold: f64,
    pub rows: usize,
    pub failed: usize,
    pub detected_everywhere: usize,
    pub results: Vec<ScanResult>,
}

/// One row per subset, in ranked order.
pub fn scan_csv(results: &[ScanResult], breakpoints: [f64; 2]) -> String {
    let mut out = String::from(
        "rank,index,subset,size,bp1,ratio1,detected1,bp2,ratio2,detected2,max_ratio,detected_all,error\n",
    );
    for (rank, r) in results.iter().enumerate() {
        write!(out, "{},{},{},{}", rank + 1, r.index, r.label(), r.subset.len()).unwrap();
        for bp in breakpoints {
            match r.events.iter().find(|e| e.breakpoint_time == bp) {
                Some(e) => write!(out, ",{bp:?},{:?},{}", e.ratio, e.detected).unwrap(),
                None => write!(out, ",{bp:?},,").unwrap(),
            }
        }
        match r.max_ratio {
            Some(m) => write!(out, ",{m:?},{}", r.detected_everywhere()).unwrap(),
            None => out.push_str(",,false"),
        }
        out.push(',');
        if let Some(err) = &r.error {
            out.push('"');
            out.push_str(&err.replace('"', "\"\""));
            out.push('"');
        }
        out.push('\n');
    }
    out
}
