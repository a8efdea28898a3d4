//! Trajectory CSV: a `t,<components>` header, one row per sample, LF endings.
//!
//! Values use the shortest representation that parses back to the same
//! `f64`, so a written trajectory reads back bit-for-bit.

use std::fmt::Write;

use sweepdyn_core::integrator::Trajectory;

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let names = traj.model.kind.component_names();
    let mut out = String::with_capacity(traj.len() * 16 * (names.len() + 1));
    out.push('t');
    for name in names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (t, state) in traj.times.iter().zip(&traj.states) {
        write!(out, "{t:?}").unwrap();
        for v in state {
            write!(out, ",{v:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parsed CSV columns: header names and the numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn parse_csv(text: &str) -> Result<Table, String> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or("empty file")?
        .split(',')
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|f| f.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != header.len() {
            return Err(format!("row {} has {} fields, header has {}", i + 1, row.len(), header.len()));
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use sweepdyn_core::integrator::SolverStats;
    use sweepdyn_core::model::{ModelKind, ModelSpec};

    #[test]
    fn round_trip_is_exact() {
        let traj = Trajectory {
            times: vec![1.0, 1.1, 1e-7, 12345.678901234567],
            states: vec![
                vec![0.1, 0.0, 1.0 / 3.0],
                vec![f64::MIN_POSITIVE, 2.5e300, 7.0],
                vec![0.30000000000000004, 1e-320, 0.0],
                vec![2.0, 3.0, 4.0],
            ],
            model: ModelSpec::new(ModelKind::TurchinKorotayev),
            schedule_id: "x".into(),
            stats: SolverStats::default(),
        };
        let text = trajectory_csv(&traj);
        assert!(text.starts_with("t,N,S,W\n"));
        assert!(!text.contains('\r'));
        let table = parse_csv(&text).unwrap();
        assert_eq!(table.rows.len(), 4);
        for (row, (t, s)) in table.rows.iter().zip(traj.times.iter().zip(&traj.states)) {
            assert_eq!(row[0].to_bits(), t.to_bits());
            for (a, b) in row[1..].iter().zip(s) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
