//! Equilibrium and local stability of the Turchin-Korotayev system, plus
//! limit-cycle diagnostics on simulated trajectories.

mod eigen;
mod limit_cycle;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use eigen::{char_poly, eigenvalues3, CharPoly, Matrix3};
pub use limit_cycle::{limit_cycle_report, LimitCycleReport, MIN_PEAKS, RELATIVE_SPREAD};

use crate::error::{Error, Result};
use crate::model::{tk_rhs, State3, TkParams, CAPACITY_GUARD};

/// Real parts within this distance of zero count as marginal.
pub const STABILITY_THRESHOLD: f64 = 1e-9;

/// Interior equilibrium of the system.
///
/// `W* = r0 beta / (rho0 delta)`, `N* = (kmax - c W*)(1 - beta/rho0)` and
/// `S* = (a N*^2 - b W*) / alpha`.
pub fn critical_point(p: &TkParams) -> Result<State3> {
    p.validate()?;
    if p.rho0 <= p.beta {
        return Err(Error::NoInteriorEquilibrium(format!(
            "rho0 ({}) must exceed beta ({}) for a positive population",
            p.rho0, p.beta
        )));
    }
    let w = p.r0 * p.beta / (p.rho0 * p.delta);
    let capacity = p.capacity(w);
    if capacity < CAPACITY_GUARD {
        return Err(Error::NoInteriorEquilibrium(format!(
            "carrying capacity kmax - c*W* = {capacity} is not positive"
        )));
    }
    let n = capacity * (1.0 - p.beta / p.rho0);
    let s = (p.a * n * n - p.b * w) / p.alpha;
    if s < 0.0 {
        return Err(Error::NoInteriorEquilibrium(format!("state resources S* = {s} are negative")));
    }
    Ok(State3::new(n, s, w))
}

/// Truth values of the two printed validity inequalities for the closed-form
/// critical point, evaluated term by term as written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validity {
    pub condition10: bool,
    pub condition11: bool,
}

/// Both sides of each inequality, for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValiditySides {
    pub lhs10: f64,
    pub rhs10: f64,
    pub lhs11: f64,
    pub rhs11: f64,
}

pub fn validity_sides(p: &TkParams) -> ValiditySides {
    let TkParams {
        r0,
        rho0,
        c,
        a,
        kmax,
        b,
        beta,
        delta,
        ..
    } = *p;
    let lhs10 = beta * delta * kmax * rho0 + beta * c * r0 * rho0;
    let rhs10 = c * r0 * beta.powi(2) + delta * kmax * rho0.powi(2);
    let lhs11 = 2.0 * a * beta.powi(3) * c.powi(2) * r0.powi(2) * rho0
        + 2.0 * a * beta.powi(3) * c * delta * kmax * r0 * rho0
        + 2.0 * a * beta * c * delta * kmax * r0 * rho0.powi(3)
        + 2.0 * a * beta * delta.powi(2) * kmax.powi(2) * rho0.powi(3)
        + b * beta * delta * r0 * rho0.powi(3);
    let rhs11 = a * beta.powi(4) * c.powi(2) * r0.powi(2)
        + a * beta.powi(2) * c.powi(2) * r0.powi(2) * rho0.powi(2)
        + 4.0 * a * beta.powi(2) * c * delta * kmax * r0 * rho0.powi(2)
        + a * beta.powi(2) * delta.powi(2) * kmax.powi(2) * rho0.powi(2)
        + a * delta.powi(2) * kmax.powi(2) * rho0.powi(4);
    ValiditySides {
        lhs10,
        rhs10,
        lhs11,
        rhs11,
    }
}

pub fn validity_conditions(p: &TkParams) -> Validity {
    let s = validity_sides(p);
    Validity {
        condition10: s.lhs10 < s.rhs10,
        condition11: s.lhs11 < s.rhs11,
    }
}

/// Analytic Jacobian of the vector field at `x`.
pub fn jacobian_tk(p: &TkParams, x: State3) -> Result<Matrix3> {
    let State3 { n, w, .. } = x;
    let k = p.capacity(w);
    if !(k >= CAPACITY_GUARD) {
        return Err(Error::SingularCarryingCapacity { capacity: k, w });
    }
    let logistic_slope = 1.0 - 2.0 * n / k;
    let crowding = p.c * n * n / (k * k);
    Ok(Matrix3([
        [p.r0 * logistic_slope - p.delta * w, 0.0, -p.r0 * crowding - p.delta * n],
        [p.rho0 * logistic_slope - p.beta, 0.0, -p.rho0 * crowding],
        [2.0 * p.a * n, -p.alpha, -p.b],
    ]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    StableNode,
    StableFocus,
    UnstableSaddleFocus,
    UnstableNode,
    Marginal,
    /// Non-finite eigenvalues.
    Degenerate,
}

impl Classification {
    pub fn is_unstable(self) -> bool {
        matches!(self, Classification::UnstableNode | Classification::UnstableSaddleFocus)
    }

    pub fn is_stable(self) -> bool {
        matches!(self, Classification::StableNode | Classification::StableFocus)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::StableNode => "stable-node",
            Classification::StableFocus => "stable-focus",
            Classification::UnstableSaddleFocus => "unstable-saddle-focus",
            Classification::UnstableNode => "unstable-node",
            Classification::Marginal => "marginal",
            Classification::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify(eigs: &[Complex64]) -> Classification {
    if eigs.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Classification::Degenerate;
    }
    let oscillatory = eigs.iter().any(|z| z.im.abs() > STABILITY_THRESHOLD);
    if eigs.iter().any(|z| z.re > STABILITY_THRESHOLD) {
        if oscillatory {
            Classification::UnstableSaddleFocus
        } else {
            Classification::UnstableNode
        }
    } else if eigs.iter().all(|z| z.re < -STABILITY_THRESHOLD) {
        if oscillatory {
            Classification::StableFocus
        } else {
            Classification::StableNode
        }
    } else {
        Classification::Marginal
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub critical_point: State3,
    pub jacobian: Matrix3,
    pub eigenvalues: [Complex64; 3],
    pub classification: Classification,
    pub validity: Validity,
    pub char_poly: CharPoly,
    /// `max |f(x*)|` at the computed critical point.
    pub residual: f64,
}

pub fn stability_report(p: &TkParams) -> Result<StabilityReport> {
    let critical_point = critical_point(p)?;
    let jacobian = jacobian_tk(p, critical_point)?;
    let eigenvalues = eigenvalues3(&jacobian);
    Ok(StabilityReport {
        critical_point,
        jacobian,
        eigenvalues,
        classification: classify(&eigenvalues),
        validity: validity_conditions(p),
        char_poly: char_poly(&jacobian),
        residual: tk_rhs(critical_point, p)?.max_abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const T1: TkParams = TkParams::BASELINE;

    #[test]
    fn reference_critical_point() {
        let x = critical_point(&T1).unwrap();
        assert!((x.n - 351.0 / 160.0).abs() < 1e-12);
        assert!((x.s - 118401.0 / 256000.0).abs() < 1e-12);
        assert!((x.w - 3.0 / 80.0).abs() < 1e-12);
        assert!(tk_rhs(x, &T1).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn degenerate_equilibrium_rejected() {
        let p = TkParams { rho0: 0.25, ..T1 };
        assert!(matches!(critical_point(&p), Err(Error::NoInteriorEquilibrium(_))));
        let p = TkParams { c: 100.0, ..T1 };
        assert!(matches!(critical_point(&p), Err(Error::NoInteriorEquilibrium(_))));
        // conflict outweighs violence generation: S* < 0
        let p = TkParams { b: 10.0, ..T1 };
        assert!(matches!(critical_point(&p), Err(Error::NoInteriorEquilibrium(_))));
    }

    #[test]
    fn validity_reference_values() {
        let s = validity_sides(&T1);
        assert!((s.lhs10 - 0.0825).abs() < 1e-15);
        assert!((s.rhs10 - 0.301875).abs() < 1e-15);
        assert!((s.lhs11 - 16539.0 / 32_000_000.0).abs() < 1e-17);
        assert!((s.rhs11 - 250713.0 / 256_000_000.0).abs() < 1e-17);
        assert_eq!(
            validity_conditions(&T1),
            Validity {
                condition10: true,
                condition11: true
            }
        );
    }

    #[test]
    fn condition10_is_strict() {
        // beta = rho0 makes both sides of (10) equal
        let p = TkParams { beta: 1.0, ..T1 };
        let s = validity_sides(&p);
        assert!((s.lhs10 - s.rhs10).abs() < 1e-15);
        assert!(!validity_conditions(&p).condition10);
    }

    #[test]
    fn reference_jacobian() {
        let x = critical_point(&T1).unwrap();
        let j = jacobian_tk(&T1, x).unwrap();
        let want = [
            [-9.0 / 800.0, 0.0, -189.0 / 800.0],
            [-3.0 / 4.0, 0.0, -9.0 / 8.0],
            [351.0 / 8000.0, -1.0 / 10.0, -1.0 / 20.0],
        ];
        for r in 0..3 {
            for c in 0..3 {
                assert!((j[(r, c)] - want[r][c]).abs() < 1e-12, "({r},{c}) {}", j[(r, c)]);
            }
        }
    }

    #[test]
    fn jacobian_row3_at_origin() {
        let j = jacobian_tk(&T1, State3::new(0.0, 0.4, 0.0)).unwrap();
        assert_eq!(j.rows()[2], [0.0, -T1.alpha, -T1.b]);
    }

    #[test]
    fn reference_eigenvalues_unstable() {
        let r = stability_report(&T1).unwrap();
        let want = [(0.1736, -0.1007), (0.1736, 0.1007), (-0.4085, 0.0)];
        for (z, (re, im)) in r.eigenvalues.iter().zip(want) {
            assert!((z.re - re).abs() < 1e-3 && (z.im - im).abs() < 1e-3, "{z}");
        }
        assert!(r.classification.is_unstable());
        assert_eq!(r.classification, Classification::UnstableSaddleFocus);
        for z in r.eigenvalues {
            assert!(r.char_poly.eval(z).norm() < 1e-6);
        }
    }

    #[test]
    fn classify_examples() {
        let re = |v: f64| Complex64::new(v, 0.0);
        assert_eq!(classify(&[re(-1.0), re(-2.0), re(-3.0)]), Classification::StableNode);
        assert_eq!(
            classify(&[re(-1.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)]),
            Classification::Marginal
        );
        assert_eq!(
            classify(&[re(-1.0), Complex64::new(-0.5, 1.0), Complex64::new(-0.5, -1.0)]),
            Classification::StableFocus
        );
        assert_eq!(classify(&[re(1.0), re(-2.0), re(-3.0)]), Classification::UnstableNode);
        assert_eq!(classify(&[re(f64::NAN), re(1.0), re(1.0)]), Classification::Degenerate);
    }
}
