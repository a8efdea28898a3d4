//! Simulation and analysis of the Turchin-Korotayev demographic-structural
//! model under piecewise-constant parameter schedules.
//!
//! * [`model`]: state types, parameter sets and vector fields (including the
//!   Lotka-Volterra system used as a validation problem).
//! * [`schedule`]: half-open piecewise-constant parameter schedules.
//! * [`integrator`]: adaptive Dormand-Prince 5(4) with breakpoint restarts,
//!   nonnegativity handling and Hermite dense output.
//! * [`analysis`]: equilibrium, Jacobian, eigenvalues, stability class and
//!   limit-cycle diagnostics.
//! * [`sweep`] and [`scan`]: upward-sweep detection and the parameter-subset
//!   scanner.

pub mod analysis;
pub mod error;
pub mod integrator;
pub mod model;
pub mod scan;
pub mod schedule;
pub mod signal;
pub mod sweep;

pub use error::{Error, Result};
