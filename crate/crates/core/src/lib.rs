//! Minimum search-load beam parameters for multifunction phased-array radars.
//!
//! Modules, bottom up:
//! * [`detection`]: chi-square tail, universal detection equation, required SNR.
//! * [`lattice`]: beam lattice geometry, SNR ratio, reduced and absolute search load.
//! * [`cumulative`]: cumulative detection probability of an inbound target.
//! * [`solver`]: phase-wise analytic beam optimum, frame-time root, `r_S` line search.
//! * [`oracle`]: brute-force and Monte Carlo cross-checks.

pub mod config;
pub mod cumulative;
pub mod detection;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod polyfit;
pub mod presets;
pub mod quadrature;
pub mod report;
pub mod search;
pub mod solver;
pub mod special;

pub use detection::{pd, required_snr, DetectionContext, SwerlingCase};
pub use error::{Constraint, Error, Result};
pub use lattice::{BeamParams, Extent, LatticeKind, NormalizedBounds, RadarScenario};
pub use solver::{optimize, power_sweep, Fidelity, OptimizationResult, Problem, SolverOptions};
