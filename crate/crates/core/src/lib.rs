//! Feasibility analysis for demonstrating EPR-steering with a lossy split single photon.
//!
//! Alice holds one output of a beam splitter fed with an imperfectly prepared
//! single photon and measures it by homodyne detection (equatorial settings) or
//! photon counting (the σ_z setting). The crate evaluates the quantum
//! predictions, the local-hidden-state bounds they must beat, closed-form
//! sufficient and necessary conditions, and a seeded Monte Carlo of the
//! finite-shot experiment.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod measurement;
pub mod params;
pub mod quadrature;
pub mod sim;
pub mod state;

pub use error::{Error, Result};
pub use params::{ExperimentParams, SettingCount};
