//! Semiclassical toolkit for the nonautonomous Kerr-cat oscillator.
//!
//! The crate covers two stages of the device cycle:
//!
//! * **State preparation** under a ramped two-photon pump: linear stability
//!   of the vacuum trajectory ([`linear`]), an invariant-graph reduction to a
//!   quintic scalar normal form with moving branches ([`reduction`]), and the
//!   supporting stiff-capable integrator ([`odeint`]).
//! * **Gate-pulse transport**: the conservative figure-eight skeleton and its
//!   analytic homoclinic parameterization ([`skeleton`]), the aperiodic
//!   Melnikov splitting function and amplitude-width onset thresholds
//!   ([`melnikov`]), and a full-system lobe-transport simulation
//!   ([`transport`]).
//!
//! All quantities are dimensionless; time is measured in units of the inverse
//! dissipation scale. The [`cli`] module wires the pipelines into the
//! `kerrcat` binary, which emits CSV/JSON data files for each figure-style
//! diagnostic.

pub mod cli;
pub mod linear;
pub mod melnikov;
pub mod model;
pub mod odeint;
pub mod quad;
pub mod reduction;
pub mod skeleton;
pub mod transport;

pub use model::{ModelParams, PhaseState, PumpEnvelope, Trajectory};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum KerrError {
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step size underflow at t = {t}: step {h} below minimum")]
    StepUnderflow { t: f64, h: f64 },

    #[error("non-finite right-hand side at t = {t}")]
    NonFiniteRhs { t: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, KerrError>;
