//! Power minimization for full-stack superconducting quantum computers.
//!
//! A performance metric is fixed as a constraint and the electrical power of
//! the whole stack (qubit drive, attenuators, cable conduction, amplifiers,
//! control electronics and refrigeration) is minimized over the hardware and
//! software control parameters.
//!
//! Layout:
//! - [`noise`]: drive power, thermal occupancy, gate infidelity, Pauli error rate
//! - [`cryo`]: stage layout, cable conduction, cooling models, gate and qubit power
//! - [`code`]: concatenated 7-qubit code counting and the fault-tolerant power formula
//! - [`workloads`]: RSA instances, the compressible NISQ circuit, classical GNFS baseline
//! - [`optimizer`]: constrained minimization, sweeps, efficiencies, quantum/classical comparison
//! - [`config`], [`emit`], [`app`]: configuration files, result emission and the CLI driver

pub mod app;
pub mod code;
pub mod config;
pub mod cryo;
pub mod emit;
pub mod error;
pub mod noise;
pub mod optimizer;
pub mod workloads;

pub use error::{Error, Result};
