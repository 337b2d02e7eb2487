//! Dissipation-accelerated entanglement between a decaying ("non-Hermitian")
//! qubit and one or two lossless partners.
//!
//! * [`quantum`]: dense states, operators, partial traces and the Wootters
//!   concurrence for registers of up to three qubits.
//! * [`model`]: the two- and three-qubit Hamiltonians, their jump operator,
//!   regime classification and eigensystems.
//! * [`analytic`]: closed forms for no-jump amplitudes, concurrence,
//!   entangling times and success probabilities.
//! * [`numerics`]: master equation, no-jump propagation, quantum-jump
//!   Monte Carlo and root finding, used as an independent check.
//! * [`sweep`]: record types, CSV/JSON emission and the command
//!   implementations behind the `nh-entangle` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analytic;
pub mod cli;
pub mod error;
pub mod model;
pub mod numerics;
pub mod quantum;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
