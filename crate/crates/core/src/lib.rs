//! Quantum metrology under collective dephasing.
//!
//! * [`dephasing`] holds decoherence laws, bath correlation structures and
//!   the discrete spin-boson mode sums.
//! * [`metrology`] evaluates Ramsey probabilities, Fisher information,
//!   optimal interrogation times and precision ratios, including the
//!   one-auxiliary-qubit cancellation scheme.
//! * [`stochastic`] simulates bath engineering: multi-tone random-phase
//!   fields, exact trajectory phases and ensemble-averaged readout, with the
//!   Gaussian-limit and power-spectral-density machinery.
//! * [`redfield`] integrates the pure-dephasing master equation element by
//!   element and serves as the numerical oracle for the closed forms.
//! * [`validation`] runs the end-to-end cross-checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dephasing;
pub mod error;
pub mod metrology;
pub mod optimize;
pub mod redfield;
pub mod stochastic;
pub mod validation;

pub use error::{Error, Result};
