//! Numerical verification toolkit for functional inequalities on the
//! quantum Boolean cube `M_2(C)^{⊗n}`.
//!
//! The crate provides:
//! - a dense operator algebra with Pauli–Fourier duality ([`algebra`]),
//! - the differential calculus of the depolarizing semigroup ([`calculus`]),
//! - closed-form constants and special functions ([`constants`]),
//! - reproducible operator generators ([`generators`]),
//! - Walsh–Fourier analysis on the classical cube ([`classical`]),
//! - an executable catalog of inequality checkers with a suite runner and
//!   extremizer search ([`laws`], [`suite`], [`search`]),
//! - machine-readable reporting types ([`report`]).

pub mod algebra;
pub mod calculus;
pub mod classical;
pub mod constants;
pub mod error;
pub mod generators;
pub mod laws;
pub mod quad;
pub mod report;
pub mod search;
pub mod suite;

pub use error::{Error, Result};
