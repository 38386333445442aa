//! Symbolic-numeric toolkit for continuous-time recurrent neural networks.
//!
//! A continuous-time RNN `xdot = sigma(Ax + Bu)`, `y = Cx` with an
//! activation satisfying a polynomial ODE can be rewritten, exactly, as a
//! rational (often polynomial) control system. This crate constructs those
//! rational systems symbolically over exact rational arithmetic, verifies
//! the rewriting numerically by co-simulation, and computes algebraic
//! certificates for the RNN through its rational image:
//!
//! * [`algebra`] — exact sparse multivariate polynomials, rational
//!   functions, and fraction-free rank.
//! * [`activation`] — activation functions as polynomial ODE data and the
//!   conversion to the first-order function system used downstream.
//! * [`systems`] — RNNs, rational systems, piecewise-constant inputs, and
//!   fixed-step RK4 simulation of both.
//! * [`embedding`] — the symbolic construction of the lifted rational
//!   system and the auxiliary derivative system, plus numeric checks that
//!   the constructions do realize the maps they should.
//! * [`analysis`] — Lie-derivative towers, observability rank,
//!   accessibility, coordinate observability subspaces, and the
//!   minimality/observability/reachability certificates built from them.
//! * [`specfile`] — the JSON document formats for systems and reports.

pub mod activation;
pub mod algebra;
pub mod analysis;
pub mod embedding;
pub mod error;
pub mod report;
pub mod specfile;
pub mod systems;

pub use error::{Error, Result};
