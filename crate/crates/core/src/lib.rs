//! # qcorr
//!
//! Classical correlations between local von Neumann observables of two-qubit
//! states, written in Bloch–Fano form with a diagonal correlation matrix.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`bloch`] | states, observables, joint outcome tables, positivity |
//! | [`density`] | explicit 4×4 density-matrix reconstruction (oracle path) |
//! | [`sphere`] | product Gauss–Legendre / trapezoid quadrature and Haar Monte Carlo |
//! | [`mutual_info`] | I(n̂, m̂), its sphere averages and closed forms |
//! | [`symmetry`] | signed-permutation orbits of correlation directions |
//! | [`coherence`] | product-basis coherence and von Neumann entropy |
//! | [`rsp`] | remote state preparation: figures of merit, gain, usefulness |
//! | [`figures`] | data tables backing the standard plots |
//! | [`verify`] | numeric acceptance checks shared by tests and the CLI |
//!
//! All entropies are in bits. All functions are pure and thread-safe.

#![forbid(unsafe_code)]

pub mod bloch;
pub mod coherence;
pub mod density;
pub mod error;
pub mod figures;
pub mod mutual_info;
pub mod rsp;
pub mod sphere;
pub mod symmetry;
pub mod verify;

pub use bloch::{
    BlochVector, CorrelationMatrix, JointDistribution, Observable, ObservablePair, TwoQubitState,
    Vec3,
};
pub use error::{Error, Result};
pub use sphere::{McSpec, QuadratureSpec};
