//! Stabilizer values, quantum values and local bounds of multi-qudit Bell
//! inequalities.
//!
//! A Bell inequality whose quantum value exceeds its stabilizer value is a
//! device-independent witness of non-stabilizerness ("magic"). The stabilizer
//! value is computed by enumerating local-Clifford classes of graph states
//! (orbits of adjacency matrices under the M and L moves), grouping parties by
//! local dimension, and optimizing projective measurements on one
//! representative per class.
//!
//! Module map:
//!
//! * [`algebra`]: prime fields, generalized Pauli operators, dense kernels.
//! * [`graphs`]: adjacency matrices, M/L moves, orbit enumeration.
//! * [`states`]: graph states, stabilizer generators, expectations, purities.
//! * [`census`]: brute-force stabilizer-state counting oracle.
//! * [`bell`]: inequalities, behaviors, Fourier picture, local bounds, catalog.
//! * [`optimize`]: see-saw engine, stabilizer/quantum values, scans.
//! * [`verify`]: the acceptance checks shared by the CLI and the test suite.

pub mod algebra;
pub mod bell;
pub mod census;
mod error;
pub mod graphs;
pub mod optimize;
pub mod states;
pub mod verify;

pub use error::{Error, Result};

/// Default budget for exhaustive enumerations (graph orbits, local strategies).
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 24;
