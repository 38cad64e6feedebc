//! Linear-response toolkit for homogeneous quantum gases.
//!
//! The crate computes the Lindhard response function of translation-invariant
//! momentum distributions through three independent routes (zero-temperature
//! closed forms, the f'-weighted integral representation and a direct
//! time-quadrature oracle), evaluates dynamical-stability conditions for the
//! Hartree equation with infinitely many particles, inverts the linearized
//! response operator on discrete space-time grids, and checks the explicit
//! second-order response kernel against its change-of-variables norm bound.
//!
//! Grid sweeps, lattice multiplier application and sample ensembles run on
//! rayon when the default `parallel` feature is enabled, and fall back to
//! sequential loops without it; results are identical either way.

pub mod artifact;
pub mod config;
pub mod distributions;
pub mod dynamics;
pub mod error;
pub mod interp;
pub mod lindhard;
pub mod par;
pub mod quad;
pub mod rng;
pub mod second_order;
pub mod stability;
pub mod special;

pub use error::{Error, ErrorCategory, Result};
