//! Simulation engine for two interacting particles walking on a 1D
//! tight-binding lattice under a Gaussian pulsed electric field.
//!
//! The state is the full two-particle amplitude grid `f(n1, n2)` in the
//! Wannier (site) basis. The engine propagates it with explicit fourth-order
//! Runge-Kutta, computes centroids, marginal densities, double occupancy and
//! entanglement purity, and provides the semi-classical band-structure
//! predictions that the measured drift velocities are fitted against.
//!
//! Everything here is `no_std` + `alloc`; file formats, the CLI and the
//! dense-diagonalization oracle live in the companion `pairwalk` crate.
//!
//! Units: `hbar = J = e = a = 1` throughout.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod integrator;
pub mod lattice;
pub mod observables;
pub mod pulse;
pub mod semiclassical;

pub use num_complex::Complex64;
