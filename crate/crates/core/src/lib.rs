//! Finite-difference theta-scheme solver for monotone second-order mean
//! field games on the periodic torus.
//!
//! The library is organized bottom-up: grid and discrete operators, the
//! implicit heat solve, problem data, the two theta-scheme passes, the
//! kernel form of the discrete game, the outer fixed-point solver, the
//! numerical Hamiltonian checker, and the experiment harness.

pub mod error;
pub mod torus_grid;
pub mod implicit_heat;
pub mod problem;
pub mod theta_scheme;
pub mod discrete_mfg;
pub mod solver;
pub mod numerical_hamiltonian;
pub mod harness;
