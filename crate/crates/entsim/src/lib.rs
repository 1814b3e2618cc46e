//! Simulation of entangled-state generation in systems of exchange-coupled
//! qubits driven by shaped laser pulses.
//!
//! The library models two and three qubits coupled by an excitation-conserving
//! exchange interaction and driven by external fields. It provides
//!
//! - Hamiltonian builders for the bare system, the full lab-frame system, and
//!   the rotating-wave effective level schemes ([`model`]);
//! - a pulse-envelope and detuning-profile library ([`pulses`]);
//! - an adaptive Schrödinger integrator with closed-form oracles
//!   ([`dynamics`]);
//! - exact diagonalization with cyclic-shift symmetry labels ([`spectrum`]);
//! - density-matrix utilities and the logarithmic negativity
//!   ([`entanglement`]);
//! - executable protocol presets for Bell, W, and GHZ state preparation
//!   ([`protocols`]);
//! - a command-line front end ([`cli`]).
//!
//! All quantities are dimensionless: time is measured in units of a reference
//! pulse width and energies in the inverse of that unit.

pub mod cli;
pub mod dynamics;
pub mod entanglement;
pub mod model;
pub mod protocols;
pub mod pulses;
pub mod spectrum;

mod book;

use num_complex::Complex64;

/// Complex amplitude type used throughout.
pub type C64 = Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex vector.
pub type CVector = nalgebra::DVector<Complex64>;
