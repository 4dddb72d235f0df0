//! Simulation of quantum gates realized as controlled adiabatic evolutions.
//!
//! A register qubit (or qubit pair) plays the role of a control whose
//! orthogonal projectors select which of two branch Hamiltonians drives an
//! auxiliary qubit. Sweeping the driven qubit's ground state slowly from the
//! north pole of the Bloch sphere along one of two meridians imprints a
//! relative phase between the branches, and in the fully swept limit the
//! register ends up rotated about an arbitrary axis — a universal gate set
//! once controlled rotations are included.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`] — dense complex vectors/operators, Hermitian eigensolver,
//!   Kronecker products and qubit embeddings.
//! * [`hamiltonian`] — Bloch axes, linear sweep schedules, and the
//!   time-dependent controlled-evolution Hamiltonians.
//! * [`propagate`] — Schrödinger propagation, spectral-gap and phase
//!   diagnostics, diabatic error, and a dephasing demonstration.
//! * [`circuit`] — gate compilation, adiabatic gate/circuit execution with a
//!   reused ancilla, and the ideal gate-model oracle used for verification.
//!
//! Conventions: ħ = 1, qubit 0 is the leftmost (most significant) tensor
//! factor, and |0⟩ is the north pole of the Bloch sphere.

pub mod circuit;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod propagate;
pub mod tol;

pub use error::{Error, Result};
