//! Quantum lattice-gas cellular automata toolkit.
//!
//! The crate is organised around a small exact statevector simulator and a
//! set of domain modules built on top of it:
//!
//! - [`qsim`]: dense statevector simulation of gate circuits with
//!   branch-exact mid-circuit measurement and unitary extraction.
//! - [`pauli`]: Pauli-string algebra, Hermitian decomposition, observable
//!   conjugation, the evolution matrix of a collision unitary and exact
//!   invariant counting.
//! - [`lgca`]: bit-packed classical lattice-gas reference models (D1Q3,
//!   FHP with zero-momentum collisions, collisionless D1Q2) used as oracles
//!   for every quantum construction.
//! - [`circuits`]: gate-level collision circuits, their verification against
//!   the classical rules, and lowering to a {single-qubit, CNOT} basis.
//! - [`qpe`]: diagonal phase operators for classical quantities and the
//!   phase-estimation readout of mass and momentum.
//! - [`streaming`]: the sublinear-space D1Q2 streaming circuit and the
//!   infeasibility certificate for orthogonal cell encodings under
//!   quantum-walk streaming.

pub mod circuits;
pub mod lgca;
pub mod pauli;
pub mod qpe;
pub mod qsim;
pub mod streaming;
