//! Dense statevector simulation of gate circuits.
//!
//! Everything here is exact up to f64 arithmetic: no sampling is involved
//! unless explicitly requested. Measurements are handled by enumerating
//! every branch together with its Born probability, so deterministic
//! circuits produce a single branch of probability one and stochastic
//! collisions produce their exact outcome distribution.
//!
//! Qubit 0 is the least-significant bit of basis-state indices, so a cell
//! register written `|n2 n1 n0>` stores `n0` in bit 0.

mod circuit;
mod gate;
mod state;

pub use circuit::{max_entry_diff, Branch, Circuit, Element, MeasurementOutcome, RunMode};
pub use gate::{Control, Gate, GateKind, Polarity};
pub use state::{OutcomeDistribution, Statevector};

use thiserror::Error;

/// Dense complex matrix used for gate blocks and extracted unitaries.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;

#[derive(Debug, Error)]
pub enum QsimError {
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("qubit {0} appears more than once in gate operands")]
    DuplicateQubit(usize),
    #[error("matrix block is {rows}x{cols} but the gate targets {targets} qubit(s)")]
    BadBlockShape {
        rows: usize,
        cols: usize,
        targets: usize,
    },
    #[error("matrix block is not unitary (max |U\u{2020}U - I| = {deviation:.3e})")]
    NonUnitaryBlock { deviation: f64 },
    #[error("state has {state} qubits but the operation expects {expected}")]
    DimensionMismatch { state: usize, expected: usize },
    #[error("circuit contains a measurement; a measurement-free circuit is required")]
    MeasurementPresent,
    #[error("amplitude vector of length {len} is not a power of two")]
    BadStateLength { len: usize },
    #[error("state norm is {norm}, expected 1")]
    NotNormalized { norm: f64 },
    #[error("empty qubit subset")]
    EmptySubset,
    #[error("basis index {index} out of range for {n_qubits} qubits")]
    BasisOutOfRange { index: u64, n_qubits: usize },
}

pub(crate) fn check_qubit(index: usize, n_qubits: usize) -> Result<(), QsimError> {
    if index >= n_qubits {
        Err(QsimError::QubitOutOfRange { index, n_qubits })
    } else {
        Ok(())
    }
}

/// Max-entry deviation of `u` from unitarity, `max |U†U - I|`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let prod = u.adjoint() * u;
    let n = prod.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { 1.0 } else { 0.0 };
            let dev = (prod[(i, j)] - num_complex::Complex64::new(expect, 0.0)).norm();
            worst = worst.max(dev);
        }
    }
    worst
}
