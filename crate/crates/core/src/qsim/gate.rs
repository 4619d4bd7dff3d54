use super::{check_qubit, unitarity_deviation, CMatrix, QsimError};
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

const UNITARITY_TOL: f64 = 1e-12;

/// Control polarity: `Filled` fires on |1>, `Open` fires on |0>.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Open,
    Filled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn filled(qubit: usize) -> Self {
        Control {
            qubit,
            polarity: Polarity::Filled,
        }
    }

    pub fn open(qubit: usize) -> Self {
        Control {
            qubit,
            polarity: Polarity::Open,
        }
    }
}

#[derive(Clone, Debug)]
pub enum GateKind {
    X,
    Z,
    H,
    Swap,
    /// Generic unitary block on `targets.len()` qubits. The label is kept
    /// for reporting (gate histograms, text serialization).
    Unitary { matrix: CMatrix, label: String },
}

impl GateKind {
    pub fn name(&self) -> &str {
        match self {
            GateKind::X => "x",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::Swap => "swap",
            GateKind::Unitary { label, .. } => label,
        }
    }
}

/// A gate: a unitary block on target qubits, optionally conditioned on
/// control qubits with open/filled polarity. Controls and targets are
/// disjoint by construction.
#[derive(Clone, Debug)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
    controls: Vec<Control>,
}

impl Gate {
    fn build(kind: GateKind, targets: Vec<usize>) -> Result<Self, QsimError> {
        for (i, &t) in targets.iter().enumerate() {
            if targets[..i].contains(&t) {
                return Err(QsimError::DuplicateQubit(t));
            }
        }
        Ok(Gate {
            kind,
            targets,
            controls: Vec::new(),
        })
    }

    pub fn x(target: usize) -> Self {
        Gate::build(GateKind::X, vec![target]).expect("single target")
    }

    pub fn z(target: usize) -> Self {
        Gate::build(GateKind::Z, vec![target]).expect("single target")
    }

    pub fn h(target: usize) -> Self {
        Gate::build(GateKind::H, vec![target]).expect("single target")
    }

    pub fn swap(a: usize, b: usize) -> Result<Self, QsimError> {
        Gate::build(GateKind::Swap, vec![a, b])
    }

    /// Generic unitary block; rejects non-unitary matrices.
    pub fn unitary(
        label: impl Into<String>,
        targets: Vec<usize>,
        matrix: CMatrix,
    ) -> Result<Self, QsimError> {
        let dim = 1usize << targets.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(QsimError::BadBlockShape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                targets: targets.len(),
            });
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation > UNITARITY_TOL {
            return Err(QsimError::NonUnitaryBlock { deviation });
        }
        Gate::build(
            GateKind::Unitary {
                matrix,
                label: label.into(),
            },
            targets,
        )
    }

    /// Adds controls, keeping the control and target sets disjoint.
    pub fn controlled_by(mut self, controls: Vec<Control>) -> Result<Self, QsimError> {
        for (i, c) in controls.iter().enumerate() {
            if self.targets.contains(&c.qubit)
                || controls[..i].iter().any(|o| o.qubit == c.qubit)
                || self.controls.iter().any(|o| o.qubit == c.qubit)
            {
                return Err(QsimError::DuplicateQubit(c.qubit));
            }
        }
        self.controls.extend(controls);
        Ok(self)
    }

    pub fn cx(control: usize, target: usize) -> Result<Self, QsimError> {
        Gate::x(target).controlled_by(vec![Control::filled(control)])
    }

    pub fn ccx(c0: usize, c1: usize, target: usize) -> Result<Self, QsimError> {
        Gate::x(target).controlled_by(vec![Control::filled(c0), Control::filled(c1)])
    }

    pub fn mcx(controls: Vec<Control>, target: usize) -> Result<Self, QsimError> {
        Gate::x(target).controlled_by(controls)
    }

    pub fn cz(control: usize, target: usize) -> Result<Self, QsimError> {
        Gate::z(target).controlled_by(vec![Control::filled(control)])
    }

    pub fn cswap(control: usize, a: usize, b: usize) -> Result<Self, QsimError> {
        Gate::swap(a, b)?.controlled_by(vec![Control::filled(control)])
    }

    pub fn ch(control: usize, target: usize) -> Result<Self, QsimError> {
        Gate::h(target).controlled_by(vec![Control::filled(control)])
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn controls(&self) -> &[Control] {
        &self.controls
    }

    pub fn max_qubit(&self) -> usize {
        self.targets
            .iter()
            .copied()
            .chain(self.controls.iter().map(|c| c.qubit))
            .max()
            .expect("gate has at least one target")
    }

    pub(crate) fn validate_for(&self, n_qubits: usize) -> Result<(), QsimError> {
        for &t in &self.targets {
            check_qubit(t, n_qubits)?;
        }
        for c in &self.controls {
            check_qubit(c.qubit, n_qubits)?;
        }
        Ok(())
    }

    /// The uncontrolled unitary block on the target qubits. Target `k`
    /// corresponds to bit `k` of the block's row/column indices.
    pub fn block_matrix(&self) -> CMatrix {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match &self.kind {
            GateKind::X => CMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
            GateKind::Z => CMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]),
            GateKind::H => CMatrix::from_row_slice(2, 2, &[s, s, s, -s]),
            GateKind::Swap => {
                let mut m = CMatrix::zeros(4, 4);
                m[(0, 0)] = one;
                m[(1, 2)] = one;
                m[(2, 1)] = one;
                m[(3, 3)] = one;
                m
            }
            GateKind::Unitary { matrix, .. } => matrix.clone(),
        }
    }

    /// Inverse gate (same controls; the block is replaced by its adjoint).
    pub fn inverse(&self) -> Self {
        let kind = match &self.kind {
            GateKind::Unitary { matrix, label } => GateKind::Unitary {
                matrix: matrix.adjoint(),
                label: format!("{label}_dg"),
            },
            other => other.clone(),
        };
        Gate {
            kind,
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }
}
