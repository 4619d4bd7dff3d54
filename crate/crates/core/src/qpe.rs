//! Phase-estimation readout of classical cell quantities.
//!
//! A quantity `q(s)` is encoded in a diagonal unitary and read out by
//! phase estimation: ancillas in superposition control powers of the
//! operator, an inverse Fourier transform turns the accumulated relative
//! phase into a binary outcome. Cell states with equal quantities have
//! equal eigenvalues, hence identical outcome rows.
//!
//! Two phase conventions are supported. `Direct` uses `e^{-i q(s)}`,
//! which smears non-dyadic eigenphases over several outcomes but keeps
//! the operator independent of the ancilla count. `Dyadic` uses
//! `e^{2*pi*i q(s)/2^n}`, which makes every integer quantity an exact
//! n-bit eigenphase and yields one sharp peak per value.
//!
//! D1Q3 mass is rest-weighted here (rest particle counts 2): that is the
//! convention under which the collision conserves mass and the diagonal
//! `diag(1, e^{-i}, e^{-2i}, e^{-3i}, e^{-i}, ...)` is built.

use crate::lgca::{cell_mass, quantities, MassConvention, Model};
use crate::qsim::{CMatrix, Circuit, Control, Gate, OutcomeDistribution, QsimError, RunMode, Statevector};
use num_complex::Complex64;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QpeError {
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error("custom quantity has {got} values, expected {expected}")]
    BadCustomLength { got: usize, expected: usize },
    #[error("cell state {state} out of range for {v} qubits")]
    StateOutOfRange { state: u64, v: usize },
}

/// Eigenphase convention of the diagonal operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Convention {
    /// `e^{-i q(s)}`: the quantity enters the phase directly, in radians.
    Direct,
    /// `e^{2*pi*i q(s) / 2^bits}`; exact for integer quantities when the
    /// estimation register has `bits` ancillas.
    Dyadic { bits: usize },
}

/// A classical per-cell quantity.
#[derive(Clone, Debug)]
pub enum Quantity {
    Mass,
    MomentumX,
    MomentumY,
    Custom(Vec<f64>),
}

impl Quantity {
    pub fn parse(s: &str) -> Option<Quantity> {
        match s {
            "mass" => Some(Quantity::Mass),
            "px" => Some(Quantity::MomentumX),
            "py" => Some(Quantity::MomentumY),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Quantity::Mass => "mass",
            Quantity::MomentumX => "px",
            Quantity::MomentumY => "py",
            Quantity::Custom(_) => "custom",
        }
    }
}

/// Classical value of the quantity on every cell state of the model.
pub fn quantity_values(quantity: &Quantity, model: Model) -> Result<Vec<f64>, QpeError> {
    let v = model.velocities();
    let dim = 1usize << v;
    match quantity {
        Quantity::Custom(values) => {
            if values.len() != dim {
                return Err(QpeError::BadCustomLength {
                    got: values.len(),
                    expected: dim,
                });
            }
            Ok(values.clone())
        }
        Quantity::Mass => {
            let convention = match model {
                Model::D1Q3 => MassConvention::RestWeighted,
                _ => MassConvention::PerBit,
            };
            Ok((0..dim)
                .map(|s| cell_mass(s as u8, model, convention) as f64)
                .collect())
        }
        Quantity::MomentumX => Ok((0..dim)
            .map(|s| quantities(s as u8, model).momentum_x())
            .collect()),
        Quantity::MomentumY => Ok((0..dim)
            .map(|s| quantities(s as u8, model).momentum_y())
            .collect()),
    }
}

/// Diagonal unitary with per-state phases (radians per application).
#[derive(Clone, Debug)]
pub struct PhaseOperator {
    v: usize,
    phases: Vec<f64>,
    convention: Convention,
}

impl PhaseOperator {
    pub fn from_values(v: usize, values: &[f64], convention: Convention) -> Self {
        let phases = values
            .iter()
            .map(|&q| match convention {
                Convention::Direct => -q,
                Convention::Dyadic { bits } => TAU * q / (1u64 << bits) as f64,
            })
            .collect();
        PhaseOperator {
            v,
            phases,
            convention,
        }
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Phase (radians) acquired by basis state `s` per application.
    pub fn phase(&self, s: u64) -> f64 {
        self.phases[s as usize]
    }

    /// Eigenphase as a fraction of a full turn, in [0, 1).
    pub fn eigenphase_fraction(&self, s: u64) -> f64 {
        (self.phases[s as usize] / TAU).rem_euclid(1.0)
    }

    /// Dense diagonal matrix of the operator.
    pub fn matrix(&self) -> CMatrix {
        let dim = 1usize << self.v;
        let mut m = CMatrix::zeros(dim, dim);
        for (s, &phase) in self.phases.iter().enumerate() {
            m[(s, s)] = Complex64::from_polar(1.0, phase);
        }
        m
    }

    /// Gate applying the operator raised to `power` (phases scaled, not
    /// repeated applications).
    fn power_gate(&self, power: u64, label: &str) -> Gate {
        let dim = 1usize << self.v;
        let mut m = CMatrix::zeros(dim, dim);
        for (s, &phase) in self.phases.iter().enumerate() {
            m[(s, s)] = Complex64::from_polar(1.0, phase * power as f64);
        }
        Gate::unitary(label, (0..self.v).collect(), m).expect("diagonal unitary")
    }
}

/// Phase operator for a named quantity of a model.
pub fn phase_operator(
    quantity: &Quantity,
    model: Model,
    convention: Convention,
) -> Result<PhaseOperator, QpeError> {
    let values = quantity_values(quantity, model)?;
    Ok(PhaseOperator::from_values(
        model.velocities(),
        &values,
        convention,
    ))
}

/// Inverse Fourier transform block on `n` qubits,
/// `F†[y, x] = 2^{-n/2} e^{-2*pi*i x y / 2^n}`.
fn inverse_fourier_block(n: usize) -> CMatrix {
    let dim = 1usize << n;
    let scale = 1.0 / (dim as f64).sqrt();
    CMatrix::from_fn(dim, dim, |y, x| {
        Complex64::from_polar(scale, -TAU * (x as f64) * (y as f64) / dim as f64)
    })
}

/// Estimation circuit: cell qubits `0..v`, ancillas `v..v+n`. Hadamards
/// on the ancillas, ancilla `k` controls the operator raised to `2^k`,
/// then the inverse Fourier transform on the ancilla register.
pub fn qpe_circuit(op: &PhaseOperator, n_ancillas: usize) -> Circuit {
    let v = op.v;
    let mut c = Circuit::new(v + n_ancillas);
    for k in 0..n_ancillas {
        c.h(v + k).expect("ancilla index");
    }
    for k in 0..n_ancillas {
        let gate = op
            .power_gate(1 << k, &format!("u_q^{}", 1u64 << k))
            .controlled_by(vec![Control::filled(v + k)])
            .expect("disjoint control");
        c.push(gate).expect("valid gate");
    }
    let ft = Gate::unitary(
        "ft_dg",
        (v..v + n_ancillas).collect(),
        inverse_fourier_block(n_ancillas),
    )
    .expect("unitary block");
    c.push(ft).expect("valid gate");
    c
}

/// Exact ancilla-register distribution of the estimation circuit run on
/// cell basis state `s`.
pub fn qpe_distribution(
    op: &PhaseOperator,
    s: u64,
    n_ancillas: usize,
) -> Result<OutcomeDistribution, QpeError> {
    let v = op.v;
    if s >= 1u64 << v {
        return Err(QpeError::StateOutOfRange { state: s, v });
    }
    let circuit = qpe_circuit(op, n_ancillas);
    let initial = Statevector::basis(circuit.n_qubits(), s)?;
    let branches = circuit.run(&initial, RunMode::Exact)?;
    debug_assert_eq!(branches.len(), 1);
    let ancillas: Vec<usize> = (v..v + n_ancillas).collect();
    Ok(branches[0].state.measure_distribution(&ancillas)?)
}

/// Closed-form outcome law of phase estimation for eigenphase fraction
/// `phi`: `P(y) = |2^{-n} sum_j e^{2*pi*i j (phi - y/2^n)}|^2`.
pub fn qpe_kernel(phi: f64, n_ancillas: usize) -> Vec<f64> {
    let dim = 1usize << n_ancillas;
    (0..dim)
        .map(|y| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                acc += Complex64::from_polar(1.0, TAU * j as f64 * (phi - y as f64 / dim as f64));
            }
            (acc / dim as f64).norm_sqr()
        })
        .collect()
}

/// Outcome distributions for every cell basis state.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub v: usize,
    pub n_ancillas: usize,
    pub rows: Vec<OutcomeDistribution>,
}

impl SpectrumReport {
    /// CSV with one row per input state and one column per outcome.
    pub fn to_csv(&self) -> String {
        let outcomes = 1usize << self.n_ancillas;
        let mut out = String::from("state");
        for y in 0..outcomes {
            out.push_str(&format!(",outcome_{y}"));
        }
        out.push('\n');
        for (s, row) in self.rows.iter().enumerate() {
            out.push_str(&s.to_string());
            for y in 0..outcomes as u64 {
                out.push_str(&format!(",{}", row.probability(y)));
            }
            out.push('\n');
        }
        out
    }

    /// Aggregated histogram: one row per distinct quantity value, using
    /// the (identical) outcome rows of the states sharing that value.
    pub fn aggregated_histogram_csv(&self, values: &[f64]) -> String {
        let outcomes = 1usize << self.n_ancillas;
        let mut distinct: Vec<f64> = Vec::new();
        for &q in values {
            if !distinct.iter().any(|&d| (d - q).abs() < 1e-12) {
                distinct.push(q);
            }
        }
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out = String::from("quantity");
        for y in 0..outcomes {
            out.push_str(&format!(",outcome_{y}"));
        }
        out.push('\n');
        for &q in &distinct {
            let members: Vec<usize> = values
                .iter()
                .enumerate()
                .filter(|(_, &x)| (x - q).abs() < 1e-12)
                .map(|(s, _)| s)
                .collect();
            out.push_str(&format!("{q}"));
            for y in 0..outcomes as u64 {
                let mean: f64 = members
                    .iter()
                    .map(|&s| self.rows[s].probability(y))
                    .sum::<f64>()
                    / members.len() as f64;
                out.push_str(&format!(",{mean}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Full spectrum: every cell basis state through the estimation circuit.
pub fn spectrum_report(
    quantity: &Quantity,
    model: Model,
    n_ancillas: usize,
    convention: Convention,
) -> Result<SpectrumReport, QpeError> {
    let op = phase_operator(quantity, model, convention)?;
    let dim = 1u64 << op.v();
    let rows = (0..dim)
        .map(|s| qpe_distribution(&op, s, n_ancillas))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SpectrumReport {
        v: op.v(),
        n_ancillas,
        rows,
    })
}

const ROW_EQUALITY_TOL: f64 = 1e-12;

/// Checks that equal quantities give identical outcome rows, and — in the
/// dyadic convention with integer quantities that stay distinct modulo
/// `2^n` — that different quantities give different modal outcomes.
pub fn equal_quantity_equivalence_check(report: &SpectrumReport, values: &[f64]) -> bool {
    let dim = report.rows.len();
    if values.len() != dim {
        return false;
    }
    for i in 0..dim {
        for j in i + 1..dim {
            if (values[i] - values[j]).abs() < 1e-12
                && report.rows[i].total_variation(&report.rows[j]) > ROW_EQUALITY_TOL
            {
                return false;
            }
        }
    }
    true
}

/// The sharp-separation test available in the dyadic convention: integer
/// quantities distinct modulo `2^n` must land on distinct modal
/// outcomes.
pub fn dyadic_modal_separation(report: &SpectrumReport, values: &[f64]) -> bool {
    let modulus = (1u64 << report.n_ancillas) as f64;
    if values.iter().any(|q| (q - q.round()).abs() > 1e-9) {
        return false;
    }
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let qi = values[i].round().rem_euclid(modulus);
            let qj = values[j].round().rem_euclid(modulus);
            if (qi - qj).abs() > 0.5 {
                let (mi, mj) = (
                    report.rows[i].modal_outcome(),
                    report.rows[j].modal_outcome(),
                );
                if mi == mj {
                    return false;
                }
            }
        }
    }
    true
}
