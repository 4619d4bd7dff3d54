use super::CircuitError;
use crate::qsim::{CMatrix, Circuit, Element, Gate, GateKind, Polarity, Statevector};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

const EQUIVALENCE_TOL: f64 = 1e-9;

/// Outcome of lowering a circuit to the {single-qubit, CNOT} basis.
#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub elementary_gate_count: usize,
    pub histogram: BTreeMap<String, usize>,
    pub work_qubits: usize,
    /// Max amplitude deviation between the lowered circuit (work qubits
    /// zeroed) and the original, over all basis inputs of the original
    /// register.
    pub equivalence_deviation: f64,
}

fn t_gate(target: usize) -> Gate {
    let mut m = CMatrix::identity(2, 2);
    m[(1, 1)] = Complex64::from_polar(1.0, FRAC_PI_4);
    Gate::unitary("t", vec![target], m).expect("unitary")
}

fn tdg_gate(target: usize) -> Gate {
    let mut m = CMatrix::identity(2, 2);
    m[(1, 1)] = Complex64::from_polar(1.0, -FRAC_PI_4);
    Gate::unitary("tdg", vec![target], m).expect("unitary")
}

fn ry_gate(target: usize, theta: f64) -> Gate {
    let (s, c) = (theta / 2.0).sin_cos();
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c, 0.0),
        ],
    );
    Gate::unitary("ry", vec![target], m).expect("unitary")
}

struct Emitter {
    gates: Vec<Gate>,
}

impl Emitter {
    fn cnot(&mut self, control: usize, target: usize) {
        self.gates.push(Gate::cx(control, target).expect("cnot"));
    }

    /// Standard 15-gate Toffoli over {H, T, T†, CNOT}.
    fn toffoli(&mut self, a: usize, b: usize, t: usize) {
        self.gates.push(Gate::h(t));
        self.cnot(b, t);
        self.gates.push(tdg_gate(t));
        self.cnot(a, t);
        self.gates.push(t_gate(t));
        self.cnot(b, t);
        self.gates.push(tdg_gate(t));
        self.cnot(a, t);
        self.gates.push(t_gate(b));
        self.gates.push(t_gate(t));
        self.gates.push(Gate::h(t));
        self.cnot(a, b);
        self.gates.push(t_gate(a));
        self.gates.push(tdg_gate(b));
        self.cnot(a, b);
    }

    /// Multi-controlled X with filled controls, expanded through a clean
    /// work-qubit ladder starting at `work_base`.
    fn mcx(&mut self, controls: &[usize], target: usize, work_base: usize) {
        match controls.len() {
            0 => self.gates.push(Gate::x(target)),
            1 => self.cnot(controls[0], target),
            2 => self.toffoli(controls[0], controls[1], target),
            k => {
                let ladder: Vec<(usize, usize, usize)> = {
                    let mut steps = vec![(controls[0], controls[1], work_base)];
                    for i in 1..k - 2 {
                        steps.push((controls[i + 1], work_base + i - 1, work_base + i));
                    }
                    steps
                };
                for &(a, b, w) in &ladder {
                    self.toffoli(a, b, w);
                }
                self.toffoli(controls[k - 1], work_base + k - 3, target);
                for &(a, b, w) in ladder.iter().rev() {
                    self.toffoli(a, b, w);
                }
            }
        }
    }
}

fn mcx_control_count(gate: &Gate) -> usize {
    let k = gate.controls().len();
    match gate.kind() {
        GateKind::Swap if k > 0 => k + 1,
        _ => k,
    }
}

fn lower_gate(gate: &Gate, emitter: &mut Emitter, work_base: usize) -> Result<(), CircuitError> {
    let opens: Vec<usize> = gate
        .controls()
        .iter()
        .filter(|c| c.polarity == Polarity::Open)
        .map(|c| c.qubit)
        .collect();
    for &q in &opens {
        emitter.gates.push(Gate::x(q));
    }
    let controls: Vec<usize> = gate.controls().iter().map(|c| c.qubit).collect();
    match gate.kind() {
        GateKind::X => emitter.mcx(&controls, gate.targets()[0], work_base),
        GateKind::Z => {
            let t = gate.targets()[0];
            if controls.is_empty() {
                emitter.gates.push(Gate::z(t));
            } else {
                emitter.gates.push(Gate::h(t));
                emitter.mcx(&controls, t, work_base);
                emitter.gates.push(Gate::h(t));
            }
        }
        GateKind::H => {
            let t = gate.targets()[0];
            if controls.is_empty() {
                emitter.gates.push(Gate::h(t));
            } else {
                // H = Ry(-pi/4) X Ry(pi/4), so conjugating a controlled X
                // with Ry rotations yields the controlled H.
                emitter.gates.push(ry_gate(t, FRAC_PI_4));
                emitter.mcx(&controls, t, work_base);
                emitter.gates.push(ry_gate(t, -FRAC_PI_4));
            }
        }
        GateKind::Swap => {
            let (a, b) = (gate.targets()[0], gate.targets()[1]);
            if controls.is_empty() {
                emitter.cnot(a, b);
                emitter.cnot(b, a);
                emitter.cnot(a, b);
            } else {
                let mut full = controls.clone();
                full.push(a);
                emitter.cnot(b, a);
                emitter.mcx(&full, b, work_base);
                emitter.cnot(b, a);
            }
        }
        GateKind::Unitary { label, .. } => {
            if controls.is_empty() && gate.targets().len() == 1 {
                emitter.gates.push(gate.clone());
            } else {
                return Err(CircuitError::UnsupportedLowering(label.clone()));
            }
        }
    }
    for &q in &opens {
        emitter.gates.push(Gate::x(q));
    }
    Ok(())
}

fn histogram_key(gate: &Gate) -> String {
    match (gate.kind(), gate.controls().len()) {
        (GateKind::X, 1) => "cnot".to_string(),
        (kind, _) => kind.name().to_string(),
    }
}

/// Lowers every gate to single-qubit gates and CNOTs. Multi-controlled
/// gates go through Toffoli ladders on clean work qubits appended after
/// the original register; measurements pass through unchanged. The
/// result is checked for unitary equivalence with the original on the
/// declared register (work qubits in and out of |0>).
pub fn decompose_to_basis(circuit: &Circuit) -> Result<(Circuit, DecompositionReport), CircuitError> {
    let n = circuit.n_qubits();
    let work_qubits = circuit
        .elements()
        .iter()
        .filter_map(|e| match e {
            Element::Gate(g) => Some(mcx_control_count(g).saturating_sub(2)),
            Element::Measure(_) => None,
        })
        .max()
        .unwrap_or(0);
    let mut lowered = Circuit::new(n + work_qubits);
    let mut count = 0usize;
    let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
    for element in circuit.elements() {
        match element {
            Element::Measure(qs) => {
                lowered.measure(qs)?;
            }
            Element::Gate(g) => {
                let mut emitter = Emitter { gates: Vec::new() };
                lower_gate(g, &mut emitter, n)?;
                for gate in emitter.gates {
                    debug_assert!(gate.controls().len() <= 1);
                    *histogram.entry(histogram_key(&gate)).or_insert(0) += 1;
                    count += 1;
                    lowered.push(gate)?;
                }
            }
        }
    }
    let deviation = equivalence_deviation(circuit, &lowered)?;
    if deviation > EQUIVALENCE_TOL {
        return Err(CircuitError::EquivalenceFailure { deviation });
    }
    Ok((
        lowered,
        DecompositionReport {
            elementary_gate_count: count,
            histogram,
            work_qubits,
            equivalence_deviation: deviation,
        },
    ))
}

/// Compares the gate skeletons (measurements stripped) of the original
/// and lowered circuits on every basis input of the original register.
fn equivalence_deviation(original: &Circuit, lowered: &Circuit) -> Result<f64, CircuitError> {
    let n = original.n_qubits();
    let dim = 1u64 << n;
    let mut worst = 0.0f64;
    for b in 0..dim {
        let mut s_orig = Statevector::basis(n, b)?;
        for e in original.elements() {
            if let Element::Gate(g) = e {
                s_orig = s_orig.apply(g)?;
            }
        }
        let mut s_low = Statevector::basis(lowered.n_qubits(), b)?;
        for e in lowered.elements() {
            if let Element::Gate(g) = e {
                s_low = s_low.apply(g)?;
            }
        }
        for i in 0..s_low.dim() as u64 {
            let expect = if i < dim {
                s_orig.amplitude(i)
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((s_low.amplitude(i) - expect).norm());
        }
    }
    Ok(worst)
}
