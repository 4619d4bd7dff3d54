use super::gate::Gate;
use super::state::{Statevector, PROB_CUTOFF};
use super::{check_qubit, CMatrix, QsimError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Ordered circuit element: a gate or a mid-circuit measurement of a
/// qubit subset.
#[derive(Clone, Debug)]
pub enum Element {
    Gate(Gate),
    Measure(Vec<usize>),
}

/// How measurements are resolved by [`Circuit::run`].
#[derive(Clone, Copy, Debug)]
pub enum RunMode {
    /// Enumerate every measurement branch with its exact probability.
    Exact,
    /// Draw a single branch with a seeded generator.
    Sampled { seed: u64 },
}

/// One measurement record: which qubits were measured and the bits read
/// out (bit `k` of `bits` is the value of `qubits[k]`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementOutcome {
    pub qubits: Vec<usize>,
    pub bits: u64,
}

/// One branch of a circuit run: its probability, the post-run state and
/// the measurement record along the way.
#[derive(Clone, Debug)]
pub struct Branch {
    pub probability: f64,
    pub state: Statevector,
    pub outcomes: Vec<MeasurementOutcome>,
}

/// Gate circuit on a fixed number of qubits, with optional mid-circuit
/// measurements.
#[derive(Clone, Debug)]
pub struct Circuit {
    n_qubits: usize,
    elements: Vec<Element>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            elements: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn gate_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, Element::Gate(_)))
            .count()
    }

    pub fn has_measurement(&self) -> bool {
        self.elements
            .iter()
            .any(|e| matches!(e, Element::Measure(_)))
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self, QsimError> {
        gate.validate_for(self.n_qubits)?;
        self.elements.push(Element::Gate(gate));
        Ok(self)
    }

    pub fn measure(&mut self, qubits: &[usize]) -> Result<&mut Self, QsimError> {
        if qubits.is_empty() {
            return Err(QsimError::EmptySubset);
        }
        for (i, &q) in qubits.iter().enumerate() {
            check_qubit(q, self.n_qubits)?;
            if qubits[..i].contains(&q) {
                return Err(QsimError::DuplicateQubit(q));
            }
        }
        self.elements.push(Element::Measure(qubits.to_vec()));
        Ok(self)
    }

    pub fn x(&mut self, t: usize) -> Result<&mut Self, QsimError> {
        self.push(Gate::x(t))
    }

    pub fn z(&mut self, t: usize) -> Result<&mut Self, QsimError> {
        self.push(Gate::z(t))
    }

    pub fn h(&mut self, t: usize) -> Result<&mut Self, QsimError> {
        self.push(Gate::h(t))
    }

    pub fn swap(&mut self, a: usize, b: usize) -> Result<&mut Self, QsimError> {
        self.push(Gate::swap(a, b)?)
    }

    pub fn cx(&mut self, c: usize, t: usize) -> Result<&mut Self, QsimError> {
        self.push(Gate::cx(c, t)?)
    }

    /// Appends all elements of `other`, which must act on the same number
    /// of qubits.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self, QsimError> {
        if other.n_qubits != self.n_qubits {
            return Err(QsimError::DimensionMismatch {
                state: other.n_qubits,
                expected: self.n_qubits,
            });
        }
        self.elements.extend(other.elements.iter().cloned());
        Ok(self)
    }

    /// Reversed circuit with every gate inverted. Fails on measurements.
    pub fn inverse(&self) -> Result<Circuit, QsimError> {
        let mut elements = Vec::with_capacity(self.elements.len());
        for e in self.elements.iter().rev() {
            match e {
                Element::Gate(g) => elements.push(Element::Gate(g.inverse())),
                Element::Measure(_) => return Err(QsimError::MeasurementPresent),
            }
        }
        Ok(Circuit {
            n_qubits: self.n_qubits,
            elements,
        })
    }

    /// Runs the circuit on `initial`. In exact mode every measurement
    /// branch is returned with its probability and normalized
    /// post-measurement state; in sampled mode a single branch is drawn.
    pub fn run(&self, initial: &Statevector, mode: RunMode) -> Result<Vec<Branch>, QsimError> {
        if initial.n_qubits() != self.n_qubits {
            return Err(QsimError::DimensionMismatch {
                state: initial.n_qubits(),
                expected: self.n_qubits,
            });
        }
        let mut rng = match mode {
            RunMode::Sampled { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            RunMode::Exact => None,
        };
        let mut branches = vec![Branch {
            probability: 1.0,
            state: initial.clone(),
            outcomes: Vec::new(),
        }];
        for element in &self.elements {
            match element {
                Element::Gate(gate) => {
                    for b in &mut branches {
                        b.state.apply_in_place(gate)?;
                    }
                }
                Element::Measure(qubits) => {
                    let mut next = Vec::with_capacity(branches.len());
                    for b in branches {
                        let dist = b.state.measure_distribution(qubits)?;
                        match rng.as_mut() {
                            None => {
                                for (outcome, p) in dist.support() {
                                    if p <= PROB_CUTOFF {
                                        continue;
                                    }
                                    let (prob, state) = b.state.project(qubits, outcome);
                                    let mut outcomes = b.outcomes.clone();
                                    outcomes.push(MeasurementOutcome {
                                        qubits: qubits.clone(),
                                        bits: outcome,
                                    });
                                    next.push(Branch {
                                        probability: b.probability * prob,
                                        state,
                                        outcomes,
                                    });
                                }
                            }
                            Some(rng) => {
                                let r: f64 = rng.gen_range(0.0..dist.total());
                                let mut acc = 0.0;
                                let mut chosen = None;
                                for (outcome, p) in dist.support() {
                                    acc += p;
                                    if r < acc {
                                        chosen = Some(outcome);
                                        break;
                                    }
                                }
                                let outcome =
                                    chosen.unwrap_or_else(|| dist.support().last().unwrap().0);
                                let (prob, state) = b.state.project(qubits, outcome);
                                let mut outcomes = b.outcomes;
                                outcomes.push(MeasurementOutcome {
                                    qubits: qubits.clone(),
                                    bits: outcome,
                                });
                                next.push(Branch {
                                    probability: b.probability * prob,
                                    state,
                                    outcomes,
                                });
                            }
                        }
                    }
                    branches = next;
                }
            }
        }
        Ok(branches)
    }

    /// Full `2^n x 2^n` unitary of a measurement-free circuit, column `j`
    /// being the image of basis state `|j>`.
    pub fn unitary(&self) -> Result<CMatrix, QsimError> {
        if self.has_measurement() {
            return Err(QsimError::MeasurementPresent);
        }
        let dim = 1usize << self.n_qubits;
        let mut u = CMatrix::zeros(dim, dim);
        for j in 0..dim {
            let mut state = Statevector::basis(self.n_qubits, j as u64)?;
            for element in &self.elements {
                if let Element::Gate(g) = element {
                    state.apply_in_place(g)?;
                }
            }
            for i in 0..dim {
                u[(i, j)] = state.amplitude(i as u64);
            }
        }
        Ok(u)
    }
}

/// Max-entry absolute difference of two equally sized matrices.
pub fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

impl Circuit {
    /// Convenience: exact run starting from a basis state with ancillas as
    /// given by `index`.
    pub fn run_basis_exact(&self, index: u64) -> Result<Vec<Branch>, QsimError> {
        let init = Statevector::basis(self.n_qubits, index)?;
        self.run(&init, RunMode::Exact)
    }
}
