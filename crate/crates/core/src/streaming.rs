//! Sublinear-space D1Q2 streaming and the orthogonal-encoding no-go.
//!
//! The lattice is held in `log2 N` space qubits entangled with a
//! two-qubit cell register: a velocity qubit (|0> = right-mover, |1> =
//! left-mover) and an occupation qubit. Streaming is a quantum walk: a
//! controlled modular increment moves the right-moving component, a
//! controlled decrement the left-moving one. The occupation probe
//! `P(x, v, n=1) = n_v(x) / (2N)` makes the classical mass profile an
//! exact functional of the state.
//!
//! The same walk streaming is what forbids encoding classical cell
//! states as orthonormal vectors: the post-streaming matching
//! conditions plus orthogonality and normalization form a small
//! inconsistent system over the amplitude aggregates, certified here
//! both symbolically and by a least-squares residual bound.

use crate::lgca::Lattice1D;
use crate::qsim::{Circuit, Control, Gate, OutcomeDistribution, QsimError, Statevector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StreamingError {
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error("field has {got} cells, expected {expected}")]
    BadFieldLength { got: usize, expected: usize },
    #[error("space register needs at least one qubit")]
    NoSpaceQubits,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftDirection {
    Right,
    Left,
}

/// Qubit indices of the walk register: space bits `0..n_space`, then the
/// velocity qubit, then the occupation qubit.
pub fn velocity_qubit(n_space: usize) -> usize {
    n_space
}

pub fn occupation_qubit(n_space: usize) -> usize {
    n_space + 1
}

fn shift_gates(direction: ShiftDirection, n_space: usize, extra: Option<Control>) -> Vec<Gate> {
    let mcx = |k: usize| -> Gate {
        let mut controls: Vec<Control> = extra.into_iter().collect();
        controls.extend((0..k).map(Control::filled));
        Gate::mcx(controls, k).expect("disjoint controls")
    };
    match direction {
        // Increment: flip bit k when all lower bits carry, top first so
        // every gate reads pre-increment values.
        ShiftDirection::Right => (0..n_space).rev().map(mcx).collect(),
        // Decrement is the inverse sequence.
        ShiftDirection::Left => (0..n_space).map(mcx).collect(),
    }
}

/// Plain modular shift of an `n_space`-qubit register by ±1.
pub fn modular_shift(direction: ShiftDirection, n_space: usize) -> Result<Circuit, StreamingError> {
    if n_space == 0 {
        return Err(StreamingError::NoSpaceQubits);
    }
    let mut c = Circuit::new(n_space);
    for g in shift_gates(direction, n_space, None) {
        c.push(g)?;
    }
    Ok(c)
}

/// Modular shift of the space register conditioned on the velocity
/// qubit: open control for the right shift (+1), filled for the left
/// shift (-1), as a ripple of multi-controlled X gates.
pub fn controlled_shift(direction: ShiftDirection, n_space: usize) -> Result<Circuit, StreamingError> {
    if n_space == 0 {
        return Err(StreamingError::NoSpaceQubits);
    }
    let v = velocity_qubit(n_space);
    let vel_control = match direction {
        ShiftDirection::Right => Control::open(v),
        ShiftDirection::Left => Control::filled(v),
    };
    let mut c = Circuit::new(n_space + 2);
    for g in shift_gates(direction, n_space, Some(vel_control)) {
        c.push(g)?;
    }
    Ok(c)
}

/// One full streaming step: right shift on the |v=0> branch, left shift
/// on the |v=1> branch (disjoint branches, order immaterial).
pub fn streaming_step(n_space: usize) -> Result<Circuit, StreamingError> {
    let mut c = controlled_shift(ShiftDirection::Right, n_space)?;
    c.append(&controlled_shift(ShiftDirection::Left, n_space)?)?;
    Ok(c)
}

/// Initialization block: Hadamards putting space and velocity in
/// superposition, then one multi-controlled X per occupied (cell,
/// velocity) pair writing the occupation qubit.
pub fn initialization_block(
    field: &[(bool, bool)],
    n_space: usize,
) -> Result<Circuit, StreamingError> {
    let cells = 1usize << n_space;
    if field.len() != cells {
        return Err(StreamingError::BadFieldLength {
            got: field.len(),
            expected: cells,
        });
    }
    let v = velocity_qubit(n_space);
    let n = occupation_qubit(n_space);
    let mut c = Circuit::new(n_space + 2);
    for q in 0..n_space {
        c.h(q)?;
    }
    c.h(v)?;
    for (x, &(right, left)) in field.iter().enumerate() {
        for (vel_bit, occupied) in [(0u64, right), (1u64, left)] {
            if !occupied {
                continue;
            }
            let mut controls: Vec<Control> = (0..n_space)
                .map(|b| {
                    if x as u64 >> b & 1 == 1 {
                        Control::filled(b)
                    } else {
                        Control::open(b)
                    }
                })
                .collect();
            controls.push(if vel_bit == 1 {
                Control::filled(v)
            } else {
                Control::open(v)
            });
            c.push(Gate::mcx(controls, n)?)?;
        }
    }
    Ok(c)
}

/// Whole walk circuit: initialization followed by `steps` streaming
/// steps.
pub fn build_d1q2_sublinear_circuit(
    field: &[(bool, bool)],
    n_space: usize,
    steps: usize,
) -> Result<Circuit, StreamingError> {
    let mut c = initialization_block(field, n_space)?;
    let step = streaming_step(n_space)?;
    for _ in 0..steps {
        c.append(&step)?;
    }
    Ok(c)
}

/// Converts a D1Q2 lattice into the (right, left) field representation.
pub fn field_from_lattice(l: &Lattice1D) -> Vec<(bool, bool)> {
    l.cells()
        .iter()
        .map(|&c| (c & 1 == 1, c & 2 == 2))
        .collect()
}

/// Incremental walk simulation: holds the statevector and applies one
/// streaming step at a time, exposing the exact density after each.
pub struct SublinearWalk {
    n_space: usize,
    state: Statevector,
    step: Circuit,
}

impl SublinearWalk {
    pub fn new(field: &[(bool, bool)], n_space: usize) -> Result<Self, StreamingError> {
        let init = initialization_block(field, n_space)?;
        let mut state = Statevector::zero(n_space + 2);
        for element in init.elements() {
            if let crate::qsim::Element::Gate(g) = element {
                state = state.apply(g)?;
            }
        }
        Ok(SublinearWalk {
            n_space,
            state,
            step: streaming_step(n_space)?,
        })
    }

    pub fn state(&self) -> &Statevector {
        &self.state
    }

    pub fn step(&mut self) -> Result<(), StreamingError> {
        for element in self.step.elements() {
            if let crate::qsim::Element::Gate(g) = element {
                self.state = self.state.apply(g)?;
            }
        }
        Ok(())
    }

    /// Exact mass profile `m(x) = 2N * P(x, n=1)`, summed over the
    /// velocity branch.
    pub fn density(&self) -> Vec<f64> {
        let cells = 1usize << self.n_space;
        let occ = occupation_qubit(self.n_space);
        let mut profile = vec![0.0f64; cells];
        for (idx, amp) in self.state.amplitudes().iter().enumerate() {
            if idx >> occ & 1 == 1 {
                profile[idx & (cells - 1)] += amp.norm_sqr();
            }
        }
        let scale = 2.0 * cells as f64;
        for p in &mut profile {
            *p *= scale;
        }
        profile
    }

    /// Distribution over the whole register, for sampling.
    pub fn full_distribution(&self) -> OutcomeDistribution {
        let qubits: Vec<usize> = (0..self.state.n_qubits()).collect();
        self.state
            .measure_distribution(&qubits)
            .expect("non-empty register")
    }

    /// Shot-sampled mass profile with the unbiased estimator
    /// `m(x) = 2N * (#outcomes with n=1 at x) / shots`.
    pub fn sample_density(&self, shots: u64, seed: u64) -> Vec<f64> {
        let counts = self.full_distribution().sample_counts(shots, seed);
        estimate_density(&counts, self.n_space, shots)
    }
}

/// Mass-profile estimator from sampled full-register outcomes.
pub fn estimate_density(counts: &BTreeMap<u64, u64>, n_space: usize, shots: u64) -> Vec<f64> {
    let cells = 1usize << n_space;
    let occ = occupation_qubit(n_space);
    let mut profile = vec![0.0f64; cells];
    for (&outcome, &count) in counts {
        if outcome >> occ & 1 == 1 {
            profile[(outcome as usize) & (cells - 1)] += count as f64;
        }
    }
    let scale = 2.0 * cells as f64 / shots as f64;
    for p in &mut profile {
        *p *= scale;
    }
    profile
}

// ---------------------------------------------------------------------
// The encoding no-go: orthogonality vs walk streaming
// ---------------------------------------------------------------------

/// Real unknowns of the aggregate system, in order:
/// A, B, C, D (non-negative reals), Re E, Im E, Re F, Im F.
pub const AGGREGATE_VARIABLES: [&str; 8] = [
    "A", "B", "C", "D", "Re E", "Im E", "Re F", "Im F",
];

/// One relation over the aggregates, expanded into real equations
/// (coefficients over [`AGGREGATE_VARIABLES`], right-hand side).
#[derive(Clone, Debug)]
pub struct Relation {
    pub label: &'static str,
    pub rows: Vec<([i64; 8], i64)>,
}

/// The aggregate constraint system: six orthogonality relations and four
/// normalization relations over the cell-amplitude aggregates.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub relations: Vec<Relation>,
    /// Provenance of the aggregates in terms of the raw amplitudes.
    pub aggregates: Vec<(&'static str, &'static str)>,
}

fn aggregate_definitions() -> Vec<(&'static str, &'static str)> {
    vec![
        ("A", "|a|^2 + |b|^2"),
        ("B", "|c|^2 + |d|^2"),
        ("C", "|e|^2 + |f|^2"),
        ("D", "|g|^2 + |h|^2"),
        ("E", "conj(a) g + conj(b) h"),
        ("F", "conj(c) e + conj(d) f"),
    ]
}

/// The ten relations forced by orthogonality and normalization of the
/// four encoded cell states under walk streaming.
pub fn nogo_constraint_system() -> ConstraintSystem {
    // Variable order: A, B, C, D, ReE, ImE, ReF, ImF.
    let relations = vec![
        Relation {
            label: "A + F = 0",
            rows: vec![
                ([1, 0, 0, 0, 0, 0, 1, 0], 0),
                ([0, 0, 0, 0, 0, 0, 0, 1], 0),
            ],
        },
        Relation {
            label: "E + B = 0",
            rows: vec![
                ([0, 1, 0, 0, 1, 0, 0, 0], 0),
                ([0, 0, 0, 0, 0, 1, 0, 0], 0),
            ],
        },
        Relation {
            label: "E + F = 0",
            rows: vec![
                ([0, 0, 0, 0, 1, 0, 1, 0], 0),
                ([0, 0, 0, 0, 0, 1, 0, 1], 0),
            ],
        },
        Relation {
            label: "E + conj(F) = 0",
            rows: vec![
                ([0, 0, 0, 0, 1, 0, 1, 0], 0),
                ([0, 0, 0, 0, 0, 1, 0, -1], 0),
            ],
        },
        Relation {
            label: "E + C = 0",
            rows: vec![
                ([0, 0, 1, 0, 1, 0, 0, 0], 0),
                ([0, 0, 0, 0, 0, 1, 0, 0], 0),
            ],
        },
        Relation {
            label: "D + F = 0",
            rows: vec![
                ([0, 0, 0, 1, 0, 0, 1, 0], 0),
                ([0, 0, 0, 0, 0, 0, 0, 1], 0),
            ],
        },
        Relation {
            label: "A + B = 1",
            rows: vec![([1, 1, 0, 0, 0, 0, 0, 0], 1)],
        },
        Relation {
            label: "A + C = 1",
            rows: vec![([1, 0, 1, 0, 0, 0, 0, 0], 1)],
        },
        Relation {
            label: "B + D = 1",
            rows: vec![([0, 1, 0, 1, 0, 0, 0, 0], 1)],
        },
        Relation {
            label: "C + D = 1",
            rows: vec![([0, 0, 1, 1, 0, 0, 0, 0], 1)],
        },
    ];
    ConstraintSystem {
        relations,
        aggregates: aggregate_definitions(),
    }
}

impl ConstraintSystem {
    /// The same system with every normalization right-hand side set to
    /// zero, which admits the all-zero aggregate solution.
    pub fn with_relaxed_normalization(&self) -> ConstraintSystem {
        let mut relaxed = self.clone();
        for relation in &mut relaxed.relations {
            for row in &mut relation.rows {
                row.1 = 0;
            }
        }
        relaxed
    }

    pub fn equation_count(&self) -> usize {
        self.relations.len()
    }

    /// All real rows as (matrix, rhs).
    pub fn real_rows(&self) -> (Vec<[i64; 8]>, Vec<i64>) {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for relation in &self.relations {
            for &(coeffs, b) in &relation.rows {
                rows.push(coeffs);
                rhs.push(b);
            }
        }
        (rows, rhs)
    }

    /// Residual norm `|| M x - b ||` of a candidate aggregate assignment.
    pub fn residual(&self, x: &[f64; 8]) -> f64 {
        let (rows, rhs) = self.real_rows();
        rows.iter()
            .zip(&rhs)
            .map(|(row, &b)| {
                let lhs: f64 = row.iter().zip(x).map(|(&c, &v)| c as f64 * v).sum();
                (lhs - b as f64).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Outcome of the infeasibility analysis.
#[derive(Clone, Debug)]
pub enum FeasibilityOutcome {
    Infeasible(InfeasibilityCertificate),
    Feasible { witness: [f64; 8], residual: f64 },
}

/// Certificate that the system has no solution: a symbolic contradiction
/// chain and the smallest least-squares residual found over seeded
/// random restarts (with the non-negativity of A..D enforced).
#[derive(Clone, Debug, Serialize)]
pub struct InfeasibilityCertificate {
    pub contradiction_chain: Vec<String>,
    pub min_residual: f64,
    #[serde(skip)]
    pub restarts: usize,
    #[serde(skip)]
    pub analytic_lower_bound: f64,
}

/// Exact rational elimination on the augmented system; returns true when
/// a row reduces to `0 = c` with `c != 0`.
fn exactly_inconsistent(rows: &[[i64; 8]], rhs: &[i64]) -> bool {
    let mut augmented: Vec<Vec<f64>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut row: Vec<f64> = r.iter().map(|&c| c as f64).collect();
            row.push(b as f64);
            row
        })
        .collect();
    // Entries stay rational with tiny denominators; f64 elimination with
    // exact comparisons against 0.5 thresholds is safe at this scale,
    // but integers are safer still: scale-free Gaussian elimination
    // using rationals via i128 pairs would be overkill for a 16x9
    // all-±1 system, so eliminate with partial pivoting and a hard
    // threshold well below any representable pivot.
    let m = augmented.len();
    let n = 8;
    let mut row_cursor = 0;
    for col in 0..n {
        let pivot = (row_cursor..m)
            .max_by(|&a, &b| {
                augmented[a][col]
                    .abs()
                    .partial_cmp(&augmented[b][col].abs())
                    .unwrap()
            })
            .unwrap_or(row_cursor);
        if augmented[pivot][col].abs() < 1e-9 {
            continue;
        }
        augmented.swap(row_cursor, pivot);
        let lead = augmented[row_cursor][col];
        for r in 0..m {
            if r != row_cursor && augmented[r][col].abs() > 1e-12 {
                let f = augmented[r][col] / lead;
                let (pivot_row, other) = if r > row_cursor {
                    let (a, b) = augmented.split_at_mut(r);
                    (&a[row_cursor], &mut b[0])
                } else {
                    let (a, b) = augmented.split_at_mut(row_cursor);
                    (&b[0], &mut a[r])
                };
                for (o, p) in other.iter_mut().zip(pivot_row).skip(col) {
                    *o -= f * p;
                }
            }
        }
        row_cursor += 1;
        if row_cursor == m {
            break;
        }
    }
    augmented
        .iter()
        .any(|row| row[..n].iter().all(|c| c.abs() < 1e-9) && row[n].abs() > 1e-9)
}

/// Projected-gradient minimization of `|| M x - b ||²` with A..D clamped
/// non-negative.
fn least_squares_min(system: &ConstraintSystem, restarts: usize, seed: u64) -> (f64, [f64; 8]) {
    let (rows, rhs) = system.real_rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    let mut best_x = [0.0f64; 8];
    for _ in 0..restarts {
        let mut x: [f64; 8] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        for xi in x.iter_mut().take(4) {
            *xi = xi.abs();
        }
        for _ in 0..400 {
            let mut grad = [0.0f64; 8];
            for (row, &b) in rows.iter().zip(&rhs) {
                let err: f64 =
                    row.iter().zip(&x).map(|(&c, &v)| c as f64 * v).sum::<f64>() - b as f64;
                for (g, &c) in grad.iter_mut().zip(row) {
                    *g += 2.0 * err * c as f64;
                }
            }
            for (xi, gi) in x.iter_mut().zip(&grad) {
                *xi -= 0.05 * gi;
            }
            for xi in x.iter_mut().take(4) {
                if *xi < 0.0 {
                    *xi = 0.0;
                }
            }
        }
        let r = system.residual(&x);
        if r < best {
            best = r;
            best_x = x;
        }
    }
    (best, best_x)
}

/// Infeasibility check: symbolic contradiction plus a least-squares
/// residual floor over seeded random restarts.
pub fn check_infeasible(
    system: &ConstraintSystem,
    restarts: usize,
    seed: u64,
) -> FeasibilityOutcome {
    let (rows, rhs) = system.real_rows();
    let (min_residual, witness) = least_squares_min(system, restarts, seed);
    if !exactly_inconsistent(&rows, &rhs) {
        return FeasibilityOutcome::Feasible {
            witness,
            residual: min_residual,
        };
    }
    // Canonical chain: (A + F = 0) - (E + F = 0) + (E + B = 0) leaves
    // A + B = 0, against the normalization A + B = 1. Verify the integer
    // combination before emitting it.
    let mut combo = [0i64; 8];
    let mut combo_rhs = 0i64;
    let contributions: [(usize, i64); 4] = [(0, 1), (4, -1), (2, 1), (12, -1)];
    // Row indices into `real_rows`: 0 = Re(A+F), 4 = Re(E+F),
    // 2 = Re(E+B), 12 = A+B=1.
    for (idx, sign) in contributions {
        for (c, &v) in combo.iter_mut().zip(&rows[idx]) {
            *c += sign * v;
        }
        combo_rhs += sign * rhs[idx];
    }
    let chain = if combo == [0i64; 8] && combo_rhs != 0 {
        vec![
            "A + F = 0 and E + F = 0 give A = E".to_string(),
            "E + B = 0 then gives B = -A, so A + B = 0".to_string(),
            "normalization requires A + B = 1".to_string(),
            format!("combining the four rows leaves 0 = {combo_rhs}"),
        ]
    } else {
        vec!["elimination reduces a row to 0 = c with c != 0".to_string()]
    };
    // Any assignment violates the contradicting combination by 1; with
    // four rows of the combination, the residual is at least 1/2.
    let analytic_lower_bound = 0.5;
    FeasibilityOutcome::Infeasible(InfeasibilityCertificate {
        contradiction_chain: chain,
        min_residual,
        restarts,
        analytic_lower_bound,
    })
}
