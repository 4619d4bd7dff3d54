//! Collision unitaries and gate-level collision circuits.
//!
//! The D1Q3 circuit reads the eigenvalues of the diagonal discrimination
//! operators ZIZ and ZZI into two ancillas, which singles out the
//! collisional pair {0b010, 0b101}; the collision itself is a controlled
//! bit-flip of the whole cell. The FHP circuit flags the 180° pair with
//! an adjacent-XOR chain and the stochastic orbits with the
//! zero-asymmetric-pair test, then applies controlled rotations, using
//! one conditional qubit `b` and one randomness ancilla `a` that is
//! measured. Flagging the whole zero-asymmetric class (including the
//! empty and full cells) is safe because those extra states are invariant
//! under every rotation.

mod lower;
mod text;

pub use lower::{decompose_to_basis, DecompositionReport};
pub use text::{parse_circuit, write_circuit};

use crate::lgca;
use crate::pauli::{observable_from_terms, RationalMatrix};
use crate::qsim::{max_entry_diff, CMatrix, Circuit, Control, Gate, QsimError, RunMode, Statevector};
use num_rational::Rational64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error("states {0:?} do not partition the cell space")]
    BadPartition(String),
    #[error("Pauli-form collision differs from the permutation matrix by {deviation:.3e}")]
    PauliFormMismatch { deviation: f64 },
    #[error("register layout names {given} cell qubits, collision rule has {expected}")]
    LayoutMismatch { given: usize, expected: usize },
    #[error("verification failed at input state {row} (total variation {tv:.3e})")]
    VerificationFailed { row: usize, tv: f64 },
    #[error("cannot lower gate {0}")]
    UnsupportedLowering(String),
    #[error("lowered circuit deviates from the original by {deviation:.3e}")]
    EquivalenceFailure { deviation: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Collision rule as data: fixed states, deterministic swaps and
/// stochastic three-state orbits with branch probability 1/2 each.
#[derive(Clone, Debug)]
pub struct CollisionSpec {
    v: usize,
    fixed: Vec<u64>,
    pairs: Vec<(u64, u64)>,
    orbits: Vec<[u64; 3]>,
}

impl CollisionSpec {
    pub fn new(v: usize, pairs: Vec<(u64, u64)>, orbits: Vec<[u64; 3]>) -> Result<Self, CircuitError> {
        let dim = 1u64 << v;
        let mut seen = vec![false; dim as usize];
        let mut mark = |s: u64| -> Result<(), CircuitError> {
            if s >= dim || seen[s as usize] {
                return Err(CircuitError::BadPartition(format!("state {s}")));
            }
            seen[s as usize] = true;
            Ok(())
        };
        for &(a, b) in &pairs {
            mark(a)?;
            mark(b)?;
        }
        for orbit in &orbits {
            for &s in orbit {
                mark(s)?;
            }
        }
        let fixed = (0..dim).filter(|&s| !seen[s as usize]).collect();
        Ok(CollisionSpec {
            v,
            fixed,
            pairs,
            orbits,
        })
    }

    pub fn identity(v: usize) -> Self {
        CollisionSpec::new(v, Vec::new(), Vec::new()).expect("empty rule is a partition")
    }

    pub fn d1q3() -> Self {
        CollisionSpec::new(3, vec![(0b010, 0b101)], Vec::new()).expect("valid rule")
    }

    pub fn fhp_zero_momentum() -> Self {
        CollisionSpec::new(
            6,
            vec![(
                lgca::B3_STATES[0] as u64,
                lgca::B3_STATES[1] as u64,
            )],
            vec![
                lgca::B2_ORBIT.map(u64::from),
                lgca::B4_ORBIT.map(u64::from),
            ],
        )
        .expect("valid rule")
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn fixed_states(&self) -> &[u64] {
        &self.fixed
    }

    /// Output distribution of one collision applied to `input`.
    pub fn expected_distribution(&self, input: u64) -> Vec<(u64, f64)> {
        for &(a, b) in &self.pairs {
            if input == a {
                return vec![(b, 1.0)];
            }
            if input == b {
                return vec![(a, 1.0)];
            }
        }
        for orbit in &self.orbits {
            if let Some(pos) = orbit.iter().position(|&s| s == input) {
                let mut out = vec![
                    (orbit[(pos + 1) % 3], 0.5),
                    (orbit[(pos + 2) % 3], 0.5),
                ];
                out.sort_unstable_by_key(|&(s, _)| s);
                return out;
            }
        }
        vec![(input, 1.0)]
    }
}

/// Selection of FHP zero-momentum collision families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FhpSelection {
    pub b2: bool,
    pub b3: bool,
    pub b4: bool,
}

impl FhpSelection {
    pub const B3: FhpSelection = FhpSelection {
        b2: false,
        b3: true,
        b4: false,
    };
    pub const B24: FhpSelection = FhpSelection {
        b2: true,
        b3: false,
        b4: true,
    };
    pub const B234: FhpSelection = FhpSelection {
        b2: true,
        b3: true,
        b4: true,
    };

    pub fn is_empty(&self) -> bool {
        !(self.b2 || self.b3 || self.b4)
    }

    /// Parses a comma list of family names, e.g. "b2,b4".
    pub fn parse(s: &str) -> Option<FhpSelection> {
        let mut sel = FhpSelection {
            b2: false,
            b3: false,
            b4: false,
        };
        for part in s.split(',') {
            match part.trim() {
                "b2" => sel.b2 = true,
                "b3" => sel.b3 = true,
                "b4" => sel.b4 = true,
                "" => continue,
                _ => return None,
            }
        }
        if sel.is_empty() {
            None
        } else {
            Some(sel)
        }
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.b2 {
            parts.push("b2");
        }
        if self.b3 {
            parts.push("b3");
        }
        if self.b4 {
            parts.push("b4");
        }
        parts.join(",")
    }
}

/// The 8x8 D1Q3 collision permutation, exchanging basis states 2 and 5.
pub fn d1q3_collision_matrix() -> RationalMatrix {
    RationalMatrix::permutation(&[0, 1, 5, 3, 4, 2, 6, 7])
}

/// The same collision written as a Pauli sum,
/// `(1/4)(3 III + IZZ + XXX + XYY - YXY + YYX - ZIZ + ZZI)`;
/// fails if the evaluated sum does not reproduce the permutation matrix.
pub fn d1q3_pauli_collision() -> Result<CMatrix, CircuitError> {
    let sum = observable_from_terms(
        3,
        &[
            ("III", 0.75),
            ("IZZ", 0.25),
            ("XXX", 0.25),
            ("XYY", 0.25),
            ("YXY", -0.25),
            ("YYX", 0.25),
            ("ZIZ", -0.25),
            ("ZZI", 0.25),
        ],
    )
    .expect("valid Pauli terms");
    let reference = d1q3_collision_matrix().to_complex();
    let deviation = max_entry_diff(&sum, &reference);
    if deviation > 1e-12 {
        return Err(CircuitError::PauliFormMismatch { deviation });
    }
    Ok(sum)
}

/// Unitary FHP collision on the cell register alone: the 180° pair is a
/// transposition and each stochastic orbit carries the orthogonal block
/// `(1/3) [[-1, 2, 2], [2, -1, 2], [2, 2, -1]]`, which trades a small
/// no-collision amplitude for unitarity. Selected families multiply;
/// their supports are disjoint so the order does not matter.
pub fn fhp_unitary_collision(selection: FhpSelection) -> RationalMatrix {
    let mut factors: Vec<RationalMatrix> = Vec::new();
    if selection.b3 {
        let mut map: Vec<usize> = (0..64).collect();
        map[lgca::B3_STATES[0] as usize] = lgca::B3_STATES[1] as usize;
        map[lgca::B3_STATES[1] as usize] = lgca::B3_STATES[0] as usize;
        factors.push(RationalMatrix::permutation(&map));
    }
    for (enabled, orbit) in [(selection.b2, lgca::B2_ORBIT), (selection.b4, lgca::B4_ORBIT)] {
        if !enabled {
            continue;
        }
        let mut m = RationalMatrix::identity(64);
        for &col in &orbit {
            for &row in &orbit {
                let value = if row == col {
                    Rational64::new(-1, 3)
                } else {
                    Rational64::new(2, 3)
                };
                m.set(row as usize, col as usize, value);
            }
        }
        factors.push(m);
    }
    let mut product = RationalMatrix::identity(64);
    for f in factors {
        product = product.mul(&f).expect("same dimension");
    }
    product
}

/// Deterministic rotation variant of the FHP collision: every selected
/// collisional state is rotated by a fixed angle (180° for the
/// three-body pair, 120° for the stochastic orbits), giving a plain
/// permutation matrix. Unlike [`fhp_unitary_collision`] the orbit blocks
/// are 3-cycles with a conjugate pair of complex eigenvalues, so the two
/// variants conserve different numbers of observables (rank 488 vs 480
/// for the two-/four-body families alone).
pub fn fhp_rotation_collision(selection: FhpSelection) -> RationalMatrix {
    let mut map: Vec<usize> = (0..64).collect();
    if selection.b3 {
        for &s in &lgca::B3_STATES {
            map[s as usize] = lgca::rotate_fhp_cell(s, 3) as usize;
        }
    }
    for (enabled, orbit) in [(selection.b2, lgca::B2_ORBIT), (selection.b4, lgca::B4_ORBIT)] {
        if enabled {
            for &s in &orbit {
                map[s as usize] = lgca::rotate_fhp_cell(s, 2) as usize;
            }
        }
    }
    RationalMatrix::permutation(&map)
}

/// Cell rotation angles realizable as swap networks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationAngle {
    Deg60,
    Deg120,
    Deg180,
    Deg240,
}

impl RotationAngle {
    pub fn from_degrees(deg: u32) -> Option<RotationAngle> {
        match deg {
            60 => Some(RotationAngle::Deg60),
            120 => Some(RotationAngle::Deg120),
            180 => Some(RotationAngle::Deg180),
            240 => Some(RotationAngle::Deg240),
            _ => None,
        }
    }

    /// Number of 60° steps; bit `i` moves to bit `(i + steps) mod 6`.
    pub fn sixths(self) -> usize {
        match self {
            RotationAngle::Deg60 => 1,
            RotationAngle::Deg120 => 2,
            RotationAngle::Deg180 => 3,
            RotationAngle::Deg240 => 4,
        }
    }
}

/// Swap sequence realizing the rotation on six wires: 3 swaps for 180°,
/// 4 for 120°, 5 for 60°, and two 120° networks for 240°.
pub fn rotation_swaps(angle: RotationAngle) -> Vec<(usize, usize)> {
    match angle {
        RotationAngle::Deg180 => vec![(0, 3), (1, 4), (2, 5)],
        RotationAngle::Deg120 => vec![(0, 2), (0, 4), (1, 3), (1, 5)],
        RotationAngle::Deg60 => vec![(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)],
        RotationAngle::Deg240 => {
            let mut swaps = rotation_swaps(RotationAngle::Deg120);
            swaps.extend(rotation_swaps(RotationAngle::Deg120));
            swaps
        }
    }
}

/// Six-qubit swap network performing the cell rotation.
pub fn build_rotation_circuit(angle: RotationAngle) -> Circuit {
    let mut c = Circuit::new(6);
    for (a, b) in rotation_swaps(angle) {
        c.swap(a, b).expect("valid swap");
    }
    c
}

/// Names the cell and ancilla qubits of a collision circuit; `cell[k]`
/// holds occupation bit `k`.
#[derive(Clone, Debug)]
pub struct RegisterLayout {
    pub cell: Vec<usize>,
    pub ancillas: Vec<usize>,
}

/// A collision circuit together with its register layout.
#[derive(Clone, Debug)]
pub struct CollisionCircuit {
    pub circuit: Circuit,
    pub layout: RegisterLayout,
}

/// D1Q3 collision circuit on 3 cell qubits (0..2) plus ancillas z0 = 3
/// and z1 = 4. Two one-bit phase estimations write the ZIZ and ZZI
/// eigenvalues into the ancillas; the cell flip fires on the (z1, z0) =
/// (1, 0) pattern, which is exactly the collisional pair.
pub fn build_d1q3_qpe_collision_circuit() -> CollisionCircuit {
    let (z0, z1) = (3usize, 4usize);
    let mut c = Circuit::new(5);
    c.h(z0).unwrap().h(z1).unwrap();
    // ZIZ on (n2, n1, n0), conditioned on z0.
    c.push(Gate::cz(z0, 2).unwrap()).unwrap();
    c.push(Gate::cz(z0, 0).unwrap()).unwrap();
    // ZZI, conditioned on z1.
    c.push(Gate::cz(z1, 1).unwrap()).unwrap();
    c.push(Gate::cz(z1, 2).unwrap()).unwrap();
    c.h(z0).unwrap().h(z1).unwrap();
    for target in [2, 1, 0] {
        let gate = Gate::x(target)
            .controlled_by(vec![Control::filled(z1), Control::open(z0)])
            .unwrap();
        c.push(gate).unwrap();
    }
    CollisionCircuit {
        circuit: c,
        layout: RegisterLayout {
            cell: vec![0, 1, 2],
            ancillas: vec![z0, z1],
        },
    }
}

/// FHP zero-momentum collision circuit on 6 cell qubits (0..5), the
/// conditional qubit b = 6 and the randomness ancilla a = 7, which is
/// measured at the end. `b` is intentionally left dirty; correctness is
/// certified on the cell marginal.
pub fn build_fhp_b234_circuit() -> CollisionCircuit {
    let b = 6usize;
    let a = 7usize;
    let mut c = Circuit::new(8);
    // 180°-pair verification: adjacent XOR chain, flag, uncompute.
    for (ctrl, tgt) in [(4, 5), (3, 4), (2, 3), (1, 2), (0, 1)] {
        c.cx(ctrl, tgt).unwrap();
    }
    c.push(Gate::mcx((1..=5).map(Control::filled).collect(), b).unwrap())
        .unwrap();
    for (ctrl, tgt) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)] {
        c.cx(ctrl, tgt).unwrap();
    }
    // Controlled 180° rotation.
    for (x, y) in rotation_swaps(RotationAngle::Deg180) {
        c.push(Gate::cswap(b, x, y).unwrap()).unwrap();
    }
    // Zero-asymmetric-pair verification: opposite XORs, open-control
    // flag, uncompute.
    for (ctrl, tgt) in [(0, 3), (1, 4), (2, 5)] {
        c.cx(ctrl, tgt).unwrap();
    }
    c.push(Gate::mcx(vec![Control::open(3), Control::open(4), Control::open(5)], b).unwrap())
        .unwrap();
    for (ctrl, tgt) in [(2, 5), (1, 4), (0, 3)] {
        c.cx(ctrl, tgt).unwrap();
    }
    // First controlled 120° rotation, then entangle the branch choice
    // into `a` and rotate again conditioned on it.
    for (x, y) in rotation_swaps(RotationAngle::Deg120) {
        c.push(Gate::cswap(b, x, y).unwrap()).unwrap();
    }
    c.push(Gate::ch(b, a).unwrap()).unwrap();
    for (x, y) in rotation_swaps(RotationAngle::Deg120) {
        c.push(Gate::cswap(a, x, y).unwrap()).unwrap();
    }
    c.measure(&[a]).unwrap();
    CollisionCircuit {
        circuit: c,
        layout: RegisterLayout {
            cell: (0..6).collect(),
            ancillas: vec![b, a],
        },
    }
}

/// Exhaustive verification report: for every cell basis input (ancillas
/// zeroed) the exact cell-marginal output distribution, compared row by
/// row with the collision rule.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub v: usize,
    /// `matrix[input][output]` = probability.
    pub matrix: Vec<Vec<f64>>,
    pub pass: bool,
    pub max_row_tv: f64,
    pub first_failure: Option<usize>,
}

impl VerificationReport {
    pub fn ensure_pass(&self) -> Result<(), CircuitError> {
        if self.pass {
            Ok(())
        } else {
            Err(CircuitError::VerificationFailed {
                row: self.first_failure.unwrap_or(0),
                tv: self.max_row_tv,
            })
        }
    }

    /// CSV with one row per input state: `input,p0,p1,...`.
    pub fn to_csv(&self) -> String {
        let dim = 1usize << self.v;
        let mut out = String::from("input");
        for s in 0..dim {
            out.push_str(&format!(",p{s}"));
        }
        out.push('\n');
        for (input, row) in self.matrix.iter().enumerate() {
            out.push_str(&input.to_string());
            for p in row {
                out.push_str(&format!(",{p}"));
            }
            out.push('\n');
        }
        out
    }
}

const VERIFY_TOL: f64 = 1e-10;

/// Runs every cell basis input through the circuit (exact branch
/// enumeration), marginalizes the ancillas and compares against the
/// collision rule.
pub fn verify_collision_circuit(
    circuit: &Circuit,
    layout: &RegisterLayout,
    spec: &CollisionSpec,
) -> Result<VerificationReport, CircuitError> {
    if layout.cell.len() != spec.v() {
        return Err(CircuitError::LayoutMismatch {
            given: layout.cell.len(),
            expected: spec.v(),
        });
    }
    let dim = 1usize << spec.v();
    let mut matrix = vec![vec![0.0f64; dim]; dim];
    let mut max_row_tv = 0.0f64;
    let mut first_failure = None;
    for input in 0..dim as u64 {
        let mut index = 0u64;
        for (k, &q) in layout.cell.iter().enumerate() {
            index |= (input >> k & 1) << q;
        }
        let initial = Statevector::basis(circuit.n_qubits(), index)?;
        let branches = circuit.run(&initial, RunMode::Exact)?;
        for branch in &branches {
            let dist = branch.state.measure_distribution(&layout.cell)?;
            for (outcome, p) in dist.support() {
                matrix[input as usize][outcome as usize] += branch.probability * p;
            }
        }
        let expected = spec.expected_distribution(input);
        let mut tv = 0.0;
        for (s, p) in matrix[input as usize].iter().enumerate() {
            let want = expected
                .iter()
                .find(|&&(e, _)| e == s as u64)
                .map(|&(_, w)| w)
                .unwrap_or(0.0);
            tv += (p - want).abs();
        }
        let tv = tv / 2.0;
        if tv > max_row_tv {
            max_row_tv = tv;
        }
        if tv > VERIFY_TOL && first_failure.is_none() {
            first_failure = Some(input as usize);
        }
    }
    Ok(VerificationReport {
        v: spec.v(),
        matrix,
        pass: first_failure.is_none(),
        max_row_tv,
        first_failure,
    })
}
