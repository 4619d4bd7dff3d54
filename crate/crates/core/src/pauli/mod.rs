//! Pauli-string algebra and quantum-invariant counting.
//!
//! Observables are Hermitian operators expanded in the tensor-product
//! Pauli basis. For a collision unitary `C` the conjugation `C† O C`
//! expressed in that basis yields an evolution matrix whose rank counts
//! the linearly independent conserved observables: `invariants = 4^v - rank`.
//!
//! The basis is enumerated lexicographically in (I, X, Y, Z) per qubit
//! with qubit `v-1` most significant, i.e. index `i` has base-4 digits
//! equal to the per-qubit letter codes. Strings display with qubit `v-1`
//! leftmost, matching the `|n_{v-1} ... n_0>` register notation.

mod evolution;
mod rank;
mod ratmat;

pub use evolution::{
    evolution_matrix, evolution_matrix_from_complex, evolution_table, count_invariants,
    EvolutionMatrix, EvolutionOutcome, EvolutionRow, FloatEvolutionMatrix, InvariantReport,
    InvariantSummary,
};
pub use rank::{rank_float_svd, rank_mod_prime, rank_rational};
pub use ratmat::{rationalize_complex, RationalMatrix};

use crate::qsim::CMatrix;
use num_complex::Complex64;
use std::fmt;
use thiserror::Error;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const COMMUTATOR_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum PauliError {
    #[error("operator is {rows}x{cols}, expected {dim}x{dim}")]
    BadShape { rows: usize, cols: usize, dim: usize },
    #[error("operator is not Hermitian (max |O - O\u{2020}| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("operator is not unitary (max |U\u{2020}U - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix entries are not rational within tolerance")]
    NotRational,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid Pauli letter {0:?}")]
    BadLetter(char),
    #[error("conjugation produced a non-real coefficient at row {row}, column {col}")]
    NonRealCoefficient { row: usize, col: usize },
}

/// Single-qubit Pauli factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn code(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn from_code(code: usize) -> Self {
        match code & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    fn from_char(c: char) -> Result<Self, PauliError> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(PauliError::BadLetter(other)),
        }
    }

    fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// (x, z) bit pair: X-type bit set for {X, Y}, Z-type for {Y, Z}.
    fn bits(self) -> (u64, u64) {
        match self {
            Pauli::I => (0, 0),
            Pauli::X => (1, 0),
            Pauli::Y => (1, 1),
            Pauli::Z => (0, 1),
        }
    }

    fn from_bits(x: u64, z: u64) -> Self {
        match (x, z) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }
}

/// Tensor product of per-qubit Pauli factors; index `q` of `letters`
/// holds the factor on qubit `q`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        PauliString { letters }
    }

    pub fn identity(v: usize) -> Self {
        PauliString {
            letters: vec![Pauli::I; v],
        }
    }

    /// Parses e.g. "IZZ"; the leftmost character is the factor on the
    /// highest qubit.
    pub fn parse(s: &str) -> Result<Self, PauliError> {
        let mut letters: Vec<Pauli> = s
            .chars()
            .map(Pauli::from_char)
            .collect::<Result<_, _>>()?;
        letters.reverse();
        Ok(PauliString { letters })
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        self.letters[qubit]
    }

    /// Position in the canonical enumeration of `enumerate_basis`.
    pub fn index(&self) -> usize {
        self.letters
            .iter()
            .enumerate()
            .map(|(q, p)| p.code() << (2 * q))
            .sum()
    }

    pub fn from_index(v: usize, index: usize) -> Self {
        let letters = (0..v).map(|q| Pauli::from_code(index >> (2 * q))).collect();
        PauliString { letters }
    }

    /// Bit masks of the string action: `x_mask` marks qubits flipped by
    /// the string, `z_mask` marks qubits contributing a sign.
    pub fn masks(&self) -> (u64, u64) {
        let mut xm = 0u64;
        let mut zm = 0u64;
        for (q, p) in self.letters.iter().enumerate() {
            let (x, z) = p.bits();
            xm |= x << q;
            zm |= z << q;
        }
        (xm, zm)
    }

    pub fn from_masks(v: usize, x_mask: u64, z_mask: u64) -> Self {
        let letters = (0..v)
            .map(|q| Pauli::from_bits(x_mask >> q & 1, z_mask >> q & 1))
            .collect();
        PauliString { letters }
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Action on a computational basis state: `P|c> = i^k |c ^ x_mask>`
    /// where `k` is the returned quarter-turn power.
    pub fn apply_to_basis(&self, c: u64) -> (u64, u8) {
        let (xm, zm) = self.masks();
        let y_count = (xm & zm).count_ones();
        let sign_flips = (c & zm).count_ones();
        ((c ^ xm), ((y_count + 2 * sign_flips) % 4) as u8)
    }

    /// Dense matrix of the string; entries are in {0, ±1, ±i}.
    pub fn matrix(&self) -> CMatrix {
        let v = self.num_qubits();
        let dim = 1usize << v;
        let mut m = CMatrix::zeros(dim, dim);
        for c in 0..dim as u64 {
            let (r, k) = self.apply_to_basis(c);
            m[(r as usize, c as usize)] = quarter_turn(k);
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.letters.iter().rev() {
            write!(f, "{}", p.to_char())?;
        }
        Ok(())
    }
}

pub(crate) fn quarter_turn(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// All `4^v` basis strings in canonical order.
pub fn enumerate_basis(v: usize) -> Vec<PauliString> {
    (0..1usize << (2 * v))
        .map(|i| PauliString::from_index(v, i))
        .collect()
}

/// Real coefficients of a Hermitian operator in the Pauli basis,
/// `O = sum_i alpha_i P_i` with `alpha_i = tr(P_i O) / 2^v`.
#[derive(Clone, Debug)]
pub struct ObservableDecomposition {
    v: usize,
    coefficients: Vec<f64>,
}

impl ObservableDecomposition {
    pub fn v(&self) -> usize {
        self.v
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, string: &PauliString) -> f64 {
        self.coefficients[string.index()]
    }

    /// Terms with coefficient magnitude above `threshold`, in basis order.
    pub fn terms(&self, threshold: f64) -> Vec<(PauliString, f64)> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, a)| a.abs() > threshold)
            .map(|(i, &a)| (PauliString::from_index(self.v, i), a))
            .collect()
    }

    /// Rebuilds the dense operator from the coefficients.
    pub fn reconstruct(&self) -> CMatrix {
        let dim = 1usize << self.v;
        let mut m = CMatrix::zeros(dim, dim);
        for (i, &alpha) in self.coefficients.iter().enumerate() {
            if alpha == 0.0 {
                continue;
            }
            let p = PauliString::from_index(self.v, i);
            for c in 0..dim as u64 {
                let (r, k) = p.apply_to_basis(c);
                m[(r as usize, c as usize)] += alpha * quarter_turn(k);
            }
        }
        m
    }
}

fn check_square(o: &CMatrix, v: usize) -> Result<(), PauliError> {
    let dim = 1usize << v;
    if o.nrows() != dim || o.ncols() != dim {
        return Err(PauliError::BadShape {
            rows: o.nrows(),
            cols: o.ncols(),
            dim,
        });
    }
    Ok(())
}

pub fn hermiticity_deviation(o: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..o.nrows() {
        for j in 0..o.ncols() {
            worst = worst.max((o[(i, j)] - o[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Pauli-basis decomposition of a Hermitian operator, computed through
/// the sparse action of each basis string rather than dense products.
pub fn decompose_hermitian(o: &CMatrix, v: usize) -> Result<ObservableDecomposition, PauliError> {
    check_square(o, v)?;
    let deviation = hermiticity_deviation(o);
    if deviation > HERMITIAN_TOL {
        return Err(PauliError::NotHermitian { deviation });
    }
    let dim = 1usize << v;
    let scale = 1.0 / dim as f64;
    let mut coefficients = Vec::with_capacity(1 << (2 * v));
    for j in 0..1usize << (2 * v) {
        let p = PauliString::from_index(v, j);
        let (xm, zm) = p.masks();
        let y_count = (xm & zm).count_ones();
        let mut tr = Complex64::new(0.0, 0.0);
        for r in 0..dim as u64 {
            let k = (y_count + 2 * (r & zm).count_ones()) % 4;
            tr += quarter_turn(k as u8) * o[(r as usize, (r ^ xm) as usize)];
        }
        coefficients.push(tr.re * scale);
    }
    Ok(ObservableDecomposition { v, coefficients })
}

/// Conjugation `C† O C` of a Hermitian observable by a unitary.
pub fn evolve_observable(c: &CMatrix, o: &CMatrix) -> Result<CMatrix, PauliError> {
    if c.nrows() != o.nrows() || c.ncols() != o.ncols() || c.nrows() != c.ncols() {
        return Err(PauliError::DimensionMismatch {
            left: c.nrows(),
            right: o.nrows(),
        });
    }
    let deviation = crate::qsim::unitarity_deviation(c);
    if deviation > COMMUTATOR_TOL {
        return Err(PauliError::NotUnitary { deviation });
    }
    Ok(c.adjoint() * o * c)
}

/// Result of a commutator test `[C, O] = CO - OC`.
#[derive(Clone, Copy, Debug)]
pub struct CommutationCheck {
    pub commutes: bool,
    pub residual: f64,
}

pub fn commutes(c: &CMatrix, o: &CMatrix) -> Result<CommutationCheck, PauliError> {
    if c.nrows() != o.nrows() || c.ncols() != o.ncols() {
        return Err(PauliError::DimensionMismatch {
            left: c.nrows(),
            right: o.nrows(),
        });
    }
    let comm = c * o - o * c;
    let mut residual = 0.0f64;
    for e in comm.iter() {
        residual = residual.max(e.norm());
    }
    Ok(CommutationCheck {
        commutes: residual <= COMMUTATOR_TOL,
        residual,
    })
}

/// Builds `sum coeff * P` from (string, coefficient) pairs, e.g. a mass
/// or momentum observable written as a Z-sum.
pub fn observable_from_terms(v: usize, terms: &[(&str, f64)]) -> Result<CMatrix, PauliError> {
    let dim = 1usize << v;
    let mut m = CMatrix::zeros(dim, dim);
    for &(s, coeff) in terms {
        let p = PauliString::parse(s)?;
        if p.num_qubits() != v {
            return Err(PauliError::DimensionMismatch {
                left: p.num_qubits(),
                right: v,
            });
        }
        for c in 0..dim as u64 {
            let (r, k) = p.apply_to_basis(c);
            m[(r as usize, c as usize)] += coeff * quarter_turn(k);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_qubit_basis_is_ixyz() {
        let basis = enumerate_basis(1);
        let names: Vec<String> = basis.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, vec!["I", "X", "Y", "Z"]);
    }

    #[test]
    fn two_qubit_basis_starts_with_identity_block() {
        let basis = enumerate_basis(2);
        assert_eq!(basis.len(), 16);
        let names: Vec<String> = basis.iter().take(4).map(|p| p.to_string()).collect();
        assert_eq!(names, vec!["II", "IX", "IY", "IZ"]);
    }

    #[test]
    fn three_qubit_basis_distinct() {
        let basis = enumerate_basis(3);
        assert_eq!(basis.len(), 64);
        let mut names: Vec<String> = basis.iter().map(|p| p.to_string()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 64);
    }

    #[test]
    fn index_round_trip() {
        for i in 0..64 {
            let p = PauliString::from_index(3, i);
            assert_eq!(p.index(), i);
            let q = PauliString::parse(&p.to_string()).unwrap();
            assert_eq!(p, q);
        }
    }

    #[test]
    fn z_matrix_is_diag_one_minus_one() {
        let z = PauliString::parse("Z").unwrap().matrix();
        assert_eq!(z[(0, 0)].re, 1.0);
        assert_eq!(z[(1, 1)].re, -1.0);
        assert_eq!(z[(0, 1)].norm(), 0.0);
    }

    #[test]
    fn ii_matrix_is_identity() {
        let m = PauliString::parse("II").unwrap().matrix();
        assert!(crate::qsim::max_entry_diff(&m, &CMatrix::identity(4, 4)) == 0.0);
    }

    #[test]
    fn ziz_eigenvalue_on_basis_state() {
        // ZIZ acting on |010>: both Z factors see a 0 bit, eigenvalue +1.
        let p = PauliString::parse("ZIZ").unwrap();
        let (target, k) = p.apply_to_basis(0b010);
        assert_eq!(target, 0b010);
        assert_eq!(quarter_turn(k).re, 1.0);
        // |001> flips the low Z factor.
        let (_, k) = p.apply_to_basis(0b001);
        assert_eq!(quarter_turn(k).re, -1.0);
    }

    #[test]
    fn basis_orthogonality_v_le_3() {
        for v in 1..=3usize {
            let dim = 1usize << v;
            let basis = enumerate_basis(v);
            for (i, p) in basis.iter().enumerate() {
                for (j, q) in basis.iter().enumerate() {
                    let tr = (p.matrix() * q.matrix()).trace();
                    let expect = if i == j { dim as f64 } else { 0.0 };
                    assert!(
                        (tr - Complex64::new(expect, 0.0)).norm() < 1e-12,
                        "tr({p}{q}) = {tr}"
                    );
                }
            }
        }
    }

    #[test]
    fn decompose_identity_v3() {
        let id = CMatrix::identity(8, 8);
        let d = decompose_hermitian(&id, 3).unwrap();
        for (i, &a) in d.coefficients().iter().enumerate() {
            let expect = if i == 0 { 1.0 } else { 0.0 };
            assert!((a - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn decompose_z_on_one_qubit() {
        let z = PauliString::parse("Z").unwrap().matrix();
        let d = decompose_hermitian(&z, 1).unwrap();
        assert!((d.coefficient(&PauliString::parse("Z").unwrap()) - 1.0).abs() < 1e-12);
        assert!(d.coefficient(&PauliString::parse("I").unwrap()).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_round_trips_random_hermitian() {
        // A fixed non-trivial Hermitian operator on 2 qubits.
        let mut o = CMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                let re = ((i * 7 + j * 3) % 5) as f64 - 2.0;
                let im = if i == j { 0.0 } else { ((i + 2 * j) % 3) as f64 - 1.0 };
                o[(i, j)] = Complex64::new(re, im);
            }
        }
        let o = (o.clone() + o.adjoint()) * Complex64::new(0.5, 0.0);
        let d = decompose_hermitian(&o, 2).unwrap();
        let back = d.reconstruct();
        assert!(crate::qsim::max_entry_diff(&back, &o) < 1e-10);
    }

    #[test]
    fn decompose_rejects_non_hermitian() {
        let mut o = CMatrix::zeros(2, 2);
        o[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            decompose_hermitian(&o, 1),
            Err(PauliError::NotHermitian { .. })
        ));
    }

    #[test]
    fn x_and_z_anticommute_with_residual_two() {
        let x = PauliString::parse("X").unwrap().matrix();
        let z = PauliString::parse("Z").unwrap().matrix();
        let check = commutes(&x, &z).unwrap();
        assert!(!check.commutes);
        assert!((check.residual - 2.0).abs() < 1e-12);
    }

    #[test]
    fn evolve_by_identity_is_noop() {
        let o = observable_from_terms(2, &[("IZ", 1.0), ("ZI", 2.0)]).unwrap();
        let c = CMatrix::identity(4, 4);
        let evolved = evolve_observable(&c, &o).unwrap();
        assert!(crate::qsim::max_entry_diff(&evolved, &o) < 1e-14);
    }
}
