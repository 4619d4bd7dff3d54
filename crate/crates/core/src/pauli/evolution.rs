use super::rank::{rank_exact, rank_float_svd};
use super::ratmat::{rationalize_complex, RationalMatrix};
use super::{PauliError, PauliString};
use crate::qsim::CMatrix;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;

/// Sparse collision matrix scaled to integers: `cols`/`rows` hold the
/// nonzero entries of `scale * C` by column and by row.
struct ScaledCollision {
    dim: usize,
    scale: i64,
    cols: Vec<Vec<(u32, i64)>>,
    rows: Vec<Vec<(u32, i64)>>,
}

impl ScaledCollision {
    fn new(c: &RationalMatrix) -> Self {
        let dim = c.dim();
        let scale = c.denominator_lcm();
        let flat = c.scaled_integer_entries(scale);
        let mut cols = vec![Vec::new(); dim];
        let mut rows = vec![Vec::new(); dim];
        for r in 0..dim {
            for col in 0..dim {
                let v = flat[r * dim + col];
                if v != 0 {
                    cols[col].push((r as u32, v));
                    rows[r].push((col as u32, v));
                }
            }
        }
        ScaledCollision {
            dim,
            scale,
            cols,
            rows,
        }
    }
}

/// Gaussian integer accumulator (re, im).
type GInt = (i64, i64);

fn gadd(a: GInt, b: GInt) -> GInt {
    (a.0 + b.0, a.1 + b.1)
}

fn gscale(a: GInt, s: i64) -> GInt {
    (a.0 * s, a.1 * s)
}

/// Multiply by i^k.
fn grot(a: GInt, k: u8) -> GInt {
    match k & 3 {
        0 => a,
        1 => (-a.1, a.0),
        2 => (-a.0, -a.1),
        _ => (a.1, -a.0),
    }
}

fn pauli_index_from_masks(v: usize, x_mask: u64, z_mask: u64) -> usize {
    let mut idx = 0usize;
    for q in 0..v {
        let x = x_mask >> q & 1;
        let z = z_mask >> q & 1;
        let code = match (x, z) {
            (0, 0) => 0usize,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        };
        idx |= code << (2 * q);
    }
    idx
}

/// One decomposition row: the conjugated basis string expressed over the
/// basis, with exact rational coefficients.
#[derive(Clone, Debug)]
pub struct EvolutionRow {
    pub input: PauliString,
    pub terms: Vec<(PauliString, Rational64)>,
}

/// Computes the coefficient row of `C† P_i C` for one basis string.
/// All arithmetic is exact over Gaussian integers scaled by `scale²`.
fn beta_row(sc: &ScaledCollision, v: usize, i: usize) -> Result<Vec<(u32, Rational64)>, PauliError> {
    let p = PauliString::from_index(v, i);
    let (xm, zm) = p.masks();
    let y_count = (xm & zm).count_ones();
    // A = (scale*C)ᵀ · P_i · (scale*C), sparse over Gaussian integers.
    let mut a: BTreeMap<(u32, u32), GInt> = BTreeMap::new();
    for c in 0..sc.dim as u32 {
        for &(t, w) in &sc.cols[c as usize] {
            let k = ((y_count + 2 * (t as u64 & zm).count_ones()) % 4) as u8;
            let s = (t as u64 ^ xm) as u32;
            let ws = grot((w, 0), k);
            for &(r, wr) in &sc.rows[s as usize] {
                let entry = a.entry((r, c)).or_insert((0, 0));
                *entry = gadd(*entry, gscale(ws, wr));
            }
        }
    }
    // Bucket the entries of A by x-mask so each candidate output string
    // only scans the entries it can trace against.
    let mut buckets: BTreeMap<u64, Vec<(u32, GInt)>> = BTreeMap::new();
    for (&(r, c), &val) in &a {
        if val == (0, 0) {
            continue;
        }
        buckets
            .entry(r as u64 ^ c as u64)
            .or_default()
            .push((r, val));
    }
    let denom = (sc.dim as i64) * sc.scale * sc.scale;
    let mut row: Vec<(u32, Rational64)> = Vec::new();
    for (&mask, entries) in &buckets {
        for zmj in 0..sc.dim as u64 {
            let yj = (mask & zmj).count_ones();
            let mut tr: GInt = (0, 0);
            for &(r, val) in entries {
                let k = ((yj + 2 * (r as u64 & zmj).count_ones()) % 4) as u8;
                tr = gadd(tr, grot(val, k));
            }
            if tr == (0, 0) {
                continue;
            }
            let j = pauli_index_from_masks(v, mask, zmj);
            if tr.1 != 0 {
                return Err(PauliError::NonRealCoefficient { row: i, col: j });
            }
            row.push((j as u32, Rational64::new(tr.0, denom)));
        }
    }
    row.sort_unstable_by_key(|&(j, _)| j);
    Ok(row)
}

/// The evolution matrix `M` of a collision unitary: row `i` holds the
/// basis coefficients of the conjugated string `C† P_i C` minus the unit
/// row, stored sparsely with exact rational entries.
#[derive(Clone, Debug)]
pub struct EvolutionMatrix {
    v: usize,
    rows: Vec<Vec<(u32, Rational64)>>,
}

impl EvolutionMatrix {
    pub fn v(&self) -> usize {
        self.v
    }

    /// Number of rows (and columns), `4^v`.
    pub fn side(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(u32, Rational64)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational64 {
        self.rows[i]
            .iter()
            .find(|&&(c, _)| c as usize == j)
            .map(|&(_, r)| r)
            .unwrap_or_else(Rational64::zero)
    }

    pub fn nonzero_rows(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_empty()).count()
    }

    /// Hilbert-Schmidt norm of the underlying coefficient row,
    /// `sum_j beta_{i,j}²`; equals 1 exactly for a unitary conjugation.
    pub fn beta_row_norm(&self, i: usize) -> Rational64 {
        let mut acc = Rational64::zero();
        let mut diagonal_seen = false;
        for &(j, m) in &self.rows[i] {
            let beta = if j as usize == i {
                diagonal_seen = true;
                m + Rational64::from_integer(1)
            } else {
                m
            };
            acc += beta * beta;
        }
        if !diagonal_seen {
            acc += Rational64::from_integer(1);
        }
        acc
    }

    /// Basis strings fixed by the conjugation (all-zero rows of `M`).
    pub fn conserved_strings(&self) -> Vec<PauliString> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_empty())
            .map(|(i, _)| PauliString::from_index(self.v, i))
            .collect()
    }

    /// Exact rank: modular elimination over two random large primes with
    /// an agreement requirement, rational elimination as arbiter, and a
    /// floating singular-value cross-check on small sizes.
    pub fn rank(&self) -> usize {
        rank_exact(&self.integer_rows(), self.side())
    }

    /// Rows with denominators cleared (row scaling preserves rank).
    pub fn integer_rows(&self) -> Vec<Vec<(u32, i64)>> {
        self.rows
            .iter()
            .map(|row| {
                let lcm = row
                    .iter()
                    .fold(1i64, |acc, (_, r)| num_integer::lcm(acc, *r.denom()));
                row.iter()
                    .map(|&(c, r)| (c, r.numer() * (lcm / r.denom())))
                    .collect()
            })
            .collect()
    }

    pub fn to_dense_f64(&self) -> nalgebra::DMatrix<f64> {
        let n = self.side();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, r) in row {
                m[(i, j as usize)] = *r.numer() as f64 / *r.denom() as f64;
            }
        }
        m
    }
}

fn check_collision(c: &RationalMatrix, v: usize) -> Result<(), PauliError> {
    let dim = 1usize << v;
    if c.dim() != dim {
        return Err(PauliError::BadShape {
            rows: c.dim(),
            cols: c.dim(),
            dim,
        });
    }
    if !c.is_orthogonal() {
        return Err(PauliError::NotUnitary { deviation: f64::NAN });
    }
    Ok(())
}

/// Evolution matrix `M_{i,j} = beta_{i,j} - delta_{i,j}` of a collision
/// unitary with exact rational entries.
pub fn evolution_matrix(c: &RationalMatrix, v: usize) -> Result<EvolutionMatrix, PauliError> {
    check_collision(c, v)?;
    let sc = ScaledCollision::new(c);
    let n = 1usize << (2 * v);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = beta_row(&sc, v, i)?;
        // Subtract the unit row.
        match row.binary_search_by_key(&(i as u32), |&(j, _)| j) {
            Ok(pos) => {
                row[pos].1 -= Rational64::from_integer(1);
                if row[pos].1.is_zero() {
                    row.remove(pos);
                }
            }
            Err(pos) => row.insert(pos, (i as u32, Rational64::from_integer(-1))),
        }
        rows.push(row);
    }
    Ok(EvolutionMatrix { v, rows })
}

/// Conjugation of every basis string, one exact decomposition row per
/// string (no identity subtraction).
pub fn evolution_table(c: &RationalMatrix, v: usize) -> Result<Vec<EvolutionRow>, PauliError> {
    check_collision(c, v)?;
    let sc = ScaledCollision::new(c);
    let n = 1usize << (2 * v);
    let mut table = Vec::with_capacity(n);
    for i in 0..n {
        let row = beta_row(&sc, v, i)?;
        table.push(EvolutionRow {
            input: PauliString::from_index(v, i),
            terms: row
                .into_iter()
                .map(|(j, r)| (PauliString::from_index(v, j as usize), r))
                .collect(),
        });
    }
    Ok(table)
}

/// Invariant count per the rank of the evolution matrix.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub v: usize,
    pub rank: usize,
    pub invariant_count: usize,
    pub conserved_basis_strings: Vec<PauliString>,
}

pub fn count_invariants(c: &RationalMatrix, v: usize) -> Result<InvariantReport, PauliError> {
    let m = evolution_matrix(c, v)?;
    let rank = m.rank();
    Ok(InvariantReport {
        v,
        rank,
        invariant_count: m.side() - rank,
        conserved_basis_strings: m.conserved_strings(),
    })
}

/// Serializable form of an invariant report, tagged with the model and
/// collision selection it was computed for.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantSummary {
    pub model: String,
    pub collisions: String,
    pub v: usize,
    pub rank: usize,
    pub invariant_count: usize,
    pub fixed_basis_strings: Vec<String>,
}

impl InvariantSummary {
    pub fn new(model: &str, collisions: &str, report: &InvariantReport) -> Self {
        InvariantSummary {
            model: model.to_string(),
            collisions: collisions.to_string(),
            v: report.v,
            rank: report.rank,
            invariant_count: report.invariant_count,
            fixed_basis_strings: report
                .conserved_basis_strings
                .iter()
                .map(|p| p.to_string())
                .collect(),
        }
    }
}

/// Evolution matrix with floating entries; the fallback when the
/// collision unitary cannot be read as an exact rational matrix.
#[derive(Clone, Debug)]
pub struct FloatEvolutionMatrix {
    pub v: usize,
    pub matrix: nalgebra::DMatrix<f64>,
}

impl FloatEvolutionMatrix {
    /// Rank as the number of singular values above `rel_tol * sigma_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        rank_float_svd(&self.matrix, rel_tol)
    }
}

/// Either an exact evolution matrix or the flagged floating fallback.
pub enum EvolutionOutcome {
    Exact(EvolutionMatrix),
    Float(FloatEvolutionMatrix),
}

/// Builds the evolution matrix from a complex unitary. Entries that are
/// rational within 1e-12 (denominators up to 2^20) take the exact path;
/// anything else falls back to floating conjugation and is flagged by the
/// returned variant.
pub fn evolution_matrix_from_complex(
    c: &CMatrix,
    v: usize,
) -> Result<EvolutionOutcome, PauliError> {
    if let Ok(rational) = rationalize_complex(c, 1 << 20, 1e-12) {
        if rational.is_orthogonal() {
            return Ok(EvolutionOutcome::Exact(evolution_matrix(&rational, v)?));
        }
    }
    let dim = 1usize << v;
    if c.nrows() != dim || c.ncols() != dim {
        return Err(PauliError::BadShape {
            rows: c.nrows(),
            cols: c.ncols(),
            dim,
        });
    }
    let deviation = crate::qsim::unitarity_deviation(c);
    if deviation > super::COMMUTATOR_TOL {
        return Err(PauliError::NotUnitary { deviation });
    }
    let n = 1usize << (2 * v);
    let mut matrix = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        let p = PauliString::from_index(v, i).matrix();
        let evolved = c.adjoint() * p * c;
        let d = super::decompose_hermitian(&evolved, v)?;
        for (j, &alpha) in d.coefficients().iter().enumerate() {
            let delta = if i == j { 1.0 } else { 0.0 };
            matrix[(i, j)] = alpha - delta;
        }
    }
    Ok(EvolutionOutcome::Float(FloatEvolutionMatrix { v, matrix }))
}
