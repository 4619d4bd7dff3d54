use super::PauliError;
use crate::qsim::CMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};

/// Dense square matrix over the rationals. Collision unitaries in this
/// crate are real with small denominators, so exact arithmetic stays in
/// `i64` range throughout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    dim: usize,
    entries: Vec<Rational64>,
}

impl RationalMatrix {
    pub fn zeros(dim: usize) -> Self {
        RationalMatrix {
            dim,
            entries: vec![Rational64::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = RationalMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Rational64::one());
        }
        m
    }

    /// Permutation matrix with column `j` equal to `e_{map[j]}`.
    pub fn permutation(map: &[usize]) -> Self {
        let dim = map.len();
        let mut m = RationalMatrix::zeros(dim);
        for (j, &i) in map.iter().enumerate() {
            m.set(i, j, Rational64::one());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Rational64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rational64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn transpose(&self) -> Self {
        let mut m = RationalMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, PauliError> {
        if self.dim != other.dim {
            return Err(PauliError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let mut out = RationalMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for k in 0..self.dim {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..self.dim {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.set(i, j, out.get(i, j) + a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exact unitarity for a real matrix: `Mᵀ M = I`.
    pub fn is_orthogonal(&self) -> bool {
        match self.transpose().mul(self) {
            Ok(p) => p == RationalMatrix::identity(self.dim),
            Err(_) => false,
        }
    }

    pub fn to_complex(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let r = self.get(i, j);
                m[(i, j)] = Complex64::new(*r.numer() as f64 / *r.denom() as f64, 0.0);
            }
        }
        m
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> i64 {
        self.entries
            .iter()
            .fold(1i64, |acc, r| num_integer::lcm(acc, *r.denom()))
    }

    /// Entries scaled by `scale`, which must clear every denominator.
    pub(crate) fn scaled_integer_entries(&self, scale: i64) -> Vec<i64> {
        self.entries
            .iter()
            .map(|r| {
                let num = r.numer() * scale;
                debug_assert_eq!(num % r.denom(), 0);
                num / r.denom()
            })
            .collect()
    }
}

/// Attempts to read a complex matrix as an exact rational (real) matrix.
/// Every entry must have negligible imaginary part and a real part within
/// `tol` of a fraction with denominator at most `max_denominator`.
pub fn rationalize_complex(
    m: &CMatrix,
    max_denominator: i64,
    tol: f64,
) -> Result<RationalMatrix, PauliError> {
    if m.nrows() != m.ncols() {
        return Err(PauliError::DimensionMismatch {
            left: m.nrows(),
            right: m.ncols(),
        });
    }
    let mut out = RationalMatrix::zeros(m.nrows());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let e = m[(i, j)];
            if e.im.abs() > tol {
                return Err(PauliError::NotRational);
            }
            let r = rationalize_f64(e.re, max_denominator, tol).ok_or(PauliError::NotRational)?;
            out.set(i, j, r);
        }
    }
    Ok(out)
}

/// Best rational approximation with bounded denominator (Stern-Brocot
/// style continued fractions); `None` if nothing lands within `tol`.
fn rationalize_f64(x: f64, max_denominator: i64, tol: f64) -> Option<Rational64> {
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let x_abs = x.abs();
    let mut num = x_abs.floor() as i64;
    let mut denom = 1i64;
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, num, 1i64);
    let mut frac = x_abs - num as f64;
    for _ in 0..64 {
        if ((p1 as f64 / q1 as f64) - x_abs).abs() <= tol {
            num = p1;
            denom = q1;
            break;
        }
        if frac.abs() < f64::EPSILON {
            num = p1;
            denom = q1;
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor() as i64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_denominator {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        num = p1;
        denom = q1;
        frac = inv - a as f64;
    }
    let approx = num as f64 / denom as f64;
    if (approx - x_abs).abs() > tol {
        return None;
    }
    let r = Rational64::new(num, denom);
    Some(if negative { -r } else { r })
}
