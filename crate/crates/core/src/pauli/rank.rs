//! Exact rank of the (integer-cleared) evolution matrix.
//!
//! Strategy: Gaussian elimination over two random prime fields above
//! 2^30. Modular rank can only undercount, and only when the prime
//! divides a pivot minor, so two agreeing primes are accepted. On
//! disagreement (or a failed floating cross-check on small sizes) the
//! rank is recomputed with exact rational elimination, which is
//! authoritative.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

pub(crate) fn rank_exact(rows: &[Vec<(u32, i64)>], n_cols: usize) -> usize {
    let mut rng = rand::thread_rng();
    let p1 = random_prime(&mut rng);
    let p2 = loop {
        let p = random_prime(&mut rng);
        if p != p1 {
            break p;
        }
    };
    let r1 = rank_mod_prime(rows, n_cols, p1);
    let r2 = rank_mod_prime(rows, n_cols, p2);
    let mut result = if r1 == r2 {
        r1
    } else {
        rank_rational(rows, n_cols)
    };
    if n_cols <= 256 {
        let dense = dense_f64(rows, n_cols);
        if rank_float_svd(&dense, 1e-9) != result {
            result = rank_rational(rows, n_cols);
        }
    }
    result
}

fn dense_f64(rows: &[Vec<(u32, i64)>], n_cols: usize) -> nalgebra::DMatrix<f64> {
    let mut m = nalgebra::DMatrix::zeros(rows.len(), n_cols);
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            m[(i, j as usize)] = v as f64;
        }
    }
    m
}

/// Number of singular values above `rel_tol` times the largest one.
pub fn rank_float_svd(m: &nalgebra::DMatrix<f64>, rel_tol: f64) -> usize {
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > rel_tol * max)
        .count()
}

/// Rank over GF(p) by sparse row elimination against normalized pivot
/// rows kept in ascending pivot-column order.
pub fn rank_mod_prime(rows: &[Vec<(u32, i64)>], n_cols: usize, p: u64) -> usize {
    let mut pivots: Vec<(u32, Vec<(u32, u64)>)> = Vec::new();
    let mut buf = vec![0u64; n_cols];
    let mut touched: Vec<u32> = Vec::new();
    let mut rank = 0usize;
    for row in rows {
        if row.is_empty() {
            continue;
        }
        touched.clear();
        for &(c, v) in row {
            let m = v.rem_euclid(p as i64) as u64;
            buf[c as usize] = m;
            touched.push(c);
        }
        for (pcol, prow) in &pivots {
            let f = buf[*pcol as usize];
            if f == 0 {
                continue;
            }
            let mul = p - f;
            for &(c, v) in prow {
                buf[c as usize] = (buf[c as usize] + mul * v) % p;
                touched.push(c);
            }
        }
        touched.sort_unstable();
        touched.dedup();
        let pivot_col = touched.iter().copied().find(|&c| buf[c as usize] != 0);
        if let Some(pcol) = pivot_col {
            let inv = mod_inverse(buf[pcol as usize], p);
            let new_row: Vec<(u32, u64)> = touched
                .iter()
                .filter(|&&c| buf[c as usize] != 0)
                .map(|&c| (c, buf[c as usize] * inv % p))
                .collect();
            let pos = pivots
                .binary_search_by_key(&pcol, |t| t.0)
                .expect_err("pivot column must be new");
            pivots.insert(pos, (pcol, new_row));
            rank += 1;
        }
        for &c in &touched {
            buf[c as usize] = 0;
        }
    }
    rank
}

/// Rank over the rationals; exact, used as the arbiter.
pub fn rank_rational(rows: &[Vec<(u32, i64)>], n_cols: usize) -> usize {
    let mut pivots: Vec<(usize, Vec<BigRational>)> = Vec::new();
    let mut rank = 0usize;
    for row in rows {
        if row.is_empty() {
            continue;
        }
        let mut dense = vec![BigRational::zero(); n_cols];
        for &(c, v) in row {
            dense[c as usize] = BigRational::from_integer(BigInt::from(v));
        }
        for (pcol, prow) in &pivots {
            let f = dense[*pcol].clone();
            if f.is_zero() {
                continue;
            }
            for (c, v) in prow.iter().enumerate() {
                if !v.is_zero() {
                    dense[c] -= &f * v;
                }
            }
        }
        if let Some(pcol) = dense.iter().position(|v| !v.is_zero()) {
            let lead = dense[pcol].clone();
            for v in dense.iter_mut() {
                if !v.is_zero() {
                    *v /= &lead;
                }
            }
            let pos = pivots
                .binary_search_by_key(&pcol, |t| t.0)
                .expect_err("pivot column must be new");
            pivots.insert(pos, (pcol, dense));
            rank += 1;
        }
    }
    rank
}

/// Uniform random prime in (2^30, 2^31).
fn random_prime(rng: &mut impl Rng) -> u64 {
    loop {
        let candidate = rng.gen_range((1u64 << 30) + 1..1u64 << 31) | 1;
        if is_prime_u64(candidate) {
            return candidate;
        }
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = base as u128 % modulus as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % modulus as u128;
        }
        b = b * b % modulus as u128;
        exp >>= 1;
    }
    acc as u64
}

/// Deterministic Miller-Rabin for u64.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == small {
            return true;
        }
        if n.is_multiple_of(small) {
            return false;
        }
    }
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = (x as u128 * x as u128 % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows_from_dense(m: &[&[i64]]) -> Vec<Vec<(u32, i64)>> {
        m.iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(c, &v)| (c as u32, v))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let rows: Vec<Vec<(u32, i64)>> = vec![vec![], vec![], vec![]];
        assert_eq!(rank_exact(&rows, 3), 0);
    }

    #[test]
    fn all_routes_agree_on_small_matrix() {
        let rows = rows_from_dense(&[
            &[1, 2, 3, 4],
            &[2, 4, 6, 8],
            &[0, 1, 1, 0],
            &[1, 3, 4, 4],
        ]);
        // Row 2 is 2x row 1 and row 4 = row 1 + row 3: rank 2.
        assert_eq!(rank_rational(&rows, 4), 2);
        assert_eq!(rank_mod_prime(&rows, 4, 1_073_741_827), 2);
        assert_eq!(rank_float_svd(&dense_f64(&rows, 4), 1e-9), 2);
        assert_eq!(rank_exact(&rows, 4), 2);
    }

    #[test]
    fn full_rank_detected() {
        let rows = rows_from_dense(&[&[2, 0, 0], &[0, 0, 5], &[0, -3, 1]]);
        assert_eq!(rank_exact(&rows, 3), 3);
    }

    #[test]
    fn prime_generator_emits_primes_above_2_30() {
        let mut rng = rand::thread_rng();
        for _ in 0..5 {
            let p = random_prime(&mut rng);
            assert!(p > 1 << 30);
            assert!(is_prime_u64(p));
        }
    }

    #[test]
    fn miller_rabin_agrees_with_trial_division() {
        for n in 2u64..2000 {
            let trial = (2..n).all(|d| d * d > n || n % d != 0);
            assert_eq!(is_prime_u64(n), trial, "n = {n}");
        }
    }
}
