//! The D1Q3 conjugation table against two independent routes: the exact
//! sparse path and a dense float conjugation oracle.

mod common;

use qlgca_core::circuits::d1q3_collision_matrix;
use qlgca_core::pauli::{decompose_hermitian, enumerate_basis, evolution_table};

#[test]
fn exact_table_matches_reference_rows() {
    let checked = common::check_d1q3_reference_table(&d1q3_collision_matrix());
    assert_eq!(checked, 64);
}

#[test]
fn exact_table_matches_dense_conjugation() {
    let collision = d1q3_collision_matrix();
    let table = evolution_table(&collision, 3).unwrap();
    let c = collision.to_complex();
    for (i, p) in enumerate_basis(3).iter().enumerate() {
        let evolved = c.adjoint() * p.matrix() * &c;
        let dense = decompose_hermitian(&evolved, 3).unwrap();
        for (q, r) in &table[i].terms {
            let expect = *r.numer() as f64 / *r.denom() as f64;
            assert!(
                (dense.coefficient(q) - expect).abs() < 1e-12,
                "row {p}, term {q}"
            );
        }
        let written: f64 = table[i]
            .terms
            .iter()
            .map(|(_, r)| {
                let x = *r.numer() as f64 / *r.denom() as f64;
                x * x
            })
            .sum();
        assert!((written - 1.0).abs() < 1e-12, "row {p} norm");
    }
}

#[test]
fn fixed_strings_match_reference_single_term_rows() {
    let collision = d1q3_collision_matrix();
    let table = evolution_table(&collision, 3).unwrap();
    let fixed: Vec<String> = table
        .iter()
        .filter(|row| {
            row.terms.len() == 1
                && row.terms[0].0 == row.input
                && *row.terms[0].1.numer() == 1
        })
        .map(|row| row.input.to_string())
        .collect();
    assert_eq!(
        fixed,
        ["III", "IZZ", "XXX", "XYY", "YXY", "YYX", "ZIZ", "ZZI"]
    );
}
