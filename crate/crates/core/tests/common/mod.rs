//! Shared reference data: the conjugation of every 3-qubit Pauli string
//! by the D1Q3 collision unitary, frozen as `(input, signed terms,
//! denominator)`. Every row is double-checked against the independent
//! dense-conjugation oracle in the tests that consume this table.

use num_rational::Rational64;
use qlgca_core::pauli::{evolution_table, PauliString, RationalMatrix};

pub const D1Q3_EVOLUTION_ROWS: [(&str, &str, i64); 64] = [
    ("III", "+III", 1),
    ("IIX", "+IIX +XXI +YYI +ZZX", 2),
    ("IIY", "+IIY +XYI -YXI +ZZY", 2),
    ("IIZ", "+IIZ +IZI -ZII +ZZZ", 2),
    ("IXI", "+IXI +XIX -YIY -ZXZ", 2),
    ("IXX", "+IXX -IYY +XII -XZZ", 2),
    ("IXY", "+IXY +IYX -YII +YZZ", 2),
    ("IXZ", "+IXZ +XZX -YZY -ZXI", 2),
    ("IYI", "+IYI +XIY +YIX -ZYZ", 2),
    ("IYX", "+IXY +IYX +YII -YZZ", 2),
    ("IYY", "-IXX +IYY +XII -XZZ", 2),
    ("IYZ", "+IYZ +XZY +YZX -ZYI", 2),
    ("IZI", "+IIZ +IZI +ZII -ZZZ", 2),
    ("IZX", "+IZX +XXZ +YYZ +ZIX", 2),
    ("IZY", "+IZY +XYZ -YXZ +ZIY", 2),
    ("IZZ", "+IZZ", 1),
    ("XII", "+IXX +IYY +XII +XZZ", 2),
    ("XIX", "+IXI +XIX +YIY +ZXZ", 2),
    ("XIY", "+IYI +XIY -YIX +ZYZ", 2),
    ("XIZ", "+XIZ +XZI -ZXX -ZYY", 2),
    ("XXI", "+IIX +XXI -YYI -ZZX", 2),
    ("XXX", "+XXX", 1),
    ("XXY", "+XXY +XYX -YXX -YYY", 2),
    ("XXZ", "+IZX +XXZ -YYZ -ZIX", 2),
    ("XYI", "+IIY +XYI +YXI -ZZY", 2),
    ("XYX", "+XXY +XYX +YXX +YYY", 2),
    ("XYY", "+XYY", 1),
    ("XYZ", "+IZY +XYZ +YXZ -ZIY", 2),
    ("XZI", "+XIZ +XZI +ZXX +ZYY", 2),
    ("XZX", "+IXZ +XZX +YZY +ZXI", 2),
    ("XZY", "+IYZ +XZY -YZX +ZYI", 2),
    ("XZZ", "-IXX -IYY +XII +XZZ", 2),
    ("YII", "-IXY +IYX +YII +YZZ", 2),
    ("YIX", "+IYI -XIY +YIX +ZYZ", 2),
    ("YIY", "-IXI +XIX +YIY -ZXZ", 2),
    ("YIZ", "+YIZ +YZI +ZXY -ZYX", 2),
    ("YXI", "-IIY +XYI +YXI +ZZY", 2),
    ("YXX", "-XXY +XYX +YXX -YYY", 2),
    ("YXY", "+YXY", 1),
    ("YXZ", "-IZY +XYZ +YXZ +ZIY", 2),
    ("YYI", "+IIX -XXI +YYI -ZZX", 2),
    ("YYX", "+YYX", 1),
    ("YYY", "-XXY +XYX -YXX +YYY", 2),
    ("YYZ", "+IZX -XXZ +YYZ -ZIX", 2),
    ("YZI", "+YIZ +YZI -ZXY +ZYX", 2),
    ("YZX", "+IYZ -XZY +YZX +ZYI", 2),
    ("YZY", "-IXZ +XZX +YZY -ZXI", 2),
    ("YZZ", "+IXY -IYX +YII +YZZ", 2),
    ("ZII", "-IIZ +IZI +ZII +ZZZ", 2),
    ("ZIX", "+IZX -XXZ -YYZ +ZIX", 2),
    ("ZIY", "+IZY -XYZ +YXZ +ZIY", 2),
    ("ZIZ", "+ZIZ", 1),
    ("ZXI", "-IXZ +XZX -YZY +ZXI", 2),
    ("ZXX", "-XIZ +XZI +ZXX -ZYY", 2),
    ("ZXY", "+YIZ -YZI +ZXY +ZYX", 2),
    ("ZXZ", "-IXI +XIX -YIY +ZXZ", 2),
    ("ZYI", "-IYZ +XZY +YZX +ZYI", 2),
    ("ZYX", "-YIZ +YZI +ZXY +ZYX", 2),
    ("ZYY", "-XIZ +XZI -ZXX +ZYY", 2),
    ("ZYZ", "-IYI +XIY +YIX +ZYZ", 2),
    ("ZZI", "+ZZI", 1),
    ("ZZX", "+IIX -XXI -YYI +ZZX", 2),
    ("ZZY", "+IIY -XYI +YXI +ZZY", 2),
    ("ZZZ", "+IIZ -IZI +ZII +ZZZ", 2),
];

/// Parses a signed-term list like "+IIX -XXI" with a common denominator.
pub fn parse_terms(terms: &str, denominator: i64) -> Vec<(PauliString, Rational64)> {
    terms
        .split_whitespace()
        .map(|tok| {
            let (sign, name) = match tok.split_at(1) {
                ("+", rest) => (1, rest),
                ("-", rest) => (-1, rest),
                _ => panic!("bad term {tok:?}"),
            };
            (
                PauliString::parse(name).expect("valid string"),
                Rational64::new(sign, denominator),
            )
        })
        .collect()
}

/// Compares the computed conjugation table of the given collision
/// against the frozen reference, exactly. Returns the number of rows
/// checked.
pub fn check_d1q3_reference_table(collision: &RationalMatrix) -> usize {
    let table = evolution_table(collision, 3).expect("valid collision");
    assert_eq!(table.len(), 64);
    for (input, terms, denom) in D1Q3_EVOLUTION_ROWS {
        let want: Vec<(PauliString, Rational64)> = {
            let mut t = parse_terms(terms, denom);
            t.sort_by_key(|(p, _)| p.index());
            t
        };
        let row = &table[PauliString::parse(input).unwrap().index()];
        assert_eq!(
            row.terms, want,
            "conjugation row for {input} does not match the reference"
        );
        for (_, coeff) in &row.terms {
            let allowed = [
                Rational64::new(1, 1),
                Rational64::new(-1, 1),
                Rational64::new(1, 2),
                Rational64::new(-1, 2),
            ];
            assert!(allowed.contains(coeff), "{input}: coefficient {coeff}");
        }
    }
    64
}
