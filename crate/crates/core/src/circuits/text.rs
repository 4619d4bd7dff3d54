//! Line-oriented circuit text format.
//!
//! ```text
//! qubits 8
//! h 3
//! x 5 | 4:1 3:0
//! swap 0 3 | 6:1
//! u 1 | 0:1 ; ry ; 0.92388,0 -0.38268,0 0.38268,0 0.92388,0
//! measure 7
//! ```
//!
//! One gate per line: kind, targets, then `|` and `qubit:polarity`
//! controls (1 filled, 0 open). Generic unitaries append `; label ;
//! row-major re,im entries`. Blank lines and `#` comments are skipped.

use super::CircuitError;
use crate::qsim::{CMatrix, Circuit, Control, Element, Gate, GateKind, Polarity};
use num_complex::Complex64;

pub fn write_circuit(circuit: &Circuit) -> String {
    let mut out = format!("qubits {}\n", circuit.n_qubits());
    for element in circuit.elements() {
        match element {
            Element::Measure(qs) => {
                let list: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
                out.push_str(&format!("measure {}\n", list.join(" ")));
            }
            Element::Gate(g) => {
                let kind = match g.kind() {
                    GateKind::X => "x",
                    GateKind::Z => "z",
                    GateKind::H => "h",
                    GateKind::Swap => "swap",
                    GateKind::Unitary { .. } => "u",
                };
                let targets: Vec<String> = g.targets().iter().map(|t| t.to_string()).collect();
                out.push_str(kind);
                out.push(' ');
                out.push_str(&targets.join(" "));
                if !g.controls().is_empty() {
                    out.push_str(" |");
                    for c in g.controls() {
                        let pol = match c.polarity {
                            Polarity::Filled => 1,
                            Polarity::Open => 0,
                        };
                        out.push_str(&format!(" {}:{}", c.qubit, pol));
                    }
                }
                if let GateKind::Unitary { matrix, label } = g.kind() {
                    out.push_str(&format!(" ; {label} ;"));
                    for i in 0..matrix.nrows() {
                        for j in 0..matrix.ncols() {
                            let e = matrix[(i, j)];
                            out.push_str(&format!(" {},{}", e.re, e.im));
                        }
                    }
                }
                out.push('\n');
            }
        }
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> CircuitError {
    CircuitError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut circuit: Option<Circuit> = None;
    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (head, matrix_part) = match line.split_once(';') {
            Some((h, rest)) => (h.trim(), Some(rest.trim())),
            None => (line, None),
        };
        let (op_part, ctrl_part) = match head.split_once('|') {
            Some((o, c)) => (o.trim(), Some(c.trim())),
            None => (head, None),
        };
        let mut words = op_part.split_whitespace();
        let kind = words.next().ok_or_else(|| parse_err(line_no, "empty line"))?;
        let operands: Vec<usize> = words
            .map(|w| {
                w.parse()
                    .map_err(|_| parse_err(line_no, format!("bad qubit index {w:?}")))
            })
            .collect::<Result<_, _>>()?;
        if kind == "qubits" {
            if circuit.is_some() {
                return Err(parse_err(line_no, "duplicate qubits header"));
            }
            let n = *operands
                .first()
                .ok_or_else(|| parse_err(line_no, "missing qubit count"))?;
            circuit = Some(Circuit::new(n));
            continue;
        }
        let circuit = circuit
            .as_mut()
            .ok_or_else(|| parse_err(line_no, "missing qubits header"))?;
        if kind == "measure" {
            circuit
                .measure(&operands)
                .map_err(|e| parse_err(line_no, e.to_string()))?;
            continue;
        }
        let mut controls = Vec::new();
        if let Some(ctrls) = ctrl_part {
            for tok in ctrls.split_whitespace() {
                let (q, pol) = tok
                    .split_once(':')
                    .ok_or_else(|| parse_err(line_no, format!("bad control {tok:?}")))?;
                let qubit: usize = q
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad control qubit {q:?}")))?;
                let polarity = match pol {
                    "1" => Polarity::Filled,
                    "0" => Polarity::Open,
                    other => {
                        return Err(parse_err(line_no, format!("bad polarity {other:?}")))
                    }
                };
                controls.push(Control { qubit, polarity });
            }
        }
        let gate = match kind {
            "x" | "z" | "h" => {
                let t = *operands
                    .first()
                    .ok_or_else(|| parse_err(line_no, "missing target"))?;
                match kind {
                    "x" => Gate::x(t),
                    "z" => Gate::z(t),
                    _ => Gate::h(t),
                }
            }
            "swap" => {
                if operands.len() != 2 {
                    return Err(parse_err(line_no, "swap needs two targets"));
                }
                Gate::swap(operands[0], operands[1])
                    .map_err(|e| parse_err(line_no, e.to_string()))?
            }
            "u" => {
                let payload = matrix_part
                    .ok_or_else(|| parse_err(line_no, "generic gate needs `; label ; entries`"))?;
                let (label, entries) = payload
                    .split_once(';')
                    .ok_or_else(|| parse_err(line_no, "generic gate needs `; label ; entries`"))?;
                let values: Vec<Complex64> = entries
                    .split_whitespace()
                    .map(|tok| {
                        let (re, im) = tok
                            .split_once(',')
                            .ok_or_else(|| parse_err(line_no, format!("bad entry {tok:?}")))?;
                        let re: f64 = re
                            .parse()
                            .map_err(|_| parse_err(line_no, format!("bad number {re:?}")))?;
                        let im: f64 = im
                            .parse()
                            .map_err(|_| parse_err(line_no, format!("bad number {im:?}")))?;
                        Ok(Complex64::new(re, im))
                    })
                    .collect::<Result<_, CircuitError>>()?;
                let dim = 1usize << operands.len();
                if values.len() != dim * dim {
                    return Err(parse_err(
                        line_no,
                        format!("expected {} entries, got {}", dim * dim, values.len()),
                    ));
                }
                let matrix = CMatrix::from_row_slice(dim, dim, &values);
                Gate::unitary(label.trim(), operands.clone(), matrix)
                    .map_err(|e| parse_err(line_no, e.to_string()))?
            }
            other => return Err(parse_err(line_no, format!("unknown gate kind {other:?}"))),
        };
        let gate = gate
            .controlled_by(controls)
            .map_err(|e| parse_err(line_no, e.to_string()))?;
        circuit
            .push(gate)
            .map_err(|e| parse_err(line_no, e.to_string()))?;
    }
    circuit.ok_or_else(|| parse_err(0, "empty circuit file"))
}

#[cfg(test)]
mod tests {
    use super::super::{build_d1q3_qpe_collision_circuit, build_fhp_b234_circuit};
    use super::*;
    use crate::qsim::max_entry_diff;

    #[test]
    fn round_trip_preserves_unitary() {
        let c = build_d1q3_qpe_collision_circuit().circuit;
        let text = write_circuit(&c);
        let back = parse_circuit(&text).unwrap();
        assert!(max_entry_diff(&back.unitary().unwrap(), &c.unitary().unwrap()) < 1e-12);
    }

    #[test]
    fn round_trip_keeps_measurements() {
        let c = build_fhp_b234_circuit().circuit;
        let text = write_circuit(&c);
        let back = parse_circuit(&text).unwrap();
        assert_eq!(back.n_qubits(), c.n_qubits());
        assert_eq!(back.elements().len(), c.elements().len());
        assert!(back.has_measurement());
    }

    #[test]
    fn round_trip_generic_unitary() {
        // A lowered controlled-H contains ry blocks serialized as
        // generic unitaries.
        let mut c = Circuit::new(2);
        c.push(Gate::ch(0, 1).unwrap()).unwrap();
        let (lowered, _) = super::super::lower::decompose_to_basis(&c).unwrap();
        let text = write_circuit(&lowered);
        let back = parse_circuit(&text).unwrap();
        assert!(
            max_entry_diff(&back.unitary().unwrap(), &lowered.unitary().unwrap()) < 1e-9
        );
    }

    #[test]
    fn parse_rejects_unknown_kind() {
        let err = parse_circuit("qubits 2\nfoo 0\n").unwrap_err();
        match err {
            CircuitError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
