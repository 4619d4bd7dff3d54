//! Acceptance suite: one test per criterion, each printing a pass line
//! (visible with `cargo test --test acceptance -- --nocapture`).

mod common;

use qlgca_core::circuits::{
    build_d1q3_qpe_collision_circuit, build_fhp_b234_circuit, d1q3_collision_matrix,
    d1q3_pauli_collision, decompose_to_basis, fhp_rotation_collision, fhp_unitary_collision,
    verify_collision_circuit, CollisionSpec, FhpSelection,
};
use qlgca_core::lgca::{
    self, d1q2_stream, density_profile, fhp_step, Lattice1D, LatticeTri, Model, SeededBits,
};
use qlgca_core::pauli::{commutes, count_invariants, evolution_table, observable_from_terms};
use qlgca_core::qpe::{
    dyadic_modal_separation, equal_quantity_equivalence_check, phase_operator, qpe_distribution,
    qpe_kernel, quantity_values, spectrum_report, Convention, Quantity,
};
use qlgca_core::qsim::max_entry_diff;
use qlgca_core::streaming::{
    check_infeasible, field_from_lattice, nogo_constraint_system, FeasibilityOutcome,
    SublinearWalk,
};
use std::time::Instant;

fn pass(criterion: u32, detail: &str) {
    println!("criterion {criterion:2}: PASS — {detail}");
}

#[test]
fn criterion_01_invariant_counts_exact() {
    let t0 = Instant::now();
    let d1q3 = count_invariants(&d1q3_collision_matrix(), 3).unwrap();
    let d1q3_elapsed = t0.elapsed();
    assert_eq!((d1q3.rank, d1q3.invariant_count), (14, 50));
    assert!(d1q3_elapsed.as_secs_f64() < 1.0, "{d1q3_elapsed:?}");

    let t1 = Instant::now();
    let b3 = count_invariants(&fhp_unitary_collision(FhpSelection::B3), 6).unwrap();
    assert_eq!((b3.rank, b3.invariant_count), (126, 3970));

    // The deterministic 120° rotation collision and the stochastic
    // unitary on the same orbits have different spectra (3-cycles vs an
    // involution), so they conserve different counts; both are pinned.
    let b24 = count_invariants(&fhp_rotation_collision(FhpSelection::B24), 6).unwrap();
    assert_eq!((b24.rank, b24.invariant_count), (488, 3608));
    let b24_stochastic = count_invariants(&fhp_unitary_collision(FhpSelection::B24), 6).unwrap();
    assert_eq!(
        (b24_stochastic.rank, b24_stochastic.invariant_count),
        (480, 3616)
    );

    let b234 = count_invariants(&fhp_unitary_collision(FhpSelection::B234), 6).unwrap();
    assert_eq!((b234.rank, b234.invariant_count), (590, 3506));
    let fhp_elapsed = t1.elapsed();
    assert!(fhp_elapsed.as_secs_f64() < 600.0, "{fhp_elapsed:?}");

    pass(
        1,
        &format!(
            "ranks/invariants d1q3 (14, 50) in {d1q3_elapsed:?}; fhp b3 (126, 3970), \
             b2,b4 rotation (488, 3608) [stochastic variant (480, 3616)], \
             b2,b3,b4 (590, 3506) in {fhp_elapsed:?}"
        ),
    );
}

#[test]
fn criterion_02_evolution_table_exact() {
    let rows = common::check_d1q3_reference_table(&d1q3_collision_matrix());
    assert_eq!(rows, 64);
    pass(2, "all 64 conjugation rows match the reference exactly");
}

#[test]
fn criterion_03_conserved_observables() {
    let c3 = d1q3_pauli_collision().unwrap();
    let mass3 = observable_from_terms(3, &[("IIZ", 1.0), ("IZI", 2.0), ("ZII", 1.0)]).unwrap();
    let momentum3 = observable_from_terms(3, &[("IIZ", 1.0), ("ZII", -1.0)]).unwrap();
    for (name, o) in [("m", &mass3), ("p", &momentum3)] {
        let check = commutes(&c3, o).unwrap();
        assert!(
            check.commutes && check.residual <= 1e-10,
            "{name}: residual {}",
            check.residual
        );
    }

    let c6 = fhp_unitary_collision(FhpSelection::B234).to_complex();
    let root3_2 = 3f64.sqrt() / 2.0;
    let mass6 = observable_from_terms(
        6,
        &[
            ("IIIIIZ", 1.0),
            ("IIIIZI", 1.0),
            ("IIIZII", 1.0),
            ("IIZIII", 1.0),
            ("IZIIII", 1.0),
            ("ZIIIII", 1.0),
        ],
    )
    .unwrap();
    let px = observable_from_terms(
        6,
        &[
            ("IIIIIZ", 1.0),
            ("IIZIII", -1.0),
            ("IIIIZI", 0.5),
            ("ZIIIII", 0.5),
            ("IIIZII", -0.5),
            ("IZIIII", -0.5),
        ],
    )
    .unwrap();
    let py = observable_from_terms(
        6,
        &[
            ("IIIIZI", root3_2),
            ("IIIZII", root3_2),
            ("IZIIII", -root3_2),
            ("ZIIIII", -root3_2),
        ],
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    for (name, o) in [("M", &mass6), ("Px", &px), ("Py", &py)] {
        let check = commutes(&c6, o).unwrap();
        assert!(
            check.commutes && check.residual <= 1e-10,
            "{name}: residual {}",
            check.residual
        );
        worst = worst.max(check.residual);
    }

    // Fixed basis strings of the D1Q3 conjugation: the classical XOR
    // pairs and their symmetric counterparts.
    let table = evolution_table(&d1q3_collision_matrix(), 3).unwrap();
    for name in ["IZZ", "ZIZ", "ZZI", "XXX", "XYY", "YXY", "YYX"] {
        let p = qlgca_core::pauli::PauliString::parse(name).unwrap();
        let row = &table[p.index()];
        assert_eq!(row.terms.len(), 1, "{name}");
        assert_eq!(row.terms[0].0, p, "{name}");
        assert_eq!(*row.terms[0].1.numer(), 1, "{name}");
    }
    pass(
        3,
        &format!("commutator residuals <= 1e-10 (worst {worst:.2e}); 7 fixed strings confirmed"),
    );
}

#[test]
fn criterion_04_circuit_verification() {
    let t0 = Instant::now();
    let fhp = build_fhp_b234_circuit();
    let report =
        verify_collision_circuit(&fhp.circuit, &fhp.layout, &CollisionSpec::fhp_zero_momentum())
            .unwrap();
    report.ensure_pass().unwrap();
    let fhp_elapsed = t0.elapsed();
    assert!(fhp_elapsed.as_secs_f64() < 1.0, "{fhp_elapsed:?}");
    // Identity rows everywhere except the eight collisional states.
    for (input, row) in report.matrix.iter().enumerate() {
        let collisional = [21usize, 42, 9, 18, 36, 27, 45, 54].contains(&input);
        if !collisional {
            assert!((row[input] - 1.0).abs() <= 1e-10, "row {input}");
        }
    }
    assert!((report.matrix[21][42] - 1.0).abs() <= 1e-10);
    assert!((report.matrix[42][21] - 1.0).abs() <= 1e-10);
    for orbit in [[9usize, 18, 36], [27, 45, 54]] {
        for (i, &s) in orbit.iter().enumerate() {
            for (j, &t) in orbit.iter().enumerate() {
                let expect = if i == j { 0.0 } else { 0.5 };
                assert!(
                    (report.matrix[s][t] - expect).abs() <= 1e-10,
                    "orbit entry {s}->{t}"
                );
            }
        }
    }

    let t1 = Instant::now();
    let d1q3 = build_d1q3_qpe_collision_circuit();
    let report =
        verify_collision_circuit(&d1q3.circuit, &d1q3.layout, &CollisionSpec::d1q3()).unwrap();
    report.ensure_pass().unwrap();
    for (input, row) in report.matrix.iter().enumerate() {
        let expect = lgca::d1q3_collide(input as u8) as usize;
        assert!((row[expect] - 1.0).abs() <= 1e-10, "row {input}");
    }
    let d1q3_elapsed = t1.elapsed();
    assert!(d1q3_elapsed.as_secs_f64() < 1.0, "{d1q3_elapsed:?}");
    pass(
        4,
        &format!("both collision circuits reproduce their rules exactly ({fhp_elapsed:?} / {d1q3_elapsed:?})"),
    );
}

#[test]
fn criterion_05_pauli_form_identity() {
    let sum = d1q3_pauli_collision().unwrap();
    let deviation = max_entry_diff(&sum, &d1q3_collision_matrix().to_complex());
    assert!(deviation <= 1e-12, "deviation {deviation:.3e}");
    pass(5, &format!("Pauli sum equals the permutation matrix (max dev {deviation:.2e})"));
}

#[test]
fn criterion_06_gate_count_proxy() {
    let built = build_fhp_b234_circuit();
    let (lowered, report) = decompose_to_basis(&built.circuit).unwrap();
    assert!(report.equivalence_deviation <= 1e-9);
    assert!(
        report.elementary_gate_count < 2000,
        "count {}",
        report.elementary_gate_count
    );
    // Lowering preserves the verification outcome bit for bit.
    let before =
        verify_collision_circuit(&built.circuit, &built.layout, &CollisionSpec::fhp_zero_momentum())
            .unwrap();
    let after =
        verify_collision_circuit(&lowered, &built.layout, &CollisionSpec::fhp_zero_momentum())
            .unwrap();
    after.ensure_pass().unwrap();
    for (rb, ra) in before.matrix.iter().zip(&after.matrix) {
        for (pb, pa) in rb.iter().zip(ra) {
            assert!((pb - pa).abs() <= 1e-10);
        }
    }
    pass(
        6,
        &format!(
            "lowered to {} elementary gates on {} work qubits (deviation {:.2e})",
            report.elementary_gate_count, report.work_qubits, report.equivalence_deviation
        ),
    );
}

#[test]
fn criterion_07_qpe_spectra() {
    // Equal-quantity rows identical: rest-weighted mass over D1Q3.
    let report = spectrum_report(&Quantity::Mass, Model::D1Q3, 3, Convention::Direct).unwrap();
    let values = quantity_values(&Quantity::Mass, Model::D1Q3).unwrap();
    assert!(equal_quantity_equivalence_check(&report, &values));
    for (a, b) in [(0b001usize, 0b100usize), (0b010, 0b101), (0b011, 0b110)] {
        assert!(report.rows[a].total_variation(&report.rows[b]) <= 1e-12);
    }
    // FHP mass: six single-particle states share one row.
    let fhp = spectrum_report(&Quantity::Mass, Model::Fhp, 3, Convention::Direct).unwrap();
    let fhp_values = quantity_values(&Quantity::Mass, Model::Fhp).unwrap();
    assert!(equal_quantity_equivalence_check(&fhp, &fhp_values));
    for i in 1..6 {
        let tv = fhp.rows[1usize << i].total_variation(&fhp.rows[1]);
        assert!(tv <= 1e-12, "single-particle rows differ: {tv}");
    }
    // Dyadic sharp separation: masses 0..4 on five distinct outcomes.
    let dyadic = spectrum_report(
        &Quantity::Mass,
        Model::D1Q3,
        3,
        Convention::Dyadic { bits: 3 },
    )
    .unwrap();
    assert!(dyadic_modal_separation(&dyadic, &values));
    let outcomes: std::collections::BTreeSet<u64> = dyadic
        .rows
        .iter()
        .map(|r| r.modal_outcome().unwrap())
        .collect();
    assert_eq!(outcomes.len(), 5);
    for (s, row) in dyadic.rows.iter().enumerate() {
        assert!((row.probability(values[s] as u64) - 1.0).abs() <= 1e-10);
    }
    // Circuit output vs the analytic kernel for every state and
    // register size up to 5, in both conventions.
    let mut worst: f64 = 0.0;
    for n in 1..=5usize {
        for convention in [Convention::Direct, Convention::Dyadic { bits: n }] {
            let op = phase_operator(&Quantity::Mass, Model::D1Q3, convention).unwrap();
            for s in 0..8u64 {
                let d = qpe_distribution(&op, s, n).unwrap();
                let kernel = qpe_kernel(op.eigenphase_fraction(s), n);
                for (y, &p) in kernel.iter().enumerate() {
                    let dev = (d.probability(y as u64) - p).abs();
                    worst = worst.max(dev);
                    assert!(dev <= 1e-10, "s={s} n={n} y={y}");
                }
            }
        }
    }
    pass(
        7,
        &format!("equal-quantity rows identical; 5 dyadic peaks; kernel deviation <= {worst:.2e}"),
    );
}

#[test]
fn criterion_08_sublinear_streaming_density() {
    let t0 = Instant::now();
    let n_space = 6usize;
    let cells = 1usize << n_space;
    let mut delta = vec![0u8; cells];
    delta[cells / 2] = 0b11;
    let mut block = vec![0u8; cells];
    for c in block.iter_mut().take(40).skip(24) {
        *c = 0b11;
    }
    let fields = [
        ("delta", Lattice1D::new(Model::D1Q2, delta).unwrap()),
        ("block", Lattice1D::new(Model::D1Q2, block).unwrap()),
        (
            "random",
            Lattice1D::random(Model::D1Q2, cells, 0.4, 99).unwrap(),
        ),
    ];
    for (name, initial) in &fields {
        let mut classical = initial.clone();
        let mut walk = SublinearWalk::new(&field_from_lattice(initial), n_space).unwrap();
        for step in 1..=24usize {
            walk.step().unwrap();
            classical = d1q2_stream(&classical).unwrap();
            let reference = density_profile(&classical, 0);
            let quantum = walk.density();
            for (x, (&q, &m)) in quantum.iter().zip(&reference).enumerate() {
                // The exact-mode profile is integer-valued; zero
                // deviation in integer mass units.
                assert!((q - q.round()).abs() < 1e-9, "{name} t={step} x={x}");
                assert_eq!(q.round() as i64, m as i64, "{name} t={step} x={x}");
            }
            if *name == "random" && step % 6 == 0 {
                let shots = 1000u64;
                let sampled = walk.sample_density(shots, 1000 + step as u64);
                for (x, (&est, &m)) in sampled.iter().zip(&reference).enumerate() {
                    let p = m / (2.0 * cells as f64);
                    let sigma = 2.0 * cells as f64 * (p * (1.0 - p) / shots as f64).sqrt();
                    assert!(
                        (est - m).abs() <= 4.0 * sigma + 1e-12,
                        "{name} t={step} x={x}: est {est} vs {m} (sigma {sigma})"
                    );
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "{elapsed:?}");
    pass(
        8,
        &format!("64-cell 24-step densities exact for 3 fields; 1000-shot samples within 4 sigma ({elapsed:?})"),
    );
}

#[test]
fn criterion_09_nogo_certificate() {
    let system = nogo_constraint_system();
    match check_infeasible(&system, 1000, 2024) {
        FeasibilityOutcome::Infeasible(cert) => {
            assert!(cert.min_residual >= 0.1, "residual {}", cert.min_residual);
            assert!(cert
                .contradiction_chain
                .iter()
                .any(|line| line.contains("A + B = 0")));
            assert!(cert
                .contradiction_chain
                .iter()
                .any(|line| line.contains("A + B = 1")));
            pass(
                9,
                &format!(
                    "infeasible: residual floor {:.4} over {} restarts, chain of {} steps",
                    cert.min_residual,
                    cert.restarts,
                    cert.contradiction_chain.len()
                ),
            );
        }
        FeasibilityOutcome::Feasible { .. } => panic!("system must be infeasible"),
    }
}

#[test]
fn criterion_10_classical_conservation() {
    let mut lattice = LatticeTri::random(32, 32, 0.3, 4242).unwrap();
    let mut bits = SeededBits::new(777);
    let initial = lattice.total_quantities();
    for step in 1..=1000usize {
        lattice = fhp_step(&lattice, &mut bits);
        let now = lattice.total_quantities();
        assert_eq!(now, initial, "step {step}");
    }
    pass(
        10,
        &format!(
            "mass {} and momentum ({}, {}·sqrt3)/2 exactly constant over 1000 steps",
            initial.mass, initial.momentum_x_halves, initial.momentum_y_root3_halves
        ),
    );
}
