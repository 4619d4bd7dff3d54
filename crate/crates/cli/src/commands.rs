use crate::{CliError, OutputFormat};
use qlgca_core::circuits::{
    build_d1q3_qpe_collision_circuit, build_fhp_b234_circuit, d1q3_collision_matrix,
    fhp_rotation_collision, fhp_unitary_collision, parse_circuit, verify_collision_circuit,
    write_circuit, CollisionCircuit, CollisionSpec, FhpSelection,
};
use qlgca_core::lgca::{
    d1q2_stream, d1q3_step, density_profile, fhp_step, parse_lattice, write_lattice_1d,
    write_lattice_tri, AnyLattice, Lattice1D, LatticeTri, MassConvention, Model, QuantityRecord,
    SeededBits,
};
use qlgca_core::pauli::{
    count_invariants, evolution_table, InvariantSummary, RationalMatrix,
};
use qlgca_core::qpe::{quantity_values, spectrum_report, Convention, Quantity};
use qlgca_core::streaming::{
    check_infeasible, field_from_lattice, nogo_constraint_system, FeasibilityOutcome,
    SublinearWalk,
};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

fn parse_model(name: &str) -> Result<Model, CliError> {
    Model::parse(name).ok_or_else(|| CliError::input(format!("unknown model {name:?}")))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

fn load_lattice(path: &Path) -> Result<AnyLattice, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    parse_lattice(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn conserved_mass_convention(model: Model) -> MassConvention {
    match model {
        Model::D1Q3 => MassConvention::RestWeighted,
        _ => MassConvention::PerBit,
    }
}

fn quantity_series_csv(records: &[QuantityRecord]) -> String {
    let mut out = String::from("step,mass,momentum_x_halves,momentum_y_root3_halves\n");
    for (step, q) in records.iter().enumerate() {
        let _ = writeln!(
            out,
            "{step},{},{},{}",
            q.mass, q.momentum_x_halves, q.momentum_y_root3_halves
        );
    }
    out
}

fn quantity_series_json(records: &[QuantityRecord]) -> String {
    let rows: Vec<serde_json::Value> = records
        .iter()
        .enumerate()
        .map(|(step, q)| {
            serde_json::json!({
                "step": step,
                "mass": q.mass,
                "momentum_x_halves": q.momentum_x_halves,
                "momentum_y_root3_halves": q.momentum_y_root3_halves,
            })
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&rows).expect("serializable");
    text.push('\n');
    text
}

#[allow(clippy::too_many_arguments)]
pub fn simulate_classical(
    model_name: &str,
    lattice_file: Option<&Path>,
    steps: usize,
    seed: u64,
    sites: usize,
    dims: (usize, usize),
    fill: f64,
    out: &Path,
    format: OutputFormat,
) -> Result<(), CliError> {
    let model = parse_model(model_name)?;
    if !(0.0..=1.0).contains(&fill) {
        return Err(CliError::input("fill must be between 0 and 1"));
    }
    fs::create_dir_all(out)?;
    let convention = conserved_mass_convention(model);
    let mut trajectory = String::new();
    let mut records = Vec::with_capacity(steps + 1);
    match model {
        Model::Fhp => {
            let mut lattice = match lattice_file {
                Some(path) => match load_lattice(path)? {
                    AnyLattice::Tri(l) => l,
                    AnyLattice::OneD(_) => {
                        return Err(CliError::input("lattice file is not an fhp lattice"))
                    }
                },
                None => LatticeTri::random(dims.0, dims.1, fill, seed)?,
            };
            let mut bits = SeededBits::new(seed.wrapping_add(1));
            for step in 0..=steps {
                let _ = writeln!(trajectory, "# step {step}");
                trajectory.push_str(&write_lattice_tri(&lattice));
                records.push(lattice.total_quantities());
                if step < steps {
                    lattice = fhp_step(&lattice, &mut bits);
                }
            }
        }
        Model::D1Q3 | Model::D1Q2 => {
            let mut lattice = match lattice_file {
                Some(path) => match load_lattice(path)? {
                    AnyLattice::OneD(l) if l.model() == model => l,
                    _ => return Err(CliError::input("lattice file does not match the model")),
                },
                None => default_1d_lattice(model, sites)?,
            };
            for step in 0..=steps {
                let _ = writeln!(trajectory, "# step {step}");
                trajectory.push_str(&write_lattice_1d(&lattice));
                records.push(lattice.total_quantities(convention));
                if step < steps {
                    lattice = match model {
                        Model::D1Q3 => d1q3_step(&lattice)?,
                        _ => d1q2_stream(&lattice)?,
                    };
                }
            }
        }
    }
    write_file(&out.join("trajectory.txt"), &trajectory)?;
    match format {
        OutputFormat::Csv => write_file(&out.join("quantities.csv"), &quantity_series_csv(&records)),
        OutputFormat::Json => {
            write_file(&out.join("quantities.json"), &quantity_series_json(&records))
        }
    }
}

/// Built-in 1D initial conditions: the six-cell demo row for D1Q3, a
/// centered two-mover delta for D1Q2.
fn default_1d_lattice(model: Model, sites: usize) -> Result<Lattice1D, CliError> {
    match model {
        Model::D1Q3 => Ok(Lattice1D::new(Model::D1Q3, vec![0, 5, 2, 1, 6, 2])?),
        _ => {
            let mut cells = vec![0u8; sites.max(2)];
            let mid = cells.len() / 2;
            cells[mid] = 0b11;
            Ok(Lattice1D::new(Model::D1Q2, cells)?)
        }
    }
}

fn named_circuit(name: &str) -> Result<(CollisionCircuit, CollisionSpec), CliError> {
    match name {
        "d1q3-qpe" => Ok((build_d1q3_qpe_collision_circuit(), CollisionSpec::d1q3())),
        "fhp-b234" => Ok((
            build_fhp_b234_circuit(),
            CollisionSpec::fhp_zero_momentum(),
        )),
        other => Err(CliError::input(format!(
            "unknown circuit {other:?} (expected d1q3-qpe or fhp-b234)"
        ))),
    }
}

pub fn verify_circuit(
    name: &str,
    circuit_file: Option<&Path>,
    export_circuit: Option<&Path>,
    out: &Path,
) -> Result<(), CliError> {
    let (built, spec) = named_circuit(name)?;
    if let Some(path) = export_circuit {
        write_file(path, &write_circuit(&built.circuit))?;
        return Ok(());
    }
    let circuit = match circuit_file {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            parse_circuit(&text).map_err(|e| CliError::input(e.to_string()))?
        }
        None => built.circuit.clone(),
    };
    let report = verify_collision_circuit(&circuit, &built.layout, &spec)
        .map_err(|e| CliError::input(e.to_string()))?;
    write_file(out, &report.to_csv())?;
    if report.pass {
        println!("{name}: pass (max row total variation {})", report.max_row_tv);
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{name}: first failing input state {} (total variation {})",
            report.first_failure.unwrap_or(0),
            report.max_row_tv
        )))
    }
}

fn evolution_table_csv(collision: &RationalMatrix, v: usize) -> Result<String, CliError> {
    let table = evolution_table(collision, v).map_err(|e| CliError::input(e.to_string()))?;
    let mut out =
        String::from("input_string,output_term,coefficient_numerator,coefficient_denominator\n");
    for row in &table {
        for (term, coeff) in &row.terms {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                row.input,
                term,
                coeff.numer(),
                coeff.denom()
            );
        }
    }
    Ok(out)
}

pub fn invariants(
    model_name: &str,
    collisions: &str,
    operator: &str,
    out: &Path,
    table_out: Option<&Path>,
) -> Result<(), CliError> {
    let model = parse_model(model_name)?;
    let (matrix, v, label) = match model {
        Model::D1Q3 => (d1q3_collision_matrix(), 3usize, "rest-pair".to_string()),
        Model::Fhp => {
            let sel = FhpSelection::parse(collisions)
                .ok_or_else(|| CliError::input(format!("bad collision list {collisions:?}")))?;
            let (matrix, suffix) = match operator {
                "stochastic" => (fhp_unitary_collision(sel), ""),
                "rotation" => (fhp_rotation_collision(sel), " (rotation)"),
                other => {
                    return Err(CliError::input(format!(
                        "unknown operator {other:?} (expected stochastic or rotation)"
                    )))
                }
            };
            (matrix, 6usize, format!("{}{}", sel.label(), suffix))
        }
        Model::D1Q2 => {
            return Err(CliError::input(
                "d1q2 has no collision operator; invariants apply to d1q3 and fhp",
            ))
        }
    };
    let report = count_invariants(&matrix, v).map_err(|e| CliError::input(e.to_string()))?;
    let summary = InvariantSummary::new(model.name(), &label, &report);
    let mut text = serde_json::to_string_pretty(&summary).expect("serializable");
    text.push('\n');
    write_file(out, &text)?;
    if let Some(path) = table_out {
        write_file(path, &evolution_table_csv(&matrix, v)?)?;
    }
    println!(
        "{}: rank {}, {} invariants, {} fixed basis strings",
        label,
        report.rank,
        report.invariant_count,
        report.conserved_basis_strings.len()
    );
    Ok(())
}

pub fn qpe(
    model_name: &str,
    quantity_name: &str,
    ancillas: usize,
    convention_name: &str,
    out: &Path,
) -> Result<(), CliError> {
    let model = parse_model(model_name)?;
    let quantity = Quantity::parse(quantity_name)
        .ok_or_else(|| CliError::input(format!("unknown quantity {quantity_name:?}")))?;
    let convention = match convention_name {
        "direct" => Convention::Direct,
        "dyadic" => Convention::Dyadic { bits: ancillas },
        other => {
            return Err(CliError::input(format!(
                "unknown convention {other:?} (expected direct or dyadic)"
            )))
        }
    };
    if ancillas == 0 {
        return Err(CliError::input("ancillas must be at least 1"));
    }
    let report = spectrum_report(&quantity, model, ancillas, convention)
        .map_err(|e| CliError::input(e.to_string()))?;
    write_file(out, &report.to_csv())?;
    let values =
        quantity_values(&quantity, model).map_err(|e| CliError::input(e.to_string()))?;
    let hist_path = {
        let stem = out
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "spectrum".to_string());
        out.with_file_name(format!("{stem}_hist.csv"))
    };
    write_file(&hist_path, &report.aggregated_histogram_csv(&values))?;
    Ok(())
}

pub fn nogo(restarts: usize, seed: u64, out: &Path) -> Result<(), CliError> {
    let system = nogo_constraint_system();
    match check_infeasible(&system, restarts, seed) {
        FeasibilityOutcome::Infeasible(cert) => {
            let mut text = serde_json::to_string_pretty(&cert).expect("serializable");
            text.push('\n');
            write_file(out, &text)?;
            println!(
                "infeasible: least-squares residual floor {} over {restarts} restarts",
                cert.min_residual
            );
            Ok(())
        }
        FeasibilityOutcome::Feasible { residual, .. } => Err(CliError::Verification(format!(
            "constraint system unexpectedly admits a solution (residual {residual})"
        ))),
    }
}

pub fn d1q2(
    n_space: usize,
    steps: usize,
    shots: u64,
    seed: u64,
    lattice_file: Option<&Path>,
    out: &Path,
) -> Result<(), CliError> {
    if n_space == 0 || n_space > 10 {
        return Err(CliError::input("n-space must be between 1 and 10"));
    }
    let cells = 1usize << n_space;
    let lattice = match lattice_file {
        Some(path) => match load_lattice(path)? {
            AnyLattice::OneD(l) if l.model() == Model::D1Q2 => {
                if l.len() != cells {
                    return Err(CliError::input(format!(
                        "lattice has {} cells, n-space {n_space} needs {cells}",
                        l.len()
                    )));
                }
                l
            }
            _ => return Err(CliError::input("lattice file is not a d1q2 lattice")),
        },
        None => default_1d_lattice(Model::D1Q2, cells)?,
    };
    let mut walk = SublinearWalk::new(&field_from_lattice(&lattice), n_space)
        .map_err(|e| CliError::input(e.to_string()))?;
    let mut classical = lattice;
    let mut csv = String::from(if shots > 0 {
        "step,x,mass_exact,mass_sampled\n"
    } else {
        "step,x,mass_exact\n"
    });
    for step in 0..=steps {
        if step > 0 {
            walk.step().map_err(|e| CliError::input(e.to_string()))?;
            classical = d1q2_stream(&classical)?;
        }
        let exact = walk.density();
        let reference = density_profile(&classical, 0);
        for (x, (&q, &r)) in exact.iter().zip(&reference).enumerate() {
            if (q - r).abs() > 1e-9 {
                return Err(CliError::Verification(format!(
                    "density mismatch at step {step}, cell {x}: walk {q} vs reference {r}"
                )));
            }
        }
        let sampled = if shots > 0 {
            Some(walk.sample_density(shots, seed.wrapping_add(step as u64)))
        } else {
            None
        };
        for x in 0..cells {
            match &sampled {
                Some(s) => {
                    let _ = writeln!(csv, "{step},{x},{},{}", exact[x].round() as i64, s[x]);
                }
                None => {
                    let _ = writeln!(csv, "{step},{x},{}", exact[x].round() as i64);
                }
            }
        }
    }
    write_file(out, &csv)?;
    Ok(())
}
