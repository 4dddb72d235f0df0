//! Subcommand implementations: compile the requested gate, drive the library,
//! and serialize JSON/CSV artifacts.
//!
//! Artifacts are deterministic: floats are printed with 17 significant digits
//! (`{:.16e}` in CSV, shortest-round-trip in JSON), JSON object keys are
//! sorted, and nothing time- or machine-dependent is emitted unless the user
//! opts in with `--timing`. Warnings go to stderr so they never perturb an
//! artifact written to stdout.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use adigate::circuit::{
    adiabatic_target_state, compile_named, execute_circuit, run_adiabatic_gate, GateKind, GateSpec,
};
use adigate::hamiltonian::{
    branch_evolutions, controlled_gate_hamiltonian, default_steps, single_qubit_gate_hamiltonian,
    BlochAxis, LinearSchedule, TimeDependentHamiltonian,
};
use adigate::linalg::{fidelity, QuantumState};
use adigate::propagate::{
    bloch_trajectory, dephasing_demo, diabatic_error, eigenstate_trajectory, phases,
};
use serde_json::{json, Value};

use crate::{circuit_file, CircuitCmd, CliError, GateArgs, GateCmd, SweepCmd, TrajectoryCmd};

/// Errors from compiling user-supplied gate parameters are validation errors
/// (exit 3), not runtime errors: the evolution never started.
fn validation(e: adigate::Error) -> CliError {
    CliError::Validation(e.to_string())
}

/// Accept `x` / `y` / `z` or a comma-separated 3-vector for `--axis`.
fn parse_axis(text: &str) -> Result<BlochAxis, CliError> {
    match text.trim().to_ascii_lowercase().as_str() {
        "x" => return Ok(BlochAxis::X),
        "y" => return Ok(BlochAxis::Y),
        "z" => return Ok(BlochAxis::Z),
        _ => {}
    }
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Parse(format!(
            "axis {text:?} is neither x/y/z nor a comma-separated 3-vector"
        )));
    }
    let mut v = [0.0; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|_| CliError::Parse(format!("axis component {part:?} is not a number")))?;
    }
    axis_from_components(v).map_err(CliError::Validation)
}

/// Build a unit axis from raw components, shared by the `--axis` flag and
/// circuit files. Inputs visibly off unit length are normalized with a
/// warning on stderr, never in the artifact.
pub(crate) fn axis_from_components(v: [f64; 3]) -> Result<BlochAxis, String> {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let axis = BlochAxis::new(v[0], v[1], v[2]).map_err(|e| e.to_string())?;
    if (norm - 1.0).abs() > 1e-6 {
        eprintln!(
            "warning: axis ({}, {}, {}) has norm {norm}; normalized to ({}, {}, {})",
            v[0],
            v[1],
            v[2],
            axis.x(),
            axis.y(),
            axis.z()
        );
    }
    Ok(axis)
}

/// Compile the `--name/--axis/--phi/--theta-f` flags into a gate. Named
/// two-qubit gates act on (control, target) = (0, 1); single-qubit gates act
/// on qubit 0; the ancilla always sits right after the register.
fn compile_gate(args: &GateArgs) -> Result<GateSpec, CliError> {
    let axis = match &args.axis {
        Some(text) => Some(parse_axis(text)?),
        None => None,
    };
    let canonical = args.name.trim().to_ascii_uppercase();
    let (control, target, ancilla) = match canonical.as_str() {
        "CNOT" | "CPHASE" => (Some(0), 1, 2),
        _ => (None, 0, 1),
    };
    let mut g =
        compile_named(&args.name, axis, args.phi, control, target, ancilla).map_err(validation)?;
    if let Some(theta_f) = args.theta_f {
        g = g.with_theta_f(theta_f).map_err(validation)?;
    }
    Ok(g)
}

/// Check the runtime and resolve the slice count (default: 200 per unit
/// time). `runtime = 0` is legal — it means an instantaneous quench.
fn resolve_run(runtime: f64, steps: Option<usize>) -> Result<(f64, usize), CliError> {
    if !runtime.is_finite() || runtime < 0.0 {
        return Err(CliError::Validation(format!(
            "runtime {runtime} is not a finite nonnegative time"
        )));
    }
    let steps = steps.unwrap_or_else(|| default_steps(runtime));
    if steps == 0 {
        return Err(CliError::Validation("steps must be at least 1".into()));
    }
    Ok((runtime, steps))
}

fn write_artifact(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn gate_hamiltonian(g: &GateSpec, sched: &LinearSchedule) -> TimeDependentHamiltonian {
    match g.kind() {
        GateKind::Rotation => single_qubit_gate_hamiltonian(g.axis(), g.phi(), sched),
        GateKind::ControlledRotation => controlled_gate_hamiltonian(g.axis(), g.phi(), sched),
    }
}

/// Serialize amplitudes as `[[re, im], ...]` in basis order.
fn amplitudes_json(state: &QuantumState) -> Value {
    Value::Array(
        state
            .amplitudes()
            .iter()
            .map(|a| json!([a.re, a.im]))
            .collect(),
    )
}

fn gate_json(name: &str, g: &GateSpec) -> Value {
    json!({
        "name": name.trim().to_ascii_uppercase(),
        "kind": match g.kind() {
            GateKind::Rotation => "rotation",
            GateKind::ControlledRotation => "controlled_rotation",
        },
        "axis": [g.axis().x(), g.axis().y(), g.axis().z()],
        "phi": g.phi(),
        "theta_f": g.theta_f(),
        "control": g.control(),
        "target": g.target(),
    })
}

pub(crate) fn cmd_gate(cmd: GateCmd) -> Result<(), CliError> {
    let g = compile_gate(&cmd.gate)?;
    let (runtime, steps) = resolve_run(cmd.run.runtime, cmd.run.steps)?;
    if let Some(strength) = cmd.noise_strength {
        if !strength.is_finite() || strength < 0.0 {
            return Err(CliError::Validation(format!(
                "noise strength {strength} is not a finite nonnegative number"
            )));
        }
        if cmd.trials == 0 {
            return Err(CliError::Validation("trials must be at least 1".into()));
        }
    }
    let sched = LinearSchedule::with_steps(g.theta_f(), runtime, steps).map_err(validation)?;
    let h = gate_hamiltonian(&g, &sched);
    let working = QuantumState::basis_state(g.working_qubits().len(), 0)?;

    let (final_state, stats) = run_adiabatic_gate(&g, &working, runtime, steps)?;
    let target = adiabatic_target_state(&g, &working)?;
    let oracle_fidelity = fidelity(&final_state, &target)?;
    let error = diabatic_error(&h, &working, runtime, steps)?;
    let mut phase_entries = Vec::new();
    for (label, branch) in branch_evolutions(g.phi(), &sched) {
        let record = phases(&branch, runtime, steps, label)?;
        phase_entries.push(json!({
            "branch": record.branch_label,
            "dynamic": record.dynamic_phase,
            "geometric": record.geometric_phase,
        }));
    }

    let mut report = json!({
        "gate": gate_json(&cmd.gate.name, &g),
        "run": {"runtime": runtime, "steps": steps},
        "ancilla": {
            "probability_one": stats.probability_one,
            "expected_probability_one": stats.expected_probability_one,
        },
        "oracle_fidelity": oracle_fidelity,
        "diabatic_error": error,
        "branch_phases": phase_entries,
        "final_state": amplitudes_json(&final_state),
    });
    if let Some(strength) = cmd.noise_strength {
        report["dephasing"] =
            dephasing_json(&h, &working, runtime, steps, strength, cmd.trials, cmd.seed)?;
    }
    let text = format!(
        "{}\n",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    write_artifact(&cmd.run.out, &text)
}

/// Average a dephasing ensemble and summarize what the noise did: the ancilla
/// statistics it must preserve and the inter-branch coherence it kills.
fn dephasing_json(
    h: &TimeDependentHamiltonian,
    working: &QuantumState,
    runtime: f64,
    steps: usize,
    strength: f64,
    trials: usize,
    seed: u64,
) -> Result<Value, CliError> {
    let rho = dephasing_demo(h, working, runtime, steps, strength, trials, seed)?;
    // Ancilla |1> population: diagonal weight on basis states whose last bit
    // (the ancilla, least significant) is set.
    let p_one: f64 = (0..rho.nrows())
        .filter(|i| i % 2 == 1)
        .map(|i| rho[(i, i)].re)
        .sum();
    // Largest density-matrix element between the two gate branches.
    let p0 = h
        .lifted_projector(0)
        .expect("gate Hamiltonians are branched");
    let p1 = h
        .lifted_projector(1)
        .expect("gate Hamiltonians are branched");
    let cross = &p0 * &rho * &p1;
    let coherence = cross.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let purity = (&rho * &rho).trace().re;
    Ok(json!({
        "kick_strength": strength,
        "trials": trials,
        "seed": seed,
        "ancilla_probability_one": p_one,
        "inter_branch_coherence": coherence,
        "purity": purity,
    }))
}

pub(crate) fn cmd_sweep(cmd: SweepCmd) -> Result<(), CliError> {
    let g = compile_gate(&cmd.gate)?;
    let mut runtimes = Vec::new();
    for part in cmd.sweep.split(',') {
        let trimmed = part.trim();
        let t: f64 = trimmed
            .parse()
            .map_err(|_| CliError::Parse(format!("sweep entry {trimmed:?} is not a number")))?;
        runtimes.push(t);
    }
    for &t in &runtimes {
        if !t.is_finite() || t <= 0.0 {
            return Err(CliError::Validation(format!(
                "sweep runtime {t} must be positive"
            )));
        }
    }
    runtimes.sort_by(f64::total_cmp);

    let working = QuantumState::basis_state(g.working_qubits().len(), 0)?;
    let target = adiabatic_target_state(&g, &working)?;
    let mut out = String::from("T,steps,diabatic_error,oracle_fidelity,wall_ms\n");
    for &t in &runtimes {
        let steps = cmd.steps.unwrap_or_else(|| default_steps(t));
        if steps == 0 {
            return Err(CliError::Validation("steps must be at least 1".into()));
        }
        let started = Instant::now();
        let sched = LinearSchedule::with_steps(g.theta_f(), t, steps).map_err(validation)?;
        let h = gate_hamiltonian(&g, &sched);
        let error = diabatic_error(&h, &working, t, steps)?;
        let (final_state, _) = run_adiabatic_gate(&g, &working, t, steps)?;
        let fid = fidelity(&final_state, &target)?;
        // Wall time stays 0 unless requested, so rows are byte-reproducible.
        let wall = if cmd.timing {
            started.elapsed().as_millis()
        } else {
            0
        };
        out.push_str(&format!(
            "{t:.16e},{steps},{error:.16e},{fid:.16e},{wall}\n"
        ));
    }
    write_artifact(&cmd.out, &out)
}

pub(crate) fn cmd_trajectory(cmd: TrajectoryCmd) -> Result<(), CliError> {
    let g = compile_gate(&cmd.gate)?;
    if g.kind() != GateKind::Rotation {
        return Err(CliError::Validation(
            "trajectory exports the ancilla Bloch path of a single-qubit gate; \
             a controlled gate's active branch is 4-dimensional"
                .into(),
        ));
    }
    let (runtime, _) = resolve_run(cmd.run.runtime, cmd.run.steps)?;
    if cmd.samples < 2 {
        return Err(CliError::Validation("samples must be at least 2".into()));
    }
    let sched = LinearSchedule::new(g.theta_f(), runtime).map_err(validation)?;
    let mut out = String::from("t,branch,x,y,z\n");
    // The exported path is the instantaneous ground state of each branch —
    // the curve the evolving state hugs to O(1/T).
    for (label, branch) in branch_evolutions(g.phi(), &sched) {
        let trajectory = eigenstate_trajectory(&branch, runtime, cmd.samples)?;
        let points = bloch_trajectory(&trajectory)?;
        for (t, p) in trajectory.sample_times().iter().zip(&points) {
            out.push_str(&format!(
                "{t:.16e},{label},{:.16e},{:.16e},{:.16e}\n",
                p[0], p[1], p[2]
            ));
        }
    }
    write_artifact(&cmd.run.out, &out)
}

pub(crate) fn cmd_circuit(cmd: CircuitCmd) -> Result<(), CliError> {
    let text = fs::read_to_string(&cmd.path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", cmd.path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: invalid JSON: {e}", cmd.path.display())))?;
    let circuit =
        circuit_file::parse_circuit(&value).map_err(|e| CliError::Validation(e.to_string()))?;
    let (runtime, steps) = resolve_run(cmd.run.runtime, cmd.run.steps)?;
    let report = execute_circuit(&circuit, runtime, steps)?;
    let artifact = json!({
        "n_qubits": circuit.n_qubits(),
        "gate_count": circuit.gate_count(),
        "run": {"runtime": runtime, "steps": steps},
        "oracle_fidelity": report.oracle_fidelity,
        "per_gate_fidelity": report.per_gate_fidelity,
        "ancilla_outcome_probabilities": report.ancilla_outcome_probabilities,
        "total_evolution_time": report.total_evolution_time,
        "ancillas_used": report.ancillas_used,
        "final_state": amplitudes_json(&report.final_state),
    });
    let text = format!(
        "{}\n",
        serde_json::to_string_pretty(&artifact).expect("report serializes")
    );
    write_artifact(&cmd.run.out, &text)
}
