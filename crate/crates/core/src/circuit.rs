//! Gate compilation and adiabatic circuit execution.
//!
//! A gate is specified by a Bloch axis `n` and a phase `phi`; its ideal
//! unitary is the reflection-phase combination
//! `U = |n><n| + e^{i phi} |n_perp><n_perp|`, optionally conditioned on a
//! control qubit. The adiabatic realization evolves the gate Hamiltonian over
//! a finite runtime with a fresh ancilla in `|0>`; at the default final angle
//! `theta_f = pi` the ancilla ends (up to diabatic leakage) in `|1>` and the
//! register carries exactly `U`. Circuits chain such gates back to back,
//! resetting and reusing a single ancilla between gates, and are verified
//! against an exact matrix-product oracle of the same circuit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{
    axis_projectors, controlled_gate_hamiltonian, single_qubit_gate_hamiltonian, BlochAxis,
    LinearSchedule,
};
use crate::linalg::{c64, embed, fidelity, identity, pauli_x, CMatrix, CVector, QuantumState};
use crate::propagate::propagate_unitary;
use crate::tol::Tolerances;

/// Whether a gate acts on one qubit or is conditioned on a control qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Rotation,
    ControlledRotation,
}

/// A single gate: axis, phase, final ramp angle, and qubit wiring.
///
/// `theta_f` defaults to `pi`, the only value at which the ancilla ends in a
/// product state and can be deterministically reset; smaller angles realize
/// the two-component superposition weighted by `cos(theta_f/2)` and
/// `sin(theta_f/2)` instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateSpec {
    kind: GateKind,
    axis: BlochAxis,
    phi: f64,
    theta_f: f64,
    target: usize,
    control: Option<usize>,
    ancilla: usize,
}

impl GateSpec {
    /// Single-qubit rotation gate at the default `theta_f = pi`.
    pub fn rotation(axis: BlochAxis, phi: f64, target: usize, ancilla: usize) -> Result<Self> {
        Self::build(GateKind::Rotation, axis, phi, None, target, ancilla)
    }

    /// Controlled rotation gate at the default `theta_f = pi`.
    pub fn controlled(
        axis: BlochAxis,
        phi: f64,
        control: usize,
        target: usize,
        ancilla: usize,
    ) -> Result<Self> {
        Self::build(
            GateKind::ControlledRotation,
            axis,
            phi,
            Some(control),
            target,
            ancilla,
        )
    }

    fn build(
        kind: GateKind,
        axis: BlochAxis,
        phi: f64,
        control: Option<usize>,
        target: usize,
        ancilla: usize,
    ) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::BadGateParameter {
                reason: format!("phase {phi} is not finite"),
            });
        }
        if target == ancilla {
            return Err(Error::InvalidIndices {
                reason: format!("target and ancilla both reference qubit {target}"),
            });
        }
        if let Some(c) = control {
            if c == target || c == ancilla {
                return Err(Error::InvalidIndices {
                    reason: format!("control qubit {c} collides with target or ancilla"),
                });
            }
        }
        Ok(Self {
            kind,
            axis,
            phi,
            theta_f: std::f64::consts::PI,
            target,
            control,
            ancilla,
        })
    }

    /// Override the final ramp angle (in `[0, pi]`).
    pub fn with_theta_f(mut self, theta_f: f64) -> Result<Self> {
        if !theta_f.is_finite() || !(0.0..=std::f64::consts::PI + 1e-12).contains(&theta_f) {
            return Err(Error::BadGateParameter {
                reason: format!("final angle {theta_f} outside [0, pi]"),
            });
        }
        self.theta_f = theta_f;
        Ok(self)
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn axis(&self) -> &BlochAxis {
        &self.axis
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta_f(&self) -> f64 {
        self.theta_f
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn control(&self) -> Option<usize> {
        self.control
    }

    pub fn ancilla(&self) -> usize {
        self.ancilla
    }

    /// Register qubits the ideal unitary acts on, control first.
    pub fn register_qubits(&self) -> Vec<usize> {
        match self.control {
            Some(c) => vec![c, self.target],
            None => vec![self.target],
        }
    }

    /// All qubits the adiabatic evolution touches, ancilla last.
    pub fn working_qubits(&self) -> Vec<usize> {
        let mut qubits = self.register_qubits();
        qubits.push(self.ancilla);
        qubits
    }
}

/// Compile a named gate into a [`GateSpec`].
///
/// Recognized names (case-insensitive): `NOT`/`X`, `H`, `CNOT`, `CPHASE`,
/// `RZ`, `RN`. `CPHASE`, `RZ` and `RN` are parameterized and require `phi`
/// (`RN` also an axis); the others reject stray parameters so that typos
/// surface as errors instead of being ignored.
pub fn compile_named(
    name: &str,
    axis: Option<BlochAxis>,
    phi: Option<f64>,
    control: Option<usize>,
    target: usize,
    ancilla: usize,
) -> Result<GateSpec> {
    let canonical = name.to_ascii_uppercase();
    let reject_axis = |gate: &str| -> Result<()> {
        if axis.is_some() {
            return Err(Error::BadGateParameter {
                reason: format!("{gate} does not take an axis"),
            });
        }
        Ok(())
    };
    let reject_phi = |gate: &str| -> Result<()> {
        if phi.is_some() {
            return Err(Error::BadGateParameter {
                reason: format!("{gate} does not take a phase parameter"),
            });
        }
        Ok(())
    };
    let require_phi = |gate: &str| -> Result<f64> {
        phi.ok_or_else(|| Error::BadGateParameter {
            reason: format!("{gate} requires a phase parameter"),
        })
    };
    let require_control = |gate: &str| -> Result<usize> {
        control.ok_or_else(|| Error::BadGateParameter {
            reason: format!("{gate} requires a control qubit"),
        })
    };
    let reject_control = |gate: &str| -> Result<()> {
        if control.is_some() {
            return Err(Error::BadGateParameter {
                reason: format!("{gate} does not take a control qubit"),
            });
        }
        Ok(())
    };
    match canonical.as_str() {
        "NOT" | "X" => {
            reject_axis(&canonical)?;
            reject_phi(&canonical)?;
            reject_control(&canonical)?;
            GateSpec::rotation(BlochAxis::X, std::f64::consts::PI, target, ancilla)
        }
        "H" => {
            reject_axis("H")?;
            reject_phi("H")?;
            reject_control("H")?;
            // The Hadamard matrix is the reflection through the axis halfway
            // between x and z: U = n.sigma = (sx + sz)/sqrt(2) exactly. (A
            // quarter turn about y is a real rotation instead, which differs
            // from the Hadamard by a trailing bit flip.)
            let diagonal = BlochAxis::new(1.0, 0.0, 1.0)?;
            GateSpec::rotation(diagonal, std::f64::consts::PI, target, ancilla)
        }
        "CNOT" => {
            reject_axis("CNOT")?;
            reject_phi("CNOT")?;
            let c = require_control("CNOT")?;
            GateSpec::controlled(BlochAxis::X, std::f64::consts::PI, c, target, ancilla)
        }
        "CPHASE" => {
            reject_axis("CPHASE")?;
            let p = require_phi("CPHASE")?;
            let c = require_control("CPHASE")?;
            GateSpec::controlled(BlochAxis::Z, p, c, target, ancilla)
        }
        "RZ" => {
            reject_axis("RZ")?;
            reject_control("RZ")?;
            GateSpec::rotation(BlochAxis::Z, require_phi("RZ")?, target, ancilla)
        }
        "RN" => {
            reject_control("RN")?;
            let n = axis.ok_or_else(|| Error::BadGateParameter {
                reason: "RN requires an axis".into(),
            })?;
            GateSpec::rotation(n, require_phi("RN")?, target, ancilla)
        }
        _ => Err(Error::UnknownGate {
            name: name.to_string(),
        }),
    }
}

/// The exact unitary the gate is meant to implement: 2x2 for rotations, 4x4
/// (control first) for controlled rotations.
pub fn ideal_gate_unitary(g: &GateSpec) -> CMatrix {
    let (p_aligned, p_orthogonal) = axis_projectors(g.axis());
    let phase = Complex64::from_polar(1.0, g.phi());
    let u = p_aligned + p_orthogonal * phase;
    match g.kind() {
        GateKind::Rotation => u,
        GateKind::ControlledRotation => {
            let mut cu = identity(4);
            cu.view_mut((2, 2), (2, 2)).copy_from(&u);
            cu
        }
    }
}

/// An ordered gate list over a fixed register.
///
/// Register qubits are `0 .. n_qubits`; every gate's ancilla must point at
/// the single shared work qubit appended at index `n_qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitIR {
    n_qubits: usize,
    gates: Vec<GateSpec>,
}

impl CircuitIR {
    pub fn new(n_qubits: usize, gates: Vec<GateSpec>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidIndices {
                reason: "register needs at least one qubit".into(),
            });
        }
        for (k, g) in gates.iter().enumerate() {
            for q in g.register_qubits() {
                if q >= n_qubits {
                    return Err(Error::InvalidIndices {
                        reason: format!(
                            "gate {k} references qubit {q} of a {n_qubits}-qubit register"
                        ),
                    });
                }
            }
            if g.ancilla() != n_qubits {
                return Err(Error::InvalidIndices {
                    reason: format!(
                        "gate {k} uses ancilla {}, expected the shared work qubit {n_qubits}",
                        g.ancilla()
                    ),
                });
            }
        }
        Ok(Self { n_qubits, gates })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    /// Number of gates (the circuit length S).
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }
}

/// Exact reference implementation: apply each gate's ideal unitary to the
/// register, in order, by dense embedding.
pub fn gate_model_oracle(circuit: &CircuitIR, input: &QuantumState) -> Result<QuantumState> {
    if input.dim() != 1 << circuit.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << circuit.n_qubits(),
            actual: input.dim(),
        });
    }
    let mut psi: CVector = input.amplitudes().clone();
    for g in circuit.gates() {
        let u = embed(
            &ideal_gate_unitary(g),
            &g.register_qubits(),
            circuit.n_qubits(),
        )?;
        psi = u * psi;
    }
    Ok(QuantumState::trusted(psi))
}

/// Measurement statistics of the ancilla right after a gate evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncillaStats {
    /// Probability of reading the ancilla in |1>.
    pub probability_one: f64,
    /// The adiabatic-limit prediction sin^2(theta_f / 2).
    pub expected_probability_one: f64,
}

fn check_ancilla_ready(working: &QuantumState, ancilla: usize, tol: &Tolerances) -> Result<()> {
    let weight = working.probability_of_one(ancilla)?;
    if weight > tol.ancilla_prep {
        return Err(Error::AncillaNotReady { weight });
    }
    Ok(())
}

/// Run one gate as an adiabatic evolution on a working state that already
/// contains the (fresh, `|0>`) ancilla qubit.
///
/// The gate Hamiltonian only acts on the gate's own qubits, so the propagator
/// is accumulated on that small subsystem and embedded into the register once
/// — identical to evolving the embedded Hamiltonian, at a fraction of the
/// cost. Handles both gate kinds; see [`run_controlled_gate`] for the
/// kind-checked controlled entry point.
pub fn run_adiabatic_gate(
    g: &GateSpec,
    working: &QuantumState,
    runtime: f64,
    steps: usize,
) -> Result<(QuantumState, AncillaStats)> {
    let tol = Tolerances::default();
    let n_work = working.n_qubits();
    for q in g.working_qubits() {
        if q >= n_work {
            return Err(Error::InvalidIndices {
                reason: format!("gate qubit {q} out of range for {n_work} working qubits"),
            });
        }
    }
    check_ancilla_ready(working, g.ancilla(), &tol)?;
    let sched = LinearSchedule::with_steps(g.theta_f(), runtime, steps.max(1))?;
    let h_small = match g.kind() {
        GateKind::Rotation => single_qubit_gate_hamiltonian(g.axis(), g.phi(), &sched),
        GateKind::ControlledRotation => controlled_gate_hamiltonian(g.axis(), g.phi(), &sched),
    };
    let u_small = propagate_unitary(&h_small, runtime, steps.max(1))?;
    let u_full = embed(&u_small, &g.working_qubits(), n_work)?;
    let final_state = QuantumState::trusted(&u_full * working.amplitudes());
    let probability_one = final_state.probability_of_one(g.ancilla())?;
    let half = g.theta_f() / 2.0;
    Ok((
        final_state,
        AncillaStats {
            probability_one,
            expected_probability_one: half.sin().powi(2),
        },
    ))
}

/// Kind-checked wrapper around [`run_adiabatic_gate`] for controlled gates.
pub fn run_controlled_gate(
    g: &GateSpec,
    working: &QuantumState,
    runtime: f64,
    steps: usize,
) -> Result<(QuantumState, AncillaStats)> {
    if g.kind() != GateKind::ControlledRotation {
        return Err(Error::BadGateParameter {
            reason: "run_controlled_gate needs a controlled-rotation spec".into(),
        });
    }
    run_adiabatic_gate(g, working, runtime, steps)
}

/// The state an ideal (infinitely slow) gate evolution would produce from a
/// working state whose ancilla is `|0>`:
/// `cos(theta_f/2) |psi>|0> + sin(theta_f/2) (U|psi>)|1>`.
pub fn adiabatic_target_state(g: &GateSpec, working: &QuantumState) -> Result<QuantumState> {
    let tol = Tolerances::default();
    let n_work = working.n_qubits();
    for q in g.working_qubits() {
        if q >= n_work {
            return Err(Error::InvalidIndices {
                reason: format!("gate qubit {q} out of range for {n_work} working qubits"),
            });
        }
    }
    check_ancilla_ready(working, g.ancilla(), &tol)?;
    let u = embed(&ideal_gate_unitary(g), &g.register_qubits(), n_work)?;
    let flip = embed(&pauli_x(), &[g.ancilla()], n_work)?;
    let (sin_half, cos_half) = (g.theta_f() / 2.0).sin_cos();
    let rotated = flip * (u * working.amplitudes());
    let target = working.amplitudes() * c64(cos_half, 0.0) + rotated * c64(sin_half, 0.0);
    Ok(QuantumState::trusted(target))
}

/// Deterministically return a spent ancilla to `|0>` so the next gate can
/// reuse it.
///
/// After a `theta_f = pi` gate the ancilla is in `|1>` up to the diabatic
/// leakage; the reset projects out that residual (renormalizing) and relabels
/// the ancilla to `|0>`. The projection is what lets the next gate's strict
/// preparation check pass. States whose ancilla holds more than the reset
/// tolerance outside `|1>` — e.g. any `theta_f < pi` output, where the
/// ancilla is genuinely entangled with the register — are rejected with the
/// measured residual.
pub fn reset_ancilla(state: &QuantumState, ancilla: usize) -> Result<QuantumState> {
    let tol = Tolerances::default();
    let p_one = state.probability_of_one(ancilla)?;
    let residual = 1.0 - p_one;
    if residual > tol.ancilla_reset {
        return Err(Error::ResetRejected { residual });
    }
    let dim = state.dim();
    let scale = c64(1.0 / p_one.sqrt(), 0.0);
    let bit = 1usize << (state.n_qubits() - 1 - ancilla);
    let mut amplitudes = CVector::zeros(dim);
    for i in 0..dim {
        if i & bit == bit {
            amplitudes[i & !bit] = state.amplitude(i) * scale;
        }
    }
    Ok(QuantumState::trusted(amplitudes))
}

/// Result of executing a circuit adiabatically.
#[derive(Debug, Clone)]
pub struct ExecutionReport {
    /// Final register state (ancilla already reset and dropped).
    pub final_state: QuantumState,
    /// Cumulative register fidelity against the ideal circuit prefix after
    /// each gate.
    pub per_gate_fidelity: Vec<f64>,
    /// Ancilla |1>-probability measured after each gate, before its reset.
    pub ancilla_outcome_probabilities: Vec<f64>,
    /// Fidelity of the final register against the gate-model oracle.
    pub oracle_fidelity: f64,
    /// Total adiabatic evolution time, S gates x runtime per gate.
    pub total_evolution_time: f64,
    /// Number of distinct ancilla qubits used (always 1 for nonempty
    /// circuits — gates share one work qubit via reset).
    pub ancillas_used: usize,
}

fn with_gate_index<T>(index: usize, result: Result<T>) -> Result<T> {
    result.map_err(|source| Error::GateFailed {
        index,
        source: Box::new(source),
    })
}

/// Split a product-state ancilla (exactly `|0>`, as produced by
/// [`reset_ancilla`]) off the working state.
fn drop_ancilla(state: &QuantumState, ancilla: usize) -> QuantumState {
    let bit = 1usize << (state.n_qubits() - 1 - ancilla);
    let mut amplitudes = CVector::zeros(state.dim() / 2);
    let mut j = 0;
    for i in 0..state.dim() {
        if i & bit == 0 {
            amplitudes[j] = state.amplitude(i);
            j += 1;
        }
    }
    QuantumState::trusted(amplitudes)
}

/// Execute a circuit as a chain of adiabatic gate evolutions from the all
/// `|0>` register, resetting and reusing one shared ancilla between gates,
/// and score the result against the exact gate-model oracle.
pub fn execute_circuit(
    circuit: &CircuitIR,
    runtime_per_gate: f64,
    steps_per_gate: usize,
) -> Result<ExecutionReport> {
    let n = circuit.n_qubits();
    let gate_count = circuit.gate_count();
    if gate_count == 0 {
        return Ok(ExecutionReport {
            final_state: QuantumState::basis_state(n, 0)?,
            per_gate_fidelity: Vec::new(),
            ancilla_outcome_probabilities: Vec::new(),
            oracle_fidelity: 1.0,
            total_evolution_time: 0.0,
            ancillas_used: 0,
        });
    }
    // Working register: n circuit qubits plus the shared ancilla at index n.
    let mut working = QuantumState::basis_state(n + 1, 0)?;
    let mut ideal: CVector = QuantumState::basis_state(n, 0)?.amplitudes().clone();
    let mut per_gate_fidelity = Vec::with_capacity(gate_count);
    let mut ancilla_outcome_probabilities = Vec::with_capacity(gate_count);
    let mut register = drop_ancilla(&working, n);
    for (k, g) in circuit.gates().iter().enumerate() {
        let (evolved, stats) = with_gate_index(
            k,
            run_adiabatic_gate(g, &working, runtime_per_gate, steps_per_gate),
        )?;
        ancilla_outcome_probabilities.push(stats.probability_one);
        working = with_gate_index(k, reset_ancilla(&evolved, n))?;
        register = drop_ancilla(&working, n);
        let u = embed(&ideal_gate_unitary(g), &g.register_qubits(), n)?;
        ideal = u * ideal;
        per_gate_fidelity.push(fidelity(&register, &QuantumState::trusted(ideal.clone()))?);
    }
    let oracle_fidelity = *per_gate_fidelity
        .last()
        .expect("nonempty circuit records at least one fidelity");
    Ok(ExecutionReport {
        final_state: register,
        per_gate_fidelity,
        ancilla_outcome_probabilities,
        oracle_fidelity,
        total_evolution_time: gate_count as f64 * runtime_per_gate,
        ancillas_used: 1,
    })
}
