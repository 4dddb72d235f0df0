//! Circuit file schema: a JSON object
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "n_qubits": 2,
//!   "gates": [
//!     {"type": "named", "name": "H", "target": 0},
//!     {"type": "named", "name": "CNOT", "control": 0, "target": 1},
//!     {"type": "rot", "axis": "z", "phi": 1.5707963267948966, "target": 0},
//!     {"type": "crot", "axis": [1.0, 0.0, 0.0], "phi": 3.141592653589793,
//!      "control": 0, "target": 1}
//!   ]
//! }
//! ```
//!
//! `schema_version` may be omitted; if present it must be `"1"`. Named gates
//! carry no parameters, so only the parameter-free names (NOT/X, H, CNOT)
//! compile here — spell RZ/CPHASE/RN as `rot`/`crot` records, which say the
//! phase explicitly. Unknown fields are rejected rather than ignored so a
//! typo cannot silently change a circuit. Every violation is reported with
//! the path of the offending field, e.g. `gates[0].target`.

use adigate::circuit::{compile_named, CircuitIR, GateSpec};
use adigate::hamiltonian::BlochAxis;
use serde_json::{Map, Value};

/// A schema violation, located by a field path like `gates[2].phi`.
#[derive(Debug)]
pub(crate) struct SchemaError {
    path: String,
    message: String,
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn fail<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError {
        path: path.into(),
        message: message.into(),
    })
}

/// Walk a parsed JSON document and build the circuit it describes.
pub(crate) fn parse_circuit(value: &Value) -> Result<CircuitIR, SchemaError> {
    let obj = match value.as_object() {
        Some(o) => o,
        None => return fail("$", "circuit file must be a JSON object"),
    };
    for key in obj.keys() {
        if !matches!(key.as_str(), "schema_version" | "n_qubits" | "gates") {
            return fail(key.clone(), "unknown field");
        }
    }
    if let Some(version) = obj.get("schema_version") {
        match version.as_str() {
            Some("1") => {}
            Some(other) => {
                return fail(
                    "schema_version",
                    format!("unsupported version {other:?} (this build reads \"1\")"),
                )
            }
            None => return fail("schema_version", "expected the string \"1\""),
        }
    }
    let n_qubits = match obj.get("n_qubits") {
        None => return fail("n_qubits", "missing required field"),
        // The dense simulator holds the register plus one ancilla, and caps
        // the working space at 2^14 amplitudes.
        Some(v) => match v.as_u64() {
            Some(n) if (1..=13).contains(&n) => n as usize,
            Some(n) => {
                return fail(
                    "n_qubits",
                    format!("{n} is out of range 1..=13 (the shared ancilla adds a 14th qubit)"),
                )
            }
            None => return fail("n_qubits", "expected a positive integer"),
        },
    };
    let entries = match obj.get("gates") {
        None => return fail("gates", "missing required field"),
        Some(v) => match v.as_array() {
            Some(a) => a,
            None => return fail("gates", "expected an array"),
        },
    };
    let mut gates = Vec::with_capacity(entries.len());
    for (k, entry) in entries.iter().enumerate() {
        gates.push(parse_gate(entry, k, n_qubits)?);
    }
    CircuitIR::new(n_qubits, gates).map_err(|e| SchemaError {
        path: "gates".into(),
        message: e.to_string(),
    })
}

fn parse_gate(value: &Value, k: usize, n_qubits: usize) -> Result<GateSpec, SchemaError> {
    let base = format!("gates[{k}]");
    let obj = match value.as_object() {
        Some(o) => o,
        None => return fail(base, "expected a JSON object"),
    };
    let kind = match obj.get("type").and_then(Value::as_str) {
        Some(s) => s,
        None => {
            return fail(
                format!("{base}.type"),
                "missing or non-string gate type (\"named\" | \"rot\" | \"crot\")",
            )
        }
    };
    let allowed: &[&str] = match kind {
        "named" => &["type", "name", "target", "control"],
        "rot" => &["type", "axis", "phi", "target"],
        "crot" => &["type", "axis", "phi", "control", "target"],
        other => {
            return fail(
                format!("{base}.type"),
                format!("unknown gate type {other:?} (\"named\" | \"rot\" | \"crot\")"),
            )
        }
    };
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return fail(
                format!("{base}.{key}"),
                format!("field not allowed on a {kind:?} gate"),
            );
        }
    }
    // Every gate borrows the shared ancilla, wired one slot past the register.
    let ancilla = n_qubits;
    let target = index_field(obj, &base, "target", n_qubits)?;
    match kind {
        "named" => {
            let name = match obj.get("name").and_then(Value::as_str) {
                Some(s) => s,
                None => return fail(format!("{base}.name"), "missing or non-string gate name"),
            };
            let control = optional_index_field(obj, &base, "control", n_qubits)?;
            if control == Some(target) {
                return fail(format!("{base}.control"), "control and target must differ");
            }
            compile_named(name, None, None, control, target, ancilla).map_err(|e| SchemaError {
                path: format!("{base}.name"),
                message: e.to_string(),
            })
        }
        "rot" => {
            let axis = axis_field(obj, &base)?;
            let phi = number_field(obj, &base, "phi")?;
            GateSpec::rotation(axis, phi, target, ancilla).map_err(|e| SchemaError {
                path: base,
                message: e.to_string(),
            })
        }
        "crot" => {
            let axis = axis_field(obj, &base)?;
            let phi = number_field(obj, &base, "phi")?;
            let control = index_field(obj, &base, "control", n_qubits)?;
            if control == target {
                return fail(format!("{base}.control"), "control and target must differ");
            }
            GateSpec::controlled(axis, phi, control, target, ancilla).map_err(|e| SchemaError {
                path: base,
                message: e.to_string(),
            })
        }
        _ => unreachable!("gate type was filtered above"),
    }
}

fn index_field(
    obj: &Map<String, Value>,
    base: &str,
    field: &str,
    n_qubits: usize,
) -> Result<usize, SchemaError> {
    let path = format!("{base}.{field}");
    match obj.get(field) {
        None => fail(path, "missing required field"),
        Some(v) => match v.as_u64() {
            Some(i) if i < n_qubits as u64 => Ok(i as usize),
            Some(i) => fail(
                path,
                format!("qubit {i} is out of range for {n_qubits} qubits"),
            ),
            None => fail(path, "expected a qubit index (nonnegative integer)"),
        },
    }
}

fn optional_index_field(
    obj: &Map<String, Value>,
    base: &str,
    field: &str,
    n_qubits: usize,
) -> Result<Option<usize>, SchemaError> {
    if obj.get(field).is_none() {
        return Ok(None);
    }
    index_field(obj, base, field, n_qubits).map(Some)
}

fn number_field(obj: &Map<String, Value>, base: &str, field: &str) -> Result<f64, SchemaError> {
    let path = format!("{base}.{field}");
    match obj.get(field).and_then(Value::as_f64) {
        Some(x) if x.is_finite() => Ok(x),
        _ => fail(path, "expected a finite number"),
    }
}

fn axis_field(obj: &Map<String, Value>, base: &str) -> Result<BlochAxis, SchemaError> {
    let path = format!("{base}.axis");
    let value = match obj.get("axis") {
        Some(v) => v,
        None => return fail(path, "missing required field"),
    };
    match value {
        Value::String(s) => match s.as_str() {
            "x" | "X" => Ok(BlochAxis::X),
            "y" | "Y" => Ok(BlochAxis::Y),
            "z" | "Z" => Ok(BlochAxis::Z),
            other => fail(
                path,
                format!("unknown named axis {other:?} (use x | y | z or a 3-vector)"),
            ),
        },
        Value::Array(items) if items.len() == 3 => {
            let mut v = [0.0; 3];
            for (slot, item) in v.iter_mut().zip(items) {
                *slot = match item.as_f64() {
                    Some(x) if x.is_finite() => x,
                    _ => return fail(path.clone(), "axis components must be finite numbers"),
                };
            }
            crate::commands::axis_from_components(v)
                .map_err(|message| SchemaError { path, message })
        }
        _ => fail(
            path,
            "expected \"x\" | \"y\" | \"z\" or a 3-vector [fx, fy, fz]",
        ),
    }
}
