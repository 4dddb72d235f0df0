//! Acceptance gate, CLI half: criterion 10 lives here, next to the binary it
//! exercises. Criteria 1–9 run in the core crate's acceptance suite.

use std::process::{Command, Output};

/// Print the per-criterion verdict line, then enforce it.
fn report(number: u32, label: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {number:02} {label}: {verdict} — {detail}");
    assert!(pass, "criterion {number:02} {label}: FAIL — {detail}");
}

fn adigate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adigate"))
        .args(args)
        .output()
        .expect("binary launches")
}

/// Every artifact kind, rerun with identical flags (and seed, where one
/// applies), must come out byte-for-byte identical: nothing time-, machine-,
/// or iteration-order-dependent may leak into the output.
#[test]
fn criterion_10_artifacts_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().expect("tempdir");
    let bell = dir.path().join("bell.json");
    std::fs::write(
        &bell,
        r#"{
  "schema_version": "1",
  "n_qubits": 2,
  "gates": [
    {"type": "named", "name": "H", "target": 0},
    {"type": "named", "name": "CNOT", "control": 0, "target": 1}
  ]
}"#,
    )
    .expect("circuit file written");
    let bell = bell.to_str().expect("utf-8 path");

    let runs: &[(&str, Vec<&str>)] = &[
        (
            "gate JSON (with seeded noise)",
            vec![
                "gate",
                "NOT",
                "--runtime",
                "20",
                "--noise-strength",
                "0.05",
                "--trials",
                "40",
                "--seed",
                "3",
            ],
        ),
        (
            "sweep CSV",
            vec![
                "sweep",
                "NOT",
                "--theta-f",
                "1.5707963267948966",
                "--sweep",
                "20,40",
            ],
        ),
        (
            "trajectory CSV",
            vec!["trajectory", "H", "--runtime", "30", "--samples", "41"],
        ),
        ("circuit JSON", vec!["circuit", bell, "--runtime", "50"]),
    ];

    let mut all_identical = true;
    let mut details = Vec::new();
    for (label, args) in runs {
        let first = adigate(args);
        let second = adigate(args);
        let ok = first.status.success()
            && second.status.success()
            && !first.stdout.is_empty()
            && first.stdout == second.stdout;
        all_identical &= ok;
        details.push(format!(
            "{label}: {}",
            if ok { "identical" } else { "DIFFERS" }
        ));
    }
    report(
        10,
        "deterministic artifacts",
        all_identical,
        &details.join("; "),
    );
}
