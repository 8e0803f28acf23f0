//! End-to-end tests of the `selquant` binary: exit codes, stable output,
//! and file-format round-trips, driven through real process/circuit/chain
//! files written into a temp directory.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use selquant_core::field::Field;
use selquant_core::io;
use selquant_core::suite;
use selquant_core::{Matrix, NumberField};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_selquant"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Write the halve-and-measure process at cutpoint `beta_num/beta_den`.
fn write_process(dir: &Path, name: &str, beta_num: i64, beta_den: i64) -> PathBuf {
    let field = NumberField::sqrt2();
    let (op, rho) = suite::hadamard_measure(&field).unwrap();
    let beta = field.from_rational(num_rational::BigRational::new(
        num_bigint::BigInt::from(beta_num),
        num_bigint::BigInt::from(beta_den),
    ));
    let path = dir.join(name);
    let v = io::process_to_json(&op, &rho, &beta);
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

fn q(n: i64, d: i64) -> num_rational::BigRational {
    num_rational::BigRational::new(num_bigint::BigInt::from(n), num_bigint::BigInt::from(d))
}

fn fair_chain_json(field: &Field) -> serde_json::Value {
    let h = field.from_rational(q(1, 2));
    let rows = vec![
        vec![field.zero(), field.zero(), field.zero()],
        vec![h.clone(), field.one(), field.zero()],
        vec![h, field.zero(), field.one()],
    ];
    let spec = selquant_core::MarkovSpec::new(Matrix::from_rows(rows).unwrap(), 0, 1, 2).unwrap();
    io::markov_to_json(&spec)
}

#[test]
fn decide_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let accept = write_process(dir.path(), "accept.json", 1, 2);
    let reject = write_process(dir.path(), "reject.json", 1, 1);

    let out = run(&["decide", accept.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("Accept"));

    let out = run(&["decide", reject.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("Reject"));

    // both routes agree on this instance and the exit code is unchanged
    let out = run(&["decide", accept.to_str().unwrap(), "--method", "both", "--diagnostics"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("witness"));
}

#[test]
fn decide_reports_json_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let accept = write_process(dir.path(), "accept.json", 1, 4);
    let out = run(&["decide", accept.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["verdict"], "Accept");
    // the witness is 1 − β = 3/4, as exact coefficient strings
    assert_eq!(v["witness"][0], "3/4");
}

#[test]
fn validate_passes_a_good_file_and_names_violations() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_process(dir.path(), "good.json", 1, 2);
    let out = run(&["validate", good.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("OK"));

    // double the state: trace becomes 2
    let text = std::fs::read_to_string(&good).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let field = NumberField::sqrt2();
    let (_, rho) = suite::hadamard_measure(&field).unwrap();
    let two = selquant_core::ComplexFieldElement::from_real(field.from_rational(q(2, 1)));
    v["rho"] = io::complex_matrix_to_json(&rho.matrix().scale(&two));
    let bad = dir.path().join("trace2.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("trace violation"), "stdout: {}", stdout(&out));

    // Hermitian unit-trace but indefinite state: diag(2, −1)
    let mut m = Matrix::zeros(2, 2, &selquant_core::ComplexFieldElement::zero(&field));
    m.set(0, 0, selquant_core::ComplexFieldElement::from_real(field.from_rational(q(2, 1))));
    m.set(1, 1, selquant_core::ComplexFieldElement::from_real(field.from_rational(q(-1, 1))));
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["rho"] = io::complex_matrix_to_json(&m);
    let bad = dir.path().join("psd.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("psd violation"), "stdout: {}", stdout(&out));
}

#[test]
fn malformed_files_exit_two_with_a_cause() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("broken.json");
    std::fs::write(&bad, "{\"field\": 17").unwrap();
    for cmd in ["validate", "decide", "simulate", "bounds"] {
        let out = run(&[cmd, bad.to_str().unwrap()]);
        assert_eq!(code(&out), 2, "{cmd} should fail");
        assert!(!stderr(&out).is_empty(), "{cmd} should explain");
    }
    let missing = dir.path().join("nope.json");
    let out = run(&["decide", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn simulate_prints_exact_truncations_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_process(dir.path(), "sim.json", 1, 2);
    let out = run(&["simulate", p.to_str().unwrap(), "--truncate", "6", "--diagnostics"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    // Σ_{t≤6} 2^{−(t+1)} = 127/128
    assert!(text.contains("127/128"), "stdout: {text}");
    assert!(text.contains("term 0"));

    let out = run(&["simulate", p.to_str().unwrap(), "--seed", "11"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("sampled trajectory:"));

    // identical seeds give identical trajectories
    let again = run(&["simulate", p.to_str().unwrap(), "--seed", "11"]);
    assert_eq!(stdout(&out), stdout(&again));
}

#[test]
fn markov_command_reports_absorption_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let field = NumberField::sqrt2();
    let path = dir.path().join("chain.json");
    std::fs::write(&path, serde_json::to_string(&fair_chain_json(&field)).unwrap()).unwrap();
    let out = run(&["markov", path.to_str().unwrap(), "--truncate", "8"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("absorption probability: 1/2"), "stdout: {text}");
    // the chain absorbs in one step, so the truncation is already exact
    assert!(text.contains("compiled-process truncation: 1/2"), "stdout: {text}");
}

#[test]
fn approx_marks_uncertified_runs() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_process(dir.path(), "ap.json", 1, 2);

    let certified = run(&["approx", p.to_str().unwrap(), "--diagnostics"]);
    assert_eq!(code(&certified), 0, "stderr: {}", stderr(&certified));
    assert!(!stdout(&certified).contains("uncertified"));

    // force a tiny approximant: still a verdict, but flagged
    let out = run(&["approx", p.to_str().unwrap(), "--nu", "8", "--diagnostics"]);
    assert!(stdout(&out).contains("uncertified"), "stdout: {}", stdout(&out));

    let out = run(&["approx", p.to_str().unwrap(), "--nu", "0"]);
    assert_eq!(code(&out), 2, "override of 0 violates the flag contract");
}

#[test]
fn bounds_reports_the_budget() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_process(dir.path(), "b.json", 1, 2);
    let out = run(&["bounds", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["mu"].as_u64().unwrap() >= 1);
    assert!(v["nu"].as_u64().unwrap() >= v["mu"].as_u64().unwrap());
    assert!(v["separation"].as_str().unwrap().contains('/'));
}

#[test]
fn circuit_compile_round_trips_through_decide() {
    let dir = tempfile::tempdir().unwrap();
    let field = NumberField::sqrt2();
    let h = selquant_core::GateSpec::preset(&field, "H").unwrap();
    let circuit = selquant_core::CircuitSpec::new(&field, 1, vec![(h, vec![1])], 1).unwrap();
    let cpath = dir.path().join("h.json");
    std::fs::write(&cpath, serde_json::to_string(&io::circuit_to_json(&circuit)).unwrap()).unwrap();

    let out = run(&["circuit", "accept-prob", cpath.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("1/2"));

    // compile at cutpoint 1/4, then decide the compiled file: 1/2 > 1/4
    let ppath = dir.path().join("h-process.json");
    let out = run(&[
        "circuit",
        "compile",
        cpath.to_str().unwrap(),
        "--beta",
        "1/4",
        "--out",
        ppath.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let out = run(&["decide", ppath.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("Accept"));

    // validate agrees the compiled file is a complete process
    let out = run(&["validate", ppath.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stdout: {}", stdout(&out));
}

#[test]
fn bench_rows_are_deterministic() {
    let a = run(&["bench", "--count", "2", "--seed", "3"]);
    assert_eq!(code(&a), 0, "stderr: {}", stderr(&a));
    let b = run(&["bench", "--count", "2", "--seed", "3"]);
    let strip = |s: &str| -> Vec<String> {
        // drop the timing columns (which legitimately vary run to run)
        s.lines()
            .map(|l| {
                l.split_whitespace()
                    .enumerate()
                    .filter(|(i, _)| ![4, 5, 6].contains(i))
                    .map(|(_, w)| w.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    };
    assert_eq!(strip(&stdout(&a)), strip(&stdout(&b)));
    assert_eq!(stdout(&a).lines().count(), 3, "header + 2 rows");
}

#[test]
fn bench_bit_sizes_scale_with_the_precision_override() {
    let low = run(&["bench", "--count", "1", "--seed", "3", "--nu", "2048"]);
    let high = run(&["bench", "--count", "1", "--seed", "3", "--nu", "4096"]);
    assert_eq!(code(&low), 0, "stderr: {}", stderr(&low));
    assert_eq!(code(&high), 0, "stderr: {}", stderr(&high));
    let v_bits = |s: &str| -> f64 {
        s.lines()
            .nth(1)
            .and_then(|l| l.split_whitespace().last())
            .and_then(|w| w.parse::<f64>().ok())
            .expect("v_bits column")
    };
    let ratio = v_bits(&stdout(&high)) / v_bits(&stdout(&low));
    assert!(
        (1.6..=2.4).contains(&ratio),
        "doubling the approximant precision should roughly double the integer sizes, got ×{ratio:.2}"
    );
}
