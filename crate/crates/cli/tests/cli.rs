//! End-to-end tests driving the compiled binary through its public
//! interface: files in, JSON report out, exit codes as documented.

use std::path::Path;
use std::process::{Command, Output};

use qichan::channels::Channel;
use qichan::telepo::{HadamardSet, LatinSquare};

fn qichan_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qichan"))
}

fn run(args: &[&str]) -> Output {
    qichan_bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn result_value<'a>(rpt: &'a serde_json::Value, name: &str) -> &'a serde_json::Value {
    rpt["results"]
        .as_array()
        .expect("results array")
        .iter()
        .find(|e| e["name"] == name)
        .unwrap_or_else(|| panic!("no result named {name}"))
        .get("value")
        .expect("value field")
}

fn result_num(rpt: &serde_json::Value, name: &str) -> f64 {
    result_value(rpt, name).as_f64().expect("numeric value")
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) {
    std::fs::write(path, serde_json::to_string(value).unwrap()).unwrap();
}

fn identity_channel_file(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("id2.json");
    write_json(&path, &Channel::identity(2));
    path
}

#[test]
fn scheme_build_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pauli.json");
    let built = run(&[
        "scheme",
        "build",
        "--dim",
        "2",
        "--construction",
        "pauli",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(built.status.success(), "{built:?}");
    let rpt = report(&built);
    assert!(result_num(&rpt, "teleportation_residual") < 1e-9);
    assert!(result_num(&rpt, "dense_coding_residual") < 1e-9);

    let verified = run(&["scheme", "verify", "--in", out.to_str().unwrap()]);
    assert!(verified.status.success());
    let rpt = report(&verified);
    assert_eq!(result_value(&rpt, "ok"), &serde_json::json!(true));
    assert!(result_num(&rpt, "invariant_residual") < 1e-9);
}

#[test]
fn corrupted_scheme_fails_until_the_tolerance_is_loosened() {
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("clean.json");
    run(&[
        "scheme",
        "build",
        "--dim",
        "2",
        "--construction",
        "pauli",
        "--out",
        clean.to_str().unwrap(),
    ]);
    let mut scheme: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&clean).unwrap()).unwrap();
    let dup = scheme["unitaries"][1].clone();
    scheme["unitaries"][2] = dup;
    let broken = dir.path().join("broken.json");
    write_json(&broken, &scheme);

    let strict = run(&["scheme", "verify", "--in", broken.to_str().unwrap()]);
    assert_eq!(strict.status.code(), Some(1));
    let rpt = report(&strict);
    assert_eq!(result_value(&rpt, "ok"), &serde_json::json!(false));
    assert!(result_num(&rpt, "dense_coding_residual") > 1e-2);

    let loose = qichan_bin()
        .args(["scheme", "verify", "--in", broken.to_str().unwrap()])
        .env("QICHAN_TOL", "10")
        .output()
        .unwrap();
    assert!(loose.status.success());
}

#[test]
fn design_construction_reads_latin_and_hadamard_files() {
    let dir = tempfile::tempdir().unwrap();
    let latin = dir.path().join("latin.json");
    let hadamard = dir.path().join("hadamard.json");
    write_json(&latin, &LatinSquare::cyclic(3));
    write_json(&hadamard, &HadamardSet::fourier(3).unwrap());
    let out = dir.path().join("design.json");
    let built = run(&[
        "scheme",
        "build",
        "--dim",
        "3",
        "--construction",
        "design",
        "--latin",
        latin.to_str().unwrap(),
        "--hadamard",
        hadamard.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(built.status.success(), "{built:?}");
    assert!(result_num(&report(&built), "teleportation_residual") < 1e-9);

    let mismatched = run(&[
        "scheme",
        "build",
        "--dim",
        "4",
        "--construction",
        "design",
        "--latin",
        latin.to_str().unwrap(),
        "--hadamard",
        hadamard.to_str().unwrap(),
        "--out",
        dir.path().join("no.json").to_str().unwrap(),
    ]);
    assert_eq!(mismatched.status.code(), Some(2));
}

#[test]
fn check_cp_flags_the_transpose_witness_and_passes_channels() {
    let dir = tempfile::tempdir().unwrap();
    let d = 2usize;
    let mut swap = qichan::ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            swap.set(i * d + j, j * d + i, qichan::cr(1.0 / d as f64));
        }
    }
    let choi = dir.path().join("transpose.json");
    write_json(
        &choi,
        &serde_json::json!({"choi": swap, "in_dim": d}),
    );
    let bad = run(&["channel", "check-cp", "--in", choi.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    let rpt = report(&bad);
    assert_eq!(result_value(&rpt, "cp"), &serde_json::json!(false));
    assert!((result_num(&rpt, "min_eigenvalue") + 0.5).abs() < 1e-9);

    let good = run(&[
        "channel",
        "check-cp",
        "--in",
        identity_channel_file(dir.path()).to_str().unwrap(),
    ]);
    assert!(good.status.success());
    assert_eq!(result_value(&report(&good), "cp"), &serde_json::json!(true));
}

#[test]
fn representation_commands_agree_on_the_identity_channel() {
    let dir = tempfile::tempdir().unwrap();
    let ch = identity_channel_file(dir.path());

    let stine = run(&["channel", "stinespring", "--in", ch.to_str().unwrap()]);
    assert!(stine.status.success());
    let rpt = report(&stine);
    assert_eq!(result_value(&rpt, "dilation_dim"), &serde_json::json!(1));
    assert_eq!(result_value(&rpt, "minimal"), &serde_json::json!(true));
    assert!(result_num(&rpt, "action_residual") < 1e-9);

    let choi = run(&["channel", "choi", "--in", ch.to_str().unwrap()]);
    assert!(choi.status.success());
    let rpt = report(&choi);
    assert_eq!(result_value(&rpt, "choi_rank"), &serde_json::json!(1));
    assert!(result_num(&rpt, "roundtrip_residual") < 1e-9);
}

#[test]
fn radon_nikodym_reports_weights_and_completeness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("instrument.json");
    let unit = |i: usize| qichan::ComplexMatrix::matrix_unit(2, i, i);
    write_json(
        &path,
        &serde_json::json!({
            "outcomes": ["up", "down"],
            "parts": [[unit(0)], [unit(1)]],
        }),
    );
    let out = run(&["channel", "radon-nikodym", "--in", path.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let rpt = report(&out);
    assert!((result_num(&rpt, "weight[up]") - 0.5).abs() < 1e-12);
    assert!((result_num(&rpt, "weight[down]") - 0.5).abs() < 1e-12);
    assert!(result_num(&rpt, "completeness_deviation") < 1e-12);
}

#[test]
fn optimizer_commands_recover_known_values() {
    let dir = tempfile::tempdir().unwrap();
    let ch = identity_channel_file(dir.path());

    let holevo = run(&[
        "channel", "holevo", "--in", ch.to_str().unwrap(), "--seed", "7", "--restarts", "8",
    ]);
    assert!(holevo.status.success());
    let rpt = report(&holevo);
    assert!((result_num(&rpt, "classical_capacity_one_shot") - 1.0).abs() < 1e-3);
    assert_eq!(rpt["seed"], serde_json::json!(7));

    let cb = run(&["channel", "cbnorm", "--in", ch.to_str().unwrap(), "--restarts", "4"]);
    assert!(cb.status.success());
    assert!((result_num(&report(&cb), "cb_norm") - 1.0).abs() < 1e-6);

    let classical = dir.path().join("classical.json");
    write_json(
        &classical,
        &Channel::embed_classical(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
    );
    let tb = run(&["channel", "transpose-bound", "--in", classical.to_str().unwrap()]);
    assert!(tb.status.success());
    let rpt = report(&tb);
    assert_eq!(result_num(&rpt, "transpose_bound"), 0.0);
    assert_eq!(result_value(&rpt, "cp_shortcut"), &serde_json::json!(true));

    let fid = run(&[
        "channel", "fidelity", "--in", ch.to_str().unwrap(), "--restarts", "4",
    ]);
    assert!(fid.status.success());
    let rpt = report(&fid);
    assert!((result_num(&rpt, "fidelity_worst") - 1.0).abs() < 1e-6);
    let entry = rpt["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["name"] == "fidelity_offdiag")
        .unwrap();
    assert_eq!(entry["convention"], serde_json::json!("infimum"));
}

#[test]
fn chsh_reports_the_quantum_maximum_at_standard_angles() {
    let std_run = run(&["bell", "chsh", "--singlet", "--standard-angles"]);
    assert!(std_run.status.success());
    let beta = result_num(&report(&std_run), "beta");
    assert!((beta - 2.0 * 2f64.sqrt()).abs() < 1e-7);

    let explicit = run(&[
        "bell", "chsh", "--singlet", "--angles", "45", "0", "22.5", "67.5",
    ]);
    assert!(explicit.status.success());
    assert!((result_num(&report(&explicit), "beta") - beta).abs() < 1e-12);

    let conflicting = run(&[
        "bell", "chsh", "--singlet", "--standard-angles", "--angles", "1", "2", "3", "4",
    ]);
    assert_eq!(conflicting.status.code(), Some(2));

    let missing = run(&["bell", "chsh", "--standard-angles"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn classical_max_is_exactly_two() {
    let out = run(&["bell", "classical-max"]);
    assert!(out.status.success());
    assert_eq!(result_num(&report(&out), "classical_max"), 2.0);
}

#[test]
fn telephone_scores_tables_and_rejects_malformed_ones() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("uniform.json");
    let mut rows = Vec::new();
    for i in [1i64, 2] {
        for a in [-1i64, 1] {
            for b1 in [-1i64, 1] {
                for b2 in [-1i64, 1] {
                    rows.push(serde_json::json!([i, a, b1, b2, 0.125]));
                }
            }
        }
    }
    write_json(&path, &serde_json::json!({ "p": rows }));
    let out = run(&["bell", "telephone", "--dist", path.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let rpt = report(&out);
    assert_eq!(result_num(&rpt, "p_ok"), 0.5);
    assert_eq!(
        result_value(&rpt, "inequality_holds"),
        &serde_json::json!(true)
    );

    let bad = dir.path().join("bad.json");
    write_json(
        &bad,
        &serde_json::json!({"p": [[3, 1, 1, 1, 1.0]]}),
    );
    let rejected = run(&["bell", "telephone", "--dist", bad.to_str().unwrap()]);
    assert_eq!(rejected.status.code(), Some(2));
}

#[test]
fn stdout_is_byte_identical_across_runs_and_timing_stays_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let ch = identity_channel_file(dir.path());
    let args = [
        "channel", "holevo", "--in", ch.to_str().unwrap(), "--seed", "7", "--restarts", "8",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    assert!(first.stdout.iter().filter(|&&b| b == b'\n').count() == 1);
    let err = String::from_utf8(first.stderr).unwrap();
    assert!(err.contains("elapsed_ms="), "{err}");
}

#[test]
fn pretty_output_carries_the_same_report() {
    let compact = run(&["bell", "classical-max"]);
    let pretty = run(&["bell", "classical-max", "--pretty"]);
    assert!(pretty.status.success());
    assert!(pretty.stdout.len() > compact.stdout.len());
    assert_eq!(report(&compact), report(&pretty));
}
