//! End-to-end tests of the command-line interface: exit codes, report
//! formats, file outputs, and the gen -> check -> synth -> verify pipeline.

use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

/// Fresh per-test scratch directory under the target temp dir.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("decsynth-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_env(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_decsynth"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Output {
        code: out.status.code().expect("no signal"),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn path_arg(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn check_accepts_strict_and_relaxed_models() {
    let strict = run(&["check", path_arg(&fixture("strict_form.dcp"))]);
    assert_eq!(strict.code, 0, "{}", strict.stderr);
    assert!(strict.stdout.contains("CNMS: satisfied"), "{}", strict.stdout);
    assert!(strict.stdout.contains("RCNMS: satisfied"), "{}", strict.stdout);

    let relaxed = run(&["check", path_arg(&fixture("self_reference.dcp"))]);
    assert_eq!(relaxed.code, 0, "the relaxed check passing means exit 0");
    assert!(relaxed.stdout.contains("CNMS: violated"), "{}", relaxed.stdout);
    assert!(relaxed.stdout.contains("RCNMS: satisfied"), "{}", relaxed.stdout);

    let six = run(&["check", path_arg(&fixture("twin_cycles.dcp"))]);
    assert_eq!(six.code, 0);
    assert!(six.stdout.contains("CNMS: violated"));
    assert!(six.stdout.contains("RCNMS: satisfied"));
}

#[test]
fn check_fails_on_relaxed_violation() {
    let out = run(&["check", path_arg(&fixture("fuzz/weird_but_valid.dcp"))]);
    assert_eq!(out.code, 2, "constant atoms violate the relaxed check");
    assert!(out.stdout.contains("RCNMS: violated"), "{}", out.stdout);
    assert!(out.stdout.contains("P3d"), "{}", out.stdout);
}

#[test]
fn parse_errors_exit_1_with_diagnostics() {
    let garbage = run(&["check", path_arg(&fixture("fuzz/garbage.dcp"))]);
    assert_eq!(garbage.code, 1);
    assert!(garbage.stderr.contains("error["), "{}", garbage.stderr);

    let block = run(&["check", path_arg(&fixture("fuzz/requirement_block.dcp"))]);
    assert_eq!(block.code, 1);
    assert!(block.stderr.contains("E-REQ-AUT"), "{}", block.stderr);

    let missing = run(&["check", "/nonexistent/model.dcp"]);
    assert_eq!(missing.code, 1);
    assert!(missing.stderr.contains("error"), "{}", missing.stderr);
}

#[test]
fn check_json_documents_are_well_formed() {
    let ok = run(&["check", path_arg(&fixture("strict_form.dcp")), "--format", "json"]);
    assert_eq!(ok.code, 0);
    let doc: serde_json::Value = serde_json::from_str(&ok.stdout).expect("valid json");
    assert_eq!(doc["cnms"]["satisfied"], true);
    assert_eq!(doc["rcnms"]["satisfied"], true);
    assert!(doc["diagnostics"].as_array().is_some());

    let bad = run(&["check", path_arg(&fixture("fuzz/garbage.dcp")), "--format", "json"]);
    assert_eq!(bad.code, 1);
    let doc: serde_json::Value = serde_json::from_str(&bad.stdout).expect("valid json on failure");
    assert!(
        !doc["diagnostics"].as_array().expect("diagnostics array").is_empty(),
        "{}",
        bad.stdout
    );
}

#[test]
fn graph_emits_dot_to_stdout_and_file() {
    let out = run(&["graph", path_arg(&fixture("twin_cycles.dcp"))]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("digraph"), "{}", out.stdout);
    assert!(out.stdout.contains("P1"), "{}", out.stdout);
    assert!(out.stdout.contains("->"), "{}", out.stdout);
    assert!(out.stdout.contains("R1"), "edges are labeled by requirement id");

    let dir = scratch("dot");
    let dot_file = dir.join("graph.dot");
    let filed = run(&["graph", path_arg(&fixture("twin_cycles.dcp")), "--dot", path_arg(&dot_file)]);
    assert_eq!(filed.code, 0);
    let contents = std::fs::read_to_string(&dot_file).expect("dot file written");
    assert!(contents.contains("digraph"));
}

#[test]
fn reduce_reports_skip_and_sectionalize() {
    let skip = run(&["reduce", path_arg(&fixture("acyclic_chain.dcp"))]);
    assert_eq!(skip.code, 0);
    assert!(skip.stdout.contains("verdict: SkipByAcyclic"), "{}", skip.stdout);
    assert!(skip.stdout.contains("residual: P1 P2 P3 P4 P5"), "{}", skip.stdout);
    assert!(skip.stdout.contains("no synthesis necessary"), "{}", skip.stdout);

    let production_line = run(&["reduce", path_arg(&fixture("production_line.dcp")), "--format", "json"]);
    assert_eq!(production_line.code, 0);
    let doc: serde_json::Value = serde_json::from_str(&production_line.stdout).expect("valid json");
    assert_eq!(doc["verdict"], "Sectionalize");
    assert_eq!(doc["classes"].as_array().expect("classes").len(), 5);
    assert_eq!(doc["reduction"]["plants_total"], 16);
    assert_eq!(doc["reduction"]["plants_retained"], 14);

    // Identical invocations produce identical bytes.
    let again = run(&["reduce", path_arg(&fixture("production_line.dcp")), "--format", "json"]);
    assert_eq!(production_line.stdout, again.stdout);
}

#[test]
fn synth_writes_supervisor_files_that_verify_cleanly() {
    let dir = scratch("production_line");
    let synth = run(&[
        "synth",
        path_arg(&fixture("production_line.dcp")),
        "--out",
        path_arg(&dir),
    ]);
    assert_eq!(synth.code, 0, "{}", synth.stderr);
    let mut sup_args: Vec<String> = Vec::new();
    for i in 1..=5 {
        let path = dir.join(format!("S{i}.dcp"));
        assert!(path.exists(), "supervisor file S{i}.dcp must be written");
        sup_args.push(path_arg(&path).to_string());
    }
    let s1 = std::fs::read_to_string(dir.join("S1.dcp")).expect("readable");
    assert!(s1.contains("// supervisor S1"), "{s1}");
    assert!(s1.contains("plant S1"), "{s1}");

    let input = fixture("production_line.dcp");
    let mut args = vec!["verify", path_arg(&input)];
    args.extend(sup_args.iter().map(|s| s.as_str()));
    let verify = run(&args);
    assert_eq!(verify.code, 0, "{}{}", verify.stdout, verify.stderr);
    assert!(verify.stdout.contains("safe: true"));
    assert!(verify.stdout.contains("controllable: true"));
    assert!(verify.stdout.contains("nonblocking: true"));
    assert!(verify.stdout.contains("nonconflicting: true"));
}

#[test]
fn synth_deterministic_json_is_byte_identical() {
    let dir = scratch("det");
    let input = fixture("twin_cycles.dcp");
    let args = [
        "synth",
        path_arg(&input),
        "--out",
        path_arg(&dir),
        "--format",
        "json",
        "--deterministic",
    ];
    let first = run(&args);
    assert_eq!(first.code, 0, "{}", first.stderr);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout, "deterministic runs must match byte for byte");
    let doc: serde_json::Value = serde_json::from_str(&first.stdout).expect("valid json");
    assert_eq!(doc["results"][0]["duration_ms"], 0.0);
}

#[test]
fn verify_prints_replayable_witness_for_blocking_problem() {
    let out = run(&["verify", path_arg(&fixture("mutual_pair_blocking.dcp"))]);
    assert_eq!(out.code, 2, "a failed property exits 2");
    assert!(out.stdout.contains("nonblocking: false"), "{}", out.stdout);
    assert!(out.stdout.contains("witness [nonblocking]"), "{}", out.stdout);
    assert!(out.stdout.contains("(q1,q3) -a-> (q2,q3)"), "{}", out.stdout);

    let json = run(&["verify", path_arg(&fixture("mutual_pair_blocking.dcp")), "--format", "json"]);
    assert_eq!(json.code, 2);
    let doc: serde_json::Value = serde_json::from_str(&json.stdout).expect("valid json");
    assert_eq!(doc["verdict"]["nonblocking"], false);
    assert_eq!(doc["verdict"]["witnesses"][0]["property"], "nonblocking");
}

#[test]
fn verify_maximality_flag_checks_the_supremum() {
    let out = run(&["verify", path_arg(&fixture("mutual_pair_nonblocking.dcp")), "--maximality"]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("maximally permissive: true"), "{}", out.stdout);

    let unchecked = run(&["verify", path_arg(&fixture("mutual_pair_nonblocking.dcp"))]);
    assert!(unchecked.stdout.contains("maximally permissive: (not checked)"));
}

#[test]
fn unsynthesizable_problems_yield_distinct_exit_codes() {
    // Relaxed check fails: the reduction does not apply.
    let dir = scratch("na");
    let na = dir.join("na.dcp");
    std::fs::write(
        &na,
        "plant S {\n  states x y\n  initial x\n  uncontrollable u v\n  trans x - u -> y\n  trans y - v -> x\n}\nrequirement R1: u needs S.x\n",
    )
    .expect("write temp model");
    let synth = run(&["synth", path_arg(&na)]);
    assert_eq!(synth.code, 3);
    assert!(synth.stderr.contains("P3b"), "{}", synth.stderr);
    assert!(synth.stderr.contains("fall back to monolithic synthesis"), "{}", synth.stderr);
    let reduce = run(&["reduce", path_arg(&na)]);
    assert_eq!(reduce.code, 3);

    // No supervisor exists.
    let empty = run(&["synth", path_arg(&fixture("empty_supervisor.dcp")), "--out", path_arg(&dir)]);
    assert_eq!(empty.code, 4);
    assert!(empty.stderr.contains("no controllable nonblocking supervisor"), "{}", empty.stderr);

    // State-space bound exceeded, via flag and via environment variable.
    let bounded = run(&["synth", path_arg(&fixture("twin_cycles.dcp")), "--bound", "4", "--out", path_arg(&dir)]);
    assert_eq!(bounded.code, 5);
    assert!(bounded.stderr.contains("bound of 4"), "{}", bounded.stderr);
    let env_bounded = run_env(
        &["synth", path_arg(&fixture("twin_cycles.dcp")), "--out", path_arg(&dir)],
        &[("DECSYNTH_BOUND", "4")],
    );
    assert_eq!(env_bounded.code, 5);
}

#[test]
fn generated_instances_round_trip_through_check() {
    let dir = scratch("gen");
    let cases: &[(&str, &[&str], &str)] = &[
        ("cnms", &["--seed", "7", "--plants", "4", "--requirements", "2"], "CNMS: satisfied"),
        ("acyclic", &["--seed", "5", "--plants", "4", "--requirements", "2"], "RCNMS: satisfied"),
        ("cyclic", &["--seed", "3", "--pairs", "2", "--context", "1"], "RCNMS: satisfied"),
    ];
    for (shape, args, expect) in cases {
        let mut full = vec!["gen", *shape];
        full.extend_from_slice(args);
        let gen = run(&full);
        assert_eq!(gen.code, 0, "{}", gen.stderr);
        let path = dir.join(format!("{shape}.dcp"));
        std::fs::write(&path, &gen.stdout).expect("write generated model");
        let check = run(&["check", path_arg(&path)]);
        assert_eq!(check.code, 0, "gen {shape}: {}{}", check.stdout, check.stderr);
        assert!(check.stdout.contains(expect), "gen {shape}: {}", check.stdout);
    }
}

#[test]
fn synthesized_supervisor_file_verifies_against_its_problem() {
    let dir = scratch("twin_cycles");
    let synth = run(&["synth", path_arg(&fixture("twin_cycles.dcp")), "--out", path_arg(&dir)]);
    assert_eq!(synth.code, 0, "{}", synth.stderr);
    let s1 = dir.join("S1.dcp");
    let verify = run(&["verify", path_arg(&fixture("twin_cycles.dcp")), path_arg(&s1), "--maximality"]);
    assert_eq!(verify.code, 0, "{}{}", verify.stdout, verify.stderr);
    assert!(verify.stdout.contains("maximally permissive: true"), "{}", verify.stdout);
}

#[test]
fn verify_rejects_supervisor_files_with_requirements() {
    let dir = scratch("badsup");
    let bad = dir.join("bad.dcp");
    std::fs::write(
        &bad,
        "plant S {\n  states x\n  initial x\n  controllable e\n  trans x - e -> x\n}\nrequirement R1: e needs S.x\n",
    )
    .expect("write temp supervisor");
    let out = run(&["verify", path_arg(&fixture("self_reference.dcp")), path_arg(&bad)]);
    assert_eq!(out.code, 1, "{}{}", out.stdout, out.stderr);
}
