//! End-to-end tests of the `cmcomm` binary: exit codes, exact text output
//! for the documented examples, and JSON output validated against the
//! schemas shipped in `schemas/`.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

use cmcomm::{DayChain, Partition};

fn manifest(parts: &[&str]) -> PathBuf {
    let mut path = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    path.extend(parts);
    path
}

fn algebra_file(name: &str) -> String {
    manifest(&["fixtures", "algebras", &format!("{}.json", name)])
        .to_str()
        .unwrap()
        .to_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmcomm"))
        .args(args)
        .env_remove("CMCOMM_CAP")
        .output()
        .unwrap()
}

fn run_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmcomm"))
        .args(args)
        .env(key, value)
        .output()
        .unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no exit code")
}

fn compiled_schema(name: &str) -> JSONSchema {
    let path = manifest(&["schemas", &format!("{}.schema.json", name)]);
    let text = fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing schema {}: {}", path.display(), e));
    let value: Value = serde_json::from_str(&text).unwrap();
    JSONSchema::compile(&value).unwrap_or_else(|e| panic!("schema {} invalid: {}", name, e))
}

/// Parses `text` as JSON and validates it against the named shipped schema.
fn validated(schema_name: &str, text: &str) -> Value {
    let value: Value = serde_json::from_str(text)
        .unwrap_or_else(|e| panic!("output is not JSON ({}): {}", e, text));
    let schema = compiled_schema(schema_name);
    if let Err(errors) = schema.validate(&value) {
        let messages: Vec<String> = errors.map(|e| e.to_string()).collect();
        panic!("schema {} violated: {}", schema_name, messages.join("; "));
    }
    value
}

#[test]
fn documented_examples_print_exactly_the_promised_text() {
    let output = run(&[
        "comm",
        "--algebra",
        &algebra_file("z4ring"),
        "--congs",
        "|0 1 2 3|",
        "|0 2|1 3|",
    ]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    assert_eq!(stdout(&output), "|0 2|1 3|\n");

    let output = run(&["dayterms", "--algebra", &algebra_file("semilattice2")]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    assert_eq!(stdout(&output), "none (variety not congruence modular)\n");
}

#[test]
fn invalid_input_exits_2_with_a_reason() {
    // A partition that is no congruence: the violated operation is named.
    let output = run(&["comm", "--algebra", "z4", "--congs", "|0 1|2|3|"]);
    assert_eq!(code(&output), 2);
    let err = stderr(&output);
    assert!(err.contains("not a congruence"), "stderr: {}", err);
    assert!(err.contains("`+`"), "stderr: {}", err);

    // Malformed block syntax: the byte position is reported.
    let output = run(&["comm", "--algebra", "z4", "--congs", "|0 1"]);
    assert_eq!(code(&output), 2);
    assert!(stderr(&output).contains("at byte"), "stderr: {}", stderr(&output));

    // A lattice index out of range.
    let output = run(&["comm", "--algebra", "z4", "--congs", "7", "1"]);
    assert_eq!(code(&output), 2);

    // An unreadable algebra argument (neither a file nor a corpus name).
    let output = run(&["con", "--algebra", "no-such-algebra"]);
    assert_eq!(code(&output), 2);

    // Garbage in the capacity environment variable.
    let output = run_with_env(
        &["comm", "--algebra", "z4", "--congs", "1", "1"],
        "CMCOMM_CAP",
        "lots",
    );
    assert_eq!(code(&output), 2);
    assert!(stderr(&output).contains("CMCOMM_CAP"), "stderr: {}", stderr(&output));

    // Missing required arguments are a usage error, also 2 (clap's default).
    let output = run(&["comm", "--algebra", "z4"]);
    assert_eq!(code(&output), 2);
}

#[test]
fn capacity_failures_exit_3_and_the_flag_overrides_the_environment() {
    let theta = ["|0 2|1 3|", "|0 2|1 3|"];
    let output = run(&[
        "comm", "--algebra", "z4", "--congs", theta[0], theta[1], "--cap", "2",
    ]);
    assert_eq!(code(&output), 3);
    assert!(stderr(&output).contains("capacity"), "stderr: {}", stderr(&output));

    let output = run_with_env(
        &["comm", "--algebra", "z4", "--congs", theta[0], theta[1]],
        "CMCOMM_CAP",
        "2",
    );
    assert_eq!(code(&output), 3);

    let output = run_with_env(
        &["comm", "--algebra", "z4", "--congs", theta[0], theta[1], "--cap", "64"],
        "CMCOMM_CAP",
        "2",
    );
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    assert_eq!(stdout(&output), "|0|1|2|3|\n");
}

#[test]
fn a_supplied_chain_that_fails_verification_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.chain.json");
    fs::write(&path, "[\"x\", \"y\", \"u\"]\n").unwrap();
    let output = run(&["dayterms", "--algebra", "z4", "--chain", path.to_str().unwrap()]);
    assert_eq!(code(&output), 1);
    assert!(stderr(&output).contains("identity"), "stderr: {}", stderr(&output));
}

#[test]
fn check_exits_0_on_a_clean_sweep() {
    let output = run(&["check", "--algebra", "z2", "--k", "2"]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("result: 0 failures"));
}

#[test]
fn json_outputs_validate_against_the_shipped_schemas() {
    let z4ring = algebra_file("z4ring");

    let output = run(&["con", "--algebra", &z4ring, "--json"]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let report = validated("con", &stdout(&output));
    assert_eq!(report["congruences"].as_array().unwrap().len(), 3);
    assert_eq!(report["modular"], Value::Bool(true));

    let output = run(&[
        "comm", "--algebra", &z4ring, "--congs", "2", "1", "--json",
    ]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let report = validated("comm", &stdout(&output));
    assert_eq!(report["commutator"], Value::String("|0 2|1 3|".into()));
    assert_eq!(report["pivot"], Value::from(1));

    let output = run(&[
        "ttcomm", "--algebra", "z4", "--congs", "|0 2|1 3|", "|0 2|1 3|", "--json",
    ]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let report = validated("ttcomm", &stdout(&output));
    assert_eq!(report["commutator"], Value::String("|0|1|2|3|".into()));

    let output = run(&["dayterms", "--algebra", "z4", "--json"]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let report = validated("dayterms", &stdout(&output));
    assert_eq!(report["mode"], Value::String("search".into()));
    assert!(report["chain"].is_array());

    let output = run(&["dayterms", "--algebra", &algebra_file("semilattice2"), "--json"]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let report = validated("dayterms", &stdout(&output));
    assert!(report["chain"].is_null());
    assert_eq!(report["complete"], Value::Bool(true));

    let malcev = manifest(&["fixtures", "chains", "z4-malcev.chain.json"]);
    let output = run(&[
        "dayterms", "--algebra", "z4", "--chain", malcev.to_str().unwrap(), "--json",
    ]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let report = validated("dayterms", &stdout(&output));
    assert_eq!(report["mode"], Value::String("verify".into()));

    let output = run(&["gens", "--algebra", &z4ring, "--congs", "2", "2", "--json"]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let report = validated("gens", &stdout(&output));
    assert_eq!(report["agreement"], Value::Bool(true));

    let output = run(&["check", "--algebra", "z2", "--k", "2", "--json"]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    validated("check", &stdout(&output));

    let output = run(&["matrices", "--algebra", "z4", "--congs", "1", "1", "--json"]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let report = validated("matrices", &stdout(&output));
    assert_eq!(report["dimension"], Value::from(2));
}

#[test]
fn the_shipped_fixture_files_validate_against_the_input_schemas() {
    let algebra_schema = compiled_schema("algebra");
    for entry in fs::read_dir(manifest(&["fixtures", "algebras"])).unwrap() {
        let path = entry.unwrap().path();
        let value: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert!(
            algebra_schema.is_valid(&value),
            "fixture {} violates the algebra schema",
            path.display()
        );
    }
    let chain_schema = compiled_schema("chain");
    for entry in fs::read_dir(manifest(&["fixtures", "chains"])).unwrap() {
        let path = entry.unwrap().path();
        let value: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert!(
            chain_schema.is_valid(&value),
            "fixture {} violates the chain schema",
            path.display()
        );
    }
}

/// Every partition string the binary prints parses back to the same
/// partition, and the `blocks` field is its block decomposition.
#[test]
fn printed_partitions_round_trip_through_the_parser() {
    for name in ["trivial", "z2", "z3", "z4", "z2z2", "s3", "z4ring", "semilattice2"] {
        let output = run(&["con", "--algebra", &algebra_file(name), "--json"]);
        assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
        let report: Value = serde_json::from_str(&stdout(&output)).unwrap();
        let size = report["size"].as_u64().unwrap() as usize;
        for cong in report["congruences"].as_array().unwrap() {
            let text = cong["partition"].as_str().unwrap();
            let parsed = Partition::parse(text, size).unwrap();
            assert_eq!(parsed.to_string(), text);
            let blocks: Vec<Vec<usize>> =
                serde_json::from_value(cong["blocks"].clone()).unwrap();
            assert_eq!(parsed.blocks(), blocks);
        }
    }
}

#[test]
fn dayterms_writes_the_found_chain_to_the_requested_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z4.chain.json");

    // First run: the path does not exist yet, so the search runs and the
    // found chain is written there.
    let output = run(&["dayterms", "--algebra", "z4", "--chain", path.to_str().unwrap()]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let chain = DayChain::load(&path).unwrap();
    assert!(chain.links() >= 1);

    // Second run: the path exists, so it is verified instead.
    let output = run(&["dayterms", "--algebra", "z4", "--chain", path.to_str().unwrap()]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    assert_eq!(stdout(&output), format!("verified: {} links\n", chain.links()));
}

#[test]
fn lattice_indices_and_block_syntax_name_the_same_congruences() {
    let by_index = run(&["comm", "--algebra", &algebra_file("z4ring"), "--congs", "2", "1"]);
    let by_blocks = run(&[
        "comm",
        "--algebra",
        &algebra_file("z4ring"),
        "--congs",
        "|0 1 2 3|",
        "|0 2|1 3|",
    ]);
    assert_eq!(code(&by_index), 0);
    assert_eq!(stdout(&by_index), stdout(&by_blocks));
}

#[test]
fn close_generates_congruences_from_arbitrary_partitions() {
    let strict = run(&["comm", "--algebra", "z4ring", "--congs", "|0 1|2 3|", "1"]);
    assert_eq!(code(&strict), 2);

    let closed = run(&["comm", "--algebra", "z4ring", "--congs", "|0 1|2 3|", "1", "--close"]);
    assert_eq!(code(&closed), 0, "stderr: {}", stderr(&closed));
    // Closing 0~1, 2~3 under the ring translations yields the full
    // congruence, so this computes [1, th] = th on the Z4 ring.
    assert_eq!(stdout(&closed), "|0 2|1 3|\n");
}
