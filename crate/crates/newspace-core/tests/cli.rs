//! End-to-end tests of the `newspace` binary: exit codes, report formats,
//! cache lifecycle and byte determinism.

use std::path::Path;
use std::process::{Command, Output};

fn newspace(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_newspace"));
    cmd.args(args);
    cmd.env_remove("NEWSPACE_CACHE_DIR");
    cmd.env_remove("NEWSPACE_FORMAT");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn local_verify_passes_and_reports_json() {
    let out = newspace(&["local", "--p", "3", "--n", "2", "verify"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["schema"], "newspace.report/1");
    assert!(parsed["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn local_rejects_composite_prime_with_exit_two() {
    let out = newspace(&["local", "--p", "4", "--n", "1", "verify"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("prime"));
}

#[test]
fn local_table_csv() {
    let out = newspace(&["local", "--p", "2", "--n", "2", "table", "--format", "csv"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("vector,"));
    assert!(text.contains("v_1,1 1 1,4,2,1,true"));
}

#[test]
fn check_theorem_one_at_33() {
    let out = newspace(
        &["check", "--level", "33", "--weight", "2", "--theorem", "T1", "--format", "text"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("PASS T1.newspace-eq dims=(2, 2)"));
}

#[test]
fn check_rejects_shape_mismatch_with_exit_two() {
    let out = newspace(&["check", "--level", "14", "--weight", "2", "--theorem", "T5"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_auto_runs_applicable_theorems_at_20() {
    let out = newspace(&["check", "--level", "20", "--theorem", "auto"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for id in ["T2.newspace-eq", "T2prime.newspace-eq", "T3.newspace-eq"] {
        assert!(text.contains(id), "auto should run {id}");
    }
}

#[test]
fn emit_writes_deterministic_matrix_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for path in [&out_a, &out_b] {
        let out = newspace(
            &[
                "emit", "--level", "22", "--weight", "2", "--op", "Qp", "--p", "11", "--out",
                path.to_str().unwrap(),
            ],
            &[],
        );
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "emit must be byte-deterministic");
    let parsed: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(parsed["dim"], 4);
    assert_eq!(parsed["op"], "Qp");
}

#[test]
fn emit_rejects_unknown_operator() {
    let out = newspace(&["emit", "--level", "22", "--op", "Zeta"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cache_lifecycle_and_recursion_footprint() {
    let dir = tempfile::tempdir().unwrap();
    let cache_dir = dir.path().to_str().unwrap();

    // Empty cache lists zero entries.
    let out = newspace(&["cache", "status", "--cache-dir", cache_dir], &[]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["entries"].as_array().unwrap().len(), 0);

    // A theorem check at 33 populates the level and its divisor levels.
    let out = newspace(
        &["check", "--level", "33", "--theorem", "T1", "--cache-dir", cache_dir],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let out = newspace(&["cache", "status", "--cache-dir", cache_dir], &[]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let levels: Vec<u64> = parsed["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["level"].as_u64().unwrap())
        .collect();
    assert_eq!(levels, vec![1, 3, 11, 33]);

    // Clear removes everything of the current version.
    let out = newspace(&["cache", "clear", "--cache-dir", cache_dir], &[]);
    assert_eq!(out.status.code(), Some(0));
    let out = newspace(&["cache", "status", "--cache-dir", cache_dir], &[]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["entries"].as_array().unwrap().len(), 0);
}

#[test]
fn warm_cache_report_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache_dir = dir.path().to_str().unwrap();
    let run = || {
        let out = newspace(
            &["check", "--level", "20", "--theorem", "auto", "--cache-dir", cache_dir],
            &[],
        );
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    let cold = run();
    let warm = run();
    assert_eq!(cold, warm);
}

#[test]
fn environment_variables_configure_defaults() {
    // Cache dir through the environment; flag-free invocation uses it.
    let dir = tempfile::tempdir().unwrap();
    let out = newspace(
        &["check", "--level", "11", "--theorem", "T1"],
        &[("NEWSPACE_CACHE_DIR", dir.path().to_str().unwrap())],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("space-N11-w2-v1.json").exists());
    // Level caps from the environment are enforced.
    let out = newspace(
        &["check", "--level", "90", "--theorem", "auto"],
        &[("NEWSPACE_LEVEL_CAP", "50")],
    );
    assert_eq!(out.status.code(), Some(2));
    // Flags take precedence over the environment.
    let out = newspace(
        &["check", "--level", "90", "--theorem", "auto", "--level-cap", "100"],
        &[("NEWSPACE_LEVEL_CAP", "50")],
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn star_restriction_halves_reported_dims() {
    let out = newspace(
        &["check", "--level", "33", "--theorem", "T1", "--star-restrict", "--format", "text"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("PASS T1.newspace-eq dims=(1, 1)"));
}

#[test]
fn weight_four_checks_run() {
    let out = newspace(
        &["check", "--level", "14", "--weight", "4", "--theorem", "T1", "--format", "text"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("PASS T1.newspace-eq"));
}

#[test]
fn smoke_example_exists_for_the_c_interface() {
    // The C example ships next to the generated header.
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).parent().unwrap().join("newspace-ffi");
    assert!(root.join("examples").join("smoke.c").exists());
    assert!(root.join("cbindgen.toml").exists());
}
