//! End-to-end tests through the compiled binary: report contents, byte
//! determinism across runs and cache states, and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run_in(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ingleton"))
        .args(args)
        .env("INGLETON_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn search_s5_reports_sixty_and_is_byte_deterministic() {
    let cache = TempDir::new().unwrap();
    let first = run_in(cache.path(), &["search", "S5"]);
    let report = stdout_json(&first);
    assert_eq!(report["canonical_count"], 60);
    assert_eq!(report["conjugacy_orbit_count"], 1);
    assert_eq!(report["subgroup_count"], 156);
    let v0 = &report["violations"][0];
    assert_eq!(v0["lhs"], "120");
    assert_eq!(v0["rhs"], "128");
    assert_eq!(v0["deficit"], "-8");
    assert!(report.get("raw_count").is_none());

    // Second run hits the lattice cache; stdout must be byte-identical.
    let second = run_in(cache.path(), &["search", "S5"]);
    assert_eq!(first.stdout, second.stdout);
    assert!(String::from_utf8_lossy(&second.stderr).contains("from cache"));

    let with_raw = run_in(cache.path(), &["search", "S5", "--raw-count"]);
    assert_eq!(stdout_json(&with_raw)["raw_count"], 240);
}

#[test]
fn prune_flag_changes_only_stderr() {
    let cache = TempDir::new().unwrap();
    let pruned = run_in(cache.path(), &["search", "S4"]);
    let unpruned = run_in(cache.path(), &["search", "S4", "--no-prune"]);
    assert_eq!(pruned.stdout, unpruned.stdout);
    assert_eq!(stdout_json(&pruned)["canonical_count"], 0);
}

#[test]
fn workers_flag_is_deterministic() {
    let cache = TempDir::new().unwrap();
    let one = run_in(cache.path(), &["search", "S5", "--workers", "1"]);
    let many = run_in(cache.path(), &["search", "S5", "--workers", "4"]);
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn corrupted_cache_is_rebuilt() {
    let cache = TempDir::new().unwrap();
    let first = run_in(cache.path(), &["subgroups", "S4"]);
    assert_eq!(stdout_json(&first)["subgroup_count"], 30);

    for entry in std::fs::read_dir(cache.path()).unwrap() {
        std::fs::write(entry.unwrap().path(), b"{\"format_version\": 999}").unwrap();
    }
    let second = run_in(cache.path(), &["subgroups", "S4"]);
    assert_eq!(first.stdout, second.stdout);
    assert!(String::from_utf8_lossy(&second.stderr).contains("rebuilding"));
}

#[test]
fn witness_p3_and_p5() {
    let cache = TempDir::new().unwrap();
    let p3 = stdout_json(&run_in(cache.path(), &["witness", "--p", "3"]));
    assert_eq!(p3["violated"], false);
    assert_eq!(p3["deficit"], "4");
    assert_eq!(p3["ok"], true);

    let p5 = stdout_json(&run_in(cache.path(), &["witness", "--p", "5"]));
    assert_eq!(p5["violated"], true);
    assert_eq!(p5["lhs"], "120");
    assert_eq!(p5["rhs"], "128");
    assert_eq!(p5["group_order"], 120);
    assert_eq!(p5["flower"]["petal_count"], 5);

    let scan = stdout_json(&run_in(cache.path(), &["witness", "--q", "4"]));
    assert_eq!(scan["violated"], false);
    assert_eq!(scan["group_order"], 60);
}

#[test]
fn group_and_young_and_oracle() {
    let cache = TempDir::new().unwrap();
    let z1 = stdout_json(&run_in(cache.path(), &["group", "Z1"]));
    assert_eq!(z1["order"], 1);
    assert_eq!(z1["subgroup_count"], 1);

    let young = stdout_json(&run_in(
        cache.path(),
        &["young", "--dist", "1/2,1/2", "--T", "100"],
    ));
    let approx = young["approx_bits"].as_f64().unwrap();
    assert!((0.93..=1.0).contains(&approx));
    assert_eq!(young["entropy_bits"], 1.0);
    assert!(young["materialized_check"].is_null());

    let young8 = stdout_json(&run_in(
        cache.path(),
        &["young", "--dist", "1/2,1/2", "--T", "8"],
    ));
    assert_eq!(young8["materialized_check"]["subgroup_order"], 576);

    let oracle = stdout_json(&run_in(
        cache.path(),
        &["oracle", "S4", "--subgroups", "3,7,11", "--alpha", "1,3"],
    ));
    assert!(oracle["abs_error"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn entropy_roundtrip_through_search_indices() {
    let cache = TempDir::new().unwrap();
    let report = stdout_json(&run_in(cache.path(), &["search", "S5"]));
    let idx: Vec<String> = report["violations"][0]["indices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.to_string())
        .collect();
    let arg = idx.join(",");
    let entropy = stdout_json(&run_in(cache.path(), &["entropy", "S5", "--subgroups", &arg]));
    assert_eq!(entropy["violated"], true);
    assert_eq!(entropy["lhs"], "120");
    assert_eq!(entropy["rhs"], "128");
    assert!(entropy["entropy_slack"].as_f64().unwrap() < 0.0);
    assert!(entropy["conditions"].as_array().unwrap().is_empty());
}

#[test]
fn csv_outputs() {
    let cache = TempDir::new().unwrap();
    let search = run_in(cache.path(), &["search", "S4", "--csv"]);
    assert!(search.status.success());
    let text = String::from_utf8(search.stdout).unwrap();
    assert_eq!(text.trim(), "i1,i2,i3,i4,order1,order2,order3,order4,lhs,rhs,deficit");

    let subs = run_in(cache.path(), &["subgroups", "Z6", "--csv"]);
    let text = String::from_utf8(subs.stdout).unwrap();
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines[0], "index,order,generators");
    assert_eq!(lines.len(), 5); // header + trivial, Z2, Z3, Z6

    // Cycle labels contain commas, so the generator column must be quoted.
    let s4 = run_in(cache.path(), &["subgroups", "S4", "--csv"]);
    let text = String::from_utf8(s4.stdout).unwrap();
    assert!(text.contains("\"("));
}

#[test]
fn exit_codes() {
    let cache = TempDir::new().unwrap();
    // Unknown family: precondition.
    assert_eq!(run_in(cache.path(), &["group", "Q8"]).status.code(), Some(2));
    // Malformed permutation spec: precondition.
    assert_eq!(
        run_in(cache.path(), &["group", "perm[5]: (1,2"]).status.code(),
        Some(2)
    );
    // Order cap: resource limit.
    assert_eq!(run_in(cache.path(), &["group", "S8"]).status.code(), Some(3));
    assert_eq!(
        run_in(cache.path(), &["group", "PGL(2,23)"]).status.code(),
        Some(3)
    );
    // Non-integral T*p: precondition.
    assert_eq!(
        run_in(cache.path(), &["young", "--dist", "1/2,1/2", "--T", "3"])
            .status
            .code(),
        Some(2)
    );
    // witness needs exactly one selector.
    assert_eq!(run_in(cache.path(), &["witness"]).status.code(), Some(2));
    assert_eq!(
        run_in(cache.path(), &["witness", "--p", "4"]).status.code(),
        Some(2)
    );
    // --csv outside search/subgroups.
    assert_eq!(
        run_in(cache.path(), &["group", "Z6", "--csv"]).status.code(),
        Some(2)
    );
    // Out-of-range subgroup index.
    assert_eq!(
        run_in(cache.path(), &["entropy", "S4", "--subgroups", "1,2,3,999"])
            .status
            .code(),
        Some(2)
    );
}
