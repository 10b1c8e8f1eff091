use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn asym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asym")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name)
}

fn assert_valid(schema: &str, doc: &Value) {
    let schema: Value = serde_json::from_str(&fs::read_to_string(schema_path(schema)).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:?}\n{doc:#}");
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const C6: &str = "6 6\n0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n";
const ASYM6: &str = "6 6\n0 2\n0 3\n0 5\n1 2\n1 4\n2 3\n";

#[test]
fn gen_with_zero_probability() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.txt");
    let run = asym(&["gen", "--model", "gnp", "--n", "10", "--p", "0", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert!(run.status.success());
    assert_eq!(fs::read_to_string(&out).unwrap(), "10 0\n");
    let stats = stdout_json(&run);
    assert_eq!(stats["m"], 0);
    assert_eq!(stats["max_degree"], 0);
}

#[test]
fn gen_forced_complete_graph() {
    let run = asym(&["gen", "--model", "gnpd", "--p", "0", "--d", "9", "--n", "10"]);
    assert!(run.status.success());
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.starts_with("10 45\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("# aux")).count(), 45);
}

#[test]
fn exit_codes() {
    assert_eq!(asym(&["gen", "--model", "gnp", "--n", "10", "--p", "1.5"]).status.code(), Some(4));
    assert_eq!(asym(&["gen", "--n", "10"]).status.code(), Some(2));
    assert_eq!(asym(&["profile", "/nonexistent/graph.txt"]).status.code(), Some(3));
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.txt", "3 1\n0 0\n");
    assert_eq!(asym(&["profile", &bad]).status.code(), Some(3));
    let empty = write(&dir, "empty.txt", "4 0\n");
    assert_eq!(asym(&["profile", &empty]).status.code(), Some(4));
}

#[test]
fn cycle_profile_is_zero_and_certified() {
    let dir = TempDir::new().unwrap();
    let c6 = write(&dir, "c6.txt", C6);
    let run = asym(&["profile", &c6]);
    assert!(run.status.success());
    let doc = stdout_json(&run);
    assert_valid("profile.schema.json", &doc);
    assert_eq!(doc["overall"]["delta_num"], 0);
    assert_eq!(doc["certified"], true);
    let k6 = &doc["entries"][4];
    assert_eq!(k6["k"], 6);
    assert_eq!(k6["dist"], 0);
    assert!(String::from_utf8_lossy(&run.stderr).contains("overall delta = 0 (certified)"));
}

#[test]
fn asymmetric_witness_profile() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "a6.txt", ASYM6);
    let out = dir.path().join("p.json");
    let run = asym(&["profile", &g, "--out", out.to_str().unwrap(), "--delta", "1/6"]);
    assert!(run.status.success());
    let line = String::from_utf8(run.stdout).unwrap();
    assert!(line.contains("overall delta = 1/6 (certified)"), "{line}");
    assert!(line.contains("1/6-asymmetric: certified"), "{line}");
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_valid("profile.schema.json", &doc);
    assert_eq!(doc["overall"]["delta_num"], 1);
    assert_eq!(doc["overall"]["delta_den"], 6);
}

#[test]
fn zero_budget_is_not_certified() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.txt");
    assert!(asym(&["gen", "--n", "40", "--p", "0.3", "--seed", "3", "--out", g.to_str().unwrap()]).status.success());
    let run = asym(&["profile", g.to_str().unwrap(), "--budget", "0", "--ks", "2,5,40", "--restarts", "2", "--steps", "500"]);
    assert!(run.status.success());
    let doc = stdout_json(&run);
    assert_valid("profile.schema.json", &doc);
    assert_eq!(doc["certified"], false);
    assert!(doc["entries"].as_array().unwrap().iter().all(|e| e["exact"] == false));
    assert!(String::from_utf8_lossy(&run.stderr).contains("not certified"));
}

#[test]
fn delta2_output() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "a6.txt", ASYM6);
    let doc = stdout_json(&asym(&["delta2", &g]));
    assert_valid("delta2.schema.json", &doc);
    assert_eq!(doc["pairs"], 15);
    assert_eq!(doc["witness_cycles"], "(0 3)");
}

#[test]
fn dist_forms() {
    let dir = TempDir::new().unwrap();
    let c6 = write(&dir, "c6.txt", C6);
    let a6 = write(&dir, "a6.txt", ASYM6);
    let rot = stdout_json(&asym(&["dist", &c6, "--perm", "(0 1 2 3 4 5)"]));
    assert_eq!(rot["dist"], 0);
    let swap = stdout_json(&asym(&["dist", &c6, "--perm", "(0 1)"]));
    assert_eq!(swap["dist"], 2);
    let pair = stdout_json(&asym(&["dist", &c6, &a6]));
    assert_eq!((pair["dist_num"].as_u64(), pair["dist_den"].as_u64()), (Some(3), Some(1)));
}

#[test]
fn density_check_on_forest_and_k8() {
    let dir = TempDir::new().unwrap();
    let forest = write(&dir, "forest.txt", "7 5\n0 1\n0 2\n2 3\n4 5\n4 6\n");
    let run = asym(&["verify", &forest, "--check", "density"]);
    assert_eq!(run.status.code(), Some(0));
    let doc = stdout_json(&run);
    assert_valid("verify.schema.json", &doc);
    assert_eq!(doc["reports"][0]["verdict"], "pass");

    let k8 = dir.path().join("k8.txt");
    asym(&["gen", "--model", "gnpd", "--p", "0", "--d", "7", "--n", "8", "--out", k8.to_str().unwrap()]);
    let run = asym(&["verify", k8.to_str().unwrap(), "--check", "density", "--limit", "8"]);
    assert_eq!(run.status.code(), Some(1));
    let doc = stdout_json(&run);
    assert_valid("verify.schema.json", &doc);
    assert_eq!(doc["summary"]["ok"], false);
    assert_eq!(doc["reports"][0]["stats"]["violator_edges"], 28);
}

#[test]
fn lemma1_checks() {
    let sweep = asym(&["verify", "--check", "lemma1-sweep"]);
    assert!(sweep.status.success());
    let doc = stdout_json(&sweep);
    assert_valid("verify.schema.json", &doc);
    assert_eq!(doc["reports"][0]["stats"]["oracle_mismatches"], 0);

    let mc = asym(&["verify", "--check", "lemma1", "--n", "4", "--perm", "(0 1)", "--m-s", "2", "--trials", "5000"]);
    assert!(mc.status.success());
    let doc = stdout_json(&mc);
    assert_valid("verify.schema.json", &doc);
    let report = &doc["reports"][0];
    assert_eq!((report["stats"]["oracle_num"].as_u64(), report["stats"]["oracle_den"].as_u64()), (Some(6), Some(5)));
}

#[test]
fn statistical_checks_bundle() {
    let run = asym(&[
        "verify", "--check", "covered-edges", "--check", "edge-probability", "--n", "60", "--p", "0.1", "--k", "3",
        "--d", "4", "--edge", "1-2", "--condition", "0-1", "--trials", "2000", "--min-conditional", "300",
    ]);
    let doc = stdout_json(&run);
    assert_valid("verify.schema.json", &doc);
    assert_eq!(doc["summary"]["checks"], 2);
    assert_eq!(run.status.code(), Some(if doc["summary"]["failed"] == 0 { 0 } else { 1 }));
}

/// CSV records with the wall-clock column group removed.
fn strip_runtime(text: &str) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let keep: Vec<usize> = (0..headers.len()).filter(|&i| !headers[i].starts_with("rt_")).collect();
    let mut rows = vec![keep.iter().map(|&i| headers[i].to_string()).collect()];
    for record in reader.records() {
        let record = record.unwrap();
        rows.push(keep.iter().map(|&i| record[i].to_string()).collect());
    }
    rows
}

#[test]
fn campaign_is_deterministic_and_sorted() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.conf", "model = gnp\nn = 8\np = 0.5\nseed-count = 20\nmaster-seed = 7\ntasks = profile\n");
    let run_into = |name: &str, jobs: &str| {
        let out = dir.path().join(name);
        let run = asym(&["campaign", "--config", &cfg, "--out", out.to_str().unwrap(), "--jobs", jobs]);
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
        out
    };
    let (a, b) = (run_into("a", "1"), run_into("b", "3"));
    let csv_a = fs::read_to_string(a.join("results.csv")).unwrap();
    let csv_b = fs::read_to_string(b.join("results.csv")).unwrap();
    assert_eq!(strip_runtime(&csv_a), strip_runtime(&csv_b));
    assert_eq!(csv_a.lines().count(), 21);
    let seeds: Vec<u64> = csv_a.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(seeds.windows(2).all(|w| w[0] < w[1]));
    assert!(csv_a.lines().skip(1).all(|l| l.split(',').nth(13) == Some("true")));
    for seed in seeds {
        let name = format!("seed-{seed}");
        for sub in ["graphs", "profiles"] {
            let ext = if sub == "graphs" { "txt" } else { "json" };
            let fa = fs::read(a.join(sub).join(format!("{name}.{ext}"))).unwrap();
            assert_eq!(fa, fs::read(b.join(sub).join(format!("{name}.{ext}"))).unwrap());
        }
    }
    let summary_a: Value = serde_json::from_str(&fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    assert_valid("campaign-summary.schema.json", &summary_a);
    assert_eq!(summary_a["rows"], 20);
    assert_eq!(summary_a["certified"], 20);
    assert_eq!(fs::read(a.join("summary.json")).unwrap(), fs::read(b.join("summary.json")).unwrap());
}

#[test]
fn campaign_flags_override_config_and_errors_are_rows() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.conf", "model = gnp\nn = 8\np = 0.5\nseeds = 3,1,2\ntasks = delta2,verify\n");
    let out = dir.path().join("o");
    let run = asym(&["campaign", "--config", &cfg, "--p", "0", "--out", out.to_str().unwrap()]);
    assert!(run.status.success());
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("1,gnp,8,0.0,"));
    // p = 0 leaves no edges, so delta is undefined and recorded per row
    assert!(rows.iter().all(|r| r.contains("delta is undefined")));

    let bad = write(&dir, "bad.conf", "n = 8\nwidth = 3\n");
    assert_eq!(asym(&["campaign", "--config", &bad]).status.code(), Some(4));
}
