use std::fs;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn pcfgset() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pcfgset"));
    cmd.env_remove("PCFGSET_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    pcfgset().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "pcfgset {args:?} failed:\n{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn line_count(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn generate(dir: &Path, seed: &str, size: usize) {
    ok(&["generate", "--seed", seed, "--size", &size.to_string(), "--pilot-size", "20000", "--out", p(dir)]);
}

#[test]
fn generate_writes_aligned_splits_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "4", 100);
    let sizes: Vec<usize> =
        ["train", "valid", "test"].iter().map(|s| line_count(&dir.path().join(format!("{s}.src")))).collect();
    assert_eq!(sizes, [85, 5, 10]);
    for s in ["train", "valid", "test"] {
        assert_eq!(line_count(&dir.path().join(format!("{s}.src"))), line_count(&dir.path().join(format!("{s}.tgt"))));
    }
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["seed"], 4);
    assert_eq!(manifest["files"].as_object().unwrap().len(), 6);
    assert!(manifest["params"]["p_leaf"].is_number());
}

#[test]
fn same_seed_same_bytes() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    generate(a.path(), "9", 300);
    generate(b.path(), "9", 300);
    generate(c.path(), "10", 300);
    let files = |d: &Path| json(&d.join("manifest.json"))["files"].clone();
    assert_eq!(files(a.path()), files(b.path()));
    assert_ne!(files(a.path()), files(c.path()));
    assert_eq!(fs::read(a.path().join("manifest.json")).unwrap(), fs::read(b.path().join("manifest.json")).unwrap());
}

#[test]
fn seed_is_required_and_read_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["generate", "--size", "10", "--out", p(dir.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("PCFGSET_SEED"));

    let out = pcfgset()
        .env("PCFGSET_SEED", "12")
        .args(["generate", "--size", "10", "--pilot-size", "20000", "--out", p(dir.path())])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(json(&dir.path().join("manifest.json"))["seed"], 12);
}

#[test]
fn validate_flags_a_corrupted_target_line() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "5", 200);
    assert!(ok(&["validate", "--data", p(dir.path())]).contains("PASS"));

    let tgt = dir.path().join("train.tgt");
    let mut lines: Vec<String> = fs::read_to_string(&tgt).unwrap().lines().map(String::from).collect();
    lines[2] = format!("{} Z", lines[2]);
    fs::write(&tgt, lines.join("\n") + "\n").unwrap();
    let out = run(&["validate", "--data", p(dir.path())]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout.contains("train.tgt:3:"), "{stdout}");
    assert!(stdout.contains("FAIL"));
}

#[test]
fn eval_refuses_data_that_changed_since_generation() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "5", 100);
    fs::write(dir.path().join("test.tgt"), "A\n".repeat(10)).unwrap();
    let out = run(&["eval", "--mode", "accuracy", "--data", p(dir.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("manifest"));
}

#[test]
fn file_adapter_scores_prediction_files() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "6", 200);
    let report_dir = dir.path().join("report");
    let tgt = dir.path().join("test.tgt");
    let adapter = format!("file:{}", p(&tgt));
    ok(&["eval", "--mode", "accuracy", "--data", p(dir.path()), "--adapter", &adapter, "--out", p(&report_dir)]);
    let report = json(&report_dir.join("report.json"));
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["mode"], "accuracy");
    assert_eq!(report["accuracy"], 1.0);
    assert!(report["metadata"]["dataset_hash"].is_string());
    assert!(report_dir.join("accuracy_by_depth.csv").exists());

    let short = dir.path().join("short.pred");
    let lines: Vec<String> = fs::read_to_string(&tgt).unwrap().lines().skip(1).map(String::from).collect();
    fs::write(&short, lines.join("\n") + "\n").unwrap();
    let out =
        run(&["eval", "--mode", "accuracy", "--data", p(dir.path()), "--adapter", &format!("file:{}", p(&short))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("19 predictions for 20 inputs"));
}

#[test]
fn oracle_command_serves_lines() {
    use std::io::Write;
    let mut child = pcfgset().arg("oracle").stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(b"repeat A B C\nnot valid ,\nswap_syn A B C\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "A B C A B C\n\nC B A\n");
}

#[test]
fn subprocess_loopback_matches_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "7", 300);
    let adapter = format!("cmd:{} oracle", env!("CARGO_BIN_EXE_pcfgset"));
    let out = ok(&["eval", "--mode", "accuracy", "--data", p(dir.path()), "--adapter", &adapter, "--jobs", "2"]);
    assert!(out.starts_with("accuracy 1.0000"), "{out}");
    let out = ok(&["eval", "--mode", "accuracy", "--data", p(dir.path()), "--adapter", "cmd:cat"]);
    assert!(out.starts_with("accuracy 0.0000"), "{out}");
}

#[test]
fn overgen_variants_validate_only_with_their_exceptions() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base");
    let tests = dir.path().join("overgen");
    generate(&base, "8", 3000);
    let out = ok(&["testbuild", "--test", "overgen", "--seed", "8", "--base", p(&base), "--out", p(&tests)]);
    assert!(out.contains("reverse echo => echo copy"));
    let variants: Vec<String> = {
        let mut v: Vec<String> =
            fs::read_dir(&tests).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
        v.sort();
        v
    };
    assert_eq!(variants, ["pct_0.0001", "pct_0.0005", "pct_0.001", "pct_0.005"]);

    let variant = tests.join("pct_0.005");
    let exceptions = json(&variant.join("exceptions.json"));
    assert!(!exceptions["entries"].as_array().unwrap().is_empty());
    let out = run(&["validate", "--data", p(&variant)]);
    assert_eq!(out.status.code(), Some(1));
    let sidecar = variant.join("exceptions.json");
    assert!(ok(&["validate", "--data", p(&variant), "--exceptions", p(&sidecar)]).contains("PASS"));
}

#[test]
fn productivity_audit_reports_the_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base");
    generate(&base, "3", 2000);
    let out_dir = dir.path().join("prod");
    let out = ok(&[
        "testbuild",
        "--test",
        "productivity",
        "--seed",
        "3",
        "--base",
        p(&base),
        "--out",
        p(&out_dir),
        "--threshold",
        "6",
    ]);
    let train_row = out.lines().find(|l| l.starts_with("train")).unwrap();
    let cols: Vec<&str> = train_row.split_whitespace().collect();
    assert_eq!(cols[4], "6");
    let stats = &json(&out_dir.join("manifest.json"))["details"]["stats"];
    assert_eq!(stats["train"]["max_functions"], 6);
    assert_eq!(stats["test"]["min_functions"], 7);
}

#[test]
fn substitutivity_builds_synonym_test_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base");
    generate(&base, "2", 2000);
    let out_dir = dir.path().join("sub");
    ok(&[
        "testbuild",
        "--test",
        "substitutivity-ed",
        "--seed",
        "2",
        "--base",
        p(&base),
        "--out",
        p(&out_dir),
        "--synonyms",
        "swap,echo",
    ]);
    let syn = fs::read_to_string(out_dir.join("test_syn.src")).unwrap();
    assert!(syn.lines().all(|l| l.contains("swap_syn") || l.contains("echo_syn")));
    assert_eq!(line_count(&out_dir.join("test_syn.src")), line_count(&out_dir.join("test.src")));
    assert!(ok(&["validate", "--data", p(&out_dir)]).contains("PASS"));
    let out = ok(&["eval", "--mode", "consistency", "--data", p(&out_dir), "--adapter", "faulty:1", "--seed", "1"]);
    assert!(out.contains("consistent and correct 0.0000"), "{out}");
}

#[test]
fn naturalise_single_iteration_and_one_cell_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.csv");
    fs::write(&spec, "length,depth,count\n4,1,50\n").unwrap();
    let out_dir = dir.path().join("nat");
    ok(&[
        "naturalise",
        "--seed",
        "2",
        "--spec",
        p(&spec),
        "--out",
        p(&out_dir),
        "--size",
        "500",
        "--sample-size",
        "20000",
        "--pilot-size",
        "20000",
        "--max-iters",
        "1",
    ]);
    assert_eq!(line_count(&out_dir.join("kl_trace.csv")), 2);
    for split in ["train", "valid", "test"] {
        let text = fs::read_to_string(out_dir.join(format!("{split}.src"))).unwrap();
        assert!(text.lines().all(|l| l.split_whitespace().count() == 4), "{split}");
    }
    let profile = json(&out_dir.join("params.json"));
    assert!(profile["increments"]["length"].is_number());

    let regenerated = dir.path().join("regen");
    ok(&[
        "generate",
        "--seed",
        "2",
        "--size",
        "200",
        "--params",
        p(&out_dir.join("params.json")),
        "--spec",
        p(&spec),
        "--pilot-size",
        "20000",
        "--out",
        p(&regenerated),
    ]);
    let text = fs::read_to_string(regenerated.join("train.src")).unwrap();
    assert!(text.lines().all(|l| l.split_whitespace().count() == 4));
}

#[test]
fn eos_and_length_modes_report() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "3", 200);
    let preds = dir.path().join("preds.txt");
    let tgts = fs::read_to_string(dir.path().join("test.tgt")).unwrap();
    let truncated: Vec<String> = tgts.lines().map(|l| l.split(' ').next().unwrap().to_string()).collect();
    fs::write(&preds, truncated.join("\n") + "\n").unwrap();
    let report_dir = dir.path().join("eos");
    ok(&["eval", "--mode", "eos", "--data", p(dir.path()), "--predictions", p(&preds), "--out", p(&report_dir)]);
    let r = json(&report_dir.join("report.json"));
    assert_eq!(r["prefix"], r["incorrect"]);

    let out = ok(&["eval", "--mode", "length-gen", "--adapter", "capped:6", "--lengths", "5-7", "--per-length", "5"]);
    assert!(out.contains("copy           length   6  accuracy 1.0000"), "{out}");
    assert!(out.contains("copy           length   7  accuracy 0.0000"), "{out}");
}
