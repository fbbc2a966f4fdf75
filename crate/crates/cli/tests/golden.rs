//! Golden-file tests for the `grn` binary. Regenerate with `UPDATE_GOLDEN=1 cargo test -p grn-cli`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

const NAMES: [&str; 7] = [
    "repressilator3",
    "repressilator4-lift",
    "ex31-five-gene",
    "ex36-funny",
    "ex39-four-gene",
    "clock5",
    "exotic4",
];

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn grn(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_grn"))
        .args(args)
        .current_dir(manifest_dir())
        .env("RUST_LOG", "off")
        .output()
        .expect("spawn grn");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn render(run: &Run) -> String {
    let mut text = format!("exit: {}\n--- stdout\n{}", run.code, run.stdout);
    if !run.stderr.is_empty() {
        text.push_str("--- stderr\n");
        text.push_str(&run.stderr);
    }
    text
}

fn check_golden(name: &str, actual: &str) {
    let path = manifest_dir().join("tests/golden").join(format!("{name}.txt"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert!(expected == actual, "{name} differs from {}\n{actual}", path.display());
}

fn golden(name: &str, args: &[&str]) -> Run {
    let run = grn(args);
    check_golden(name, &render(&run));
    run
}

#[test]
fn examples_list_and_show() {
    let run = golden("examples-list", &["examples", "--list"]);
    assert_eq!(run.code, 0);
    for name in NAMES {
        assert!(run.stdout.contains(&format!("\"{name}\"")));
    }
    golden("examples-list-text", &["examples", "--format", "text"]);
    let run = grn(&["examples", "--show", "clock5"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("\"n\": 5"));
}

#[test]
fn every_example_validates() {
    for name in NAMES {
        let model = if name == "clock5" || name == "exotic4" { "mult" } else { "sum" };
        let run = golden(&format!("validate-{name}"), &["validate", name, "--model", model]);
        assert_eq!(run.code, 0, "{name}: {}", run.stderr);
    }
}

#[test]
fn five_gene_synchrony() {
    let run = golden(
        "synchrony-ex31-sum",
        &["synchrony", "ex31-five-gene", "--model", "sum", "--enumerate"],
    );
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("\"partition\": \"1,2,3|4,5\""));
    let run = golden(
        "synchrony-ex31-mult",
        &["synchrony", "ex31-five-gene", "--model", "mult", "--partition", "1,2,3|4,5"],
    );
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("\"is_synchrony\": false"));
}

#[test]
fn four_gene_quotient_constraint() {
    let run = golden(
        "quotient-ex39-mult",
        &["quotient", "ex39-four-gene", "--model", "mult", "--partition", "1,2|3|4"],
    );
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("\"product\": 9.0"));
}

#[test]
fn funny_network_decoupling() {
    let run = golden(
        "synchrony-ex36-sum",
        &["synchrony", "ex36-funny", "--partition", "1,2|3"],
    );
    assert!(run.stdout.contains("\"decouplings\""));
}

#[test]
fn regulatory_dependent_synchrony() {
    golden(
        "synchrony-exotic4-circadian",
        &["synchrony", "exotic4", "--model", "mult", "--regfamily", "circadian:a=2,b=1", "--enumerate"],
    );
    golden(
        "synchrony-clock5-circadian",
        &["synchrony", "clock5", "--model", "mult", "--regfamily", "circadian:a=2,b=1", "--format", "text"],
    );
    let common = ["--model", "mult", "--partition", "1,4|2,3", "--trials", "5", "--t", "20", "--seed", "7"];
    let mut args = vec!["verify", "exotic4", "--regfamily", "circadian:a=2,b=1"];
    args.extend(common);
    let run = golden("verify-exotic4-circadian", &args);
    assert!(run.stdout.contains("\"verdict\": \"invariant\""));
    let mut args = vec!["verify", "exotic4"];
    args.extend(common);
    let run = golden("verify-exotic4-hill", &args);
    assert!(run.stdout.contains("\"verdict\": \"not_invariant\""));
}

#[test]
fn repressilator_runs() {
    golden(
        "synchrony-repressilator3",
        &["synchrony", "repressilator3", "--format", "text"],
    );
    let run = golden(
        "verify-repressilator4-lift",
        &["verify", "repressilator4-lift", "--partition", "1|2|3,4", "--trials", "4", "--t", "20"],
    );
    assert!(run.stdout.contains("\"verdict\": \"invariant\""));
    golden(
        "simulate-repressilator3",
        &["simulate", "repressilator3", "--t", "2", "--stride", "25", "--seed", "1"],
    );
    golden(
        "simulate-repressilator3-init",
        &["simulate", "repressilator3", "--t", "1", "--dt", "0.05", "--init", "tests/fixtures/state3.json", "--stride", "5"],
    );
}

fn lift_dir_listing(dir: &Path) -> String {
    let mut names: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let mut text = String::new();
    for name in names {
        text.push_str(&format!("--- {name}\n"));
        text.push_str(&fs::read_to_string(dir.join(&name)).unwrap());
    }
    text
}

#[test]
fn repressilator_duplication_lift() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lifts");
    let run = grn(&["lifts", "repressilator3", "--sizes", "1,1,2", "--out", out.to_str().unwrap()]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let listing = lift_dir_listing(&out);
    check_golden("lifts-repressilator3", &format!("{}{listing}", render(&run)));
    let lift = out.join("lift-001.json");
    let run = grn(&["synchrony", lift.to_str().unwrap(), "--partition", "1|2|3,4"]);
    assert!(run.stdout.contains("\"is_synchrony\": true"));
}

#[test]
fn mult_lift_enumeration_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.json");
    let run = grn(&[
        "quotient", "ex39-four-gene", "--model", "mult", "--partition", "1,2|3|4", "--out", q.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(dir.path().join("q.constraints.json").is_file());
    let mut listings = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let run = grn(&[
            "lifts", q.to_str().unwrap(), "--model", "mult", "--sizes", "2,1,1", "--enumerate-mults", "--fill",
            "random", "--seed", "3", "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(run.code, 0, "{}", run.stderr);
        assert!(run.stdout.contains("\"total\": 36"));
        listings.push(lift_dir_listing(&out));
    }
    assert_eq!(listings[0], listings[1]);
}

#[test]
fn errors_exit_two_with_diagnostics() {
    let cases: [(&str, &[&str]); 8] = [
        ("error-unknown-flag", &["validate", "clock5", "--frobnicate"]),
        ("error-malformed-json", &["validate", "tests/fixtures/malformed.json"]),
        ("error-invalid-network", &["validate", "tests/fixtures/invalid.json"]),
        ("error-out-of-range", &["validate", "tests/fixtures/out_of_range.json"]),
        ("error-prod-multiplicity", &["validate", "clock5", "--model", "prod"]),
        ("error-not-synchrony", &["quotient", "ex31-five-gene", "--model", "mult", "--partition", "1,2,3|4,5"]),
        ("error-bad-partition", &["synchrony", "ex31-five-gene", "--partition", "1,2|2,3"]),
        ("error-csv-format", &["synchrony", "ex31-five-gene", "--format", "csv"]),
    ];
    for (name, args) in cases {
        let run = golden(name, args);
        assert_eq!(run.code, 2, "{name}");
        assert!(run.stdout.is_empty(), "{name}");
        let diag: serde_json::Value = serde_json::from_str(run.stderr.trim()).expect(name);
        assert!(diag["error"].is_string() && diag["message"].is_string(), "{name}");
    }
}

#[test]
fn round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    for name in NAMES {
        let path = dir.path().join(format!("{name}.json"));
        let run = grn(&["examples", "--show", name, "--out", path.to_str().unwrap()]);
        assert_eq!(run.code, 0);
        let a = grn(&["validate", path.to_str().unwrap(), "--model", "mult"]);
        let b = grn(&["validate", name, "--model", "mult"]);
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
}
