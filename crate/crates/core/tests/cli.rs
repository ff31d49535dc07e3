use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sprbench-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sprbench")).current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn check(dir: &Path, file: &str) {
    let o = run(dir, &["check", file]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("verified"));
}

#[test]
fn arrow_exit_codes_and_witness() {
    let dir = workdir("arrow");
    let base = ["arrow", "--class", "or", "--mu", "3", "--arity", "2", "--colors", "2", "--mode", "exhaustive"];
    let holds = run(&dir, &[&base[..], &["--lambda", "6"]].concat());
    assert_eq!(code(&holds), 0);
    assert!(!dir.join("witness.json").exists());
    let fails = run(&dir, &[&base[..], &["--lambda", "5"]].concat());
    assert_eq!(code(&fails), 1);
    check(&dir, "witness.json");
    let unknown = run(&dir, &["arrow", "--class", "or", "--lambda", "6", "--mu", "3", "--arity", "2", "--colors", "2", "--mode", "randomized", "--samples", "50"]);
    assert_eq!(code(&unknown), 2);
    let too_big = run(&dir, &["arrow", "--class", "or", "--lambda", "30", "--mu", "3", "--arity", "2", "--colors", "2"]);
    assert_eq!(code(&too_big), 3);
    assert!(String::from_utf8_lossy(&too_big.stderr).contains("ceiling"));
}

#[test]
fn help_and_version_succeed() {
    let dir = workdir("help");
    assert_eq!(code(&run(&dir, &["--help"])), 0);
    assert_eq!(code(&run(&dir, &["--version"])), 0);
    assert_eq!(code(&run(&dir, &["arrow"])), 3);
}

#[test]
fn every_artifact_rechecks() {
    let dir = workdir("artifacts");
    let t = run(&dir, &["table", "--class", "or", "--mu", "3", "--arity", "2", "--colors", "2", "--lambda-max", "6"]);
    assert_eq!(code(&t), 0);
    check(&dir, "table.json");
    let r = run(&dir, &["reduce", "--kind", "chicolor", "--mu", "3", "--seed", "4"]);
    assert_eq!(code(&r), 0);
    check(&dir, "reduction.json");
    let r = run(&dir, &["reduce", "--kind", "ceq", "--mu", "2", "--seed", "0", "--out", "ceq.json"]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stdout));
    check(&dir, "ceq.json");

    std::fs::write(
        dir.join("input.json"),
        r#"{"index": {"class": {"kind": "or"}, "payload": {}, "universe": 6},
            "target": {"signature": {"relations": [{"name": "R", "arity": 1}]}, "size": 6,
                       "relations": {"R": [[0], [2], [3], [5]]}},
            "map": [0, 1, 2, 3, 4, 5]}"#,
    )
    .unwrap();
    let e = run(&dir, &["extract", "--input", "input.json", "--n-max", "2", "--levels", "3,3"]);
    assert_eq!(code(&e), 0, "{}", String::from_utf8_lossy(&e.stderr));
    check(&dir, "blueprint.json");
    std::fs::write(dir.join("index.json"), r#"{"class": {"kind": "or"}, "payload": {}, "universe": 4}"#).unwrap();
    let m = run(&dir, &["em", "--index", "index.json", "--blueprint", "blueprint.json"]);
    assert_eq!(code(&m), 0, "{}", String::from_utf8_lossy(&m.stderr));
    check(&dir, "em.json");
}

#[test]
fn tampered_witness_is_rejected() {
    let dir = workdir("tamper");
    run(&dir, &["arrow", "--class", "or", "--lambda", "5", "--mu", "3", "--arity", "2", "--colors", "2"]);
    let text = std::fs::read_to_string(dir.join("witness.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for e in v["coloring"]["entries"].as_array_mut().unwrap() {
        let e = e.as_array_mut().unwrap();
        *e.last_mut().unwrap() = serde_json::json!(0);
    }
    std::fs::write(dir.join("witness.json"), v.to_string()).unwrap();
    let o = run(&dir, &["check", "witness.json"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn malformed_input_reports_position() {
    let dir = workdir("malformed");
    std::fs::write(dir.join("bad.json"), "{\"kind\": \"witness\",\n  \"structure\": [1, 2,\n").unwrap();
    let o = run(&dir, &["check", "bad.json"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = workdir("determinism");
    let cases: [&[&str]; 3] = [
        &["--json", "arrow", "--class", "or", "--lambda", "8", "--mu", "3", "--arity", "2", "--colors", "2", "--mode", "randomized", "--samples", "300", "--seed", "5"],
        &["--json", "arrow", "--class", "or", "--lambda", "9", "--mu", "3", "--arity", "2", "--colors", "3", "--mode", "counterexample", "--seed", "2"],
        &["--json", "reduce", "--kind", "chicolor", "--mu", "3", "--seed", "11"],
    ];
    for args in cases {
        let a = run(&dir, args);
        let first = std::fs::read_dir(&dir).unwrap().map(|e| std::fs::read(e.unwrap().path()).unwrap()).collect::<Vec<_>>();
        let b = run(&dir, args);
        let second = std::fs::read_dir(&dir).unwrap().map(|e| std::fs::read(e.unwrap().path()).unwrap()).collect::<Vec<_>>();
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(code(&a), code(&b));
        assert_eq!(first, second);
    }
}
