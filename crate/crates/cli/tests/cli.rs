use std::path::{Path, PathBuf};
use std::process::Command;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_archproof"))
        .args(args)
        .current_dir(root())
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

/// Compares with `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, want, "{name}");
}

#[test]
fn check_reports_consistency() {
    assert_eq!(run(&["check", "corpus/ed.parch"]).0, 0);
    let (code, out, _) = run(&["check", "corpus/mi-e2.parch", "--param", "N=4,Q=8,C=2,B=5"]);
    assert_eq!((code, out.as_str()), (0, "consistent (bound 5)\n"));
    assert_eq!(run(&["check", "corpus/missing.parch"]).0, 2);
}

#[test]
fn check_lists_mixed_multiplicities() {
    let dir = std::env::temp_dir().join("archproof-cli-mixed");
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("mixed.parch");
    std::fs::write(&f, "component U, V;\nvar x;\nhas^2 U(x);\nreceive^3 V <- U items {x};\n").unwrap();
    let (code, out, _) = run(&["check", f.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.starts_with("inconsistent: 1 violation(s)"), "{out}");
}

#[test]
fn parse_errors_are_input_errors() {
    let dir = std::env::temp_dir().join("archproof-cli-bad");
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("bad.parch");
    std::fs::write(&f, "component U;\nhas^0 U(x);\n").unwrap();
    let (code, _, err) = run(&["check", f.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.parch:2:"), "{err}");
}

#[test]
fn prove_exit_codes() {
    assert_eq!(run(&["prove", "corpus/ed.parch", "hasnone S(br)"]).0, 0);
    assert_eq!(run(&["prove", "corpus/mi-e.parch", "--param", "n=32,N=4,Q=8,C=2", "hasnone T(qr)"]).0, 1);
    assert_eq!(run(&["prove", "corpus/mi-e1.parch", "--param", "N=4,Q=8,C=2", "hasnone T(qr)"]).0, 0);
    assert_eq!(run(&["prove", "corpus/hom.parch", "knows T (dec = Mu(br,bs,THR))"]).0, 0);
    assert_eq!(run(&["prove", "corpus/ed.parch", "hasnone Z(br)"]).0, 2);
    assert_eq!(run(&["prove", "corpus/mi-e.parch", "hasnone T(qr)"]).0, 2);
    assert_eq!(run(&["prove", "corpus/ed.parch", "--param", "x", "has T(br)"]).0, 2);
}

#[test]
fn budget_exhaustion_exits_3() {
    let out = Command::new(env!("CARGO_BIN_EXE_archproof"))
        .args(["prove", "corpus/ed.parch", "knows T (dec = Mu(br,bs,THR))"])
        .current_dir(root())
        .env("ARCHPROOF_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn simulate_exit_codes() {
    assert_eq!(run(&["simulate", "corpus/ed.parch", "--eval", "has^1 T(bs)"]).0, 0);
    assert_eq!(run(&["simulate", "corpus/ed.parch", "--eval", "hasnone T(bs)"]).0, 1);
    assert_eq!(
        run(&["simulate", "corpus/ed.parch", "--eval", "hasnone S(br)", "--samples", "10000"]).0,
        3
    );
    assert_eq!(run(&["simulate", "corpus/ed.parch", "--seed", "x"]).0, 2);
}

#[test]
fn attack_rows() {
    let (code, out, _) = run(&["attack", "--seeds", "3"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "seed,N,Q,C,B,budget,accuracy");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("0,8,16,2,-,256,"));
    let (_, out, _) = run(&["attack", "--C", "8", "--seeds", "20"]);
    let median: f64 = out.lines().last().unwrap().rsplit(' ').next().unwrap().parse().unwrap();
    assert!((median - 0.5).abs() <= 0.1, "{median}");
    assert_eq!(run(&["attack", "--N", "0"]).0, 2);
}

#[test]
fn golden_outputs() {
    golden("corpus.txt", &run(&["corpus"]).1);
    golden("corpus.json", &run(&["corpus", "--json"]).1);
    golden("prove-ed-integrity.txt", &run(&["prove", "corpus/ed.parch", "knows T (dec = Mu(br,bs,THR))", "--explain"]).1);
    golden(
        "prove-ed-integrity.json",
        &run(&["prove", "corpus/ed.parch", "knows T (dec = Mu(br,bs,THR))", "--explain", "--json"]).1,
    );
    golden("prove-ed-privacy.txt", &run(&["prove", "corpus/ed.parch", "hasnone S(br)", "--explain"]).1);
    golden("simulate-moc.txt", &run(&["simulate", "corpus/moc.parch"]).1);
    golden("simulate-ed-samples.txt", &run(&["simulate", "corpus/ed.parch", "--samples", "3", "--seed", "4"]).1);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cmds: [&[&str]; 4] = [
        &["simulate", "corpus/hom.parch", "--samples", "20", "--seed", "9"],
        &["simulate", "corpus/hsm.parch", "--eval", "has T(bs)", "--json"],
        &["attack", "--B", "4", "--epochs", "64", "--seeds", "5"],
        &["prove", "corpus/mi-e3.parch", "--param", "N=4,Q=8,C=2,B=5", "hasnone T(qr)", "--explain"],
    ];
    for c in cmds {
        assert_eq!(run(c), run(c), "{c:?}");
    }
}
