//! One pass/fail line per acceptance criterion.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use archproof::dsl::{parse_architecture, parse_query_for, render};
use archproof::leakage::{budget_for_accuracy, Experiment};
use archproof::prover::{derive, validate_proof, Rule};
use archproof::report::{corpus_table, expected_table, integrity_equation};
use archproof::{ComponentId, CorpusName, Property, Subject};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("{what} took {t:?}, limit {limit:?}"))
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_archproof"))
        .args(args)
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("../.."))
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn corpus_table_matches() -> Check {
    let start = Instant::now();
    let rows = corpus_table().map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(1), "table")?;
    let want = expected_table();
    for (got, want) in rows.iter().zip(&want) {
        ensure(
            got.br == want.br && got.bs == want.bs,
            format!("{}: got br {:?} bs {:?}", got.arch, got.br, got.bs),
        )?;
    }
    let (code, _) = cli(&["corpus"]);
    ensure(code == 0, format!("corpus command exited {code}"))?;
    Ok(format!("4 rows in {:?}", start.elapsed()))
}

fn integrity_theorems() -> Check {
    for name in CorpusName::BASIC {
        let a = common::build(name);
        let v = derive(&a, &Property::know("T", integrity_equation())).map_err(|e| e.to_string())?;
        let p = v.proof.ok_or(format!("{name}: not derivable"))?;
        ensure(validate_proof(&a, &p), format!("{name}: proof rejected"))?;
        if name == CorpusName::Ed {
            let rules = p.rule_counts();
            for r in [Rule::K5, Rule::K1, Rule::KDed] {
                ensure(rules.contains_key(&r), format!("ed proof lacks {r}"))?;
            }
        }
    }
    Ok("derivable and checked in ed, hsm, hom, moc".into())
}

fn privacy_theorems() -> Check {
    let mut wanted: Vec<(CorpusName, &str)> = vec![(CorpusName::Ed, "S"), (CorpusName::Hsm, "T")];
    wanted.extend(["U", "T", "S", "M"].map(|c| (CorpusName::Hom, c)));
    let moc = common::build(CorpusName::Moc);
    let others: Vec<String> = moc.components.iter().filter(|c| c.as_str() != "C").map(|c| c.to_string()).collect();
    wanted.extend(others.iter().map(|c| (CorpusName::Moc, c.as_str())));
    for (name, comp) in &wanted {
        let a = common::build(*name);
        let v = derive(&a, &Property::has_none(comp, &Subject::var("br"))).map_err(|e| e.to_string())?;
        let p = v.proof.ok_or(format!("{name}: {comp} may access br"))?;
        ensure(validate_proof(&a, &p), format!("{name}: proof rejected"))?;
    }
    let c = ComponentId::new("C");
    let card = derive(&moc, &Property::has(c.as_str(), &Subject::var("br"), 1)).map_err(|e| e.to_string())?;
    ensure(card.derivable, "moc: the card cannot access br")?;
    Ok(format!("{} negative access facts", wanted.len()))
}

fn discrimination() -> Check {
    let expect = [
        (CorpusName::MiE, false),
        (CorpusName::MiE1, true),
        (CorpusName::MiE2, true),
        (CorpusName::MiE3, true),
    ];
    let mut slowest = Duration::ZERO;
    for (name, derivable) in expect {
        let a = common::build(name);
        let q = parse_query_for("hasnone T(qr)", &a).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let v = derive(&a, &q).map_err(|e| e.to_string())?;
        within(start, Duration::from_secs(1), name.as_str())?;
        slowest = slowest.max(start.elapsed());
        ensure(v.derivable == derivable, format!("{name}: derivable = {}", v.derivable))?;
    }
    Ok(format!("mi-e open, mi-e1/e2/e3 closed; slowest query {slowest:?}"))
}

fn soundness() -> Check {
    let start = Instant::now();
    let (mut none, mut has) = (0, 0);
    for (i, name) in CorpusName::ALL.into_iter().enumerate() {
        let a = common::build(name);
        let r = common::soundness::check(&a, common::soundness::SAMPLES, 1000 + i as u64)
            .map_err(|e| format!("{name}: {e}"))?;
        none += r.has_none_checked;
        has += r.has_witnessed;
    }
    within(start, Duration::from_secs(120), "soundness")?;
    Ok(format!(
        "{none} hasnone facts unrefuted, {has} has facts witnessed, {:?}",
        start.elapsed()
    ))
}

fn laws() -> Check {
    let results = common::laws::run_all();
    let failed: Vec<&str> = results.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    ensure(failed.is_empty(), format!("failed: {}", failed.join("; ")))?;
    Ok(format!("{}/{} laws", results.len(), results.len()))
}

fn attack() -> Check {
    let start = Instant::now();
    let base = Experiment {
        n: 8,
        q: 16,
        c: 2,
        budget: 0,
        b: None,
    };
    let (budget, acc) = budget_for_accuracy(base, 0.95, 20, 16, 1 << 16)
        .map_err(|e| e.to_string())?
        .ok_or("no budget reaches 0.95")?;
    let long = 4 * budget;
    let v1 = Experiment { c: 8, budget: long, ..base }.median_accuracy(20).map_err(|e| e.to_string())?;
    let v3 = Experiment {
        b: Some(4),
        budget: long,
        ..base
    }
    .median_accuracy(20)
    .map_err(|e| e.to_string())?;
    ensure(v1 <= 0.6, format!("C = N median {v1:.3}"))?;
    ensure(v3 <= 0.6, format!("B = 4 median {v3:.3}"))?;
    within(start, Duration::from_secs(60), "attack")?;
    Ok(format!(
        "unprotected {acc:.3} at {budget} queries; C=N {v1:.3}, B=4 {v3:.3} at {long} queries"
    ))
}

fn round_trip_and_determinism() -> Check {
    for name in CorpusName::ALL {
        let a = common::parse_file(name);
        let text = render(&a);
        let back = parse_architecture(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure(back == a && render(&back) == text, format!("{name}: round trip differs"))?;
    }
    let cmds: [&[&str]; 6] = [
        &["corpus", "--json"],
        &["check", "corpus/mi-e.parch", "--param", "n=32,N=4,Q=8,C=2"],
        &["prove", "corpus/hom.parch", "knows T (dec = Mu(br,bs,THR))", "--explain"],
        &["prove", "corpus/ed.parch", "hasnone S(br)", "--explain", "--json"],
        &["simulate", "corpus/mi-e2.parch", "--param", "N=4,Q=8,C=2,B=2", "--samples", "10", "--seed", "3"],
        &["attack", "--seeds", "4"],
    ];
    let mut distinct = BTreeSet::new();
    for c in cmds {
        let first = cli(c);
        ensure(first == cli(c), format!("{c:?} differs between runs"))?;
        distinct.insert(first.1);
    }
    Ok(format!("{} files, {} commands stable", CorpusName::ALL.len(), distinct.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("corpus verdict table", corpus_table_matches),
        ("integrity theorems", integrity_theorems),
        ("privacy theorems", privacy_theorems),
        ("extended-logic discrimination", discrimination),
        ("empirical soundness", soundness),
        ("semantics unit laws", laws),
        ("attack reproduction", attack),
        ("round trip and determinism", round_trip_and_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
