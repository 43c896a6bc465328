use archproof::prover::{ProofTree, Verdict};
use archproof::report::TableRow;
use archproof::semantics::Event;
use serde_json::{json, Value};

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

pub fn tree(t: &ProofTree) -> Value {
    json!({
        "rule": t.rule.label(),
        "conclusion": t.conclusion.to_string(),
        "by": t.leaves.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "premises": t.premises.iter().map(tree).collect::<Vec<_>>(),
    })
}

pub fn verdict(v: &Verdict, with_proof: bool) -> Value {
    let s = v.stats;
    let mut out = json!({
        "query": v.query.to_string(),
        "verdict": if v.derivable { "derivable" } else { "not derivable" },
    });
    if with_proof {
        out["proof"] = v.proof.as_ref().map_or(Value::Null, tree);
        out["access_derivation"] = v.refutation.as_ref().map_or(Value::Null, tree);
    }
    out["saturation"] = json!({
        "access_facts": s.has_facts,
        "knowledge_facts": s.know_facts,
        "iterations": s.iterations,
        "terms": s.universe,
    });
    out
}

pub fn trace(t: &[Event]) -> Value {
    Value::Array(
        t.iter()
            .map(|e| Value::Array(e.to_string().split('\t').map(|f| Value::String(f.to_owned())).collect()))
            .collect(),
    )
}

pub fn row(r: &TableRow) -> Value {
    json!({
        "arch": r.arch.as_str(),
        "br": r.br,
        "bs": r.bs,
        "trust": r.trust.iter().map(|(a, b)| vec![a, b]).collect::<Vec<_>>(),
        "integrity": r.integrity,
    })
}
