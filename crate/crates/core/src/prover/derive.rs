use std::fmt::Write;

use super::facts::{saturate_with, FactBase, ProverConfig, ProverError, SaturationStats};
use super::proof::{Conclusion, ProofTree, Rule};
use crate::model::{Architecture, ComponentId, Property, Subject};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub query: Property,
    pub derivable: bool,
    /// Present exactly when `derivable`.
    pub proof: Option<ProofTree>,
    /// For a failed negation, the derivation of the access it denies.
    pub refutation: Option<ProofTree>,
    pub stats: SaturationStats,
}

/// Decides `arch ⊢ query`, saturating over the architecture's terms and the query's.
pub fn derive(arch: &Architecture, query: &Property) -> Result<Verdict, ProverError> {
    derive_with(arch, query, ProverConfig::from_env())
}

pub fn derive_with(arch: &Architecture, query: &Property, config: ProverConfig) -> Result<Verdict, ProverError> {
    let errs = query.validate(arch);
    if !errs.is_empty() {
        return Err(ProverError::InvalidQuery(errs));
    }
    let fb = saturate_with(arch, &query.terms(), config)?;
    Ok(derive_in(&fb, query))
}

/// Decides a query against an existing base. Knowledge queries over terms
/// outside the base's universe are answered as not derivable; use
/// [`derive`] for those.
pub fn derive_in(fb: &FactBase, query: &Property) -> Verdict {
    let (proof, refutation) = prove(fb, query);
    Verdict {
        query: query.clone(),
        derivable: proof.is_some(),
        proof,
        refutation,
        stats: fb.stats(),
    }
}

fn prove(fb: &FactBase, p: &Property) -> (Option<ProofTree>, Option<ProofTree>) {
    match p {
        Property::HasVar { comp, var, count } => (fb.has_proof(comp, &Subject::Var(var.clone()), *count), None),
        Property::HasConst { comp, constant } => (fb.has_proof(comp, &Subject::Const(constant.clone()), 1), None),
        Property::HasNoneVar { comp, var } => negation(fb, comp, &Subject::Var(var.clone())),
        Property::HasNoneConst { comp, constant } => negation(fb, comp, &Subject::Const(constant.clone())),
        Property::Know { comp, eq } => (fb.know_proof(comp, eq), None),
        Property::Conj(ps) => {
            let mut children = Vec::with_capacity(ps.len());
            for q in ps {
                match prove(fb, q).0 {
                    Some(t) => children.push(t),
                    None => return (None, None),
                }
            }
            let comps: Vec<&ComponentId> = ps
                .iter()
                .filter_map(|q| match q {
                    Property::Know { comp, .. } => Some(comp),
                    _ => None,
                })
                .collect();
            let same_knower = !ps.is_empty() && comps.len() == ps.len() && comps.windows(2).all(|w| w[0] == w[1]);
            let rule = if same_knower { Rule::KAnd } else { Rule::IAnd };
            let conclusion = Conclusion::Conj(children.iter().map(|c| c.conclusion.clone()).collect());
            (Some(ProofTree::node(rule, conclusion, children, vec![])), None)
        }
    }
}

fn negation(fb: &FactBase, comp: &ComponentId, s: &Subject) -> (Option<ProofTree>, Option<ProofTree>) {
    (fb.has_none_proof(comp, s), fb.has_proof(comp, s, 1))
}

/// Deterministic, indented rendering of a verdict and its derivation.
pub fn explain(verdict: &Verdict) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "query: {}", verdict.query);
    let _ = writeln!(
        out,
        "verdict: {}",
        if verdict.derivable { "derivable" } else { "not derivable" }
    );
    if let Some(p) = &verdict.proof {
        out.push_str("proof:\n");
        out.push_str(&indent(&p.render()));
    }
    if let Some(r) = &verdict.refutation {
        out.push_str("access derivation:\n");
        out.push_str(&indent(&r.render()));
    }
    let s = verdict.stats;
    let _ = writeln!(
        out,
        "saturation: {} access facts, {} knowledge facts, {} iterations, {} terms",
        s.has_facts, s.know_facts, s.iterations, s.universe
    );
    out
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}\n")).collect()
}
