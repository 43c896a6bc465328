use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write;

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::proof::{Conclusion, Leaf, ProofTree, Rule};
use crate::model::{
    Architecture, ComponentId, DepPremise, Equation, Multiplicity, Pred, Primitive, ProofItem,
    Statement, Subject, Substitution, Term, WellFormednessError,
};

/// Default cap on the number of knowledge facts per saturation.
pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error("saturation budget of {limit} facts exhausted")]
    BudgetExceeded { limit: usize },
    #[error("query does not fit the architecture: {0:?}")]
    InvalidQuery(Vec<WellFormednessError>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProverConfig {
    pub budget: usize,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig {
            budget: DEFAULT_BUDGET,
        }
    }
}

impl ProverConfig {
    /// Reads `ARCHPROOF_BUDGET`, falling back to the default.
    pub fn from_env() -> Self {
        let budget = std::env::var("ARCHPROOF_BUDGET")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_BUDGET);
        ProverConfig { budget }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HasFact {
    pub component: ComponentId,
    pub subject: Subject,
    pub count: Multiplicity,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KnowFact {
    pub component: ComponentId,
    pub equation: Equation,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SaturationStats {
    pub has_facts: usize,
    pub know_facts: usize,
    /// Fixpoint rounds for access facts plus processed knowledge facts.
    pub iterations: usize,
    pub universe: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum HasProv {
    Primitive(Rule, usize),
    Dep(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum KnowProv {
    Primitive { rule: Rule, prim: usize, trust: Option<usize> },
    Ded { rule: usize, premises: Vec<usize> },
    Sym(usize),
    Trans(usize, usize),
    Subst { eq: usize, target: usize },
}

#[derive(Clone, Debug, Default)]
struct KnowBase {
    facts: Vec<Equation>,
    index: HashMap<Equation, usize>,
    prov: Vec<KnowProv>,
}

/// Closed set of access and knowledge facts of one architecture.
#[derive(Clone, Debug)]
pub struct FactBase {
    arch: Architecture,
    universe: BTreeSet<Term>,
    config: ProverConfig,
    has: BTreeMap<(ComponentId, Subject), (Multiplicity, HasProv)>,
    know: BTreeMap<ComponentId, KnowBase>,
    stats: SaturationStats,
}

/// Saturates with the architecture's own term universe.
pub fn saturate(arch: &Architecture) -> Result<FactBase, ProverError> {
    saturate_with(arch, &BTreeSet::new(), ProverConfig::from_env())
}

/// Saturates with the universe extended by `extra` (closed under subterms).
pub fn saturate_with(
    arch: &Architecture,
    extra: &BTreeSet<Term>,
    config: ProverConfig,
) -> Result<FactBase, ProverError> {
    let mut universe = arch.ground_terms();
    for t in extra {
        t.visit(&mut |s| {
            if s.is_ground() {
                universe.insert(s.clone());
            }
        });
    }
    let mut fb = FactBase {
        arch: arch.clone(),
        stats: SaturationStats {
            universe: universe.len(),
            ..SaturationStats::default()
        },
        universe,
        config,
        has: BTreeMap::new(),
        know: BTreeMap::new(),
    };
    fb.saturate_has();
    let comps: Vec<ComponentId> = arch.components.iter().cloned().collect();
    let mut total = 0;
    for c in comps {
        let kb = fb.saturate_know(&c, total)?;
        total += kb.facts.len();
        fb.know.insert(c, kb);
    }
    fb.stats.has_facts = fb.has.len();
    fb.stats.know_facts = total;
    Ok(fb)
}

/// Access facts only; knowledge is left empty.
pub(crate) fn saturate_access(arch: &Architecture) -> FactBase {
    let mut fb = FactBase {
        arch: arch.clone(),
        universe: BTreeSet::new(),
        config: ProverConfig::default(),
        has: BTreeMap::new(),
        know: BTreeMap::new(),
        stats: SaturationStats::default(),
    };
    fb.saturate_has();
    fb.stats.has_facts = fb.has.len();
    fb
}

impl FactBase {
    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn universe(&self) -> &BTreeSet<Term> {
        &self.universe
    }

    pub fn stats(&self) -> SaturationStats {
        self.stats
    }

    /// Largest derivable count of `subject` at `comp`.
    pub fn has_count(&self, comp: &ComponentId, subject: &Subject) -> Option<Multiplicity> {
        self.has.get(&(comp.clone(), subject.clone())).map(|(m, _)| *m)
    }

    /// `Has_comp(subject^(n))`, closed downward as rule H4 allows.
    pub fn has(&self, comp: &ComponentId, subject: &Subject, n: u64) -> bool {
        n >= 1 && self.has_count(comp, subject).is_some_and(|m| m.covers(n))
    }

    pub fn has_facts(&self) -> Vec<HasFact> {
        self.has
            .iter()
            .map(|((c, s), (m, _))| HasFact {
                component: c.clone(),
                subject: s.clone(),
                count: *m,
            })
            .collect()
    }

    pub fn know_facts(&self) -> Vec<KnowFact> {
        self.know
            .iter()
            .flat_map(|(c, kb)| {
                kb.facts.iter().map(move |e| KnowFact {
                    component: c.clone(),
                    equation: e.clone(),
                })
            })
            .collect()
    }

    /// Whether `K_comp(eq)` holds. Equations over terms outside the universe
    /// are decided by saturating again with those terms added.
    pub fn knows(&self, comp: &ComponentId, eq: &Equation) -> bool {
        if self.know_index(comp, eq).is_some() {
            return true;
        }
        let outside: BTreeSet<Term> = eq
            .terms()
            .into_iter()
            .filter(|t| !self.universe.contains(*t))
            .cloned()
            .collect();
        if outside.is_empty() {
            return false;
        }
        saturate_with(&self.arch, &outside, self.config)
            .map(|fb| fb.know_index(comp, eq).is_some())
            .unwrap_or(false)
    }

    pub(crate) fn know_index(&self, comp: &ComponentId, eq: &Equation) -> Option<usize> {
        self.know.get(comp).and_then(|kb| kb.index.get(eq).copied())
    }

    /// SHA-256 over the canonical listing of the access facts; negations
    /// are read from exactly this part of the base.
    pub fn access_digest(&self) -> String {
        format!("{:x}", Sha256::digest(self.access_listing().as_bytes()))
    }

    fn access_listing(&self) -> String {
        let mut listing = String::new();
        for f in self.has_facts() {
            let _ = writeln!(listing, "has {} {} {}", f.component, f.subject, f.count);
        }
        listing
    }

    /// SHA-256 over the canonical listing of every fact.
    pub fn digest(&self) -> String {
        let mut listing = self.access_listing();
        let mut know: Vec<String> = self
            .know_facts()
            .into_iter()
            .map(|k| format!("knows {} {}", k.component, k.equation))
            .collect();
        know.sort();
        for k in know {
            listing.push_str(&k);
            listing.push('\n');
        }
        format!("{:x}", Sha256::digest(listing.as_bytes()))
    }

    // ----- access facts ------------------------------------------------

    fn offer(&mut self, comp: &ComponentId, subject: Subject, count: Multiplicity, prov: HasProv) -> bool {
        let key = (comp.clone(), subject);
        match self.has.get(&key) {
            Some((m, _)) if *m >= count => false,
            _ => {
                self.has.insert(key, (count, prov));
                true
            }
        }
    }

    fn saturate_has(&mut self) {
        let prims = self.arch.primitives.clone();
        for (i, p) in prims.iter().enumerate() {
            match p {
                Primitive::HasVar { comp, var, mult } => {
                    self.offer(comp, Subject::Var(var.clone()), *mult, HasProv::Primitive(Rule::H1, i));
                }
                Primitive::HasConst { comp, constant } => {
                    self.offer(
                        comp,
                        Subject::Const(constant.clone()),
                        Multiplicity::ONE,
                        HasProv::Primitive(Rule::H1p, i),
                    );
                }
                Primitive::Receive {
                    receiver,
                    items,
                    mult,
                    ..
                } => {
                    for it in items {
                        let (rule, count) = match it {
                            Subject::Var(_) => (Rule::H2, *mult),
                            Subject::Const(_) => (Rule::H2p, Multiplicity::ONE),
                        };
                        self.offer(receiver, it.clone(), count, HasProv::Primitive(rule, i));
                    }
                }
                Primitive::Compute {
                    group, target, mult, ..
                } => {
                    for g in group {
                        self.offer(g, Subject::Var(target.clone()), *mult, HasProv::Primitive(Rule::H3, i));
                    }
                }
                _ => {}
            }
        }
        let deps = self.arch.deps.clone();
        loop {
            self.stats.iterations += 1;
            let mut changed = false;
            for (i, d) in deps.iter().enumerate() {
                let met = d.premises.iter().all(|p| match p {
                    DepPremise::Var { var, count } => self.has(&d.owner, &Subject::Var(var.clone()), *count),
                    DepPremise::Const(c) => self.has(&d.owner, &Subject::Const(c.clone()), 1),
                });
                if met {
                    changed |= self.offer(&d.owner, d.target.clone(), Multiplicity::ONE, HasProv::Dep(i));
                }
            }
            if !changed {
                break;
            }
        }
    }

    // ----- knowledge facts ---------------------------------------------

    fn saturate_know(&mut self, comp: &ComponentId, already: usize) -> Result<KnowBase, ProverError> {
        let mut kb = KnowBase::default();
        let mut queue = VecDeque::new();
        let budget = self.config.budget;
        let universe = &self.universe;
        let arch = &self.arch;
        let push = |kb: &mut KnowBase, queue: &mut VecDeque<usize>, eq: Equation, prov: KnowProv| {
            if eq.pred == Pred::Equal && eq.lhs == eq.rhs {
                return Ok(());
            }
            if kb.index.contains_key(&eq) || !universe.contains(&eq.lhs) || !universe.contains(&eq.rhs) {
                return Ok(());
            }
            if already + kb.facts.len() >= budget {
                return Err(ProverError::BudgetExceeded { limit: budget });
            }
            let idx = kb.facts.len();
            kb.index.insert(eq.clone(), idx);
            kb.facts.push(eq);
            kb.prov.push(prov);
            queue.push_back(idx);
            Ok(())
        };

        for (i, p) in arch.primitives.iter().enumerate() {
            match p {
                Primitive::Compute {
                    group, target, rhs, ..
                } if group.contains(comp) => {
                    let eq = Equation::eq(Term::of_var(target), rhs.clone());
                    push(&mut kb, &mut queue, eq, KnowProv::Primitive {
                        rule: Rule::K1,
                        prim: i,
                        trust: None,
                    })?;
                }
                Primitive::Verify {
                    comp: c, statement, ..
                } if c == comp => match statement {
                    Statement::Attest { issuer, claims } => {
                        if let Some(t) = arch.trust_index(comp, issuer) {
                            for e in claims {
                                push(&mut kb, &mut queue, e.clone(), KnowProv::Primitive {
                                    rule: Rule::K5,
                                    prim: i,
                                    trust: Some(t),
                                })?;
                            }
                        }
                    }
                    Statement::Proof { payload, .. } => {
                        for item in payload {
                            match item {
                                ProofItem::Eq(e) => push(&mut kb, &mut queue, e.clone(), KnowProv::Primitive {
                                    rule: Rule::K3,
                                    prim: i,
                                    trust: None,
                                })?,
                                ProofItem::Attest { issuer, claims } => {
                                    if let Some(t) = arch.trust_index(comp, issuer) {
                                        for e in claims {
                                            push(&mut kb, &mut queue, e.clone(), KnowProv::Primitive {
                                                rule: Rule::K4,
                                                prim: i,
                                                trust: Some(t),
                                            })?;
                                        }
                                    }
                                }
                            }
                        }
                    }
                },
                _ => {}
            }
        }
        let rules: Vec<(usize, &crate::model::DeductiveRule)> = arch
            .rules
            .iter()
            .enumerate()
            .filter(|(_, r)| r.applies_to(comp))
            .collect();
        for (ri, r) in &rules {
            if r.premises.is_empty() && r.conclusion.is_ground() {
                push(&mut kb, &mut queue, r.conclusion.clone(), KnowProv::Ded {
                    rule: *ri,
                    premises: vec![],
                })?;
            }
        }

        let mut rounds = 0;
        while let Some(fi) = queue.pop_front() {
            rounds += 1;
            let f = kb.facts[fi].clone();

            for (ri, r) in &rules {
                for pos in 0..r.premises.len() {
                    let mut s = Substitution::new();
                    if !r.premises[pos].match_into(&f, &mut s) {
                        continue;
                    }
                    let mut found = Vec::new();
                    let mut chosen = vec![usize::MAX; r.premises.len()];
                    chosen[pos] = fi;
                    match_rest(&r.premises, 0, pos, &kb.facts, s, &mut chosen, &mut found);
                    for (subst, picks) in found {
                        let concl = r.conclusion.substitute(&subst);
                        if concl.is_ground() {
                            push(&mut kb, &mut queue, concl, KnowProv::Ded {
                                rule: *ri,
                                premises: picks,
                            })?;
                        }
                    }
                }
            }

            if f.pred == Pred::Equal {
                let n = kb.facts.len();
                for gi in 0..n {
                    let g = kb.facts[gi].clone();
                    if g.pred != Pred::Equal {
                        continue;
                    }
                    if f.rhs == g.lhs {
                        push(&mut kb, &mut queue, Equation::eq(f.lhs.clone(), g.rhs.clone()), KnowProv::Trans(fi, gi))?;
                    }
                    if g.rhs == f.lhs {
                        push(&mut kb, &mut queue, Equation::eq(g.lhs.clone(), f.rhs.clone()), KnowProv::Trans(gi, fi))?;
                    }
                }
                push(&mut kb, &mut queue, f.flipped(), KnowProv::Sym(fi))?;
            }

            let n = kb.facts.len();
            for gi in 0..n {
                let g = kb.facts[gi].clone();
                if f.pred == Pred::Equal {
                    for e in inner_rewrites(&g, &f.lhs, &f.rhs) {
                        push(&mut kb, &mut queue, e, KnowProv::Subst { eq: fi, target: gi })?;
                    }
                }
                if g.pred == Pred::Equal && gi != fi {
                    for e in inner_rewrites(&f, &g.lhs, &g.rhs) {
                        push(&mut kb, &mut queue, e, KnowProv::Subst { eq: gi, target: fi })?;
                    }
                }
            }
        }
        self.stats.iterations += rounds;
        Ok(kb)
    }

    // ----- proofs ------------------------------------------------------

    /// Proof of `Has_comp(subject^(n))`, with an H4 step when `n` is below
    /// the stored maximum.
    pub fn has_proof(&self, comp: &ComponentId, subject: &Subject, n: u64) -> Option<ProofTree> {
        let (stored, prov) = *self.has.get(&(comp.clone(), subject.clone()))?;
        if !stored.covers(n) || n == 0 {
            return None;
        }
        let base = self.has_node(comp, subject, stored, prov);
        let wanted = match subject {
            Subject::Const(_) => Multiplicity::ONE,
            Subject::Var(_) => Multiplicity::finite(n).expect("n >= 1"),
        };
        if subject.is_const() || wanted == stored {
            return Some(base);
        }
        Some(ProofTree::node(
            Rule::H4,
            Conclusion::Has {
                comp: comp.clone(),
                subject: subject.clone(),
                count: wanted,
            },
            vec![base],
            vec![],
        ))
    }

    fn has_node(&self, comp: &ComponentId, subject: &Subject, count: Multiplicity, prov: HasProv) -> ProofTree {
        let conclusion = Conclusion::Has {
            comp: comp.clone(),
            subject: subject.clone(),
            count,
        };
        match prov {
            HasProv::Primitive(rule, i) => ProofTree::node(
                rule,
                conclusion,
                vec![],
                vec![Leaf::Primitive(self.arch.primitives[i].clone())],
            ),
            HasProv::Dep(i) => {
                let d = &self.arch.deps[i];
                let premises = d
                    .premises
                    .iter()
                    .map(|p| {
                        let (s, n) = match p {
                            DepPremise::Var { var, count } => (Subject::Var(var.clone()), *count),
                            DepPremise::Const(c) => (Subject::Const(c.clone()), 1),
                        };
                        self.has_proof(comp, &s, n).expect("dependence premise was met")
                    })
                    .collect();
                let rule = if subject.is_const() { Rule::H5p } else { Rule::H5 };
                ProofTree::node(rule, conclusion, premises, vec![Leaf::Dep(d.clone())])
            }
        }
    }

    pub fn has_none_proof(&self, comp: &ComponentId, subject: &Subject) -> Option<ProofTree> {
        if self.has_count(comp, subject).is_some() {
            return None;
        }
        let rule = if subject.is_const() { Rule::HNp } else { Rule::HN };
        Some(ProofTree::node(
            rule,
            Conclusion::HasNone {
                comp: comp.clone(),
                subject: subject.clone(),
            },
            vec![],
            vec![Leaf::Digest(self.access_digest())],
        ))
    }

    pub fn know_proof(&self, comp: &ComponentId, eq: &Equation) -> Option<ProofTree> {
        let idx = self.know_index(comp, eq)?;
        Some(self.know_node(comp, &self.know[comp], idx))
    }

    fn know_node(&self, comp: &ComponentId, kb: &KnowBase, idx: usize) -> ProofTree {
        let conclusion = Conclusion::Know {
            comp: comp.clone(),
            eq: kb.facts[idx].clone(),
        };
        let sub = |i: usize| self.know_node(comp, kb, i);
        match &kb.prov[idx] {
            KnowProv::Primitive { rule, prim, trust } => {
                let mut leaves = vec![Leaf::Primitive(self.arch.primitives[*prim].clone())];
                if let Some(t) = trust {
                    leaves.push(Leaf::Primitive(self.arch.primitives[*t].clone()));
                }
                ProofTree::node(*rule, conclusion, vec![], leaves)
            }
            KnowProv::Ded { rule, premises } => ProofTree::node(
                Rule::KDed,
                conclusion,
                premises.iter().map(|&i| sub(i)).collect(),
                vec![Leaf::Rule(self.arch.rules[*rule].clone())],
            ),
            KnowProv::Sym(a) => ProofTree::node(Rule::EqSym, conclusion, vec![sub(*a)], vec![]),
            KnowProv::Trans(a, b) => ProofTree::node(Rule::EqTrans, conclusion, vec![sub(*a), sub(*b)], vec![]),
            KnowProv::Subst { eq, target } => {
                ProofTree::node(Rule::EqSubst, conclusion, vec![sub(*eq), sub(*target)], vec![])
            }
        }
    }
}

/// Matches the premises other than `skip` against the fact list, collecting
/// every consistent substitution together with the fact indices used.
fn match_rest(
    premises: &[Equation],
    at: usize,
    skip: usize,
    facts: &[Equation],
    subst: Substitution,
    chosen: &mut Vec<usize>,
    found: &mut Vec<(Substitution, Vec<usize>)>,
) {
    if at == premises.len() {
        found.push((subst, chosen.clone()));
        return;
    }
    if at == skip {
        return match_rest(premises, at + 1, skip, facts, subst, chosen, found);
    }
    for (gi, g) in facts.iter().enumerate() {
        let mut s = subst.clone();
        if premises[at].match_into(g, &mut s) {
            chosen[at] = gi;
            match_rest(premises, at + 1, skip, facts, s, chosen, found);
        }
    }
}

/// Single-position rewrites of `from` into `to` on either side of `eq`.
pub(crate) fn rewrites(eq: &Equation, from: &Term, to: &Term) -> Vec<Equation> {
    let mut out = Vec::new();
    for l in eq.lhs.single_rewrites(from, to) {
        out.push(Equation {
            pred: eq.pred,
            lhs: l,
            rhs: eq.rhs.clone(),
        });
    }
    for r in eq.rhs.single_rewrites(from, to) {
        out.push(Equation {
            pred: eq.pred,
            lhs: eq.lhs.clone(),
            rhs: r,
        });
    }
    out
}

/// Rewrites used during saturation: replacing a whole side of an equality
/// is left to symmetry and transitivity.
fn inner_rewrites(eq: &Equation, from: &Term, to: &Term) -> Vec<Equation> {
    let mut out = rewrites(eq, from, to);
    if eq.pred == Pred::Equal {
        out.retain(|e| !((eq.lhs == *from && e.lhs == *to && e.rhs == eq.rhs) || (eq.rhs == *from && e.rhs == *to && e.lhs == eq.lhs)));
    }
    out
}
