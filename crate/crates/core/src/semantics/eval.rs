use std::fmt;

use super::closure::entails;
use super::compat::Quota;
use super::covering::{dep_ready, flow_order, prim_event, witness_trace};
use super::event::{Event, Trace, Value};
use super::sample::Sampler;
use super::state::GlobalState;
use crate::model::{Architecture, ComponentId, DeductiveRule, Equation, Property, Subject};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SemanticOutcome {
    /// A concrete trace exhibits the property.
    Witnessed,
    /// No counterexample among the sampled states.
    WitnessedUpToBudget,
    /// A concrete trace violates the property.
    Refuted,
    /// Neither a witness nor a counterexample was found.
    Inconclusive,
}

impl fmt::Display for SemanticOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SemanticOutcome::Witnessed => "witnessed",
            SemanticOutcome::WitnessedUpToBudget => "witnessed up to budget",
            SemanticOutcome::Refuted => "refuted",
            SemanticOutcome::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SemanticBudget {
    pub samples: usize,
    pub max_len: usize,
    pub seed: u64,
    /// Events allowed when extending a state within its session; by default
    /// twice the length of the covering trace.
    pub extension: Option<usize>,
}

impl Default for SemanticBudget {
    fn default() -> Self {
        SemanticBudget {
            samples: 1000,
            max_len: 40,
            seed: 0,
            extension: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemanticVerdict {
    pub outcome: SemanticOutcome,
    /// Witness for `Witnessed`, counterexample for `Refuted`.
    pub trace: Option<Trace>,
}

impl SemanticVerdict {
    fn new(outcome: SemanticOutcome, trace: Option<Trace>) -> Self {
        SemanticVerdict { outcome, trace }
    }
}

/// Checks `prop` against executions of `arch`.
pub fn eval_property_semantic(arch: &Architecture, prop: &Property, budget: &SemanticBudget) -> SemanticVerdict {
    match prop {
        Property::HasVar { comp, var, count } => eval_has(arch, comp, &Subject::Var(var.clone()), *count, budget),
        Property::HasConst { comp, constant } => eval_has(arch, comp, &Subject::Const(constant.clone()), 1, budget),
        Property::HasNoneVar { comp, var } => eval_has_none(arch, comp, &Subject::Var(var.clone()), budget),
        Property::HasNoneConst { comp, constant } => {
            eval_has_none(arch, comp, &Subject::Const(constant.clone()), budget)
        }
        Property::Know { comp, eq } => eval_know(arch, comp, eq, budget),
        Property::Conj(parts) => {
            let vs: Vec<SemanticVerdict> = parts.iter().map(|p| eval_property_semantic(arch, p, budget)).collect();
            if let Some(v) = vs.iter().find(|v| v.outcome == SemanticOutcome::Refuted) {
                return v.clone();
            }
            if vs.iter().any(|v| v.outcome == SemanticOutcome::Inconclusive) {
                return SemanticVerdict::new(SemanticOutcome::Inconclusive, None);
            }
            if vs.iter().all(|v| v.outcome == SemanticOutcome::Witnessed) {
                return SemanticVerdict::new(SemanticOutcome::Witnessed, None);
            }
            SemanticVerdict::new(SemanticOutcome::WitnessedUpToBudget, None)
        }
    }
}

/// Shortest prefix of `trace` after which `pred` holds.
fn first_prefix(arch: &Architecture, trace: &[Event], pred: impl Fn(&GlobalState) -> bool) -> Option<Trace> {
    let mut st = GlobalState::init(arch);
    if pred(&st) {
        return Some(Vec::new());
    }
    for (i, e) in trace.iter().enumerate() {
        st.step(arch, e);
        if pred(&st) {
            return Some(trace[..=i].to_vec());
        }
    }
    None
}

/// Searches the witness trace, then random walks, for a state satisfying `pred`.
fn search(arch: &Architecture, rounds: u64, budget: &SemanticBudget, pred: impl Fn(&GlobalState) -> bool) -> Option<Trace> {
    if let Some(t) = first_prefix(arch, &witness_trace(arch, rounds), &pred) {
        return Some(t);
    }
    let mut s = Sampler::new(arch, budget.seed, budget.max_len);
    for _ in 0..budget.samples {
        let mut hit = None;
        let w = s.walk(|_, st| {
            if hit.is_none() && pred(st) {
                hit = Some(());
            }
        });
        if hit.is_some() {
            return first_prefix(arch, &w.trace, &pred);
        }
    }
    None
}

fn eval_has(arch: &Architecture, comp: &ComponentId, s: &Subject, n: u64, budget: &SemanticBudget) -> SemanticVerdict {
    let rounds = arch.bound().get().unwrap_or(1).max(n);
    match search(arch, rounds, budget, |st| st.has(comp, s, n)) {
        Some(t) => SemanticVerdict::new(SemanticOutcome::Witnessed, Some(t)),
        None => SemanticVerdict::new(SemanticOutcome::Inconclusive, None),
    }
}

fn eval_has_none(arch: &Architecture, comp: &ComponentId, s: &Subject, budget: &SemanticBudget) -> SemanticVerdict {
    let rounds = arch.bound().get().unwrap_or(1);
    match search(arch, rounds, budget, |st| st.has(comp, s, 1)) {
        Some(t) => SemanticVerdict::new(SemanticOutcome::Refuted, Some(t)),
        None => SemanticVerdict::new(SemanticOutcome::Inconclusive, None),
    }
}

fn knows_in(st: &GlobalState, comp: &ComponentId, rules: &[&DeductiveRule], eq: &Equation) -> bool {
    match st.live(comp) {
        Some(s) => {
            let facts: Vec<Equation> = s.knows.iter().cloned().collect();
            entails(&facts, rules, eq)
        }
        None => false,
    }
}

/// Extends `st` without leaving its session until `comp` can derive `eq`.
fn extend_to_know(
    arch: &Architecture,
    mut st: GlobalState,
    mut quota: Quota,
    comp: &ComponentId,
    rules: &[&DeductiveRule],
    eq: &Equation,
    steps: usize,
) -> bool {
    if knows_in(&st, comp, rules, eq) {
        return true;
    }
    let order = flow_order(arch);
    let mut token = 0u32;
    let mut used = 0;
    while used < steps {
        let mut progress = false;
        for &i in &order {
            if used >= steps {
                break;
            }
            if !quota.available(arch, i) {
                continue;
            }
            let mut fresh = || {
                token += 1;
                Value::Token(token)
            };
            let Some(e) = prim_event(arch, i, &st, &mut fresh) else {
                continue;
            };
            quota.take(i);
            st.step(arch, &e);
            used += 1;
            progress = true;
            if knows_in(&st, comp, rules, eq) {
                return true;
            }
        }
        for i in 0..arch.deps.len() {
            if used >= steps {
                break;
            }
            let d = &arch.deps[i];
            if st.live(&d.owner).is_some_and(|s| s.current(&d.target).is_some()) {
                continue;
            }
            if let Some(e) = dep_ready(arch, i, &st) {
                st.step(arch, &e);
                used += 1;
                progress = true;
                if knows_in(&st, comp, rules, eq) {
                    return true;
                }
            }
        }
        if !progress {
            return false;
        }
    }
    false
}

fn eval_know(arch: &Architecture, comp: &ComponentId, eq: &Equation, budget: &SemanticBudget) -> SemanticVerdict {
    let rules: Vec<&DeductiveRule> = arch.rules.iter().filter(|r| r.applies_to(comp)).collect();
    let steps = budget
        .extension
        .unwrap_or_else(|| 2 * witness_trace(arch, arch.bound().get().unwrap_or(1)).len().max(1));
    if !extend_to_know(arch, GlobalState::init(arch), Quota::new(arch), comp, &rules, eq, steps) {
        return SemanticVerdict::new(SemanticOutcome::Refuted, Some(Vec::new()));
    }
    let mut s = Sampler::new(arch, budget.seed, budget.max_len);
    for _ in 0..budget.samples {
        let w = s.walk(|_, _| {});
        if !extend_to_know(arch, w.state, w.quota, comp, &rules, eq, steps) {
            return SemanticVerdict::new(SemanticOutcome::Refuted, Some(w.trace));
        }
    }
    SemanticVerdict::new(SemanticOutcome::WitnessedUpToBudget, None)
}
