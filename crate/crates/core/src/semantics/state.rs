use std::collections::{BTreeMap, BTreeSet};

use super::event::{Event, Value};
use crate::model::{
    Architecture, ComponentId, ConstId, Equation, Primitive, ProofItem, Statement, Subject, Term, VarId,
};

/// Variable and constant histories plus the per-session knowledge of one
/// component. `None` is the undefined value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiveState {
    pub vars: BTreeMap<VarId, Vec<Option<Value>>>,
    pub consts: BTreeMap<ConstId, Vec<Option<Value>>>,
    pub knows: BTreeSet<Equation>,
    pub trusts: BTreeSet<ComponentId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentState {
    Live(LiveState),
    Error,
}

impl ComponentState {
    pub fn live(&self) -> Option<&LiveState> {
        match self {
            ComponentState::Live(s) => Some(s),
            ComponentState::Error => None,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self, ComponentState::Error)
    }
}

impl LiveState {
    fn slots(&self, s: &Subject) -> &[Option<Value>] {
        match s {
            Subject::Var(v) => self.vars.get(v).map_or(&[], Vec::as_slice),
            Subject::Const(c) => self.consts.get(c).map_or(&[], Vec::as_slice),
        }
    }

    /// Number of fully-defined entries in the history of `s`.
    pub fn defined_count(&self, s: &Subject) -> usize {
        self.slots(s).iter().filter(|v| v.is_some()).count()
    }

    pub fn current(&self, s: &Subject) -> Option<&Value> {
        self.slots(s).last().and_then(Option::as_ref)
    }

    /// The most recent defined value of `s`, any session.
    pub fn latest(&self, s: &Subject) -> Option<&Value> {
        self.slots(s).iter().rev().find_map(Option::as_ref)
    }

    fn assign(&mut self, s: &Subject, v: Value) {
        let list = match s {
            Subject::Var(x) => self.vars.get_mut(x),
            Subject::Const(c) => self.consts.get_mut(c),
        };
        if let Some(slot) = list.and_then(|l| l.last_mut()) {
            *slot = Some(v);
        }
    }

    /// Whether every input of `rhs` is available: `w` defined values for a
    /// variable read through a window of `w`, a current value for a constant.
    pub fn ready_for(&self, rhs: &Term) -> bool {
        let mut ok = true;
        rhs.visit(&mut |t| match t {
            Term::Var { var, window, .. } => {
                let w = window.map_or(1, |w| w.get() as usize);
                ok &= self.defined_count(&Subject::Var(var.clone())) >= w;
            }
            Term::Const(c) => ok &= self.current(&Subject::Const(c.clone())).is_some(),
            _ => {}
        });
        ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalState {
    pub comps: BTreeMap<ComponentId, ComponentState>,
    pub session: u64,
}

impl GlobalState {
    /// Every history is `[undefined]`, knowledge is the trust relation.
    pub fn init(arch: &Architecture) -> Self {
        let comps = arch
            .components
            .iter()
            .map(|c| {
                let trusts = arch
                    .primitives
                    .iter()
                    .filter_map(|p| match p {
                        Primitive::Trust { truster, trustee } if truster == c => Some(trustee.clone()),
                        _ => None,
                    })
                    .collect();
                let s = LiveState {
                    vars: arch.variables.keys().map(|v| (v.clone(), vec![None])).collect(),
                    consts: arch.constants.iter().map(|k| (k.clone(), vec![None])).collect(),
                    knows: BTreeSet::new(),
                    trusts,
                };
                (c.clone(), ComponentState::Live(s))
            })
            .collect();
        GlobalState { comps, session: 1 }
    }

    pub fn component(&self, c: &ComponentId) -> Option<&ComponentState> {
        self.comps.get(c)
    }

    pub fn live(&self, c: &ComponentId) -> Option<&LiveState> {
        self.comps.get(c).and_then(ComponentState::live)
    }

    fn live_mut(&mut self, c: &ComponentId) -> Option<&mut LiveState> {
        match self.comps.get_mut(c) {
            Some(ComponentState::Live(s)) => Some(s),
            _ => None,
        }
    }

    /// `Has_i(s^(n))` holds in this state.
    pub fn has(&self, c: &ComponentId, s: &Subject, n: u64) -> bool {
        self.live(c).is_some_and(|st| st.defined_count(s) as u64 >= n)
    }

    /// A computation by `group` would succeed: some member is live and every
    /// live member has the inputs.
    pub fn compute_ready(&self, group: &[ComponentId], rhs: &Term) -> bool {
        let live: Vec<&LiveState> = group.iter().filter_map(|g| self.live(g)).collect();
        !live.is_empty() && live.iter().all(|s| s.ready_for(rhs))
    }

    /// Applies one event in place.
    pub fn step(&mut self, arch: &Architecture, event: &Event) {
        match event {
            Event::Has { comp, var, value } => {
                if let Some(s) = self.live_mut(comp) {
                    s.assign(&Subject::Var(var.clone()), value.clone());
                }
            }
            Event::HasConst { comp, constant } => {
                if let Some(s) = self.live_mut(comp) {
                    s.assign(&Subject::Const(constant.clone()), Value::Const(constant.clone()));
                }
            }
            Event::Receive {
                receiver, assignments, ..
            } => {
                if let Some(s) = self.live_mut(receiver) {
                    for (subj, v) in assignments {
                        s.assign(subj, v.clone());
                    }
                }
            }
            Event::Compute { group, target, rhs } => self.compute(group, target, rhs),
            Event::Verify { comp, statement } => self.verify(arch, comp, statement),
            Event::Session => {
                for st in self.comps.values_mut() {
                    if let ComponentState::Live(s) = st {
                        for l in s.vars.values_mut() {
                            l.push(None);
                        }
                        for l in s.consts.values_mut() {
                            let last = l.last().cloned().flatten();
                            l.push(last);
                        }
                        s.knows.clear();
                    }
                }
                self.session += 1;
            }
            Event::Reset => *self = GlobalState::init(arch),
        }
    }

    fn compute(&mut self, group: &[ComponentId], target: &Subject, rhs: &Term) {
        let members: Vec<ComponentId> = group.iter().filter(|g| self.live(g).is_some()).cloned().collect();
        if members.is_empty() {
            return;
        }
        if !self.compute_ready(group, rhs) {
            for m in &members {
                self.comps.insert(m.clone(), ComponentState::Error);
            }
            return;
        }
        let value = {
            let states: Vec<&LiveState> = members.iter().filter_map(|m| self.live(m)).collect();
            eval(rhs, &states)
        };
        let lhs = match target {
            Subject::Var(v) => Term::of_var(v),
            Subject::Const(c) => Term::Const(c.clone()),
        };
        let eq = Equation::eq(lhs, rhs.clone());
        for m in &members {
            if let Some(s) = self.live_mut(m) {
                s.assign(target, value.clone());
                s.knows.insert(eq.clone());
            }
        }
    }

    fn verify(&mut self, arch: &Architecture, comp: &ComponentId, statement: &Statement) {
        let valid = arch
            .primitives
            .iter()
            .any(|p| matches!(p, Primitive::Verify { comp: c, statement: s, .. } if c == comp && s == statement));
        if !valid {
            if self.live(comp).is_some() {
                self.comps.insert(comp.clone(), ComponentState::Error);
            }
            return;
        }
        let Some(s) = self.live_mut(comp) else {
            return;
        };
        match statement {
            Statement::Attest { issuer, claims } => {
                if s.trusts.contains(issuer) {
                    s.knows.extend(claims.iter().cloned());
                }
            }
            Statement::Proof { payload, .. } => {
                for item in payload {
                    match item {
                        ProofItem::Eq(e) => {
                            s.knows.insert(e.clone());
                        }
                        ProofItem::Attest { issuer, claims } => {
                            if s.trusts.contains(issuer) {
                                s.knows.extend(claims.iter().cloned());
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Evaluates `t` over the merged histories of `states`: a slot takes the
/// first defined value among the states.
fn eval(t: &Term, states: &[&LiveState]) -> Value {
    match t {
        Term::Var { var, window, .. } => {
            let s = Subject::Var(var.clone());
            let len = states.iter().map(|st| st.slots(&s).len()).max().unwrap_or(0);
            let merged: Vec<&Value> = (0..len)
                .filter_map(|i| states.iter().find_map(|st| st.slots(&s).get(i).and_then(Option::as_ref)))
                .collect();
            match window {
                Some(w) if w.get() > 1 => {
                    let w = w.get() as usize;
                    let from = merged.len().saturating_sub(w);
                    Value::Window(merged[from..].iter().map(|v| (*v).clone()).collect())
                }
                _ => merged.last().map_or(Value::Token(0), |v| (*v).clone()),
            }
        }
        Term::Const(c) => Value::Const(c.clone()),
        Term::Apply(f, args) => Value::App(f.clone(), args.iter().map(|a| eval(a, states)).collect()),
        Term::Meta(_) => Value::Token(0),
    }
}

/// Runs `trace` from the initial state.
pub fn run_trace(arch: &Architecture, trace: &[Event]) -> GlobalState {
    let mut st = GlobalState::init(arch);
    for e in trace {
        st.step(arch, e);
    }
    st
}
