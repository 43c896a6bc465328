use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;

use super::event::{dep_event, Event, Trace, Value};
use super::state::GlobalState;
use crate::model::{Architecture, ComponentId, Multiplicity, Primitive, Subject, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverError {
    /// Primitives whose quota could not be met.
    pub stuck: Vec<Primitive>,
}

impl fmt::Display for CoverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("cannot enable")?;
        for p in &self.stuck {
            write!(f, " [{p}]")?;
        }
        Ok(())
    }
}

impl std::error::Error for CoverError {}

/// Event for primitive `i` in state `st`, or `None` if it is not enabled.
/// Received values come from the sender when it has one.
pub(crate) fn prim_event(
    arch: &Architecture,
    i: usize,
    st: &GlobalState,
    fresh: &mut impl FnMut() -> Value,
) -> Option<Event> {
    match &arch.primitives[i] {
        Primitive::HasVar { comp, var, .. } => st.live(comp).map(|_| Event::Has {
            comp: comp.clone(),
            var: var.clone(),
            value: fresh(),
        }),
        Primitive::HasConst { comp, constant } => st.live(comp).map(|_| Event::HasConst {
            comp: comp.clone(),
            constant: constant.clone(),
        }),
        Primitive::Receive {
            receiver,
            sender,
            statements,
            items,
            ..
        } => {
            st.live(receiver)?;
            let from = st.live(sender);
            let assignments = items
                .iter()
                .map(|s| {
                    let v = from.and_then(|f| f.latest(s)).cloned().unwrap_or_else(|| match s {
                        Subject::Const(c) => Value::Const(c.clone()),
                        Subject::Var(_) => fresh(),
                    });
                    (s.clone(), v)
                })
                .collect();
            Some(Event::Receive {
                receiver: receiver.clone(),
                sender: sender.clone(),
                statements: statements.clone(),
                assignments,
            })
        }
        Primitive::Compute { group, target, rhs, .. } => st.compute_ready(group, rhs).then(|| Event::Compute {
            group: group.clone(),
            target: Subject::Var(target.clone()),
            rhs: rhs.clone(),
        }),
        Primitive::Verify { comp, statement, .. } => st.live(comp).map(|_| Event::Verify {
            comp: comp.clone(),
            statement: statement.clone(),
        }),
        Primitive::Trust { .. } | Primitive::Reset => None,
    }
}

/// Dependence `i` as an event, if its owner can run it now.
pub(crate) fn dep_ready(arch: &Architecture, i: usize, st: &GlobalState) -> Option<Event> {
    let e = dep_event(&arch.deps[i]);
    match &e {
        Event::Compute { group, rhs, .. } if st.compute_ready(group, rhs) => Some(e),
        _ => None,
    }
}

type Slots = Vec<(ComponentId, Subject)>;

/// What a primitive writes and what it reads, as (component, subject) pairs.
fn flow(p: &Primitive) -> (Slots, Slots) {
    fn inputs(group: &[ComponentId], rhs: &Term) -> Slots {
        let mut subs: Vec<Subject> = rhs.variables().into_iter().map(Subject::Var).collect();
        subs.extend(rhs.constants().into_iter().map(Subject::Const));
        group.iter().flat_map(|g| subs.iter().map(move |s| (g.clone(), s.clone()))).collect()
    }
    match p {
        Primitive::HasVar { comp, var, .. } => (vec![(comp.clone(), Subject::Var(var.clone()))], vec![]),
        Primitive::HasConst { comp, constant } => (vec![(comp.clone(), Subject::Const(constant.clone()))], vec![]),
        Primitive::Receive {
            receiver, sender, items, ..
        } => (
            items.iter().map(|s| (receiver.clone(), s.clone())).collect(),
            items.iter().map(|s| (sender.clone(), s.clone())).collect(),
        ),
        Primitive::Compute { group, target, rhs, .. } => (
            group.iter().map(|g| (g.clone(), Subject::Var(target.clone()))).collect(),
            inputs(group, rhs),
        ),
        _ => (vec![], vec![]),
    }
}

/// Non-trust primitives in data-flow order, ties broken by position.
/// Primitives on a cycle keep their relative order at the end.
pub(crate) fn flow_order(arch: &Architecture) -> Vec<usize> {
    let idx: Vec<usize> = (0..arch.primitives.len())
        .filter(|&i| !matches!(arch.primitives[i], Primitive::Trust { .. } | Primitive::Reset))
        .collect();
    let mut producers: BTreeMap<(ComponentId, Subject), Vec<usize>> = BTreeMap::new();
    for &i in &idx {
        for w in flow(&arch.primitives[i]).0 {
            producers.entry(w).or_default().push(i);
        }
    }
    let mut indeg: BTreeMap<usize, usize> = idx.iter().map(|&i| (i, 0)).collect();
    let mut succ: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in &idx {
        let mut preds: Vec<usize> = flow(&arch.primitives[i])
            .1
            .into_iter()
            .flat_map(|r| producers.get(&r).cloned().unwrap_or_default())
            .filter(|&p| p != i)
            .collect();
        preds.sort_unstable();
        preds.dedup();
        for p in preds {
            succ.entry(p).or_default().push(i);
            *indeg.get_mut(&i).expect("indexed") += 1;
        }
    }
    let mut heap: BinaryHeap<Reverse<usize>> = indeg.iter().filter(|(_, d)| **d == 0).map(|(i, _)| Reverse(*i)).collect();
    let mut out = Vec::with_capacity(idx.len());
    while let Some(Reverse(i)) = heap.pop() {
        out.push(i);
        for &s in succ.get(&i).map_or(&[][..], Vec::as_slice) {
            let d = indeg.get_mut(&s).expect("indexed");
            *d -= 1;
            if *d == 0 {
                heap.push(Reverse(s));
            }
        }
    }
    if out.len() < idx.len() {
        let rest: Vec<usize> = idx.iter().copied().filter(|i| !out.contains(i)).collect();
        out.extend(rest);
    }
    out
}

fn quota_for(p: &Primitive, rounds: u64) -> u64 {
    match p.mult() {
        Some(Multiplicity::Finite(n)) => n.get().min(rounds),
        _ => rounds,
    }
}

struct Builder<'a> {
    arch: &'a Architecture,
    st: GlobalState,
    trace: Trace,
    next_token: u32,
}

impl<'a> Builder<'a> {
    fn new(arch: &'a Architecture) -> Self {
        Builder {
            arch,
            st: GlobalState::init(arch),
            trace: Vec::new(),
            next_token: 0,
        }
    }

    fn push(&mut self, e: Event) {
        self.st.step(self.arch, &e);
        self.trace.push(e);
    }

    /// Rounds separated by sessions; each primitive fires `min(rounds, mult)` times.
    fn rounds(&mut self, rounds: u64) -> Result<(), CoverError> {
        let arch = self.arch;
        if arch.has_reset() {
            self.push(Event::Reset);
        }
        let order = flow_order(arch);
        let mut left: BTreeMap<usize, u64> = order.iter().map(|&i| (i, quota_for(&arch.primitives[i], rounds))).collect();
        let mut first = true;
        while left.values().any(|&n| n > 0) {
            if !first {
                self.push(Event::Session);
            }
            first = false;
            let mut progress = false;
            for &i in &order {
                if left[&i] == 0 {
                    continue;
                }
                let tok = &mut self.next_token;
                let mut fresh = || {
                    *tok += 1;
                    Value::Token(*tok)
                };
                if let Some(e) = prim_event(arch, i, &self.st, &mut fresh) {
                    self.push(e);
                    *left.get_mut(&i).expect("indexed") -= 1;
                    progress = true;
                }
            }
            if !progress {
                let stuck = left.iter().filter(|(_, n)| **n > 0).map(|(i, _)| arch.primitives[*i].clone()).collect();
                return Err(CoverError { stuck });
            }
        }
        Ok(())
    }

    /// Runs every dependence whose inputs are present and whose target is
    /// still undefined in the current session.
    fn dep_closure(&mut self) {
        loop {
            let mut progress = false;
            for i in 0..self.arch.deps.len() {
                let d = &self.arch.deps[i];
                let open = self.st.live(&d.owner).is_some_and(|s| s.current(&d.target).is_none());
                if !open {
                    continue;
                }
                if let Some(e) = dep_ready(self.arch, i, &self.st) {
                    self.push(e);
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
    }
}

/// A compatible trace in which every non-trust primitive fires
/// `min(k, mult)` times, `k` the bound of the architecture (1 if unbounded).
pub fn covering_trace(arch: &Architecture) -> Result<Trace, CoverError> {
    let k = arch.bound().get().unwrap_or(1);
    let mut b = Builder::new(arch);
    b.rounds(k)?;
    Ok(b.trace)
}

/// Covering trace with `rounds` rounds followed by every enabled dependence.
/// Stops early instead of failing when some primitive cannot be enabled.
pub fn witness_trace(arch: &Architecture, rounds: u64) -> Trace {
    let mut b = Builder::new(arch);
    let _ = b.rounds(rounds);
    b.dep_closure();
    b.trace
}
