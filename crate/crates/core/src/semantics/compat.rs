use std::collections::BTreeSet;
use std::fmt;

use super::event::{dep_event, Event};
use crate::model::{Architecture, Multiplicity, Primitive, Subject};

/// Where an event comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Primitive(usize),
    Dep(usize),
    Session,
}

/// Primitives (and dependences) an event instantiates.
pub fn sources(arch: &Architecture, event: &Event) -> Vec<Source> {
    let mut out: Vec<Source> = arch
        .primitives
        .iter()
        .enumerate()
        .filter(|(_, p)| instantiates(event, p))
        .map(|(i, _)| Source::Primitive(i))
        .collect();
    match event {
        Event::Compute { .. } => {
            out.extend(
                arch.deps
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| dep_event(d) == *event)
                    .map(|(i, _)| Source::Dep(i)),
            );
        }
        Event::Session => out.push(Source::Session),
        _ => {}
    }
    out
}

fn instantiates(e: &Event, p: &Primitive) -> bool {
    match (e, p) {
        (Event::Has { comp, var, .. }, Primitive::HasVar { comp: c, var: v, .. }) => comp == c && var == v,
        (Event::HasConst { comp, constant }, Primitive::HasConst { comp: c, constant: k }) => comp == c && constant == k,
        (
            Event::Receive {
                receiver,
                sender,
                statements,
                assignments,
            },
            Primitive::Receive {
                receiver: r,
                sender: s,
                statements: st,
                items,
                ..
            },
        ) => {
            let got: BTreeSet<&Subject> = assignments.iter().map(|(s, _)| s).collect();
            let want: BTreeSet<&Subject> = items.iter().collect();
            receiver == r && sender == s && statements == st && got == want && got.len() == assignments.len()
        }
        (Event::Compute { group, target, rhs }, Primitive::Compute { group: g, target: t, rhs: r, .. }) => {
            let a: BTreeSet<_> = group.iter().collect();
            let b: BTreeSet<_> = g.iter().collect();
            a == b && *target == Subject::Var(t.clone()) && rhs == r
        }
        (Event::Verify { comp, statement }, Primitive::Verify { comp: c, statement: s, .. }) => comp == c && statement == s,
        (Event::Reset, Primitive::Reset) => true,
        _ => false,
    }
}

/// Per-primitive event counts since the last reset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quota {
    used: Vec<u64>,
}

impl Quota {
    pub fn new(arch: &Architecture) -> Self {
        Quota {
            used: vec![0; arch.primitives.len()],
        }
    }

    pub fn used(&self, prim: usize) -> u64 {
        self.used[prim]
    }

    pub fn available(&self, arch: &Architecture, prim: usize) -> bool {
        match arch.primitives[prim].mult() {
            Some(Multiplicity::Finite(n)) => self.used[prim] < n.get(),
            _ => true,
        }
    }

    pub fn take(&mut self, prim: usize) {
        self.used[prim] += 1;
    }

    pub fn clear(&mut self) {
        self.used.iter_mut().for_each(|u| *u = 0);
    }

    /// Books `event` against the first matching source with capacity.
    pub fn admit(&mut self, arch: &Architecture, event: &Event) -> Result<Source, IncompatibleKind> {
        let srcs = sources(arch, event);
        if srcs.is_empty() {
            return Err(IncompatibleKind::NoPrimitive);
        }
        let chosen = srcs.iter().copied().find(|s| match s {
            Source::Primitive(i) => self.available(arch, *i),
            _ => true,
        });
        match chosen {
            Some(s) => {
                if let Source::Primitive(i) = s {
                    self.take(i);
                }
                if *event == Event::Reset {
                    self.clear();
                }
                Ok(s)
            }
            None => Err(IncompatibleKind::MultiplicityExceeded),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IncompatibleKind {
    NoPrimitive,
    MultiplicityExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incompatibility {
    /// 1-based position of the offending event.
    pub position: usize,
    pub kind: IncompatibleKind,
}

impl fmt::Display for Incompatibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            IncompatibleKind::NoPrimitive => write!(f, "event {} instantiates no primitive", self.position),
            IncompatibleKind::MultiplicityExceeded => {
                write!(f, "event {} exceeds the multiplicity of its primitive", self.position)
            }
        }
    }
}

/// Every event instantiates a primitive and no primitive is used more often
/// than its multiplicity between resets.
pub fn is_compatible(arch: &Architecture, trace: &[Event]) -> Result<(), Incompatibility> {
    let mut q = Quota::new(arch);
    for (i, e) in trace.iter().enumerate() {
        q.admit(arch, e).map_err(|kind| Incompatibility { position: i + 1, kind })?;
    }
    Ok(())
}
