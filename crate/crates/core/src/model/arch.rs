use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::ids::{ComponentId, ConstId, FuncId, Subject, VarId};
use super::multiplicity::Multiplicity;
use super::term::{Equation, ProofItem, Statement, Term};

/// An architectural relation. The unbounded framework is the special case
/// where every multiplicity is infinite.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Primitive {
    HasVar {
        comp: ComponentId,
        var: VarId,
        mult: Multiplicity,
    },
    HasConst {
        comp: ComponentId,
        constant: ConstId,
    },
    Receive {
        receiver: ComponentId,
        sender: ComponentId,
        statements: Vec<Statement>,
        items: Vec<Subject>,
        mult: Multiplicity,
    },
    Compute {
        group: Vec<ComponentId>,
        target: VarId,
        rhs: Term,
        mult: Multiplicity,
    },
    Verify {
        comp: ComponentId,
        statement: Statement,
        mult: Multiplicity,
    },
    Trust {
        truster: ComponentId,
        trustee: ComponentId,
    },
    Reset,
}

impl Primitive {
    pub fn mult(&self) -> Option<Multiplicity> {
        match self {
            Primitive::HasVar { mult, .. }
            | Primitive::Receive { mult, .. }
            | Primitive::Compute { mult, .. }
            | Primitive::Verify { mult, .. } => Some(*mult),
            _ => None,
        }
    }

    pub fn set_mult(&mut self, new: Multiplicity) {
        match self {
            Primitive::HasVar { mult, .. }
            | Primitive::Receive { mult, .. }
            | Primitive::Compute { mult, .. }
            | Primitive::Verify { mult, .. } => *mult = new,
            _ => {}
        }
    }

    /// Copy with the multiplicity erased, for structural comparison.
    pub fn shape(&self) -> Primitive {
        let mut p = self.clone();
        p.set_mult(Multiplicity::Infinite);
        p
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Primitive::HasVar { .. } | Primitive::HasConst { .. } => "has",
            Primitive::Receive { .. } => "receive",
            Primitive::Compute { .. } => "compute",
            Primitive::Verify { .. } => "verify",
            Primitive::Trust { .. } => "trust",
            Primitive::Reset => "reset",
        }
    }

    pub fn components(&self) -> Vec<&ComponentId> {
        match self {
            Primitive::HasVar { comp, .. } | Primitive::HasConst { comp, .. } => vec![comp],
            Primitive::Receive {
                receiver,
                sender,
                statements,
                ..
            } => {
                let mut v = vec![receiver, sender];
                v.extend(statements.iter().flat_map(|s| s.issuers()));
                v
            }
            Primitive::Compute { group, .. } => group.iter().collect(),
            Primitive::Verify {
                comp, statement, ..
            } => {
                let mut v = vec![comp];
                v.extend(statement.issuers());
                v
            }
            Primitive::Trust { truster, trustee } => vec![truster, trustee],
            Primitive::Reset => vec![],
        }
    }

    /// Every equation carried by the primitive (statements, or `X = T` for computations).
    pub fn equations(&self) -> Vec<Equation> {
        match self {
            Primitive::Receive { statements, .. } => statements
                .iter()
                .flat_map(|s| s.equations().into_iter().cloned())
                .collect(),
            Primitive::Verify { statement, .. } => {
                statement.equations().into_iter().cloned().collect()
            }
            Primitive::Compute { target, rhs, .. } => {
                vec![Equation::eq(Term::of_var(target), rhs.clone())]
            }
            _ => vec![],
        }
    }
}

/// One premise of a dependence entry.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DepPremise {
    /// A variable needed `count` times (values from distinct sessions).
    Var { var: VarId, count: u64 },
    Const(ConstId),
}

impl DepPremise {
    pub fn var(name: &str, count: u64) -> Self {
        DepPremise::Var {
            var: VarId::new(name),
            count,
        }
    }

    pub fn subject(&self) -> Subject {
        match self {
            DepPremise::Var { var, .. } => Subject::Var(var.clone()),
            DepPremise::Const(c) => Subject::Const(c.clone()),
        }
    }
}

/// `Dep_owner(target, premises)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DepEntry {
    pub owner: ComponentId,
    pub target: Subject,
    pub premises: Vec<DepPremise>,
}

impl DepEntry {
    pub fn new(owner: &str, target: &str, premises: &[&str]) -> Self {
        DepEntry {
            owner: ComponentId::new(owner),
            target: Subject::var(target),
            premises: premises.iter().map(|p| DepPremise::var(p, 1)).collect(),
        }
    }
}

/// Deductive algorithmic knowledge `premises |> conclusion`, owned by one
/// component or shared by all.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeductiveRule {
    pub owner: Option<ComponentId>,
    pub premises: Vec<Equation>,
    pub conclusion: Equation,
}

impl DeductiveRule {
    pub fn metavariables(&self) -> BTreeSet<String> {
        let mut m = self.conclusion.metas();
        for p in &self.premises {
            m.extend(p.metas());
        }
        m
    }

    pub fn applies_to(&self, comp: &ComponentId) -> bool {
        self.owner.as_ref().is_none_or(|o| o == comp)
    }

    pub fn is_range_restricted(&self) -> bool {
        let mut bound = BTreeSet::new();
        for p in &self.premises {
            bound.extend(p.metas());
        }
        self.conclusion.metas().is_subset(&bound)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Architecture {
    pub components: BTreeSet<ComponentId>,
    /// Variable ranges (array sizes; 1 for scalars).
    pub variables: BTreeMap<VarId, u32>,
    pub constants: BTreeSet<ConstId>,
    /// Function symbols with their arity.
    pub functions: BTreeMap<FuncId, usize>,
    pub primitives: Vec<Primitive>,
    pub deps: Vec<DepEntry>,
    pub rules: Vec<DeductiveRule>,
    /// Informational record of the intended functionality; never checked.
    pub functionality: Vec<(VarId, Term)>,
}

/// A structural defect: an identifier that does not resolve or a broken
/// invariant of a primitive, dependence or rule.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WellFormednessError {
    #[error("undeclared component `{0}`")]
    UnknownComponent(ComponentId),
    #[error("undeclared variable `{0}`")]
    UnknownVariable(VarId),
    #[error("undeclared constant `{0}`")]
    UnknownConstant(ConstId),
    #[error("undeclared function `{0}`")]
    UnknownFunction(FuncId),
    #[error("function `{func}` expects {expected} arguments, got {found}")]
    Arity {
        func: FuncId,
        expected: usize,
        found: usize,
    },
    #[error("index {index} of `{var}` outside [1, {range}]")]
    IndexOutOfRange { var: VarId, index: u32, range: u32 },
    #[error("variable `{0}` declared with range 0")]
    ZeroRange(VarId),
    #[error("metavariable `?{0}` outside a deductive rule")]
    StrayMeta(String),
    #[error("primitive #{0}: computation group is empty")]
    EmptyGroup(usize),
    #[error("primitive #{0}: `{1}` is defined in terms of itself")]
    SelfDefinition(usize, VarId),
    #[error("primitive #{0}: proof payload is empty")]
    EmptyProof(usize),
    #[error("dependence for `{0}` lists its own target as a premise")]
    CyclicDep(Subject),
    #[error("dependence premise `{0}` requires zero values")]
    ZeroPremiseCount(VarId),
    #[error("rule conclusion uses metavariables not bound by its premises")]
    RangeRestriction,
}

impl Architecture {
    pub fn new() -> Self {
        Self::default()
    }

    /// Uniform bound: the finite multiplicity if one is used, else infinity.
    /// With mixed finite values the largest is returned; see
    /// [`check_consistency`](super::consistency::check_consistency).
    pub fn bound(&self) -> Multiplicity {
        self.primitives
            .iter()
            .filter_map(Primitive::mult)
            .filter(|m| !m.is_infinite())
            .max()
            .unwrap_or(Multiplicity::Infinite)
    }

    pub fn has_reset(&self) -> bool {
        self.primitives.iter().any(|p| matches!(p, Primitive::Reset))
    }

    pub fn trusts(&self, truster: &ComponentId, trustee: &ComponentId) -> bool {
        self.primitives.iter().any(|p| {
            matches!(p, Primitive::Trust { truster: a, trustee: b } if a == truster && b == trustee)
        })
    }

    pub fn trust_index(&self, truster: &ComponentId, trustee: &ComponentId) -> Option<usize> {
        self.primitives.iter().position(|p| {
            matches!(p, Primitive::Trust { truster: a, trustee: b } if a == truster && b == trustee)
        })
    }

    /// Every declared subject, variables first.
    pub fn subjects(&self) -> Vec<Subject> {
        self.variables
            .keys()
            .cloned()
            .map(Subject::Var)
            .chain(self.constants.iter().cloned().map(Subject::Const))
            .collect()
    }

    /// Resolves a bare name to a declared variable or constant.
    pub fn subject_named(&self, name: &str) -> Option<Subject> {
        let v = VarId::new(name);
        if self.variables.contains_key(&v) {
            return Some(Subject::Var(v));
        }
        let c = ConstId::new(name);
        self.constants.contains(&c).then_some(Subject::Const(c))
    }

    /// All ground terms the architecture mentions, closed under subterms.
    pub fn ground_terms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        let mut add = |t: &Term| {
            t.visit(&mut |s| {
                if s.is_ground() {
                    out.insert(s.clone());
                }
            })
        };
        for p in &self.primitives {
            for eq in p.equations() {
                add(&eq.lhs);
                add(&eq.rhs);
            }
        }
        for (v, t) in &self.functionality {
            add(&Term::of_var(v));
            add(t);
        }
        for d in &self.deps {
            if let Subject::Var(v) = &d.target {
                add(&Term::of_var(v));
            }
        }
        for r in &self.rules {
            for eq in r.premises.iter().chain(std::iter::once(&r.conclusion)) {
                add(&eq.lhs);
                add(&eq.rhs);
            }
        }
        out
    }

    /// Checks that identifiers resolve and structural invariants hold.
    pub fn validate(&self) -> Vec<WellFormednessError> {
        let mut errs = Vec::new();
        for (v, r) in &self.variables {
            if *r == 0 {
                errs.push(WellFormednessError::ZeroRange(v.clone()));
            }
        }
        let comp = |c: &ComponentId, errs: &mut Vec<WellFormednessError>| {
            if !self.components.contains(c) {
                errs.push(WellFormednessError::UnknownComponent(c.clone()));
            }
        };
        for (i, p) in self.primitives.iter().enumerate() {
            for c in p.components() {
                comp(c, &mut errs);
            }
            match p {
                Primitive::HasVar { var, .. } => self.check_var(var, &mut errs),
                Primitive::HasConst { constant, .. } => self.check_const(constant, &mut errs),
                Primitive::Receive {
                    statements, items, ..
                } => {
                    for s in statements {
                        self.check_statement(i, s, &mut errs);
                    }
                    for it in items {
                        self.check_subject(it, &mut errs);
                    }
                }
                Primitive::Compute {
                    group, target, rhs, ..
                } => {
                    if group.is_empty() {
                        errs.push(WellFormednessError::EmptyGroup(i));
                    }
                    self.check_var(target, &mut errs);
                    self.check_term(rhs, false, &mut errs);
                    if rhs.variables().contains(target) {
                        errs.push(WellFormednessError::SelfDefinition(i, target.clone()));
                    }
                }
                Primitive::Verify { statement, .. } => self.check_statement(i, statement, &mut errs),
                Primitive::Trust { .. } | Primitive::Reset => {}
            }
        }
        for d in &self.deps {
            comp(&d.owner, &mut errs);
            self.check_subject(&d.target, &mut errs);
            for p in &d.premises {
                self.check_subject(&p.subject(), &mut errs);
                if let DepPremise::Var { var, count: 0 } = p {
                    errs.push(WellFormednessError::ZeroPremiseCount(var.clone()));
                }
                if p.subject() == d.target {
                    errs.push(WellFormednessError::CyclicDep(d.target.clone()));
                }
            }
        }
        for r in &self.rules {
            if let Some(o) = &r.owner {
                comp(o, &mut errs);
            }
            for eq in r.premises.iter().chain(std::iter::once(&r.conclusion)) {
                self.check_term(&eq.lhs, true, &mut errs);
                self.check_term(&eq.rhs, true, &mut errs);
            }
            if !r.is_range_restricted() {
                errs.push(WellFormednessError::RangeRestriction);
            }
        }
        for (v, t) in &self.functionality {
            self.check_var(v, &mut errs);
            self.check_term(t, false, &mut errs);
        }
        errs
    }

    fn check_var(&self, v: &VarId, errs: &mut Vec<WellFormednessError>) {
        if !self.variables.contains_key(v) {
            errs.push(WellFormednessError::UnknownVariable(v.clone()));
        }
    }

    fn check_const(&self, c: &ConstId, errs: &mut Vec<WellFormednessError>) {
        if !self.constants.contains(c) {
            errs.push(WellFormednessError::UnknownConstant(c.clone()));
        }
    }

    fn check_subject(&self, s: &Subject, errs: &mut Vec<WellFormednessError>) {
        match s {
            Subject::Var(v) => self.check_var(v, errs),
            Subject::Const(c) => self.check_const(c, errs),
        }
    }

    fn check_statement(&self, idx: usize, s: &Statement, errs: &mut Vec<WellFormednessError>) {
        if let Statement::Proof { payload, .. } = s {
            if payload.is_empty() {
                errs.push(WellFormednessError::EmptyProof(idx));
            }
            for item in payload {
                if let ProofItem::Eq(e) = item {
                    self.check_term(&e.lhs, false, errs);
                    self.check_term(&e.rhs, false, errs);
                }
            }
        }
        for eq in s.equations() {
            self.check_term(&eq.lhs, false, errs);
            self.check_term(&eq.rhs, false, errs);
        }
    }

    pub(crate) fn check_term(&self, t: &Term, metas_ok: bool, errs: &mut Vec<WellFormednessError>) {
        t.visit(&mut |s| match s {
            Term::Var { var, index, .. } => match self.variables.get(var) {
                None => errs.push(WellFormednessError::UnknownVariable(var.clone())),
                Some(range) => {
                    if let Some(i) = index {
                        if *i == 0 || i > range {
                            errs.push(WellFormednessError::IndexOutOfRange {
                                var: var.clone(),
                                index: *i,
                                range: *range,
                            });
                        }
                    }
                }
            },
            Term::Const(c) => self.check_const(c, errs),
            Term::Meta(m) => {
                if !metas_ok {
                    errs.push(WellFormednessError::StrayMeta(m.clone()));
                }
            }
            Term::Apply(f, args) => match self.functions.get(f) {
                None => errs.push(WellFormednessError::UnknownFunction(f.clone())),
                Some(&arity) if arity != args.len() => errs.push(WellFormednessError::Arity {
                    func: f.clone(),
                    expected: arity,
                    found: args.len(),
                }),
                _ => {}
            },
        });
    }

    /// Compares two architectures ignoring multiplicities.
    pub fn structural_diff(&self, other: &Architecture) -> ArchDiff {
        let mut diff = ArchDiff {
            declarations_differ: self.components != other.components
                || self.variables.keys().ne(other.variables.keys())
                || self.constants != other.constants
                || self.functions != other.functions,
            ranges_differ: self.variables != other.variables,
            ..ArchDiff::default()
        };
        let mut right: Vec<Option<&Primitive>> = other.primitives.iter().map(Some).collect();
        for (i, p) in self.primitives.iter().enumerate() {
            let pos = right
                .iter()
                .position(|q| q.is_some_and(|q| q == p))
                .or_else(|| {
                    right
                        .iter()
                        .position(|q| q.is_some_and(|q| q.shape() == p.shape()))
                });
            let slot = pos.map(|j| &mut right[j]);
            match slot {
                Some(q) => {
                    if q.is_some_and(|q| q.mult() != p.mult()) {
                        diff.multiplicity_changes.push(i);
                    }
                    *q = None;
                }
                None => diff.primitives_only_left.push(p.clone()),
            }
        }
        diff.primitives_only_right = right.into_iter().flatten().cloned().collect();
        diff.deps_only_left = self
            .deps
            .iter()
            .filter(|d| !other.deps.contains(d))
            .cloned()
            .collect();
        diff.deps_only_right = other
            .deps
            .iter()
            .filter(|d| !self.deps.contains(d))
            .cloned()
            .collect();
        diff.rules_differ = self.rules != other.rules;
        diff
    }
}

/// Result of [`Architecture::structural_diff`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArchDiff {
    pub declarations_differ: bool,
    pub ranges_differ: bool,
    /// Indices (left side) of primitives whose only change is the multiplicity.
    pub multiplicity_changes: Vec<usize>,
    pub primitives_only_left: Vec<Primitive>,
    pub primitives_only_right: Vec<Primitive>,
    pub deps_only_left: Vec<DepEntry>,
    pub deps_only_right: Vec<DepEntry>,
    pub rules_differ: bool,
}

impl ArchDiff {
    pub fn only_multiplicities_and_deps(&self) -> bool {
        !self.declarations_differ
            && self.primitives_only_left.is_empty()
            && self.primitives_only_right.is_empty()
            && !self.rules_differ
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Primitive::HasVar { comp, var, mult } => write!(f, "has^{mult} {comp}({var})"),
            Primitive::HasConst { comp, constant } => write!(f, "has {comp}({constant})"),
            Primitive::Receive {
                receiver,
                sender,
                statements,
                items,
                mult,
            } => {
                write!(f, "receive^{mult} {receiver} <- {sender}")?;
                for s in statements {
                    write!(f, " {s}")?;
                }
                f.write_str(" items {")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str("}")
            }
            Primitive::Compute {
                group,
                target,
                rhs,
                mult,
            } => {
                write!(f, "compute^{mult} {{")?;
                for (i, g) in group.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, "}} {target} = {rhs}")
            }
            Primitive::Verify {
                comp,
                statement,
                mult,
            } => write!(f, "verify^{mult} {comp} {statement}"),
            Primitive::Trust { truster, trustee } => write!(f, "trust {truster} {trustee}"),
            Primitive::Reset => f.write_str("reset"),
        }
    }
}

impl fmt::Display for DepEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dep {}: {} <- {{", self.owner, self.target)?;
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match p {
                DepPremise::Var { var, count } if *count == 1 => write!(f, "{var}")?,
                DepPremise::Var { var, count } => write!(f, "{var}^{count}")?,
                DepPremise::Const(c) => write!(f, "{c}")?,
            }
        }
        f.write_str("}")
    }
}

impl fmt::Display for DeductiveRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("rule")?;
        if let Some(o) = &self.owner {
            write!(f, " {o}")?;
        }
        f.write_str(": {")?;
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}} |> {}", self.conclusion)
    }
}
