use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::num::NonZeroU32;

use super::ids::{ComponentId, ConstId, FuncId, VarId};

/// Ground or pattern term. `Meta` only appears inside deductive rules.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// A variable reference. `index` selects an array entry (1-based);
    /// `window` asks a computation for that many historical values.
    Var {
        var: VarId,
        index: Option<u32>,
        window: Option<NonZeroU32>,
    },
    Const(ConstId),
    Meta(String),
    Apply(FuncId, Vec<Term>),
}

pub type Substitution = BTreeMap<String, Term>;

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var {
            var: VarId::new(name),
            index: None,
            window: None,
        }
    }

    pub fn of_var(var: &VarId) -> Term {
        Term::Var {
            var: var.clone(),
            index: None,
            window: None,
        }
    }

    pub fn windowed(name: &str, window: u32) -> Term {
        Term::Var {
            var: VarId::new(name),
            index: None,
            window: NonZeroU32::new(window),
        }
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(ConstId::new(name))
    }

    pub fn meta(name: &str) -> Term {
        Term::Meta(name.to_owned())
    }

    pub fn app(func: &str, args: Vec<Term>) -> Term {
        Term::Apply(FuncId::new(func), args)
    }

    /// Pre-order walk over every subterm, including `self`.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        if let Term::Apply(_, args) = self {
            for a in args {
                a.visit(f);
            }
        }
    }

    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        self.visit(&mut |t| out.push(t));
        out
    }

    pub fn variables(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::Var { var, .. } = t {
                out.insert(var.clone());
            }
        });
        out
    }

    pub fn constants(&self) -> BTreeSet<ConstId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        });
        out
    }

    pub fn metas(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::Meta(m) = t {
                out.insert(m.clone());
            }
        });
        out
    }

    pub fn is_ground(&self) -> bool {
        let mut ground = true;
        self.visit(&mut |t| ground &= !matches!(t, Term::Meta(_)));
        ground
    }

    pub fn contains(&self, needle: &Term) -> bool {
        let mut found = false;
        self.visit(&mut |t| found |= t == needle);
        found
    }

    /// Replaces metavariables bound in `subst`; unbound ones are kept.
    pub fn substitute(&self, subst: &Substitution) -> Term {
        match self {
            Term::Meta(m) => subst.get(m).cloned().unwrap_or_else(|| self.clone()),
            Term::Apply(f, args) => {
                Term::Apply(f.clone(), args.iter().map(|a| a.substitute(subst)).collect())
            }
            _ => self.clone(),
        }
    }

    /// Every term obtained by replacing exactly one occurrence of `from` by `to`.
    pub fn single_rewrites(&self, from: &Term, to: &Term) -> Vec<Term> {
        let mut out = Vec::new();
        if self == from {
            out.push(to.clone());
        }
        if let Term::Apply(f, args) = self {
            for (i, arg) in args.iter().enumerate() {
                for rewritten in arg.single_rewrites(from, to) {
                    let mut new_args = args.clone();
                    new_args[i] = rewritten;
                    out.push(Term::Apply(f.clone(), new_args));
                }
            }
        }
        out
    }

    /// One-way matching of a pattern against a ground term, extending `subst`.
    pub fn match_into(&self, ground: &Term, subst: &mut Substitution) -> bool {
        match (self, ground) {
            (Term::Meta(m), _) => match subst.get(m) {
                Some(bound) => bound == ground,
                None => {
                    subst.insert(m.clone(), ground.clone());
                    true
                }
            },
            (Term::Apply(f, args), Term::Apply(g, gargs)) => {
                f == g
                    && args.len() == gargs.len()
                    && args
                        .iter()
                        .zip(gargs)
                        .all(|(p, t)| p.match_into(t, subst))
            }
            _ => self == ground,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var { var, index, window } => {
                write!(f, "{var}")?;
                if let Some(i) = index {
                    write!(f, "[{i}]")?;
                }
                if let Some(w) = window {
                    write!(f, "^{w}")?;
                }
                Ok(())
            }
            Term::Const(c) => write!(f, "{c}"),
            Term::Meta(m) => write!(f, "?{m}"),
            Term::Apply(func, args) => {
                write!(f, "{func}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pred {
    Equal,
    Member,
}

/// A binary predicate over terms: `lhs = rhs` or `lhs in rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Equation {
    pub pred: Pred,
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Equation {
            pred: Pred::Equal,
            lhs,
            rhs,
        }
    }

    pub fn member(lhs: Term, rhs: Term) -> Self {
        Equation {
            pred: Pred::Member,
            lhs,
            rhs,
        }
    }

    pub fn terms(&self) -> [&Term; 2] {
        [&self.lhs, &self.rhs]
    }

    pub fn is_ground(&self) -> bool {
        self.lhs.is_ground() && self.rhs.is_ground()
    }

    pub fn metas(&self) -> BTreeSet<String> {
        let mut m = self.lhs.metas();
        m.extend(self.rhs.metas());
        m
    }

    pub fn substitute(&self, subst: &Substitution) -> Equation {
        Equation {
            pred: self.pred,
            lhs: self.lhs.substitute(subst),
            rhs: self.rhs.substitute(subst),
        }
    }

    pub fn match_into(&self, ground: &Equation, subst: &mut Substitution) -> bool {
        if self.pred != ground.pred {
            return false;
        }
        let mut trial = subst.clone();
        if self.lhs.match_into(&ground.lhs, &mut trial) && self.rhs.match_into(&ground.rhs, &mut trial)
        {
            *subst = trial;
            true
        } else {
            false
        }
    }

    pub fn flipped(&self) -> Equation {
        Equation {
            pred: self.pred,
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.pred {
            Pred::Equal => "=",
            Pred::Member => "in",
        };
        write!(f, "{} {op} {}", self.lhs, self.rhs)
    }
}

/// `Attest_i({Eq})` or `Proof_i({P})`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Statement {
    Attest {
        issuer: ComponentId,
        claims: Vec<Equation>,
    },
    Proof {
        issuer: ComponentId,
        payload: Vec<ProofItem>,
    },
}

/// Element of a proof payload; attestations nest one level only.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProofItem {
    Eq(Equation),
    Attest {
        issuer: ComponentId,
        claims: Vec<Equation>,
    },
}

impl Statement {
    pub fn attest(issuer: &str, claims: Vec<Equation>) -> Self {
        Statement::Attest {
            issuer: ComponentId::new(issuer),
            claims,
        }
    }

    pub fn issuer(&self) -> &ComponentId {
        match self {
            Statement::Attest { issuer, .. } | Statement::Proof { issuer, .. } => issuer,
        }
    }

    /// Every equation mentioned, nested attestations included.
    pub fn equations(&self) -> Vec<&Equation> {
        match self {
            Statement::Attest { claims, .. } => claims.iter().collect(),
            Statement::Proof { payload, .. } => payload
                .iter()
                .flat_map(|p| match p {
                    ProofItem::Eq(e) => vec![e],
                    ProofItem::Attest { claims, .. } => claims.iter().collect(),
                })
                .collect(),
        }
    }

    /// Issuers of the statement and of any nested attestation.
    pub fn issuers(&self) -> Vec<&ComponentId> {
        let mut out = vec![self.issuer()];
        if let Statement::Proof { payload, .. } = self {
            for p in payload {
                if let ProofItem::Attest { issuer, .. } = p {
                    out.push(issuer);
                }
            }
        }
        out
    }
}

fn write_claims(f: &mut fmt::Formatter<'_>, claims: &[Equation]) -> fmt::Result {
    f.write_str("{")?;
    for (i, c) in claims.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{c}")?;
    }
    f.write_str("}")
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Attest { issuer, claims } => {
                write!(f, "attest {issuer} ")?;
                write_claims(f, claims)
            }
            Statement::Proof { issuer, payload } => {
                write!(f, "proof {issuer} {{")?;
                for (i, p) in payload.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    match p {
                        ProofItem::Eq(e) => write!(f, "{e}")?,
                        ProofItem::Attest { issuer, claims } => {
                            write!(f, "attest {issuer} ")?;
                            write_claims(f, claims)?;
                        }
                    }
                }
                f.write_str("}")
            }
        }
    }
}
