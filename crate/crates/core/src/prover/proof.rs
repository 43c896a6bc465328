use std::collections::BTreeMap;
use std::fmt::{self, Write};

use crate::model::{ComponentId, DepEntry, DeductiveRule, Equation, Multiplicity, Primitive, Subject};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    H1,
    H1p,
    H2,
    H2p,
    H3,
    H4,
    H5,
    H5p,
    HN,
    HNp,
    K1,
    K3,
    K4,
    K5,
    KDed,
    KAnd,
    IAnd,
    EqSym,
    EqTrans,
    EqSubst,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::H1 => "H1",
            Rule::H1p => "H1'",
            Rule::H2 => "H2",
            Rule::H2p => "H2'",
            Rule::H3 => "H3",
            Rule::H4 => "H4",
            Rule::H5 => "H5",
            Rule::H5p => "H5'",
            Rule::HN => "HN",
            Rule::HNp => "HN'",
            Rule::K1 => "K1",
            Rule::K3 => "K3",
            Rule::K4 => "K4",
            Rule::K5 => "K5",
            Rule::KDed => "K-DED",
            Rule::KAnd => "K-AND",
            Rule::IAnd => "I-AND",
            Rule::EqSym => "EQ-SYM",
            Rule::EqTrans => "EQ-TRANS",
            Rule::EqSubst => "EQ-SUBST",
        }
    }

    /// Name used by [`explain`]: equality steps are shown as instances of
    /// deduction with the built-in equality rules.
    pub fn label(self) -> String {
        match self {
            Rule::EqSym | Rule::EqTrans | Rule::EqSubst => format!("K-DED({})", self.name()),
            _ => self.name().to_owned(),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a proof node establishes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Conclusion {
    /// `Has_i(X^(n))`; for constants the count is [`Multiplicity::ONE`].
    Has {
        comp: ComponentId,
        subject: Subject,
        count: Multiplicity,
    },
    HasNone {
        comp: ComponentId,
        subject: Subject,
    },
    Know {
        comp: ComponentId,
        eq: Equation,
    },
    Conj(Vec<Conclusion>),
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conclusion::Has {
                comp,
                subject: Subject::Const(c),
                ..
            } => write!(f, "has {comp}({c})"),
            Conclusion::Has {
                comp,
                subject,
                count,
            } => write!(f, "has^{count} {comp}({subject})"),
            Conclusion::HasNone { comp, subject } => write!(f, "hasnone {comp}({subject})"),
            Conclusion::Know { comp, eq } => write!(f, "knows {comp} ({eq})"),
            Conclusion::Conj(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

/// Architecture fact cited by a proof node.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Leaf {
    Primitive(Primitive),
    Dep(DepEntry),
    Rule(DeductiveRule),
    /// Digest of the saturated fact base a negation was read from.
    Digest(String),
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Leaf::Primitive(p) => write!(f, "{p}"),
            Leaf::Dep(d) => write!(f, "{d}"),
            Leaf::Rule(r) => write!(f, "{r}"),
            Leaf::Digest(d) => write!(f, "saturated base sha256:{d}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub rule: Rule,
    pub conclusion: Conclusion,
    pub premises: Vec<ProofTree>,
    pub leaves: Vec<Leaf>,
}

impl ProofTree {
    pub fn node(rule: Rule, conclusion: Conclusion, premises: Vec<ProofTree>, leaves: Vec<Leaf>) -> Self {
        ProofTree {
            rule,
            conclusion,
            premises,
            leaves,
        }
    }

    /// Rule names in post-order (premises before the step using them).
    pub fn rules_post_order(&self) -> Vec<Rule> {
        let mut out = Vec::new();
        self.post_order(&mut |t| out.push(t.rule));
        out
    }

    pub fn post_order<'a>(&'a self, f: &mut impl FnMut(&'a ProofTree)) {
        for p in &self.premises {
            p.post_order(f);
        }
        f(self);
    }

    pub fn rule_counts(&self) -> BTreeMap<Rule, usize> {
        let mut out = BTreeMap::new();
        self.post_order(&mut |t| *out.entry(t.rule).or_insert(0) += 1);
        out
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::depth).max().unwrap_or(0)
    }

    /// Stable text form: pre-order, one node per line,
    /// `rule<TAB>conclusion<TAB>child count`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        self.serialize_into(&mut out);
        out
    }

    fn serialize_into(&self, out: &mut String) {
        let _ = writeln!(out, "{}\t{}\t{}", self.rule, self.conclusion, self.premises.len());
        for p in &self.premises {
            p.serialize_into(out);
        }
    }

    /// Indented rendering, premises first; each node names its rule and cited facts.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
        let pad = "  ".repeat(depth);
        let _ = writeln!(out, "{pad}[{}] {}", self.rule.label(), self.conclusion);
        for l in &self.leaves {
            let _ = writeln!(out, "{pad}    by {l}");
        }
    }
}
