//! Programmatic builders for the reference biometric architectures.
//!
//! Variables: `br` reference template, `brp` decrypted reference, `ebr`
//! encrypted reference, `rd` raw data, `bs` fresh template, `dec` decision,
//! and for the identification family `qr`/`qs` quantizations, `ind` selected
//! indices, `sebr`/`sbr` selected (encrypted) references. The threshold `THR`
//! and the candidate count `C` are constants.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::arch::{Architecture, DepEntry, DepPremise, DeductiveRule, Primitive};
use super::ids::{ComponentId, ConstId, FuncId, Subject, VarId};
use super::multiplicity::Multiplicity;
use super::term::{Equation, Statement, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CorpusName {
    Ed,
    Hsm,
    Hom,
    Moc,
    Mi,
    MiE,
    MiE1,
    MiE2,
    MiE3,
}

impl CorpusName {
    pub const ALL: [CorpusName; 9] = [
        CorpusName::Ed,
        CorpusName::Hsm,
        CorpusName::Hom,
        CorpusName::Moc,
        CorpusName::Mi,
        CorpusName::MiE,
        CorpusName::MiE1,
        CorpusName::MiE2,
        CorpusName::MiE3,
    ];

    /// The four architectures of the unbounded framework.
    pub const BASIC: [CorpusName; 4] = [
        CorpusName::Ed,
        CorpusName::Hsm,
        CorpusName::Hom,
        CorpusName::Moc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CorpusName::Ed => "ed",
            CorpusName::Hsm => "hsm",
            CorpusName::Hom => "hom",
            CorpusName::Moc => "moc",
            CorpusName::Mi => "mi",
            CorpusName::MiE => "mi-e",
            CorpusName::MiE1 => "mi-e1",
            CorpusName::MiE2 => "mi-e2",
            CorpusName::MiE3 => "mi-e3",
        }
    }

    pub fn is_identification(self) -> bool {
        !Self::BASIC.contains(&self)
    }
}

impl fmt::Display for CorpusName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorpusName {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| CorpusError::UnknownName(s.to_owned()))
    }
}

/// Parameters of the identification family. `n` is the per-reset bound of
/// `mi-e`/`mi-e1`, `b` the blocking bound of `mi-e2`/`mi-e3`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CorpusParams {
    pub n: Option<u64>,
    pub big_n: Option<u64>,
    pub q: Option<u64>,
    pub c: Option<u64>,
    pub b: Option<u64>,
}

impl CorpusParams {
    pub fn identification(big_n: u64, q: u64, c: u64) -> Self {
        CorpusParams {
            big_n: Some(big_n),
            q: Some(q),
            c: Some(c),
            ..Self::default()
        }
    }

    pub fn with_n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_b(mut self, b: u64) -> Self {
        self.b = Some(b);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("unknown corpus architecture `{0}`")]
    UnknownName(String),
    #[error("`{arch}` requires parameter `{param}`")]
    MissingParam { arch: CorpusName, param: &'static str },
    #[error("parameter `{param}` must be at least 1")]
    ZeroParam { param: &'static str },
    #[error("parameter C = {c} exceeds N = {n}")]
    TooManyCandidates { c: u64, n: u64 },
}

/// Builds one of the reference architectures.
pub fn instantiate_corpus(name: CorpusName, params: &CorpusParams) -> Result<Architecture, CorpusError> {
    match name {
        CorpusName::Ed => Ok(ed()),
        CorpusName::Hsm => Ok(hsm()),
        CorpusName::Hom => Ok(hom()),
        CorpusName::Moc => Ok(moc()),
        _ => identification(name, params),
    }
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn k(name: &str) -> Term {
    Term::constant(name)
}

fn f(func: &str, args: Vec<Term>) -> Term {
    Term::app(func, args)
}

fn eq(lhs: Term, rhs: Term) -> Equation {
    Equation::eq(lhs, rhs)
}

fn attest(issuer: &str, claim: Equation) -> Statement {
    Statement::attest(issuer, vec![claim])
}

/// Small accumulator so the architecture listings read like their definitions.
struct Draft {
    arch: Architecture,
    mult: Multiplicity,
}

impl Draft {
    fn new(components: &[&str], vars: &[(&str, u32)], consts: &[&str], funcs: &[(&str, usize)]) -> Self {
        let mut arch = Architecture::new();
        arch.components = components.iter().map(|c| ComponentId::new(*c)).collect();
        arch.variables = vars.iter().map(|(n, r)| (VarId::new(*n), *r)).collect();
        arch.constants = consts.iter().map(|c| ConstId::new(*c)).collect();
        arch.functions = funcs.iter().map(|(n, a)| (FuncId::new(*n), *a)).collect();
        Draft {
            arch,
            mult: Multiplicity::Infinite,
        }
    }

    fn push(&mut self, p: Primitive) -> &mut Self {
        self.arch.primitives.push(p);
        self
    }

    fn has(&mut self, comp: &str, var: &str) -> &mut Self {
        let mult = self.mult;
        self.has_n(comp, var, mult)
    }

    fn has_n(&mut self, comp: &str, var: &str, mult: Multiplicity) -> &mut Self {
        self.push(Primitive::HasVar {
            comp: ComponentId::new(comp),
            var: VarId::new(var),
            mult,
        })
    }

    fn has_const(&mut self, comp: &str, constant: &str) -> &mut Self {
        self.push(Primitive::HasConst {
            comp: ComponentId::new(comp),
            constant: ConstId::new(constant),
        })
    }

    fn receive(&mut self, receiver: &str, sender: &str, statements: Vec<Statement>, items: &[&str]) -> &mut Self {
        let mult = self.mult;
        let items = items
            .iter()
            .map(|i| {
                if self.arch.constants.contains(&ConstId::new(*i)) {
                    Subject::constant(i)
                } else {
                    Subject::var(i)
                }
            })
            .collect();
        self.push(Primitive::Receive {
            receiver: ComponentId::new(receiver),
            sender: ComponentId::new(sender),
            statements,
            items,
            mult,
        })
    }

    fn compute(&mut self, comp: &str, target: &str, rhs: Term) -> &mut Self {
        let mult = self.mult;
        self.push(Primitive::Compute {
            group: vec![ComponentId::new(comp)],
            target: VarId::new(target),
            rhs,
            mult,
        })
    }

    fn verify(&mut self, comp: &str, statement: Statement) -> &mut Self {
        let mult = self.mult;
        self.push(Primitive::Verify {
            comp: ComponentId::new(comp),
            statement,
            mult,
        })
    }

    fn trust(&mut self, truster: &str, trustee: &str) -> &mut Self {
        self.push(Primitive::Trust {
            truster: ComponentId::new(truster),
            trustee: ComponentId::new(trustee),
        })
    }

    fn dep(&mut self, owner: &str, target: &str, premises: &[&str]) -> &mut Self {
        let premises = premises
            .iter()
            .map(|p| {
                if self.arch.constants.contains(&ConstId::new(*p)) {
                    DepPremise::Const(ConstId::new(*p))
                } else {
                    DepPremise::var(p, 1)
                }
            })
            .collect();
        self.arch.deps.push(DepEntry {
            owner: ComponentId::new(owner),
            target: Subject::var(target),
            premises,
        });
        self
    }

    fn dep_counted(&mut self, owner: &str, target: &str, premises: &[(&str, u64)]) -> &mut Self {
        self.arch.deps.push(DepEntry {
            owner: ComponentId::new(owner),
            target: Subject::var(target),
            premises: premises.iter().map(|(p, n)| DepPremise::var(p, *n)).collect(),
        });
        self
    }

    fn rule(&mut self, premises: Vec<Equation>, conclusion: Equation) -> &mut Self {
        self.arch.rules.push(DeductiveRule {
            owner: None,
            premises,
            conclusion,
        });
        self
    }

    fn functionality(&mut self, defs: Vec<(&str, Term)>) -> &mut Self {
        self.arch.functionality = defs.into_iter().map(|(x, t)| (VarId::new(x), t)).collect();
        self
    }

    fn finish(&mut self) -> Architecture {
        std::mem::take(&mut self.arch)
    }
}

fn enc_br() -> Equation {
    eq(v("ebr"), f("Enc", vec![v("br")]))
}

/// Encrypted database; decryption and matching on the terminal.
fn ed() -> Architecture {
    let mut d = Draft::new(
        &["U", "T", "S", "I"],
        &[("br", 1), ("brp", 1), ("ebr", 1), ("rd", 1), ("bs", 1), ("dec", 1)],
        &["THR"],
        &[("Enc", 1), ("Dec", 1), ("Extract", 1), ("Mu", 3)],
    );
    d.has("I", "br")
        .has("U", "rd")
        .has_const("T", "THR")
        .compute("I", "ebr", f("Enc", vec![v("br")]))
        .receive("S", "I", vec![attest("I", enc_br())], &["ebr"])
        .receive("T", "S", vec![attest("I", enc_br())], &["ebr"])
        .trust("T", "I")
        .verify("T", attest("I", enc_br()))
        .receive("T", "U", vec![], &["rd"])
        .compute("T", "bs", f("Extract", vec![v("rd")]))
        .compute("T", "brp", f("Dec", vec![v("ebr")]))
        .compute("T", "dec", f("Mu", vec![v("brp"), v("bs"), k("THR")]))
        .receive("U", "T", vec![], &["dec"]);
    d.dep("I", "ebr", &["br"])
        .dep("T", "bs", &["rd"])
        .dep("T", "dec", &["brp", "bs", "THR"])
        .dep("T", "brp", &["ebr"])
        .dep("T", "br", &["ebr"]);
    d.rule(vec![enc_br()], eq(v("br"), f("Dec", vec![v("ebr")])));
    d.functionality(vec![
        ("ebr", f("Enc", vec![v("br")])),
        ("brp", f("Dec", vec![v("ebr")])),
        ("bs", f("Extract", vec![v("rd")])),
        ("dec", f("Mu", vec![v("brp"), v("bs"), k("THR")])),
    ]);
    d.finish()
}

/// Encrypted database; decryption and matching inside a hardware security module.
fn hsm() -> Architecture {
    let mut d = Draft::new(
        &["U", "T", "S", "M", "I"],
        &[("br", 1), ("brp", 1), ("ebr", 1), ("rd", 1), ("bs", 1), ("dec", 1)],
        &["THR"],
        &[("Enc", 1), ("Dec", 1), ("Extract", 1), ("Mu", 3)],
    );
    let matched = || eq(v("dec"), f("Mu", vec![v("brp"), v("bs"), k("THR")]));
    let decrypted = || eq(v("brp"), f("Dec", vec![v("ebr")]));
    d.has("I", "br")
        .has("U", "rd")
        .has_const("M", "THR")
        .compute("I", "ebr", f("Enc", vec![v("br")]))
        .receive("S", "I", vec![attest("I", enc_br())], &["ebr"])
        .receive("T", "S", vec![attest("I", enc_br())], &["ebr"])
        .trust("T", "I")
        .verify("T", attest("I", enc_br()))
        .receive("T", "U", vec![], &["rd"])
        .compute("T", "bs", f("Extract", vec![v("rd")]))
        .receive("M", "T", vec![], &["bs", "ebr"])
        .compute("M", "brp", f("Dec", vec![v("ebr")]))
        .compute("M", "dec", f("Mu", vec![v("brp"), v("bs"), k("THR")]))
        .verify("T", attest("M", matched()))
        .trust("T", "M")
        .receive("T", "M", vec![attest("M", matched()), attest("M", decrypted())], &["dec"])
        .verify("T", attest("M", decrypted()));
    d.dep("I", "ebr", &["br"])
        .dep("T", "bs", &["rd"])
        .dep("M", "brp", &["ebr"])
        .dep("M", "br", &["ebr"])
        .dep("M", "dec", &["brp", "bs", "THR"]);
    d.rule(vec![enc_br()], eq(v("br"), f("Dec", vec![v("ebr")])));
    d.functionality(vec![
        ("ebr", f("Enc", vec![v("br")])),
        ("brp", f("Dec", vec![v("ebr")])),
        ("bs", f("Extract", vec![v("rd")])),
        ("dec", f("Mu", vec![v("brp"), v("bs"), k("THR")])),
    ]);
    d.finish()
}

/// Matching computed by the server over homomorphically encrypted templates.
fn hom() -> Architecture {
    let mut d = Draft::new(
        &["U", "T", "S", "M", "I"],
        &[("br", 1), ("ebr", 1), ("rd", 1), ("bs", 1), ("ebs", 1), ("edec", 1), ("dec", 1)],
        &["THR"],
        &[("Enc", 1), ("Dec", 1), ("Extract", 1), ("HomMu", 3), ("Mu", 3)],
    );
    let hom_match = || eq(v("edec"), f("HomMu", vec![v("ebr"), v("ebs"), k("THR")]));
    let decrypted = || eq(v("dec"), f("Dec", vec![v("edec")]));
    d.has("I", "br")
        .has("U", "rd")
        .has_const("S", "THR")
        .compute("I", "ebr", f("Enc", vec![v("br")]))
        .receive("S", "I", vec![attest("I", enc_br())], &["ebr"])
        .receive("T", "U", vec![], &["rd"])
        .compute("T", "bs", f("Extract", vec![v("rd")]))
        .compute("T", "ebs", f("Enc", vec![v("bs")]))
        .receive("S", "T", vec![], &["ebs"])
        .compute("S", "edec", f("HomMu", vec![v("ebr"), v("ebs"), k("THR")]))
        .receive("T", "S", vec![attest("I", enc_br()), attest("S", hom_match())], &["edec"])
        .verify("T", attest("I", enc_br()))
        .verify("T", attest("S", hom_match()))
        .trust("T", "S")
        .trust("T", "I")
        .receive("M", "T", vec![], &["edec"])
        .compute("M", "dec", f("Dec", vec![v("edec")]))
        .receive("T", "M", vec![attest("M", decrypted())], &["dec"])
        .trust("T", "M")
        .verify("T", attest("M", decrypted()))
        .receive("U", "T", vec![], &["dec"]);
    d.dep("T", "bs", &["rd"])
        .dep("T", "ebs", &["bs"])
        .dep("I", "ebr", &["br"])
        .dep("M", "br", &["ebr"])
        .dep("M", "bs", &["ebs"])
        .dep("M", "dec", &["edec"]);
    d.rule(
        vec![enc_br(), eq(v("ebs"), f("Enc", vec![v("bs")])), hom_match()],
        eq(
            f("Dec", vec![v("edec")]),
            f("Mu", vec![v("br"), v("bs"), k("THR")]),
        ),
    );
    d.functionality(vec![
        ("ebr", f("Enc", vec![v("br")])),
        ("bs", f("Extract", vec![v("rd")])),
        ("ebs", f("Enc", vec![v("bs")])),
        ("edec", f("HomMu", vec![v("ebr"), v("ebs"), k("THR")])),
        ("dec", f("Dec", vec![v("edec")])),
    ]);
    d.finish()
}

/// Match-On-Card: the card stores the reference and performs the matching.
fn moc() -> Architecture {
    let mut d = Draft::new(
        &["U", "T", "C"],
        &[("br", 1), ("rd", 1), ("bs", 1), ("dec", 1)],
        &["THR"],
        &[("Extract", 1), ("Mu", 3)],
    );
    let matched = || eq(v("dec"), f("Mu", vec![v("br"), v("bs"), k("THR")]));
    d.has("C", "br")
        .has("U", "rd")
        .has_const("C", "THR")
        .receive("T", "U", vec![], &["rd"])
        .compute("T", "bs", f("Extract", vec![v("rd")]))
        .receive("C", "T", vec![], &["bs"])
        .compute("C", "dec", f("Mu", vec![v("br"), v("bs"), k("THR")]))
        .receive("U", "T", vec![], &["dec"])
        .receive("T", "C", vec![attest("C", matched())], &["dec"])
        .verify("T", attest("C", matched()))
        .trust("T", "C");
    d.dep("T", "bs", &["rd"]).dep("C", "dec", &["br", "bs", "THR"]);
    d.functionality(vec![
        ("bs", f("Extract", vec![v("rd")])),
        ("dec", f("Mu", vec![v("br"), v("bs"), k("THR")])),
    ]);
    d.finish()
}

fn require(arch: CorpusName, param: &'static str, value: Option<u64>) -> Result<u64, CorpusError> {
    match value {
        None => Err(CorpusError::MissingParam { arch, param }),
        Some(0) => Err(CorpusError::ZeroParam { param }),
        Some(x) => Ok(x),
    }
}

fn to_range(x: u64) -> u32 {
    u32::try_from(x).unwrap_or(u32::MAX)
}

/// Identification over a quantized database held in a secure module.
fn identification(name: CorpusName, params: &CorpusParams) -> Result<Architecture, CorpusError> {
    let big_n = require(name, "N", params.big_n)?;
    let q = require(name, "Q", params.q)?;
    let c = require(name, "C", params.c)?;
    if c > big_n {
        return Err(CorpusError::TooManyCandidates { c, n: big_n });
    }
    let leak_threshold = big_n.saturating_mul(q);
    let bound = match name {
        CorpusName::Mi => None,
        CorpusName::MiE => Some(require(name, "n", params.n)?),
        CorpusName::MiE1 => Some(match params.n {
            Some(_) => require(name, "n", params.n)?,
            None => leak_threshold,
        }),
        _ => Some(require(name, "B", params.b)?),
    };

    let mut d = Draft::new(
        &["U", "T", "S", "M", "I"],
        &[
            ("br", to_range(big_n)),
            ("ebr", to_range(big_n)),
            ("qr", to_range(big_n)),
            ("rd", 1),
            ("bs", 1),
            ("qs", 1),
            ("dec", 1),
            ("ind", to_range(c)),
            ("sebr", to_range(c)),
            ("sbr", to_range(c)),
        ],
        &["C", "THR"],
        &[
            ("Enc", 1),
            ("Dec", 1),
            ("Extract", 1),
            ("Quant", 1),
            ("QComp", 3),
            ("EGet", 2),
            ("Mu", 3),
        ],
    );
    if let Some(n) = bound {
        d.mult = Multiplicity::finite(n).expect("bound checked non-zero");
    }
    let quant_br = || eq(v("qr"), f("Quant", vec![v("br")]));
    let matched = || eq(v("dec"), f("Mu", vec![v("sbr"), v("bs"), k("THR")]));
    d.has_n("I", "br", Multiplicity::Infinite)
        .has("U", "rd")
        .has_const("M", "C")
        .has_const("M", "THR")
        .compute("I", "ebr", f("Enc", vec![v("br")]))
        .compute("I", "qr", f("Quant", vec![v("br")]))
        .compute("T", "bs", f("Extract", vec![v("rd")]))
        .compute("T", "sebr", f("EGet", vec![v("ebr"), v("ind")]))
        .compute("T", "qs", f("Quant", vec![v("bs")]))
        .compute("M", "ind", f("QComp", vec![v("qs"), v("qr"), k("C")]))
        .compute("M", "sbr", f("Dec", vec![v("sebr")]))
        .compute("M", "dec", f("Mu", vec![v("sbr"), v("bs"), k("THR")]))
        .receive("S", "I", vec![attest("I", enc_br())], &["ebr"])
        .receive("T", "U", vec![], &["rd"])
        .receive("T", "S", vec![attest("I", enc_br())], &["ebr"])
        .receive("M", "T", vec![], &["qs"])
        .receive("M", "I", vec![attest("I", quant_br())], &["qr"])
        .receive("T", "M", vec![], &["ind"])
        .receive("M", "T", vec![], &["sebr", "bs"])
        .receive("T", "M", vec![], &["dec"])
        .trust("T", "I")
        .trust("M", "I")
        .trust("T", "M")
        .verify("T", attest("I", enc_br()))
        .verify("T", attest("M", matched()))
        .verify("M", attest("I", quant_br()))
        .verify("T", attest("M", eq(v("sbr"), f("Dec", vec![v("ebr")]))));

    d.dep("I", "ebr", &["br"])
        .dep("I", "qr", &["br"])
        .dep("T", "bs", &["rd"])
        .dep("T", "qs", &["bs"])
        .dep("T", "sebr", &["bs", "ind"])
        .dep("M", "ind", &["qs", "qr", "C"])
        .dep("M", "sbr", &["sebr"])
        .dep("M", "dec", &["sbr", "bs", "THR"])
        .dep("M", "br", &["ebr"]);
    if name != CorpusName::Mi {
        if name != CorpusName::MiE1 {
            d.dep_counted("T", "qr", &[("ind", leak_threshold), ("qs", leak_threshold)]);
        }
        d.dep_counted("M", "ebr", &[("sebr", big_n.div_ceil(c))]);
    }
    if name == CorpusName::MiE3 {
        d.push(Primitive::Reset);
    }
    d.functionality(vec![
        ("ebr", f("Enc", vec![v("br")])),
        ("qr", f("Quant", vec![v("br")])),
        ("bs", f("Extract", vec![v("rd")])),
        ("qs", f("Quant", vec![v("bs")])),
        ("ind", f("QComp", vec![v("qs"), v("qr"), k("C")])),
        ("sebr", f("EGet", vec![v("ebr"), v("ind")])),
        ("sbr", f("Dec", vec![v("sebr")])),
        ("dec", f("Mu", vec![v("sbr"), v("bs"), k("THR")])),
    ]);
    Ok(d.finish())
}
