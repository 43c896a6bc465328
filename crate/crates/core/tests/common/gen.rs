//! Random well-formed architectures.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use archproof::{
    Architecture, ComponentId, ConstId, DeductiveRule, DepEntry, DepPremise, Equation, FuncId, Multiplicity,
    Primitive, ProofItem, Statement, Subject, Term, VarId,
};

pub struct Gen {
    rng: ChaCha8Rng,
    comps: Vec<ComponentId>,
    vars: Vec<(VarId, u32)>,
    consts: Vec<ConstId>,
    mult: Option<Multiplicity>,
}

/// Random architecture; with `mult` set, every bounded primitive uses it.
pub fn random_arch(seed: u64, mult: Option<Multiplicity>) -> Architecture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps = (0..rng.gen_range(1..=4)).map(|i| ComponentId::new(["A", "B", "C", "D"][i])).collect();
    let vars = (0..rng.gen_range(1..=5))
        .map(|i| (VarId::new(format!("v{i}")), if rng.gen_bool(0.2) { 2 } else { 1 }))
        .collect();
    let consts = (0..rng.gen_range(0..=2)).map(|i| ConstId::new(format!("k{i}"))).collect();
    Gen {
        rng,
        comps,
        vars,
        consts,
        mult,
    }
    .build()
}

impl Gen {
    fn comp(&mut self) -> ComponentId {
        self.comps.choose(&mut self.rng).expect("components").clone()
    }

    fn var(&mut self) -> VarId {
        self.vars.choose(&mut self.rng).expect("variables").0.clone()
    }

    fn mult(&mut self) -> Multiplicity {
        self.mult.unwrap_or_else(|| {
            if self.rng.gen_bool(0.4) {
                Multiplicity::Infinite
            } else {
                Multiplicity::finite(self.rng.gen_range(1..=3)).expect("positive")
            }
        })
    }

    fn subject(&mut self) -> Subject {
        if !self.consts.is_empty() && self.rng.gen_bool(0.25) {
            Subject::Const(self.consts.choose(&mut self.rng).expect("constants").clone())
        } else {
            Subject::Var(self.var())
        }
    }

    fn leaf(&mut self, avoid: Option<&VarId>) -> Term {
        let choices: Vec<(VarId, u32)> = self.vars.iter().filter(|(v, _)| Some(v) != avoid).cloned().collect();
        if choices.is_empty() || (!self.consts.is_empty() && self.rng.gen_bool(0.2)) {
            return match self.consts.choose(&mut self.rng) {
                Some(c) => Term::Const(c.clone()),
                None => Term::app("Z", vec![]),
            };
        }
        let (v, range) = choices.choose(&mut self.rng).expect("non-empty").clone();
        if range > 1 && self.rng.gen_bool(0.5) {
            Term::Var {
                var: v,
                index: Some(self.rng.gen_range(1..=range)),
                window: None,
            }
        } else if self.rng.gen_bool(0.1) {
            Term::windowed(v.as_str(), 2)
        } else {
            Term::of_var(&v)
        }
    }

    fn term(&mut self, depth: u32, avoid: Option<&VarId>) -> Term {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return self.leaf(avoid);
        }
        match self.rng.gen_range(0..3) {
            0 => Term::app("F", vec![self.term(depth - 1, avoid)]),
            1 => Term::app("H", vec![self.term(depth - 1, avoid)]),
            _ => Term::app("G", vec![self.term(depth - 1, avoid), self.term(depth - 1, avoid)]),
        }
    }

    fn equation(&mut self) -> Equation {
        let v = self.var();
        let rhs = self.term(2, Some(&v));
        Equation::eq(Term::of_var(&v), rhs)
    }

    fn statement(&mut self, issuer: ComponentId) -> Statement {
        if self.rng.gen_bool(0.5) {
            let claims = (0..self.rng.gen_range(1..=2)).map(|_| self.equation()).collect();
            Statement::Attest { issuer, claims }
        } else {
            let mut payload = vec![ProofItem::Eq(self.equation())];
            if self.rng.gen_bool(0.5) {
                let claims = vec![self.equation()];
                payload.push(ProofItem::Attest {
                    issuer: self.comp(),
                    claims,
                });
            }
            Statement::Proof { issuer, payload }
        }
    }

    fn primitive(&mut self) -> Option<Primitive> {
        let p = match self.rng.gen_range(0..9) {
            0 | 1 => Primitive::HasVar {
                comp: self.comp(),
                var: self.var(),
                mult: self.mult(),
            },
            2 => Primitive::HasConst {
                comp: self.comp(),
                constant: self.consts.choose(&mut self.rng)?.clone(),
            },
            3 | 4 => {
                let receiver = self.comp();
                let sender = self.comp();
                if receiver == sender {
                    return None;
                }
                let mut items = vec![self.subject()];
                let extra = self.subject();
                if !items.contains(&extra) && self.rng.gen_bool(0.3) {
                    items.push(extra);
                }
                let statements = if self.rng.gen_bool(0.4) {
                    vec![self.statement(sender.clone())]
                } else {
                    vec![]
                };
                Primitive::Receive {
                    receiver,
                    sender,
                    statements,
                    items,
                    mult: self.mult(),
                }
            }
            5 | 6 => {
                let mut group = vec![self.comp()];
                let other = self.comp();
                if !group.contains(&other) && self.rng.gen_bool(0.3) {
                    group.push(other);
                }
                let target = self.var();
                let rhs = self.term(2, Some(&target));
                if rhs.variables().contains(&target) {
                    return None;
                }
                Primitive::Compute {
                    group,
                    target,
                    rhs,
                    mult: self.mult(),
                }
            }
            7 => {
                let comp = self.comp();
                let issuer = self.comp();
                Primitive::Verify {
                    comp,
                    statement: self.statement(issuer),
                    mult: self.mult(),
                }
            }
            _ => {
                if self.rng.gen_bool(0.1) {
                    Primitive::Reset
                } else {
                    Primitive::Trust {
                        truster: self.comp(),
                        trustee: self.comp(),
                    }
                }
            }
        };
        Some(p)
    }

    fn dep(&mut self) -> Option<DepEntry> {
        let i = self.rng.gen_range(0..self.vars.len());
        if i == 0 {
            return None;
        }
        let mut premises = Vec::new();
        for _ in 0..self.rng.gen_range(1..=2) {
            let j = self.rng.gen_range(0..i);
            let p = DepPremise::Var {
                var: self.vars[j].0.clone(),
                count: self.rng.gen_range(1..=3),
            };
            if !premises.iter().any(|q: &DepPremise| q.subject() == p.subject()) {
                premises.push(p);
            }
        }
        if let Some(c) = self.consts.first() {
            if self.rng.gen_bool(0.3) {
                premises.push(DepPremise::Const(c.clone()));
            }
        }
        Some(DepEntry {
            owner: self.comp(),
            target: Subject::Var(self.vars[i].0.clone()),
            premises,
        })
    }

    fn rule(&mut self) -> DeductiveRule {
        let owner = if self.rng.gen_bool(0.5) { Some(self.comp()) } else { None };
        let (x, y) = (Term::meta("x"), Term::meta("y"));
        let (premises, conclusion) = match self.rng.gen_range(0..2) {
            0 => (
                vec![Equation::eq(x.clone(), Term::app("F", vec![y.clone()]))],
                Equation::eq(Term::app("H", vec![x]), y),
            ),
            _ => (
                vec![
                    Equation::eq(x.clone(), Term::app("H", vec![y.clone()])),
                    Equation::eq(y.clone(), Term::app("F", vec![Term::meta("z")])),
                ],
                Equation::eq(Term::app("G", vec![x, y]), Term::meta("z")),
            ),
        };
        DeductiveRule {
            owner,
            premises,
            conclusion,
        }
    }

    fn build(mut self) -> Architecture {
        let mut a = Architecture::new();
        a.components = self.comps.iter().cloned().collect();
        a.variables = self.vars.iter().cloned().collect();
        a.constants = self.consts.iter().cloned().collect();
        for (f, n) in [("F", 1), ("G", 2), ("H", 1), ("Z", 0)] {
            a.functions.insert(FuncId::new(f), n);
        }
        for _ in 0..self.rng.gen_range(1..=10) {
            if let Some(p) = self.primitive() {
                a.primitives.push(p);
            }
        }
        for _ in 0..self.rng.gen_range(0..=3) {
            if let Some(d) = self.dep() {
                a.deps.push(d);
            }
        }
        for _ in 0..self.rng.gen_range(0..=2) {
            let r = self.rule();
            a.rules.push(r);
        }
        if self.rng.gen_bool(0.3) {
            let v = self.var();
            let t = self.term(1, Some(&v));
            a.functionality.push((v, t));
        }
        debug_assert!(a.validate().is_empty());
        a
    }
}
