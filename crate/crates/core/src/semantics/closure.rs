use std::collections::HashMap;

use crate::model::{DeductiveRule, Equation, FuncId, Pred, Substitution, Term};

/// Rounds of rule application before giving up on new conclusions.
const RULE_ROUNDS: usize = 6;

/// Congruence closure over ground terms with membership facts on the side.
#[derive(Default)]
pub(crate) struct Closure {
    terms: Vec<Term>,
    ids: HashMap<Term, usize>,
    parent: Vec<usize>,
    apps: Vec<(usize, FuncId, Vec<usize>)>,
    members: Vec<(usize, usize)>,
}

impl Closure {
    fn add(&mut self, t: &Term) -> usize {
        if let Some(&i) = self.ids.get(t) {
            return i;
        }
        let args: Vec<usize> = match t {
            Term::Apply(_, a) => a.iter().map(|x| self.add(x)).collect(),
            _ => Vec::new(),
        };
        let i = self.terms.len();
        self.terms.push(t.clone());
        self.ids.insert(t.clone(), i);
        self.parent.push(i);
        if let Term::Apply(f, _) = t {
            self.apps.push((i, f.clone(), args));
        }
        i
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.parent[a.max(b)] = a.min(b);
        true
    }

    /// Adds a fact; returns whether anything changed.
    fn assert(&mut self, eq: &Equation) -> bool {
        let (l, r) = (self.add(&eq.lhs), self.add(&eq.rhs));
        match eq.pred {
            Pred::Equal => self.union(l, r),
            Pred::Member => {
                if self.members.contains(&(l, r)) {
                    false
                } else {
                    self.members.push((l, r));
                    true
                }
            }
        }
    }

    fn congruence(&mut self) {
        loop {
            let mut changed = false;
            let mut sig: HashMap<(FuncId, Vec<usize>), usize> = HashMap::new();
            for k in 0..self.apps.len() {
                let (id, f, args) = self.apps[k].clone();
                let key = (f, args.iter().map(|&a| self.find(a)).collect());
                match sig.get(&key) {
                    Some(&other) => changed |= self.union(id, other),
                    None => {
                        sig.insert(key, id);
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn holds(&mut self, eq: &Equation) -> bool {
        let (l, r) = (self.add(&eq.lhs), self.add(&eq.rhs));
        self.congruence();
        match eq.pred {
            Pred::Equal => self.find(l) == self.find(r),
            Pred::Member => {
                let (l, r) = (self.find(l), self.find(r));
                let ms = self.members.clone();
                ms.into_iter().any(|(a, b)| self.find(a) == l && self.find(b) == r)
            }
        }
    }

    /// Ground equations currently entailed, as candidates for rule premises.
    fn candidates(&mut self, pred: Pred) -> Vec<Equation> {
        let n = self.terms.len();
        let roots: Vec<usize> = (0..n).map(|i| self.find(i)).collect();
        match pred {
            Pred::Equal => {
                let mut out = Vec::new();
                for a in 0..n {
                    for b in 0..n {
                        if a != b && roots[a] == roots[b] {
                            out.push(Equation::eq(self.terms[a].clone(), self.terms[b].clone()));
                        }
                    }
                }
                out
            }
            Pred::Member => {
                let mut out = Vec::new();
                for &(a, b) in &self.members {
                    for x in (0..n).filter(|&x| roots[x] == roots[a]) {
                        for y in (0..n).filter(|&y| roots[y] == roots[b]) {
                            out.push(Equation::member(self.terms[x].clone(), self.terms[y].clone()));
                        }
                    }
                }
                out
            }
        }
    }
}

fn match_all(premises: &[Equation], pool: &(Vec<Equation>, Vec<Equation>), s: &Substitution, out: &mut Vec<Substitution>) {
    let Some((p, rest)) = premises.split_first() else {
        out.push(s.clone());
        return;
    };
    let cands = if p.pred == Pred::Equal { &pool.0 } else { &pool.1 };
    for g in cands {
        let mut s2 = s.clone();
        if p.match_into(g, &mut s2) {
            match_all(rest, pool, &s2, out);
        }
    }
}

/// Whether `goal` follows from `facts` under equality, congruence and `rules`.
pub(crate) fn entails(facts: &[Equation], rules: &[&DeductiveRule], goal: &Equation) -> bool {
    let mut c = Closure::default();
    for f in facts {
        c.assert(f);
    }
    for r in rules {
        for p in &r.premises {
            if p.is_ground() {
                c.add(&p.lhs);
                c.add(&p.rhs);
            }
        }
    }
    c.add(&goal.lhs);
    c.add(&goal.rhs);
    for _ in 0..RULE_ROUNDS {
        c.congruence();
        if c.holds(goal) {
            return true;
        }
        let eqs = c.candidates(Pred::Equal);
        let mems = c.candidates(Pred::Member);
        let pool = (eqs, mems);
        let mut changed = false;
        for r in rules {
            let mut subs = Vec::new();
            match_all(&r.premises, &pool, &Substitution::new(), &mut subs);
            for s in subs {
                let concl = r.conclusion.substitute(&s);
                if concl.is_ground() {
                    changed |= c.assert(&concl);
                }
            }
        }
        if !changed {
            break;
        }
    }
    c.holds(goal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn congruence_and_transitivity() {
        let facts = [Equation::eq(v("a"), v("b")), Equation::eq(v("b"), v("c"))];
        let goal = Equation::eq(Term::app("F", vec![v("a")]), Term::app("F", vec![v("c")]));
        assert!(entails(&facts, &[], &goal));
        assert!(!entails(&facts, &[], &Equation::eq(v("a"), v("d"))));
    }

    #[test]
    fn rules_fire_modulo_equality() {
        let rule = DeductiveRule {
            owner: None,
            premises: vec![Equation::eq(Term::meta("x"), Term::app("Enc", vec![Term::meta("y")]))],
            conclusion: Equation::eq(Term::app("Dec", vec![Term::meta("x")]), Term::meta("y")),
        };
        let facts = [
            Equation::eq(v("e"), v("f")),
            Equation::eq(v("f"), Term::app("Enc", vec![v("m")])),
        ];
        let goal = Equation::eq(Term::app("Dec", vec![v("e")]), v("m"));
        assert!(entails(&facts, &[&rule], &goal));
        assert!(!entails(&facts[1..], &[&rule], &goal));
    }
}
