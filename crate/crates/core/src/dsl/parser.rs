use std::collections::{BTreeMap, BTreeSet};

use super::error::{ParseError, SourceSpan};
use super::lexer::{tokenize, Tok, Token};
use crate::model::{
    Architecture, ComponentId, ConstId, DepEntry, DepPremise, DeductiveRule, Equation, FuncId,
    Multiplicity, Primitive, ProofItem, Property, Statement, Subject, Term, VarId,
};

type PResult<T> = Result<T, ParseError>;

/// Whether identifiers are resolved against declarations.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Program,
    Query,
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    mode: Mode,
    supplied: &'a BTreeMap<String, u64>,
    params: BTreeMap<String, u64>,
    arch: Architecture,
}

impl<'a> Parser<'a> {
    fn new(src: &str, mode: Mode, supplied: &'a BTreeMap<String, u64>) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            mode,
            supplied,
            params: BTreeMap::new(),
            arch: Architecture::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError::new(self.span(), expected, &self.peek().describe()))
    }

    fn fail_at<T>(&self, span: SourceSpan, expected: &[&str], found: &str) -> PResult<T> {
        Err(ParseError::new(span, expected, found))
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == kw)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.fail(&[&format!("`{s}`")])
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.at_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&format!("`{kw}`")])
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            _ => self.fail(&[what]),
        }
    }

    /// Comma-separated list up to (and including) the closing symbol.
    fn list<T>(&mut self, close: &str, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        if self.eat_sym(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat_sym(close) {
                return Ok(out);
            }
            if !self.eat_sym(",") {
                return self.fail(&["`,`", &format!("`{close}`")]);
            }
        }
    }

    // ----- names -------------------------------------------------------

    fn component(&mut self) -> PResult<ComponentId> {
        let (name, sp) = self.ident("component name")?;
        let id = ComponentId::new(name.as_str());
        if self.mode == Mode::Program && !self.arch.components.contains(&id) {
            return self.fail_at(sp, &["declared component"], &name);
        }
        Ok(id)
    }

    fn subject(&mut self) -> PResult<Subject> {
        let (name, sp) = self.ident("variable or constant")?;
        self.resolve_subject(&name, sp)
    }

    fn resolve_subject(&self, name: &str, sp: SourceSpan) -> PResult<Subject> {
        if self.mode == Mode::Query || self.arch.variables.contains_key(&VarId::new(name)) {
            Ok(Subject::var(name))
        } else if self.arch.constants.contains(&ConstId::new(name)) {
            Ok(Subject::constant(name))
        } else {
            self.fail_at(sp, &["declared variable or constant"], name)
        }
    }

    fn variable(&mut self) -> PResult<VarId> {
        let (name, sp) = self.ident("variable")?;
        match self.resolve_subject(&name, sp)? {
            Subject::Var(v) => Ok(v),
            Subject::Const(_) => self.fail_at(sp, &["variable"], &name),
        }
    }

    fn declare(&self, set_has: bool, sp: SourceSpan, name: &str) -> PResult<()> {
        if set_has {
            return self.fail_at(sp, &["fresh name"], name);
        }
        Ok(())
    }

    fn name_taken(&self, name: &str) -> bool {
        self.arch.variables.contains_key(&VarId::new(name))
            || self.arch.constants.contains(&ConstId::new(name))
    }

    // ----- numbers -----------------------------------------------------

    fn expr(&mut self) -> PResult<(u64, SourceSpan)> {
        let start = self.span();
        let mut acc = self.product()?;
        loop {
            let op = if self.at_sym("+") {
                '+'
            } else if self.at_sym("-") {
                '-'
            } else {
                break;
            };
            self.bump();
            let rhs = self.product()?;
            acc = match op {
                '+' => acc.checked_add(rhs),
                _ => acc.checked_sub(rhs),
            }
            .map_or_else(|| self.fail_at(self.prev_span(), &["value in range"], "overflow"), Ok)?;
        }
        Ok((acc, join(start, self.prev_span())))
    }

    fn product(&mut self) -> PResult<u64> {
        let mut acc = self.atom()?;
        loop {
            let op = if self.at_sym("*") {
                '*'
            } else if self.at_sym("/") {
                '/'
            } else {
                return Ok(acc);
            };
            self.bump();
            let rhs = self.atom()?;
            acc = match op {
                '*' => acc.checked_mul(rhs),
                _ => acc.checked_div(rhs),
            }
            .map_or_else(|| self.fail_at(self.prev_span(), &["value in range"], "overflow or division by zero"), Ok)?;
        }
    }

    fn atom(&mut self) -> PResult<u64> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            Tok::Sym("(") => {
                self.bump();
                let (v, _) = self.expr()?;
                self.expect_sym(")")?;
                Ok(v)
            }
            Tok::Ident(name) if name == "ceildiv" => {
                self.bump();
                self.expect_sym("(")?;
                let (a, _) = self.expr()?;
                self.expect_sym(",")?;
                let (b, sp) = self.expr()?;
                self.expect_sym(")")?;
                if b == 0 {
                    return self.fail_at(sp, &["non-zero divisor"], "0");
                }
                Ok(a.div_ceil(b))
            }
            Tok::Ident(name) => match self.params.get(&name).copied() {
                Some(v) => {
                    self.bump();
                    Ok(v)
                }
                None => self.fail(&["declared parameter"]),
            },
            _ => self.fail(&["integer", "parameter", "`(`"]),
        }
    }

    fn positive(&mut self) -> PResult<u64> {
        let (v, sp) = self.expr()?;
        if v == 0 {
            return self.fail_at(sp, &["positive value"], "0");
        }
        Ok(v)
    }

    /// Optional `^inf` / `^expr`; absent means unbounded.
    fn mult(&mut self) -> PResult<Multiplicity> {
        if !self.eat_sym("^") {
            return Ok(Multiplicity::Infinite);
        }
        if self.at_kw("inf") {
            self.bump();
            return Ok(Multiplicity::Infinite);
        }
        let (v, sp) = self.expr()?;
        Multiplicity::finite(v).map_or_else(|| self.fail_at(sp, &["positive multiplicity"], "0"), Ok)
    }

    // ----- terms -------------------------------------------------------

    fn term(&mut self, metas_ok: bool) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Meta(m) if metas_ok => {
                self.bump();
                Ok(Term::Meta(m))
            }
            Tok::Ident(name) if matches!(self.peek_at(1), Tok::Sym("(")) => {
                let sp = self.bump().span;
                self.bump();
                let args = self.list(")", |p| p.term(metas_ok))?;
                if self.mode == Mode::Program {
                    match self.arch.functions.get(&FuncId::new(name.as_str())) {
                        None => return self.fail_at(sp, &["declared function"], &name),
                        Some(&k) if k != args.len() => {
                            let want = format!("{k} argument(s) for {name}");
                            return self.fail_at(sp, &[&want], &args.len().to_string());
                        }
                        _ => {}
                    }
                }
                Ok(Term::Apply(FuncId::new(name), args))
            }
            Tok::Ident(name) => {
                let sp = self.bump().span;
                match self.resolve_subject(&name, sp)? {
                    Subject::Const(c) => Ok(Term::Const(c)),
                    Subject::Var(var) => {
                        let index = if self.eat_sym("[") {
                            let isp = self.span();
                            let i = self.positive()?;
                            let range = self.arch.variables.get(&var).copied().unwrap_or(u32::MAX);
                            if self.mode == Mode::Program && i > u64::from(range) {
                                return self.fail_at(isp, &[&format!("index in 1..={range}")], &i.to_string());
                            }
                            self.expect_sym("]")?;
                            Some(i as u32)
                        } else {
                            None
                        };
                        let window = if self.eat_sym("^") {
                            let wsp = self.span();
                            let w = self.positive()?;
                            let w = u32::try_from(w)
                                .ok()
                                .and_then(std::num::NonZeroU32::new)
                                .map_or_else(|| self.fail_at(wsp, &["window below 2^32"], &w.to_string()), Ok)?;
                            Some(w)
                        } else {
                            None
                        };
                        Ok(Term::Var { var, index, window })
                    }
                }
            }
            _ => self.fail(&["term"]),
        }
    }

    fn equation(&mut self, metas_ok: bool) -> PResult<Equation> {
        let lhs = self.term(metas_ok)?;
        if self.eat_sym("=") {
            Ok(Equation::eq(lhs, self.term(metas_ok)?))
        } else if self.at_kw("in") {
            self.bump();
            Ok(Equation::member(lhs, self.term(metas_ok)?))
        } else {
            self.fail(&["`=`", "`in`"])
        }
    }

    fn claims(&mut self) -> PResult<Vec<Equation>> {
        self.expect_sym("{")?;
        self.list("}", |p| p.equation(false))
    }

    fn statement(&mut self) -> PResult<Statement> {
        if self.at_kw("attest") {
            self.bump();
            let issuer = self.component()?;
            let claims = self.claims()?;
            return Ok(Statement::Attest { issuer, claims });
        }
        let sp = self.span();
        self.expect_kw("proof")?;
        let issuer = self.component()?;
        self.expect_sym("{")?;
        let payload = self.list("}", |p| {
            if p.at_kw("attest") {
                p.bump();
                let issuer = p.component()?;
                let claims = p.claims()?;
                Ok(ProofItem::Attest { issuer, claims })
            } else {
                Ok(ProofItem::Eq(p.equation(false)?))
            }
        })?;
        if payload.is_empty() {
            return self.fail_at(join(sp, self.prev_span()), &["non-empty proof payload"], "{}");
        }
        Ok(Statement::Proof { issuer, payload })
    }

    // ----- items -------------------------------------------------------

    fn program(mut self) -> PResult<Architecture> {
        while *self.peek() != Tok::Eof {
            let start = self.span();
            let (kw, _) = self.ident("declaration or primitive")?;
            let before = self.arch.primitives.len() + self.arch.deps.len() + self.arch.rules.len();
            self.item(&kw, start)?;
            let after = self.arch.primitives.len() + self.arch.deps.len() + self.arch.rules.len();
            if after > before {
                self.check_item(join(start, self.prev_span()))?;
            }
        }
        if let Some(unknown) = self.supplied.keys().find(|k| !self.params.contains_key(*k)) {
            let sp = SourceSpan {
                start: 0,
                end: 0,
                line: 1,
                column: 1,
            };
            return self.fail_at(sp, &["parameter declared by the file"], unknown);
        }
        if let Some(e) = self.arch.validate().into_iter().next() {
            return self.fail_at(self.prev_span(), &["well-formed architecture"], &e.to_string());
        }
        Ok(self.arch)
    }

    /// Validates the newest primitive, dependence or rule against the declarations.
    fn check_item(&self, span: SourceSpan) -> PResult<()> {
        let mut scratch = Architecture {
            components: self.arch.components.clone(),
            variables: self.arch.variables.clone(),
            constants: self.arch.constants.clone(),
            functions: self.arch.functions.clone(),
            ..Architecture::new()
        };
        if let Some(p) = self.arch.primitives.last() {
            scratch.primitives.push(p.clone());
        }
        if let Some(d) = self.arch.deps.last() {
            scratch.deps.push(d.clone());
        }
        if let Some(r) = self.arch.rules.last() {
            scratch.rules.push(r.clone());
        }
        match scratch.validate().into_iter().next() {
            Some(e) => self.fail_at(span, &["well-formed item"], &e.to_string()),
            None => Ok(()),
        }
    }

    fn item(&mut self, kw: &str, start: SourceSpan) -> PResult<()> {
        match kw {
            "component" => {
                let names = self.names()?;
                for (n, sp) in names {
                    let id = ComponentId::new(n.as_str());
                    self.declare(self.arch.components.contains(&id), sp, &n)?;
                    self.arch.components.insert(id);
                }
            }
            "var" => {
                let (n, sp) = self.ident("variable name")?;
                self.declare(self.name_taken(&n), sp, &n)?;
                let range = if self.at_kw("range") {
                    self.bump();
                    let rsp = self.span();
                    let r = self.positive()?;
                    u32::try_from(r).map_or_else(|_| self.fail_at(rsp, &["range below 2^32"], &r.to_string()), Ok)?
                } else {
                    1
                };
                self.arch.variables.insert(VarId::new(n), range);
            }
            "const" => {
                for (n, sp) in self.names()? {
                    self.declare(self.name_taken(&n), sp, &n)?;
                    self.arch.constants.insert(ConstId::new(n));
                }
            }
            "fun" => {
                let decls = self.sep_list(|p| {
                    let (n, sp) = p.ident("function name")?;
                    p.expect_sym("/")?;
                    match p.peek().clone() {
                        Tok::Int(k) => {
                            p.bump();
                            Ok((n, sp, k as usize))
                        }
                        _ => p.fail(&["arity"]),
                    }
                })?;
                for (n, sp, k) in decls {
                    let id = FuncId::new(n.as_str());
                    self.declare(self.arch.functions.contains_key(&id), sp, &n)?;
                    self.arch.functions.insert(id, k);
                }
                return Ok(());
            }
            "param" => {
                let (n, sp) = self.ident("parameter name")?;
                self.declare(self.params.contains_key(&n), sp, &n)?;
                let default = if self.eat_sym("=") { Some(self.expr()?.0) } else { None };
                let value = match self.supplied.get(&n).copied().or(default) {
                    Some(v) => v,
                    None => return self.fail_at(sp, &[&format!("a value for parameter {n}")], "none"),
                };
                self.params.insert(n, value);
            }
            "has" => {
                let msp = self.span();
                let explicit = self.at_sym("^");
                let mult = self.mult()?;
                let comp = self.component()?;
                self.expect_sym("(")?;
                let subject = self.subject()?;
                self.expect_sym(")")?;
                let p = match subject {
                    Subject::Var(var) => Primitive::HasVar { comp, var, mult },
                    Subject::Const(constant) => {
                        if explicit && !mult.is_infinite() {
                            return self.fail_at(msp, &["no multiplicity on a constant"], &format!("^{mult}"));
                        }
                        Primitive::HasConst { comp, constant }
                    }
                };
                self.arch.primitives.push(p);
            }
            "receive" => {
                let mult = self.mult()?;
                let receiver = self.component()?;
                self.expect_sym("<-")?;
                let sender = self.component()?;
                let mut statements = Vec::new();
                while self.at_kw("attest") || self.at_kw("proof") {
                    statements.push(self.statement()?);
                }
                if !self.at_kw("items") {
                    return self.fail(&["`attest`", "`proof`", "`items`"]);
                }
                self.bump();
                self.expect_sym("{")?;
                let items = self.list("}", |p| p.subject())?;
                self.arch.primitives.push(Primitive::Receive {
                    receiver,
                    sender,
                    statements,
                    items,
                    mult,
                });
            }
            "compute" => {
                let mult = self.mult()?;
                self.expect_sym("{")?;
                let group = self.list("}", |p| p.component())?;
                let target = self.variable()?;
                self.expect_sym("=")?;
                let rhs = self.term(false)?;
                self.arch.primitives.push(Primitive::Compute {
                    group,
                    target,
                    rhs,
                    mult,
                });
            }
            "verify" => {
                let mult = self.mult()?;
                let comp = self.component()?;
                let statement = self.statement()?;
                self.arch.primitives.push(Primitive::Verify {
                    comp,
                    statement,
                    mult,
                });
            }
            "trust" => {
                let truster = self.component()?;
                let trustee = self.component()?;
                self.arch.primitives.push(Primitive::Trust { truster, trustee });
            }
            "reset" => self.arch.primitives.push(Primitive::Reset),
            "dep" => {
                let owner = self.component()?;
                self.expect_sym(":")?;
                let target = self.subject()?;
                self.expect_sym("<-")?;
                self.expect_sym("{")?;
                let premises = self.list("}", |p| {
                    let (n, sp) = p.ident("variable or constant")?;
                    match p.resolve_subject(&n, sp)? {
                        Subject::Var(var) => {
                            let count = if p.eat_sym("^") { p.positive()? } else { 1 };
                            Ok(DepPremise::Var { var, count })
                        }
                        Subject::Const(c) => Ok(DepPremise::Const(c)),
                    }
                })?;
                self.arch.deps.push(DepEntry {
                    owner,
                    target,
                    premises,
                });
            }
            "rule" => {
                let owner = if self.at_sym(":") { None } else { Some(self.component()?) };
                self.expect_sym(":")?;
                self.expect_sym("{")?;
                let premises = self.list("}", |p| p.equation(true))?;
                self.expect_sym("|>")?;
                let conclusion = self.equation(true)?;
                self.arch.rules.push(DeductiveRule {
                    owner,
                    premises,
                    conclusion,
                });
            }
            "functionality" => {
                let var = self.variable()?;
                self.expect_sym("=")?;
                let t = self.term(false)?;
                self.arch.functionality.push((var, t));
            }
            other => {
                return self.fail_at(
                    start,
                    &["`component`", "`var`", "`const`", "`fun`", "`param`", "a primitive", "`dep`", "`rule`"],
                    other,
                )
            }
        }
        self.expect_sym(";")
    }

    fn sep_list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = vec![item(self)?];
        while self.eat_sym(",") {
            out.push(item(self)?);
        }
        self.expect_sym(";")?;
        Ok(out)
    }

    fn names(&mut self) -> PResult<Vec<(String, SourceSpan)>> {
        let mut out = vec![self.ident("name")?];
        while self.eat_sym(",") {
            out.push(self.ident("name")?);
        }
        Ok(out)
    }

    // ----- queries -----------------------------------------------------

    fn query(mut self) -> PResult<Property> {
        let mut parts = vec![self.query_atom()?];
        while self.eat_sym("&") {
            parts.push(self.query_atom()?);
        }
        if *self.peek() != Tok::Eof {
            return self.fail(&["`&`", "end of input"]);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            Property::Conj(parts)
        })
    }

    fn query_atom(&mut self) -> PResult<Property> {
        let (kw, sp) = self.ident("`has`, `hasnone` or `knows`")?;
        match kw.as_str() {
            "has" | "hasnone" => {
                let count = if kw == "has" && self.eat_sym("^") {
                    match self.peek().clone() {
                        Tok::Int(n) if n > 0 => {
                            self.bump();
                            n
                        }
                        _ => return self.fail(&["positive integer"]),
                    }
                } else {
                    1
                };
                let comp = self.component()?;
                self.expect_sym("(")?;
                let (name, _) = self.ident("variable or constant")?;
                self.expect_sym(")")?;
                let subject = Subject::var(&name);
                Ok(if kw == "has" {
                    Property::has(comp.as_str(), &subject, count)
                } else {
                    Property::has_none(comp.as_str(), &subject)
                })
            }
            "knows" => {
                let comp = self.component()?;
                self.expect_sym("(")?;
                let mut eqs = vec![self.equation(false)?];
                while self.eat_sym("&") {
                    eqs.push(self.equation(false)?);
                }
                self.expect_sym(")")?;
                let mut ks: Vec<Property> = eqs.into_iter().map(|e| Property::know(comp.as_str(), e)).collect();
                Ok(if ks.len() == 1 {
                    ks.pop().expect("one equation")
                } else {
                    Property::Conj(ks)
                })
            }
            _ => self.fail_at(sp, &["`has`", "`hasnone`", "`knows`"], &kw),
        }
    }
}

fn join(a: SourceSpan, b: SourceSpan) -> SourceSpan {
    SourceSpan {
        start: a.start,
        end: b.end.max(a.start),
        line: a.line,
        column: a.column,
    }
}

/// Parses a `.parch` program. Parameters without a default must be supplied
/// through [`parse_architecture_with`].
pub fn parse_architecture(text: &str) -> Result<Architecture, ParseError> {
    parse_architecture_with(text, &BTreeMap::new())
}

/// Parses a `.parch` program with parameter values overriding the file's defaults.
pub fn parse_architecture_with(text: &str, params: &BTreeMap<String, u64>) -> Result<Architecture, ParseError> {
    Parser::new(text, Mode::Program, params)?.program()
}

/// Parses a property without an architecture; names are left unresolved
/// (every identifier is read as a variable).
pub fn parse_query(text: &str) -> Result<Property, ParseError> {
    let none = BTreeMap::new();
    Parser::new(text, Mode::Query, &none)?.query()
}

/// Parses a property and resolves its names against `arch`.
pub fn parse_query_for(text: &str, arch: &Architecture) -> Result<Property, ParseError> {
    let prop = parse_query(text)?.resolve(arch);
    match prop.validate(arch).into_iter().next() {
        Some(e) => {
            let span = SourceSpan {
                start: 0,
                end: text.len(),
                line: 1,
                column: 1,
            };
            Err(ParseError::new(span, &["query over declared names"], &e.to_string()))
        }
        None => Ok(prop),
    }
}

/// Names declared with `param` in a program, without evaluating anything else.
pub fn declared_params(text: &str) -> BTreeSet<String> {
    let Ok(toks) = tokenize(text) else {
        return BTreeSet::new();
    };
    toks.windows(2)
        .filter_map(|w| match (&w[0].tok, &w[1].tok) {
            (Tok::Ident(k), Tok::Ident(n)) if k == "param" => Some(n.clone()),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_program() {
        let a = parse_architecture("component U; var x range 1; has^1 U(x);").unwrap();
        assert_eq!(a.primitives.len(), 1);
        assert_eq!(a.bound(), Multiplicity::ONE);
    }

    #[test]
    fn zero_multiplicity_is_rejected() {
        let src = "component U; var x; has^0 U(x);";
        let e = parse_architecture(src).unwrap_err();
        assert_eq!(e.expected, vec!["positive multiplicity"]);
        assert_eq!(&src[e.span.start..e.span.end], "0");
    }

    #[test]
    fn undeclared_names_point_at_the_name() {
        let src = "component U;\nhas U(zz);";
        let e = parse_architecture(src).unwrap_err();
        assert_eq!((e.span.line, e.span.column), (2, 7));
        assert_eq!(e.found, "zz");
    }

    #[test]
    fn parameters_and_expressions() {
        let src = "param N; param C = 2; component T; var x range N; dep T: x <- {x^(N*3)};";
        let err = parse_architecture(src).unwrap_err();
        assert_eq!(err.found, "none");
        let mut p = BTreeMap::new();
        p.insert("N".to_owned(), 4);
        let src = "param N; param C = 2; component T; var x range N; var y; dep T: y <- {x^(N*3), x^ceildiv(N, C)};";
        let a = parse_architecture_with(src, &p).unwrap();
        assert_eq!(a.variables[&VarId::new("x")], 4);
        assert_eq!(a.deps[0].to_string(), "dep T: y <- {x^12, x^2}");
        p.insert("Z".to_owned(), 1);
        assert!(parse_architecture_with(src, &p).is_err());
    }

    #[test]
    fn self_definition_is_an_item_error() {
        let src = "component T; var x; fun F/1; compute {T} x = F(x);";
        let e = parse_architecture(src).unwrap_err();
        assert_eq!(e.expected, vec!["well-formed item"]);
        assert_eq!(e.span.start, src.find("compute").unwrap());
    }

    #[test]
    fn metavariables_only_in_rules() {
        let ok = "component T; var x; fun F/1; rule T: {?a = F(?b)} |> ?b = ?a;";
        assert_eq!(parse_architecture(ok).unwrap().rules.len(), 1);
        let bad = "component T; var x; fun F/1; compute {T} x = F(?b);";
        assert!(parse_architecture(bad).is_err());
    }

    #[test]
    fn queries() {
        assert_eq!(
            parse_query("hasnone S(br)").unwrap(),
            Property::has_none("S", &Subject::var("br"))
        );
        let q = parse_query("knows T (dec = Mu(br,bs,THR)) & hasnone T(br)").unwrap();
        assert!(matches!(&q, Property::Conj(ps) if ps.len() == 2));
        assert!(parse_query("has^-1 T(x)").is_err());
        assert!(parse_query("has^0 T(x)").is_err());
        assert!(parse_query("hasnone T(x) junk").is_err());
    }
}
