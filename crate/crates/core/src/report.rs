//! Access and trust summary of the four verification architectures.

use std::collections::BTreeSet;
use std::fmt;

use crate::model::{instantiate_corpus, ComponentId, CorpusName, CorpusParams, Equation, Primitive, Property, Subject, Term};
use crate::prover::{derive, saturate, validate_proof, ProverError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub arch: CorpusName,
    /// Components with `Has(br)`.
    pub br: BTreeSet<String>,
    /// Components with `Has(bs)`.
    pub bs: BTreeSet<String>,
    pub trust: BTreeSet<(String, String)>,
    /// `K_T(dec = Mu(br, bs, THR))` holds with a checked proof.
    pub integrity: bool,
}

/// Display name of a component; the card of `moc` is a secure module.
pub fn table_label(arch: CorpusName, comp: &ComponentId) -> String {
    match (arch, comp.as_str()) {
        (CorpusName::Moc, "C") => "M".to_owned(),
        (_, c) => c.to_owned(),
    }
}

pub fn integrity_equation() -> Equation {
    Equation::eq(
        Term::var("dec"),
        Term::app("Mu", vec![Term::var("br"), Term::var("bs"), Term::constant("THR")]),
    )
}

/// One row computed by the prover.
pub fn table_row(arch: CorpusName) -> Result<TableRow, ProverError> {
    let a = instantiate_corpus(arch, &CorpusParams::default()).expect("verification architectures take no parameters");
    let fb = saturate(&a)?;
    let holders = |v: &str| {
        a.components
            .iter()
            .filter(|c| fb.has(c, &Subject::var(v), 1))
            .map(|c| table_label(arch, c))
            .collect()
    };
    let trust = a
        .primitives
        .iter()
        .filter_map(|p| match p {
            Primitive::Trust { truster, trustee } => Some((table_label(arch, truster), table_label(arch, trustee))),
            _ => None,
        })
        .collect();
    let v = derive(&a, &Property::know("T", integrity_equation()))?;
    let integrity = v.derivable && v.proof.is_some_and(|p| validate_proof(&a, &p));
    Ok(TableRow {
        arch,
        br: holders("br"),
        bs: holders("bs"),
        trust,
        integrity,
    })
}

pub fn corpus_table() -> Result<Vec<TableRow>, ProverError> {
    CorpusName::BASIC.iter().map(|&n| table_row(n)).collect()
}

/// The reference table.
pub fn expected_table() -> Vec<TableRow> {
    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| (*s).to_owned()).collect()
    }
    fn pairs(xs: &[(&str, &str)]) -> BTreeSet<(String, String)> {
        xs.iter().map(|(a, b)| ((*a).to_owned(), (*b).to_owned())).collect()
    }
    let row = |arch, br: &[&str], bs: &[&str], trust: &[(&str, &str)]| TableRow {
        arch,
        br: set(br),
        bs: set(bs),
        trust: pairs(trust),
        integrity: true,
    };
    vec![
        row(CorpusName::Ed, &["I", "T"], &["T"], &[("T", "I")]),
        row(CorpusName::Hsm, &["I", "M"], &["T", "M"], &[("T", "I"), ("T", "M")]),
        row(CorpusName::Hom, &["I"], &["T"], &[("T", "I"), ("T", "M"), ("T", "S")]),
        row(CorpusName::Moc, &["M"], &["T", "M"], &[("T", "M")]),
    ]
}

fn join(xs: impl IntoIterator<Item = String>) -> String {
    let v: Vec<String> = xs.into_iter().collect();
    format!("{{{}}}", v.join(", "))
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} br: {:<8} bs: {:<8} trust: {:<24} integrity: {}",
            self.arch.as_str(),
            join(self.br.iter().cloned()),
            join(self.bs.iter().cloned()),
            join(self.trust.iter().map(|(a, b)| format!("({a}, {b})"))),
            if self.integrity { "yes" } else { "no" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn computed_table_matches_reference() {
        assert_eq!(corpus_table().unwrap(), expected_table());
    }
}
