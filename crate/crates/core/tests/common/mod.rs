#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use archproof::dsl::{declared_params, parse_architecture_with};
use archproof::{instantiate_corpus, Architecture, CorpusName, CorpusParams};

pub mod gen;
pub mod laws;
pub mod soundness;

pub const N: u64 = 4;
pub const Q: u64 = 8;
pub const C: u64 = 2;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Parameters used throughout the tests: N=4, Q=8, C=2, n=N*Q, B=5.
pub fn params() -> CorpusParams {
    CorpusParams::identification(N, Q, C).with_n(N * Q).with_b(5)
}

pub fn param_map() -> BTreeMap<String, u64> {
    [("N", N), ("Q", Q), ("C", C), ("n", N * Q), ("B", 5)]
        .into_iter()
        .map(|(k, v)| (k.to_owned(), v))
        .collect()
}

pub fn source(name: CorpusName) -> String {
    let path = corpus_dir().join(format!("{name}.parch"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// The corpus file, parsed with the subset of [`param_map`] it declares.
pub fn parse_file(name: CorpusName) -> Architecture {
    let text = source(name);
    let declared = declared_params(&text);
    let supplied = param_map().into_iter().filter(|(k, _)| declared.contains(k)).collect();
    parse_architecture_with(&text, &supplied).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn build(name: CorpusName) -> Architecture {
    instantiate_corpus(name, &params()).unwrap()
}
