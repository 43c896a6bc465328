//! Shared workloads for the benchmarks.

use archproof::{instantiate_corpus, Architecture, CorpusName, CorpusParams};

/// Corpus entry with N=4, Q=8, C=2, n=32, B=5.
pub fn corpus(name: CorpusName) -> Architecture {
    let p = CorpusParams::identification(4, 8, 2).with_n(32).with_b(5);
    instantiate_corpus(name, &p).expect("corpus parameters are valid")
}

/// Identification architecture with a database of `big_n` templates.
pub fn scaled_mi_e(big_n: u64) -> Architecture {
    let p = CorpusParams::identification(big_n, 8, 2).with_n(big_n * 8);
    instantiate_corpus(CorpusName::MiE, &p).expect("corpus parameters are valid")
}
