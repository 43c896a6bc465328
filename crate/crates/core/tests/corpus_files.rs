mod common;

use archproof::dsl::{parse_architecture, parse_architecture_with, render};
use archproof::{check_consistency, CorpusName};
use std::collections::BTreeMap;

#[test]
fn files_match_builders() {
    for name in CorpusName::ALL {
        let parsed = common::parse_file(name);
        let built = common::build(name);
        assert_eq!(parsed, built, "{name}");
    }
}

#[test]
fn files_are_consistent() {
    for name in CorpusName::ALL {
        let r = check_consistency(&common::parse_file(name));
        assert!(r.violations.is_empty(), "{name}: {:?}", r.violations);
    }
}

#[test]
fn render_then_parse_is_identity() {
    for name in CorpusName::ALL {
        let a = common::parse_file(name);
        let text = render(&a);
        assert_eq!(parse_architecture(&text).unwrap(), a, "{name}");
        assert_eq!(render(&parse_architecture(&text).unwrap()), text, "{name}");
    }
}

#[test]
fn identification_files_need_their_parameters() {
    let text = common::source(CorpusName::MiE);
    let err = parse_architecture_with(&text, &BTreeMap::new()).unwrap_err();
    assert!(err.to_string().contains("parameter N"), "{err}");
}

#[test]
fn mi_e1_defaults_its_bound() {
    let text = common::source(CorpusName::MiE1);
    let p: BTreeMap<String, u64> = [("N", 4), ("Q", 8), ("C", 2)].into_iter().map(|(k, v)| (k.to_owned(), v)).collect();
    let a = parse_architecture_with(&text, &p).unwrap();
    assert_eq!(a.bound().get(), Some(32));
}
