//! Trace semantics: events, component states, compatibility with an
//! architecture, and semantic evaluation of properties.

mod closure;
mod compat;
mod covering;
mod eval;
mod event;
mod sample;
mod state;

pub use compat::{is_compatible, sources, Incompatibility, IncompatibleKind, Quota, Source};
pub use covering::{covering_trace, witness_trace, CoverError};
pub use eval::{eval_property_semantic, SemanticBudget, SemanticOutcome, SemanticVerdict};
pub use event::{dep_event, dep_function, format_trace, Event, Trace, Value};
pub use sample::{sample_traces, Sampler, Walk};
pub use state::{run_trace, ComponentState, GlobalState, LiveState};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{instantiate_corpus, ComponentId, CorpusName, CorpusParams, Property, Subject};

    fn corpus(name: CorpusName) -> crate::Architecture {
        instantiate_corpus(name, &CorpusParams::default()).unwrap()
    }

    #[test]
    fn ed_covering_trace_reaches_dec_at_u() {
        let a = corpus(CorpusName::Ed);
        let t = covering_trace(&a).unwrap();
        assert!(is_compatible(&a, &t).is_ok());
        let st = run_trace(&a, &t);
        assert!(st.comps.values().all(|c| !c.is_error()));
        assert!(st.has(&ComponentId::new("U"), &Subject::var("dec"), 1));
    }

    #[test]
    fn moc_covering_trace_has_one_event_per_primitive() {
        let a = corpus(CorpusName::Moc);
        let t = covering_trace(&a).unwrap();
        assert_eq!(t.len(), 10);
        assert!(run_trace(&a, &t).comps.values().all(|c| !c.is_error()));
    }

    #[test]
    fn mi_e2_covering_uses_each_bounded_primitive_twice() {
        let p = CorpusParams::identification(4, 2, 2).with_b(2);
        let a = instantiate_corpus(CorpusName::MiE2, &p).unwrap();
        let t = covering_trace(&a).unwrap();
        assert!(is_compatible(&a, &t).is_ok());
        assert_eq!(t.iter().filter(|e| **e == Event::Session).count(), 1);
        let mut q = Quota::new(&a);
        for e in &t {
            q.admit(&a, e).unwrap();
        }
        for (i, p) in a.primitives.iter().enumerate() {
            if p.mult().and_then(|m| m.get()) == Some(2) {
                assert_eq!(q.used(i), 2, "{p}");
            }
        }
    }

    #[test]
    fn samples_are_reproducible_and_compatible() {
        let a = corpus(CorpusName::Ed);
        let x = sample_traces(&a, 50, 30, 7);
        let y = sample_traces(&a, 50, 30, 7);
        assert_eq!(x, y);
        assert!(x.iter().all(|t| is_compatible(&a, t).is_ok()));
    }

    #[test]
    fn trace_lines_are_tab_separated() {
        let a = corpus(CorpusName::Ed);
        let t = covering_trace(&a).unwrap();
        let text = format_trace(&t);
        assert_eq!(text.lines().count(), t.len());
        assert!(text.lines().next().unwrap().starts_with("has\tI\tbr\t"));
    }

    #[test]
    fn semantic_checks_on_ed_and_moc() {
        let b = SemanticBudget {
            samples: 200,
            ..SemanticBudget::default()
        };
        let ed = corpus(CorpusName::Ed);
        let v = eval_property_semantic(&ed, &Property::has("T", &Subject::var("bs"), 1), &b);
        assert_eq!(v.outcome, SemanticOutcome::Witnessed);
        let v = eval_property_semantic(&ed, &Property::has_none("S", &Subject::var("br")), &b);
        assert_eq!(v.outcome, SemanticOutcome::Inconclusive);
        let v = eval_property_semantic(&ed, &Property::has_none("T", &Subject::var("bs")), &b);
        assert_eq!(v.outcome, SemanticOutcome::Refuted);

        let moc = corpus(CorpusName::Moc);
        let q = crate::dsl::parse_query_for("knows T (dec = Mu(br, bs, THR))", &moc).unwrap();
        let v = eval_property_semantic(&moc, &q, &b);
        assert_eq!(v.outcome, SemanticOutcome::WitnessedUpToBudget);
    }
}
