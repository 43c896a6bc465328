//! Cross-check of prover verdicts against executions.

use archproof::prover::saturate;
use archproof::semantics::{witness_trace, GlobalState, Sampler};
use archproof::{Architecture, ComponentId, Subject};

pub const SAMPLES: usize = 10_000;
pub const MAX_LEN: usize = 40;

#[derive(Debug, Default)]
pub struct Report {
    pub has_none_checked: usize,
    pub has_witnessed: usize,
}

/// Every derived `HasNone` survives `samples` random traces and every derived
/// `Has` holds somewhere on the witness trace.
pub fn check(arch: &Architecture, samples: usize, seed: u64) -> Result<Report, String> {
    let fb = saturate(arch).map_err(|e| e.to_string())?;
    let mut none: Vec<(ComponentId, Subject)> = Vec::new();
    for c in &arch.components {
        for s in arch.subjects() {
            if fb.has_count(c, &s).is_none() {
                none.push((c.clone(), s));
            }
        }
    }
    let mut sampler = Sampler::new(arch, seed, MAX_LEN);
    for _ in 0..samples {
        let mut bad = None;
        let w = sampler.walk(|_, st| {
            if bad.is_none() {
                bad = none.iter().find(|(c, s)| st.has(c, s, 1)).cloned();
            }
        });
        if let Some((c, s)) = bad {
            return Err(format!(
                "hasnone {c}({s}) refuted by:\n{}",
                archproof::semantics::format_trace(&w.trace)
            ));
        }
    }

    let bound = arch.bound().get().unwrap_or(1);
    let facts = fb.has_facts();
    let rounds = facts.iter().filter_map(|f| f.count.get()).fold(bound, u64::max);
    let trace = witness_trace(arch, rounds);
    let mut st = GlobalState::init(arch);
    let mut pending: Vec<(ComponentId, Subject, u64)> = facts
        .iter()
        .map(|f| (f.component.clone(), f.subject.clone(), f.count.get().unwrap_or(bound)))
        .collect();
    let total = pending.len();
    pending.retain(|(c, s, n)| !st.has(c, s, *n));
    for e in &trace {
        st.step(arch, e);
        pending.retain(|(c, s, n)| !st.has(c, s, *n));
    }
    if let Some((c, s, n)) = pending.first() {
        return Err(format!("has^{n} {c}({s}) not witnessed"));
    }
    Ok(Report {
        has_none_checked: none.len(),
        has_witnessed: total,
    })
}
