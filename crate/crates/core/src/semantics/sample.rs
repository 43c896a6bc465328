use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::compat::Quota;
use super::covering::{dep_ready, prim_event};
use super::event::{Event, Trace, Value};
use super::state::GlobalState;
use crate::model::{Architecture, Primitive};

/// Size of the token alphabet used for fresh values.
const TOKENS: u32 = 64;

/// Uniform random walks over compatible traces. Computations are only
/// offered when their inputs are present, so walks never reach an error state.
pub struct Sampler<'a> {
    arch: &'a Architecture,
    rng: ChaCha8Rng,
    max_len: usize,
}

/// A finished walk.
pub struct Walk {
    pub trace: Trace,
    pub state: GlobalState,
    pub quota: Quota,
}

#[derive(Clone, Copy)]
enum Cand {
    Prim(usize),
    Dep(usize),
    Session,
}

impl<'a> Sampler<'a> {
    pub fn new(arch: &'a Architecture, seed: u64, max_len: usize) -> Self {
        Sampler {
            arch,
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_len,
        }
    }

    pub fn next_trace(&mut self) -> Trace {
        self.walk(|_, _| {}).trace
    }

    /// Samples one trace, calling `observe` after every step.
    pub fn walk(&mut self, mut observe: impl FnMut(&Event, &GlobalState)) -> Walk {
        let arch = self.arch;
        let mut st = GlobalState::init(arch);
        let mut quota = Quota::new(arch);
        let mut trace = Vec::new();
        let len = self.rng.gen_range(0..=self.max_len);
        let mut cands = Vec::new();
        for _ in 0..len {
            cands.clear();
            for (i, p) in arch.primitives.iter().enumerate() {
                if !quota.available(arch, i) {
                    continue;
                }
                let enabled = match p {
                    Primitive::Trust { .. } => false,
                    Primitive::Reset => true,
                    Primitive::Compute { group, rhs, .. } => st.compute_ready(group, rhs),
                    _ => p.components().first().is_some_and(|c| st.live(c).is_some()),
                };
                if enabled {
                    cands.push(Cand::Prim(i));
                }
            }
            for i in 0..arch.deps.len() {
                let d = &arch.deps[i];
                if st.live(&d.owner).is_some() && dep_ready(arch, i, &st).is_some() {
                    cands.push(Cand::Dep(i));
                }
            }
            cands.push(Cand::Session);
            let pick = cands[self.rng.gen_range(0..cands.len())];
            let rng = &mut self.rng;
            let mut fresh = || Value::Token(rng.gen_range(0..TOKENS));
            let event = match pick {
                Cand::Prim(i) if arch.primitives[i] == Primitive::Reset => Event::Reset,
                Cand::Prim(i) => match prim_event(arch, i, &st, &mut fresh) {
                    Some(e) => e,
                    None => continue,
                },
                Cand::Dep(i) => match dep_ready(arch, i, &st) {
                    Some(e) => e,
                    None => continue,
                },
                Cand::Session => Event::Session,
            };
            match pick {
                Cand::Prim(_) if event == Event::Reset => quota.clear(),
                Cand::Prim(i) => quota.take(i),
                _ => {}
            }
            st.step(arch, &event);
            observe(&event, &st);
            trace.push(event);
        }
        Walk { trace, state: st, quota }
    }
}

/// `count` traces of at most `max_len` events, reproducible from `seed`.
pub fn sample_traces(arch: &Architecture, count: usize, max_len: usize, seed: u64) -> Vec<Trace> {
    let mut s = Sampler::new(arch, seed, max_len);
    (0..count).map(|_| s.next_trace()).collect()
}
