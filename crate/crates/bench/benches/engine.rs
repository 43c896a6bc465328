use archproof::dsl::{parse_architecture_with, render};
use archproof::leakage::Experiment;
use archproof::prover::{derive, saturate};
use archproof::report::integrity_equation;
use archproof::semantics::{covering_trace, sample_traces};
use archproof::{CorpusName, Property};
use archproof_bench::{corpus, scaled_mi_e};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::collections::BTreeMap;

fn prover(c: &mut Criterion) {
    let mut g = c.benchmark_group("saturate");
    for name in CorpusName::ALL {
        let a = corpus(name);
        g.bench_with_input(BenchmarkId::from_parameter(name), &a, |b, a| b.iter(|| saturate(a).unwrap()));
    }
    g.finish();

    let mut g = c.benchmark_group("integrity");
    for name in CorpusName::BASIC {
        let a = corpus(name);
        let q = Property::know("T", integrity_equation());
        g.bench_with_input(BenchmarkId::from_parameter(name), &a, |b, a| b.iter(|| derive(a, &q).unwrap()));
    }
    g.finish();

    let mut g = c.benchmark_group("saturate_mi_e_scaled");
    for n in [4u64, 16, 64] {
        let a = scaled_mi_e(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| saturate(a).unwrap()));
    }
    g.finish();
}

fn dsl(c: &mut Criterion) {
    let text = render(&corpus(CorpusName::MiE));
    c.bench_function("parse_mi_e", |b| b.iter(|| parse_architecture_with(&text, &BTreeMap::new()).unwrap()));
}

fn semantics(c: &mut Criterion) {
    let ed = corpus(CorpusName::Ed);
    let mi = corpus(CorpusName::MiE);
    c.bench_function("covering_ed", |b| b.iter(|| covering_trace(&ed).unwrap()));
    c.bench_function("covering_mi_e", |b| b.iter(|| covering_trace(&mi).unwrap()));
    c.bench_function("sample_100_ed", |b| b.iter(|| sample_traces(&ed, 100, 40, 1)));
}

fn leakage(c: &mut Criterion) {
    let e = Experiment {
        n: 8,
        q: 16,
        c: 2,
        budget: 256,
        b: None,
    };
    c.bench_function("attack_256", |b| b.iter(|| e.run(0).unwrap()));
}

criterion_group!(benches, prover, dsl, semantics, leakage);
criterion_main!(benches);
