use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use refereed::generate::{generate, GenSpec, Kind};
use refereed::harness::{run_trials, run_trials_seq, Protocol, TrialConfig};
use refereed::rlp::Params;
use refereed::{AdversarySpec, Rational};

fn trials(c: &mut Criterion) {
    let mut spec = GenSpec::new(Kind::LossGap, 6, 1);
    spec.alpha = Rational::from(3u32);
    spec.eta = Rational::ratio(1, 8);
    let (inst, _) = generate(&spec).unwrap();
    let params = Params::new(Rational::from(1u32), Rational::ratio(1, 4)).with_eta(Rational::ratio(1, 8));

    let mut group = c.benchmark_group("trials");
    group.sample_size(10);
    for protocol in [Protocol::CertSum, Protocol::RlpAdditive, Protocol::Rlp01] {
        let cfg = TrialConfig::new(protocol, params.clone(), AdversarySpec::Honest);
        // rayon falls back to one thread without the feature, so both arms stay comparable
        group.bench_with_input(BenchmarkId::new("parallel", protocol), &cfg, |b, cfg| {
            b.iter(|| black_box(run_trials(&inst, cfg, 0, 16)))
        });
        group.bench_with_input(BenchmarkId::new("sequential", protocol), &cfg, |b, cfg| {
            b.iter(|| black_box(run_trials_seq(&inst, cfg, 0, 16)))
        });
    }
    group.finish();
}

criterion_group!(benches, trials);
criterion_main!(benches);
