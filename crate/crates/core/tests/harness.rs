use refereed::generate::{generate, GenSpec, Kind};
use refereed::harness::{run_trials, run_trials_seq, Aggregate, Protocol, TrialConfig};
use refereed::instance_file::{parse_instance, write_instance};
use refereed::rlp::Params;
use refereed::{AdversarySpec, Rational};

fn params() -> Params {
    Params::new(Rational::from(1u32), Rational::ratio(1, 4)).with_eta(Rational::ratio(1, 8))
}

fn instance() -> refereed::Instance {
    let mut spec = GenSpec::new(Kind::LossGap, 5, 3);
    spec.alpha = Rational::from(3u32);
    spec.eta = Rational::ratio(1, 8);
    generate(&spec).unwrap().0
}

#[test]
fn parallel_matches_sequential() {
    let inst = instance();
    for p in [Protocol::CertSum, Protocol::CertIndex, Protocol::RlpAdditive] {
        let cfg = TrialConfig::new(p, params(), AdversarySpec::QueryLiar { after: 0 });
        let a: Vec<String> = run_trials(&inst, &cfg, 10, 6).iter().map(|r| r.to_json()).collect();
        let b: Vec<String> = run_trials_seq(&inst, &cfg, 10, 6).iter().map(|r| r.to_json()).collect();
        assert_eq!(a, b);
    }
}

#[test]
fn adversary_alternates_position() {
    let inst = instance();
    let cfg = TrialConfig::new(Protocol::CertSum, params(), AdversarySpec::Garbage { seed: 1 });
    let recs = run_trials(&inst, &cfg, 0, 4);
    let pos: Vec<Option<u8>> = recs.iter().map(|r| r.position).collect();
    assert_eq!(pos, [Some(1), Some(0), Some(1), Some(0)]);
    assert!(recs.iter().all(|r| r.correct == Some(true)));
}

#[test]
fn aggregate_counts() {
    let inst = instance();
    let cfg = TrialConfig::new(Protocol::CertSample, params(), AdversarySpec::Honest);
    let recs = run_trials(&inst, &cfg, 0, 5);
    let agg = Aggregate::of(&recs);
    assert_eq!((agg.trials, agg.judged, agg.correct, agg.faults), (5, 5, 5, 0));
    assert_eq!(agg.csv_row().split(',').count(), Aggregate::HEADER.split(',').count());
}

#[test]
fn records_carry_schema_and_stats() {
    let inst = instance();
    let cfg = TrialConfig::new(Protocol::Rlp01, params(), AdversarySpec::Honest);
    let rec = &run_trials(&inst, &cfg, 7, 1)[0];
    let v: serde_json::Value = serde_json::from_str(&rec.to_json()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["protocol"], "rlp01");
    assert_eq!(v["seed"], 7);
    assert!(v["comm_bits"].as_u64().unwrap() > 0);
    assert_eq!(v["verifier_queries"]["f"], rec.m);
}

#[test]
fn generated_instances_survive_the_file_format() {
    for kind in [Kind::LossGap, Kind::Junta] {
        let (inst, side) = generate(&GenSpec::new(kind, 8, 5)).unwrap();
        let back = parse_instance(&write_instance(&inst).unwrap()).unwrap();
        assert_eq!(back.losses().unwrap(), side.losses);
    }
}
