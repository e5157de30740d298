use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use refereed::certsample::oblivious_partition;
use refereed::certsum::{run_certsum, ExhaustiveSummer, SubcubeSummer};
use refereed::encoding::{decode_all, encode_all, Payload};
use refereed::loss::tv_distance;
use refereed::task::{CustomFn, SumTask};
use refereed::{BitPoint, CountingOracle, FunctionSpec, Instance, Metric, PmfSpec, Rational, Session};

fn rational() -> impl Strategy<Value = Rational> {
    prop_oneof![
        (any::<i32>(), 1..i32::MAX).prop_map(|(n, d)| Rational::ratio(n as i64, d as i64)),
        (any::<i64>(), any::<u64>(), 1..u64::MAX).prop_map(|(n, hi, d)| {
            Rational::new(BigInt::from(n) * BigInt::from(hi), BigInt::from(d))
        }),
    ]
}

fn big(r: &Rational) -> BigRational {
    BigRational::new(r.numer(), r.denom())
}

fn pmf(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(0..50i64, n).prop_filter_map("all zero", |w| {
        let total: i64 = w.iter().sum();
        (total > 0).then(|| w.iter().map(|&v| Rational::ratio(v, total)).collect())
    })
}

proptest! {
    #[test]
    fn arithmetic_matches_bigrational(a in rational(), b in rational()) {
        prop_assert_eq!(big(&(&a + &b)), big(&a) + big(&b));
        prop_assert_eq!(big(&(&a * &b)), big(&a) * big(&b));
        prop_assert_eq!(big(&(&a - &b)), big(&a) - big(&b));
        prop_assert_eq!(a.cmp(&b), big(&a).cmp(&big(&b)));
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn floor_lambda_is_within_one_step(a in rational(), lambda in 0u32..80) {
        let f = a.floor_lambda(lambda);
        let step = Rational::pow2(-(lambda as i64));
        prop_assert!(f <= a);
        prop_assert!(&a - &f < step);
        prop_assert!((&f / &step).is_integer());
    }

    #[test]
    fn encoding_round_trips(bits in prop::collection::vec(any::<bool>(), 0..4),
                            idx in prop::collection::vec(any::<u64>(), 0..4),
                            rats in prop::collection::vec(rational(), 0..4),
                            dim in 1u8..40, pts in prop::collection::vec(any::<u64>(), 0..4)) {
        let mut ps: Vec<Payload> = bits.into_iter().map(Payload::Bit).collect();
        ps.extend(idx.into_iter().map(Payload::Index));
        ps.extend(rats.into_iter().map(Payload::Rational));
        ps.extend(pts.into_iter().map(|v| Payload::Point(BitPoint::full(dim, v & ((1u64 << dim) - 1)))));
        let bytes = encode_all(&ps);
        prop_assert_eq!(decode_all(&bytes).unwrap(), ps);
    }

    #[test]
    fn decoding_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
        let _ = decode_all(&bytes);
    }

    #[test]
    fn subcube_sums_are_additive(vals in prop::collection::vec(-20i64..20, 64), len in 0u8..6, bits in any::<u64>()) {
        let t = CountingOracle::from_fn("t", move |x| Rational::from(vals[x.value() as usize]));
        let mut s = ExhaustiveSummer::new(&t, 6).unwrap();
        let z = BitPoint::prefix(6, len, bits & ((1u64 << len) - 1));
        let whole = s.subcube_sum(z);
        prop_assert_eq!(whole, s.subcube_sum(z.child(false)) + s.subcube_sum(z.child(true)));
    }

    #[test]
    fn tv_is_a_metric(p in pmf(8), q in pmf(8), w in pmf(8)) {
        let d = |a: &[Rational], b: &[Rational]| tv_distance(a, b).unwrap();
        prop_assert!(d(&p, &p).is_zero());
        prop_assert_eq!(d(&p, &q), d(&q, &p));
        prop_assert!(d(&p, &q) <= Rational::one());
        prop_assert!(d(&p, &w) <= d(&p, &q) + d(&q, &w));
    }

    #[test]
    fn partition_covers_and_respects_caps(n in 1u64..5000, k in 1i64..16) {
        let delta = Rational::ratio(1, k + 1);
        let part = oblivious_partition(n, &delta).unwrap();
        prop_assert_eq!(part.sizes.iter().sum::<u64>(), n);
        let mut cap = Rational::one();
        for (i, &s) in part.sizes.iter().enumerate() {
            cap *= Rational::one() + &delta;
            prop_assert!(Rational::from(s) <= cap);
            prop_assert!(i + 1 == part.len() || Rational::from(s) == Rational::integer(cap.floor()));
        }
    }

    #[test]
    fn honest_certsum_is_exact(vals in prop::collection::vec(-64i64..64, 32), den in 1i64..64, seed in any::<u64>()) {
        let inst = Instance {
            dim: 5,
            range: 2,
            f: FunctionSpec::Const(0),
            h: [FunctionSpec::Const(0), FunctionSpec::Const(1)],
            pmf: PmfSpec::Uniform,
            metric: Metric::ZeroOne,
        };
        let table: Vec<Rational> = vals.iter().map(|&v| Rational::ratio(v, den)).collect();
        let truth: Rational = table.iter().sum();
        let mut s = Session::honest(&inst, seed);
        let got = run_certsum(&mut s, &SumTask::Custom(CustomFn::table("t", table)), 12).unwrap();
        prop_assert_eq!(got, truth);
        prop_assert!(s.stats().t_queries <= 2);
    }
}
