//! Seeded trials: one protocol, one instance, one adversary, many seeds.
//!
//! A trial with seed `s` puts the adversary at `P1` when `s` is even and at
//! `P0` when odd; everything else about the run follows from `s`, so a
//! record replays from its own fields.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adversary::{build_prover, AdversarySpec};
use crate::certindex::run_certindex;
use crate::certsample::{build_bucketed_sampler, SamplerRecord};
use crate::certsum::run_certsum;
use crate::delegation::offload_all;
use crate::error::{Error, Result};
use crate::generate::exact_losses;
use crate::instance::Instance;
use crate::juntas::run_rlp_junta;
use crate::loss::{check_rlp_guarantee, tv_distance};
use crate::oracle::check_enumerable;
use crate::point::BitPoint;
use crate::prover::{HonestProver, Prover};
use crate::rational::Rational;
use crate::rlp::{run_rlp_additive, run_rlp_metric, run_rlp_mixed, run_rlp_zeroone, wrap_precision, Params};
use crate::session::Session;
use crate::stats::RunStats;
use crate::task::{support_cmp, Distribution, OrderedSet, SumTask};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    CertSum,
    CertIndex,
    CertSample,
    Rlp01,
    RlpMetric,
    RlpAdditive,
    RlpMixed,
    RlpJunta,
    RlpPrecision,
}

impl Protocol {
    pub const ALL: [Protocol; 9] = [
        Protocol::CertSum,
        Protocol::CertIndex,
        Protocol::CertSample,
        Protocol::Rlp01,
        Protocol::RlpMetric,
        Protocol::RlpAdditive,
        Protocol::RlpMixed,
        Protocol::RlpJunta,
        Protocol::RlpPrecision,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::CertSum => "certsum",
            Protocol::CertIndex => "certindex",
            Protocol::CertSample => "certsample",
            Protocol::Rlp01 => "rlp01",
            Protocol::RlpMetric => "rlpmetric",
            Protocol::RlpAdditive => "rlp-additive",
            Protocol::RlpMixed => "rlp-mixed",
            Protocol::RlpJunta => "rlp-junta",
            Protocol::RlpPrecision => "rlp-precision",
        }
    }

    pub fn is_rlp(self) -> bool {
        !matches!(self, Protocol::CertSum | Protocol::CertIndex | Protocol::CertSample)
    }

    /// The `(α, η)` the protocol promises for `params`.
    pub fn guarantee(self, params: &Params) -> (Rational, Rational) {
        let one = Rational::one();
        let eps = &params.eps;
        match self {
            Protocol::RlpMetric => (Rational::from(3u32) + eps, Rational::zero()),
            Protocol::RlpAdditive => (one, params.eta.clone()),
            Protocol::RlpMixed => (one + eps, params.eta.clone()),
            Protocol::RlpPrecision => (precision_alpha(params), params.eta.clone()),
            _ => (one + eps, Rational::zero()),
        }
    }
}

/// The wrapped metric protocol's `α`, unless the caller set one.
fn precision_alpha(params: &Params) -> Rational {
    if params.alpha.is_one() {
        Rational::from(3u32) + &params.eps
    } else {
        params.alpha.clone()
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Protocol> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param(format!("unknown protocol {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub protocol: Protocol,
    pub params: Params,
    /// Sampling accuracy for `certsample`.
    pub delta: Rational,
    pub adversary: AdversarySpec,
    /// Route every verifier oracle query through the provers.
    pub offload: bool,
    /// Record wall time (breaks byte-identical replays).
    pub timing: bool,
}

impl TrialConfig {
    pub fn new(protocol: Protocol, params: Params, adversary: AdversarySpec) -> TrialConfig {
        TrialConfig { protocol, params, delta: Rational::ratio(1, 4), adversary, offload: false, timing: false }
    }
}

/// Exact facts used to judge outputs, computed once per instance.
#[derive(Debug, Clone, Default)]
pub struct Reference {
    pub losses: Option<[Rational; 2]>,
    /// `D(S)` for `S = {h0 ≠ h1}`.
    pub disagreement_mass: Option<Rational>,
    /// `S` in lexicographic order.
    pub disagreement: Option<Vec<BitPoint>>,
    pub pmf: Option<Vec<Rational>>,
}

impl Reference {
    pub fn compute(inst: &Instance) -> Reference {
        let losses = exact_losses(inst).ok();
        if check_enumerable(inst.dim).is_err() {
            return Reference { losses, ..Reference::default() };
        }
        let pmf = inst.pmf.to_table(inst.dim).ok();
        let (h0, h1) = (&inst.h[0], &inst.h[1]);
        let set: Vec<BitPoint> = BitPoint::all(inst.dim).filter(|&x| h0.eval(x) != h1.eval(x)).collect();
        let mass = pmf.as_ref().map(|t| set.iter().map(|x| &t[x.value() as usize]).sum());
        Reference { losses, disagreement_mass: mass, disagreement: Some(set), pmf }
    }
}

/// One run, schema-versioned.
#[derive(Debug, Clone, Serialize)]
pub struct StatsRecord {
    pub schema: u32,
    pub protocol: String,
    pub adversary: String,
    /// Which prover the adversary played; `None` for honest runs.
    pub position: Option<u8>,
    pub seed: u64,
    pub offload: bool,
    pub params: Params,
    /// Derived `δ` and `m` of the selection protocols.
    pub delta: Rational,
    pub m: u64,
    pub bit: Option<u8>,
    pub coin: Option<bool>,
    /// Non-bit outputs: a sum, a point, or the exact `dtv(D̂, D)`.
    pub value: Option<String>,
    pub sampler: Option<SamplerRecord>,
    /// Whether the output meets the protocol's contract; `None` without a reference.
    pub correct: Option<bool>,
    pub fault: Option<String>,
    #[serde(flatten)]
    pub stats: RunStats,
    pub wall_ms: Option<u64>,
}

impl StatsRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    /// Verifier queries to `f`, `h0`, `h1` and `Q_D` together.
    pub fn instance_queries(&self) -> u64 {
        self.stats.verifier_instance_queries()
    }
}

enum Output {
    Bit { bit: u8, coin: bool },
    Value(Rational),
    Point(BitPoint, u64),
    Sample { tv: Option<Rational>, record: SamplerRecord },
}

fn point_string(x: BitPoint) -> String {
    (0..x.dim()).map(|i| if x.bit(i) { '1' } else { '0' }).collect()
}

/// The instance's support in the sampler's order, for `D_λ`.
fn support_order(pmf: &[Rational], dim: u8, lambda: u32) -> Vec<BitPoint> {
    let mut pts: Vec<(Rational, BitPoint)> = BitPoint::all(dim)
        .map(|x| (pmf[x.value() as usize].floor_lambda(lambda), x))
        .filter(|(m, _)| m.is_positive())
        .collect();
    pts.sort_by(|(mx, x), (my, y)| support_cmp(mx, *x, my, *y));
    pts.into_iter().map(|(_, x)| x).collect()
}

fn run_protocol(s: &mut Session<'_>, cfg: &TrialConfig, r: &Reference, seed: u64) -> Result<Output> {
    let p = &cfg.params;
    let bit = |bit: u8, coin: bool| Output::Bit { bit, coin };
    Ok(match cfg.protocol {
        Protocol::CertSum => {
            let lambda = s.instance().lambda();
            Output::Value(run_certsum(s, &SumTask::DisagreementMass(Distribution::Base), lambda)?)
        }
        Protocol::CertIndex => {
            let n = r.disagreement.as_ref().map(|v| v.len() as u64).unwrap_or(0);
            if n == 0 {
                return Err(Error::param("certindex needs a nonempty, enumerable disagreement set"));
            }
            let i = ChaCha8Rng::seed_from_u64(seed ^ 0x1d_e7).gen_range(1..=n);
            Output::Point(run_certindex(s, &OrderedSet::Disagreement, i)?, i)
        }
        Protocol::CertSample => {
            let sampler = build_bucketed_sampler(s, &Distribution::Base, &cfg.delta)?;
            let tv = match &r.pmf {
                Some(pmf) => {
                    let hat = sampler.hat_distribution(&support_order(pmf, s.dim(), sampler.lambda))?;
                    Some(tv_distance(&hat, pmf)?)
                }
                None => None,
            };
            Output::Sample { tv, record: sampler.record() }
        }
        Protocol::Rlp01 => run_rlp_zeroone(s, p).map(|o| bit(o.bit, o.coin))?,
        Protocol::RlpMetric => run_rlp_metric(s, p).map(|o| bit(o.bit, o.coin))?,
        Protocol::RlpAdditive => {
            let sampler = s.instance().sampler()?;
            run_rlp_additive(s, p, &sampler).map(|o| bit(o.bit, o.coin))?
        }
        Protocol::RlpMixed => {
            let sampler = s.instance().sampler()?;
            run_rlp_mixed(s, p, &sampler).map(|o| bit(o.bit, o.coin))?
        }
        Protocol::RlpJunta => run_rlp_junta(s, &p.eps, &p.beta).map(|o| bit(o.bit, false))?,
        Protocol::RlpPrecision => {
            let p = p.clone().with_alpha(precision_alpha(p));
            wrap_precision(s, &p).map(|o| bit(o.bit, o.coin))?
        }
    })
}

fn judge(cfg: &TrialConfig, r: &Reference, out: &Output) -> Option<bool> {
    match out {
        Output::Bit { bit, .. } => {
            let l = r.losses.as_ref()?;
            let (alpha, eta) = cfg.protocol.guarantee(&cfg.params);
            let b = *bit as usize;
            Some(check_rlp_guarantee(&l[b], &l[1 - b], &alpha, &eta))
        }
        Output::Value(v) => r.disagreement_mass.as_ref().map(|m| m == v),
        Output::Point(x, i) => r.disagreement.as_ref().map(|set| set[*i as usize - 1] == *x),
        Output::Sample { tv, .. } => tv.as_ref().map(|t| *t <= cfg.delta),
    }
}

/// The two provers for `seed`: the adversary takes `P1` on even seeds.
pub fn provers<'a>(inst: &'a Instance, adv: &AdversarySpec, seed: u64) -> ([Box<dyn Prover + 'a>; 2], Option<u8>) {
    let honest = || -> Box<dyn Prover + 'a> { Box::new(HonestProver::new(inst.world())) };
    if *adv == AdversarySpec::Honest {
        return ([honest(), honest()], None);
    }
    let bad = build_prover(&adv.reseed(seed), inst);
    if seed.is_multiple_of(2) {
        ([honest(), bad], Some(1))
    } else {
        ([bad, honest()], Some(0))
    }
}

pub fn run_trial(inst: &Instance, r: &Reference, cfg: &TrialConfig, seed: u64) -> StatsRecord {
    let start = cfg.timing.then(Instant::now);
    let ([p0, p1], position) = provers(inst, &cfg.adversary, seed);
    let mut s = Session::new(inst, p0, p1, seed);
    let res = if cfg.offload {
        offload_all(&mut s, |s| run_protocol(s, cfg, r, seed))
    } else {
        run_protocol(&mut s, cfg, r, seed)
    };
    let stats = s.stats();
    let mut rec = StatsRecord {
        schema: SCHEMA,
        protocol: cfg.protocol.name().into(),
        adversary: cfg.adversary.to_string(),
        position,
        seed,
        offload: cfg.offload,
        params: cfg.params.clone(),
        delta: cfg.params.delta(),
        m: cfg.params.m(),
        bit: None,
        coin: None,
        value: None,
        sampler: None,
        correct: None,
        fault: None,
        stats,
        wall_ms: start.map(|t| t.elapsed().as_millis() as u64),
    };
    if cfg.protocol == Protocol::CertSample {
        rec.delta = cfg.delta.clone();
    }
    match res {
        Ok(out) => {
            rec.correct = judge(cfg, r, &out);
            match out {
                Output::Bit { bit, coin } => {
                    rec.bit = Some(bit);
                    rec.coin = Some(coin);
                }
                Output::Value(v) => rec.value = Some(v.to_string()),
                Output::Point(x, _) => rec.value = Some(point_string(x)),
                Output::Sample { tv, record } => {
                    rec.value = tv.map(|t| t.to_string());
                    rec.sampler = Some(record);
                }
            }
        }
        Err(e) => {
            rec.fault = Some(e.to_string());
            rec.correct = Some(false);
        }
    }
    rec
}

/// Trials with seeds `seed, seed+1, …`, in parallel when the feature is on.
pub fn run_trials(inst: &Instance, cfg: &TrialConfig, seed: u64, trials: u64) -> Vec<StatsRecord> {
    let r = Reference::compute(inst);
    crate::par::map_range(seed..seed + trials, |s| run_trial(inst, &r, cfg, s))
}

/// [`run_trials`] without rayon.
pub fn run_trials_seq(inst: &Instance, cfg: &TrialConfig, seed: u64, trials: u64) -> Vec<StatsRecord> {
    let r = Reference::compute(inst);
    crate::par::map_range_seq(seed..seed + trials, |s| run_trial(inst, &r, cfg, s))
}

/// One CSV row summarizing a batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub protocol: String,
    pub adversary: String,
    pub trials: u64,
    pub correct: u64,
    pub judged: u64,
    pub faults: u64,
    pub success_rate: f64,
    pub mean_comm_bits: f64,
    pub max_comm_bits: u64,
    pub max_instance_queries: u64,
    pub max_t_queries: u64,
    pub max_real_delegated: u64,
}

impl Aggregate {
    pub const HEADER: &'static str = "protocol,adversary,trials,correct,judged,faults,success_rate,mean_comm_bits,max_comm_bits,max_instance_queries,max_t_queries,max_real_delegated";

    pub fn of(records: &[StatsRecord]) -> Aggregate {
        let n = records.len() as u64;
        let first = records.first();
        let judged = records.iter().filter(|r| r.correct.is_some()).count() as u64;
        let correct = records.iter().filter(|r| r.correct == Some(true)).count() as u64;
        let bits: u64 = records.iter().map(|r| r.stats.comm_bits).sum();
        let max = |f: fn(&StatsRecord) -> u64| records.iter().map(f).max().unwrap_or(0);
        Aggregate {
            protocol: first.map(|r| r.protocol.clone()).unwrap_or_default(),
            adversary: first.map(|r| r.adversary.clone()).unwrap_or_default(),
            trials: n,
            correct,
            judged,
            faults: records.iter().filter(|r| r.fault.is_some()).count() as u64,
            success_rate: if judged == 0 { 0.0 } else { correct as f64 / judged as f64 },
            mean_comm_bits: if n == 0 { 0.0 } else { bits as f64 / n as f64 },
            max_comm_bits: max(|r| r.stats.comm_bits),
            max_instance_queries: max(|r| r.instance_queries()),
            max_t_queries: max(|r| r.stats.t_queries),
            max_real_delegated: max(|r| r.stats.real_delegated),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.4},{:.1},{},{},{},{}",
            self.protocol,
            self.adversary,
            self.trials,
            self.correct,
            self.judged,
            self.faults,
            self.success_rate,
            self.mean_comm_bits,
            self.max_comm_bits,
            self.max_instance_queries,
            self.max_t_queries,
            self.max_real_delegated
        )
    }
}

/// `Pr[Bin(n, p) < k]`, exactly.
pub fn binomial_tail_below(n: u64, p: &Rational, k: u64) -> Rational {
    let q = Rational::one() - p;
    let mut total = Rational::zero();
    let mut choose = Rational::one();
    for i in 0..k.min(n + 1) {
        if i > 0 {
            choose = choose * Rational::from(n - i + 1) / Rational::from(i);
        }
        total += &choose * pow(p, i) * pow(&q, n - i);
    }
    total
}

fn pow(x: &Rational, e: u64) -> Rational {
    let mut acc = Rational::one();
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}
