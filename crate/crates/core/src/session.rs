//! One protocol run: the verifier's oracles, both provers, the transcript
//! and the verifier's randomness.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::delegation::Delegation;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::oracle::{CountingOracle, Label, OracleId};
use crate::point::BitPoint;
use crate::prover::{HonestProver, Prover};
use crate::rational::Rational;
use crate::stats::RunStats;
use crate::task::{task_value, CustomFn, CustomSet, OracleAccess, SumTask};
use crate::transcript::{Channel, Party, Transcript};

pub struct Session<'a> {
    inst: &'a Instance,
    provers: [Box<dyn Prover + 'a>; 2],
    transcript: Transcript,
    labels: [CountingOracle<Label>; 3],
    pmf: CountingOracle<Rational>,
    custom: BTreeMap<&'static str, u64>,
    pub(crate) delegation: Delegation,
    rng: ChaCha8Rng,
    t_queries: u64,
    rounds: u64,
}

impl<'a> Session<'a> {
    /// The verifier's randomness is a ChaCha stream seeded with `seed`.
    pub fn new(inst: &'a Instance, p0: Box<dyn Prover + 'a>, p1: Box<dyn Prover + 'a>, seed: u64) -> Session<'a> {
        Session {
            inst,
            provers: [p0, p1],
            transcript: Transcript::new(),
            labels: [
                CountingOracle::function("f", &inst.f),
                CountingOracle::function("h0", &inst.h[0]),
                CountingOracle::function("h1", &inst.h[1]),
            ],
            pmf: CountingOracle::pmf(&inst.pmf),
            custom: BTreeMap::new(),
            delegation: Delegation::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            t_queries: 0,
            rounds: 0,
        }
    }

    /// Two honest provers.
    pub fn honest(inst: &'a Instance, seed: u64) -> Session<'a> {
        Session::new(inst, Box::new(HonestProver::new(inst.world())), Box::new(HonestProver::new(inst.world())), seed)
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn dim(&self) -> u8 {
        self.inst.dim
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn prover_mut(&mut self, b: usize) -> &mut (dyn Prover + 'a) {
        self.provers[b].as_mut()
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    /// Append a message; returns its index in the transcript.
    pub fn record(&mut self, from: Party, to: Party, channel: Channel, payload: Vec<u8>) -> usize {
        self.transcript.push(from, to, channel, payload)
    }

    pub(crate) fn bump_round(&mut self) {
        self.rounds += 1;
    }

    /// Route the verifier's queries to these oracles through the provers.
    pub fn delegate(&mut self, ids: &[OracleId]) {
        for &id in ids {
            self.delegation.enable(id);
        }
    }

    /// Real (undelegated) evaluation by the verifier.
    pub(crate) fn real_label(&mut self, id: OracleId, x: BitPoint) -> Label {
        let k = match id {
            OracleId::F => 0,
            OracleId::H0 => 1,
            OracleId::H1 => 2,
            OracleId::Pmf => unreachable!("pmf is not a labeling oracle"),
        };
        self.labels[k].query(x)
    }

    pub(crate) fn real_mass(&mut self, x: BitPoint) -> Rational {
        self.pmf.query(x)
    }

    /// The verifier's single query to `t` at the end of a certified-sum phase.
    pub fn t_query(&mut self, task: &SumTask, x: BitPoint) -> Result<Rational> {
        self.t_queries += 1;
        task_value(self, task, x)
    }

    /// The first internal failure reported by either prover.
    pub fn prover_fault(&mut self) -> Option<Error> {
        let a = self.provers[0].take_fault();
        let b = self.provers[1].take_fault();
        a.or(b)
    }

    pub fn stats(&self) -> RunStats {
        let mut verifier_queries: BTreeMap<String, u64> =
            self.custom.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for o in &self.labels {
            verifier_queries.insert(o.name().to_string(), o.count());
        }
        verifier_queries.insert("pmf".into(), self.pmf.count());
        let prover_queries = (0..2).map(|b| (format!("P{b}"), self.provers[b].queries())).collect();
        RunStats {
            comm_bits: self.transcript.total_bits(),
            delegation_bits: self.transcript.channel_bits(Channel::Delegation),
            messages: self.transcript.len() as u64,
            rounds: self.rounds,
            t_queries: self.t_queries,
            verifier_queries,
            prover_queries,
            real_delegated: self.delegation.real_queries(),
        }
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }
}

impl OracleAccess for Session<'_> {
    fn dim(&self) -> u8 {
        self.inst.dim
    }

    fn label(&mut self, id: OracleId, x: BitPoint) -> Result<Label> {
        if self.delegation.covers(id) {
            crate::delegation::delegated_label(self, id, x)
        } else {
            Ok(self.real_label(id, x))
        }
    }

    fn mass(&mut self, x: BitPoint) -> Result<Rational> {
        if self.delegation.covers(OracleId::Pmf) {
            crate::delegation::delegated_mass(self, x)
        } else {
            Ok(self.real_mass(x))
        }
    }

    fn custom(&mut self, t: &CustomFn, x: BitPoint) -> Result<Rational> {
        *self.custom.entry(t.name).or_default() += 1;
        Ok(t.eval(x))
    }

    fn member(&mut self, s: &CustomSet, x: BitPoint) -> Result<bool> {
        *self.custom.entry("member").or_default() += 1;
        Ok(s.member(x))
    }

    fn less(&mut self, s: &CustomSet, x: BitPoint, y: BitPoint) -> Result<bool> {
        *self.custom.entry("less").or_default() += 1;
        Ok(s.less(x, y))
    }
}
