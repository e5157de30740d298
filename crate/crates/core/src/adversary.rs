//! Malicious provers. Each is deterministic given its configuration, so a
//! failing run replays exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoding::{encode, Payload};
use crate::error::{Error, Result};
use crate::instance::{Instance, World};
use crate::oracle::{check_enumerable, OracleId, PmfSpec};
use crate::point::BitPoint;
use crate::prover::{encode_claim, encode_witness, Answer, HonestProver, Prover};
use crate::rational::Rational;
use crate::task::{OrderedSet, SumTask};

/// Where a sum liar steers its lie.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiePath {
    Left,
    Right,
    /// A pseudo-random full point from this seed.
    Seeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexLie {
    /// Claims `S_{i+1}`.
    Next,
    /// Claims `S_{i-1}`.
    Prev,
    /// Claims some point outside `S`.
    NonMember,
}

/// A prover strategy, selectable by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdversarySpec {
    Honest,
    /// Opens every sum `offset` too high; `consistent` keeps the halves adding up.
    SumLiar { offset: Rational, consistent: bool, path: LiePath },
    IndexLiar(IndexLie),
    /// Honest, except it believes `f = h_target`.
    PretendF { target: usize },
    /// Honest, except for a random fake `D`.
    PretendDistribution { seed: u64 },
    /// Answers delegated queries honestly `after` times, then wrongly.
    QueryLiar { after: u64 },
    /// Random bytes for every message.
    Garbage { seed: u64 },
    /// Floods junta discovery with bogus witnesses.
    WitnessFlood,
}

impl AdversarySpec {
    /// The registered suite used by the test matrix.
    pub fn suite() -> Vec<AdversarySpec> {
        vec![
            AdversarySpec::SumLiar { offset: Rational::from(1u32), consistent: true, path: LiePath::Left },
            AdversarySpec::SumLiar { offset: Rational::ratio(-1, 4), consistent: true, path: LiePath::Right },
            AdversarySpec::SumLiar { offset: Rational::ratio(1, 2), consistent: true, path: LiePath::Seeded(7) },
            AdversarySpec::SumLiar { offset: Rational::from(1u32), consistent: false, path: LiePath::Left },
            AdversarySpec::IndexLiar(IndexLie::Next),
            AdversarySpec::IndexLiar(IndexLie::Prev),
            AdversarySpec::IndexLiar(IndexLie::NonMember),
            AdversarySpec::PretendF { target: 0 },
            AdversarySpec::PretendF { target: 1 },
            AdversarySpec::PretendDistribution { seed: 11 },
            AdversarySpec::QueryLiar { after: 0 },
            AdversarySpec::QueryLiar { after: 2 },
            AdversarySpec::Garbage { seed: 5 },
            AdversarySpec::WitnessFlood,
        ]
    }

    /// A copy with the seed (if any) replaced, for per-trial variation.
    pub fn reseed(&self, seed: u64) -> AdversarySpec {
        match self {
            AdversarySpec::Garbage { .. } => AdversarySpec::Garbage { seed },
            AdversarySpec::PretendDistribution { .. } => AdversarySpec::PretendDistribution { seed },
            other => other.clone(),
        }
    }
}

impl fmt::Display for AdversarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversarySpec::Honest => write!(f, "honest"),
            AdversarySpec::SumLiar { offset, consistent, path } => {
                write!(f, "sum-liar:{offset}")?;
                if !consistent {
                    write!(f, ":inconsistent")?;
                }
                match path {
                    LiePath::Left => Ok(()),
                    LiePath::Right => write!(f, ":right"),
                    LiePath::Seeded(s) => write!(f, ":seed={s}"),
                }
            }
            AdversarySpec::IndexLiar(IndexLie::Next) => write!(f, "index-liar:next"),
            AdversarySpec::IndexLiar(IndexLie::Prev) => write!(f, "index-liar:prev"),
            AdversarySpec::IndexLiar(IndexLie::NonMember) => write!(f, "index-liar:non-member"),
            AdversarySpec::PretendF { target } => write!(f, "pretend-f:{target}"),
            AdversarySpec::PretendDistribution { seed } => write!(f, "pretend-dist:{seed}"),
            AdversarySpec::QueryLiar { after } => write!(f, "query-liar:{after}"),
            AdversarySpec::Garbage { seed } => write!(f, "garbage:{seed}"),
            AdversarySpec::WitnessFlood => write!(f, "witness-flood"),
        }
    }
}

impl FromStr for AdversarySpec {
    type Err = Error;

    /// `name[:arg[:arg…]]`, the inverse of `Display`.
    fn from_str(s: &str) -> Result<AdversarySpec> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let bad = || Error::param(format!("bad adversary {s:?}"));
        let num = |i: usize, default: u64| -> Result<u64> {
            args.get(i).map_or(Ok(default), |a| a.parse().map_err(|_| bad()))
        };
        Ok(match name {
            "honest" => AdversarySpec::Honest,
            "sum-liar" => {
                let offset = match args.first() {
                    Some(a) => a.parse().map_err(|_| bad())?,
                    None => Rational::from(1u32),
                };
                let mut consistent = true;
                let mut path = LiePath::Left;
                for a in args.iter().skip(1) {
                    match *a {
                        "inconsistent" => consistent = false,
                        "left" => path = LiePath::Left,
                        "right" => path = LiePath::Right,
                        a if a.starts_with("seed=") => path = LiePath::Seeded(a[5..].parse().map_err(|_| bad())?),
                        _ => return Err(bad()),
                    }
                }
                if offset == Rational::from(0u32) {
                    return Err(Error::param("sum-liar offset must be nonzero"));
                }
                AdversarySpec::SumLiar { offset, consistent, path }
            }
            "index-liar" => AdversarySpec::IndexLiar(match args.first().copied().unwrap_or("next") {
                "next" => IndexLie::Next,
                "prev" => IndexLie::Prev,
                "non-member" => IndexLie::NonMember,
                _ => return Err(bad()),
            }),
            "pretend-f" => {
                let target = num(0, 1)? as usize;
                if target > 1 {
                    return Err(bad());
                }
                AdversarySpec::PretendF { target }
            }
            "pretend-dist" => AdversarySpec::PretendDistribution { seed: num(0, 0)? },
            "query-liar" => AdversarySpec::QueryLiar { after: num(0, 0)? },
            "garbage" => AdversarySpec::Garbage { seed: num(0, 0)? },
            "witness-flood" => AdversarySpec::WitnessFlood,
            _ => return Err(Error::param(format!("unknown adversary {name:?}"))),
        })
    }
}

/// Build a prover for `inst` following `spec`.
pub fn build_prover<'a>(spec: &AdversarySpec, inst: &'a Instance) -> Box<dyn Prover + 'a> {
    let honest = || HonestProver::new(inst.world());
    match spec {
        AdversarySpec::Honest => Box::new(honest()),
        AdversarySpec::SumLiar { offset, consistent, path } => Box::new(SumLiar {
            inner: honest(),
            offset: offset.clone(),
            consistent: *consistent,
            target: lie_target(*path, inst.dim),
        }),
        AdversarySpec::IndexLiar(mode) => Box::new(IndexLiar { inner: honest(), mode: *mode }),
        AdversarySpec::PretendF { target } => {
            Box::new(HonestProver::new(World::new(inst.dim, &inst.h[*target], &inst.h, &inst.pmf)))
        }
        AdversarySpec::PretendDistribution { seed } => {
            let fake = fake_pmf(inst, *seed);
            Box::new(HonestProver::new(World::new(inst.dim, &inst.f, &inst.h, &fake)))
        }
        AdversarySpec::QueryLiar { after } => {
            Box::new(QueryLiar { inner: honest(), after: *after, seen: 0, range: inst.range })
        }
        AdversarySpec::Garbage { seed } => Box::new(Garbage { rng: ChaCha8Rng::seed_from_u64(*seed) }),
        AdversarySpec::WitnessFlood => Box::new(WitnessFlood { inner: honest(), dim: inst.dim }),
    }
}

fn lie_target(path: LiePath, dim: u8) -> BitPoint {
    match path {
        LiePath::Left => BitPoint::full(dim, 0),
        LiePath::Right => BitPoint::full(dim, if dim == 64 { u64::MAX } else { (1u64 << dim) - 1 }),
        LiePath::Seeded(s) => {
            let v: u64 = ChaCha8Rng::seed_from_u64(s).gen();
            BitPoint::full(dim, if dim == 64 { v } else { v & ((1u64 << dim) - 1) })
        }
    }
}

/// A random dyadic PMF: `2^{d+2}` units dropped on uniform points.
/// Falls back to uniform when `{0,1}^d` is too large to tabulate.
fn fake_pmf(inst: &Instance, seed: u64) -> PmfSpec {
    if check_enumerable(inst.dim).is_err() {
        return PmfSpec::Uniform;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 1usize << inst.dim;
    let units = 4 * n;
    let mut counts = vec![0i64; n];
    for _ in 0..units {
        counts[rng.gen_range(0..n)] += 1;
    }
    PmfSpec::table(counts.into_iter().map(|c| Rational::ratio(c, units as i64)).collect())
}

/// Lies about every sum by `offset`, along the path to `target`.
struct SumLiar {
    inner: HonestProver,
    offset: Rational,
    consistent: bool,
    target: BitPoint,
}

impl Prover for SumLiar {
    fn claim_sum(&mut self, task: &SumTask, z: BitPoint) -> Vec<u8> {
        let r = self.inner.claim(task, z);
        let Ok(mut c) = r else { return Vec::new() };
        if z.is_prefix_of(&self.target) {
            c[0] += &self.offset;
            if self.consistent {
                let j = self.target.bit(z.len()) as usize;
                c[1 + j] += &self.offset;
            }
        }
        encode_claim(&c)
    }

    /// Always points toward its own lie path, regardless of the claim.
    fn challenge_sum(&mut self, _task: &SumTask, z: BitPoint, _claim: &[Rational]) -> Vec<u8> {
        encode(&Payload::Bit(self.target.bit(z.len())))
    }

    fn claim_index(&mut self, set: &OrderedSet, i: u64) -> Vec<u8> {
        self.inner.claim_index(set, i)
    }

    fn answer_query(&mut self, id: OracleId, x: BitPoint) -> Vec<u8> {
        self.inner.answer_query(id, x)
    }

    fn junta_witnesses(&mut self, b: usize) -> Vec<Vec<u8>> {
        self.inner.junta_witnesses(b)
    }

    fn queries(&self) -> BTreeMap<String, u64> {
        self.inner.queries()
    }

    fn take_fault(&mut self) -> Option<Error> {
        self.inner.take_fault();
        None
    }
}

/// Claims a wrong element; honest in every other role.
struct IndexLiar {
    inner: HonestProver,
    mode: IndexLie,
}

impl Prover for IndexLiar {
    fn claim_sum(&mut self, task: &SumTask, z: BitPoint) -> Vec<u8> {
        self.inner.claim_sum(task, z)
    }

    fn challenge_sum(&mut self, task: &SumTask, z: BitPoint, claim: &[Rational]) -> Vec<u8> {
        self.inner.challenge_sum(task, z, claim)
    }

    fn claim_index(&mut self, set: &OrderedSet, i: u64) -> Vec<u8> {
        let d = crate::task::OracleAccess::dim(self.inner.world());
        let x = match self.mode {
            IndexLie::Next => self.inner.element(set, i + 1).ok().flatten(),
            IndexLie::Prev => i.checked_sub(1).and_then(|k| self.inner.element(set, k).ok().flatten()),
            IndexLie::NonMember => {
                let n = self.inner.set_size(set).unwrap_or(0);
                // any point is outside S unless S is everything
                if n < 1u64 << d.min(63) {
                    let world = self.inner.world_mut();
                    BitPoint::all(d).find(|&x| !crate::task::set_member(world, set, x).unwrap_or(true))
                } else {
                    None
                }
            }
        };
        // fall back to a wrong-length point when no lie of this kind exists
        let x = x.unwrap_or_else(|| BitPoint::prefix(d, d.saturating_sub(1), 0));
        encode(&Payload::Point(x))
    }

    fn answer_query(&mut self, id: OracleId, x: BitPoint) -> Vec<u8> {
        self.inner.answer_query(id, x)
    }

    fn junta_witnesses(&mut self, b: usize) -> Vec<Vec<u8>> {
        self.inner.junta_witnesses(b)
    }

    fn queries(&self) -> BTreeMap<String, u64> {
        self.inner.queries()
    }

    fn take_fault(&mut self) -> Option<Error> {
        self.inner.take_fault();
        None
    }
}

/// Correct for the first `after` delegated answers, wrong afterwards.
struct QueryLiar {
    inner: HonestProver,
    after: u64,
    seen: u64,
    range: u32,
}

impl Prover for QueryLiar {
    fn claim_sum(&mut self, task: &SumTask, z: BitPoint) -> Vec<u8> {
        self.inner.claim_sum(task, z)
    }

    fn challenge_sum(&mut self, task: &SumTask, z: BitPoint, claim: &[Rational]) -> Vec<u8> {
        self.inner.challenge_sum(task, z, claim)
    }

    fn claim_index(&mut self, set: &OrderedSet, i: u64) -> Vec<u8> {
        self.inner.claim_index(set, i)
    }

    fn answer_query(&mut self, id: OracleId, x: BitPoint) -> Vec<u8> {
        let a = self.inner.answer(id, x);
        self.seen += 1;
        if self.seen <= self.after {
            return a.encode();
        }
        let lie = match a {
            // with a single label the only lie is out of range
            Answer::Label(y) => Answer::Label(if self.range == 1 { 1 } else { (y + 1) % self.range }),
            Answer::Mass(p) if p == Rational::from(0u32) => Answer::Mass(Rational::ratio(1, 2)),
            Answer::Mass(p) => Answer::Mass(p / Rational::from(2u32)),
        };
        lie.encode()
    }

    fn junta_witnesses(&mut self, b: usize) -> Vec<Vec<u8>> {
        self.inner.junta_witnesses(b)
    }

    fn queries(&self) -> BTreeMap<String, u64> {
        self.inner.queries()
    }

    fn take_fault(&mut self) -> Option<Error> {
        self.inner.take_fault();
        None
    }
}

/// Uniformly random bytes of length 0 to 24 for every message.
struct Garbage {
    rng: ChaCha8Rng,
}

impl Garbage {
    fn noise(&mut self) -> Vec<u8> {
        let n = self.rng.gen_range(0..=24);
        (0..n).map(|_| self.rng.gen()).collect()
    }
}

impl Prover for Garbage {
    fn claim_sum(&mut self, _: &SumTask, _: BitPoint) -> Vec<u8> {
        self.noise()
    }

    fn challenge_sum(&mut self, _: &SumTask, _: BitPoint, _: &[Rational]) -> Vec<u8> {
        self.noise()
    }

    fn claim_index(&mut self, _: &OrderedSet, _: u64) -> Vec<u8> {
        self.noise()
    }

    fn answer_query(&mut self, _: OracleId, _: BitPoint) -> Vec<u8> {
        self.noise()
    }

    fn junta_witnesses(&mut self, _: usize) -> Vec<Vec<u8>> {
        let n = self.rng.gen_range(0..8);
        (0..n).map(|_| self.noise()).collect()
    }

    fn queries(&self) -> BTreeMap<String, u64> {
        BTreeMap::new()
    }

    fn take_fault(&mut self) -> Option<Error> {
        None
    }
}

/// Sends every `(i, x, x^{⊕i})` it can think of, and mismatched pairs too,
/// before the true witnesses.
struct WitnessFlood {
    inner: HonestProver,
    dim: u8,
}

impl Prover for WitnessFlood {
    fn claim_sum(&mut self, task: &SumTask, z: BitPoint) -> Vec<u8> {
        self.inner.claim_sum(task, z)
    }

    fn challenge_sum(&mut self, task: &SumTask, z: BitPoint, claim: &[Rational]) -> Vec<u8> {
        self.inner.challenge_sum(task, z, claim)
    }

    fn claim_index(&mut self, set: &OrderedSet, i: u64) -> Vec<u8> {
        self.inner.claim_index(set, i)
    }

    fn answer_query(&mut self, id: OracleId, x: BitPoint) -> Vec<u8> {
        self.inner.answer_query(id, x)
    }

    fn junta_witnesses(&mut self, b: usize) -> Vec<Vec<u8>> {
        let d = self.dim;
        let zero = BitPoint::full(d, 0);
        let mut out = Vec::new();
        for i in 0..d {
            out.push(encode_witness(i, zero));
            // x' is not x with bit i flipped
            out.push(crate::encoding::encode_all(&[Payload::Index(i as u64), Payload::Point(zero), Payload::Point(zero)]));
        }
        for _ in 0..4 {
            out.extend(self.inner.junta_witnesses(1 - b));
        }
        out.extend(self.inner.junta_witnesses(b));
        out
    }

    fn queries(&self) -> BTreeMap<String, u64> {
        self.inner.queries()
    }

    fn take_fault(&mut self) -> Option<Error> {
        self.inner.take_fault();
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for a in AdversarySpec::suite().into_iter().chain([AdversarySpec::Honest]) {
            assert_eq!(a.to_string().parse::<AdversarySpec>().unwrap(), a, "{a}");
        }
        assert!("sum-liar:0".parse::<AdversarySpec>().is_err());
        assert!("nobody".parse::<AdversarySpec>().is_err());
    }
}
