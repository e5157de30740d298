//! Certified sum: the verifier learns `Σ_x t(x)` exactly with two queries to `t`.
//!
//! In each phase one prover (the claimant) opens with `(T̂_z, T̂_{z0}, T̂_{z1})`
//! for `z = ε`; the other (the challenger) names a half it disputes and the
//! claimant continues on that half. After `d` rounds the verifier checks the
//! surviving claim against a single evaluation of `t`.

use num_traits::Zero;

use crate::encoding::{decode_bit, decode_rationals, encode, Payload};
use crate::error::{Error, Result};
use crate::oracle::{check_enumerable, CountingOracle};
use crate::point::BitPoint;
use crate::rational::Rational;
use crate::session::Session;
use crate::task::SumTask;
use crate::transcript::{Channel, Party};

/// Answers `T_z = Σ_{x ⊒ z} t(x)` for prefixes `z`.
pub trait SubcubeSummer {
    fn subcube_sum(&mut self, z: BitPoint) -> Rational;
}

/// Sums by enumeration. All `2^d` values are read once, on first use.
pub struct ExhaustiveSummer<'a> {
    t: &'a CountingOracle<Rational>,
    dim: u8,
    levels: Vec<Vec<Rational>>,
}

impl<'a> ExhaustiveSummer<'a> {
    pub fn new(t: &'a CountingOracle<Rational>, dim: u8) -> Result<ExhaustiveSummer<'a>> {
        check_enumerable(dim)?;
        Ok(ExhaustiveSummer { t, dim, levels: Vec::new() })
    }
}

impl SubcubeSummer for ExhaustiveSummer<'_> {
    fn subcube_sum(&mut self, z: BitPoint) -> Rational {
        if self.levels.is_empty() {
            let mut levels = vec![BitPoint::all(self.dim).map(|x| self.t.query(x)).collect::<Vec<_>>()];
            while levels[0].len() > 1 {
                let up = levels[0].chunks(2).map(|c| &c[0] + &c[1]).collect();
                levels.insert(0, up);
            }
            self.levels = levels;
        }
        self.levels[z.len() as usize][z.value() as usize].clone()
    }
}

/// Why a phase rejected, naming the transcript message at fault.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub message: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Phase<T> {
    Accepted(T),
    Rejected(Rejection),
}

impl<T> Phase<T> {
    pub fn accepted(self) -> Option<T> {
        match self {
            Phase::Accepted(v) => Some(v),
            Phase::Rejected(_) => None,
        }
    }
}

fn reject<T>(message: usize, reason: impl Into<String>) -> Result<Phase<T>> {
    Ok(Phase::Rejected(Rejection { message, reason: reason.into() }))
}

/// One phase with `P_b` as claimant and `P_{1-b}` as challenger.
///
/// `lambda` is the precision of `t` and only informs accounting; claims are
/// checked for exact consistency regardless of size. A claimant message that
/// does not parse, does not repeat the previously chosen half, or whose halves
/// do not add up rejects the phase. A challenger message that does not parse
/// counts as `j = 0`.
pub fn run_certsum_phase(s: &mut Session<'_>, b: usize, task: &SumTask, _lambda: u32) -> Result<Phase<Rational>> {
    let d = s.dim();
    if d == 0 {
        return Err(Error::param("certified sum needs d >= 1"));
    }
    let (claimant, challenger) = (b, 1 - b);
    let mut z = BitPoint::empty(d);
    let mut carried: Option<Rational> = None;
    let mut opening = Rational::zero();
    for round in 0..d {
        s.bump_round();
        let bytes = s.prover_mut(claimant).claim_sum(task, z);
        let parsed = decode_rationals(&bytes, 3);
        let idx = s.record(Party::prover(claimant), Party::Verifier, Channel::Protocol, bytes.clone());
        let claim = match parsed {
            Ok(c) => c,
            Err(e) => return reject(idx, format!("malformed claim: {e}")),
        };
        if let Some(prev) = &carried {
            if claim[0] != *prev {
                return reject(idx, "claim does not match the chosen half");
            }
        }
        if claim[0] != &claim[1] + &claim[2] {
            return reject(idx, "halves do not add up");
        }
        if round == 0 {
            opening = claim[0].clone();
        }
        s.record(Party::Verifier, Party::prover(challenger), Channel::Protocol, bytes);
        let reply = s.prover_mut(challenger).challenge_sum(task, z, &claim);
        let j = decode_bit(&reply).unwrap_or(false);
        s.record(Party::prover(challenger), Party::Verifier, Channel::Protocol, reply);
        z = z.child(j);
        carried = Some(claim[1 + j as usize].clone());
        if round + 1 < d {
            s.record(Party::Verifier, Party::prover(claimant), Channel::Protocol, encode(&Payload::Bit(j)));
        }
    }
    let value = s.t_query(task, z)?;
    if Some(&value) == carried.as_ref() {
        Ok(Phase::Accepted(opening))
    } else {
        reject(s.transcript().len().saturating_sub(1), format!("t({z}) does not match the final claim"))
    }
}

/// Both phases, `b = 0` first; the value of the first accepting phase.
pub fn run_certsum(s: &mut Session<'_>, task: &SumTask, lambda: u32) -> Result<Rational> {
    let first = run_certsum_phase(s, 0, task, lambda)?;
    let second = run_certsum_phase(s, 1, task, lambda)?;
    match first.accepted().or(second.accepted()) {
        Some(v) => Ok(v),
        None => Err(s.prover_fault().unwrap_or(Error::NoHonestProver("certified sum"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_summer_examples() {
        let vals = [Rational::ratio(1, 2), Rational::ratio(1, 4), Rational::ratio(1, 8), Rational::ratio(1, 8)];
        let t = CountingOracle::from_fn("t", move |x: BitPoint| vals[x.value() as usize].clone());
        let mut s = ExhaustiveSummer::new(&t, 2).unwrap();
        let root = BitPoint::empty(2);
        assert_eq!(s.subcube_sum(root.child(false)), Rational::ratio(3, 4));
        assert_eq!(s.subcube_sum(root), Rational::from(1u32));
        assert_eq!(s.subcube_sum(root.child(true).child(false)), Rational::ratio(1, 8));
        assert_eq!(t.count(), 4);
    }
}
