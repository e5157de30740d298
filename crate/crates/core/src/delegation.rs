//! Refereed query delegation.
//!
//! A delegated query goes to both provers. While they agree the verifier
//! takes the common answer without touching the oracle. On the first
//! disagreement it spends its single real query, trusts whichever prover
//! answered correctly, and from then on asks only that prover. Trust and the
//! one-query budget are shared by every delegated oracle of the run.

use num_traits::One;

use crate::encoding::{decode_index, decode_rational, encode, Payload};
use crate::error::{Error, Result};
use crate::oracle::{Label, OracleId};
use crate::point::BitPoint;
use crate::prover::Answer;
use crate::rational::Rational;
use crate::session::Session;
use crate::transcript::{Channel, Party};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Trust {
    #[default]
    Consensus,
    Resolved(usize),
}

#[derive(Debug, Clone, Default)]
pub struct Delegation {
    enabled: [bool; 4],
    trust: Trust,
    real: u64,
}

fn slot(id: OracleId) -> usize {
    match id {
        OracleId::F => 0,
        OracleId::H0 => 1,
        OracleId::H1 => 2,
        OracleId::Pmf => 3,
    }
}

impl Delegation {
    pub fn enable(&mut self, id: OracleId) {
        self.enabled[slot(id)] = true;
    }

    pub fn covers(&self, id: OracleId) -> bool {
        self.enabled[slot(id)]
    }

    pub fn trust(&self) -> Trust {
        self.trust
    }

    /// Real queries spent on resolution (0 or 1).
    pub fn real_queries(&self) -> u64 {
        self.real
    }
}

fn parse_answer(s: &Session<'_>, id: OracleId, bytes: &[u8]) -> Option<Answer> {
    match id {
        OracleId::Pmf => decode_rational(bytes)
            .ok()
            .filter(|p| !p.is_negative() && *p <= Rational::one())
            .map(Answer::Mass),
        _ => decode_index(bytes)
            .ok()
            .filter(|&y| y < s.instance().range as u64)
            .map(|y| Answer::Label(y as Label)),
    }
}

fn ask(s: &mut Session<'_>, b: usize, id: OracleId, x: BitPoint) -> Option<Answer> {
    s.record(Party::Verifier, Party::prover(b), Channel::Delegation, encode(&Payload::Point(x)));
    let bytes = s.prover_mut(b).answer_query(id, x);
    let a = parse_answer(s, id, &bytes);
    s.record(Party::prover(b), Party::Verifier, Channel::Delegation, bytes);
    a
}

fn real_answer(s: &mut Session<'_>, id: OracleId, x: BitPoint) -> Answer {
    match id {
        OracleId::Pmf => Answer::Mass(s.real_mass(x)),
        _ => Answer::Label(s.real_label(id, x)),
    }
}

/// Answer one verifier query through the provers.
pub fn delegate(s: &mut Session<'_>, id: OracleId, x: BitPoint) -> Result<Answer> {
    match s.delegation.trust {
        Trust::Resolved(b) => ask(s, b, id, x).ok_or(Error::NoHonestProver("query delegation")),
        Trust::Consensus => {
            let a0 = ask(s, 0, id, x);
            let a1 = ask(s, 1, id, x);
            if let (Some(x), Some(y)) = (&a0, &a1) {
                if x == y {
                    return Ok(x.clone());
                }
            }
            let truth = real_answer(s, id, x);
            s.delegation.real += 1;
            let b = if a0.as_ref() == Some(&truth) {
                0
            } else if a1.as_ref() == Some(&truth) {
                1
            } else {
                return Err(Error::NoHonestProver("query delegation"));
            };
            s.delegation.trust = Trust::Resolved(b);
            Ok(truth)
        }
    }
}

pub(crate) fn delegated_label(s: &mut Session<'_>, id: OracleId, x: BitPoint) -> Result<Label> {
    match delegate(s, id, x)? {
        Answer::Label(y) => Ok(y),
        Answer::Mass(_) => unreachable!("label query answered with a mass"),
    }
}

pub(crate) fn delegated_mass(s: &mut Session<'_>, x: BitPoint) -> Result<Rational> {
    match delegate(s, OracleId::Pmf, x)? {
        Answer::Mass(p) => Ok(p),
        Answer::Label(_) => unreachable!("mass query answered with a label"),
    }
}

/// Run `inner` with the verifier's queries to `ids` delegated.
pub fn wrap_with_delegation<'a, T>(
    s: &mut Session<'a>,
    ids: &[OracleId],
    inner: impl FnOnce(&mut Session<'a>) -> Result<T>,
) -> Result<T> {
    s.delegate(ids);
    inner(s)
}

/// Delegate every instance oracle (`f`, `h0`, `h1`, `Q_D`) under one budget.
pub fn offload_all<'a, T>(s: &mut Session<'a>, inner: impl FnOnce(&mut Session<'a>) -> Result<T>) -> Result<T> {
    wrap_with_delegation(s, &[OracleId::F, OracleId::H0, OracleId::H1, OracleId::Pmf], inner)
}
