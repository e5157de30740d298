//! Certified index: the `i`-th element (1-based) of an ordered set.
//!
//! The claimant names `x̂`; the verifier checks membership with one query and
//! then certifies `|{x ∈ S : x ≺ x̂}| = i - 1` with a certified sum at `λ = d`.

use crate::certsum::{run_certsum, Phase, Rejection};
use crate::encoding::{decode_point, encode, Payload};
use crate::error::{Error, Result};
use crate::point::BitPoint;
use crate::rational::Rational;
use crate::session::Session;
use crate::task::{set_member, OrderedSet, SumTask};
use crate::transcript::{Channel, Party};

pub fn run_certindex_phase(s: &mut Session<'_>, b: usize, set: &OrderedSet, i: u64) -> Result<Phase<BitPoint>> {
    let d = s.dim();
    s.record(Party::Verifier, Party::prover(b), Channel::Protocol, encode(&Payload::Index(i)));
    let bytes = s.prover_mut(b).claim_index(set, i);
    let parsed = decode_point(&bytes, d);
    let idx = s.record(Party::prover(b), Party::Verifier, Channel::Protocol, bytes.clone());
    let x = match parsed {
        Ok(x) if x.is_full() => x,
        Ok(_) => return reject(idx, "claimed element is not a full point"),
        Err(e) => return reject(idx, format!("malformed element: {e}")),
    };
    if !set_member(s, set, x)? {
        return reject(idx, format!("{x} is not a member"));
    }
    s.record(Party::Verifier, Party::prover(1 - b), Channel::Protocol, bytes);
    let task = SumTask::RankBelow { set: set.clone(), pivot: x };
    let below = run_certsum(s, &task, d as u32)?;
    if below == Rational::from(i - 1) {
        Ok(Phase::Accepted(x))
    } else {
        reject(idx, format!("{x} has rank {}, not {i}", &below + Rational::from(1u32)))
    }
}

fn reject<T>(message: usize, reason: impl Into<String>) -> Result<Phase<T>> {
    Ok(Phase::Rejected(Rejection { message, reason: reason.into() }))
}

/// Both phases, `b = 0` first; the element from the first accepting phase.
pub fn run_certindex(s: &mut Session<'_>, set: &OrderedSet, i: u64) -> Result<BitPoint> {
    if i == 0 {
        return Err(Error::param("indices are 1-based"));
    }
    let first = run_certindex_phase(s, 0, set, i)?;
    if let Phase::Accepted(x) = first {
        // the second phase still runs so communication does not depend on who lied
        run_certindex_phase(s, 1, set, i)?;
        return Ok(x);
    }
    match run_certindex_phase(s, 1, set, i)? {
        Phase::Accepted(x) => Ok(x),
        Phase::Rejected(_) => Err(s.prover_fault().unwrap_or(Error::NoHonestProver("certified index"))),
    }
}
