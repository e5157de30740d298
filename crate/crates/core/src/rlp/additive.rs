use crate::encoding::{encode_all, Payload};
use crate::error::Result;
use crate::instance::ExactSampler;
use crate::oracle::OracleId;
use crate::point::BitPoint;
use crate::rational::Rational;
use crate::session::Session;
use crate::task::OracleAccess;
use crate::transcript::{Channel, Party};

use super::{count_errors, Params, RlpOutcome};

fn announce(s: &mut Session<'_>, samples: &[BitPoint]) {
    let msg = encode_all(&samples.iter().map(|&x| Payload::Point(x)).collect::<Vec<_>>());
    for b in 0..2 {
        s.record(Party::Verifier, Party::prover(b), Channel::Protocol, msg.clone());
    }
}

fn label_and_pick(s: &mut Session<'_>, samples: &[BitPoint]) -> Result<RlpOutcome> {
    announce(s, samples);
    s.delegate(&[OracleId::F]);
    let errors = count_errors(s, samples)?;
    Ok(RlpOutcome::argmin([Rational::from(errors[0]), Rational::from(errors[1])], samples.len() as u64))
}

/// Additive error, `(1, η, β)`, from sample access to `D`.
///
/// `m = ⌈c·log(1/β)/η²⌉` samples are labelled through refereed delegation of
/// `f` (at most one real `f` query); `h0`, `h1` are queried directly.
pub fn run_rlp_additive(s: &mut Session<'_>, params: &Params, sampler: &ExactSampler) -> Result<RlpOutcome> {
    params.validate()?;
    let m = params.m_additive()?;
    let samples: Vec<BitPoint> = (0..m).map(|_| sampler.sample(s.rng())).collect();
    label_and_pick(s, &samples)
}

/// Mixed error, `(1+ε, η, β)`.
///
/// Draws up to `t = ⌈2m/η²⌉` samples, keeping the first `m` on which `h0`
/// and `h1` disagree; too few and the output is a coin. Only kept samples
/// are labelled, so provers make at most `m` queries to `f`.
pub fn run_rlp_mixed(s: &mut Session<'_>, params: &Params, sampler: &ExactSampler) -> Result<RlpOutcome> {
    params.validate()?;
    let m = params.m_mixed();
    let t = params.t_mixed()?;
    let mut kept = Vec::with_capacity(m as usize);
    for _ in 0..t {
        let x = sampler.sample(s.rng());
        if s.label(OracleId::H0, x)? != s.label(OracleId::H1, x)? {
            kept.push(x);
            if kept.len() as u64 == m {
                break;
            }
        }
    }
    if (kept.len() as u64) < m {
        return Ok(RlpOutcome::coin(s));
    }
    label_and_pick(s, &kept)
}
