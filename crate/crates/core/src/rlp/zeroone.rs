use num_traits::Zero;

use crate::certsample::{build_bucketed_sampler, draw_samples};
use crate::certsum::run_certsum;
use crate::error::Result;
use crate::rational::Rational;
use crate::session::Session;
use crate::task::{Distribution, SumTask};

use super::{count_errors, Params, RlpOutcome};

/// Zero-one loss, `(1+ε, β)`.
///
/// Certifies `p_S = D(S)` for `S = {h0 ≠ h1}`, draws `m` certified samples
/// from `D|_S` at distance `δ`, and keeps the hypothesis with fewer
/// disagreements with `f`. Exactly `m` queries to `f`.
pub fn run_rlp_zeroone(s: &mut Session<'_>, params: &Params) -> Result<RlpOutcome> {
    params.validate()?;
    let lambda = s.instance().lambda();
    let p_s = run_certsum(s, &SumTask::DisagreementMass(Distribution::Base), lambda)?;
    if p_s.is_zero() {
        return Ok(RlpOutcome::coin(s));
    }
    let sampler = build_bucketed_sampler(s, &Distribution::Base.restricted(p_s), &params.delta())?;
    let m = params.m();
    let samples = draw_samples(s, &sampler, m)?;
    let errors = count_errors(s, &samples)?;
    Ok(RlpOutcome::argmin([Rational::from(errors[0]), Rational::from(errors[1])], m))
}
