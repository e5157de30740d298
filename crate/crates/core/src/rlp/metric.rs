use num_traits::Zero;

use crate::certsample::{build_bucketed_sampler, draw_samples};
use crate::certsum::run_certsum;
use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::oracle::OracleId;
use crate::rational::Rational;
use crate::session::Session;
use crate::task::{Distribution, OracleAccess, SumTask};

use super::{Params, RlpOutcome};

/// Metric loss, `(3+ε, β)`, against the instance's `D` and `ℓ`.
pub fn run_rlp_metric(s: &mut Session<'_>, params: &Params) -> Result<RlpOutcome> {
    let metric = s.instance().metric.clone();
    let lambda = s.instance().lambda().max(metric.precision(s.instance().range));
    run_rlp_metric_with(s, params, &Distribution::Base, &metric, lambda)
}

/// Metric loss against an arbitrary base distribution and metric of
/// precision `lambda`.
///
/// Certifies `μ = E_D[ℓ(h0, h1)]`, samples the loss-rescaled distribution
/// and scores `R̂_b = Σ ℓ(h_b(x), f(x)) / (ℓ(h0(x), f(x)) + ℓ(h1(x), f(x)))`.
pub fn run_rlp_metric_with(
    s: &mut Session<'_>,
    params: &Params,
    base: &Distribution,
    metric: &Metric,
    lambda: u32,
) -> Result<RlpOutcome> {
    params.validate()?;
    let task = SumTask::LossMass { dist: base.clone(), metric: metric.clone() };
    let mu = run_certsum(s, &task, 2 * lambda)?;
    if mu.is_zero() {
        return Ok(RlpOutcome::coin(s));
    }
    let dist = base.clone().loss_rescaled(metric.clone(), mu);
    let sampler = build_bucketed_sampler(s, &dist, &params.delta())?;
    let m = params.m();
    let samples = draw_samples(s, &sampler, m)?;
    let mut scores = [Rational::zero(), Rational::zero()];
    for &x in &samples {
        let y = s.label(OracleId::F, x)?;
        let l0 = metric.eval(s.label(OracleId::H0, x)?, y);
        let l1 = metric.eval(s.label(OracleId::H1, x)?, y);
        let sum = &l0 + &l1;
        if sum.is_zero() {
            return Err(Error::construction(format!("sample {x} has zero loss for both hypotheses")));
        }
        scores[0] += &l0 / &sum;
        scores[1] += l1 / sum;
    }
    // comparing sums is comparing the 1/m-scaled means
    Ok(RlpOutcome::argmin(scores, m))
}
