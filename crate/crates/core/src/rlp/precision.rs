use crate::certsample::round_pmf;
use crate::error::{Error, Result};
use crate::rational::{ceil_log2, Rational};
use crate::session::Session;
use crate::task::Distribution;

use super::{run_rlp_metric_with, Params, RlpOutcome};

/// `λ = 6d + ⌈log2(αM/η)⌉`.
pub fn precision_lambda(dim: u8, alpha: &Rational, bound: &Rational, eta: &Rational) -> Result<u32> {
    if !eta.is_positive() || *eta >= Rational::from(1u32) {
        return Err(Error::param("the precision wrapper needs eta in (0, 1)"));
    }
    let r = alpha * bound / eta;
    Ok(6 * dim as u32 + ceil_log2(&r).max(0) as u32)
}

/// Run the metric protocol on `D_λ` and `ℓ_λ = ⌊ℓ⌋_λ`, turning its
/// `(α, 0, β)` guarantee on precise inputs into `(α, η, β)` on arbitrary
/// rational `D` and `M`-bounded `ℓ`.
pub fn wrap_precision(s: &mut Session<'_>, params: &Params) -> Result<RlpOutcome> {
    params.validate()?;
    let inst = s.instance();
    let lambda = precision_lambda(inst.dim, &params.alpha, &inst.metric.bound(inst.range), &params.eta)?;
    let metric = inst.metric.floored(lambda);
    let base = round_pmf(s, &Distribution::Base, lambda)?;
    run_rlp_metric_with(s, params, &base, &metric, lambda)
}
