//! Refereed learning protocols: pick the better of `h0`, `h1` against `f`.

mod additive;
mod margins;
mod metric;
mod precision;
mod zeroone;

use num_traits::{One, ToPrimitive};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::OracleId;
use crate::point::BitPoint;
use crate::rational::{ceil_log2, Rational};
use crate::session::Session;
use crate::task::OracleAccess;

pub use additive::{run_rlp_additive, run_rlp_mixed};
pub use margins::{disagreement_margin, rescaled_score, margin_bound, loss_gap};
pub use metric::{run_rlp_metric, run_rlp_metric_with};
pub use precision::{precision_lambda, wrap_precision};
pub use zeroone::run_rlp_zeroone;

/// Hoeffding constant for the sample-access protocols.
pub const HOEFFDING_C: u64 = 8;

/// Accuracy `ε`, failure probability `β`, additive slack `η`, factor `α`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Params {
    pub eps: Rational,
    pub beta: Rational,
    pub eta: Rational,
    pub alpha: Rational,
}

fn ceil_u64(r: &Rational) -> u64 {
    r.ceil().to_u64().expect("sample count fits u64")
}

impl Params {
    pub fn new(eps: Rational, beta: Rational) -> Params {
        Params { eps, beta, eta: Rational::from(0u32), alpha: Rational::one() }
    }

    pub fn with_eta(mut self, eta: Rational) -> Params {
        self.eta = eta;
        self
    }

    pub fn with_alpha(mut self, alpha: Rational) -> Params {
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.eps.is_positive() {
            return Err(Error::param("eps must be positive"));
        }
        if !self.beta.is_positive() || self.beta >= Rational::one() {
            return Err(Error::param("beta must lie in (0, 1)"));
        }
        if self.eta.is_negative() || self.eta >= Rational::one() {
            return Err(Error::param("eta must lie in [0, 1)"));
        }
        if self.alpha < Rational::one() {
            return Err(Error::param("alpha must be at least 1"));
        }
        Ok(())
    }

    /// `δ = ε / (4(2+ε))`.
    pub fn delta(&self) -> Rational {
        &self.eps / (Rational::from(4u32) * (Rational::from(2u32) + &self.eps))
    }

    /// `⌈log2(1/β)⌉`.
    pub fn log_inv_beta(&self) -> u64 {
        ceil_log2(&self.beta.recip()).max(1) as u64
    }

    /// Samples for the zero-one and metric protocols: `⌈log(1/β) / δ²⌉`.
    pub fn m(&self) -> u64 {
        let d = self.delta();
        ceil_u64(&(Rational::from(self.log_inv_beta()) / (&d * &d)))
    }

    /// Additive protocol: `⌈c·log(1/β) / η²⌉`.
    pub fn m_additive(&self) -> Result<u64> {
        if !self.eta.is_positive() {
            return Err(Error::param("the additive protocol needs eta > 0"));
        }
        Ok(ceil_u64(&(Rational::from(HOEFFDING_C * self.log_inv_beta()) / (&self.eta * &self.eta))))
    }

    /// Mixed protocol: `⌈c·(2(2+ε)/ε)²·log(1/β)⌉`.
    pub fn m_mixed(&self) -> u64 {
        let r = Rational::from(2u32) * (Rational::from(2u32) + &self.eps) / &self.eps;
        ceil_u64(&(Rational::from(HOEFFDING_C * self.log_inv_beta()) * &r * &r))
    }

    /// Mixed protocol draw budget `⌈2m / η²⌉`.
    pub fn t_mixed(&self) -> Result<u64> {
        if !self.eta.is_positive() {
            return Err(Error::param("the mixed protocol needs eta > 0"));
        }
        Ok(ceil_u64(&(Rational::from(2 * self.m_mixed()) / (&self.eta * &self.eta))))
    }

    /// Junta protocol: `⌈c·(1 + 1/ε²)·log(1/β)⌉`.
    pub fn junta_samples(eps: &Rational, beta: &Rational) -> u64 {
        let p = Params::new(eps.clone(), beta.clone());
        let f = Rational::one() + (eps * eps).recip();
        ceil_u64(&(Rational::from(HOEFFDING_C * p.log_inv_beta()) * f))
    }
}

/// What a selection protocol returns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RlpOutcome {
    pub bit: u8,
    /// True when the protocol fell back to a uniform bit (nothing to compare).
    pub coin: bool,
    /// Samples on which the hypotheses were compared.
    pub samples: u64,
    /// Empirical scores; lower wins, ties go to 0.
    pub scores: [Rational; 2],
}

impl RlpOutcome {
    pub(crate) fn coin(s: &mut Session<'_>) -> RlpOutcome {
        let bit = s.rng().gen_range(0..2u8);
        RlpOutcome { bit, coin: true, samples: 0, scores: [Rational::from(0u32), Rational::from(0u32)] }
    }

    pub(crate) fn argmin(scores: [Rational; 2], samples: u64) -> RlpOutcome {
        RlpOutcome { bit: (scores[1] < scores[0]) as u8, coin: false, samples, scores }
    }
}

/// Disagreements of `h0` and `h1` with `f` on the samples, one `f` query each.
pub fn count_errors(s: &mut Session<'_>, samples: &[BitPoint]) -> Result<[u64; 2]> {
    let mut errors = [0u64; 2];
    for &x in samples {
        let y = s.label(OracleId::F, x)?;
        for (b, e) in errors.iter_mut().enumerate() {
            if s.label(OracleId::h(b), x)? != y {
                *e += 1;
            }
        }
    }
    Ok(errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_counts() {
        let p = Params::new(Rational::from(1u32), Rational::ratio(1, 20)).with_eta(Rational::ratio(1, 8));
        assert_eq!(p.delta(), Rational::ratio(1, 12));
        assert_eq!(p.log_inv_beta(), 5);
        assert_eq!(p.m(), 720);
        assert_eq!(p.m_additive().unwrap(), 2560);
        assert_eq!(p.m_mixed(), 1440);
        assert_eq!(p.t_mixed().unwrap(), 184_320);
        assert_eq!(Params::junta_samples(&p.eps, &p.beta), 80);
    }
}
