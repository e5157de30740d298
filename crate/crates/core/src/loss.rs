//! Exact test-side quantities: TV distance, losses, and the guarantee check.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::oracle::{check_enumerable, CountingOracle, Label};
use crate::point::BitPoint;
use crate::rational::Rational;

fn check_pmf(name: &str, t: &[Rational]) -> Result<()> {
    let total: Rational = t.iter().sum();
    if total != Rational::one() || t.iter().any(|p| p.is_negative()) {
        return Err(Error::param(format!("{name} is not a distribution (sums to {total})")));
    }
    Ok(())
}

/// `(1/2)·Σ|P(x) − Q(x)|`.
pub fn tv_distance(p: &[Rational], q: &[Rational]) -> Result<Rational> {
    if p.len() != q.len() {
        return Err(Error::param(format!("tables have {} and {} entries", p.len(), q.len())));
    }
    check_pmf("P", p)?;
    check_pmf("Q", q)?;
    let sum: Rational = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    Ok(sum / Rational::from(2u32))
}

/// `L_D(f, h | ℓ)` by enumerating `{0,1}^d`.
pub fn exact_loss(
    f: &CountingOracle<Label>,
    h: &CountingOracle<Label>,
    pmf: &[Rational],
    metric: &Metric,
    dim: u8,
) -> Result<Rational> {
    check_enumerable(dim)?;
    if pmf.len() as u64 != 1u64 << dim {
        return Err(Error::param("pmf table does not cover {0,1}^d"));
    }
    let mut total = Rational::zero();
    for x in BitPoint::all(dim) {
        let p = &pmf[x.value() as usize];
        if p.is_zero() {
            continue;
        }
        let l = metric.eval(f.query(x), h.query(x));
        if !l.is_zero() {
            total += p * l;
        }
    }
    Ok(total)
}

/// The guarantee: `chosen ≤ α·min(chosen, other) + η`.
pub fn check_rlp_guarantee(chosen: &Rational, other: &Rational, alpha: &Rational, eta: &Rational) -> bool {
    *chosen <= alpha * chosen.min(other) + eta
}
