//! Exact statistics behind the selection rules, by enumeration.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::oracle::check_enumerable;
use crate::point::BitPoint;
use crate::rational::Rational;

/// `1/2 − ε/(2(2+ε))`.
pub fn margin_bound(eps: &Rational) -> Rational {
    Rational::ratio(1, 2) - eps / (Rational::from(2u32) * (Rational::from(2u32) + eps))
}

/// Whether `L_{1-b} > α·L_b` exactly.
pub fn loss_gap(inst: &Instance, b: usize, alpha: &Rational) -> Result<bool> {
    let l = inst.losses()?;
    Ok(l[1 - b] > alpha * &l[b])
}

/// `Pr_{x∼D|_S}[h0(x) ≠ f(x)]` for `S = {h0 ≠ h1}`, zero-one loss.
///
/// Requires `L_1 > (1+ε)·L_0`; at that gap the value is below
/// [`margin_bound`].
pub fn disagreement_margin(inst: &Instance, eps: &Rational) -> Result<Rational> {
    check_enumerable(inst.dim)?;
    let l = zero_one_losses(inst);
    if l[1] <= (Rational::one() + eps) * &l[0] {
        return Err(Error::param(format!("precondition unmet: L1 = {} is not above (1+ε)·L0 = {}", l[1], (Rational::one() + eps) * &l[0])));
    }
    let (mut mass, mut wrong) = (Rational::zero(), Rational::zero());
    for x in BitPoint::all(inst.dim) {
        let (y0, y1) = (inst.h[0].eval(x), inst.h[1].eval(x));
        if y0 == y1 {
            continue;
        }
        let p = inst.pmf.eval(x);
        if y0 != inst.f.eval(x) {
            wrong += &p;
        }
        mass += p;
    }
    if mass.is_zero() {
        return Err(Error::param("the disagreement set has no mass"));
    }
    Ok(wrong / mass)
}

fn zero_one_losses(inst: &Instance) -> [Rational; 2] {
    let mut out = [Rational::zero(), Rational::zero()];
    for x in BitPoint::all(inst.dim) {
        let y = inst.f.eval(x);
        for (b, o) in out.iter_mut().enumerate() {
            if inst.h[b].eval(x) != y {
                *o += inst.pmf.eval(x);
            }
        }
    }
    out
}

/// `R_b = E_{x∼D^ℓ}[ℓ_b(x) / (ℓ_0(x) + ℓ_1(x))]` under the loss-rescaled
/// distribution, with `ℓ_b(x) = ℓ(h_b(x), f(x))`.
pub fn rescaled_score(inst: &Instance, b: usize) -> Result<Rational> {
    check_enumerable(inst.dim)?;
    let mut mu = Rational::zero();
    let mut acc = Rational::zero();
    for x in BitPoint::all(inst.dim) {
        let (y0, y1, y) = (inst.h[0].eval(x), inst.h[1].eval(x), inst.f.eval(x));
        let delta = inst.metric.eval(y0, y1);
        if delta.is_zero() {
            continue;
        }
        let w = inst.pmf.eval(x) * delta;
        let l = [inst.metric.eval(y0, y), inst.metric.eval(y1, y)];
        let sum = &l[0] + &l[1];
        if sum.is_zero() {
            return Err(Error::construction(format!("metric violates the triangle inequality at {x}")));
        }
        acc += &w * &l[b] / sum;
        mu += w;
    }
    if mu.is_zero() {
        return Err(Error::param("μ = 0: the hypotheses never differ"));
    }
    Ok(acc / mu)
}
