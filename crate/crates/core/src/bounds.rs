//! Communication envelopes derived from the wire encoding.
//!
//! A rational `p/q` with `|p| < 2^a`, `q < 2^b` encodes in at most
//! `4 + ⌈a/8⌉ + ⌈b/8⌉` bytes (tag, sign, two one-byte lengths while the
//! magnitudes stay under 128 bytes). For `t` with values in
//! `2^{-λ}·Z ∩ [-2^λ, 2^λ]` every subcube sum has `a ≤ 2λ + d + 1` and
//! `b ≤ λ + 1`. A certified-sum round sends one claim triple, forwards it,
//! and exchanges two one-bit messages (2 bytes each).

use crate::rational::Rational;
use crate::rlp::Params;

/// `C_sum`: [`certsum_bits`] never exceeds `C_SUM · d² · λ` for `d, λ ≥ 1`.
///
/// Per round `8·(6R + 4) ≤ 332 + 18λ + 6d` bits with
/// `R ≤ 6 + (3λ + d + 2)/8`, so a run costs at most
/// `2d·(332 + 18λ + 6d) ≤ 712·d²·λ`.
pub const C_SUM: u64 = 712;

fn rational_bytes(num_bits: u64, den_bits: u64) -> u64 {
    4 + num_bits.div_ceil(8) + den_bits.div_ceil(8)
}

/// Upper bound on the bits of one certified sum (both phases) over
/// `{0,1}^d` for a `λ`-dyadic summand.
pub fn certsum_bits(d: u64, lambda: u64) -> u64 {
    let r = rational_bytes(2 * lambda + d + 1, lambda + 1);
    2 * d * (2 * 3 * r + 4) * 8
}

/// `C_sum · d² · λ`.
pub fn certsum_envelope(d: u64, lambda: u64) -> u64 {
    C_SUM * d * d * lambda.max(1)
}

/// Upper bound on the bits of one certified sum (both phases) whose
/// claims have numerators below `2^num_bits` and denominators below `2^den_bits`.
pub fn sum_bits(d: u64, num_bits: u64, den_bits: u64) -> u64 {
    2 * d * (6 * rational_bytes(num_bits, den_bits) + 4) * 8
}

fn varint_bytes(v: u64) -> u64 {
    (64 - v.leading_zeros() as u64).div_ceil(7).max(1)
}

/// Upper bound on the bits of one certified index (both phases always run):
/// the index, the claimed point and its forward, and a counting sum.
pub fn certindex_bits(d: u64) -> u64 {
    let index = 1 + varint_bytes(1 << d);
    let point = 2 + d.div_ceil(8);
    2 * (8 * (index + 2 * point) + sum_bits(d, d + 1, 1))
}

/// Upper bound on the bits of the zero-one protocol on a `λ`-dyadic
/// instance: the certified `p_S`, the rounding total, the support size,
/// per bucket two indices and one mass, then `m` certified indices.
///
/// Rounded masses lie in `2^{-λ'}·Z ∩ [0, 1]`, so bucket masses are `a/k`
/// with `a ≤ k ≤ 2^{λ'}`; the bucket count is the partition length at
/// `n = 2^d`, the largest possible support.
pub fn rlp01_bits(d: u64, lambda: u64, params: &Params) -> u64 {
    let half = params.delta() / Rational::from(2u32);
    let lr = crate::certsample::rounding_lambda(d as u8, &half) as u64;
    let buckets = crate::certsample::oblivious_partition(1 << d, &half).map(|p| p.len() as u64).unwrap_or(0);
    sum_bits(d, 2 * lambda + d + 1, lambda + 1)
        + sum_bits(d, lr + 1, lr + 1)
        + sum_bits(d, d + 1, 1)
        + buckets * (2 * certindex_bits(d) + sum_bits(d, lr + 1, lr + 1))
        + params.m() * certindex_bits(d)
}

/// `C_rlp` for [`rlp_envelope`]: the smallest power of two with
/// [`rlp01_bits`] under the envelope for `d ≤ 16`, `d ≤ λ ≤ d + 16`,
/// `ε ∈ [1/16, 16]`, `β ∈ [1/1000, 1/2]`. The ratio falls with `d`; it peaks
/// at `d = 1` (about 1.06·10^5) where per-message framing meets `d³ = 1`,
/// and is about 440 at `d = 8`.
pub const C_RLP: u64 = 1 << 17;

/// `C_rlp · λ · (1 + 1/ε²) · log(1 + 1/ε) · log(1/β) · d³`, logarithms
/// base 2, rounded up and at least 1.
pub fn rlp_envelope(d: u64, lambda: u64, eps: &Rational, beta: &Rational) -> Rational {
    let one = Rational::from(1u32);
    let shape = &one + (eps * eps).recip();
    let log_eps = crate::rational::ceil_log2(&(&one + eps.recip())).max(1);
    let log_beta = crate::rational::ceil_log2(&beta.recip()).max(1);
    Rational::from(C_RLP * lambda.max(1) * d * d * d) * shape * Rational::from(log_eps * log_beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_bound_within_constant() {
        for d in 1..=20 {
            for l in 1..=64 {
                assert!(certsum_bits(d, l) <= certsum_envelope(d, l), "d={d} λ={l}");
            }
        }
    }

    #[test]
    fn rlp_bound_within_envelope() {
        let eps = [(1, 16), (1, 2), (1, 1), (4, 1), (16, 1)];
        let beta = [(1, 2), (1, 20), (1, 1000)];
        for d in 1..=12 {
            for l in [d, d + 4, d + 16] {
                for &(p, q) in &eps {
                    for &(bp, bq) in &beta {
                        let params = Params::new(Rational::ratio(p, q), Rational::ratio(bp, bq));
                        let bits = Rational::from(rlp01_bits(d, l, &params));
                        assert!(bits <= rlp_envelope(d, l, &params.eps, &params.beta), "d={d} λ={l} ε={p}/{q}");
                    }
                }
            }
        }
    }
}
