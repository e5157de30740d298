//! Certified sampling from a distribution given by its mass function.
//!
//! The verifier rounds `D` to `D_λ`, certifies the support size `N` of
//! `D_λ`, splits the support order (decreasing mass, then lex) into the
//! oblivious buckets `I_1, …, I_ℓ` with `|I_k| ≤ ⌊(1+δ')^k⌋`, certifies each
//! bucket's endpoints and mass, and then samples from the flattened histogram
//! `D̂(S_i) = p_k / |I_k|` for `i ∈ I_k`, resolving indices by certified index.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::certindex::run_certindex;
use crate::certsum::run_certsum;
use crate::error::{Error, Result};
use crate::point::BitPoint;
use crate::rational::{ceil_log2, Rational};
use crate::session::Session;
use crate::task::{Distribution, OrderedSet, SumTask};

/// Contiguous buckets covering `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObliviousPartition {
    pub n: u64,
    pub delta: Rational,
    pub sizes: Vec<u64>,
}

impl ObliviousPartition {
    /// 1-based inclusive index ranges.
    pub fn ranges(&self) -> Vec<(u64, u64)> {
        let mut lo = 1;
        self.sizes
            .iter()
            .map(|&s| {
                let r = (lo, lo + s - 1);
                lo += s;
                r
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }
}

/// Greedy: bucket `k` takes `min(⌊(1+δ)^k⌋, remaining)` indices.
pub fn oblivious_partition(n: u64, delta: &Rational) -> Result<ObliviousPartition> {
    if n == 0 {
        return Err(Error::param("partition of an empty range"));
    }
    if !delta.is_positive() || *delta >= Rational::one() {
        return Err(Error::param(format!("delta {delta} is not in (0, 1)")));
    }
    let base = Rational::one() + delta;
    let mut pow = base.clone();
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let cap = pow.floor().to_u64().unwrap_or(u64::MAX);
        let take = cap.min(left);
        sizes.push(take);
        left -= take;
        // once the cap exceeds n the exact power is no longer needed
        if cap < n {
            pow *= &base;
        }
    }
    Ok(ObliviousPartition { n, delta: delta.clone(), sizes })
}

/// `d + ⌈log2((4+δ)/δ)⌉`, the rounding precision for accuracy `δ`.
pub fn rounding_lambda(dim: u8, delta: &Rational) -> u32 {
    let r = (Rational::from(4u32) + delta) / delta;
    dim as u32 + ceil_log2(&r).max(0) as u32
}

/// Certify `T_λ = Σ ⌊D(x)⌋_λ` and return `D_λ`.
pub fn round_pmf(s: &mut Session<'_>, dist: &Distribution, lambda: u32) -> Result<Distribution> {
    let total = run_certsum(s, &SumTask::FlooredMass { dist: dist.clone(), lambda }, lambda)?;
    if !total.is_positive() {
        return Err(Error::construction(format!("rounded mass at λ = {lambda} is {total}")));
    }
    Ok(dist.clone().rounded(lambda, total))
}

/// A certified flattened histogram of `D_λ`, reusable for any number of draws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketedSampler {
    pub dim: u8,
    pub delta: Rational,
    pub lambda: u32,
    /// `D_λ`; its support order defines the indices.
    pub rounded: Distribution,
    pub support: u64,
    pub partition: ObliviousPartition,
    pub masses: Vec<Rational>,
    pub endpoints: Vec<(BitPoint, BitPoint)>,
    draw: Draw,
}

/// Integer weights over the least common denominator of `p_k / |I_k|`.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Draw {
    Small { unit: Vec<u128>, cum: Vec<u128>, total: u128 },
    Big { unit: Vec<BigUint>, cum: Vec<BigUint>, total: BigUint },
}

impl Draw {
    fn new(masses: &[Rational], sizes: &[u64]) -> Draw {
        let weights: Vec<Rational> = masses.iter().zip(sizes).map(|(p, &n)| p / Rational::from(n)).collect();
        let mut lcm = BigUint::one();
        for w in &weights {
            lcm = lcm.lcm(&w.denom().to_biguint().expect("positive denominator"));
        }
        let unit: Vec<BigUint> = weights
            .iter()
            .map(|w| w.numer().to_biguint().expect("non-negative weight") * &lcm / w.denom().to_biguint().unwrap())
            .collect();
        let mut acc = BigUint::zero();
        let cum: Vec<BigUint> = unit
            .iter()
            .zip(sizes)
            .map(|(u, &n)| {
                acc += u * n;
                acc.clone()
            })
            .collect();
        let small = |v: &BigUint| v.to_u128();
        match (small(&acc), unit.iter().map(small).collect::<Option<Vec<_>>>(), cum.iter().map(small).collect::<Option<Vec<_>>>()) {
            (Some(total), Some(unit), Some(cum)) => Draw::Small { unit, cum, total },
            _ => Draw::Big { unit, cum, total: acc },
        }
    }

    /// A 1-based index, exactly distributed as the flattened histogram.
    fn sample(&self, ranges: &[(u64, u64)], rng: &mut impl Rng) -> u64 {
        match self {
            Draw::Small { unit, cum, total } => {
                let u = rng.gen_range(0..*total);
                let k = cum.partition_point(|&c| c <= u);
                let before = if k == 0 { 0 } else { cum[k - 1] };
                ranges[k].0 + ((u - before) / unit[k]) as u64
            }
            Draw::Big { unit, cum, total } => {
                let u = rng.gen_biguint_below(total);
                let k = cum.partition_point(|c| *c <= u);
                let before = if k == 0 { BigUint::zero() } else { cum[k - 1].clone() };
                ranges[k].0 + ((u - before) / &unit[k]).to_u64().expect("offset within bucket")
            }
        }
    }
}

/// Build the sampler for `D` with accuracy `δ` (the lemma's `δ`; buckets use `δ/2`).
pub fn build_bucketed_sampler(s: &mut Session<'_>, dist: &Distribution, delta: &Rational) -> Result<BucketedSampler> {
    if !delta.is_positive() || *delta >= Rational::one() {
        return Err(Error::param(format!("delta {delta} is not in (0, 1)")));
    }
    let d = s.dim();
    let half = delta / Rational::from(2u32);
    let lambda = rounding_lambda(d, &half);
    let rounded = round_pmf(s, dist, lambda)?;
    let n = run_certsum(s, &SumTask::Support(rounded.clone()), d as u32)?;
    let n = n.floor().to_u64().ok_or_else(|| Error::construction("support size out of range"))?;
    let partition = oblivious_partition(n, &half)?;
    let set = OrderedSet::Support(rounded.clone());
    let mut masses = Vec::with_capacity(partition.len());
    let mut endpoints = Vec::with_capacity(partition.len());
    for (k, (a, b)) in partition.ranges().into_iter().enumerate() {
        let bucket = |e: Error| Error::Bucket { bucket: k + 1, source: Box::new(e) };
        let first = run_certindex(s, &set, a).map_err(bucket)?;
        let last = if a == b { first } else { run_certindex(s, &set, b).map_err(bucket)? };
        let task = SumTask::BucketMass { dist: rounded.clone(), first, last };
        let p = run_certsum(s, &task, lambda).map_err(bucket)?;
        masses.push(p);
        endpoints.push((first, last));
    }
    let total: Rational = masses.iter().sum();
    if total != Rational::one() || masses.iter().any(|p| p.is_negative()) {
        return Err(Error::construction(format!("bucket masses sum to {total}")));
    }
    let draw = Draw::new(&masses, &partition.sizes);
    Ok(BucketedSampler { dim: d, delta: delta.clone(), lambda, rounded, support: n, partition, masses, endpoints, draw })
}

impl BucketedSampler {
    /// `D̂'(i) = p_k / |I_k|` for the bucket holding index `i` (1-based).
    pub fn index_weight(&self, i: u64) -> Rational {
        let ranges = self.partition.ranges();
        match ranges.iter().position(|&(a, b)| a <= i && i <= b) {
            Some(k) => &self.masses[k] / Rational::from(self.partition.sizes[k]),
            None => Rational::zero(),
        }
    }

    /// Closed-form `D̂` as a table over `{0,1}^d`, given the support of `D_λ`
    /// in order (`order[i-1]` is `S_i`).
    pub fn hat_distribution(&self, order: &[BitPoint]) -> Result<Vec<Rational>> {
        if order.len() as u64 != self.support {
            return Err(Error::param(format!("order lists {} points, support is {}", order.len(), self.support)));
        }
        let mut table = vec![Rational::zero(); 1usize << self.dim];
        for ((&(a, b), p), &n) in self.partition.ranges().iter().zip(&self.masses).zip(&self.partition.sizes) {
            let w = p / Rational::from(n);
            for x in &order[(a - 1) as usize..b as usize] {
                table[x.value() as usize] = w.clone();
            }
        }
        Ok(table)
    }

    /// A 1-based support index drawn from `D̂'`.
    pub fn sample_index(&self, rng: &mut impl Rng) -> u64 {
        self.draw.sample(&self.partition.ranges(), rng)
    }

    pub fn record(&self) -> SamplerRecord {
        SamplerRecord {
            dim: self.dim,
            delta: self.delta.clone(),
            lambda: self.lambda,
            support: self.support,
            sizes: self.partition.sizes.clone(),
            masses: self.masses.clone(),
            endpoints: self.endpoints.iter().map(|(a, b)| [point_hex(a), point_hex(b)]).collect(),
        }
    }
}

fn point_hex(x: &BitPoint) -> String {
    hex::encode(&x.value().to_be_bytes()[8 - (x.dim() as usize).div_ceil(8).max(1)..])
}

/// Serializable view of a sampler.
#[derive(Debug, Clone, Serialize)]
pub struct SamplerRecord {
    pub dim: u8,
    pub delta: Rational,
    pub lambda: u32,
    pub support: u64,
    pub sizes: Vec<u64>,
    pub masses: Vec<Rational>,
    pub endpoints: Vec<[String; 2]>,
}

/// `m` points, each an index drawn from `D̂'` and resolved by certified index.
pub fn draw_samples(s: &mut Session<'_>, sampler: &BucketedSampler, m: u64) -> Result<Vec<BitPoint>> {
    let set = OrderedSet::Support(sampler.rounded.clone());
    let ranges = sampler.partition.ranges();
    let mut out = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let i = sampler.draw.sample(&ranges, s.rng());
        out.push(run_certindex(s, &set, i)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_examples() {
        let p = oblivious_partition(8, &Rational::ratio(1, 2)).unwrap();
        assert_eq!(p.sizes, vec![1, 2, 3, 2]);
        assert_eq!(oblivious_partition(1, &Rational::ratio(1, 3)).unwrap().sizes, vec![1]);
        let q = oblivious_partition(1024, &Rational::ratio(1, 4)).unwrap();
        assert_eq!(q.sizes.iter().sum::<u64>(), 1024);
        let mut cap = Rational::one();
        for &s in &q.sizes {
            cap *= Rational::ratio(5, 4);
            assert!(Rational::from(s) <= Rational::integer(cap.floor()));
        }
    }

    #[test]
    fn lambda_rounds_up() {
        // (4 + 1/4) / (1/4) = 17, ⌈log2 17⌉ = 5
        assert_eq!(rounding_lambda(6, &Rational::ratio(1, 4)), 11);
    }

    #[test]
    fn draw_is_flat_within_buckets() {
        let masses = [Rational::ratio(1, 2), Rational::ratio(1, 3), Rational::ratio(1, 6)];
        let d = Draw::new(&masses, &[1, 2, 3]);
        match &d {
            Draw::Small { unit, total, .. } => {
                // weights 1/2, 1/6, 1/18 over lcd 18
                assert_eq!(*total, 18);
                assert_eq!(unit, &vec![9, 3, 1]);
            }
            Draw::Big { .. } => panic!("expected the small path"),
        }
    }
}
