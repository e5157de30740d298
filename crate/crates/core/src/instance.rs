//! Problem instances and a party's memoized, counted view of their oracles.

use std::collections::BTreeMap;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::oracle::{check_enumerable, CountingOracle, FunctionSpec, Label, OracleId, PmfSpec};
use crate::point::{BitPoint, MAX_DIM};
use crate::rational::Rational;
use crate::task::{CustomFn, CustomSet, OracleAccess};

/// `f`, `h0`, `h1`, `Q_D` and `ℓ` over `{0,1}^dim` with labels `0..range`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub dim: u8,
    pub range: u32,
    pub f: FunctionSpec,
    pub h: [FunctionSpec; 2],
    pub pmf: PmfSpec,
    pub metric: Metric,
}

impl Instance {
    /// Checks shapes, PMF normalization, metric axioms and (when enumerable)
    /// that every label lies in the range.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(Error::param(format!("dimension {} out of range", self.dim)));
        }
        if self.range == 0 {
            return Err(Error::param("empty label range"));
        }
        for spec in [&self.f, &self.h[0], &self.h[1]] {
            match spec {
                FunctionSpec::Table(t) if t.len() as u64 != 1u64 << self.dim => {
                    return Err(Error::param("function table size does not match 2^d"));
                }
                FunctionSpec::Junta(j) if j.dim() != self.dim => {
                    return Err(Error::param("junta dimension does not match d"));
                }
                FunctionSpec::Cnf(c) if c.vars != self.dim => {
                    return Err(Error::param("formula variable count does not match d"));
                }
                _ => {}
            }
            if check_enumerable(self.dim).is_ok() && spec.truth_table(self.dim)?.iter().any(|&y| y >= self.range) {
                return Err(Error::param("function value outside the label range"));
            }
        }
        self.pmf.check_normalized(self.dim)?;
        self.metric.check(self.range)
    }

    /// Precision `λ` of the distribution.
    pub fn lambda(&self) -> u32 {
        self.pmf.precision(self.dim)
    }

    pub fn world(&self) -> World {
        World::new(self.dim, &self.f, &self.h, &self.pmf)
    }

    /// Exact losses `L_D(h_b, f | ℓ)` by enumeration.
    pub fn losses(&self) -> Result<[Rational; 2]> {
        check_enumerable(self.dim)?;
        let mut out = [Rational::zero(), Rational::zero()];
        for x in BitPoint::all(self.dim) {
            let p = self.pmf.eval(x);
            if p.is_zero() {
                continue;
            }
            let y = self.f.eval(x);
            for (b, o) in out.iter_mut().enumerate() {
                let l = self.metric.eval(self.h[b].eval(x), y);
                if !l.is_zero() {
                    *o += &p * l;
                }
            }
        }
        Ok(out)
    }

    pub fn sampler(&self) -> Result<ExactSampler> {
        ExactSampler::new(&self.pmf, self.dim)
    }
}

/// Draws points exactly from a rational PMF via a uniform integer below the
/// common denominator.
#[derive(Clone, Debug)]
pub struct ExactSampler {
    dim: u8,
    kind: SamplerKind,
}

#[derive(Clone, Debug)]
enum SamplerKind {
    Uniform,
    Small { cum: Vec<u128>, total: u128 },
    Big { cum: Vec<BigUint>, total: BigUint },
}

impl ExactSampler {
    pub fn new(pmf: &PmfSpec, dim: u8) -> Result<ExactSampler> {
        let table = match pmf {
            PmfSpec::Uniform => return Ok(ExactSampler { dim, kind: SamplerKind::Uniform }),
            PmfSpec::Table(t) => t,
        };
        let (cum, total) = integer_weights(table.iter())?;
        let kind = match (total.to_u128(), cum.last().and_then(|c| c.to_u128())) {
            (Some(t), Some(_)) => {
                SamplerKind::Small { cum: cum.iter().map(|c| c.to_u128().unwrap()).collect(), total: t }
            }
            _ => SamplerKind::Big { cum, total },
        };
        Ok(ExactSampler { dim, kind })
    }

    pub fn sample(&self, rng: &mut impl Rng) -> BitPoint {
        let idx = match &self.kind {
            SamplerKind::Uniform => {
                let v: u64 = rng.gen();
                if self.dim == 64 {
                    v
                } else {
                    v & ((1u64 << self.dim) - 1)
                }
            }
            SamplerKind::Small { cum, total } => {
                let u = rng.gen_range(0..*total);
                cum.partition_point(|&c| c <= u) as u64
            }
            SamplerKind::Big { cum, total } => {
                let u = rng.gen_biguint_below(total);
                cum.partition_point(|c| *c <= u) as u64
            }
        };
        BitPoint::full(self.dim, idx)
    }
}

/// Cumulative integer weights `w_i = p_i · L` for `L` the lcm of denominators.
pub(crate) fn integer_weights<'a>(ps: impl Iterator<Item = &'a Rational> + Clone) -> Result<(Vec<BigUint>, BigUint)> {
    let mut lcm = BigUint::one();
    for p in ps.clone() {
        if p.is_negative() {
            return Err(Error::param("negative weight"));
        }
        let d = p.denom().to_biguint().expect("positive denominator");
        lcm = lcm.lcm(&d);
    }
    let mut acc = BigUint::zero();
    let mut cum = Vec::new();
    for p in ps {
        let w = (p.numer().to_biguint().unwrap() * &lcm) / p.denom().to_biguint().unwrap();
        acc += w;
        cum.push(acc.clone());
    }
    if acc.is_zero() {
        return Err(Error::param("all weights are zero"));
    }
    Ok((cum, acc))
}

/// One party's view of the instance oracles: every distinct point is
/// evaluated (and counted) once, later lookups hit the memo.
pub struct World {
    dim: u8,
    labels: [CountingOracle<Label>; 3],
    pmf: CountingOracle<Rational>,
    memo: [FxHashMap<u64, Label>; 3],
    memo_mass: FxHashMap<u64, Rational>,
    custom: BTreeMap<&'static str, u64>,
    specs: [FunctionSpec; 3],
}

impl World {
    pub fn new(dim: u8, f: &FunctionSpec, h: &[FunctionSpec; 2], pmf: &PmfSpec) -> World {
        World {
            dim,
            labels: [
                CountingOracle::function("f", f),
                CountingOracle::function("h0", &h[0]),
                CountingOracle::function("h1", &h[1]),
            ],
            pmf: CountingOracle::pmf(pmf),
            memo: Default::default(),
            memo_mass: FxHashMap::default(),
            custom: BTreeMap::new(),
            specs: [f.clone(), h[0].clone(), h[1].clone()],
        }
    }

    fn slot(id: OracleId) -> usize {
        match id {
            OracleId::F => 0,
            OracleId::H0 => 1,
            OracleId::H1 => 2,
            OracleId::Pmf => unreachable!("pmf is not a labeling oracle"),
        }
    }

    /// The description of `f`, `h0` or `h1` (a prover may inspect it).
    pub fn spec(&self, id: OracleId) -> &FunctionSpec {
        &self.specs[World::slot(id)]
    }

    pub fn query_label(&mut self, id: OracleId, x: BitPoint) -> Label {
        let k = World::slot(id);
        let o = &self.labels[k];
        *self.memo[k].entry(x.value()).or_insert_with(|| o.query(x))
    }

    pub fn query_mass(&mut self, x: BitPoint) -> Rational {
        let o = &self.pmf;
        self.memo_mass.entry(x.value()).or_insert_with(|| o.query(x)).clone()
    }

    /// Real oracle evaluations so far, by oracle name.
    pub fn counts(&self) -> BTreeMap<String, u64> {
        let mut m: BTreeMap<String, u64> = self.custom.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for o in &self.labels {
            m.insert(o.name().to_string(), o.count());
        }
        m.insert("pmf".into(), self.pmf.count());
        m
    }
}

impl OracleAccess for World {
    fn dim(&self) -> u8 {
        self.dim
    }

    fn label(&mut self, id: OracleId, x: BitPoint) -> Result<Label> {
        Ok(self.query_label(id, x))
    }

    fn mass(&mut self, x: BitPoint) -> Result<Rational> {
        Ok(self.query_mass(x))
    }

    fn custom(&mut self, t: &CustomFn, x: BitPoint) -> Result<Rational> {
        *self.custom.entry(t.name).or_default() += 1;
        Ok(t.eval(x))
    }

    fn member(&mut self, s: &CustomSet, x: BitPoint) -> Result<bool> {
        *self.custom.entry("member").or_default() += 1;
        Ok(s.member(x))
    }

    fn less(&mut self, s: &CustomSet, x: BitPoint, y: BitPoint) -> Result<bool> {
        *self.custom.entry("less").or_default() += 1;
        Ok(s.less(x, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampler_frequencies() {
        let pmf = PmfSpec::table(vec![Rational::ratio(1, 3), Rational::ratio(2, 3)]);
        let s = ExactSampler::new(&pmf, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ones = (0..3000).filter(|_| s.sample(&mut rng).value() == 1).count();
        assert!((1900..2100).contains(&ones), "{ones}");
    }

    #[test]
    fn world_memoizes() {
        let inst = Instance {
            dim: 2,
            range: 2,
            f: FunctionSpec::Const(0),
            h: [FunctionSpec::Const(0), FunctionSpec::Const(1)],
            pmf: PmfSpec::Uniform,
            metric: Metric::ZeroOne,
        };
        let mut w = inst.world();
        let x = BitPoint::full(2, 1);
        w.query_label(OracleId::H0, x);
        w.query_label(OracleId::H0, x);
        assert_eq!(w.counts()["h0"], 1);
        assert_eq!(inst.losses().unwrap(), [Rational::zero(), Rational::one()]);
    }
}
