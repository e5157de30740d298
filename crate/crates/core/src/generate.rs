//! Instance generators with exact losses on the side.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::juntas::{junta_distance, reduced_junta, JuntaSpec};
use crate::metric::Metric;
use crate::oracle::{check_enumerable, FunctionSpec, Label, PmfSpec};
use crate::point::BitPoint;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    LossGap,
    Junta,
    LowerBound,
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        match s {
            "loss-gap" => Ok(Kind::LossGap),
            "junta" => Ok(Kind::Junta),
            "lower-bound-ensemble" => Ok(Kind::LowerBound),
            _ => Err(Error::param(format!("unknown instance kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmfKind {
    Uniform,
    /// Masses proportional to random weights in `1..=5`; rarely dyadic.
    Skewed,
}

/// Generator settings. Unused fields are ignored by a kind.
#[derive(Debug, Clone)]
pub struct GenSpec {
    pub kind: Kind,
    pub dim: u8,
    /// Requested loss ratio: the instance has `L1 > α·L0 + η`.
    pub alpha: Rational,
    /// Additive separation (`loss-gap`) or the mass on `0^d` (`lower-bound-ensemble`).
    pub eta: Rational,
    /// Junta size.
    pub j: u8,
    /// Label range; above 2 selects the absolute-difference metric.
    pub range: u32,
    pub pmf: PmfKind,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(kind: Kind, dim: u8, seed: u64) -> GenSpec {
        GenSpec {
            kind,
            dim,
            alpha: Rational::from(2u32),
            eta: Rational::zero(),
            j: 3,
            range: 2,
            pmf: PmfKind::Uniform,
            seed,
        }
    }
}

/// Exact facts about a generated instance.
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar {
    pub kind: String,
    pub seed: u64,
    /// `L_D(h_b, f | ℓ)`.
    pub losses: [Rational; 2],
    /// The hypothesis `f` was copied from, for ensembles.
    pub truth: Option<u8>,
}

pub fn generate(spec: &GenSpec) -> Result<(Instance, Sidecar)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (inst, truth) = match spec.kind {
        Kind::LossGap => (loss_gap(spec, &mut rng)?, None),
        Kind::Junta => (junta(spec, &mut rng)?, None),
        Kind::LowerBound => {
            let (i, b) = lower_bound(spec, &mut rng)?;
            (i, Some(b))
        }
    };
    inst.validate()?;
    let losses = exact_losses(&inst)?;
    let name = match spec.kind {
        Kind::LossGap => "loss-gap",
        Kind::Junta => "junta",
        Kind::LowerBound => "lower-bound-ensemble",
    };
    Ok((inst, Sidecar { kind: name.into(), seed: spec.seed, losses, truth }))
}

/// Exact losses: enumeration when possible, the junta structure otherwise.
pub fn exact_losses(inst: &Instance) -> Result<[Rational; 2]> {
    if check_enumerable(inst.dim).is_ok() {
        return inst.losses();
    }
    match (&inst.f, &inst.h[0], &inst.h[1], &inst.pmf, &inst.metric) {
        (FunctionSpec::Junta(f), FunctionSpec::Junta(a), FunctionSpec::Junta(b), PmfSpec::Uniform, Metric::ZeroOne) => {
            Ok([junta_distance(a, f), junta_distance(b, f)])
        }
        _ => inst.losses(),
    }
}

fn random_pmf(kind: PmfKind, dim: u8, rng: &mut impl Rng) -> PmfSpec {
    match kind {
        PmfKind::Uniform => PmfSpec::Uniform,
        PmfKind::Skewed => {
            let w: Vec<i64> = (0..1usize << dim).map(|_| rng.gen_range(1..=5)).collect();
            let total: i64 = w.iter().sum();
            PmfSpec::table(w.into_iter().map(|v| Rational::ratio(v, total)).collect())
        }
    }
}

fn perturb(y: Label, range: u32) -> Label {
    if y + 1 < range {
        y + 1
    } else {
        y - 1
    }
}

/// `f` random; `h_b` equals `f` except on a disjoint error set `E_b`.
/// `E_0` covers about 3/256 of the domain and `E_1` grows until
/// `L1 > α·L0 + η`, the smallest gap meeting the request.
fn loss_gap(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<Instance> {
    let dim = spec.dim;
    check_enumerable(dim)?;
    if spec.range < 2 {
        return Err(Error::param("a loss gap needs at least two labels"));
    }
    let n = 1usize << dim;
    let pmf = random_pmf(spec.pmf, dim, rng);
    let mass = |x: usize| pmf.eval(BitPoint::full(dim, x as u64));
    let f: Vec<Label> = (0..n).map(|_| rng.gen_range(0..spec.range)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let n0 = (3 * n / 256).max(1);
    let e0 = &order[..n0];
    let mut l0 = Rational::zero();
    for &x in e0 {
        l0 += mass(x);
    }
    let target = &spec.alpha * &l0 + &spec.eta;
    let mut l1 = Rational::zero();
    let mut n1 = 0;
    for &x in &order[n0..] {
        if l1 > target {
            break;
        }
        l1 += mass(x);
        n1 += 1;
    }
    if l1 <= target {
        return Err(Error::param(format!("no {dim}-dimensional instance reaches L1 > {target}")));
    }
    let e1 = &order[n0..n0 + n1];
    let mut h0 = f.clone();
    let mut h1 = f.clone();
    for &x in e0 {
        h0[x] = perturb(f[x], spec.range);
    }
    for &x in e1 {
        h1[x] = perturb(f[x], spec.range);
    }
    Ok(Instance {
        dim,
        range: spec.range,
        f: FunctionSpec::table(f),
        h: [FunctionSpec::table(h0), FunctionSpec::table(h1)],
        pmf,
        metric: if spec.range == 2 { Metric::ZeroOne } else { Metric::AbsInt },
    })
}

fn random_indices(dim: u8, j: u8, rng: &mut impl Rng) -> Vec<u8> {
    let mut v: Vec<u8> = index::sample(rng, dim as usize, j as usize).into_iter().map(|i| i as u8).collect();
    v.sort_unstable();
    v
}

/// Random `j`-juntas `h0 ≠ h1`; `f` agrees with `h0` except on a quarter of
/// the joint settings where the hypotheses differ, so `L1 ≥ 3·L0`.
fn junta(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<Instance> {
    let (dim, j) = (spec.dim, spec.j);
    if j == 0 || j > dim || 2 * j as u32 > 24 {
        return Err(Error::param(format!("junta size {j} does not fit dimension {dim}")));
    }
    loop {
        let h0 = JuntaSpec::random(dim, random_indices(dim, j, rng), rng);
        let h1 = JuntaSpec::random(dim, random_indices(dim, j, rng), rng);
        let mut u: Vec<u8> = h0.indices().iter().chain(h1.indices()).copied().collect();
        u.sort_unstable();
        u.dedup();
        let pts: Vec<BitPoint> = (0..1usize << u.len()).map(|a| reduced_point(dim, &u, a)).collect();
        let differ: Vec<usize> = (0..pts.len()).filter(|&a| h0.eval(pts[a]) != h1.eval(pts[a])).collect();
        if differ.is_empty() {
            continue;
        }
        let mut table: Vec<bool> = pts.iter().map(|&x| h0.eval(x) == 1).collect();
        for &a in differ.choose_multiple(rng, differ.len() / 4) {
            table[a] = !table[a];
        }
        let f = reduced_junta(dim, &u, &table);
        return Ok(Instance {
            dim,
            range: 2,
            f: FunctionSpec::Junta(Arc::new(f)),
            h: [FunctionSpec::Junta(Arc::new(h0)), FunctionSpec::Junta(Arc::new(h1))],
            pmf: PmfSpec::Uniform,
            metric: Metric::ZeroOne,
        });
    }
}

fn reduced_point(dim: u8, idx: &[u8], a: usize) -> BitPoint {
    let k = idx.len();
    let v = idx
        .iter()
        .enumerate()
        .filter(|(t, _)| a >> (k - 1 - t) & 1 == 1)
        .fold(0u64, |acc, (_, &i)| acc | 1 << (dim - 1 - i));
    BitPoint::full(dim, v)
}

/// `h0 ≡ 0`, `h1 = Ind[x = 0^d]`, `D` puts `η` on `0^d` and is uniform
/// elsewhere, `f = h_b` for a random `b`.
fn lower_bound(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<(Instance, u8)> {
    let dim = spec.dim;
    check_enumerable(dim)?;
    if !spec.eta.is_positive() || spec.eta >= Rational::one() {
        return Err(Error::param("the ensemble needs η in (0, 1)"));
    }
    let n = 1u64 << dim;
    let rest = (Rational::one() - &spec.eta) / Rational::from(n - 1);
    let mut pmf = vec![rest; n as usize];
    pmf[0] = spec.eta.clone();
    let mut h1 = vec![0; n as usize];
    h1[0] = 1;
    let b = rng.gen_range(0..2u8);
    let h = [FunctionSpec::Const(0), FunctionSpec::table(h1)];
    Ok((
        Instance {
            dim,
            range: 2,
            f: h[b as usize].clone(),
            h,
            pmf: PmfSpec::table(pmf),
            metric: Metric::ZeroOne,
        },
        b,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bound_mass() {
        let mut s = GenSpec::new(Kind::LowerBound, 6, 1);
        s.eta = Rational::ratio(1, 16);
        let (inst, side) = generate(&s).unwrap();
        assert_eq!(inst.pmf.eval(BitPoint::full(6, 0)), Rational::ratio(1, 16));
        let b = side.truth.unwrap() as usize;
        assert_eq!(side.losses[b], Rational::zero());
        assert_eq!(side.losses[1 - b], Rational::ratio(1, 16));
    }

    #[test]
    fn loss_gap_meets_ratio() {
        for seed in 0..5 {
            let (inst, side) = generate(&GenSpec::new(Kind::LossGap, 8, seed)).unwrap();
            assert!(side.losses[1] >= Rational::from(2u32) * &side.losses[0]);
            assert_eq!(inst.losses().unwrap(), side.losses);
        }
    }
}
