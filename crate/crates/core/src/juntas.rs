//! Juntas: specs, the junta-aware subcube summer, the junta protocol and
//! index discovery.

use std::sync::Arc;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certsum::SubcubeSummer;
use crate::encoding::{decode_all, Payload};
use crate::error::{Error, Result};
use crate::oracle::{CountingOracle, Label, OracleId};
use crate::point::BitPoint;
use crate::rational::Rational;
use crate::session::Session;
use crate::task::{OracleAccess, OrderedSet, SumTask};
use crate::transcript::{Channel, Party};

/// A Boolean function `h(x) = g(x_J)`.
///
/// The table is indexed by the assignment to `J` packed with `J[0]` as the
/// most significant bit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JuntaSpec {
    dim: u8,
    indices: Vec<u8>,
    table: Vec<bool>,
}

impl JuntaSpec {
    /// Validates shape and that every index in `J` is relevant.
    pub fn new(dim: u8, indices: Vec<u8>, table: Vec<bool>) -> Result<JuntaSpec> {
        if indices.windows(2).any(|w| w[0] >= w[1]) || indices.iter().any(|&i| i >= dim) {
            return Err(Error::param("junta indices must be strictly increasing and below d"));
        }
        if table.len() != 1usize << indices.len() {
            return Err(Error::param(format!(
                "junta table needs {} entries, got {}",
                1usize << indices.len(),
                table.len()
            )));
        }
        let spec = JuntaSpec { dim, indices, table };
        if let Some(k) = (0..spec.indices.len()).find(|&k| !spec.is_relevant(k)) {
            return Err(Error::param(format!("junta index {} is irrelevant", spec.indices[k])));
        }
        Ok(spec)
    }

    /// Random junta on `indices` whose every index is relevant.
    pub fn random(dim: u8, indices: Vec<u8>, rng: &mut impl Rng) -> JuntaSpec {
        loop {
            let table = (0..1usize << indices.len()).map(|_| rng.gen()).collect();
            if let Ok(s) = JuntaSpec::new(dim, indices.clone(), table) {
                return s;
            }
        }
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    fn is_relevant(&self, k: usize) -> bool {
        let bit = 1usize << (self.indices.len() - 1 - k);
        (0..self.table.len()).any(|a| self.table[a] != self.table[a ^ bit])
    }

    /// The `J`-assignment of `x`.
    pub fn assignment(&self, x: BitPoint) -> usize {
        self.indices.iter().fold(0, |acc, &i| (acc << 1) | x.bit(i) as usize)
    }

    pub fn eval(&self, x: BitPoint) -> Label {
        self.table[self.assignment(x)] as Label
    }

    /// Full point with `J` set to `a` and every other coordinate 0.
    pub fn point(&self, a: usize) -> BitPoint {
        point_with(self.dim, &self.indices, a)
    }

    /// Table packed MSB-first into hex.
    pub fn table_hex(&self) -> String {
        hex::encode(pack_bits(&self.table))
    }

    pub fn from_hex(dim: u8, indices: Vec<u8>, hex_table: &str) -> Result<JuntaSpec> {
        let bytes = hex::decode(hex_table.trim()).map_err(|e| Error::param(format!("bad hex: {e}")))?;
        let n = 1usize << indices.len();
        if bytes.len() != n.div_ceil(8) {
            return Err(Error::param("junta table hex has the wrong length"));
        }
        JuntaSpec::new(dim, indices, unpack_bits(&bytes, n))
    }
}

/// `g` on `indices` with its irrelevant indices dropped; always valid.
pub fn reduced_junta(dim: u8, indices: &[u8], table: &[bool]) -> JuntaSpec {
    let mut idx = indices.to_vec();
    let mut t = table.to_vec();
    let mut k = 0;
    while k < idx.len() {
        let bit = 1usize << (idx.len() - 1 - k);
        if (0..t.len()).all(|a| t[a] == t[a ^ bit]) {
            t = (0..t.len()).filter(|a| a & bit == 0).map(|a| t[a]).collect();
            idx.remove(k);
        } else {
            k += 1;
        }
    }
    JuntaSpec { dim, indices: idx, table: t }
}

/// Exact uniform-distribution disagreement rate of `a` and `b`, from the
/// `2^{|J_a ∪ J_b|}` settings of their joint index set.
pub fn junta_distance(a: &JuntaSpec, b: &JuntaSpec) -> Rational {
    let j = union(&a.indices, &b.indices);
    let n = 1usize << j.len();
    let diff = (0..n).filter(|&s| {
        let x = point_with(a.dim, &j, s);
        a.eval(x) != b.eval(x)
    });
    Rational::from(diff.count() as u64) / Rational::from(n as u64)
}

pub(crate) fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

pub(crate) fn unpack_bits(bytes: &[u8], n: usize) -> Vec<bool> {
    (0..n).map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0).collect()
}

fn point_with(dim: u8, indices: &[u8], a: usize) -> BitPoint {
    let k = indices.len();
    let v = indices
        .iter()
        .enumerate()
        .filter(|(t, _)| a >> (k - 1 - t) & 1 == 1)
        .fold(0u64, |acc, (_, &i)| acc | 1 << (dim - 1 - i));
    BitPoint::full(dim, v)
}

fn union(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut j: Vec<u8> = a.iter().chain(b).copied().collect();
    j.sort_unstable();
    j.dedup();
    j
}

/// Counts `|{x ⊒ z : h0(x) ≠ h1(x)}|` for juntas without touching `2^d` points.
///
/// Only the `2^{|J0 ∪ J1|}` settings of the union are stored; each query scans
/// the settings consistent with `z` and scales by the free coordinates.
#[derive(Clone, Debug)]
pub struct JuntaSummer {
    dim: u8,
    jmask: u64,
    /// Point patterns (junta bits only) of the disagreeing settings.
    hits: Vec<u64>,
}

impl JuntaSummer {
    /// Build from the union index set and a labeling of junta settings.
    pub fn from_labels(dim: u8, j: &[u8], mut label: impl FnMut(BitPoint) -> (Label, Label)) -> JuntaSummer {
        let jmask = j.iter().fold(0u64, |m, &i| m | 1 << (dim - 1 - i));
        let hits = (0..1usize << j.len())
            .map(|a| point_with(dim, j, a))
            .filter(|&x| {
                let (a, b) = label(x);
                a != b
            })
            .map(|x| x.value())
            .collect();
        JuntaSummer { dim, jmask, hits }
    }

    pub fn from_specs(h0: &JuntaSpec, h1: &JuntaSpec) -> JuntaSummer {
        assert_eq!(h0.dim, h1.dim, "junta dimensions differ");
        let j = union(&h0.indices, &h1.indices);
        JuntaSummer::from_labels(h0.dim, &j, |x| (h0.eval(x), h1.eval(x)))
    }

    /// Points agreeing with `z` on its coordinates.
    pub fn count(&self, z: BitPoint) -> u64 {
        let free = (self.dim - z.len()) as u32;
        let full = if self.dim == 64 { u64::MAX } else { (1u64 << self.dim) - 1 };
        let zmask = full & !((1u64 << free) - 1);
        let zbits = z.value() << free;
        let fixed = self.jmask & zmask;
        let free_j = (self.jmask & !zmask).count_ones();
        let n = self.hits.iter().filter(|&&p| (p ^ zbits) & fixed == 0).count() as u64;
        n << (free - free_j)
    }

    /// Disagreement points extending `z` that are lexicographically below `pivot`.
    pub fn rank_below(&self, z: BitPoint, pivot: BitPoint) -> u64 {
        let mut total = 0;
        for k in 0..self.dim {
            if !pivot.bit(k) {
                continue;
            }
            let w = pivot.truncate(k).child(false);
            if z.is_prefix_of(&w) {
                total += self.count(w);
            } else if w.is_prefix_of(&z) {
                total += self.count(z);
            }
        }
        total
    }

    /// The `i`-th (1-based) disagreement point in lexicographic order.
    pub fn element(&self, mut i: u64) -> Option<BitPoint> {
        let mut z = BitPoint::empty(self.dim);
        if i == 0 || i > self.count(z) {
            return None;
        }
        while !z.is_full() {
            let c0 = self.count(z.child(false));
            if i <= c0 {
                z = z.child(false);
            } else {
                i -= c0;
                z = z.child(true);
            }
        }
        Some(z)
    }
}

impl SubcubeSummer for JuntaSummer {
    fn subcube_sum(&mut self, z: BitPoint) -> Rational {
        Rational::from(self.count(z))
    }
}

/// Witnesses `(i, x, x^{⊕i})` with `h(x) ≠ h(x^{⊕i})` for every junta index,
/// found from the `2^{|J|}` table.
pub fn junta_witnesses(dim: u8, indices: &[u8], h: &dyn Fn(BitPoint) -> Label) -> Vec<(u8, BitPoint)> {
    let k = indices.len();
    let g: Vec<Label> = (0..1usize << k).map(|a| h(point_with(dim, indices, a))).collect();
    let mut out = Vec::new();
    for (t, &i) in indices.iter().enumerate() {
        let bit = 1usize << (k - 1 - t);
        if let Some(a) = (0..g.len()).find(|&a| g[a] != g[a ^ bit]) {
            out.push((i, point_with(dim, indices, a)));
        }
    }
    out
}

/// Labels of `h_b` an honest prover evaluates in the junta protocol and
/// index discovery: every setting of `J0 ∪ J1` once (at most `2^{2j}`,
/// memoized) plus the `2^j` settings of its own junta for witnesses.
pub fn junta_prover_budget(j: u8) -> u64 {
    (1u64 << (2 * j)) + (1u64 << j)
}

/// Result of the junta protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JuntaOutcome {
    pub bit: u8,
    /// `|S|` as certified.
    pub set_size: u64,
    /// Empirical disagreements with `f` for `h0` and `h1`.
    pub errors: [u64; 2],
    pub samples: Vec<BitPoint>,
}

/// Refereed learning for juntas under the uniform distribution.
///
/// `|S|` comes from a certified sum of disagreement indicators; `m` uniform
/// indices of `S` are resolved through certified index over the
/// lexicographic order, and the hypothesis with fewer disagreements with `f`
/// on them wins (ties go to 0).
pub fn run_rlp_junta(s: &mut Session<'_>, eps: &Rational, beta: &Rational) -> Result<JuntaOutcome> {
    let d = s.dim();
    let size = crate::certsum::run_certsum(s, &SumTask::Disagreement, d as u32)?;
    if size.is_zero() {
        let bit = s.rng().gen_range(0..2u8);
        return Ok(JuntaOutcome { bit, set_size: 0, errors: [0, 0], samples: vec![] });
    }
    let n: u64 = num_traits::ToPrimitive::to_u64(&size.floor())
        .ok_or_else(|| Error::construction("set size does not fit u64"))?;
    let m = crate::rlp::Params::junta_samples(eps, beta);
    let mut samples = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let i = s.rng().gen_range(1..=n);
        samples.push(crate::certindex::run_certindex(s, &OrderedSet::Disagreement, i)?);
    }
    let errors = crate::rlp::count_errors(s, &samples)?;
    Ok(JuntaOutcome { bit: (errors[1] < errors[0]) as u8, set_size: n, errors, samples })
}

/// Verifier side of junta index discovery for `h_b`.
///
/// Each prover may send at most `2·j·d` candidates `(i, x, x')`; a candidate
/// is accepted when `x' = x^{⊕i}` and `h_b(x) ≠ h_b(x')`. Indices already
/// accepted are skipped without queries.
pub fn discover_junta_indices(s: &mut Session<'_>, b: usize, j: usize) -> Result<Vec<u8>> {
    let d = s.dim();
    let cap = 2 * j * d as usize;
    let mut found: Vec<u8> = Vec::new();
    for p in 0..2 {
        let msgs = s.prover_mut(p).junta_witnesses(b);
        for bytes in msgs.into_iter().take(cap) {
            let parsed = decode_all(&bytes);
            s.record(Party::prover(p), Party::Verifier, Channel::Protocol, bytes);
            let (i, x, y) = match parsed.as_deref() {
                Ok([Payload::Index(i), Payload::Point(x), Payload::Point(y)]) => (*i, *x, *y),
                _ => continue,
            };
            if i >= d as u64 || x.len() != d || y.len() != d {
                continue;
            }
            let i = i as u8;
            let (x, y) = (BitPoint::full(d, x.value()), BitPoint::full(d, y.value()));
            if y != x.flip(i) || found.contains(&i) {
                continue;
            }
            let hx = s.label(OracleId::h(b), x)?;
            let hy = s.label(OracleId::h(b), y)?;
            if hx != hy {
                found.push(i);
            }
        }
    }
    found.sort_unstable();
    Ok(found)
}

/// The planted-disagreement ensemble: `h0` a random junta on the first `j`
/// coordinates, `h1` equal to it except on one random setting, `f ∈ {h0, h1}`.
#[derive(Clone, Debug)]
pub struct PlantedEnsemble {
    pub h: [Arc<JuntaSpec>; 2],
    pub planted: usize,
    pub truth: u8,
}

impl PlantedEnsemble {
    pub fn sample(dim: u8, j: u8, rng: &mut impl Rng) -> PlantedEnsemble {
        let idx: Vec<u8> = (0..j).collect();
        loop {
            let h0 = JuntaSpec::random(dim, idx.clone(), rng);
            let planted = rng.gen_range(0..1usize << j);
            let mut t = h0.table.clone();
            t[planted] = !t[planted];
            // reject flips that make h1 depend on fewer coordinates
            if let Ok(h1) = JuntaSpec::new(dim, idx.clone(), t) {
                let truth = rng.gen_range(0..2u8);
                return PlantedEnsemble { h: [Arc::new(h0), Arc::new(h1)], planted, truth };
            }
        }
    }
}

/// A learner with no prover help: it tries `J`-settings in random order,
/// querying `h0` and `h1` until they disagree, then asks `f` there.
/// Returns `(output bit, total queries)`.
pub fn proverless_learner(e: &PlantedEnsemble, seed: u64) -> (u8, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = e.h[0].dim;
    let f = e.h[e.truth as usize].clone();
    let h0 = CountingOracle::from_fn("h0", {
        let h = e.h[0].clone();
        move |x| h.eval(x)
    });
    let h1 = CountingOracle::from_fn("h1", {
        let h = e.h[1].clone();
        move |x| h.eval(x)
    });
    let fo = CountingOracle::from_fn("f", move |x| f.eval(x));
    let mut order: Vec<usize> = (0..e.h[0].table.len()).collect();
    order.shuffle(&mut rng);
    let jmask = e.h[0].point(e.h[0].table.len() - 1).value();
    let mut bit = rng.gen_range(0..2u8);
    for a in order {
        // the non-junta coordinates are irrelevant, so fill them at random
        let noise = rng.gen::<u64>() & ((1u64 << dim) - 1) & !jmask;
        let x = BitPoint::full(dim, e.h[0].point(a).value() | noise);
        let (y0, y1) = (h0.query(x), h1.query(x));
        if y0 != y1 {
            bit = if fo.query(x) == y0 { 0 } else { 1 };
            break;
        }
    }
    (bit, h0.count() + h1.count() + fo.count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn and_versus_projection() {
        // h0 = x_1 ∧ x_2, h1 = x_1 (1-based), d = 8
        let h0 = JuntaSpec::new(8, vec![0, 1], vec![false, false, false, true]).unwrap();
        let h1 = JuntaSpec::new(8, vec![0], vec![false, true]).unwrap();
        let s = JuntaSummer::from_specs(&h0, &h1);
        assert_eq!(s.count(BitPoint::empty(8)), 64);
        assert_eq!(s.count(BitPoint::empty(8).child(false)), 0);
        assert_eq!(s.element(1).unwrap().to_string(), "10000000");
    }

    #[test]
    fn relevance_is_enforced() {
        assert!(JuntaSpec::new(4, vec![0, 2], vec![false, false, true, true]).is_err());
        assert!(JuntaSpec::new(4, vec![2, 0], vec![false, true, true, false]).is_err());
    }

    #[test]
    fn hex_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = JuntaSpec::random(10, vec![1, 4, 7], &mut rng);
        assert_eq!(JuntaSpec::from_hex(10, vec![1, 4, 7], &s.table_hex()).unwrap(), s);
    }
}
