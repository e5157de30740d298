//! The prover interface and the honest prover.
//!
//! Verifier-to-prover messages arrive as typed arguments (they are also
//! recorded, encoded, in the transcript); prover replies are raw bytes so a
//! malicious prover can send anything at all.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use num_traits::Zero;
use rustc_hash::FxHashMap;

use crate::encoding::{encode, encode_all, Payload};
use crate::error::{Error, Result};
use crate::juntas::{junta_witnesses, JuntaSummer};
use crate::metric::Metric;
use crate::oracle::{check_enumerable, FunctionSpec, OracleId};
use crate::point::BitPoint;
use crate::rational::Rational;
use crate::task::{support_cmp, task_value, Distribution, OrderedSet, SumTask};
use crate::instance::World;

pub trait Prover {
    /// Claim `(T_z, T_{z0}, T_{z1})` for the prefix `z` of the task.
    fn claim_sum(&mut self, task: &SumTask, z: BitPoint) -> Vec<u8>;
    /// Pick the half of a forwarded claim to recurse on.
    fn challenge_sum(&mut self, task: &SumTask, z: BitPoint, claim: &[Rational]) -> Vec<u8>;
    /// Claim the `i`-th (1-based) element of the set.
    fn claim_index(&mut self, set: &OrderedSet, i: u64) -> Vec<u8>;
    /// Answer a delegated oracle query.
    fn answer_query(&mut self, id: OracleId, x: BitPoint) -> Vec<u8>;
    /// Candidate witnesses `(i, x, x^{⊕i})` for the junta indices of `h_b`.
    fn junta_witnesses(&mut self, b: usize) -> Vec<Vec<u8>>;
    /// Real oracle evaluations so far, by oracle name.
    fn queries(&self) -> BTreeMap<String, u64>;
    /// An internal failure (e.g. a domain too large to enumerate), if any.
    fn take_fault(&mut self) -> Option<Error>;
}

/// Subcube sums for every prefix, stored level by level.
#[derive(Debug)]
enum SumTree {
    Count(Vec<Vec<u64>>),
    Exact(Vec<Vec<Rational>>),
}

impl SumTree {
    fn exact(leaves: Vec<Rational>) -> SumTree {
        let mut levels = vec![leaves];
        while levels[0].len() > 1 {
            let up = levels[0].chunks(2).map(|c| &c[0] + &c[1]).collect();
            levels.insert(0, up);
        }
        SumTree::Exact(levels)
    }

    fn count(leaves: Vec<u64>) -> SumTree {
        let mut levels = vec![leaves];
        while levels[0].len() > 1 {
            let up = levels[0].chunks(2).map(|c| c[0] + c[1]).collect();
            levels.insert(0, up);
        }
        SumTree::Count(levels)
    }

    fn get(&self, z: BitPoint) -> Rational {
        let (k, v) = (z.len() as usize, z.value() as usize);
        match self {
            SumTree::Count(l) => Rational::from(l[k][v]),
            SumTree::Exact(l) => l[k][v].clone(),
        }
    }
}

/// Ranks of the members of an ordered set, with a merge-sort tree answering
/// "members of subcube `z` with rank below `r`" in `O(log |S|)`.
#[derive(Debug)]
struct SetTable {
    members: Vec<u64>,
    rank: Vec<u32>,
    levels: Vec<Vec<u32>>,
    offsets: Vec<Vec<u32>>,
}

const NOT_MEMBER: u32 = u32::MAX;

impl SetTable {
    fn new(dim: u8, members: Vec<u64>) -> SetTable {
        let n = 1usize << dim;
        let mut rank = vec![NOT_MEMBER; n];
        for (r, &x) in members.iter().enumerate() {
            rank[x as usize] = r as u32;
        }
        let mut levels = vec![Vec::new(); dim as usize + 1];
        let mut offsets = vec![Vec::new(); dim as usize + 1];
        let leaf_off: Vec<u32> = std::iter::once(0)
            .chain(rank.iter().scan(0u32, |acc, &r| {
                *acc += (r != NOT_MEMBER) as u32;
                Some(*acc)
            }))
            .collect();
        levels[dim as usize] = rank.iter().copied().filter(|&r| r != NOT_MEMBER).collect();
        offsets[dim as usize] = leaf_off;
        for k in (0..dim as usize).rev() {
            let (child, off) = (&levels[k + 1], &offsets[k + 1]);
            let nodes = 1usize << k;
            let mut lv = Vec::with_capacity(child.len());
            let mut of = Vec::with_capacity(nodes + 1);
            of.push(0);
            for z in 0..nodes {
                let a = &child[off[2 * z] as usize..off[2 * z + 1] as usize];
                let b = &child[off[2 * z + 1] as usize..off[2 * z + 2] as usize];
                merge_into(&mut lv, a, b);
                of.push(lv.len() as u32);
            }
            levels[k] = lv;
            offsets[k] = of;
        }
        SetTable { members, rank, levels, offsets }
    }

    fn rank_of(&self, x: BitPoint) -> Option<u32> {
        let r = self.rank[x.value() as usize];
        (r != NOT_MEMBER).then_some(r)
    }

    fn count_below(&self, z: BitPoint, r: u32) -> u64 {
        let (k, v) = (z.len() as usize, z.value() as usize);
        let off = &self.offsets[k];
        let s = &self.levels[k][off[v] as usize..off[v + 1] as usize];
        s.partition_point(|&x| x < r) as u64
    }
}

fn merge_into(out: &mut Vec<u32>, a: &[u32], b: &[u32]) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// An honestly computed answer to a delegated query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Label(u32),
    Mass(Rational),
}

impl Answer {
    pub fn encode(&self) -> Vec<u8> {
        match self {
            Answer::Label(y) => encode(&Payload::Index(*y as u64)),
            Answer::Mass(p) => encode(&Payload::Rational(p.clone())),
        }
    }
}

const TREE_CACHE: usize = 6;

/// Follows the protocols exactly, with exhaustive tables over `{0,1}^d`
/// (bounded by the enumeration cap) and a junta fast path when both
/// hypotheses are juntas.
pub struct HonestProver {
    world: World,
    dists: FxHashMap<Distribution, Arc<Vec<Rational>>>,
    sets: FxHashMap<OrderedSet, Arc<SetTable>>,
    trees: VecDeque<(SumTask, Arc<SumTree>)>,
    junta: Option<Option<Arc<JuntaSummer>>>,
    fault: Option<Error>,
}

impl HonestProver {
    pub fn new(world: World) -> HonestProver {
        HonestProver {
            world,
            dists: FxHashMap::default(),
            sets: FxHashMap::default(),
            trees: VecDeque::new(),
            junta: None,
            fault: None,
        }
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn world_mut(&mut self) -> &mut World {
        &mut self.world
    }

    fn dim(&self) -> u8 {
        crate::task::OracleAccess::dim(&self.world)
    }

    /// Junta summer built from `2^{|J0 ∪ J1|}` queries to each hypothesis.
    fn junta(&mut self) -> Option<Arc<JuntaSummer>> {
        if self.junta.is_none() {
            let built = match (self.world.spec(OracleId::H0), self.world.spec(OracleId::H1)) {
                (FunctionSpec::Junta(a), FunctionSpec::Junta(b)) => {
                    let mut j: Vec<u8> = a.indices().iter().chain(b.indices()).copied().collect();
                    j.sort_unstable();
                    j.dedup();
                    let dim = self.dim();
                    let w = &mut self.world;
                    Some(Arc::new(JuntaSummer::from_labels(dim, &j, |x| {
                        (w.query_label(OracleId::H0, x), w.query_label(OracleId::H1, x))
                    })))
                }
                _ => None,
            };
            self.junta = Some(built);
        }
        self.junta.clone().flatten()
    }

    /// Mass table of a distribution over all of `{0,1}^d`.
    fn dist_table(&mut self, dist: &Distribution) -> Result<Arc<Vec<Rational>>> {
        if let Some(t) = self.dists.get(dist) {
            return Ok(t.clone());
        }
        let dim = self.dim();
        check_enumerable(dim)?;
        let pts = || BitPoint::all(dim);
        let table: Vec<Rational> = match dist {
            Distribution::Base => pts().map(|x| self.world.query_mass(x)).collect(),
            Distribution::Uniform => vec![Rational::pow2(-(dim as i64)); 1 << dim],
            Distribution::Restricted { inner, mass } => {
                let t = self.dist_table(inner)?;
                let inv = mass.recip();
                pts()
                    .map(|x| if self.disagree(x) { &t[x.value() as usize] * &inv } else { Rational::zero() })
                    .collect()
            }
            Distribution::LossRescaled { inner, metric, mu } => {
                let t = self.dist_table(inner)?;
                let inv = mu.recip();
                pts()
                    .map(|x| {
                        let l = self.pair_loss(metric, x);
                        if l.is_zero() {
                            l
                        } else {
                            &t[x.value() as usize] * l * &inv
                        }
                    })
                    .collect()
            }
            Distribution::Rounded { inner, lambda, total } => {
                let t = self.dist_table(inner)?;
                let inv = total.recip();
                t.iter().map(|p| p.floor_lambda(*lambda) * &inv).collect()
            }
        };
        let table = Arc::new(table);
        self.dists.insert(dist.clone(), table.clone());
        Ok(table)
    }

    fn disagree(&mut self, x: BitPoint) -> bool {
        self.world.query_label(OracleId::H0, x) != self.world.query_label(OracleId::H1, x)
    }

    fn pair_loss(&mut self, metric: &Metric, x: BitPoint) -> Rational {
        let y0 = self.world.query_label(OracleId::H0, x);
        let y1 = self.world.query_label(OracleId::H1, x);
        metric.eval(y0, y1)
    }

    fn set_table(&mut self, set: &OrderedSet) -> Result<Arc<SetTable>> {
        if let Some(t) = self.sets.get(set) {
            return Ok(t.clone());
        }
        let dim = self.dim();
        check_enumerable(dim)?;
        let members: Vec<u64> = match set {
            OrderedSet::Support(dist) => {
                let t = self.dist_table(dist)?;
                let mut m: Vec<u64> = (0..t.len() as u64).filter(|&i| t[i as usize].is_positive()).collect();
                m.sort_by(|&a, &b| {
                    support_cmp(&t[a as usize], BitPoint::full(dim, a), &t[b as usize], BitPoint::full(dim, b))
                });
                m
            }
            OrderedSet::Disagreement => {
                BitPoint::all(dim).filter(|&x| self.disagree(x)).map(|x| x.value()).collect()
            }
            OrderedSet::Custom(s) => {
                let mut m: Vec<BitPoint> = Vec::new();
                for x in BitPoint::all(dim) {
                    if crate::task::OracleAccess::member(&mut self.world, s, x)? {
                        m.push(x);
                    }
                }
                let w = &mut self.world;
                m.sort_by(|&a, &b| {
                    if a == b {
                        std::cmp::Ordering::Equal
                    } else if crate::task::OracleAccess::less(w, s, a, b).unwrap_or(false) {
                        std::cmp::Ordering::Less
                    } else {
                        std::cmp::Ordering::Greater
                    }
                });
                m.into_iter().map(|x| x.value()).collect()
            }
        };
        let t = Arc::new(SetTable::new(dim, members));
        self.sets.insert(set.clone(), t.clone());
        Ok(t)
    }

    fn tree(&mut self, task: &SumTask) -> Result<Arc<SumTree>> {
        if let Some(pos) = self.trees.iter().position(|(t, _)| t == task) {
            let entry = self.trees.remove(pos).unwrap();
            let tree = entry.1.clone();
            self.trees.push_front(entry);
            return Ok(tree);
        }
        let dim = self.dim();
        check_enumerable(dim)?;
        let tree = match task {
            SumTask::Support(dist) => {
                let t = self.dist_table(dist)?;
                SumTree::count(t.iter().map(|p| p.is_positive() as u64).collect())
            }
            SumTask::Disagreement => SumTree::count(BitPoint::all(dim).map(|x| self.disagree(x) as u64).collect()),
            SumTask::FlooredMass { dist, lambda } => {
                let t = self.dist_table(dist)?;
                SumTree::exact(t.iter().map(|p| p.floor_lambda(*lambda)).collect())
            }
            SumTask::DisagreementMass(dist) => {
                let t = self.dist_table(dist)?;
                SumTree::exact(
                    BitPoint::all(dim)
                        .map(|x| if self.disagree(x) { t[x.value() as usize].clone() } else { Rational::zero() })
                        .collect(),
                )
            }
            SumTask::LossMass { dist, metric } => {
                let t = self.dist_table(dist)?;
                SumTree::exact(BitPoint::all(dim).map(|x| self.pair_loss(metric, x) * &t[x.value() as usize]).collect())
            }
            SumTask::BucketMass { dist, first, last } => {
                let t = self.dist_table(dist)?;
                let st = self.set_table(&OrderedSet::Support(dist.clone()))?;
                match (st.rank_of(*first), st.rank_of(*last)) {
                    (Some(a), Some(b)) => {
                        let mut leaves = vec![Rational::zero(); t.len()];
                        for &x in st.members.get(a as usize..=b as usize).unwrap_or(&[]) {
                            leaves[x as usize] = t[x as usize].clone();
                        }
                        SumTree::exact(leaves)
                    }
                    _ => self.generic_tree(task)?,
                }
            }
            SumTask::RankBelow { .. } | SumTask::Custom(_) => self.generic_tree(task)?,
        };
        let tree = Arc::new(tree);
        self.trees.push_front((task.clone(), tree.clone()));
        self.trees.truncate(TREE_CACHE);
        Ok(tree)
    }

    fn generic_tree(&mut self, task: &SumTask) -> Result<SumTree> {
        let dim = self.dim();
        let leaves = BitPoint::all(dim).map(|x| task_value(&mut self.world, task, x)).collect::<Result<Vec<_>>>()?;
        Ok(SumTree::exact(leaves))
    }

    /// `T_z = Σ_{x ⊒ z} t(x)` as this prover sees it.
    pub fn subcube_sum(&mut self, task: &SumTask, z: BitPoint) -> Result<Rational> {
        match task {
            SumTask::Disagreement => {
                if let Some(j) = self.junta() {
                    return Ok(Rational::from(j.count(z)));
                }
            }
            SumTask::RankBelow { set, pivot } => {
                if *set == OrderedSet::Disagreement {
                    if let Some(j) = self.junta() {
                        return Ok(Rational::from(j.rank_below(z, *pivot)));
                    }
                }
                let st = self.set_table(set)?;
                if let Some(r) = st.rank_of(*pivot) {
                    return Ok(Rational::from(st.count_below(z, r)));
                }
            }
            _ => {}
        }
        Ok(self.tree(task)?.get(z))
    }

    /// The `i`-th (1-based) element of the set, if it exists.
    pub fn element(&mut self, set: &OrderedSet, i: u64) -> Result<Option<BitPoint>> {
        if *set == OrderedSet::Disagreement {
            if let Some(j) = self.junta() {
                return Ok(j.element(i));
            }
        }
        let dim = self.dim();
        let st = self.set_table(set)?;
        Ok(i.checked_sub(1).and_then(|k| st.members.get(k as usize)).map(|&v| BitPoint::full(dim, v)))
    }

    /// Set size as this prover sees it.
    pub fn set_size(&mut self, set: &OrderedSet) -> Result<u64> {
        if *set == OrderedSet::Disagreement {
            if let Some(j) = self.junta() {
                return Ok(j.count(BitPoint::empty(self.dim())));
            }
        }
        Ok(self.set_table(set)?.members.len() as u64)
    }

    pub fn answer(&mut self, id: OracleId, x: BitPoint) -> Answer {
        match id {
            OracleId::Pmf => Answer::Mass(self.world.query_mass(x)),
            _ => Answer::Label(self.world.query_label(id, x)),
        }
    }

    /// Honest claim triple.
    pub fn claim(&mut self, task: &SumTask, z: BitPoint) -> Result<[Rational; 3]> {
        if z.is_full() {
            return Err(Error::construction("claim requested for a full point"));
        }
        let t0 = self.subcube_sum(task, z.child(false))?;
        let t1 = self.subcube_sum(task, z.child(true))?;
        Ok([&t0 + &t1, t0, t1])
    }

    /// Honest challenge: the first wrong half, or 0 when both are right.
    pub fn challenge(&mut self, task: &SumTask, z: BitPoint, claim: &[Rational]) -> Result<bool> {
        if claim.len() != 3 {
            return Ok(false);
        }
        let t0 = self.subcube_sum(task, z.child(false))?;
        if claim[1] != t0 {
            return Ok(false);
        }
        let t1 = self.subcube_sum(task, z.child(true))?;
        Ok(claim[2] != t1)
    }

    /// `(i, x)` with `h_b(x) ≠ h_b(x^{⊕i})` for each junta index of `h_b`.
    pub fn witnesses(&mut self, b: usize) -> Vec<(u8, BitPoint)> {
        let id = OracleId::h(b);
        let spec = match self.world.spec(id).as_junta() {
            Some(j) => j.clone(),
            None => return Vec::new(),
        };
        let w = std::cell::RefCell::new(&mut self.world);
        junta_witnesses(spec.dim(), spec.indices(), &|x| w.borrow_mut().query_label(id, x))
    }

    fn record_fault<T>(&mut self, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fault.get_or_insert(e);
                None
            }
        }
    }
}

pub(crate) fn encode_claim(c: &[Rational; 3]) -> Vec<u8> {
    encode_all(&[Payload::Rational(c[0].clone()), Payload::Rational(c[1].clone()), Payload::Rational(c[2].clone())])
}

pub(crate) fn encode_witness(i: u8, x: BitPoint) -> Vec<u8> {
    encode_all(&[Payload::Index(i as u64), Payload::Point(x), Payload::Point(x.flip(i))])
}

impl Prover for HonestProver {
    fn claim_sum(&mut self, task: &SumTask, z: BitPoint) -> Vec<u8> {
        let r = self.claim(task, z);
        self.record_fault(r).map(|c| encode_claim(&c)).unwrap_or_default()
    }

    fn challenge_sum(&mut self, task: &SumTask, z: BitPoint, claim: &[Rational]) -> Vec<u8> {
        let r = self.challenge(task, z, claim);
        let j = self.record_fault(r).unwrap_or(false);
        encode(&Payload::Bit(j))
    }

    fn claim_index(&mut self, set: &OrderedSet, i: u64) -> Vec<u8> {
        let r = self.element(set, i);
        match self.record_fault(r).flatten() {
            Some(x) => encode(&Payload::Point(x)),
            None => Vec::new(),
        }
    }

    fn answer_query(&mut self, id: OracleId, x: BitPoint) -> Vec<u8> {
        self.answer(id, x).encode()
    }

    fn junta_witnesses(&mut self, b: usize) -> Vec<Vec<u8>> {
        self.witnesses(b).into_iter().map(|(i, x)| encode_witness(i, x)).collect()
    }

    fn queries(&self) -> BTreeMap<String, u64> {
        self.world.counts()
    }

    fn take_fault(&mut self) -> Option<Error> {
        self.fault.take()
    }
}
