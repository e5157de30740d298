//! Descriptions of the functions, distributions and ordered sets that the
//! verifier asks the provers about.
//!
//! Every descriptor is plain data. Verifier and provers evaluate them
//! against their own oracle access ([`OracleAccess`]), so a prover with a
//! different view of `f` or `D` answers from that view, and every oracle
//! touch is counted on whichever side made it.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::Result;
use crate::metric::Metric;
use crate::oracle::{Label, OracleId};
use crate::point::BitPoint;
use crate::rational::Rational;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, AtomicOrdering::Relaxed)
}

/// An arbitrary summand `t: {0,1}^d → Q`, identified by a unique id.
#[derive(Clone)]
pub struct CustomFn {
    pub name: &'static str,
    id: u64,
    f: Arc<dyn Fn(BitPoint) -> Rational + Send + Sync>,
}

impl CustomFn {
    pub fn new(name: &'static str, f: impl Fn(BitPoint) -> Rational + Send + Sync + 'static) -> CustomFn {
        CustomFn { name, id: fresh_id(), f: Arc::new(f) }
    }

    /// Backed by a table indexed by the packed point.
    pub fn table(name: &'static str, values: Vec<Rational>) -> CustomFn {
        CustomFn::new(name, move |x| values[x.value() as usize].clone())
    }

    pub fn eval(&self, x: BitPoint) -> Rational {
        (self.f)(x)
    }
}

impl PartialEq for CustomFn {
    fn eq(&self, other: &CustomFn) -> bool {
        self.id == other.id
    }
}

impl Eq for CustomFn {}

impl Hash for CustomFn {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.id.hash(h)
    }
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomFn({}#{})", self.name, self.id)
    }
}

type MemberFn = Arc<dyn Fn(BitPoint) -> bool + Send + Sync>;
type LessFn = Arc<dyn Fn(BitPoint, BitPoint) -> bool + Send + Sync>;

/// Membership and strict total order oracles for an arbitrary set.
#[derive(Clone)]
pub struct CustomSet {
    pub name: &'static str,
    id: u64,
    member: MemberFn,
    less: LessFn,
}

impl CustomSet {
    pub fn new(
        name: &'static str,
        member: impl Fn(BitPoint) -> bool + Send + Sync + 'static,
        less: impl Fn(BitPoint, BitPoint) -> bool + Send + Sync + 'static,
    ) -> CustomSet {
        CustomSet { name, id: fresh_id(), member: Arc::new(member), less: Arc::new(less) }
    }

    /// A set given by a membership table, ordered lexicographically.
    pub fn lex(name: &'static str, members: Vec<bool>) -> CustomSet {
        CustomSet::new(name, move |x| members[x.value() as usize], |x, y| x < y)
    }

    pub fn member(&self, x: BitPoint) -> bool {
        (self.member)(x)
    }

    pub fn less(&self, x: BitPoint, y: BitPoint) -> bool {
        (self.less)(x, y)
    }
}

impl PartialEq for CustomSet {
    fn eq(&self, other: &CustomSet) -> bool {
        self.id == other.id
    }
}

impl Eq for CustomSet {}

impl Hash for CustomSet {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.id.hash(h)
    }
}

impl fmt::Debug for CustomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomSet({}#{})", self.name, self.id)
    }
}

/// A distribution over `{0,1}^d`, given through its mass function.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Distribution {
    /// The instance's `Q_D`.
    Base,
    Uniform,
    /// `D|_S` for `S = {h0 ≠ h1}`; `mass` is `D(S)`.
    Restricted { inner: Box<Distribution>, mass: Rational },
    /// `D(x)·ℓ(h0(x), h1(x)) / μ`.
    LossRescaled { inner: Box<Distribution>, metric: Metric, mu: Rational },
    /// `⌊D(x)⌋_λ / T`.
    Rounded { inner: Box<Distribution>, lambda: u32, total: Rational },
}

impl Distribution {
    pub fn restricted(self, mass: Rational) -> Distribution {
        Distribution::Restricted { inner: Box::new(self), mass }
    }

    pub fn loss_rescaled(self, metric: Metric, mu: Rational) -> Distribution {
        Distribution::LossRescaled { inner: Box::new(self), metric, mu }
    }

    pub fn rounded(self, lambda: u32, total: Rational) -> Distribution {
        Distribution::Rounded { inner: Box::new(self), lambda, total }
    }
}

/// An ordered subset of `{0,1}^d` for certified index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OrderedSet {
    Custom(CustomSet),
    /// The support of a distribution, by decreasing mass then ascending lex.
    Support(Distribution),
    /// `{h0 ≠ h1}` in lexicographic order.
    Disagreement,
}

/// A summand `t` for certified sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SumTask {
    Custom(CustomFn),
    /// `⌊D(x)⌋_λ`.
    FlooredMass { dist: Distribution, lambda: u32 },
    /// `Ind[D(x) > 0]`.
    Support(Distribution),
    /// `D(x)·Ind[x ∈ supp D ∧ first ⪯ x ⪯ last]` in the support order.
    BucketMass { dist: Distribution, first: BitPoint, last: BitPoint },
    /// `Ind[x ∈ S ∧ x ≺ pivot]`.
    RankBelow { set: OrderedSet, pivot: BitPoint },
    /// `Ind[h0(x) ≠ h1(x)]`.
    Disagreement,
    /// `Ind[h0(x) ≠ h1(x)]·D(x)`.
    DisagreementMass(Distribution),
    /// `ℓ(h0(x), h1(x))·D(x)`.
    LossMass { dist: Distribution, metric: Metric },
}

impl SumTask {
    /// Whether every value is a non-negative integer.
    pub fn is_counting(&self) -> bool {
        matches!(self, SumTask::Support(_) | SumTask::RankBelow { .. } | SumTask::Disagreement)
    }
}

/// Oracle access as seen by one party.
pub trait OracleAccess {
    fn dim(&self) -> u8;
    fn label(&mut self, id: OracleId, x: BitPoint) -> Result<Label>;
    fn mass(&mut self, x: BitPoint) -> Result<Rational>;
    fn custom(&mut self, t: &CustomFn, x: BitPoint) -> Result<Rational>;
    fn member(&mut self, s: &CustomSet, x: BitPoint) -> Result<bool>;
    fn less(&mut self, s: &CustomSet, x: BitPoint, y: BitPoint) -> Result<bool>;
}

fn disagree<A: OracleAccess + ?Sized>(a: &mut A, x: BitPoint) -> Result<bool> {
    Ok(a.label(OracleId::H0, x)? != a.label(OracleId::H1, x)?)
}

fn pair_loss<A: OracleAccess + ?Sized>(a: &mut A, metric: &Metric, x: BitPoint) -> Result<Rational> {
    let y0 = a.label(OracleId::H0, x)?;
    let y1 = a.label(OracleId::H1, x)?;
    Ok(metric.eval(y0, y1))
}

/// Mass of `x` under `dist`.
pub fn dist_mass<A: OracleAccess + ?Sized>(a: &mut A, dist: &Distribution, x: BitPoint) -> Result<Rational> {
    Ok(match dist {
        Distribution::Base => a.mass(x)?,
        Distribution::Uniform => Rational::pow2(-(a.dim() as i64)),
        Distribution::Restricted { inner, mass } => {
            if disagree(a, x)? {
                dist_mass(a, inner, x)? / mass
            } else {
                Rational::zero()
            }
        }
        Distribution::LossRescaled { inner, metric, mu } => {
            let l = pair_loss(a, metric, x)?;
            if l.is_zero() {
                l
            } else {
                dist_mass(a, inner, x)? * l / mu
            }
        }
        Distribution::Rounded { inner, lambda, total } => dist_mass(a, inner, x)?.floor_lambda(*lambda) / total,
    })
}

/// The support order: decreasing mass, then ascending lexicographic.
pub fn support_cmp(mx: &Rational, x: BitPoint, my: &Rational, y: BitPoint) -> Ordering {
    my.cmp(mx).then(x.cmp(&y))
}

pub fn set_member<A: OracleAccess + ?Sized>(a: &mut A, set: &OrderedSet, x: BitPoint) -> Result<bool> {
    match set {
        OrderedSet::Custom(s) => a.member(s, x),
        OrderedSet::Support(d) => Ok(dist_mass(a, d, x)?.is_positive()),
        OrderedSet::Disagreement => disagree(a, x),
    }
}

pub fn set_less<A: OracleAccess + ?Sized>(a: &mut A, set: &OrderedSet, x: BitPoint, y: BitPoint) -> Result<bool> {
    match set {
        OrderedSet::Custom(s) => a.less(s, x, y),
        OrderedSet::Support(d) => {
            let mx = dist_mass(a, d, x)?;
            let my = dist_mass(a, d, y)?;
            Ok(support_cmp(&mx, x, &my, y) == Ordering::Less)
        }
        OrderedSet::Disagreement => Ok(x < y),
    }
}

fn indicator(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// `t(x)` for a task.
pub fn task_value<A: OracleAccess + ?Sized>(a: &mut A, task: &SumTask, x: BitPoint) -> Result<Rational> {
    Ok(match task {
        SumTask::Custom(t) => a.custom(t, x)?,
        SumTask::FlooredMass { dist, lambda } => dist_mass(a, dist, x)?.floor_lambda(*lambda),
        SumTask::Support(d) => indicator(dist_mass(a, d, x)?.is_positive()),
        SumTask::BucketMass { dist, first, last } => {
            let v = dist_mass(a, dist, x)?;
            if !v.is_positive() {
                return Ok(Rational::zero());
            }
            let mf = dist_mass(a, dist, *first)?;
            let ml = dist_mass(a, dist, *last)?;
            let inside = support_cmp(&mf, *first, &v, x) != Ordering::Greater
                && support_cmp(&v, x, &ml, *last) != Ordering::Greater;
            if inside {
                v
            } else {
                Rational::zero()
            }
        }
        SumTask::RankBelow { set, pivot } => {
            indicator(set_member(a, set, x)? && set_less(a, set, x, *pivot)?)
        }
        SumTask::Disagreement => indicator(disagree(a, x)?),
        SumTask::DisagreementMass(d) => {
            if disagree(a, x)? {
                dist_mass(a, d, x)?
            } else {
                Rational::zero()
            }
        }
        SumTask::LossMass { dist, metric } => {
            let l = pair_loss(a, metric, x)?;
            if l.is_zero() {
                l
            } else {
                l * dist_mass(a, dist, x)?
            }
        }
    })
}
