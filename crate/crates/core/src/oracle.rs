//! Query-counted oracles and the function/PMF descriptions behind them.

use std::cell::Cell;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::juntas::JuntaSpec;
use crate::point::BitPoint;
use crate::rational::Rational;
use crate::sat::Cnf;

/// A range value `y ∈ {0, …, K-1}`.
pub type Label = u32;

pub const DEFAULT_ENUM_CAP: u8 = 16;

/// Largest dimension exact enumeration will touch; `RL_ENUM_CAP` overrides.
pub fn enum_cap() -> u8 {
    static CAP: OnceLock<u8> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("RL_ENUM_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ENUM_CAP)
    })
}

pub fn check_enumerable(dim: u8) -> Result<()> {
    let cap = enum_cap();
    if dim > cap {
        return Err(Error::EnumerationCap { dim, cap });
    }
    Ok(())
}

/// The four oracles a protocol may touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OracleId {
    F,
    H0,
    H1,
    Pmf,
}

impl OracleId {
    pub fn h(b: usize) -> OracleId {
        if b == 0 {
            OracleId::H0
        } else {
            OracleId::H1
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OracleId::F => "f",
            OracleId::H0 => "h0",
            OracleId::H1 => "h1",
            OracleId::Pmf => "pmf",
        }
    }
}

pub type LabelFn = Arc<dyn Fn(BitPoint) -> Label + Send + Sync>;

/// A deterministic function `{0,1}^d → Y`.
#[derive(Clone)]
pub enum FunctionSpec {
    /// Values indexed by the packed point.
    Table(Arc<Vec<Label>>),
    Junta(Arc<JuntaSpec>),
    /// Boolean formula; 1 when satisfied.
    Cnf(Arc<Cnf>),
    Const(Label),
    Custom(&'static str, LabelFn),
}

impl FunctionSpec {
    pub fn table(values: Vec<Label>) -> FunctionSpec {
        FunctionSpec::Table(Arc::new(values))
    }

    pub fn eval(&self, x: BitPoint) -> Label {
        match self {
            FunctionSpec::Table(t) => t[x.value() as usize],
            FunctionSpec::Junta(j) => j.eval(x),
            FunctionSpec::Cnf(c) => c.eval(x) as Label,
            FunctionSpec::Const(c) => *c,
            FunctionSpec::Custom(_, f) => f(x),
        }
    }

    pub fn as_junta(&self) -> Option<&JuntaSpec> {
        match self {
            FunctionSpec::Junta(j) => Some(j),
            _ => None,
        }
    }

    /// Full truth table. Requires an enumerable dimension.
    pub fn truth_table(&self, dim: u8) -> Result<Vec<Label>> {
        check_enumerable(dim)?;
        Ok(BitPoint::all(dim).map(|x| self.eval(x)).collect())
    }

    pub fn evaluator(&self) -> LabelFn {
        let me = self.clone();
        Arc::new(move |x| me.eval(x))
    }
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Table(t) => write!(f, "Table({} entries)", t.len()),
            FunctionSpec::Junta(j) => write!(f, "Junta({:?})", j.indices()),
            FunctionSpec::Cnf(c) => write!(f, "Cnf({} clauses)", c.clauses.len()),
            FunctionSpec::Const(c) => write!(f, "Const({c})"),
            FunctionSpec::Custom(name, _) => write!(f, "Custom({name})"),
        }
    }
}

/// A probability mass function over `{0,1}^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PmfSpec {
    Uniform,
    Table(Arc<Vec<Rational>>),
}

impl PmfSpec {
    pub fn table(values: Vec<Rational>) -> PmfSpec {
        PmfSpec::Table(Arc::new(values))
    }

    pub fn eval(&self, x: BitPoint) -> Rational {
        match self {
            PmfSpec::Uniform => Rational::pow2(-(x.dim() as i64)),
            PmfSpec::Table(t) => t[x.value() as usize].clone(),
        }
    }

    /// Explicit table; requires an enumerable dimension.
    pub fn to_table(&self, dim: u8) -> Result<Vec<Rational>> {
        check_enumerable(dim)?;
        Ok(BitPoint::all(dim).map(|x| self.eval(x)).collect())
    }

    /// Smallest λ such that every mass is λ-precise (uniform: `d`).
    pub fn precision(&self, dim: u8) -> u32 {
        match self {
            PmfSpec::Uniform => dim as u32,
            PmfSpec::Table(t) => t.iter().map(precise_bits).max().unwrap_or(0),
        }
    }

    pub fn check_normalized(&self, dim: u8) -> Result<()> {
        if let PmfSpec::Table(t) = self {
            if t.len() as u64 != 1u64 << dim {
                return Err(Error::param(format!("pmf has {} entries, expected {}", t.len(), 1u64 << dim)));
            }
            if t.iter().any(|p| p.is_negative()) {
                return Err(Error::param("pmf has a negative mass"));
            }
            let total: Rational = t.iter().sum();
            if total != Rational::from(1u32) {
                return Err(Error::param(format!("pmf sums to {total}, not 1")));
            }
        }
        Ok(())
    }
}

/// Least λ with `max(|p|, q) <= 2^λ`.
pub fn precise_bits(r: &Rational) -> u32 {
    let mut l = r.bits().saturating_sub(1) as u32;
    while !r.is_lambda_precise(l) {
        l += 1;
    }
    l
}

/// Query access to a deterministic evaluator, counting every evaluation.
pub struct CountingOracle<A> {
    name: String,
    eval: Arc<dyn Fn(BitPoint) -> A + Send + Sync>,
    count: Cell<u64>,
}

impl<A> CountingOracle<A> {
    pub fn new(name: impl Into<String>, eval: Arc<dyn Fn(BitPoint) -> A + Send + Sync>) -> Self {
        CountingOracle { name: name.into(), eval, count: Cell::new(0) }
    }

    pub fn from_fn(name: impl Into<String>, f: impl Fn(BitPoint) -> A + Send + Sync + 'static) -> Self {
        CountingOracle::new(name, Arc::new(f))
    }

    pub fn query(&self, x: BitPoint) -> A {
        self.count.set(self.count.get() + 1);
        (self.eval)(x)
    }

    pub fn count(&self) -> u64 {
        self.count.get()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Same evaluator with a fresh counter.
    pub fn fork(&self) -> Self {
        CountingOracle { name: self.name.clone(), eval: self.eval.clone(), count: Cell::new(0) }
    }
}

impl CountingOracle<Label> {
    pub fn function(name: impl Into<String>, spec: &FunctionSpec) -> Self {
        CountingOracle::new(name, spec.evaluator())
    }
}

impl CountingOracle<Rational> {
    pub fn pmf(spec: &PmfSpec) -> Self {
        let spec = spec.clone();
        CountingOracle::from_fn("pmf", move |x| spec.eval(x))
    }
}

impl<A> fmt::Debug for CountingOracle<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CountingOracle({}, count={})", self.name, self.count.get())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_every_evaluation() {
        let o = CountingOracle::from_fn("g", |x: BitPoint| x.value() as Label);
        assert_eq!(o.count(), 0);
        for v in 0..5 {
            assert_eq!(o.query(BitPoint::full(3, v)), v as Label);
        }
        o.query(BitPoint::full(3, 0));
        assert_eq!(o.count(), 6);
        assert_eq!(o.fork().count(), 0);
    }

    #[test]
    fn pmf_precision() {
        let p = PmfSpec::table(vec![Rational::ratio(1, 4), Rational::ratio(3, 4)]);
        assert_eq!(p.precision(1), 2);
        assert_eq!(PmfSpec::Uniform.precision(5), 5);
        assert_eq!(precise_bits(&Rational::ratio(1, 3)), 2);
        assert!(p.check_normalized(1).is_ok());
        assert!(PmfSpec::table(vec![Rational::ratio(1, 4); 2]).check_normalized(1).is_err());
    }
}
