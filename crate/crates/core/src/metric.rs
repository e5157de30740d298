//! Loss metrics on the label range.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::oracle::{precise_bits, Label};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    /// `1` iff the labels differ.
    ZeroOne,
    /// `|y - y'|`.
    AbsInt,
    /// Explicit `k × k` table, row-major.
    Table { k: u32, values: Arc<Vec<Rational>> },
    /// `⌊ℓ(y, y')⌋_λ` for the inner metric.
    Floored { inner: Box<Metric>, lambda: u32 },
}

impl Metric {
    pub fn table(k: u32, values: Vec<Rational>) -> Result<Metric> {
        if values.len() as u64 != k as u64 * k as u64 {
            return Err(Error::param(format!("metric table needs {} entries, got {}", k * k, values.len())));
        }
        Ok(Metric::Table { k, values: Arc::new(values) })
    }

    pub fn floored(&self, lambda: u32) -> Metric {
        Metric::Floored { inner: Box::new(self.clone()), lambda }
    }

    pub fn eval(&self, y: Label, z: Label) -> Rational {
        match self {
            Metric::ZeroOne => Rational::from((y != z) as u32),
            Metric::AbsInt => Rational::from(y.abs_diff(z)),
            Metric::Table { k, values } => values[(y as usize) * (*k as usize) + z as usize].clone(),
            Metric::Floored { inner, lambda } => inner.eval(y, z).floor_lambda(*lambda),
        }
    }

    /// The bound `M` over labels `0..range`.
    pub fn bound(&self, range: u32) -> Rational {
        self.pairs(range).map(|(y, z)| self.eval(y, z)).max().unwrap_or_else(Rational::zero)
    }

    /// Least `λ_ℓ` with every value in `Q_{λ_ℓ}` over labels `0..range`.
    pub fn precision(&self, range: u32) -> u32 {
        self.pairs(range).map(|(y, z)| precise_bits(&self.eval(y, z))).max().unwrap_or(0)
    }

    pub fn name(&self) -> String {
        match self {
            Metric::ZeroOne => "zero-one".into(),
            Metric::AbsInt => "abs-int".into(),
            Metric::Table { .. } => "table".into(),
            Metric::Floored { inner, lambda } => format!("floor{lambda}({})", inner.name()),
        }
    }

    fn pairs(&self, range: u32) -> impl Iterator<Item = (Label, Label)> {
        (0..range).flat_map(move |y| (0..range).map(move |z| (y, z)))
    }

    /// Identity, positivity, symmetry and the triangle inequality over `0..range`.
    pub fn check(&self, range: u32) -> Result<()> {
        if let Metric::Table { k, .. } = self {
            if *k < range {
                return Err(Error::param(format!("metric table covers {k} labels, range is {range}")));
            }
        }
        let v = |y, z| self.eval(y, z);
        for (y, z) in self.pairs(range) {
            let d = v(y, z);
            if (y == z) != d.is_zero() || d.is_negative() {
                return Err(Error::param(format!("metric fails identity/positivity at ({y},{z})")));
            }
            if d != v(z, y) {
                return Err(Error::param(format!("metric not symmetric at ({y},{z})")));
            }
        }
        if range <= 64 {
            for (y, z) in self.pairs(range) {
                for w in 0..range {
                    if v(y, z) > v(y, w) + v(w, z) {
                        return Err(Error::param(format!("triangle inequality fails at ({y},{w},{z})")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_metrics() {
        assert_eq!(Metric::ZeroOne.eval(2, 5), Rational::from(1u32));
        assert_eq!(Metric::AbsInt.eval(2, 5), Rational::from(3u32));
        assert_eq!(Metric::AbsInt.bound(8), Rational::from(7u32));
        assert_eq!(Metric::AbsInt.precision(8), 3);
        assert!(Metric::AbsInt.check(8).is_ok());
        assert!(Metric::ZeroOne.check(4).is_ok());
    }

    #[test]
    fn table_and_floor() {
        let third = |n| Rational::ratio(n, 3);
        let vals = (0..9).map(|i| third(((i / 3) as i64 - (i % 3) as i64).abs())).collect();
        let m = Metric::table(3, vals).unwrap();
        assert!(m.check(3).is_ok());
        let f = m.floored(4);
        assert_eq!(f.eval(0, 1), Rational::ratio(5, 16));
        assert!((m.eval(0, 2) - f.eval(0, 2)) < Rational::pow2(-4));
        let bad = Metric::table(2, vec![0.into(), 1.into(), 2.into(), 0.into()]).unwrap();
        assert!(bad.check(2).is_err());
    }
}
