//! 3-CNF formulas and the reduction from SAT to refereed learning.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::metric::Metric;
use crate::oracle::{check_enumerable, FunctionSpec, PmfSpec};
use crate::point::BitPoint;
use crate::rational::Rational;
use crate::rlp::{run_rlp_zeroone, Params};
use crate::session::Session;

/// A CNF over variables `1..=vars`; literal `k` is variable `k`, `-k` its negation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub vars: u8,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    /// Parse the DIMACS clause-list format (`c` comments, `p cnf V C`, clauses
    /// terminated by `0`). Literals may repeat within a clause.
    pub fn parse_dimacs(text: &str) -> Result<Cnf> {
        let mut vars = None;
        let mut expected = 0usize;
        let mut clauses = Vec::new();
        let mut cur = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
                continue;
            }
            if t.starts_with('p') {
                let f: Vec<&str> = t.split_whitespace().collect();
                if f.len() != 4 || f[1] != "cnf" {
                    return Err(Error::parse(line_no, "expected `p cnf <vars> <clauses>`"));
                }
                let v: u8 = f[2].parse().map_err(|_| Error::parse(line_no, "bad variable count"))?;
                if v == 0 || v > crate::point::MAX_DIM {
                    return Err(Error::parse(line_no, "variable count out of range"));
                }
                vars = Some(v);
                expected = f[3].parse().map_err(|_| Error::parse(line_no, "bad clause count"))?;
                continue;
            }
            let v = vars.ok_or_else(|| Error::parse(line_no, "clause before problem line"))?;
            for tok in t.split_whitespace() {
                let lit: i32 = tok.parse().map_err(|_| Error::parse(line_no, format!("bad literal {tok:?}")))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut cur));
                } else if lit.unsigned_abs() > v as u32 {
                    return Err(Error::parse(line_no, format!("literal {lit} exceeds {v} variables")));
                } else {
                    cur.push(lit);
                }
            }
        }
        let vars = vars.ok_or_else(|| Error::parse(1, "missing problem line"))?;
        if !cur.is_empty() {
            clauses.push(cur);
        }
        if clauses.len() != expected {
            return Err(Error::parse(0, format!("problem line declares {expected} clauses, found {}", clauses.len())));
        }
        Ok(Cnf { vars, clauses })
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                s.push_str(&format!("{l} "));
            }
            s.push_str("0\n");
        }
        s
    }

    pub fn eval(&self, x: BitPoint) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| x.bit(l.unsigned_abs() as u8 - 1) == (l > 0)))
    }

    /// `self ∧ (l ∨ l ∨ l)`.
    pub fn and_unit(&self, lit: i32) -> Cnf {
        let mut c = self.clone();
        c.clauses.push(vec![lit; 3]);
        c
    }

    /// A satisfying assignment, by brute force.
    pub fn brute_force(&self) -> Result<Option<BitPoint>> {
        check_enumerable(self.vars)?;
        Ok(BitPoint::all(self.vars).find(|&x| self.eval(x)))
    }

    /// Random 3-CNF with `clauses` clauses over `vars` variables.
    pub fn random(vars: u8, clauses: usize, rng: &mut impl Rng) -> Cnf {
        let clauses = (0..clauses)
            .map(|_| {
                (0..3)
                    .map(|_| {
                        let v = rng.gen_range(1..=vars as i32);
                        if rng.gen() {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect();
        Cnf { vars, clauses }
    }
}

/// Settings for the SAT reduction.
#[derive(Clone, Debug)]
pub struct SatDemo {
    /// Number of simulations `a`.
    pub a: u32,
    /// Accuracy of the inner zero-one learner.
    pub eps: Rational,
    pub beta: Rational,
}

impl Default for SatDemo {
    fn default() -> SatDemo {
        SatDemo { a: 96, eps: Rational::from(7u32), beta: Rational::ratio(1, 3) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatDecision {
    pub accept: bool,
    pub agreements: u32,
    pub a: u32,
}

/// The reduction: build `φ0 = φ ∧ x_1` and `φ1 = φ ∧ ¬x_1`, run the zero-one
/// learner `a` times with `f = φ_{b_j}` for uniform `b_j`, and accept iff the
/// learner recovers `b_j` in at least `7a/12` runs. Both provers are honest.
pub fn sat_demo(phi: &Cnf, cfg: &SatDemo, seed: u64) -> Result<SatDecision> {
    let hs = [Arc::new(phi.and_unit(1)), Arc::new(phi.and_unit(-1))];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = Params::new(cfg.eps.clone(), cfg.beta.clone());
    let mut agreements = 0u32;
    for _ in 0..cfg.a {
        let b = rng.gen_range(0..2usize);
        let inst = Instance {
            dim: phi.vars,
            range: 2,
            f: FunctionSpec::Cnf(hs[b].clone()),
            h: [FunctionSpec::Cnf(hs[0].clone()), FunctionSpec::Cnf(hs[1].clone())],
            pmf: PmfSpec::Uniform,
            metric: Metric::ZeroOne,
        };
        let mut s = Session::honest(&inst, rng.gen());
        let out = run_rlp_zeroone(&mut s, &params)?;
        agreements += (out.bit as usize == b) as u32;
    }
    Ok(SatDecision { accept: 12 * agreements >= 7 * cfg.a, agreements, a: cfg.a })
}
