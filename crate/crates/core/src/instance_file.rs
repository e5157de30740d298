//! Plain-text instance files.
//!
//! ```text
//! # anything after '#' is a comment
//! dim 3
//! range 2
//! lambda 3                  # optional; checked against the pmf
//! metric-lambda 0           # optional; checked against the metric
//! metric zero-one           # or abs-int, or: table <k> <k·k rationals>
//! f table 0001000100010001  # one hex byte per label, 2^d labels
//! h0 junta 0,2 6a           # indices, then the truth table packed MSB-first
//! h1 cnf 1 -2 3 0 -1 -1 -1 0
//! pmf uniform               # or 2^d rationals "p/q"
//! ```
//!
//! Functions may also be `const <label>`. A line starting with whitespace
//! continues the previous one, so long tables can wrap.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::juntas::JuntaSpec;
use crate::metric::Metric;
use crate::oracle::{check_enumerable, FunctionSpec, PmfSpec};
use crate::rational::Rational;
use crate::sat::Cnf;

/// Logical lines `(first physical line number, text)` with continuations joined.
fn logical_lines(text: &str) -> Vec<(usize, String)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let continues = line.starts_with(char::is_whitespace);
        match out.last_mut() {
            Some(last) if continues => {
                last.1.push(' ');
                last.1.push_str(line.trim());
            }
            _ => out.push((n + 1, line.trim().to_string())),
        }
    }
    out
}

#[derive(Default)]
struct Draft {
    dim: Option<u8>,
    range: Option<u32>,
    lambda: Option<(usize, u32)>,
    metric_lambda: Option<(usize, u32)>,
    metric: Option<Metric>,
    f: Option<FunctionSpec>,
    h0: Option<FunctionSpec>,
    h1: Option<FunctionSpec>,
    pmf: Option<PmfSpec>,
}

fn num<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::parse(line, format!("bad {what}")))
}

fn rational(line: usize, tok: &str) -> Result<Rational> {
    tok.parse().map_err(|_| Error::parse(line, format!("bad rational {tok:?}")))
}

fn function(line: usize, dim: u8, toks: &[&str]) -> Result<FunctionSpec> {
    match toks.first().copied() {
        Some("const") => Ok(FunctionSpec::Const(num(line, toks.get(1).copied(), "label")?)),
        Some("table") => {
            let hex_str: String = toks[1..].concat();
            let bytes = hex::decode(&hex_str).map_err(|e| Error::parse(line, format!("bad hex: {e}")))?;
            if check_enumerable(dim).is_err() || bytes.len() as u64 != 1u64 << dim {
                return Err(Error::parse(line, format!("table has {} labels, expected 2^{dim}", bytes.len())));
            }
            Ok(FunctionSpec::table(bytes.into_iter().map(|b| b as u32).collect()))
        }
        Some("junta") => {
            let idx = toks.get(1).ok_or_else(|| Error::parse(line, "missing junta indices"))?;
            let indices = if *idx == "-" {
                Vec::new()
            } else {
                idx.split(',').map(|t| num(line, Some(t), "junta index")).collect::<Result<Vec<u8>>>()?
            };
            let hex_table = toks.get(2).ok_or_else(|| Error::parse(line, "missing junta table"))?;
            JuntaSpec::from_hex(dim, indices, hex_table)
                .map(|j| FunctionSpec::Junta(Arc::new(j)))
                .map_err(|e| Error::parse(line, e.to_string()))
        }
        Some("cnf") => {
            let body = toks[1..].join(" ");
            let clauses = toks[1..].iter().filter(|t| **t == "0").count();
            let cnf = Cnf::parse_dimacs(&format!("p cnf {dim} {clauses}\n{body}\n"))
                .map_err(|e| Error::parse(line, e.to_string()))?;
            Ok(FunctionSpec::Cnf(Arc::new(cnf)))
        }
        Some(other) => Err(Error::parse(line, format!("unknown function kind {other:?}"))),
        None => Err(Error::parse(line, "missing function kind")),
    }
}

/// Parse an instance. Errors carry the offending line number.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut d = Draft::default();
    let mut last_line = 0;
    for (line, body) in logical_lines(text) {
        last_line = line;
        let toks: Vec<&str> = body.split_whitespace().collect();
        let key = toks[0];
        let need_dim = || d.dim.ok_or_else(|| Error::parse(line, format!("`{key}` before `dim`")));
        match key {
            "dim" => {
                let v: u8 = num(line, toks.get(1).copied(), "dimension")?;
                if v == 0 || v > crate::point::MAX_DIM {
                    return Err(Error::parse(line, "dimension out of range"));
                }
                d.dim = Some(v);
            }
            "range" => d.range = Some(num(line, toks.get(1).copied(), "range")?),
            "lambda" => d.lambda = Some((line, num(line, toks.get(1).copied(), "lambda")?)),
            "metric-lambda" => d.metric_lambda = Some((line, num(line, toks.get(1).copied(), "metric lambda")?)),
            "metric" => {
                d.metric = Some(match toks.get(1).copied() {
                    Some("zero-one") => Metric::ZeroOne,
                    Some("abs-int") => Metric::AbsInt,
                    Some("table") => {
                        let k: u32 = num(line, toks.get(2).copied(), "metric size")?;
                        let vals = toks[3..].iter().map(|t| rational(line, t)).collect::<Result<Vec<_>>>()?;
                        Metric::table(k, vals).map_err(|e| Error::parse(line, e.to_string()))?
                    }
                    _ => return Err(Error::parse(line, "metric must be zero-one, abs-int or table")),
                })
            }
            "f" | "h0" | "h1" => {
                let spec = function(line, need_dim()?, &toks[1..])?;
                let slot = match key {
                    "f" => &mut d.f,
                    "h0" => &mut d.h0,
                    _ => &mut d.h1,
                };
                *slot = Some(spec);
            }
            "pmf" => {
                let dim = need_dim()?;
                d.pmf = Some(if toks.get(1) == Some(&"uniform") {
                    PmfSpec::Uniform
                } else {
                    let vals = toks[1..].iter().map(|t| rational(line, t)).collect::<Result<Vec<_>>>()?;
                    if vals.len() as u64 != 1u64 << dim.min(63) {
                        return Err(Error::parse(line, format!("pmf has {} masses, expected 2^{dim}", vals.len())));
                    }
                    let p = PmfSpec::table(vals);
                    p.check_normalized(dim).map_err(|e| Error::parse(line, e.to_string()))?;
                    p
                })
            }
            other => return Err(Error::parse(line, format!("unknown key {other:?}"))),
        }
    }
    let end = last_line + 1;
    let missing = |what: &str| Error::parse(end, format!("missing `{what}`"));
    let inst = Instance {
        dim: d.dim.ok_or_else(|| missing("dim"))?,
        range: d.range.ok_or_else(|| missing("range"))?,
        f: d.f.ok_or_else(|| missing("f"))?,
        h: [d.h0.ok_or_else(|| missing("h0"))?, d.h1.ok_or_else(|| missing("h1"))?],
        pmf: d.pmf.unwrap_or(PmfSpec::Uniform),
        metric: d.metric.unwrap_or(Metric::ZeroOne),
    };
    if let Some((line, l)) = d.lambda {
        if l != inst.lambda() {
            return Err(Error::parse(line, format!("declared lambda {l}, the pmf needs {}", inst.lambda())));
        }
    }
    if let Some((line, l)) = d.metric_lambda {
        let need = inst.metric.precision(inst.range);
        if l != need {
            return Err(Error::parse(line, format!("declared metric lambda {l}, the metric needs {need}")));
        }
    }
    inst.validate().map_err(|e| Error::parse(end, e.to_string()))?;
    Ok(inst)
}

fn write_function(key: &str, spec: &FunctionSpec, dim: u8) -> Result<String> {
    Ok(match spec {
        FunctionSpec::Const(c) => format!("{key} const {c}\n"),
        FunctionSpec::Junta(j) => {
            let idx = if j.indices().is_empty() {
                "-".to_string()
            } else {
                j.indices().iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
            };
            format!("{key} junta {idx} {}\n", j.table_hex())
        }
        FunctionSpec::Cnf(c) => {
            let body: Vec<String> =
                c.clauses.iter().map(|cl| cl.iter().map(|l| format!("{l} ")).collect::<String>() + "0").collect();
            format!("{key} cnf {}\n", body.join(" "))
        }
        FunctionSpec::Table(_) | FunctionSpec::Custom(..) => {
            let t = spec.truth_table(dim)?;
            if t.iter().any(|&y| y > 255) {
                return Err(Error::param("table labels above 255 cannot be written"));
            }
            let bytes: Vec<u8> = t.into_iter().map(|y| y as u8).collect();
            let mut s = format!("{key} table");
            for chunk in bytes.chunks(32) {
                s.push_str("\n  ");
                s.push_str(&hex::encode(chunk));
            }
            s.push('\n');
            s
        }
    })
}

/// Serialize an instance; [`parse_instance`] reads it back.
pub fn write_instance(inst: &Instance) -> Result<String> {
    let mut s = format!("dim {}\nrange {}\nlambda {}\n", inst.dim, inst.range, inst.lambda());
    s.push_str(&format!("metric-lambda {}\n", inst.metric.precision(inst.range)));
    s.push_str(&match &inst.metric {
        Metric::ZeroOne => "metric zero-one\n".to_string(),
        Metric::AbsInt => "metric abs-int\n".to_string(),
        Metric::Table { k, values } => {
            format!("metric table {k} {}\n", values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
        }
        Metric::Floored { .. } => return Err(Error::param("floored metrics are derived, not stored")),
    });
    s.push_str(&write_function("f", &inst.f, inst.dim)?);
    s.push_str(&write_function("h0", &inst.h[0], inst.dim)?);
    s.push_str(&write_function("h1", &inst.h[1], inst.dim)?);
    match &inst.pmf {
        PmfSpec::Uniform => s.push_str("pmf uniform\n"),
        PmfSpec::Table(t) => {
            s.push_str("pmf");
            for chunk in t.chunks(16) {
                s.push_str("\n ");
                for p in chunk {
                    s.push(' ');
                    s.push_str(&p.to_string());
                }
            }
            s.push('\n');
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# three bits
dim 3
range 2
metric zero-one
f table 0001000100010001
h0 junta 0,2 6a  # parity-ish
h1 cnf 1 -2 3 0 -1 -1 -1 0
pmf 1/8 1/8 1/8 1/8
    1/8 1/8 1/8 1/8
";

    #[test]
    fn parses_and_round_trips() {
        let inst = parse_instance(SAMPLE).unwrap();
        assert_eq!(inst.dim, 3);
        let again = parse_instance(&write_instance(&inst).unwrap()).unwrap();
        assert_eq!(again.f.truth_table(3).unwrap(), inst.f.truth_table(3).unwrap());
        assert_eq!(again.h[1].truth_table(3).unwrap(), inst.h[1].truth_table(3).unwrap());
        assert_eq!(again.pmf, inst.pmf);
    }

    #[test]
    fn errors_name_lines() {
        let bad = SAMPLE.replace("1/8 1/8 1/8 1/8\n    1/8", "1/8 1/8 1/8 1/8\n    1/4");
        match parse_instance(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 8),
            other => panic!("{other:?}"),
        }
        match parse_instance("dim 3\nrange 2\nf table zz\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
