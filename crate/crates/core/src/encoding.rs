//! Canonical, self-delimiting wire encoding of protocol payloads.
//!
//! Every payload starts with one tag byte:
//!
//! | tag  | payload  | body                                                    |
//! |------|----------|---------------------------------------------------------|
//! | 0x01 | bit      | one byte, 0 or 1                                        |
//! | 0x02 | index    | unsigned LEB128 varint                                  |
//! | 0x03 | rational | sign byte, varint length + big-endian `|p|`, varint length + big-endian `q` |
//! | 0x04 | point    | varint bit length, then the bits packed MSB-first, zero padded |
//!
//! A message is a concatenation of payloads. Decoding rejects anything that
//! is not the unique canonical encoding of its value: overlong varints,
//! leading zero bytes, unreduced or negative-zero rationals, nonzero padding.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::point::{BitPoint, MAX_DIM};
use crate::rational::Rational;

pub const TAG_BIT: u8 = 0x01;
pub const TAG_INDEX: u8 = 0x02;
pub const TAG_RATIONAL: u8 = 0x03;
pub const TAG_POINT: u8 = 0x04;

/// One self-delimiting payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Bit(bool),
    Index(u64),
    Rational(Rational),
    /// Decoded points are full points of their own length.
    Point(BitPoint),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("byte {offset}: {reason}")]
pub struct DecodeError {
    pub offset: usize,
    pub reason: &'static str,
}

pub fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn put_magnitude(out: &mut Vec<u8>, v: &BigInt) {
    let bytes = if v.is_zero() { Vec::new() } else { v.magnitude().to_bytes_be() };
    put_varint(out, bytes.len() as u64);
    out.extend_from_slice(&bytes);
}

/// Append the encoding of `p` to `out`.
pub fn encode_into(out: &mut Vec<u8>, p: &Payload) {
    match p {
        Payload::Bit(b) => {
            out.push(TAG_BIT);
            out.push(*b as u8);
        }
        Payload::Index(i) => {
            out.push(TAG_INDEX);
            put_varint(out, *i);
        }
        Payload::Rational(r) => {
            out.push(TAG_RATIONAL);
            match r.as_small() {
                Some((n, d)) => {
                    out.push((n < 0) as u8);
                    put_small(out, n.unsigned_abs());
                    put_small(out, d as u64);
                }
                None => {
                    let (neg, n, d) = r.parts();
                    out.push(neg as u8);
                    put_magnitude(out, &n);
                    put_magnitude(out, &d);
                }
            }
        }
        Payload::Point(x) => {
            out.push(TAG_POINT);
            let len = x.len() as usize;
            put_varint(out, len as u64);
            let nbytes = len.div_ceil(8);
            let padded = (x.value() as u128) << (nbytes * 8 - len);
            for k in (0..nbytes).rev() {
                out.push((padded >> (8 * k)) as u8);
            }
        }
    }
}

fn put_small(out: &mut Vec<u8>, v: u64) {
    let n = if v == 0 { 0 } else { 8 - (v.leading_zeros() as usize) / 8 };
    put_varint(out, n as u64);
    out.extend_from_slice(&v.to_be_bytes()[8 - n..]);
}

pub fn encode(p: &Payload) -> Vec<u8> {
    let mut out = Vec::new();
    encode_into(&mut out, p);
    out
}

pub fn encode_all(ps: &[Payload]) -> Vec<u8> {
    let mut out = Vec::new();
    for p in ps {
        encode_into(&mut out, p);
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, reason: &'static str) -> DecodeError {
        DecodeError { offset: self.pos, reason }
    }

    fn byte(&mut self) -> Result<u8, DecodeError> {
        let b = *self.buf.get(self.pos).ok_or(self.err("unexpected end of message"))?;
        self.pos += 1;
        Ok(b)
    }

    fn take(&mut self, n: u64) -> Result<&'a [u8], DecodeError> {
        let rest = self.buf.len() - self.pos;
        if n > rest as u64 {
            return Err(self.err("length exceeds message"));
        }
        let s = &self.buf[self.pos..self.pos + n as usize];
        self.pos += n as usize;
        Ok(s)
    }

    fn varint(&mut self) -> Result<u64, DecodeError> {
        let mut v = 0u64;
        for k in 0..10 {
            let b = self.byte()?;
            let low = (b & 0x7f) as u64;
            if k == 9 && low > 1 {
                return Err(self.err("varint overflow"));
            }
            v |= low << (7 * k);
            if b & 0x80 == 0 {
                if k > 0 && b == 0 {
                    return Err(self.err("overlong varint"));
                }
                return Ok(v);
            }
        }
        Err(self.err("varint overflow"))
    }

    fn magnitude(&mut self) -> Result<&'a [u8], DecodeError> {
        let n = self.varint()?;
        let bytes = self.take(n)?;
        if bytes.first() == Some(&0) {
            return Err(self.err("leading zero byte"));
        }
        Ok(bytes)
    }

    fn rational(&mut self) -> Result<Rational, DecodeError> {
        let sign = self.byte()?;
        if sign > 1 {
            return Err(self.err("bad sign byte"));
        }
        let (num, den) = (self.magnitude()?, self.magnitude()?);
        if den.is_empty() {
            return Err(self.err("zero denominator"));
        }
        if num.is_empty() && (sign == 1 || den != [1]) {
            return Err(self.err("non-canonical zero"));
        }
        // Machine-word fast path; the canonical checks are the same.
        if num.len() < 8 && den.len() < 8 {
            let (n, d) = (be_u64(num), be_u64(den));
            if n.gcd(&d) != 1 {
                return Err(self.err("unreduced rational"));
            }
            let n = n as i64;
            return Ok(Rational::ratio(if sign == 1 { -n } else { n }, d as i64));
        }
        let (num, den) = (BigUint::from_bytes_be(num), BigUint::from_bytes_be(den));
        if !num.gcd(&den).is_one() {
            return Err(self.err("unreduced rational"));
        }
        let sign = if sign == 1 { Sign::Minus } else { Sign::Plus };
        Ok(Rational::new(BigInt::from_biguint(sign, num), BigInt::from(den)))
    }

    fn payload(&mut self) -> Result<Payload, DecodeError> {
        match self.byte()? {
            TAG_BIT => match self.byte()? {
                0 => Ok(Payload::Bit(false)),
                1 => Ok(Payload::Bit(true)),
                _ => Err(self.err("bit out of range")),
            },
            TAG_INDEX => Ok(Payload::Index(self.varint()?)),
            TAG_RATIONAL => Ok(Payload::Rational(self.rational()?)),
            TAG_POINT => {
                let len = self.varint()?;
                if len > MAX_DIM as u64 {
                    return Err(self.err("point too long"));
                }
                let len = len as usize;
                let bytes = self.take(len.div_ceil(8) as u64)?;
                let mut packed = 0u128;
                for &b in bytes {
                    packed = (packed << 8) | b as u128;
                }
                let pad = bytes.len() * 8 - len;
                if packed & ((1u128 << pad) - 1) != 0 {
                    return Err(self.err("nonzero padding"));
                }
                let v = (packed >> pad) as u64;
                Ok(Payload::Point(BitPoint::full(len as u8, v)))
            }
            _ => Err(DecodeError { offset: self.pos - 1, reason: "unknown tag" }),
        }
    }
}

fn be_u64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0, |v, &b| v << 8 | b as u64)
}

/// Decode a whole message into its payloads.
pub fn decode_all(bytes: &[u8]) -> Result<Vec<Payload>, DecodeError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let mut out = Vec::new();
    while r.pos < bytes.len() {
        out.push(r.payload()?);
    }
    Ok(out)
}

/// Decode a message that must consist of exactly one payload.
pub fn decode_one(bytes: &[u8]) -> Result<Payload, DecodeError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let p = r.payload()?;
    if r.pos != bytes.len() {
        return Err(r.err("trailing bytes"));
    }
    Ok(p)
}

/// Decode a message of exactly `n` rationals.
pub fn decode_rationals(bytes: &[u8], n: usize) -> Result<Vec<Rational>, DecodeError> {
    let ps = decode_all(bytes)?;
    if ps.len() != n {
        return Err(DecodeError { offset: bytes.len(), reason: "wrong payload count" });
    }
    ps.into_iter()
        .map(|p| match p {
            Payload::Rational(r) => Ok(r),
            _ => Err(DecodeError { offset: 0, reason: "expected rational" }),
        })
        .collect()
}

pub fn decode_bit(bytes: &[u8]) -> Result<bool, DecodeError> {
    match decode_one(bytes)? {
        Payload::Bit(b) => Ok(b),
        _ => Err(DecodeError { offset: 0, reason: "expected bit" }),
    }
}

pub fn decode_index(bytes: &[u8]) -> Result<u64, DecodeError> {
    match decode_one(bytes)? {
        Payload::Index(i) => Ok(i),
        _ => Err(DecodeError { offset: 0, reason: "expected index" }),
    }
}

pub fn decode_rational(bytes: &[u8]) -> Result<Rational, DecodeError> {
    match decode_one(bytes)? {
        Payload::Rational(r) => Ok(r),
        _ => Err(DecodeError { offset: 0, reason: "expected rational" }),
    }
}

/// A full point of dimension `dim`.
pub fn decode_point(bytes: &[u8], dim: u8) -> Result<BitPoint, DecodeError> {
    match decode_one(bytes)? {
        Payload::Point(x) if x.len() == dim => Ok(BitPoint::full(dim, x.value())),
        Payload::Point(_) => Err(DecodeError { offset: 0, reason: "wrong point length" }),
        _ => Err(DecodeError { offset: 0, reason: "expected point" }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(encode(&Payload::Bit(false)), vec![TAG_BIT, 0]);
        assert_eq!(encode(&Payload::Index(300)), vec![TAG_INDEX, 0xac, 0x02]);
        assert_eq!(encode(&Payload::Rational(Rational::ratio(5, 3))), vec![TAG_RATIONAL, 0, 1, 5, 1, 3]);
        assert_eq!(encode(&Payload::Rational(Rational::ratio(0, 1))), vec![TAG_RATIONAL, 0, 0, 1, 1]);
        let x = BitPoint::from_bits(3, &[true, false, true]);
        assert_eq!(encode(&Payload::Point(x)), vec![TAG_POINT, 3, 0b1010_0000]);
    }

    #[test]
    fn round_trip_large() {
        let r: Rational = "-340282366920938463463374607431768211457/3".parse().unwrap();
        let p = Payload::Rational(r);
        assert_eq!(decode_one(&encode(&p)).unwrap(), p);
    }

    #[test]
    fn rejects_non_canonical() {
        assert!(decode_one(&[TAG_BIT, 2]).is_err());
        assert!(decode_one(&[TAG_INDEX, 0x80, 0x00]).is_err());
        assert!(decode_one(&[TAG_RATIONAL, 0, 1, 2, 1, 4]).is_err());
        assert!(decode_one(&[TAG_RATIONAL, 1, 0, 1, 1]).is_err());
        assert!(decode_one(&[TAG_RATIONAL, 0, 2, 0, 5, 1, 3]).is_err());
        assert!(decode_one(&[TAG_POINT, 3, 0b1010_0001]).is_err());
        assert!(decode_one(&[0x09]).is_err());
        assert!(decode_one(&[TAG_BIT, 1, 0]).is_err());
    }
}
