//! Points of `{0,1}^d` and their prefixes.
//!
//! Coordinate 0 is the most significant bit of the packed value, so the
//! numeric order of full points is the lexicographic order and the child
//! `z·j` of a prefix is `(z << 1) | j`.

use std::fmt;

/// Largest supported dimension.
pub const MAX_DIM: u8 = 63;

/// A bit string of length `len <= dim`; a full point when `len == dim`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitPoint {
    bits: u64,
    len: u8,
    dim: u8,
}

impl BitPoint {
    /// The empty prefix of `{0,1}^dim`.
    pub fn empty(dim: u8) -> BitPoint {
        assert!(dim <= MAX_DIM, "dimension {dim} too large");
        BitPoint { bits: 0, len: 0, dim }
    }

    /// Full point with packed value `index` (`x_0` is the top bit).
    pub fn full(dim: u8, index: u64) -> BitPoint {
        BitPoint::prefix(dim, dim, index)
    }

    /// Prefix of length `len` with packed value `bits`.
    pub fn prefix(dim: u8, len: u8, bits: u64) -> BitPoint {
        assert!(dim <= MAX_DIM && len <= dim, "bad point shape len={len} dim={dim}");
        assert!(len == 64 || bits >> len == 0, "value {bits} wider than {len} bits");
        BitPoint { bits, len, dim }
    }

    /// Build from explicit bits, `x_0` first.
    pub fn from_bits(dim: u8, bits: &[bool]) -> BitPoint {
        let v = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        BitPoint::prefix(dim, bits.len() as u8, v)
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn len(&self) -> u8 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len == self.dim
    }

    /// Packed value of the bits present.
    pub fn value(&self) -> u64 {
        self.bits
    }

    /// Bit at coordinate `i < len`.
    pub fn bit(&self, i: u8) -> bool {
        assert!(i < self.len, "coordinate {i} outside length {}", self.len);
        (self.bits >> (self.len - 1 - i)) & 1 == 1
    }

    /// Prefix extended by one bit.
    pub fn child(&self, j: bool) -> BitPoint {
        assert!(self.len < self.dim, "cannot extend a full point");
        BitPoint { bits: (self.bits << 1) | j as u64, len: self.len + 1, dim: self.dim }
    }

    /// First `len` bits.
    pub fn truncate(&self, len: u8) -> BitPoint {
        assert!(len <= self.len);
        BitPoint { bits: self.bits >> (self.len - len), len, dim: self.dim }
    }

    /// `x^{⊕i}`: the point with coordinate `i` flipped.
    pub fn flip(&self, i: u8) -> BitPoint {
        assert!(i < self.len);
        BitPoint { bits: self.bits ^ (1 << (self.len - 1 - i)), ..*self }
    }

    /// Whether `self` is a prefix of `other` (same dimension).
    pub fn is_prefix_of(&self, other: &BitPoint) -> bool {
        self.dim == other.dim && self.len <= other.len && other.truncate(self.len).bits == self.bits
    }

    /// Indices of the full points extending this prefix, as a half-open range.
    pub fn extensions(&self) -> std::ops::Range<u64> {
        let free = self.dim - self.len;
        let lo = self.bits << free;
        lo..lo + (1u64 << free)
    }

    /// Same bits reinterpreted in dimension `dim`; `None` if they do not fit.
    pub fn with_dim(&self, dim: u8) -> Option<BitPoint> {
        (self.len <= dim && dim <= MAX_DIM).then_some(BitPoint { dim, ..*self })
    }

    /// Iterate over all full points of `{0,1}^dim` in lexicographic order.
    pub fn all(dim: u8) -> impl Iterator<Item = BitPoint> {
        assert!(dim < 64);
        (0..1u64 << dim).map(move |v| BitPoint::full(dim, v))
    }
}

impl PartialOrd for BitPoint {
    fn partial_cmp(&self, other: &BitPoint) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on bits; shorter prefixes first on ties. Dimension last.
impl Ord for BitPoint {
    fn cmp(&self, other: &BitPoint) -> std::cmp::Ordering {
        let l = self.len.min(other.len);
        self.truncate(l)
            .bits
            .cmp(&other.truncate(l).bits)
            .then(self.len.cmp(&other.len))
            .then(self.dim.cmp(&other.dim))
    }
}

impl fmt::Display for BitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return f.write_str("ε");
        }
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitPoint({self}; d={})", self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let x = BitPoint::from_bits(4, &[true, false, true, true]);
        assert_eq!(x.value(), 0b1011);
        assert!(x.is_full());
        assert!(x.bit(0) && !x.bit(1));
        assert_eq!(x.flip(1).to_string(), "1111");
        assert_eq!(x.truncate(2).to_string(), "10");
        assert!(x.truncate(2).is_prefix_of(&x));
        assert_eq!(x.truncate(2).extensions(), 8..12);
        assert_eq!(BitPoint::empty(3).to_string(), "ε");
    }

    #[test]
    fn lex_order_is_numeric() {
        let pts: Vec<_> = BitPoint::all(3).collect();
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert!(BitPoint::empty(3) < BitPoint::empty(3).child(false));
    }
}
