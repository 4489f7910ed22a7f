//! Fixed-length binary words packed into a single machine word.
//!
//! Everything downstream (codes, markings, cosets) works on lengths up to 64,
//! so a word is one `u64` plus its length. Bit `i` of `bits` is coordinate `i`.

use crate::error::{Error, Result};

/// A binary word of length `len <= 64`. Coordinate `i` lives at bit `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitWord {
    len: usize,
    bits: u64,
}

impl BitWord {
    pub fn zero(len: usize) -> Self {
        debug_assert!(len <= 64);
        BitWord { len, bits: 0 }
    }

    pub fn all_ones(len: usize) -> Self {
        debug_assert!(len <= 64 && len > 0);
        BitWord {
            len,
            bits: mask(len),
        }
    }

    /// Wraps raw bits; bits at positions >= `len` must be zero.
    pub fn from_bits(len: usize, bits: u64) -> Self {
        debug_assert!(len <= 64);
        debug_assert_eq!(bits & !mask(len), 0, "stray bits beyond word length");
        BitWord { len, bits }
    }

    /// Parses a string of `0`/`1` characters, most significant coordinate first
    /// in reading order: `"0111"` has support {1, 2, 3}.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.len() > 64 {
            return Err(Error::Parse(format!("bad word length {}", s.len())));
        }
        let mut bits = 0u64;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return Err(Error::Parse(format!("bad bit character {ch:?}"))),
            }
        }
        Ok(BitWord { len: s.len(), bits })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.bits >> i & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Coordinatewise sum over GF(2).
    pub fn add(&self, other: &BitWord) -> BitWord {
        debug_assert_eq!(self.len, other.len, "adding words of different lengths");
        BitWord {
            len: self.len,
            bits: self.bits ^ other.bits,
        }
    }

    /// Standard inner product over GF(2).
    pub fn dot(&self, other: &BitWord) -> u8 {
        debug_assert_eq!(self.len, other.len);
        ((self.bits & other.bits).count_ones() & 1) as u8
    }

    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        let mut b = self.bits;
        while b != 0 {
            out.push(b.trailing_zeros() as usize);
            b &= b - 1;
        }
        out
    }
}

impl std::fmt::Debug for BitWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self)
    }
}

impl std::fmt::Display for BitWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Low `n` bits set.
pub fn mask(n: usize) -> u64 {
    debug_assert!(n <= 64);
    if n == 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}
