//! Binary linear codes of length <= 64 with a canonical reduced-echelon basis.
//!
//! The basis is kept in reduced row echelon form with pivots in increasing
//! coordinate order. RREF is unique per row space, so structural equality of
//! two codes is plain equality of bases.

use crate::bits::{mask, BitWord};
use crate::error::{Error, Result};

/// Enumerating a code materializes 2^k words; bail out beyond this dimension.
pub const MAX_ENUM_DIM: usize = 30;
/// The indicator transform allocates 2^n integers; bail out beyond this length.
pub const MAX_TRANSFORM_LEN: usize = 24;

#[derive(Clone)]
pub struct BinaryCode {
    len: usize,
    /// RREF rows, ascending pivot. Each pivot column is zero in all other rows.
    basis: Vec<u64>,
}

impl PartialEq for BinaryCode {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.basis == other.basis
    }
}
impl Eq for BinaryCode {}

impl std::fmt::Debug for BinaryCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BinaryCode[{},{}]", self.len, self.dim())
    }
}

impl BinaryCode {
    /// Builds the code spanned by `gens`. Zero generators are fine; an empty
    /// span gives the trivial code {0}.
    pub fn from_generators(len: usize, gens: &[BitWord]) -> Result<Self> {
        if len == 0 || len > 64 {
            return Err(Error::SizeGuard {
                what: "code length",
                limit: 64,
                actual: len,
            });
        }
        for g in gens {
            if g.len() != len {
                return Err(Error::LengthMismatch {
                    expected: len,
                    got: g.len(),
                });
            }
        }
        let mut basis: Vec<u64> = Vec::new();
        for g in gens {
            insert_reduced(&mut basis, g.bits());
        }
        Ok(BinaryCode { len, basis })
    }

    pub fn trivial(len: usize) -> Self {
        BinaryCode { len, basis: Vec::new() }
    }

    /// The full space GF(2)^len.
    pub fn full(len: usize) -> Self {
        let basis = (0..len).map(|i| 1u64 << i).collect();
        BinaryCode { len, basis }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> Vec<BitWord> {
        self.basis
            .iter()
            .map(|&b| BitWord::from_bits(self.len, b))
            .collect()
    }

    pub fn contains(&self, w: &BitWord) -> bool {
        if w.len() != self.len {
            return false;
        }
        let mut bits = w.bits();
        for &row in &self.basis {
            let pivot = row.trailing_zeros();
            if bits >> pivot & 1 == 1 {
                bits ^= row;
            }
        }
        bits == 0
    }

    /// Iterates all 2^k codewords in Gray-code order (adjacent words differ by
    /// one basis row). The zero word comes first.
    pub fn words(&self) -> Words<'_> {
        Words {
            code: self,
            step: 0,
            total: 1u64 << self.dim().min(63),
            current: 0,
        }
    }

    /// Dual code under the standard inner product.
    pub fn dual(&self) -> BinaryCode {
        // For each non-pivot column j, the dual gets a row with 1 at j and, for
        // every basis row r with pivot p, bit (r >> j & 1) at p. This is the
        // usual nullspace basis read off the RREF; it is independent.
        let pivots: Vec<u32> = self.basis.iter().map(|r| r.trailing_zeros()).collect();
        let mut pivot_mask = 0u64;
        for &p in &pivots {
            pivot_mask |= 1 << p;
        }
        let mut dual_rows = Vec::with_capacity(self.len - self.dim());
        for j in 0..self.len as u32 {
            if pivot_mask >> j & 1 == 1 {
                continue;
            }
            let mut row = 1u64 << j;
            for (r, &p) in self.basis.iter().zip(&pivots) {
                row |= (r >> j & 1) << p;
            }
            dual_rows.push(row);
        }
        let mut basis = Vec::new();
        for row in dual_rows {
            insert_reduced(&mut basis, row);
        }
        debug_assert_eq!(basis.len(), self.len - self.dim());
        BinaryCode { len: self.len, basis }
    }

    /// Weight distribution: entry `w` counts codewords of weight `w`.
    pub fn weight_distribution(&self) -> Result<Vec<u64>> {
        if self.dim() > MAX_ENUM_DIM {
            return Err(Error::SizeGuard {
                what: "weight enumeration dimension",
                limit: MAX_ENUM_DIM,
                actual: self.dim(),
            });
        }
        let mut counts = vec![0u64; self.len + 1];
        for w in self.words() {
            counts[w.weight()] += 1;
        }
        Ok(counts)
    }

    pub fn min_weight(&self) -> Result<usize> {
        let dist = self.weight_distribution()?;
        Ok(dist
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, &c)| c > 0)
            .map(|(w, _)| w)
            .unwrap_or(0))
    }

    /// Smallest nonzero weight at most `bound`, by scanning supports of size
    /// 1..=bound. Works for any dimension; cost is sum of C(len, w).
    pub fn min_weight_at_most(&self, bound: usize) -> Option<usize> {
        for w in 1..=bound.min(self.len) {
            let mut found = false;
            for_each_combination(self.len, w, &mut |bits| {
                if !found && self.contains(&BitWord::from_bits(self.len, bits)) {
                    found = true;
                }
            });
            if found {
                return Some(w);
            }
        }
        None
    }

    /// Walsh transform of the codeword indicator on GF(2)^n. Entry `y` equals
    /// sum over x in C of (-1)^(x . y), which is |C| on the dual and 0 off it.
    pub fn indicator_transform(&self) -> Result<Vec<i32>> {
        if self.len > MAX_TRANSFORM_LEN {
            return Err(Error::SizeGuard {
                what: "indicator transform length",
                limit: MAX_TRANSFORM_LEN,
                actual: self.len,
            });
        }
        let mut table = vec![0i32; 1 << self.len];
        for w in self.words() {
            table[w.bits() as usize] = 1;
        }
        // In-place Walsh butterflies; values stay within +-2^n, safely in i32.
        let mut h = 1usize;
        while h < table.len() {
            let mut i = 0;
            while i < table.len() {
                for j in i..i + h {
                    let (a, b) = (table[j], table[j + h]);
                    table[j] = a + b;
                    table[j + h] = a - b;
                }
                i += h << 1;
            }
            h <<= 1;
        }
        Ok(table)
    }

    /// Shortening: codewords vanishing on `positions`, with those coordinates
    /// deleted. Remaining coordinates keep their relative order.
    pub fn shorten(&self, positions: &[usize]) -> Result<BinaryCode> {
        let mut drop_mask = 0u64;
        for &p in positions {
            if p >= self.len {
                return Err(Error::IndexOutOfRange {
                    index: p,
                    len: self.len,
                });
            }
            drop_mask |= 1 << p;
        }
        // Eliminate each dropped coordinate: pick a row with a 1 there, clear
        // that column from the rest, and discard the row. What survives spans
        // exactly the subcode vanishing on all dropped coordinates.
        let mut rows = self.basis.clone();
        for p in 0..self.len {
            if drop_mask >> p & 1 == 0 {
                continue;
            }
            if let Some(idx) = rows.iter().position(|r| r >> p & 1 == 1) {
                let row = rows.swap_remove(idx);
                for r in rows.iter_mut() {
                    if *r >> p & 1 == 1 {
                        *r ^= row;
                    }
                }
            }
        }
        let new_len = self.len - drop_mask.count_ones() as usize;
        let mut basis = Vec::new();
        for r in rows {
            insert_reduced(&mut basis, compress_bits(r, drop_mask));
        }
        Ok(BinaryCode { len: new_len, basis })
    }

    /// Structural parity facts, decided from the basis alone.
    pub fn parity_flags(&self) -> ParityFlags {
        let b = &self.basis;
        // wt(a+b) = wt a + wt b - 2|a&b|, and
        // wt(a+b+c) adds a further +4|a&b&c| correction. Closure of each
        // congruence under sums therefore only needs the conditions below.
        let even = b.iter().all(|r| r.count_ones() % 2 == 0);
        let mut doubly_even = b.iter().all(|r| r.count_ones() % 4 == 0);
        if doubly_even {
            'outer: for i in 0..b.len() {
                for j in i + 1..b.len() {
                    if (b[i] & b[j]).count_ones() % 2 != 0 {
                        doubly_even = false;
                        break 'outer;
                    }
                }
            }
        }
        let mut weights_div_8 = b.iter().all(|r| r.count_ones() % 8 == 0);
        if weights_div_8 {
            'outer8: for i in 0..b.len() {
                for j in i + 1..b.len() {
                    if (b[i] & b[j]).count_ones() % 4 != 0 {
                        weights_div_8 = false;
                        break 'outer8;
                    }
                    for k in j + 1..b.len() {
                        if (b[i] & b[j] & b[k]).count_ones() % 2 != 0 {
                            weights_div_8 = false;
                            break 'outer8;
                        }
                    }
                }
            }
        }
        let mut self_orthogonal = true;
        'orth: for i in 0..b.len() {
            for j in i..b.len() {
                if (b[i] & b[j]).count_ones() % 2 != 0 {
                    self_orthogonal = false;
                    break 'orth;
                }
            }
        }
        let self_dual = self_orthogonal && 2 * self.dim() == self.len;
        let contains_all_ones = self.contains(&BitWord::all_ones(self.len));
        ParityFlags {
            even,
            doubly_even,
            weights_div_8,
            self_orthogonal,
            self_dual,
            contains_all_ones,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParityFlags {
    /// Every weight divisible by 2.
    pub even: bool,
    /// Every weight divisible by 4.
    pub doubly_even: bool,
    /// Every weight divisible by 8.
    pub weights_div_8: bool,
    pub self_orthogonal: bool,
    pub self_dual: bool,
    pub contains_all_ones: bool,
}

pub struct Words<'a> {
    code: &'a BinaryCode,
    step: u64,
    total: u64,
    current: u64,
}

impl Iterator for Words<'_> {
    type Item = BitWord;

    fn next(&mut self) -> Option<BitWord> {
        if self.step >= self.total {
            return None;
        }
        if self.step > 0 {
            // Gray step: flip the basis row indexed by the lowest set bit.
            let flip = self.step.trailing_zeros() as usize;
            self.current ^= self.code.basis[flip];
        }
        self.step += 1;
        Some(BitWord::from_bits(self.code.len, self.current))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = (self.total - self.step) as usize;
        (rem, Some(rem))
    }
}

/// Reduces `row` against `basis` and, if independent, inserts it keeping the
/// basis in RREF with ascending pivots.
fn insert_reduced(basis: &mut Vec<u64>, mut row: u64) {
    for &r in basis.iter() {
        let pivot = r.trailing_zeros();
        if row >> pivot & 1 == 1 {
            row ^= r;
        }
    }
    if row == 0 {
        return;
    }
    let pivot = row.trailing_zeros();
    for r in basis.iter_mut() {
        if *r >> pivot & 1 == 1 {
            *r ^= row;
        }
    }
    let pos = basis
        .iter()
        .position(|r| r.trailing_zeros() > pivot)
        .unwrap_or(basis.len());
    basis.insert(pos, row);
}

/// Removes the coordinates under `drop_mask`, shifting higher ones down.
fn compress_bits(bits: u64, drop_mask: u64) -> u64 {
    debug_assert_eq!(bits & drop_mask, 0);
    let mut out = 0u64;
    let mut out_pos = 0;
    for i in 0..64 {
        if drop_mask >> i & 1 == 1 {
            continue;
        }
        out |= (bits >> i & 1) << out_pos;
        out_pos += 1;
    }
    out
}

/// Calls `f` with every `n`-bit word of weight `w`, in lexicographic order of
/// the bit pattern.
pub fn for_each_combination(n: usize, w: usize, f: &mut dyn FnMut(u64)) {
    if w > n {
        return;
    }
    if w == 0 {
        f(0);
        return;
    }
    // Gosper's hack: next word with the same popcount.
    let mut v = mask(w);
    let limit = mask(n);
    loop {
        f(v);
        let t = v | (v - 1);
        if t == !0 {
            // v occupies the top block; no successor within 64 bits.
            break;
        }
        let next = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
        if next > limit {
            break;
        }
        v = next;
    }
}
