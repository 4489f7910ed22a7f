//! Codes over Z4 and the frame constructions built from marked binary codes.
//!
//! Two representations coexist. A `GeneratorSpan` is an additive span held in
//! Z4 echelon form. A `CosetUnion` is the image of a binary code under the
//! pairwise lift `hat`, shifted by a subgroup of per-pair (2,2) additions and
//! optionally by a glue word; this form is primary because `hat` is not a
//! homomorphism, so a naive Z4 span of lifted generators is wrong for the
//! twisted construction.
//!
//! The symmetrized weight enumerator has three deliberately independent
//! routes: direct enumeration, a per-codeword transfer product over the shift
//! choices, and closed formulas through the binary enumerator. Tests hold all
//! three to exact agreement.

use std::fmt;

use crate::bits::{mask, BitWord};
use crate::codes::BinaryCode;
use crate::error::{Error, Result};
use crate::markings::{smwe, Marking};
use crate::poly::{rat, rat_frac, to_rational, RatPoly, TriPoly};

/// Largest code enumerated word-by-word: 2^26 words.
pub const MAX_Z4_ENUM_LOG2: u32 = 26;

/// Bits 0, 2, 4, ...: the low bit of every packed digit.
const LOW_BITS: u64 = 0x5555_5555_5555_5555;

/// A word over Z4, packed two bits per digit, up to 32 digits.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Z4Word {
    len: usize,
    w: u64,
}

impl Z4Word {
    pub fn zero(len: usize) -> Self {
        assert!(len <= 32, "Z4 words hold at most 32 digits");
        Z4Word { len, w: 0 }
    }

    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        if digits.len() > 32 {
            return Err(Error::SizeGuard {
                what: "Z4 word length",
                limit: 32,
                actual: digits.len(),
            });
        }
        let mut out = Z4Word::zero(digits.len());
        for (i, &d) in digits.iter().enumerate() {
            if d > 3 {
                return Err(Error::Parse(format!("Z4 digit out of range: {d}")));
            }
            out.set_digit(i, d);
        }
        Ok(out)
    }

    /// Parses a string of digits 0-3; the first character is coordinate 0.
    pub fn parse(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s
            .chars()
            .map(|ch| {
                ch.to_digit(4)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Parse(format!("invalid Z4 digit '{ch}'")))
            })
            .collect::<Result<_>>()?;
        Z4Word::from_digits(&digits)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn digit(&self, i: usize) -> u8 {
        debug_assert!(i < self.len);
        (self.w >> (2 * i) & 3) as u8
    }

    pub fn set_digit(&mut self, i: usize, d: u8) {
        debug_assert!(i < self.len && d < 4);
        self.w = (self.w & !(3 << (2 * i))) | ((d as u64) << (2 * i));
    }

    pub fn is_zero(&self) -> bool {
        self.w == 0
    }

    /// Coordinatewise addition mod 4, carry-free on the packed form.
    pub fn add(&self, other: &Z4Word) -> Z4Word {
        debug_assert_eq!(self.len, other.len);
        let carry = (self.w & other.w & LOW_BITS) << 1;
        Z4Word {
            len: self.len,
            w: (self.w ^ other.w ^ carry) & mask(2 * self.len),
        }
    }

    pub fn neg(&self) -> Z4Word {
        let m = mask(2 * self.len);
        let flipped = Z4Word {
            len: self.len,
            w: !self.w & m,
        };
        let ones = Z4Word {
            len: self.len,
            w: LOW_BITS & m,
        };
        flipped.add(&ones)
    }

    pub fn sub(&self, other: &Z4Word) -> Z4Word {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: u8) -> Z4Word {
        match k & 3 {
            0 => Z4Word::zero(self.len),
            1 => *self,
            2 => Z4Word {
                len: self.len,
                w: (self.w & LOW_BITS) << 1,
            },
            _ => self.neg(),
        }
    }

    /// Inner product mod 4.
    pub fn inner(&self, other: &Z4Word) -> u8 {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for i in 0..self.len {
            acc += self.digit(i) as u32 * other.digit(i) as u32;
        }
        (acc & 3) as u8
    }

    /// Number of entries equal to 1 or 3.
    pub fn ones_count(&self) -> u32 {
        (self.w & LOW_BITS).count_ones()
    }

    /// Number of entries equal to 2.
    pub fn twos_count(&self) -> u32 {
        ((self.w >> 1) & !self.w & LOW_BITS).count_ones()
    }

    /// Sum of per-entry weights 0, 1, 4, 1 for digits 0, 1, 2, 3.
    pub fn euclidean_weight(&self) -> u32 {
        self.ones_count() + 4 * self.twos_count()
    }
}

impl fmt::Display for Z4Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.digit(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Z4Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z4\"{self}\"")
    }
}

/// An additive span over Z4 in echelon form.
///
/// Rows are stored with strictly increasing pivot columns. A unit pivot row
/// takes coefficients in all of Z4; a pivot-2 row takes coefficients in
/// {0, 1}, its double having been folded back into later rows during
/// elimination. Every combination of coefficients yields a distinct word, so
/// the cardinality is 4^(unit rows) * 2^(pivot-2 rows).
#[derive(Clone, Debug)]
pub struct GeneratorSpan {
    len: usize,
    rows: Vec<(usize, bool, Z4Word)>,
}

impl GeneratorSpan {
    pub fn from_generators(len: usize, gens: &[Z4Word]) -> Result<Self> {
        if len > 32 {
            return Err(Error::SizeGuard {
                what: "Z4 word length",
                limit: 32,
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
        let mut pool: Vec<Z4Word> = gens.iter().copied().filter(|g| !g.is_zero()).collect();
        let mut rows: Vec<(usize, bool, Z4Word)> = Vec::new();
        for col in 0..len {
            if let Some(i) = pool.iter().position(|g| g.digit(col) % 2 == 1) {
                let mut v = pool.swap_remove(i);
                if v.digit(col) == 3 {
                    v = v.scale(3);
                }
                for g in pool.iter_mut() {
                    let e = g.digit(col);
                    if e != 0 {
                        *g = g.sub(&v.scale(e));
                    }
                }
                rows.push((col, true, v));
            } else if let Some(i) = pool.iter().position(|g| g.digit(col) == 2) {
                let v = pool.swap_remove(i);
                for g in pool.iter_mut() {
                    if g.digit(col) == 2 {
                        *g = g.sub(&v);
                    }
                }
                // The row itself only carries coefficients 0 and 1 from here
                // on, so its double must rejoin the pool for later columns.
                pool.push(v.scale(2));
                rows.push((col, false, v));
            }
            pool.retain(|g| !g.is_zero());
        }
        Ok(GeneratorSpan { len, rows })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The echelon rows; a spanning family of the code.
    pub fn rows(&self) -> Vec<Z4Word> {
        self.rows.iter().map(|(_, _, v)| *v).collect()
    }

    pub fn log2_size(&self) -> u32 {
        self.rows
            .iter()
            .map(|&(_, unit, _)| if unit { 2 } else { 1 })
            .sum()
    }

    pub fn size(&self) -> u128 {
        1u128 << self.log2_size()
    }

    pub fn contains(&self, w: &Z4Word) -> bool {
        if w.len() != self.len {
            return false;
        }
        // Rows vanish left of their pivot, so greedy reduction in pivot
        // order decides membership exactly.
        let mut r = *w;
        for (col, unit, v) in &self.rows {
            let e = r.digit(*col);
            if e == 0 {
                continue;
            }
            if *unit {
                r = r.sub(&v.scale(e));
            } else if e == 2 {
                r = r.sub(v);
            }
        }
        r.is_zero()
    }

    /// Visits every word of the span once.
    pub fn for_each(&self, f: &mut dyn FnMut(&Z4Word)) -> Result<()> {
        if self.log2_size() > MAX_Z4_ENUM_LOG2 {
            return Err(Error::SizeGuard {
                what: "Z4 span enumeration (log2 of size)",
                limit: MAX_Z4_ENUM_LOG2 as usize,
                actual: self.log2_size() as usize,
            });
        }
        fn go(
            rows: &[(usize, bool, Z4Word)],
            i: usize,
            acc: Z4Word,
            f: &mut dyn FnMut(&Z4Word),
        ) {
            if i == rows.len() {
                f(&acc);
                return;
            }
            let (_, unit, v) = rows[i];
            let reps = if unit { 4 } else { 2 };
            let mut cur = acc;
            for step in 0..reps {
                go(rows, i + 1, cur, f);
                if step + 1 < reps {
                    cur = cur.add(&v);
                }
            }
        }
        go(&self.rows, 0, Z4Word::zero(self.len), f);
        Ok(())
    }
}

/// The pairwise lift 00 -> (0,0), 11 -> (2,0), 10 -> (1,1), 01 -> (3,1).
///
/// Its additivity defect always lies in {(0,0), (2,2)}, landing on (2,2)
/// exactly when both summands are mixed on the pair.
pub fn hat_pair(b: (u8, u8)) -> (u8, u8) {
    match b {
        (0, 0) => (0, 0),
        (1, 1) => (2, 0),
        (1, 0) => (1, 1),
        (0, 1) => (3, 1),
        _ => panic!("binary pair entries must be 0 or 1"),
    }
}

/// Applies `hat_pair` on every marked pair of a binary word.
pub fn hat_word(c: &BitWord, m: &Marking) -> Result<Z4Word> {
    if c.len() != m.d() {
        return Err(Error::LengthMismatch {
            expected: m.d(),
            got: c.len(),
        });
    }
    if c.len() > 32 {
        return Err(Error::SizeGuard {
            what: "Z4 word length",
            limit: 32,
            actual: c.len(),
        });
    }
    let mut out = Z4Word::zero(c.len());
    for &(i, j) in m.pairs() {
        let (d1, d2) = hat_pair((c.get(i) as u8, c.get(j) as u8));
        out.set_digit(i, d1);
        out.set_digit(j, d2);
    }
    Ok(out)
}

/// The twisted-branch glue word: (1, 0) on every marked pair, with (3, 2) on
/// the final pair when d = 8 mod 16. Moving the (3, 2) to a different pair
/// changes the word by two (2,2) shifts, an even count, so the resulting
/// coset union does not depend on the choice.
pub fn standard_glue(m: &Marking) -> Result<Z4Word> {
    let d = m.d();
    if d % 8 != 0 {
        return Err(Error::Invalid(format!(
            "glue is defined for lengths divisible by 8, got {d}"
        )));
    }
    let mut g = Z4Word::zero(d);
    let pairs = m.pairs();
    for (k, &(i, j)) in pairs.iter().enumerate() {
        if d % 16 == 8 && k == pairs.len() - 1 {
            g.set_digit(i, 3);
            g.set_digit(j, 2);
        } else {
            g.set_digit(i, 1);
            g.set_digit(j, 0);
        }
    }
    Ok(g)
}

/// Which per-pair (2,2) shift multisets accompany each lifted codeword.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftRule {
    /// Every subset of pairs.
    Full,
    /// Subsets with an even number of shifted pairs, for every codeword.
    EvenCount,
    /// Subsets whose count parity equals the codeword's number of
    /// 01-classified pairs. This is the shadow of the lattice condition
    /// "coordinate sum divisible by 4": the first-position digit of a pair
    /// contributes 0, 2, 1, 3 for classes 00, 11, 10, 01 and gains 2 per
    /// shift, so the total is 0 mod 4 exactly on this parity. Unlike the
    /// uniform even-count rule it is additively closed for every marking.
    MatchedParity,
}

/// A Z4 code given as { hat(c) + s : c in C, s an allowed shift subset },
/// optionally unioned with the same set translated by a glue word.
///
/// A glue word must place exactly one odd digit on every pair, which keeps
/// the glued branch disjoint from the plain one: plain words have equal
/// digit parities on each pair, glued words mixed parities.
#[derive(Clone, Debug)]
pub struct CosetUnion {
    code: BinaryCode,
    marking: Marking,
    rule: ShiftRule,
    glue: Option<Z4Word>,
}

impl CosetUnion {
    pub fn new(
        code: BinaryCode,
        marking: Marking,
        rule: ShiftRule,
        glue: Option<Z4Word>,
    ) -> Result<Self> {
        let d = code.len();
        if marking.d() != d {
            return Err(Error::LengthMismatch {
                expected: d,
                got: marking.d(),
            });
        }
        if d > 32 {
            return Err(Error::SizeGuard {
                what: "Z4 word length",
                limit: 32,
                actual: d,
            });
        }
        if let Some(g) = &glue {
            if g.len() != d {
                return Err(Error::LengthMismatch {
                    expected: d,
                    got: g.len(),
                });
            }
            for &(i, j) in marking.pairs() {
                if (g.digit(i) + g.digit(j)) % 2 == 0 {
                    return Err(Error::Invalid(format!(
                        "glue word must have exactly one odd digit on every \
                         marked pair; pair ({}, {}) carries ({}, {})",
                        i + 1,
                        j + 1,
                        g.digit(i),
                        g.digit(j)
                    )));
                }
            }
        }
        Ok(CosetUnion {
            code,
            marking,
            rule,
            glue,
        })
    }

    pub fn code(&self) -> &BinaryCode {
        &self.code
    }

    pub fn marking(&self) -> &Marking {
        &self.marking
    }

    pub fn rule(&self) -> ShiftRule {
        self.rule
    }

    pub fn glue(&self) -> Option<&Z4Word> {
        self.glue.as_ref()
    }

    pub fn len(&self) -> usize {
        self.code.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn branch_starts(&self) -> Vec<Z4Word> {
        let mut starts = vec![Z4Word::zero(self.len())];
        if let Some(g) = &self.glue {
            starts.push(*g);
        }
        starts
    }

    /// The required shift-count parity for one codeword, or None when both
    /// parities are allowed.
    fn target_parity(&self, c: &BitWord) -> Option<u32> {
        match self.rule {
            ShiftRule::Full => None,
            ShiftRule::EvenCount => Some(0),
            ShiftRule::MatchedParity => {
                let mut parity = 0u32;
                for &(i, j) in self.marking.pairs() {
                    if !c.get(i) && c.get(j) {
                        parity ^= 1;
                    }
                }
                Some(parity)
            }
        }
    }

    pub fn log2_size(&self) -> u32 {
        let pairs = self.marking.pair_count() as u32;
        let mut log2 = self.code.dim() as u32 + pairs;
        if self.rule != ShiftRule::Full {
            log2 -= 1;
        }
        if self.glue.is_some() {
            log2 += 1;
        }
        log2
    }

    pub fn size(&self) -> u128 {
        1u128 << self.log2_size()
    }

    pub fn contains(&self, w: &Z4Word) -> bool {
        if w.len() != self.len() {
            return false;
        }
        'branch: for start in self.branch_starts() {
            let v = w.sub(&start);
            let mut cbits = BitWord::zero(self.len());
            let mut shift_parity = 0u32;
            for &(i, j) in self.marking.pairs() {
                match (v.digit(i), v.digit(j)) {
                    (0, 0) => {}
                    (2, 2) => shift_parity ^= 1,
                    (2, 0) | (0, 2) => {
                        cbits.set(i, true);
                        cbits.set(j, true);
                        if v.digit(i) == 0 {
                            shift_parity ^= 1;
                        }
                    }
                    (1, 1) | (3, 3) => {
                        cbits.set(i, true);
                        if v.digit(i) == 3 {
                            shift_parity ^= 1;
                        }
                    }
                    (3, 1) | (1, 3) => {
                        cbits.set(j, true);
                        if v.digit(i) == 1 {
                            shift_parity ^= 1;
                        }
                    }
                    _ => continue 'branch,
                }
            }
            let parity_ok = match self.target_parity(&cbits) {
                None => true,
                Some(p) => shift_parity == p,
            };
            if parity_ok && self.code.contains(&cbits) {
                return true;
            }
        }
        false
    }

    /// A family whose additive closure is the whole set whenever the set is
    /// closed under addition: lifted basis rows of the binary code, shift
    /// subgroup generators, and the glue word.
    pub fn spanning_family(&self) -> Vec<Z4Word> {
        let mut fam = Vec::new();
        let pairs = self.marking.pairs();
        let shift = |k: usize| {
            let (i, j) = pairs[k];
            let mut s = Z4Word::zero(self.len());
            s.set_digit(i, 2);
            s.set_digit(j, 2);
            s
        };
        for row in self.code.basis() {
            let mut lift =
                hat_word(&row, &self.marking).expect("lengths validated at construction");
            if self.target_parity(&row) == Some(1) {
                lift = lift.add(&shift(0));
            }
            fam.push(lift);
        }
        match self.rule {
            ShiftRule::Full => {
                for k in 0..pairs.len() {
                    fam.push(shift(k));
                }
            }
            ShiftRule::EvenCount | ShiftRule::MatchedParity => {
                for k in 1..pairs.len() {
                    fam.push(shift(0).add(&shift(k)));
                }
            }
        }
        if let Some(g) = &self.glue {
            fam.push(*g);
        }
        fam
    }

    /// Confirms the set is closed under addition by testing every pairwise
    /// sum of the spanning family for membership.
    pub fn verify_closure(&self) -> Result<()> {
        let fam = self.spanning_family();
        for (i, a) in fam.iter().enumerate() {
            for b in fam.iter().skip(i) {
                let sum = a.add(b);
                if !self.contains(&sum) {
                    return Err(Error::Structure(format!(
                        "coset union is not additively closed: {a} + {b} = {sum} is not a member"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Re-expresses the set as an echelonized span; errors if the set is not
    /// additively closed (the span would then be strictly larger).
    pub fn to_span(&self) -> Result<GeneratorSpan> {
        let span = GeneratorSpan::from_generators(self.len(), &self.spanning_family())?;
        if span.log2_size() != self.log2_size() {
            return Err(Error::Structure(format!(
                "coset union is not additively closed: its spanning family \
                 generates 2^{} words but the union holds 2^{}",
                span.log2_size(),
                self.log2_size()
            )));
        }
        Ok(span)
    }

    /// Visits every word once. The glued branch never collides with the
    /// plain branch (digit parities differ), so no deduplication is needed.
    pub fn for_each(&self, f: &mut dyn FnMut(&Z4Word)) -> Result<()> {
        if self.log2_size() > MAX_Z4_ENUM_LOG2 {
            return Err(Error::SizeGuard {
                what: "Z4 coset enumeration (log2 of size)",
                limit: MAX_Z4_ENUM_LOG2 as usize,
                actual: self.log2_size() as usize,
            });
        }
        let pairs = self.marking.pairs();
        let pair_masks: Vec<u64> = pairs
            .iter()
            .map(|&(i, j)| (2u64 << (2 * i)) | (2u64 << (2 * j)))
            .collect();
        let shifts: u64 = 1 << pairs.len();
        for start in self.branch_starts() {
            for c in self.code.words() {
                let base = hat_word(&c, &self.marking)
                    .expect("lengths validated at construction")
                    .add(&start);
                let target = self.target_parity(&c);
                let mut cur = base;
                let mut parity = 0u32;
                if target.is_none() || target == Some(0) {
                    f(&cur);
                }
                for t in 1..shifts {
                    // Gray order: adding (2,2) on a pair is an XOR on the
                    // packed digit high bits.
                    cur.w ^= pair_masks[t.trailing_zeros() as usize];
                    parity ^= 1;
                    if target.is_none() || target == Some(parity) {
                        f(&cur);
                    }
                }
            }
        }
        Ok(())
    }
}

/// A code over Z4 in either representation.
#[derive(Clone, Debug)]
pub enum Z4Code {
    Span(GeneratorSpan),
    Union(CosetUnion),
}

/// Structure flags of a Z4 code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Z4Flags {
    /// The code equals its annihilator: every pair of spanning words is
    /// orthogonal mod 4 and the cardinality is 2^length.
    pub self_annihilating: bool,
    /// Every codeword has Euclidean weight divisible by 8.
    pub even: bool,
    pub cardinality: u128,
}

impl Z4Code {
    pub fn len(&self) -> usize {
        match self {
            Z4Code::Span(s) => s.len(),
            Z4Code::Union(u) => u.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn log2_size(&self) -> u32 {
        match self {
            Z4Code::Span(s) => s.log2_size(),
            Z4Code::Union(u) => u.log2_size(),
        }
    }

    pub fn size(&self) -> u128 {
        1u128 << self.log2_size()
    }

    pub fn contains(&self, w: &Z4Word) -> bool {
        match self {
            Z4Code::Span(s) => s.contains(w),
            Z4Code::Union(u) => u.contains(w),
        }
    }

    pub fn for_each(&self, f: &mut dyn FnMut(&Z4Word)) -> Result<()> {
        match self {
            Z4Code::Span(s) => s.for_each(f),
            Z4Code::Union(u) => u.for_each(f),
        }
    }

    pub fn spanning_family(&self) -> Vec<Z4Word> {
        match self {
            Z4Code::Span(s) => s.rows(),
            Z4Code::Union(u) => u.spanning_family(),
        }
    }

    /// Echelon span of the same word set.
    pub fn to_span(&self) -> Result<GeneratorSpan> {
        match self {
            Z4Code::Span(s) => Ok(s.clone()),
            Z4Code::Union(u) => u.to_span(),
        }
    }

    /// Set equality, decided by equal cardinality plus mutual containment
    /// of echelon rows. Exact for any pair of representations.
    pub fn equals_set(&self, other: &Z4Code) -> Result<bool> {
        if self.len() != other.len() || self.log2_size() != other.log2_size() {
            return Ok(false);
        }
        let a = self.to_span()?;
        let b = other.to_span()?;
        Ok(a.rows().iter().all(|r| b.contains(r)) && b.rows().iter().all(|r| a.contains(r)))
    }

    /// The symmetrized weight enumerator, by the cheapest exact route for
    /// the representation.
    pub fn swe(&self) -> Result<RatPoly> {
        match self {
            Z4Code::Span(_) => swe_enumerate(self),
            Z4Code::Union(u) => swe_transfer(u),
        }
    }

    /// Minimal Euclidean weight over the nonzero codewords.
    pub fn min_euclidean_weight(&self) -> Result<u32> {
        match self {
            Z4Code::Span(s) => {
                let mut best = u32::MAX;
                s.for_each(&mut |w| {
                    if !w.is_zero() {
                        best = best.min(w.euclidean_weight());
                    }
                })?;
                if best == u32::MAX {
                    return Err(Error::Invalid(
                        "minimal weight of the zero code is undefined".into(),
                    ));
                }
                Ok(best)
            }
            Z4Code::Union(u) => min_euclidean_weight_cosets(u),
        }
    }

    /// Structure flags. Orthogonality of the spanning family makes the
    /// Euclidean weight additive mod 8, so evenness then needs only the
    /// family; otherwise the code is enumerated under the size guard.
    pub fn predicates(&self) -> Result<Z4Flags> {
        let fam = self.spanning_family();
        let n = self.len();
        let orthogonal = fam
            .iter()
            .enumerate()
            .all(|(i, a)| fam.iter().skip(i).all(|b| a.inner(b) == 0));
        let family_even = fam.iter().all(|v| v.euclidean_weight() % 8 == 0);
        let even = if !family_even {
            false
        } else if orthogonal {
            true
        } else {
            let mut all_even = true;
            self.for_each(&mut |w| {
                if w.euclidean_weight() % 8 != 0 {
                    all_even = false;
                }
            })?;
            all_even
        };
        Ok(Z4Flags {
            self_annihilating: orthogonal && self.log2_size() as usize == n,
            even,
            cardinality: self.size(),
        })
    }
}

/// The plain frame construction: lifted codewords plus all per-pair (2,2)
/// shifts. Closed under addition for every linear input, because the lift's
/// additivity defect lies in the shift subgroup.
pub fn gamma_code(code: &BinaryCode, m: &Marking) -> Result<Z4Code> {
    Ok(Z4Code::Union(CosetUnion::new(
        code.clone(),
        m.clone(),
        ShiftRule::Full,
        None,
    )?))
}

/// The twisted frame construction: shift counts matching each codeword's
/// parity of mixed (0,1)-classified pairs, unioned with the glue translate.
/// Additive closure is verified and failure reported, since it depends on
/// the input code (doubly-even with the all-ones word in the intended uses).
pub fn gamma_twisted(code: &BinaryCode, m: &Marking) -> Result<Z4Code> {
    let glue = standard_glue(m)?;
    let cu = CosetUnion::new(
        code.clone(),
        m.clone(),
        ShiftRule::MatchedParity,
        Some(glue),
    )?;
    cu.verify_closure()?;
    Ok(Z4Code::Union(cu))
}

/// The image of a code under a signed coordinate permutation: digit i is
/// scaled by the unit signs[i] and placed at position positions[i]. Unit
/// scaling and permutation preserve additive closure, so the span of the
/// transformed spanning family is the transformed code.
pub fn monomial_image(code: &Z4Code, positions: &[usize], signs: &[u8]) -> Result<Z4Code> {
    let n = code.len();
    if positions.len() != n || signs.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: positions.len().min(signs.len()),
        });
    }
    let mut seen = vec![false; n];
    for &p in positions {
        if p >= n || seen[p] {
            return Err(Error::Invalid(
                "positions must be a permutation of the coordinates".into(),
            ));
        }
        seen[p] = true;
    }
    if signs.iter().any(|&s| s != 1 && s != 3) {
        return Err(Error::Invalid("signs must be the units 1 or 3".into()));
    }
    let gens: Vec<Z4Word> = code
        .spanning_family()
        .iter()
        .map(|w| {
            let mut img = Z4Word::zero(n);
            for i in 0..n {
                img.set_digit(positions[i], (w.digit(i) as u16 * signs[i] as u16 % 4) as u8);
            }
            img
        })
        .collect();
    Ok(Z4Code::Span(GeneratorSpan::from_generators(n, &gens)?))
}

fn swe_from_counts(n: usize, counts: &[Vec<i64>]) -> RatPoly {
    let mut p = RatPoly::zero();
    for (r, row) in counts.iter().enumerate() {
        for (s, &count) in row.iter().enumerate() {
            if count != 0 {
                p.add_term([(n - r - s) as u32, r as u32, s as u32], rat(count));
            }
        }
    }
    p
}

/// swe by visiting every codeword. The ground-truth route.
pub fn swe_enumerate(code: &Z4Code) -> Result<RatPoly> {
    let n = code.len();
    let mut counts = vec![vec![0i64; n + 1]; n + 1];
    code.for_each(&mut |w| {
        counts[w.ones_count() as usize][w.twos_count() as usize] += 1;
    })?;
    Ok(swe_from_counts(n, &counts))
}

/// The degree-2 monomial of one pair's digits: exponents of (A, B, C) count
/// digits equal to 0, odd, 2.
fn pair_monomial(n_vars_hint: (u8, u8)) -> [u32; 3] {
    let mut exp = [0u32; 3];
    for d in [n_vars_hint.0, n_vars_hint.1] {
        match d {
            0 => exp[0] += 1,
            2 => exp[2] += 1,
            _ => exp[1] += 1,
        }
    }
    exp
}

/// swe by a per-codeword product over the marked pairs.
///
/// For one codeword and branch, each pair contributes its two shift contents
/// as monomials m0, m1. The product of (m0 + m1) sums over all shift
/// choices; with a parity restriction the signed product of (m0 - m1)
/// implements the projector (1 +- sign)/2 onto the admitted shift count.
/// Exact in integers throughout.
pub fn swe_transfer(cu: &CosetUnion) -> Result<RatPoly> {
    let pairs = cu.marking().pairs();
    let mut acc: TriPoly<i64> = TriPoly::zero();
    for c in cu.code().words() {
        let hatc = hat_word(&c, cu.marking())?;
        let target = cu.target_parity(&c);
        for start in cu.branch_starts() {
            let base = hatc.add(&start);
            let mut plus = TriPoly::<i64>::one();
            let mut minus = TriPoly::<i64>::one();
            for &(i, j) in pairs {
                let m0 = pair_monomial((base.digit(i), base.digit(j)));
                let m1 = pair_monomial((base.digit(i) ^ 2, base.digit(j) ^ 2));
                let mut fp = TriPoly::monomial(m0, 1);
                fp.add_term(m1, 1);
                plus = plus.mul(&fp);
                if target.is_some() {
                    let mut fm = TriPoly::monomial(m0, 1);
                    fm.add_term(m1, -1);
                    minus = minus.mul(&fm);
                }
            }
            match target {
                None => acc = acc.add(&plus),
                Some(p) => {
                    let doubled = if p == 0 {
                        plus.add(&minus)
                    } else {
                        plus.sub(&minus)
                    };
                    acc = acc.add(&doubled.map_coeffs(|&v| {
                        assert_eq!(v % 2, 0, "projector sum must be even");
                        v / 2
                    }));
                }
            }
        }
    }
    Ok(to_rational(&acc))
}

/// swe through the closed formulas in the binary enumerator
/// smwe(x, y, z) -> smwe(A^2 + C^2, 2B^2, 2AC):
/// that substitution alone for the plain construction, and for the standard
/// twisted construction
/// (smwe(...) + (A^2 - C^2)^(d/2)) / 2
///   + 2^(d/2 - 1) ((A + C)^(d/2) + (-1)^(d/8) (A - C)^(d/2)) B^(d/2).
pub fn swe_closed_form(cu: &CosetUnion) -> Result<RatPoly> {
    let d = cu.len();
    let half = (d / 2) as u32;
    let base = smwe(cu.code(), cu.marking())?;
    let a = RatPoly::var(0);
    let b = RatPoly::var(1);
    let c = RatPoly::var(2);
    let images = [
        a.mul(&a).add(&c.mul(&c)),
        b.mul(&b).scale(&rat(2)),
        a.mul(&c).scale(&rat(2)),
    ];
    match (cu.rule(), cu.glue()) {
        (ShiftRule::Full, None) => Ok(base.substitute(&images)),
        (ShiftRule::MatchedParity, Some(g)) if *g == standard_glue(cu.marking())? => {
            if cu.code().dim() != d / 2 {
                return Err(Error::Invalid(
                    "twisted closed formula assumes a binary code of dimension \
                     half the length"
                        .into(),
                ));
            }
            let substituted = base.substitute(&images);
            let diff_sq = a.mul(&a).sub(&c.mul(&c)).pow(half);
            let sign = if (d / 8) % 2 == 0 { rat(1) } else { rat(-1) };
            let odd_part = a
                .add(&c)
                .pow(half)
                .add(&a.sub(&c).pow(half).scale(&sign))
                .mul(&RatPoly::monomial([0, half, 0], rat(1)))
                .scale(&rat(1i64 << (half - 1)));
            Ok(substituted
                .add(&diff_sq)
                .scale(&rat_frac(1, 2))
                .add(&odd_part))
        }
        _ => Err(Error::Invalid(
            "closed enumerator formulas cover the plain construction and the \
             standard twisted construction only"
                .into(),
        )),
    }
}

/// Minimal Euclidean weight of a coset union by per-pair minimization:
/// dynamic programming over (shift parity, still the zero word) states.
fn min_euclidean_weight_cosets(cu: &CosetUnion) -> Result<u32> {
    const INF: u32 = u32::MAX / 2;
    let pairs = cu.marking().pairs();
    let mut best = INF;
    for c in cu.code().words() {
        let hatc = hat_word(&c, cu.marking())?;
        let target = cu.target_parity(&c);
        for start in cu.branch_starts() {
            let base = hatc.add(&start);
            // dp[parity][is_zero]
            let mut dp = [[INF; 2]; 2];
            dp[0][1] = 0;
            for &(i, j) in pairs {
                let d0 = (base.digit(i), base.digit(j));
                let contents = [d0, (d0.0 ^ 2, d0.1 ^ 2)];
                let mut next = [[INF; 2]; 2];
                for par in 0..2 {
                    for zero in 0..2 {
                        if dp[par][zero] == INF {
                            continue;
                        }
                        for (shift, &(x, y)) in contents.iter().enumerate() {
                            let ew = Z4Word::from_digits(&[x, y])
                                .expect("digits are in range")
                                .euclidean_weight();
                            let nzero = zero & usize::from(x == 0 && y == 0);
                            let npar = par ^ shift;
                            let cand = dp[par][zero] + ew;
                            if cand < next[npar][nzero] {
                                next[npar][nzero] = cand;
                            }
                        }
                    }
                }
                dp = next;
            }
            for par in 0..2u32 {
                if let Some(p) = target {
                    if par != p {
                        continue;
                    }
                }
                best = best.min(dp[par as usize][0]);
            }
        }
    }
    if best == INF {
        return Err(Error::Invalid(
            "minimal weight of the zero code is undefined".into(),
        ));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn h8() -> BinaryCode {
        let rows: Vec<BitWord> = ["00001111", "00110011", "11000011", "01010101"]
            .iter()
            .map(|s| BitWord::parse(s).unwrap())
            .collect();
        BinaryCode::from_generators(8, &rows).unwrap()
    }

    fn marking_alpha() -> Marking {
        Marking::adjacent(8).unwrap()
    }

    fn marking_beta() -> Marking {
        Marking::new(8, &[(0, 1), (2, 3), (4, 6), (5, 7)]).unwrap()
    }

    fn marking_gamma() -> Marking {
        Marking::new(8, &[(0, 1), (2, 4), (3, 6), (5, 7)]).unwrap()
    }

    fn k8_table() -> RatPoly {
        RatPoly::from_int_terms(&[
            (1, [8, 0, 0]),
            (28, [6, 0, 2]),
            (70, [4, 0, 4]),
            (28, [2, 0, 6]),
            (1, [0, 0, 8]),
            (128, [0, 8, 0]),
        ])
    }

    fn k8_prime_table() -> RatPoly {
        RatPoly::from_int_terms(&[
            (1, [8, 0, 0]),
            (1, [0, 0, 8]),
            (12, [6, 0, 2]),
            (12, [2, 0, 6]),
            (38, [4, 0, 4]),
            (64, [3, 4, 1]),
            (64, [1, 4, 3]),
            (64, [0, 8, 0]),
        ])
    }

    #[test]
    fn word_arithmetic_matches_digitwise_model() {
        for aw in 0..16u8 {
            for bw in 0..16u8 {
                let a = Z4Word::from_digits(&[aw & 3, aw >> 2]).unwrap();
                let b = Z4Word::from_digits(&[bw & 3, bw >> 2]).unwrap();
                let sum = a.add(&b);
                for i in 0..2 {
                    assert_eq!(
                        sum.digit(i),
                        (a.digit(i) + b.digit(i)) % 4,
                        "packed addition must be digitwise mod 4"
                    );
                }
                assert!(a.add(&a.neg()).is_zero(), "w + (-w) = 0");
                for k in 0..4u8 {
                    let scaled = a.scale(k);
                    for i in 0..2 {
                        assert_eq!(scaled.digit(i), (a.digit(i) * k) % 4);
                    }
                }
                let naive_inner =
                    (0..2).map(|i| a.digit(i) * b.digit(i)).sum::<u8>() % 4;
                assert_eq!(a.inner(&b), naive_inner);
            }
        }
    }

    #[test]
    fn euclidean_weight_examples() {
        assert_eq!(
            Z4Word::parse("1111").unwrap().euclidean_weight(),
            4,
            "four unit digits weigh 4"
        );
        assert_eq!(
            Z4Word::parse("22").unwrap().euclidean_weight(),
            8,
            "two 2-digits weigh 8"
        );
        assert_eq!(Z4Word::parse("0123").unwrap().euclidean_weight(), 0 + 1 + 4 + 1);
    }

    #[test]
    fn hat_additivity_defect_is_a_double_shift() {
        let pairs = [(0u8, 0u8), (0, 1), (1, 0), (1, 1)];
        for &a in &pairs {
            for &b in &pairs {
                let ha = hat_pair(a);
                let hb = hat_pair(b);
                let hsum = hat_pair(((a.0 + b.0) % 2, (a.1 + b.1) % 2));
                let defect = (
                    (ha.0 + hb.0 + 4 - hsum.0) % 4,
                    (ha.1 + hb.1 + 4 - hsum.1) % 4,
                );
                let both_mixed = (a.0 != a.1) && (b.0 != b.1);
                let expected = if both_mixed { (2, 2) } else { (0, 0) };
                assert_eq!(
                    defect, expected,
                    "defect of {a:?} + {b:?} must be (2,2) exactly when both pairs are mixed"
                );
            }
        }
    }

    #[test]
    fn span_matches_brute_force_closure() {
        let cases: Vec<Vec<&str>> = vec![
            vec!["11"],
            vec!["20", "02"],
            vec!["12"],
            vec!["22"],
            vec!["10", "01"],
            vec!["31"],
            vec!["21"],
            vec!["13", "22"],
        ];
        for gens_s in cases {
            let gens: Vec<Z4Word> = gens_s.iter().map(|s| Z4Word::parse(s).unwrap()).collect();
            let span = GeneratorSpan::from_generators(2, &gens).unwrap();
            let mut closure: BTreeSet<Z4Word> = BTreeSet::new();
            closure.insert(Z4Word::zero(2));
            loop {
                let mut grew = false;
                let snapshot: Vec<Z4Word> = closure.iter().copied().collect();
                for a in &snapshot {
                    for g in &gens {
                        if closure.insert(a.add(g)) {
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            assert_eq!(
                span.size(),
                closure.len() as u128,
                "echelon size formula must match the closure of {gens_s:?}"
            );
            for bits in 0..16u8 {
                let w = Z4Word::from_digits(&[bits & 3, bits >> 2]).unwrap();
                assert_eq!(
                    span.contains(&w),
                    closure.contains(&w),
                    "membership of {w} in span of {gens_s:?}"
                );
            }
            let mut seen = BTreeSet::new();
            span.for_each(&mut |w| {
                assert!(seen.insert(*w), "enumeration repeated {w}");
            })
            .unwrap();
            assert_eq!(seen, closure, "enumeration must produce the closure");
        }
    }

    #[test]
    fn sigma2_swe_is_a_squared_plus_c_squared() {
        let span =
            GeneratorSpan::from_generators(2, &[Z4Word::parse("22").unwrap()]).unwrap();
        let swe = swe_enumerate(&Z4Code::Span(span)).unwrap();
        let expect = RatPoly::from_int_terms(&[(1, [2, 0, 0]), (1, [0, 0, 2])]);
        assert_eq!(swe, expect);
    }

    #[test]
    fn plain_frame_code_of_h8_matches_table() {
        let code = gamma_code(&h8(), &marking_alpha()).unwrap();
        assert_eq!(code.size(), 256, "|C| * 2^(d/2) = 16 * 16");
        let swe = swe_enumerate(&code).unwrap();
        assert_eq!(swe, k8_table(), "the A-B-C enumerator of the plain H8 frame code");
    }

    #[test]
    fn twisted_frame_code_of_h8_matches_table() {
        let code = gamma_twisted(&h8(), &marking_alpha()).unwrap();
        assert_eq!(code.size(), 256);
        let swe = swe_enumerate(&code).unwrap();
        assert_eq!(
            swe,
            k8_prime_table(),
            "the A-B-C enumerator of the twisted H8 frame code"
        );
    }

    #[test]
    fn swe_routes_agree_on_all_h8_frames() {
        let one = rat(1);
        for m in [marking_alpha(), marking_beta(), marking_gamma()] {
            for twisted in [false, true] {
                let code = if twisted {
                    gamma_twisted(&h8(), &m)
                } else {
                    gamma_code(&h8(), &m)
                }
                .unwrap();
                let cu = match &code {
                    Z4Code::Union(u) => u,
                    Z4Code::Span(_) => unreachable!(),
                };
                let by_enum = swe_enumerate(&code).unwrap();
                let by_transfer = swe_transfer(cu).unwrap();
                let by_formula = swe_closed_form(cu).unwrap();
                assert_eq!(
                    by_enum, by_transfer,
                    "transfer product must match enumeration (twisted = {twisted})"
                );
                assert_eq!(
                    by_enum, by_formula,
                    "closed formula must match enumeration (twisted = {twisted})"
                );
                assert_eq!(
                    by_enum.eval(&[one.clone(), one.clone(), one.clone()]),
                    rat(256),
                    "swe(1,1,1) counts the codewords"
                );
            }
        }
    }

    #[test]
    fn membership_decodes_both_branches() {
        let plain = gamma_code(&h8(), &marking_alpha()).unwrap();
        assert!(
            plain.contains(&Z4Word::parse("22000000").unwrap()),
            "a single (2,2) shift is a member"
        );
        assert!(
            !plain.contains(&Z4Word::parse("10000000").unwrap()),
            "mixed digit parity on a pair is impossible in the plain branch"
        );

        let twisted = gamma_twisted(&h8(), &marking_alpha()).unwrap();
        let glue = standard_glue(&marking_alpha()).unwrap();
        for c in h8().words() {
            let w = hat_word(&c, &marking_alpha()).unwrap().add(&glue);
            assert!(twisted.contains(&w), "lifted word plus glue must be a member");
        }
        assert!(
            !twisted.contains(&Z4Word::parse("22000000").unwrap()),
            "a single shift has odd count, excluded by the even-shift subgroup"
        );
        assert!(
            twisted.contains(&Z4Word::parse("22220000").unwrap()),
            "a double shift is a member of the twisted code"
        );
    }

    #[test]
    fn glue_orientation_is_validated() {
        let m = marking_alpha();
        let mut bad = Z4Word::zero(8);
        bad.set_digit(0, 1);
        bad.set_digit(1, 1);
        let err = CosetUnion::new(h8(), m, ShiftRule::MatchedParity, Some(bad));
        assert!(err.is_err(), "glue with two odd digits on a pair is rejected");
    }

    #[test]
    fn uniform_even_shift_rule_is_not_closed_for_every_marking() {
        // Under a marking that splits some codeword into an odd number of
        // mixed pairs, the hat lift of two such words picks up a single
        // (2,2) defect, landing outside the even-shift-count coset. The
        // matched-parity rule absorbs exactly that defect.
        let glue = standard_glue(&marking_gamma()).unwrap();
        let even = CosetUnion::new(
            h8(),
            marking_gamma(),
            ShiftRule::EvenCount,
            Some(glue),
        )
        .unwrap();
        assert!(
            even.verify_closure().is_err(),
            "uniform even shift counts must fail closure under this marking"
        );
        let matched = CosetUnion::new(
            h8(),
            marking_gamma(),
            ShiftRule::MatchedParity,
            Some(glue),
        )
        .unwrap();
        matched
            .verify_closure()
            .expect("matched parity closes for every doubly-even code with the all-ones word");
    }

    #[test]
    fn predicates_on_shift_subgroup_and_frames() {
        // The bare shift subgroup at length 4: cardinality 4, even, far from
        // self-annihilating.
        let gens = vec![Z4Word::parse("2200").unwrap(), Z4Word::parse("0022").unwrap()];
        let sigma = Z4Code::Span(GeneratorSpan::from_generators(4, &gens).unwrap());
        let flags = sigma.predicates().unwrap();
        assert!(!flags.self_annihilating, "cardinality 4 is not 2^4");
        assert!(flags.even, "every word has Euclidean weight 0 or 8");
        assert_eq!(flags.cardinality, 4);

        for twisted in [false, true] {
            let code = if twisted {
                gamma_twisted(&h8(), &marking_alpha())
            } else {
                gamma_code(&h8(), &marking_alpha())
            }
            .unwrap();
            let flags = code.predicates().unwrap();
            assert!(flags.self_annihilating, "E8 frame codes are self-annihilating");
            assert!(flags.even);
            assert_eq!(flags.cardinality, 256);
            assert_eq!(
                code.min_euclidean_weight().unwrap(),
                8,
                "minimal norm 2 in lattice units"
            );
        }
    }

    #[test]
    fn evenness_shortcut_agrees_with_enumeration() {
        // Non-orthogonal spans where the shortcut must fall back.
        let cases = vec![
            vec!["10"], // ew 1: odd
            vec!["11", "02"],
            vec!["1111", "2020"],
            vec!["1230", "0120"],
        ];
        for gens_s in cases {
            let len = gens_s[0].len();
            let gens: Vec<Z4Word> = gens_s.iter().map(|s| Z4Word::parse(s).unwrap()).collect();
            let code = Z4Code::Span(GeneratorSpan::from_generators(len, &gens).unwrap());
            let flags = code.predicates().unwrap();
            let mut all_even = true;
            code.for_each(&mut |w| {
                if w.euclidean_weight() % 8 != 0 {
                    all_even = false;
                }
            })
            .unwrap();
            assert_eq!(
                flags.even, all_even,
                "evenness flag must match enumeration for span of {gens_s:?}"
            );
        }
    }

    #[test]
    fn min_weight_dp_agrees_with_enumeration() {
        for m in [marking_alpha(), marking_beta(), marking_gamma()] {
            for twisted in [false, true] {
                let code = if twisted {
                    gamma_twisted(&h8(), &m)
                } else {
                    gamma_code(&h8(), &m)
                }
                .unwrap();
                let dp = code.min_euclidean_weight().unwrap();
                let mut brute = u32::MAX;
                code.for_each(&mut |w| {
                    if !w.is_zero() {
                        brute = brute.min(w.euclidean_weight());
                    }
                })
                .unwrap();
                assert_eq!(dp, brute, "DP minimum must match enumeration");
            }
        }
    }

    #[test]
    fn union_converts_to_equal_span() {
        let code = gamma_twisted(&h8(), &marking_alpha()).unwrap();
        let cu = match &code {
            Z4Code::Union(u) => u.clone(),
            Z4Code::Span(_) => unreachable!(),
        };
        let span = cu.to_span().unwrap();
        assert_eq!(span.size(), code.size());
        code.for_each(&mut |w| {
            assert!(span.contains(w), "span misses {w}");
        })
        .unwrap();
    }
}
