//! Virasoro frame decompositions.
//!
//! A rank-16d frame splits each of the four lattice/orbifold vertex algebra
//! constructions over a marked binary code into irreducible modules of a
//! tensor power of the central-charge-1/2 algebra. This module carries the
//! per-coordinate branching tables, the codeword enumerator built on them,
//! the closed-form decomposition polynomials, extraction and validation of
//! the two binary codes attached to a decomposition, and exact q-series
//! for graded dimensions.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive};

use crate::bits::BitWord;
use crate::codes::BinaryCode;
use crate::error::{Error, Result};
use crate::lattices::{coset_label, Eps};
use crate::markings::Marking;
use crate::poly::{rat, rat_frac, RatPoly};
use crate::z4::Z4Code;

/// Exact scalar m * 2^(-e/2) with m odd or zero.
///
/// Multiplicities stay in this ring until a decomposition is complete;
/// a final value outside the nonnegative integers is a hard error, which
/// catches transcription mistakes in the branching tables.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Sqrt2Scalar {
    m: i64,
    e: i32,
}

impl Sqrt2Scalar {
    fn normalized(mut m: i64, mut e: i32) -> Self {
        if m == 0 {
            return Sqrt2Scalar { m: 0, e: 0 };
        }
        while m % 2 == 0 {
            m /= 2;
            e -= 2;
        }
        Sqrt2Scalar { m, e }
    }

    pub fn zero() -> Self {
        Sqrt2Scalar { m: 0, e: 0 }
    }

    pub fn one() -> Self {
        Sqrt2Scalar { m: 1, e: 0 }
    }

    pub fn half() -> Self {
        Sqrt2Scalar { m: 1, e: 2 }
    }

    pub fn quarter() -> Self {
        Sqrt2Scalar { m: 1, e: 4 }
    }

    pub fn inv_sqrt2() -> Self {
        Sqrt2Scalar { m: 1, e: 1 }
    }

    pub fn from_integer(n: i64) -> Self {
        Sqrt2Scalar::normalized(n, 0)
    }

    pub fn is_zero(self) -> bool {
        self.m == 0
    }

    pub fn mul(self, other: Sqrt2Scalar) -> Sqrt2Scalar {
        Sqrt2Scalar::normalized(self.m * other.m, self.e + other.e)
    }

    /// Sum, defined only when both terms live on the same side of the
    /// integer/sqrt(2) dichotomy (half-exponents of equal parity).
    pub fn checked_add(self, other: Sqrt2Scalar) -> Option<Sqrt2Scalar> {
        if self.is_zero() {
            return Some(other);
        }
        if other.is_zero() {
            return Some(self);
        }
        if (self.e - other.e) % 2 != 0 {
            return None;
        }
        let (hi, lo) = if self.e >= other.e {
            (self, other)
        } else {
            (other, self)
        };
        let shift = ((hi.e - lo.e) / 2) as u32;
        Some(Sqrt2Scalar::normalized(hi.m + (lo.m << shift), hi.e))
    }

    /// The exact integer value, if the scalar is one.
    pub fn as_integer(self) -> Option<i64> {
        if self.m == 0 {
            return Some(0);
        }
        if self.e > 0 || self.e % 2 != 0 {
            return None;
        }
        Some(self.m << ((-self.e / 2) as u32))
    }
}

/// One tensor slot of a module label.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum VirasoroWeight {
    Zero,
    Half,
    Sixteenth,
}

impl VirasoroWeight {
    fn code(self) -> u64 {
        match self {
            VirasoroWeight::Zero => 0,
            VirasoroWeight::Half => 1,
            VirasoroWeight::Sixteenth => 2,
        }
    }

    fn from_code(c: u64) -> VirasoroWeight {
        match c {
            0 => VirasoroWeight::Zero,
            1 => VirasoroWeight::Half,
            _ => VirasoroWeight::Sixteenth,
        }
    }

    /// Sixteen times the conformal weight.
    fn weight_x16(self) -> u32 {
        match self {
            VirasoroWeight::Zero => 0,
            VirasoroWeight::Half => 8,
            VirasoroWeight::Sixteenth => 1,
        }
    }
}

pub const MAX_LABEL_LEN: usize = 32;

/// A tuple of slot weights, packed two bits per slot.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModuleLabel {
    len: u8,
    bits: u64,
}

impl ModuleLabel {
    pub fn new(len: usize) -> Result<Self> {
        if len > MAX_LABEL_LEN {
            return Err(Error::SizeGuard {
                what: "module label length",
                limit: MAX_LABEL_LEN,
                actual: len,
            });
        }
        Ok(ModuleLabel {
            len: len as u8,
            bits: 0,
        })
    }

    pub fn from_weights(ws: &[VirasoroWeight]) -> Result<Self> {
        let mut label = ModuleLabel::new(ws.len())?;
        for (i, w) in ws.iter().enumerate() {
            label.set(i, *w);
        }
        Ok(label)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> VirasoroWeight {
        debug_assert!(i < self.len());
        VirasoroWeight::from_code((self.bits >> (2 * i)) & 0b11)
    }

    pub fn set(&mut self, i: usize, w: VirasoroWeight) {
        debug_assert!(i < self.len());
        self.bits = (self.bits & !(0b11 << (2 * i))) | (w.code() << (2 * i));
    }

    pub fn concat(&self, other: &ModuleLabel) -> Result<ModuleLabel> {
        let len = self.len() + other.len();
        if len > MAX_LABEL_LEN {
            return Err(Error::SizeGuard {
                what: "module label length",
                limit: MAX_LABEL_LEN,
                actual: len,
            });
        }
        Ok(ModuleLabel {
            len: len as u8,
            bits: self.bits | (other.bits << (2 * self.len())),
        })
    }

    /// Slot counts (zero, half, sixteenth).
    pub fn counts(&self) -> (u32, u32, u32) {
        let mut n = [0u32; 3];
        for i in 0..self.len() {
            n[((self.bits >> (2 * i)) & 0b11) as usize] += 1;
        }
        (n[0], n[1], n[2])
    }

    /// Sixteen times the total conformal weight.
    pub fn weight_x16(&self) -> u32 {
        (0..self.len()).map(|i| self.get(i).weight_x16()).sum()
    }

    /// Bit mask of the slots carrying weight 1/16.
    pub fn sixteenth_mask(&self) -> u64 {
        let mut mask = 0u64;
        for i in 0..self.len() {
            if self.get(i) == VirasoroWeight::Sixteenth {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Rebuild with slot t of the result taken from slot map[t] of self.
    pub fn permute_slots(&self, map: &[usize]) -> Result<ModuleLabel> {
        if map.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: map.len(),
            });
        }
        let mut out = ModuleLabel::new(self.len())?;
        for (t, &src) in map.iter().enumerate() {
            if src >= self.len() {
                return Err(Error::IndexOutOfRange {
                    index: src,
                    len: self.len(),
                });
            }
            out.set(t, self.get(src));
        }
        Ok(out)
    }

    /// String over {0, h, s} for weights 0, 1/2, 1/16.
    pub fn render(&self) -> String {
        (0..self.len())
            .map(|i| match self.get(i) {
                VirasoroWeight::Zero => '0',
                VirasoroWeight::Half => 'h',
                VirasoroWeight::Sixteenth => 's',
            })
            .collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut label = ModuleLabel::new(s.len())?;
        for (i, ch) in s.chars().enumerate() {
            let w = match ch {
                '0' => VirasoroWeight::Zero,
                'h' => VirasoroWeight::Half,
                's' => VirasoroWeight::Sixteenth,
                _ => {
                    return Err(Error::Parse(format!(
                        "module label char must be one of 0, h, s; got {ch:?}"
                    )))
                }
            };
            label.set(i, w);
        }
        Ok(label)
    }
}

impl std::fmt::Debug for ModuleLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "M({})", self.render())
    }
}

/// Sparse multiplicity function over module labels of one fixed length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormalSum {
    len: usize,
    terms: BTreeMap<ModuleLabel, Sqrt2Scalar>,
}

impl FormalSum {
    pub fn new(len: usize) -> Self {
        FormalSum {
            len,
            terms: BTreeMap::new(),
        }
    }

    pub fn label_len(&self) -> usize {
        self.len
    }

    pub fn num_labels(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ModuleLabel, &Sqrt2Scalar)> {
        self.terms.iter()
    }

    pub fn multiplicity(&self, label: &ModuleLabel) -> Sqrt2Scalar {
        self.terms
            .get(label)
            .copied()
            .unwrap_or_else(Sqrt2Scalar::zero)
    }

    pub fn add_term(&mut self, label: ModuleLabel, s: Sqrt2Scalar) -> Result<()> {
        if label.len() != self.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                got: label.len(),
            });
        }
        if s.is_zero() {
            return Ok(());
        }
        let entry = self.terms.entry(label).or_insert_with(Sqrt2Scalar::zero);
        *entry = entry.checked_add(s).ok_or_else(|| {
            Error::Structure(format!(
                "multiplicity of {label:?} mixes integer and sqrt(2) parts"
            ))
        })?;
        if entry.is_zero() {
            self.terms.remove(&label);
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &FormalSum) -> Result<()> {
        for (label, s) in other.terms() {
            self.add_term(*label, *s)?;
        }
        Ok(())
    }

    /// All multiplicities as nonnegative integers; errors otherwise.
    pub fn integer_multiplicities(&self) -> Result<BTreeMap<ModuleLabel, u64>> {
        let mut out = BTreeMap::new();
        for (label, s) in &self.terms {
            let v = s.as_integer().ok_or_else(|| Error::NonIntegral {
                context: format!("label {label:?} has multiplicity {s:?}"),
            })?;
            if v < 0 {
                return Err(Error::NonIntegral {
                    context: format!("label {label:?} has multiplicity {v}"),
                });
            }
            out.insert(*label, v as u64);
        }
        Ok(out)
    }

    pub fn permute_slots(&self, map: &[usize]) -> Result<FormalSum> {
        let mut out = FormalSum::new(self.len);
        for (label, s) in &self.terms {
            out.add_term(label.permute_slots(map)?, *s)?;
        }
        Ok(out)
    }
}

fn m2(a: VirasoroWeight, b: VirasoroWeight) -> ModuleLabel {
    ModuleLabel::from_weights(&[a, b]).expect("two slots fit in a label")
}

/// Per-coordinate branching of the four cosets of the rank-1 lattice pair
/// inside its dual, in the straight (a = 0) and twisted (a = 1) sectors,
/// refined by an involution eigenvalue. Z4 values encode coset shifts
/// 0, 1/2, 1, -1/2 as 0, 1, 2, 3.
pub fn r_entry(a: u8, sign: Eps, z4val: u8) -> FormalSum {
    use VirasoroWeight::{Half, Sixteenth, Zero};
    let mut fs = FormalSum::new(2);
    let mut put = |label: ModuleLabel, s: Sqrt2Scalar| {
        fs.add_term(label, s).expect("fresh table entry");
    };
    match (a, sign, z4val & 0b11) {
        (0, Eps::Plus, 0) => put(m2(Zero, Zero), Sqrt2Scalar::one()),
        (0, Eps::Minus, 0) => put(m2(Half, Half), Sqrt2Scalar::one()),
        (0, Eps::Plus, 2) => put(m2(Half, Zero), Sqrt2Scalar::one()),
        (0, Eps::Minus, 2) => put(m2(Zero, Half), Sqrt2Scalar::one()),
        (0, _, _) => put(m2(Sixteenth, Sixteenth), Sqrt2Scalar::half()),
        (_, Eps::Plus, 0 | 2) => put(m2(Sixteenth, Half), Sqrt2Scalar::inv_sqrt2()),
        (_, Eps::Minus, 0 | 2) => put(m2(Sixteenth, Zero), Sqrt2Scalar::inv_sqrt2()),
        (_, Eps::Plus, _) => put(m2(Half, Sixteenth), Sqrt2Scalar::inv_sqrt2()),
        (_, Eps::Minus, _) => put(m2(Zero, Sixteenth), Sqrt2Scalar::inv_sqrt2()),
    }
    fs
}

/// Tensor product of per-coordinate sums, concatenating labels.
fn tensor(a: &FormalSum, b: &FormalSum) -> Result<FormalSum> {
    let mut out = FormalSum::new(a.label_len() + b.label_len());
    for (la, sa) in a.terms() {
        for (lb, sb) in b.terms() {
            out.add_term(la.concat(lb)?, sa.mul(*sb))?;
        }
    }
    Ok(out)
}

/// Four-slot branching of one marked coordinate pair: sum over the two
/// sign factorizations of alpha of tensor squares of the rank-1 table,
/// evaluated on the pair's coset label.
pub fn n_entry(a: u8, b: u8, alpha: Eps, beta: Eps, pair: (u8, u8)) -> FormalSum {
    let (g1, g2) = coset_label(b, beta, pair);
    let splits: [(Eps, Eps); 2] = match alpha {
        Eps::Plus => [(Eps::Plus, Eps::Plus), (Eps::Minus, Eps::Minus)],
        Eps::Minus => [(Eps::Plus, Eps::Minus), (Eps::Minus, Eps::Plus)],
    };
    let mut out = FormalSum::new(4);
    for (s1, s2) in splits {
        let prod = tensor(&r_entry(a, s1, g1), &r_entry(a, s2, g2))
            .expect("four slots fit in a label");
        out.add_assign(&prod).expect("table coefficients share parity");
    }
    out
}

/// The four framed constructions over a marked code: the lattice vertex
/// algebra, the same lattice with a twisted glue, and the involution
/// orbifold of each.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DecompKind {
    Untwisted,
    TwistedLattice,
    TwistedVoa,
    DoubleTwist,
}

impl DecompKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "untwisted" => Ok(DecompKind::Untwisted),
            "twisted-lattice" => Ok(DecompKind::TwistedLattice),
            "twisted-voa" => Ok(DecompKind::TwistedVoa),
            "double-twist" => Ok(DecompKind::DoubleTwist),
            _ => Err(Error::Parse(format!(
                "unknown decomposition kind {s:?}; expected untwisted, \
                 twisted-lattice, twisted-voa or double-twist"
            ))),
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            DecompKind::Untwisted => "untwisted",
            DecompKind::TwistedLattice => "twisted-lattice",
            DecompKind::TwistedVoa => "twisted-voa",
            DecompKind::DoubleTwist => "double-twist",
        }
    }
}

/// Sign (-1)^(d/8) entering every twisted product constraint.
fn eighth_sign(d: usize) -> Result<Eps> {
    if d % 8 != 0 {
        return Err(Error::Invalid(format!(
            "twisted constructions need a length divisible by 8, got {d}"
        )));
    }
    Ok(if (d / 8) % 2 == 0 {
        Eps::Plus
    } else {
        Eps::Minus
    })
}

#[derive(Clone, Copy)]
enum SignRule {
    Free,
    ProdIs(Eps),
}

impl SignRule {
    fn admits(self, minus_mask: u32) -> bool {
        match self {
            SignRule::Free => true,
            SignRule::ProdIs(Eps::Plus) => minus_mask.count_ones() % 2 == 0,
            SignRule::ProdIs(Eps::Minus) => minus_mask.count_ones() % 2 == 1,
        }
    }
}

#[derive(Clone, Copy)]
enum DeltaFilter {
    All,
    Zero,
    Positive,
}

impl DeltaFilter {
    fn admits(self, delta: usize) -> bool {
        match self {
            DeltaFilter::All => true,
            DeltaFilter::Zero => delta == 0,
            DeltaFilter::Positive => delta > 0,
        }
    }
}

struct Branch {
    a: u8,
    b: u8,
    mu: SignRule,
    eps: SignRule,
    filter: DeltaFilter,
    prefactor: Sqrt2Scalar,
}

fn branches(kind: DecompKind, d: usize) -> Result<Vec<Branch>> {
    let one = Sqrt2Scalar::one;
    let branch = |a, b, mu, eps, filter, prefactor| Branch {
        a,
        b,
        mu,
        eps,
        filter,
        prefactor,
    };
    use DeltaFilter::{All, Positive, Zero};
    use SignRule::{Free, ProdIs};
    Ok(match kind {
        DecompKind::Untwisted => vec![branch(0, 0, Free, Free, All, one())],
        DecompKind::TwistedLattice => {
            let s = eighth_sign(d)?;
            vec![
                branch(0, 0, Free, ProdIs(Eps::Plus), Zero, one()),
                branch(0, 0, Free, Free, Positive, Sqrt2Scalar::half()),
                branch(0, 1, Free, ProdIs(s), All, one()),
            ]
        }
        DecompKind::TwistedVoa => {
            let s = eighth_sign(d)?;
            vec![
                branch(0, 0, ProdIs(Eps::Plus), Free, Zero, one()),
                branch(0, 0, Free, Free, Positive, Sqrt2Scalar::half()),
                branch(1, 0, ProdIs(s), Free, All, one()),
            ]
        }
        DecompKind::DoubleTwist => {
            let s = eighth_sign(d)?;
            // The doubly twisted sector constrains both sign products, so
            // unlike its two neighbours it carries no compensating 1/2:
            // halving it breaks integrality, the coset route and the 3/4
            // tail of the closed form alike.
            vec![
                branch(0, 0, ProdIs(Eps::Plus), ProdIs(Eps::Plus), Zero, one()),
                branch(0, 0, Free, Free, Positive, Sqrt2Scalar::quarter()),
                branch(0, 1, Free, ProdIs(s), All, Sqrt2Scalar::half()),
                branch(1, 0, ProdIs(s), Free, All, Sqrt2Scalar::half()),
                branch(1, 1, ProdIs(s), ProdIs(s), All, one()),
            ]
        }
    })
}

pub const MAX_ENUMERATE_LEN: usize = 8;

/// Full decomposition by direct expansion over codewords and sign vectors.
///
/// Label slots run pair by pair in marking order: pair k of the marking
/// owns slots 4k..4k+4, the first two for its lower coordinate and the
/// last two for its upper one. Capped at length 8 (16 slots); longer
/// codes go through the closed-form polynomial instead.
pub fn decompose_enumerate(
    kind: DecompKind,
    code: &BinaryCode,
    m: &Marking,
) -> Result<FormalSum> {
    let d = code.len();
    if d != m.d() {
        return Err(Error::LengthMismatch {
            expected: d,
            got: m.d(),
        });
    }
    if d > MAX_ENUMERATE_LEN {
        return Err(Error::SizeGuard {
            what: "decomposition enumerator code length",
            limit: MAX_ENUMERATE_LEN,
            actual: d,
        });
    }
    let half = d / 2;
    let mut out = FormalSum::new(4 * half);
    for br in branches(kind, d)? {
        for word in code.words() {
            let pairs: Vec<(u8, u8)> = m
                .pairs()
                .iter()
                .map(|&(i, j)| (word.get(i) as u8, word.get(j) as u8))
                .collect();
            let delta = pairs.iter().filter(|&&(x, y)| x != y).count();
            if !br.filter.admits(delta) {
                continue;
            }
            for mu_mask in 0..(1u32 << half) {
                if !br.mu.admits(mu_mask) {
                    continue;
                }
                for eps_mask in 0..(1u32 << half) {
                    if !br.eps.admits(eps_mask) {
                        continue;
                    }
                    let mut acc = FormalSum::new(0);
                    acc.add_term(ModuleLabel::new(0)?, br.prefactor)?;
                    for (k, &pair) in pairs.iter().enumerate() {
                        let alpha = if mu_mask >> k & 1 == 0 {
                            Eps::Plus
                        } else {
                            Eps::Minus
                        };
                        let beta = if eps_mask >> k & 1 == 0 {
                            Eps::Plus
                        } else {
                            Eps::Minus
                        };
                        acc = tensor(&acc, &n_entry(br.a, br.b, alpha, beta, pair))?;
                    }
                    out.add_assign(&acc)?;
                }
            }
        }
    }
    check_decomposition(&out, true)?;
    Ok(out)
}

/// Decomposition of the lattice vertex algebra of a Z4 code over the
/// rank-1 frame, and of its involution orbifold.
///
/// Label slots run coordinate by coordinate: Z4 coordinate i owns slots
/// 2i and 2i+1.
pub fn decompose_from_z4(twisted_voa: bool, delta: &Z4Code) -> Result<FormalSum> {
    let d = delta.len();
    if d > MAX_ENUMERATE_LEN {
        return Err(Error::SizeGuard {
            what: "rank-1 frame decomposition length",
            limit: MAX_ENUMERATE_LEN,
            actual: d,
        });
    }
    let mut rules: Vec<(u8, SignRule)> = vec![(0, SignRule::Free)];
    if twisted_voa {
        let s = eighth_sign(d)?;
        rules = vec![
            (0, SignRule::ProdIs(Eps::Plus)),
            (1, SignRule::ProdIs(s)),
        ];
    }
    let mut out = FormalSum::new(2 * d);
    delta.for_each(&mut |word| {
        for &(a, rule) in &rules {
            for mu_mask in 0..(1u32 << d) {
                if !rule.admits(mu_mask) {
                    continue;
                }
                let mut acc = FormalSum::new(0);
                acc.add_term(
                    ModuleLabel::new(0).expect("empty label"),
                    Sqrt2Scalar::one(),
                )
                .expect("fresh accumulator");
                for i in 0..d {
                    let sign = if mu_mask >> i & 1 == 0 {
                        Eps::Plus
                    } else {
                        Eps::Minus
                    };
                    acc = tensor(&acc, &r_entry(a, sign, word.digit(i)))
                        .expect("slots bounded by 2d <= 16");
                }
                out.add_assign(&acc).expect("sector parities are uniform");
            }
        }
    })?;
    check_decomposition(&out, false)?;
    Ok(out)
}

/// Final-output invariants: integral nonnegative multiplicities, at most
/// one copy of any label with no weight-1/16 slot, and equal multiplicity
/// across labels sharing a 1/16 slot pattern. Integral total conformal
/// weight is demanded only where the input grading forces it.
fn check_decomposition(fs: &FormalSum, integral_weights: bool) -> Result<()> {
    let ints = fs.integer_multiplicities()?;
    let mut by_mask: BTreeMap<u64, u64> = BTreeMap::new();
    for (label, &v) in &ints {
        let mask = label.sixteenth_mask();
        if mask == 0 && v > 1 {
            return Err(Error::Structure(format!(
                "label {label:?} has no 1/16 slot but multiplicity {v}"
            )));
        }
        if integral_weights && label.weight_x16() % 16 != 0 {
            return Err(Error::Structure(format!(
                "label {label:?} has non-integral total conformal weight"
            )));
        }
        match by_mask.get(&mask) {
            None => {
                by_mask.insert(mask, v);
            }
            Some(&prev) if prev == v => {}
            Some(&prev) => {
                return Err(Error::Structure(format!(
                    "labels with the same 1/16 pattern differ in multiplicity \
                     ({prev} vs {v} at {label:?})"
                )));
            }
        }
    }
    Ok(())
}

/// Generating polynomial of a finished decomposition: each label counts
/// a^i b^j c^k by its numbers of weight-0, weight-1/2 and weight-1/16
/// slots.
pub fn polynomial_of_formal_sum(fs: &FormalSum) -> Result<RatPoly> {
    let mut poly = RatPoly::zero();
    for (label, v) in fs.integer_multiplicities()? {
        let (i, j, k) = label.counts();
        poly.add_term([i, j, k], rat(v as i64));
    }
    Ok(poly)
}

fn pair_images() -> [RatPoly; 3] {
    [
        // a^4 + 6 a^2 b^2 + b^4
        RatPoly::from_int_terms(&[(1, [4, 0, 0]), (6, [2, 2, 0]), (1, [0, 4, 0])]),
        // 2 c^4
        RatPoly::from_int_terms(&[(2, [0, 0, 4])]),
        // 4 a^3 b + 4 a b^3
        RatPoly::from_int_terms(&[(4, [3, 1, 0]), (4, [1, 3, 0])]),
    ]
}

fn alternating_pow(d: usize) -> RatPoly {
    // (a^4 - 2 a^2 b^2 + b^4)^(d/2)
    RatPoly::from_int_terms(&[(1, [4, 0, 0]), (-2, [2, 2, 0]), (1, [0, 4, 0])])
        .pow((d / 2) as u32)
}

fn twisted_tail(d: usize, sign: Eps) -> RatPoly {
    // 2^(d/2) ((a+b)^d + sign (a-b)^d) c^d
    let plus = RatPoly::from_int_terms(&[(1, [1, 0, 0]), (1, [0, 1, 0])]).pow(d as u32);
    let minus = RatPoly::from_int_terms(&[(1, [1, 0, 0]), (-1, [0, 1, 0])]).pow(d as u32);
    let sum = match sign {
        Eps::Plus => plus.add(&minus),
        Eps::Minus => plus.sub(&minus),
    };
    sum.mul(&RatPoly::monomial([0, 0, d as u32], rat(1)))
        .scale(&rat(1i64 << (d / 2)))
}

/// Closed-form decomposition polynomial of each construction, from the
/// symmetrized marked weight enumerator of the code alone.
pub fn decomposition_polynomial(kind: DecompKind, smwe: &RatPoly, d: usize) -> Result<RatPoly> {
    if d == 0 || d % 2 != 0 {
        return Err(Error::Invalid(format!(
            "decomposition polynomial needs a positive even length, got {d}"
        )));
    }
    if !smwe.is_homogeneous() || smwe.total_degree() != (d / 2) as u32 {
        return Err(Error::Invalid(format!(
            "marked enumerator must be homogeneous of degree {}, got degree {}",
            d / 2,
            smwe.total_degree()
        )));
    }
    let substituted = smwe.substitute(&pair_images());
    let poly = match kind {
        DecompKind::Untwisted => substituted,
        DecompKind::TwistedLattice | DecompKind::TwistedVoa => {
            let s = eighth_sign(d)?;
            alternating_pow(d)
                .scale(&rat_frac(1, 2))
                .add(&substituted.scale(&rat_frac(1, 2)))
                .add(&twisted_tail(d, s).scale(&rat_frac(1, 2)))
        }
        DecompKind::DoubleTwist => {
            let s = eighth_sign(d)?;
            alternating_pow(d)
                .scale(&rat_frac(3, 4))
                .add(&substituted.scale(&rat_frac(1, 4)))
                .add(&twisted_tail(d, s).scale(&rat_frac(3, 4)))
        }
    };
    if !poly.is_homogeneous() || poly.total_degree() != (2 * d) as u32 {
        return Err(Error::Structure(
            "decomposition polynomial is not homogeneous of twice the length".into(),
        ));
    }
    for (exp, coeff) in poly.terms() {
        if !coeff.is_integer() || coeff.is_negative() {
            return Err(Error::NonIntegral {
                context: format!("coefficient {coeff} at {exp:?}"),
            });
        }
    }
    if poly.coeff([(2 * d) as u32, 0, 0]) != rat(1) {
        return Err(Error::Structure(
            "decomposition polynomial does not start from a single vacuum".into(),
        ));
    }
    Ok(poly)
}

/// The two binary codes read off a decomposition: supports of the pure
/// 0/1-weight labels (bit = weight 1/2), and the patterns of 1/16 slots.
/// Both must be linear.
pub fn extract_codes(fs: &FormalSum) -> Result<(BinaryCode, BinaryCode)> {
    let r = fs.label_len();
    if r == 0 || r > MAX_LABEL_LEN {
        return Err(Error::SizeGuard {
            what: "extracted code length",
            limit: MAX_LABEL_LEN,
            actual: r,
        });
    }
    let ints = fs.integer_multiplicities()?;
    let mut c_words: Vec<BitWord> = Vec::new();
    let mut d_masks: std::collections::BTreeSet<u64> = std::collections::BTreeSet::new();
    for label in ints.keys() {
        let mask = label.sixteenth_mask();
        d_masks.insert(mask);
        if mask == 0 {
            let mut w = BitWord::zero(r);
            for i in 0..r {
                if label.get(i) == VirasoroWeight::Half {
                    w.set(i, true);
                }
            }
            c_words.push(w);
        }
    }
    let d_words: Vec<BitWord> = d_masks
        .iter()
        .map(|&mask| BitWord::from_bits(r, mask))
        .collect();
    let span_exactly = |words: &[BitWord], what: &str| -> Result<BinaryCode> {
        if words.is_empty() {
            return Err(Error::Structure(format!(
                "decomposition has no {what} words to extract"
            )));
        }
        let code = BinaryCode::from_generators(r, words)?;
        if (1u128 << code.dim()) != words.len() as u128 {
            return Err(Error::Structure(format!(
                "{what} supports are not closed under addition \
                 ({} words span dimension {})",
                words.len(),
                code.dim()
            )));
        }
        Ok(code)
    };
    let c = span_exactly(&c_words, "weight-pattern")?;
    let d = span_exactly(&d_words, "1/16-pattern")?;
    Ok((c, d))
}

/// Structure report for an extracted code pair.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CdReport {
    /// Every word of the first code has even weight.
    pub c_even: bool,
    /// Every word of the second code has weight divisible by 8.
    pub d_weights_div8: bool,
    /// The second code annihilates the first.
    pub d_in_c_dual: bool,
    /// With no extra module content the second code is the full annihilator.
    pub d_equals_c_dual: Option<bool>,
}

impl CdReport {
    pub fn all_pass(&self) -> bool {
        self.c_even
            && self.d_weights_div8
            && self.d_in_c_dual
            && self.d_equals_c_dual.unwrap_or(true)
    }
}

/// Weight of the AND of a set of words.
fn and_weight(len: usize, words: &[&BitWord]) -> usize {
    let mut bits = crate::bits::mask(len);
    for w in words {
        bits &= w.bits();
    }
    BitWord::from_bits(len, bits).weight()
}

/// All weights divisible by 8, checked on a basis: generator weights
/// 0 mod 8, pairwise intersections 0 mod 4, triple intersections 0 mod 2.
/// Expanding a sum of generators by inclusion-exclusion kills every
/// deeper intersection term modulo 8.
fn weights_divisible_by_8(code: &BinaryCode) -> bool {
    let basis = code.basis();
    let n = code.len();
    for (i, u) in basis.iter().enumerate() {
        if u.weight() % 8 != 0 {
            return false;
        }
        for (j, v) in basis.iter().enumerate().skip(i + 1) {
            if and_weight(n, &[u, v]) % 4 != 0 {
                return false;
            }
            for w in basis.iter().skip(j + 1) {
                if and_weight(n, &[u, v, w]) % 2 != 0 {
                    return false;
                }
            }
        }
    }
    true
}

/// Parity and duality checks on an extracted code pair. Basis-level
/// arguments keep every check polynomial in the dimension, so large
/// codes are fine.
pub fn validate_cd(c: &BinaryCode, d: &BinaryCode, holomorphic: bool) -> Result<CdReport> {
    if c.len() != d.len() {
        return Err(Error::LengthMismatch {
            expected: c.len(),
            got: d.len(),
        });
    }
    // Weight parity is additive, so a basis check settles the whole code.
    let c_even = c.basis().iter().all(|w| w.weight() % 2 == 0);
    let d_weights_div8 = weights_divisible_by_8(d);
    let d_in_c_dual = d
        .basis()
        .iter()
        .all(|u| c.basis().iter().all(|v| u.dot(v) == 0));
    let d_equals_c_dual = holomorphic.then(|| d_in_c_dual && c.dim() + d.dim() == c.len());
    Ok(CdReport {
        c_even,
        d_weights_div8,
        d_in_c_dual,
        d_equals_c_dual,
    })
}

/// Truncated power series in q^(1/48): coefficient t counts q to the
/// power (shift + t)/48.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QSeries {
    shift: i64,
    coeffs: Vec<i128>,
}

impl QSeries {
    fn constant_one(len: usize) -> QSeries {
        let mut coeffs = vec![0; len];
        coeffs[0] = 1;
        QSeries { shift: 0, coeffs }
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    /// Coefficient of q^(scaled/48); zero below the window, error above.
    pub fn coeff_at(&self, scaled: i64) -> Result<i128> {
        let t = scaled - self.shift;
        if t < 0 {
            return Ok(0);
        }
        if t >= self.coeffs.len() as i64 {
            return Err(Error::IndexOutOfRange {
                index: scaled as usize,
                len: self.coeffs.len(),
            });
        }
        Ok(self.coeffs[t as usize])
    }

    /// First nonzero scaled exponent, if any coefficient is nonzero.
    pub fn leading_exponent(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|&c| c != 0)
            .map(|t| self.shift + t as i64)
    }

    fn mul(&self, other: &QSeries, len: usize) -> QSeries {
        let mut coeffs = vec![0i128; len];
        for (i, &a) in self.coeffs.iter().enumerate().take(len) {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(len - i) {
                if b != 0 {
                    coeffs[i + j] += a * b;
                }
            }
        }
        QSeries {
            shift: self.shift + other.shift,
            coeffs,
        }
    }

    /// Aligned sum; precision stays one full window from the lower shift.
    fn add_scaled(&mut self, other: &QSeries, scale: i128) {
        if self.shift > other.shift {
            let pad = (self.shift - other.shift) as usize;
            let mut coeffs = vec![0i128; pad];
            coeffs.extend_from_slice(&self.coeffs);
            coeffs.truncate(self.coeffs.len());
            self.shift = other.shift;
            self.coeffs = coeffs;
        }
        let off = (other.shift - self.shift) as usize;
        for (j, &b) in other.coeffs.iter().enumerate() {
            let t = off + j;
            if t < self.coeffs.len() {
                self.coeffs[t] += scale * b;
            }
        }
    }
}

pub const MAX_SERIES_TERMS: usize = 200;

/// Product over n >= 1 of (1 + s q^(step(n)/48)) truncated to len terms.
fn fermionic_product(len: usize, s: i128, step: impl Fn(usize) -> usize) -> Vec<i128> {
    let mut coeffs = vec![0i128; len];
    coeffs[0] = 1;
    let mut n = 1;
    loop {
        let e = step(n);
        if e >= len {
            break;
        }
        for t in (e..len).rev() {
            let add = s * coeffs[t - e];
            coeffs[t] += add;
        }
        n += 1;
    }
    coeffs
}

/// Characters of the three irreducible modules of the central-charge-1/2
/// algebra, as q-series in 1/48 units: the vacuum and weight-1/2 modules
/// from the averaged fermion products, the weight-1/16 module from the
/// integer-mode product.
pub fn ising_characters(n_terms: usize) -> Result<[QSeries; 3]> {
    if n_terms == 0 || n_terms > MAX_SERIES_TERMS {
        return Err(Error::SizeGuard {
            what: "q-series precision",
            limit: MAX_SERIES_TERMS,
            actual: n_terms,
        });
    }
    // (1 +- q^(n - 1/2)) factors sit at scaled exponents 24(2n - 1).
    let plus = fermionic_product(n_terms, 1, |n| 24 * (2 * n - 1));
    let minus = fermionic_product(n_terms, -1, |n| 24 * (2 * n - 1));
    let avg = |sign: i128| -> Vec<i128> {
        plus.iter()
            .zip(&minus)
            .map(|(&p, &m)| {
                let v = p + sign * m;
                debug_assert!(v % 2 == 0, "fermion product averages are integral");
                v / 2
            })
            .collect()
    };
    let ch0 = QSeries {
        shift: -1,
        coeffs: avg(1),
    };
    let ch_half = QSeries {
        shift: -1,
        coeffs: avg(-1),
    };
    let ch_sixteenth = QSeries {
        shift: 2,
        coeffs: fermionic_product(n_terms, 1, |n| 48 * n),
    };
    Ok([ch0, ch_half, ch_sixteenth])
}

/// Graded dimension series of a framed construction with decomposition
/// polynomial P of degree r: substitute the three characters for the
/// variables.
pub fn graded_dimension(p: &RatPoly, r: usize, n_terms: usize) -> Result<QSeries> {
    if !p.is_homogeneous() || p.total_degree() != r as u32 {
        return Err(Error::Invalid(format!(
            "graded dimension needs a homogeneous degree-{r} polynomial"
        )));
    }
    let terms = p.integer_terms()?;
    let [ch0, ch_half, ch_sixteenth] = ising_characters(n_terms)?;
    let powers = |base: &QSeries, max: u32| -> Vec<QSeries> {
        let mut v = Vec::with_capacity(max as usize + 1);
        v.push(QSeries::constant_one(n_terms));
        for _ in 0..max {
            let next = v.last().expect("nonempty").mul(base, n_terms);
            v.push(next);
        }
        v
    };
    let r32 = r as u32;
    let pow0 = powers(&ch0, r32);
    let pow_half = powers(&ch_half, r32);
    let pow_sixteenth = powers(&ch_sixteenth, r32);
    let mut acc = QSeries {
        shift: -(r as i64),
        coeffs: vec![0; n_terms],
    };
    for (exp, coeff) in terms {
        let scale = coeff.to_i128().ok_or_else(|| Error::SizeGuard {
            what: "graded dimension coefficient bits",
            limit: 127,
            actual: 128,
        })?;
        let term = pow0[exp[0] as usize]
            .mul(&pow_half[exp[1] as usize], n_terms)
            .mul(&pow_sixteenth[exp[2] as usize], n_terms);
        acc.add_scaled(&term, scale);
    }
    if acc.coeffs.iter().any(|&c| c < 0) {
        return Err(Error::Structure(
            "graded dimension series has a negative coefficient".into(),
        ));
    }
    Ok(acc)
}

/// Exact invariance of a decomposition polynomial under the two modular
/// substitution matrices; the order-48 generator itself applies only in
/// the 48-slot case.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct InvarianceReport {
    pub s_invariant: bool,
    pub t_cubed_invariant: bool,
    pub t_invariant: Option<bool>,
}

impl InvarianceReport {
    pub fn all_pass(&self) -> bool {
        self.s_invariant && self.t_cubed_invariant && self.t_invariant.unwrap_or(true)
    }
}

pub fn modular_invariance_check(p: &RatPoly, r: usize) -> Result<InvarianceReport> {
    if !(r % 16 == 0 || r == 48) {
        return Err(Error::Invalid(format!(
            "modular invariance check needs 16 | r or r = 48, got {r}"
        )));
    }
    if !p.is_homogeneous() || p.total_degree() != r as u32 {
        return Err(Error::Invalid(format!(
            "modular invariance check needs a homogeneous degree-{r} polynomial"
        )));
    }
    let s = crate::cyclo::rho_s();
    let t = crate::cyclo::rho_t();
    Ok(InvarianceReport {
        s_invariant: crate::cyclo::is_invariant(p, &s),
        t_cubed_invariant: crate::cyclo::is_invariant(p, &t.pow(3)),
        t_invariant: (r == 48).then(|| crate::cyclo::is_invariant(p, &t)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::lattices::frame_quotient_code;
    use crate::markings::smwe;
    use VirasoroWeight::{Half, Sixteenth};

    fn label(s: &str) -> ModuleLabel {
        ModuleLabel::parse(s).expect("test label parses")
    }

    #[test]
    fn sqrt2_scalar_arithmetic() {
        let h = Sqrt2Scalar::half();
        assert_eq!(
            h.checked_add(h),
            Some(Sqrt2Scalar::one()),
            "1/2 + 1/2 = 1"
        );
        let r = Sqrt2Scalar::inv_sqrt2();
        assert_eq!(r.mul(r), Sqrt2Scalar::half(), "(1/sqrt2)^2 = 1/2");
        assert_eq!(
            r.checked_add(Sqrt2Scalar::one()),
            None,
            "1/sqrt2 + 1 mixes parities"
        );
        assert_eq!(
            r.checked_add(r),
            Some(Sqrt2Scalar { m: 1, e: -1 }),
            "1/sqrt2 + 1/sqrt2 = sqrt2"
        );
        assert_eq!(Sqrt2Scalar::from_integer(6).as_integer(), Some(6));
        assert_eq!(Sqrt2Scalar::half().as_integer(), None, "1/2 is not integral");
        let sum = Sqrt2Scalar::from_integer(3).checked_add(Sqrt2Scalar::from_integer(-3));
        assert_eq!(sum, Some(Sqrt2Scalar::zero()), "cancellation reaches zero");
    }

    #[test]
    fn label_round_trip_and_counts() {
        let l = label("0hs0");
        assert_eq!(l.render(), "0hs0");
        assert_eq!(l.get(1), Half);
        assert_eq!(l.get(2), Sixteenth);
        assert_eq!(l.counts(), (2, 1, 1));
        assert_eq!(l.weight_x16(), 9);
        assert_eq!(l.sixteenth_mask(), 0b0100);
        let perm = l.permute_slots(&[3, 2, 1, 0]).expect("valid permutation");
        assert_eq!(perm.render(), "0sh0", "slots reversed");
        assert!(
            ModuleLabel::parse("0hx").is_err(),
            "unknown slot characters are rejected"
        );
    }

    #[test]
    fn r_table_pins() {
        let fs = r_entry(0, Eps::Plus, 0);
        assert_eq!(
            fs.multiplicity(&label("00")),
            Sqrt2Scalar::one(),
            "straight sector, trivial coset, plus sign is the vacuum pair"
        );
        assert_eq!(
            r_entry(0, Eps::Minus, 0).multiplicity(&label("hh")),
            Sqrt2Scalar::one()
        );
        for z in [1u8, 3] {
            assert_eq!(
                r_entry(0, Eps::Plus, z).multiplicity(&label("ss")),
                Sqrt2Scalar::half(),
                "odd cosets give half a 1/16 pair"
            );
        }
        assert_eq!(
            r_entry(1, Eps::Minus, 0).multiplicity(&label("s0")),
            Sqrt2Scalar::inv_sqrt2()
        );
        for a in [0u8, 1] {
            for sign in [Eps::Plus, Eps::Minus] {
                assert_eq!(
                    r_entry(a, sign, 1),
                    r_entry(a, sign, 3),
                    "odd cosets branch identically"
                );
            }
        }
        for sign in [Eps::Plus, Eps::Minus] {
            assert_eq!(
                r_entry(1, sign, 0),
                r_entry(1, sign, 2),
                "twisted sector ignores the half-shift"
            );
        }
    }

    /// The sixteen four-slot branchings written out longhand, against the
    /// derived table. Cells are (coefficient numerator over 2, labels).
    #[test]
    fn n_table_matches_longhand() {
        type Cell = &'static [(i64, &'static str)];
        // (a, b, alpha, beta) -> cells for pairs (0,0), (1,1), (0,1)=(1,0)
        let p = Eps::Plus;
        let m = Eps::Minus;
        let table: &[(u8, u8, Eps, Eps, [Cell; 3])] = &[
            (0, 0, p, p, [
                &[(2, "0000"), (2, "hhhh")],
                &[(2, "h000"), (2, "0hhh")],
                &[(1, "ssss")],
            ]),
            (0, 0, m, p, [
                &[(2, "00hh"), (2, "hh00")],
                &[(2, "h0hh"), (2, "0h00")],
                &[(1, "ssss")],
            ]),
            (0, 0, p, m, [
                &[(2, "h0h0"), (2, "0h0h")],
                &[(2, "00h0"), (2, "hh0h")],
                &[(1, "ssss")],
            ]),
            (0, 0, m, m, [
                &[(2, "h00h"), (2, "0hh0")],
                &[(2, "000h"), (2, "hhh0")],
                &[(1, "ssss")],
            ]),
            // Mixed-pair cells track the coset rows: beta = + lands on the
            // (2,3) class and beta = - on (0,1), which is what pins the
            // half-weight slot to the beta = + row below.
            (0, 1, p, p, [
                &[(1, "ss00"), (1, "sshh")],
                &[(1, "ss00"), (1, "sshh")],
                &[(1, "h0ss"), (1, "0hss")],
            ]),
            (0, 1, m, p, [
                &[(1, "ss00"), (1, "sshh")],
                &[(1, "ss00"), (1, "sshh")],
                &[(1, "h0ss"), (1, "0hss")],
            ]),
            (0, 1, p, m, [
                &[(1, "ssh0"), (1, "ss0h")],
                &[(1, "ssh0"), (1, "ss0h")],
                &[(1, "00ss"), (1, "hhss")],
            ]),
            (0, 1, m, m, [
                &[(1, "ssh0"), (1, "ss0h")],
                &[(1, "ssh0"), (1, "ss0h")],
                &[(1, "00ss"), (1, "hhss")],
            ]),
            (1, 0, p, p, [
                &[(1, "s0s0"), (1, "shsh")],
                &[(1, "s0s0"), (1, "shsh")],
                &[(1, "0s0s"), (1, "hshs")],
            ]),
            (1, 0, p, m, [
                &[(1, "s0s0"), (1, "shsh")],
                &[(1, "s0s0"), (1, "shsh")],
                &[(1, "0s0s"), (1, "hshs")],
            ]),
            (1, 0, m, p, [
                &[(1, "shs0"), (1, "s0sh")],
                &[(1, "shs0"), (1, "s0sh")],
                &[(1, "hs0s"), (1, "0shs")],
            ]),
            (1, 0, m, m, [
                &[(1, "shs0"), (1, "s0sh")],
                &[(1, "shs0"), (1, "s0sh")],
                &[(1, "hs0s"), (1, "0shs")],
            ]),
            (1, 1, p, p, [
                &[(1, "0ss0"), (1, "hssh")],
                &[(1, "0ss0"), (1, "hssh")],
                &[(1, "s00s"), (1, "shhs")],
            ]),
            (1, 1, p, m, [
                &[(1, "0ss0"), (1, "hssh")],
                &[(1, "0ss0"), (1, "hssh")],
                &[(1, "s00s"), (1, "shhs")],
            ]),
            (1, 1, m, p, [
                &[(1, "hss0"), (1, "0ssh")],
                &[(1, "hss0"), (1, "0ssh")],
                &[(1, "sh0s"), (1, "s0hs")],
            ]),
            (1, 1, m, m, [
                &[(1, "hss0"), (1, "0ssh")],
                &[(1, "hss0"), (1, "0ssh")],
                &[(1, "sh0s"), (1, "s0hs")],
            ]),
        ];
        let half = Sqrt2Scalar::half();
        for &(a, b, alpha, beta, ref cells) in table {
            for (pairs, cell) in [
                (&[(0u8, 0u8)][..], cells[0]),
                (&[(1, 1)][..], cells[1]),
                (&[(0, 1), (1, 0)][..], cells[2]),
            ] {
                for &pair in pairs {
                    let mut expected = FormalSum::new(4);
                    for &(num2, l) in cell {
                        expected
                            .add_term(label(l), half.mul(Sqrt2Scalar::from_integer(num2)))
                            .expect("longhand entries are disjoint");
                    }
                    assert_eq!(
                        n_entry(a, b, alpha, beta, pair),
                        expected,
                        "entry a={a} b={b} alpha={alpha:?} beta={beta:?} pair={pair:?}"
                    );
                }
            }
        }
    }

    fn e8_gamma_poly() -> RatPoly {
        let plus = RatPoly::from_int_terms(&[(1, [1, 0, 0]), (1, [0, 1, 0])]).pow(16);
        let minus = RatPoly::from_int_terms(&[(1, [1, 0, 0]), (-1, [0, 1, 0])]).pow(16);
        plus.add(&minus)
            .scale(&rat_frac(1, 2))
            .add(&RatPoly::from_int_terms(&[(128, [0, 0, 16])]))
    }

    #[test]
    fn enumerator_reproduces_untwisted_hamming_polynomial() {
        let code = catalog::hamming8();
        let m = catalog::marking_alpha();
        let fs = decompose_enumerate(DecompKind::Untwisted, &code, &m)
            .expect("length-8 enumeration fits the cap");
        let poly = polynomial_of_formal_sum(&fs).expect("integral multiplicities");
        assert_eq!(poly, e8_gamma_poly(), "direct expansion matches the display");
    }

    #[test]
    fn enumerator_agrees_with_closed_form_on_all_kinds() {
        let code = catalog::hamming8();
        for kind in [
            DecompKind::Untwisted,
            DecompKind::TwistedLattice,
            DecompKind::TwistedVoa,
            DecompKind::DoubleTwist,
        ] {
            for m in [
                catalog::marking_alpha(),
                catalog::marking_beta(),
                catalog::marking_gamma(),
            ] {
                let fs = decompose_enumerate(kind, &code, &m).expect("enumeration succeeds");
                let via_fs = polynomial_of_formal_sum(&fs).expect("integral");
                let w = smwe(&code, &m).expect("marked enumerator");
                let closed =
                    decomposition_polynomial(kind, &w, 8).expect("closed form succeeds");
                assert_eq!(
                    via_fs,
                    closed,
                    "oracle equivalence for {:?} with marking {:?}",
                    kind,
                    m.pairs()
                );
            }
        }
    }

    #[test]
    fn double_twist_all_sixteenth_multiplicity() {
        let code = catalog::hamming8();
        let m = catalog::marking_gamma();
        let fs = decompose_enumerate(DecompKind::DoubleTwist, &code, &m)
            .expect("enumeration succeeds");
        let all_s = label("ssssssssssssssss");
        assert_eq!(
            fs.multiplicity(&all_s).as_integer(),
            Some(8),
            "the all-1/16 label of the double twist at the third marking"
        );
    }

    #[test]
    fn twin_kinds_share_their_polynomial() {
        let code = catalog::hamming8();
        for m in [
            catalog::marking_alpha(),
            catalog::marking_beta(),
            catalog::marking_gamma(),
        ] {
            let w = smwe(&code, &m).expect("marked enumerator");
            let a = decomposition_polynomial(DecompKind::TwistedLattice, &w, 8).expect("ok");
            let b = decomposition_polynomial(DecompKind::TwistedVoa, &w, 8).expect("ok");
            assert_eq!(a, b, "the two single twists have equal polynomials");
            let fs_a = decompose_enumerate(DecompKind::TwistedLattice, &code, &m).expect("ok");
            let fs_b = decompose_enumerate(DecompKind::TwistedVoa, &code, &m).expect("ok");
            assert_eq!(
                polynomial_of_formal_sum(&fs_a).expect("integral"),
                polynomial_of_formal_sum(&fs_b).expect("integral"),
                "and so do their enumerations"
            );
        }
    }

    #[test]
    fn rank_one_frame_small_codes() {
        let zero1 = Z4Code::Span(
            crate::z4::GeneratorSpan::from_generators(1, &[]).expect("zero code"),
        );
        let fs = decompose_from_z4(false, &zero1).expect("one coordinate");
        let expected: Vec<(&str, i64)> = vec![("00", 1), ("hh", 1)];
        assert_eq!(fs.num_labels(), 2, "two labels for the bare rank-1 lattice");
        for (l, v) in expected {
            assert_eq!(fs.multiplicity(&label(l)).as_integer(), Some(v));
        }

        let full1 = Z4Code::Span(
            crate::z4::GeneratorSpan::from_generators(1, &[
                crate::z4::Z4Word::from_digits(&[1]).expect("digit"),
            ])
            .expect("full code"),
        );
        let fs = decompose_from_z4(false, &full1).expect("one coordinate");
        // Each of the two odd cosets carries one irreducible 1/16 pair,
        // so the full dual quotient sees it twice.
        assert_eq!(fs.multiplicity(&label("ss")).as_integer(), Some(2));
        for l in ["00", "hh", "h0", "0h"] {
            assert_eq!(
                fs.multiplicity(&label(l)).as_integer(),
                Some(1),
                "straight cosets contribute one copy each"
            );
        }
    }

    #[test]
    fn rank_one_frame_counts_eigenspace_halves() {
        // 2^d labels, each once: the d-fold tensor splits into 2^(d-1)
        // irreducibles per involution eigenvalue.
        for d in [2usize, 4] {
            let zero = Z4Code::Span(
                crate::z4::GeneratorSpan::from_generators(d, &[]).expect("zero code"),
            );
            let fs = decompose_from_z4(false, &zero).expect("small length");
            assert_eq!(fs.num_labels(), 1 << d, "one label per sign vector");
            let plus_labels = fs
                .terms()
                .filter(|(l, _)| {
                    (0..l.len()).filter(|&i| l.get(i) == Half).count() % 4 == 0
                })
                .count();
            assert_eq!(
                plus_labels,
                1 << (d - 1),
                "half of the labels have an even number of weight-1 pairs"
            );
        }
    }

    #[test]
    fn z4_route_agrees_with_codeword_route() {
        let code = catalog::hamming8();
        for m in [
            catalog::marking_alpha(),
            catalog::marking_beta(),
            catalog::marking_gamma(),
        ] {
            // Slot t of the pair-ordered label sits at lattice coordinate
            // order position slot_map (enumerate -> coordinate labels).
            let mut map = vec![0usize; 16];
            for (k, &(i, j)) in m.pairs().iter().enumerate() {
                map[2 * i] = 4 * k;
                map[2 * i + 1] = 4 * k + 1;
                map[2 * j] = 4 * k + 2;
                map[2 * j + 1] = 4 * k + 3;
            }
            for (twisted_lattice, twisted_voa, kind) in [
                (false, false, DecompKind::Untwisted),
                (true, false, DecompKind::TwistedLattice),
                (false, true, DecompKind::TwistedVoa),
                (true, true, DecompKind::DoubleTwist),
            ] {
                let delta =
                    frame_quotient_code(&code, &m, twisted_lattice).expect("quotient code");
                let via_z4 = decompose_from_z4(twisted_voa, &delta).expect("z4 route");
                let via_code = decompose_enumerate(kind, &code, &m).expect("codeword route");
                assert_eq!(
                    via_code.permute_slots(&map).expect("valid relabeling"),
                    via_z4,
                    "routes agree for {kind:?} at marking {:?}",
                    m.pairs()
                );
            }
        }
    }

    #[test]
    fn closed_form_rejects_bad_inputs() {
        let w = RatPoly::from_int_terms(&[(1, [4, 0, 0])]);
        assert!(
            decomposition_polynomial(DecompKind::Untwisted, &w, 6).is_err(),
            "degree must be half the length"
        );
        let not_hom = RatPoly::from_int_terms(&[(1, [4, 0, 0]), (1, [1, 0, 0])]);
        assert!(
            decomposition_polynomial(DecompKind::Untwisted, &not_hom, 8).is_err(),
            "inhomogeneous enumerators are rejected"
        );
        let w6 = RatPoly::from_int_terms(&[(1, [3, 0, 0])]);
        assert!(
            decomposition_polynomial(DecompKind::DoubleTwist, &w6, 6).is_err(),
            "twisted kinds need a length divisible by 8"
        );
    }

    #[test]
    fn extracted_codes_of_untwisted_hamming() {
        let code = catalog::hamming8();
        let m = catalog::marking_alpha();
        let fs = decompose_enumerate(DecompKind::Untwisted, &code, &m).expect("enumeration");
        let (c, d) = extract_codes(&fs).expect("support sets are linear");
        assert_eq!(c.len(), 16);
        assert_eq!(c.dim(), 15, "all even-weight patterns appear");
        assert!(
            c.words().all(|w| w.weight() % 2 == 0),
            "first code is the even-weight code"
        );
        assert_eq!(d.dim(), 1, "1/16 patterns are empty or full");
        assert!(d.contains(&BitWord::all_ones(16)), "full pattern appears");

        let mut vacuum = FormalSum::new(4);
        vacuum
            .add_term(label("0000"), Sqrt2Scalar::one())
            .expect("fresh sum");
        let (c0, d0) = extract_codes(&vacuum).expect("trivial decomposition");
        assert_eq!((c0.dim(), d0.dim()), (0, 0), "vacuum alone gives zero codes");
    }

    #[test]
    fn cd_validation_reports() {
        let c = catalog::moonshine_c();
        let d = catalog::moonshine_d();
        let report = validate_cd(&c, &d, true).expect("equal lengths");
        assert!(report.c_even, "moonshine code is even");
        assert!(report.d_weights_div8, "partner weights divide by 8");
        assert!(report.d_in_c_dual, "partner annihilates the code");
        assert_eq!(report.d_equals_c_dual, Some(true), "partner is the full dual");
        assert!(report.all_pass());

        let full = BinaryCode::full(8);
        let trivial = BinaryCode::trivial(8);
        let r = validate_cd(&full, &trivial, false).expect("equal lengths");
        assert!(!r.c_even, "full space has odd words");
        assert!(r.d_in_c_dual, "zero code annihilates everything");
        assert_eq!(r.d_equals_c_dual, None, "duality untested when not holomorphic");
    }

    #[test]
    fn character_leading_terms() {
        let [ch0, ch_half, ch_sixteenth] = ising_characters(150).expect("within cap");
        assert_eq!(ch0.leading_exponent(), Some(-1), "vacuum starts at q^(-1/48)");
        assert_eq!(
            ch_half.leading_exponent(),
            Some(23),
            "weight-1/2 module starts at q^(1/2 - 1/48)"
        );
        assert_eq!(
            ch_sixteenth.leading_exponent(),
            Some(2),
            "weight-1/16 module starts at q^(1/24)"
        );
        // Shift removed, the vacuum counts 1, 0, 0, 0 q^(1/2)-steps then
        // a single state at q^2 (no weight-1 state in the vacuum module).
        for (scaled, want) in [(0, 1), (24, 0), (48, 0), (72, 0), (96, 1), (144, 1)] {
            assert_eq!(
                ch0.coeff_at(scaled - 1).expect("inside window"),
                want,
                "vacuum coefficient at scaled exponent {scaled}"
            );
        }
        assert!(
            ch0.coeffs().iter().all(|&c| c >= 0)
                && ch_half.coeffs().iter().all(|&c| c >= 0)
                && ch_sixteenth.coeffs().iter().all(|&c| c >= 0),
            "characters have nonnegative coefficients"
        );
        assert!(ising_characters(0).is_err(), "zero precision is rejected");
        assert!(
            ising_characters(MAX_SERIES_TERMS + 1).is_err(),
            "precision cap holds"
        );
    }

    #[test]
    fn graded_dimension_of_e8_polynomial() {
        let series = graded_dimension(&e8_gamma_poly(), 16, 100).expect("series");
        assert_eq!(
            series.coeff_at(-16).expect("window"),
            1,
            "one vacuum state at q^(-1/3)"
        );
        assert_eq!(
            series.coeff_at(32).expect("window"),
            248,
            "adjoint dimension at the first integer level"
        );
        for scaled in -16..32 {
            if (scaled + 16) % 48 != 0 {
                assert_eq!(
                    series.coeff_at(scaled).expect("window"),
                    0,
                    "fractional levels cancel at scaled exponent {scaled}"
                );
            }
        }
    }

    #[test]
    fn graded_dimension_of_vacuum_power_is_vacuum_product() {
        let p = RatPoly::from_int_terms(&[(1, [4, 0, 0])]);
        let series = graded_dimension(&p, 4, 60).expect("series");
        let [ch0, _, _] = ising_characters(60).expect("characters");
        let direct = ch0.mul(&ch0, 60).mul(&ch0, 60).mul(&ch0, 60);
        assert_eq!(series, direct, "monomial inputs multiply characters");
    }

    #[test]
    fn invariance_of_untwisted_hamming_polynomial() {
        let report = modular_invariance_check(&e8_gamma_poly(), 16).expect("report");
        assert!(report.s_invariant, "symmetric generator fixes the polynomial");
        assert!(report.t_cubed_invariant, "cube of the diagonal generator too");
        assert_eq!(report.t_invariant, None, "order-48 check only at 48 slots");
        assert!(report.all_pass());

        let bare = RatPoly::from_int_terms(&[(1, [16, 0, 0])]);
        let r = modular_invariance_check(&bare, 16).expect("report");
        assert!(!r.s_invariant, "a bare monomial is not invariant");
        assert!(
            modular_invariance_check(&bare, 20).is_err(),
            "slot count must be 16k or 48"
        );
    }
}
