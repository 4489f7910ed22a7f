//! Perfect matchings of the coordinate set and the symmetrized marked weight
//! enumerator they induce on a binary code.

use std::collections::HashSet;

use num_bigint::BigUint;

use crate::bits::BitWord;
use crate::codes::BinaryCode;
use crate::error::{Error, Result};
use crate::perm::{Perm, PermGroup};
use crate::poly::{rat, RatPoly};

/// Generating all matchings costs (d-1)!!; beyond 12 points that explodes.
pub const MAX_ALL_MATCHINGS: usize = 12;
/// Orbit breadth-first search refuses to grow past this many markings.
pub const ORBIT_CAP: usize = 10_000_000;

/// How a codeword meets one pair of a marking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairClass {
    /// Both coordinates 0.
    Zero,
    /// Both coordinates 1.
    Both,
    /// Only the first (lower-indexed) coordinate is 1.
    First,
    /// Only the second coordinate is 1.
    Second,
}

impl PairClass {
    pub fn is_mixed(self) -> bool {
        matches!(self, PairClass::First | PairClass::Second)
    }
}

/// A perfect matching of {0, .., d-1} into d/2 pairs, kept canonical:
/// each pair is (low, high) and pairs are sorted by their low coordinate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Marking {
    d: usize,
    pairs: Vec<(usize, usize)>,
}

impl std::fmt::Debug for Marking {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Marking{:?}", self.pairs)
    }
}

impl Marking {
    pub fn new(d: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if d == 0 || d % 2 != 0 || d > 64 {
            return Err(Error::Invalid(format!("marking needs even length in 2..=64, got {d}")));
        }
        if pairs.len() != d / 2 {
            return Err(Error::Invalid(format!(
                "need {} pairs for length {d}, got {}",
                d / 2,
                pairs.len()
            )));
        }
        let mut seen = vec![false; d];
        let mut canon: Vec<(usize, usize)> = Vec::with_capacity(d / 2);
        for &(a, b) in pairs {
            if a >= d || b >= d {
                return Err(Error::IndexOutOfRange { index: a.max(b), len: d });
            }
            if a == b || seen[a] || seen[b] {
                return Err(Error::Invalid(format!("pairs do not partition 0..{d}")));
            }
            seen[a] = true;
            seen[b] = true;
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        Ok(Marking { d, pairs: canon })
    }

    /// Adjacent pairs (0,1), (2,3), ...; the default frame layout.
    pub fn adjacent(d: usize) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = (0..d / 2).map(|k| (2 * k, 2 * k + 1)).collect();
        Marking::new(d, &pairs)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Classifies `c` against every pair, in pair order.
    pub fn classify(&self, c: &BitWord) -> Result<Vec<PairClass>> {
        if c.len() != self.d {
            return Err(Error::LengthMismatch {
                expected: self.d,
                got: c.len(),
            });
        }
        Ok(self
            .pairs
            .iter()
            .map(|&(a, b)| match (c.get(a), c.get(b)) {
                (false, false) => PairClass::Zero,
                (true, true) => PairClass::Both,
                (true, false) => PairClass::First,
                (false, true) => PairClass::Second,
            })
            .collect())
    }

    /// Relabels coordinates by `g`; the result is canonicalized.
    pub fn permuted(&self, g: &Perm) -> Marking {
        let pairs: Vec<(usize, usize)> = self
            .pairs
            .iter()
            .map(|&(a, b)| (g.apply(a), g.apply(b)))
            .collect();
        Marking::new(self.d, &pairs).expect("permuting a partition yields a partition")
    }
}

/// (k, l, delta): weight, count of (1,1)-pairs, count of mixed pairs.
pub fn pair_split(c: &BitWord, m: &Marking) -> Result<(usize, usize, usize)> {
    let classes = m.classify(c)?;
    let l = classes.iter().filter(|&&p| p == PairClass::Both).count();
    let delta = classes.iter().filter(|&&p| p.is_mixed()).count();
    Ok((2 * l + delta, l, delta))
}

/// All perfect matchings of {0..d-1}, canonical, in a fixed generation order
/// (always match the smallest free point first).
pub fn all_matchings(d: usize) -> Result<Vec<Marking>> {
    if d == 0 || d % 2 != 0 {
        return Err(Error::Invalid(format!("matchings need even d, got {d}")));
    }
    if d > MAX_ALL_MATCHINGS {
        return Err(Error::SizeGuard {
            what: "matching generation length",
            limit: MAX_ALL_MATCHINGS,
            actual: d,
        });
    }
    let mut out = Vec::new();
    let mut used = vec![false; d];
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(d / 2);
    fn rec(
        d: usize,
        used: &mut Vec<bool>,
        pairs: &mut Vec<(usize, usize)>,
        out: &mut Vec<Marking>,
    ) {
        let Some(a) = (0..d).find(|&i| !used[i]) else {
            out.push(Marking::new(d, pairs).expect("generated pairs partition the set"));
            return;
        };
        used[a] = true;
        for b in a + 1..d {
            if used[b] {
                continue;
            }
            used[b] = true;
            pairs.push((a, b));
            rec(d, used, pairs, out);
            pairs.pop();
            used[b] = false;
        }
        used[a] = false;
    }
    rec(d, &mut used, &mut pairs, &mut out);
    Ok(out)
}

/// Symmetrized marked weight enumerator: sum over codewords of
/// x^(zero pairs) y^(mixed pairs) z^((1,1) pairs). Homogeneous of degree d/2.
pub fn smwe(code: &BinaryCode, m: &Marking) -> Result<RatPoly> {
    if code.len() != m.d() {
        return Err(Error::LengthMismatch {
            expected: m.d(),
            got: code.len(),
        });
    }
    if code.dim() > crate::codes::MAX_ENUM_DIM {
        return Err(Error::SizeGuard {
            what: "smwe enumeration dimension",
            limit: crate::codes::MAX_ENUM_DIM,
            actual: code.dim(),
        });
    }
    let half = m.pair_count() as u32;
    let masks: Vec<(u64, u64)> = m
        .pairs()
        .iter()
        .map(|&(a, b)| (1u64 << a, 1u64 << b))
        .collect();
    let mut poly = RatPoly::zero();
    for w in code.words() {
        let bits = w.bits();
        let mut l = 0u32;
        let mut delta = 0u32;
        for &(ma, mb) in &masks {
            match (bits & ma != 0, bits & mb != 0) {
                (true, true) => l += 1,
                (true, false) | (false, true) => delta += 1,
                (false, false) => {}
            }
        }
        poly.add_term([half - l - delta, delta, l], rat(1));
    }
    Ok(poly)
}

/// One orbit of markings under a permutation group.
pub struct MarkingOrbit {
    pub representative: Marking,
    pub orbit_size: usize,
    pub stabilizer_order: BigUint,
    pub smwe: RatPoly,
}

/// Partitions all matchings of the code length into orbits of `group`.
/// Representatives are the generation-order-first members of each orbit.
pub fn classify_orbits(code: &BinaryCode, group: &PermGroup) -> Result<Vec<MarkingOrbit>> {
    if group.degree() != code.len() {
        return Err(Error::LengthMismatch {
            expected: code.len(),
            got: group.degree(),
        });
    }
    let matchings = all_matchings(code.len())?;
    let mut seen: HashSet<Marking> = HashSet::new();
    let mut out = Vec::new();
    for m in &matchings {
        if seen.contains(m) {
            continue;
        }
        let orb = marking_orbit(group, m)?;
        for x in &orb {
            seen.insert(x.clone());
        }
        out.push(MarkingOrbit {
            representative: m.clone(),
            orbit_size: orb.len(),
            stabilizer_order: crate::perm::stabilizer_order(group, orb.len())?,
            smwe: smwe(code, m)?,
        });
    }
    debug_assert_eq!(
        out.iter().map(|o| o.orbit_size).sum::<usize>(),
        matchings.len(),
        "orbit sizes must partition the matching count"
    );
    Ok(out)
}

/// Orbit of one marking under the group, without enumerating all matchings.
pub fn marking_orbit(group: &PermGroup, m: &Marking) -> Result<Vec<Marking>> {
    crate::perm::orbit(
        group.gens(),
        m.clone(),
        |g, mk| mk.permuted(g),
        ORBIT_CAP,
    )
}

/// The five counts of weight-8 codewords by their number of (1,1)-pairs.
pub fn cm_parameters(code: &BinaryCode, m: &Marking) -> Result<[u64; 5]> {
    if code.len() != m.d() {
        return Err(Error::LengthMismatch {
            expected: m.d(),
            got: code.len(),
        });
    }
    if code.dim() > crate::codes::MAX_ENUM_DIM {
        return Err(Error::SizeGuard {
            what: "cm parameter enumeration dimension",
            limit: crate::codes::MAX_ENUM_DIM,
            actual: code.dim(),
        });
    }
    let mut counts = [0u64; 5];
    for w in code.words() {
        if w.weight() != 8 {
            continue;
        }
        let (_, l, _) = pair_split(&w, m)?;
        if l <= 4 {
            counts[l] += 1;
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_counts_are_double_factorials() {
        assert_eq!(all_matchings(2).unwrap().len(), 1);
        assert_eq!(all_matchings(4).unwrap().len(), 3);
        assert_eq!(all_matchings(6).unwrap().len(), 15);
        assert_eq!(all_matchings(8).unwrap().len(), 105);
        assert_eq!(all_matchings(10).unwrap().len(), 945);
    }

    #[test]
    fn matchings_are_distinct_and_canonical() {
        let ms = all_matchings(6).unwrap();
        let set: HashSet<_> = ms.iter().cloned().collect();
        assert_eq!(set.len(), ms.len(), "no duplicate matchings");
        for m in &ms {
            for &(a, b) in m.pairs() {
                assert!(a < b, "pairs store (low, high)");
            }
            for w in m.pairs().windows(2) {
                assert!(w[0].0 < w[1].0, "pairs sorted by low point");
            }
        }
    }

    #[test]
    fn pair_split_examples() {
        let m = Marking::new(4, &[(0, 1), (2, 3)]).unwrap();
        let c = BitWord::parse("1100").unwrap();
        assert_eq!(pair_split(&c, &m).unwrap(), (2, 1, 0), "one full pair");
        let c2 = BitWord::parse("1001").unwrap();
        assert_eq!(pair_split(&c2, &m).unwrap(), (2, 0, 2), "two mixed pairs");
        let zero = BitWord::zero(4);
        assert_eq!(pair_split(&zero, &m).unwrap(), (0, 0, 0));
    }

    #[test]
    fn smwe_of_trivial_code_is_pure_x_power() {
        let code = BinaryCode::trivial(6);
        let m = Marking::adjacent(6).unwrap();
        let p = smwe(&code, &m).unwrap();
        assert_eq!(p, RatPoly::monomial([3, 0, 0], rat(1)));
    }

    #[test]
    fn smwe_at_all_ones_counts_codewords() {
        let gens = [BitWord::parse("1100").unwrap(), BitWord::parse("1010").unwrap()];
        let code = BinaryCode::from_generators(4, &gens).unwrap();
        let m = Marking::new(4, &[(0, 3), (1, 2)]).unwrap();
        let p = smwe(&code, &m).unwrap();
        assert_eq!(p.eval(&[rat(1), rat(1), rat(1)]), rat(4), "smwe(1,1,1) = |C|");
    }

    #[test]
    fn smwe_is_permutation_invariant() {
        let gens = [BitWord::parse("110100").unwrap(), BitWord::parse("011010").unwrap()];
        let code = BinaryCode::from_generators(6, &gens).unwrap();
        let m = Marking::adjacent(6).unwrap();
        let g = Perm::from_cycles(6, &[&[0, 4, 2], &[1, 5]]).unwrap();
        let permuted_code = BinaryCode::from_generators(
            6,
            &code.basis().iter().map(|w| g.apply_word(w)).collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(
            smwe(&code, &m).unwrap(),
            smwe(&permuted_code, &m.permuted(&g)).unwrap(),
            "relabeling code and marking together preserves smwe"
        );
    }

    #[test]
    fn classify_zero_code_markings_under_sym4() {
        let code = BinaryCode::trivial(4);
        let s4 = PermGroup::new(
            4,
            vec![
                Perm::from_cycles(4, &[&[0, 1]]).unwrap(),
                Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap(),
            ],
        )
        .unwrap();
        let orbits = classify_orbits(&code, &s4).unwrap();
        assert_eq!(orbits.len(), 1, "Sym_4 is transitive on the 3 matchings");
        assert_eq!(orbits[0].orbit_size, 3);
        assert_eq!(orbits[0].stabilizer_order, BigUint::from(8u32), "24 / 3 = 8");
    }
}
