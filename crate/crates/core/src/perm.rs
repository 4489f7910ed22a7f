//! Permutations on up to 64 points and stabilizer-chain machinery.
//!
//! Groups carry a deterministic Schreier-Sims chain over the fixed base
//! 0, 1, 2, ... so that prefix pointwise stabilizers are always available by
//! slicing levels. Orders are exact (`BigUint`).

use std::collections::HashSet;
use std::hash::Hash;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::bits::BitWord;
use crate::error::{Error, Result};

/// A permutation of {0, .., n-1}, stored as its image table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Perm {
    img: Vec<u8>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        debug_assert!(degree <= 64);
        Perm {
            img: (0..degree as u8).collect(),
        }
    }

    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n == 0 || n > 64 {
            return Err(Error::SizeGuard {
                what: "permutation degree",
                limit: 64,
                actual: n,
            });
        }
        let mut seen = vec![false; n];
        for &x in images {
            if x >= n || seen[x] {
                return Err(Error::Invalid(format!(
                    "image table {images:?} is not a bijection on 0..{n}"
                )));
            }
            seen[x] = true;
        }
        Ok(Perm {
            img: images.iter().map(|&x| x as u8).collect(),
        })
    }

    /// Builds from images of 1..n (the on-disk convention).
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let shifted: Vec<usize> = images
            .iter()
            .map(|&x| x.checked_sub(1).ok_or_else(|| {
                Error::Parse("one-based image 0 encountered".into())
            }))
            .collect::<Result<_>>()?;
        Perm::from_images(&shifted)
    }

    /// Builds from disjoint cycles over 0-based points.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        for cyc in cycles {
            for w in 0..cyc.len() {
                let from = cyc[w];
                let to = cyc[(w + 1) % cyc.len()];
                if from >= degree || to >= degree {
                    return Err(Error::IndexOutOfRange {
                        index: from.max(to),
                        len: degree,
                    });
                }
                images[from] = to;
            }
        }
        Perm::from_images(&images)
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.img[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// Composition in application order: `(a.then(b))(x) = b(a(x))`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            img: self.img.iter().map(|&x| other.img[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut img = vec![0u8; self.img.len()];
        for (i, &x) in self.img.iter().enumerate() {
            img[x as usize] = i as u8;
        }
        Perm { img }
    }

    /// Coordinate action on words: bit `i` of `w` lands at position `self(i)`.
    pub fn apply_word(&self, w: &BitWord) -> BitWord {
        debug_assert_eq!(self.degree(), w.len());
        let mut out = BitWord::zero(w.len());
        for i in 0..w.len() {
            if w.get(i) {
                out.set(self.apply(i), true);
            }
        }
        out
    }

    pub fn one_based_images(&self) -> Vec<usize> {
        self.img.iter().map(|&x| x as usize + 1).collect()
    }
}

impl std::fmt::Debug for Perm {
    /// Cycle notation on 0-based points; the identity prints as `()`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut seen = vec![false; self.img.len()];
        let mut wrote = false;
        for start in 0..self.img.len() {
            if seen[start] || self.apply(start) == start {
                seen[start] = true;
                continue;
            }
            write!(f, "(")?;
            let mut p = start;
            let mut first = true;
            while !seen[p] {
                seen[p] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
                first = false;
                p = self.apply(p);
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

struct TransEntry {
    /// Representative mapping the base point to this orbit point.
    to: Perm,
    back: Perm,
}

struct Level {
    point: usize,
    orbit: Vec<usize>,
    transversal: Vec<Option<TransEntry>>,
    /// Watermarks over (orbit, strong list): Schreier pairs below these
    /// indices have been processed. Both lists are append-only, so the
    /// rectangle stays valid as the chain grows.
    done_orbit: usize,
    done_strong: usize,
}

impl Level {
    fn new(point: usize, degree: usize) -> Self {
        let mut transversal: Vec<Option<TransEntry>> = (0..degree).map(|_| None).collect();
        transversal[point] = Some(TransEntry {
            to: Perm::identity(degree),
            back: Perm::identity(degree),
        });
        Level {
            point,
            orbit: vec![point],
            transversal,
            done_orbit: 0,
            done_strong: 0,
        }
    }
}

/// Stabilizer chain over the base 0, 1, .., degree-1.
///
/// Strong generators live in one global insertion-ordered list; the generator
/// set acting at level `l` is every strong generator whose tag is >= `l`
/// (a tag-`m` generator fixes base points 0..m pointwise, so it belongs to
/// every prefix stabilizer up to depth m).
pub struct Chain {
    levels: Vec<Level>,
    strong: Vec<(Perm, usize)>,
}

impl Chain {
    fn build(degree: usize, gens: &[Perm]) -> Chain {
        let mut chain = Chain {
            levels: (0..degree).map(|p| Level::new(p, degree)).collect(),
            strong: Vec::new(),
        };
        let mut queue: std::collections::VecDeque<(Perm, usize)> = gens
            .iter()
            .filter(|g| !g.is_identity())
            .map(|g| (g.clone(), 0))
            .collect();
        loop {
            if let Some((g, from)) = queue.pop_front() {
                chain.sift_install(g, from);
                continue;
            }
            // No pending residues: close the first level with unprocessed
            // Schreier pairs. A full quiet scan means the chain is complete.
            let mut progressed = false;
            for l in 0..degree {
                chain.expand_orbit(l);
                if chain.has_new_pairs(l) {
                    chain.process_new_pairs(l, &mut queue);
                    progressed = true;
                    break;
                }
            }
            if !progressed && queue.is_empty() {
                break;
            }
        }
        chain
    }

    /// Sifts `g` starting at level `from`; a nontrivial residue becomes a new
    /// strong generator tagged with the level where sifting got stuck.
    fn sift_install(&mut self, mut g: Perm, from: usize) {
        for l in from..self.levels.len() {
            if g.is_identity() {
                return;
            }
            let point = self.levels[l].point;
            let p = g.apply(point);
            if p == point {
                continue;
            }
            match &self.levels[l].transversal[p] {
                Some(entry) => g = g.then(&entry.back),
                None => {
                    self.strong.push((g, l));
                    // Fill the slot now: later residues landing on the same
                    // point must be absorbed, not installed as duplicates.
                    // This bounds installs by the total orbit growth.
                    self.expand_orbit(l);
                    return;
                }
            }
        }
        debug_assert!(
            g.is_identity(),
            "a residue fixing every base point must be trivial"
        );
    }

    fn applicable(&self, l: usize, strong_idx: usize) -> bool {
        self.strong[strong_idx].1 >= l
    }

    fn expand_orbit(&mut self, l: usize) {
        let mut head = 0;
        while head < self.levels[l].orbit.len() {
            let p = self.levels[l].orbit[head];
            head += 1;
            for j in 0..self.strong.len() {
                if !self.applicable(l, j) {
                    continue;
                }
                let q = self.strong[j].0.apply(p);
                if self.levels[l].transversal[q].is_none() {
                    let to = self.levels[l].transversal[p]
                        .as_ref()
                        .unwrap()
                        .to
                        .then(&self.strong[j].0);
                    let back = to.inverse();
                    self.levels[l].transversal[q] = Some(TransEntry { to, back });
                    self.levels[l].orbit.push(q);
                }
            }
        }
    }

    fn has_new_pairs(&self, l: usize) -> bool {
        let level = &self.levels[l];
        level.done_orbit < level.orbit.len()
            || (level.done_strong..self.strong.len()).any(|j| self.applicable(l, j))
    }

    fn process_new_pairs(
        &mut self,
        l: usize,
        queue: &mut std::collections::VecDeque<(Perm, usize)>,
    ) {
        let (ol, sl) = (self.levels[l].orbit.len(), self.strong.len());
        let (po, ps) = (self.levels[l].done_orbit, self.levels[l].done_strong);
        self.levels[l].done_orbit = ol;
        self.levels[l].done_strong = sl;
        for i in 0..ol {
            for j in 0..sl {
                if (i < po && j < ps) || !self.applicable(l, j) {
                    continue;
                }
                let level = &self.levels[l];
                let p = level.orbit[i];
                let gen = &self.strong[j].0;
                let q = gen.apply(p);
                let t_p = &level.transversal[p].as_ref().unwrap().to;
                let back = &level.transversal[q].as_ref().unwrap().back;
                // Schreier generator; it fixes base points 0..l by design.
                let s = t_p.then(gen).then(back);
                if !s.is_identity() {
                    queue.push_back((s, l + 1));
                }
            }
        }
    }

    fn sift(&self, g: &Perm) -> Perm {
        let mut h = g.clone();
        for level in &self.levels {
            if h.is_identity() {
                break;
            }
            let p = h.apply(level.point);
            if p == level.point {
                continue;
            }
            match &level.transversal[p] {
                Some(entry) => h = h.then(&entry.back),
                None => return h,
            }
        }
        h
    }

    pub fn order(&self) -> BigUint {
        let mut n = BigUint::one();
        for level in &self.levels {
            n *= BigUint::from(level.orbit.len());
        }
        n
    }

    /// Orbit of the base point at `level` under the pointwise stabilizer of
    /// all earlier base points.
    pub fn base_orbit(&self, level: usize) -> &[usize] {
        &self.levels[level].orbit
    }

    /// Strong generators fixing base points 0..`k` pointwise.
    pub fn stabilizer_gens(&self, k: usize) -> Vec<Perm> {
        self.strong
            .iter()
            .filter(|(_, tag)| *tag >= k)
            .map(|(g, _)| g.clone())
            .collect()
    }
}

/// A permutation group given by generators, with a lazily built chain.
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    chain: OnceLock<Chain>,
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<Self> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::LengthMismatch {
                    expected: degree,
                    got: g.degree(),
                });
            }
        }
        Ok(PermGroup {
            degree,
            gens,
            chain: OnceLock::new(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn gens(&self) -> &[Perm] {
        &self.gens
    }

    pub fn chain(&self) -> &Chain {
        self.chain.get_or_init(|| Chain::build(self.degree, &self.gens))
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.chain().sift(g).is_identity()
    }
}

/// Breadth-first orbit of `start` under `gens` acting through `act`.
/// Deterministic: generators are applied in order to a FIFO frontier.
pub fn orbit<T, F>(gens: &[Perm], start: T, act: F, cap: usize) -> Result<Vec<T>>
where
    T: Clone + Eq + Hash,
    F: Fn(&Perm, &T) -> T,
{
    let mut seen: HashSet<T> = HashSet::new();
    let mut out = vec![start.clone()];
    seen.insert(start);
    let mut head = 0;
    while head < out.len() {
        let current = out[head].clone();
        head += 1;
        for g in gens {
            let next = act(g, &current);
            if !seen.contains(&next) {
                if out.len() >= cap {
                    return Err(Error::ClosureCap { cap });
                }
                seen.insert(next.clone());
                out.push(next);
            }
        }
    }
    Ok(out)
}

/// |G| / |orbit|, checked for exact divisibility.
pub fn stabilizer_order(group: &PermGroup, orbit_len: usize) -> Result<BigUint> {
    use num_integer::Integer;
    let order = group.order();
    let (q, r) = order.div_rem(&BigUint::from(orbit_len));
    if r != BigUint::from(0u32) {
        return Err(Error::Structure(format!(
            "orbit size {orbit_len} does not divide group order {order}"
        )));
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(degree: usize, cycles: &[&[usize]]) -> Perm {
        Perm::from_cycles(degree, cycles).unwrap()
    }

    #[test]
    fn compose_applies_left_to_right() {
        let a = cyc(3, &[&[0, 1]]);
        let b = cyc(3, &[&[1, 2]]);
        let ab = a.then(&b);
        // 0 -> 1 under a, then 1 -> 2 under b.
        assert_eq!(ab.apply(0), 2, "then() must apply the left factor first");
    }

    #[test]
    fn inverse_round_trips() {
        let g = cyc(5, &[&[0, 3, 1], &[2, 4]]);
        assert!(g.then(&g.inverse()).is_identity());
        assert!(g.inverse().then(&g).is_identity());
    }

    #[test]
    fn symmetric_group_order() {
        let g = PermGroup::new(5, vec![cyc(5, &[&[0, 1]]), cyc(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        assert_eq!(g.order(), BigUint::from(120u32), "S5 has order 120");
    }

    #[test]
    fn alternating_group_order_and_membership() {
        let g = PermGroup::new(5, vec![cyc(5, &[&[0, 1, 2]]), cyc(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        assert_eq!(g.order(), BigUint::from(60u32), "A5 has order 60");
        assert!(g.contains(&cyc(5, &[&[1, 3], &[2, 4]])), "double transposition is even");
        assert!(!g.contains(&cyc(5, &[&[0, 1]])), "a transposition is odd");
    }

    #[test]
    fn dihedral_group_on_hexagon() {
        let rot = cyc(6, &[&[0, 1, 2, 3, 4, 5]]);
        let flip = cyc(6, &[&[1, 5], &[2, 4]]);
        let g = PermGroup::new(6, vec![rot, flip]).unwrap();
        assert_eq!(g.order(), BigUint::from(12u32), "hexagon symmetries");
    }

    #[test]
    fn word_action_is_linear_and_weight_preserving() {
        let g = cyc(4, &[&[0, 1, 2]]);
        let w1 = BitWord::parse("1100").unwrap();
        let w2 = BitWord::parse("1010").unwrap();
        assert_eq!(
            g.apply_word(&w1.add(&w2)),
            g.apply_word(&w1).add(&g.apply_word(&w2)),
            "coordinate permutation commutes with addition"
        );
        assert_eq!(g.apply_word(&w1).weight(), w1.weight());
        // Explicit image: bits at 0,1 move to 1,2.
        assert_eq!(g.apply_word(&w1).to_string(), "0110");
    }

    #[test]
    fn orbit_of_sets_under_s3() {
        let gens = vec![cyc(3, &[&[0, 1]]), cyc(3, &[&[0, 1, 2]])];
        let start: Vec<usize> = vec![0, 1];
        let orb = orbit(&gens, start, |g, set| {
            let mut next: Vec<usize> = set.iter().map(|&i| g.apply(i)).collect();
            next.sort_unstable();
            next
        }, 100)
        .unwrap();
        assert_eq!(orb.len(), 3, "2-subsets of a 3-set form one orbit of size 3");
    }

    #[test]
    fn orbit_cap_reports_overflow() {
        let gens = vec![cyc(8, &[&[0, 1, 2, 3, 4, 5, 6, 7]])];
        let err = orbit(&gens, 0usize, |g, &p| g.apply(p), 4).unwrap_err();
        assert!(matches!(err, Error::ClosureCap { cap: 4 }));
    }

    #[test]
    fn stabilizer_chain_prefix_gens_fix_prefix() {
        let g = PermGroup::new(5, vec![cyc(5, &[&[0, 1]]), cyc(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        for k in 0..5 {
            for s in g.chain().stabilizer_gens(k) {
                for p in 0..k {
                    assert_eq!(s.apply(p), p, "level-{k} strong generator must fix point {p}");
                }
            }
        }
        // Stab of {0,1,2} inside S5 is S2 on the last two points.
        let stab = PermGroup::new(5, g.chain().stabilizer_gens(3)).unwrap();
        assert_eq!(stab.order(), BigUint::from(2u32));
    }
}
