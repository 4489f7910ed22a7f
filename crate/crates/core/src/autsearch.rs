//! Coordinate automorphism groups of binary codes by backtracking with
//! partition refinement.
//!
//! A coordinate permutation stabilizes a linear code exactly when it
//! permutes the set of minimal-weight codewords, provided those words span
//! the code; otherwise further weight classes are added until they do. The
//! search individualizes one coordinate at a time, re-refines the coloring
//! of the coordinate/word incidence system to equitability, compares path
//! invariants against the first root-to-leaf path, and prunes sibling
//! branches that are equivalent under automorphisms found so far.

use std::collections::{BTreeMap, HashSet};

use crate::bits::BitWord;
use crate::codes::BinaryCode;
use crate::error::{Error, Result};
use crate::perm::{Perm, PermGroup};

/// Cap on the number of search-tree nodes before giving up.
pub const MAX_SEARCH_NODES: u64 = 2_000_000;
/// Cap on the number of words admitted into the incidence system.
const MAX_SYSTEM_WORDS: usize = 200_000;

/// The set system the search stabilizes: supports of the chosen spanning
/// weight classes, as bitmasks.
struct SetSystem {
    n: usize,
    words: Vec<u64>,
    word_set: HashSet<u64>,
    /// incident[i] lists the indices of words whose support contains i.
    incident: Vec<Vec<u32>>,
}

impl SetSystem {
    fn new(n: usize, words: Vec<u64>) -> Self {
        let mut incident = vec![Vec::new(); n];
        for (idx, &w) in words.iter().enumerate() {
            let mut rest = w;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                incident[i].push(idx as u32);
                rest &= rest - 1;
            }
        }
        let word_set = words.iter().copied().collect();
        Self {
            n,
            words,
            word_set,
            incident,
        }
    }

    /// Whether the position permutation (as an image array) maps every word
    /// of the system onto a word of the system.
    fn preserved_by(&self, images: &[usize]) -> bool {
        self.words.iter().all(|&w| {
            let mut img = 0u64;
            let mut rest = w;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                img |= 1u64 << images[i];
                rest &= rest - 1;
            }
            self.word_set.contains(&img)
        })
    }
}

/// One equitable-refinement pass: words are colored by the multiset of
/// their support's point colors, then points by their previous color plus
/// the multiset of incident word colors, until stable. Color indices are
/// assigned by sorting signatures, so they are invariants of the colored
/// system and never merge previously distinct point colors.
fn refine(sys: &SetSystem, colors: &mut [u32]) -> Vec<u32> {
    let mut word_colors = vec![0u32; sys.words.len()];
    loop {
        let mut wsigs: Vec<(Vec<u32>, usize)> = sys
            .words
            .iter()
            .enumerate()
            .map(|(idx, &w)| {
                let mut sig: Vec<u32> = {
                    let mut v = Vec::with_capacity(w.count_ones() as usize);
                    let mut rest = w;
                    while rest != 0 {
                        v.push(colors[rest.trailing_zeros() as usize]);
                        rest &= rest - 1;
                    }
                    v
                };
                sig.sort_unstable();
                (sig, idx)
            })
            .collect();
        wsigs.sort();
        let mut next = 0u32;
        for k in 0..wsigs.len() {
            if k > 0 && wsigs[k].0 != wsigs[k - 1].0 {
                next += 1;
            }
            word_colors[wsigs[k].1] = next;
        }

        let mut psigs: Vec<((u32, Vec<u32>), usize)> = (0..sys.n)
            .map(|i| {
                let mut sig: Vec<u32> = sys.incident[i]
                    .iter()
                    .map(|&w| word_colors[w as usize])
                    .collect();
                sig.sort_unstable();
                ((colors[i], sig), i)
            })
            .collect();
        psigs.sort();
        let mut fresh = vec![0u32; sys.n];
        let mut next = 0u32;
        for k in 0..psigs.len() {
            if k > 0 && psigs[k].0 != psigs[k - 1].0 {
                next += 1;
            }
            fresh[psigs[k].1] = next;
        }
        let stable = (0..sys.n).all(|i| fresh[i] == colors[i])
            || next as usize + 1 == count_colors(colors);
        let changed = fresh != colors;
        colors.copy_from_slice(&fresh);
        if stable || !changed {
            return word_colors;
        }
    }
}

fn count_colors(colors: &[u32]) -> usize {
    colors.iter().copied().max().map_or(0, |m| m as usize + 1)
}

/// An isomorphism-invariant fingerprint of a refined node: the histogram of
/// point-cell sizes per color and of word colors.
fn node_invariant(colors: &[u32], word_colors: &[u32]) -> u64 {
    let mut cell_sizes: BTreeMap<u32, u32> = BTreeMap::new();
    for &c in colors {
        *cell_sizes.entry(c).or_insert(0) += 1;
    }
    let mut whist: BTreeMap<u32, u32> = BTreeMap::new();
    for &c in word_colors {
        *whist.entry(c).or_insert(0) += 1;
    }
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for (c, s) in cell_sizes.iter().chain(whist.iter()) {
        for v in [*c as u64, *s as u64] {
            h ^= v;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
    }
    h
}

struct Search<'a> {
    sys: &'a SetSystem,
    /// Invariants along the first explored root-to-leaf path, per depth.
    ref_path: Vec<u64>,
    /// color -> point assignment at the first leaf.
    ref_leaf: Option<Vec<usize>>,
    gens: Vec<Perm>,
    nodes: u64,
}

impl<'a> Search<'a> {
    /// Explore one node. `prefix` is the sequence of individualized points.
    fn node(&mut self, colors: &mut Vec<u32>, depth: usize, prefix: &mut Vec<usize>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > MAX_SEARCH_NODES {
            return Err(Error::SearchBudget {
                budget: MAX_SEARCH_NODES,
            });
        }
        let word_colors = refine(self.sys, colors);
        let inv = node_invariant(colors, &word_colors);
        if depth < self.ref_path.len() {
            if self.ref_path[depth] != inv {
                return Ok(());
            }
        } else {
            debug_assert_eq!(depth, self.ref_path.len());
            self.ref_path.push(inv);
        }

        if count_colors(colors) == self.sys.n {
            let mut by_color = vec![0usize; self.sys.n];
            for i in 0..self.sys.n {
                by_color[colors[i] as usize] = i;
            }
            match &self.ref_leaf {
                None => self.ref_leaf = Some(by_color),
                Some(reference) => {
                    let mut images = vec![0usize; self.sys.n];
                    for c in 0..self.sys.n {
                        images[reference[c]] = by_color[c];
                    }
                    let identity = images.iter().enumerate().all(|(i, &j)| i == j);
                    if !identity && self.sys.preserved_by(&images) {
                        self.gens.push(Perm::from_images(&images)?);
                    }
                }
            }
            return Ok(());
        }

        // Target cell: the first smallest non-singleton color class.
        let mut cells: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for i in 0..self.sys.n {
            cells.entry(colors[i]).or_default().push(i);
        }
        let target = cells
            .values()
            .filter(|cell| cell.len() > 1)
            .min_by_key(|cell| cell.len())
            .expect("a non-discrete coloring has a non-singleton cell")
            .clone();
        let fresh_color = count_colors(colors) as u32;

        let mut explored: Vec<usize> = Vec::new();
        for &v in &target {
            if self.in_explored_orbit(v, &explored, prefix) {
                continue;
            }
            explored.push(v);
            let mut child = colors.clone();
            // Individualize v past every existing color so the split is a
            // proper refinement.
            child[v] = fresh_color;
            prefix.push(v);
            self.node(&mut child, depth + 1, prefix)?;
            prefix.pop();
        }
        Ok(())
    }

    /// Sibling pruning: is `v` in the orbit of an explored sibling under
    /// the automorphisms found so far that fix the individualized prefix
    /// pointwise?
    fn in_explored_orbit(&self, v: usize, explored: &[usize], prefix: &[usize]) -> bool {
        if explored.is_empty() || self.gens.is_empty() {
            return false;
        }
        let fixing: Vec<&Perm> = self
            .gens
            .iter()
            .filter(|g| prefix.iter().all(|&p| g.apply(p) == p))
            .collect();
        if fixing.is_empty() {
            return false;
        }
        let mut orbit: HashSet<usize> = explored.iter().copied().collect();
        let mut frontier: Vec<usize> = explored.to_vec();
        while let Some(x) = frontier.pop() {
            for g in &fixing {
                for y in [g.apply(x), g.inverse().apply(x)] {
                    if orbit.insert(y) {
                        if y == v {
                            return true;
                        }
                        frontier.push(y);
                    }
                }
            }
        }
        orbit.contains(&v)
    }
}

/// Collect spanning weight classes of the code, smallest weights first.
fn spanning_word_system(code: &BinaryCode) -> Result<Vec<u64>> {
    let mut by_weight: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for w in code.words() {
        if !w.is_zero() {
            by_weight.entry(w.weight()).or_default().push(w.bits());
        }
    }
    let mut chosen: Vec<u64> = Vec::new();
    let mut span: Vec<BitWord> = Vec::new();
    for (_, class) in by_weight {
        chosen.extend_from_slice(&class);
        if chosen.len() > MAX_SYSTEM_WORDS {
            return Err(Error::SizeGuard {
                what: "automorphism search word system",
                limit: MAX_SYSTEM_WORDS,
                actual: chosen.len(),
            });
        }
        span.extend(class.iter().map(|&b| BitWord::from_bits(code.len(), b)));
        let spanned = BinaryCode::from_generators(code.len(), &span)?;
        if spanned.dim() == code.dim() {
            return Ok(chosen);
        }
    }
    unreachable!("the nonzero words of a code always span it")
}

/// Generators of the full symmetric group on n points.
fn symmetric_group(n: usize) -> Result<PermGroup> {
    let mut gens = Vec::new();
    if n >= 2 {
        let mut t: Vec<usize> = (0..n).collect();
        t.swap(0, 1);
        gens.push(Perm::from_images(&t)?);
    }
    if n >= 3 {
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        gens.push(Perm::from_images(&cycle)?);
    }
    PermGroup::new(n, gens)
}

/// The full group of coordinate permutations mapping the code onto itself.
///
/// Intended for n <= 24; the search budget guards against larger inputs
/// whose refinement fails to cut the tree down.
pub fn code_automorphisms(code: &BinaryCode) -> Result<PermGroup> {
    let n = code.len();
    if code.dim() == 0 || code.dim() == n {
        return symmetric_group(n);
    }
    let words = spanning_word_system(code)?;
    let sys = SetSystem::new(n, words);
    let mut search = Search {
        sys: &sys,
        ref_path: Vec::new(),
        ref_leaf: None,
        gens: Vec::new(),
        nodes: 0,
    };
    let mut colors = vec![0u32; n];
    let mut prefix = Vec::new();
    search.node(&mut colors, 0, &mut prefix)?;
    PermGroup::new(n, search.gens)
}
