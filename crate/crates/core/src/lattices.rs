//! D1-framed lattices as Z4 codes.
//!
//! A marking of a doubly even binary code C determines a frame of norm-4
//! rank-1 sublattices inside the two even lattices built from C, one plain
//! and one twisted. Labeling each lattice coset against the frame turns the
//! quotient into a Z4 code; everything here reduces lattice statements to
//! exact integer code statements (the norm of a coset is a quarter of its
//! Euclidean weight), so no floating point or Gram arithmetic appears.
//!
//! The quotient is computed from first principles: a lattice vector with
//! coordinates u, w on a marked pair labels as ((u+w) mod 4, (u-w) mod 4).
//! Half-integer coordinates of the twisted branch are handled by doubling
//! every coordinate internally.

use crate::bits::BitWord;
use crate::codes::BinaryCode;
use crate::error::{Error, Result};
use crate::markings::Marking;
use crate::z4::{GeneratorSpan, Z4Code, Z4Word};
use num_rational::Rational64;

/// Sign choice in the coset-label table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Eps {
    Plus,
    Minus,
}

/// The per-pair coset label: the image of a binary pair under one of the
/// four maps indexed by the branch bit b and a sign, written over Z4 with
/// the dictionary 0, 1/2, 1, -1/2 <-> 0, 1, 2, 3. The minus row of each
/// branch is the plus row shifted by (2, 2).
pub fn coset_label(b: u8, eps: Eps, pair: (u8, u8)) -> (u8, u8) {
    assert!(b <= 1, "branch bit must be 0 or 1");
    let base = match (b, pair) {
        (0, (0, 0)) => (0, 0),
        (0, (1, 1)) => (2, 0),
        (0, (1, 0)) => (1, 1),
        (0, (0, 1)) => (1, 3),
        (1, (0, 0)) => (1, 0),
        (1, (1, 1)) => (3, 0),
        (1, (1, 0)) => (2, 1),
        (1, (0, 1)) => (2, 3),
        _ => panic!("binary pair entries must be 0 or 1"),
    };
    match eps {
        Eps::Plus => base,
        Eps::Minus => ((base.0 + 2) % 4, (base.1 + 2) % 4),
    }
}

/// The label word of one coset of the frame: per marked pair, the label of
/// the codeword's bit pair under the chosen branch and per-pair sign.
pub fn frame_coset(b: u8, eps: &[Eps], c: &BitWord, m: &Marking) -> Result<Z4Word> {
    if c.len() != m.d() {
        return Err(Error::LengthMismatch {
            expected: m.d(),
            got: c.len(),
        });
    }
    if eps.len() != m.pair_count() {
        return Err(Error::LengthMismatch {
            expected: m.pair_count(),
            got: eps.len(),
        });
    }
    let mut out = Z4Word::zero(c.len());
    for (k, &(i, j)) in m.pairs().iter().enumerate() {
        let (di, dj) = coset_label(b, eps[k], (c.get(i) as u8, c.get(j) as u8));
        out.set_digit(i, di);
        out.set_digit(j, dj);
    }
    Ok(out)
}

/// The Z4 label of a vector against the frame of a marking, from first
/// principles. `doubled` holds twice the vector's coordinates so that
/// half-integers stay integral. For a marked pair (i, j) with coordinates
/// u, w the labels are (u+w) mod 4 at i and (u-w) mod 4 at j; these are the
/// inner products with the two frame vectors of the pair.
pub fn frame_label(doubled: &[i64], m: &Marking) -> Result<Z4Word> {
    if doubled.len() != m.d() {
        return Err(Error::LengthMismatch {
            expected: m.d(),
            got: doubled.len(),
        });
    }
    let mut out = Z4Word::zero(doubled.len());
    for &(i, j) in m.pairs() {
        let (s, t) = (doubled[i] + doubled[j], doubled[i] - doubled[j]);
        if s % 2 != 0 {
            return Err(Error::Structure(
                "vector has non-integral frame labels, so it is outside the dual frame".into(),
            ));
        }
        out.set_digit(i, (s / 2).rem_euclid(4) as u8);
        out.set_digit(j, (t / 2).rem_euclid(4) as u8);
    }
    Ok(out)
}

fn check_lattice_inputs(code: &BinaryCode, m: &Marking, twisted: bool) -> Result<()> {
    if m.d() != code.len() {
        return Err(Error::LengthMismatch {
            expected: code.len(),
            got: m.d(),
        });
    }
    if code.len() % 8 != 0 {
        return Err(Error::Invalid(format!(
            "framed lattices need lengths divisible by 8, got {}",
            code.len()
        )));
    }
    if !code.parity_flags().doubly_even {
        return Err(Error::Structure(
            "the lattice construction needs a doubly even code".into(),
        ));
    }
    if twisted && !code.contains(&BitWord::all_ones(code.len())) {
        return Err(Error::Structure(
            "the twisted lattice is additively closed only when the code contains the all-ones word"
                .into(),
        ));
    }
    Ok(())
}

/// The quotient of the (plain or twisted) lattice of a marked code by its
/// frame, computed from lattice generators: codeword vectors, the
/// coordinate doublings (plain) or their admissible pair combinations and
/// the half-shift vector (twisted). The result is an explicit span; it is
/// exactly the group of frame labels of lattice vectors.
pub fn frame_quotient_code(code: &BinaryCode, m: &Marking, twisted: bool) -> Result<Z4Code> {
    check_lattice_inputs(code, m, twisted)?;
    let d = code.len();
    let mut gens: Vec<Z4Word> = Vec::new();
    for b in code.basis() {
        let doubled: Vec<i64> = (0..d).map(|i| 2 * b.get(i) as i64).collect();
        gens.push(frame_label(&doubled, m)?);
    }
    let pairs = m.pairs();
    if twisted {
        // 2e_i + 2e_j across the first slots of pair 0 and pair k: the
        // coordinate-sum-divisible-by-4 part of the doubled coordinates.
        for k in 1..pairs.len() {
            let mut doubled = vec![0i64; d];
            doubled[pairs[0].0] = 4;
            doubled[pairs[k].0] = 4;
            gens.push(frame_label(&doubled, m)?);
        }
        // The half-shift vector (1/2, ..., 1/2), plus 2e on the final
        // pair's second slot when the rank is 8 mod 16, which is exactly
        // when the bare half-shift has an inadmissible coordinate sum.
        let mut doubled = vec![1i64; d];
        if d % 16 == 8 {
            doubled[pairs[pairs.len() - 1].1] += 4;
        }
        gens.push(frame_label(&doubled, m)?);
    } else {
        for &(i, _) in pairs {
            let mut doubled = vec![0i64; d];
            doubled[i] = 4;
            gens.push(frame_label(&doubled, m)?);
        }
    }
    Ok(Z4Code::Span(GeneratorSpan::from_generators(d, &gens)?))
}

/// Cap on dim(C) + d/2 for the direct coset enumeration below.
const MAX_COSET_ENUM_LOG2: usize = 22;

/// Every frame label of the lattice, by direct enumeration of coset
/// representatives: codewords combined with the per-pair residues of the
/// even part, filtered by the twisted branch's coordinate-sum conditions.
/// Ground truth for the generator-based quotient; sizes are guarded.
pub fn frame_cosets_enumerate(code: &BinaryCode, m: &Marking, twisted: bool) -> Result<Vec<Z4Word>> {
    check_lattice_inputs(code, m, twisted)?;
    let d = code.len();
    let half = d / 2;
    if code.dim() + half > MAX_COSET_ENUM_LOG2 {
        return Err(Error::SizeGuard {
            what: "frame coset enumeration",
            limit: MAX_COSET_ENUM_LOG2,
            actual: code.dim() + half,
        });
    }
    let pairs = m.pairs();
    let mut seen = std::collections::BTreeSet::new();
    for c in code.words() {
        for t in 0u64..(1 << half) {
            let parity = (t.count_ones() % 2) as u8;
            // Residue vector: 2e on the first slot of every pair picked by t.
            let mut doubled: Vec<i64> = (0..d).map(|i| 2 * c.get(i) as i64).collect();
            for (k, &(i, _)) in pairs.iter().enumerate() {
                if t >> k & 1 == 1 {
                    doubled[i] += 4;
                }
            }
            if !twisted {
                seen.insert(frame_label(&doubled, m)?);
                continue;
            }
            // Plain branch: coordinate sum of the even part must be 0 mod 4.
            if parity == 0 {
                seen.insert(frame_label(&doubled, m)?);
            }
            // Half-shifted branch: sum condition depends on d mod 16.
            let wanted = if d % 16 == 0 { 0 } else { 1 };
            if parity == wanted {
                let shifted: Vec<i64> = doubled.iter().map(|&x| x + 1).collect();
                seen.insert(frame_label(&shifted, m)?);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// A framed lattice: the quotient code together with the frame data that
/// produced it.
#[derive(Clone, Debug)]
pub struct LatticeModel {
    pub delta: Z4Code,
    pub marking: Marking,
    pub twisted: bool,
}

/// Builds the lattice model of a marked code.
pub fn lattice_model(code: &BinaryCode, m: &Marking, twisted: bool) -> Result<LatticeModel> {
    Ok(LatticeModel {
        delta: frame_quotient_code(code, m, twisted)?,
        marking: m.clone(),
        twisted,
    })
}

/// Lattice-level facts read off the quotient code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticePredicates {
    /// All vector norms even: every codeword's Euclidean weight is 0 mod 8.
    pub is_even: bool,
    /// Self-annihilating quotient of full size 2^d.
    pub is_self_dual: bool,
    /// min(4, minimal nonzero Euclidean weight / 4); the norm of a frame
    /// vector caps the minimum at 4.
    pub min_norm: Rational64,
}

/// Evaluates the lattice predicates of a quotient code.
pub fn lattice_predicates(delta: &Z4Code) -> Result<LatticePredicates> {
    let flags = delta.predicates()?;
    let min_ew = delta.min_euclidean_weight()?;
    let capped = min_ew.min(16);
    Ok(LatticePredicates {
        is_even: flags.even,
        is_self_dual: flags.self_annihilating,
        min_norm: Rational64::new(capped as i64, 4),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{
        golay24, hamming8, marking_alpha, marking_beta, marking_gamma, mstar,
    };
    use crate::z4::{gamma_code, gamma_twisted};
    use std::collections::BTreeSet;

    #[test]
    fn coset_label_table_spot_values() {
        assert_eq!(coset_label(0, Eps::Plus, (0, 0)), (0, 0));
        assert_eq!(coset_label(0, Eps::Minus, (0, 0)), (2, 2));
        assert_eq!(coset_label(0, Eps::Plus, (1, 0)), (1, 1));
        assert_eq!(coset_label(1, Eps::Plus, (1, 0)), (2, 1));
        assert_eq!(coset_label(1, Eps::Minus, (0, 0)), (3, 2));
    }

    #[test]
    fn minus_rows_are_plus_rows_shifted_by_two_two() {
        for b in 0..2u8 {
            for pair in [(0, 0), (1, 1), (1, 0), (0, 1)] {
                let (p, q) = coset_label(b, Eps::Plus, pair);
                assert_eq!(
                    coset_label(b, Eps::Minus, pair),
                    ((p + 2) % 4, (q + 2) % 4),
                    "the sign swaps the coset by a (2,2) shift"
                );
            }
        }
    }

    #[test]
    fn zero_codeword_with_plus_signs_labels_as_zero() {
        let m = Marking::adjacent(8).unwrap();
        let w = frame_coset(0, &[Eps::Plus; 4], &BitWord::zero(8), &m).unwrap();
        assert!(w.is_zero());
    }

    fn union_of_frame_cosets(code: &BinaryCode, m: &Marking, twisted: bool) -> BTreeSet<Z4Word> {
        let half = m.pair_count();
        let mut out = BTreeSet::new();
        for c in code.words() {
            for mask in 0u64..(1 << half) {
                let eps: Vec<Eps> = (0..half)
                    .map(|k| if mask >> k & 1 == 0 { Eps::Plus } else { Eps::Minus })
                    .collect();
                let minus_parity = mask.count_ones() % 2;
                if !twisted {
                    out.insert(frame_coset(0, &eps, &c, m).unwrap());
                    continue;
                }
                // Product of signs + on branch 0; product (-1)^{d/8} on branch 1.
                if minus_parity == 0 {
                    out.insert(frame_coset(0, &eps, &c, m).unwrap());
                }
                let wanted = if (code.len() / 8) % 2 == 0 { 0 } else { 1 };
                if minus_parity == wanted {
                    out.insert(frame_coset(1, &eps, &c, m).unwrap());
                }
            }
        }
        out
    }

    fn z4_set(code: &Z4Code) -> BTreeSet<Z4Word> {
        let mut out = BTreeSet::new();
        code.for_each(&mut |w| {
            out.insert(w.clone());
        })
        .unwrap();
        out
    }

    #[test]
    fn lemma_unions_give_the_plain_and_twisted_codes_on_hamming8() {
        let h = hamming8();
        for m in [marking_alpha(), marking_beta(), marking_gamma()] {
            let plain = union_of_frame_cosets(&h, &m, false);
            assert_eq!(plain.len(), 256, "|C| * 2^{{d/2}} cosets");
            assert_eq!(
                plain,
                z4_set(&gamma_code(&h, &m).unwrap()),
                "sign-free union equals the plain frame code"
            );
            let twisted = union_of_frame_cosets(&h, &m, true);
            assert_eq!(twisted.len(), 256);
            assert_eq!(
                twisted,
                z4_set(&gamma_twisted(&h, &m).unwrap()),
                "sign-constrained union equals the twisted frame code"
            );
        }
    }

    #[test]
    fn quotients_from_lattice_generators_match_the_code_constructions() {
        let h = hamming8();
        for m in [marking_alpha(), marking_beta(), marking_gamma()] {
            for twisted in [false, true] {
                let from_lattice = frame_quotient_code(&h, &m, twisted).unwrap();
                let from_code = if twisted {
                    gamma_twisted(&h, &m).unwrap()
                } else {
                    gamma_code(&h, &m).unwrap()
                };
                assert!(
                    from_lattice.equals_set(&from_code).unwrap(),
                    "lattice quotient equals the direct construction (twisted={twisted})"
                );
                let enumerated: BTreeSet<Z4Word> =
                    frame_cosets_enumerate(&h, &m, twisted).unwrap().into_iter().collect();
                assert_eq!(
                    enumerated,
                    z4_set(&from_code),
                    "residue enumeration equals the direct construction (twisted={twisted})"
                );
            }
        }
    }

    #[test]
    fn golay_quotients_match_the_code_constructions() {
        let g = golay24();
        let m = mstar();
        for twisted in [false, true] {
            let from_lattice = frame_quotient_code(&g, &m, twisted).unwrap();
            let from_code = if twisted {
                gamma_twisted(&g, &m).unwrap()
            } else {
                gamma_code(&g, &m).unwrap()
            };
            assert!(
                from_lattice.equals_set(&from_code).unwrap(),
                "length-24 lattice quotient equals the direct construction (twisted={twisted})"
            );
        }
    }

    #[test]
    fn twisted_quotient_requires_the_all_ones_word() {
        let c = BinaryCode::from_generators(8, &[BitWord::parse("11110000").unwrap()]).unwrap();
        assert!(frame_quotient_code(&c, &marking_alpha(), true).is_err());
        assert!(frame_quotient_code(&c, &marking_alpha(), false).is_ok());
    }

    #[test]
    fn e8_and_leech_models_have_the_expected_predicates() {
        let h = hamming8();
        for (m, twisted) in [
            (marking_alpha(), false),
            (marking_alpha(), true),
            (marking_beta(), true),
            (marking_gamma(), true),
        ] {
            let model = lattice_model(&h, &m, twisted).unwrap();
            let p = lattice_predicates(&model.delta).unwrap();
            assert!(p.is_even && p.is_self_dual);
            assert_eq!(
                p.min_norm,
                Rational64::new(2, 1),
                "rank-8 frames have minimal norm 2"
            );
        }
        let leech = lattice_model(&golay24(), &mstar(), true).unwrap();
        let p = lattice_predicates(&leech.delta).unwrap();
        assert!(p.is_even && p.is_self_dual);
        assert_eq!(
            p.min_norm,
            Rational64::new(4, 1),
            "the twisted marked-Golay lattice has minimal norm 4"
        );
        let untwisted = lattice_model(&golay24(), &mstar(), false).unwrap();
        let q = lattice_predicates(&untwisted.delta).unwrap();
        assert!(q.is_even && q.is_self_dual);
        assert_eq!(
            q.min_norm,
            Rational64::new(2, 1),
            "the plain marked-Golay lattice keeps the norm-2 doubled unit vectors"
        );
    }

    #[test]
    fn shift_only_quotient_is_not_self_dual() {
        let shifts = GeneratorSpan::from_generators(
            4,
            &[
                Z4Word::parse("2200").unwrap(),
                Z4Word::parse("0022").unwrap(),
            ],
        )
        .unwrap();
        let p = lattice_predicates(&Z4Code::Span(shifts)).unwrap();
        assert!(p.is_even);
        assert!(!p.is_self_dual, "cardinality 4 is short of 2^4");
        assert_eq!(p.min_norm, Rational64::new(2, 1));
    }
}
