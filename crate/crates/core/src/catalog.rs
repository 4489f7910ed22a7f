//! Catalog of named codes in fixed canonical coordinates: the length-3
//! four-group glue code, the hexacode, the Golay code built from it by a
//! doubled coordinate twist, Hamming-type binary codes, the dual pair of
//! length-48 codes attached to the 48-fold Virasoro frame of the moonshine
//! module, and the four frame codes of the E8 lattice.
//!
//! Everything here is constructed, never hard-coded from tables, so the
//! structural tests (dimensions, weight distributions, closures, dualities)
//! are genuine checks of the constructions.

use crate::bits::BitWord;
use crate::codes::BinaryCode;
use crate::error::{Error, Result};
use crate::markings::Marking;
use crate::perm::{Perm, PermGroup};
use crate::z4::{gamma_code, gamma_twisted, Z4Code};

/// Order of the Weyl group W(E8).
pub const W_E8_ORDER: u64 = 696_729_600;
/// Stabilizer orders of the four frame orbits in E8, in catalog order
/// (K8, K8', L8, O8).
pub const E8_FRAME_STABILIZERS: [u64; 4] = [5_160_960, 73_728, 6_144, 2_688];
/// Orbit sizes matching `E8_FRAME_STABILIZERS`.
pub const E8_FRAME_ORBIT_SIZES: [u64; 4] = [135, 9_450, 113_400, 259_200];

/// Glyphs for the four-group alphabet {0, 1, s, s-bar} of the length-3
/// glue code; the bar is rendered as an upper-case S.
pub const XI_ALPHABET: [char; 4] = ['0', '1', 's', 'S'];
/// Glyphs for the four-group alphabet {0, a, b, c} of the hexacode.
pub const HEXACODE_ALPHABET: [char; 4] = ['0', 'a', 'b', 'c'];

/// A word over the Kleinian four-group Z2 x Z2, packed two bits per entry.
/// Addition is entrywise in the four-group, which the packing turns into a
/// single XOR; every element is its own negative.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KleinWord {
    len: usize,
    w: u64,
}

impl KleinWord {
    pub fn zero(len: usize) -> Self {
        assert!(len <= 32, "KleinWord packs at most 32 entries into a u64");
        KleinWord { len, w: 0 }
    }

    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        if digits.len() > 32 {
            return Err(Error::SizeGuard {
                what: "KleinWord length",
                limit: 32,
                actual: digits.len(),
            });
        }
        let mut out = KleinWord::zero(digits.len());
        for (i, &d) in digits.iter().enumerate() {
            if d > 3 {
                return Err(Error::Parse(format!("four-group digit out of range: {d}")));
            }
            out.set_digit(i, d);
        }
        Ok(out)
    }

    /// Parses a glyph string under the given alphabet.
    pub fn parse(s: &str, alphabet: &[char; 4]) -> Result<Self> {
        let digits: Vec<u8> = s
            .chars()
            .map(|ch| {
                alphabet
                    .iter()
                    .position(|&a| a == ch)
                    .map(|p| p as u8)
                    .ok_or_else(|| Error::Parse(format!("glyph {ch:?} is not in the alphabet")))
            })
            .collect::<Result<_>>()?;
        KleinWord::from_digits(&digits)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn digit(&self, i: usize) -> u8 {
        assert!(i < self.len);
        (self.w >> (2 * i) & 3) as u8
    }

    pub fn set_digit(&mut self, i: usize, d: u8) {
        assert!(i < self.len && d < 4);
        self.w = (self.w & !(3 << (2 * i))) | ((d as u64) << (2 * i));
    }

    /// Entrywise four-group addition.
    pub fn add(&self, other: &KleinWord) -> KleinWord {
        assert_eq!(self.len, other.len, "length mismatch in KleinWord::add");
        KleinWord {
            len: self.len,
            w: self.w ^ other.w,
        }
    }

    /// Number of nonzero entries.
    pub fn weight(&self) -> u32 {
        let lo = self.w & 0x5555_5555_5555_5555;
        let hi = (self.w >> 1) & 0x5555_5555_5555_5555;
        (lo | hi).count_ones()
    }

    pub fn is_zero(&self) -> bool {
        self.w == 0
    }

    pub fn render(&self, alphabet: &[char; 4]) -> String {
        (0..self.len)
            .map(|i| alphabet[self.digit(i) as usize])
            .collect()
    }
}

impl std::fmt::Debug for KleinWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "klein\"{}\"", self.render(&HEXACODE_ALPHABET))
    }
}

/// The eight length-3 words over {0, 1, s, S} gluing the three ideal-sum
/// components of a rank-24 root system of three D8 factors. Closed under
/// entrywise four-group addition.
pub fn xi3() -> Vec<KleinWord> {
    const WORDS: [[u8; 3]; 8] = [
        [0, 0, 0],
        [2, 1, 1],
        [1, 2, 1],
        [1, 1, 2],
        [0, 3, 3],
        [3, 0, 3],
        [3, 3, 0],
        [2, 2, 2],
    ];
    WORDS
        .iter()
        .map(|d| KleinWord::from_digits(d).expect("digits are in range"))
        .collect()
}

/// Doubling map used to build the hexacode: 0 -> 00, 1 -> a0, s -> bb,
/// S -> cb. A four-group homomorphism into pairs, so the lift of a closed
/// set stays closed.
fn hat_xi_digit(d: u8) -> (u8, u8) {
    match d {
        0 => (0, 0),
        1 => (1, 0),
        2 => (2, 2),
        3 => (3, 2),
        _ => unreachable!("four-group digits are 0..3"),
    }
}

/// The hexacode: 64 words of length 6 over {0, a, b, c}, built as the union
/// of the doubled glue-code words plus even counts of per-pair (a,a) shifts,
/// and the same set translated by the glue word b0b0ca.
pub fn hexacode() -> Vec<KleinWord> {
    let shifts = {
        let pair_shift = |k: usize| {
            let mut s = KleinWord::zero(6);
            s.set_digit(2 * k, 1);
            s.set_digit(2 * k + 1, 1);
            s
        };
        let (p0, p1, p2) = (pair_shift(0), pair_shift(1), pair_shift(2));
        [KleinWord::zero(6), p0.add(&p1), p0.add(&p2), p1.add(&p2)]
    };
    let glue = KleinWord::parse("b0b0ca", &HEXACODE_ALPHABET).expect("fixed glue word parses");
    let mut words = Vec::with_capacity(64);
    for x in xi3() {
        let mut base = KleinWord::zero(6);
        for k in 0..3 {
            let (h0, h1) = hat_xi_digit(x.digit(k));
            base.set_digit(2 * k, h0);
            base.set_digit(2 * k + 1, h1);
        }
        for s in &shifts {
            let w = base.add(s);
            words.push(w);
            words.push(w.add(&glue));
        }
    }
    words.sort();
    words.dedup();
    assert_eq!(words.len(), 64, "hexacode must have exactly 64 words");
    words
}

/// Doubling map used to build the Golay code: 0 -> 0000, a -> 1100,
/// b -> 1010, c -> 0110. Linear over GF(2).
fn hat_klein_digit(d: u8) -> [bool; 4] {
    match d {
        0 => [false, false, false, false],
        1 => [true, true, false, false],
        2 => [true, false, true, false],
        3 => [false, true, true, false],
        _ => unreachable!("four-group digits are 0..3"),
    }
}

fn hat_klein_word(w: &KleinWord) -> BitWord {
    let mut out = BitWord::zero(4 * w.len());
    for k in 0..w.len() {
        for (t, &bit) in hat_klein_digit(w.digit(k)).iter().enumerate() {
            if bit {
                out.set(4 * k + t, true);
            }
        }
    }
    out
}

/// The binary Golay code of length 24 and dimension 12, built by doubling
/// the hexacode coordinates: each lifted hexacode word is joined by the
/// per-block (1111) shift sets whose count parity matches the word's count
/// of c digits, and the union is completed by the glue row
/// 10001000...10000111. The parity matching selects exactly the branch
/// words of weight divisible by 4; a uniform even count would instead
/// admit 32 words of weight 6 and miss the Golay code.
pub fn golay24() -> BinaryCode {
    let block = |k: usize| {
        let mut w = BitWord::zero(24);
        for t in 0..4 {
            w.set(4 * k + t, true);
        }
        w
    };
    let mut gens: Vec<BitWord> = Vec::with_capacity(70);
    for h in hexacode() {
        let c_count = (0..6).filter(|&k| h.digit(k) == 3).count();
        let mut lift = hat_klein_word(&h);
        if c_count % 2 == 1 {
            lift = lift.add(&block(0));
        }
        gens.push(lift);
    }
    for k in 1..6 {
        gens.push(block(0).add(&block(k)));
    }
    gens.push(BitWord::parse("100010001000100010000111").expect("fixed glue row parses"));
    let code = BinaryCode::from_generators(24, &gens).expect("fixed generators are well formed");
    assert_eq!(code.dim(), 12, "the doubled hexacode must span dimension 12");
    code
}

/// Span of 00001111, 00110011, 11000011, 01010101: the unique
/// self-annihilating doubly-even code of length 8.
pub fn hamming8() -> BinaryCode {
    let rows: Vec<BitWord> = ["00001111", "00110011", "11000011", "01010101"]
        .iter()
        .map(|s| BitWord::parse(s).expect("fixed generators parse"))
        .collect();
    BinaryCode::from_generators(8, &rows).expect("fixed generators are well formed")
}

/// The m binary-counter rows of length 2^m, widest blocks first: bit j of
/// row i reads digit (m-1-i) of the column index j. Their span is the
/// unique [2^m, m] code in which every nonzero word has weight 2^(m-1).
pub fn counter_rows(m: u32) -> Vec<BitWord> {
    (0..m)
        .rev()
        .map(|k| {
            let mut w = BitWord::zero(1 << m);
            for j in 0..1usize << m {
                if j >> k & 1 == 1 {
                    w.set(j, true);
                }
            }
            w
        })
        .collect()
}

/// The extended Hamming code of length 2^m: the dual of the span of the
/// all-ones row and the m binary-counter rows. Dimension 2^m - m - 1,
/// minimal weight 4.
pub fn extended_hamming(m: u32) -> Result<BinaryCode> {
    if !(3..=6).contains(&m) {
        return Err(Error::Invalid(format!(
            "extended Hamming parameter must be in 3..=6, got {m}"
        )));
    }
    let n = 1usize << m;
    let mut checks = vec![BitWord::all_ones(n)];
    checks.extend(counter_rows(m));
    Ok(BinaryCode::from_generators(n, &checks)?.dual())
}

/// The extended Hamming code of length 64.
pub fn h64() -> BinaryCode {
    extended_hamming(6).expect("6 is in range")
}

const MOONSHINE_D_ROWS: [&str; 7] = [
    "111111111111111100000000000000000000000000000000",
    "000000000000000011111111111111110000000000000000",
    "000000000000000000000000000000001111111111111111",
    "000000001111111100000000111111110000000011111111",
    "000011110000111100001111000011110000111100001111",
    "001100110011001100110011001100110011001100110011",
    "010101010101010101010101010101010101010101010101",
];

/// The dimension-7 code of length 48 cut out by the 48-fold Virasoro frame
/// of the moonshine module: three 16-block indicators plus the four counter
/// rows repeated across the blocks.
pub fn moonshine_d() -> BinaryCode {
    let rows: Vec<BitWord> = MOONSHINE_D_ROWS
        .iter()
        .map(|s| BitWord::parse(s).expect("fixed rows parse"))
        .collect();
    let code = BinaryCode::from_generators(48, &rows).expect("fixed rows are well formed");
    assert_eq!(code.dim(), 7, "the seven defining rows are independent");
    code
}

/// The seven defining generator rows of `moonshine_d`, in display order.
pub fn moonshine_d_rows() -> Vec<BitWord> {
    MOONSHINE_D_ROWS
        .iter()
        .map(|s| BitWord::parse(s).expect("fixed rows parse"))
        .collect()
}

/// The dimension-41 annihilator of `moonshine_d`: all length-48 words with
/// even intersection against each of its rows. Equals the extended Hamming
/// code of length 64 shortened on its last 16 coordinates.
pub fn moonshine_c() -> BinaryCode {
    moonshine_d().dual()
}

/// The three marking representatives of length 8 used throughout: adjacent
/// pairs, one crossing, two crossings.
pub fn marking_alpha() -> Marking {
    Marking::adjacent(8).expect("8 is even")
}

pub fn marking_beta() -> Marking {
    Marking::new(8, &[(0, 1), (2, 3), (4, 6), (5, 7)]).expect("fixed pairs are a matching")
}

pub fn marking_gamma() -> Marking {
    Marking::new(8, &[(0, 1), (2, 4), (3, 6), (5, 7)]).expect("fixed pairs are a matching")
}

/// The adjacent-pairs marking of the 24 Golay coordinates, whose stabilizer
/// inside the Golay automorphism group is the largest over all markings.
pub fn mstar() -> Marking {
    Marking::adjacent(24).expect("24 is even")
}

/// The four frame codes of the E8 lattice, one per frame orbit.
pub struct E8FrameCodes {
    pub k8: Z4Code,
    pub k8p: Z4Code,
    pub l8: Z4Code,
    pub o8: Z4Code,
}

/// Builds the four E8 frame codes from markings of the length-8 Hamming
/// code: K8 plain from the adjacent marking, then the twisted construction
/// walks down the orbit list (twisting alpha gives the plain code of beta,
/// and so on).
pub fn e8_frame_codes() -> Result<E8FrameCodes> {
    let h8 = hamming8();
    Ok(E8FrameCodes {
        k8: gamma_code(&h8, &marking_alpha())?,
        k8p: gamma_twisted(&h8, &marking_alpha())?,
        l8: gamma_twisted(&h8, &marking_beta())?,
        o8: gamma_twisted(&h8, &marking_gamma())?,
    })
}

/// Signed coordinate identifications realizing the origin coincidences
/// among the E8 frame codes. Entry 0 carries the twisted adjacent-marking
/// code onto the plain code of the one-crossing marking; entry 1 carries
/// the twisted one-crossing code onto the plain code of the two-crossing
/// marking. Each is (positions, signs) as consumed by monomial_image.
///
/// The raw codes are equal only through such an identification, never
/// literally: the twisted adjacent code contains (0,0,0,2,0,0,0,2), whose
/// decode under the one-crossing marking is 00110101, which is not a
/// codeword of the self-dual length-8 code. Since that word lies in the
/// glue-free branch and has all digits even, no glue or per-pair sign
/// convention removes the obstruction. The maps below were found by
/// exhaustive search over signed permutations and are verified by
/// transforming every codeword.
pub const E8_ORIGIN_MAPS: [([usize; 8], [u8; 8]); 2] = [
    ([0, 6, 2, 5, 1, 4, 3, 7], [3, 3, 1, 1, 1, 1, 1, 1]),
    ([3, 0, 6, 1, 2, 4, 5, 7], [3, 1, 1, 1, 1, 1, 3, 1]),
];

/// The automorphism group of the moonshine code pair, as an explicit
/// permutation group on the 48 coordinates: per-block index translations
/// (2^12 of them), a linear group acting diagonally on the three blocks
/// (generated by a basis rotation and a transvection), and the block
/// permutations. Order 2^12 * 20160 * 6 = 495452160.
pub fn moonshine_aut_subgroup() -> Result<PermGroup> {
    let mut gens = Vec::new();
    // Translations j -> j xor v on a single 16-block.
    for block in 0..3usize {
        for bit in 0..4 {
            let v = 1usize << bit;
            let images: Vec<usize> = (0..48)
                .map(|p| if p / 16 == block { block * 16 + ((p % 16) ^ v) } else { p })
                .collect();
            gens.push(Perm::from_images(&images)?);
        }
    }
    // Invertible linear maps on the 4-bit index space, applied to every
    // block at once so the thickened counter rows are permuted among
    // themselves.
    let rotate = |j: usize| ((j << 1) & 0xF) | (j >> 3);
    let transvect = |j: usize| j ^ ((j & 1) << 1);
    for f in [rotate, transvect] {
        let images: Vec<usize> = (0..48).map(|p| (p / 16) * 16 + f(p % 16)).collect();
        gens.push(Perm::from_images(&images)?);
    }
    // Block permutations.
    let cycle: Vec<usize> = (0..48).map(|p| ((p / 16 + 1) % 3) * 16 + p % 16).collect();
    let swap: Vec<usize> = (0..48)
        .map(|p| match p / 16 {
            0 => 16 + p % 16,
            1 => p % 16,
            _ => p,
        })
        .collect();
    gens.push(Perm::from_images(&cycle)?);
    gens.push(Perm::from_images(&swap)?);
    PermGroup::new(48, gens)
}
