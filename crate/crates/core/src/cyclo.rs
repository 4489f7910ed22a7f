//! Exact arithmetic in the 48th cyclotomic field, with finite 3x3 matrix
//! groups over it.
//!
//! Elements of Q(zeta), zeta = e^(2*pi*i/48), are vectors of 16 rationals
//! reduced mod zeta^16 - zeta^8 + 1. The field contains sqrt(2) as
//! zeta^6 + zeta^42, which is all the irrationality the character
//! substitution matrices need. Because the normal form is canonical,
//! matrix-group closure and Molien averaging certify group orders and
//! invariant dimensions exactly, with no floating point anywhere.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{rat, rat_frac, RatPoly, TriPoly};

/// Degree of the 48th cyclotomic field over Q.
pub const FIELD_DEGREE: usize = 16;

/// An element of Q[zeta]/(zeta^16 - zeta^8 + 1), coefficients in the power
/// basis 1, zeta, ..., zeta^15.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclo48 {
    c: [BigRational; FIELD_DEGREE],
}

fn zero_coeffs() -> [BigRational; FIELD_DEGREE] {
    std::array::from_fn(|_| BigRational::zero())
}

impl Cyclo48 {
    pub fn zero() -> Self {
        Cyclo48 { c: zero_coeffs() }
    }

    pub fn one() -> Self {
        Cyclo48::from_rational(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        let mut c = zero_coeffs();
        c[0] = r;
        Cyclo48 { c }
    }

    pub fn from_int(n: i64) -> Self {
        Cyclo48::from_rational(rat(n))
    }

    /// zeta^k for any integer k, reduced into the power basis.
    pub fn zeta(k: i64) -> Self {
        let e = k.rem_euclid(48) as usize;
        // zeta^e = zeta^(e-8) - zeta^(e-16) whenever e >= 16; exponents
        // below 48 reach the basis range in at most two steps.
        let mut acc: Vec<(usize, BigRational)> = vec![(e, BigRational::one())];
        let mut c = zero_coeffs();
        while let Some((exp, q)) = acc.pop() {
            if exp < FIELD_DEGREE {
                c[exp] += q;
            } else {
                acc.push((exp - 8, q.clone()));
                acc.push((exp - 16, -q));
            }
        }
        Cyclo48 { c }
    }

    /// sqrt(2) = zeta^6 + zeta^42; squares to 2.
    pub fn sqrt2() -> Self {
        Cyclo48::zeta(6).add(&Cyclo48::zeta(42))
    }

    /// 1/sqrt(2) = (zeta^6 + zeta^42)/2.
    pub fn inv_sqrt2() -> Self {
        Cyclo48::sqrt2().scale(&rat_frac(1, 2))
    }

    pub fn coeff(&self, i: usize) -> &BigRational {
        &self.c[i]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|q| q.is_zero())
    }

    /// True when the element lies in Q (all basis coefficients above the
    /// constant vanish).
    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(|q| q.is_zero())
    }

    pub fn rational_part(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let c = std::array::from_fn(|i| &self.c[i] + &other.c[i]);
        Cyclo48 { c }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let c = std::array::from_fn(|i| &self.c[i] - &other.c[i]);
        Cyclo48 { c }
    }

    pub fn neg(&self) -> Self {
        let c = std::array::from_fn(|i| -&self.c[i]);
        Cyclo48 { c }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let c = std::array::from_fn(|i| &self.c[i] * r);
        Cyclo48 { c }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut buf: Vec<BigRational> = vec![BigRational::zero(); 2 * FIELD_DEGREE - 1];
        for i in 0..FIELD_DEGREE {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..FIELD_DEGREE {
                if other.c[j].is_zero() {
                    continue;
                }
                buf[i + j] += &self.c[i] * &other.c[j];
            }
        }
        reduce_buf(buf)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// the (irreducible) modulus; None only for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // r0 = modulus, r1 = self as a polynomial; track only the
        // self-cofactor s: s0 = 0, s1 = 1.
        let mut r0 = modulus_poly();
        let mut r1: Vec<BigRational> = self.c.to_vec();
        trim(&mut r1);
        let mut s0: Vec<BigRational> = vec![];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divmod(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r0 is a nonzero constant: gcd(self, modulus) since the modulus is
        // irreducible over Q.
        debug_assert_eq!(r0.len(), 1, "cyclotomic modulus must be coprime to nonzero elements");
        let scale = r0[0].recip();
        let mut c = zero_coeffs();
        for (i, q) in s0.iter().enumerate() {
            c[i] = q * &scale;
        }
        Some(Cyclo48 { c })
    }
}

/// Reduces a raw product buffer (degree < 31) mod zeta^16 - zeta^8 + 1.
fn reduce_buf(mut buf: Vec<BigRational>) -> Cyclo48 {
    for k in (FIELD_DEGREE..buf.len()).rev() {
        if buf[k].is_zero() {
            continue;
        }
        let q = std::mem::replace(&mut buf[k], BigRational::zero());
        buf[k - 8] += &q;
        buf[k - 16] -= q;
    }
    let mut c = zero_coeffs();
    for (i, q) in buf.into_iter().take(FIELD_DEGREE).enumerate() {
        c[i] = q;
    }
    Cyclo48 { c }
}

fn modulus_poly() -> Vec<BigRational> {
    let mut m = vec![BigRational::zero(); 17];
    m[0] = BigRational::one();
    m[8] = -BigRational::one();
    m[16] = BigRational::one();
    m
}

fn trim(p: &mut Vec<BigRational>) {
    while p.last().map_or(false, |q| q.is_zero()) {
        p.pop();
    }
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, q) in a.iter().enumerate() {
        out[i] += q;
    }
    for (i, q) in b.iter().enumerate() {
        out[i] -= q;
    }
    trim(&mut out);
    out
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, p) in a.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        for (j, q) in b.iter().enumerate() {
            out[i + j] += p * q;
        }
    }
    trim(&mut out);
    out
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    assert!(!b.is_empty(), "polynomial division by zero");
    let mut rem = a.to_vec();
    trim(&mut rem);
    if rem.len() < b.len() {
        return (vec![], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - b.len() + 1];
    let lead = b.last().expect("nonzero divisor has a leading term").recip();
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let factor = rem.last().expect("trimmed remainder is nonempty") * &lead;
        quot[shift] = factor.clone();
        for (j, q) in b.iter().enumerate() {
            let t = q * &factor;
            rem[shift + j] -= t;
        }
        trim(&mut rem);
        if rem.is_empty() {
            break;
        }
        if rem.len() > shift + b.len() - 1 {
            // Leading term must have cancelled; anything else is a logic bug.
            unreachable!("leading term survived cancellation");
        }
    }
    (quot, rem)
}

impl std::fmt::Debug for Cyclo48 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, q) in self.c.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{q}")?;
            } else if q.is_one() {
                write!(f, "z^{i}")?;
            } else {
                write!(f, "{q}*z^{i}")?;
            }
        }
        Ok(())
    }
}

impl crate::poly::Coeff for Cyclo48 {
    fn zero() -> Self {
        Cyclo48::zero()
    }
    fn one() -> Self {
        Cyclo48::one()
    }
    fn add(&self, other: &Self) -> Self {
        Cyclo48::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Cyclo48::mul(self, other)
    }
    fn neg(&self) -> Self {
        Cyclo48::neg(self)
    }
    fn is_zero(&self) -> bool {
        Cyclo48::is_zero(self)
    }
}

/// A 3x3 matrix over the cyclotomic field, stored by rows.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CycMatrix3 {
    rows: [[Cyclo48; 3]; 3],
}

impl CycMatrix3 {
    pub fn new(rows: [[Cyclo48; 3]; 3]) -> Self {
        CycMatrix3 { rows }
    }

    pub fn identity() -> Self {
        let rows = std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { Cyclo48::one() } else { Cyclo48::zero() })
        });
        CycMatrix3 { rows }
    }

    pub fn entry(&self, i: usize, j: usize) -> &Cyclo48 {
        &self.rows[i][j]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let rows = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc = Cyclo48::zero();
                for k in 0..3 {
                    acc = acc.add(&self.rows[i][k].mul(&other.rows[k][j]));
                }
                acc
            })
        });
        CycMatrix3 { rows }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = CycMatrix3::identity();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn trace(&self) -> Cyclo48 {
        self.rows[0][0].add(&self.rows[1][1]).add(&self.rows[2][2])
    }

    pub fn det(&self) -> Cyclo48 {
        let m = &self.rows;
        let mut acc = Cyclo48::zero();
        acc = acc.add(&m[0][0].mul(&m[1][1].mul(&m[2][2]).sub(&m[1][2].mul(&m[2][1]))));
        acc = acc.sub(&m[0][1].mul(&m[1][0].mul(&m[2][2]).sub(&m[1][2].mul(&m[2][0]))));
        acc = acc.add(&m[0][2].mul(&m[1][0].mul(&m[2][1]).sub(&m[1][1].mul(&m[2][0]))));
        acc
    }
}

/// The modular S-transformation on the three Ising characters:
/// rows ((1/2, 1/2, 1/sqrt 2), (1/2, 1/2, -1/sqrt 2), (1/sqrt 2, -1/sqrt 2, 0)).
pub fn rho_s() -> CycMatrix3 {
    let h = Cyclo48::from_rational(rat_frac(1, 2));
    let s = Cyclo48::inv_sqrt2();
    CycMatrix3::new([
        [h.clone(), h.clone(), s.clone()],
        [h.clone(), h, s.neg()],
        [s.clone(), s.neg(), Cyclo48::zero()],
    ])
}

/// The modular T-transformation: zeta^-1 * diag(1, -1, zeta^3), i.e. the
/// scalar e^(-2*pi*i/48) in front of diag(1, -1, e^(2*pi*i/16)).
pub fn rho_t() -> CycMatrix3 {
    let w = Cyclo48::zeta(-1);
    CycMatrix3::new([
        [w.clone(), Cyclo48::zero(), Cyclo48::zero()],
        [Cyclo48::zero(), w.neg(), Cyclo48::zero()],
        [Cyclo48::zero(), Cyclo48::zero(), w.mul(&Cyclo48::zeta(3))],
    ])
}

/// Lifts a rational polynomial into the cyclotomic coefficient ring.
pub fn lift_poly(p: &RatPoly) -> TriPoly<Cyclo48> {
    p.map_coeffs(|q| Cyclo48::from_rational(q.clone()))
}

/// p(M.(a,b,c)^T): each variable i is replaced by the linear form given by
/// row i of the matrix.
pub fn substitute_matrix(p: &TriPoly<Cyclo48>, m: &CycMatrix3) -> TriPoly<Cyclo48> {
    let images: [TriPoly<Cyclo48>; 3] = std::array::from_fn(|i| {
        let mut form = TriPoly::zero();
        for j in 0..3 {
            let mut exp = [0u32; 3];
            exp[j] = 1;
            form.add_term(exp, m.entry(i, j).clone());
        }
        form
    });
    p.substitute(&images)
}

/// True when substitution by the matrix fixes the polynomial exactly.
pub fn is_invariant(p: &RatPoly, m: &CycMatrix3) -> bool {
    let lifted = lift_poly(p);
    substitute_matrix(&lifted, m) == lifted
}

/// Multiplicative closure of the generators, as long as at most `cap`
/// elements appear. Every generator of a finite group has finite order, so
/// products alone reach inverses and the result is the full group.
pub fn group_closure(gens: &[CycMatrix3], cap: usize) -> Result<Vec<CycMatrix3>> {
    let mut seen: HashSet<CycMatrix3> = HashSet::new();
    let mut elements: Vec<CycMatrix3> = Vec::new();
    let mut queue: VecDeque<CycMatrix3> = VecDeque::new();
    let id = CycMatrix3::identity();
    seen.insert(id.clone());
    elements.push(id.clone());
    queue.push_back(id);
    while let Some(g) = queue.pop_front() {
        for gen in gens {
            let h = g.mul(gen);
            if seen.contains(&h) {
                continue;
            }
            if elements.len() == cap {
                return Err(Error::ClosureCap { cap });
            }
            seen.insert(h.clone());
            elements.push(h.clone());
            queue.push_back(h);
        }
    }
    Ok(elements)
}

/// Dimension of the degree-n invariant polynomials of a finite matrix group,
/// by Molien averaging: the per-element contribution is the trace of the
/// n-th symmetric power, computed through the Newton recurrence
/// h_m = (1/m) * sum_k p_k h_(m-k) with power sums p_k = tr(g^k) extended by
/// the characteristic polynomial. Elements sharing a characteristic
/// polynomial share the contribution, so the sum runs over those classes.
pub fn invariant_dimension(group: &[CycMatrix3], degree: u32) -> Result<u64> {
    const MAX_MOLIEN_DEGREE: u32 = 48;
    if degree > MAX_MOLIEN_DEGREE {
        return Err(Error::SizeGuard {
            what: "Molien degree",
            limit: MAX_MOLIEN_DEGREE as usize,
            actual: degree as usize,
        });
    }
    if group.is_empty() {
        return Err(Error::Invalid("invariant dimension of an empty element list".into()));
    }
    let mut classes: HashMap<(Cyclo48, Cyclo48, Cyclo48), u64> = HashMap::new();
    let half = rat_frac(1, 2);
    for g in group {
        let e1 = g.trace();
        let tr_sq = g.mul(g).trace();
        let e2 = e1.mul(&e1).sub(&tr_sq).scale(&half);
        let e3 = g.det();
        *classes.entry((e1, e2, e3)).or_insert(0) += 1;
    }
    let n = degree as usize;
    let mut total = Cyclo48::zero();
    for ((e1, e2, e3), count) in &classes {
        // Power sums from the elementary symmetric functions of the
        // eigenvalues, then complete homogeneous sums h_m.
        let mut p = vec![Cyclo48::zero(); n + 1];
        if n >= 1 {
            p[1] = e1.clone();
        }
        if n >= 2 {
            p[2] = e1.mul(&p[1]).sub(&e2.scale(&rat(2)));
        }
        if n >= 3 {
            p[3] = e1.mul(&p[2]).sub(&e2.mul(&p[1])).add(&e3.scale(&rat(3)));
        }
        for k in 4..=n {
            p[k] = e1
                .mul(&p[k - 1])
                .sub(&e2.mul(&p[k - 2]))
                .add(&e3.mul(&p[k - 3]));
        }
        let mut h = vec![Cyclo48::zero(); n + 1];
        h[0] = Cyclo48::one();
        for m in 1..=n {
            let mut acc = Cyclo48::zero();
            for k in 1..=m {
                acc = acc.add(&p[k].mul(&h[m - k]));
            }
            h[m] = acc.scale(&rat_frac(1, m as i64));
        }
        total = total.add(&h[n].scale(&rat(*count as i64)));
    }
    let avg = total.scale(&rat_frac(1, group.len() as i64));
    let value = avg.rational_part().ok_or_else(|| Error::NonIntegral {
        context: format!("Molien average at degree {degree} is not rational: {avg:?}"),
    })?;
    if !value.is_integer() || value.is_negative() {
        return Err(Error::NonIntegral {
            context: format!("Molien average at degree {degree} is {value}"),
        });
    }
    let int: BigInt = value.to_integer();
    u64::try_from(int).map_err(|_| Error::NonIntegral {
        context: format!("Molien average at degree {degree} exceeds u64"),
    })
}
