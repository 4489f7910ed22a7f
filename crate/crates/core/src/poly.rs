//! Exact trivariate polynomials over a commutative coefficient ring.
//!
//! One polynomial type serves every enumerator and character polynomial in
//! the crate: weight enumerators over the integers, decomposition polynomials
//! over Q, and matrix-substituted images over the degree-16 cyclotomic field.
//! Terms live in a BTreeMap keyed by exponent triple, so iteration order,
//! serialization, and equality are all canonical.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Coefficient ring operations needed by the polynomial type.
pub trait Coeff: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

// Machine integers serve the hot enumeration loops; counts are bounded by the
// code sizes (at most 2^26), far inside i64 range.
impl Coeff for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
}

/// A polynomial in three variables. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct TriPoly<R: Coeff = BigRational> {
    terms: BTreeMap<[u32; 3], R>,
}

impl<R: Coeff + std::fmt::Debug> std::fmt::Debug for TriPoly<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<R: Coeff> Default for TriPoly<R> {
    fn default() -> Self {
        TriPoly::zero()
    }
}

impl<R: Coeff> TriPoly<R> {
    pub fn zero() -> Self {
        TriPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        TriPoly::constant(R::one())
    }

    pub fn constant(c: R) -> Self {
        let mut p = TriPoly::zero();
        p.add_term([0, 0, 0], c);
        p
    }

    /// The single variable `index` (0, 1, or 2).
    pub fn var(index: usize) -> Self {
        let mut exp = [0u32; 3];
        exp[index] = 1;
        let mut p = TriPoly::zero();
        p.add_term(exp, R::one());
        p
    }

    /// Convenience: `c * x0^e0 x1^e1 x2^e2`.
    pub fn monomial(exp: [u32; 3], c: R) -> Self {
        let mut p = TriPoly::zero();
        p.add_term(exp, c);
        p
    }

    pub fn add_term(&mut self, exp: [u32; 3], c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 3], &R)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: [u32; 3]) -> R {
        self.terms.get(&exp).cloned().unwrap_or_else(R::zero)
    }

    /// True when every term has the same total degree (vacuously for zero).
    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(|e| e[0] + e[1] + e[2]);
        match degrees.next() {
            None => true,
            Some(d) => degrees.all(|e| e == d),
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e[0] + e[1] + e[2])
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (exp, c) in &other.terms {
            out.add_term(*exp, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (exp, c) in &other.terms {
            out.add_term(*exp, c.neg());
        }
        out
    }

    pub fn scale(&self, c: &R) -> Self {
        if c.is_zero() {
            return TriPoly::zero();
        }
        let mut out = TriPoly::zero();
        for (exp, v) in &self.terms {
            out.add_term(*exp, v.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = TriPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(
                    [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]],
                    ca.mul(cb),
                );
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        // Square-and-multiply keeps intermediate sizes down for the
        // degree-24 powers the closed enumerator formulas need.
        let mut result = TriPoly::one();
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

    /// Substitutes `images[i]` for variable `i`, by nested Horner evaluation
    /// (cheapest when images are short, as matrix rows are).
    pub fn substitute(&self, images: &[TriPoly<R>; 3]) -> TriPoly<R> {
        // Regroup terms as a poly in x0 whose coefficients are polys in x1,
        // whose coefficients are polys in x2; then Horner from the inside out.
        let mut grouped: BTreeMap<u32, BTreeMap<u32, BTreeMap<u32, R>>> = BTreeMap::new();
        for (exp, c) in &self.terms {
            grouped
                .entry(exp[0])
                .or_default()
                .entry(exp[1])
                .or_default()
                .insert(exp[2], c.clone());
        }
        let horner = |layers: Vec<(u32, TriPoly<R>)>, image: &TriPoly<R>| -> TriPoly<R> {
            // layers: (exponent, coefficient-poly), exponent strictly increasing.
            let mut acc = TriPoly::zero();
            let mut prev_exp = None;
            for (e, p) in layers.into_iter().rev() {
                if let Some(pe) = prev_exp {
                    let gap: u32 = pe - e;
                    for _ in 0..gap {
                        acc = acc.mul(image);
                    }
                }
                acc = acc.add(&p);
                prev_exp = Some(e);
            }
            if let Some(e) = prev_exp {
                for _ in 0..e {
                    acc = acc.mul(image);
                }
            }
            acc
        };
        let mut outer: Vec<(u32, TriPoly<R>)> = Vec::new();
        for (e0, by1) in grouped {
            let mut middle: Vec<(u32, TriPoly<R>)> = Vec::new();
            for (e1, by2) in by1 {
                let inner: Vec<(u32, TriPoly<R>)> = by2
                    .into_iter()
                    .map(|(e2, c)| (e2, TriPoly::constant(c)))
                    .collect();
                middle.push((e1, horner(inner, &images[2])));
            }
            outer.push((e0, horner(middle, &images[1])));
        }
        horner(outer, &images[0])
    }

    /// Evaluates at a point of the coefficient ring.
    pub fn eval(&self, point: &[R; 3]) -> R {
        let mut powers: [Vec<R>; 3] = [vec![R::one()], vec![R::one()], vec![R::one()]];
        for (v, p) in powers.iter_mut().enumerate() {
            let max = self.terms.keys().map(|e| e[v]).max().unwrap_or(0);
            for i in 1..=max as usize {
                let next = p[i - 1].mul(&point[v]);
                p.push(next);
            }
        }
        let mut acc = R::zero();
        for (exp, c) in &self.terms {
            let t = c
                .mul(&powers[0][exp[0] as usize])
                .mul(&powers[1][exp[1] as usize])
                .mul(&powers[2][exp[2] as usize]);
            acc = acc.add(&t);
        }
        acc
    }

    /// Applies a map to every coefficient, dropping zeros.
    pub fn map_coeffs<S: Coeff>(&self, f: impl Fn(&R) -> S) -> TriPoly<S> {
        let mut out = TriPoly::zero();
        for (exp, c) in &self.terms {
            out.add_term(*exp, f(c));
        }
        out
    }
}

pub type RatPoly = TriPoly<BigRational>;

/// Lifts an integer-coefficient polynomial into the rational type.
pub fn to_rational(p: &TriPoly<i64>) -> RatPoly {
    p.map_coeffs(|&c| rat(c))
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl RatPoly {
    pub fn from_int_terms(terms: &[(i64, [u32; 3])]) -> RatPoly {
        let mut p = RatPoly::zero();
        for &(c, exp) in terms {
            p.add_term(exp, rat(c));
        }
        p
    }

    /// Renders with the given variable names, highest total degree first and
    /// lexicographic within a degree. Integer coefficients print bare.
    pub fn to_text(&self, names: [&str; 3]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut keys: Vec<&[u32; 3]> = self.terms.keys().collect();
        keys.sort_by_key(|e| (std::cmp::Reverse(e[0] + e[1] + e[2]), std::cmp::Reverse(**e)));
        let mut out = String::new();
        for (i, exp) in keys.iter().enumerate() {
            let c = &self.terms[*exp];
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let is_const = exp.iter().all(|&e| e == 0);
            if !abs.is_one() || is_const {
                if abs.is_integer() {
                    out.push_str(&abs.numer().to_string());
                } else {
                    out.push_str(&format!("{}/{}", abs.numer(), abs.denom()));
                }
                if !is_const {
                    out.push(' ');
                }
            }
            let mut first_var = true;
            for (v, &e) in exp.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first_var {
                    out.push(' ');
                }
                first_var = false;
                out.push_str(names[v]);
                if e > 1 {
                    out.push_str(&format!("^{e}"));
                }
            }
        }
        out
    }

    /// All coefficients must be integers; returns them with the exponents.
    pub fn integer_terms(&self) -> Result<Vec<([u32; 3], BigInt)>> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (exp, c) in &self.terms {
            if !c.is_integer() {
                return Err(Error::NonIntegral {
                    context: format!("coefficient {c} at exponent {exp:?}"),
                });
            }
            out.push((*exp, c.numer().clone()));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> (RatPoly, RatPoly, RatPoly) {
        (RatPoly::var(0), RatPoly::var(1), RatPoly::var(2))
    }

    #[test]
    fn binomial_cube_expands() {
        let (x, y, _) = xyz();
        let p = x.add(&y).pow(3);
        assert_eq!(p.coeff([3, 0, 0]), rat(1));
        assert_eq!(p.coeff([2, 1, 0]), rat(3));
        assert_eq!(p.coeff([1, 2, 0]), rat(3));
        assert_eq!(p.coeff([0, 3, 0]), rat(1));
        assert_eq!(p.num_terms(), 4, "(x+y)^3 has four monomials");
    }

    #[test]
    fn cancellation_prunes_terms() {
        let (x, y, _) = xyz();
        let p = x.add(&y).mul(&x.sub(&y));
        let q = x.mul(&x).sub(&y.mul(&y));
        assert_eq!(p, q, "difference of squares identity");
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn substitution_matches_direct_expansion() {
        let (x, y, z) = xyz();
        // p(x,y,z) = x^2 y + z: substitute x -> x+z, y -> y^2, z -> 1.
        let p = x.pow(2).mul(&y).add(&z);
        let images = [x.add(&z), y.pow(2), RatPoly::one()];
        let result = p.substitute(&images);
        let expect = x.add(&z).pow(2).mul(&y.pow(2)).add(&RatPoly::one());
        assert_eq!(result, expect, "Horner substitution must equal direct expansion");
    }

    #[test]
    fn substitution_handles_exponent_gaps() {
        let (x, _, _) = xyz();
        // x^5 + x^2 exercises nonconsecutive Horner exponents.
        let p = x.pow(5).add(&x.pow(2));
        let r = p.substitute(&[RatPoly::constant(rat(2)), RatPoly::zero(), RatPoly::zero()]);
        assert_eq!(r, RatPoly::constant(rat(36)), "2^5 + 2^2 = 36");
    }

    #[test]
    fn eval_agrees_with_substitute_by_constants() {
        let (x, y, z) = xyz();
        let p = x.pow(3).add(&y.mul(&z).scale(&rat(7))).sub(&RatPoly::constant(rat(5)));
        let v = p.eval(&[rat(2), rat(3), rat_frac(1, 2)]);
        assert_eq!(v, rat(8) + rat_frac(21, 2) - rat(5));
    }

    #[test]
    fn text_rendering_orders_by_degree() {
        let (x, y, _) = xyz();
        let p = y.pow(2).add(&x.pow(4).scale(&rat(3))).sub(&RatPoly::one());
        assert_eq!(p.to_text(["a", "b", "c"]), "3 a^4 + b^2 - 1");
    }

    #[test]
    fn integer_terms_rejects_fractions() {
        let p = RatPoly::constant(rat_frac(1, 2));
        assert!(p.integer_terms().is_err(), "half is not an integer coefficient");
    }
}
