//! Sparse multivariate polynomials over the color symbols `y_1..y_d` with
//! arbitrary-precision integer coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("inexact polynomial division")]
    InexactDivision,
    #[error("operands have different symbol counts ({0} vs {1})")]
    ArityMismatch(usize, usize),
}

/// A power product of the `d` color symbols, stored as an exponent vector.
///
/// Ordering is lexicographic on the exponents, which makes it a monomial
/// order (compatible with multiplication); leading terms under this order
/// drive exact division.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn unit(d: usize) -> Self {
        Monomial(vec![0; d])
    }

    /// The monomial `y_color^power` (color is 1-based).
    pub fn single(d: usize, color: usize, power: u32) -> Self {
        let mut exps = vec![0; d];
        exps[color - 1] = power;
        Monomial(exps)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise quotient; `None` when some exponent would go negative.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        debug_assert_eq!(self.0.len(), other.0.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<u32>>>()
            .map(Monomial)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "y{}", i + 1)?;
            } else {
                write!(f, "y{}^{}", i + 1, e)?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// A polynomial in canonical form: every stored coefficient is nonzero and
/// each monomial appears at most once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    d: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero(d: usize) -> Self {
        Polynomial {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(d: usize) -> Self {
        Polynomial::constant(d, BigInt::one())
    }

    pub fn constant(d: usize, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(d), c);
        }
        Polynomial { d, terms }
    }

    pub fn from_term(m: Monomial, c: BigInt) -> Self {
        let d = m.arity();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { d, terms }
    }

    pub fn arity(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// Coefficient of `m`, zero when the monomial is absent.
    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.d, other.d);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.d, other.d);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.d);
        }
        Polynomial {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    /// Total degree shared by all terms, when the polynomial is homogeneous.
    /// Zero is considered homogeneous of every degree and reports `None`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::total_degree);
        let first = it.next()?;
        it.all(|deg| deg == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, degree: u32) -> bool {
        self.terms.keys().all(|m| m.total_degree() == degree)
    }

    /// Leading term under the lexicographic monomial order.
    fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }
}

pub fn poly_mul(a: &Polynomial, b: &Polynomial) -> Polynomial {
    debug_assert_eq!(a.d, b.d);
    let mut out = Polynomial::zero(a.d);
    if a.is_zero() || b.is_zero() {
        return out;
    }
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            out.add_term(ma.mul(mb), ca * cb);
        }
    }
    out
}

/// Exact division in the integer polynomial ring. Errors when `b` does not
/// divide `a`; inside fraction-free elimination that signals a bug.
pub fn poly_div_exact(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
    if a.d != b.d {
        return Err(PolyError::ArityMismatch(a.d, b.d));
    }
    if b.is_zero() {
        return Err(PolyError::DivisionByZero);
    }
    let (lead_m, lead_c) = b.leading().expect("nonzero divisor has a leading term");
    let mut quotient = Polynomial::zero(a.d);
    let mut rem = a.clone();
    while let Some((rm, rc)) = rem.leading() {
        let qm = rm.div(lead_m).ok_or(PolyError::InexactDivision)?;
        if !(rc % lead_c).is_zero() {
            return Err(PolyError::InexactDivision);
        }
        let step = Polynomial::from_term(qm, rc / lead_c);
        rem = rem.sub(&poly_mul(&step, b));
        quotient = quotient.add(&step);
    }
    Ok(quotient)
}

/// Exponent of the largest power of two dividing `c`; `None` for zero.
pub fn two_adic_valuation(c: &BigInt) -> Option<u64> {
    if c.is_zero() {
        return None;
    }
    let mag = c.abs();
    let (_, bytes) = mag.to_bytes_le();
    let mut val = 0u64;
    for byte in bytes {
        if byte == 0 {
            val += 8;
        } else {
            val += byte.trailing_zeros() as u64;
            break;
        }
    }
    Some(val)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let mag = c.abs();
            if mag.is_one() && m.total_degree() > 0 {
                write!(f, "{}", m)?;
            } else if m.total_degree() == 0 {
                write!(f, "{}", mag)?;
            } else {
                write!(f, "{}*{}", mag, m)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(d: usize, color: usize) -> Polynomial {
        Polynomial::from_term(Monomial::single(d, color, 1), BigInt::one())
    }

    #[test]
    fn mul_squares_a_symbol() {
        let y1 = y(2, 1);
        let sq = poly_mul(&y1, &y1);
        assert_eq!(sq, Polynomial::from_term(Monomial::single(2, 1, 2), BigInt::one()));
    }

    #[test]
    fn mul_by_one_is_identity() {
        let d = 2;
        let p = Polynomial::from_term(Monomial(vec![2, 0]), BigInt::one())
            .add(&Polynomial::from_term(Monomial(vec![1, 1]), BigInt::one()));
        assert_eq!(poly_mul(&p, &Polynomial::one(d)), p);
    }

    #[test]
    fn difference_of_squares() {
        let (y1, y2) = (y(2, 1), y(2, 2));
        let sum = y1.add(&y2);
        let diff = y1.sub(&y2);
        let product = poly_mul(&sum, &diff);
        let expected = poly_mul(&y1, &y1).sub(&poly_mul(&y2, &y2));
        assert_eq!(product, expected);
    }

    #[test]
    fn exact_division_examples() {
        let (y1, y2) = (y(2, 1), y(2, 2));
        let num = poly_mul(&y1, &y1).sub(&poly_mul(&y2, &y2));
        let q = poly_div_exact(&num, &y1.add(&y2)).unwrap();
        assert_eq!(q, y1.sub(&y2));
        assert_eq!(poly_div_exact(&num, &Polynomial::one(2)).unwrap(), num);
    }

    #[test]
    fn inexact_division_is_an_error() {
        let (y1, y2) = (y(2, 1), y(2, 2));
        assert_eq!(poly_div_exact(&y1, &y2), Err(PolyError::InexactDivision));
        assert_eq!(
            poly_div_exact(&y1, &Polynomial::zero(2)),
            Err(PolyError::DivisionByZero)
        );
    }

    #[test]
    fn ring_laws_on_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let d = rng.gen_range(1..=3);
            let rand_poly = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut p = Polynomial::zero(d);
                for _ in 0..rng.gen_range(0..5) {
                    let m = Monomial((0..d).map(|_| rng.gen_range(0..4)).collect());
                    p.add_term(m, BigInt::from(rng.gen_range(-9i64..=9)));
                }
                p
            };
            let (a, b, c) = (rand_poly(&mut rng), rand_poly(&mut rng), rand_poly(&mut rng));
            assert_eq!(poly_mul(&a, &b), poly_mul(&b, &a));
            assert_eq!(
                poly_mul(&poly_mul(&a, &b), &c),
                poly_mul(&a, &poly_mul(&b, &c))
            );
            assert_eq!(
                poly_mul(&a, &b.add(&c)),
                poly_mul(&a, &b).add(&poly_mul(&a, &c))
            );
            if !b.is_zero() {
                assert_eq!(poly_div_exact(&poly_mul(&a, &b), &b).unwrap(), a);
            }
        }
    }

    #[test]
    fn two_adic_valuations() {
        assert_eq!(two_adic_valuation(&BigInt::from(0)), None);
        assert_eq!(two_adic_valuation(&BigInt::from(1)), Some(0));
        assert_eq!(two_adic_valuation(&BigInt::from(-12)), Some(2));
        let big = BigInt::from(3) << 200;
        assert_eq!(two_adic_valuation(&big), Some(200));
    }
}
