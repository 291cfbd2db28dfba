//! Laurent polynomials in quarter powers of q with rational coefficients.
//!
//! Exponents are stored as integers counting quarters of a power of q, so
//! `q^(1/2)` has exponent 2 and `q^(-1/4)` has exponent -1. This keeps every
//! phase that appears in the closed-form coefficients on an exact integer
//! lattice.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::bigfloat::BigFixed;
use super::NumericContext;

/// Map from quarter-exponent to nonzero rational coefficient. Canonical: no
/// stored zero coefficients, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct QExponentPoly {
    terms: BTreeMap<i64, BigRational>,
}

impl QExponentPoly {
    pub fn zero() -> Self {
        QExponentPoly::default()
    }

    pub fn one() -> Self {
        QExponentPoly::monomial(BigRational::one(), 0)
    }

    /// `coef * q^(quarters/4)`.
    pub fn monomial(coef: BigRational, quarters: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(quarters, coef);
        }
        QExponentPoly { terms }
    }

    pub fn from_integer(n: i64) -> Self {
        QExponentPoly::monomial(BigRational::from(BigInt::from(n)), 0)
    }

    /// The q-number [n] expanded as a Laurent polynomial; [-n] = -[n], [0] = 0.
    pub fn q_number(n: i64) -> Self {
        let mut p = QExponentPoly::zero();
        let a = n.unsigned_abs() as i64;
        for k in 0..a {
            // q^((a-1-2k)/2)
            p.add_term(2 * (a - 1 - 2 * k), BigRational::one());
        }
        if n < 0 {
            p = -&p;
        }
        p
    }

    /// [n]! as a polynomial; caller guarantees n >= 0.
    pub fn q_factorial(n: i64) -> Self {
        debug_assert!(n >= 0);
        let mut p = QExponentPoly::one();
        for m in 2..=n {
            p = &p * &QExponentPoly::q_number(m);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&0)
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn add_term(&mut self, quarters: i64, coef: BigRational) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(quarters) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + coef;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Multiply by `coef * q^(quarters/4)` in place.
    pub fn scale(&self, coef: &BigRational, quarters: i64) -> Self {
        if coef.is_zero() {
            return QExponentPoly::zero();
        }
        QExponentPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e + quarters, c * coef))
                .collect(),
        }
    }

    /// Substitution q -> 1/q, i.e. negate all exponents.
    pub fn invert_q(&self) -> Self {
        QExponentPoly {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Exact Laurent-polynomial division: `Some(self / rhs)` when the
    /// remainder vanishes, `None` otherwise.
    pub fn try_div_exact(&self, rhs: &QExponentPoly) -> Option<QExponentPoly> {
        if rhs.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(QExponentPoly::zero());
        }
        let lead_exp = rhs.max_exp()?;
        let lead_coef = rhs.terms[&lead_exp].clone();
        // any valid quotient exponent lies at or above this
        let quo_min = self.min_exp()? - rhs.min_exp()?;
        let mut rem = self.clone();
        let mut quo = QExponentPoly::zero();
        while !rem.is_zero() {
            let re = rem.max_exp().unwrap();
            let qe = re - lead_exp;
            if qe < quo_min {
                return None;
            }
            let qc = &rem.terms[&re] / &lead_coef;
            quo.add_term(qe, qc.clone());
            rem = &rem - &rhs.scale(&qc, qe);
        }
        Some(quo)
    }

    fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Evaluate at the context's q.
    pub fn eval(&self, ctx: &NumericContext) -> BigFixed {
        let mut acc = BigFixed::zero(ctx.bits);
        for (e, c) in &self.terms {
            let term = &BigFixed::from_rational(c, ctx.bits) * &ctx.q_quarter_pow(*e);
            acc = &acc + &term;
        }
        acc
    }
}

impl Add for &QExponentPoly {
    type Output = QExponentPoly;
    fn add(self, rhs: &QExponentPoly) -> QExponentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &QExponentPoly {
    type Output = QExponentPoly;
    fn sub(self, rhs: &QExponentPoly) -> QExponentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &QExponentPoly {
    type Output = QExponentPoly;
    fn mul(self, rhs: &QExponentPoly) -> QExponentPoly {
        let mut out = QExponentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &QExponentPoly {
    type Output = QExponentPoly;
    fn neg(self) -> QExponentPoly {
        QExponentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_number_expansions() {
        assert!(QExponentPoly::q_number(0).is_zero());
        assert!(QExponentPoly::q_number(1).is_one());
        // [2] = q^(1/2) + q^(-1/2)
        let two = QExponentPoly::q_number(2);
        let expected = {
            let mut p = QExponentPoly::monomial(BigRational::one(), 2);
            p.add_term(-2, BigRational::one());
            p
        };
        assert_eq!(two, expected);
        assert_eq!(QExponentPoly::q_number(-3), -&QExponentPoly::q_number(3));
    }

    #[test]
    fn palindromic_under_q_inversion() {
        for n in 1..20 {
            let p = QExponentPoly::q_number(n);
            assert_eq!(p, p.invert_q(), "[{n}] must be invariant under q -> 1/q");
        }
    }

    #[test]
    fn exact_division() {
        let a = QExponentPoly::q_factorial(5);
        let b = QExponentPoly::q_factorial(3);
        let q = a.try_div_exact(&b).expect("[5]! divisible by [3]!");
        let back = &q * &b;
        assert_eq!(back, a);
        // [2] does not divide [3]
        assert!(QExponentPoly::q_number(3)
            .try_div_exact(&QExponentPoly::q_number(2))
            .is_none());
        // [6] is divisible by both [2] and [3]
        let six = QExponentPoly::q_number(6);
        assert!(six.try_div_exact(&QExponentPoly::q_number(2)).is_some());
        assert!(six.try_div_exact(&QExponentPoly::q_number(3)).is_some());
    }
}
