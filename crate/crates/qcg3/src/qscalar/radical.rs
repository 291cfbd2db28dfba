//! Square-root factors over multisets of q-integers.
//!
//! Every square root produced by the closed-form coefficients is a ratio of
//! q-factorials, so radicands are kept as multisets of q-integer labels
//! rather than as polynomials: `sqrt([2][5]/[3])` stores `{2,5} / {3}`.
//! Exact equality of radicands is then multiset comparison, and repeated
//! labels can be promoted in and out of the polynomial part.

use num_rational::BigRational;
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;

use super::bigfloat::BigFixed;
use super::qpoly::QExponentPoly;
use super::NumericContext;

/// Multiset of q-integer labels under a square root, numerator and
/// denominator. Canonical: no label 1, no label shared between numerator and
/// denominator, multiplicities at most 1 in the numerator (pairs are promoted
/// to the polynomial part) and at most 2 in the denominator (a leftover pair
/// means the polynomial part was not exactly divisible by that q-number).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default, Hash)]
pub struct Radicand {
    num: BTreeMap<u32, u32>,
    den: BTreeMap<u32, u32>,
}

impl Radicand {
    pub fn is_trivial(&self) -> bool {
        self.num.is_empty() && self.den.is_empty()
    }

    pub fn num_labels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.num.iter().map(|(l, m)| (*l, *m))
    }

    pub fn den_labels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.den.iter().map(|(l, m)| (*l, *m))
    }

    /// Numeric value of the radicand itself (the quantity under the root).
    pub fn eval(&self, ctx: &NumericContext) -> BigFixed {
        let mut acc = BigFixed::one(ctx.bits);
        for (l, m) in &self.num {
            for _ in 0..*m {
                acc = &acc * &ctx.q_number(*l as i64);
            }
        }
        for (l, m) in &self.den {
            for _ in 0..*m {
                acc = &acc / &ctx.q_number(*l as i64);
            }
        }
        acc
    }
}

fn push_labels(map: &mut BTreeMap<u32, u32>, labels: &[u32]) {
    for &l in labels {
        assert!(l > 0, "q-integer labels under a radical must be positive");
        if l > 1 {
            *map.entry(l).or_insert(0) += 1;
        }
    }
}

/// One exact term: `poly * sqrt(radicand)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RadicalMonomial {
    pub poly: QExponentPoly,
    pub radicand: Radicand,
}

impl RadicalMonomial {
    pub fn new(poly: QExponentPoly, num: &[u32], den: &[u32]) -> Self {
        let mut rad = Radicand::default();
        push_labels(&mut rad.num, num);
        push_labels(&mut rad.den, den);
        let mut m = RadicalMonomial { poly, radicand: rad };
        m.canonicalize();
        m
    }

    pub fn from_poly(poly: QExponentPoly) -> Self {
        RadicalMonomial { poly, radicand: Radicand::default() }
    }

    pub fn one() -> Self {
        RadicalMonomial::from_poly(QExponentPoly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Restore the canonical form documented on [`Radicand`].
    pub fn canonicalize(&mut self) {
        if self.poly.is_zero() {
            self.radicand = Radicand::default();
            return;
        }
        // cancel labels shared by numerator and denominator
        let labels: Vec<u32> = self.radicand.num.keys().copied().collect();
        for l in labels {
            if let Some(&dm) = self.radicand.den.get(&l) {
                let nm = self.radicand.num[&l];
                let c = nm.min(dm);
                set_mult(&mut self.radicand.num, l, nm - c);
                set_mult(&mut self.radicand.den, l, dm - c);
            }
        }
        // promote numerator pairs into the polynomial
        let labels: Vec<u32> = self.radicand.num.keys().copied().collect();
        for l in labels {
            let m = self.radicand.num[&l];
            if m >= 2 {
                let q = QExponentPoly::q_number(l as i64);
                for _ in 0..m / 2 {
                    self.poly = &self.poly * &q;
                }
                set_mult(&mut self.radicand.num, l, m % 2);
            }
        }
        // divide denominator pairs out of the polynomial where exact
        let labels: Vec<u32> = self.radicand.den.keys().copied().collect();
        for l in labels {
            let q = QExponentPoly::q_number(l as i64);
            while self.radicand.den.get(&l).copied().unwrap_or(0) >= 2 {
                match self.poly.try_div_exact(&q) {
                    Some(quo) => {
                        self.poly = quo;
                        let m = self.radicand.den[&l];
                        set_mult(&mut self.radicand.den, l, m - 2);
                    }
                    None => break,
                }
            }
        }
    }

    pub fn mul(&self, rhs: &RadicalMonomial) -> RadicalMonomial {
        let mut rad = self.radicand.clone();
        for (l, m) in &rhs.radicand.num {
            *rad.num.entry(*l).or_insert(0) += m;
        }
        for (l, m) in &rhs.radicand.den {
            *rad.den.entry(*l).or_insert(0) += m;
        }
        let mut out = RadicalMonomial { poly: &self.poly * &rhs.poly, radicand: rad };
        out.canonicalize();
        out
    }

    /// `1 / self`, defined only when the polynomial part is trivially
    /// invertible (a single monomial `c * q^(e/4)`), which covers every
    /// ladder-normalization factor in the pipeline.
    pub fn try_invert(&self) -> Option<RadicalMonomial> {
        let mut terms = self.poly.terms();
        let (e, c) = terms.next()?;
        if terms.next().is_some() {
            return None;
        }
        let inv_poly = QExponentPoly::monomial(BigRational::one() / c.clone(), -e);
        let mut out = RadicalMonomial {
            poly: inv_poly,
            radicand: Radicand {
                num: self.radicand.den.clone(),
                den: self.radicand.num.clone(),
            },
        };
        out.canonicalize();
        Some(out)
    }

    pub fn eval(&self, ctx: &NumericContext) -> BigFixed {
        let p = self.poly.eval(ctx);
        if self.radicand.is_trivial() {
            return p;
        }
        &p * &self.radicand.eval(ctx).sqrt()
    }
}

impl fmt::Display for Radicand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "1");
        }
        if self.num.is_empty() {
            write!(f, "1")?;
        } else {
            for (l, m) in &self.num {
                for _ in 0..*m {
                    write!(f, "[{l}]")?;
                }
            }
        }
        if !self.den.is_empty() {
            write!(f, "/")?;
            for (l, m) in &self.den {
                for _ in 0..*m {
                    write!(f, "[{l}]")?;
                }
            }
        }
        Ok(())
    }
}

fn set_mult(map: &mut BTreeMap<u32, u32>, label: u32, mult: u32) {
    if mult == 0 {
        map.remove(&label);
    } else {
        map.insert(label, mult);
    }
}

impl RadicalMonomial {
    /// Assemble a radicand from q-factorial expansions: each entry `n`
    /// contributes labels `2..=n`.
    pub fn factorial_labels(ns: &[i64]) -> Vec<u32> {
        let mut out = Vec::new();
        for &n in ns {
            debug_assert!(n >= 0);
            for l in 2..=n {
                out.push(l as u32);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_and_pair_promotion() {
        // sqrt([2]/[2]) -> 1
        let m = RadicalMonomial::new(QExponentPoly::one(), &[2], &[2]);
        assert!(m.radicand.is_trivial());
        assert!(m.poly.is_one());
        // sqrt([3][3]) -> [3]
        let m = RadicalMonomial::new(QExponentPoly::one(), &[3, 3], &[]);
        assert!(m.radicand.is_trivial());
        assert_eq!(m.poly, QExponentPoly::q_number(3));
        // sqrt([3][1]) -> sqrt([3]) ([1] = 1 drops out)
        let m = RadicalMonomial::new(QExponentPoly::one(), &[3, 1], &[]);
        assert_eq!(m.radicand.to_string(), "[3]");
    }

    #[test]
    fn denominator_pairs_divide_when_exact() {
        // [2] * sqrt(1/([2][2])) -> 1
        let m = RadicalMonomial::new(QExponentPoly::q_number(2), &[], &[2, 2]);
        assert!(m.radicand.is_trivial());
        assert!(m.poly.is_one());
        // 1 * sqrt(1/([2][2])) stays: poly 1 is not divisible by [2]
        let m = RadicalMonomial::new(QExponentPoly::one(), &[], &[2, 2]);
        assert_eq!(m.radicand.to_string(), "1/[2][2]");
    }

    #[test]
    fn inversion() {
        let m = RadicalMonomial::new(
            QExponentPoly::monomial(BigRational::one(), -1),
            &[],
            &[2],
        );
        let inv = m.try_invert().unwrap();
        let prod = m.mul(&inv);
        assert!(prod.radicand.is_trivial());
        assert!(prod.poly.is_one());
        assert!(RadicalMonomial::from_poly(QExponentPoly::q_number(2))
            .try_invert()
            .is_none());
    }
}
