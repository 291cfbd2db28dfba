//! Fixed-point reals over `BigInt` for the arbitrary-precision numeric backend.
//!
//! A value is `mant / 2^bits`, with `bits` chosen from the requested decimal
//! precision plus guard digits. Every quantity in this crate is O(1)..O([n]!)
//! in magnitude, so absolute fixed-point error `2^-bits` translates directly
//! into the decimal tolerances quoted by the verification suites.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// log2(10) scaled by 2^16, rounded up.
const LOG2_10_Q16: u64 = 217706;

/// Binary precision for a target of `digits` decimal digits, with 30 guard digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (((digits as u64 + 30) * LOG2_10_Q16) >> 16) as u32 + 2
}

#[derive(Clone, PartialEq, Eq)]
pub struct BigFixed {
    mant: BigInt,
    bits: u32,
}

impl BigFixed {
    pub fn zero(bits: u32) -> Self {
        BigFixed { mant: BigInt::zero(), bits }
    }

    pub fn one(bits: u32) -> Self {
        BigFixed { mant: BigInt::from(1) << bits, bits }
    }

    pub fn from_i64(v: i64, bits: u32) -> Self {
        BigFixed { mant: BigInt::from(v) << bits, bits }
    }

    pub fn from_rational(r: &BigRational, bits: u32) -> Self {
        BigFixed { mant: div_rounded(r.numer() << bits, r.denom()), bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        BigFixed { mant: self.mant.abs(), bits: self.bits }
    }

    /// Square root; panics on negative input (radicands here are positive by
    /// construction).
    pub fn sqrt(&self) -> Self {
        assert!(
            !self.is_negative(),
            "sqrt of negative fixed-point value"
        );
        BigFixed { mant: (&self.mant << self.bits).sqrt(), bits: self.bits }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero fixed-point value");
        BigFixed { mant: div_rounded(BigInt::from(1) << (2 * self.bits), &self.mant), bits: self.bits }
    }

    /// Integer power by repeated squaring; negative exponents invert once.
    pub fn powi(&self, e: i64) -> Self {
        if e == 0 {
            return BigFixed::one(self.bits);
        }
        let mut base = if e < 0 { self.recip() } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = BigFixed::one(self.bits);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `10^-k` at this precision, used for tolerance thresholds.
    pub fn pow10_neg(k: u32, bits: u32) -> Self {
        let den = BigInt::from(10u32).pow(k);
        BigFixed { mant: div_rounded(BigInt::from(1) << bits, &den), bits }
    }

    /// Decimal rendering with `digits` fractional digits, exact for the stored
    /// fixed-point value (rounded at the last printed digit).
    pub fn to_decimal(&self, digits: u32) -> String {
        let neg = self.mant.is_negative();
        let scaled = self.mant.abs() * BigInt::from(10u32).pow(digits);
        let dec = div_rounded(scaled, &(BigInt::from(1) << self.bits));
        let s = dec.to_string();
        let (int_part, frac_part) = if s.len() > digits as usize {
            let split = s.len() - digits as usize;
            (s[..split].to_string(), s[split..].to_string())
        } else {
            ("0".to_string(), format!("{:0>width$}", s, width = digits as usize))
        };
        let sign = if neg && (int_part != "0" || frac_part.bytes().any(|b| b != b'0')) {
            "-"
        } else {
            ""
        };
        format!("{sign}{int_part}.{frac_part}")
    }

    /// Parse a plain decimal string produced by [`to_decimal`](Self::to_decimal).
    pub fn parse_decimal(s: &str, bits: u32) -> Option<Self> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = frac_part.len() as u32;
        let combined: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
        let mant = div_rounded(combined << bits, &BigInt::from(10u32).pow(digits));
        Some(BigFixed { mant: if neg { -mant } else { mant }, bits })
    }
}

/// Rounded division, half away from zero. BigInt `/` truncates toward zero,
/// so shift the numerator by half a denominator in the quotient's direction.
fn div_rounded(num: BigInt, den: &BigInt) -> BigInt {
    let two_num = num << 1u8;
    let adj = if two_num.is_negative() != den.is_negative() {
        two_num - den
    } else {
        two_num + den
    };
    adj / (den << 1u8)
}

impl Add for &BigFixed {
    type Output = BigFixed;
    fn add(self, rhs: &BigFixed) -> BigFixed {
        debug_assert_eq!(self.bits, rhs.bits);
        BigFixed { mant: &self.mant + &rhs.mant, bits: self.bits }
    }
}

impl Sub for &BigFixed {
    type Output = BigFixed;
    fn sub(self, rhs: &BigFixed) -> BigFixed {
        debug_assert_eq!(self.bits, rhs.bits);
        BigFixed { mant: &self.mant - &rhs.mant, bits: self.bits }
    }
}

impl Mul for &BigFixed {
    type Output = BigFixed;
    fn mul(self, rhs: &BigFixed) -> BigFixed {
        debug_assert_eq!(self.bits, rhs.bits);
        BigFixed { mant: div_rounded(&self.mant * &rhs.mant, &(BigInt::from(1) << self.bits)), bits: self.bits }
    }
}

impl Div for &BigFixed {
    type Output = BigFixed;
    fn div(self, rhs: &BigFixed) -> BigFixed {
        debug_assert_eq!(self.bits, rhs.bits);
        assert!(!rhs.is_zero(), "division by zero fixed-point value");
        BigFixed { mant: div_rounded(&self.mant << self.bits, &rhs.mant), bits: self.bits }
    }
}

impl Neg for &BigFixed {
    type Output = BigFixed;
    fn neg(self) -> BigFixed {
        BigFixed { mant: -&self.mant, bits: self.bits }
    }
}

impl PartialOrd for BigFixed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigFixed {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.bits, other.bits);
        self.mant.cmp(&other.mant)
    }
}

impl fmt::Debug for BigFixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(30))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn bf(v: i64, bits: u32) -> BigFixed {
        BigFixed::from_i64(v, bits)
    }

    #[test]
    fn sqrt_two_to_sixty_digits() {
        let bits = bits_for_digits(60);
        let s = bf(2, bits).sqrt().to_decimal(60);
        // independently known digits of sqrt(2)
        assert_eq!(
            s,
            "1.414213562373095048801688724209698078569671875376948073176680"
        );
    }

    #[test]
    fn rational_and_decimal_round_trip() {
        let bits = bits_for_digits(40);
        let q = BigRational::new(BigInt::from(9), BigInt::from(10));
        let x = BigFixed::from_rational(&q, bits);
        assert_eq!(&x.to_decimal(10)[..4], "0.90");
        let back = BigFixed::parse_decimal(&x.to_decimal(45), bits).unwrap();
        let diff = (&back - &x).abs();
        assert!(diff < BigFixed::pow10_neg(44, bits));
    }

    #[test]
    fn powi_and_recip() {
        let bits = bits_for_digits(50);
        let q = BigFixed::from_rational(&BigRational::new(BigInt::from(9), BigInt::from(10)), bits);
        let fourth = q.sqrt().sqrt();
        let diff = (&fourth.powi(4) - &q).abs();
        assert!(diff < BigFixed::pow10_neg(48, bits));
        let diff = (&(&q.powi(-3) * &q.powi(3)) - &BigFixed::one(bits)).abs();
        assert!(diff < BigFixed::pow10_neg(48, bits));
    }

    #[test]
    fn negative_decimal_rendering() {
        let bits = bits_for_digits(10);
        assert_eq!(bf(-3, bits).to_decimal(2), "-3.00");
        assert_eq!(BigFixed::zero(bits).to_decimal(2), "0.00");
    }
}
