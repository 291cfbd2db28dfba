//! Half-integer spins and projections, stored exactly as doubled integers.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

/// A half-integer (`... -1, -1/2, 0, 1/2, 1 ...`) stored as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Half(i64);

impl Half {
    pub const ZERO: Half = Half(0);

    /// Construct from twice the value, so `Half::twice(3)` is `3/2`.
    pub const fn twice(doubled: i64) -> Half {
        Half(doubled)
    }

    pub const fn int(n: i64) -> Half {
        Half(2 * n)
    }

    /// Twice the value, always exact.
    pub const fn doubled(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// The value as an integer, if it is one.
    pub fn integer(self) -> Option<i64> {
        if self.is_integer() {
            Some(self.0 / 2)
        } else {
            None
        }
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn abs(self) -> Half {
        Half(self.0.abs())
    }

    /// Whether `self - other` is an integer (same "parity class").
    pub fn same_class(self, other: Half) -> bool {
        (self.0 - other.0) % 2 == 0
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, rhs: Half) -> Half {
        Half(self.0 - rhs.0)
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl fmt::Debug for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses `"3/2"`, `"-1/2"` or `"2"`. Floats are rejected: callers that
/// need exactness must never round-trip through binary fractions.
impl FromStr for Half {
    type Err = String;

    fn from_str(s: &str) -> Result<Half, String> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n: i64 = num
                .trim()
                .parse()
                .map_err(|_| format!("bad half-integer numerator in {s:?}"))?;
            let d: i64 = den
                .trim()
                .parse()
                .map_err(|_| format!("bad half-integer denominator in {s:?}"))?;
            match d {
                1 => Ok(Half::int(n)),
                2 => Ok(Half::twice(n)),
                _ => Err(format!("half-integers must have denominator 1 or 2, got {s:?}")),
            }
        } else {
            let n: i64 = s
                .parse()
                .map_err(|_| format!("bad half-integer {s:?} (floats are not accepted)"))?;
            Ok(Half::int(n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        assert_eq!("3/2".parse::<Half>().unwrap(), Half::twice(3));
        assert_eq!("-1/2".parse::<Half>().unwrap(), Half::twice(-1));
        assert_eq!("2".parse::<Half>().unwrap(), Half::int(2));
        assert_eq!(Half::twice(3).to_string(), "3/2");
        assert_eq!(Half::int(-4).to_string(), "-4");
        assert!("0.5".parse::<Half>().is_err());
        assert!("1/3".parse::<Half>().is_err());
    }

    #[test]
    fn arithmetic() {
        let j = Half::twice(3);
        let m = Half::twice(-1);
        assert_eq!((j + m).integer(), Some(1));
        assert_eq!(j - m, Half::int(2));
        assert!(!j.is_integer());
        assert!(j.same_class(m));
        assert!(!j.same_class(Half::int(1)));
    }
}
