//! Exact dyadic rationals `num / 2^exp`.
//!
//! Every filter coefficient of an interpolating bank, and every value of the
//! scaling function at a dyadic point, is a dyadic rational. Keeping them in
//! this form lets the filter identities be checked with zero tolerance.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use crate::error::Error;

/// A dyadic rational `num / 2^exp`, normalised so that `exp == 0` or `num` is odd.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

/// Largest exponent a [`Dyadic`] may carry; `2^126` still fits an i128 denominator.
pub const MAX_EXP: u32 = 126;

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    /// Builds `num / 2^exp` and normalises it.
    pub fn new(num: i128, exp: u32) -> Self {
        Self::normalized(num, exp)
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic { num: v as i128, exp: 0 }
    }

    fn normalized(mut num: i128, mut exp: u32) -> Self {
        if num == 0 {
            return Dyadic::ZERO;
        }
        let tz = num.trailing_zeros().min(exp);
        num >>= tz;
        exp -= tz;
        Dyadic { num, exp }
    }

    pub fn numerator(self) -> i128 {
        self.num
    }

    /// Power of two in the denominator.
    pub fn exponent(self) -> u32 {
        self.exp
    }

    pub fn denominator(self) -> i128 {
        1i128 << self.exp
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_integer(self) -> bool {
        self.exp == 0
    }

    pub fn abs(self) -> Self {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        let exp = self.exp.max(rhs.exp);
        let a = self.num.checked_mul(1i128.checked_shl(exp - self.exp)?)?;
        let b = rhs.num.checked_mul(1i128.checked_shl(exp - rhs.exp)?)?;
        Some(Self::normalized(a.checked_add(b)?, exp))
    }

    pub fn checked_mul(self, rhs: Self) -> Option<Self> {
        let exp = self.exp.checked_add(rhs.exp)?;
        let num = self.num.checked_mul(rhs.num)?;
        let out = Self::normalized(num, exp);
        (out.exp <= MAX_EXP).then_some(out)
    }

    /// `self * 2^shift`; negative shifts divide.
    pub fn scale_pow2(self, shift: i32) -> Option<Self> {
        if self.num == 0 {
            return Some(Dyadic::ZERO);
        }
        if shift >= 0 {
            let s = shift as u32;
            if s <= self.exp {
                Some(Dyadic { num: self.num, exp: self.exp - s })
            } else {
                let k = s - self.exp;
                let f = 1i128.checked_shl(k)?;
                let num = self.num.checked_mul(f)?;
                // guard against the shift wrapping silently
                (num / f == self.num).then_some(Dyadic { num, exp: 0 })
            }
        } else {
            let exp = self.exp.checked_add(shift.unsigned_abs())?;
            (exp <= MAX_EXP).then_some(Dyadic { num: self.num, exp })
        }
    }

    /// Nearest binary64. The numerator is rounded once; the power-of-two
    /// division is exact unless the result is subnormal.
    pub fn to_f64(self) -> f64 {
        let n = self.num as f64;
        let mut e = self.exp;
        let mut v = n;
        while e > 60 {
            v /= (1u64 << 60) as f64;
            e -= 60;
        }
        v / (1u64 << e) as f64
    }

    /// Exact conversion from a binary64 value, when the value is finite.
    pub fn from_f64_exact(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Dyadic::ZERO);
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i128 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = (bits & ((1u64 << 52) - 1)) as i128;
        let (mant, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1i128 << 52), raw_exp - 1075)
        };
        if e >= 0 {
            let num = (mant * sign).checked_mul(1i128.checked_shl(e as u32)?)?;
            Some(Self::normalized(num, 0))
        } else {
            let d = Self::normalized(mant * sign, 0);
            d.scale_pow2(e)
        }
    }

    /// Integer floor.
    pub fn floor(self) -> i128 {
        self.num >> self.exp
    }

    /// Integer ceiling.
    pub fn ceil(self) -> i128 {
        -((-self.num) >> self.exp)
    }

    /// Parses `num`, `num/den` (den a power of two).
    pub fn parse(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse { what: "dyadic rational", input: s.into() };
        match s.split_once('/') {
            None => s.parse::<i128>().map(|n| Dyadic::new(n, 0)).map_err(|_| bad()),
            Some((n, d)) => {
                let n: i128 = n.trim().parse().map_err(|_| bad())?;
                let d: i128 = d.trim().parse().map_err(|_| bad())?;
                if d <= 0 || d.count_ones() != 1 {
                    return Err(bad());
                }
                Ok(Dyadic::new(n, d.trailing_zeros()))
            }
        }
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("dyadic addition overflowed i128")
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Self {
        Dyadic { num: -self.num, exp: self.exp }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("dyadic multiplication overflowed i128")
    }
}

impl core::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        // compare a/2^ea with b/2^eb by cross-shifting; fall back to f64 on overflow
        let a = self.num.checked_shl(exp - self.exp).filter(|v| v >> (exp - self.exp) == self.num);
        let b = other.num.checked_shl(exp - other.exp).filter(|v| v >> (exp - other.exp) == other.num);
        match (a, b) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => self.to_f64().partial_cmp(&other.to_f64()).unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.denominator())
        }
    }
}

impl FromStr for Dyadic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Dyadic::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn normalises_even_numerators() {
        let d = Dyadic::new(12, 4);
        assert_eq!(d.numerator(), 3);
        assert_eq!(d.exponent(), 2);
        assert_eq!(Dyadic::new(0, 9), Dyadic::ZERO);
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = Dyadic::new(9, 4);
        let b = Dyadic::new(-1, 4);
        assert_eq!(a + b, Dyadic::new(1, 1));
        assert_eq!(a * b, Dyadic::new(-9, 8));
        assert_eq!(a - a, Dyadic::ZERO);
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(Dyadic::new(-1, 1).to_string(), "-1/2");
        assert_eq!(Dyadic::from_int(3).to_string(), "3");
        assert_eq!(Dyadic::parse("150/256").unwrap(), Dyadic::new(75, 7));
        assert!(Dyadic::parse("1/3").is_err());
        assert!(Dyadic::parse("x").is_err());
    }

    #[test]
    fn floor_ceil() {
        let d = Dyadic::new(-3, 1);
        assert_eq!(d.floor(), -2);
        assert_eq!(d.ceil(), -1);
        assert_eq!(Dyadic::new(5, 1).floor(), 2);
        assert_eq!(Dyadic::new(5, 1).ceil(), 3);
    }

    #[test]
    fn f64_roundtrip() {
        for v in [0.5, -0.0625, 3.0, 1e-20, 0.1] {
            let d = Dyadic::from_f64_exact(v).unwrap();
            assert_eq!(d.to_f64(), v);
        }
    }

    #[test]
    fn ordering() {
        assert!(Dyadic::new(1, 1) < Dyadic::new(3, 2));
        assert!(Dyadic::new(-1, 1) < Dyadic::ZERO);
    }
}
