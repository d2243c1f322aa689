//! Arbitrary-precision rationals used for every rate, load and LP quantity.

use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

/// An exact rational number kept in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator fit in `i64` are stored inline and
/// promoted to arbitrary precision only when an operation would overflow.
#[derive(Clone)]
pub struct ExactRational(Repr);

#[derive(Clone)]
enum Repr {
    Small(Ratio<i64>),
    Big(BigRational),
}

fn normalize(big: BigRational) -> Repr {
    match (big.numer().to_i64(), big.denom().to_i64()) {
        (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => Repr::Small(Ratio::new_raw(n, d)),
        _ => Repr::Big(big),
    }
}

fn small_to_big(r: &Ratio<i64>) -> BigRational {
    BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

impl ExactRational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        if numer != i64::MIN && denom != i64::MIN {
            return Self(Repr::Small(Ratio::new(numer, denom)));
        }
        Self::from_big(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_integer(value: i64) -> Self {
        Self(Repr::Small(Ratio::from_integer(value)))
    }

    pub fn from_big(value: BigRational) -> Self {
        Self(normalize(value))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// Numerator and denominator when both fit in `i128`.
    pub fn to_i128_parts(&self) -> Option<(i128, i128)> {
        match &self.0 {
            Repr::Small(r) => Some((i128::from(*r.numer()), i128::from(*r.denom()))),
            Repr::Big(b) => Some((b.numer().to_i128()?, b.denom().to_i128()?)),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(r) => small_to_big(r),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => BigInt::from(*r.numer()),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => BigInt::from(*r.denom()),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.numer() == 0,
            Repr::Big(b) => b.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.numer() < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.numer() > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.denom() == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Self::from_big(self.to_big().recip())
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Lossy conversion for display and statistics only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(r) => *r.numer() as f64 / *r.denom() as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Decimal string rounded half away from zero to `places` digits.
    pub fn to_decimal(&self, places: usize) -> String {
        let big = self.to_big();
        let scale = num_traits::pow(BigInt::from(10u32), places);
        let scaled = big.abs() * BigRational::from_integer(scale.clone());
        let (q, r) = scaled.numer().div_rem(scaled.denom());
        let rounded = if r * BigInt::from(2) >= *scaled.denom() {
            q + BigInt::one()
        } else {
            q
        };
        let (int_part, frac_part) = rounded.div_rem(&scale);
        let sign = if big.is_negative() && !(int_part.is_zero() && frac_part.is_zero()) {
            "-"
        } else {
            ""
        };
        if places == 0 {
            return format!("{sign}{int_part}");
        }
        let frac = format!("{frac_part}");
        let mut padded = String::new();
        for _ in frac.len()..places {
            padded.push('0');
        }
        padded.push_str(&frac);
        format!("{sign}{int_part}.{padded}")
    }

    /// `num/den` followed by the 6-place decimal, e.g. `8/27 (0.296296)`.
    pub fn display_exact(&self) -> String {
        format!("{} ({})", self, self.to_decimal(6))
    }

    fn binop(
        &self,
        rhs: &Self,
        small: impl Fn(&Ratio<i64>, &Ratio<i64>) -> Option<Ratio<i64>>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Self {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
            if let Some(r) = small(a, b) {
                if *r.numer() != i64::MIN && *r.denom() != i64::MIN {
                    return Self(Repr::Small(r));
                }
            }
        }
        Self::from_big(big(self.to_big(), rhs.to_big()))
    }
}

impl PartialEq for ExactRational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            // canonical form: a value has exactly one representation
            _ => false,
        }
    }
}

impl Eq for ExactRational {}

impl core::hash::Hash for ExactRational {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(r) => {
                r.numer().hash(state);
                r.denom().hash(state);
            }
            Repr::Big(b) => b.hash(state),
        }
    }
}

impl Ord for ExactRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for ExactRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for ExactRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parse errors for [`ExactRational`] text (`a`, `a/b`).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

impl FromStr for ExactRational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(String::from(s));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Self::from_big(BigRational::new(n, d)))
    }
}

impl From<i64> for ExactRational {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl From<usize> for ExactRational {
    fn from(v: usize) -> Self {
        Self::from(v as u64)
    }
}

impl From<u64> for ExactRational {
    fn from(v: u64) -> Self {
        match i64::try_from(v) {
            Ok(small) => Self::from_integer(small),
            Err(_) => Self::from_big(BigRational::from_integer(BigInt::from(v))),
        }
    }
}

fn small_add(a: &Ratio<i64>, b: &Ratio<i64>) -> Option<Ratio<i64>> {
    if *a.denom() == 1 && *b.denom() == 1 {
        return a.numer().checked_add(b.numer()).map(Ratio::from_integer);
    }
    a.checked_add(b)
}

fn small_sub(a: &Ratio<i64>, b: &Ratio<i64>) -> Option<Ratio<i64>> {
    if *a.denom() == 1 && *b.denom() == 1 {
        return a.numer().checked_sub(b.numer()).map(Ratio::from_integer);
    }
    a.checked_sub(b)
}

fn small_mul(a: &Ratio<i64>, b: &Ratio<i64>) -> Option<Ratio<i64>> {
    if *a.numer() == 0 || *b.numer() == 0 {
        return Some(Ratio::from_integer(0));
    }
    a.checked_mul(b)
}

fn small_div(a: &Ratio<i64>, b: &Ratio<i64>) -> Option<Ratio<i64>> {
    assert!(*b.numer() != 0, "division by zero");
    a.checked_div(b)
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $small:ident) => {
        impl<'a> $trait<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                self.binop(rhs, $small, |a, b| a.$method(b))
            }
        }
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, small_add);
forward_binop!(Sub, sub, small_sub);
forward_binop!(Mul, mul, small_mul);
forward_binop!(Div, div, small_div);

impl AddAssign<&ExactRational> for ExactRational {
    fn add_assign(&mut self, rhs: &ExactRational) {
        *self = &*self + rhs;
    }
}

impl AddAssign for ExactRational {
    fn add_assign(&mut self, rhs: ExactRational) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&ExactRational> for ExactRational {
    fn sub_assign(&mut self, rhs: &ExactRational) {
        *self = &*self - rhs;
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        match self.0 {
            // i64::MIN never appears in the small form
            Repr::Small(r) => ExactRational(Repr::Small(Ratio::new_raw(-*r.numer(), *r.denom()))),
            Repr::Big(b) => ExactRational::from_big(-b),
        }
    }
}

impl Sum for ExactRational {
    fn sum<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a ExactRational> for ExactRational {
    fn sum<I: Iterator<Item = &'a ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |acc, x| acc + x)
    }
}

impl PartialEq<i64> for ExactRational {
    fn eq(&self, other: &i64) -> bool {
        *self == ExactRational::from_integer(*other)
    }
}

impl PartialOrd<i64> for ExactRational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&ExactRational::from_integer(*other)))
    }
}

/// Binomial coefficient as an exact integer; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    u64::try_from(acc).expect("binomial overflow")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rounding() {
        assert_eq!(ExactRational::new(8, 27).to_decimal(6), "0.296296");
        assert_eq!(ExactRational::new(8, 27).to_decimal(4), "0.2963");
        assert_eq!(ExactRational::new(1, 3).to_decimal(6), "0.333333");
        assert_eq!(ExactRational::new(2, 3).to_decimal(6), "0.666667");
        assert_eq!(ExactRational::new(-1, 2).to_decimal(0), "-1");
        assert_eq!(ExactRational::new(5, 4).to_decimal(6), "1.250000");
        assert_eq!(ExactRational::from_integer(3).to_decimal(2), "3.00");
    }

    #[test]
    fn display_is_num_over_den() {
        assert_eq!(alloc::format!("{}", ExactRational::new(4, 6)), "2/3");
        assert_eq!(alloc::format!("{}", ExactRational::from_integer(1)), "1/1");
        assert_eq!(ExactRational::new(8, 27).display_exact(), "8/27 (0.296296)");
    }

    #[test]
    fn parse() {
        assert_eq!(
            "3/6".parse::<ExactRational>().unwrap(),
            ExactRational::new(1, 2)
        );
        assert_eq!(
            "-4".parse::<ExactRational>().unwrap(),
            ExactRational::from_integer(-4)
        );
        assert!("1/0".parse::<ExactRational>().is_err());
        assert!("x".parse::<ExactRational>().is_err());
    }

    #[test]
    fn promotes_on_overflow_and_demotes_back() {
        let big = ExactRational::from_integer(i64::MAX);
        let sum = &big + &big;
        assert_eq!(sum.to_decimal(0), "18446744073709551614");
        let back = &sum - &big;
        assert_eq!(back, big);
        let tiny = ExactRational::new(1, i64::MAX);
        let prod = &tiny * &tiny;
        assert_eq!(&prod * &big, tiny);
        assert_eq!(-ExactRational::new(3, 4), ExactRational::new(-3, 4));
        assert_eq!(
            ExactRational::new(i64::MIN, 2),
            ExactRational::from_integer(i64::MIN / 2)
        );
    }

    #[test]
    fn ordering_across_representations() {
        let a = &ExactRational::from_integer(i64::MAX) * &ExactRational::from_integer(4);
        let b = ExactRational::new(1, 2);
        assert!(b < a);
        assert!(-a.clone() < b);
        assert!(ExactRational::new(1, 3) < ExactRational::new(1, 2));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(4, 5), 0);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(10, 3), 120);
    }
}
