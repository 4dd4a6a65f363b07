//! The real quadratic field Q(sqrt 13).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::Rational;
use crate::error::{Error, Result};

const RADICAND: i64 = 13;

/// `rational_part + root13_part * sqrt(13)`.
///
/// Since sqrt(13) is irrational the pair of coordinates is unique, so derived
/// equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadExt {
    rational_part: Rational,
    root13_part: Rational,
}

impl QuadExt {
    pub fn new(rational_part: Rational, root13_part: Rational) -> Self {
        QuadExt {
            rational_part,
            root13_part,
        }
    }

    pub fn rational(r: Rational) -> Self {
        QuadExt::new(r, Rational::zero())
    }

    pub fn sqrt13() -> Self {
        QuadExt::new(Rational::zero(), Rational::one())
    }

    pub fn zero() -> Self {
        QuadExt::default()
    }

    pub fn one() -> Self {
        QuadExt::rational(Rational::one())
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational_part
    }

    pub fn root13_part(&self) -> &Rational {
        &self.root13_part
    }

    pub fn is_zero(&self) -> bool {
        self.rational_part.is_zero() && self.root13_part.is_zero()
    }

    /// The value as a rational, if the sqrt(13) coordinate vanishes.
    pub fn to_rational(&self) -> Option<Rational> {
        self.root13_part
            .is_zero()
            .then(|| self.rational_part.clone())
    }

    pub fn conjugate(&self) -> Self {
        QuadExt::new(self.rational_part.clone(), -&self.root13_part)
    }

    /// Field norm `a^2 - 13 b^2`; zero only for zero.
    pub fn norm(&self) -> Rational {
        &self.rational_part * &self.rational_part
            - &self.root13_part * &self.root13_part * RADICAND
    }

    /// Exact sign of the real number `a + b sqrt(13)`.
    pub fn signum(&self) -> i32 {
        let a = self.rational_part.signum();
        let b = self.root13_part.signum();
        if a == 0 || b == 0 || a == b {
            return if a != 0 { a } else { b };
        }
        // Opposite signs: the larger of a^2 and 13 b^2 wins.
        let a_sq = &self.rational_part * &self.rational_part;
        let b_sq = &self.root13_part * &self.root13_part * RADICAND;
        match a_sq.cmp(&b_sq) {
            Ordering::Greater => a,
            Ordering::Less => b,
            Ordering::Equal => unreachable!("sqrt(13) is irrational"),
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn checked_div(&self, rhs: &QuadExt) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let norm = rhs.norm();
        let numer = self * &rhs.conjugate();
        Ok(QuadExt::new(
            numer.rational_part.checked_div(&norm)?,
            numer.root13_part.checked_div(&norm)?,
        ))
    }

    pub fn recip(&self) -> Result<Self> {
        QuadExt::one().checked_div(self)
    }

    pub fn pow(&self, exp: i32) -> Result<Self> {
        let base = if exp < 0 { self.recip()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = QuadExt::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        QuadExt::new(&self.rational_part * k, &self.root13_part * k)
    }

    /// Display only.
    pub fn to_f64(&self) -> f64 {
        self.rational_part.to_f64() + self.root13_part.to_f64() * (RADICAND as f64).sqrt()
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Rational> for QuadExt {
    fn from(r: Rational) -> Self {
        QuadExt::rational(r)
    }
}

impl From<i64> for QuadExt {
    fn from(n: i64) -> Self {
        QuadExt::rational(n.into())
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*sqrt13", self.rational_part, self.root13_part)
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses the `a+b*sqrt13` form written by `Display`.
impl FromStr for QuadExt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseRational(s.to_string());
        let body = s.trim().strip_suffix("*sqrt13").ok_or_else(bad)?;
        let split = body
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '+')
            .map(|(i, _)| i)
            .ok_or_else(bad)?;
        let a: Rational = body[..split].parse().map_err(|_| bad())?;
        let b: Rational = body[split + 1..].parse().map_err(|_| bad())?;
        Ok(QuadExt::new(a, b))
    }
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl Add<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: &QuadExt) -> QuadExt {
        QuadExt::new(
            &self.rational_part + &rhs.rational_part,
            &self.root13_part + &rhs.root13_part,
        )
    }
}

impl Sub<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: &QuadExt) -> QuadExt {
        QuadExt::new(
            &self.rational_part - &rhs.rational_part,
            &self.root13_part - &rhs.root13_part,
        )
    }
}

impl Mul<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: &QuadExt) -> QuadExt {
        let (a, b) = (&self.rational_part, &self.root13_part);
        let (c, d) = (&rhs.rational_part, &rhs.root13_part);
        QuadExt::new(a * c + b * d * RADICAND, a * d + b * c)
    }
}

macro_rules! owned_variants {
    ($trait:ident, $method:ident) => {
        impl $trait<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                $trait::$method(&self, rhs)
            }
        }
        impl $trait<QuadExt> for &QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                $trait::$method(self, &rhs)
            }
        }
    };
}

owned_variants!(Add, add);
owned_variants!(Sub, sub);
owned_variants!(Mul, mul);

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::new(-&self.rational_part, -&self.root13_part)
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn s_const() -> QuadExt {
        QuadExt::new(q("7/50"), q("1/50"))
    }

    fn h_const() -> QuadExt {
        QuadExt::new(q("7/50"), q("-1/50"))
    }

    #[test]
    fn norm_of_one_plus_root() {
        let x = QuadExt::new(q("1"), q("1"));
        let y = QuadExt::new(q("1"), q("-1"));
        assert_eq!(&x * &y, QuadExt::from(-12));
        assert_eq!(x.norm(), Rational::from(-12));
    }

    #[test]
    fn eigenvalue_sum_and_difference() {
        let (s, h) = (s_const(), h_const());
        assert_eq!(&s + &h, QuadExt::rational(q("7/25")));
        let diff = &s - &h;
        assert_eq!(diff, QuadExt::new(Rational::zero(), q("1/25")));
        assert_eq!(diff.signum(), 1);
    }

    #[test]
    fn eigenvalues_lie_in_open_quarter_interval() {
        let quarter = QuadExt::rational(q("1/4"));
        for x in [s_const(), h_const()] {
            assert!(x > QuadExt::zero());
            assert!(x < quarter);
        }
    }

    #[test]
    fn division() {
        let x = QuadExt::new(q("3"), q("-2/7"));
        let y = QuadExt::new(q("-5/3"), q("4"));
        assert_eq!(&x.checked_div(&y).unwrap() * &y, x);
        assert_eq!(x.checked_div(&QuadExt::zero()), Err(Error::DivisionByZero));
        assert_eq!(QuadExt::zero().recip(), Err(Error::DivisionByZero));
    }

    #[test]
    fn powers() {
        let v = QuadExt::new(q("1"), q("-1"));
        assert_eq!(v.pow(2).unwrap(), QuadExt::new(q("14"), q("-2")));
        assert_eq!(&v.pow(-3).unwrap() * &v.pow(3).unwrap(), QuadExt::one());
        assert_eq!(v.pow(0).unwrap(), QuadExt::one());
    }

    #[test]
    fn text_form() {
        let x = QuadExt::new(q("-7/50"), q("-1/50"));
        assert_eq!(x.to_string(), "-7/50+-1/50*sqrt13");
        assert_eq!(x.to_string().parse::<QuadExt>().unwrap(), x);
        assert!("1+2".parse::<QuadExt>().is_err());
    }

    /// Fixed-point evaluation of `a + b sqrt(13)` scaled by `10^SCALE`, via an
    /// integer square root. Independent of the conjugate-based sign rule.
    fn fixed_point_value(a: &Rational, b: &Rational) -> BigInt {
        const SCALE: u32 = 40;
        let ten = BigInt::from(10);
        let unit = num_traits::pow(ten, SCALE as usize);
        let root = (BigInt::from(13) * &unit * &unit).sqrt();
        let a_fixed = a.numer() * &unit / a.denom();
        let b_fixed = b.numer() * root / b.denom();
        a_fixed + b_fixed
    }

    proptest! {
        #[test]
        fn sign_agrees_with_high_precision_evaluation(
            an in -1_000_000i64..=1_000_000, ad in 1i64..=1000,
            bn in -1_000_000i64..=1_000_000, bd in 1i64..=1000,
        ) {
            let a = Rational::frac(an, ad);
            let b = Rational::frac(bn, bd);
            let fixed = fixed_point_value(&a, &b);
            // Only compare when the value is clearly away from zero (> 1e-10).
            let threshold = num_traits::pow(BigInt::from(10), 30);
            prop_assume!(fixed.magnitude() > threshold.magnitude());
            let expected = if fixed > BigInt::from(0) { 1 } else { -1 };
            prop_assert_eq!(QuadExt::new(a, b).signum(), expected);
        }

        #[test]
        fn near_cancellation_sign(b in 1i64..=100_000) {
            // a = round(b sqrt 13) +/- 1 puts the value within 1 of zero.
            let b_r = Rational::from(b);
            let approx = (BigInt::from(13) * BigInt::from(b) * BigInt::from(b)).sqrt();
            for a in [approx.clone(), approx + 1] {
                let a_r = Rational::from(a.clone());
                let x = QuadExt::new(-a_r.clone(), b_r.clone());
                let expected = (BigInt::from(13) * BigInt::from(b) * BigInt::from(b)).cmp(&(&a * &a));
                prop_assert_eq!(x.signum().cmp(&0), expected);
            }
        }

        #[test]
        fn ring_laws(
            a in -50i64..50, b in -50i64..50, c in -50i64..50,
            d in -50i64..50, e in -50i64..50, f in -50i64..50,
        ) {
            let x = QuadExt::new(a.into(), Rational::frac(b, 3));
            let y = QuadExt::new(Rational::frac(c, 7), d.into());
            let z = QuadExt::new(e.into(), f.into());
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            if !y.is_zero() {
                prop_assert_eq!(&x.checked_div(&y).unwrap() * &y, x.clone());
            }
            // Order is compatible with addition.
            prop_assert_eq!(x.cmp(&y), (&x + &z).cmp(&(&y + &z)));
        }
    }
}
