//! Elements of Q(i) as canonical fractions over Z[i] with a rational-integer
//! denominator.
//!
//! Canonical form: den > 0, and gcd over Z of (num.re, num.im, den) = 1.
//! Two values are equal iff their canonical forms are equal.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::int::GaussianInt;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    num: GaussianInt,
    den: BigInt,
}

impl GaussianRational {
    /// Builds `num/den` in canonical form. `den` may be negative or zero here;
    /// zero is rejected.
    pub fn new(num: GaussianInt, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: GaussianInt, den: BigInt) -> Self {
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        if num.is_zero() {
            return Self { num, den: BigInt::one() };
        }
        if den.is_one() {
            return Self { num, den };
        }
        let g = num.re().gcd(num.im()).gcd(&den);
        if g.is_one() {
            Self { num, den }
        } else {
            Self {
                num: GaussianInt::new(num.re() / &g, num.im() / &g),
                den: den / g,
            }
        }
    }

    pub fn from_gauss(z: GaussianInt) -> Self {
        Self { num: z, den: BigInt::one() }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::from_gauss(GaussianInt::from_int(n))
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::reduced(GaussianInt::new(r.numer().clone(), 0), r.denom().clone())
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        Self::from_gauss(GaussianInt::i())
    }

    pub fn num(&self) -> &GaussianInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.num.im().is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn re(&self) -> BigRational {
        BigRational::new(self.num.re().clone(), self.den.clone())
    }

    pub fn im(&self) -> BigRational {
        BigRational::new(self.num.im().clone(), self.den.clone())
    }

    /// Exact rational value if the element is real.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_real().then(|| self.re())
    }

    pub fn conj(&self) -> Self {
        Self { num: self.num.conj(), den: self.den.clone() }
    }

    /// |x|^2 as an exact rational.
    pub fn norm(&self) -> BigRational {
        BigRational::new(self.num.norm(), &self.den * &self.den)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // 1/(z/d) = d·conj(z)/N(z)
        let num = GaussianInt::new(self.den.clone(), 0) * self.num.conj();
        Ok(Self::reduced(num, self.num.norm()))
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        let num = &self.num * &GaussianInt::new(r.numer().clone(), 0);
        Self::reduced(num, &self.den * r.denom())
    }

    /// Integral part check, used for local integrality tests.
    pub fn to_gauss_int(&self) -> Option<GaussianInt> {
        self.is_integral().then(|| self.num.clone())
    }
}

impl Add<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        let num = &self.num * &GaussianInt::new(rhs.den.clone(), 0)
            + &rhs.num * &GaussianInt::new(self.den.clone(), 0);
        GaussianRational::reduced(num, &self.den * &rhs.den)
    }
}

impl Sub<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        self + &(-rhs)
    }
}

impl Mul<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::reduced(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self * &rhs.inv().expect("division by zero")
    }
}

macro_rules! forward_rat_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
        impl $trait<GaussianRational> for &GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                self.$method(&rhs)
            }
        }
    };
}
forward_rat_binop!(Add, add);
forward_rat_binop!(Sub, sub);
forward_rat_binop!(Mul, mul);
forward_rat_binop!(Div, div);

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { num: -self.num, den: self.den }
    }
}

impl From<GaussianInt> for GaussianRational {
    fn from(z: GaussianInt) -> Self {
        Self::from_gauss(z)
    }
}

impl fmt::Display for GaussianRational {
    /// Serializes as "(a+bi)/d".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/{}", self.num, self.den)
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        // Accept "(a+bi)/d", "a+bi", and plain rationals "p/q".
        if let Some(rest) = t.strip_prefix('(') {
            let (num_s, den_s) = rest
                .split_once(")/")
                .ok_or_else(|| Error::Parse(format!("expected (a+bi)/d in {s:?}")))?;
            let num: GaussianInt = num_s.parse()?;
            let den: BigInt = den_s
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            return Self::new(num, den);
        }
        if !t.contains('i') {
            if let Some((p, q)) = t.split_once('/') {
                let p: BigInt =
                    p.parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
                let q: BigInt =
                    q.parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
                return Self::new(GaussianInt::new(p, 0), q);
            }
        }
        Ok(Self::from_gauss(t.parse()?))
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(re: i64, im: i64, den: i64) -> GaussianRational {
        GaussianRational::new(GaussianInt::new(re, im), den).unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(q(2, 2, 2), q(1, 1, 1));
        assert_eq!(q(1, 1, -2), q(-1, -1, 2));
        // (1+i)/2 is already canonical: Z-content of (1,1,2) is 1
        let x = q(1, 1, 2);
        assert_eq!(x.den(), &BigInt::from(2));
        assert_eq!(q(0, 0, 5), GaussianRational::zero());
    }

    #[test]
    fn field_ops() {
        let x = q(1, 1, 2);
        let y = q(3, -1, 1);
        assert_eq!(&(&x + &y) - &y, x);
        assert_eq!(&(&x * &y) / &y, x);
        let inv = x.inv().unwrap();
        assert_eq!(&x * &inv, GaussianRational::one());
        // 1/((1+i)/2) = 2(1-i)/2 = 1-i
        assert_eq!(inv, q(1, -1, 1));
    }

    #[test]
    fn norm_is_multiplicative() {
        let x = q(3, 2, 5);
        let y = q(-1, 7, 3);
        assert_eq!((&x * &y).norm(), x.norm() * y.norm());
    }

    #[test]
    fn display_roundtrip() {
        for v in [q(1, 2, 3), q(-1, 0, 2), q(0, 0, 1), q(0, -5, 7)] {
            let s = v.to_string();
            assert_eq!(s.parse::<GaussianRational>().unwrap(), v, "roundtrip {s}");
        }
        assert_eq!("1/3".parse::<GaussianRational>().unwrap(), q(1, 0, 3));
        assert_eq!("2+i".parse::<GaussianRational>().unwrap(), q(2, 1, 1));
    }
}
