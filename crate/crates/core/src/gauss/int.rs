//! Gaussian integers `a + bi` with arbitrary-precision components.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An element of Z[i].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianInt {
    re: BigInt,
    im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        Self { re: re.into(), im: im.into() }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(0, 1)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::new(n, 0)
    }

    pub fn re(&self) -> &BigInt {
        &self.re
    }

    pub fn im(&self) -> &BigInt {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// N(a+bi) = a^2 + b^2. Multiplicative: N(zw) = N(z)N(w).
    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    /// Multiplication by i: (a+bi) -> (-b+ai).
    pub fn mul_i(&self) -> Self {
        Self { re: -&self.im, im: self.re.clone() }
    }

    /// True exactly for 1, -1, i, -i.
    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// The unique associate with re > 0 and im >= 0 (zero maps to zero).
    ///
    /// The four associates of z != 0 rotate by quarter turns, so exactly one
    /// lands in the closed-lower/open-upper quadrant used here.
    pub fn canonical_associate(&self) -> Self {
        let mut z = self.clone();
        if z.is_zero() {
            return z;
        }
        while !(z.re.is_positive() && !z.im.is_negative()) {
            z = z.mul_i();
        }
        z
    }

    /// The unit u with `u * self` canonical.
    pub fn unit_to_canonical(&self) -> Self {
        let mut z = self.clone();
        let mut u = Self::one();
        if z.is_zero() {
            return u;
        }
        while !(z.re.is_positive() && !z.im.is_negative()) {
            z = z.mul_i();
            u = u.mul_i();
        }
        u
    }

    /// Euclidean division: q = round(self / d), r = self - q d with N(r) < N(d).
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let nd = d.norm();
        let num = self * &d.conj();
        let q = Self { re: div_round(&num.re, &nd), im: div_round(&num.im, &nd) };
        let r = self - &(&q * d);
        debug_assert!(r.norm() < nd);
        Ok((q, r))
    }

    /// Exact quotient if `d` divides `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let nd = d.norm();
        let num = self * &d.conj();
        if (&num.re % &nd).is_zero() && (&num.im % &nd).is_zero() {
            Some(Self { re: num.re / &nd, im: num.im / nd })
        } else {
            None
        }
    }

    pub fn divides(&self, other: &Self) -> bool {
        !self.is_zero() && other.div_exact(self).is_some()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

/// Rounded integer division, |n/d - result| <= 1/2.
fn div_round(n: &BigInt, d: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    if (n.sign() == d.sign()) || n.is_zero() {
        (n * &two + d) / (d * &two)
    } else {
        (n * &two - d) / (d * &two)
    }
}

/// Canonical-associate gcd by the Euclidean algorithm.
pub fn gaussian_gcd(a: &GaussianInt, b: &GaussianInt) -> Result<GaussianInt> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::BothZero);
    }
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let (_, r) = x.div_rem(&y)?;
        x = y;
        y = r;
    }
    Ok(x.canonical_associate())
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianInt {
            type Output = GaussianInt;
            fn $method(self, rhs: GaussianInt) -> GaussianInt {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&GaussianInt> for GaussianInt {
            type Output = GaussianInt;
            fn $method(self, rhs: &GaussianInt) -> GaussianInt {
                (&self).$method(rhs)
            }
        }
        impl $trait<GaussianInt> for &GaussianInt {
            type Output = GaussianInt;
            fn $method(self, rhs: GaussianInt) -> GaussianInt {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&GaussianInt> for &GaussianInt {
    type Output = GaussianInt;
    fn add(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}
forward_binop!(Add, add);

impl Sub<&GaussianInt> for &GaussianInt {
    type Output = GaussianInt;
    fn sub(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}
forward_binop!(Sub, sub);

impl Mul<&GaussianInt> for &GaussianInt {
    type Output = GaussianInt;
    fn mul(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}
forward_binop!(Mul, mul);

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt { re: -&self.re, im: -&self.im }
    }
}

impl Neg for GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt { re: -self.re, im: -self.im }
    }
}

impl fmt::Display for GaussianInt {
    /// Serializes as "a+bi" / "a-bi" with decimal components; pure parts
    /// shorten to "a", "bi", "i", "-i", and zero to "0".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write_imag(f, &self.im, false);
        }
        write!(f, "{}", self.re)?;
        write_imag(f, &self.im, true)
    }
}

fn write_imag(f: &mut fmt::Formatter<'_>, im: &BigInt, explicit_plus: bool) -> fmt::Result {
    if im.is_one() {
        return write!(f, "{}i", if explicit_plus { "+" } else { "" });
    }
    if (-im).is_one() {
        return write!(f, "-i");
    }
    if explicit_plus && im.is_positive() {
        write!(f, "+{}i", im)
    } else {
        write!(f, "{}i", im)
    }
}

impl fmt::Debug for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for GaussianInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty Gaussian integer".into()));
        }
        // Split at the last top-level '+' or '-' (not the leading sign).
        let bytes = t.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if bytes[k] == b'+' || bytes[k] == b'-' {
                split = Some(k);
                break;
            }
        }
        let (re_s, im_s) = match (t.ends_with('i'), split) {
            (true, Some(k)) => (&t[..k], &t[k..t.len() - 1]),
            (true, None) => ("", &t[..t.len() - 1]),
            (false, _) => (t.as_str(), ""),
        };
        let parse_part = |p: &str, what: &str| -> Result<BigInt> {
            match p {
                "" | "+" => Ok(BigInt::one()),
                "-" => Ok(-BigInt::one()),
                _ => p
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad {what} part in {s:?}"))),
            }
        };
        let re = if re_s.is_empty() { BigInt::zero() } else { parse_part(re_s, "real")? };
        let im = if t.ends_with('i') { parse_part(im_s, "imaginary")? } else { BigInt::zero() };
        Ok(Self { re, im })
    }
}

impl Serialize for GaussianInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussianInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    #[test]
    fn norm_and_units() {
        assert_eq!(g(3, 4).norm(), BigInt::from(25));
        for u in [g(1, 0), g(-1, 0), g(0, 1), g(0, -1)] {
            assert!(u.is_unit());
        }
        assert!(!g(1, 1).is_unit());
    }

    #[test]
    fn canonical_associate_is_unique_quadrant() {
        // associates of 2+i: 2+i, -1+2i, -2-i, 1-2i
        for z in [g(2, 1), g(-1, 2), g(-2, -1), g(1, -2)] {
            assert_eq!(z.canonical_associate(), g(2, 1));
            let u = z.unit_to_canonical();
            assert_eq!(&u * &z, g(2, 1));
        }
        assert_eq!(g(0, 3).canonical_associate(), g(3, 0));
    }

    #[test]
    fn euclidean_division_shrinks_norm() {
        let a = g(27, -23);
        let d = g(8, 1);
        let (q, r) = a.div_rem(&d).unwrap();
        assert_eq!(&(&q * &d) + &r, a);
        assert!(r.norm() < d.norm());
    }

    #[test]
    fn gcd_examples() {
        // 5 = (2+i)(2-i)
        assert_eq!(gaussian_gcd(&g(5, 0), &g(2, 1)).unwrap(), g(2, 1));
        // 3+4i = (2+i)^2
        assert_eq!(gaussian_gcd(&g(3, 4), &g(2, 1)).unwrap(), g(2, 1));
        // gcd with zero is the canonical associate
        assert_eq!(gaussian_gcd(&g(0, -7), &g(0, 0)).unwrap(), g(7, 0));
        assert!(gaussian_gcd(&g(0, 0), &g(0, 0)).is_err());
    }

    #[test]
    fn gcd_divides_both() {
        let a = &g(11, 3) * &g(2, 1);
        let b = &g(-4, 7) * &g(2, 1);
        let d = gaussian_gcd(&a, &b).unwrap();
        assert!(d.divides(&a));
        assert!(d.divides(&b));
        assert!(g(2, 1).divides(&d));
    }

    #[test]
    fn display_roundtrip() {
        for z in [g(0, 0), g(1, 0), g(0, 1), g(0, -1), g(-3, 1), g(2, -5), g(7, 1), g(-1, -1)] {
            let s = z.to_string();
            assert_eq!(s.parse::<GaussianInt>().unwrap(), z, "roundtrip of {s}");
        }
        assert_eq!("2+i".parse::<GaussianInt>().unwrap(), g(2, 1));
        assert_eq!("3-4i".parse::<GaussianInt>().unwrap(), g(3, -4));
        assert_eq!("-i".parse::<GaussianInt>().unwrap(), g(0, -1));
        assert_eq!("12".parse::<GaussianInt>().unwrap(), g(12, 0));
    }
}
