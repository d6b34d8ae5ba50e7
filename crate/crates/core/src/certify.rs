//! Certified comparisons against n-th roots of rationals.
//!
//! The quantity |det gamma|^(2/n) is alpha = rho^(1/k) for a positive
//! rational rho and minimal index k. Signs of A alpha^2 + B alpha + C are
//! decided exactly: by substitution for k = 1, through the rational alpha^2
//! for k = 2, and by escalating exact rational enclosures for k >= 3, where a
//! vanishing quadratic is impossible because alpha has degree k over Q (the
//! index is kept minimal, so x^k - rho is irreducible).

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// alpha = radicand^(1/index) with radicand > 0 and index minimal for the
/// uses in this crate (constructed from prime exponent data, never from a
/// blind radicand).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootScalar {
    radicand: BigRational,
    index: u32,
}

impl RootScalar {
    pub fn rational(value: BigRational) -> Self {
        assert!(value.is_positive());
        Self { radicand: value, index: 1 }
    }

    /// Builds p1^(e1/n) * p2^(e2/n) for distinct primes p1 != p2 (or a single
    /// prime when p1 == p2), reducing the index so that it is minimal.
    pub fn from_prime_powers(p1: &BigInt, e1: u32, p2: &BigInt, e2: u32, n: u32) -> Self {
        let (bases, exps): (Vec<&BigInt>, Vec<u32>) = if p1 == p2 {
            (vec![p1], vec![e1 + e2])
        } else {
            (vec![p1, p2], vec![e1, e2])
        };
        let mut g = n;
        for &e in &exps {
            g = gcd_u32(g, e);
        }
        let index = n / g;
        let mut radicand = BigRational::one();
        for (b, &e) in bases.iter().zip(&exps) {
            radicand *= BigRational::from((*b).clone()).pow((e / g) as i32);
        }
        Self { radicand, index }
    }

    pub fn is_rational(&self) -> bool {
        self.index == 1
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn radicand(&self) -> &BigRational {
        &self.radicand
    }

    /// Exact value when the index is 1.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.radicand.clone())
    }

    /// alpha^2 as a rational, when it is one.
    pub fn square_rational(&self) -> Option<BigRational> {
        match self.index {
            1 => Some(&self.radicand * &self.radicand),
            2 => Some(self.radicand.clone()),
            _ => None,
        }
    }

    /// Rational enclosure [lo, hi] with hi - lo = 2^-bits.
    pub fn enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        if self.index == 1 {
            return (self.radicand.clone(), self.radicand.clone());
        }
        let k = self.index;
        let num = self.radicand.numer();
        let den = self.radicand.denom();
        // alpha * 2^bits * den^(1/k)-free form: root of num*den^(k-1) scaled.
        let scale = BigInt::one() << bits;
        let x = num * den.pow(k - 1) * scale.pow(k);
        let m = x.nth_root(k);
        let lo = BigRational::new(m.clone(), den * &scale);
        let hi = BigRational::new(m + 1, den * &scale);
        debug_assert!(lo.pow(k as i32) <= self.radicand);
        debug_assert!(hi.pow(k as i32) >= self.radicand);
        (lo, hi)
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, _) = self.enclosure(64);
        lo.to_f64().unwrap_or(f64::NAN)
    }
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd_u32(b, a % b)
    }
}

/// Exact sign of A alpha^2 + B alpha + C.
pub fn quad_root_sign(
    a: &BigRational,
    b: &BigRational,
    c: &BigRational,
    alpha: &RootScalar,
) -> Ordering {
    if let Some(v) = alpha.as_rational() {
        return (a * &v * &v + b * &v + c).cmp(&BigRational::zero());
    }
    if let Some(sq) = alpha.square_rational() {
        // value = (A rho + C) + B alpha with alpha = sqrt(rho)
        let s = a * &sq + c;
        return linear_in_root_sign(b, &s, &sq);
    }
    // index >= 3
    if b.is_zero() {
        // sign of A alpha^2 + C: compare |A| alpha^2 with |C| via k-th powers
        if a.is_zero() {
            return c.cmp(&BigRational::zero());
        }
        let s = power_compare(&a.abs(), 2, &c.abs(), alpha);
        return match (a.is_positive(), c.is_positive()) {
            (true, true) => Ordering::Greater,
            (false, false) => Ordering::Less,
            (true, false) => s,
            (false, true) => s.reverse(),
        };
    }
    if a.is_zero() {
        return linear_in_root_general(b, c, alpha);
    }
    // All three nonzero: the expression cannot vanish (alpha has degree >= 3),
    // so enclosure refinement terminates.
    let mut bits = 32;
    loop {
        let (lo, hi) = alpha.enclosure(bits);
        let (sq_lo, sq_hi) = (&lo * &lo, &hi * &hi);
        let (a2_lo, a2_hi) = mul_interval(a, &sq_lo, &sq_hi);
        let (b1_lo, b1_hi) = mul_interval(b, &lo, &hi);
        let val_lo = &a2_lo + &b1_lo + c;
        let val_hi = &a2_hi + &b1_hi + c;
        if val_lo.is_positive() {
            return Ordering::Greater;
        }
        if val_hi.is_negative() {
            return Ordering::Less;
        }
        bits *= 2;
        assert!(bits <= 1 << 20, "enclosure refinement failed to separate");
    }
}

/// Product of a point with an interval, endpoints ordered.
fn mul_interval(x: &BigRational, lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
    let a = x * lo;
    let b = x * hi;
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Sign of B sqrt(rho) + S with rho rational > 0.
fn linear_in_root_sign(b: &BigRational, s: &BigRational, rho: &BigRational) -> Ordering {
    if b.is_zero() {
        return s.cmp(&BigRational::zero());
    }
    if s.is_zero() {
        return b.cmp(&BigRational::zero());
    }
    if b.is_positive() == s.is_positive() {
        return s.cmp(&BigRational::zero());
    }
    // opposite signs: compare B^2 rho against S^2
    let lhs = b * b * rho;
    let rhs = s * s;
    if b.is_positive() {
        lhs.cmp(&rhs)
    } else {
        rhs.cmp(&lhs)
    }
}

/// Sign of B alpha + C for alpha = rho^(1/k), k >= 3.
fn linear_in_root_general(b: &BigRational, c: &BigRational, alpha: &RootScalar) -> Ordering {
    if c.is_zero() {
        return b.cmp(&BigRational::zero());
    }
    if b.is_positive() == c.is_positive() {
        return c.cmp(&BigRational::zero());
    }
    let s = power_compare(&b.abs(), 1, &c.abs(), alpha);
    if b.is_positive() {
        s
    } else {
        s.reverse()
    }
}

/// Compares x alpha^e against y for positive rationals x, y by raising both
/// sides to the k-th power.
fn power_compare(x: &BigRational, e: u32, y: &BigRational, alpha: &RootScalar) -> Ordering {
    let k = alpha.index();
    let lhs = x.pow(k as i32) * alpha.radicand().pow(e as i32);
    let rhs = y.pow(k as i32);
    lhs.cmp(&rhs)
}
