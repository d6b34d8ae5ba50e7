//! Split primes of Z[i] and pi-adic valuations.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::int::GaussianInt;
use super::rat::GaussianRational;
use crate::error::{Error, Result};

/// A Gaussian prime above a split rational prime p = 1 mod 4.
///
/// Each such p has two non-associate primes above it; the canonical choice
/// here is the one with re > im > 0, so that any set of canonical split
/// primes lies above pairwise distinct rational primes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SplitPrime {
    pi: GaussianInt,
    p: BigInt,
}

impl SplitPrime {
    /// Validates that `pi` is canonically normalized with prime norm = 1 mod 4.
    pub fn new(pi: GaussianInt) -> Result<Self> {
        let p = pi.norm();
        let four = BigInt::from(4);
        if !is_prime(&p) || &p % &four != BigInt::one() {
            return Err(Error::NotSplitPrime(pi.to_string()));
        }
        if !(pi.re() > pi.im() && pi.im().is_positive()) {
            return Err(Error::NotSplitPrime(format!("{pi} (want re > im > 0)")));
        }
        Ok(Self { pi, p })
    }

    /// The canonical prime above a given split rational prime.
    pub fn above(p: impl Into<BigInt>) -> Result<Self> {
        let p = p.into();
        let four = BigInt::from(4);
        if !is_prime(&p) || &p % &four != BigInt::one() {
            return Err(Error::NotSplitPrime(p.to_string()));
        }
        // p = re^2 + im^2 with re > im > 0; unique for a split prime.
        let mut im = BigInt::one();
        loop {
            let rest = &p - &im * &im;
            let re = rest.sqrt();
            if &re * &re == rest {
                debug_assert!(re > im);
                return Ok(Self { pi: GaussianInt::new(re, im.clone()), p });
            }
            im += 1;
        }
    }

    pub fn pi(&self) -> &GaussianInt {
        &self.pi
    }

    /// The conjugate prime element (not canonically normalized).
    pub fn pi_conj(&self) -> GaussianInt {
        self.pi.conj()
    }

    /// The rational prime below, equal to the norm.
    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn p_u64(&self) -> u64 {
        use num_traits::ToPrimitive;
        self.p.to_u64().expect("desk-scale prime")
    }
}

impl fmt::Display for SplitPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pi)
    }
}

impl fmt::Debug for SplitPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pi)
    }
}

impl Serialize for SplitPrime {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.pi.to_string())
    }
}

impl<'de> Deserialize<'de> for SplitPrime {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let pi: GaussianInt = s.parse().map_err(de::Error::custom)?;
        SplitPrime::new(pi).map_err(de::Error::custom)
    }
}

/// Trial-division primality; windows here are desk scale.
pub fn is_prime(n: &BigInt) -> bool {
    if *n < BigInt::from(2) {
        return false;
    }
    let two = BigInt::from(2);
    if n == &two {
        return true;
    }
    if (n % &two).is_zero() {
        return false;
    }
    let mut d = BigInt::from(3);
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            return false;
        }
        d += 2;
    }
    true
}

/// One canonical split prime per rational prime p = 1 mod 4 with c1 <= p < c2,
/// sorted by p.
pub fn split_primes_in_window(c1: u64, c2: u64) -> Vec<SplitPrime> {
    let mut out = Vec::new();
    let start = c1.max(2);
    for p in start..c2 {
        if p % 4 == 1 {
            let pb = BigInt::from(p);
            if is_prime(&pb) {
                out.push(SplitPrime::above(pb).expect("split prime"));
            }
        }
    }
    out
}

/// Largest e with elt^e dividing z; `elt` is any prime element of Z[i].
pub fn valuation_at(z: &GaussianInt, elt: &GaussianInt) -> Result<u64> {
    if z.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let mut e = 0u64;
    let mut cur = z.clone();
    while let Some(q) = cur.div_exact(elt) {
        cur = q;
        e += 1;
    }
    Ok(e)
}

/// pi-adic valuation of a nonzero element of Q(i); negative values allowed.
///
/// For num/den with den a positive rational integer, v_pi(den) equals the
/// ordinary p-adic valuation of den since p = pi·conj(pi) with the factors
/// coprime.
pub fn rational_valuation_at(x: &GaussianRational, elt: &GaussianInt, p: &BigInt) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let vnum = valuation_at(x.num(), elt)? as i64;
    let mut vden = 0i64;
    let mut d = x.den().clone();
    while (&d % p).is_zero() {
        d /= p;
        vden += 1;
    }
    Ok(vnum - vden)
}

/// Extends valuations to aggregates as the minimum over nonzero entries.
pub trait PiValuation {
    /// Valuation at the canonical prime element of `pi`.
    fn valuation(&self, pi: &SplitPrime) -> Result<i64>;
    /// Valuation at the conjugate prime element.
    fn valuation_conj(&self, pi: &SplitPrime) -> Result<i64>;
}

impl PiValuation for GaussianInt {
    fn valuation(&self, pi: &SplitPrime) -> Result<i64> {
        valuation_at(self, pi.pi()).map(|e| e as i64)
    }
    fn valuation_conj(&self, pi: &SplitPrime) -> Result<i64> {
        valuation_at(self, &pi.pi_conj()).map(|e| e as i64)
    }
}

impl PiValuation for GaussianRational {
    fn valuation(&self, pi: &SplitPrime) -> Result<i64> {
        rational_valuation_at(self, pi.pi(), pi.p())
    }
    fn valuation_conj(&self, pi: &SplitPrime) -> Result<i64> {
        rational_valuation_at(self, &pi.pi_conj(), pi.p())
    }
}

fn min_valuation<'a, T: PiValuation + 'a>(
    items: impl IntoIterator<Item = &'a T>,
    pi: &SplitPrime,
    conj: bool,
) -> Result<i64> {
    let mut best: Option<i64> = None;
    for item in items {
        let v = if conj { item.valuation_conj(pi) } else { item.valuation(pi) };
        match v {
            Ok(v) => best = Some(best.map_or(v, |b| b.min(v))),
            Err(Error::ZeroValuation) => continue,
            Err(e) => return Err(e),
        }
    }
    best.ok_or(Error::ZeroValuation)
}

impl<T: PiValuation> PiValuation for [T] {
    fn valuation(&self, pi: &SplitPrime) -> Result<i64> {
        min_valuation(self.iter(), pi, false)
    }
    fn valuation_conj(&self, pi: &SplitPrime) -> Result<i64> {
        min_valuation(self.iter(), pi, true)
    }
}

impl<T: PiValuation> PiValuation for Vec<T> {
    fn valuation(&self, pi: &SplitPrime) -> Result<i64> {
        self.as_slice().valuation(pi)
    }
    fn valuation_conj(&self, pi: &SplitPrime) -> Result<i64> {
        self.as_slice().valuation_conj(pi)
    }
}

/// True iff x lies in Z[i]_{pi,pi'}, i.e. v_pi(x) >= 0 and v_pi'(x) >= 0.
pub fn is_locally_integral(x: &GaussianRational, pi: &SplitPrime, pi2: &SplitPrime) -> bool {
    if x.is_zero() {
        return true;
    }
    x.valuation(pi).expect("nonzero") >= 0 && x.valuation(pi2).expect("nonzero") >= 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_examples() {
        let w = split_primes_in_window(2, 10);
        assert_eq!(w, vec![SplitPrime::above(5u32).unwrap()]);
        assert_eq!(w[0].pi(), &GaussianInt::new(2, 1));

        let w = split_primes_in_window(10, 20);
        let pis: Vec<_> = w.iter().map(|s| s.pi().clone()).collect();
        assert_eq!(pis, vec![GaussianInt::new(3, 2), GaussianInt::new(4, 1)]);

        assert!(split_primes_in_window(5, 5).is_empty());
    }

    #[test]
    fn window_union_property() {
        let a = split_primes_in_window(2, 30);
        let b: Vec<_> = split_primes_in_window(2, 17)
            .into_iter()
            .chain(split_primes_in_window(17, 30))
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn normalization_rejects_mirror() {
        assert!(SplitPrime::new(GaussianInt::new(2, 1)).is_ok());
        assert!(SplitPrime::new(GaussianInt::new(1, 2)).is_err());
        assert!(SplitPrime::new(GaussianInt::new(3, 0)).is_err());
    }

    #[test]
    fn valuation_examples() {
        let pi = SplitPrime::above(5u32).unwrap();
        assert_eq!(GaussianInt::from_int(5).valuation(&pi).unwrap(), 1);
        assert_eq!(GaussianInt::one().valuation(&pi).unwrap(), 0);
        let v = vec![GaussianInt::from_int(5), GaussianInt::new(2, 1)];
        assert_eq!(v.valuation(&pi).unwrap(), 1);
        assert!(GaussianInt::zero().valuation(&pi).is_err());

        // conjugate side: v_{pi-bar}(2+i) = 0, v_{pi-bar}(5) = 1
        assert_eq!(GaussianInt::new(2, 1).valuation_conj(&pi).unwrap(), 0);
        assert_eq!(GaussianInt::from_int(5).valuation_conj(&pi).unwrap(), 1);
    }

    #[test]
    fn rational_valuations() {
        let pi = SplitPrime::above(5u32).unwrap();
        let pi2 = SplitPrime::above(13u32).unwrap();
        let third = GaussianRational::new(GaussianInt::one(), 3).unwrap();
        let fifth = GaussianRational::new(GaussianInt::one(), 5).unwrap();
        assert!(is_locally_integral(&third, &pi, &pi2));
        assert!(!is_locally_integral(&fifth, &pi, &pi2));
        assert!(is_locally_integral(&GaussianRational::zero(), &pi, &pi2));
        assert_eq!(fifth.valuation(&pi).unwrap(), -1);
    }
}
