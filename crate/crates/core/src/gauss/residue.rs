//! Integer residue representatives modulo pi^rho.
//!
//! Z/(p^rho) = Z[i]/(pi^rho) for a split prime; the isomorphism sends i to a
//! Hensel-lifted root r of x^2 + 1 with pi^rho | (r - i), and a + bi to
//! a + b·r mod p^rho.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::int::GaussianInt;
use super::prime::SplitPrime;

/// The root r of x^2 + 1 = 0 mod p^rho with pi^rho | (r - i).
pub fn root_of_minus_one(pi: &SplitPrime, rho: u32) -> BigInt {
    assert!(rho >= 1, "rho must be positive");
    let p = pi.p();
    // Root mod p via Euler's criterion: n^((p-1)/4) for a non-residue n.
    let one = BigInt::one();
    let exp4 = (p - &one) / BigInt::from(4);
    let exp2 = (p - &one) / BigInt::from(2);
    let mut root = BigInt::zero();
    let mut n = BigInt::from(2);
    while n < *p {
        if n.modpow(&exp2, p) == p - &one {
            root = n.modpow(&exp4, p);
            break;
        }
        n += 1;
    }
    debug_assert!(!root.is_zero());
    // Select the root congruent to i mod pi: pi = u+vi, need r·u = v mod p.
    let u = pi.pi().re().mod_floor(p);
    let v = pi.pi().im().mod_floor(p);
    if (&root * &u - &v).mod_floor(p) != BigInt::zero() {
        root = p - root;
    }
    debug_assert_eq!((&root * u).mod_floor(p), v);
    // Hensel lift: r <- r - (r^2+1)/(2r) mod p^k, doubling precision.
    let mut modulus = p.clone();
    let target = p.pow(rho);
    while modulus < target {
        modulus = (&modulus * &modulus).min(target.clone());
        let f = (&root * &root + &one).mod_floor(&modulus);
        let deriv = (&root * BigInt::from(2)).mod_floor(&modulus);
        let dinv = mod_inverse(&deriv, &modulus).expect("2r invertible mod odd p^k");
        root = (&root - f * dinv).mod_floor(&modulus);
    }
    root.mod_floor(&target)
}

/// The unique t in [0, p^rho) with pi^rho | (z - t); a ring homomorphism in z.
pub fn integer_residue(z: &GaussianInt, pi: &SplitPrime, rho: u32) -> BigInt {
    let modulus = pi.p().pow(rho);
    let r = root_of_minus_one(pi, rho);
    (z.re() + z.im() * r).mod_floor(&modulus)
}

/// Multiplicative inverse mod m, when gcd(a, m) = 1.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(m);
    let ext = a.extended_gcd(m);
    if ext.gcd.is_one() {
        Some(ext.x.mod_floor(m))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::prime::valuation_at;

    fn pi5() -> SplitPrime {
        SplitPrime::above(5u32).unwrap()
    }

    #[test]
    fn residue_examples() {
        let pi = pi5();
        assert_eq!(integer_residue(&GaussianInt::i(), &pi, 1), BigInt::from(3));
        assert_eq!(integer_residue(&GaussianInt::from_int(5), &pi, 1), BigInt::from(0));
        assert_eq!(integer_residue(&GaussianInt::i(), &pi, 2), BigInt::from(18));
    }

    #[test]
    fn residue_divisibility() {
        // pi^rho | (z - t) for the returned t
        let pi = pi5();
        for rho in 1..=3u32 {
            let elt = pi.pi().pow(rho);
            for (a, b) in [(0i64, 1i64), (3, 7), (-2, 11), (4, -9)] {
                let z = GaussianInt::new(a, b);
                let t = integer_residue(&z, &pi, rho);
                let diff = &z - &GaussianInt::new(t, 0);
                if !diff.is_zero() {
                    assert!(elt.divides(&diff), "pi^{rho} | z - t for z = {z}");
                }
            }
        }
    }

    #[test]
    fn residue_is_ring_map_mod_25() {
        let pi = pi5();
        let rho = 2u32;
        let m = BigInt::from(25);
        let samples: Vec<GaussianInt> = (-2..3)
            .flat_map(|a| (-2..3).map(move |b| GaussianInt::new(a * 3, b * 5 + 1)))
            .collect();
        for z in &samples {
            for w in &samples {
                let zr = integer_residue(z, &pi, rho);
                let wr = integer_residue(w, &pi, rho);
                assert_eq!(integer_residue(&(z + w), &pi, rho), (&zr + &wr).mod_floor(&m));
                assert_eq!(integer_residue(&(z * w), &pi, rho), (&zr * &wr).mod_floor(&m));
            }
        }
    }

    #[test]
    fn residue_vs_valuation() {
        // residue(z, pi, rho) = 0 mod p^min(rho,e) iff v_pi(z) >= e, e <= rho
        let pi = pi5();
        let rho = 3u32;
        let pie = pi.pi();
        for k in 0..3u32 {
            let z = &GaussianInt::new(1, 1) * &pie.pow(k);
            let t = integer_residue(&z, &pi, rho);
            let v = valuation_at(&z, pie).unwrap();
            for e in 0..=rho as u64 {
                let pe = pi.p().pow(e.min(rho as u64) as u32);
                let divisible = t.mod_floor(&pe).is_zero();
                assert_eq!(divisible, v >= e, "z={z} e={e}");
            }
        }
    }
}
