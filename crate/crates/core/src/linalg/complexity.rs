//! The height measure comp(a) = |b0| + |c0| + 1 over reduced Z[i]-fractions
//! a = b0/c0.
//!
//! The modulus of an element of Q(i) is the same under both complex
//! embeddings, and the infimum over integral fraction representations is
//! attained at fractions reduced over Z[i] (all of which agree up to units),
//! so the value is well defined. Exact comparisons go through the squared
//! norms; the real value is derived for reporting.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::gauss::{gaussian_gcd, GaussianInt, GaussianRational};

/// Squared data of a complexity value: (N(b0), N(c0)) for the reduced
/// fraction b0/c0 over Z[i].
pub fn complexity_norms(a: &GaussianRational) -> (BigInt, BigInt) {
    if a.is_zero() {
        // 0/1 is already reduced
        return (BigInt::from(0), BigInt::from(1));
    }
    let num = a.num().clone();
    let den = GaussianInt::new(a.den().clone(), 0);
    // The canonical form has integer content 1, but the pair can still share
    // a Gaussian factor, e.g. (1+i)/2 = 1/(1-i).
    let g = gaussian_gcd(&num, &den).expect("not both zero");
    let b0 = num.div_exact(&g).expect("gcd divides");
    let c0 = den.div_exact(&g).expect("gcd divides");
    (b0.norm(), c0.norm())
}

/// comp(a) = |b0| + |c0| + 1 as a real value.
pub fn complexity(a: &GaussianRational) -> f64 {
    let (nb, nc) = complexity_norms(a);
    nb.to_f64().unwrap_or(f64::INFINITY).sqrt() + nc.to_f64().unwrap_or(f64::INFINITY).sqrt() + 1.0
}

/// comp of a representation b/c given directly, for monotonicity checks.
pub fn complexity_of_representation(b: &GaussianInt, c: &GaussianInt) -> f64 {
    b.norm().to_f64().unwrap_or(f64::INFINITY).sqrt()
        + c.norm().to_f64().unwrap_or(f64::INFINITY).sqrt()
        + 1.0
}

/// Largest complexity over the entries of an iterator, for stage logs.
pub fn max_complexity<'a>(entries: impl IntoIterator<Item = &'a GaussianRational>) -> f64 {
    entries.into_iter().map(complexity).fold(1.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_values() {
        assert_eq!(complexity(&GaussianRational::zero()), 2.0);
        assert_eq!(complexity(&GaussianRational::one()), 3.0);
        // i/2: |i| + |2| + 1 = 4
        let half_i = GaussianRational::new(GaussianInt::i(), 2).unwrap();
        assert_eq!(complexity(&half_i), 4.0);
    }

    #[test]
    fn reduces_over_gaussian_integers() {
        // (1+i)/2 = 1/(1-i): norms (1, 2), comp = 1 + sqrt(2) + 1
        let x = GaussianRational::new(GaussianInt::new(1, 1), 2).unwrap();
        assert_eq!(complexity_norms(&x), (BigInt::from(1), BigInt::from(2)));
        let expected = 2.0 + 2.0f64.sqrt();
        assert!((complexity(&x) - expected).abs() < 1e-12);
    }

    #[test]
    fn monotone_under_reduction() {
        // a non-reduced representation never beats the reduced one
        let x = GaussianRational::new(GaussianInt::new(3, -1), 7).unwrap();
        let scale = GaussianInt::new(2, 5);
        let b = x.num() * &scale;
        let c = &GaussianInt::new(7, 0) * &scale;
        assert!(complexity_of_representation(&b, &c) >= complexity(&x));
    }
}
