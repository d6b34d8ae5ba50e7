//! Scalar congruence witnesses for projectively close vectors, the
//! polarization congruence, and its conjugate-divisibility conclusions.
//!
//! For x, y in Z[i]^n with v_pi(x) = v_pi(y) = 0 whose 2x2 minors all vanish
//! mod pi^rho, there is an integer a, unique mod p^rho and coprime to p, with
//! y = a x mod pi^rho. Together with b = a i mod pi^rho and the inverses
//! a', b' mod p^rho this yields
//! `2 x*Ay = (a - bi) x*Ax + (a' - b'i) y*Ay (mod p^rho)`
//! for any self-adjoint A that is pi-integral (hence pi-bar-integral), and
//! the divisibilities pi^rho | a' - b'i and pi-bar^rho | a - bi.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauss::{
    integer_residue, mod_inverse, valuation_at, GaussianInt, GaussianRational, PiValuation,
    SplitPrime,
};
use crate::linalg::SelfAdjointMatrix;

/// The four residues of the polarization congruence, reduced to
/// [1, p^rho - 1], together with the modulus p^rho.
#[derive(Clone, Debug, Serialize)]
pub struct PolarizationWitness {
    #[serde(with = "crate::serial::bigint_string")]
    pub a: BigInt,
    #[serde(with = "crate::serial::bigint_string")]
    pub b: BigInt,
    #[serde(with = "crate::serial::bigint_string")]
    pub a_inv: BigInt,
    #[serde(with = "crate::serial::bigint_string")]
    pub b_inv: BigInt,
    #[serde(with = "crate::serial::bigint_string")]
    pub modulus: BigInt,
}

/// The scalar a with y = a x mod pi^rho, unique in [0, p^rho) and coprime
/// to p.
///
/// Preconditions are reported distinctly: valuation failures versus failed
/// minor divisibility.
pub fn scalar_witness(
    x: &[GaussianInt],
    y: &[GaussianInt],
    pi: &SplitPrime,
    rho: u32,
) -> Result<BigInt> {
    check_witness_preconditions(x, y, pi, rho)?;
    let modulus = pi.p().pow(rho);
    let pi_rho = pi.pi().pow(rho);

    // index with pi not dividing x_j; then a = y_j / x_j in Z/p^rho
    let j = x
        .iter()
        .position(|c| !c.is_zero() && valuation_at(c, pi.pi()).unwrap() == 0)
        .expect("v_pi(x) = 0 guarantees a unit coordinate");
    let xr = integer_residue(&x[j], pi, rho);
    let yr = integer_residue(&y[j], pi, rho);
    let xinv = mod_inverse(&xr, &modulus)
        .expect("coordinate with v_pi = 0 has invertible residue");
    let a = (yr * xinv).mod_floor(&modulus);

    // a is coprime to p and the congruence holds on every coordinate
    debug_assert!(!a.gcd(pi.p()).gt(&BigInt::one()));
    let a_g = GaussianInt::new(a.clone(), 0);
    for (k, (xk, yk)) in x.iter().zip(y).enumerate() {
        let diff = yk - &(&a_g * xk);
        if !diff.is_zero() && !pi_rho.divides(&diff) {
            panic!(
                "scalar witness invariant violated at coordinate {k}: \
                 preconditions verified but y - a x not divisible by pi^rho"
            );
        }
    }
    Ok(a)
}

fn check_witness_preconditions(
    x: &[GaussianInt],
    y: &[GaussianInt],
    pi: &SplitPrime,
    rho: u32,
) -> Result<()> {
    if rho == 0 {
        return Err(Error::Precondition("rho must be >= 1".into()));
    }
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::Dimension("witness vectors must have equal nonzero length".into()));
    }
    let vx = x
        .to_vec()
        .valuation(pi)
        .map_err(|_| Error::ValuationPrecondition("x is the zero vector".into()))?;
    if vx != 0 {
        return Err(Error::ValuationPrecondition(format!("v_pi(x) = {vx}, expected 0")));
    }
    let vy = y
        .to_vec()
        .valuation(pi)
        .map_err(|_| Error::ValuationPrecondition("y is the zero vector".into()))?;
    if vy != 0 {
        return Err(Error::ValuationPrecondition(format!("v_pi(y) = {vy}, expected 0")));
    }
    let pi_rho = pi.pi().pow(rho);
    for j in 0..x.len() {
        for k in j + 1..x.len() {
            let minor = &(&x[j] * &y[k]) - &(&x[k] * &y[j]);
            if !minor.is_zero() && !pi_rho.divides(&minor) {
                return Err(Error::MinorDivisibility(format!(
                    "xi_{j} ups_{k} - xi_{k} ups_{j} = {minor} not divisible by pi^{rho}"
                )));
            }
        }
    }
    Ok(())
}

/// Full polarization data for (x, y) against a pi-integral self-adjoint A.
///
/// The congruence and the part-(c) divisibilities are re-verified internally;
/// a failure there is an arithmetic bug, never valid input, and panics.
pub fn polarize(
    a_mat: &SelfAdjointMatrix,
    x: &[GaussianInt],
    y: &[GaussianInt],
    pi: &SplitPrime,
    rho: u32,
) -> Result<PolarizationWitness> {
    for e in a_mat.matrix().entries() {
        if !e.is_zero() && e.valuation(pi)? < 0 {
            return Err(Error::ValuationPrecondition(
                "matrix entries must be pi-integral".into(),
            ));
        }
    }
    let a = scalar_witness(x, y, pi, rho)?;
    let modulus = pi.p().pow(rho);
    let b = (&a * integer_residue(&GaussianInt::i(), pi, rho)).mod_floor(&modulus);
    let a_inv = mod_inverse(&a, &modulus).expect("a coprime to p");
    let b_inv = mod_inverse(&b, &modulus).expect("b coprime to p");
    let witness = PolarizationWitness { a, b, a_inv, b_inv, modulus };

    verify_polarization(a_mat, x, y, pi, rho, &witness);
    Ok(witness)
}

/// Both-sided divisibility u = 0 mod p^rho in the localization at pi, pi-bar:
/// v_pi(u) >= rho and v_pi-bar(u) >= rho.
fn divisible_mod_p_rho(u: &GaussianRational, pi: &SplitPrime, rho: u32) -> bool {
    if u.is_zero() {
        return true;
    }
    u.valuation(pi).unwrap() >= rho as i64 && u.valuation_conj(pi).unwrap() >= rho as i64
}

fn verify_polarization(
    a_mat: &SelfAdjointMatrix,
    x: &[GaussianInt],
    y: &[GaussianInt],
    pi: &SplitPrime,
    rho: u32,
    w: &PolarizationWitness,
) {
    let xay = a_mat.pair_int(x, y);
    let xax = a_mat.pair_int(x, x);
    let yay = a_mat.pair_int(y, y);
    let g = |v: &BigInt| GaussianRational::from_gauss(GaussianInt::new(v.clone(), 0));
    let a_m_bi =
        &g(&w.a) - &(&g(&w.b) * &GaussianRational::i());
    let ai_m_bii =
        &g(&w.a_inv) - &(&g(&w.b_inv) * &GaussianRational::i());
    let lhs = &GaussianRational::from_int(2) * &xay;
    let rhs = &(&a_m_bi * &xax) + &(&ai_m_bii * &yay);
    let diff = &lhs - &rhs;
    if !divisible_mod_p_rho(&diff, pi, rho) {
        panic!("polarization congruence failed: lhs - rhs = {diff} not 0 mod p^{rho}");
    }
    // part (c): pi^rho | a' - b'i and pi-bar^rho | a - bi
    let pi_rho = pi.pi().pow(rho);
    let pibar_rho = pi.pi_conj().pow(rho);
    let c1 = GaussianInt::new(w.a_inv.clone(), -w.b_inv.clone());
    let c2 = GaussianInt::new(w.a.clone(), -w.b.clone());
    if !pi_rho.divides(&c1) {
        panic!("conjugate divisibility failed: pi^{rho} does not divide a' - b'i = {c1}");
    }
    if !pibar_rho.divides(&c2) {
        panic!("conjugate divisibility failed: pi-bar^{rho} does not divide a - bi = {c2}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::self_adjoint_from_int_pairs;
    use num_rational::BigRational;

    fn pi5() -> SplitPrime {
        SplitPrime::above(5u32).unwrap()
    }

    fn gi(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    #[test]
    fn identical_vectors_give_one() {
        let x = vec![gi(1, 0), gi(3, 2)];
        let a = scalar_witness(&x, &x, &pi5(), 2).unwrap();
        assert_eq!(a, BigInt::one());
    }

    #[test]
    fn real_multiple() {
        let x = vec![gi(1, 0), gi(0, 0)];
        let y = vec![gi(3, 0), gi(0, 0)];
        assert_eq!(scalar_witness(&x, &y, &pi5(), 1).unwrap(), BigInt::from(3));
    }

    #[test]
    fn unit_i_multiple_gives_residue_of_i() {
        let x = vec![gi(1, 0), gi(2, 1)];
        let y: Vec<_> = x.iter().map(GaussianInt::mul_i).collect();
        assert_eq!(scalar_witness(&x, &y, &pi5(), 1).unwrap(), BigInt::from(3));
    }

    #[test]
    fn distinct_precondition_errors() {
        let pi = pi5();
        // valuation failure: x divisible by pi
        let x = vec![gi(2, 1), gi(0, 0)];
        let y = vec![gi(1, 0), gi(0, 0)];
        assert!(matches!(
            scalar_witness(&x, &y, &pi, 1),
            Err(Error::ValuationPrecondition(_))
        ));
        // minor failure: x, y not projectively close
        let x = vec![gi(1, 0), gi(0, 0)];
        let y = vec![gi(1, 0), gi(1, 0)];
        assert!(matches!(
            scalar_witness(&x, &y, &pi, 1),
            Err(Error::MinorDivisibility(_))
        ));
    }

    #[test]
    fn witness_spec_example() {
        // x = y = (1,0), A = I, rho = 1: (a, b, a', b') = (1, 3, 1, 2)
        let x = vec![gi(1, 0), gi(0, 0)];
        let a_mat = SelfAdjointMatrix::identity(2);
        let w = polarize(&a_mat, &x, &x, &pi5(), 1).unwrap();
        assert_eq!(
            (w.a, w.b, w.a_inv, w.b_inv),
            (BigInt::from(1), BigInt::from(3), BigInt::from(1), BigInt::from(2))
        );
    }

    #[test]
    fn witness_with_diagonal_form() {
        let x = vec![gi(1, 0), gi(0, 0)];
        let d = SelfAdjointMatrix::from_diag(&[
            BigRational::from(BigInt::from(2)),
            BigRational::from(BigInt::from(3)),
        ]);
        let w = polarize(&d, &x, &x, &pi5(), 1).unwrap();
        assert_eq!((w.a, w.b), (BigInt::from(1), BigInt::from(3)));
    }

    #[test]
    fn symmetry_and_unit_scaling() {
        let pi = pi5();
        let rho = 2u32;
        let modulus = BigInt::from(25);
        let x = vec![gi(1, 1), gi(2, 0)];
        let y = vec![gi(3, 3), gi(6, 0)]; // y = 3x
        let a = scalar_witness(&x, &y, &pi, rho).unwrap();
        let back = scalar_witness(&y, &x, &pi, rho).unwrap();
        assert_eq!((a.clone() * back).mod_floor(&modulus), BigInt::one());
        // scaling y by the unit i multiplies a by residue(i)
        let yi: Vec<_> = y.iter().map(GaussianInt::mul_i).collect();
        let ai = scalar_witness(&x, &yi, &pi, rho).unwrap();
        let r = integer_residue(&GaussianInt::i(), &pi, rho);
        assert_eq!(ai, (a * r).mod_floor(&modulus));
    }

    #[test]
    fn congruence_holds_with_hermitian_matrix() {
        let pi = pi5();
        let a_mat =
            self_adjoint_from_int_pairs(&[&[(2, 0), (1, 1)], &[(1, -1), (3, 0)]]).unwrap();
        let x = vec![gi(1, 0), gi(1, 1)];
        for a_scalar in [1i64, 2, 3, 4, 6] {
            let y: Vec<_> =
                x.iter().map(|c| c * &gi(a_scalar, 0)).collect();
            let w = polarize(&a_mat, &x, &y, &pi, 1).unwrap();
            assert_eq!(w.a, BigInt::from(a_scalar % 5));
        }
    }
}
