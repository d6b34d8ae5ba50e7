//! Membership testing and complete enumeration of the Hecke sets
//! S(Q, pi^nu, pi'^nu, M) and S_m(Q, pi^nu, pi'^nu, oo), the Q-angle, and
//! the one-prime / two-prime verification drivers.
//!
//! A matrix gamma belongs to the double coset
//! SL_n(Z[i]) diag(1, pi^nu, ..., pi^nu, pi^nu pi'^nu) SL_n(Z[i])
//! exactly when its elementary divisors match and its determinant equals
//! pi^(nu(n-1)) pi'^nu on the nose: the SL factors fix the determinant
//! exactly, and a diagonal middle factor absorbs any unit. For S_m the coset
//! is taken over the ring of (pi, pi')-integral elements, which reduces to
//! the pi/pi' valuation profile of the Smith normal form of m gamma.

mod enumerate;
mod verify;

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::certify::{quad_root_sign, RootScalar};
use crate::error::{Error, Result};
use crate::gauss::{GaussianInt, GaussianRational, PiValuation, SplitPrime};
use crate::linalg::{smith_normal_form, GaussMatrix, SelfAdjointMatrix};

pub use enumerate::{enumerate_s, EnumOutcome, SEnumeration};
pub use verify::{
    one_prime_report, two_primes_empty_report, verify_one_prime_bound, verify_two_primes_empty,
    OnePrimeConstants,
};

/// The coset data (pi, pi', nu, n) of S(Q, pi^nu, pi'^nu, M).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeckeCosetSpec {
    pub pi: SplitPrime,
    pub pi2: SplitPrime,
    pub nu: u32,
    pub n: usize,
}

impl HeckeCosetSpec {
    pub fn new(pi: SplitPrime, pi2: SplitPrime, nu: u32, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition("dimension must be at least 2".into()));
        }
        if nu < 1 || nu as usize > n {
            return Err(Error::Precondition(format!("nu = {nu} outside [1, n = {n}]")));
        }
        Ok(Self { pi, pi2, nu, n })
    }

    pub fn same_prime(&self) -> bool {
        self.pi == self.pi2
    }

    /// det of the coset: pi^(nu(n-1)) pi'^nu, exact.
    pub fn det_target(&self) -> GaussianInt {
        let e1 = self.nu * (self.n as u32 - 1);
        &self.pi.pi().pow(e1) * &self.pi2.pi().pow(self.nu)
    }

    /// Expected (v_pi, v_pi') profile of the elementary divisors.
    pub fn divisor_profile(&self) -> Vec<(i64, i64)> {
        let nu = self.nu as i64;
        let mut profile = vec![(0, 0)];
        for _ in 1..self.n - 1 {
            profile.push(if self.same_prime() { (nu, nu) } else { (nu, 0) });
        }
        profile.push(if self.same_prime() { (2 * nu, 2 * nu) } else { (nu, nu) });
        profile
    }

    /// max(N(pi)^-M, N(pi')^-M), the finite-M tolerance.
    pub fn tolerance(&self, m: u32) -> BigRational {
        let nmin = self.pi.p().min(self.pi2.p()).clone();
        BigRational::new(1.into(), nmin.pow(m))
    }
}

/// Exact or finite-M deviation tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tolerance {
    Exact,
    Finite(u32),
}

/// |det gamma|^(2/n) = (N(pi)^(nu(n-1)) N(pi')^nu)^(1/n), kept symbolic.
///
/// Rational exactly when pi = pi' (value N(pi)^nu) or nu = n (value
/// N(pi)^(n-1) N(pi')); this rationality test stands in for the root
/// independence argument excluding mixed cosets.
#[derive(Clone, Debug)]
pub enum DetPower {
    Rational(BigRational),
    Irrational {
        /// nu(n-1)/n as (numerator, denominator)
        exp_pi: (u32, u32),
        /// nu/n as (numerator, denominator)
        exp_pi2: (u32, u32),
        root: RootScalar,
    },
}

impl DetPower {
    pub fn is_rational(&self) -> bool {
        matches!(self, DetPower::Rational(_))
    }

    pub fn rational(&self) -> Option<&BigRational> {
        match self {
            DetPower::Rational(v) => Some(v),
            DetPower::Irrational { .. } => None,
        }
    }

    pub fn root_scalar(&self) -> RootScalar {
        match self {
            DetPower::Rational(v) => RootScalar::rational(v.clone()),
            DetPower::Irrational { root, .. } => root.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            DetPower::Rational(v) => v.to_f64().unwrap_or(f64::NAN),
            DetPower::Irrational { root, .. } => root.to_f64(),
        }
    }
}

/// Symbolic rationality decision for |det gamma|^(2/n).
pub fn det_power(spec: &HeckeCosetSpec) -> DetPower {
    let n = spec.n as u32;
    let e1 = spec.nu * (n - 1);
    let e2 = spec.nu;
    let root = RootScalar::from_prime_powers(spec.pi.p(), e1, spec.pi2.p(), e2, n);
    match root.as_rational() {
        Some(v) => DetPower::Rational(v),
        None => DetPower::Irrational { exp_pi: (e1, n), exp_pi2: (e2, n), root },
    }
}

/// A counting query: the form, the coset, the tolerance, and the S_m
/// denominator bound m (1 recovers the plain sets).
#[derive(Clone, Debug)]
pub struct CountQuery {
    pub q: SelfAdjointMatrix,
    pub spec: HeckeCosetSpec,
    pub tolerance: Tolerance,
    pub denom: GaussianInt,
}

impl CountQuery {
    pub fn new(
        q: SelfAdjointMatrix,
        spec: HeckeCosetSpec,
        tolerance: Tolerance,
        denom: GaussianInt,
    ) -> Result<Self> {
        if q.n() != spec.n {
            return Err(Error::Dimension("form dimension must match the coset".into()));
        }
        q.require_positive_definite()?;
        if denom.is_zero() {
            return Err(Error::Precondition("denominator m must be nonzero".into()));
        }
        if denom.valuation(&spec.pi)? != 0 || denom.valuation(&spec.pi2)? != 0 {
            return Err(Error::Precondition(
                "denominator m must be coprime to pi and pi'".into(),
            ));
        }
        Ok(Self { q, spec, tolerance, denom })
    }

    pub fn exact(q: SelfAdjointMatrix, spec: HeckeCosetSpec) -> Result<Self> {
        Self::new(q, spec, Tolerance::Exact, GaussianInt::one())
    }

    pub fn descriptor(&self) -> serde_json::Value {
        serde_json::json!({
            "q": self.q.matrix(),
            "pi": self.spec.pi.to_string(),
            "pi2": self.spec.pi2.to_string(),
            "nu": self.spec.nu,
            "n": self.spec.n,
            "tolerance": match self.tolerance {
                Tolerance::Exact => "exact".to_string(),
                Tolerance::Finite(m) => m.to_string(),
            },
            "m": self.denom.to_string(),
        })
    }
}

/// Double-coset plus form-deviation membership.
pub fn membership_test(g: &GaussMatrix, query: &CountQuery) -> Result<bool> {
    let n = query.spec.n;
    if g.rows() != n || g.cols() != n {
        return Err(Error::Dimension("gamma must be n x n".into()));
    }
    let det = g.det();
    if det.is_zero() {
        return Err(Error::Singular);
    }
    if !coset_membership(g, &det, query)? {
        return Ok(false);
    }
    form_condition(g, query)
}

fn coset_membership(g: &GaussMatrix, det: &GaussianRational, query: &CountQuery) -> Result<bool> {
    let spec = &query.spec;
    // m gamma must be integral
    let m_rat = GaussianRational::from_gauss(query.denom.clone());
    let scaled = g.scale(&m_rat);
    let Some(g_int) = scaled.to_integral() else {
        return Ok(false);
    };
    // determinant exactly pi^(nu(n-1)) pi'^nu
    if det != &GaussianRational::from_gauss(spec.det_target()) {
        return Ok(false);
    }
    // pi/pi' valuation profile of the Smith normal form of m gamma; the m
    // part is prime to pi, pi' and does not disturb it
    let (_, divisors, _) = smith_normal_form(&g_int)?;
    let profile = spec.divisor_profile();
    for (d, want) in divisors.divisors().iter().zip(&profile) {
        let vp = d.valuation(&spec.pi)?;
        let vp2 = d.valuation(&spec.pi2)?;
        if (vp, vp2) != *want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The deviation condition on |det|^(-2/n) gamma* Q gamma - Q.
fn form_condition(g: &GaussMatrix, query: &CountQuery) -> Result<bool> {
    let q = &query.q;
    let transformed = SelfAdjointMatrix::new(g.adjoint().mul(q.matrix()).mul(g))
        .expect("gamma* Q gamma is self-adjoint");
    let dp = det_power(&query.spec);
    match query.tolerance {
        Tolerance::Exact => match dp {
            DetPower::Rational(c) => Ok(transformed == q.scale_rational(&c)),
            // Q has entries in Q(i); equality against an irrational multiple
            // would force Q = 0, impossible for a definite form.
            DetPower::Irrational { .. } => Ok(false),
        },
        Tolerance::Finite(m_tol) => {
            let tau = query.spec.tolerance(m_tol);
            let alpha = dp.root_scalar();
            for j in 0..q.n() {
                for k in 0..q.n() {
                    let w = transformed.entry(j, k);
                    let qe = q.entry(j, k);
                    // |w - alpha q|^2 <= alpha^2 tau^2, as a sign query on
                    // A alpha^2 + B alpha + C
                    let a = qe.norm() - &tau * &tau;
                    let b = BigRational::from_integer((-2).into())
                        * (w.re() * qe.re() + w.im() * qe.im());
                    let c = w.norm();
                    if quad_root_sign(&a, &b, &c, &alpha) == Ordering::Greater {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// The Q-angle in [0, pi]: arccos of Re(x* Q y) / sqrt((x*Qx)(y*Qy)).
/// The cosine is handled exactly; conversion to a real number happens only
/// at the boundary.
pub fn q_angle(x: &[GaussianInt], y: &[GaussianInt], q: &SelfAdjointMatrix) -> Result<f64> {
    if x.iter().all(GaussianInt::is_zero) || y.iter().all(GaussianInt::is_zero) {
        return Err(Error::ZeroVector);
    }
    q.require_positive_definite()?;
    let num = q.pair_int(x, y).re();
    let den_sq = q.quad_int(x) * q.quad_int(y);
    // cos = num / sqrt(den_sq); carry the sign and the square exactly
    let cos_sq = (&num * &num / &den_sq).to_f64().unwrap_or(0.0);
    let sign = if num.is_zero() {
        0.0
    } else if num.is_positive() {
        1.0
    } else {
        -1.0
    };
    Ok((sign * cos_sq.sqrt().min(1.0)).acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn pi5() -> SplitPrime {
        SplitPrime::above(5u32).unwrap()
    }

    fn pi13() -> SplitPrime {
        SplitPrime::above(13u32).unwrap()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    #[test]
    fn det_power_cases() {
        let spec = HeckeCosetSpec::new(pi5(), pi5(), 1, 2).unwrap();
        assert_eq!(det_power(&spec).rational(), Some(&rat(5)));

        let spec = HeckeCosetSpec::new(pi5(), pi13(), 1, 2).unwrap();
        assert!(!det_power(&spec).is_rational());

        let spec = HeckeCosetSpec::new(pi5(), pi13(), 2, 2).unwrap();
        assert_eq!(det_power(&spec).rational(), Some(&rat(65)));
    }

    #[test]
    fn membership_examples() {
        let pi = pi5();
        let spec = HeckeCosetSpec::new(pi.clone(), pi.clone(), 1, 2).unwrap();

        // diag(2+i, 2+i): form condition exact (gamma* gamma = 5 I) but the
        // divisors are (pi, pi), not (1, pi^2)
        let q = CountQuery::exact(SelfAdjointMatrix::identity(2), spec.clone()).unwrap();
        let g = GaussMatrix::from_rows(vec![
            vec![GaussianRational::from_gauss(GaussianInt::new(2, 1)), GaussianRational::zero()],
            vec![GaussianRational::zero(), GaussianRational::from_gauss(GaussianInt::new(2, 1))],
        ]);
        assert!(!membership_test(&g, &q).unwrap());

        // [[0, -(3+4i)], [1, 0]] against diag(1, 5): member
        let q = CountQuery::exact(
            SelfAdjointMatrix::from_diag(&[rat(1), rat(5)]),
            spec.clone(),
        )
        .unwrap();
        let g = GaussMatrix::from_rows(vec![
            vec![GaussianRational::zero(), GaussianRational::from_gauss(GaussianInt::new(-3, -4))],
            vec![GaussianRational::one(), GaussianRational::zero()],
        ]);
        assert!(membership_test(&g, &q).unwrap());

        // diag(1, (2+i)^2) against the identity: right coset, wrong form
        let q = CountQuery::exact(SelfAdjointMatrix::identity(2), spec).unwrap();
        let g = GaussMatrix::from_rows(vec![
            vec![GaussianRational::one(), GaussianRational::zero()],
            vec![GaussianRational::zero(), GaussianRational::from_gauss(GaussianInt::new(3, 4))],
        ]);
        assert!(!membership_test(&g, &q).unwrap());
    }

    #[test]
    fn q_angle_examples() {
        let id = SelfAdjointMatrix::identity(2);
        let e1 = vec![GaussianInt::one(), GaussianInt::zero()];
        let e2 = vec![GaussianInt::zero(), GaussianInt::one()];
        let ie1 = vec![GaussianInt::i(), GaussianInt::zero()];
        assert_eq!(q_angle(&e1, &e1, &id).unwrap(), 0.0);
        assert!((q_angle(&e1, &e2, &id).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((q_angle(&e1, &ie1, &id).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(q_angle(&[GaussianInt::zero()], &[GaussianInt::one()], &SelfAdjointMatrix::identity(1)).is_err());
    }
}
