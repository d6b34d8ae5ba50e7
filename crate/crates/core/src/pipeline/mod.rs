//! The matrix-exchange pipeline: form operators B_gamma, kernel chains,
//! envelope bookkeeping, rational points in subspaces, and the staged run
//! that exchanges an input form Q for a rational Q2 and a diagonal Q3 with a
//! controlled conjugation denominator.

mod operator;
mod run;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::GaussianRational;
use crate::linalg::{GaussMatrix, SelfAdjointMatrix};

pub use operator::{
    b_gamma_operator, best_rational_approx, distance_to_subspace, kernel_intersection,
    kernel_intersection_n, rational_point_in_envelope, standard_basis, FormOperator,
    SubspaceBasis, SubspaceDistance,
};
pub use run::{
    run_pipeline, CellChainReport, ComplexityEntry, EndgameConfig, PipelineTrace, StageTrace,
};

/// An eigenvalue envelope: self-adjoint positive definite matrices of size n
/// whose spectrum lies in [lo, hi].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    #[serde(with = "crate::serial::rational_string")]
    pub lo: BigRational,
    #[serde(with = "crate::serial::rational_string")]
    pub hi: BigRational,
    pub n: usize,
}

impl Envelope {
    pub fn new(lo: BigRational, hi: BigRational, n: usize) -> Result<Self> {
        if !lo.is_positive() || hi < lo {
            return Err(Error::InvalidConfig("envelope needs 0 < lo <= hi".into()));
        }
        Ok(Self { lo, hi, n })
    }

    /// Non-strict spectral membership: X - lo I and hi I - X both positive
    /// semidefinite (exact principal-minor tests).
    pub fn contains(&self, x: &SelfAdjointMatrix) -> bool {
        let lo_shift = x.sub(&SelfAdjointMatrix::identity(x.n()).scale_rational(&self.lo));
        let hi_shift = SelfAdjointMatrix::identity(x.n()).scale_rational(&self.hi).sub(x);
        lo_shift.is_positive_semidefinite() && hi_shift.is_positive_semidefinite()
    }

    /// Strict membership: eigenvalues in the open interval (lo, hi).
    pub fn contains_strict(&self, x: &SelfAdjointMatrix) -> bool {
        let lo_shift = x.sub(&SelfAdjointMatrix::identity(x.n()).scale_rational(&self.lo));
        let hi_shift = SelfAdjointMatrix::identity(x.n()).scale_rational(&self.hi).sub(x);
        lo_shift.is_positive_definite() && hi_shift.is_positive_definite()
    }
}

/// The widened envelopes used by the two exchange stages: from Omega' =
/// [a, b], Omega1 = [a/2, 2b]; Omega2 = [Delta/lambda^(n-1), lambda] with
/// lambda = 2b and Delta = (a/2)^n the smallest determinant consistent with
/// Omega1. Gram–Schmidt maps Omega1 into Omega2: diagonal entries only
/// decrease, stay below lambda, and their product is the unchanged
/// determinant.
pub fn envelopes(omega_prime: &Envelope) -> (Envelope, Envelope) {
    let n = omega_prime.n;
    let two = BigRational::from_integer(2.into());
    let lo1 = &omega_prime.lo / &two;
    let hi1 = &omega_prime.hi * &two;
    let delta = lo1.pow(n as i32);
    let lo2 = delta / hi1.pow(n as i32 - 1);
    (
        Envelope { lo: lo1, hi: hi1.clone(), n },
        Envelope { lo: lo2, hi: hi1, n },
    )
}

/// M >= T (DE)^(n^2+2) + 1, exact in big integers.
pub fn m_threshold(n: usize, t: u32, d: u32, e: u32) -> BigInt {
    let de = BigInt::from(d) * BigInt::from(e);
    BigInt::from(t) * de.pow(n as u32 * n as u32 + 2) + BigInt::one()
}

pub fn validate_m(n: usize, t: u32, d: u32, e: u32, m: u64) -> bool {
    BigInt::from(m) >= m_threshold(n, t, d, e)
}

/// The scalar |det g|^(2/n) attached to a point form: either folded into the
/// matrix (rational case) or carried symbolically as radicand^(1/degree).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ScaleFactor {
    Folded,
    NthRoot {
        #[serde(with = "crate::serial::rational_string")]
        radicand: BigRational,
        degree: u32,
    },
}

/// Q = |det g|^(2/n) (g*)^-1 g^-1 for nonsingular g over Q(i).
#[derive(Clone, Debug, Serialize)]
pub struct QFromPoint {
    pub matrix: SelfAdjointMatrix,
    pub scale: ScaleFactor,
}

impl QFromPoint {
    /// The matrix itself when the scalar was rational.
    pub fn rational(self) -> Result<SelfAdjointMatrix> {
        match self.scale {
            ScaleFactor::Folded => Ok(self.matrix),
            ScaleFactor::NthRoot { .. } => Err(Error::IrrationalDetPower),
        }
    }
}

/// Builds the point form. `|det g|^(2/n) = N(det g)^(1/n)` is rational for
/// the intended test points; otherwise the rational part is folded in and
/// the residual n-th root carried on the side. Scaling g by a nonzero scalar
/// of Q(i) leaves the value unchanged.
pub fn q_from_point(g: &GaussMatrix) -> Result<QFromPoint> {
    if g.rows() != g.cols() {
        return Err(Error::Dimension("point matrix must be square".into()));
    }
    let n = g.rows();
    let det = g.det();
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let norm_det = det.norm();
    let gram_inv = SelfAdjointMatrix::new(g.mul(&g.adjoint()).inverse()?)
        .expect("(g g*)^-1 is self-adjoint");
    let (rational_part, residual) = reduce_nth_power(&norm_det, n as u32);
    let matrix = gram_inv.scale_rational(&rational_part);
    let scale = if residual.is_one() {
        ScaleFactor::Folded
    } else {
        ScaleFactor::NthRoot { radicand: residual, degree: n as u32 }
    };
    if matches!(scale, ScaleFactor::Folded) {
        debug_assert!(matrix.is_positive_definite());
    }
    Ok(QFromPoint { matrix, scale })
}

/// Splits r > 0 as s^n * r0 with r0 free of rational n-th-power factors
/// (complete for desk-scale inputs; oversized prime cofactors are left in r0
/// after an exact-root check).
fn reduce_nth_power(r: &BigRational, n: u32) -> (BigRational, BigRational) {
    let (s_num, r_num) = reduce_nth_power_int(r.numer().clone(), n);
    let (s_den, r_den) = reduce_nth_power_int(r.denom().clone(), n);
    (
        BigRational::new(s_num, s_den),
        BigRational::new(r_num, r_den),
    )
}

fn reduce_nth_power_int(x: BigInt, n: u32) -> (BigInt, BigInt) {
    assert!(x.is_positive());
    let mut rest = x;
    let mut s = BigInt::one();
    let mut r0 = BigInt::one();
    let mut p = BigInt::from(2);
    let bound = BigInt::from(1_000_000u64);
    while &p * &p <= rest && p <= bound {
        if (&rest % &p).is_zero() {
            let mut e = 0u32;
            while (&rest % &p).is_zero() {
                rest /= &p;
                e += 1;
            }
            s *= p.pow(e / n);
            r0 *= p.pow(e % n);
        }
        p += 1u32;
    }
    if !rest.is_one() {
        let root = rest.nth_root(n);
        if root.pow(n) == rest {
            s *= root;
        } else {
            r0 *= rest;
        }
    }
    (s, r0)
}

/// Frobenius coordinates of self-adjoint matrices in the canonical basis
/// {E_jj} followed by {E_jk + E_kj, i(E_jk - E_kj)} for j < k in row-major
/// order: the diagonal, then (Re, Im) of each above-diagonal entry.
pub fn form_coordinates(a: &SelfAdjointMatrix) -> Vec<BigRational> {
    let n = a.n();
    let mut coords = Vec::with_capacity(n * n);
    for j in 0..n {
        coords.push(a.diag_entry(j));
    }
    for j in 0..n {
        for k in j + 1..n {
            coords.push(a.entry(j, k).re());
            coords.push(a.entry(j, k).im());
        }
    }
    coords
}

/// Inverse of [`form_coordinates`].
pub fn form_from_coordinates(n: usize, coords: &[BigRational]) -> SelfAdjointMatrix {
    assert_eq!(coords.len(), n * n);
    let mut mat = GaussMatrix::zero(n, n);
    for j in 0..n {
        mat[(j, j)] = GaussianRational::from_rational(&coords[j]);
    }
    let mut idx = n;
    for j in 0..n {
        for k in j + 1..n {
            let re = &coords[idx];
            let im = &coords[idx + 1];
            idx += 2;
            let num = GaussianRational::from_rational(re)
                + GaussianRational::from_rational(im) * GaussianRational::i();
            mat[(k, j)] = num.conj();
            mat[(j, k)] = num;
        }
    }
    SelfAdjointMatrix::new(mat).expect("coordinates define a self-adjoint matrix")
}

/// Frobenius pairing tr(AB) of self-adjoint matrices, real and rational.
pub fn frobenius_inner(a: &SelfAdjointMatrix, b: &SelfAdjointMatrix) -> BigRational {
    let n = a.n();
    let mut acc = BigRational::zero();
    for j in 0..n {
        for k in 0..n {
            let x = a.entry(j, k);
            let y = b.entry(j, k);
            acc += x.re() * y.re() + x.im() * y.im();
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::GaussianInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn envelope_formulas() {
        let omega = Envelope::new(rat(1, 1), rat(1, 1), 2).unwrap();
        let (o1, o2) = envelopes(&omega);
        assert_eq!((o1.lo, o1.hi), (rat(1, 2), rat(2, 1)));
        assert_eq!((o2.lo, o2.hi), (rat(1, 8), rat(2, 1)));

        let omega = Envelope::new(rat(2, 1), rat(3, 1), 2).unwrap();
        let (o1, o2) = envelopes(&omega);
        assert_eq!((o1.lo, o1.hi), (rat(1, 1), rat(6, 1)));
        assert_eq!((o2.lo, o2.hi), (rat(1, 6), rat(6, 1)));
    }

    #[test]
    fn envelope_scaling_homogeneity() {
        let omega = Envelope::new(rat(1, 1), rat(1, 1), 2).unwrap();
        let scaled = Envelope::new(rat(3, 1), rat(3, 1), 2).unwrap();
        let (o1, o2) = envelopes(&omega);
        let (s1, s2) = envelopes(&scaled);
        assert_eq!(s1.lo, o1.lo * rat(3, 1));
        assert_eq!(s1.hi, o1.hi * rat(3, 1));
        assert_eq!(s2.hi, o2.hi * rat(3, 1));
        // the lower Omega2 edge scales like Delta/lambda^(n-1) ~ c as well
        assert_eq!(s2.lo, o2.lo * rat(3, 1));
    }

    #[test]
    fn m_threshold_example() {
        assert_eq!(m_threshold(2, 10, 2, 2), BigInt::from(40961));
        assert!(validate_m(2, 10, 2, 2, 40961));
        assert!(!validate_m(2, 10, 2, 2, 40960));
        assert!(validate_m(2, 10, 2, 2, 50000));
    }

    #[test]
    fn q_from_point_examples() {
        let id = GaussMatrix::identity(2);
        let q = q_from_point(&id).unwrap().rational().unwrap();
        assert_eq!(q, SelfAdjointMatrix::identity(2));

        let g = GaussMatrix::from_rows(vec![
            vec![GaussianRational::one(), GaussianRational::zero()],
            vec![GaussianRational::zero(), GaussianRational::from_int(2)],
        ]);
        let q = q_from_point(&g).unwrap().rational().unwrap();
        assert_eq!(q, SelfAdjointMatrix::from_diag(&[rat(2, 1), rat(1, 2)]));

        // [[1,1],[0,1]] -> [[1,-1],[-1,2]]
        let g = GaussMatrix::from_rows(vec![
            vec![GaussianRational::one(), GaussianRational::one()],
            vec![GaussianRational::zero(), GaussianRational::one()],
        ]);
        let q = q_from_point(&g).unwrap().rational().unwrap();
        let want = crate::linalg::self_adjoint_from_int_pairs(&[
            &[(1, 0), (-1, 0)],
            &[(-1, 0), (2, 0)],
        ])
        .unwrap();
        assert_eq!(q, want);
    }

    #[test]
    fn q_from_point_scale_invariance() {
        let g = GaussMatrix::from_rows(vec![
            vec![GaussianRational::from_gauss(GaussianInt::new(1, 1)), GaussianRational::one()],
            vec![GaussianRational::zero(), GaussianRational::from_gauss(GaussianInt::new(0, 2))],
        ]);
        let scaled = g.scale(&GaussianRational::from_gauss(GaussianInt::new(2, -1)));
        let a = q_from_point(&g).unwrap();
        let b = q_from_point(&scaled).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.scale, b.scale);
    }

    #[test]
    fn q_from_point_irrational_scale_is_carried() {
        // det = 1+i, N = 2, sqrt(2) irrational
        let g = GaussMatrix::from_rows(vec![
            vec![GaussianRational::from_gauss(GaussianInt::new(1, 1)), GaussianRational::zero()],
            vec![GaussianRational::zero(), GaussianRational::one()],
        ]);
        let q = q_from_point(&g).unwrap();
        match q.scale {
            ScaleFactor::NthRoot { radicand, degree } => {
                assert_eq!(radicand, rat(2, 1));
                assert_eq!(degree, 2);
            }
            ScaleFactor::Folded => panic!("expected an irrational scale"),
        }
    }

    #[test]
    fn coordinates_roundtrip() {
        let a = crate::linalg::self_adjoint_from_int_pairs(&[
            &[(2, 0), (1, 3)],
            &[(1, -3), (5, 0)],
        ])
        .unwrap();
        let coords = form_coordinates(&a);
        assert_eq!(coords.len(), 4);
        assert_eq!(form_from_coordinates(2, &coords), a);
    }
}
