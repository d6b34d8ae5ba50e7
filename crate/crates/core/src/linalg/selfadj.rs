//! Self-adjoint matrices over Q(i), exact definiteness certificates, and the
//! realification to symmetric rational matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::gmat::GaussMatrix;
use super::qmat::QMatrix;
use crate::error::{Error, Result};
use crate::gauss::{GaussianInt, GaussianRational};

/// An n-by-n matrix A over Q(i) with A* = A. Diagonal entries are real.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GaussMatrix", into = "GaussMatrix")]
pub struct SelfAdjointMatrix {
    mat: GaussMatrix,
}

impl SelfAdjointMatrix {
    pub fn new(mat: GaussMatrix) -> Result<Self> {
        if mat.rows() != mat.cols() {
            return Err(Error::Dimension("self-adjoint matrix must be square".into()));
        }
        for j in 0..mat.rows() {
            for k in j..mat.cols() {
                if mat[(j, k)] != mat[(k, j)].conj() {
                    return Err(Error::NotSelfAdjoint(j, k));
                }
            }
        }
        Ok(Self { mat })
    }

    pub fn identity(n: usize) -> Self {
        Self { mat: GaussMatrix::identity(n) }
    }

    pub fn from_diag(diag: &[BigRational]) -> Self {
        let n = diag.len();
        let mut mat = GaussMatrix::zero(n, n);
        for (j, d) in diag.iter().enumerate() {
            mat[(j, j)] = GaussianRational::from_rational(d);
        }
        Self { mat }
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn entry(&self, j: usize, k: usize) -> &GaussianRational {
        &self.mat[(j, k)]
    }

    pub fn matrix(&self) -> &GaussMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> GaussMatrix {
        self.mat
    }

    /// Real diagonal entry as an exact rational.
    pub fn diag_entry(&self, j: usize) -> BigRational {
        self.mat[(j, j)].to_rational().expect("diagonal of a self-adjoint matrix is real")
    }

    pub fn is_diagonal(&self) -> bool {
        for j in 0..self.n() {
            for k in 0..self.n() {
                if j != k && !self.mat[(j, k)].is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// All entries real rationals (so the matrix is symmetric over Q).
    pub fn is_rational(&self) -> bool {
        self.mat.entries().iter().all(|e| e.is_real())
    }

    pub fn scale_rational(&self, s: &BigRational) -> Self {
        Self { mat: self.mat.scale_rational(s) }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self { mat: self.mat.sub(&rhs.mat) }
    }

    /// x* A y, exact.
    pub fn pair(&self, x: &[GaussianRational], y: &[GaussianRational]) -> GaussianRational {
        assert_eq!(x.len(), self.n());
        assert_eq!(y.len(), self.n());
        let mut acc = GaussianRational::zero();
        for j in 0..self.n() {
            if x[j].is_zero() {
                continue;
            }
            let xc = x[j].conj();
            for k in 0..self.n() {
                if y[k].is_zero() {
                    continue;
                }
                acc = &acc + &(&(&xc * &self.mat[(j, k)]) * &y[k]);
            }
        }
        acc
    }

    /// x* A y for integral vectors.
    pub fn pair_int(&self, x: &[GaussianInt], y: &[GaussianInt]) -> GaussianRational {
        let xr: Vec<_> = x.iter().cloned().map(GaussianRational::from_gauss).collect();
        let yr: Vec<_> = y.iter().cloned().map(GaussianRational::from_gauss).collect();
        self.pair(&xr, &yr)
    }

    /// y* A y as an exact (real) rational.
    pub fn quad(&self, y: &[GaussianRational]) -> BigRational {
        self.pair(y, y).to_rational().expect("quadratic value of a self-adjoint form is real")
    }

    pub fn quad_int(&self, y: &[GaussianInt]) -> BigRational {
        let yr: Vec<_> = y.iter().cloned().map(GaussianRational::from_gauss).collect();
        self.quad(&yr)
    }

    /// Congruence transform U* A U, exact; the result is self-adjoint.
    pub fn congruence(&self, u: &GaussMatrix) -> Self {
        let m = u.adjoint().mul(&self.mat).mul(u);
        Self::new(m).expect("congruence preserves self-adjointness")
    }

    /// Determinant (real for self-adjoint input).
    pub fn det(&self) -> BigRational {
        self.mat.det().to_rational().expect("determinant of a self-adjoint matrix is real")
    }

    fn leading_minor(&self, k: usize) -> BigRational {
        let sub = GaussMatrix::from_rows(
            (0..k).map(|r| (0..k).map(|c| self.mat[(r, c)].clone()).collect()).collect(),
        );
        sub.det().to_rational().expect("principal minors are real")
    }

    /// Sylvester criterion with exact leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        (1..=self.n()).all(|k| self.leading_minor(k).is_positive())
    }

    pub fn require_positive_definite(&self) -> Result<()> {
        for k in 1..=self.n() {
            if !self.leading_minor(k).is_positive() {
                return Err(Error::NotPositiveDefinite(k));
            }
        }
        Ok(())
    }

    /// Exact positive semidefiniteness: every principal minor is >= 0.
    pub fn is_positive_semidefinite(&self) -> bool {
        let n = self.n();
        for mask in 1u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
            let sub = GaussMatrix::from_rows(
                idx.iter()
                    .map(|&r| idx.iter().map(|&c| self.mat[(r, c)].clone()).collect())
                    .collect(),
            );
            let d = sub.det().to_rational().expect("principal minors are real");
            if d.is_negative() {
                return false;
            }
        }
        true
    }

    /// Least common multiple of the canonical denominators of all entries.
    /// For a diagonal matrix this equals the lcm over the diagonal, since the
    /// zero off-diagonal entries have denominator 1.
    pub fn denominator_lcm(&self) -> BigInt {
        self.mat.entries().iter().fold(BigInt::one(), |acc, e| acc.lcm(e.den()))
    }

    /// The 2n-by-2n symmetric rational matrix R with y*Ay = Y^t R Y, where Y
    /// interleaves real and imaginary coordinates: y_j = Y_{2j} + i Y_{2j+1}.
    ///
    /// Each complex entry a+bi contributes the 2x2 block [[a, -b], [b, a]];
    /// R is positive definite iff A is.
    pub fn realify(&self) -> QMatrix {
        let n = self.n();
        let mut r = QMatrix::zero(2 * n, 2 * n);
        for j in 0..n {
            for k in 0..n {
                let a = self.mat[(j, k)].re();
                let b = self.mat[(j, k)].im();
                r[(2 * j, 2 * k)] = a.clone();
                r[(2 * j, 2 * k + 1)] = -b.clone();
                r[(2 * j + 1, 2 * k)] = b;
                r[(2 * j + 1, 2 * k + 1)] = a;
            }
        }
        r
    }

    /// Entrywise maximum of |entry|^2, exact.
    pub fn max_entry_norm_sq(&self) -> BigRational {
        self.mat
            .entries()
            .iter()
            .map(GaussianRational::norm)
            .max()
            .expect("nonempty matrix")
    }
}

impl fmt::Debug for SelfAdjointMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.mat)
    }
}

impl TryFrom<GaussMatrix> for SelfAdjointMatrix {
    type Error = Error;
    fn try_from(mat: GaussMatrix) -> Result<Self> {
        Self::new(mat)
    }
}

impl From<SelfAdjointMatrix> for GaussMatrix {
    fn from(a: SelfAdjointMatrix) -> GaussMatrix {
        a.mat
    }
}

/// Helper to build small self-adjoint matrices from integer data
/// (re, im) per entry; rows must describe a self-adjoint matrix.
pub fn self_adjoint_from_int_pairs(rows: &[&[(i64, i64)]]) -> Result<SelfAdjointMatrix> {
    let data = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&(re, im)| GaussianRational::from_gauss(GaussianInt::new(re, im)))
                .collect()
        })
        .collect();
    SelfAdjointMatrix::new(GaussMatrix::from_rows(data))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn validation() {
        assert!(self_adjoint_from_int_pairs(&[&[(2, 0), (0, 1)], &[(0, -1), (1, 0)]]).is_ok());
        // non-conjugate off-diagonal
        assert!(self_adjoint_from_int_pairs(&[&[(2, 0), (0, 1)], &[(0, 1), (1, 0)]]).is_err());
        // non-real diagonal
        assert!(self_adjoint_from_int_pairs(&[&[(0, 1)]]).is_err());
    }

    #[test]
    fn realify_identity_and_diag() {
        let a = SelfAdjointMatrix::identity(2);
        assert_eq!(a.realify(), QMatrix::identity(4));

        let d = SelfAdjointMatrix::from_diag(&[rat(2, 1), rat(1, 2)]);
        let r = d.realify();
        for (j, expect) in [rat(2, 1), rat(2, 1), rat(1, 2), rat(1, 2)].iter().enumerate() {
            assert_eq!(&r[(j, j)], expect);
        }
    }

    #[test]
    fn realify_matches_complex_form() {
        // A = [[2, i], [-i, 1]], y = (1, 1): y*Ay = 3
        let a = self_adjoint_from_int_pairs(&[&[(2, 0), (0, 1)], &[(0, -1), (1, 0)]]).unwrap();
        let y = vec![GaussianInt::one(), GaussianInt::one()];
        assert_eq!(a.quad_int(&y), rat(3, 1));
        let r = a.realify();
        let yv = vec![rat(1, 1), rat(0, 1), rat(1, 1), rat(0, 1)];
        let ry = r.mul_vec(&yv);
        let val: BigRational = yv.iter().zip(&ry).map(|(a, b)| a * b).sum();
        assert_eq!(val, rat(3, 1));
    }

    #[test]
    fn definiteness_certificates() {
        let a = self_adjoint_from_int_pairs(&[&[(2, 0), (0, 1)], &[(0, -1), (1, 0)]]).unwrap();
        assert!(a.is_positive_definite());
        let b = self_adjoint_from_int_pairs(&[&[(1, 0), (2, 0)], &[(2, 0), (1, 0)]]).unwrap();
        assert!(!b.is_positive_definite());
        // PSD boundary: the zero matrix
        let z = SelfAdjointMatrix::from_diag(&[rat(0, 1), rat(0, 1)]);
        assert!(z.is_positive_semidefinite());
        assert!(!z.is_positive_definite());
    }

    #[test]
    fn denominator_lcm_examples() {
        assert_eq!(SelfAdjointMatrix::identity(3).denominator_lcm(), BigInt::one());
        let d = SelfAdjointMatrix::from_diag(&[rat(1, 2), rat(2, 3)]);
        assert_eq!(d.denominator_lcm(), BigInt::from(6));
    }
}
