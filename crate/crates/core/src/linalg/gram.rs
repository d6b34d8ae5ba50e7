//! Gram–Schmidt diagonalization of positive definite self-adjoint matrices by
//! elementary unipotent congruences, with the transform and its inverse
//! tracked exactly.

use num_rational::BigRational;
use num_traits::Signed;

use super::gmat::GaussMatrix;
use super::selfadj::SelfAdjointMatrix;
use crate::error::{Error, Result};

/// Result of diagonalizing q2 as q3 = U* q2 U.
pub struct GramSchmidt {
    /// Unit upper-triangular, det = 1.
    pub u: GaussMatrix,
    /// Exact inverse of `u`.
    pub u_inv: GaussMatrix,
    /// Diagonal with positive rational entries; det q3 = det q2.
    pub q3: SelfAdjointMatrix,
    /// One record per elimination step: (pivot position (j,k), old diagonal
    /// value at k, new diagonal value at k). The new value satisfies
    /// 0 < new <= old, strictly smaller whenever the eliminated entry was
    /// nonzero.
    pub steps: Vec<GramStep>,
}

#[derive(Clone, Debug)]
pub struct GramStep {
    pub position: (usize, usize),
    pub eliminated_nonzero: bool,
    pub diag_before: BigRational,
    pub diag_after: BigRational,
}

/// Eliminates above-diagonal entries in the fixed row-major order
/// (1,2), (1,3), ..., (1,n), (2,3), ..., (n-1,n), one elementary unipotent
/// factor id + u E_{jk} per step. Rejects non-positive-definite input at the
/// first non-positive pivot.
pub fn gram_schmidt_diagonalize(q2: &SelfAdjointMatrix) -> Result<GramSchmidt> {
    let n = q2.n();
    let mut work = q2.clone();
    let mut u = GaussMatrix::identity(n);
    let mut u_inv = GaussMatrix::identity(n);
    let mut steps = Vec::with_capacity(n * (n - 1) / 2);

    for j in 0..n {
        let pivot = work.diag_entry(j);
        if !pivot.is_positive() {
            return Err(Error::NotPositiveDefinite(j + 1));
        }
        for k in j + 1..n {
            let b = work.entry(j, k).clone();
            let diag_before = work.diag_entry(k);
            if b.is_zero() {
                steps.push(GramStep {
                    position: (j, k),
                    eliminated_nonzero: false,
                    diag_before: diag_before.clone(),
                    diag_after: diag_before,
                });
                continue;
            }
            // E = id + u E_{jk} with u = -b/a clears (j,k) and (k,j); only
            // row/column k of the form change.
            let coeff = -(&b / &work.entry(j, j).clone());
            let mut e = GaussMatrix::identity(n);
            e[(j, k)] = coeff.clone();
            let mut e_inv = GaussMatrix::identity(n);
            e_inv[(j, k)] = -coeff;
            work = work.congruence(&e);
            u = u.mul(&e);
            u_inv = e_inv.mul(&u_inv);
            let diag_after = work.diag_entry(k);
            debug_assert!(diag_after.is_positive() || !work.entry(k, k).is_zero());
            steps.push(GramStep {
                position: (j, k),
                eliminated_nonzero: true,
                diag_before,
                diag_after,
            });
        }
    }

    debug_assert!(work.is_diagonal());
    debug_assert_eq!(u.mul(&u_inv), GaussMatrix::identity(n));
    // final pivots must all be positive
    for j in 0..n {
        if !work.diag_entry(j).is_positive() {
            return Err(Error::NotPositiveDefinite(j + 1));
        }
    }
    Ok(GramSchmidt { u, u_inv, q3: work, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::GaussianRational;
    use crate::linalg::selfadj::self_adjoint_from_int_pairs;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn already_diagonal() {
        let q = SelfAdjointMatrix::from_diag(&[rat(3, 1), rat(7, 1)]);
        let gs = gram_schmidt_diagonalize(&q).unwrap();
        assert_eq!(gs.u, GaussMatrix::identity(2));
        assert_eq!(gs.q3, q);
    }

    #[test]
    fn single_elimination_step() {
        // [[2, i], [-i, 1]] -> U = [[1, -i/2], [0, 1]], q3 = diag(2, 1/2)
        let q = self_adjoint_from_int_pairs(&[&[(2, 0), (0, 1)], &[(0, -1), (1, 0)]]).unwrap();
        let gs = gram_schmidt_diagonalize(&q).unwrap();
        let minus_half_i =
            GaussianRational::new(crate::gauss::GaussianInt::new(0, -1), 2).unwrap();
        assert_eq!(gs.u[(0, 1)], minus_half_i);
        assert_eq!(gs.q3, SelfAdjointMatrix::from_diag(&[rat(2, 1), rat(1, 2)]));
        // exactness: U* q U = q3, det preserved
        assert_eq!(q.congruence(&gs.u), gs.q3);
        assert_eq!(q.det(), gs.q3.det());
        assert_eq!(gs.u.det(), GaussianRational::one());
    }

    #[test]
    fn pivot_decrease_is_strict() {
        let q = self_adjoint_from_int_pairs(&[
            &[(3, 0), (1, 1), (0, -1)],
            &[(1, -1), (4, 0), (1, 0)],
            &[(0, 1), (1, 0), (5, 0)],
        ])
        .unwrap();
        assert!(q.is_positive_definite());
        let gs = gram_schmidt_diagonalize(&q).unwrap();
        for s in &gs.steps {
            assert!(s.diag_after.is_positive());
            if s.eliminated_nonzero {
                assert!(s.diag_after < s.diag_before, "step {:?}", s.position);
            } else {
                assert_eq!(s.diag_after, s.diag_before);
            }
        }
        assert_eq!(q.congruence(&gs.u), gs.q3);
    }

    #[test]
    fn rejects_indefinite() {
        let q = self_adjoint_from_int_pairs(&[&[(1, 0), (2, 0)], &[(2, 0), (1, 0)]]).unwrap();
        assert!(matches!(
            gram_schmidt_diagonalize(&q),
            Err(Error::NotPositiveDefinite(_))
        ));
    }
}
