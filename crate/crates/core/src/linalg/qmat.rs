//! Dense matrices over Q with exact arithmetic: elimination, kernels,
//! determinants, and the LDL-style decomposition used by shell enumeration.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for j in 0..n {
            m[(j, j)] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows_data: Vec<Vec<BigRational>>) -> Self {
        let rows = rows_data.len();
        let cols = rows_data.first().map_or(0, Vec::len);
        let entries = rows_data.into_iter().flatten().collect();
        Self { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        let mut out = Self::zero(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let prod = a * &rhs[(k, c)];
                    out[(r, c)] += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Reduced row echelon form in place; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut lead = 0;
        for col in 0..self.cols {
            let Some(pr) = (lead..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(lead, pr);
            let inv = self[(lead, col)].recip();
            for c in col..self.cols {
                let v = &self[(lead, c)] * &inv;
                self[(lead, c)] = v;
            }
            for r in 0..self.rows {
                if r != lead && !self[(r, col)].is_zero() {
                    let factor = self[(r, col)].clone();
                    for c in col..self.cols {
                        let v = &self[(r, c)] - &factor * &self[(lead, c)];
                        self[(r, c)] = v;
                    }
                }
            }
            pivots.push(col);
            lead += 1;
            if lead == self.rows {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Canonical kernel basis: one vector per free column, with a 1 in the
    /// free position and pivot entries back-substituted from the RREF.
    pub fn kernel(&self) -> Vec<Vec<BigRational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = Some(prow);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut vec = vec![BigRational::zero(); self.cols];
            vec[free] = BigRational::one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                vec[pcol] = -m[(prow, free)].clone();
            }
            basis.push(vec);
        }
        basis
    }

    /// Exact determinant by fraction-aware Gaussian elimination.
    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(pr) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return BigRational::zero();
            };
            if pr != col {
                m.swap_rows(col, pr);
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det *= &pivot;
            let inv = pivot.recip();
            for r in col + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] * &inv;
                for c in col..n {
                    let v = &m[(r, c)] - &factor * &m[(col, c)];
                    m[(r, c)] = v;
                }
            }
        }
        det
    }

    /// Solves self * x = b for square nonsingular self.
    pub fn solve(&self, b: &[BigRational]) -> Result<Vec<BigRational>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, b.len());
        let n = self.rows;
        let mut aug = Self::zero(n, n + 1);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, n)] = b[r].clone();
        }
        let pivots = aug.rref();
        if pivots.len() < n {
            return Err(Error::Singular);
        }
        Ok((0..n).map(|r| aug[(r, n)].clone()).collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Least common multiple of the entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        use num_integer::Integer;
        self.entries
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()))
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = BigRational;
    fn index(&self, (r, c): (usize, usize)) -> &BigRational {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigRational {
        &mut self.entries[r * self.cols + c]
    }
}

/// Decomposition R = U^t D U with U unit upper triangular and D diagonal,
/// valid for symmetric positive definite R. Fails with the offending pivot
/// index otherwise.
pub struct UduDecomposition {
    pub diag: Vec<BigRational>,
    /// Strictly-upper coefficients; u[j][k] for k > j.
    pub upper: Vec<Vec<BigRational>>,
}

pub fn udu_decompose(r: &QMatrix) -> Result<UduDecomposition> {
    assert_eq!(r.rows(), r.cols());
    let n = r.rows();
    let mut work = r.clone();
    let mut diag = Vec::with_capacity(n);
    let mut upper = vec![vec![BigRational::zero(); n]; n];
    for j in 0..n {
        let d = work[(j, j)].clone();
        if !d.is_positive() {
            return Err(Error::NotPositiveDefinite(j));
        }
        for k in j + 1..n {
            upper[j][k] = &work[(j, k)] / &d;
        }
        for a in j + 1..n {
            for b in a..n {
                let v = &work[(a, b)] - &d * &upper[j][a] * &upper[j][b];
                work[(a, b)] = v;
            }
        }
        diag.push(d);
    }
    Ok(UduDecomposition { diag, upper })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn det_and_solve() {
        let m = QMatrix::from_rows(vec![
            vec![q(2, 1), q(1, 1)],
            vec![q(1, 1), q(1, 1)],
        ]);
        assert_eq!(m.det(), q(1, 1));
        let x = m.solve(&[q(3, 1), q(2, 1)]).unwrap();
        assert_eq!(x, vec![q(1, 1), q(1, 1)]);
    }

    #[test]
    fn kernel_is_annihilated() {
        let m = QMatrix::from_rows(vec![
            vec![q(1, 1), q(2, 1), q(3, 1)],
            vec![q(2, 1), q(4, 1), q(6, 1)],
        ]);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn udu_reconstructs() {
        let r = QMatrix::from_rows(vec![
            vec![q(2, 1), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(3, 1), q(1, 2)],
            vec![q(0, 1), q(1, 2), q(1, 1)],
        ]);
        let udu = udu_decompose(&r).unwrap();
        // q(y) rebuilt from the decomposition must match y^t R y on samples
        for y in [[1i64, 0, 0], [0, 1, 0], [1, -2, 3], [5, 1, -1]] {
            let yv: Vec<BigRational> = y.iter().map(|&a| q(a, 1)).collect();
            let direct: BigRational = (0..3)
                .flat_map(|a| (0..3).map(move |b| (a, b)))
                .map(|(a, b)| &yv[a] * &r[(a, b)] * &yv[b])
                .sum();
            let mut via = BigRational::zero();
            for j in 0..3 {
                let mut lin = yv[j].clone();
                for k in j + 1..3 {
                    lin += &udu.upper[j][k] * &yv[k];
                }
                via += &udu.diag[j] * &lin * &lin;
            }
            assert_eq!(direct, via);
        }
    }

    #[test]
    fn udu_rejects_indefinite() {
        let r = QMatrix::from_rows(vec![
            vec![q(1, 1), q(2, 1)],
            vec![q(2, 1), q(1, 1)],
        ]);
        assert!(udu_decompose(&r).is_err());
    }
}
