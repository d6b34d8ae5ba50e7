//! Matrices over Z[i] and Q(i).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{GaussianInt, GaussianRational};

/// Row-major matrix over Z[i].
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<GaussianInt>>", into = "Vec<Vec<GaussianInt>>")]
pub struct GaussIntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<GaussianInt>,
}

impl GaussIntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![GaussianInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for j in 0..n {
            m[(j, j)] = GaussianInt::one();
        }
        m
    }

    pub fn from_rows(rows_data: Vec<Vec<GaussianInt>>) -> Self {
        let rows = rows_data.len();
        let cols = rows_data.first().map_or(0, Vec::len);
        assert!(rows_data.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows, cols, entries: rows_data.into_iter().flatten().collect() }
    }

    pub fn diag(d: &[GaussianInt]) -> Self {
        let mut m = Self::zero(d.len(), d.len());
        for (j, v) in d.iter().enumerate() {
            m[(j, j)] = v.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[GaussianInt] {
        &self.entries
    }

    pub fn column(&self, c: usize) -> Vec<GaussianInt> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zero(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self[(r, k)].is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let prod = &self[(r, k)] * &rhs[(k, c)];
                    out[(r, c)] = &out[(r, c)] + &prod;
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.entries.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.entries.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    pub fn to_rational(&self) -> GaussMatrix {
        GaussMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().cloned().map(GaussianRational::from_gauss).collect(),
        }
    }

    /// Determinant over Z[i], via the rational path.
    pub fn det(&self) -> GaussianInt {
        let d = self.to_rational().det();
        debug_assert!(d.is_integral());
        d.to_gauss_int().expect("integral determinant")
    }
}

impl std::ops::Index<(usize, usize)> for GaussIntMatrix {
    type Output = GaussianInt;
    fn index(&self, (r, c): (usize, usize)) -> &GaussianInt {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for GaussIntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut GaussianInt {
        &mut self.entries[r * self.cols + c]
    }
}

impl fmt::Debug for GaussIntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(
                f,
                "[{}]",
                (0..self.cols).map(|c| self[(r, c)].to_string()).collect::<Vec<_>>().join(", ")
            )?;
        }
        Ok(())
    }
}

impl From<GaussIntMatrix> for Vec<Vec<GaussianInt>> {
    fn from(m: GaussIntMatrix) -> Self {
        (0..m.rows).map(|r| (0..m.cols).map(|c| m[(r, c)].clone()).collect()).collect()
    }
}

impl TryFrom<Vec<Vec<GaussianInt>>> for GaussIntMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<GaussianInt>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self::from_rows(rows))
    }
}

/// Row-major matrix over Q(i).
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<GaussianRational>>", into = "Vec<Vec<GaussianRational>>")]
pub struct GaussMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<GaussianRational>,
}

impl GaussMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![GaussianRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for j in 0..n {
            m[(j, j)] = GaussianRational::one();
        }
        m
    }

    pub fn from_rows(rows_data: Vec<Vec<GaussianRational>>) -> Self {
        let rows = rows_data.len();
        let cols = rows_data.first().map_or(0, Vec::len);
        assert!(rows_data.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows, cols, entries: rows_data.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[GaussianRational] {
        &self.entries
    }

    pub fn column(&self, c: usize) -> Vec<GaussianRational> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zero(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self[(r, k)].is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let prod = &self[(r, k)] * &rhs[(k, c)];
                    out[(r, c)] = &out[(r, c)] + &prod;
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = &*e * s;
        }
        out
    }

    pub fn scale_rational(&self, s: &BigRational) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.scale_rational(s);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (e, r) in out.entries.iter_mut().zip(&rhs.entries) {
            *e = &*e - r;
        }
        out
    }

    pub fn det(&self) -> GaussianRational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = GaussianRational::one();
        for col in 0..n {
            let Some(pr) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return GaussianRational::zero();
            };
            if pr != col {
                m.swap_rows(col, pr);
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("nonzero pivot");
            for r in col + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] * &inv;
                for c in col..n {
                    let v = &m[(r, c)] - &(&factor * &m[(col, c)]);
                    m[(r, c)] = v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut work = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let Some(pr) = (col..n).find(|&r| !work[(r, col)].is_zero()) else {
                return Err(Error::Singular);
            };
            work.swap_rows(col, pr);
            inv.swap_rows(col, pr);
            let pivot_inv = work[(col, col)].inv().expect("nonzero pivot");
            for c in 0..n {
                work[(col, c)] = &work[(col, c)] * &pivot_inv;
                inv[(col, c)] = &inv[(col, c)] * &pivot_inv;
            }
            for r in 0..n {
                if r == col || work[(r, col)].is_zero() {
                    continue;
                }
                let factor = work[(r, col)].clone();
                for c in 0..n {
                    let v = &work[(r, c)] - &(&factor * &work[(col, c)]);
                    work[(r, c)] = v;
                    let v = &inv[(r, c)] - &(&factor * &inv[(col, c)]);
                    inv[(r, c)] = v;
                }
            }
        }
        Ok(inv)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let n = m.rows;
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pr) = (rank..n).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(rank, pr);
            let inv = m[(rank, col)].inv().expect("nonzero pivot");
            for r in rank + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] * &inv;
                for c in col..m.cols {
                    let v = &m[(r, c)] - &(&factor * &m[(rank, c)]);
                    m[(r, c)] = v;
                }
            }
            rank += 1;
            if rank == n {
                break;
            }
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.entries.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// Least common multiple of canonical entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.entries.iter().fold(BigInt::one(), |acc, e| acc.lcm(e.den()))
    }

    /// Integral form if every entry has denominator 1.
    pub fn to_integral(&self) -> Option<GaussIntMatrix> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            entries.push(e.to_gauss_int()?);
        }
        Some(GaussIntMatrix { rows: self.rows, cols: self.cols, entries })
    }

    /// Deterministic ordering key: entries flattened to
    /// (num.re, num.im, den) triples.
    pub fn lex_key(&self) -> Vec<BigInt> {
        let mut key = Vec::with_capacity(self.entries.len() * 3);
        for e in &self.entries {
            key.push(e.num().re().clone());
            key.push(e.num().im().clone());
            key.push(e.den().clone());
        }
        key
    }
}

impl std::ops::Index<(usize, usize)> for GaussMatrix {
    type Output = GaussianRational;
    fn index(&self, (r, c): (usize, usize)) -> &GaussianRational {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for GaussMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut GaussianRational {
        &mut self.entries[r * self.cols + c]
    }
}

impl fmt::Debug for GaussMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(
                f,
                "[{}]",
                (0..self.cols).map(|c| self[(r, c)].to_string()).collect::<Vec<_>>().join(", ")
            )?;
        }
        Ok(())
    }
}

impl From<GaussMatrix> for Vec<Vec<GaussianRational>> {
    fn from(m: GaussMatrix) -> Self {
        (0..m.rows).map(|r| (0..m.cols).map(|c| m[(r, c)].clone()).collect()).collect()
    }
}

impl TryFrom<Vec<Vec<GaussianRational>>> for GaussMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<GaussianRational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self::from_rows(rows))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gi(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    #[test]
    fn int_matrix_det() {
        let m = GaussIntMatrix::from_rows(vec![
            vec![gi(0, 0), gi(1, 0)],
            vec![gi(2, 1), gi(0, 0)],
        ]);
        assert_eq!(m.det(), gi(-2, -1));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = GaussMatrix::from_rows(vec![
            vec![GaussianRational::from_int(1), GaussianRational::i()],
            vec![GaussianRational::zero(), GaussianRational::from_int(2)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), GaussMatrix::identity(2));
        assert!(GaussMatrix::zero(2, 2).inverse().is_err());
    }

    #[test]
    fn serde_entry_strings() {
        let m = GaussMatrix::from_rows(vec![
            vec![GaussianRational::from_int(1), GaussianRational::i()],
            vec![-GaussianRational::i(), GaussianRational::new(gi(1, 0), 2).unwrap()],
        ]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["(1)/1","(i)/1"],["(-i)/1","(1)/2"]]"#);
        let back: GaussMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
