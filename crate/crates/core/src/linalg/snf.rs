//! Smith normal form over Z[i], with unimodular transforms tracked.
//!
//! Z[i] is Euclidean for the norm, so the classical pivot-and-reduce
//! algorithm terminates: every reduction step strictly shrinks the pivot
//! norm or the number of offending entries.

use serde::{Deserialize, Serialize};

use super::gmat::GaussIntMatrix;
use crate::error::{Error, Result};
use crate::gauss::{gaussian_gcd, GaussianInt};

/// Canonical-associate elementary divisors d1 | d2 | ... | dn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryDivisors(pub Vec<GaussianInt>);

impl ElementaryDivisors {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn divisors(&self) -> &[GaussianInt] {
        &self.0
    }
}

/// U g V = diag(d) with U, V invertible over Z[i]; g square and nonsingular.
pub fn smith_normal_form(
    g: &GaussIntMatrix,
) -> Result<(GaussIntMatrix, ElementaryDivisors, GaussIntMatrix)> {
    if g.rows() != g.cols() {
        return Err(Error::Dimension("Smith normal form expects a square matrix".into()));
    }
    if g.det().is_zero() {
        return Err(Error::Singular);
    }
    let (u, d, v) = smith_rectangular(g);
    debug_assert!(d.iter().all(|x| !x.is_zero()));
    Ok((u, ElementaryDivisors(d), v))
}

/// Rectangular SNF core; returns (U, diagonal, V) with U g V diagonal,
/// divisibility chain along the diagonal, canonical-associate entries
/// (trailing zeros possible for rank-deficient input).
pub fn smith_rectangular(g: &GaussIntMatrix) -> (GaussIntMatrix, Vec<GaussianInt>, GaussIntMatrix) {
    let rows = g.rows();
    let cols = g.cols();
    let mut work = g.clone();
    let mut u = GaussIntMatrix::identity(rows);
    let mut v = GaussIntMatrix::identity(cols);

    let steps = rows.min(cols);
    for k in 0..steps {
        if !place_pivot(&mut work, &mut u, &mut v, k) {
            break; // remaining submatrix is zero
        }
        loop {
            // Clear column k by Euclidean reduction; a nonzero remainder
            // becomes the new, strictly smaller pivot.
            reduce_column(&mut work, &mut u, k);
            if let Some(r) = (k + 1..rows).find(|&r| !work[(r, k)].is_zero()) {
                work.swap_rows(k, r);
                u.swap_rows(k, r);
                continue;
            }
            reduce_row(&mut work, &mut v, k);
            if let Some(c) = (k + 1..cols).find(|&c| !work[(k, c)].is_zero()) {
                work.swap_cols(k, c);
                v.swap_cols(k, c);
                continue;
            }
            // Row and column are clear; force the pivot to divide the rest
            // of the submatrix so the divisor chain holds.
            let pivot = work[(k, k)].clone();
            let offender = (k + 1..rows)
                .flat_map(|r| (k + 1..cols).map(move |c| (r, c)))
                .find(|&(r, c)| !pivot.divides(&work[(r, c)]));
            match offender {
                Some((r, _)) => {
                    add_row(&mut work, &mut u, k, r);
                }
                None => break,
            }
        }
    }

    // Canonical-associate normalization of the diagonal.
    let mut diag = Vec::with_capacity(steps);
    for k in 0..steps {
        let d = work[(k, k)].clone();
        if !d.is_zero() {
            let unit = d.unit_to_canonical();
            if !unit.is_one() {
                scale_row(&mut work, &mut u, k, &unit);
            }
        }
        diag.push(work[(k, k)].clone());
    }
    (u, diag, v)
}

/// Moves a minimal-norm nonzero entry of the trailing submatrix to (k, k).
/// Returns false when the submatrix is zero.
fn place_pivot(
    work: &mut GaussIntMatrix,
    u: &mut GaussIntMatrix,
    v: &mut GaussIntMatrix,
    k: usize,
) -> bool {
    let mut best: Option<(usize, usize)> = None;
    for r in k..work.rows() {
        for c in k..work.cols() {
            if work[(r, c)].is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some((br, bc)) => work[(r, c)].norm() < work[(br, bc)].norm(),
            };
            if better {
                best = Some((r, c));
            }
        }
    }
    let Some((r, c)) = best else {
        return false;
    };
    work.swap_rows(k, r);
    u.swap_rows(k, r);
    work.swap_cols(k, c);
    v.swap_cols(k, c);
    true
}

fn reduce_column(work: &mut GaussIntMatrix, u: &mut GaussIntMatrix, k: usize) {
    let pivot = work[(k, k)].clone();
    for r in k + 1..work.rows() {
        if work[(r, k)].is_zero() {
            continue;
        }
        let (q, _) = work[(r, k)].div_rem(&pivot).expect("nonzero pivot");
        if q.is_zero() {
            continue;
        }
        for c in 0..work.cols() {
            let val = &work[(r, c)] - &(&q * &work[(k, c)]);
            work[(r, c)] = val;
        }
        for c in 0..u.cols() {
            let val = &u[(r, c)] - &(&q * &u[(k, c)]);
            u[(r, c)] = val;
        }
    }
}

fn reduce_row(work: &mut GaussIntMatrix, v: &mut GaussIntMatrix, k: usize) {
    let pivot = work[(k, k)].clone();
    for c in k + 1..work.cols() {
        if work[(k, c)].is_zero() {
            continue;
        }
        let (q, _) = work[(k, c)].div_rem(&pivot).expect("nonzero pivot");
        if q.is_zero() {
            continue;
        }
        for r in 0..work.rows() {
            let val = &work[(r, c)] - &(&q * &work[(r, k)]);
            work[(r, c)] = val;
        }
        for r in 0..v.rows() {
            let val = &v[(r, c)] - &(&q * &v[(r, k)]);
            v[(r, c)] = val;
        }
    }
}

fn add_row(work: &mut GaussIntMatrix, u: &mut GaussIntMatrix, dst: usize, src: usize) {
    for c in 0..work.cols() {
        let val = &work[(dst, c)] + &work[(src, c)];
        work[(dst, c)] = val;
    }
    for c in 0..u.cols() {
        let val = &u[(dst, c)] + &u[(src, c)];
        u[(dst, c)] = val;
    }
}

fn scale_row(work: &mut GaussIntMatrix, u: &mut GaussIntMatrix, r: usize, unit: &GaussianInt) {
    for c in 0..work.cols() {
        let val = unit * &work[(r, c)];
        work[(r, c)] = val;
    }
    for c in 0..u.cols() {
        let val = unit * &u[(r, c)];
        u[(r, c)] = val;
    }
}

/// Z[i]-basis of { y : c y = 0 }, as columns; the kernel of the linear map is
/// a direct summand, so membership is exactly Z[i]-combinations of the basis.
pub fn integer_kernel(c: &GaussIntMatrix) -> Vec<Vec<GaussianInt>> {
    let (_, diag, v) = smith_rectangular(c);
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    (rank..c.cols()).map(|col| v.column(col)).collect()
}

/// Test oracle: divisors from gcds of k-by-k minors, d_k = g_k / g_{k-1}.
pub fn divisors_from_minor_gcds(g: &GaussIntMatrix) -> Result<ElementaryDivisors> {
    let n = g.rows();
    assert_eq!(n, g.cols());
    let mut prev = GaussianInt::one();
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let mut gk: Option<GaussianInt> = None;
        for rowset in subsets(n, k) {
            for colset in subsets(n, k) {
                let m = GaussIntMatrix::from_rows(
                    rowset
                        .iter()
                        .map(|&r| colset.iter().map(|&c| g[(r, c)].clone()).collect())
                        .collect(),
                );
                let d = m.det();
                if d.is_zero() {
                    continue;
                }
                gk = Some(match gk {
                    None => d.canonical_associate(),
                    Some(acc) => gaussian_gcd(&acc, &d)?,
                });
            }
        }
        let gk = gk.ok_or(Error::Singular)?;
        let dk = gk.div_exact(&prev).ok_or(Error::Singular)?;
        out.push(dk.canonical_associate());
        prev = gk;
    }
    Ok(ElementaryDivisors(out))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gi(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    fn check_snf(g: &GaussIntMatrix) -> ElementaryDivisors {
        let (u, d, v) = smith_normal_form(g).unwrap();
        // U g V = diag(d)
        let prod = u.mul(g).mul(&v);
        assert_eq!(prod, GaussIntMatrix::diag(d.divisors()));
        // transforms are unimodular
        assert!(u.det().is_unit());
        assert!(v.det().is_unit());
        // chain and canonical associates
        for w in d.divisors().windows(2) {
            assert!(w[0].divides(&w[1]), "chain {:?}", d);
        }
        for x in d.divisors() {
            assert_eq!(x, &x.canonical_associate());
        }
        d
    }

    #[test]
    fn snf_examples() {
        // diag(1, (2+i)^2): already diagonal and ordered
        let g = GaussIntMatrix::diag(&[gi(1, 0), gi(3, 4)]);
        assert_eq!(check_snf(&g).divisors(), &[gi(1, 0), gi(3, 4)]);

        // antidiagonal
        let g = GaussIntMatrix::from_rows(vec![
            vec![gi(0, 0), gi(1, 0)],
            vec![gi(2, 1), gi(0, 0)],
        ]);
        assert_eq!(check_snf(&g).divisors(), &[gi(1, 0), gi(2, 1)]);

        assert_eq!(
            check_snf(&GaussIntMatrix::identity(3)).divisors(),
            &[gi(1, 0), gi(1, 0), gi(1, 0)]
        );
    }

    #[test]
    fn snf_rejects_singular() {
        let g = GaussIntMatrix::from_rows(vec![
            vec![gi(1, 0), gi(1, 0)],
            vec![gi(1, 0), gi(1, 0)],
        ]);
        assert!(smith_normal_form(&g).is_err());
    }

    #[test]
    fn snf_matches_minor_gcd_oracle_2x2() {
        let vals = [-2i64, -1, 0, 1, 2];
        let mut count = 0;
        for a in vals {
            for b in vals {
                for c in vals {
                    for d in vals {
                        let g = GaussIntMatrix::from_rows(vec![
                            vec![gi(a, b), gi(c, -d)],
                            vec![gi(d, a), gi(b, c)],
                        ]);
                        if g.det().is_zero() {
                            continue;
                        }
                        let got = check_snf(&g);
                        let want = divisors_from_minor_gcds(&g).unwrap();
                        assert_eq!(got, want, "matrix {:?}", g);
                        count += 1;
                    }
                }
            }
        }
        assert!(count > 100);
    }

    #[test]
    fn integer_kernel_annihilates() {
        // single constraint row (1, 2+i): kernel rank 1
        let c = GaussIntMatrix::from_rows(vec![vec![gi(1, 0), gi(2, 1)]]);
        let basis = integer_kernel(&c);
        assert_eq!(basis.len(), 1);
        let y = &basis[0];
        let val = &y[0] + &(&gi(2, 1) * &y[1]);
        assert!(val.is_zero());
        // primitive: gcd of coordinates is a unit
        assert!(gaussian_gcd(&y[0], &y[1]).unwrap().is_unit());
    }
}
