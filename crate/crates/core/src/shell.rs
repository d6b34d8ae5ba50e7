//! Complete enumeration of Gaussian-integer vectors on exact shells or in
//! tolerance shells of positive definite self-adjoint forms, with exact
//! linear constraints.
//!
//! The form is realified to a symmetric positive definite rational matrix and
//! searched depth first in Fincke–Pohst style. All pruning bounds come from
//! the exact rational U^t D U decomposition; floating point is used only as a
//! starting hint for the per-level integer ranges, never for a decision, so
//! the enumeration is complete and every result is re-verified exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gauss::{GaussianInt, GaussianRational};
use crate::linalg::{integer_kernel, udu_decompose, GaussIntMatrix, GaussMatrix, SelfAdjointMatrix};

/// A shell (or tolerance-shell) query against a positive definite form.
#[derive(Clone, Debug)]
pub struct ShellQuery {
    pub form: SelfAdjointMatrix,
    pub target: ShellTarget,
    /// Orthogonality constraints x_j* A y = 0, one complex (two real) linear
    /// conditions each. The x_j must be linearly independent.
    pub constraints: Vec<Vec<GaussianInt>>,
}

#[derive(Clone, Debug)]
pub enum ShellTarget {
    Exact(BigRational),
    Interval(BigRational, BigRational),
}

impl ShellQuery {
    pub fn exact(form: SelfAdjointMatrix, target: BigRational) -> Self {
        Self { form, target: ShellTarget::Exact(target), constraints: Vec::new() }
    }

    pub fn interval(form: SelfAdjointMatrix, lo: BigRational, hi: BigRational) -> Self {
        Self { form, target: ShellTarget::Interval(lo, hi), constraints: Vec::new() }
    }

    pub fn with_constraints(mut self, constraints: Vec<Vec<GaussianInt>>) -> Self {
        self.constraints = constraints;
        self
    }
}

/// All y in Z[i]^n with y*Ay = target and x_j*Ay = 0, in lexicographic order
/// of the interleaved (re, im) coordinates.
pub fn enumerate_shell(query: &ShellQuery) -> Result<Vec<Vec<GaussianInt>>> {
    let (lo, hi) = match &query.target {
        ShellTarget::Exact(t) => (t.clone(), t.clone()),
        ShellTarget::Interval(a, b) => (a.clone(), b.clone()),
    };
    enumerate_range(query, lo, hi)
}

/// Interval variant: all y with t1 <= y*Ay <= t2 under the constraints.
pub fn enumerate_interval(query: &ShellQuery) -> Result<Vec<Vec<GaussianInt>>> {
    enumerate_shell(query)
}

fn enumerate_range(
    query: &ShellQuery,
    lo: BigRational,
    hi: BigRational,
) -> Result<Vec<Vec<GaussianInt>>> {
    let form = &query.form;
    let n = form.n();
    form.require_positive_definite()?;
    if hi < lo || hi.is_negative() {
        return Ok(Vec::new());
    }

    // Reduce modulo the constraints: enumerate inside the kernel sublattice.
    let basis: Vec<Vec<GaussianInt>> = if query.constraints.is_empty() {
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|r| if r == j { GaussianInt::one() } else { GaussianInt::zero() })
                    .collect()
            })
            .collect()
    } else {
        constraint_kernel_basis(query)?
    };

    let dim = basis.len();
    if dim == 0 {
        // only the zero vector remains
        let zero = vec![GaussianInt::zero(); n];
        if lo <= BigRational::zero() {
            return Ok(vec![zero]);
        }
        return Ok(Vec::new());
    }

    // Restricted form B* A B on the kernel coordinates.
    let b_mat = basis_matrix(&basis, n);
    let restricted = SelfAdjointMatrix::new(
        b_mat.to_rational().adjoint().mul(form.matrix()).mul(&b_mat.to_rational()),
    )
    .expect("B*AB is self-adjoint");
    restricted.require_positive_definite()?;

    let real_form = restricted.realify();
    let udu = udu_decompose(&real_form)?;
    let m = 2 * dim;

    let mut results = Vec::new();
    let mut coords = vec![BigInt::zero(); m];
    search(
        &udu.diag,
        &udu.upper,
        m,
        m,
        BigRational::zero(),
        &lo,
        &hi,
        &mut coords,
        &mut |coords_done: &[BigInt]| {
            let w: Vec<GaussianInt> = (0..dim)
                .map(|j| GaussianInt::new(coords_done[2 * j].clone(), coords_done[2 * j + 1].clone()))
                .collect();
            let mut y = vec![GaussianInt::zero(); n];
            for (j, wj) in w.iter().enumerate() {
                for r in 0..n {
                    let add = wj * &basis[j][r];
                    y[r] = &y[r] + &add;
                }
            }
            results.push(y);
        },
    );

    // Exact re-verification on the original form and constraints.
    for y in &results {
        let val = form.quad_int(y);
        debug_assert!(lo <= val && val <= hi, "enumerated vector off target");
        for x in &query.constraints {
            debug_assert!(form.pair_int(x, y).is_zero(), "constraint violated");
        }
    }

    results.sort_by_key(|y| {
        y.iter().flat_map(|z| [z.re().clone(), z.im().clone()]).collect::<Vec<_>>()
    });
    Ok(results)
}

fn basis_matrix(basis: &[Vec<GaussianInt>], n: usize) -> GaussIntMatrix {
    // columns are basis vectors
    let mut m = GaussIntMatrix::zero(n, basis.len());
    for (c, v) in basis.iter().enumerate() {
        for r in 0..n {
            m[(r, c)] = v[r].clone();
        }
    }
    m
}

fn constraint_kernel_basis(query: &ShellQuery) -> Result<Vec<Vec<GaussianInt>>> {
    let form = &query.form;
    let n = form.n();
    // independence of the constraint vectors themselves
    let xs = GaussMatrix::from_rows(
        query
            .constraints
            .iter()
            .map(|x| x.iter().cloned().map(GaussianRational::from_gauss).collect())
            .collect(),
    );
    if xs.rank() != query.constraints.len() {
        return Err(Error::DependentConstraints);
    }
    // rows x_j* A, cleared to Z[i]
    let mut rows = Vec::with_capacity(query.constraints.len());
    for x in &query.constraints {
        if x.len() != n {
            return Err(Error::Dimension("constraint length".into()));
        }
        let xr: Vec<GaussianRational> =
            x.iter().map(|z| GaussianRational::from_gauss(z.conj())).collect();
        let mut row: Vec<GaussianRational> = (0..n)
            .map(|c| {
                let mut acc = GaussianRational::zero();
                for r in 0..n {
                    acc = &acc + &(&xr[r] * form.entry(r, c));
                }
                acc
            })
            .collect();
        let lcm = row.iter().fold(BigInt::from(1), |acc, e| num_integer::Integer::lcm(&acc, e.den()));
        let scale = BigRational::from(lcm);
        for e in &mut row {
            *e = e.scale_rational(&scale);
        }
        rows.push(
            row.into_iter()
                .map(|e| e.to_gauss_int().expect("cleared denominators"))
                .collect::<Vec<GaussianInt>>(),
        );
    }
    Ok(integer_kernel(&GaussIntMatrix::from_rows(rows)))
}

/// Depth-first search over levels m-1 .. 0. `partial` is the exact value
/// contributed by the already-fixed coordinates (levels >= `level`).
#[allow(clippy::too_many_arguments)]
fn search(
    diag: &[BigRational],
    upper: &[Vec<BigRational>],
    m: usize,
    level: usize,
    partial: BigRational,
    lo: &BigRational,
    hi: &BigRational,
    coords: &mut Vec<BigInt>,
    emit: &mut impl FnMut(&[BigInt]),
) {
    if level == 0 {
        if &partial >= lo {
            emit(coords);
        }
        return;
    }
    let j = level - 1;
    // center offset c_j = sum_{k > j} u_{jk} Y_k
    let mut center = BigRational::zero();
    for k in j + 1..m {
        if !upper[j][k].is_zero() {
            center += &upper[j][k] * BigRational::from(coords[k].clone());
        }
    }
    let rem = hi - &partial;
    if rem.is_negative() {
        return;
    }
    let d = &diag[j];
    // exact integer range: d (t + c)^2 <= rem
    let admissible = |t: &BigInt| -> bool {
        let lin = BigRational::from(t.clone()) + &center;
        d * &lin * &lin <= rem
    };
    // float hint for the endpoints, corrected by the exact predicate
    let center_f = center.to_f64().unwrap_or(0.0);
    let half_width = (rem.to_f64().unwrap_or(0.0).max(0.0) / d.to_f64().unwrap_or(1.0)).sqrt();
    let mut hi_t = BigInt::from((-center_f + half_width).round() as i64);
    let mut lo_t = BigInt::from((-center_f - half_width).round() as i64);
    while admissible(&(&hi_t + 1)) {
        hi_t += 1;
    }
    while !admissible(&hi_t) && hi_t >= lo_t {
        hi_t -= 1;
    }
    while admissible(&(&lo_t - 1)) {
        lo_t -= 1;
    }
    while !admissible(&lo_t) && lo_t <= hi_t {
        lo_t += 1;
    }

    let mut t = lo_t.clone();
    while t <= hi_t {
        let lin = BigRational::from(t.clone()) + &center;
        let contribution = d * &lin * &lin;
        if &contribution <= &rem {
            coords[j] = t.clone();
            let new_partial = &partial + &contribution;
            search(diag, upper, m, j, new_partial, lo, hi, coords, emit);
        }
        t += 1;
    }
    coords[j] = BigInt::zero();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn gi(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    #[test]
    fn identity_norm_five_has_48_vectors() {
        let q = ShellQuery::exact(SelfAdjointMatrix::identity(2), rat(5));
        let got = enumerate_shell(&q).unwrap();
        assert_eq!(got.len(), 48);
        // deterministic order: strictly increasing lex keys
        let keys: Vec<Vec<BigInt>> = got
            .iter()
            .map(|y| y.iter().flat_map(|z| [z.re().clone(), z.im().clone()]).collect())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn constraint_forces_first_coordinate_zero() {
        let q = ShellQuery::exact(SelfAdjointMatrix::identity(2), rat(1))
            .with_constraints(vec![vec![gi(1, 0), gi(0, 0)]]);
        let got = enumerate_shell(&q).unwrap();
        assert_eq!(got.len(), 4);
        for y in &got {
            assert!(y[0].is_zero());
            assert!(y[1].is_unit());
        }
    }

    #[test]
    fn negative_target_is_empty() {
        let q = ShellQuery::exact(SelfAdjointMatrix::identity(2), rat(-1));
        assert!(enumerate_shell(&q).unwrap().is_empty());
    }

    #[test]
    fn interval_zero_gives_origin() {
        let q = ShellQuery::interval(SelfAdjointMatrix::identity(2), rat(0), rat(0));
        let got = enumerate_interval(&q).unwrap();
        assert_eq!(got, vec![vec![gi(0, 0), gi(0, 0)]]);
    }

    #[test]
    fn interval_around_five_matches_exact_shell() {
        // [4.5, 5.5]: no Gaussian vector has non-integer norm
        let a = SelfAdjointMatrix::identity(2);
        let exact = enumerate_shell(&ShellQuery::exact(a.clone(), rat(5))).unwrap();
        let q = ShellQuery::interval(a, rat(9) / rat(2), rat(11) / rat(2));
        let got = enumerate_interval(&q).unwrap();
        assert_eq!(got, exact);
    }

    #[test]
    fn diag_one_five_shell_five_has_12_vectors() {
        let a = SelfAdjointMatrix::from_diag(&[rat(1), rat(5)]);
        let got = enumerate_shell(&ShellQuery::exact(a, rat(5))).unwrap();
        // (a, 0) with |a|^2 = 5 (8 vectors) and (0, b) with b a unit (4)
        assert_eq!(got.len(), 12);
    }

    #[test]
    fn dependent_constraints_rejected() {
        let q = ShellQuery::exact(SelfAdjointMatrix::identity(2), rat(1))
            .with_constraints(vec![vec![gi(1, 0), gi(0, 0)], vec![gi(2, 0), gi(0, 0)]]);
        assert!(matches!(enumerate_shell(&q), Err(Error::DependentConstraints)));
    }

    #[test]
    fn hermitian_form_shell() {
        // A = [[2, i], [-i, 1]] positive definite; compare against the naive box
        let a = crate::linalg::self_adjoint_from_int_pairs(&[&[(2, 0), (0, 1)], &[(0, -1), (1, 0)]])
            .unwrap();
        for t in 1..=12i64 {
            let fast = enumerate_shell(&ShellQuery::exact(a.clone(), rat(t))).unwrap();
            let mut naive = Vec::new();
            for re1 in -8i64..=8 {
                for im1 in -8i64..=8 {
                    for re2 in -8i64..=8 {
                        for im2 in -8i64..=8 {
                            let y = vec![gi(re1, im1), gi(re2, im2)];
                            if a.quad_int(&y) == rat(t) {
                                naive.push(y);
                            }
                        }
                    }
                }
            }
            assert_eq!(fast.len(), naive.len(), "t = {t}");
        }
    }
}
