//! Linear operators on the real n^2-dimensional space of self-adjoint
//! matrices, their kernels, Frobenius projections, and bounded-denominator
//! rational points in envelopes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{form_coordinates, form_from_coordinates, frobenius_inner, Envelope};
use crate::error::{Error, Result};
use crate::hecke::DetPower;
use crate::linalg::{GaussMatrix, QMatrix, SelfAdjointMatrix};

/// A linear map on S_n in the canonical coordinates; rows/cols are n^2.
#[derive(Clone, Debug)]
pub struct FormOperator {
    n: usize,
    mat: QMatrix,
}

impl FormOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.mat
    }

    pub fn apply(&self, a: &SelfAdjointMatrix) -> SelfAdjointMatrix {
        let out = self.mat.mul_vec(&form_coordinates(a));
        form_from_coordinates(self.n, &out)
    }

    pub fn is_zero(&self) -> bool {
        (0..self.mat.rows()).all(|r| self.mat.row(r).iter().all(Zero::is_zero))
    }
}

/// The operator A -> gamma* A gamma - |det gamma|^(2/n) A, defined over Q
/// exactly when the determinant power is rational; irrational powers are
/// rejected with a distinct code (such cosets are excluded upstream by the
/// rationality test).
pub fn b_gamma_operator(gamma: &GaussMatrix, det_power: &DetPower) -> Result<FormOperator> {
    let Some(c) = det_power.rational() else {
        return Err(Error::IrrationalDetPower);
    };
    let n = gamma.rows();
    assert_eq!(n, gamma.cols());
    let dim = n * n;
    let mut mat = QMatrix::zero(dim, dim);
    let adj = gamma.adjoint();
    for (col, basis) in standard_basis(n).iter().enumerate() {
        let transformed = SelfAdjointMatrix::new(adj.mul(basis.matrix()).mul(gamma))
            .expect("gamma* A gamma is self-adjoint");
        let image = transformed.sub(&basis.scale_rational(c));
        for (row, v) in form_coordinates(&image).into_iter().enumerate() {
            mat[(row, col)] = v;
        }
    }
    Ok(FormOperator { n, mat })
}

/// The canonical basis of S_n as matrices, in coordinate order.
pub fn standard_basis(n: usize) -> Vec<SelfAdjointMatrix> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n * n {
        let mut coords = vec![BigRational::zero(); n * n];
        coords[i] = BigRational::one();
        out.push(form_from_coordinates(n, &coords));
    }
    out
}

/// An exact rational basis of a subspace of S_n.
#[derive(Clone, Debug, Serialize)]
pub struct SubspaceBasis {
    pub n: usize,
    pub mats: Vec<SelfAdjointMatrix>,
}

impl SubspaceBasis {
    pub fn full_space(n: usize) -> Self {
        Self { n, mats: standard_basis(n) }
    }

    pub fn dim(&self) -> usize {
        self.mats.len()
    }

    /// Exact span membership.
    pub fn contains(&self, a: &SelfAdjointMatrix) -> bool {
        if self.mats.is_empty() {
            return form_coordinates(a).iter().all(Zero::is_zero);
        }
        let mut rows: Vec<Vec<BigRational>> =
            self.mats.iter().map(form_coordinates).collect();
        let rank_h = QMatrix::from_rows(rows.clone()).rank();
        rows.push(form_coordinates(a));
        QMatrix::from_rows(rows).rank() == rank_h
    }

    pub fn same_span(&self, other: &Self) -> bool {
        self.dim() == other.dim() && other.mats.iter().all(|m| self.contains(m))
    }
}

/// Intersection of operator kernels, as a canonical exact basis. The empty
/// list yields all of S_n; adding operators never increases the dimension.
pub fn kernel_intersection(ops: &[FormOperator]) -> SubspaceBasis {
    let Some(first) = ops.first() else {
        // dimension zero is degenerate here; the callers always have n >= 2
        return SubspaceBasis::full_space(2);
    };
    kernel_intersection_n(first.n(), ops)
}

pub fn kernel_intersection_n(n: usize, ops: &[FormOperator]) -> SubspaceBasis {
    if ops.is_empty() {
        return SubspaceBasis::full_space(n);
    }
    let dim = n * n;
    let mut stacked = QMatrix::zero(dim * ops.len(), dim);
    for (i, op) in ops.iter().enumerate() {
        assert_eq!(op.n(), n, "operator dimension mismatch");
        for r in 0..dim {
            for c in 0..dim {
                stacked[(i * dim + r, c)] = op.matrix()[(r, c)].clone();
            }
        }
    }
    let kernel = stacked.kernel();
    let mats = kernel.iter().map(|v| form_from_coordinates(n, v)).collect();
    SubspaceBasis { n, mats }
}

/// Distance data from q to span(h) under the Frobenius trace form.
#[derive(Clone, Debug, Serialize)]
pub struct SubspaceDistance {
    #[serde(with = "crate::serial::rational_string")]
    pub frobenius_sq: BigRational,
    #[serde(with = "crate::serial::rational_string")]
    pub entrywise_max_sq: BigRational,
    #[serde(skip)]
    pub projection: SelfAdjointMatrix,
}

impl SubspaceDistance {
    pub fn frobenius(&self) -> f64 {
        self.frobenius_sq.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    pub fn entrywise_max(&self) -> f64 {
        self.entrywise_max_sq.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

/// Frobenius-orthogonal projection of q onto span(h); the squared distance
/// is exact. h = {} projects to zero, so the distance is the norm of q.
pub fn distance_to_subspace(q: &SelfAdjointMatrix, h: &SubspaceBasis) -> SubspaceDistance {
    let projection = project_onto(q, h);
    let residual = q.sub(&projection);
    let frobenius_sq = frobenius_inner(&residual, &residual);
    let entrywise_max_sq = residual.max_entry_norm_sq();
    SubspaceDistance { frobenius_sq, entrywise_max_sq, projection }
}

/// Frobenius projection coefficients of q in the basis h.
fn projection_coefficients(q: &SelfAdjointMatrix, h: &SubspaceBasis) -> Vec<BigRational> {
    let k = h.mats.len();
    let mut gram = QMatrix::zero(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = frobenius_inner(&h.mats[i], &h.mats[j]);
        }
    }
    let rhs: Vec<BigRational> = h.mats.iter().map(|m| frobenius_inner(q, m)).collect();
    gram.solve(&rhs).expect("basis vectors are independent")
}

fn combine(n: usize, coeffs: &[BigRational], h: &SubspaceBasis) -> SelfAdjointMatrix {
    let mut coords = vec![BigRational::zero(); n * n];
    for (c, m) in coeffs.iter().zip(&h.mats) {
        for (slot, v) in coords.iter_mut().zip(form_coordinates(m)) {
            *slot += c * &v;
        }
    }
    form_from_coordinates(n, &coords)
}

fn project_onto(q: &SelfAdjointMatrix, h: &SubspaceBasis) -> SelfAdjointMatrix {
    let n = q.n();
    if h.mats.is_empty() {
        return SelfAdjointMatrix::from_diag(&vec![BigRational::zero(); n]);
    }
    combine(n, &projection_coefficients(q, h), h)
}

/// Best rational approximation to x with denominator at most max_den, by the
/// continued fraction convergent/semiconvergent rule; ties prefer the
/// convergent (smaller denominator).
pub fn best_rational_approx(x: &BigRational, max_den: &BigInt) -> BigRational {
    assert!(max_den >= &BigInt::one());
    if x.denom() <= max_den {
        return x.clone();
    }
    let mut p0 = BigInt::one();
    let mut q0 = BigInt::zero();
    let mut a = x.floor().to_integer();
    let mut p1 = a.clone();
    let mut q1 = BigInt::one();
    let mut frac = x - BigRational::from_integer(a);
    loop {
        debug_assert!(!frac.is_zero(), "exact value has denominator above the bound");
        let inv = frac.recip();
        a = inv.floor().to_integer();
        frac = inv - BigRational::from_integer(a.clone());
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > *max_den {
            let t = (max_den - &q0) / &q1;
            let semi = BigRational::new(&t * &p1 + &p0, &t * &q1 + &q0);
            let conv = BigRational::new(p1, q1);
            let d_semi = (x - &semi).abs();
            let d_conv = (x - &conv).abs();
            return if d_semi < d_conv { semi } else { conv };
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
}

/// A matrix in span(h) with entry denominators at most denom_bound, positive
/// definite with spectrum certified strictly inside env.
///
/// The seed is projected onto span(h) and its basis coefficients rounded at
/// denominators d = denom_bound, denom_bound - 1, ..., 1 (finest first, so an
/// exactly representable projection is returned unchanged); the first
/// candidate whose entries obey the bound and whose spectrum certifies wins.
/// When every d fails the caller escalates the bound.
pub fn rational_point_in_envelope(
    h: &SubspaceBasis,
    env: &Envelope,
    denom_bound: u64,
    seed: &SelfAdjointMatrix,
) -> Result<SelfAdjointMatrix> {
    if h.mats.is_empty() {
        return Err(Error::Precondition("subspace must be nonzero".into()));
    }
    let coeffs = projection_coefficients(seed, h);
    let mut d = denom_bound.max(1);
    loop {
        let bound = BigInt::from(d);
        let rounded: Vec<BigRational> =
            coeffs.iter().map(|c| best_rational_approx(c, &bound)).collect();
        let candidate = combine(seed.n(), &rounded, h);
        let denom_ok = candidate
            .matrix()
            .entries()
            .iter()
            .all(|e| e.den() <= &BigInt::from(denom_bound));
        if denom_ok && env.contains_strict(&candidate) {
            return Ok(candidate);
        }
        if d == 1 {
            return Err(Error::NoPointFound(denom_bound));
        }
        d -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{GaussianInt, GaussianRational, SplitPrime};
    use crate::hecke::{det_power, HeckeCosetSpec};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn diag_gamma(a: GaussianInt, b: GaussianInt) -> GaussMatrix {
        GaussMatrix::from_rows(vec![
            vec![GaussianRational::from_gauss(a), GaussianRational::zero()],
            vec![GaussianRational::zero(), GaussianRational::from_gauss(b)],
        ])
    }

    fn dp5() -> DetPower {
        let pi = SplitPrime::above(5u32).unwrap();
        det_power(&HeckeCosetSpec::new(pi.clone(), pi, 1, 2).unwrap())
    }

    #[test]
    fn identity_gives_zero_operator() {
        let op = b_gamma_operator(&GaussMatrix::identity(2), &DetPower::Rational(rat(1, 1)))
            .unwrap();
        assert!(op.is_zero());
        let basis = kernel_intersection(&[op]);
        assert_eq!(basis.dim(), 4);
    }

    #[test]
    fn scalar_gamma_gives_zero_operator() {
        // gamma = diag(2+i, 2+i), |det|^(2/n) = 5: gamma* A gamma = 5A
        let g = diag_gamma(GaussianInt::new(2, 1), GaussianInt::new(2, 1));
        let op = b_gamma_operator(&g, &dp5()).unwrap();
        assert!(op.is_zero());
    }

    #[test]
    fn diag_coset_gamma_kernel_is_zero() {
        // gamma = diag(1, (2+i)^2) with det power 5: the entrywise
        // eigenvalue equations force A = 0
        let g = diag_gamma(GaussianInt::one(), GaussianInt::new(3, 4));
        let op = b_gamma_operator(&g, &dp5()).unwrap();
        // B(E_11) = 1 - 5 = -4 on the (0,0) slot
        let e11 = &standard_basis(2)[0];
        let image = op.apply(e11);
        assert_eq!(image.diag_entry(0), rat(-4, 1));
        let basis = kernel_intersection(&[op]);
        assert_eq!(basis.dim(), 0);
    }

    #[test]
    fn irrational_power_rejected() {
        let pi = SplitPrime::above(5u32).unwrap();
        let pi2 = SplitPrime::above(13u32).unwrap();
        let dp = det_power(&HeckeCosetSpec::new(pi, pi2, 1, 2).unwrap());
        let g = GaussMatrix::identity(2);
        assert!(matches!(
            b_gamma_operator(&g, &dp),
            Err(Error::IrrationalDetPower)
        ));
    }

    #[test]
    fn kernel_membership_iff_annihilated() {
        let g = diag_gamma(GaussianInt::new(2, 1), GaussianInt::new(1, 2));
        // |det gamma|^2 = 25, power = 5
        let op = b_gamma_operator(&g, &dp5()).unwrap();
        let basis = kernel_intersection(std::slice::from_ref(&op));
        for m in &basis.mats {
            assert!(op.apply(m).matrix().entries().iter().all(|e| e.is_zero()));
        }
        // a random non-member maps to nonzero
        let outside = standard_basis(2)
            .into_iter()
            .find(|b| !basis.contains(b))
            .expect("kernel is proper");
        assert!(!op.apply(&outside).matrix().entries().iter().all(|e| e.is_zero()));
    }

    #[test]
    fn distance_examples() {
        let h = SubspaceBasis {
            n: 2,
            mats: vec![SelfAdjointMatrix::from_diag(&[rat(1, 1), rat(0, 1)])],
        };
        let q = SelfAdjointMatrix::from_diag(&[rat(2, 1), rat(1, 1)]);
        let d = distance_to_subspace(&q, &h);
        assert_eq!(d.frobenius_sq, rat(1, 1));
        assert_eq!(d.frobenius(), 1.0);
        // member of the span has distance zero
        let inside = SelfAdjointMatrix::from_diag(&[rat(7, 2), rat(0, 1)]);
        assert!(distance_to_subspace(&inside, &h).frobenius_sq.is_zero());
        // empty basis: distance is the Frobenius norm
        let empty = SubspaceBasis { n: 2, mats: vec![] };
        let d = distance_to_subspace(&q, &empty);
        assert_eq!(d.frobenius_sq, rat(5, 1));
    }

    #[test]
    fn best_approx_examples() {
        let x = rat(3, 2);
        assert_eq!(best_rational_approx(&x, &BigInt::from(2)), rat(3, 2));
        assert_eq!(best_rational_approx(&x, &BigInt::one()), rat(1, 1));
        // pi-ish: 355/113 from a finer value
        let pi_approx = rat(3_141_592_653, 1_000_000_000);
        assert_eq!(
            best_rational_approx(&pi_approx, &BigInt::from(400)),
            rat(355, 113)
        );
        let neg = rat(-7, 3);
        let approx = best_rational_approx(&neg, &BigInt::from(2));
        assert!(approx == rat(-5, 2) || approx == rat(-2, 1));
        assert_eq!(best_rational_approx(&neg, &BigInt::from(3)), neg);
    }

    #[test]
    fn rational_point_examples() {
        let env = Envelope::new(rat(1, 2), rat(2, 1), 2).unwrap();
        // full space, identity seed: identity
        let h = SubspaceBasis::full_space(2);
        let got = rational_point_in_envelope(&h, &env, 8, &SelfAdjointMatrix::identity(2))
            .unwrap();
        assert_eq!(got, SelfAdjointMatrix::identity(2));
        // span{identity}, seed diag(2,1): projection coefficient 3/2
        let h = SubspaceBasis { n: 2, mats: vec![SelfAdjointMatrix::identity(2)] };
        let seed = SelfAdjointMatrix::from_diag(&[rat(2, 1), rat(1, 1)]);
        let got = rational_point_in_envelope(&h, &env, 8, &seed).unwrap();
        assert_eq!(got, SelfAdjointMatrix::from_diag(&[rat(3, 2), rat(3, 2)]));
        // seed already in span and envelope
        let h = SubspaceBasis {
            n: 2,
            mats: vec![
                SelfAdjointMatrix::from_diag(&[rat(1, 1), rat(0, 1)]),
                SelfAdjointMatrix::from_diag(&[rat(0, 1), rat(1, 1)]),
            ],
        };
        let seed = SelfAdjointMatrix::from_diag(&[rat(2, 3), rat(5, 4)]);
        let got = rational_point_in_envelope(&h, &env, 8, &seed).unwrap();
        assert_eq!(got, seed);
        // impossible envelope: no point at any denominator
        let narrow = Envelope::new(rat(10, 1), rat(11, 1), 2).unwrap();
        assert!(matches!(
            rational_point_in_envelope(&h, &narrow, 4, &seed),
            Err(Error::NoPointFound(4))
        ));
    }
}
