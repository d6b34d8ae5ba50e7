//! Complete enumeration of the Hecke sets by column shells.
//!
//! Column j of a member scaled by m lies on the shell
//! (m gamma_j)* Q (m gamma_j) = |m|^2 |det|^(2/n) q_jj, so candidates come
//! from the shell enumerator; matrices are assembled depth first with the
//! pairwise Gram conditions pruning after every column placement, and a full
//! membership test runs at the leaves. The search is exhaustive: every
//! member's columns satisfy the shell equations, so no member is missed.
//!
//! The pair filter runs over den(Q) Q in Gaussian integers, with an i64/i128
//! fast path when magnitudes permit; finite-M pairs outside a conservative
//! integer bounding box are pruned outright and the boundary cases fall back
//! to an exact rational check, so completeness is never at stake.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{det_power, membership_test, CountQuery, DetPower, Tolerance};
use crate::error::Result;
use crate::gauss::{GaussianInt, GaussianRational};
use crate::linalg::GaussMatrix;
use crate::shell::{enumerate_shell, ShellQuery, ShellTarget};

/// Result of an S-set enumeration. `IrrationalDetPower` marks exact queries
/// that were decided symbolically (empty, no search ran).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnumOutcome {
    Exhaustive,
    IrrationalDetPower,
}

#[derive(Clone, Debug)]
pub struct SEnumeration {
    pub members: Vec<GaussMatrix>,
    pub outcome: EnumOutcome,
}

impl SEnumeration {
    pub fn count(&self) -> usize {
        self.members.len()
    }
}

/// The complete member list of S(Q, pi^nu, pi'^nu, M) or
/// S_m(Q, pi^nu, pi'^nu, oo), in deterministic order.
pub fn enumerate_s(query: &CountQuery) -> Result<SEnumeration> {
    let dp = det_power(&query.spec);
    if matches!(query.tolerance, Tolerance::Exact) && !dp.is_rational() {
        // gamma* Q gamma = |det|^(2/n) Q cannot hold with Q over Q(i)
        return Ok(SEnumeration { members: Vec::new(), outcome: EnumOutcome::IrrationalDetPower });
    }

    let n = query.spec.n;
    let m_norm = BigRational::from(query.denom.norm());

    // Candidate columns per index; equal diagonal targets share one
    // enumeration.
    let mut cache: HashMap<BigRational, Vec<Vec<GaussianInt>>> = HashMap::new();
    let mut candidates: Vec<Vec<Vec<GaussianInt>>> = Vec::with_capacity(n);
    for j in 0..n {
        let qjj = query.q.diag_entry(j);
        if let Some(hit) = cache.get(&qjj) {
            candidates.push(hit.clone());
            continue;
        }
        let target = match (&query.tolerance, &dp) {
            (Tolerance::Exact, DetPower::Rational(c)) => ShellTarget::Exact(c * &qjj * &m_norm),
            (Tolerance::Finite(m_tol), dp) => {
                let tau = query.spec.tolerance(*m_tol);
                let (alo, ahi) = dp.root_scalar().enclosure(96);
                let lo = (&alo * (&qjj - &tau) * &m_norm).max(BigRational::zero());
                let hi = &ahi * (&qjj + &tau) * &m_norm;
                ShellTarget::Interval(lo, hi)
            }
            (Tolerance::Exact, DetPower::Irrational { .. }) => unreachable!(),
        };
        let shell = ShellQuery { form: query.q.clone(), target, constraints: Vec::new() };
        let cands = enumerate_shell(&shell)?;
        cache.insert(qjj, cands.clone());
        candidates.push(cands);
    }

    let pruner = GramPruner::new(query, &dp, &m_norm);
    let packed: Vec<Vec<PackedColumn>> = candidates
        .iter()
        .map(|cands| cands.iter().map(|c| PackedColumn::new(c)).collect())
        .collect();
    let mut members = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    assemble(query, &candidates, &packed, &pruner, &mut chosen, &mut members)?;

    members.sort_by_key(GaussMatrix::lex_key);
    Ok(SEnumeration { members, outcome: EnumOutcome::Exhaustive })
}

fn assemble(
    query: &CountQuery,
    candidates: &[Vec<Vec<GaussianInt>>],
    packed: &[Vec<PackedColumn>],
    pruner: &GramPruner,
    chosen: &mut Vec<usize>,
    members: &mut Vec<GaussMatrix>,
) -> Result<()> {
    let n = query.spec.n;
    let k = chosen.len();
    if k == n {
        let rows: Vec<Vec<GaussianRational>> = (0..n)
            .map(|r| {
                chosen
                    .iter()
                    .enumerate()
                    .map(|(c, &idx)| GaussianRational::from_gauss(candidates[c][idx][r].clone()))
                    .collect()
            })
            .collect();
        let m_inv = GaussianRational::from_gauss(query.denom.clone()).inv()?;
        let gamma = GaussMatrix::from_rows(rows).scale(&m_inv);
        if membership_test(&gamma, query)? {
            members.push(gamma);
        }
        return Ok(());
    }
    'cand: for idx in 0..candidates[k].len() {
        for (j, &prev) in chosen.iter().enumerate() {
            if !pruner.pair_admissible(&packed[j][prev], &packed[k][idx], j, k) {
                continue 'cand;
            }
        }
        chosen.push(idx);
        assemble(query, candidates, packed, pruner, chosen, members)?;
        chosen.pop();
    }
    Ok(())
}

/// A candidate column in both exact and (when small enough) i64 form.
struct PackedColumn {
    exact: Vec<GaussianInt>,
    fast: Option<Vec<(i64, i64)>>,
}

impl PackedColumn {
    fn new(col: &[GaussianInt]) -> Self {
        Self { exact: col.to_vec(), fast: pack_gauss(col) }
    }
}

/// x* W y over Z[i] for an integral Hermitian W (row-major entries).
fn pair_int_exact(w: &[GaussianInt], n: usize, x: &[GaussianInt], y: &[GaussianInt]) -> GaussianInt {
    let mut acc = GaussianInt::zero();
    for r in 0..n {
        if x[r].is_zero() {
            continue;
        }
        let xc = x[r].conj();
        for c in 0..n {
            if y[c].is_zero() || w[r * n + c].is_zero() {
                continue;
            }
            acc = &acc + &(&(&xc * &w[r * n + c]) * &y[c]);
        }
    }
    acc
}

/// i128 pairing; magnitudes are prechecked, so the products cannot overflow.
fn pair_int_fast(w: &[(i64, i64)], n: usize, x: &[(i64, i64)], y: &[(i64, i64)]) -> (i128, i128) {
    let mut re = 0i128;
    let mut im = 0i128;
    for r in 0..n {
        let (xr, xi) = x[r];
        if xr == 0 && xi == 0 {
            continue;
        }
        for c in 0..n {
            let (wr, wi) = w[r * n + c];
            if wr == 0 && wi == 0 {
                continue;
            }
            let (yr, yi) = y[c];
            if yr == 0 && yi == 0 {
                continue;
            }
            // conj(x) * w * y
            let ar = xr as i128 * wr as i128 + xi as i128 * wi as i128;
            let ai = xr as i128 * wi as i128 - xi as i128 * wr as i128;
            re += ar * yr as i128 - ai * yi as i128;
            im += ar * yi as i128 + ai * yr as i128;
        }
    }
    (re, im)
}

/// Pairwise Gram-condition filter over W = den(Q) Q.
struct GramPruner {
    n: usize,
    w_exact: Vec<GaussianInt>,
    w_fast: Option<Vec<(i64, i64)>>,
    mode: PruneMode,
}

enum PruneMode {
    /// rhs per entry: G_j* W G_k must equal c N(m) W_jk exactly.
    Exact { rhs: Vec<GaussianInt>, rhs_fast: Option<Vec<(i128, i128)>> },
    /// Conservative integer boxes per entry plus exact quadratic fallback:
    /// s' = N(m) alpha ranges over [s_lo, s_hi], radius s' den(Q) tau.
    Finite {
        boxes: Vec<(BigInt, BigInt, BigInt, BigInt)>,
        boxes_fast: Option<Vec<(i128, i128, i128, i128)>>,
        s_lo: BigRational,
        s_hi: BigRational,
        den_tau: BigRational,
    },
}

impl GramPruner {
    fn new(query: &CountQuery, dp: &DetPower, m_norm: &BigRational) -> Self {
        let n = query.spec.n;
        let den = query.q.denominator_lcm();
        let den_rat = BigRational::from(den);
        let w_exact: Vec<GaussianInt> = (0..n)
            .flat_map(|r| {
                let den_rat = den_rat.clone();
                let q = &query.q;
                (0..n).map(move |c| {
                    q.entry(r, c)
                        .scale_rational(&den_rat)
                        .to_gauss_int()
                        .expect("den(Q) clears denominators")
                })
            })
            .collect();
        let w_fast = pack_gauss(&w_exact);

        let mode = match (&query.tolerance, dp) {
            (Tolerance::Exact, DetPower::Rational(c)) => {
                let scale = c * m_norm;
                debug_assert!(scale.is_integer());
                let scale_int = scale.to_integer();
                let rhs: Vec<GaussianInt> = w_exact
                    .iter()
                    .map(|w| w * &GaussianInt::new(scale_int.clone(), 0))
                    .collect();
                let rhs_fast = rhs
                    .iter()
                    .map(|z| Some((z.re().to_i128()?, z.im().to_i128()?)))
                    .collect::<Option<Vec<_>>>();
                PruneMode::Exact { rhs, rhs_fast }
            }
            (Tolerance::Finite(m_tol), dp) => {
                let tau = query.spec.tolerance(*m_tol);
                let (alo, ahi) = dp.root_scalar().enclosure(96);
                let s_lo = alo * m_norm;
                let s_hi = ahi * m_norm;
                let den_tau = &den_rat * &tau;
                let mut boxes = Vec::with_capacity(n * n);
                for w in &w_exact {
                    let wr = BigRational::from(w.re().clone());
                    let wi = BigRational::from(w.im().clone());
                    let (re_lo, re_hi) = interval_bounds(&wr, &den_tau, &s_lo, &s_hi);
                    let (im_lo, im_hi) = interval_bounds(&wi, &den_tau, &s_lo, &s_hi);
                    boxes.push((re_lo, re_hi, im_lo, im_hi));
                }
                let boxes_fast = boxes
                    .iter()
                    .map(|(a, b, c, d)| {
                        Some((a.to_i128()?, b.to_i128()?, c.to_i128()?, d.to_i128()?))
                    })
                    .collect::<Option<Vec<_>>>();
                PruneMode::Finite { boxes, boxes_fast, s_lo, s_hi, den_tau }
            }
            (Tolerance::Exact, DetPower::Irrational { .. }) => unreachable!(),
        };
        Self { n, w_exact, w_fast, mode }
    }

    fn pair_admissible(
        &self,
        col_j: &PackedColumn,
        col_k: &PackedColumn,
        j: usize,
        k: usize,
    ) -> bool {
        let idx = j * self.n + k;
        if let (Some(w), Some(x), Some(y)) = (&self.w_fast, &col_j.fast, &col_k.fast) {
            let (re, im) = pair_int_fast(w, self.n, x, y);
            match &self.mode {
                PruneMode::Exact { rhs_fast: Some(rhs), .. } => {
                    return (re, im) == rhs[idx];
                }
                PruneMode::Finite { boxes_fast: Some(boxes), .. } => {
                    let (re_lo, re_hi, im_lo, im_hi) = boxes[idx];
                    if re < re_lo || re > re_hi || im < im_lo || im > im_hi {
                        return false;
                    }
                    return self.finite_quadratic_keep(&BigInt::from(re), &BigInt::from(im), idx);
                }
                _ => {}
            }
        }
        let w = pair_int_exact(&self.w_exact, self.n, &col_j.exact, &col_k.exact);
        match &self.mode {
            PruneMode::Exact { rhs, .. } => w == rhs[idx],
            PruneMode::Finite { boxes, .. } => {
                let (re_lo, re_hi, im_lo, im_hi) = &boxes[idx];
                if w.re() < re_lo || w.re() > re_hi || w.im() < im_lo || w.im() > im_hi {
                    return false;
                }
                self.finite_quadratic_keep(w.re(), w.im(), idx)
            }
        }
    }

    /// Keep unless min over s' in [s_lo, s_hi] of
    /// |w' - s' W_jk|^2 - (s' den tau)^2 is provably positive.
    fn finite_quadratic_keep(&self, w_re: &BigInt, w_im: &BigInt, idx: usize) -> bool {
        let PruneMode::Finite { s_lo, s_hi, den_tau, .. } = &self.mode else { unreachable!() };
        let q = &self.w_exact[idx];
        let a = BigRational::from(q.norm()) - den_tau * den_tau;
        let b = BigRational::from_integer((-2).into())
            * BigRational::from(w_re * q.re() + w_im * q.im());
        let c = BigRational::from(w_re * w_re + w_im * w_im);
        let lin_min = (&b * s_lo).min(&b * s_hi);
        let quad_min = (&a * s_lo * s_lo).min(&a * s_hi * s_hi);
        !(c + lin_min + quad_min).is_positive()
    }
}

fn pack_gauss(v: &[GaussianInt]) -> Option<Vec<(i64, i64)>> {
    v.iter()
        .map(|z| Some((z.re().to_i64()?, z.im().to_i64()?)))
        .collect::<Option<Vec<_>>>()
        .filter(|v: &Vec<(i64, i64)>| {
            v.iter().all(|&(a, b)| a.abs() < (1 << 30) && b.abs() < (1 << 30))
        })
}

/// Floor/ceil bounds of { s (w ± den_tau) : s in [s_lo, s_hi] }.
fn interval_bounds(
    center: &BigRational,
    den_tau: &BigRational,
    s_lo: &BigRational,
    s_hi: &BigRational,
) -> (BigInt, BigInt) {
    let lo_edge = center - den_tau;
    let hi_edge = center + den_tau;
    let corners = [s_lo * &lo_edge, s_lo * &hi_edge, s_hi * &lo_edge, s_hi * &hi_edge];
    let min = corners.iter().min().unwrap().floor().to_integer();
    let max = corners.iter().max().unwrap().ceil().to_integer();
    (min, max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::SplitPrime;
    use crate::hecke::HeckeCosetSpec;
    use crate::linalg::SelfAdjointMatrix;
    use num_bigint::BigInt;

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn pi5() -> SplitPrime {
        SplitPrime::above(5u32).unwrap()
    }

    fn pi13() -> SplitPrime {
        SplitPrime::above(13u32).unwrap()
    }

    #[test]
    fn identity_one_prime_is_empty() {
        // unitarity would force pi to divide every entry, contradicting the
        // divisor profile (1, pi^2)
        let spec = HeckeCosetSpec::new(pi5(), pi5(), 1, 2).unwrap();
        let query = CountQuery::exact(SelfAdjointMatrix::identity(2), spec).unwrap();
        let out = enumerate_s(&query).unwrap();
        assert_eq!(out.outcome, EnumOutcome::Exhaustive);
        assert!(out.members.is_empty());
    }

    #[test]
    fn diag_one_five_has_exactly_four_members() {
        let spec = HeckeCosetSpec::new(pi5(), pi5(), 1, 2).unwrap();
        let q = SelfAdjointMatrix::from_diag(&[rat(1), rat(5)]);
        let query = CountQuery::exact(q, spec).unwrap();
        let out = enumerate_s(&query).unwrap();
        assert_eq!(out.count(), 4);
        // members are antidiagonal [[0, c], [b, 0]] with b a unit and
        // c b = -(3+4i)
        let target = GaussianInt::new(-3, -4);
        for g in &out.members {
            assert!(g[(0, 0)].is_zero() && g[(1, 1)].is_zero());
            let b = g[(1, 0)].num().clone();
            let c = g[(0, 1)].num().clone();
            assert!(b.is_unit());
            assert_eq!(&c * &b, target);
        }
    }

    #[test]
    fn two_primes_nu1_symbolically_empty() {
        let spec = HeckeCosetSpec::new(pi5(), pi13(), 1, 2).unwrap();
        let query = CountQuery::exact(SelfAdjointMatrix::identity(2), spec).unwrap();
        let out = enumerate_s(&query).unwrap();
        assert_eq!(out.outcome, EnumOutcome::IrrationalDetPower);
        assert!(out.members.is_empty());
    }

    #[test]
    fn scaling_invariance_exact_mode() {
        // S(cQ) = S(Q): the defining equation is homogeneous in Q
        let spec = HeckeCosetSpec::new(pi5(), pi5(), 1, 2).unwrap();
        let q = SelfAdjointMatrix::from_diag(&[rat(1), rat(5)]);
        let scaled = q.scale_rational(&BigRational::new(BigInt::from(7), BigInt::from(3)));
        let out1 = enumerate_s(&CountQuery::exact(q, spec.clone()).unwrap()).unwrap();
        let out2 = enumerate_s(&CountQuery::exact(scaled, spec).unwrap()).unwrap();
        assert_eq!(out1.members, out2.members);
    }

    #[test]
    fn finite_tolerance_contains_exact_members() {
        // the finite-M set contains the exact set for every M
        let spec = HeckeCosetSpec::new(pi5(), pi5(), 1, 2).unwrap();
        let q = SelfAdjointMatrix::from_diag(&[rat(1), rat(5)]);
        let exact = enumerate_s(&CountQuery::exact(q.clone(), spec.clone()).unwrap()).unwrap();
        let finite = enumerate_s(
            &CountQuery::new(q, spec, Tolerance::Finite(3), GaussianInt::one()).unwrap(),
        )
        .unwrap();
        for member in &exact.members {
            assert!(finite.members.contains(member));
        }
    }
}
