//! The staged pipeline: harvest finite-M members over growing prime windows,
//! stabilize the kernel chains, exchange the input form for a rational point
//! Q2 of the stabilized subspace, diagonalize to Q3, and verify the set-level
//! counting chain through the U-conjugation.

use std::collections::HashSet;

use num_bigint::BigInt;
use serde::Serialize;

use super::{
    b_gamma_operator, distance_to_subspace, envelopes, kernel_intersection_n,
    rational_point_in_envelope, validate_m, Envelope, FormOperator, SubspaceBasis,
};
use crate::error::{Error, Result};
use crate::gauss::{GaussianInt, GaussianRational, PiValuation, SplitPrime};
use crate::hecke::{
    det_power, enumerate_s, membership_test, CountQuery, HeckeCosetSpec, Tolerance,
};
use crate::linalg::{gram_schmidt_diagonalize, max_complexity, GaussMatrix, SelfAdjointMatrix};
use crate::report::CheckResult;

/// Endgame parameters. Real-scale window schedules overflow immediately, so
/// explicit toy windows drive both stabilization loops while preserving the
/// loop structure and stopping rules; `allow_toy_m` waives the validated-M
/// requirement for such runs.
#[derive(Clone, Debug, Serialize)]
pub struct EndgameConfig {
    pub d: u32,
    pub e: u32,
    /// The finite tolerance exponent M.
    pub m_exponent: u32,
    pub t: u32,
    pub l0: u64,
    pub omega_prime: Envelope,
    /// Norm-window slices (c1, c2) consumed by the first stabilization loop;
    /// the cumulative union over consumed slices forms each H_j window.
    pub stage1_windows: Vec<(u64, u64)>,
    /// Slices for the second loop.
    pub stage2_windows: Vec<(u64, u64)>,
    pub denom_bound: u64,
    pub denom_ceiling: u64,
    pub allow_toy_m: bool,
}

impl EndgameConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.d < 2 || self.e < 2 {
            return Err(Error::InvalidConfig("need D >= 2 and E >= 2".into()));
        }
        let d_pow = BigInt::from(self.d).pow(n as u32 * n as u32 + 1);
        if BigInt::from(self.e) <= d_pow {
            return Err(Error::InvalidConfig(format!(
                "need E > D^(n^2+1) = {d_pow}"
            )));
        }
        if self.t < 1 || self.l0 < 2 {
            return Err(Error::InvalidConfig("need T >= 1 and L0 >= 2".into()));
        }
        if self.omega_prime.n != n {
            return Err(Error::InvalidConfig("envelope dimension mismatch".into()));
        }
        if self.denom_bound < 1 || self.denom_ceiling < self.denom_bound {
            return Err(Error::InvalidConfig("denominator bounds out of order".into()));
        }
        if !self.allow_toy_m && !validate_m(n, self.t, self.d, self.e, self.m_exponent as u64) {
            return Err(Error::InvalidConfig(format!(
                "M = {} fails the validated threshold; set the toy override to run anyway",
                self.m_exponent
            )));
        }
        if self.stage1_windows.is_empty() || self.stage2_windows.is_empty() {
            return Err(Error::InvalidConfig(
                "toy window slices are required for both stages".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageTrace {
    /// 1-based H_j index (stage 1) or 0-based H'_k index (stage 2) at which
    /// the chain stabilized.
    pub stabilized_index: usize,
    pub dims: Vec<usize>,
    pub harvested_members: usize,
    /// Members of cells whose determinant power is irrational; they carry no
    /// rational operator and are excluded from the kernels.
    pub excluded_irrational: usize,
    pub windows_used: Vec<(u64, u64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellChainReport {
    pub pi: String,
    pub pi2: String,
    pub nu: u32,
    pub det_power_rational: bool,
    pub count_finite_m: usize,
    pub count_q2_exact: usize,
    pub count_q3_m: usize,
    pub inclusion_ok: bool,
    pub injection_ok: bool,
    pub chain_ok: bool,
    pub skipped_m_divisor: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexityEntry {
    pub stage: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineTrace {
    pub q: SelfAdjointMatrix,
    pub primes: Vec<String>,
    pub config: EndgameConfig,
    pub stage1: StageTrace,
    pub stage2: StageTrace,
    pub q1: Option<SelfAdjointMatrix>,
    pub q2: SelfAdjointMatrix,
    pub u: GaussMatrix,
    pub u_inv: GaussMatrix,
    pub q3: SelfAdjointMatrix,
    pub m: String,
    pub cells: Vec<CellChainReport>,
    pub complexity_log: Vec<ComplexityEntry>,
    pub checks: Vec<CheckResult>,
    pub hard_pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct CellKey {
    pi: SplitPrime,
    pi2: SplitPrime,
    nu: u32,
}

struct HarvestedCell {
    key: CellKey,
    members: Vec<GaussMatrix>,
    det_rational: bool,
}

/// One stabilization loop: consume window slices until two consecutive
/// kernel intersections agree.
struct StageState {
    primes_seen: Vec<SplitPrime>,
    pairs_done: HashSet<CellKey>,
    ops: Vec<FormOperator>,
    cells: Vec<HarvestedCell>,
    dims: Vec<usize>,
    bases: Vec<SubspaceBasis>,
    windows_used: Vec<(u64, u64)>,
    excluded: usize,
}

impl StageState {
    fn new() -> Self {
        Self {
            primes_seen: Vec::new(),
            pairs_done: HashSet::new(),
            ops: Vec::new(),
            cells: Vec::new(),
            dims: Vec::new(),
            bases: Vec::new(),
            windows_used: Vec::new(),
            excluded: 0,
        }
    }

    /// Adds one slice: primes of the pool whose norm falls in the window,
    /// then every not-yet-harvested ordered pair over the cumulative set.
    fn consume_slice(
        &mut self,
        q: &SelfAdjointMatrix,
        pool: &[SplitPrime],
        window: (u64, u64),
        nu_max: u32,
        m_exponent: u32,
    ) -> Result<()> {
        self.windows_used.push(window);
        for p in pool {
            let norm = p.p_u64();
            if norm >= window.0 && norm < window.1 && !self.primes_seen.contains(p) {
                self.primes_seen.push(p.clone());
            }
        }
        let n = q.n();
        let snapshot = self.primes_seen.clone();
        for pi in &snapshot {
            for pi2 in &snapshot {
                for nu in 1..=nu_max {
                    let key = CellKey { pi: pi.clone(), pi2: pi2.clone(), nu };
                    if !self.pairs_done.insert(key.clone()) {
                        continue;
                    }
                    let spec = HeckeCosetSpec::new(pi.clone(), pi2.clone(), nu, n)?;
                    let dp = det_power(&spec);
                    let query = CountQuery::new(
                        q.clone(),
                        spec,
                        Tolerance::Finite(m_exponent),
                        GaussianInt::one(),
                    )?;
                    let out = enumerate_s(&query)?;
                    if dp.is_rational() {
                        for gamma in &out.members {
                            self.ops.push(b_gamma_operator(gamma, &dp)?);
                        }
                    } else {
                        self.excluded += out.members.len();
                    }
                    self.cells.push(HarvestedCell {
                        key,
                        members: out.members,
                        det_rational: dp.is_rational(),
                    });
                }
            }
        }
        self.bases.push(kernel_intersection_n(n, &self.ops));
        self.dims.push(self.bases.last().unwrap().dim());
        Ok(())
    }

    fn stabilized(&self) -> bool {
        let k = self.bases.len();
        k >= 2 && self.bases[k - 2].same_span(&self.bases[k - 1])
    }

    fn harvested_members(&self) -> usize {
        self.cells.iter().map(|c| c.members.len()).sum()
    }
}

fn run_stage(
    q: &SelfAdjointMatrix,
    pool: &[SplitPrime],
    windows: &[(u64, u64)],
    max_rounds: usize,
    m_exponent: u32,
) -> Result<StageState> {
    let n = q.n();
    let mut state = StageState::new();
    for round in 0..max_rounds {
        let Some(&window) = windows.get(round) else {
            return Err(Error::WindowExhaustion(windows.len()));
        };
        state.consume_slice(q, pool, window, n as u32, m_exponent)?;
        if state.stabilized() {
            return Ok(state);
        }
    }
    Err(Error::WindowExhaustion(max_rounds))
}

/// The full exchange pipeline on a rational positive definite form inside
/// Omega'.
pub fn run_pipeline(
    q: &SelfAdjointMatrix,
    cfg: &EndgameConfig,
    primes: &[SplitPrime],
) -> Result<PipelineTrace> {
    let n = q.n();
    cfg.validate(n)?;
    q.require_positive_definite()?;
    if !cfg.omega_prime.contains(q) {
        return Err(Error::Precondition("q must lie inside Omega'".into()));
    }
    let (omega1, omega2) = envelopes(&cfg.omega_prime);
    let mut checks: Vec<CheckResult> = Vec::new();
    let mut complexity_log = vec![ComplexityEntry {
        stage: "q".into(),
        value: max_complexity(q.matrix().entries()),
    }];

    // Stage 1: stabilize H_j over cumulative windows; the smallest j with
    // H_j = H_{j+1} is bases.len() - 1 in 1-based H numbering.
    let stage1 = run_stage(q, primes, &cfg.stage1_windows, n * n + 2, cfg.m_exponent)?;
    let h1 = stage1.bases.last().expect("at least two bases").clone();
    let stabilized_j = stage1.bases.len() - 1;

    let dist1 = distance_to_subspace(q, &h1);
    checks.push(CheckResult::soft(
        "stage1_distance",
        dist1.frobenius() <= cfg.t as f64 / cfg.l0 as f64,
        format!(
            "dist(q, H_{stabilized_j}) = {:.6} (Frobenius), {:.6} (entrywise max); budget T/L0 = {}",
            dist1.frobenius(),
            dist1.entrywise_max(),
            cfg.t as f64 / cfg.l0 as f64
        ),
    ));

    // Q1 materializes only when every harvested coset had a rational
    // determinant power; otherwise the exclusion is recorded and the
    // pipeline proceeds to the rational stage.
    let q1 = if stage1.excluded == 0 && h1.dim() > 0 {
        escalating_point(&h1, &omega1, cfg, q).ok()
    } else {
        None
    };
    checks.push(CheckResult::soft(
        "q1_materialized",
        q1.is_some() || stage1.excluded > 0,
        format!(
            "{} irrational-cell members excluded; q1 {}",
            stage1.excluded,
            if q1.is_some() { "found" } else { "not materialized" }
        ),
    ));
    if let Some(q1m) = &q1 {
        complexity_log.push(ComplexityEntry {
            stage: "q1".into(),
            value: max_complexity(q1m.matrix().entries()),
        });
    }

    // Stage 2: fresh windows, same loop; mixed cells should harvest empty
    // here (the stage-1 conclusion at real scale), checked softly.
    let stage2 = run_stage(q, primes, &cfg.stage2_windows, n * n + 2, cfg.m_exponent)?;
    let h2 = stage2.bases.last().expect("at least two bases").clone();
    let stabilized_k = stage2.bases.len() - 2; // 0-based H'_k with H'_k = H'_{k+1}
    checks.push(CheckResult::soft(
        "mixed_cells_empty",
        stage2.excluded == 0,
        format!("{} members found in irrational-power cells", stage2.excluded),
    ));

    let q2 = escalating_point(&h2, &omega1, cfg, q)?;
    complexity_log.push(ComplexityEntry {
        stage: "q2".into(),
        value: max_complexity(q2.matrix().entries()),
    });

    // Stage 3: diagonalize and fix the conjugation denominator.
    let gs = gram_schmidt_diagonalize(&q2)?;
    let m_den = gs.u_inv.denominator_lcm() * gs.u.denominator_lcm();
    let m_int = GaussianInt::new(m_den.clone(), 0);
    debug_assert_eq!(q2.congruence(&gs.u), gs.q3);
    checks.push(CheckResult::hard(
        "q3_in_omega2",
        omega2.contains(&gs.q3),
        format!("q3 spectrum within [{}, {}]", omega2.lo, omega2.hi),
    ));
    for (stage, mat) in [("u", &gs.u), ("u_inv", &gs.u_inv)] {
        complexity_log.push(ComplexityEntry {
            stage: stage.into(),
            value: max_complexity(mat.entries()),
        });
    }
    complexity_log.push(ComplexityEntry {
        stage: "q3".into(),
        value: max_complexity(gs.q3.matrix().entries()),
    });
    complexity_log.push(ComplexityEntry {
        stage: "m".into(),
        value: crate::linalg::complexity(&GaussianRational::from_gauss(m_int.clone())),
    });

    // Soft growth log: outputs against comp(q)^T.
    let comp_in = complexity_log[0].value.max(2.0);
    let comp_out = complexity_log.iter().skip(1).map(|e| e.value).fold(1.0, f64::max);
    checks.push(CheckResult::soft(
        "complexity_growth",
        comp_out <= comp_in.powi(cfg.t as i32),
        format!("max output complexity {comp_out:.3} vs input^T = {:.3}", comp_in.powi(cfg.t as i32)),
    ));

    // Stage 4: the set-level chain per harvested cell.
    let cells = verify_cells(q, &stage2, &q2, &gs.q3, &gs.u, &gs.u_inv, &m_int)?;

    let hard_pass = checks.iter().all(|c| c.soft || c.pass)
        && cells.iter().all(|c| c.skipped_m_divisor || c.chain_ok);

    Ok(PipelineTrace {
        q: q.clone(),
        primes: primes.iter().map(|p| p.to_string()).collect(),
        config: cfg.clone(),
        stage1: StageTrace {
            stabilized_index: stabilized_j,
            dims: stage1.dims.clone(),
            harvested_members: stage1.harvested_members(),
            excluded_irrational: stage1.excluded,
            windows_used: stage1.windows_used.clone(),
        },
        stage2: StageTrace {
            stabilized_index: stabilized_k,
            dims: stage2.dims.clone(),
            harvested_members: stage2.harvested_members(),
            excluded_irrational: stage2.excluded,
            windows_used: stage2.windows_used.clone(),
        },
        q1,
        q2,
        u: gs.u,
        u_inv: gs.u_inv,
        q3: gs.q3,
        m: m_int.to_string(),
        cells,
        complexity_log,
        checks,
        hard_pass,
    })
}

fn escalating_point(
    h: &SubspaceBasis,
    env: &Envelope,
    cfg: &EndgameConfig,
    seed: &SelfAdjointMatrix,
) -> Result<SelfAdjointMatrix> {
    let mut bound = cfg.denom_bound;
    loop {
        match rational_point_in_envelope(h, env, bound, seed) {
            Ok(x) => return Ok(x),
            Err(Error::NoPointFound(_)) if bound < cfg.denom_ceiling => {
                bound = (bound * 2).min(cfg.denom_ceiling);
            }
            Err(e) => return Err(e),
        }
    }
}

/// For every harvested (pi, pi', nu): each finite-M member of S(Q, ..., M)
/// lies in S(Q2, ..., oo); the U-conjugation maps S(Q2, ..., oo) injectively
/// into S_m(Q3, ..., oo); and the counts are monotone along the chain.
#[allow(clippy::too_many_arguments)]
fn verify_cells(
    _q: &SelfAdjointMatrix,
    stage2: &StageState,
    q2: &SelfAdjointMatrix,
    q3: &SelfAdjointMatrix,
    u: &GaussMatrix,
    u_inv: &GaussMatrix,
    m: &GaussianInt,
) -> Result<Vec<CellChainReport>> {
    let n = q2.n();
    let mut reports = Vec::new();
    for cell in &stage2.cells {
        let key = &cell.key;
        let spec = HeckeCosetSpec::new(key.pi.clone(), key.pi2.clone(), key.nu, n)?;
        let skipped = m.valuation(&key.pi)? != 0 || m.valuation(&key.pi2)? != 0;
        if skipped {
            reports.push(CellChainReport {
                pi: key.pi.to_string(),
                pi2: key.pi2.to_string(),
                nu: key.nu,
                det_power_rational: cell.det_rational,
                count_finite_m: cell.members.len(),
                count_q2_exact: 0,
                count_q3_m: 0,
                inclusion_ok: true,
                injection_ok: true,
                chain_ok: true,
                skipped_m_divisor: true,
            });
            continue;
        }

        let q2_query = CountQuery::exact(q2.clone(), spec.clone())?;
        let inclusion_ok = cell
            .members
            .iter()
            .map(|gamma| membership_test(gamma, &q2_query))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|ok| ok);

        let s_q2 = enumerate_s(&q2_query)?;
        let q3_query =
            CountQuery::new(q3.clone(), spec, Tolerance::Exact, m.clone())?;
        let s_q3 = enumerate_s(&q3_query)?;

        // U-conjugation: gamma -> U^-1 gamma U
        let mut injection_ok = true;
        let mut image_keys = HashSet::new();
        for gamma in &s_q2.members {
            let image = u_inv.mul(gamma).mul(u);
            if !membership_test(&image, &q3_query)? {
                injection_ok = false;
            }
            image_keys.insert(image.lex_key());
        }
        injection_ok &= image_keys.len() == s_q2.members.len();

        let chain_ok = inclusion_ok
            && injection_ok
            && cell.members.len() <= s_q2.members.len()
            && s_q2.members.len() <= s_q3.members.len();
        reports.push(CellChainReport {
            pi: key.pi.to_string(),
            pi2: key.pi2.to_string(),
            nu: key.nu,
            det_power_rational: cell.det_rational,
            count_finite_m: cell.members.len(),
            count_q2_exact: s_q2.members.len(),
            count_q3_m: s_q3.members.len(),
            inclusion_ok,
            injection_ok,
            chain_ok,
            skipped_m_divisor: false,
        });
    }
    reports.sort_by(|a, b| {
        (&a.pi, &a.pi2, a.nu).cmp(&(&b.pi, &b.pi2, b.nu))
    });
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn toy_config() -> EndgameConfig {
        EndgameConfig {
            d: 2,
            e: 64,
            m_exponent: 3,
            t: 10,
            l0: 2,
            omega_prime: Envelope::new(rat(1, 8), rat(8, 1), 2).unwrap(),
            stage1_windows: vec![(5, 14), (14, 14), (14, 14)],
            stage2_windows: vec![(5, 14), (14, 14), (14, 14)],
            denom_bound: 16,
            denom_ceiling: 1024,
            allow_toy_m: true,
        }
    }

    fn pool() -> Vec<SplitPrime> {
        vec![SplitPrime::above(5u32).unwrap(), SplitPrime::above(13u32).unwrap()]
    }

    #[test]
    fn config_validation() {
        let mut cfg = toy_config();
        cfg.validate(2).unwrap();
        cfg.e = 2; // violates E > D^(n^2+1)
        assert!(cfg.validate(2).is_err());
        let mut cfg = toy_config();
        cfg.allow_toy_m = false; // M = 3 fails the validated threshold
        assert!(cfg.validate(2).is_err());
    }

    #[test]
    fn identity_pipeline_is_trivial() {
        let q = SelfAdjointMatrix::identity(2);
        let trace = run_pipeline(&q, &toy_config(), &pool()).unwrap();
        assert!(trace.hard_pass);
        assert_eq!(trace.q2, q);
        assert_eq!(trace.q3, q);
        assert_eq!(trace.u, GaussMatrix::identity(2));
        assert_eq!(trace.m, "1");
        // all harvested sets empty
        assert_eq!(trace.stage2.harvested_members, 0);
        assert!(trace.cells.iter().all(|c| c.chain_ok));
    }

    #[test]
    fn window_exhaustion_is_reported() {
        let q = SelfAdjointMatrix::identity(2);
        let mut cfg = toy_config();
        cfg.stage1_windows = vec![(5, 14)];
        assert!(matches!(
            run_pipeline(&q, &cfg, &pool()),
            Err(Error::WindowExhaustion(_))
        ));
    }
}
