//! Experiment configuration: a versioned JSON schema validated with
//! field-level messages before anything runs.

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DiagnosticCount;
use crate::error::{Error, Result};
use crate::gauss::{GaussianInt, SplitPrime};
use crate::linalg::{GaussMatrix, SelfAdjointMatrix};
use crate::pipeline::{q_from_point, EndgameConfig, Envelope};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Count,
    Verify,
    Pipeline,
    Diag,
}

/// How the form Q is specified.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QSpec {
    /// Explicit self-adjoint matrix, entries as "(a+bi)/d" strings.
    Matrix(GaussMatrix),
    /// Diagonal rational entries, e.g. ["1", "5"].
    Diag(Vec<String>),
    /// Q from a point g via |det g|^(2/n) (g*)^-1 g^-1.
    Point(GaussMatrix),
    /// Random diagonal sample certified inside the envelope, driven by the
    /// CLI seed.
    EnvelopeSample { lo: String, hi: String },
}

impl QSpec {
    pub fn build(&self, n: usize, seed: u64) -> Result<SelfAdjointMatrix> {
        let q = match self {
            QSpec::Matrix(m) => SelfAdjointMatrix::new(m.clone())?,
            QSpec::Diag(entries) => {
                let diag = entries
                    .iter()
                    .map(|s| crate::serial::parse_rational(s))
                    .collect::<Result<Vec<_>>>()?;
                SelfAdjointMatrix::from_diag(&diag)
            }
            QSpec::Point(g) => q_from_point(g)?.rational()?,
            QSpec::EnvelopeSample { lo, hi } => {
                let lo = crate::serial::parse_rational(lo)?;
                let hi = crate::serial::parse_rational(hi)?;
                let env = Envelope::new(lo, hi, n)?;
                sample_diag_in_envelope(&env, seed)
            }
        };
        if q.n() != n {
            return Err(Error::InvalidConfig(format!(
                "q has dimension {}, config says n = {n}",
                q.n()
            )));
        }
        Ok(q)
    }
}

/// A random rational diagonal with eigenvalues strictly inside the envelope:
/// denominators up to 8, deterministic in the seed.
fn sample_diag_in_envelope(env: &Envelope, seed: u64) -> SelfAdjointMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = env.lo.to_owned();
    let hi = env.hi.to_owned();
    let span = &hi - &lo;
    let diag: Vec<BigRational> = (0..env.n)
        .map(|_| {
            let den = rng.gen_range(1..=8u64);
            let steps = 4 * den;
            let k = rng.gen_range(1..steps);
            &lo + &span * BigRational::new(k.into(), steps.into())
        })
        .collect();
    SelfAdjointMatrix::from_diag(&diag)
}

/// Constants for configured-constant checks and diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Constants {
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default)]
    pub k_amp: f64,
}

fn default_c() -> f64 {
    10.0
}
fn default_eps() -> f64 {
    0.5
}
fn default_kappa() -> f64 {
    1.0
}

impl Default for Constants {
    fn default() -> Self {
        Self { c: default_c(), eps: default_eps(), kappa: default_kappa(), k_amp: 0.0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagConfig {
    pub mu: Vec<f64>,
    #[serde(default)]
    pub l: Option<f64>,
    #[serde(default)]
    pub p_size: Option<usize>,
    #[serde(default)]
    pub d_mu_star: Option<f64>,
    #[serde(default)]
    pub counts: Vec<DiagnosticCount>,
}

/// A fabricated member injected into the verification path; used to test the
/// exit-status contract (it must flip the exit status).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InjectSpec {
    pub matrix: GaussMatrix,
    pub pi: String,
    pub pi2: String,
    pub nu: u32,
}

/// Toy-scale endgame parameters in JSON form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EndgameSpec {
    pub d: u32,
    pub e: u32,
    pub m_exponent: u32,
    #[serde(default = "default_t")]
    pub t: u32,
    #[serde(default = "default_l0")]
    pub l0: u64,
    pub omega_prime: (String, String),
    pub stage1_windows: Vec<(u64, u64)>,
    pub stage2_windows: Vec<(u64, u64)>,
    #[serde(default = "default_denom_bound")]
    pub denom_bound: u64,
    #[serde(default = "default_denom_ceiling")]
    pub denom_ceiling: u64,
    #[serde(default)]
    pub allow_toy_m: bool,
}

fn default_t() -> u32 {
    10
}
fn default_l0() -> u64 {
    2
}
fn default_denom_bound() -> u64 {
    16
}
fn default_denom_ceiling() -> u64 {
    4096
}

impl EndgameSpec {
    pub fn build(&self, n: usize) -> Result<EndgameConfig> {
        let lo = crate::serial::parse_rational(&self.omega_prime.0)?;
        let hi = crate::serial::parse_rational(&self.omega_prime.1)?;
        let cfg = EndgameConfig {
            d: self.d,
            e: self.e,
            m_exponent: self.m_exponent,
            t: self.t,
            l0: self.l0,
            omega_prime: Envelope::new(lo, hi, n)?,
            stage1_windows: self.stage1_windows.clone(),
            stage2_windows: self.stage2_windows.clone(),
            denom_bound: self.denom_bound,
            denom_ceiling: self.denom_ceiling,
            allow_toy_m: self.allow_toy_m,
        };
        cfg.validate(n)?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub mode: Mode,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub q: Option<QSpec>,
    /// Norm windows [c1, c2) feeding split_primes_in_window.
    #[serde(default)]
    pub windows: Vec<(u64, u64)>,
    /// Explicit prime list overriding the windows, e.g. ["2+i", "3+2i"].
    #[serde(default)]
    pub primes: Vec<String>,
    #[serde(default)]
    pub nu: Vec<u32>,
    /// "exact" or a positive integer M.
    #[serde(default = "default_tolerance")]
    pub tolerance: serde_json::Value,
    /// S_m denominators as Gaussian integer strings; default ["1"].
    #[serde(default)]
    pub denoms: Vec<String>,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default)]
    pub endgame: Option<EndgameSpec>,
    #[serde(default)]
    pub diag: Option<DiagConfig>,
    #[serde(default)]
    pub inject: Option<InjectSpec>,
}

fn default_n() -> usize {
    2
}
fn default_tolerance() -> serde_json::Value {
    serde_json::Value::String("exact".into())
}

impl ExperimentConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.n < 2 {
            return Err(Error::InvalidConfig("n: must be at least 2".into()));
        }
        self.parse_tolerance()?;
        for (c1, c2) in &self.windows {
            if c1 > c2 || *c1 < 2 {
                return Err(Error::InvalidConfig(format!("windows: bad window [{c1}, {c2})")));
            }
        }
        for nu in &self.nu {
            if *nu < 1 || *nu as usize > self.n {
                return Err(Error::InvalidConfig(format!("nu: {nu} outside [1, n]")));
            }
        }
        match self.mode {
            Mode::Count => {
                if self.q.is_none() {
                    return Err(Error::InvalidConfig("q: required for count mode".into()));
                }
                if self.windows.is_empty() && self.primes.is_empty() {
                    return Err(Error::InvalidConfig(
                        "windows: at least one window or explicit prime required".into(),
                    ));
                }
                if self.nu.is_empty() {
                    return Err(Error::InvalidConfig("nu: at least one exponent".into()));
                }
            }
            Mode::Verify => {
                if self.suites.is_empty() {
                    return Err(Error::InvalidConfig("suites: at least one suite".into()));
                }
                for s in &self.suites {
                    if !matches!(
                        s.as_str(),
                        "polarization_exhaustive" | "two_prime_grid" | "one_prime_counts"
                            | "shell_oracle"
                    ) {
                        return Err(Error::InvalidConfig(format!("suites: unknown suite {s:?}")));
                    }
                }
            }
            Mode::Pipeline => {
                if self.q.is_none() {
                    return Err(Error::InvalidConfig("q: required for pipeline mode".into()));
                }
                if self.endgame.is_none() {
                    return Err(Error::InvalidConfig("endgame: required for pipeline mode".into()));
                }
            }
            Mode::Diag => {
                let Some(diag) = &self.diag else {
                    return Err(Error::InvalidConfig("diag: required for diag mode".into()));
                };
                if diag.mu.is_empty() {
                    return Err(Error::InvalidConfig("diag.mu: must be nonempty".into()));
                }
            }
        }
        Ok(())
    }

    pub fn parse_tolerance(&self) -> Result<crate::hecke::Tolerance> {
        match &self.tolerance {
            serde_json::Value::String(s) if s == "exact" => Ok(crate::hecke::Tolerance::Exact),
            serde_json::Value::Number(v) => {
                let m = v
                    .as_u64()
                    .filter(|m| *m >= 1 && *m <= u32::MAX as u64)
                    .ok_or_else(|| {
                        Error::InvalidConfig("tolerance: M must be a positive integer".into())
                    })?;
                Ok(crate::hecke::Tolerance::Finite(m as u32))
            }
            other => Err(Error::InvalidConfig(format!(
                "tolerance: expected \"exact\" or an integer, got {other}"
            ))),
        }
    }

    /// Prime pool: the explicit list when given, otherwise all canonical
    /// split primes in the windows.
    pub fn prime_pool(&self) -> Result<Vec<SplitPrime>> {
        if !self.primes.is_empty() {
            return self
                .primes
                .iter()
                .map(|s| {
                    let z: GaussianInt = s.parse()?;
                    SplitPrime::new(z)
                })
                .collect();
        }
        let mut pool = Vec::new();
        for &(c1, c2) in &self.windows {
            for p in crate::gauss::split_primes_in_window(c1, c2) {
                if !pool.contains(&p) {
                    pool.push(p);
                }
            }
        }
        Ok(pool)
    }

    pub fn parse_denoms(&self) -> Result<Vec<GaussianInt>> {
        if self.denoms.is_empty() {
            return Ok(vec![GaussianInt::one()]);
        }
        self.denoms.iter().map(|s| s.parse()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_count_config_parses() {
        let json = serde_json::json!({
            "schema_version": 1,
            "mode": "count",
            "n": 2,
            "q": {"diag": ["1", "5"]},
            "windows": [[2, 10]],
            "nu": [1],
        });
        let cfg: ExperimentConfig = serde_json::from_value(json).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.prime_pool().unwrap().len(), 1);
        let q = cfg.q.as_ref().unwrap().build(2, 0).unwrap();
        assert!(q.is_diagonal());
    }

    #[test]
    fn bad_schema_version_rejected() {
        let json = serde_json::json!({
            "schema_version": 99,
            "mode": "diag",
            "diag": {"mu": [1.0, -1.0]},
        });
        let cfg: ExperimentConfig = serde_json::from_value(json).unwrap();
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(msg)) if msg.contains("schema_version")));
    }

    #[test]
    fn envelope_sample_is_deterministic_in_seed() {
        let spec = QSpec::EnvelopeSample { lo: "1/2".into(), hi: "2".into() };
        let a = spec.build(3, 7).unwrap();
        let b = spec.build(3, 7).unwrap();
        let c = spec.build(3, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let env = Envelope::new(
            crate::serial::parse_rational("1/2").unwrap(),
            crate::serial::parse_rational("2").unwrap(),
            3,
        )
        .unwrap();
        assert!(env.contains(&a));
    }
}
