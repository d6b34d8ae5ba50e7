//! Exact-arithmetic machinery for counting Hecke-set matrices over Z[i].
//!
//! The crate provides, bottom up:
//!
//! - [`gauss`]: Gaussian integers and rationals, split primes, valuations,
//!   residue representatives modulo `pi^rho`;
//! - [`linalg`]: exact matrices over Q(i), Smith normal form over Z[i],
//!   Gram–Schmidt diagonalization of Hermitian forms, complexity heights;
//! - [`shell`]: complete enumeration of Gaussian-integer vectors on shells of
//!   positive definite self-adjoint forms, with exact linear constraints;
//! - [`polarize`]: scalar congruence witnesses and the polarization
//!   congruence for projectively close vectors;
//! - [`hecke`]: membership tests and exhaustive enumeration of the sets
//!   `S(Q, pi^nu, pi'^nu, M)` and `S_m(Q, pi^nu, pi'^nu, oo)`, with one-prime
//!   and two-prime verification drivers;
//! - [`pipeline`]: the matrix-exchange pipeline producing a rational form Q2,
//!   a diagonal form Q3 and the conjugating unipotent U, with set-level chain
//!   verification;
//! - [`experiments`]: configuration-driven experiment runner behind the CLI.
//!
//! Every decision is made in exact arithmetic; floating point appears only in
//! reported values (angles, diagnostics).

pub mod certify;
pub mod error;
pub mod report;
pub mod serial;
pub mod experiments;
pub mod gauss;
pub mod hecke;
pub mod linalg;
pub mod pipeline;
pub mod polarize;
pub mod shell;

pub mod cli;

pub use error::{Error, Result};
