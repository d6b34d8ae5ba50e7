//! Exact arithmetic in Z[i] and Q(i): norms, units, gcd, split primes,
//! pi-adic valuations, and residue representatives modulo pi^rho.

mod int;
mod prime;
mod rat;
mod residue;

pub use int::{gaussian_gcd, GaussianInt};
pub use prime::{
    is_locally_integral, is_prime, rational_valuation_at, split_primes_in_window, valuation_at,
    PiValuation, SplitPrime,
};
pub use rat::GaussianRational;
pub use residue::{integer_residue, mod_inverse, root_of_minus_one};
