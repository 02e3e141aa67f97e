//! Exact arithmetic in `Z_q[X]/(X^N + 1)` over an RNS basis of NTT-friendly primes.
//!
//! Every operation is a pure function of its inputs. Bases and moduli are
//! immutable once built, and randomness is always passed in by the caller.

pub mod modulus;
pub mod ntt;
mod poly;

pub use modulus::{is_prime, ntt_primes_below, PrimeModulus};
pub use poly::{
    sample_gaussian, sample_ternary, Direction, Domain, RnsBasis, RnsPoly, SampleKind, BASE_PRIME_BITS,
    GAUSSIAN_STD_DEV, SPECIAL_PRIME_BITS,
};
