//! Arithmetic substrate: Λ and μ sieves, pointwise Λ, the sawtooth ψ and
//! deterministic compensated summation.
//!
//! Tables are immutable once built. Λ values are stored as `f64` logarithms;
//! the sieve and [`mangoldt_point`] evaluate `ln p` through the same branch,
//! so they agree bit for bit.

mod point;
mod reduce;
mod sieve;

pub use point::{divisor_count, frac, iroot, is_prime, isqrt, mangoldt_point, prime_power_base, psi_frac};
pub use reduce::{pairwise_reduce, CompensatedAccumulator, Neumaier, NeumaierComplex, DEFAULT_CHUNK};
pub use sieve::{
    for_each_segment, mobius_sieve, primes_up_to, segment_sieve, segment_sieve_with_capacity,
    sieve_mangoldt, sieve_mangoldt_with_capacity, MangoldtTable, DEFAULT_SEGMENT_CAPACITY,
};

use num_complex::Complex64;

/// e(t) = exp(2πit), with the argument reduced mod 1 first.
#[inline]
pub fn e(t: f64) -> Complex64 {
    let theta = std::f64::consts::TAU * frac(t);
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}
