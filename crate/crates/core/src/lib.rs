//! Exact arithmetic for the arithmetic of modular Jacobians `J0(N)` at
//! square-free level.
//!
//! Everything here runs over `Z` and `Q` (arbitrary precision, no floating
//! point): integer lattices and their normal forms, q-expansions, the
//! Eisenstein subspace of weight-2 forms, modular symbols, cusp divisors and
//! eta-quotient units, Hecke algebras and their Eisenstein ideals. The
//! top-level entry point is [`verify::verify_ogg`], which checks that the
//! p-primary order of the cuspidal subgroup, the index of the Eisenstein
//! ideal in the cuspidal Hecke algebra, and the order of the quotient
//! `M/(S+E)` agree, and that the common value is an upper bound for rational
//! p-torsion.
//!
//! Levels are always square-free and `> 1`; the interesting primes are the
//! `p` not dividing `6N`.

pub mod arith;
pub mod cusps;
pub mod eisenstein;
pub mod hecke;
pub mod linalg;
pub mod modsym;
pub mod qexp;
pub mod verify;

use thiserror::Error;

/// Errors surfaced to callers. Precondition violations only; internal
/// consistency failures (a Hecke matrix that should be integral and is not,
/// a characteristic polynomial that should be a square and is not) panic,
/// since they indicate a bug rather than bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("level {0} is not square-free")]
    NotSquareFree(u64),
    #[error("level must be at least 2, got {0}")]
    LevelTooSmall(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {p} divides 6N = {six_n}")]
    PrimeDividesSixN { p: u64, six_n: u64 },
    #[error("{0} does not divide the level")]
    NotADivisor(u64),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks that `n` is a valid level: square-free and at least 2.
pub fn validate_level(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::LevelTooSmall(n));
    }
    if !arith::is_squarefree(n) {
        return Err(Error::NotSquareFree(n));
    }
    Ok(())
}

/// Checks that `p` is a prime not dividing `6N`.
pub fn validate_prime(n: u64, p: u64) -> Result<()> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if (6 * n) % p == 0 {
        return Err(Error::PrimeDividesSixN { p, six_n: 6 * n });
    }
    Ok(())
}
