//! Small-integer number theory used throughout: primality by trial division,
//! divisor lists, multiplicative functions, p-adic valuations. Levels and
//! Hecke indices stay well inside `u64`, so nothing here needs big integers;
//! the big-integer side lives in [`crate::linalg`] and [`crate::qexp`].

use num::BigInt;
use num::bigint::Sign;

/// Trial-division primality. Fine for the sizes that occur (indices and
/// levels of a few thousand at most).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in ascending order starting from 2, `count` of them.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = 2;
    while out.len() < count {
        if is_prime(n) {
            out.push(n);
        }
        n += 1;
    }
    out
}

/// All primes `<= bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| is_prime(n)).collect()
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return false;
            }
        }
        d += 1;
    }
    true
}

/// Prime factorization as (prime, exponent) pairs, ascending.
pub fn factor(n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factor(0)");
    let mut out = Vec::new();
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// Distinct prime divisors, ascending.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

/// All positive divisors, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor(n) {
        let prev = out.clone();
        let mut pe = 1;
        for _ in 0..e {
            pe *= p;
            out.extend(prev.iter().map(|d| d * pe));
        }
    }
    out.sort_unstable();
    out
}

/// Sum of divisors, `sigma_1(n)`.
pub fn sigma1(n: u64) -> u64 {
    divisors(n).into_iter().sum()
}

/// Moebius function on square-free-or-not integers.
pub fn moebius(n: u64) -> i64 {
    let f = factor(n);
    if f.iter().any(|&(_, e)| e > 1) {
        return 0;
    }
    if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num::integer::gcd(a, b)
}

/// p-adic valuation of a nonzero big integer.
pub fn valuation_big(x: &BigInt, p: u64) -> u32 {
    assert!(x.sign() != Sign::NoSign, "valuation of zero");
    let p = BigInt::from(p);
    let mut v = 0;
    let mut m = x.clone();
    loop {
        let (q, r) = num::Integer::div_rem(&m, &p);
        if r != BigInt::from(0) {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero u64.
pub fn valuation(x: u64, p: u64) -> u32 {
    assert!(x != 0, "valuation of zero");
    let mut v = 0;
    let mut m = x;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    v
}

/// Splits `x > 0` into prime powers by trial division against the given
/// primes; returns the exponent map and the unfactored cofactor (1 when the
/// primes cover the support of `x`).
pub fn factor_over(x: &BigInt, primes: &[u64]) -> (Vec<(u64, u32)>, BigInt) {
    assert!(x.sign() == Sign::Plus, "factor_over needs a positive integer");
    let mut rest = x.clone();
    let mut out = Vec::new();
    for &p in primes {
        let big = BigInt::from(p);
        let mut e = 0u32;
        loop {
            let (q, r) = num::Integer::div_rem(&rest, &big);
            if r != BigInt::from(0) {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    (out, rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_is_prime_small() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn test_squarefree() {
        assert!(is_squarefree(30));
        assert!(is_squarefree(1));
        assert!(!is_squarefree(12));
        assert!(!is_squarefree(49));
    }

    #[test]
    fn test_divisors_and_sigma() {
        assert_eq!(divisors(30), vec![1, 2, 3, 5, 6, 10, 15, 30]);
        assert_eq!(sigma1(1), 1);
        assert_eq!(sigma1(6), 12);
        assert_eq!(sigma1(12), 28);
    }

    #[test]
    fn test_moebius() {
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(2), -1);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(4), 0);
    }

    #[test]
    fn test_valuation() {
        assert_eq!(valuation(40, 2), 3);
        assert_eq!(valuation(40, 5), 1);
        assert_eq!(valuation(40, 3), 0);
        assert_eq!(valuation_big(&BigInt::from(-250), 5), 3);
    }

    #[test]
    fn test_factor_over() {
        let (f, rest) = factor_over(&BigInt::from(360), &[2, 3]);
        assert_eq!(f, vec![(2, 3), (3, 2)]);
        assert_eq!(rest, BigInt::from(5));
    }
}
