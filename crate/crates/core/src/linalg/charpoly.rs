//! Exact characteristic polynomials by the Faddeev-LeVerrier recurrence.
//! All divisions in the recurrence are exact over Z, so the result is an
//! exact integer polynomial; a final Cayley-Hamilton check guards against
//! arithmetic slips. Polynomials are coefficient vectors indexed by power
//! of x.

use super::IntMatrix;
use num::{BigInt, Integer, Signed, Zero};

/// Monic characteristic polynomial det(xI - A); coefficient of x^k at
/// index k, length n+1. The 0x0 matrix gives the constant polynomial 1.
pub fn charpoly(a: &IntMatrix) -> Vec<BigInt> {
    assert_eq!(a.rows, a.cols, "charpoly of a non-square matrix");
    let n = a.rows;
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::from(1);
    if n == 0 {
        return coeffs;
    }
    let mut m = IntMatrix::identity(n);
    for k in 1..=n {
        let am = a.mul(&m);
        let t = am.trace();
        let kk = BigInt::from(k as u64);
        let (c, rem) = (-t).div_rem(&kk);
        assert!(rem.is_zero(), "Faddeev-LeVerrier division not exact");
        coeffs[n - k] = c.clone();
        m = am;
        for i in 0..n {
            *m.at_mut(i, i) += &c;
        }
    }
    // Cayley-Hamilton: A * M_n must be -c_0 * ... in fact M_n itself is 0.
    assert!(m.is_zero(), "Cayley-Hamilton check failed in charpoly");
    coeffs
}

/// Determinant via the characteristic polynomial: det A = (-1)^n p(0).
pub fn det(a: &IntMatrix) -> BigInt {
    let n = a.rows;
    let p = charpoly(a);
    if n % 2 == 0 {
        p[0].clone()
    } else {
        -p[0].clone()
    }
}

/// Evaluates a coefficient-vector polynomial at an integer.
pub fn poly_eval(p: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Monic square root of a monic even-degree integer polynomial, if one
/// exists: returns s with s^2 = p. Coefficients are matched from the top
/// and the result is verified by multiplying back.
pub fn poly_sqrt(p: &[BigInt]) -> Option<Vec<BigInt>> {
    let deg = p.len().checked_sub(1)?;
    if deg % 2 != 0 || p[deg] != BigInt::from(1) {
        return None;
    }
    let g = deg / 2;
    let mut s = vec![BigInt::zero(); g + 1];
    s[g] = BigInt::from(1);
    let two = BigInt::from(2);
    for i in (0..g).rev() {
        // coefficient of x^(g+i) in s^2: 2 s_i + sum_{j=i+1..g-1} s_j s_{g+i-j}
        let mut acc = BigInt::zero();
        for j in i + 1..g {
            let k = g + i - j;
            if k <= g && k > i && k < p.len() {
                acc += &s[j] * &s[k];
            }
        }
        let target = &p[g + i] - acc;
        let (q, rem) = target.div_rem(&two);
        if !rem.is_zero() {
            return None;
        }
        s[i] = q;
    }
    // verify s^2 == p
    let mut sq = vec![BigInt::zero(); deg + 1];
    for i in 0..=g {
        for j in 0..=g {
            let term = &s[i] * &s[j];
            sq[i + j] += term;
        }
    }
    if sq == p {
        Some(s)
    } else {
        None
    }
}

/// Human-readable polynomial with the given variable name, highest degree
/// first.
pub fn poly_to_string(p: &[BigInt], var: &str) -> String {
    if p.iter().all(|c| c.is_zero()) {
        return "0".to_string();
    }
    let mut parts: Vec<String> = Vec::new();
    for (k, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let body = match k {
            0 => mag.to_string(),
            _ => {
                let xpow = if k == 1 { var.to_string() } else { format!("{}^{}", var, k) };
                if mag == BigInt::from(1) {
                    xpow
                } else {
                    format!("{}*{}", mag, xpow)
                }
            }
        };
        if parts.is_empty() {
            parts.push(if c.is_negative() { format!("-{}", body) } else { body });
        } else {
            parts.push(format!("{} {}", if c.is_negative() { "-" } else { "+" }, body));
        }
    }
    parts.join(" ")
}
