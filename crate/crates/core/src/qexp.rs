//! Exact q-expansion arithmetic. A [`Series`] is a truncated power series
//! in q with rational coefficients and an explicit precision: coefficients
//! a_0..a_P are known, nothing beyond P is ever read. On top of that sit
//! Sturm bounds, eta-quotient expansions, the logarithmic derivative
//! q u'(q)/u(q) of a unit, the weight-2 Eisenstein combinations
//! f_d = (N/2)(d E_2(q^d) - E_2(q)) with E_2 = 1 - 24 sum sigma_1(n) q^n,
//! and the Hecke action on expansions.

use crate::arith;
use crate::{Error, Result};
use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;

/// Truncated q-expansion: coefficients of q^0..q^prec, exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    prec: usize,
    coeffs: Vec<BigRational>,
}

impl Series {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least a_0");
        Series { prec: coeffs.len() - 1, coeffs }
    }

    pub fn zero(prec: usize) -> Self {
        Series { prec, coeffs: vec![BigRational::zero(); prec + 1] }
    }

    pub fn constant(c: BigRational, prec: usize) -> Self {
        let mut s = Self::zero(prec);
        s.coeffs[0] = c;
        s
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    /// Coefficient of q^k; reading beyond the precision is a bug.
    pub fn coeff(&self, k: usize) -> &BigRational {
        assert!(k <= self.prec, "coefficient {} beyond precision {}", k, self.prec);
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn truncate(&self, prec: usize) -> Series {
        assert!(prec <= self.prec, "cannot extend precision by truncation");
        Series { prec, coeffs: self.coeffs[..=prec].to_vec() }
    }

    pub fn add(&self, other: &Series) -> Series {
        let p = self.prec.min(other.prec);
        Series::new((0..=p).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect())
    }

    pub fn sub(&self, other: &Series) -> Series {
        let p = self.prec.min(other.prec);
        Series::new((0..=p).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect())
    }

    pub fn scale(&self, c: &BigRational) -> Series {
        Series::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Series) -> Series {
        let p = self.prec.min(other.prec);
        let mut out = vec![BigRational::zero(); p + 1];
        for i in 0..=p {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(p - i) {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                out[i + j] += &self.coeffs[i] * &other.coeffs[j];
            }
        }
        Series::new(out)
    }

    /// Multiplicative inverse of a series with a_0 != 0, same precision.
    pub fn inverse(&self) -> Series {
        assert!(!self.coeffs[0].is_zero(), "inverse of a non-unit series");
        let mut inv = vec![BigRational::zero(); self.prec + 1];
        let lead = self.coeffs[0].recip();
        inv[0] = lead.clone();
        for n in 1..=self.prec {
            let mut acc = BigRational::zero();
            for k in 1..=n {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                acc += &self.coeffs[k] * &inv[n - k];
            }
            inv[n] = -acc * &lead;
        }
        Series::new(inv)
    }

    /// Integer power by repeated squaring; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Series {
        if e < 0 {
            return self.inverse().pow(-e);
        }
        let mut result = Series::constant(BigRational::one(), self.prec);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// The operator q d/dq: coefficient a_n goes to n a_n. Precision kept.
    pub fn q_derivative(&self) -> Series {
        Series::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * BigRational::from(BigInt::from(n)))
                .collect(),
        )
    }

    /// Substitutes q -> q^d.
    pub fn substitute_power(&self, d: usize, prec: usize) -> Series {
        assert!(d >= 1);
        assert!(
            self.prec >= prec / d,
            "insufficient precision for substitution"
        );
        let mut out = vec![BigRational::zero(); prec + 1];
        for (n, c) in self.coeffs.iter().enumerate() {
            if n * d > prec {
                break;
            }
            out[n * d] = c.clone();
        }
        Series::new(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Coefficientwise equality to the smaller of the two precisions.
    pub fn agrees_with(&self, other: &Series) -> bool {
        let p = self.prec.min(other.prec);
        (0..=p).all(|k| self.coeffs[k] == other.coeffs[k])
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown = self.prec.min(8);
        let parts: Vec<String> =
            (0..=shown).map(|k| format!("{} q^{}", self.coeffs[k], k)).collect();
        write!(f, "Series[prec {}]({}{})", self.prec, parts.join(" + "),
            if shown < self.prec { " + ..." } else { "" })
    }
}

/// Exponent vector of an eta quotient prod_d eta(d z)^{r_d} of weight 0 at
/// a square-free level: r is indexed by the divisors of N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaExponent {
    pub level: u64,
    /// (divisor d, exponent r_d), every divisor of N present, ascending.
    pub r: Vec<(u64, i64)>,
}

impl EtaExponent {
    pub fn new(level: u64, exps: &[(u64, i64)]) -> Result<Self> {
        crate::validate_level(level)?;
        let divs = arith::divisors(level);
        let mut r: Vec<(u64, i64)> = divs.iter().map(|&d| (d, 0)).collect();
        for &(d, e) in exps {
            let idx = divs
                .iter()
                .position(|&x| x == d)
                .ok_or(Error::NotADivisor(d))?;
            r[idx].1 += e;
        }
        let weight: i64 = r.iter().map(|&(_, e)| e).sum();
        if weight != 0 {
            return Err(Error::Invalid(format!(
                "eta exponent has weight {}/2, want 0",
                weight
            )));
        }
        Ok(EtaExponent { level, r })
    }

    /// The unit h_d = (eta(dz)/eta(z))^{12N}.
    pub fn h_d(level: u64, d: u64) -> Result<Self> {
        if d <= 1 || level % d != 0 {
            return Err(Error::NotADivisor(d));
        }
        let e = 12 * level as i64;
        Self::new(level, &[(d, e), (1, -e)])
    }

    /// Formal product: adds exponent vectors.
    pub fn mul(&self, other: &EtaExponent) -> EtaExponent {
        assert_eq!(self.level, other.level);
        let r = self
            .r
            .iter()
            .zip(&other.r)
            .map(|(&(d, a), &(d2, b))| {
                assert_eq!(d, d2);
                (d, a + b)
            })
            .collect();
        EtaExponent { level: self.level, r }
    }

    pub fn weighted_sum(&self) -> i64 {
        self.r.iter().map(|&(d, e)| d as i64 * e).sum()
    }

    pub fn dual_weighted_sum(&self) -> i64 {
        let n = self.level as i64;
        self.r.iter().map(|&(d, e)| (n / d as i64) * e).sum()
    }
}

/// q^m times a unit power series with a_0 = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitExpansion {
    pub leading_exponent: i64,
    pub unit_part: Series,
}

/// Sturm bound B = ceil(mu/6) with mu = [SL2(Z) : Gamma_0(N)]; truncation
/// of weight-2 forms at B is injective.
pub fn sturm_bound(n: u64) -> Result<usize> {
    crate::validate_level(n)?;
    // For square-free N the index is the product of (l + 1) over primes l|N.
    let mu: u64 = arith::prime_divisors(n).iter().map(|&l| l + 1).product();
    Ok(((mu + 5) / 6) as usize)
}

/// Default working precision: enough for every Hecke image up to index
/// n_max to retain precision at least B.
pub fn working_precision(n: u64, n_max: usize) -> Result<usize> {
    let b = sturm_bound(n)?;
    Ok((b + 1) * n_max.max(b))
}

/// Euler's product prod_{n>=1} (1 - q^(dn)) via the pentagonal number
/// theorem, to the requested precision.
pub fn euler_product(d: usize, prec: usize) -> Series {
    let mut coeffs = vec![BigRational::zero(); prec + 1];
    coeffs[0] = BigRational::one();
    let mut k: i64 = 1;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        let e2 = k * (3 * k + 1) / 2;
        let sign = if k % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        let mut hit = false;
        for e in [e1, e2] {
            let idx = e as usize * d;
            if idx <= prec {
                coeffs[idx] = sign.clone();
                hit = true;
            }
        }
        if !hit {
            break;
        }
        k += 1;
    }
    Series::new(coeffs)
}

/// Expands an eta quotient as q^m times a unit series, exactly.
pub fn eta_quotient(e: &EtaExponent, prec: usize) -> Result<UnitExpansion> {
    let wsum = e.weighted_sum();
    if wsum % 24 != 0 {
        return Err(Error::Invalid(format!(
            "sum d r_d = {} is not divisible by 24",
            wsum
        )));
    }
    let m = wsum / 24;
    let mut unit = Series::constant(BigRational::one(), prec);
    for &(d, rd) in &e.r {
        if rd == 0 {
            continue;
        }
        let base = euler_product(d as usize, prec);
        unit = unit.mul(&base.pow(rd));
    }
    Ok(UnitExpansion { leading_exponent: m, unit_part: unit })
}

/// Logarithmic derivative m + q u'(q)/u(q), to precision one less than the
/// unit part.
pub fn dlog(x: &UnitExpansion) -> Series {
    assert!(
        x.unit_part.coeff(0) == &BigRational::one(),
        "unit part must start with 1"
    );
    let m = BigRational::from(BigInt::from(x.leading_exponent));
    let p = x.unit_part.precision();
    if p == 0 {
        return Series::constant(m, 0);
    }
    let num = x.unit_part.q_derivative().truncate(p - 1);
    let result = num.mul(&x.unit_part.inverse().truncate(p - 1));
    result.add(&Series::constant(m, p - 1))
}

/// E_2 = 1 - 24 sum sigma_1(n) q^n.
pub fn e2_series(prec: usize) -> Series {
    let mut coeffs = vec![BigRational::zero(); prec + 1];
    coeffs[0] = BigRational::one();
    for n in 1..=prec {
        coeffs[n] =
            BigRational::from(BigInt::from(-24i64 * arith::sigma1(n as u64) as i64));
    }
    Series::new(coeffs)
}

/// Single coefficient of f_d: a_0 = N(d-1)/2, and for n >= 1
/// a_n = 12N (sigma_1(n) - d sigma_1(n/d)) with the second term only when
/// d | n. Always an integer.
pub fn fd_coeff(n: u64, d: u64, k: u64) -> BigInt {
    if k == 0 {
        return BigInt::from(n) * BigInt::from(d - 1) / BigInt::from(2);
    }
    let mut v = BigInt::from(arith::sigma1(k));
    if k % d == 0 {
        v -= BigInt::from(d) * BigInt::from(arith::sigma1(k / d));
    }
    BigInt::from(12 * n) * v
}

/// The series f_d = (N/2)(d E_2(q^d) - E_2(q)), the logarithmic derivative
/// of h_d.
pub fn fd_series(n: u64, d: u64, prec: usize) -> Result<Series> {
    crate::validate_level(n)?;
    if d <= 1 || n % d != 0 {
        return Err(Error::NotADivisor(d));
    }
    Ok(Series::new(
        (0..=prec as u64).map(|k| BigRational::from(fd_coeff(n, d, k))).collect(),
    ))
}

/// f_d computed the defining way, as dlog of the eta quotient h_d. Slower
/// than the closed form; the two must agree coefficientwise.
pub fn fd_series_via_dlog(n: u64, d: u64, prec: usize) -> Result<Series> {
    let h = EtaExponent::h_d(n, d)?;
    let unit = eta_quotient(&h, prec + 1)?;
    Ok(dlog(&unit))
}

/// Hecke operator T_n (U_l at primes dividing the level) on a q-expansion.
/// Output precision is floor(input precision / n).
pub fn hecke_on_series(f: &Series, n: u64, level: u64) -> Result<Series> {
    if n == 0 {
        return Err(Error::Invalid("Hecke index 0".into()));
    }
    if f.precision() / (n as usize) < 1 {
        return Err(Error::Invalid(format!(
            "precision {} too small for T_{}",
            f.precision(),
            n
        )));
    }
    let mut g = f.clone();
    for (l, e) in arith::factor(n) {
        g = hecke_prime_power(&g, l, e, level);
    }
    Ok(g)
}

fn hecke_prime(f: &Series, l: u64, level: u64) -> Series {
    let l_us = l as usize;
    let p_out = f.precision() / l_us;
    let mut out = Vec::with_capacity(p_out + 1);
    for k in 0..=p_out {
        let mut c = f.coeff(k * l_us).clone();
        if level % l != 0 && k % l_us == 0 {
            c += f.coeff(k / l_us) * BigRational::from(BigInt::from(l));
        }
        out.push(c);
    }
    Series::new(out)
}

fn hecke_prime_power(f: &Series, l: u64, e: u32, level: u64) -> Series {
    if level % l == 0 {
        // U_{l^e} = U_l^e
        let mut g = f.clone();
        for _ in 0..e {
            g = hecke_prime(&g, l, level);
        }
        return g;
    }
    // T_{l^(k+1)} = T_l T_{l^k} - l T_{l^(k-1)}
    let mut prev = f.clone();
    let mut cur = hecke_prime(f, l, level);
    for _ in 1..e {
        let tl_cur = hecke_prime(&cur, l, level);
        let scaled = prev
            .truncate(tl_cur.precision())
            .scale(&BigRational::from(BigInt::from(l)));
        let next = tl_cur.sub(&scaled);
        prev = cur;
        cur = next;
    }
    cur
}

/// True when every reduced coefficient denominator avoids p, i.e. the
/// series lies in Z_(p)[[q]] through its precision.
pub fn series_is_p_integral(f: &Series, p: u64) -> bool {
    f.coeffs().iter().all(|c| crate::linalg::is_p_integral(c, p))
}

/// Prime support of all coefficient denominators.
pub fn denominator_support(f: &Series) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for c in f.coeffs() {
        let den = c.denom().abs();
        let mut rest = den.clone();
        let mut p = BigInt::from(2);
        while &p * &p <= rest {
            if num::Integer::is_multiple_of(&rest, &p) {
                let small = u64::try_from(&p).unwrap();
                if !out.contains(&small) {
                    out.push(small);
                }
                while num::Integer::is_multiple_of(&rest, &p) {
                    rest = rest / &p;
                }
            }
            p += 1;
        }
        if rest > BigInt::one() {
            let small = u64::try_from(&rest).unwrap();
            if !out.contains(&small) {
                out.push(small);
            }
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn br(x: i64) -> BigRational {
        BigRational::from(BigInt::from(x))
    }

    #[test]
    fn test_sturm_bound() {
        assert_eq!(sturm_bound(11).unwrap(), 2);
        assert_eq!(sturm_bound(15).unwrap(), 4);
        assert_eq!(sturm_bound(30).unwrap(), 12);
        assert!(sturm_bound(12).is_err());
    }

    #[test]
    fn test_series_mul_inverse() {
        // (1 - q)^-1 = 1 + q + q^2 + ...
        let s = Series::new(vec![br(1), br(-1), br(0), br(0)]);
        let inv = s.inverse();
        assert_eq!(inv.coeffs(), &[br(1), br(1), br(1), br(1)]);
        assert_eq!(
            s.mul(&inv),
            Series::new(vec![br(1), br(0), br(0), br(0)])
        );
    }

    #[test]
    fn test_euler_product() {
        // prod (1-q^n) = 1 - q - q^2 + q^5 + q^7 - q^12 - ...
        let e = euler_product(1, 12);
        let expect = [1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1];
        for (k, &c) in expect.iter().enumerate() {
            assert_eq!(e.coeff(k), &br(c), "coefficient {}", k);
        }
    }

    #[test]
    fn test_eta_quotient_h11() {
        let h = EtaExponent::h_d(11, 11).unwrap();
        let u = eta_quotient(&h, 2).unwrap();
        assert_eq!(u.leading_exponent, 55);
        assert_eq!(u.unit_part.coeff(0), &br(1));
        assert_eq!(u.unit_part.coeff(1), &br(132));
    }

    #[test]
    fn test_eta_quotient_h3_level15() {
        let h = EtaExponent::h_d(15, 3).unwrap();
        let u = eta_quotient(&h, 1).unwrap();
        assert_eq!(u.leading_exponent, 15);
    }

    #[test]
    fn test_eta_quotient_rejects_bad_weight_sum() {
        // eta(2z)/eta(z): sum d r_d = 1, not divisible by 24
        let e = EtaExponent::new(2, &[(2, 1), (1, -1)]).unwrap();
        assert!(eta_quotient(&e, 5).is_err());
    }

    #[test]
    fn test_dlog_trivial() {
        let x = UnitExpansion {
            leading_exponent: 0,
            unit_part: Series::constant(BigRational::one(), 4),
        };
        assert!(dlog(&x).is_zero());
    }

    #[test]
    fn test_dlog_h11_leading() {
        let h = EtaExponent::h_d(11, 11).unwrap();
        let u = eta_quotient(&h, 3).unwrap();
        let d = dlog(&u);
        assert_eq!(d.coeff(0), &br(55));
        assert_eq!(d.coeff(1), &br(132));
    }

    #[test]
    fn test_fd_series_values() {
        let f = fd_series(11, 11, 2).unwrap();
        assert_eq!(f.coeffs(), &[br(55), br(132), br(396)]);
        let g = fd_series(15, 3, 3).unwrap();
        assert_eq!(g.coeff(0), &br(15));
        assert_eq!(g.coeff(1), &br(180));
        assert_eq!(g.coeff(3), &br(180));
    }

    #[test]
    fn test_fd_matches_dlog_small() {
        for (n, d) in [(11u64, 11u64), (15, 3), (15, 5), (15, 15), (14, 2)] {
            let closed = fd_series(n, d, 20).unwrap();
            let via = fd_series_via_dlog(n, d, 20).unwrap();
            assert!(closed.agrees_with(&via), "mismatch at N={} d={}", n, d);
        }
    }

    #[test]
    fn test_dlog_is_homomorphism() {
        let a = EtaExponent::h_d(15, 3).unwrap();
        let b = EtaExponent::h_d(15, 5).unwrap();
        let ab = a.mul(&b);
        let da = dlog(&eta_quotient(&a, 12).unwrap());
        let db = dlog(&eta_quotient(&b, 12).unwrap());
        let dab = dlog(&eta_quotient(&ab, 12).unwrap());
        assert!(dab.agrees_with(&da.add(&db)));
    }

    #[test]
    fn test_hecke_t1_identity() {
        let f = fd_series(11, 11, 6).unwrap();
        assert_eq!(hecke_on_series(&f, 1, 11).unwrap(), f);
    }

    #[test]
    fn test_hecke_precision_contract() {
        let f = Series::zero(11);
        assert_eq!(hecke_on_series(&f, 3, 11).unwrap().precision(), 3);
        assert!(hecke_on_series(&f, 12, 11).is_err());
    }

    #[test]
    fn test_hecke_ul_shifts() {
        // U_11 on f_11 at level 11: a_k -> a_{11k}
        let f = fd_series(11, 11, 22).unwrap();
        let g = hecke_on_series(&f, 11, 11).unwrap();
        assert_eq!(g.precision(), 2);
        assert_eq!(g.coeff(1), f.coeff(11));
        assert_eq!(g.coeff(2), f.coeff(22));
    }

    #[test]
    fn test_hecke_composite_agrees_with_composition() {
        let f = fd_series(15, 3, 36).unwrap();
        let t6 = hecke_on_series(&f, 6, 15).unwrap();
        let t2 = hecke_on_series(&f, 2, 15).unwrap();
        let t2_then_3 = hecke_on_series(&t2, 3, 15).unwrap();
        assert!(t6.agrees_with(&t2_then_3));
    }

    #[test]
    fn test_hecke_commute() {
        let f = fd_series(15, 5, 60).unwrap();
        let ab = hecke_on_series(&hecke_on_series(&f, 2, 15).unwrap(), 3, 15).unwrap();
        let ba = hecke_on_series(&hecke_on_series(&f, 3, 15).unwrap(), 2, 15).unwrap();
        assert!(ab.agrees_with(&ba));
    }

    #[test]
    fn test_denominator_support() {
        let s = Series::new(vec![
            BigRational::new(BigInt::from(1), BigInt::from(12)),
            br(3),
        ]);
        assert_eq!(denominator_support(&s), vec![2, 3]);
        assert!(series_is_p_integral(&s, 5));
        assert!(!series_is_p_integral(&s, 2));
    }
}
