//! The weight-2 Eisenstein subspace of level N (square-free). Two bases are
//! in play: the eigenforms E_d (d | N, d > 1) with a_1 = 1 and prime
//! eigenvalues 1 / l / 1+l according to l | d, l | N/d, l coprime to N, and
//! the logarithmic derivatives f_d of the eta units, which have integer
//! coefficients. The functionals l_d(f) = sum_{t|d} mu(d/t) sigma_1(d/t)
//! a_t(f) are diagonal on the f-basis: l_d(f_s) = -12Nd when s = d and 0
//! otherwise, which pins down the integral lattice away from 2, 3 and N.

use crate::arith;
use crate::linalg::{index, IntMatrix, Lattice, QMatrix};
use crate::qexp::{self, Series};
use crate::{Error, Result};
use num::{BigInt, BigRational, One, Zero};

/// Which basis of the Eisenstein space a collection holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisFlavor {
    /// Eta logarithmic derivatives f_d, integral coefficients.
    FBasis,
    /// Normalized eigenforms E_d, a_1 = 1.
    EBasis,
}

/// All 2^r - 1 basis forms of one flavor, indexed by divisors d > 1 of N.
#[derive(Clone, Debug)]
pub struct EisensteinBasis {
    pub level: u64,
    pub flavor: BasisFlavor,
    /// (d, expansion), ascending in d, every divisor > 1 present.
    pub forms: Vec<(u64, Series)>,
}

impl EisensteinBasis {
    pub fn rank(&self) -> usize {
        self.forms.len()
    }

    pub fn form(&self, d: u64) -> Option<&Series> {
        self.forms.iter().find(|&&(t, _)| t == d).map(|(_, s)| s)
    }

    /// Rows are coefficient vectors (a_0..a_prec), one per basis form.
    pub fn coefficient_matrix(&self, prec: usize) -> QMatrix {
        QMatrix::from_rows(
            prec + 1,
            self.forms
                .iter()
                .map(|(_, s)| s.coeffs()[..=prec].to_vec())
                .collect(),
        )
    }
}

/// The saturated lattice of integral Eisenstein expansions (a_0..a_B).
#[derive(Clone, Debug)]
pub struct EisLattice {
    pub level: u64,
    pub precision: usize,
    pub lattice: Lattice,
}

/// A lattice index (or similar positive integer) together with its
/// factorization over the primes {2, 3} and those dividing N. A nontrivial
/// cofactor means support outside that set.
#[derive(Clone, Debug)]
pub struct SupportedIndex {
    pub value: BigInt,
    pub factors: Vec<(u64, u32)>,
    pub cofactor: BigInt,
}

impl SupportedIndex {
    pub fn support_ok(&self) -> bool {
        self.cofactor.is_one()
    }

    /// Factors `value` over {2, 3} and the primes dividing `n`.
    pub fn from_value(value: BigInt, n: u64) -> SupportedIndex {
        let mut allowed = vec![2u64, 3];
        for l in arith::prime_divisors(n) {
            if !allowed.contains(&l) {
                allowed.push(l);
            }
        }
        allowed.sort_unstable();
        let (factors, cofactor) = arith::factor_over(&value, &allowed);
        SupportedIndex { value, factors, cofactor }
    }
}

fn divisors_gt1(n: u64) -> Vec<u64> {
    arith::divisors(n).into_iter().filter(|&d| d > 1).collect()
}

/// The f-basis {f_d : d | N, d > 1} to the given precision.
pub fn fd_basis(n: u64, prec: usize) -> Result<EisensteinBasis> {
    crate::validate_level(n)?;
    let forms = divisors_gt1(n)
        .into_iter()
        .map(|d| Ok((d, qexp::fd_series(n, d, prec)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EisensteinBasis { level: n, flavor: BasisFlavor::FBasis, forms })
}

/// Coefficient a_k (k >= 1) of the eigenform E_d, from multiplicativity.
pub(crate) fn ed_coeff(n: u64, d: u64, k: u64) -> BigInt {
    let mut v = BigInt::one();
    for (l, e) in arith::factor(k) {
        let term = if d % l == 0 {
            BigInt::one()
        } else if n % l == 0 {
            BigInt::from(l).pow(e)
        } else {
            BigInt::from(arith::sigma1(l.pow(e)))
        };
        v *= term;
    }
    v
}

/// Each eigenform E_d written in the rational span of the f_t: row per
/// divisor d > 1 (ascending), column per divisor t > 1 (ascending). The
/// combination is solved from coefficients 1..max(B, N); indices up to N
/// are needed because f_s and f_t can agree below min(s, t), and with them
/// the matrix has full row rank (the functionals l_d are diagonal on this
/// window), so the solution is unique.
pub fn e_in_f_matrix(n: u64) -> Result<QMatrix> {
    crate::validate_level(n)?;
    let b = qexp::sturm_bound(n)?.max(n as usize);
    let divs = divisors_gt1(n);
    let f_rows: Vec<Vec<BigRational>> = divs
        .iter()
        .map(|&t| {
            (1..=b as u64)
                .map(|k| BigRational::from(qexp::fd_coeff(n, t, k)))
                .collect()
        })
        .collect();
    let f_mat = QMatrix::from_rows(b, f_rows);
    let mut rows = Vec::with_capacity(divs.len());
    for &d in &divs {
        let target: Vec<BigRational> = (1..=b as u64)
            .map(|k| BigRational::from(ed_coeff(n, d, k)))
            .collect();
        let coords = f_mat
            .solve_left(&target)
            .expect("E_d must lie in the span of the f_t");
        rows.push(coords);
    }
    Ok(QMatrix::from_rows(divs.len(), rows))
}

/// Constant terms of all E_d at once, read off from the f-basis
/// combination (the f_t have known constant terms N(t-1)/2).
fn ed_constant_terms(n: u64) -> Result<Vec<(u64, BigRational)>> {
    let p = e_in_f_matrix(n)?;
    let divs = divisors_gt1(n);
    let mut out = Vec::with_capacity(divs.len());
    for (i, &d) in divs.iter().enumerate() {
        let a0 = divs
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (j, &t)| {
                acc + p.at(i, j) * BigRational::from(qexp::fd_coeff(n, t, 0))
            });
        out.push((d, a0));
    }
    Ok(out)
}

/// The Eisenstein eigenform E_d as a q-expansion to the given precision.
pub fn ed_series(n: u64, d: u64, prec: usize) -> Result<Series> {
    crate::validate_level(n)?;
    if d <= 1 || n % d != 0 {
        return Err(Error::NotADivisor(d));
    }
    let a0 = ed_constant_terms(n)?
        .into_iter()
        .find(|&(t, _)| t == d)
        .map(|(_, v)| v)
        .unwrap();
    let mut coeffs = vec![a0];
    coeffs.extend((1..=prec as u64).map(|k| BigRational::from(ed_coeff(n, d, k))));
    Ok(Series::new(coeffs))
}

/// The E-basis {E_d : d | N, d > 1} to the given precision.
pub fn ed_basis(n: u64, prec: usize) -> Result<EisensteinBasis> {
    crate::validate_level(n)?;
    let a0s = ed_constant_terms(n)?;
    let forms = a0s
        .into_iter()
        .map(|(d, a0)| {
            let mut coeffs = vec![a0];
            coeffs.extend(
                (1..=prec as u64).map(|k| BigRational::from(ed_coeff(n, d, k))),
            );
            (d, Series::new(coeffs))
        })
        .collect();
    Ok(EisensteinBasis { level: n, flavor: BasisFlavor::EBasis, forms })
}

/// Integer coefficient rows (a_0..a_B) of the f-basis.
fn fd_coefficient_rows(n: u64) -> Result<IntMatrix> {
    let b = qexp::sturm_bound(n)?;
    let divs = divisors_gt1(n);
    let mut m = IntMatrix::zeros(divs.len(), b + 1);
    for (i, &d) in divs.iter().enumerate() {
        for k in 0..=b as u64 {
            *m.at_mut(i, k as usize) = qexp::fd_coeff(n, d, k);
        }
    }
    Ok(m)
}

/// The lattice of integral Eisenstein expansions at precision B, obtained
/// by saturating the span of the f_d coefficient vectors. Truncation at the
/// Sturm bound is injective, so this faithfully represents the space.
pub fn eis_integral_lattice(n: u64) -> Result<EisLattice> {
    crate::validate_level(n)?;
    let b = qexp::sturm_bound(n)?;
    let rows = fd_coefficient_rows(n)?;
    let lat = Lattice::from_rows(&rows).saturate();
    assert_eq!(
        lat.rank(),
        divisors_gt1(n).len(),
        "Eisenstein lattice rank must be 2^r - 1"
    );
    Ok(EisLattice { level: n, precision: b, lattice: lat })
}

/// l_d(f) = sum over t | d of mu(d/t) sigma_1(d/t) a_t(f).
pub fn l_functional(d: u64, f: &Series) -> Result<BigRational> {
    if d == 0 {
        return Err(Error::NotADivisor(0));
    }
    if f.precision() < d as usize {
        return Err(Error::Invalid(format!(
            "precision {} < {} needed for l_{}",
            f.precision(),
            d,
            d
        )));
    }
    let mut acc = BigRational::zero();
    for t in arith::divisors(d) {
        let mu = arith::moebius(d / t);
        if mu == 0 {
            continue;
        }
        let w = BigInt::from(mu) * BigInt::from(arith::sigma1(d / t));
        acc += f.coeff(t as usize) * BigRational::from(w);
    }
    Ok(acc)
}

/// Index of span{f_d} inside the saturated integral lattice, factored over
/// {2, 3} and the primes dividing N.
pub fn fd_basis_index(n: u64) -> Result<SupportedIndex> {
    let saturated = eis_integral_lattice(n)?.lattice;
    let raw = Lattice::from_rows(&fd_coefficient_rows(n)?);
    let value = index(&saturated, &raw)?;
    Ok(SupportedIndex::from_value(value, n))
}
