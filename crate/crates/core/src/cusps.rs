//! Cusps of `X_0(N)` for square-free `N` and the cuspidal subgroup of
//! `J_0(N)`. The cusps are indexed by the divisors `c | N`: the divisor
//! `c = 1` is the cusp `0`, `c = N` is infinity, and the width of the cusp
//! `c` is `N/c`. An eta quotient `prod_d eta(dz)^(r_d)` of weight 0 has
//! order `(N/24) sum_d r_d gcd(c,d)^2 / (c d)` at the cusp `c` (Ligozat);
//! summed over cusps this is always `(mu/24) sum_d r_d = 0`.
//!
//! The units `h_d = (eta(dz)/eta(z))^(12N)` have everywhere-integral
//! divisors, and the group cut out here is `C = Div^0(cusps) / <div h_d>`.
//! Its `p`-primary part for `p` not dividing `6N` agrees with the honest
//! cuspidal subgroup, because the divisors of all admissible eta units
//! (weight 0, both 24-divisibility conditions, square total index) contain
//! the `div h_d` with index supported in `{2, 3}` and the primes dividing
//! `N`.
//!
//! Hecke operators act on the Eisenstein series `E_d` by their explicit
//! eigenvalues, and the residue map `f_d -> div h_d` transports that
//! action to cusp divisors: on the basis `{div h_d}` the matrix of `T_n`
//! is `P^(-1) diag(a_n(E_d)) P`, where `P` writes the `E_d` in the
//! f-basis.

use crate::arith;
use crate::eisenstein::{self, SupportedIndex};
use crate::linalg::{self, right_kernel, snf_with_basis, IntMatrix, Lattice, QMatrix};
use crate::qexp::{self, EtaExponent};
use crate::{Error, Result};
use num::{BigInt, BigRational, One, Zero};

/// A cusp of `X_0(N)`, indexed by a divisor of the level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cusp {
    pub divisor: u64,
    pub width: u64,
}

/// All cusps, ascending in the indexing divisor; `divisor = 1` is the cusp
/// `0` and `divisor = N` is infinity.
pub fn cusp_set(n: u64) -> Result<Vec<Cusp>> {
    crate::validate_level(n)?;
    Ok(arith::divisors(n)
        .into_iter()
        .map(|c| Cusp { divisor: c, width: n / c })
        .collect())
}

/// Orders at each cusp for an exponent vector aligned with the sorted
/// divisors of `n`. The total degree is asserted to vanish.
fn ligozat_orders(n: u64, exps: &[BigInt]) -> Vec<BigRational> {
    let divs = arith::divisors(n);
    assert_eq!(exps.len(), divs.len());
    let scale = BigRational::new(BigInt::from(n), BigInt::from(24));
    let mut out = Vec::with_capacity(divs.len());
    for &c in &divs {
        let mut acc = BigRational::zero();
        for (j, &d) in divs.iter().enumerate() {
            let g = arith::gcd(c, d);
            acc += BigRational::new(BigInt::from(g * g), BigInt::from(c * d))
                * BigRational::from(exps[j].clone());
        }
        out.push(&scale * acc);
    }
    let degree: BigRational = out.iter().sum();
    assert!(degree.is_zero(), "eta quotient divisor must have degree 0");
    out
}

/// The divisor of a weight-0 eta quotient as cusp orders, one entry per
/// element of [`cusp_set`].
pub fn ligozat_divisor(exps: &EtaExponent) -> Vec<BigRational> {
    let vec: Vec<BigInt> = exps.r.iter().map(|&(_, e)| BigInt::from(e)).collect();
    ligozat_orders(exps.level, &vec)
}

/// The divisor of the unit `h_d`; always integral.
pub fn h_divisor(n: u64, d: u64) -> Result<Vec<BigInt>> {
    let h = EtaExponent::h_d(n, d)?;
    Ok(ligozat_divisor(&h)
        .into_iter()
        .map(|x| {
            assert!(x.is_integer(), "div h_d must be integral");
            x.to_integer()
        })
        .collect())
}

/// Rows are `div h_d` for the divisors `d > 1` of `N`, ascending; columns
/// follow [`cusp_set`]. This is the matrix of the residue map on the
/// f-basis: the order of `h_d` at infinity equals the constant term
/// `N(d-1)/2` of `f_d`, which is asserted.
pub fn residue_matrix(n: u64) -> Result<IntMatrix> {
    crate::validate_level(n)?;
    let divs: Vec<u64> = arith::divisors(n).into_iter().filter(|&d| d > 1).collect();
    let cusps = arith::divisors(n).len();
    let mut rows = Vec::with_capacity(divs.len());
    for &d in &divs {
        let v = h_divisor(n, d)?;
        assert_eq!(
            v[cusps - 1],
            qexp::fd_coeff(n, d, 0),
            "order of h_d at infinity must equal the constant term of f_d"
        );
        rows.push(v);
    }
    let m = IntMatrix::from_rows(cusps, rows);
    assert_eq!(
        Lattice::from_rows(&m).rank(),
        divs.len(),
        "the divisors div h_d must be independent"
    );
    Ok(m)
}

/// The lattice of admissible exponent vectors: weight 0, `24` divides both
/// `sum d r_d` and `sum (N/d) r_d`, and `prod d^(r_d)` a square. These are
/// exactly Ligozat's conditions for the eta quotient to be a modular
/// function on `X_0(N)`. Computed as the kernel of the constraint matrix
/// with auxiliary divisibility variables, projected back onto the exponent
/// coordinates (the auxiliary values are determined by the exponents, so
/// nothing is lost).
pub fn unit_exponent_lattice(n: u64) -> Result<Lattice> {
    crate::validate_level(n)?;
    let divs = arith::divisors(n);
    let primes = arith::prime_divisors(n);
    let k = divs.len();
    let cols = k + 2 + primes.len();
    let mut rows = Vec::new();
    let mut weight = vec![BigInt::zero(); cols];
    for j in 0..k {
        weight[j] = BigInt::one();
    }
    rows.push(weight);
    let mut fwd = vec![BigInt::zero(); cols];
    for (j, &d) in divs.iter().enumerate() {
        fwd[j] = BigInt::from(d);
    }
    fwd[k] = BigInt::from(-24);
    rows.push(fwd);
    let mut dual = vec![BigInt::zero(); cols];
    for (j, &d) in divs.iter().enumerate() {
        dual[j] = BigInt::from(n / d);
    }
    dual[k + 1] = BigInt::from(-24);
    rows.push(dual);
    for (i, &l) in primes.iter().enumerate() {
        let mut sq = vec![BigInt::zero(); cols];
        for (j, &d) in divs.iter().enumerate() {
            if d % l == 0 {
                sq[j] = BigInt::one();
            }
        }
        sq[k + 2 + i] = BigInt::from(-2);
        rows.push(sq);
    }
    let constraints = IntMatrix::from_rows(cols, rows);
    let ker = right_kernel(&constraints);
    let proj_rows: Vec<Vec<BigInt>> =
        (0..ker.rank()).map(|i| ker.basis_row(i)[..k].to_vec()).collect();
    let lat = Lattice::from_rows(&IntMatrix::from_rows(k, proj_rows));
    assert_eq!(lat.rank(), k - 1, "admissible exponent lattice must have corank 1");
    Ok(lat)
}

/// The lattice of divisors of admissible eta units, inside `Z^cusps`.
/// Entries are integral because admissible quotients are genuine modular
/// functions. Contains every `div h_d`.
pub fn unit_divisor_lattice(n: u64) -> Result<Lattice> {
    let expo = unit_exponent_lattice(n)?;
    let cusps = arith::divisors(n).len();
    let mut rows = Vec::with_capacity(expo.rank());
    for i in 0..expo.rank() {
        let orders = ligozat_orders(n, expo.basis_row(i));
        let row: Vec<BigInt> = orders
            .into_iter()
            .map(|x| {
                assert!(x.is_integer(), "admissible unit divisor must be integral");
                x.to_integer()
            })
            .collect();
        rows.push(row);
    }
    let lat = Lattice::from_rows(&IntMatrix::from_rows(cusps, rows));
    assert_eq!(lat.rank(), cusps - 1, "unit divisor lattice must have corank 1");
    let h_rows = residue_matrix(n)?;
    for i in 0..h_rows.rows {
        assert!(lat.contains(h_rows.row(i)), "div h_d must be an admissible unit divisor");
    }
    Ok(lat)
}

/// Index of the span of the `div h_d` inside the full unit divisor
/// lattice, factored over `{2, 3}` and the primes dividing `N`. Away from
/// that set the two lattices agree, which is why the group built from the
/// `h_d` alone has the right `p`-primary part.
pub fn unit_lattice_index(n: u64) -> Result<SupportedIndex> {
    let full = unit_divisor_lattice(n)?;
    let sub = Lattice::from_rows(&residue_matrix(n)?);
    let value = linalg::index(&full, &sub)?;
    Ok(SupportedIndex::from_value(value, n))
}

/// `C = Div^0(cusps) / <div h_d>` in the coordinates `e_c - e_N` (`c`
/// running over the divisors other than `N`), with cyclic decomposition
/// and explicit generators.
#[derive(Clone, Debug)]
pub struct CuspidalGroup {
    pub level: u64,
    pub cusps: Vec<Cusp>,
    /// Nontrivial invariant factors, in divisibility-chain order.
    pub invariants: Vec<BigInt>,
    /// Row `i` generates the cyclic factor of order `invariants[i]`,
    /// written in the `e_c - e_N` coordinates.
    pub generators: IntMatrix,
    /// The relation rows (`div h_d` in the same coordinates).
    relations: IntMatrix,
}

impl CuspidalGroup {
    pub fn order(&self) -> BigInt {
        self.invariants.iter().product::<BigInt>().max(BigInt::one())
    }

    /// `ord_p` of the group order.
    pub fn p_order(&self, p: u64) -> u32 {
        self.invariants.iter().map(|d| arith::valuation_big(d, p)).sum()
    }

    /// Exponents `e` with `p^e` a nontrivial cyclic factor of the
    /// p-primary part, in chain order.
    pub fn p_invariants(&self, p: u64) -> Vec<u32> {
        self.invariants
            .iter()
            .map(|d| arith::valuation_big(d, p))
            .filter(|&e| e > 0)
            .collect()
    }

    /// Generators of the p-primary part: pairs `(e, vector)` where the
    /// vector has exact order `p^e`. Obtained by scaling each cyclic
    /// generator by the prime-to-p part of its order.
    pub fn p_part_generators(&self, p: u64) -> Vec<(u32, Vec<BigInt>)> {
        let mut out = Vec::new();
        for (i, d) in self.invariants.iter().enumerate() {
            let v = arith::valuation_big(d, p);
            if v == 0 {
                continue;
            }
            let cofactor = d / BigInt::from(p).pow(v);
            let g: Vec<BigInt> =
                self.generators.row(i).iter().map(|x| x * &cofactor).collect();
            out.push((v, g));
        }
        out
    }

    pub fn relation_rows(&self) -> &IntMatrix {
        &self.relations
    }
}

/// Computes the cuspidal group at level `n` by Smith normal form of the
/// `div h_d` relation matrix.
pub fn cuspidal_group(n: u64) -> Result<CuspidalGroup> {
    let cusps = cusp_set(n)?;
    let c = cusps.len();
    let full = residue_matrix(n)?;
    // drop the e_N column: Div^0 is free on e_c - e_N
    let rel_rows: Vec<Vec<BigInt>> =
        (0..full.rows).map(|i| full.row(i)[..c - 1].to_vec()).collect();
    let relations = IntMatrix::from_rows(c - 1, rel_rows);
    let decomp = snf_with_basis(&relations);
    let inv = decomp.invariants();
    assert!(inv.is_finite(), "cuspidal group must be finite");
    let mut invariants = Vec::new();
    let mut gens = Vec::new();
    for (i, d) in decomp.diagonal.iter().enumerate() {
        if !d.is_zero() && !d.is_one() {
            invariants.push(d.clone());
            gens.push(decomp.v_inv.row_vec(i));
        }
    }
    Ok(CuspidalGroup {
        level: n,
        cusps,
        invariants,
        generators: IntMatrix::from_rows(c - 1, gens),
        relations,
    })
}

/// The Hecke operator `T_n` transported to cusp divisors through the
/// residue map: on the basis `{div h_d : d | N, d > 1}` it acts (on row
/// vectors of coordinates) by `P^(-1) diag(a_n(E_d)) P`, with `P` the
/// matrix writing each `E_d` in the f-basis. Denominators of the entries
/// only involve 2, 3 and primes dividing `N`.
#[derive(Clone, Debug)]
pub struct CuspHecke {
    pub level: u64,
    pub index: u64,
    pub matrix: QMatrix,
}

impl CuspHecke {
    /// Image of a rational combination of the `div h_d` under the
    /// operator; `coords` and the result are row vectors in that basis.
    pub fn apply(&self, coords: &[BigRational]) -> Vec<BigRational> {
        let k = self.matrix.rows;
        assert_eq!(coords.len(), k);
        let mut out = vec![BigRational::zero(); k];
        for (j, slot) in out.iter_mut().enumerate() {
            for (i, c) in coords.iter().enumerate() {
                *slot += c * self.matrix.at(i, j);
            }
        }
        out
    }

    /// True when every entry is p-integral.
    pub fn is_p_integral(&self, p: u64) -> bool {
        (0..self.matrix.rows).all(|i| {
            (0..self.matrix.cols).all(|j| linalg::is_p_integral(self.matrix.at(i, j), p))
        })
    }
}

/// Builds the transported action of `T_idx` on the `div h_d` basis.
pub fn transported_hecke_on_cusps(n: u64, idx: u64) -> Result<CuspHecke> {
    crate::validate_level(n)?;
    if idx == 0 {
        return Err(Error::Invalid("Hecke index must be positive".into()));
    }
    let p_mat = eisenstein::e_in_f_matrix(n)?;
    let p_inv = p_mat.inverse().expect("E-to-f change of basis must be invertible");
    let divs: Vec<u64> = arith::divisors(n).into_iter().filter(|&d| d > 1).collect();
    let mut lambda = QMatrix::zeros(divs.len(), divs.len());
    for (i, &d) in divs.iter().enumerate() {
        *lambda.at_mut(i, i) = BigRational::from(eisenstein::ed_coeff(n, d, idx));
    }
    Ok(CuspHecke { level: n, index: idx, matrix: p_inv.mul(&lambda).mul(&p_mat) })
}

/// The functional `lambda` on the p-primary part of the cuspidal group,
/// with the Hecke-module cyclicity certificate derived from it.
#[derive(Clone, Debug)]
pub struct LambdaData {
    pub level: u64,
    pub p: u64,
    /// `lambda` of each p-primary generator, normalized into `[0, 1)`
    /// with denominator a power of `p`.
    pub values: Vec<BigRational>,
    /// The denominators `p^w` of the values, in generator order.
    pub denominators: Vec<BigInt>,
    /// Whether the functionals `lambda o t`, for `t` running over lifts
    /// of a basis of the cuspidal Hecke algebra, generate the full dual
    /// of the p-primary part. This certifies that the p-primary part is
    /// a cyclic Hecke module; a trivial p-primary part counts as cyclic.
    pub cyclic: bool,
}

/// Evaluates `lambda` on the p-primary generators of the cuspidal group
/// and runs the cyclicity test.
///
/// A class `x` with Eisenstein lift `e = sum y_d f_d` (solving
/// `sum y_d div h_d = x` on cusp divisors) pairs to
/// `lambda(x) = a_1(f - e) mod Z_(p)`, where `f` is the unique-up-to-`M`
/// cusp form with `e - f` p-integral in `M`. The value is well defined
/// modulo `Z_(p)` because shifting the lift by an integral form moves
/// `a_1(f - e)` by an integer. Hecke operators act on `lambda` through
/// their matrices on `M` applied to the Eisenstein lift.
pub fn lambda_and_cyclicity(
    ha: &crate::hecke::HeckeAlgebra,
    cg: &CuspidalGroup,
    p: u64,
) -> Result<LambdaData> {
    assert_eq!(ha.level, cg.level, "algebra and cuspidal group must share a level");
    crate::validate_prime(cg.level, p)?;
    let gens = cg.p_part_generators(p);
    let s = gens.len();
    if s == 0 {
        return Ok(LambdaData {
            level: cg.level,
            p,
            values: Vec::new(),
            denominators: Vec::new(),
            cyclic: true,
        });
    }
    let k = ha.rank;
    let rel_q = QMatrix::from_int(cg.relation_rows());
    let e_t = QMatrix::from_int(&ha.mb.e_in_m).transpose();
    let s_lat = Lattice::from_rows(&ha.mb.s_in_m);
    let (ks, sec) = linalg::quotient_with_section(&s_lat);
    let ks_q = QMatrix::from_int(&ks);
    let sec_q = QMatrix::from_int(&sec);
    let a1r: Vec<BigRational> =
        ha.mb.a1.iter().map(|x| BigRational::from(x.clone())).collect();

    let lambda_of = |e: &[BigRational]| -> Result<(BigInt, u32)> {
        let quot = ks_q.mul_vec(e);
        for x in &quot {
            if !linalg::is_p_integral(x, p) {
                return Err(Error::Invalid(format!(
                    "lambda undefined at p = {}: Eisenstein lift is not \
                     p-integral modulo cusp forms",
                    p
                )));
            }
        }
        let f = sec_q.mul_vec(&quot);
        let mut acc = BigRational::zero();
        for i in 0..k {
            acc += (&f[i] - &e[i]) * &a1r[i];
        }
        Ok(reduce_mod_z_localized(&acc, p))
    };

    // Eisenstein lifts of the generators, in M-coordinates.
    let mut e_coords = Vec::with_capacity(s);
    for (_, gen) in &gens {
        let target: Vec<BigRational> =
            gen.iter().map(|x| BigRational::from(x.clone())).collect();
        let y = rel_q
            .solve_left(&target)
            .expect("the div h_d relation matrix is invertible");
        e_coords.push(e_t.mul_vec(&y));
    }

    let mut values = Vec::with_capacity(s);
    let mut denominators = Vec::with_capacity(s);
    for (i, (v, _)) in gens.iter().enumerate() {
        let (num, w) = lambda_of(&e_coords[i])?;
        if w > *v {
            return Err(Error::Invalid(
                "lambda value order exceeds the generator order".into(),
            ));
        }
        let pw = BigInt::from(p).pow(w);
        values.push(BigRational::new(num, pw.clone()));
        denominators.push(pw);
    }

    let cyclic = if ha.mb.genus == 0 {
        // no cusp forms, hence no Hecke functionals: cyclic only when the
        // p-primary part is trivial, and s > 0 here
        false
    } else {
        let cd = ha.cuspidal_data();
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for lift in &cd.lifts {
            let lq = QMatrix::from_int(lift).transpose();
            let mut row = Vec::with_capacity(s);
            for (i, (v, _)) in gens.iter().enumerate() {
                let e_img = lq.mul_vec(&e_coords[i]);
                let (num, w) = lambda_of(&e_img)?;
                if w > *v {
                    return Err(Error::Invalid(
                        "lambda value order exceeds the generator order".into(),
                    ));
                }
                row.push(num * BigInt::from(p).pow(*v - w));
            }
            rows.push(row);
        }
        for (i, (v, _)) in gens.iter().enumerate() {
            let mut r = vec![BigInt::zero(); s];
            r[i] = BigInt::from(p).pow(*v);
            rows.push(r);
        }
        linalg::snf(&IntMatrix::from_rows(s, rows)).is_trivial()
    };

    Ok(LambdaData { level: cg.level, p, values, denominators, cyclic })
}

/// Reduces `x` modulo `Z_(p)`: returns `(a, w)` with the class of `x`
/// equal to `a / p^w`, `0 <= a < p^w`, and `p` not dividing `a` when
/// `w > 0`.
fn reduce_mod_z_localized(x: &BigRational, p: u64) -> (BigInt, u32) {
    let den = x.denom();
    let w = arith::valuation_big(den, p);
    if w == 0 {
        return (BigInt::zero(), 0);
    }
    let pw = BigInt::from(p).pow(w);
    let coprime_part = den / &pw;
    let inv = mod_inverse(&coprime_part, &pw);
    let num = ((x.numer() * inv) % &pw + &pw) % &pw;
    (num, w)
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> BigInt {
    let e = num::Integer::extended_gcd(a, modulus);
    assert!(e.gcd.is_one(), "inverse requires coprime arguments");
    ((e.x % modulus) + modulus) % modulus
}
