//! Weight-2 modular symbols for `Gamma_0(N)` in the Manin presentation:
//! the free abelian group on `P^1(Z/N)` modulo the relations `x + xs = 0`
//! and `x + xt + xt^2 = 0`, where `s = [[0,-1],[1,0]]` and
//! `t = [[0,-1],[1,-1]]` act on the right of the row vector `(c, d)`. The
//! relation lattice is saturated before quotienting, which discards only 2-
//! and 3-torsion and keeps everything of interest away from `6N`; the
//! quotient has rank `2g + (number of cusps) - 1`. The boundary map sends
//! `[c : d]` to the cusp class of `gcd(c, N)` minus that of `gcd(d, N)`,
//! and its kernel is the cuspidal subspace of rank `2g`.
//!
//! Hecke operators act on Manin symbols through Merel's matrices
//! `{[[a,b],[c,d]] : ad - bc = n, a > b >= 0, d > c >= 0}` when
//! `gcd(n, N) = 1`, and through the coset representatives `[[1,j],[0,l]]`,
//! `0 <= j < l`, for `U_l` at `l | N`; the `U_l` images are converted back
//! to Manin symbols by continued fractions. Every operator is checked at
//! runtime to preserve the relation lattice before it is pushed to the
//! quotient.
//!
//! Cusp form coefficients come out of the duality `a_n(f) = a_1(T_n f)`:
//! the span of `T_1, ..., T_B` (Sturm bound `B`) restricted to the cuspidal
//! subspace is a rank-`g` lattice, and the coordinate vector of `T_n` in
//! its basis lists the `n`-th coefficients of a dual basis of integral cusp
//! forms. Saturating the resulting coefficient rows yields an echelonized
//! integral basis of the cusp form lattice.

use crate::arith;
use crate::linalg::{
    charpoly, poly_eval, poly_sqrt, quotient_with_section, right_kernel, IntMatrix, Lattice,
};
use crate::qexp::{self, Series};
use crate::{Error, Result};
use num::{BigInt, BigRational, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// The Manin-symbol presentation of weight-2 modular symbols at level `N`,
/// together with its boundary map and cuspidal subspace.
pub struct ManinSpace {
    pub level: u64,
    /// Canonical representatives of `P^1(Z/N)`: the lexicographically
    /// smallest pair in each unit-scaling orbit, in sorted order.
    reps: Vec<(u64, u64)>,
    /// `c * N + d -> index` of the canonical representative, for every
    /// primitive pair `(c, d)`.
    lookup: Vec<Option<usize>>,
    /// Quotient map `K: Z^n -> Z^m` with kernel the saturated relation
    /// lattice.
    quot: IntMatrix,
    /// Integer section `S` of `K`, so `K S = I`.
    sect: IntMatrix,
    /// Raw relation rows, kept for operator-descent assertions.
    relations: IntMatrix,
    /// Boundary matrix on quotient coordinates; one row per divisor of `N`
    /// in increasing order.
    boundary_q: IntMatrix,
    /// Kernel of the boundary: the cuspidal subspace, saturated of rank
    /// `2g`.
    cuspidal: Lattice,
    genus: usize,
}

/// Exact Hecke matrix on the basis of the cuspidal subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeMatrix {
    pub index: u64,
    pub matrix: IntMatrix,
}

/// Genus of `X_0(N)` for square-free `N`:
/// `g = 1 + mu/12 - nu2/4 - nu3/3 - nuinf/2` with `mu = prod (l + 1)`,
/// `nu2 = prod (1 + (-1|l))`, `nu3 = prod (1 + (-3|l))` and
/// `nuinf = 2^(number of prime factors)`.
pub fn genus_formula(n: u64) -> Result<usize> {
    crate::validate_level(n)?;
    let primes = arith::prime_divisors(n);
    let mu: i64 = primes.iter().map(|&l| l as i64 + 1).product();
    let nu2: i64 = primes
        .iter()
        .map(|&l| match l % 4 {
            1 => 2,
            2 => 1,
            _ => 0,
        })
        .product();
    let nu3: i64 = primes
        .iter()
        .map(|&l| match l % 3 {
            0 => 1,
            1 => 2,
            _ => 0,
        })
        .product();
    let nu_inf: i64 = 1 << primes.len();
    let twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * nu_inf;
    assert!(twelve_g >= 0 && twelve_g % 12 == 0, "genus formula arithmetic");
    Ok((twelve_g / 12) as usize)
}

fn canonical(c: u64, d: u64, n: u64, units: &[u64]) -> (u64, u64) {
    let mut best = (u64::MAX, u64::MAX);
    for &u in units {
        let cand = (u * c % n, u * d % n);
        if cand < best {
            best = cand;
        }
    }
    best
}

/// Merel's matrices of determinant `n`: `[[a,b],[c,d]]` with `ad - bc = n`,
/// `a > b >= 0`, `d > c >= 0`. For such a matrix `a + d <= n + 1`.
fn merel_matrices(n: u64) -> Vec<[i64; 4]> {
    let ni = n as i64;
    let mut out = Vec::new();
    for a in 1..=ni {
        for d in 1..=(ni + 1 - a) {
            let k = a * d - ni;
            if k < 0 {
                continue;
            }
            if k == 0 {
                for c in 0..d {
                    out.push([a, 0, c, d]);
                }
                for b in 1..a {
                    out.push([a, b, 0, d]);
                }
            } else {
                for b in 1..a {
                    if k % b == 0 && k / b < d {
                        out.push([a, b, k / b, d]);
                    }
                }
            }
        }
    }
    out
}

/// Lifts a primitive pair mod `n` to a pair of coprime integers.
fn lift_primitive(c: u64, d: u64, n: u64) -> (i64, i64) {
    let (ci, di, ni) = (c as i64, d as i64, n as i64);
    let c1 = if ci == 0 { ni } else { ci };
    for t in 0..=2 * ni {
        let d1 = di + t * ni;
        if arith::gcd(c1 as u64, d1 as u64) == 1 {
            return (c1, d1);
        }
    }
    unreachable!("no coprime lift of ({}, {}) mod {}", c, d, n);
}

/// Extended Euclid: returns `(g, x, y)` with `x a + y b = g = gcd(a, b)`.
fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i64, 0i64);
    let (mut y0, mut y1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        let r = r0 - q * r1;
        r0 = r1;
        r1 = r;
        let nx = x0 - q * x1;
        x0 = x1;
        x1 = nx;
        let ny = y0 - q * y1;
        y0 = y1;
        y1 = ny;
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

impl ManinSpace {
    pub fn new(n: u64) -> Result<ManinSpace> {
        crate::validate_level(n)?;
        let units: Vec<u64> = (1..n).filter(|&u| arith::gcd(u, n) == 1).collect();
        let mut canon_set: BTreeSet<(u64, u64)> = BTreeSet::new();
        for c in 0..n {
            for d in 0..n {
                if arith::gcd(arith::gcd(c, d), n) == 1 {
                    canon_set.insert(canonical(c, d, n, &units));
                }
            }
        }
        let reps: Vec<(u64, u64)> = canon_set.into_iter().collect();
        let mu: usize = arith::prime_divisors(n).iter().map(|&l| l as usize + 1).product();
        assert_eq!(reps.len(), mu, "P^1(Z/N) must have prod (l + 1) points");

        let mut lookup = vec![None; (n * n) as usize];
        for c in 0..n {
            for d in 0..n {
                if arith::gcd(arith::gcd(c, d), n) == 1 {
                    let can = canonical(c, d, n, &units);
                    let pos = reps.binary_search(&can).unwrap();
                    lookup[(c * n + d) as usize] = Some(pos);
                }
            }
        }

        let size = reps.len();
        let ni = n as i64;
        let look = |c: i64, d: i64| -> usize {
            let key = (c.rem_euclid(ni) as u64) * n + d.rem_euclid(ni) as u64;
            lookup[key as usize].expect("image of a primitive pair is primitive")
        };
        let mut rel_rows: Vec<Vec<BigInt>> = Vec::with_capacity(2 * size);
        for (i, &(c, d)) in reps.iter().enumerate() {
            let (ci, di) = (c as i64, d as i64);
            let mut sigma = vec![BigInt::zero(); size];
            sigma[i] += 1;
            sigma[look(di, -ci)] += 1;
            rel_rows.push(sigma);
            let mut tau = vec![BigInt::zero(); size];
            tau[i] += 1;
            tau[look(di, -ci - di)] += 1;
            tau[look(-ci - di, ci)] += 1;
            rel_rows.push(tau);
        }
        let relations = IntMatrix::from_rows(size, rel_rows);
        let rel_lat = Lattice::from_rows(&relations).saturate();
        let (quot, sect) = quotient_with_section(&rel_lat);

        let divs = arith::divisors(n);
        let mut boundary_free = IntMatrix::zeros(divs.len(), size);
        for (j, &(c, d)) in reps.iter().enumerate() {
            let top = divs.binary_search(&arith::gcd(c, n)).unwrap();
            let bot = divs.binary_search(&arith::gcd(d, n)).unwrap();
            *boundary_free.at_mut(top, j) += 1;
            *boundary_free.at_mut(bot, j) -= 1;
        }
        for i in 0..relations.rows {
            let image = boundary_free.mul_vec(relations.row(i));
            assert!(image.iter().all(|x| x.is_zero()), "boundary must kill the relations");
        }
        let boundary_q = boundary_free.mul(&sect);
        let cuspidal = right_kernel(&boundary_q);

        let genus = genus_formula(n)?;
        assert_eq!(cuspidal.rank(), 2 * genus, "cuspidal rank must be 2g");
        assert_eq!(quot.rows, 2 * genus + divs.len() - 1, "quotient rank must be 2g + c - 1");

        Ok(ManinSpace {
            level: n,
            reps,
            lookup,
            quot,
            sect,
            relations,
            boundary_q,
            cuspidal,
            genus,
        })
    }

    pub fn p1_size(&self) -> usize {
        self.reps.len()
    }

    /// Rank of the relation quotient: `2g + (number of cusps) - 1`.
    pub fn quotient_rank(&self) -> usize {
        self.quot.rows
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn cuspidal_rank(&self) -> usize {
        self.cuspidal.rank()
    }

    pub fn cuspidal_basis(&self) -> &Lattice {
        &self.cuspidal
    }

    /// Boundary matrix on quotient coordinates, rows indexed by the sorted
    /// divisors of the level.
    pub fn boundary_matrix(&self) -> &IntMatrix {
        &self.boundary_q
    }

    fn idx(&self, c: i64, d: i64) -> Option<usize> {
        let n = self.level as i64;
        let key = (c.rem_euclid(n) as u64) * self.level + d.rem_euclid(n) as u64;
        self.lookup[key as usize]
    }

    /// Accumulates `sign` times the modular symbol `{0, num/den}` into
    /// `out` (`den = 0` means the cusp at infinity). Manin's algorithm:
    /// `{0, p/q} = [(0 : 1)] + sum_k [(q_k : (-1)^(k-1) q_(k-1))]` over the
    /// continued-fraction convergents `p_k/q_k` of `p/q`.
    fn accumulate_path(&self, num: i64, den: i64, sign: i64, out: &mut [i64]) {
        out[self.idx(0, 1).expect("(0 : 1) is primitive")] += sign;
        if den == 0 {
            return;
        }
        let (mut p, mut q) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = arith::gcd(p.unsigned_abs(), q as u64) as i64;
        p /= g;
        q /= g;
        // q_(k-1), q_(k-2), starting at k = 0 with q_(-1) = 0, q_(-2) = 1.
        let (mut q_km1, mut q_km2) = (0i64, 1i64);
        let mut parity = -1i64; // (-1)^(k-1)
        while q != 0 {
            let a = p.div_euclid(q);
            let r = p - a * q;
            let q_k = a * q_km1 + q_km2;
            let i = self
                .idx(q_k, parity * q_km1)
                .expect("continued-fraction symbols are primitive");
            out[i] += sign;
            q_km2 = q_km1;
            q_km1 = q_k;
            parity = -parity;
            p = q;
            q = r;
        }
    }

    fn full_from_columns(&self, cols: &[Vec<i64>]) -> IntMatrix {
        let size = self.p1_size();
        let mut m = IntMatrix::zeros(size, size);
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                if v != 0 {
                    *m.at_mut(i, j) = BigInt::from(v);
                }
            }
        }
        m
    }

    /// `T_n` for `gcd(n, N) = 1` on the free module, by Merel's matrices;
    /// images that land on non-primitive pairs are dropped.
    fn t_coprime_full(&self, n: u64) -> IntMatrix {
        assert_eq!(arith::gcd(n, self.level), 1);
        let size = self.p1_size();
        let mut cols = vec![vec![0i64; size]; size];
        for g in merel_matrices(n) {
            let [a, b, c, d] = g;
            for (j, &(cx, dx)) in self.reps.iter().enumerate() {
                let (ci, di) = (cx as i64, dx as i64);
                if let Some(i) = self.idx(ci * a + di * c, ci * b + di * d) {
                    cols[j][i] += 1;
                }
            }
        }
        self.full_from_columns(&cols)
    }

    /// `U_l` for `l | N` on the free module, by the cosets `[[1,j],[0,l]]`.
    /// Each Manin symbol is lifted to `[[a,b],[c1,d1]]` in `SL_2(Z)` and
    /// the images of the path `{b/d1, a/c1}` are re-expanded into Manin
    /// symbols.
    fn u_full(&self, l: u64) -> IntMatrix {
        assert_eq!(self.level % l, 0);
        let size = self.p1_size();
        let li = l as i64;
        let mut cols = vec![vec![0i64; size]; size];
        for (j, &(c, d)) in self.reps.iter().enumerate() {
            let (c1, d1) = lift_primitive(c, d, self.level);
            let (g, x, y) = egcd(d1, c1);
            assert_eq!(g, 1);
            let (a, b) = (x, -y); // a d1 - b c1 = 1
            for jj in 0..li {
                // [[1,j],[0,l]] maps z to (z + j)/l; the lifted matrix has
                // columns (a, c1) and (b, d1), so it sends {0, oo} to
                // {b/d1, a/c1}.
                self.accumulate_path(b + jj * d1, li * d1, -1, &mut cols[j]);
                self.accumulate_path(a + jj * c1, li * c1, 1, &mut cols[j]);
            }
        }
        self.full_from_columns(&cols)
    }

    /// Pushes an operator on the free module down to the relation quotient,
    /// asserting first that it preserves the relation lattice.
    fn descend(&self, full: &IntMatrix) -> IntMatrix {
        for i in 0..self.relations.rows {
            let image = full.mul_vec(self.relations.row(i));
            let in_quot = self.quot.mul_vec(&image);
            assert!(
                in_quot.iter().all(|x| x.is_zero()),
                "operator does not preserve the relation lattice"
            );
        }
        self.quot.mul(full).mul(&self.sect)
    }

    fn quotient_prime(&self, l: u64) -> IntMatrix {
        if self.level % l == 0 {
            self.descend(&self.u_full(l))
        } else {
            self.descend(&self.t_coprime_full(l))
        }
    }

    fn quotient_prime_power(&self, l: u64, e: u32) -> IntMatrix {
        let t_l = self.quotient_prime(l);
        prime_power_from_prime(&t_l, l, e, self.level % l == 0)
    }

    /// `T_n` on the relation quotient, assembled multiplicatively from
    /// prime powers.
    fn quotient_hecke(&self, n: u64) -> IntMatrix {
        let mut acc = IntMatrix::identity(self.quotient_rank());
        for (l, e) in arith::factor(n) {
            acc = acc.mul(&self.quotient_prime_power(l, e));
        }
        acc
    }

    /// Restricts an operator on the quotient to the cuspidal subspace. Row
    /// `i` holds the coordinates of the image of the `i`-th cuspidal basis
    /// vector; integrality is guaranteed because the kernel is saturated
    /// and asserted here.
    fn restrict_cuspidal(&self, a: &IntMatrix) -> IntMatrix {
        let r = self.cuspidal.rank();
        let mut rows = Vec::with_capacity(r);
        for i in 0..r {
            let w = a.mul_vec(self.cuspidal.basis_row(i));
            let coords = self
                .cuspidal
                .coordinates(&w)
                .expect("cuspidal subspace must be Hecke stable");
            rows.push(coords);
        }
        IntMatrix::from_rows(r, rows)
    }
}

/// `T_(l^(k+1)) = T_l T_(l^k) - l T_(l^(k-1))` for `l` coprime to the
/// level; `U_(l^k) = U_l^k` for `l` dividing it.
fn prime_power_from_prime(t_l: &IntMatrix, l: u64, e: u32, dividing: bool) -> IntMatrix {
    if dividing {
        let mut cur = t_l.clone();
        for _ in 1..e {
            cur = cur.mul(t_l);
        }
        cur
    } else {
        let mut prev = IntMatrix::identity(t_l.rows);
        let mut cur = t_l.clone();
        for _ in 1..e {
            let next = t_l.mul(&cur).sub(&prev.scale(&BigInt::from(l)));
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// The Hecke operator `T_n` (or `U_n` parts at primes dividing `N`) on the
/// cuspidal subspace at level `N`.
pub fn hecke_matrix(ms: &ManinSpace, n: u64) -> Result<HeckeMatrix> {
    if n == 0 {
        return Err(Error::Invalid("Hecke index must be positive".into()));
    }
    Ok(HeckeMatrix {
        index: n,
        matrix: ms.restrict_cuspidal(&ms.quotient_hecke(n)),
    })
}

/// The characteristic polynomial of `T_n` on the cuspidal subspace is a
/// perfect square (the subspace is two copies of the homology of each
/// eigenform); returns the monic square root, coefficient of `x^k` at
/// index `k`. Panics if the polynomial is not a square, since that would
/// mean the presentation is wrong.
pub fn cuspidal_charpoly_sqrt(ms: &ManinSpace, n: u64) -> Result<Vec<BigInt>> {
    let hm = hecke_matrix(ms, n)?;
    let cp = charpoly(&hm.matrix);
    Ok(poly_sqrt(&cp).expect("cuspidal characteristic polynomial must be a square"))
}

/// `|J_0(N)(F_q)| = P_q(q + 1)` where `P_q` is the square root of the
/// characteristic polynomial of `T_q` on the cuspidal subspace. Requires
/// `q` prime, `q` not dividing `2N` (good reduction and an honest count).
pub fn jacobian_point_count(n: u64, q: u64) -> Result<BigInt> {
    crate::validate_level(n)?;
    if !arith::is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if (2 * n) % q == 0 {
        return Err(Error::Invalid(format!("q = {} divides 2N = {}", q, 2 * n)));
    }
    let ms = ManinSpace::new(n)?;
    let p_q = cuspidal_charpoly_sqrt(&ms, q)?;
    let count = poly_eval(&p_q, &BigInt::from(q + 1));
    assert!(count.is_positive(), "point count must be positive");
    Ok(count)
}

/// Incremental interface to cusp form coefficients at a fixed level: owns
/// the modular symbol space, caches Hecke matrices on the cuspidal
/// subspace, and exposes the coefficients of the dual basis attached to
/// the lattice spanned by `T_1, ..., T_B`.
pub struct CuspformEngine {
    ms: ManinSpace,
    sturm: usize,
    /// Lattice spanned by the flattened cuspidal `T_1..T_B`; rank `g`.
    op_lattice: Lattice,
    prime_cache: BTreeMap<u64, IntMatrix>,
    coeff_cache: BTreeMap<u64, Vec<BigInt>>,
}

impl CuspformEngine {
    pub fn new(n: u64) -> Result<CuspformEngine> {
        let ms = ManinSpace::new(n)?;
        let sturm = qexp::sturm_bound(n)?;
        let g = ms.genus();
        let dim = 2 * g;
        let mut eng = CuspformEngine {
            ms,
            sturm,
            op_lattice: Lattice::zero(dim * dim),
            prime_cache: BTreeMap::new(),
            coeff_cache: BTreeMap::new(),
        };
        let mut rows = Vec::with_capacity(sturm);
        for k in 1..=sturm as u64 {
            rows.push(eng.cuspidal_hecke(k).flatten());
        }
        let lat = Lattice::from_rows(&IntMatrix::from_rows(dim * dim, rows));
        assert_eq!(lat.rank(), g, "Hecke span on the cuspidal subspace must have rank g");
        eng.op_lattice = lat;
        Ok(eng)
    }

    pub fn manin(&self) -> &ManinSpace {
        &self.ms
    }

    pub fn genus(&self) -> usize {
        self.ms.genus()
    }

    pub fn sturm(&self) -> usize {
        self.sturm
    }

    fn cuspidal_prime(&mut self, l: u64) -> IntMatrix {
        if let Some(m) = self.prime_cache.get(&l) {
            return m.clone();
        }
        let mat = self.ms.restrict_cuspidal(&self.ms.quotient_prime(l));
        self.prime_cache.insert(l, mat.clone());
        mat
    }

    /// `T_n` on the cuspidal subspace, assembled from cached prime
    /// matrices.
    pub fn cuspidal_hecke(&mut self, n: u64) -> IntMatrix {
        assert!(n >= 1, "Hecke index must be positive");
        let mut acc = IntMatrix::identity(2 * self.ms.genus());
        for (l, e) in arith::factor(n) {
            let t_l = self.cuspidal_prime(l);
            acc = acc.mul(&prime_power_from_prime(&t_l, l, e, self.ms.level % l == 0));
        }
        acc
    }

    /// Coordinates of `T_n` in the basis of the operator lattice; entry
    /// `i` is the `n`-th coefficient of the `i`-th dual basis cusp form.
    /// `T_n` always lies in the integral span of `T_1..T_B`.
    pub fn dual_coeffs(&mut self, n: u64) -> Vec<BigInt> {
        if let Some(v) = self.coeff_cache.get(&n) {
            return v.clone();
        }
        let t_n = self.cuspidal_hecke(n);
        let coords = self
            .op_lattice
            .coordinates(&t_n.flatten())
            .expect("T_n must lie in the integral span of T_1..T_B");
        self.coeff_cache.insert(n, coords.clone());
        coords
    }
}

/// Echelonized basis of the lattice of cusp forms with integer
/// coefficients, as q-expansions carrying `a_0..a_prec` (`a_0 = 0`). The
/// coefficient rows of the dual basis are saturated over the window
/// `1..max(prec, B)`, which pins down the integral lattice exactly.
pub fn integral_cuspform_basis(n: u64, prec: usize) -> Result<Vec<Series>> {
    let mut eng = CuspformEngine::new(n)?;
    cuspform_basis_from_engine(&mut eng, prec)
}

/// Same as [`integral_cuspform_basis`], reusing an existing engine.
pub fn cuspform_basis_from_engine(eng: &mut CuspformEngine, prec: usize) -> Result<Vec<Series>> {
    let g = eng.genus();
    if g == 0 {
        return Ok(Vec::new());
    }
    let window = prec.max(eng.sturm());
    let mut rows = vec![vec![BigInt::zero(); window]; g];
    for k in 1..=window as u64 {
        let col = eng.dual_coeffs(k);
        for i in 0..g {
            rows[i][k as usize - 1] = col[i].clone();
        }
    }
    let sat = Lattice::from_rows(&IntMatrix::from_rows(window, rows)).saturate();
    assert_eq!(sat.rank(), g, "cusp form coefficient lattice must have rank g");
    let mut out = Vec::with_capacity(g);
    for i in 0..g {
        let row = sat.basis_row(i);
        let mut coeffs = Vec::with_capacity(prec + 1);
        coeffs.push(BigRational::zero());
        for k in 0..prec {
            coeffs.push(BigRational::from(row[k].clone()));
        }
        out.push(Series::new(coeffs));
    }
    Ok(out)
}
