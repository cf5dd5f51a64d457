//! Smith normal form and abelian invariant factors. The convention
//! throughout: the rows of a matrix are relations inside `Z^cols`, and `snf`
//! describes the cokernel `Z^cols / rowspace`. The variant with basis
//! tracking also returns generators for the cyclic factors, which is what
//! the cuspidal subgroup computation needs.

use super::IntMatrix;
use num::{BigInt, Integer, Signed, Zero};
use std::fmt;

/// Invariant factors d_1 | d_2 | ... of a finitely generated abelian group,
/// every entry > 1, with one 0 per free factor at the end.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbelianInvariants {
    pub factors: Vec<BigInt>,
}

impl AbelianInvariants {
    fn from_diagonal(diag: &[BigInt], ambient: usize) -> Self {
        let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
        let mut factors: Vec<BigInt> = diag
            .iter()
            .filter(|d| !d.is_zero() && **d != BigInt::from(1))
            .cloned()
            .collect();
        factors.extend(std::iter::repeat(BigInt::zero()).take(ambient - nonzero));
        AbelianInvariants { factors }
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.factors.iter().all(|d| !d.is_zero())
    }

    pub fn free_rank(&self) -> usize {
        self.factors.iter().filter(|d| d.is_zero()).count()
    }

    /// Order of the torsion part.
    pub fn torsion_order(&self) -> BigInt {
        self.factors
            .iter()
            .filter(|d| !d.is_zero())
            .product::<BigInt>()
            .max(BigInt::from(1))
    }

    /// ord_p of the torsion order.
    pub fn p_valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .filter(|d| !d.is_zero())
            .map(|d| crate::arith::valuation_big(d, p))
            .sum()
    }

    /// Exponents e with p^e a nontrivial invariant factor of the p-primary
    /// part, in chain order.
    pub fn p_invariants(&self, p: u64) -> Vec<u32> {
        self.factors
            .iter()
            .filter(|d| !d.is_zero())
            .map(|d| crate::arith::valuation_big(d, p))
            .filter(|&e| e > 0)
            .collect()
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Diagonalized relation matrix together with the inverse of the column
/// transform: u·a·v = d with v_inv = v^{-1}. Row i of v_inv, read in the
/// original coordinates of Z^cols, generates the i-th cyclic factor of the
/// cokernel.
pub struct SnfDecomp {
    pub diagonal: Vec<BigInt>,
    pub v_inv: IntMatrix,
    pub ambient: usize,
}

impl SnfDecomp {
    pub fn invariants(&self) -> AbelianInvariants {
        AbelianInvariants::from_diagonal(&self.diagonal, self.ambient)
    }
}

/// Invariant factors of the cokernel of `a` (rows are relations in
/// Z^cols).
pub fn snf(a: &IntMatrix) -> AbelianInvariants {
    snf_with_basis(a).invariants()
}

/// Smith normal form with tracking of the inverse column transform.
pub fn snf_with_basis(a: &IntMatrix) -> SnfDecomp {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut v_inv = IntMatrix::identity(n);
    let steps = m.min(n);

    for t in 0..steps {
        'pivot: loop {
            let Some((pi, pj)) = smallest_nonzero(&d, t) else {
                break 'pivot;
            };
            d.swap_rows(t, pi);
            swap_cols(&mut d, Some(&mut v_inv), t, pj);

            // Clear column t below the pivot.
            let mut dirty = false;
            for i in t + 1..m {
                if d.at(i, t).is_zero() {
                    continue;
                }
                let q = d.at(i, t).div_floor(&d.at(t, t).clone());
                row_sub_multiple(&mut d, i, t, &q);
                if !d.at(i, t).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'pivot;
            }
            // Clear row t to the right of the pivot.
            for j in t + 1..n {
                if d.at(t, j).is_zero() {
                    continue;
                }
                let q = d.at(t, j).div_floor(&d.at(t, t).clone());
                col_sub_multiple(&mut d, Some(&mut v_inv), j, t, &q);
                if !d.at(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'pivot;
            }
            // Enforce divisibility of the remaining block by the pivot.
            let pivot = d.at(t, t).clone();
            let mut fixed = true;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if !d.at(i, j).mod_floor(&pivot).is_zero() {
                        row_add(&mut d, t, i);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break 'pivot;
            }
        }
        if d.at(t, t).is_negative() {
            negate_col(&mut d, Some(&mut v_inv), t);
        }
    }

    let diagonal: Vec<BigInt> = (0..steps).map(|t| d.at(t, t).clone()).collect();
    for (t, x) in diagonal.iter().enumerate() {
        if t + 1 < diagonal.len() && !x.is_zero() {
            assert!(
                diagonal[t + 1].mod_floor(x).is_zero() || diagonal[t + 1].is_zero(),
                "divisibility chain broken"
            );
        }
    }
    SnfDecomp { diagonal, v_inv, ambient: n }
}

fn smallest_nonzero(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows {
        for j in t..d.cols {
            if d.at(i, j).is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if d.at(i, j).abs() < d.at(bi, bj).abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

fn row_sub_multiple(m: &mut IntMatrix, i: usize, k: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for j in 0..m.cols {
        let t = q * m.at(k, j);
        *m.at_mut(i, j) -= t;
    }
}

fn row_add(m: &mut IntMatrix, dst: usize, src: usize) {
    for j in 0..m.cols {
        let t = m.at(src, j).clone();
        *m.at_mut(dst, j) += t;
    }
}

// Column operations mirror into v_inv as the inverse row operation, so that
// v_inv stays the exact inverse of the accumulated column transform.

fn swap_cols(m: &mut IntMatrix, v_inv: Option<&mut IntMatrix>, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows {
        let x = m.at(i, a).clone();
        let y = m.at(i, b).clone();
        *m.at_mut(i, a) = y;
        *m.at_mut(i, b) = x;
    }
    if let Some(v) = v_inv {
        v.swap_rows(a, b);
    }
}

fn col_sub_multiple(
    m: &mut IntMatrix,
    v_inv: Option<&mut IntMatrix>,
    j: usize,
    k: usize,
    q: &BigInt,
) {
    if q.is_zero() {
        return;
    }
    for i in 0..m.rows {
        let t = q * m.at(i, k);
        *m.at_mut(i, j) -= t;
    }
    // col_j -= q*col_k has inverse col_j += q*col_k, i.e. row_k += q*row_j
    // on the inverse matrix.
    if let Some(v) = v_inv {
        for c in 0..v.cols {
            let t = q * v.at(j, c);
            *v.at_mut(k, c) += t;
        }
    }
}

fn negate_col(m: &mut IntMatrix, v_inv: Option<&mut IntMatrix>, j: usize) {
    for i in 0..m.rows {
        let x = -m.at(i, j).clone();
        *m.at_mut(i, j) = x;
    }
    if let Some(v) = v_inv {
        for c in 0..v.cols {
            let x = -v.at(j, c).clone();
            *v.at_mut(j, c) = x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors_i64(a: &IntMatrix) -> Vec<i64> {
        snf(a)
            .factors
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect()
    }

    #[test]
    fn test_snf_diag() {
        let a = IntMatrix::from_i64(&[&[2, 0], &[0, 4]]);
        assert_eq!(factors_i64(&a), vec![2, 4]);
    }

    #[test]
    fn test_snf_identity() {
        let a = IntMatrix::identity(3);
        assert!(snf(&a).is_trivial());
    }

    #[test]
    fn test_snf_zero_map() {
        let a = IntMatrix::from_i64(&[&[0, 0]]);
        assert_eq!(factors_i64(&a), vec![0, 0]);
        assert_eq!(snf(&a).free_rank(), 2);
    }

    #[test]
    fn test_snf_needs_divisibility_fix() {
        // diag(4, 6) is not in SNF; invariants are 2, 12
        let a = IntMatrix::from_i64(&[&[4, 0], &[0, 6]]);
        assert_eq!(factors_i64(&a), vec![2, 12]);
    }

    #[test]
    fn test_snf_generators() {
        // Z^2 / <(2, 0), (0, 4)>: generators from v_inv must have the
        // right orders.
        let a = IntMatrix::from_i64(&[&[2, 0], &[0, 4]]);
        let decomp = snf_with_basis(&a);
        let inv = decomp.invariants();
        assert_eq!(inv.torsion_order(), BigInt::from(8));
        // each generator g_i times d_i must land in the relation lattice
        let rel = crate::linalg::Lattice::from_rows(&a);
        for (i, dval) in decomp.diagonal.iter().enumerate() {
            let g = decomp.v_inv.row_vec(i);
            let scaled: Vec<BigInt> = g.iter().map(|x| x * dval).collect();
            assert!(rel.contains(&scaled), "d_i * g_i not a relation");
        }
    }

    #[test]
    fn test_snf_mixed() {
        let a = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        // det = 2*(6*16-12*4) - 4*(-6*16-12*10) + 4*(-6*4-6*10) = 2*48+4*216-4*84 = 624
        let inv = snf(&a);
        assert_eq!(inv.torsion_order(), BigInt::from(624));
    }
}
