//! Row-style Hermite normal form with transformation matrix, plus the
//! integer kernels derived from it. The HNF here is canonical: pivots are
//! positive, entries above a pivot are reduced into [0, pivot), zero rows
//! sink to the bottom. Canonicity makes lattice equality a bitwise check.

use super::{IntMatrix, Lattice};
use num::{BigInt, Integer, Signed, Zero};

pub struct HnfResult {
    /// The normal form, same shape as the input, zero rows at the bottom.
    pub h: IntMatrix,
    /// Unimodular transform with u * input = h.
    pub u: IntMatrix,
    /// Number of nonzero rows of h.
    pub rank: usize,
}

/// Computes the canonical row HNF of `a` together with the unimodular
/// transform realizing it.
pub fn hnf(a: &IntMatrix) -> HnfResult {
    let (m, n) = (a.rows, a.cols);
    let mut h = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut pivot_row = 0;

    for col in 0..n {
        if pivot_row == m {
            break;
        }
        // Collapse everything in this column at or below pivot_row into the
        // pivot slot using extended-gcd row combinations.
        for i in pivot_row + 1..m {
            if h.at(i, col).is_zero() {
                continue;
            }
            if h.at(pivot_row, col).is_zero() {
                h.swap_rows(pivot_row, i);
                u.swap_rows(pivot_row, i);
                continue;
            }
            combine_rows(&mut h, &mut u, pivot_row, i, col);
        }
        if h.at(pivot_row, col).is_zero() {
            continue;
        }
        if h.at(pivot_row, col).is_negative() {
            negate_row(&mut h, pivot_row);
            negate_row(&mut u, pivot_row);
        }
        // Reduce the entries above the pivot into [0, pivot).
        let pivot = h.at(pivot_row, col).clone();
        for i in 0..pivot_row {
            let q = h.at(i, col).div_floor(&pivot);
            if q.is_zero() {
                continue;
            }
            row_sub_multiple(&mut h, i, pivot_row, &q);
            row_sub_multiple(&mut u, i, pivot_row, &q);
        }
        pivot_row += 1;
    }

    HnfResult { h, u, rank: pivot_row }
}

/// Unimodular 2-row operation sending (a, b) in column `col` to (gcd, 0).
fn combine_rows(h: &mut IntMatrix, u: &mut IntMatrix, r: usize, i: usize, col: usize) {
    let a = h.at(r, col).clone();
    let b = h.at(i, col).clone();
    let ext = a.extended_gcd(&b);
    let (g, x, y) = (ext.gcd, ext.x, ext.y);
    let ag = &a / &g;
    let bg = &b / &g;
    for mat in [h, u] {
        let row_r = mat.row_vec(r);
        let row_i = mat.row_vec(i);
        let new_r: Vec<BigInt> = row_r
            .iter()
            .zip(&row_i)
            .map(|(p, q)| &x * p + &y * q)
            .collect();
        let new_i: Vec<BigInt> = row_r
            .iter()
            .zip(&row_i)
            .map(|(p, q)| &ag * q - &bg * p)
            .collect();
        mat.set_row(r, new_r);
        mat.set_row(i, new_i);
    }
}

fn negate_row(m: &mut IntMatrix, i: usize) {
    for j in 0..m.cols {
        let v = -m.at(i, j).clone();
        *m.at_mut(i, j) = v;
    }
}

fn row_sub_multiple(m: &mut IntMatrix, i: usize, k: usize, q: &BigInt) {
    for j in 0..m.cols {
        let t = q * m.at(k, j);
        *m.at_mut(i, j) -= t;
    }
}

/// Basis of {y : y·a = 0} as a lattice in Z^rows. Kernels over Z are
/// saturated by construction.
pub fn left_kernel(a: &IntMatrix) -> Lattice {
    let res = hnf(a);
    let rows: Vec<Vec<BigInt>> =
        (res.rank..a.rows).map(|i| res.u.row_vec(i)).collect();
    Lattice::from_rows(&IntMatrix::from_rows(a.rows, rows))
}

/// Basis of {x : a·x = 0} (column vectors, returned as lattice rows in
/// Z^cols).
pub fn right_kernel(a: &IntMatrix) -> Lattice {
    left_kernel(&a.transpose())
}

/// Solves a·x = b over the integers; None when no integer solution exists.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), a.rows);
    let at = a.transpose();
    let res = hnf(&at);
    // a = h^T (u^T)^{-1}, so solve h^T y = b by the staircase, then x = u^T y.
    let mut y = vec![BigInt::zero(); a.cols];
    for j in 0..res.rank {
        let pos = (0..at.cols).find(|&c| !res.h.at(j, c).is_zero())?;
        let mut acc = b[pos].clone();
        for (jj, yv) in y.iter().enumerate().take(j) {
            acc -= res.h.at(jj, pos) * yv;
        }
        let pivot = res.h.at(j, pos);
        let (q, r) = acc.div_rem(pivot);
        if !r.is_zero() {
            return None;
        }
        y[j] = q;
    }
    let x = res.u.transpose().mul_vec(&y);
    if a.mul_vec(&x) == b { Some(x) } else { None }
}

/// For a saturated sublattice L of Z^k, returns (q, s) with q: Z^k -> Z^m
/// the quotient map (m = k - rank L, kernel exactly L) and s an integer
/// section with q·s = identity.
pub fn quotient_with_section(sub: &Lattice) -> (IntMatrix, IntMatrix) {
    let k = sub.ambient;
    let rank = sub.rank();
    let m = k - rank;
    if rank == 0 {
        return (IntMatrix::identity(k), IntMatrix::identity(k));
    }
    let ker = right_kernel(sub.basis());
    assert_eq!(ker.rank(), m, "sublattice must be saturated");
    let q = ker.basis().clone();
    let mut s = IntMatrix::zeros(k, m);
    for j in 0..m {
        let mut e = vec![BigInt::zero(); m];
        e[j] = BigInt::from(1);
        let col = solve(&q, &e).expect("quotient map must be surjective");
        for i in 0..k {
            *s.at_mut(i, j) = col[i].clone();
        }
    }
    (q, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det;

    fn check_transform(a: &IntMatrix) {
        let res = hnf(a);
        assert_eq!(res.u.mul(a), res.h, "u * a != h");
        if a.rows > 0 {
            let d = det(&res.u);
            assert!(d == BigInt::from(1) || d == BigInt::from(-1), "u not unimodular");
        }
    }

    #[test]
    fn test_hnf_identity() {
        let id = IntMatrix::identity(2);
        let res = hnf(&id);
        assert_eq!(res.h, id);
        assert_eq!(res.u, id);
        assert_eq!(res.rank, 2);
    }

    #[test]
    fn test_hnf_example() {
        let a = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        let res = hnf(&a);
        assert_eq!(res.h, IntMatrix::from_i64(&[&[2, 0], &[0, 4]]));
        check_transform(&a);
    }

    #[test]
    fn test_hnf_zero_row() {
        let a = IntMatrix::from_i64(&[&[0, 0]]);
        let res = hnf(&a);
        assert_eq!(res.rank, 0);
        assert!(res.h.is_zero());
    }

    #[test]
    fn test_hnf_reduces_above_pivot() {
        let a = IntMatrix::from_i64(&[&[1, 7], &[0, 3]]);
        let res = hnf(&a);
        assert_eq!(res.h, IntMatrix::from_i64(&[&[1, 1], &[0, 3]]));
        check_transform(&a);
    }

    #[test]
    fn test_left_kernel() {
        // rows (1,2,3) and (2,4,6): kernel of y·a = 0 is spanned by (2,-1)
        let a = IntMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = left_kernel(&a);
        assert_eq!(k.rank(), 1);
        let v = k.basis_row(0);
        let combo: Vec<BigInt> = (0..3)
            .map(|j| &v[0] * a.at(0, j) + &v[1] * a.at(1, j))
            .collect();
        assert!(combo.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn test_right_kernel_saturated() {
        let a = IntMatrix::from_i64(&[&[2, 4]]);
        let k = right_kernel(&a);
        // (2,-1) spans the kernel of (x,y) -> 2x+4y, primitive vector
        assert_eq!(k.rank(), 1);
        assert!(k.contains(&[BigInt::from(2), BigInt::from(-1)]));
        assert!(k.contains(&[BigInt::from(-2), BigInt::from(1)]));
    }

    #[test]
    fn test_solve_primitive_row() {
        // 2x + y = 1 has the integer solution (1, -1) among others
        let a = IntMatrix::from_i64(&[&[2, 1]]);
        let x = solve(&a, &[BigInt::from(1)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![BigInt::from(1)]);
    }

    #[test]
    fn test_solve_no_solution() {
        let a = IntMatrix::from_i64(&[&[2, 4]]);
        assert!(solve(&a, &[BigInt::from(3)]).is_none());
        // inconsistent overdetermined system
        let b = IntMatrix::from_i64(&[&[1, 0], &[1, 0]]);
        assert!(solve(&b, &[BigInt::from(0), BigInt::from(1)]).is_none());
    }

    #[test]
    fn test_solve_square() {
        let a = IntMatrix::from_i64(&[&[1, 2], &[3, 5]]);
        let b = vec![BigInt::from(4), BigInt::from(9)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
    }

    #[test]
    fn test_quotient_with_section() {
        // quotient of Z^3 by the saturated span of (1, 2, 3)
        let sub = Lattice::from_rows(&IntMatrix::from_i64(&[&[1, 2, 3]]));
        let (q, s) = quotient_with_section(&sub);
        assert_eq!(q.rows, 2);
        assert_eq!(q.cols, 3);
        assert_eq!(q.mul(&s), IntMatrix::identity(2));
        // the quotient map kills the sublattice
        let img = q.mul_vec(&[BigInt::from(1), BigInt::from(2), BigInt::from(3)]);
        assert!(img.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn test_quotient_trivial_sub() {
        let sub = Lattice::zero(2);
        let (q, s) = quotient_with_section(&sub);
        assert_eq!(q, IntMatrix::identity(2));
        assert_eq!(s, IntMatrix::identity(2));
    }
}
