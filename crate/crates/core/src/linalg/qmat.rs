//! Dense rational matrices for the handful of places that need exact
//! Q-linear solves: coordinate extraction against non-staircase bases,
//! inverses of section matrices, and induced maps on quotients. Gaussian
//! elimination over `BigRational` with exact pivoting.

use super::IntMatrix;
use num::{BigInt, BigRational, One, Zero};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigRational::one();
        }
        m
    }

    pub fn from_int(a: &IntMatrix) -> Self {
        let mut m = Self::zeros(a.rows, a.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                *m.at_mut(i, j) = BigRational::from(a.at(i, j).clone());
            }
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<BigRational>>) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.into_iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, x) in r.into_iter().enumerate() {
                *m.at_mut(i, j) = x;
            }
        }
        m
    }

    /// Integer matrix when every entry has denominator 1.
    pub fn to_int(&self) -> Option<IntMatrix> {
        let mut out = IntMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.at(i, j);
                if !x.is_integer() {
                    return None;
                }
                *out.at_mut(i, j) = x.to_integer();
            }
        }
        Some(out)
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = a * other.at(k, j);
                    *out.at_mut(i, j) += term;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    /// Inverse of a square matrix, None when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&i| !a.at(i, col).is_zero())?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let pv = a.at(col, col).clone();
            for j in 0..n {
                *a.at_mut(col, j) /= &pv;
                *inv.at_mut(col, j) /= &pv;
            }
            for i in 0..n {
                if i == col || a.at(i, col).is_zero() {
                    continue;
                }
                let f = a.at(i, col).clone();
                for j in 0..n {
                    let t = &f * a.at(col, j);
                    *a.at_mut(i, j) -= t;
                    let t = &f * inv.at(col, j);
                    *inv.at_mut(i, j) -= t;
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(i * self.cols + j, k * self.cols + j);
        }
    }

    /// Solves x·B = target for a row vector x, where B = self has full row
    /// rank r <= cols. Returns None when target is outside the row span.
    pub fn solve_left(&self, target: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(target.len(), self.cols);
        // Gaussian elimination on the augmented system B^T y = target^T.
        let r = self.rows;
        let mut aug = QMatrix::zeros(self.cols, r + 1);
        for i in 0..self.cols {
            for j in 0..r {
                *aug.at_mut(i, j) = self.at(j, i).clone();
            }
            *aug.at_mut(i, r) = target[i].clone();
        }
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut prow = 0;
        for col in 0..r {
            let Some(p) = (prow..self.cols).find(|&i| !aug.at(i, col).is_zero()) else {
                continue;
            };
            aug.swap_rows(prow, p);
            let pv = aug.at(prow, col).clone();
            for j in 0..=r {
                *aug.at_mut(prow, j) /= &pv;
            }
            for i in 0..self.cols {
                if i == prow || aug.at(i, col).is_zero() {
                    continue;
                }
                let f = aug.at(i, col).clone();
                for j in 0..=r {
                    let t = &f * aug.at(prow, j);
                    *aug.at_mut(i, j) -= t;
                }
            }
            pivots.push((prow, col));
            prow += 1;
        }
        // consistency: rows without pivots must have zero RHS
        for i in prow..self.cols {
            if !aug.at(i, r).is_zero() {
                return None;
            }
        }
        let mut x = vec![BigRational::zero(); r];
        for &(row, col) in &pivots {
            x[col] = aug.at(row, r).clone();
        }
        Some(x)
    }
}

/// True when the reduced denominator of `x` is not divisible by p, i.e. x
/// lies in Z localized at p.
pub fn is_p_integral(x: &BigRational, p: u64) -> bool {
    !num::Integer::is_multiple_of(x.denom(), &BigInt::from(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn test_inverse() {
        let a = QMatrix::from_int(&IntMatrix::from_i64(&[&[2, 1], &[1, 1]]));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), QMatrix::identity(2));
    }

    #[test]
    fn test_inverse_singular() {
        let a = QMatrix::from_int(&IntMatrix::from_i64(&[&[1, 2], &[2, 4]]));
        assert!(a.inverse().is_none());
    }

    #[test]
    fn test_solve_left() {
        // B = [[1,0,2],[0,1,3]]; x·B = (2,3,13) -> x = (2,3)
        let b = QMatrix::from_int(&IntMatrix::from_i64(&[&[1, 0, 2], &[0, 1, 3]]));
        let target = vec![q(2, 1), q(3, 1), q(13, 1)];
        assert_eq!(b.solve_left(&target).unwrap(), vec![q(2, 1), q(3, 1)]);
        // outside the span
        let bad = vec![q(2, 1), q(3, 1), q(14, 1)];
        assert!(b.solve_left(&bad).is_none());
    }

    #[test]
    fn test_is_p_integral() {
        assert!(is_p_integral(&q(3, 4), 5));
        assert!(!is_p_integral(&q(3, 10), 5));
        assert!(is_p_integral(&q(10, 2), 5)); // reduces to 5
    }
}
