//! Exact integer and rational linear algebra: Hermite and Smith normal
//! forms, kernels, saturation, lattice indices and characteristic
//! polynomials, all over `BigInt`/`BigRational`. This is the substrate for
//! every lattice that appears downstream (integral form lattices, operator
//! algebras, ideals, cusp divisor groups). No floating point anywhere.

mod charpoly;
mod hnf;
mod qmat;
mod snf;

pub use charpoly::{charpoly, det, poly_eval, poly_sqrt, poly_to_string};
pub use hnf::{hnf, left_kernel, quotient_with_section, right_kernel, solve, HnfResult};
pub use qmat::{is_p_integral, QMatrix};
pub use snf::{snf, snf_with_basis, AbelianInvariants, SnfDecomp};

use num::{BigInt, Zero};
use std::fmt;

/// Dense integer matrix, row-major. Entries are arbitrary-precision.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::from(1);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.into_iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            for (j, x) in r.into_iter().enumerate() {
                *m.at_mut(i, j) = x;
            }
        }
        m
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            cols,
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
        )
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<BigInt> {
        self.row(i).to_vec()
    }

    pub fn set_row(&mut self, i: usize, r: Vec<BigInt>) {
        assert_eq!(r.len(), self.cols);
        self.data[i * self.cols..(i + 1) * self.cols].clone_from_slice(&r);
    }

    pub fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(i * self.cols + j, k * self.cols + j);
        }
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row(i).iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
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

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert!(self.rows == other.rows && self.cols == other.cols);
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(other.data.iter()) {
            *x += y;
        }
        out
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert!(self.rows == other.rows && self.cols == other.cols);
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(other.data.iter()) {
            *x -= y;
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x *= c;
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn trace(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.at(i, i).clone()).sum()
    }

    /// Row-major flattening, used to treat operator matrices as lattice
    /// vectors.
    pub fn flatten(&self) -> Vec<BigInt> {
        self.data.clone()
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols);
        IntMatrix { rows, cols, data }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let entries: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", entries.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A sublattice of `Z^ambient`, stored as a canonical row-style HNF basis
/// with zero rows removed. Two equal lattices have bitwise-equal bases.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lattice {
    pub ambient: usize,
    basis: IntMatrix,
}

impl Lattice {
    /// Builds the lattice spanned by the rows of `gens`.
    pub fn from_rows(gens: &IntMatrix) -> Self {
        let res = hnf(gens);
        let rows: Vec<Vec<BigInt>> =
            (0..res.rank).map(|i| res.h.row_vec(i)).collect();
        Lattice { ambient: gens.cols, basis: IntMatrix::from_rows(gens.cols, rows) }
    }

    pub fn zero(ambient: usize) -> Self {
        Lattice { ambient, basis: IntMatrix::zeros(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Lattice { ambient, basis: IntMatrix::identity(ambient) }
    }

    pub fn rank(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_row(&self, i: usize) -> &[BigInt] {
        self.basis.row(i)
    }

    /// Integer coordinates of `v` in the basis, or None when `v` is not in
    /// the lattice. Forward substitution down the HNF staircase.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient);
        let mut rem = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let j = pivot_col(self.basis.row(i));
            let p = self.basis.at(i, j);
            let (q, r) = num::Integer::div_rem(&rem[j], p);
            if !r.is_zero() {
                return None;
            }
            for (c, b) in rem.iter_mut().zip(self.basis.row(i)) {
                *c -= &q * b;
            }
            coords.push(q);
        }
        if rem.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        (0..other.rank()).all(|i| self.contains(other.basis_row(i)))
    }

    /// Rational coordinates of `v` in the Q-span of the basis, or None when
    /// `v` is outside the span.
    pub fn rational_coordinates(
        &self,
        v: &[num::BigRational],
    ) -> Option<Vec<num::BigRational>> {
        assert_eq!(v.len(), self.ambient);
        let mut rem = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let j = pivot_col(self.basis.row(i));
            let q = &rem[j] / num::BigRational::from(self.basis.at(i, j).clone());
            for (c, b) in rem.iter_mut().zip(self.basis.row(i)) {
                *c -= &q * num::BigRational::from(b.clone());
            }
            coords.push(q);
        }
        if rem.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    /// The saturation {v : k·v in L for some k >= 1}, computed as a double
    /// integer kernel (kernels over Z are automatically saturated).
    pub fn saturate(&self) -> Lattice {
        if self.rank() == 0 {
            return self.clone();
        }
        let orth = right_kernel(&self.basis);
        if orth.rank() == 0 {
            return Lattice::full(self.ambient);
        }
        let sat = right_kernel(orth.basis());
        assert_eq!(sat.rank(), self.rank(), "saturation changed rank");
        sat
    }

    /// Lattice sum (join) of two lattices in the same ambient space.
    pub fn sum(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.ambient, other.ambient);
        let mut rows: Vec<Vec<BigInt>> =
            (0..self.rank()).map(|i| self.basis.row_vec(i)).collect();
        rows.extend((0..other.rank()).map(|i| other.basis.row_vec(i)));
        Lattice::from_rows(&IntMatrix::from_rows(self.ambient, rows))
    }
}

fn pivot_col(row: &[BigInt]) -> usize {
    row.iter().position(|x| !x.is_zero()).expect("zero row in lattice basis")
}

/// The index [big : small] as a positive integer.
pub fn index(big: &Lattice, small: &Lattice) -> crate::Result<BigInt> {
    if big.ambient != small.ambient {
        return Err(crate::Error::Invalid("ambient dimension mismatch".into()));
    }
    if big.rank() != small.rank() {
        return Err(crate::Error::Invalid(format!(
            "rank mismatch: {} vs {}",
            big.rank(),
            small.rank()
        )));
    }
    let r = small.rank();
    if r == 0 {
        return Ok(BigInt::from(1));
    }
    let mut change = IntMatrix::zeros(r, r);
    for i in 0..r {
        let coords = small
            .basis_row(i)
            .to_vec();
        let coords = big.coordinates(&coords).ok_or_else(|| {
            crate::Error::Invalid("not a sublattice: basis vector outside big lattice".into())
        })?;
        change.set_row(i, coords);
    }
    let d = det(&change);
    assert!(!d.is_zero(), "index degenerate despite equal ranks");
    Ok(num::Signed::abs(&d))
}

/// ord_p of the index [big : small].
pub fn index_ppart(big: &Lattice, small: &Lattice, p: u64) -> crate::Result<u32> {
    let idx = index(big, small)?;
    Ok(crate::arith::valuation_big(&idx, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_matrix_product() {
        let a = IntMatrix::from_i64(&[&[1, 2], &[3, 4]]);
        let b = IntMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b), IntMatrix::from_i64(&[&[2, 1], &[4, 3]]));
    }

    #[test]
    fn test_lattice_canonical_and_membership() {
        let l = Lattice::from_rows(&IntMatrix::from_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(l.basis(), &IntMatrix::from_i64(&[&[2, 0], &[0, 4]]));
        assert!(l.contains(&[BigInt::from(2), BigInt::from(4)]));
        assert!(!l.contains(&[BigInt::from(1), BigInt::from(0)]));
        let coords = l.coordinates(&[BigInt::from(6), BigInt::from(8)]).unwrap();
        assert_eq!(coords, vec![BigInt::from(3), BigInt::from(2)]);
    }

    #[test]
    fn test_saturate_content() {
        let l = Lattice::from_rows(&IntMatrix::from_i64(&[&[2, 0]]));
        assert_eq!(l.saturate().basis(), &IntMatrix::from_i64(&[&[1, 0]]));
    }

    #[test]
    fn test_saturate_full_rank() {
        let l = Lattice::from_rows(&IntMatrix::from_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(l.saturate(), Lattice::full(2));
    }

    #[test]
    fn test_saturate_primitive_vector() {
        // span{(2,1)} is already saturated even though its HNF pivot is 2
        let l = Lattice::from_rows(&IntMatrix::from_i64(&[&[2, 1]]));
        assert_eq!(l.saturate(), l);
    }

    #[test]
    fn test_index() {
        let big = Lattice::full(2);
        let small = Lattice::from_rows(&IntMatrix::from_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(index(&big, &small).unwrap(), BigInt::from(8));
        assert_eq!(index_ppart(&big, &small, 2).unwrap(), 3);
        assert_eq!(index_ppart(&big, &small, 5).unwrap(), 0);
    }

    #[test]
    fn test_index_rejects_non_sublattice() {
        let big = Lattice::from_rows(&IntMatrix::from_i64(&[&[2, 0], &[0, 2]]));
        let not_sub = Lattice::full(2);
        assert!(index(&big, &not_sub).is_err());
    }
}
