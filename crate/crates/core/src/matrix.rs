//! Dense complex matrices.
//!
//! [`ComplexMatrix`] is a row-major rectangular matrix of `Complex64`
//! entries. Everything else in the crate (states, Kraus operators,
//! constraint systems) is built from it.
//!
//! Indices are zero-based throughout. Tensor products use the lexicographic
//! product basis: `e_i ⊗ f_j` sits at index `i * dim_b + j`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense row-major complex matrix with at least one row and one column.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

/// Wire form: `{"rows": r, "cols": c, "entries": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        let data = repr
            .entries
            .into_iter()
            .map(|[re, im]| C64::new(re, im))
            .collect();
        ComplexMatrix::new(repr.rows, repr.cols, data)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            rows: m.rows,
            cols: m.cols,
            entries: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "entries has length {}, expected {rows}*{cols} = {}",
                data.len(),
                rows * cols
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Builds a matrix by evaluating `f(i, j)` for every entry.
    ///
    /// Panics if either dimension is zero.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| ZERO)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    /// `c · 1_n`, e.g. the maximally mixed state `1_n / n`.
    pub fn scaled_identity(n: usize, c: f64) -> Self {
        Self::identity(n).scale(c)
    }

    /// Square diagonal matrix with real diagonal `d`.
    pub fn diag(d: &[f64]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| {
            if i == j {
                C64::new(d[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Column vector from entries.
    pub fn column(v: &[C64]) -> Self {
        Self::from_fn(v.len(), 1, |i, _| v[i])
    }

    /// Matrix unit `E_ij` of size `n×n` (zero-based indices).
    pub fn matrix_unit(n: usize, i: usize, j: usize) -> Result<Self> {
        if n == 0 || i >= n || j >= n {
            return Err(Error::IndexOutOfRange { row: i, col: j, dim: n });
        }
        let mut e = Self::zeros(n, n);
        e[(i, j)] = ONE;
        Ok(e)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column_vec(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|z| z * c)
    }

    pub fn scale_complex(&self, c: C64) -> Self {
        self.map(|z| z * c)
    }

    /// Sum of diagonal entries (of the leading square block when rectangular).
    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    ///
    /// Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius distance `‖self − other‖_F`. Panics on shape mismatch.
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖H − H†‖_F`, or infinity for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// True when `‖H − H†‖_F ≤ tol · max(1, ‖H‖_F)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol * self.frobenius_norm().max(1.0)
    }

    /// `(H + H†) / 2`. Panics if not square.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square(), "hermitian_part needs a square matrix");
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// `‖U†U − 1‖_F`, or infinity for non-square input.
    pub fn unitary_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).frobenius_distance(&Self::identity(self.rows))
    }

    /// Matrix product, checked.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let src = rhs.row(k);
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product: block `(i, j)` of the result is `self[i, j] · rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (ra, ca) = self.shape();
        let (rb, cb) = rhs.shape();
        Self::from_fn(ra * rb, ca * cb, |i, j| {
            self[(i / rb, j / cb)] * rhs[(i % rb, j % cb)]
        })
    }

    /// Copy of the `(rows × cols)` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Stacks equally long row vectors into a matrix.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Inner product `⟨u, v⟩ = Σ conj(u_i) v_i` of two column vectors stored as slices.
    pub fn dot(u: &[C64], v: &[C64]) -> C64 {
        u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator impls panic on shape mismatch, like the usual dense-matrix crates.
// Use `matmul` for a checked product.

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Sum of a non-empty iterator of equally shaped matrices.
pub(crate) fn sum_matrices<'a>(
    mut it: impl Iterator<Item = ComplexMatrix> + 'a,
) -> Option<ComplexMatrix> {
    let first = it.next()?;
    Some(it.fold(first, |acc, m| &acc + &m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_matrix(rows: usize, cols: usize, seed: i64) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |i, j| {
            let k = (i * cols + j) as i64;
            C64::new(((k * 7 + seed) % 5 - 2) as f64, ((k * 3 + seed) % 3 - 1) as f64)
        })
    }

    #[test]
    fn matrix_unit_examples() {
        let e11 = ComplexMatrix::matrix_unit(2, 0, 0).unwrap();
        assert_eq!(e11, ComplexMatrix::diag(&[1.0, 0.0]));
        let e12 = ComplexMatrix::matrix_unit(2, 0, 1).unwrap();
        assert_eq!(e12, ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let t = ComplexMatrix::matrix_unit(3, i, j).unwrap().trace();
                assert_eq!(t, if i == j { ONE } else { ZERO });
            }
        }
    }

    #[test]
    fn matrix_unit_out_of_range() {
        assert!(matches!(
            ComplexMatrix::matrix_unit(2, 2, 0),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(ComplexMatrix::matrix_unit(2, 0, 5).is_err());
    }

    #[test]
    fn new_rejects_bad_input() {
        assert!(ComplexMatrix::new(2, 2, vec![ZERO; 3]).is_err());
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        assert!(matches!(
            ComplexMatrix::new(1, 1, vec![C64::new(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn kron_identities() {
        let i6 = ComplexMatrix::identity(2).kron(&ComplexMatrix::identity(3));
        assert_eq!(i6, ComplexMatrix::identity(6));

        let c = int_matrix(3, 3, 1);
        let e12 = ComplexMatrix::matrix_unit(2, 0, 1).unwrap();
        let k = e12.kron(&c);
        assert_eq!(k.block(0, 3, 3, 3), c);
        assert_eq!(k.block(0, 0, 3, 3), ComplexMatrix::zeros(3, 3));
        assert_eq!(k.block(3, 0, 3, 3), ComplexMatrix::zeros(3, 3));
        assert_eq!(k.block(3, 3, 3, 3), ComplexMatrix::zeros(3, 3));
    }

    #[test]
    fn kron_associative_and_trace_multiplicative() {
        let a = int_matrix(2, 2, 0);
        let b = int_matrix(3, 3, 1);
        let c = int_matrix(2, 2, 2);
        assert_eq!(a.kron(&b).kron(&c), a.kron(&b.kron(&c)));
        assert_eq!(a.kron(&b).trace(), a.trace() * b.trace());
    }

    #[test]
    fn matmul_checks_shape() {
        let a = int_matrix(2, 3, 0);
        assert!(a.matmul(&a).is_err());
        let p = a.matmul(&a.adjoint()).unwrap();
        assert_eq!(p.shape(), (2, 2));
        assert!(p.is_hermitian(0.0));
    }

    #[test]
    fn json_round_trip_and_rejects_bad_length() {
        let a = int_matrix(2, 3, 4);
        let s = serde_json::to_string(&a).unwrap();
        let b: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);

        let bad = r#"{"rows": 2, "cols": 2, "entries": [[1, 0], [0, 0], [0, 0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }
}
