//! Dense real containers and the factorizations built on them.

mod dft;
mod svd;
pub(crate) mod tproduct;

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

pub use dft::{dft_tubes, idft_tubes};
pub use svd::{nuclear_norm, singular_values, svd, SvdResult};
pub use tproduct::{
    conj_transpose, fourier_singular_values, t_identity, tensor_nuclear_norm, tprod, tsvd, TSvd,
};

pub(crate) use svd::svd_factors;

/// Flat real storage shared by the solver's variables.
///
/// Both [`DenseMatrix`] and [`Tensor3`] implement this so prox operators and the solver loop
/// can work on either without caring about layout. Elementwise helpers assume equal shapes;
/// callers that accept user input check [`Array::dims`] first.
pub trait Array: Clone {
    fn values(&self) -> &[f64];
    fn values_mut(&mut self) -> &mut [f64];
    /// `[rows, cols, 1]` for matrices, `[n1, n2, n3]` for tensors.
    fn dims(&self) -> [usize; 3];

    fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.values_mut().fill(0.0);
        z
    }

    fn norm(&self) -> f64 {
        math::sqrt(self.norm_sqr())
    }

    fn norm_sqr(&self) -> f64 {
        self.values().iter().map(|v| v * v).sum()
    }

    fn dot(&self, other: &Self) -> f64 {
        self.values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `‖self − other‖`
    fn dist(&self, other: &Self) -> f64 {
        math::sqrt(
            self.values()
                .iter()
                .zip(other.values())
                .map(|(a, b)| (a - b) * (a - b))
                .sum(),
        )
    }

    fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.values_mut()
            .iter_mut()
            .zip(other.values())
            .for_each(|(a, b)| *a -= b);
        out
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values_mut().iter_mut().for_each(|a| *a *= s);
        out
    }

    /// `self += a·x`
    fn axpy(&mut self, a: f64, x: &Self) {
        self.values_mut()
            .iter_mut()
            .zip(x.values())
            .for_each(|(s, v)| *s += a * v);
    }

    fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

pub(crate) fn check_same_dims<A: Array>(a: &A, b: &A) -> Result<()> {
    if a.dims() == b.dims() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch {
            expected: a.dims(),
            found: b.dims(),
        })
    }
}

fn check_buffer(dims: [usize; 3], len: usize) -> Result<()> {
    if dims.contains(&0) {
        return Err(Error::EmptyDimension);
    }
    let expected = dims[0] * dims[1] * dims[2];
    if len != expected {
        return Err(Error::ShapeMismatch {
            expected: dims,
            found: [len, 1, 1],
        });
    }
    Ok(())
}

/// Row-major real matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_buffer([rows, cols, 1], data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidParameter("ragged rows"));
        }
        Self::new(
            r,
            c,
            rows.iter().flat_map(|row| row.iter().copied()).collect(),
        )
    }

    /// Panics if a dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(rows: usize, cols: usize, diag: &[f64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.data[i * cols + i] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: [self.cols, other.cols, 1],
                found: [other.rows, other.cols, 1],
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for p in 0..self.cols {
                let a = self.data[i * self.cols + p];
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[p * other.cols..(p + 1) * other.cols];
                out_row.iter_mut().zip(b_row).for_each(|(o, b)| *o += a * b);
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.norm()
    }
}

impl Array for DenseMatrix {
    fn values(&self) -> &[f64] {
        &self.data
    }
    fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
    fn dims(&self) -> [usize; 3] {
        [self.rows, self.cols, 1]
    }
}

/// Real third-order tensor stored frontal slice after frontal slice.
///
/// Slice `k` is an `n1 × n2` row-major matrix; entry `(i, j, k)` lives at
/// `k·n1·n2 + i·n2 + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n1: usize,
    n2: usize,
    n3: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn new(n1: usize, n2: usize, n3: usize, data: Vec<f64>) -> Result<Self> {
        check_buffer([n1, n2, n3], data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n1, n2, n3, data })
    }

    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Self {
        assert!(
            n1 > 0 && n2 > 0 && n3 > 0,
            "tensor dimensions must be positive"
        );
        Self {
            n1,
            n2,
            n3,
            data: vec![0.0; n1 * n2 * n3],
        }
    }

    pub fn from_fn(
        n1: usize,
        n2: usize,
        n3: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut t = Self::zeros(n1, n2, n3);
        for k in 0..n3 {
            for i in 0..n1 {
                for j in 0..n2 {
                    t.data[(k * n1 + i) * n2 + j] = f(i, j, k);
                }
            }
        }
        t
    }

    /// Stacks equally shaped matrices as frontal slices.
    pub fn from_slices(slices: &[DenseMatrix]) -> Result<Self> {
        let first = slices.first().ok_or(Error::EmptyDimension)?;
        let (n1, n2) = (first.rows(), first.cols());
        let mut data = Vec::with_capacity(n1 * n2 * slices.len());
        for s in slices {
            if s.rows() != n1 || s.cols() != n2 {
                return Err(Error::ShapeMismatch {
                    expected: [n1, n2, 1],
                    found: [s.rows(), s.cols(), 1],
                });
            }
            data.extend_from_slice(s.data());
        }
        Self::new(n1, n2, slices.len(), data)
    }

    pub fn from_matrix(m: &DenseMatrix) -> Self {
        Self {
            n1: m.rows(),
            n2: m.cols(),
            n3: 1,
            data: m.data().to_vec(),
        }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }
    pub fn n2(&self) -> usize {
        self.n2
    }
    pub fn n3(&self) -> usize {
        self.n3
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(k * self.n1 + i) * self.n2 + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(k * self.n1 + i) * self.n2 + j] = v;
    }

    pub fn slice(&self, k: usize) -> DenseMatrix {
        let len = self.n1 * self.n2;
        DenseMatrix {
            rows: self.n1,
            cols: self.n2,
            data: self.data[k * len..(k + 1) * len].to_vec(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.norm()
    }
}

impl Array for Tensor3 {
    fn values(&self) -> &[f64] {
        &self.data
    }
    fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
    fn dims(&self) -> [usize; 3] {
        [self.n1, self.n2, self.n3]
    }
}

/// Complex tensor with the same layout as [`Tensor3`]; holds tube spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTensor3 {
    n1: usize,
    n2: usize,
    n3: usize,
    data: Vec<Complex64>,
}

impl ComplexTensor3 {
    pub fn new(n1: usize, n2: usize, n3: usize, data: Vec<Complex64>) -> Result<Self> {
        check_buffer([n1, n2, n3], data.len())?;
        Ok(Self { n1, n2, n3, data })
    }

    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Self {
        assert!(
            n1 > 0 && n2 > 0 && n3 > 0,
            "tensor dimensions must be positive"
        );
        Self {
            n1,
            n2,
            n3,
            data: vec![Complex64::new(0.0, 0.0); n1 * n2 * n3],
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.n1, self.n2, self.n3]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.data[(k * self.n1 + i) * self.n2 + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Complex64) {
        self.data[(k * self.n1 + i) * self.n2 + j] = v;
    }

    /// Row-major view of frontal slice `k`.
    pub fn slice(&self, k: usize) -> &[Complex64] {
        let len = self.n1 * self.n2;
        &self.data[k * len..(k + 1) * len]
    }

    pub(crate) fn slice_mut(&mut self, k: usize) -> &mut [Complex64] {
        let len = self.n1 * self.n2;
        &mut self.data[k * len..(k + 1) * len]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_buffers() {
        assert!(matches!(
            DenseMatrix::new(2, 2, vec![1.0; 3]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            DenseMatrix::new(0, 2, vec![]),
            Err(Error::EmptyDimension)
        ));
        assert!(matches!(
            DenseMatrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite)
        ));
        assert!(matches!(
            Tensor3::new(2, 2, 2, vec![0.0; 7]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            Tensor3::new(1, 1, 2, vec![0.0, f64::INFINITY]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn tensor_layout_is_frontal_slice_major() {
        let t = Tensor3::from_fn(2, 3, 2, |i, j, k| (100 * k + 10 * i + j) as f64);
        assert_eq!(t.data()[0], 0.0);
        assert_eq!(t.data()[1], 1.0);
        assert_eq!(t.data()[3], 10.0);
        assert_eq!(t.data()[6], 100.0);
        assert_eq!(t.slice(1).get(1, 2), 112.0);
    }

    #[test]
    fn matmul_small() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.data(), &[2.0, 1.0, 4.0, 3.0]);
        assert!(a.matmul(&DenseMatrix::zeros(3, 1)).is_err());
    }
}
