//! Minimal dense complex linear algebra: the optimizers only need
//! matrix-vector products in both orientations.

use num_complex::Complex;

use crate::scalar::Real;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Takes ownership of row-major storage. Panics if the length is wrong.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major buffer has wrong length");
        Self { rows, cols, data }
    }

    /// Outer product `col * row^T` (no conjugation).
    pub fn outer(col: &[Complex<T>], row: &[Complex<T>]) -> Self {
        Self::from_fn(col.len(), row.len(), |i, j| col[i] * row[j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `A^T x`.
    pub fn tr_mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * xi;
            }
        }
        out
    }

    /// `A^H x`.
    pub fn adj_mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * xi;
            }
        }
        out
    }

    /// `y^T A x`.
    pub fn bilinear(&self, y: &[Complex<T>], x: &[Complex<T>]) -> Complex<T> {
        dot(y, &self.mul_vec(x))
    }
}

/// Unconjugated inner product `a^T b`.
#[inline]
pub fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (&x, &y)| acc + x * y)
}

/// Element-wise product `diag(a) b`.
pub fn hadamard<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter().zip(b).map(|(&x, &y)| x * y).collect()
}

pub fn norm_sqr<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn l1_norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|z| z.norm()).sum()
}
