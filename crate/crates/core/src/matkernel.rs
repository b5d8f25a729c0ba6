/*
Copyright 2026 The l1pda Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

//! Dense symmetric matrix kernel: storage, elementwise algebra, the symmetric
//! eigendecomposition and the functions built on it (inverse, log-determinant,
//! soft thresholding).

use crate::error::{PdaError, Result};
use crate::scalar::Scalar;
use std::ops::{Add, Mul, Sub};

/// Relative rank tolerance: eigenvalues at or below this fraction of the
/// largest eigenvalue count as zero.
pub const RANK_TOL_REL: f64 = 1e-10;

/// Sweeps of the implicit QL iteration allowed per eigenvalue.
const QL_MAX_ITER: usize = 100;

/// Dense symmetric `p x p` matrix stored row-major.
///
/// Constructors average the input with its transpose, so `get(i, j) == get(j, i)`
/// holds bit-exactly for every value of this type.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    /// Builds a matrix from row-major entries, symmetrizing with `(M + M^T) / 2`.
    pub fn from_row_major(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(PdaError::InvalidArgument("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(PdaError::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(PdaError::InvalidArgument(format!(
                "non-finite matrix entry at ({}, {})",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self::symmetrized(dim, data))
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(PdaError::DimensionMismatch { expected: dim, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(dim, data)
    }

    /// Symmetrizes without validating finiteness. Internal iterates go through here.
    pub(crate) fn symmetrized(dim: usize, mut data: Vec<T>) -> Self {
        let half = T::cst(0.5);
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = (data[i * dim + j] + data[j * dim + i]) * half;
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        Self { dim, data }
    }

    /// Matrix whose upper triangle is given by `f(i, j)` for `i <= j`.
    pub(crate) fn from_upper_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = vec![T::zero(); dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![T::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![T::one(); dim])
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * dim + i] = d;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Entrywise map. Symmetry is preserved because `f` sees both mirrored
    /// entries with the same value.
    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: T, other: &Self, b: T) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in lin_comb");
        let data = self.data.iter().zip(&other.data).map(|(&x, &y)| a * x + b * y).collect();
        Self { dim: self.dim, data }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    /// Largest absolute entry (the elementwise infinity norm).
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// Sum of absolute entries.
    pub fn l1_norm(&self) -> T {
        self.data.iter().map(|v| v.abs()).sum()
    }

    /// `tr(self * other)`; for symmetric operands this is the entrywise inner product.
    pub fn trace_product(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch in trace_product");
        self.data.iter().zip(&other.data).map(|(&x, &y)| x * y).sum()
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn mat_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.dim, "dimension mismatch in mat_vec");
        (0..self.dim).map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum()).collect()
    }

    /// `x^T M x`.
    pub fn quad_form(&self, x: &[T]) -> T {
        self.mat_vec(x).iter().zip(x).map(|(&a, &b)| a * b).sum()
    }

    /// Plain (non-symmetric in general) product, row-major.
    pub fn matmul(&self, other: &Self) -> Vec<T> {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let p = self.dim;
        let mut out = vec![T::zero(); p * p];
        for i in 0..p {
            for k in 0..p {
                let a = self.data[i * p + k];
                if a == T::zero() {
                    continue;
                }
                for j in 0..p {
                    out[i * p + j] += a * other.data[k * p + j];
                }
            }
        }
        out
    }

    /// Number of entries with absolute value strictly above `tol`.
    pub fn count_above(&self, tol: T) -> usize {
        self.data.iter().filter(|v| v.abs() > tol).count()
    }
}

impl<T: Scalar> Add for &SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn add(self, rhs: Self) -> SymMatrix<T> {
        self.lin_comb(T::one(), rhs, T::one())
    }
}

impl<T: Scalar> Sub for &SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn sub(self, rhs: Self) -> SymMatrix<T> {
        self.lin_comb(T::one(), rhs, -T::one())
    }
}

impl<T: Scalar> Mul<T> for &SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn mul(self, rhs: T) -> SymMatrix<T> {
        self.scale(rhs)
    }
}

/// Eigendecomposition `M = U diag(d) U^T` with eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct EigDecomp<T> {
    dim: usize,
    /// Row-major; column `j` is the eigenvector for `values[j]`.
    vectors: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> EigDecomp<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Row-major orthogonal matrix whose columns are eigenvectors.
    pub fn vectors(&self) -> &[T] {
        &self.vectors
    }

    pub fn vector(&self, j: usize) -> Vec<T> {
        (0..self.dim).map(|i| self.vectors[i * self.dim + j]).collect()
    }

    pub fn largest(&self) -> T {
        self.values[0]
    }

    pub fn smallest(&self) -> T {
        self.values[self.dim - 1]
    }

    /// Eigenvalue threshold below which the matrix is treated as rank deficient.
    pub fn rank_tolerance(&self) -> T {
        T::cst(RANK_TOL_REL) * self.largest().max(T::zero())
    }

    /// `U diag(f(d)) U^T`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> SymMatrix<T> {
        let p = self.dim;
        let fd: Vec<T> = self.values.iter().map(|&d| f(d)).collect();
        let mut scaled = self.vectors.clone();
        for row in scaled.chunks_mut(p) {
            for (v, &s) in row.iter_mut().zip(&fd) {
                *v *= s;
            }
        }
        SymMatrix::from_upper_fn(p, |i, k| {
            let a = &scaled[i * p..(i + 1) * p];
            let b = &self.vectors[k * p..(k + 1) * p];
            a.iter().zip(b).map(|(&x, &y)| x * y).sum()
        })
    }

    pub fn reconstruct(&self) -> SymMatrix<T> {
        self.reconstruct_with(|d| d)
    }
}

/// Symmetric eigendecomposition (Householder tridiagonalization followed by
/// implicit QL), eigenvalues sorted descending.
pub fn sym_eig<T: Scalar>(m: &SymMatrix<T>) -> Result<EigDecomp<T>> {
    sym_eig_named(m, "input matrix")
}

/// [`sym_eig`] with a matrix name carried into the failure error.
pub fn sym_eig_named<T: Scalar>(m: &SymMatrix<T>, name: &str) -> Result<EigDecomp<T>> {
    let n = m.dim();
    let mut v = m.as_slice().to_vec();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(n, &mut v, &mut d, &mut e);
    ql_implicit(n, &mut v, &mut d, &mut e)
        .map_err(|iterations| PdaError::EigenFailure { matrix: name.to_string(), iterations })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&j| d[j]).collect();
    let mut vectors = vec![T::zero(); n * n];
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + new_j] = v[i * n + old_j];
        }
    }
    Ok(EigDecomp { dim: n, vectors, values })
}

// Householder reduction to tridiagonal form (EISPACK tred2). On return `v`
// holds the accumulated orthogonal transform, `d` the diagonal and `e` the
// subdiagonal in e[1..n].
#[allow(clippy::needless_range_loop)]
fn tridiagonalize<T: Scalar>(n: usize, v: &mut [T], d: &mut [T], e: &mut [T]) {
    let zero = T::zero();
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = zero;
                v[at(j, i)] = zero;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = zero;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = zero;
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = zero;
    }
    v[at(n - 1, n - 1)] = T::one();
    e[0] = zero;
}

// Implicit QL on the tridiagonal matrix (EISPACK tql2). Returns the
// iteration count on failure.
fn ql_implicit<T: Scalar>(n: usize, v: &mut [T], d: &mut [T], e: &mut [T]) -> std::result::Result<(), usize> {
    let zero = T::zero();
    let at = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;

    let eps = T::epsilon();
    let mut f = zero;
    let mut tst1 = zero;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER {
                    return Err(iter - 1);
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (T::cst(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[at(k, i + 1)];
                        v[at(k, i + 1)] = s * v[at(k, i)] + c * h;
                        v[at(k, i)] = c * v[at(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if !(e[l].abs() > eps * tst1) {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }
    if d.iter().any(|x| !x.is_finite()) {
        return Err(0);
    }
    Ok(())
}

/// Lower-triangular Cholesky factor `L` (row-major) with `L L^T = m`.
pub fn cholesky<T: Scalar>(m: &SymMatrix<T>) -> Result<Vec<T>> {
    let p = m.dim();
    let mut l = vec![T::zero(); p * p];
    for j in 0..p {
        let mut diag = m.get(j, j);
        for k in 0..j {
            diag -= l[j * p + k] * l[j * p + k];
        }
        if !(diag > T::zero()) {
            return Err(PdaError::NotPositiveDefinite { min_eigenvalue: diag.as_f64() });
        }
        let root = diag.sqrt();
        l[j * p + j] = root;
        for i in (j + 1)..p {
            let mut v = m.get(i, j);
            for k in 0..j {
                v -= l[i * p + k] * l[j * p + k];
            }
            l[i * p + j] = v / root;
        }
    }
    Ok(l)
}

/// Entrywise `sign(z) * max(|z| - t, 0)`, diagonal included.
pub fn soft_threshold<T: Scalar>(m: &SymMatrix<T>, t: T) -> Result<SymMatrix<T>> {
    if !(t >= T::zero()) {
        return Err(PdaError::InvalidArgument(format!("threshold must be nonnegative, got {t}")));
    }
    Ok(m.map(|z| shrink(z, t)))
}

#[inline]
pub(crate) fn shrink<T: Scalar>(z: T, t: T) -> T {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        T::zero()
    }
}

/// Inverse of a symmetric positive definite matrix.
pub fn spd_inverse<T: Scalar>(m: &SymMatrix<T>) -> Result<SymMatrix<T>> {
    let eig = sym_eig(m)?;
    check_rank(&eig)
        .map_err(|(min, tol)| PdaError::Singular { min_eigenvalue: min.as_f64(), tolerance: tol.as_f64() })?;
    Ok(eig.reconstruct_with(|d| T::one() / d))
}

/// Log-determinant of a positive definite matrix.
pub fn log_det<T: Scalar>(m: &SymMatrix<T>) -> Result<T> {
    let eig = sym_eig(m)?;
    check_rank(&eig).map_err(|(min, _)| PdaError::NotPositiveDefinite { min_eigenvalue: min.as_f64() })?;
    Ok(eig.values().iter().map(|d| d.ln()).sum())
}

/// Whether every eigenvalue is above the relative rank tolerance.
pub fn is_positive_definite<T: Scalar>(m: &SymMatrix<T>) -> Result<bool> {
    let eig = sym_eig(m)?;
    Ok(check_rank(&eig).is_ok())
}

fn check_rank<T: Scalar>(eig: &EigDecomp<T>) -> std::result::Result<(), (T, T)> {
    let min = eig.smallest();
    let tol = eig.rank_tolerance();
    if min > tol {
        Ok(())
    } else {
        Err((min, tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m2(a: f64, b: f64, c: f64) -> SymMatrix<f64> {
        SymMatrix::from_row_major(2, vec![a, b, b, c]).unwrap()
    }

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn construction_symmetrizes() {
        let m = SymMatrix::from_row_major(2, vec![1.0, 2.0, 4.0, 1.0]).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 3.0);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(SymMatrix::from_row_major(2, vec![1.0, f64::NAN, 0.0, 1.0]).is_err());
        assert!(SymMatrix::<f64>::from_row_major(2, vec![1.0; 3]).is_err());
        assert!(SymMatrix::<f64>::from_row_major(0, vec![]).is_err());
    }

    #[test]
    fn eig_identity() {
        let e = sym_eig(&SymMatrix::<f64>::identity(3)).unwrap();
        assert_eq!(e.values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn eig_diagonal_sorted_descending() {
        let m = SymMatrix::from_diagonal(&[2.0, 5.0, -1.0]);
        let e = sym_eig(&m).unwrap();
        assert!(max_abs_diff(e.values(), &[5.0, 2.0, -1.0]) < 1e-14);
        // columns are signed unit vectors
        for j in 0..3 {
            let v = e.vector(j);
            assert_eq!(v.iter().filter(|x| x.abs() > 1e-12).count(), 1);
        }
        assert!((e.vector(0)[1].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_two_by_two() {
        // characteristic polynomial (2 - x)^2 - 1 has roots 3 and 1
        let e = sym_eig(&m2(2.0, 1.0, 2.0)).unwrap();
        assert!(max_abs_diff(e.values(), &[3.0, 1.0]) < 1e-14);
    }

    #[test]
    fn eig_one_by_one() {
        let e = sym_eig(&SymMatrix::from_diagonal(&[-4.5])).unwrap();
        assert_eq!(e.values(), &[-4.5]);
        assert_eq!(e.vectors(), &[1.0]);
    }

    #[test]
    fn eig_works_in_f32() {
        let m = SymMatrix::<f32>::from_row_major(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let e = sym_eig(&m).unwrap();
        assert!((e.values()[0] - 3.0).abs() < 1e-5);
        assert!((e.values()[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn soft_threshold_examples() {
        let m = m2(3.0, -1.0, 0.5);
        assert_eq!(soft_threshold(&m, 0.0).unwrap(), m);
        assert_eq!(soft_threshold(&m, 1.0).unwrap(), m2(2.0, 0.0, 0.0));
        assert_eq!(soft_threshold(&m, 3.0).unwrap(), SymMatrix::zeros(2));
        assert!(soft_threshold(&m, -0.1).is_err());
    }

    #[test]
    fn inverse_examples() {
        let i4 = SymMatrix::<f64>::identity(4);
        assert!(max_abs_diff(spd_inverse(&i4).unwrap().as_slice(), i4.as_slice()) < 1e-15);
        let d = spd_inverse(&SymMatrix::from_diagonal(&[2.0, 4.0])).unwrap();
        assert!(max_abs_diff(d.as_slice(), &[0.5, 0.0, 0.0, 0.25]) < 1e-15);
        // adjugate formula
        let inv = spd_inverse(&m2(2.0, 1.0, 2.0)).unwrap();
        let third = 1.0 / 3.0;
        assert!(max_abs_diff(inv.as_slice(), &[2.0 * third, -third, -third, 2.0 * third]) < 1e-14);
    }

    #[test]
    fn inverse_rejects_singular() {
        let err = spd_inverse(&m2(1.0, 1.0, 1.0)).unwrap_err();
        assert!(matches!(err, PdaError::Singular { .. }));
        let err = spd_inverse(&SymMatrix::from_diagonal(&[1.0, -1.0])).unwrap_err();
        match err {
            PdaError::Singular { min_eigenvalue, .. } => assert_eq!(min_eigenvalue, -1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn log_det_examples() {
        assert_eq!(log_det(&SymMatrix::<f64>::identity(5)).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert!((log_det(&SymMatrix::from_diagonal(&[e, e * e])).unwrap() - 3.0).abs() < 1e-14);
        assert!((log_det(&m2(2.0, 1.0, 2.0)).unwrap() - 3f64.ln()).abs() < 1e-14);
        assert!(matches!(log_det(&m2(1.0, 2.0, 1.0)), Err(PdaError::NotPositiveDefinite { .. })));
    }

    #[test]
    fn cholesky_factor_reproduces_input() {
        let m = m2(4.0, 2.0, 3.0);
        let l = cholesky(&m).unwrap();
        assert_eq!(l[1], 0.0);
        let back = [l[0] * l[0], l[0] * l[2], l[2] * l[0], l[2] * l[2] + l[3] * l[3]];
        assert!(max_abs_diff(&back, m.as_slice()) < 1e-14);
        assert!(cholesky(&m2(1.0, 2.0, 1.0)).is_err());
    }

    #[test]
    fn eig_failure_on_nan_is_reported() {
        let m = SymMatrix::symmetrized(2, vec![f64::NAN, 1.0, 1.0, 2.0]);
        let err = sym_eig_named(&m, "probe").unwrap_err();
        match err {
            PdaError::EigenFailure { matrix, .. } => assert_eq!(matrix, "probe"),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn sym_strategy(max_dim: usize, bound: f64) -> impl Strategy<Value = SymMatrix<f64>> {
        (1..=max_dim).prop_flat_map(move |p| {
            prop::collection::vec(-bound..bound, p * p).prop_map(move |v| SymMatrix::from_row_major(p, v).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn eig_reconstructs_and_is_orthogonal(m in sym_strategy(24, 10.0)) {
            let e = sym_eig(&m).unwrap();
            let p = m.dim();
            let rec = e.reconstruct();
            let err = (&rec - &m).frobenius() / m.frobenius().max(1e-300);
            prop_assert!(err <= 1e-9, "reconstruction error {}", err);
            let u = e.vectors();
            for a in 0..p {
                for b in 0..p {
                    let dot: f64 = (0..p).map(|i| u[i * p + a] * u[i * p + b]).sum();
                    let target = if a == b { 1.0 } else { 0.0 };
                    prop_assert!((dot - target).abs() <= 1e-10);
                }
            }
            prop_assert!(e.values().windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn soft_threshold_is_nonexpansive(
            (a, b) in (1usize..8).prop_flat_map(|p| (
                prop::collection::vec(-5.0..5.0f64, p * p),
                prop::collection::vec(-5.0..5.0f64, p * p),
            ).prop_map(move |(x, y)| (
                SymMatrix::from_row_major(p, x).unwrap(),
                SymMatrix::from_row_major(p, y).unwrap(),
            ))),
            t in 0.0..3.0f64,
        ) {
            let lhs = (&soft_threshold(&a, t).unwrap() - &soft_threshold(&b, t).unwrap()).frobenius();
            prop_assert!(lhs <= (&a - &b).frobenius() + 1e-12);
        }
    }
}
