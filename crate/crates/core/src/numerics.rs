//! Dense complex matrices and the handful of linear-algebra kernels the rest of
//! the crate needs: products, Kronecker products, a one-sided Jacobi SVD,
//! nullspace extraction and principal angles between subspaces.
//!
//! Storage is row-major everywhere. Vectorization is row-major as well, so
//! `vec(A K B) = (A ⊗ Bᵀ) vec(K)`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{invalid, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default relative nullspace threshold (relative to the largest singular value).
pub const DEFAULT_NULLSPACE_TOL: f64 = 1e-9;

/// Dense complex matrix, row-major. Matrices built from real data carry a
/// `real` flag and have identically zero imaginary parts.
#[derive(Clone, PartialEq)]
pub struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
    real: bool,
}

impl fmt::Debug for Dense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Dense {}x{} (real: {})", self.rows, self.cols, self.real)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self.get(i, j);
                    if self.real {
                        format!("{:9.5}", z.re)
                    } else {
                        format!("{:9.5}{:+9.5}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense { rows, cols, data: vec![ZERO; rows * cols], real: true }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Real matrix from row-major data.
    pub fn from_real(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        Dense { rows, cols, data: data.into_iter().map(|x| C64::new(x, 0.0)).collect(), real: true }
    }

    /// Complex matrix from row-major data. The result is flagged complex even
    /// if every imaginary part happens to vanish.
    pub fn from_complex(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        Dense { rows, cols, data, real: false }
    }

    pub fn from_real_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(C64::new(f(i, j), 0.0));
            }
        }
        Dense { rows, cols, data, real: true }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Dense { rows, cols, data, real: false }
    }

    /// Column vector.
    pub fn column_vector(v: &[C64]) -> Self {
        Dense::from_complex(v.len(), 1, v.to_vec())
    }

    pub fn real_column_vector(v: &[f64]) -> Self {
        Dense::from_real(v.len(), 1, v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    /// Sets an entry. Writing a value with non-zero imaginary part clears the
    /// real flag.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        if z.im != 0.0 {
            self.real = false;
        }
        self.data[i * self.cols + j] = z;
    }

    #[inline]
    pub fn set_re(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.cols + j] = C64::new(x, 0.0);
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest |Im| over all entries.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Drops imaginary parts no larger than `tol` and flags the result real.
    /// Fails if some imaginary part exceeds `tol`.
    pub fn into_real(mut self, tol: f64) -> Result<Dense> {
        let worst = self.max_imag();
        if worst > tol {
            return invalid(format!("matrix is not real: max |Im| = {worst:.3e}"));
        }
        for z in &mut self.data {
            z.im = 0.0;
        }
        self.real = true;
        Ok(self)
    }

    /// Marks a matrix as complex without touching entries.
    pub fn into_complex(mut self) -> Dense {
        self.real = false;
        self
    }

    pub fn re_part(&self) -> Dense {
        Dense::from_real_fn(self.rows, self.cols, |i, j| self.get(i, j).re)
    }

    pub fn im_part(&self) -> Dense {
        Dense::from_real_fn(self.rows, self.cols, |i, j| self.get(i, j).im)
    }

    pub fn transpose(&self) -> Dense {
        let mut out = Dense::zeros(self.cols, self.rows);
        out.real = self.real;
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    pub fn conj(&self) -> Dense {
        let mut out = self.clone();
        for z in &mut out.data {
            *z = z.conj();
        }
        out
    }

    pub fn adjoint(&self) -> Dense {
        self.transpose().conj()
    }

    pub fn scale(&self, c: C64) -> Dense {
        let mut out = self.clone();
        for z in &mut out.data {
            *z *= c;
        }
        out.real = self.real && c.im == 0.0;
        out
    }

    pub fn scale_re(&self, c: f64) -> Dense {
        self.scale(C64::new(c, 0.0))
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn try_matmul(&self, other: &Dense) -> Result<Dense> {
        if self.cols != other.rows {
            return invalid(format!(
                "shape mismatch in product: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        Ok(self.matmul(other))
    }

    pub fn matmul(&self, other: &Dense) -> Dense {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut data = vec![ZERO; n * m];
        for i in 0..n {
            let out_row = &mut data[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[p * m..(p + 1) * m];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Dense { rows: n, cols: m, data, real: self.real && other.real }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Kronecker product: `(A⊗B)[i·rB+k, j·cB+m] = A[i,j]·B[k,m]`.
    pub fn kron(&self, other: &Dense) -> Dense {
        let (ra, ca) = self.shape();
        let (rb, cb) = other.shape();
        let mut out = Dense::zeros(ra * rb, ca * cb);
        out.real = self.real && other.real;
        let out_cols = ca * cb;
        for i in 0..ra {
            for j in 0..ca {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..rb {
                    for m in 0..cb {
                        out.data[(i * rb + k) * out_cols + j * cb + m] = a * other.get(k, m);
                    }
                }
            }
        }
        out
    }

    /// Row-major vectorization.
    pub fn vectorize(&self) -> Vec<C64> {
        self.data.clone()
    }

    /// Inverse of [`Dense::vectorize`]; the result is flagged real when every
    /// imaginary part is exactly zero.
    pub fn from_vectorized(rows: usize, cols: usize, v: &[C64]) -> Dense {
        assert_eq!(v.len(), rows * cols);
        let real = v.iter().all(|z| z.im == 0.0);
        Dense { rows, cols, data: v.to_vec(), real }
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<C64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, columns: &[Vec<C64>]) -> Dense {
        let mut out = Dense::zeros(n, columns.len());
        out.real = columns.iter().all(|c| c.iter().all(|z| z.im == 0.0));
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), n, "column length mismatch");
            for (i, z) in c.iter().enumerate() {
                out.data[i * out.cols + j] = *z;
            }
        }
        out
    }

    pub fn hstack(blocks: &[&Dense]) -> Dense {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Dense::zeros(rows, cols);
        out.real = blocks.iter().all(|b| b.real);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            for i in 0..rows {
                for j in 0..b.cols {
                    out.data[i * cols + offset + j] = b.get(i, j);
                }
            }
            offset += b.cols;
        }
        out
    }

    pub fn vstack(blocks: &[&Dense]) -> Dense {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Dense { rows, cols, data, real: blocks.iter().all(|b| b.real) }
    }

    pub fn block_diag(blocks: &[&Dense]) -> Dense {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Dense::zeros(rows, cols);
        out.real = blocks.iter().all(|b| b.real);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.data[(r0 + i) * cols + c0 + j] = b.get(i, j);
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Sub-matrix with the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Dense {
        let mut out = Dense::zeros(rows.len(), cols.len());
        out.real = self.real;
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.data[a * cols.len() + b] = self.get(i, j);
            }
        }
        out
    }

    /// Real-linear matrix of `v ↦ M v` on ℂⁿ ≅ ℝ²ⁿ, coordinates `[Re v; Im v]`.
    pub fn realify(&self) -> Dense {
        let (a, b) = (self.re_part(), self.im_part());
        let top = Dense::hstack(&[&a, &b.scale_re(-1.0)]);
        let bottom = Dense::hstack(&[&b, &a]);
        Dense::vstack(&[&top, &bottom])
    }

    /// Real-linear matrix of the antilinear map `v ↦ M v̄` on ℂⁿ ≅ ℝ²ⁿ.
    pub fn realify_antilinear(&self) -> Dense {
        let (a, b) = (self.re_part(), self.im_part());
        let top = Dense::hstack(&[&a, &b]);
        let bottom = Dense::hstack(&[&b, &a.scale_re(-1.0)]);
        Dense::vstack(&[&top, &bottom])
    }

    /// Relative Frobenius distance `‖self − other‖ / max(1, ‖other‖)`.
    pub fn rel_distance(&self, other: &Dense) -> f64 {
        (self - other).frobenius_norm() / other.frobenius_norm().max(1.0)
    }
}

impl<'a> Mul<&'a Dense> for &'a Dense {
    type Output = Dense;
    fn mul(self, rhs: &'a Dense) -> Dense {
        self.matmul(rhs)
    }
}

impl<'a> Add<&'a Dense> for &'a Dense {
    type Output = Dense;
    fn add(self, rhs: &'a Dense) -> Dense {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sum");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Dense { rows: self.rows, cols: self.cols, data, real: self.real && rhs.real }
    }
}

impl<'a> Sub<&'a Dense> for &'a Dense {
    type Output = Dense;
    fn sub(self, rhs: &'a Dense) -> Dense {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in difference");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Dense { rows: self.rows, cols: self.cols, data, real: self.real && rhs.real }
    }
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    a.kron(b)
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis of a subspace, stored as the columns of an
/// `ambient × count` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    matrix: Dense,
}

impl SubspaceBasis {
    pub fn empty(ambient: usize) -> Self {
        SubspaceBasis { matrix: Dense::zeros(ambient, 0) }
    }

    /// Wraps columns that are already orthonormal. Fails if they are not (to 1e-12).
    pub fn from_orthonormal(matrix: Dense) -> Result<Self> {
        let gram = &matrix.adjoint() * &matrix;
        let dev = (&gram - &Dense::identity(matrix.cols())).frobenius_norm();
        if dev > 1e-12 {
            return invalid(format!("columns are not orthonormal (deviation {dev:.3e})"));
        }
        Ok(SubspaceBasis { matrix })
    }

    /// Orthonormal basis for the span of arbitrary columns (rank decided at
    /// relative tolerance `tol`).
    pub fn spanning(ambient: usize, columns: &[Vec<C64>], tol: f64) -> Result<Self> {
        if columns.is_empty() {
            return Ok(Self::empty(ambient));
        }
        let a = Dense::from_columns(ambient, columns);
        if !a.is_finite() {
            return invalid("non-finite entries in spanning set");
        }
        let svd = jacobi_svd(&a);
        let smax = svd.singular_values.first().copied().unwrap_or(0.0);
        let mut cols = Vec::new();
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s > tol * smax && s > 0.0 {
                let u: Vec<C64> = svd.u_sigma.column(k).iter().map(|z| z / s).collect();
                cols.push(sign_fixed(u));
            }
        }
        let mut m = Dense::from_columns(ambient, &cols);
        if a.is_real() {
            m = m.into_real(1e-12)?;
        }
        Ok(SubspaceBasis { matrix: m })
    }

    pub fn ambient(&self) -> usize {
        self.matrix.rows()
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &Dense {
        &self.matrix
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        self.matrix.columns()
    }

    /// Distance of `v` from the subspace, `‖v − P v‖`.
    pub fn residual(&self, v: &[C64]) -> f64 {
        let coeffs = self.matrix.adjoint().apply(v);
        let proj = self.matrix.apply(&coeffs);
        v.iter().zip(&proj).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Result of the right-sided SVD used throughout: `A V = U Σ`.
#[derive(Clone, Debug)]
pub struct Svd {
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
    /// Columns are `σ_k u_k` (same order as `singular_values`).
    pub u_sigma: Dense,
    /// Right singular vectors as columns (n×n, unitary).
    pub v: Dense,
}

/// One-sided (Hestenes) Jacobi SVD. Deterministic for identical inputs.
///
/// Returns all `n` right singular vectors, including those of the kernel when
/// `m < n`.
pub fn jacobi_svd(a: &Dense) -> Svd {
    let (m, n) = a.shape();
    // Work on column-major copies: w[j] is column j.
    let mut w: Vec<Vec<C64>> = a.columns();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            e
        })
        .collect();
    let eps = 1e-15;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(&w[p], &w[q]);
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || g < 1e-300 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let sp = phase.conj() * s; // s e^{-iφ}
                let sq = phase * s; // s e^{iφ}
                rotate_pair(&mut w, p, q, c, sp, sq);
                rotate_pair(&mut v, p, q, c, sp, sq);
            }
        }
        if !rotated {
            break;
        }
    }
    let _ = m;
    let sigma: Vec<f64> = w.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // Descending, stable on ties so the ordering is reproducible.
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap_or(std::cmp::Ordering::Equal));
    let singular_values = order.iter().map(|&k| sigma[k]).collect();
    let u_cols: Vec<Vec<C64>> = order.iter().map(|&k| w[k].clone()).collect();
    let v_cols: Vec<Vec<C64>> = order.iter().map(|&k| v[k].clone()).collect();
    let mut u_sigma = Dense::from_columns(a.rows(), &u_cols);
    let mut vm = Dense::from_columns(n, &v_cols);
    if !a.is_real() {
        u_sigma = u_sigma.into_complex();
        vm = vm.into_complex();
    }
    Svd { singular_values, u_sigma, v: vm }
}

fn rotate_pair(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, sp: C64, sq: C64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = a * c - sp * b;
        *y = sq * a + b * c;
    }
}

/// Householder QR; returns only the `n×n` upper-triangular factor of a tall matrix.
fn householder_r(a: &Dense) -> Dense {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<C64>> = a.columns();
    for k in 0..n.min(m) {
        let xnorm = cols[k][k..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = cols[k][k];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        let mut v: Vec<C64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm = norm(&v);
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        for col in cols.iter_mut().skip(k) {
            let proj: C64 = v.iter().zip(&col[k..]).map(|(a, b)| a.conj() * b).sum();
            for (c, vi) in col[k..].iter_mut().zip(&v) {
                *c -= 2.0 * proj * vi;
            }
        }
    }
    let r = Dense::from_fn(n, n, |i, j| if i <= j { cols[j][i] } else { ZERO });
    if a.is_real() {
        // Householder on a real matrix stays real.
        r.into_real(0.0).expect("real input yields real R")
    } else {
        r
    }
}

/// Nullspace together with the full singular spectrum it was cut from.
#[derive(Clone, Debug)]
pub struct NullspaceResult {
    pub basis: SubspaceBasis,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// Smallest kept singular value over largest dropped one (∞ if nothing
    /// was dropped or everything dropped is exactly zero).
    pub gap_ratio: f64,
}

/// Nullspace with the spectrum and gap information.
pub fn nullspace_detailed(a: &Dense, tol: f64) -> Result<NullspaceResult> {
    if !(tol > 0.0) {
        return invalid("nullspace tolerance must be positive");
    }
    if !a.is_finite() {
        return invalid("matrix has non-finite entries");
    }
    let n = a.cols();
    let work = if a.rows() > n { householder_r(a) } else { a.clone() };
    let svd = jacobi_svd(&work);
    let smax = svd.singular_values.first().copied().unwrap_or(0.0);
    let cut = tol * smax;
    let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
    let kept_min = svd.singular_values[..rank].last().copied();
    let dropped_max = svd.singular_values.get(rank).copied();
    let gap_ratio = match (kept_min, dropped_max) {
        (Some(k), Some(d)) if d > 0.0 => k / d,
        _ => f64::INFINITY,
    };
    // Ascending singular value order for the null vectors.
    let mut cols = Vec::with_capacity(n - rank);
    for k in (rank..n).rev() {
        cols.push(sign_fixed(svd.v.column(k)));
    }
    let mut m = Dense::from_columns(n, &cols);
    if a.is_real() {
        m = m.into_real(1e-12)?;
    } else {
        m = m.into_complex();
    }
    Ok(NullspaceResult {
        basis: SubspaceBasis { matrix: m },
        singular_values: svd.singular_values,
        rank,
        gap_ratio,
    })
}

/// Orthonormal basis of `{v : ‖Av‖ ≤ tol·σ_max·‖v‖}`.
pub fn nullspace(a: &Dense, tol: f64) -> Result<SubspaceBasis> {
    Ok(nullspace_detailed(a, tol)?.basis)
}

/// Scales `v` so that its first non-negligible component is real and positive.
fn sign_fixed(mut v: Vec<C64>) -> Vec<C64> {
    let scale = norm(&v);
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-10 * scale).copied() {
        let phase = z.conj() / z.norm();
        for x in &mut v {
            *x *= phase;
        }
    }
    v
}

/// Largest principal angle between two subspaces of the same ambient space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleDistance {
    pub angle: f64,
    /// Set when the subspaces have different dimensions; `angle` is then π/2.
    pub dimension_mismatch: bool,
}

pub fn principal_angle_distance(u: &SubspaceBasis, v: &SubspaceBasis) -> Result<AngleDistance> {
    if u.ambient() != v.ambient() {
        return invalid(format!(
            "ambient dimension mismatch: {} vs {}",
            u.ambient(),
            v.ambient()
        ));
    }
    if u.dim() != v.dim() {
        return Ok(AngleDistance { angle: std::f64::consts::FRAC_PI_2, dimension_mismatch: true });
    }
    if u.dim() == 0 {
        return Ok(AngleDistance { angle: 0.0, dimension_mismatch: false });
    }
    let um = u.matrix();
    let vm = v.matrix();
    let cross = &um.adjoint() * vm;
    let resid = vm - &(um * &cross);
    let cosines = jacobi_svd(&cross).singular_values;
    let sines = jacobi_svd(&resid).singular_values;
    let cmin = cosines.last().copied().unwrap_or(1.0).min(1.0);
    let smax = sines.first().copied().unwrap_or(0.0).min(1.0);
    Ok(AngleDistance { angle: smax.atan2(cmin), dimension_mismatch: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn real(rows: usize, cols: usize, v: &[f64]) -> Dense {
        Dense::from_real(rows, cols, v.to_vec())
    }

    #[test]
    fn nullspace_of_identity_is_empty() {
        let ns = nullspace(&Dense::identity(5), DEFAULT_NULLSPACE_TOL).unwrap();
        assert_eq!(ns.dim(), 0);
        assert_eq!(ns.ambient(), 5);
    }

    #[test]
    fn nullspace_of_zero_is_everything() {
        let ns = nullspace(&Dense::zeros(4, 4), DEFAULT_NULLSPACE_TOL).unwrap();
        assert_eq!(ns.dim(), 4);
        let gram = &ns.matrix().adjoint() * ns.matrix();
        assert!((&gram - &Dense::identity(4)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn nullspace_of_rank_one_diagonal() {
        let ns = nullspace(&real(2, 2, &[1.0, 0.0, 0.0, 0.0]), DEFAULT_NULLSPACE_TOL).unwrap();
        assert_eq!(ns.dim(), 1);
        let v = ns.columns().remove(0);
        assert!((v[0]).norm() < 1e-15);
        assert!((v[1] - ONE).norm() < 1e-15);
        assert!(ns.matrix().is_real());
    }

    #[test]
    fn nullspace_rejects_bad_input() {
        let mut a = Dense::identity(2);
        a.set_re(0, 1, f64::NAN);
        assert!(nullspace(&a, 1e-9).is_err());
        assert!(nullspace(&Dense::identity(2), 0.0).is_err());
    }

    #[test]
    fn wide_matrix_nullspace() {
        // 1x3 row (1, 1, 1): kernel is 2-dimensional.
        let ns = nullspace(&real(1, 3, &[1.0, 1.0, 1.0]), 1e-9).unwrap();
        assert_eq!(ns.dim(), 2);
        for v in ns.columns() {
            let s: C64 = v.iter().sum();
            assert!(s.norm() < 1e-14);
        }
    }

    #[test]
    fn kron_of_identities() {
        let k = kron(&Dense::identity(2), &Dense::identity(2));
        assert_eq!(k, Dense::identity(4));
    }

    #[test]
    fn kron_places_blocks() {
        let a = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let k = kron(&a, &Dense::identity(2));
        let expected = Dense::from_real_fn(4, 4, |i, j| if j == i + 2 { 1.0 } else { 0.0 });
        assert_eq!(k, expected);
    }

    #[test]
    fn kron_vectorizes_triple_products() {
        // Oracle: direct A K Bᵀ against (A⊗B) vec(K) with row-major vec.
        let a = Dense::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64 * 0.37 - 1.0, (i as f64) - 0.5 * j as f64));
        let b = Dense::from_fn(2, 2, |i, j| C64::new(0.3 + i as f64 - j as f64, 0.2 * (i + j) as f64));
        let k = Dense::from_fn(3, 2, |i, j| C64::new((i + 2 * j) as f64 * 0.11 + 0.5, -(i as f64) * 0.7 + j as f64));
        let direct = &(&a * &k) * &b.transpose();
        let via_kron = kron(&a, &b).apply(&k.vectorize());
        let err = direct.vectorize().iter().zip(&via_kron).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-13, "err = {err}");
    }

    #[test]
    fn principal_angles_basic() {
        let e1 = SubspaceBasis::from_orthonormal(real(2, 1, &[1.0, 0.0])).unwrap();
        let e2 = SubspaceBasis::from_orthonormal(real(2, 1, &[0.0, 1.0])).unwrap();
        let h = 0.5f64.sqrt();
        let diag = SubspaceBasis::from_orthonormal(real(2, 1, &[h, h])).unwrap();
        assert_eq!(principal_angle_distance(&e1, &e1).unwrap().angle, 0.0);
        assert!((principal_angle_distance(&e1, &e2).unwrap().angle - FRAC_PI_2).abs() < 1e-15);
        // Oracle: arccos of the inner product.
        let expected = (h).acos();
        assert!((principal_angle_distance(&e1, &diag).unwrap().angle - expected).abs() < 1e-15);
        assert!((expected - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn principal_angle_dimension_mismatch() {
        let e1 = SubspaceBasis::from_orthonormal(real(2, 1, &[1.0, 0.0])).unwrap();
        let all = SubspaceBasis::from_orthonormal(Dense::identity(2)).unwrap();
        let d = principal_angle_distance(&e1, &all).unwrap();
        assert!(d.dimension_mismatch);
        assert_eq!(d.angle, FRAC_PI_2);
        let other = SubspaceBasis::from_orthonormal(Dense::identity(3)).unwrap();
        assert!(principal_angle_distance(&e1, &other).is_err());
    }

    #[test]
    fn small_angles_are_resolved_below_sqrt_eps() {
        let t: f64 = 1e-11;
        let a = SubspaceBasis::from_orthonormal(real(2, 1, &[1.0, 0.0])).unwrap();
        let b = SubspaceBasis::from_orthonormal(real(2, 1, &[t.cos(), t.sin()])).unwrap();
        let d = principal_angle_distance(&a, &b).unwrap().angle;
        assert!((d - t).abs() < 1e-20, "d = {d:e}");
    }

    #[test]
    fn realify_matches_complex_product() {
        let m = Dense::from_fn(2, 2, |i, j| C64::new(i as f64 + 0.5, j as f64 - 0.25));
        let v = vec![C64::new(0.3, -1.2), C64::new(2.0, 0.7)];
        let mv = m.apply(&v);
        let vr: Vec<C64> = v.iter().map(|z| C64::new(z.re, 0.0)).chain(v.iter().map(|z| C64::new(z.im, 0.0))).collect();
        let out = m.realify().apply(&vr);
        for k in 0..2 {
            assert!((out[k].re - mv[k].re).abs() < 1e-15);
            assert!((out[k + 2].re - mv[k].im).abs() < 1e-15);
        }
        let mvbar = m.apply(&v.iter().map(|z| z.conj()).collect::<Vec<_>>());
        let out = m.realify_antilinear().apply(&vr);
        for k in 0..2 {
            assert!((out[k].re - mvbar[k].re).abs() < 1e-15);
            assert!((out[k + 2].re - mvbar[k].im).abs() < 1e-15);
        }
    }

    #[test]
    fn spanning_basis_drops_dependent_columns() {
        let cols = vec![
            vec![ONE, ZERO, ZERO],
            vec![C64::new(2.0, 0.0), ZERO, ZERO],
            vec![ZERO, ONE, ONE],
        ];
        let b = SubspaceBasis::spanning(3, &cols, 1e-10).unwrap();
        assert_eq!(b.dim(), 2);
        assert!(b.residual(&[ONE, ONE, ONE]) < 1e-14);
        assert!((b.residual(&[ZERO, ONE, -ONE]) - 2f64.sqrt()).abs() < 1e-14);
    }
}
