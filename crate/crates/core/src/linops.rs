//! Dense complex operators, orthonormal subspace frames, and the kernel,
//! intersection and reduction primitives every decomposition is built on.
//!
//! Rank decisions are relative: a singular value counts as zero when it is at
//! most `tol_rank * max(sigma_max, scale)`. The public [`kernel`] uses
//! `scale = 0` (pure relative cutoff). Internally, defect operators such as
//! `I - T*T` pass `scale = 1` so that a defect which is zero up to rounding is
//! not mistaken for a full-rank matrix whose largest singular value is 1e-16.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, Schur, QR, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) type Mat = DMatrix<Complex64>;

const SVD_MAX_ITER: usize = 0;

/// Square dense complex matrix with finite entries: an operator on `C^dim`.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: Mat,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{}) {}", self.dim(), self.dim(), self.inner)
    }
}

impl ComplexMatrix {
    pub fn try_new(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::InvalidMatrix(format!(
                "matrix is {}x{}, expected square",
                inner.nrows(),
                inner.ncols()
            )));
        }
        if inner.nrows() == 0 {
            return Err(Error::InvalidMatrix("matrix has dimension 0".into()));
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { inner })
    }

    /// Builds a `dim x dim` matrix from row-major entries.
    pub fn from_row_major(dim: usize, data: &[Complex64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Self::try_new(DMatrix::from_row_slice(dim, dim, data))
    }

    /// Builds a real matrix from rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::InvalidMatrix("ragged rows".into()));
            }
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::from_row_major(n, &data)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: Mat::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: Mat::zeros(dim, dim),
        }
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut inner = Mat::zeros(n, n);
        for (i, z) in entries.iter().enumerate() {
            inner[(i, i)] = *z;
        }
        Self { inner }
    }

    pub fn diagonal_real(entries: &[f64]) -> Self {
        let z: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&z)
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(blocks: &[ComplexMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.dim()).sum();
        let mut inner = Mat::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            let d = b.dim();
            inner.view_mut((off, off), (d, d)).copy_from(&b.inner);
            off += d;
        }
        Self { inner }
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        Self {
            inner: self.inner.kronecker(&other.inner),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.inner
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.map(|z| z * s),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            inner: self.inner.map(|z| z * s),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Mat::identity(self.dim(), self.dim());
        for _ in 0..k {
            out = &out * &self.inner;
        }
        Self { inner: out }
    }

    /// `Q T Q*`.
    pub fn conjugate_by(&self, q: &ComplexMatrix) -> Self {
        Self {
            inner: &q.inner * &self.inner * q.inner.adjoint(),
        }
    }

    /// Operator (spectral) norm.
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.inner)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        singular_values(&self.inner)
    }

    /// Inverse, refused when `sigma_min <= tol_rank * sigma_max`.
    pub fn inverse(&self, tol_rank: f64) -> Result<Self> {
        let sv = self.singular_values()?;
        let smax = sv[0];
        let smin = *sv.last().unwrap();
        if smax == 0.0 || smin <= tol_rank * smax {
            return Err(Error::SingularOperator(if smax == 0.0 { 0.0 } else { smin / smax }));
        }
        self.inner
            .clone()
            .try_inverse()
            .map(|inner| Self { inner })
            .ok_or(Error::SingularOperator(smin / smax))
    }

    /// `B* T B` for a frame `B` of `space`.
    pub fn compress(&self, space: &Subspace) -> Result<Self> {
        check_dim(self.dim(), space.ambient_dim())?;
        Ok(Self {
            inner: compress(&self.inner, &space.basis),
        })
    }

    pub(crate) fn from_mat_unchecked(inner: Mat) -> Self {
        Self { inner }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

/// A closed subspace of `C^n`, stored as an `n x k` frame with orthonormal
/// columns. `k = 0` is the zero subspace and is an ordinary value.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Mat,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Mat::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Mat::identity(ambient_dim, ambient_dim),
        }
    }

    /// Span of the standard basis vectors with the given (0-based) indices.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Self {
        let mut basis = Mat::zeros(ambient_dim, indices.len());
        for (c, &i) in indices.iter().enumerate() {
            basis[(i, c)] = Complex64::new(1.0, 0.0);
        }
        Self { ambient_dim, basis }
    }

    /// Column space of `columns` (an `n x m` matrix), rank decided with
    /// `tol_rank` relative to `max(sigma_max, 1)`.
    pub fn span(columns: &DMatrix<Complex64>, tol_rank: f64) -> Result<Self> {
        let n = columns.nrows();
        if columns.ncols() == 0 {
            return Ok(Self::zero(n));
        }
        let perp = null_space_scaled(&columns.adjoint(), tol_rank, 1.0)?;
        Ok(complement(&Self {
            ambient_dim: n,
            basis: perp,
        }))
    }

    /// Wraps a frame that is already orthonormal to working precision.
    pub fn from_orthonormal(basis: DMatrix<Complex64>) -> Result<Self> {
        let s = Self {
            ambient_dim: basis.nrows(),
            basis,
        };
        let res = s.orthonormality_residual();
        if res > 1e-10 {
            return Err(Error::InvalidMatrix(format!(
                "frame is not orthonormal (residual {res:e})"
            )));
        }
        Ok(s)
    }

    pub(crate) fn from_frame_unchecked(basis: Mat) -> Self {
        Self {
            ambient_dim: basis.nrows(),
            basis,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &DMatrix<Complex64> {
        &self.basis
    }

    /// Orthogonal projector `B B*`.
    pub fn projector(&self) -> DMatrix<Complex64> {
        &self.basis * self.basis.adjoint()
    }

    /// `|| B*B - I ||_F`.
    pub fn orthonormality_residual(&self) -> f64 {
        let k = self.dim();
        (self.basis.adjoint() * &self.basis - Mat::identity(k, k)).norm()
    }

    /// `|| P_self - P_other ||_F`; zero iff the subspaces coincide.
    pub fn distance(&self, other: &Subspace) -> f64 {
        (self.projector() - other.projector()).norm()
    }

    /// `|| (I - P_other) B_self ||`: zero iff `self` is contained in `other`.
    pub fn containment_residual(&self, other: &Subspace) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let p = other.projector();
        spectral_norm(&(&self.basis - &p * &self.basis))
    }

    /// Largest `|| P_other P_self ||`: zero iff the subspaces are orthogonal.
    pub fn overlap(&self, other: &Subspace) -> f64 {
        if self.is_zero() || other.is_zero() {
            return 0.0;
        }
        spectral_norm(&(other.basis.adjoint() * &self.basis))
    }

    /// Image under a unitary `q`.
    pub fn image(&self, q: &ComplexMatrix) -> Subspace {
        Self {
            ambient_dim: self.ambient_dim,
            basis: q.as_matrix() * &self.basis,
        }
    }

    /// Lifts a subspace of the coordinates of `self` (a subspace of `C^k`,
    /// `k = self.dim()`) back into the ambient space.
    pub fn lift(&self, local: &Subspace) -> Result<Subspace> {
        check_dim(self.dim(), local.ambient_dim())?;
        Ok(Self {
            ambient_dim: self.ambient_dim,
            basis: &self.basis * &local.basis,
        })
    }

    /// Closed linear span of `self` and `other`.
    pub fn sum(&self, other: &Subspace, tol_rank: f64) -> Result<Subspace> {
        check_dim(self.ambient_dim, other.ambient_dim)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let mut cols = Mat::zeros(self.ambient_dim, self.dim() + other.dim());
        cols.columns_mut(0, self.dim()).copy_from(&self.basis);
        cols.columns_mut(self.dim(), other.dim()).copy_from(&other.basis);
        Subspace::span(&cols, tol_rank)
    }

    /// `|| P_perp T P ||` and `|| P_perp T* P ||`, the larger of the two; zero
    /// iff `self` reduces `t`.
    pub fn reduction_residual(&self, t: &ComplexMatrix) -> f64 {
        if self.is_zero() || self.dim() == self.ambient_dim {
            return 0.0;
        }
        let p = self.projector();
        let perp = Mat::identity(self.ambient_dim, self.ambient_dim) - &p;
        let m = t.as_matrix();
        let fwd = spectral_norm(&(&perp * m * &self.basis));
        let back = spectral_norm(&(&perp * m.adjoint() * &self.basis));
        fwd.max(back)
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn svd(m: &Mat, compute_u: bool, compute_v: bool) -> Result<SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>> {
    SVD::try_new(m.clone(), compute_u, compute_v, f64::EPSILON, SVD_MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))
}

pub(crate) fn singular_values(m: &Mat) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Ok(vec![0.0]);
    }
    Ok(svd(m, false, false)?.singular_values.iter().copied().collect())
}

pub(crate) fn spectral_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    match singular_values(m) {
        Ok(sv) => sv[0],
        // Frobenius bounds the spectral norm from above.
        Err(_) => m.norm(),
    }
}

/// Orthonormal basis of the numerical null space of an arbitrary `m x n`
/// matrix: right singular vectors with `sigma <= tol * max(sigma_max, scale)`.
pub(crate) fn null_space_scaled(m: &Mat, tol: f64, scale: f64) -> Result<Mat> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    if rows == 0 {
        return Ok(Mat::identity(cols, cols));
    }
    // SVD only yields a full V for tall or square inputs.
    let padded;
    let src = if rows < cols {
        let mut p = Mat::zeros(cols, cols);
        p.rows_mut(0, rows).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let d = svd(src, false, true)?;
    let v_t = d
        .v_t
        .as_ref()
        .ok_or_else(|| Error::NumericalFailure("SVD returned no right vectors".into()))?;
    let sigma = &d.singular_values;
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let cutoff = tol * smax.max(scale);
    let keep: Vec<usize> = (0..cols).filter(|&i| sigma[i] <= cutoff).collect();
    let mut out = Mat::zeros(cols, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        for j in 0..cols {
            out[(j, c)] = v_t[(i, j)].conj();
        }
    }
    Ok(out)
}

/// Re-orthonormalises a frame that is orthonormal up to rounding.
pub(crate) fn orthonormalize(b: &Mat) -> Mat {
    if b.ncols() == 0 {
        return b.clone();
    }
    QR::new(b.clone()).q()
}

pub(crate) fn compress(t: &Mat, b: &Mat) -> Mat {
    b.adjoint() * t * b
}

/// Numerical null space of `m`: right singular vectors with
/// `sigma <= tol_rank * sigma_max`; the zero matrix has the full space.
pub fn kernel(m: &ComplexMatrix, tol_rank: f64) -> Result<Subspace> {
    let basis = null_space_scaled(m.as_matrix(), tol_rank, 0.0)?;
    Ok(Subspace::from_frame_unchecked(basis))
}

/// `A ∩ B`, as the common null space of the stacked complementary projectors.
pub fn intersect(a: &Subspace, b: &Subspace, tol_rank: f64) -> Result<Subspace> {
    check_dim(a.ambient_dim, b.ambient_dim)?;
    let n = a.ambient_dim;
    if a.is_zero() || b.is_zero() {
        return Ok(Subspace::zero(n));
    }
    let id = Mat::identity(n, n);
    let mut stacked = Mat::zeros(2 * n, n);
    stacked.rows_mut(0, n).copy_from(&(&id - a.projector()));
    stacked.rows_mut(n, n).copy_from(&(&id - b.projector()));
    let basis = null_space_scaled(&stacked, tol_rank, 1.0)?;
    Ok(Subspace::from_frame_unchecked(basis))
}

/// Orthogonal complement; its dimension is exactly `ambient_dim - dim`.
pub fn complement(a: &Subspace) -> Subspace {
    let n = a.ambient_dim;
    let k = a.dim();
    if k == 0 {
        return Subspace::full(n);
    }
    if k >= n {
        return Subspace::zero(n);
    }
    // Singular values of the projector are k ones followed by n-k zeros.
    match svd(&a.projector(), false, true) {
        Ok(d) => {
            let v_t = d.v_t.expect("requested right vectors");
            let mut basis = Mat::zeros(n, n - k);
            for c in 0..(n - k) {
                for j in 0..n {
                    basis[(j, c)] = v_t[(k + c, j)].conj();
                }
            }
            Subspace::from_frame_unchecked(basis)
        }
        Err(_) => {
            // Householder completion of the frame as a fallback.
            let mut full = Mat::zeros(n, n);
            full.columns_mut(0, k).copy_from(&a.basis);
            for c in k..n {
                full[(c - k, c)] = Complex64::new(1.0, 0.0);
            }
            let q = QR::new(full).q();
            Subspace::from_frame_unchecked(q.columns(k, n - k).into_owned())
        }
    }
}

/// Triangular Schur factor. Exactly nilpotent or highly structured inputs can
/// stall the shifted QR iteration; those are retried after a unitary DFT
/// similarity and then after a unitary similarity plus an identity shift,
/// neither of which changes the eigenvalues beyond rounding.
fn schur_triangle(m: &Mat) -> Result<Mat> {
    let n = m.nrows();
    let attempt = |a: Mat| Schur::try_new(a, f64::EPSILON, 10_000 * n).map(|s| s.unpack().1);
    if let Some(t) = attempt(m.clone()) {
        return Ok(t);
    }
    let w = Complex64::from_polar(1.0, -std::f64::consts::TAU / n as f64);
    let f = Mat::from_fn(n, n, |i, j| w.powu((i * j) as u32) / (n as f64).sqrt());
    let rotated = &f * m * f.adjoint();
    if let Some(t) = attempt(rotated.clone()) {
        return Ok(t);
    }
    let shift = Complex64::new(spectral_norm(m).max(1.0), 0.0);
    let shifted = rotated + Mat::identity(n, n) * shift;
    if let Some(mut t) = attempt(shifted) {
        for i in 0..n {
            t[(i, i)] -= shift;
        }
        return Ok(t);
    }
    Err(Error::NumericalFailure("Schur iteration did not converge".into()))
}

/// All `dim` eigenvalues with multiplicity, from a complex Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = m.dim();
    if n == 1 {
        return Ok(vec![m.get(0, 0)]);
    }
    let t = schur_triangle(m.as_matrix())?;
    let scale = t.norm().max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].norm() > 1e-14 * scale {
            // Leftover 2x2 block.
            let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let half_tr = (a + d) * 0.5;
            let det = a * d - b * c;
            let disc = (half_tr * half_tr - det).sqrt();
            out.push(half_tr + disc);
            out.push(half_tr - disc);
            i += 2;
        } else {
            out.push(t[(i, i)]);
            i += 1;
        }
    }
    Ok(out)
}

/// Largest subspace `M ⊆ K` with `T M ⊆ M` and `T* M ⊆ M` for every `T` in
/// `ops`. Refines `K_{j+1} = K_j ∩ T^{-1}(K_j) ∩ (T*)^{-1}(K_j)` until the
/// dimension stops dropping; preimages are kernels of `P_{K_j⊥} T`
/// restricted to `K_j`, so `T` is never inverted.
pub fn largest_reducing_within(
    ops: &[ComplexMatrix],
    k: &Subspace,
    tol_rank: f64,
) -> Result<Subspace> {
    let n = k.ambient_dim();
    for t in ops {
        check_dim(n, t.dim())?;
    }
    let scale = ops.iter().map(|t| t.norm()).fold(0.0, f64::max);
    let id = Mat::identity(n, n);
    let mut basis = k.basis.clone();
    let cap = n + 2;
    for _ in 0..cap {
        let dim = basis.ncols();
        if dim == 0 || ops.is_empty() {
            return Ok(Subspace::from_frame_unchecked(basis));
        }
        let perp = &id - &basis * basis.adjoint();
        let mut stacked = Mat::zeros(2 * ops.len() * n, dim);
        for (i, t) in ops.iter().enumerate() {
            let m = t.as_matrix();
            stacked
                .rows_mut(2 * i * n, n)
                .copy_from(&(&perp * m * &basis));
            stacked
                .rows_mut((2 * i + 1) * n, n)
                .copy_from(&(&perp * m.adjoint() * &basis));
        }
        let coeffs = null_space_scaled(&stacked, tol_rank, scale)?;
        if coeffs.ncols() == dim {
            return Ok(Subspace::from_frame_unchecked(basis));
        }
        basis = orthonormalize(&(&basis * coeffs));
    }
    Err(Error::Stall(cap))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cyclic(n: usize) -> ComplexMatrix {
        let mut m = Mat::zeros(n, n);
        for j in 0..n {
            m[((j + 1) % n, j)] = c(1.0, 0.0);
        }
        ComplexMatrix::try_new(m).unwrap()
    }

    #[test]
    fn rejects_non_finite_and_non_square() {
        let mut m = Mat::identity(2, 2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert_eq!(ComplexMatrix::try_new(m).unwrap_err().kind(), "InvalidMatrix");
        assert!(ComplexMatrix::try_new(Mat::zeros(2, 3)).is_err());
    }

    #[test]
    fn kernel_of_zero_is_everything() {
        let k = kernel(&ComplexMatrix::zeros(3), 1e-9).unwrap();
        assert_eq!(k.dim(), 3);
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        assert_eq!(kernel(&ComplexMatrix::identity(3), 1e-9).unwrap().dim(), 0);
    }

    #[test]
    fn kernel_picks_tiny_singular_value() {
        let m = ComplexMatrix::diagonal_real(&[1.0, 1e-15, 2.0]);
        let k = kernel(&m, 1e-9).unwrap();
        assert_eq!(k.dim(), 1);
        assert!(k.distance(&Subspace::coordinate(3, &[1])) < 1e-12);
    }

    #[test]
    fn intersect_examples() {
        let a = Subspace::coordinate(3, &[0, 1]);
        let b = Subspace::coordinate(3, &[1, 2]);
        let ab = intersect(&a, &b, 1e-9).unwrap();
        assert_eq!(ab.dim(), 1);
        assert!(ab.distance(&Subspace::coordinate(3, &[1])) < 1e-12);
        let aa = intersect(&a, &a, 1e-9).unwrap();
        assert!(aa.distance(&a) < 1e-12);
        let e1 = Subspace::coordinate(3, &[0]);
        let e2 = Subspace::coordinate(3, &[1]);
        assert_eq!(intersect(&e1, &e2, 1e-9).unwrap().dim(), 0);
        assert_eq!(
            intersect(&e1, &Subspace::full(2), 1e-9).unwrap_err().kind(),
            "DimensionMismatch"
        );
    }

    #[test]
    fn complement_examples() {
        assert_eq!(complement(&Subspace::zero(3)).dim(), 3);
        assert_eq!(complement(&Subspace::full(3)).dim(), 0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = Mat::from_column_slice(2, 1, &[c(s, 0.0), c(s, 0.0)]);
        let a = Subspace::from_orthonormal(v).unwrap();
        let expected =
            Subspace::from_orthonormal(Mat::from_column_slice(2, 1, &[c(s, 0.0), c(-s, 0.0)]))
                .unwrap();
        assert!(complement(&a).distance(&expected) < 1e-12);
    }

    #[test]
    fn eigenvalue_examples() {
        let d = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 0.5)]);
        let mut ev = eigenvalues(&d).unwrap();
        ev.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
        assert!((ev[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((ev[1] - c(0.0, 0.5)).norm() < 1e-12);

        let j = ComplexMatrix::from_real_rows(&[&[0.7, 1.0], &[0.0, 0.7]]).unwrap();
        for z in eigenvalues(&j).unwrap() {
            assert!((z - c(0.7, 0.0)).norm() < 1e-12);
        }

        // Roots of z^4 - 1.
        let ev = eigenvalues(&cyclic(4)).unwrap();
        assert_eq!(ev.len(), 4);
        for root in [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)] {
            assert!(ev.iter().any(|z| (z - root).norm() < 1e-10), "{root} missing from {ev:?}");
        }
    }

    #[test]
    fn eigenvalues_of_nilpotent_square() {
        let n = 11;
        let mut data = vec![c(0.0, 0.0); n * n];
        for j in 0..n - 1 {
            data[(j + 1) * n + j] = c(1.0 + 0.3 * j as f64, 0.0);
        }
        let v = ComplexMatrix::from_row_major(n, &data).unwrap();
        let ev = eigenvalues(&(&v * &v)).unwrap();
        assert_eq!(ev.len(), n);
        assert!(ev.iter().all(|z| z.norm() < 0.1), "{ev:?}");
    }

    #[test]
    fn reducing_examples() {
        let d = ComplexMatrix::diagonal_real(&[1.0, 0.7]);
        let m = largest_reducing_within(&[d], &Subspace::full(2), 1e-9).unwrap();
        assert_eq!(m.dim(), 2);

        let j = ComplexMatrix::from_real_rows(&[&[0.5, 1.0], &[0.0, 0.5]]).unwrap();
        let m = largest_reducing_within(&[j], &Subspace::coordinate(2, &[0]), 1e-9).unwrap();
        assert_eq!(m.dim(), 0);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let k = Subspace::from_orthonormal(Mat::from_column_slice(2, 1, &[c(s, 0.0), c(s, 0.0)]))
            .unwrap();
        let m = largest_reducing_within(&[cyclic(2)], &k, 1e-9).unwrap();
        assert_eq!(m.dim(), 1);
        assert!(m.distance(&k) < 1e-12);
    }

    #[test]
    fn span_and_sum() {
        let mut cols = Mat::zeros(3, 3);
        cols[(0, 0)] = c(1.0, 0.0);
        cols[(0, 1)] = c(2.0, 0.0);
        cols[(1, 2)] = c(0.0, 1.0);
        let s = Subspace::span(&cols, 1e-9).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.distance(&Subspace::coordinate(3, &[0, 1])) < 1e-12);

        let a = Subspace::coordinate(3, &[0]);
        let b = Subspace::coordinate(3, &[0, 2]);
        let ab = a.sum(&b, 1e-9).unwrap();
        assert!(ab.distance(&b) < 1e-12);
    }
}
