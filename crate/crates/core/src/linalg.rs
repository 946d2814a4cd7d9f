//! Dense complex matrices and the handful of decompositions the rest of the
//! crate needs: Hermitian eigendecomposition (cyclic Jacobi) and SVD
//! (one-sided Jacobi). Everything here is sized for matrices of at most a
//! few dozen rows.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::{T_HERM, T_RANK};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

const MAX_SWEEPS: usize = 100;
const JACOBI_EPS: f64 = 1e-15;

/// Row-major dense complex matrix.
///
/// There is deliberately no `PartialEq`: compare with [`CMatrix::approx_eq`]
/// or [`CMatrix::max_abs_diff`] and an explicit tolerance.
#[derive(Clone, Debug)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Real-valued matrix from a row-major slice.
    ///
    /// # Panics
    /// If `values.len() != rows * cols`.
    pub fn real(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols, "wrong number of entries");
        Self {
            rows,
            cols,
            data: values.iter().map(|&v| C64::new(v, 0.0)).collect(),
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

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
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * x * self†`.
    pub fn sandwich(&self, x: &Self) -> Result<Self> {
        self.matmul(x)?.matmul(&self.adjoint())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Sum of the diagonal; panics on non-square input.
    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let (br, bc) = (rhs.rows, rhs.cols);
        Self::from_fn(self.rows * br, self.cols * bc, |i, j| {
            self[(i / br, j / bc)] * rhs[(i % br, j % bc)]
        })
    }

    /// Largest entrywise modulus of `self - other`; infinite when the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |h - h†|`, or infinity for non-square input.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(h + h†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && (&self.adjoint() * self).approx_eq(&Self::identity(self.rows), tol)
            && (self * &self.adjoint()).approx_eq(&Self::identity(self.rows), tol)
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, blk: &Self) {
        for i in 0..blk.rows {
            for j in 0..blk.cols {
                self[(r0 + i, c0 + j)] = blk[(i, j)];
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Panics on incompatible shapes; use [`CMatrix::matmul`] for a checked product.
impl Mul<&CMatrix> for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add<&CMatrix> for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub<&CMatrix> for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kron(b)
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    a.matmul(b)
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

pub fn trace(a: &CMatrix) -> Result<C64> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    Ok(a.trace())
}

pub fn scale(a: &CMatrix, s: C64) -> CMatrix {
    a.scale(s)
}

/// Eigenvalues in ascending order, eigenvectors as the matching columns.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEig {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Unitary `g` on the (p, q) plane such that `g† [[app, apq], [conj apq, aqq]] g`
/// is diagonal. Returns `(g_pp, g_pq, g_qp, g_qq)`.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> (C64, C64, C64, C64) {
    let mag = apq.norm();
    let phase = (apq / mag).conj();
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    (C64::new(c, 0.0), C64::new(s, 0.0), phase * (-s), phase * c)
}

fn rotate_cols(m: &mut CMatrix, p: usize, q: usize, g: (C64, C64, C64, C64)) {
    let (gpp, gpq, gqp, gqq) = g;
    for k in 0..m.rows {
        let a = m[(k, p)];
        let b = m[(k, q)];
        m[(k, p)] = a * gpp + b * gqp;
        m[(k, q)] = a * gpq + b * gqq;
    }
}

fn rotate_rows_adjoint(m: &mut CMatrix, p: usize, q: usize, g: (C64, C64, C64, C64)) {
    let (gpp, gpq, gqp, gqq) = g;
    for k in 0..m.cols {
        let a = m[(p, k)];
        let b = m[(q, k)];
        m[(p, k)] = gpp.conj() * a + gqp.conj() * b;
        m[(q, k)] = gpq.conj() * a + gqq.conj() * b;
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The input is symmetrized as `(h + h†)/2` after checking that its
/// Hermiticity defect is within [`T_HERM`].
pub fn hermitian_eig(h: &CMatrix) -> Result<HermitianEig> {
    if !h.is_square() {
        return Err(Error::NonSquare {
            rows: h.rows,
            cols: h.cols,
        });
    }
    let defect = h.hermitian_defect();
    if defect > T_HERM {
        return Err(Error::NotHermitian { defect });
    }
    let n = h.rows;
    let mut a = h.hermitian_part();
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_EPS * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let g = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                rotate_cols(&mut a, p, q, g);
                rotate_rows_adjoint(&mut a, p, q, g);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                rotate_cols(&mut v, p, q, g);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEig { values, vectors })
}

/// `a = u · diag(d) · v` with `u`, `v` unitary and `d` descending.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: CMatrix,
    pub d: Vec<f64>,
    pub v: CMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> CMatrix {
        &(&self.u * &CMatrix::diag(&self.d)) * &self.v
    }

    pub fn min_singular(&self) -> f64 {
        self.d.last().copied().unwrap_or(0.0)
    }

    pub fn max_singular(&self) -> f64 {
        self.d.first().copied().unwrap_or(0.0)
    }
}

/// Orthogonalizes the columns of `a` in place by right rotations; returns the
/// accumulated unitary `w` with `a_in · w = a_out`.
fn one_sided_jacobi(a: &mut CMatrix) -> CMatrix {
    let n = a.cols;
    let mut w = CMatrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for k in 0..a.rows {
                    let x = a[(k, p)];
                    let y = a[(k, q)];
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= JACOBI_EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let rot = jacobi_rotation(alpha, beta, gamma);
                rotate_cols(a, p, q, rot);
                rotate_cols(&mut w, p, q, rot);
            }
        }
        if !rotated {
            break;
        }
    }
    w
}

/// Modified Gram-Schmidt on the columns (two passes). A column that collapses
/// is replaced by the standard basis vector with the largest component
/// outside the span of the previous columns.
fn orthonormalize_columns(m: &mut CMatrix) {
    let rows = m.rows;
    let project_out = |m: &mut CMatrix, v: &mut Vec<C64>, upto: usize| {
        for _ in 0..2 {
            for k in 0..upto {
                let proj: C64 = (0..rows).map(|i| m[(i, k)].conj() * v[i]).sum();
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi -= proj * m[(i, k)];
                }
            }
        }
    };
    let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    for j in 0..m.cols {
        let mut v = m.column(j);
        project_out(m, &mut v, j);
        let mut nv = norm(&v);
        if nv <= 1e-8 {
            let mut best = (Vec::new(), -1.0);
            for e in 0..rows {
                let mut cand = vec![ZERO; rows];
                cand[e] = ONE;
                project_out(m, &mut cand, j);
                let nc = norm(&cand);
                if nc > best.1 {
                    best = (cand, nc);
                }
            }
            v = best.0;
            nv = best.1;
        }
        for (i, vi) in v.into_iter().enumerate() {
            m[(i, j)] = vi / nv;
        }
    }
}

/// Singular value decomposition of a square matrix by one-sided Jacobi.
///
/// Small singular values come out with relative (not just absolute)
/// accuracy, which keeps rank decisions at [`T_RANK`] meaningful.
pub fn svd(a: &CMatrix) -> Result<SvdResult> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    let mut work = a.clone();
    let mut w = one_sided_jacobi(&mut work);

    let mut norms: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| work[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    // selection sort keeps columns of `work` and `w` aligned with `norms`
    for j in 0..n {
        let best = (j..n)
            .max_by(|&x, &y| norms[x].total_cmp(&norms[y]))
            .unwrap_or(j);
        norms.swap(j, best);
        work.swap_cols(j, best);
        w.swap_cols(j, best);
    }

    let mut u = work;
    for (j, &s) in norms.iter().enumerate() {
        if s > 0.0 {
            for i in 0..n {
                u[(i, j)] /= s;
            }
        }
    }
    orthonormalize_columns(&mut u);

    Ok(SvdResult {
        u,
        d: norms,
        v: w.adjoint(),
    })
}

/// Singular values (descending) of a matrix of any shape.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let mut work = if a.rows >= a.cols {
        a.clone()
    } else {
        a.adjoint()
    };
    one_sided_jacobi(&mut work);
    let mut s: Vec<f64> = (0..work.cols)
        .map(|j| {
            (0..work.rows)
                .map(|i| work[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Number of singular values above [`T_RANK`].
pub fn rank(a: &CMatrix) -> usize {
    singular_values(a)
        .into_iter()
        .filter(|&s| s > T_RANK)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_matrix, random_unitary};
    use crate::tol::{T_RECON, T_RESID};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn residual(h: &CMatrix, eig: &HermitianEig) -> f64 {
        let hv = h * &eig.vectors;
        let mut worst = 0.0f64;
        for j in 0..h.rows() {
            for i in 0..h.rows() {
                worst = worst.max((hv[(i, j)] - eig.vectors[(i, j)] * eig.values[j]).norm());
            }
        }
        worst
    }

    #[test]
    fn kron_identity_and_diagonal_filter() {
        assert!(CMatrix::identity(2)
            .kron(&CMatrix::identity(2))
            .approx_eq(&CMatrix::identity(4), 0.0));

        let l = CMatrix::diag(&[1.0, 5.0 / 8.0, 5.0 / 8.0]);
        let k = l.kron(&CMatrix::identity(3));
        let mut expected = vec![1.0; 3];
        expected.extend([5.0 / 8.0; 6]);
        assert!(k.approx_eq(&CMatrix::diag(&expected), 0.0));
    }

    #[test]
    fn kron_entry_by_hand() {
        let x = CMatrix::real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let two = CMatrix::real(1, 1, &[2.0]);
        assert_eq!(x.kron(&two)[(0, 1)], c(2.0));
    }

    #[test]
    fn trace_and_adjoint() {
        assert_eq!(trace(&CMatrix::identity(9)).unwrap(), c(9.0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 3, 4);
        assert!(a.adjoint().adjoint().approx_eq(&a, 0.0));
        assert!(matches!(trace(&a), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn matmul_dimension_mismatch() {
        let a = CMatrix::zeros(2, 3);
        let b = CMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn eig_identity_and_pauli_x() {
        let e = hermitian_eig(&CMatrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);

        let x = CMatrix::real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = hermitian_eig(&x).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!(residual(&x, &e) < T_RESID);
    }

    #[test]
    fn eig_complex_2x2() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let h = CMatrix::from_vec(2, 2, vec![c(1.0), C64::i(), -C64::i(), c(1.0)]).unwrap();
        let e = hermitian_eig(&h).unwrap();
        assert!(e.values[0].abs() < 1e-14 && (e.values[1] - 2.0).abs() < 1e-14);
        assert!(residual(&h, &e) < T_RESID);
    }

    #[test]
    fn eig_rejects_bad_input() {
        assert!(matches!(
            hermitian_eig(&CMatrix::zeros(2, 3)),
            Err(Error::NonSquare { .. })
        ));
        let h = CMatrix::real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(hermitian_eig(&h), Err(Error::NotHermitian { .. })));
        // tiny asymmetry is tolerated
        let h = CMatrix::real(2, 2, &[0.0, 1.0, 1.0 + 1e-12, 0.0]);
        assert!(hermitian_eig(&h).is_ok());
    }

    #[test]
    fn eig_random_hermitian_matches_trace_and_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 4, 6, 9, 18] {
            let h = random_hermitian(&mut rng, n);
            let e = hermitian_eig(&h).unwrap();
            let sum: f64 = e.values.iter().sum();
            assert!((sum - h.trace().re).abs() < 1e-8);
            assert!(residual(&h, &e) < T_RESID, "n = {n}");
            assert!(e.vectors.is_unitary(1e-10));
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eig_agrees_with_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 5, 9] {
            let h = random_hermitian(&mut rng, n);
            let na = nalgebra::DMatrix::from_fn(n, n, |i, j| h[(i, j)]);
            let mut oracle: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
            oracle.sort_by(f64::total_cmp);
            let ours = hermitian_eig(&h).unwrap().values;
            for (a, b) in ours.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn eig_degenerate_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(&mut rng, 4);
        let h = u.sandwich(&CMatrix::diag(&[1.0, 1.0, -2.0, -2.0])).unwrap();
        let e = hermitian_eig(&h).unwrap();
        assert!(residual(&h, &e) < T_RESID);
        assert!((e.values[0] + 2.0).abs() < 1e-12 && (e.values[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn svd_identity_and_filter_diagonal() {
        let s = svd(&CMatrix::identity(3)).unwrap();
        assert_eq!(s.d, vec![1.0, 1.0, 1.0]);

        let l = CMatrix::diag(&[1.0, 5.0 / 8.0, 5.0 / 8.0]);
        let s = svd(&l).unwrap();
        for (a, b) in s.d.iter().zip([1.0, 0.625, 0.625]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(s.reconstruct().approx_eq(&l, T_RECON));
    }

    #[test]
    fn svd_of_rotation_is_all_ones() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = CMatrix::real(3, 3, &[h, 0.0, h, 0.0, 1.0, 0.0, -h, 0.0, h]);
        let s = svd(&m).unwrap();
        assert!(s.d.iter().all(|d| (d - 1.0).abs() < 1e-12));
        assert!(s.reconstruct().approx_eq(&m, T_RECON));
    }

    #[test]
    fn svd_random_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 3, 5, 9] {
            for _ in 0..10 {
                let a = random_matrix(&mut rng, n, n);
                let s = svd(&a).unwrap();
                assert!(s.reconstruct().approx_eq(&a, T_RECON));
                assert!(s.u.is_unitary(T_RECON));
                assert!(s.v.is_unitary(T_RECON));
                assert!(s.d.windows(2).all(|w| w[0] >= w[1]));
            }
            let u = random_unitary(&mut rng, n);
            assert!(svd(&u).unwrap().d.iter().all(|d| (d - 1.0).abs() < T_RECON));
        }
    }

    #[test]
    fn svd_rank_deficient_keeps_unitary_factors() {
        let m = CMatrix::diag(&[1.0, 0.0, 1.0]);
        let s = svd(&m).unwrap();
        assert_eq!(s.min_singular(), 0.0);
        assert!(s.u.is_unitary(T_RECON) && s.v.is_unitary(T_RECON));
        assert!(s.reconstruct().approx_eq(&m, T_RECON));

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<C64> = random_matrix(&mut rng, 4, 1).column(0);
        let y: Vec<C64> = random_matrix(&mut rng, 4, 1).column(0);
        let r1 = CMatrix::outer(&x, &y);
        let s = svd(&r1).unwrap();
        assert!(s.d[1] < 1e-14);
        assert!(s.u.is_unitary(T_RECON));
        assert!(s.reconstruct().approx_eq(&r1, T_RECON));
        assert_eq!(rank(&r1), 1);
    }

    #[test]
    fn svd_non_square_rejected() {
        assert!(matches!(
            svd(&CMatrix::zeros(2, 3)),
            Err(Error::NonSquare { .. })
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(rank(&random_matrix(&mut rng, 2, 3)), 2);
        assert_eq!(singular_values(&random_matrix(&mut rng, 3, 2)).len(), 2);
    }

    #[test]
    fn mixed_product_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_matrix(&mut rng, 2, 3);
        let b = random_matrix(&mut rng, 3, 2);
        let cm = random_matrix(&mut rng, 3, 2);
        let d = random_matrix(&mut rng, 2, 4);
        let lhs = &a.kron(&b) * &cm.kron(&d);
        let rhs = (&a * &cm).kron(&(&b * &d));
        assert!(lhs.approx_eq(&rhs, 1e-10));
    }
}
