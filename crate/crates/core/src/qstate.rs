//! Bipartite density operators and pure states.
//!
//! Composite index convention: `k = i * dim_b + j` for `|i⟩_A ⊗ |j⟩_B`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, CMatrix, C64};
use crate::tol::{T_HERM, T_NEG, T_RANK, T_TRACE};

/// Unit-trace positive semidefinite operator on `C^dim_a ⊗ C^dim_b`.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    dim_a: usize,
    dim_b: usize,
    mat: CMatrix,
}

impl DensityOperator {
    /// Validates shape, Hermiticity, unit trace and positivity.
    pub fn new(dim_a: usize, dim_b: usize, mat: CMatrix) -> Result<Self> {
        check_dims(dim_a, dim_b, &mat)?;
        let defect = mat.hermitian_defect();
        if defect > T_HERM {
            return Err(Error::NotHermitian { defect });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > T_TRACE || tr.im.abs() > T_TRACE {
            return Err(Error::InvariantViolation(format!(
                "trace must be 1, got {}{:+}i",
                tr.re, tr.im
            )));
        }
        let min_eigenvalue = hermitian_eig(&mat)?.min();
        if min_eigenvalue < -T_NEG {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        Ok(Self { dim_a, dim_b, mat })
    }

    #[cfg(test)]
    pub(crate) fn new_unchecked(dim_a: usize, dim_b: usize, mat: CMatrix) -> Self {
        Self { dim_a, dim_b, mat }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let mat = CMatrix::outer(psi.amplitudes(), psi.amplitudes());
        Self {
            dim_a: psi.dim_a,
            dim_b: psi.dim_b,
            mat,
        }
    }

    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Self {
        let n = dim_a * dim_b;
        Self {
            dim_a,
            dim_b,
            mat: CMatrix::identity(n).scale_real(1.0 / n as f64),
        }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Frobenius distance between two states' matrices.
    pub fn frobenius_distance(&self, other: &CMatrix) -> f64 {
        (&self.mat - other).frobenius_norm()
    }
}

fn check_dims(dim_a: usize, dim_b: usize, mat: &CMatrix) -> Result<()> {
    if dim_a == 0 || dim_b == 0 {
        return Err(Error::BadParam("local dimensions must be positive".into()));
    }
    if !mat.is_square() {
        return Err(Error::NonSquare {
            rows: mat.rows(),
            cols: mat.cols(),
        });
    }
    if mat.rows() != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for dims {dim_a}x{dim_b}",
            mat.rows(),
            mat.cols()
        )));
    }
    Ok(())
}

/// Normalized bipartite state vector.
#[derive(Clone, Debug)]
pub struct PureState {
    dim_a: usize,
    dim_b: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {dim_a}x{dim_b}",
                amplitudes.len()
            )));
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvariantViolation(format!(
                "state vector norm must be 1, got {norm}"
            )));
        }
        Ok(Self {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` first; fails on a (numerically) zero vector.
    pub fn normalized(dim_a: usize, dim_b: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n <= T_RANK {
            return Err(Error::ZeroTrace { trace: n * n });
        }
        Self::new(
            dim_a,
            dim_b,
            amplitudes.into_iter().map(|z| z / n).collect(),
        )
    }

    /// `|a⟩ ⊗ |b⟩`, both normalized here.
    pub fn product(a: &[C64], b: &[C64]) -> Result<Self> {
        let amps = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| x * y))
            .collect();
        Self::normalized(a.len(), b.len(), amps)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Coefficient matrix reshaped as `dim_b × dim_a` (`Σ λ |f⟩⟨e|`).
    pub fn coefficient_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim_b, self.dim_a, |j, i| {
            self.amplitudes[i * self.dim_b + j]
        })
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Transposes the B factor of an operator on `C^dim_a ⊗ C^dim_b`.
pub fn partial_transpose_b_matrix(m: &CMatrix, dim_a: usize, dim_b: usize) -> CMatrix {
    debug_assert_eq!(m.rows(), dim_a * dim_b);
    CMatrix::from_fn(m.rows(), m.cols(), |r, c| {
        let (i, j) = (r / dim_b, r % dim_b);
        let (k, l) = (c / dim_b, c % dim_b);
        m[(i * dim_b + l, k * dim_b + j)]
    })
}

pub fn partial_transpose_b(rho: &DensityOperator) -> CMatrix {
    partial_transpose_b_matrix(&rho.mat, rho.dim_a, rho.dim_b)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PptStatus {
    pub ppt: bool,
    pub min_eigenvalue: f64,
}

pub fn is_ppt(rho: &DensityOperator) -> PptStatus {
    is_ppt_with_threshold(rho, T_NEG)
}

pub fn is_ppt_with_threshold(rho: &DensityOperator, t_neg: f64) -> PptStatus {
    let min_eigenvalue = hermitian_eig(&partial_transpose_b(rho))
        .expect("partial transpose of a valid state is Hermitian")
        .min();
    PptStatus {
        ppt: min_eigenvalue >= -t_neg,
        min_eigenvalue,
    }
}

pub fn schmidt_rank(psi: &PureState) -> usize {
    crate::linalg::rank(&psi.coefficient_matrix())
}

/// Rescales a positive operator to unit trace, returning the removed trace.
pub fn normalize(m: &CMatrix, dim_a: usize, dim_b: usize) -> Result<(DensityOperator, f64)> {
    check_dims(dim_a, dim_b, m)?;
    let defect = m.hermitian_defect();
    if defect > T_HERM {
        return Err(Error::NotHermitian { defect });
    }
    let weight = m.trace().re;
    if weight <= T_RANK {
        return Err(Error::ZeroTrace { trace: weight });
    }
    let scaled = m.hermitian_part().scale_real(1.0 / weight);
    match DensityOperator::new(dim_a, dim_b, scaled) {
        Ok(rho) => Ok((rho, weight)),
        Err(Error::NotPsd { min_eigenvalue }) => Err(Error::NotPsd {
            min_eigenvalue: min_eigenvalue * weight,
        }),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::random::{
        random_density_matrix, random_product_state, random_pure_state, random_unitary,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell() -> DensityOperator {
        catalog::bell_state()
    }

    /// Transposes each `dim_b × dim_b` block through explicit block extraction.
    fn pt_by_blocks(m: &CMatrix, da: usize, db: usize) -> CMatrix {
        let mut out = CMatrix::zeros(m.rows(), m.cols());
        for i in 0..da {
            for j in 0..da {
                out.set_block(i * db, j * db, &m.block(i * db, j * db, db, db).transpose());
            }
        }
        out
    }

    #[test]
    fn partial_transpose_matches_block_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (da, db) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let m = random_density_matrix(&mut rng, da * db);
            let ours = partial_transpose_b_matrix(&m, da, db);
            assert!(ours.approx_eq(&pt_by_blocks(&m, da, db), 0.0));
            assert!(partial_transpose_b_matrix(&ours, da, db).approx_eq(&m, 1e-12));
            assert!((ours.trace() - m.trace()).norm() < 1e-12);
            assert!(ours.hermitian_defect() < 1e-12);
        }
    }

    #[test]
    fn bell_state_is_npt_with_minus_half() {
        let s = is_ppt(&bell());
        assert!(!s.ppt);
        assert!((s.min_eigenvalue + 0.5).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_and_products_are_ppt() {
        assert!(is_ppt(&DensityOperator::maximally_mixed(3, 3)).ppt);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let p = random_product_state(&mut rng, 3, 3);
            assert!(is_ppt(&p).ppt);
        }
    }

    #[test]
    fn tiles_state_is_ppt() {
        let s = is_ppt(&catalog::rho_upb());
        assert!(s.ppt, "min eigenvalue {}", s.min_eigenvalue);
    }

    #[test]
    fn rho_xt_in_window_is_ppt() {
        assert!(is_ppt(&catalog::rho_xt(0.63, 1.0 / 20.0).unwrap()).ppt);
    }

    #[test]
    fn schmidt_ranks() {
        let zero = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert_eq!(schmidt_rank(&PureState::product(&zero, &zero).unwrap()), 1);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = PureState::new(
            2,
            2,
            vec![C64::new(h, 0.0), 0.0.into(), 0.0.into(), C64::new(h, 0.0)],
        )
        .unwrap();
        assert_eq!(schmidt_rank(&phi), 2);

        let psi4 = &catalog::tiles_vectors()[4];
        assert_eq!(schmidt_rank(psi4), 1);
    }

    #[test]
    fn schmidt_rank_invariant_under_local_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let psi = random_pure_state(&mut rng, 3, 3);
            let u = random_unitary(&mut rng, 3).kron(&random_unitary(&mut rng, 3));
            let v: Vec<C64> = (0..9)
                .map(|r| (0..9).map(|c| u[(r, c)] * psi.amplitudes()[c]).sum())
                .collect();
            let moved = PureState::normalized(3, 3, v).unwrap();
            assert_eq!(schmidt_rank(&moved), schmidt_rank(&psi));
        }
        let prod = crate::random::random_pure_state_with_rank(&mut rng, 3, 3, 1);
        assert_eq!(schmidt_rank(&prod), 1);
    }

    #[test]
    fn normalize_returns_weight() {
        let m = CMatrix::identity(4).scale_real(2.0 / 4.0);
        let (rho, w) = normalize(&m, 2, 2).unwrap();
        assert!((w - 2.0).abs() < 1e-15);
        assert!(rho
            .matrix()
            .approx_eq(&CMatrix::identity(4).scale_real(0.25), 1e-15));
    }

    #[test]
    fn normalize_unnormalized_rho_xt() {
        let t = 1.0 / 20.0;
        let raw = catalog::rho_xt_unnormalized(0.63, t);
        let (_, w) = normalize(&raw, 3, 3).unwrap();
        assert!((w - 64.2).abs() < 1e-12, "{w}");
        assert!((w - (4.0 + 3.0 / t + 4.0 * t)).abs() < 1e-12);
    }

    #[test]
    fn normalize_filtered_tiles_weight_is_diagonal_sum() {
        let f = catalog::upb_rotation_filter();
        let raw = f.kron().sandwich(catalog::rho_upb().matrix()).unwrap();
        let diag_sum: f64 = (0..9).map(|i| raw[(i, i)].re).sum();
        let (_, w) = normalize(&raw, 3, 3).unwrap();
        assert!((w - diag_sum).abs() < 1e-14);
    }

    #[test]
    fn normalize_errors() {
        assert!(matches!(
            normalize(&CMatrix::zeros(4, 4), 2, 2),
            Err(Error::ZeroTrace { .. })
        ));
        let m = CMatrix::diag(&[1.0, -0.5, 0.25, 0.25]);
        assert!(matches!(normalize(&m, 2, 2), Err(Error::NotPsd { .. })));
        assert!(matches!(
            normalize(&CMatrix::identity(4), 3, 3),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn constructor_rejects_invalid() {
        assert!(DensityOperator::new(2, 2, CMatrix::identity(4)).is_err());
        assert!(DensityOperator::new(2, 2, CMatrix::diag(&[1.5, -0.5, 0.0, 0.0])).is_err());
        assert!(DensityOperator::new(2, 2, CMatrix::zeros(4, 3)).is_err());
        let unchecked = DensityOperator::new_unchecked(2, 2, CMatrix::identity(4));
        assert_eq!(unchecked.matrix().trace().re, 4.0);
        assert!(PureState::new(2, 2, vec![1.0.into(); 4]).is_err());
    }
}
