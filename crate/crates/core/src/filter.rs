//! Invertible local filters `ρ ↦ (L ⊗ M) ρ (L ⊗ M)† / tr(·)`.

use crate::error::{Error, Result};
use crate::linalg::{svd, CMatrix, SvdResult, C64};
use crate::qstate::{normalize, DensityOperator, PureState};
use crate::tol::T_RANK;

/// A pair of invertible local operators together with their SVDs.
///
/// Factors are stored exactly as given; no rescaling happens here.
#[derive(Clone, Debug)]
pub struct LocalFilter {
    l: CMatrix,
    m: CMatrix,
    svd_l: SvdResult,
    svd_m: SvdResult,
}

impl LocalFilter {
    pub fn new(l: CMatrix, m: CMatrix) -> Result<Self> {
        let svd_l = svd(&l)?;
        let svd_m = svd(&m)?;
        let min_singular = svd_l.min_singular().min(svd_m.min_singular());
        if min_singular <= T_RANK {
            return Err(Error::SingularFilter { min_singular });
        }
        Ok(Self { l, m, svd_l, svd_m })
    }

    pub fn identity(dim_a: usize, dim_b: usize) -> Self {
        Self::new(CMatrix::identity(dim_a), CMatrix::identity(dim_b))
            .expect("identity is invertible")
    }

    pub fn l(&self) -> &CMatrix {
        &self.l
    }

    pub fn m(&self) -> &CMatrix {
        &self.m
    }

    pub fn svd_l(&self) -> &SvdResult {
        &self.svd_l
    }

    pub fn svd_m(&self) -> &SvdResult {
        &self.svd_m
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.l.rows(), self.m.rows())
    }

    /// `L ⊗ M`.
    pub fn kron(&self) -> CMatrix {
        self.l.kron(&self.m)
    }

    /// Upper bound `(σ_max(L) σ_max(M))²` on the yield for unit-trace input.
    pub fn yield_bound(&self) -> f64 {
        (self.svd_l.max_singular() * self.svd_m.max_singular()).powi(2)
    }

    fn check_dims(&self, dim_a: usize, dim_b: usize) -> Result<()> {
        if self.dims() != (dim_a, dim_b) {
            return Err(Error::DimensionMismatch(format!(
                "filter acts on {}x{}, state is {dim_a}x{dim_b}",
                self.l.rows(),
                self.m.rows()
            )));
        }
        Ok(())
    }

    /// Unnormalized `(L ⊗ M) ρ (L ⊗ M)†`.
    pub fn apply_unnormalized(&self, rho: &DensityOperator) -> Result<CMatrix> {
        self.check_dims(rho.dim_a(), rho.dim_b())?;
        self.kron().sandwich(rho.matrix())
    }

    /// Filtered, renormalized state and the removed trace (the yield).
    pub fn apply(&self, rho: &DensityOperator) -> Result<(DensityOperator, f64)> {
        let raw = self.apply_unnormalized(rho)?;
        normalize(&raw, rho.dim_a(), rho.dim_b())
    }

    pub fn apply_pure(&self, psi: &PureState) -> Result<PureState> {
        self.check_dims(psi.dim_a(), psi.dim_b())?;
        let k = self.kron();
        let amps = psi.amplitudes();
        let out: Vec<C64> = (0..k.rows())
            .map(|r| k.row(r).iter().zip(amps).map(|(a, b)| a * b).sum())
            .collect();
        PureState::normalized(psi.dim_a(), psi.dim_b(), out)
    }

    /// The filter `next ∘ self`, i.e. `(L_next L_self, M_next M_self)`.
    pub fn then(&self, next: &LocalFilter) -> Result<LocalFilter> {
        if self.dims() != next.dims() {
            return Err(Error::DimensionMismatch(
                "composing filters of different dims".into(),
            ));
        }
        LocalFilter::new(next.l.matmul(&self.l)?, next.m.matmul(&self.m)?)
    }
}

pub fn make_filter(l: CMatrix, m: CMatrix) -> Result<LocalFilter> {
    LocalFilter::new(l, m)
}

pub fn apply_filter(f: &LocalFilter, rho: &DensityOperator) -> Result<(DensityOperator, f64)> {
    f.apply(rho)
}

pub fn filtered_pure(f: &LocalFilter, psi: &PureState) -> Result<PureState> {
    f.apply_pure(psi)
}
