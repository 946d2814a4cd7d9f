//! Measurement-based realization of local filters.
//!
//! A diagonal contraction `D = diag(d_1..d_n)` with `0 < d_j ≤ 1` is the
//! top-left block of the rank-`n` projector `P = Σ_j |ξ_j⟩⟨ξ_j|` on
//! `C^2 ⊗ C^n`, `|ξ_j⟩ = √d_j |j⟩ + √(1-d_j) |j+n⟩`. Measuring `P` on
//! `|0⟩⟨0| ⊗ ρ` and then `|0⟩⟨0|` on the ancilla leaves `D ρ D`.
//!
//! Ancilla ordering: ancilla ⊗ system, so ancilla `|0⟩` occupies the first
//! `n` coordinates.

use crate::error::{Error, Result};
use crate::filter::LocalFilter;
use crate::linalg::{hermitian_eig, CMatrix, C64};
use crate::qstate::{normalize, DensityOperator};
use crate::tol::{T_HERM, T_NEG};

#[derive(Clone, Debug)]
pub struct FilterProjector {
    d: Vec<f64>,
    p: CMatrix,
}

fn validate_diagonal(d: &[f64]) -> Result<()> {
    if d.is_empty() {
        return Err(Error::BadParam("empty diagonal".into()));
    }
    for (index, &value) in d.iter().enumerate() {
        if !(value > 0.0 && value <= 1.0) {
            return Err(Error::BadDiagonal { index, value });
        }
    }
    Ok(())
}

impl FilterProjector {
    pub fn new(d: &[f64]) -> Result<Self> {
        validate_diagonal(d)?;
        let n = d.len();
        let mut p = CMatrix::zeros(2 * n, 2 * n);
        for (j, &dj) in d.iter().enumerate() {
            let cross = (dj * (1.0 - dj)).sqrt();
            p[(j, j)] = dj.into();
            p[(j, j + n)] = cross.into();
            p[(j + n, j)] = cross.into();
            p[(j + n, j + n)] = (1.0 - dj).into();
        }
        Ok(Self { d: d.to_vec(), p })
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.d
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.p
    }

    /// `|ξ_j⟩` as a vector on the `2n`-dimensional space.
    pub fn xi(&self, j: usize) -> Vec<C64> {
        let n = self.n();
        let mut v = vec![C64::new(0.0, 0.0); 2 * n];
        v[j] = self.d[j].sqrt().into();
        v[j + n] = (1.0 - self.d[j]).sqrt().into();
        v
    }

    /// The rank-one pieces `P_j = |ξ_j⟩⟨ξ_j|`.
    pub fn components(&self) -> Vec<CMatrix> {
        (0..self.n())
            .map(|j| {
                let v = self.xi(j);
                CMatrix::outer(&v, &v)
            })
            .collect()
    }

    /// Top-left block; equals `D`.
    pub fn system_block(&self) -> CMatrix {
        self.p.block(0, 0, self.n(), self.n())
    }

    /// Off-diagonal block `Δ = diag(√(d_j (1 - d_j)))`.
    pub fn cross_block(&self) -> CMatrix {
        self.p.block(0, self.n(), self.n(), self.n())
    }

    /// Bottom-right block `diag(1 - d_j)`.
    pub fn complement_block(&self) -> CMatrix {
        let n = self.n();
        self.p.block(n, n, n, n)
    }
}

pub fn build_projector(d: &[f64]) -> Result<FilterProjector> {
    FilterProjector::new(d)
}

/// `|0⟩⟨0| ⊗ I_n` on the extended space.
pub fn ancilla_zero_projector(n: usize) -> CMatrix {
    CMatrix::diag(&[1.0, 0.0]).kron(&CMatrix::identity(n))
}

/// Isometry `C^n → C^2 ⊗ C^n`, `|j⟩ ↦ |0⟩|j⟩`.
pub fn ancilla_embedding(n: usize) -> CMatrix {
    CMatrix::from_fn(
        2 * n,
        n,
        |r, c| if r == c { 1.0.into() } else { 0.0.into() },
    )
}

fn check_psd(rho_a: &CMatrix) -> Result<()> {
    if !rho_a.is_square() {
        return Err(Error::NonSquare {
            rows: rho_a.rows(),
            cols: rho_a.cols(),
        });
    }
    let defect = rho_a.hermitian_defect();
    if defect > T_HERM {
        return Err(Error::NotHermitian { defect });
    }
    let min_eigenvalue = hermitian_eig(rho_a)?.min();
    if min_eigenvalue < -T_NEG {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    Ok(())
}

/// `P (|0⟩⟨0| ⊗ ρ_A) P`: the state right after a positive `P` outcome,
/// before the ancilla measurement.
pub fn after_projector(d: &[f64], rho_a: &CMatrix) -> Result<CMatrix> {
    let proj = FilterProjector::new(d)?;
    if rho_a.rows() != proj.n() || rho_a.cols() != proj.n() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} state for a diagonal of length {}",
            rho_a.rows(),
            rho_a.cols(),
            proj.n()
        )));
    }
    check_psd(rho_a)?;
    let embed = ancilla_embedding(proj.n());
    let extended = embed.sandwich(rho_a)?;
    proj.p.sandwich(&extended)
}

/// Measures `P`, then `|0⟩⟨0|` on the ancilla, and discards the ancilla.
/// Returns the unnormalized `D ρ_A D` and its trace (the success probability
/// for unit-trace input).
pub fn postselect_diag(d: &[f64], rho_a: &CMatrix) -> Result<(CMatrix, f64)> {
    let after_p = after_projector(d, rho_a)?;
    let n = d.len();
    let after_anc = ancilla_zero_projector(n).sandwich(&after_p)?;
    let result = ancilla_embedding(n).adjoint().sandwich(&after_anc)?;
    let prob = result.trace().re;
    Ok((result, prob))
}

/// Which party post-selects first; the two commute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasurementOrder {
    AliceFirst,
    BobFirst,
}

/// Everything needed to run the protocol for one filter:
/// SVD factors, rescaled diagonals and the ancilla projectors.
///
/// Each diagonal is divided by its largest singular value so that it fits in
/// `(0, 1]`; the removed scales are kept for bookkeeping.
#[derive(Clone, Debug)]
pub struct ProtocolPlan {
    dim_a: usize,
    dim_b: usize,
    v: CMatrix,
    u: CMatrix,
    scale_a: f64,
    scale_b: f64,
    proj_a: FilterProjector,
    proj_b: FilterProjector,
}

impl ProtocolPlan {
    pub fn new(f: &LocalFilter) -> Result<Self> {
        let (sl, sm) = (f.svd_l(), f.svd_m());
        let scale_a = sl.max_singular();
        let scale_b = sm.max_singular();
        let da: Vec<f64> = sl.d.iter().map(|x| (x / scale_a).min(1.0)).collect();
        let db: Vec<f64> = sm.d.iter().map(|x| (x / scale_b).min(1.0)).collect();
        Ok(Self {
            dim_a: f.dims().0,
            dim_b: f.dims().1,
            v: sl.v.kron(&sm.v),
            u: sl.u.kron(&sm.u),
            scale_a,
            scale_b,
            proj_a: FilterProjector::new(&da)?,
            proj_b: FilterProjector::new(&db)?,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn scales(&self) -> (f64, f64) {
        (self.scale_a, self.scale_b)
    }

    pub fn projector_a(&self) -> &FilterProjector {
        &self.proj_a
    }

    pub fn projector_b(&self) -> &FilterProjector {
        &self.proj_b
    }

    fn embedding(&self) -> CMatrix {
        ancilla_embedding(self.dim_a).kron(&ancilla_embedding(self.dim_b))
    }

    /// Step 1 plus ancilla attachment: `E (V ρ V†) E†` on
    /// `(C^2 ⊗ C^dA) ⊗ (C^2 ⊗ C^dB)`.
    pub fn prepare(&self, rho: &CMatrix) -> Result<CMatrix> {
        self.embedding().sandwich(&self.v.sandwich(rho)?)
    }

    /// The four projectors of step 2 on the joint extended space, in the
    /// order they are measured.
    pub fn measurements(&self, order: MeasurementOrder) -> [CMatrix; 4] {
        let ext_a = 2 * self.dim_a;
        let ext_b = 2 * self.dim_b;
        let id_a = CMatrix::identity(ext_a);
        let id_b = CMatrix::identity(ext_b);
        let alice = [
            self.proj_a.matrix().kron(&id_b),
            ancilla_zero_projector(self.dim_a).kron(&id_b),
        ];
        let bob = [
            id_a.kron(self.proj_b.matrix()),
            id_a.kron(&ancilla_zero_projector(self.dim_b)),
        ];
        let [a0, a1] = alice;
        let [b0, b1] = bob;
        match order {
            MeasurementOrder::AliceFirst => [a0, a1, b0, b1],
            MeasurementOrder::BobFirst => [b0, b1, a0, a1],
        }
    }

    /// Step 3: drop both ancillas and apply `U_1 ⊗ U_2`.
    pub fn finish(&self, extended: &CMatrix) -> Result<CMatrix> {
        let reduced = self.embedding().adjoint().sandwich(extended)?;
        self.u.sandwich(&reduced)
    }

    /// The filter actually realized: `(L / s_A, M / s_B)`.
    pub fn rescaled_filter(&self, f: &LocalFilter) -> Result<LocalFilter> {
        LocalFilter::new(
            f.l().scale_real(1.0 / self.scale_a),
            f.m().scale_real(1.0 / self.scale_b),
        )
    }
}

#[derive(Clone, Debug)]
pub struct ProtocolOutcome {
    pub state: DensityOperator,
    /// Probability that all four outcomes are positive.
    pub total_prob: f64,
    /// `(σ_max(L), σ_max(M))` removed before building the projectors.
    pub scales: (f64, f64),
}

pub fn protocol_analytic(f: &LocalFilter, rho: &DensityOperator) -> Result<ProtocolOutcome> {
    protocol_analytic_ordered(f, rho, MeasurementOrder::AliceFirst)
}

pub fn protocol_analytic_ordered(
    f: &LocalFilter,
    rho: &DensityOperator,
    order: MeasurementOrder,
) -> Result<ProtocolOutcome> {
    if f.dims() != rho.dims() {
        return Err(Error::DimensionMismatch(format!(
            "filter acts on {:?}, state is {:?}",
            f.dims(),
            rho.dims()
        )));
    }
    let plan = ProtocolPlan::new(f)?;
    let mut x = plan.prepare(rho.matrix())?;
    for proj in plan.measurements(order) {
        x = proj.sandwich(&x)?;
    }
    let out = plan.finish(&x)?;
    let (state, total_prob) = normalize(&out, rho.dim_a(), rho.dim_b())?;
    Ok(ProtocolOutcome {
        state,
        total_prob,
        scales: plan.scales(),
    })
}
