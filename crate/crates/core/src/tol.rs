//! Numeric thresholds shared by every module.
//!
//! Tests and checks cite these names rather than repeating literals.

/// Largest accepted `max |h - h†|` for an input declared Hermitian.
pub const T_HERM: f64 = 1e-9;
/// Eigenvector residual bound `‖h v - λ v‖∞` per column.
pub const T_RESID: f64 = 1e-8;
/// Reconstruction bound for decompositions.
pub const T_RECON: f64 = 1e-10;
/// An eigenvalue counts as negative only below `-T_NEG`.
pub const T_NEG: f64 = 1e-10;
/// Singular values (and traces) at or below this are treated as zero.
pub const T_RANK: f64 = 1e-12;
/// Allowed deviation of a density operator's trace from one.
pub const T_TRACE: f64 = 1e-9;
