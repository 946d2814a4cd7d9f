//! Named states and filters.
//!
//! Kets `|0⟩, |1⟩, |2⟩` map to indices 0, 1, 2.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filter::LocalFilter;
use crate::linalg::{CMatrix, C64};
use crate::qstate::{DensityOperator, PureState};

pub const DEFAULT_GISIN_KAPPA: f64 = 0.6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    State,
    Filter,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub label: String,
    pub kind: EntryKind,
    pub params: BTreeMap<String, f64>,
}

fn entry(label: &str, kind: EntryKind, params: &[(&str, f64)]) -> CatalogEntry {
    CatalogEntry {
        label: label.to_string(),
        kind,
        params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    }
}

/// Every builtin with its default parameters.
pub fn entries() -> Vec<CatalogEntry> {
    vec![
        entry("rho-xt", EntryKind::State, &[("x", 0.63), ("t", 0.05)]),
        entry("rho-upb", EntryKind::State, &[]),
        entry("bell", EntryKind::State, &[]),
        entry(
            "max-mixed",
            EntryKind::State,
            &[("dimA", 3.0), ("dimB", 3.0)],
        ),
        entry("identity", EntryKind::Filter, &[]),
        entry("choi-example", EntryKind::Filter, &[]),
        entry("upb-rotation", EntryKind::Filter, &[]),
        entry(
            "gisin",
            EntryKind::Filter,
            &[("kappa", DEFAULT_GISIN_KAPPA)],
        ),
    ]
}

/// The 9×9 matrix of the two-parameter family without the factor `K`.
pub fn rho_xt_unnormalized(x: f64, t: f64) -> CMatrix {
    let diag = [1.0 + t, t, 1.0 / t, 1.0 / t, 1.0 + t, t, 1.0, 1.0 / t, 1.0];
    let mut m = CMatrix::diag(&diag);
    for (i, j) in [(0, 4), (0, 8), (1, 3), (2, 6), (4, 8), (5, 7)] {
        m[(i, j)] = x.into();
        m[(j, i)] = x.into();
    }
    m
}

/// `K = 1 / (4 + 3/t + 4t)`.
pub fn rho_xt_norm(t: f64) -> f64 {
    1.0 / (4.0 + 3.0 / t + 4.0 * t)
}

pub fn rho_xt(x: f64, t: f64) -> Result<DensityOperator> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::BadParam(format!("rho-xt needs t > 0, got {t}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::BadParam(format!(
            "rho-xt needs 0 <= x <= 1, got {x}"
        )));
    }
    let m = rho_xt_unnormalized(x, t).scale_real(rho_xt_norm(t));
    DensityOperator::new(3, 3, m)
}

fn ket(i: usize) -> [C64; 3] {
    let mut v = [C64::new(0.0, 0.0); 3];
    v[i] = 1.0.into();
    v
}

fn combo(terms: &[(usize, f64)]) -> [C64; 3] {
    let mut v = [C64::new(0.0, 0.0); 3];
    for &(i, c) in terms {
        v[i] += c;
    }
    v
}

/// The five TILES product vectors `|ψ_0⟩ … |ψ_4⟩`.
pub fn tiles_vectors() -> [PureState; 5] {
    let h = FRAC_1_SQRT_2;
    let third = 1.0 / 3.0f64.sqrt();
    let zero_minus_one = combo(&[(0, h), (1, -h)]);
    let one_minus_two = combo(&[(1, h), (2, -h)]);
    let uniform = combo(&[(0, third), (1, third), (2, third)]);
    let p = |a: &[C64], b: &[C64]| PureState::product(a, b).expect("nonzero factors");
    [
        p(&ket(0), &zero_minus_one),
        p(&zero_minus_one, &ket(2)),
        p(&ket(2), &one_minus_two),
        p(&one_minus_two, &ket(0)),
        p(&uniform, &uniform),
    ]
}

/// `(I_9 - Σ |ψ_i⟩⟨ψ_i|) / 4` over the TILES vectors.
pub fn rho_upb() -> DensityOperator {
    let mut m = CMatrix::identity(9);
    for psi in tiles_vectors() {
        m = &m - &CMatrix::outer(psi.amplitudes(), psi.amplitudes());
    }
    DensityOperator::new(3, 3, m.scale_real(0.25).hermitian_part())
        .expect("TILES complement is a valid state")
}

/// `(|00⟩ + |11⟩) / √2`.
pub fn bell_vector() -> PureState {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    PureState::new(2, 2, vec![h, z, z, h]).expect("unit vector")
}

pub fn bell_state() -> DensityOperator {
    DensityOperator::from_pure(&bell_vector())
}

pub fn max_mixed(dim_a: usize, dim_b: usize) -> DensityOperator {
    DensityOperator::maximally_mixed(dim_a, dim_b)
}

/// `diag(1, 5/8, 5/8) ⊗ I_3`.
pub fn choi_example_filter() -> LocalFilter {
    LocalFilter::new(CMatrix::diag(&[1.0, 0.625, 0.625]), CMatrix::identity(3)).expect("invertible")
}

/// `I_3 ⊗ R` with `R` the 45° rotation in the (|0⟩, |2⟩) plane.
pub fn upb_rotation_filter() -> LocalFilter {
    LocalFilter::new(CMatrix::identity(3), upb_rotation_matrix()).expect("orthogonal")
}

pub fn upb_rotation_matrix() -> CMatrix {
    let h = FRAC_1_SQRT_2;
    CMatrix::real(3, 3, &[h, 0.0, h, 0.0, 1.0, 0.0, -h, 0.0, h])
}

/// `diag(κ, 1) ⊗ diag(1, κ)` for `0 < κ ≤ 1`. `κ = 1` is the identity and
/// only logs a warning.
pub fn gisin_filter(kappa: f64) -> Result<LocalFilter> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::BadParam(format!(
            "gisin needs 0 < kappa < 1, got {kappa}"
        )));
    }
    if kappa == 1.0 {
        log::warn!("gisin filter with kappa = 1 is the identity");
    }
    LocalFilter::new(CMatrix::diag(&[kappa, 1.0]), CMatrix::diag(&[1.0, kappa]))
}

/// Filters keyed by label; the Gisin entry uses [`DEFAULT_GISIN_KAPPA`].
pub fn builtin_filters() -> BTreeMap<String, LocalFilter> {
    let mut m = BTreeMap::new();
    m.insert("choi-example".to_string(), choi_example_filter());
    m.insert("upb-rotation".to_string(), upb_rotation_filter());
    m.insert(
        format!("gisin:{DEFAULT_GISIN_KAPPA}"),
        gisin_filter(DEFAULT_GISIN_KAPPA).expect("valid kappa"),
    );
    m
}

fn parse_param(label: &str, raw: &str) -> Result<f64> {
    raw.parse::<f64>()
        .map_err(|_| Error::BadParam(format!("`{raw}` is not a number in `{label}`")))
}

/// Resolves a builtin state label such as `rho-xt:0.63:0.05` or `bell`.
pub fn state_by_label(spec: &str) -> Result<DensityOperator> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default();
    let params: Vec<&str> = parts.collect();
    match (name, params.as_slice()) {
        ("rho-xt", []) => rho_xt(0.63, 0.05),
        ("rho-xt", [x, t]) => rho_xt(parse_param(spec, x)?, parse_param(spec, t)?),
        ("rho-upb", []) => Ok(rho_upb()),
        ("bell", []) => Ok(bell_state()),
        ("max-mixed", []) => Ok(max_mixed(3, 3)),
        ("max-mixed", [a, b]) => {
            let (a, b) = (
                parse_param(spec, a)? as usize,
                parse_param(spec, b)? as usize,
            );
            if a == 0 || b == 0 {
                return Err(Error::BadParam(
                    "max-mixed dimensions must be positive".into(),
                ));
            }
            Ok(max_mixed(a, b))
        }
        ("rho-xt" | "rho-upb" | "bell" | "max-mixed", _) => Err(Error::BadParam(format!(
            "wrong number of parameters in `{spec}`"
        ))),
        _ => Err(Error::UnknownLabel(spec.to_string())),
    }
}

/// Resolves a builtin filter label; `identity` takes the dimensions of the
/// state it will act on.
pub fn filter_by_label(spec: &str, dims: (usize, usize)) -> Result<LocalFilter> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default();
    let params: Vec<&str> = parts.collect();
    match (name, params.as_slice()) {
        ("identity", []) => Ok(LocalFilter::identity(dims.0, dims.1)),
        ("choi-example", []) => Ok(choi_example_filter()),
        ("upb-rotation", []) => Ok(upb_rotation_filter()),
        ("gisin", []) => gisin_filter(DEFAULT_GISIN_KAPPA),
        ("gisin", [k]) => gisin_filter(parse_param(spec, k)?),
        ("identity" | "choi-example" | "upb-rotation" | "gisin", _) => Err(Error::BadParam(
            format!("wrong number of parameters in `{spec}`"),
        )),
        _ => Err(Error::UnknownLabel(spec.to_string())),
    }
}
