//! Positive, not completely positive maps used as entanglement witnesses.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::format::fmt_sig;
use crate::linalg::{hermitian_eig, CMatrix};
use crate::qstate::DensityOperator;
use crate::tol::T_NEG;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapKind {
    ChoiPhi,
    ChoiPsi,
    Transpose,
}

impl MapKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MapKind::ChoiPhi => "choi-phi",
            MapKind::ChoiPsi => "choi-psi",
            MapKind::Transpose => "transpose",
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "choi-phi" => Ok(MapKind::ChoiPhi),
            "choi-psi" => Ok(MapKind::ChoiPsi),
            "transpose" => Ok(MapKind::Transpose),
            other => Err(Error::BadParam(format!(
                "unknown map `{other}` (expected choi-phi, choi-psi or transpose)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Side::A),
            "B" | "b" => Ok(Side::B),
            other => Err(Error::BadParam(format!("unknown side `{other}`"))),
        }
    }
}

/// A local map applied to one tensor factor of a bipartite operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PositiveMapWitness {
    kind: MapKind,
    side: Side,
    local_dim: usize,
}

impl PositiveMapWitness {
    /// Choi maps only exist for `local_dim == 3`.
    pub fn new(kind: MapKind, side: Side, local_dim: usize) -> Result<Self> {
        if local_dim == 0 {
            return Err(Error::BadParam("local dimension must be positive".into()));
        }
        if kind != MapKind::Transpose && local_dim != 3 {
            return Err(Error::BadParam(format!(
                "{kind} acts on 3x3 matrices, not {local_dim}x{local_dim}"
            )));
        }
        Ok(Self {
            kind,
            side,
            local_dim,
        })
    }

    pub fn choi_phi(side: Side) -> Self {
        Self {
            kind: MapKind::ChoiPhi,
            side,
            local_dim: 3,
        }
    }

    pub fn choi_psi(side: Side) -> Self {
        Self {
            kind: MapKind::ChoiPsi,
            side,
            local_dim: 3,
        }
    }

    pub fn transpose(side: Side, local_dim: usize) -> Self {
        Self {
            kind: MapKind::Transpose,
            side,
            local_dim,
        }
    }

    /// Parses `<kind>:<side>`; transpose takes its dimension from `dims`.
    pub fn parse(spec: &str, dims: (usize, usize)) -> Result<Self> {
        let (kind, side) = spec
            .split_once(':')
            .ok_or_else(|| Error::BadParam(format!("witness `{spec}` is not <kind>:<side>")))?;
        let kind: MapKind = kind.parse()?;
        let side: Side = side.parse()?;
        let local = match side {
            Side::A => dims.0,
            Side::B => dims.1,
        };
        Self::new(
            kind,
            side,
            if kind == MapKind::Transpose { local } else { 3 },
        )
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// Action of the local map on a `local_dim × local_dim` matrix.
    pub fn map_local(&self, a: &CMatrix) -> Result<CMatrix> {
        match self.kind {
            MapKind::ChoiPhi => choi_phi(a),
            MapKind::ChoiPsi => choi_psi(a),
            MapKind::Transpose => {
                if a.rows() != self.local_dim || a.cols() != self.local_dim {
                    return Err(Error::WrongDim {
                        map: "transpose",
                        expected: self.local_dim,
                        rows: a.rows(),
                        cols: a.cols(),
                    });
                }
                Ok(a.transpose())
            }
        }
    }
}

impl fmt::Display for PositiveMapWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.side)
    }
}

impl Serialize for PositiveMapWitness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn check3(map: &'static str, a: &CMatrix) -> Result<()> {
    if a.rows() != 3 || a.cols() != 3 {
        return Err(Error::WrongDim {
            map,
            expected: 3,
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(())
}

/// Off-diagonals negated, diagonal `i` replaced by `a_ii + a_kk` with
/// `k = partner[i]`, everything halved.
fn choi_like(a: &CMatrix, partner: [usize; 3]) -> CMatrix {
    CMatrix::from_fn(3, 3, |i, j| {
        if i == j {
            (a[(i, i)] + a[(partner[i], partner[i])]) * 0.5
        } else {
            -a[(i, j)] * 0.5
        }
    })
}

/// Choi map φ: diagonal `(a11 + a33, a22 + a11, a33 + a22) / 2`.
pub fn choi_phi(a: &CMatrix) -> Result<CMatrix> {
    check3("choi-phi", a)?;
    Ok(choi_like(a, [2, 0, 1]))
}

/// Choi map ψ: diagonal `(a11 + a22, a22 + a33, a33 + a11) / 2`.
pub fn choi_psi(a: &CMatrix) -> Result<CMatrix> {
    check3("choi-psi", a)?;
    Ok(choi_like(a, [1, 2, 0]))
}

fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut e = CMatrix::zeros(n, n);
    e[(i, j)] = 1.0.into();
    e
}

/// `(map ⊗ id)` or `(id ⊗ map)` applied to a bipartite operator, assembled
/// from the images of the local matrix units.
pub fn apply_witness_matrix(
    w: &PositiveMapWitness,
    m: &CMatrix,
    dim_a: usize,
    dim_b: usize,
) -> Result<CMatrix> {
    let local = match w.side {
        Side::A => dim_a,
        Side::B => dim_b,
    };
    if local != w.local_dim {
        return Err(Error::DimensionMismatch(format!(
            "witness acts on dimension {} but side {} has dimension {local}",
            w.local_dim, w.side
        )));
    }
    if m.rows() != dim_a * dim_b || !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator for dims {dim_a}x{dim_b}",
            m.rows(),
            m.cols()
        )));
    }
    let n = dim_a * dim_b;
    let mut out = CMatrix::zeros(n, n);
    match w.side {
        Side::A => {
            // m = Σ E_ij ⊗ m_ij with m_ij the dim_b blocks
            for i in 0..dim_a {
                for j in 0..dim_a {
                    let image = w.map_local(&matrix_unit(dim_a, i, j))?;
                    let blk = m.block(i * dim_b, j * dim_b, dim_b, dim_b);
                    out = &out + &image.kron(&blk);
                }
            }
        }
        Side::B => {
            // m = Σ s_kl ⊗ E_kl with s_kl[i][j] = m[(i,k),(j,l)]
            for k in 0..dim_b {
                for l in 0..dim_b {
                    let image = w.map_local(&matrix_unit(dim_b, k, l))?;
                    let s =
                        CMatrix::from_fn(dim_a, dim_a, |i, j| m[(i * dim_b + k, j * dim_b + l)]);
                    out = &out + &s.kron(&image);
                }
            }
        }
    }
    Ok(out)
}

pub fn apply_witness(w: &PositiveMapWitness, rho: &DensityOperator) -> Result<CMatrix> {
    apply_witness_matrix(w, rho.matrix(), rho.dim_a(), rho.dim_b())
}

#[derive(Clone, Debug, Serialize)]
pub struct DetectionReport {
    pub state_label: String,
    pub witness: PositiveMapWitness,
    pub min_eigenvalue: f64,
    pub detected: bool,
}

impl DetectionReport {
    pub const CSV_HEADER: &'static str = "label,witness,side,min_eigenvalue,detected";

    /// `label,kind,side,min_eigenvalue,detected` with 15 significant digits.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.state_label,
            self.witness.kind,
            self.witness.side,
            fmt_sig(self.min_eigenvalue),
            self.detected
        )
    }
}

pub fn detect(
    w: &PositiveMapWitness,
    rho: &DensityOperator,
    label: &str,
) -> Result<DetectionReport> {
    detect_with_threshold(w, rho, label, T_NEG)
}

pub fn detect_with_threshold(
    w: &PositiveMapWitness,
    rho: &DensityOperator,
    label: &str,
    t_neg: f64,
) -> Result<DetectionReport> {
    let image = apply_witness(w, rho)?;
    let min_eigenvalue = hermitian_eig(&image)?.min();
    Ok(DetectionReport {
        state_label: label.to_string(),
        witness: *w,
        min_eigenvalue,
        detected: min_eigenvalue < -t_neg,
    })
}

/// `Σ_i |ii⟩ / √d`.
pub fn maximally_entangled(d: usize) -> DensityOperator {
    let amp = 1.0 / (d as f64).sqrt();
    let mut v = vec![0.0.into(); d * d];
    for i in 0..d {
        v[i * d + i] = amp.into();
    }
    let psi = crate::qstate::PureState::new(d, d, v).expect("unit vector");
    DensityOperator::from_pure(&psi)
}
