//! Witness scans over the `x` parameter of the two-parameter 3⊗3 family.

use rayon::prelude::*;

use crate::catalog::rho_xt;
use crate::error::{Error, Result};
use crate::filter::LocalFilter;
use crate::format::fmt_sig;
use crate::qstate::is_ppt_with_threshold;
use crate::tol::T_NEG;
use crate::witness::{detect_with_threshold, PositiveMapWitness};

pub const CSV_HEADER: &str = "x,min_eig_unfiltered,min_eig_filtered,ppt";

#[derive(Clone, Debug)]
pub struct ScanSpec {
    pub t: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub steps: usize,
    pub witness: PositiveMapWitness,
    pub filter: Option<LocalFilter>,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::BadParam(format!(
                "t must be positive, got {}",
                self.t
            )));
        }
        if self.x_min.is_nan() || self.x_max.is_nan() || self.x_min >= self.x_max {
            return Err(Error::BadParam(format!(
                "x_min ({}) must be below x_max ({})",
                self.x_min, self.x_max
            )));
        }
        if self.x_min < 0.0 || self.x_max > 1.0 {
            return Err(Error::BadParam("x must lie in [0, 1]".into()));
        }
        if self.steps < 2 {
            return Err(Error::BadParam("steps must be at least 2".into()));
        }
        if let Some(f) = &self.filter {
            if f.dims() != (3, 3) {
                return Err(Error::DimensionMismatch(format!(
                    "scan filter must act on 3x3, got {:?}",
                    f.dims()
                )));
            }
        }
        Ok(())
    }

    /// Evenly spaced points including both ends.
    pub fn grid(&self) -> Vec<f64> {
        let h = (self.x_max - self.x_min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.x_max
                } else {
                    self.x_min + k as f64 * h
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub x: f64,
    pub min_eig_unfiltered: f64,
    pub min_eig_filtered: Option<f64>,
    pub ppt: bool,
}

impl ScanRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{}",
            fmt_sig(self.x),
            fmt_sig(self.min_eig_unfiltered),
            self.min_eig_filtered.map(fmt_sig).unwrap_or_default(),
            self.ppt
        )
    }
}

pub fn scan_point(
    x: f64,
    t: f64,
    w: &PositiveMapWitness,
    filter: Option<&LocalFilter>,
    t_neg: f64,
) -> Result<ScanRow> {
    let rho = rho_xt(x, t)?;
    let unfiltered = detect_with_threshold(w, &rho, "", t_neg)?.min_eigenvalue;
    let filtered = match filter {
        Some(f) => Some(detect_with_threshold(w, &f.apply(&rho)?.0, "", t_neg)?.min_eigenvalue),
        None => None,
    };
    Ok(ScanRow {
        x,
        min_eig_unfiltered: unfiltered,
        min_eig_filtered: filtered,
        ppt: is_ppt_with_threshold(&rho, t_neg).ppt,
    })
}

/// Rows in grid order; points are evaluated in parallel.
pub fn run_scan(spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    spec.validate()?;
    spec.grid()
        .par_iter()
        .map(|&x| scan_point(x, spec.t, &spec.witness, spec.filter.as_ref(), T_NEG))
        .collect()
}

/// Header plus one line per row, LF-terminated.
pub fn to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}

/// Midpoints of consecutive grid points where `value` crosses `-t_neg`.
pub fn sign_changes(xs: &[f64], values: &[f64], t_neg: f64) -> Vec<f64> {
    xs.windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| (v[0] < -t_neg) != (v[1] < -t_neg))
        .map(|(x, _)| 0.5 * (x[0] + x[1]))
        .collect()
}

/// `n` points strictly inside `(lo, hi)`, evenly spaced.
pub fn interior_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n + 1) as f64;
    (1..=n).map(|k| lo + k as f64 * h).collect()
}
