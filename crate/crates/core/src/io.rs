//! JSON encoding of states and filters, and resolution of command-line
//! arguments that may name either a builtin or a file.
//!
//! State files look like
//! `{ "dimA": 2, "dimB": 2, "matrix": [[[re, im], ...], ...] }`;
//! filter files like `{ "L": [[...]], "M": [[...]] }`. A bare number is
//! accepted for a real entry.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog::{self, EntryKind};
use crate::error::{Error, Result};
use crate::filter::LocalFilter;
use crate::linalg::{CMatrix, C64};
use crate::qstate::DensityOperator;

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

type RawMatrix = Vec<Vec<Entry>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    matrix: RawMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FilterFile {
    #[serde(rename = "L")]
    l: RawMatrix,
    #[serde(rename = "M")]
    m: RawMatrix,
}

#[derive(Serialize)]
struct StateOut {
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn to_matrix(name: &str, raw: RawMatrix) -> Result<CMatrix> {
    let rows: Vec<Vec<C64>> = raw
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|e| match e {
                    Entry::Real(re) => C64::new(re, 0.0),
                    Entry::Complex([re, im]) => C64::new(re, im),
                })
                .collect()
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::InvariantViolation(format!("`{name}` is empty")));
    }
    CMatrix::from_rows(&rows)
        .map_err(|_| Error::InvariantViolation(format!("rows of `{name}` differ in length")))
}

pub fn matrix_to_json(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn state_from_json(text: &str) -> Result<DensityOperator> {
    let file: StateFile = serde_json::from_str(text).map_err(parse_error)?;
    let mat = to_matrix("matrix", file.matrix)?;
    if !mat.is_square() {
        return Err(Error::NonSquare {
            rows: mat.rows(),
            cols: mat.cols(),
        });
    }
    if file.dim_a * file.dim_b != mat.rows() {
        return Err(Error::DimensionMismatch(format!(
            "dimA * dimB = {} but the matrix is {}x{}",
            file.dim_a * file.dim_b,
            mat.rows(),
            mat.cols()
        )));
    }
    DensityOperator::new(file.dim_a, file.dim_b, mat)
}

pub fn state_to_json(rho: &DensityOperator) -> Value {
    serde_json::to_value(StateOut {
        dim_a: rho.dim_a(),
        dim_b: rho.dim_b(),
        matrix: matrix_to_json(rho.matrix()),
    })
    .expect("plain data serializes")
}

pub fn filter_from_json(text: &str) -> Result<LocalFilter> {
    let file: FilterFile = serde_json::from_str(text).map_err(parse_error)?;
    LocalFilter::new(to_matrix("L", file.l)?, to_matrix("M", file.m)?)
}

pub fn filter_to_json(f: &LocalFilter) -> Value {
    json!({ "L": matrix_to_json(f.l()), "M": matrix_to_json(f.m()) })
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_string()),
        _ => Error::Io {
            path: path.to_string(),
            message: e.to_string(),
        },
    })
}

pub fn read_state(path: impl AsRef<Path>) -> Result<DensityOperator> {
    state_from_json(&read(&path.as_ref().to_string_lossy())?)
}

pub fn read_filter(path: impl AsRef<Path>) -> Result<LocalFilter> {
    filter_from_json(&read(&path.as_ref().to_string_lossy())?)
}

/// True when `arg` names a file rather than a builtin label.
pub fn is_path_arg(arg: &str) -> bool {
    arg.contains('/') || arg.contains(std::path::MAIN_SEPARATOR) || arg.ends_with(".json")
}

pub fn resolve_state(arg: &str) -> Result<DensityOperator> {
    if is_path_arg(arg) {
        read_state(arg)
    } else {
        catalog::state_by_label(arg)
    }
}

pub fn resolve_filter(arg: &str, dims: (usize, usize)) -> Result<LocalFilter> {
    if is_path_arg(arg) {
        read_filter(arg)
    } else {
        catalog::filter_by_label(arg, dims)
    }
}

/// One builtin, resolved, in the file format it would be read back from.
pub fn export_label(label: &str) -> Result<Value> {
    match catalog::state_by_label(label) {
        Ok(rho) => Ok(state_to_json(&rho)),
        Err(Error::UnknownLabel(_)) => {
            // identity needs dimensions; default to 3 ⊗ 3
            Ok(filter_to_json(&catalog::filter_by_label(label, (3, 3))?))
        }
        Err(e) => Err(e),
    }
}

/// Every builtin with its default parameters and resolved matrices.
pub fn export_catalog() -> Value {
    let items: Vec<Value> = catalog::entries()
        .into_iter()
        .map(|e| {
            let data = export_label(&e.label).expect("builtins resolve");
            let key = match e.kind {
                EntryKind::State => "state",
                EntryKind::Filter => "filter",
            };
            let mut v = serde_json::to_value(&e).expect("plain data serializes");
            v[key] = data;
            v
        })
        .collect();
    Value::Array(items)
}
