//! JSON text formats for states and observable bases.
//!
//! A state file looks like
//!
//! ```text
//! {
//!   "dims": [2, 2],
//!   "matrix": [
//!     [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]],
//!     ...
//!   ]
//! }
//! ```
//!
//! with one `[re, im]` pair per entry, rows in product-basis order. Numbers
//! are written in shortest round-trip form, so write/read is bit exact.
//! Non-finite values are rejected.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::loo::LooBasis;
use crate::qstate::DensityMatrix;

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    dims: [usize; 2],
    matrix: RawMatrix,
}

#[derive(Debug, Serialize, Deserialize)]
struct BasisFile {
    dim: usize,
    observables: Vec<RawMatrix>,
}

fn to_raw(m: &CMatrix) -> RawMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn from_raw(raw: &RawMatrix, n: usize, what: &str) -> Result<CMatrix> {
    if raw.len() != n || raw.iter().any(|row| row.len() != n) {
        return Err(Error::Dimension(format!("{what}: expected a {n}x{n} matrix")));
    }
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in raw.iter().enumerate() {
        for (j, [re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Parse(format!("{what}: non-finite entry at ({i}, {j})")));
            }
            m[(i, j)] = Complex::new(*re, *im);
        }
    }
    Ok(m)
}

fn write_matrix_rows(out: &mut String, raw: &RawMatrix, indent: &str) {
    for (i, row) in raw.iter().enumerate() {
        let line = serde_json::to_string(row).expect("finite floats serialize");
        let sep = if i + 1 < raw.len() { "," } else { "" };
        let _ = writeln!(out, "{indent}{line}{sep}");
    }
}

/// Parses a state document. Only the shape is checked; call
/// [`DensityMatrix::validate`] for the physical invariants.
pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let [da, db] = file.dims;
    if da == 0 || db == 0 {
        return Err(Error::Dimension(format!("dims must be positive, got [{da}, {db}]")));
    }
    let m = from_raw(&file.matrix, da * db, "matrix")?;
    DensityMatrix::from_parts(da, db, m)
}

pub fn format_state(rho: &DensityMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"dims\": [{}, {}],", rho.dim_a(), rho.dim_b());
    let _ = writeln!(out, "  \"matrix\": [");
    write_matrix_rows(&mut out, &to_raw(rho.matrix()), "    ");
    let _ = writeln!(out, "  ]");
    let _ = writeln!(out, "}}");
    out
}

pub fn read_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    parse_state(&std::fs::read_to_string(path)?)
}

pub fn write_state(path: impl AsRef<Path>, rho: &DensityMatrix) -> Result<()> {
    std::fs::write(path, format_state(rho))?;
    Ok(())
}

/// Basis document: `{"dim": d, "observables": [matrix, ...]}`.
pub fn format_basis(basis: &LooBasis) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"dim\": {},", basis.dim());
    let _ = writeln!(out, "  \"observables\": [");
    for (k, g) in basis.observables().iter().enumerate() {
        let _ = writeln!(out, "    [");
        write_matrix_rows(&mut out, &to_raw(g), "      ");
        let sep = if k + 1 < basis.len() { "," } else { "" };
        let _ = writeln!(out, "    ]{sep}");
    }
    let _ = writeln!(out, "  ]");
    let _ = writeln!(out, "}}");
    out
}

/// Parses and validates a basis document.
pub fn parse_basis(text: &str) -> Result<LooBasis> {
    let file: BasisFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obs = file
        .observables
        .iter()
        .enumerate()
        .map(|(k, raw)| from_raw(raw, file.dim, &format!("observable {k}")))
        .collect::<Result<Vec<_>>>()?;
    LooBasis::new(file.dim, obs)
}

/// Basis serialized as a JSON value, for embedding in reports.
pub fn basis_to_json(basis: &LooBasis) -> serde_json::Value {
    let file = BasisFile { dim: basis.dim(), observables: basis.observables().iter().map(to_raw).collect() };
    serde_json::to_value(file).expect("finite floats serialize")
}
