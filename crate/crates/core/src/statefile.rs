//! JSON state files.
//!
//! ```json
//! { "n_qubits": 1, "kind": "pure", "data": [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]] }
//! ```
//!
//! `kind` is `"pure"` (a list of `2^n` `[re, im]` pairs) or `"density"` (a
//! `2^n x 2^n` list of rows of `[re, im]` pairs). Numbers are written with 17
//! significant digits so values survive a round trip exactly.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Deserialize;

use crate::ensembles::MAX_QUBITS;
use crate::qmatrix::{pure_to_density, DenseMatrix, DensityMatrix, StateVector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Pure,
    Density,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStateFile {
    n_qubits: usize,
    kind: Kind,
    data: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState {
    Pure(StateVector),
    Density(DensityMatrix),
}

impl LoadedState {
    pub fn n_qubits(&self) -> usize {
        match self {
            LoadedState::Pure(psi) => psi.n_qubits(),
            LoadedState::Density(rho) => rho.n_qubits(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            LoadedState::Pure(psi) => pure_to_density(psi),
            LoadedState::Density(rho) => rho.clone(),
        }
    }
}

fn pair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Parses a state file, rejecting states with more than `max_qubits` qubits.
pub fn parse_state(text: &str, max_qubits: usize) -> Result<LoadedState> {
    let raw: RawStateFile = serde_json::from_str(text)
        .map_err(|e| Error::input(format!("malformed state file: {e}")))?;
    let n = raw.n_qubits;
    if n == 0 || n > max_qubits.min(MAX_QUBITS) {
        return Err(Error::input(format!(
            "n_qubits = {n} outside [1, {}]",
            max_qubits.min(MAX_QUBITS)
        )));
    }
    let dim = 1usize << n;
    let bad_shape = |e: serde_json::Error| Error::input(format!("malformed data: {e}"));
    match raw.kind {
        Kind::Pure => {
            let amps: Vec<[f64; 2]> = serde_json::from_value(raw.data).map_err(bad_shape)?;
            if amps.len() != dim {
                return Err(Error::input(format!(
                    "pure state on {n} qubits needs {dim} amplitudes, got {}",
                    amps.len()
                )));
            }
            Ok(LoadedState::Pure(StateVector::new(
                amps.into_iter().map(pair).collect(),
            )?))
        }
        Kind::Density => {
            let rows: Vec<Vec<[f64; 2]>> = serde_json::from_value(raw.data).map_err(bad_shape)?;
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(Error::input(format!(
                    "density matrix on {n} qubits must be {dim}x{dim}"
                )));
            }
            let entries = rows.into_iter().flatten().map(pair).collect();
            let m = DenseMatrix::from_row_major(dim, entries)?;
            Ok(LoadedState::Density(DensityMatrix::checked(m)?))
        }
    }
}

pub fn read_state_file(path: &std::path::Path, max_qubits: usize) -> Result<LoadedState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    parse_state(&text, max_qubits)
}

fn number(v: f64) -> String {
    format!("{v:.16e}")
}

fn complex(z: Complex64) -> String {
    format!("[{}, {}]", number(z.re), number(z.im))
}

pub fn write_pure(psi: &StateVector) -> String {
    let mut out = String::new();
    writeln!(out, "{{").unwrap();
    writeln!(out, "  \"n_qubits\": {},", psi.n_qubits()).unwrap();
    writeln!(out, "  \"kind\": \"pure\",").unwrap();
    writeln!(out, "  \"data\": [").unwrap();
    let amps = psi.amplitudes();
    for (i, z) in amps.iter().enumerate() {
        let sep = if i + 1 < amps.len() { "," } else { "" };
        writeln!(out, "    {}{sep}", complex(*z)).unwrap();
    }
    writeln!(out, "  ]").unwrap();
    writeln!(out, "}}").unwrap();
    out
}

pub fn write_density(rho: &DensityMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "{{").unwrap();
    writeln!(out, "  \"n_qubits\": {},", rho.n_qubits()).unwrap();
    writeln!(out, "  \"kind\": \"density\",").unwrap();
    writeln!(out, "  \"data\": [").unwrap();
    let d = rho.dim();
    let m = rho.matrix();
    for i in 0..d {
        let row: Vec<String> = (0..d).map(|j| complex(m.get(i, j))).collect();
        let sep = if i + 1 < d { "," } else { "" };
        writeln!(out, "    [{}]{sep}", row.join(", ")).unwrap();
    }
    writeln!(out, "  ]").unwrap();
    writeln!(out, "}}").unwrap();
    out
}
