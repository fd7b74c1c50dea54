//! JSON state files.
//!
//! ```json
//! {
//!   "dims": [2, 2],
//!   "matrix": [[0.25, 0.0], [0.0, 0.0], ...],
//!   "label": "maximally mixed",
//!   "seed": 7,
//!   "family": "bell-diagonal"
//! }
//! ```
//!
//! `matrix` holds the `(M N)^2` entries in row-major order as `[re, im]`
//! pairs. Floats are written in shortest round-trip form and parsed exactly,
//! so a write/read cycle is lossless.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sppt_core::{c64, BipartiteState, ComplexMatrix, Tolerance};

#[derive(Debug, thiserror::Error)]
pub enum StateFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse state file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("matrix has {found} entries, dims {dims:?} need {expected}")]
    Shape {
        dims: [usize; 2],
        expected: usize,
        found: usize,
    },
    #[error("invalid state: {0}")]
    Validation(#[from] sppt_core::Error),
}

/// Verdicts a fixture is expected to reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub ppt: bool,
    pub sppt: bool,
    pub cq: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: [usize; 2],
    pub matrix: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
}

impl StateFile {
    pub fn from_matrix(rho: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Self {
        Self {
            dims: [dim_a, dim_b],
            matrix: rho.as_slice().iter().map(|z| [z.re, z.im]).collect(),
            label: None,
            seed: None,
            family: None,
            expect: None,
        }
    }

    pub fn from_state(state: &BipartiteState) -> Self {
        Self::from_matrix(state.rho(), state.dim_a(), state.dim_b())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_family(mut self, family: impl Into<String>) -> Self {
        self.family = Some(family.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// The raw matrix, checked only for shape.
    pub fn matrix(&self) -> Result<ComplexMatrix, StateFileError> {
        let d = self.dims[0] * self.dims[1];
        if self.matrix.len() != d * d {
            return Err(StateFileError::Shape {
                dims: self.dims,
                expected: d * d,
                found: self.matrix.len(),
            });
        }
        let data = self.matrix.iter().map(|&[re, im]| c64(re, im)).collect();
        Ok(ComplexMatrix::from_row_major(d, d, data)?)
    }

    pub fn to_state(&self, tol: &Tolerance) -> Result<BipartiteState, StateFileError> {
        Ok(BipartiteState::validate(self.matrix()?, self.dims[0], self.dims[1], tol)?)
    }

    pub fn parse(text: &str) -> Result<Self, StateFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn read(path: &Path) -> Result<Self, StateFileError> {
        let text = fs::read_to_string(path).map_err(|source| StateFileError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), StateFileError> {
        fs::write(path, self.to_json() + "\n").map_err(|source| StateFileError::Io {
            path: path.to_owned(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sppt_core::random::random_ginibre_state;

    #[test]
    fn round_trip_is_bit_exact() {
        let tol = Tolerance::default();
        let s = random_ginibre_state(3, 2, 99, &tol).unwrap();
        let file = StateFile::from_state(&s).with_label("g").with_seed(99);
        let back = StateFile::parse(&file.to_json()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_state(&tol).unwrap(), s);
    }

    #[test]
    fn shape_and_validation_errors() {
        let tol = Tolerance::default();
        let bad = StateFile::parse(r#"{"dims": [2, 2], "matrix": [[1.0, 0.0]]}"#).unwrap();
        assert!(matches!(bad.to_state(&tol), Err(StateFileError::Shape { .. })));

        let mut m = vec![[0.0, 0.0]; 16];
        for i in 0..4 {
            m[i * 5] = [0.225, 0.0];
        }
        let short = StateFile { matrix: m, ..StateFile::from_matrix(&ComplexMatrix::zeros(4, 4), 2, 2) };
        assert!(matches!(
            short.to_state(&tol),
            Err(StateFileError::Validation(sppt_core::Error::TraceNotOne { .. }))
        ));
        assert!(matches!(StateFile::parse("{"), Err(StateFileError::Parse(_))));
    }
}
