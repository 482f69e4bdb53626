//! JSON input and output formats.

use std::fs;
use std::path::Path;

use embedlab_core::lindblad::Lindbladian;
use embedlab_core::matcore::{ComplexMatrix, C64};
use embedlab_core::stochastic::{validate, RateMatrix, StochasticMatrix, DEFAULT_TOLERANCE};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const STOCHASTIC_CONVENTION: &str = "column-stochastic";
pub const RATE_CONVENTION: &str = "rate-matrix";

/// Column-stochastic matrix file; `entries_row_major[i*d + j]` is the
/// probability of `j → i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub d: usize,
    pub entries_row_major: Vec<f64>,
    pub convention: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl MatrixFile {
    pub fn from_matrix(t: &StochasticMatrix) -> Self {
        Self {
            d: t.dim(),
            entries_row_major: t.entries().to_vec(),
            convention: STOCHASTIC_CONVENTION.into(),
            tolerance: None,
        }
    }

    pub fn to_matrix(&self) -> Result<StochasticMatrix, CliError> {
        if self.convention != STOCHASTIC_CONVENTION {
            return Err(CliError::Parse(format!(
                "convention must be \"{STOCHASTIC_CONVENTION}\", got \"{}\"",
                self.convention
            )));
        }
        let tol = self.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(CliError::Parse(format!("tolerance must be ≥ 0, got {tol}")));
        }
        Ok(validate(self.entries_row_major.clone(), self.d, tol)?)
    }
}

/// Rate matrix with zero column sums, optionally with an evolution time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateMatrixFile {
    pub d: usize,
    pub entries_row_major: Vec<f64>,
    pub convention: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
}

/// A parsed target file.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Stochastic(StochasticMatrix),
    Rates { rates: RateMatrix, time: f64 },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn convention_of(text: &str) -> Result<String, CliError> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CliError::Parse(format!("invalid JSON: {e}")))?;
    value
        .get("convention")
        .and_then(|c| c.as_str())
        .map(str::to_owned)
        .ok_or_else(|| CliError::Parse("missing string field \"convention\"".into()))
}

pub fn parse_matrix(text: &str) -> Result<StochasticMatrix, CliError> {
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("matrix file: {e}")))?;
    file.to_matrix()
}

pub fn load_matrix(path: &Path) -> Result<StochasticMatrix, CliError> {
    parse_matrix(&read(path)?).map_err(|e| e.in_file(path))
}

pub fn parse_target(text: &str) -> Result<Target, CliError> {
    match convention_of(text)?.as_str() {
        STOCHASTIC_CONVENTION => Ok(Target::Stochastic(parse_matrix(text)?)),
        RATE_CONVENTION => {
            let file: RateMatrixFile = serde_json::from_str(text)
                .map_err(|e| CliError::Parse(format!("rate matrix file: {e}")))?;
            let time = file.time.unwrap_or(1.0);
            if !(time.is_finite() && time >= 0.0) {
                return Err(CliError::Parse(format!("time must be ≥ 0, got {time}")));
            }
            Ok(Target::Rates {
                rates: RateMatrix::new(file.entries_row_major, file.d)?,
                time,
            })
        }
        other => Err(CliError::Parse(format!(
            "unknown convention \"{other}\"; expected \"{STOCHASTIC_CONVENTION}\" or \"{RATE_CONVENTION}\""
        ))),
    }
}

pub fn load_target(path: &Path) -> Result<Target, CliError> {
    parse_target(&read(path)?).map_err(|e| e.in_file(path))
}

/// `{dim, H: [[re, im], …], kraus: [[[re, im], …], …]}` with row-major entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LindbladianJson {
    pub dim: usize,
    #[serde(rename = "H")]
    pub hamiltonian: Vec<[f64; 2]>,
    pub kraus: Vec<Vec<[f64; 2]>>,
}

fn pairs(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    m.data().iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(d: usize, p: &[[f64; 2]]) -> Result<ComplexMatrix, CliError> {
    let data = p.iter().map(|[re, im]| C64::new(*re, *im)).collect();
    Ok(ComplexMatrix::new(d, d, data)?)
}

impl LindbladianJson {
    pub fn from_lindbladian(l: &Lindbladian) -> Self {
        Self {
            dim: l.dim(),
            hamiltonian: pairs(l.hamiltonian()),
            kraus: l.kraus_ops().iter().map(pairs).collect(),
        }
    }

    pub fn to_lindbladian(&self) -> Result<Lindbladian, CliError> {
        let h = from_pairs(self.dim, &self.hamiltonian)?;
        let kraus = self
            .kraus
            .iter()
            .map(|k| from_pairs(self.dim, k))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Lindbladian::new(h, kraus)?)
    }
}
