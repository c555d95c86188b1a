//! JSON serialization of quantum states.

use std::path::Path;

use qmetro::states::Payload;
use qmetro::{CMatrix, CVector, QuantumState, Representation, C64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output;

pub const FORMAT: &str = "qmetro-state/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepName {
    Full,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Pure,
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Data {
    Vector(Vec<[f64; 2]>),
    Matrix(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub format: String,
    pub representation: RepName,
    pub n_qubits: usize,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
    pub data: Data,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

impl StateFile {
    pub fn from_state(state: &QuantumState) -> Self {
        let (representation, n_qubits) = match state.rep() {
            Representation::Full(n) => (RepName::Full, n),
            Representation::Symmetric(n) => (RepName::Symmetric, n),
        };
        let (kind, data) = match state.payload() {
            Payload::Pure(v) => (Kind::Pure, Data::Vector(v.iter().copied().map(pair).collect())),
            Payload::Density(m) => (
                Kind::Density,
                Data::Matrix((0..m.nrows()).map(|r| (0..m.ncols()).map(|c| pair(m[(r, c)])).collect()).collect()),
            ),
        };
        StateFile { format: FORMAT.into(), representation, n_qubits, kind, label: state.label().into(), data }
    }

    pub fn rep(&self) -> Representation {
        match self.representation {
            RepName::Full => Representation::Full(self.n_qubits),
            RepName::Symmetric => Representation::Symmetric(self.n_qubits),
        }
    }

    /// Validates the layout and rebuilds the state; no renormalization is applied.
    pub fn to_state(&self) -> CliResult<QuantumState> {
        if self.format != FORMAT {
            return Err(CliError::usage(format!("unsupported state format '{}', expected '{FORMAT}'", self.format)));
        }
        let rep = self.rep();
        match self.kind {
            Kind::Pure => rep.check_vector()?,
            Kind::Density => rep.check_density()?,
        }
        let dim = rep.dim();
        let to_c = |p: &[f64; 2]| C64::new(p[0], p[1]);
        let state = match (&self.kind, &self.data) {
            (Kind::Pure, Data::Vector(v)) => {
                if v.len() != dim {
                    return Err(CliError::usage(format!("{rep} needs {dim} amplitudes, file has {}", v.len())));
                }
                QuantumState::pure(rep, CVector::from_iterator(dim, v.iter().map(to_c)), self.label.clone())?
            }
            (Kind::Density, Data::Matrix(rows)) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(CliError::usage(format!("{rep} needs a {dim}x{dim} density matrix")));
                }
                let m = CMatrix::from_fn(dim, dim, |r, c| to_c(&rows[r][c]));
                QuantumState::density(rep, m, self.label.clone())?
            }
            (Kind::Pure, _) => return Err(CliError::usage("pure state data must be a list of [re, im] pairs")),
            (Kind::Density, _) => return Err(CliError::usage("density data must be rows of [re, im] pairs")),
        };
        Ok(state)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("state files contain only finite numbers");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn read_state(path: &Path) -> CliResult<QuantumState> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    StateFile::parse(&text)?.to_state()
}

pub fn write_state(state: &QuantumState, out: Option<&Path>) -> CliResult<()> {
    output::emit(out, &StateFile::from_state(state).to_json())
}
