//! Quantum metrology numerics: probe states, collective spin operators,
//! quantum Fisher information, entanglement witnesses and noisy phase
//! estimation scenarios for ensembles of qubits.

pub mod error;
pub mod numerics;
pub mod random;
pub mod spin;
pub mod states;
pub mod fisher;
pub mod witness;
pub mod metrology;
pub mod battery;

pub use error::{Error, Result};
pub use numerics::{CMatrix, CVector, SpectralDecomposition, Tolerances, C64, TOL};
pub use spin::{Axis, CollectiveOperator, Provenance, Representation};
pub use states::{QuantumState, SqueezingSpec};
pub use fisher::{qfi, QfiResult};
pub use metrology::{error_propagation, ErrorPropagation, NoiseChannel, Scenario};
