//! Seeded fixtures shared by the benchmarks.

use qmetro::{random, CMatrix, QuantumState, Representation};

pub const SEED: u64 = 0xbe4c;

/// Full-rank random density matrix on `n` qubits.
pub fn random_density(n: usize) -> QuantumState {
    let rep = Representation::Full(n);
    let mut rng = random::rng(SEED ^ n as u64);
    QuantumState::density(rep, random::density(rep.dim(), rep.dim(), &mut rng), format!("random({n})"))
        .expect("Ginibre matrices give valid states")
}

pub fn random_hermitian(dim: usize) -> CMatrix {
    random::hermitian(dim, &mut random::rng(SEED ^ dim as u64))
}
