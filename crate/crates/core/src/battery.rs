//! Randomized property battery for the quantum Fisher information.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::fisher::{
    classical_fisher, mandelstam_tamm_check, qfi, qfi_alternative, qfi_matrices, rotation_family, sld,
    white_noise_qfi, Povm, StateSpectrum, DEFAULT_FD_STEP,
};
use crate::numerics::{direct_sum, kron, outer, partial_trace_second, trace_product, CMatrix, C64};
use crate::random::{self, QRng};
use crate::spin::{self, Axis, CollectiveOperator, Representation};
use crate::states::QuantumState;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub id: String,
    pub description: String,
    pub samples: usize,
    pub failures: usize,
    /// Largest deviation seen: excess over the bound for inequalities, absolute difference for identities.
    pub worst: f64,
    pub tolerance: f64,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatteryConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig { samples: 100, seed: 0x0f15 }
    }
}

struct Tally {
    samples: usize,
    failures: usize,
    worst: f64,
    tolerance: f64,
}

impl Tally {
    fn new(tolerance: f64) -> Self {
        Tally { samples: 0, failures: 0, worst: 0.0, tolerance }
    }

    /// Records `deviation`, which must not exceed the tolerance.
    fn record(&mut self, deviation: f64) {
        self.samples += 1;
        if !(deviation <= self.tolerance) {
            self.failures += 1;
        }
        if deviation > self.worst || deviation.is_nan() {
            self.worst = deviation;
        }
    }

    fn finish(self, id: &str, description: &str) -> PropertyResult {
        PropertyResult {
            id: id.into(),
            description: description.into(),
            samples: self.samples,
            failures: self.failures,
            worst: self.worst,
            tolerance: self.tolerance,
        }
    }
}

type Check = fn(&mut QRng, usize) -> Result<PropertyResult>;

const CHECKS: [Check; 13] = [
    convexity,
    diagonal_shift,
    unitary_covariance,
    tensor_additivity,
    direct_sum_additivity,
    partial_trace_monotonicity,
    white_noise,
    alternative_formula,
    sld_second_moment,
    classical_below_quantum,
    q_body_bound,
    mean_spin_bound,
    mandelstam_tamm,
];

/// Runs every property on `samples` random instances each; properties run in parallel
/// with independent, seed-derived generators.
pub fn qfi_battery(cfg: &BatteryConfig) -> Result<Vec<PropertyResult>> {
    CHECKS
        .par_iter()
        .enumerate()
        .map(|(i, check)| {
            let mut rng = random::rng(cfg.seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(i as u64 + 1)));
            check(&mut rng, cfg.samples)
        })
        .collect()
}

fn random_dim(rng: &mut QRng, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}

fn random_mixed(d: usize, rng: &mut QRng) -> CMatrix {
    let rank = rng.random_range(1..=d);
    random::density(d, rank, rng)
}

fn f_q(rho: &CMatrix, a: &CMatrix) -> Result<f64> {
    Ok(qfi_matrices(rho, a)?.value)
}

fn convexity(rng: &mut QRng, samples: usize) -> Result<PropertyResult> {
    let mut t = Tally::new(1e-8);
    for _ in 0..samples {
        let d = random_dim(rng, 2, 16);
        let (r1, r2, a) = (random_mixed(d, rng), random_mixed(d, rng), random::hermitian(d, rng));
        let p: f64 = rng.random();
        let mix = r1.scale(p) + r2.scale(1.0 - p);
        let lhs = f_q(&mix, &a)?;
        let rhs = p * f_q(&r1, &a)? + (1.0 - p) * f_q(&r2, &a)?;
        t.record(lhs - rhs);
    }
    Ok(t.finish("a", "convexity in the state"))
}

fn diagonal_shift(rng: &mut QRng, samples: usize) -> Result<PropertyResult> {
    let mut t = Tally::new(1e-9);
    for _ in 0..samples {
        let d = random_dim(rng, 2, 16);
        let (rho, a) = (random_mixed(d, rng), random::hermitian(d, rng));
        let spec = StateSpectrum::of_matrix(&rho)?;
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| C64::new(rng.random_range(-3.0..3.0), 0.0)));
        let shift = &spec.eigenvectors * diag * spec.eigenvectors.adjoint();
        let shifted = crate::numerics::hermitian_part(&(&a + shift));
        t.record((f_q(&rho, &shifted)? - f_q(&rho, &a)?).abs());
    }
    Ok(t.finish("b", "independence of operator parts commuting with the state"))
}

fn unitary_covariance(rng: &mut QRng, samples: usize) -> Result<PropertyResult> {
    let mut t = Tally::new(1e-9);
    for _ in 0..samples {
        let d = random_dim(rng, 2, 16);
        let (rho, a, u) = (random_mixed(d, rng), random::hermitian(d, rng), random::unitary(d, rng));
        let moved = crate::numerics::hermitian_part(&(&u * &rho * u.adjoint()));
        let heis = crate::numerics::hermitian_part(&(u.adjoint() * &a * &u));
        t.record((f_q(&moved, &a)? - f_q(&rho, &heis)?).abs());
    }
    Ok(t.finish("c", "unitary covariance"))
}

fn tensor_additivity(rng: &mut QRng, samples: usize) -> Result<PropertyResult> {
    let mut t = Tally::new(1e-8);
    for _ in 0..samples {
        let da = random_dim(rng, 2, 4);
        let db = random_dim(rng, 2, 16 / da);
        let (ra, rb) = (random_mixed(da, rng), random_mixed(db, rng));
        let (a, b) = (random::hermitian(da, rng), random::hermitian(db, rng));
        let joint = kron(&ra, &rb);
        let gen = kron(&a, &CMatrix::identity(db, db)) + kron(&CMatrix::identity(da, da), &b);
        t.record((f_q(&joint, &gen)? - f_q(&ra, &a)? - f_q(&rb, &b)?).abs());
    }
    Ok(t.finish("d", "additivity under tensor products"))
}

fn direct_sum_additivity(rng: &mut QRng, samples: usize) -> Result<PropertyResult> {
    let mut t = Tally::new(1e-8);
    for _ in 0..samples {
        let blocks = rng.random_range(2..=3);
        let dims: Vec<usize> = (0..blocks).map(|_| rng.random_range(1..=16 / blocks)).collect();
        let w = random::simplex(blocks, rng);
        let rhos: Vec<CMatrix> = dims.iter().map(|&d| random_mixed(d, rng)).collect();
        let ops: Vec<CMatrix> = dims.iter().map(|&d| random::hermitian(d, rng)).collect();
        let weighted: Vec<CMatrix> = rhos.iter().zip(w.iter()).map(|(r, &p)| r.scale(p)).collect();
        let lhs = f_q(&direct_sum(&weighted), &direct_sum(&ops))?;
        let mut rhs = 0.0;
        for k in 0..blocks {
            rhs += w[k] * f_q(&rhos[k], &ops[k])?;
        }
        t.record((lhs - rhs).abs());
    }
    Ok(t.finish("e", "additivity under direct sums"))
}

fn partial_trace_monotonicity(rng: &mut QRng, samples: usize) -> Result<PropertyResult> {
    let mut t = Tally::new(1e-8);
    for _ in 0..samples {
        let da = random_dim(rng, 2, 4);
        let db = random_dim(rng, 2, 16 / da);
        let a = random::hermitian(da, rng);
        let lifted = kron(&a, &CMatrix::identity(db, db));
        let joint = random_mixed(da * db, rng);
        let reduced = partial_trace_second(&joint, da, db);
        t.record(f_q(&reduced, &a)? - f_q(&joint, &lifted)?);
        // product states saturate
        let (ra, rb) = (random_mixed(da, rng), random_mixed(db, rng));
        t.record((f_q(&kron(&ra, &rb), &lifted)? - f_q(&ra, &a)?).abs());
    }
    Ok(t.finish("f", "monotonicity under partial trace, equality on products"))
}

fn white_noise(rng: &mut QRng, samples: usize) -> Result<PropertyResult> {
    let mut t = Tally::new(1e-9);
    for _ in 0..samples {
        let d = random_dim(rng, 2, 16);
        let psi = random::pure_state(d, rng);
        let a = random::hermitian(d, rng);
        let p: f64 = rng.random();
        let pure = outer(&psi);
        let noisy = pure.scale(p) + CMatrix::identity(d, d).scale((1.0 - p) / d as f64);
        let f_pure = f_q(&pure, &a)?;
        t.record((f_q(&noisy, &a)? - white_noise_qfi(f_pure, p, d)).abs());
    }
    Ok(t.finish("g", "closed form under white noise"))
}

fn random_qubit_state(rng: &mut QRng, max_qubits: usize) -> Result<(QuantumState, CollectiveOperator)> {
    let n = rng.random_range(1..=max_qubits);
    let rep = Representation::Full(n);
    let d = rep.dim();
    let rho = random_mixed(d, rng);
    let state = QuantumState::density(rep, rho, "random")?;
    let op = CollectiveOperator::user(random::hermitian(d, rng), rep, "random")?;
    Ok((state, op))
}

fn alternative_formula(rng: &mut QRng, samples: usize) -> Result<PropertyResult> {
    let mut t = Tally::new(1e-9);
    for _ in 0..samples {
        let (state, op) = random_qubit_state(rng, 4)?;
        t.record((qfi(&state, &op)?.value - qfi_alternative(&state, &op)?).abs());
    }
    Ok(t.finish("alt", "second-moment form of the QFI"))
}

fn sld_second_moment(rng: &mut QRng, samples: usize) -> Result<PropertyResult> {
    let mut t = Tally::new(1e-8);
    for _ in 0..samples {
        let (state, op) = random_qubit_state(rng, 4)?;
        let l = sld(&state, &op)?;
        let l2 = &l * &l;
        let second = trace_product(&state.density_matrix(), &l2).re;
        t.record((second - qfi(&state, &op)?.value).abs());
    }
    Ok(t.finish("sld", "Tr(rho L^2) equals the QFI"))
}

fn classical_below_quantum(rng: &mut QRng, samples: usize) -> Result<PropertyResult> {
    let mut t = Tally::new(1e-6);
    for _ in 0..samples {
        let (state, op) = random_qubit_state(rng, 3)?;
        let povm = Povm::projective(&random::unitary(state.dim(), rng))?;
        let theta0 = rng.random_range(-1.0..1.0);
        let family = rotation_family(&state, &op);
        let fc = classical_fisher(&family, &povm, theta0, DEFAULT_FD_STEP)?.value;
        t.record(fc - qfi(&state, &op)?.value);
    }
    Ok(t.finish("cr", "classical Fisher information never exceeds the QFI"))
}

fn random_spin_state(rng: &mut QRng) -> Result<QuantumState> {
    let rep = if rng.random_bool(0.5) {
        Representation::Full(rng.random_range(1..=4))
    } else {
        Representation::Symmetric(rng.random_range(1..=8))
    };
    QuantumState::density(rep, random_mixed(rep.dim(), rng), "random")
}

fn q_body_bound(rng: &mut QRng, samples: usize) -> Result<PropertyResult> {
    let mut t = Tally::new(1e-6);
    for _ in 0..samples {
        let state = random_spin_state(rng)?;
        let jx = spin::jx(state.rep())?;
        let half = state.n() as f64 / 2.0;
        for q in 1..=3u32 {
            let f = qfi(&state, &jx.power(q))?.value;
            t.record(f - 4.0 * half.powi(2 * q as i32));
        }
    }
    Ok(t.finish("qbody", "q-body scaling bound 4(N/2)^(2q)"))
}

fn mean_spin_bound(rng: &mut QRng, samples: usize) -> Result<PropertyResult> {
    let mut t = Tally::new(1e-6);
    for _ in 0..samples {
        let state = random_spin_state(rng)?;
        let axis = Axis::ALL[rng.random_range(0..3)];
        let j = spin::build_collective(axis, state.rep())?;
        let n = state.n() as f64;
        let mean = state.expect(&j);
        t.record(qfi(&state, &j)?.value - (n * n - 4.0 * mean * mean));
    }
    Ok(t.finish("meanspin", "F_Q[J_l] <= N^2 - 4<J_l>^2"))
}

fn mandelstam_tamm(rng: &mut QRng, samples: usize) -> Result<PropertyResult> {
    let mut t = Tally::new(crate::numerics::TOL.verdict);
    for _ in 0..samples {
        let (state, op) = random_qubit_state(rng, 3)?;
        let f = qfi(&state, &op)?.value;
        let limit = if f > 1e-12 { std::f64::consts::PI / f.sqrt() } else { 1.0 };
        let theta = rng.random_range(-limit..limit);
        let mt = mandelstam_tamm_check(&state, &op, theta)?;
        t.record(mt.bound - mt.fidelity);
    }
    Ok(t.finish("speed", "Bures fidelity stays above cos^2(sqrt(F_Q/4) theta)"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_battery_passes() {
        let results = qfi_battery(&BatteryConfig { samples: 12, seed: 7 }).unwrap();
        assert_eq!(results.len(), CHECKS.len());
        for r in &results {
            assert!(r.passed(), "{r:?}");
            assert!(r.samples >= 12);
        }
    }

    #[test]
    fn battery_is_deterministic() {
        let cfg = BatteryConfig { samples: 5, seed: 11 };
        assert_eq!(qfi_battery(&cfg).unwrap(), qfi_battery(&cfg).unwrap());
    }

    #[test]
    fn tally_flags_nan() {
        let mut t = Tally::new(1e-9);
        t.record(f64::NAN);
        assert_eq!(t.failures, 1);
    }
}
