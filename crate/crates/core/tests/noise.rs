use qmetro::metrology::{apply_noise, binomial_weights, NoiseChannel};
use qmetro::numerics::CMatrix;
use qmetro::C64;
use qmetro::random;
use qmetro::spin::{self, rotate, Axis, Representation};
use qmetro::states::{self, QuantumState, SqueezingSpec};

/// Sum over every subset of decohered qubits, each replaced by 1/2 after tracing it out.
fn subset_mixture(rho: &CMatrix, n: usize, p: f64) -> CMatrix {
    let d = 1usize << n;
    let mut out = CMatrix::zeros(d, d);
    for mask in 0..d {
        let k = mask.count_ones() as i32;
        let w = p.powi(k) * (1.0 - p).powi(n as i32 - k) / f64::from(1u32 << k);
        for a in 0..d {
            for b in 0..d {
                if (a ^ b) & mask != 0 {
                    continue;
                }
                let mut acc = C64::new(0.0, 0.0);
                let mut c = mask;
                loop {
                    acc += rho[((a & !mask) | c, (b & !mask) | c)];
                    if c == 0 {
                        break;
                    }
                    c = (c - 1) & mask;
                }
                out[(a, b)] += acc * w;
            }
        }
    }
    out
}

#[test]
fn depolarizing_matches_binomial_mixture() {
    let mut rng = random::rng(5);
    for n in 1..=4 {
        let rep = Representation::Full(n);
        let rho = random::density(rep.dim(), 3.min(rep.dim()), &mut rng);
        let state = QuantumState::density(rep, rho.clone(), "random").unwrap();
        for p in [0.0, 0.1, 0.5, 0.9, 1.0] {
            let got = apply_noise(&state, &NoiseChannel::depolarizing(p).unwrap()).unwrap();
            let want = subset_mixture(&rho, n, p);
            assert!((got.density_matrix().into_owned() - want).norm() < 1e-9, "N={n} p={p}");
        }
    }
    // permutation-invariant inputs, as in the mixture form
    let gs = states::squeezed_ground_state(SqueezingSpec::new(6, 1.0).unwrap()).unwrap().state;
    let full = gs.to_full().unwrap();
    let got = apply_noise(&gs, &NoiseChannel::depolarizing(0.3).unwrap()).unwrap();
    let want = subset_mixture(&full.density_matrix(), 6, 0.3);
    assert!((got.density_matrix().into_owned() - want).norm() < 1e-9);
}

#[test]
fn binomial_weights_are_a_distribution_with_mean_pn() {
    for n in [1, 5, 10] {
        for p in [0.0, 0.25, 0.7, 1.0] {
            let w = binomial_weights(n, p);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let mean: f64 = w.iter().enumerate().map(|(k, x)| k as f64 * x).sum();
            assert!((mean - p * n as f64).abs() < 1e-12);
        }
    }
}

#[test]
fn depolarizing_commutes_with_collective_rotations() {
    let channel = NoiseChannel::depolarizing(0.35).unwrap();
    let probes = [
        states::dicke(5, 2, Representation::Full(5)).unwrap(),
        states::squeezed_ground_state(SqueezingSpec::new(4, 0.8).unwrap()).unwrap().state.to_full().unwrap(),
        states::ghz(4, Axis::Z, Representation::Full(4)).unwrap(),
    ];
    for probe in probes {
        let rep = probe.rep();
        let gen = spin::build_direction([0.48, -0.6, 0.64], rep).unwrap();
        let a = apply_noise(&rotate(&probe, &gen, 0.83).unwrap(), &channel).unwrap();
        let b = rotate(&apply_noise(&probe, &channel).unwrap(), &gen, 0.83).unwrap();
        assert!((a.density_matrix().into_owned() - b.density_matrix().into_owned()).norm() < 1e-9);
    }
}

#[test]
fn pauli_semigroup_output_is_a_state() {
    let channel = NoiseChannel::pauli_semigroup(0.9, [0.1, 0.2, 0.7], 1.7).unwrap();
    let psi = states::ghz(3, Axis::X, Representation::Full(3)).unwrap();
    let out = apply_noise(&psi, &channel).unwrap();
    out.validate().unwrap();
    assert!((out.trace() - 1.0).abs() < 1e-12);
    // z-dephasing leaves populations alone
    let deph = NoiseChannel::pauli_semigroup(3.0, [0.0, 0.0, 1.0], 2.0).unwrap();
    let z = states::ghz(3, Axis::Z, Representation::Full(3)).unwrap();
    let out = apply_noise(&z, &deph).unwrap();
    let rho = out.density_matrix();
    assert!((rho[(0, 0)].re - 0.5).abs() < 1e-12 && (rho[(7, 7)].re - 0.5).abs() < 1e-12);
    let coherence = (-3.0f64 * 2.0).exp().powi(3) * 0.5;
    assert!((rho[(0, 7)].re - coherence).abs() < 1e-12);
}

#[test]
fn noise_rejects_oversized_registers() {
    let big = states::polarized(12, Axis::Z, Representation::Symmetric(12)).unwrap();
    assert!(apply_noise(&big, &NoiseChannel::depolarizing(0.1).unwrap()).is_err());
}
