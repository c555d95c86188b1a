//! Phase-estimation scenarios, error propagation, local noise and scaling sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fisher::qfi;
use crate::numerics::{hermitian_eigendecompose, log_log_slope, CMatrix, CVector, C64};
use crate::spin::{self, rotate, Axis, CollectiveOperator, Representation};
use crate::states::{self, Payload, QuantumState, SqueezingSpec};
use crate::witness::{k_producible_bound, MomentSet};

/// Central-difference step for the derivative cross-check.
pub const FD_STEP: f64 = 1e-5;
/// `|∂_θ⟨M⟩|` and `(ΔM)²` below this count as zero.
pub const FLAT_TOL: f64 = 1e-12;
/// Highest Taylor order used when the limit `θ → θ₀` has to be taken.
const SERIES_ORDER: usize = 12;
const SERIES_TOL: f64 = 1e-13;

/// A probe, a generator `A` of `e^{−iθA}` and a measured observable `M`.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub probe: QuantumState,
    pub generator: CollectiveOperator,
    pub observable: CollectiveOperator,
    pub theta0: f64,
    /// `γB` when the phase is read as `θ = γBt`.
    pub gamma_b: Option<f64>,
}

impl Scenario {
    pub fn new(
        id: impl Into<String>,
        probe: QuantumState,
        generator: CollectiveOperator,
        observable: CollectiveOperator,
        theta0: f64,
    ) -> Result<Self> {
        probe.rep().ensure_same(generator.rep())?;
        probe.rep().ensure_same(observable.rep())?;
        if !theta0.is_finite() {
            return Err(Error::InvalidParameter(format!("working point must be finite, got {theta0}")));
        }
        Ok(Scenario { id: id.into(), probe, generator, observable, theta0, gamma_b: None })
    }

    pub fn n(&self) -> usize {
        self.probe.n()
    }

    pub fn rep(&self) -> Representation {
        self.probe.rep()
    }

    pub fn at(mut self, theta0: f64) -> Self {
        self.theta0 = theta0;
        self
    }

    /// Sets `θ₀ = γB·t`.
    pub fn at_time(mut self, gamma_b: f64, t: f64) -> Self {
        self.gamma_b = Some(gamma_b);
        self.theta0 = gamma_b * t;
        self
    }

    /// Same generator and observable on another probe.
    pub fn with_probe(&self, probe: QuantumState) -> Result<Self> {
        self.rep().ensure_same(probe.rep())?;
        Ok(Scenario { probe, ..self.clone() })
    }

    /// Polarized probe along `z`, rotated by `J_y`, read out with `J_x`.
    pub fn ramsey(n: usize, rep: Representation) -> Result<Self> {
        Self::ramsey_with(states::polarized(n, Axis::Z, rep)?).map(|s| Scenario { id: "ramsey".into(), ..s })
    }

    /// Ramsey readout (`A = J_y`, `M = J_x`) on an arbitrary probe.
    pub fn ramsey_with(probe: QuantumState) -> Result<Self> {
        let rep = probe.rep();
        let id = format!("ramsey:{}", probe.label());
        Self::new(id, probe, spin::jy(rep)?, spin::jx(rep)?, 0.0)
    }

    /// GHZ probe, phase imprinted by `J_z`, parity `σ_x^{⊗N}` measured.
    pub fn ghz_parity(n: usize, rep: Representation) -> Result<Self> {
        Self::new("ghz_parity", states::ghz(n, Axis::Z, rep)?, spin::jz(rep)?, spin::parity(Axis::X, rep)?, 0.0)
    }

    /// Dicke probe with `N/2` excitations, rotated by `J_y`, read out with `J_z²`.
    pub fn dicke(n: usize, rep: Representation) -> Result<Self> {
        if n % 2 == 1 {
            return Err(Error::InvalidParameter(format!("Dicke metrology needs even N, got {n}")));
        }
        let m = squared(Axis::Z, rep)?;
        Self::new("dicke", states::dicke(n, n / 2, rep)?, spin::jy(rep)?, m, 0.0)
    }

    /// Ground state of `J_x² − ΛJ_z` with the Ramsey readout.
    pub fn squeezed(spec: SqueezingSpec) -> Result<Self> {
        let gs = states::squeezed_ground_state(spec)?;
        Self::ramsey_with(gs.state).map(|s| Scenario { id: "squeezed".into(), ..s })
    }

    /// Permutation-invariant singlet under the gradient generator `Σ n j_y^{(n)}`, read out with `J_z²`.
    pub fn gradient(n: usize) -> Result<Self> {
        let rep = Representation::Full(n);
        let probe = states::singlet_pi(n)?;
        Self::new("gradient", probe, spin::build_gradient_generator(rep, false)?, squared(Axis::Z, rep)?, 0.0)
    }
}

/// `J_axis²` as an operator.
pub fn squared(axis: Axis, rep: Representation) -> Result<CollectiveOperator> {
    let j = spin::build_collective(axis, rep)?;
    CollectiveOperator::user_sparse(j.square(), rep, format!("J{}^2", axis.label()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorPropagation {
    pub theta0: f64,
    pub mean: f64,
    pub variance: f64,
    /// `i⟨[A, M]⟩` at θ₀.
    pub derivative: f64,
    /// `(Δθ)²`; `None` means no sensitivity at θ₀.
    pub delta_theta_sq: Option<f64>,
    /// Order of the leading Taylor coefficient when the limit `θ → θ₀` was taken.
    pub limit_order: Option<usize>,
    pub fd_derivative: f64,
    /// Relative gap between the analytic and central-difference derivatives,
    /// absolute when the analytic derivative vanishes.
    pub fd_mismatch: f64,
}

impl ErrorPropagation {
    pub fn sensitive(&self) -> bool {
        self.delta_theta_sq.is_some()
    }

    /// `(Δθ)^{-2}`, zero without sensitivity.
    pub fn precision_inv(&self) -> f64 {
        match self.delta_theta_sq {
            Some(d) if d > 0.0 => 1.0 / d,
            Some(_) => f64::INFINITY,
            None => 0.0,
        }
    }
}

/// `(ΔM)² / |∂_θ⟨M⟩|²` at the scenario's working point.
pub fn error_propagation(s: &Scenario) -> Result<ErrorPropagation> {
    let state = rotate(&s.probe, &s.generator, s.theta0)?;
    error_propagation_at(&state, &s.generator, &s.observable, s.theta0)
}

/// Error propagation for a state that is already at the working point `theta0`.
pub fn error_propagation_at(
    state: &QuantumState,
    generator: &CollectiveOperator,
    observable: &CollectiveOperator,
    theta0: f64,
) -> Result<ErrorPropagation> {
    state.rep().ensure_same(generator.rep())?;
    state.rep().ensure_same(observable.rep())?;
    let mean = state.expect(observable);
    let variance = state.variance(observable);
    let derivative = commutator_derivative(state, generator, observable);

    let plus = rotate(state, generator, FD_STEP)?.expect(observable);
    let minus = rotate(state, generator, -FD_STEP)?.expect(observable);
    let fd_derivative = (plus - minus) / (2.0 * FD_STEP);
    let fd_mismatch = if derivative.abs() > FLAT_TOL {
        (fd_derivative - derivative).abs() / derivative.abs()
    } else {
        (fd_derivative - derivative).abs()
    };

    let (delta_theta_sq, limit_order) = if derivative.abs() > FLAT_TOL {
        (Some(variance.max(0.0) / (derivative * derivative)), None)
    } else if variance < FLAT_TOL {
        match flat_limit(state, generator, observable) {
            Some((value, order)) => (Some(value), Some(order)),
            None => (None, None),
        }
    } else {
        (None, None)
    };
    Ok(ErrorPropagation { theta0, mean, variance, derivative, delta_theta_sq, limit_order, fd_derivative, fd_mismatch })
}

/// `∂_θ⟨M⟩ = i⟨[A, M]⟩ = −2 Im⟨AM⟩`.
fn commutator_derivative(state: &QuantumState, a: &CollectiveOperator, m: &CollectiveOperator) -> f64 {
    let am = match state.payload() {
        Payload::Pure(psi) => a.apply(psi).dotc(&m.apply(psi)),
        Payload::Density(rho) => a.sparse().trace_with(&m.apply_mat(rho)),
    };
    -2.0 * am.im
}

/// Limit of `(ΔM)²(θ)/(∂_θ⟨M⟩)²` as `θ → θ₀` from the Taylor coefficients of
/// `⟨M⟩` and `⟨M²⟩`, with `A` and `M` rescaled to unit norm bound.
///
/// Returns `None` when every derivative coefficient vanishes or the variance
/// starts at a lower order than the squared slope.
fn flat_limit(state: &QuantumState, a: &CollectiveOperator, m: &CollectiveOperator) -> Option<(f64, usize)> {
    let sa = a.norm_bound();
    let sm = m.norm_bound();
    if sa == 0.0 || sm == 0.0 {
        return None;
    }
    let k = SERIES_ORDER;
    let h = C64::new(0.0, -1.0 / sa);
    let mut mk = vec![0.0; k + 1];
    let mut sk = vec![0.0; k + 1];
    match state.payload() {
        Payload::Pure(psi) => {
            let mut terms: Vec<CVector> = vec![psi.clone()];
            for j in 1..=k {
                let next = a.apply(&terms[j - 1]) * (h / j as f64);
                terms.push(next);
            }
            let mterms: Vec<CVector> = terms.iter().map(|t| m.apply(t).unscale(sm)).collect();
            for o in 0..=k {
                for i in 0..=o {
                    mk[o] += terms[i].dotc(&mterms[o - i]).re;
                    sk[o] += mterms[i].dotc(&mterms[o - i]).re;
                }
            }
        }
        Payload::Density(rho) => {
            let m2 = m.square().scale(C64::new(1.0 / (sm * sm), 0.0));
            let mut term: CMatrix = rho.clone();
            for j in 0..=k {
                if j > 0 {
                    term = (a.apply_mat(&term) - a.right_apply_mat(&term)) * (h / j as f64);
                }
                mk[j] = m.sparse().trace_with(&term).re / sm;
                sk[j] = m2.trace_with(&term).re;
            }
        }
    }
    let conv = |x: &[f64], o: usize| -> f64 { (0..=o).map(|i| x[i] * x[o - i]).sum() };
    let v: Vec<f64> = (0..=k).map(|o| sk[o] - conv(&mk, o)).collect();
    let d: Vec<f64> = (0..k).map(|o| (o + 1) as f64 * mk[o + 1]).collect();
    let g: Vec<f64> = (0..k).map(|o| conv(&d, o)).collect();
    let r = g.iter().position(|x| x.abs() > SERIES_TOL)?;
    if v[..r].iter().any(|x| x.abs() > SERIES_TOL) {
        return None;
    }
    Some((v[r].max(0.0) / g[r] / (sa * sa), r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub theta: f64,
    pub mean: f64,
    pub variance: f64,
}

/// `⟨M⟩(θ)` and `(ΔM)²(θ)` along the scenario's rotation.
pub fn response_curve(s: &Scenario, thetas: &[f64]) -> Result<Vec<CurvePoint>> {
    thetas
        .par_iter()
        .map(|&theta| {
            let st = rotate(&s.probe, &s.generator, theta)?;
            Ok(CurvePoint { theta, mean: st.expect(&s.observable), variance: st.variance(&s.observable) })
        })
        .collect()
}

/// Response of `J_x` to a `J_y` rotation of `probe`.
pub fn ramsey_curve(probe: &QuantumState, thetas: &[f64]) -> Result<Vec<CurvePoint>> {
    response_curve(&Scenario::ramsey_with(probe.clone())?, thetas)
}

/// Closed form of the Ramsey response in terms of the probe's first and second moments.
pub fn ramsey_closed_form(m: &MomentSet, theta: f64) -> CurvePoint {
    let (s, c) = theta.sin_cos();
    let cov = m.covariance()[(Axis::X.index(), Axis::Z.index())];
    CurvePoint {
        theta,
        mean: m.mean(Axis::Z) * s + m.mean(Axis::X) * c,
        variance: m.var(Axis::X) * c * c + m.var(Axis::Z) * s * s + cov * (2.0 * theta).sin(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontierRow {
    pub n: usize,
    pub lambda: f64,
    /// `⟨J_z⟩ / J_max`.
    pub polarization: f64,
    pub var_jx: f64,
    pub precision_inv: f64,
    /// `(Δθ)^{-2} / N²`.
    pub normalized: f64,
    /// `2N + N²(1 − ⟨J_z⟩²/J_max²)`.
    pub ceiling: f64,
    pub sensitive: bool,
}

/// Upper bound on `⟨J_z⟩²/(ΔJ_x)²` at a given polarization.
pub fn squeezing_ceiling(n: usize, polarization: f64) -> f64 {
    let nf = n as f64;
    2.0 * nf + nf * nf * (1.0 - polarization * polarization)
}

pub fn frontier_row(n: usize, lambda: f64) -> Result<FrontierRow> {
    let s = Scenario::squeezed(SqueezingSpec::new(n, lambda)?)?;
    let e = error_propagation(&s)?;
    let jz = spin::jz(s.rep())?;
    let polarization = s.probe.expect(&jz) / (n as f64 / 2.0);
    let precision_inv = e.precision_inv();
    let nf = n as f64;
    Ok(FrontierRow {
        n,
        lambda,
        polarization,
        var_jx: e.variance,
        precision_inv,
        normalized: precision_inv / (nf * nf),
        ceiling: squeezing_ceiling(n, polarization),
        sensitive: e.sensitive(),
    })
}

/// Best Ramsey precision against polarization, one row per `Λ`.
pub fn squeezing_frontier(n: usize, lambdas: &[f64]) -> Result<Vec<FrontierRow>> {
    lambdas.par_iter().map(|&l| frontier_row(n, l)).collect()
}

/// `Λ` whose ground state has `⟨J_z⟩/J_max = target`, by bisection.
///
/// The polarization is nondecreasing in `Λ` since `dE/dΛ = −⟨J_z⟩` and the
/// ground energy is concave.
pub fn lambda_for_polarization(n: usize, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter(format!("target polarization must lie in (0, 1), got {target}")));
    }
    let pol = |l: f64| -> Result<f64> {
        let gs = states::squeezed_ground_state(SqueezingSpec::new(n, l)?)?;
        let jz = spin::jz(gs.state.rep())?;
        Ok(gs.state.expect(&jz) / (n as f64 / 2.0))
    };
    let mut hi = n as f64;
    let mut doublings = 0;
    while pol(hi)? < target {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::InvalidParameter(format!("polarization {target} not reached")));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if pol(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Frontier rows at prescribed polarizations.
pub fn frontier_at_polarizations(n: usize, targets: &[f64]) -> Result<Vec<FrontierRow>> {
    targets.par_iter().map(|&t| frontier_row(n, lambda_for_polarization(n, t)?)).collect()
}

/// `count` values of `Λ` spaced logarithmically in `[lo·N, hi·N]`.
pub fn lambda_grid(n: usize, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    log_space(lo * n as f64, hi * n as f64, count)
}

pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientReport {
    pub n: usize,
    pub theta_g0: f64,
    pub gradient: ErrorPropagation,
    /// Same probe and readout under the homogeneous generator `J_y`.
    pub homogeneous: ErrorPropagation,
}

/// Gradient magnetometry with the permutation-invariant singlet.
pub fn gradient_scenario(n: usize, theta_g0: f64) -> Result<GradientReport> {
    if n % 2 == 1 || !(2..=8).contains(&n) {
        return Err(Error::InvalidParameter(format!("gradient scenario needs even 2 <= N <= 8, got {n}")));
    }
    let s = Scenario::gradient(n)?.at(theta_g0);
    let gradient = error_propagation(&s)?;
    let homogeneous_s = Scenario::new("homogeneous", s.probe.clone(), spin::jy(s.rep())?, s.observable.clone(), theta_g0)?;
    let homogeneous = error_propagation(&homogeneous_s)?;
    Ok(GradientReport { n, theta_g0, gradient, homogeneous })
}

/// Uncorrelated single-qubit noise, applied identically to every qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseChannel {
    /// `ϱ ↦ (1 − p)ϱ + p·1/2`.
    Depolarizing { p: f64 },
    /// Evolution for time `t` under `−(γ/2)(ϱ − Σ_l α_l σ_l ϱ σ_l)`.
    PauliSemigroup { gamma: f64, alpha: [f64; 3], t: f64 },
}

impl NoiseChannel {
    pub fn depolarizing(p: f64) -> Result<Self> {
        let c = NoiseChannel::Depolarizing { p };
        c.validate()?;
        Ok(c)
    }

    pub fn pauli_semigroup(gamma: f64, alpha: [f64; 3], t: f64) -> Result<Self> {
        let c = NoiseChannel::PauliSemigroup { gamma, alpha, t };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseChannel::Depolarizing { p } => states::check_probability(p)?,
            NoiseChannel::PauliSemigroup { gamma, alpha, t } => {
                if !(gamma >= 0.0 && gamma.is_finite() && t >= 0.0 && t.is_finite()) {
                    return Err(Error::InvalidParameter(format!("need finite gamma >= 0 and t >= 0, got {gamma}, {t}")));
                }
                if alpha.iter().any(|a| !(*a >= 0.0)) || (alpha.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!("alpha weights must be >= 0 and sum to 1, got {alpha:?}")));
                }
            }
        }
        self.check_cptp()
    }

    /// Damping factors of the Bloch components `(x, y, z)`.
    pub fn transfer_diagonal(&self) -> [f64; 3] {
        match *self {
            NoiseChannel::Depolarizing { p } => [1.0 - p; 3],
            NoiseChannel::PauliSemigroup { gamma, alpha, t } => alpha.map(|a| (-gamma * (1.0 - a) * t).exp()),
        }
    }

    /// Weights `(q_0, q_x, q_y, q_z)` of `ϱ ↦ Σ_l q_l σ_l ϱ σ_l`.
    pub fn pauli_weights(&self) -> [f64; 4] {
        let [lx, ly, lz] = self.transfer_diagonal();
        [
            (1.0 + lx + ly + lz) / 4.0,
            (1.0 + lx - ly - lz) / 4.0,
            (1.0 - lx + ly - lz) / 4.0,
            (1.0 - lx - ly + lz) / 4.0,
        ]
    }

    /// Single-qubit action.
    pub fn apply_qubit(&self, rho: &CMatrix) -> CMatrix {
        let [q0, qx, qy, qz] = self.pauli_weights();
        let (x, y, z) = (crate::numerics::pauli_x(), crate::numerics::pauli_y(), crate::numerics::pauli_z());
        rho.scale(q0) + (&x * rho * &x).scale(qx) + (&y * rho * &y).scale(qy) + (&z * rho * &z).scale(qz)
    }

    /// Choi matrix `Σ_{ij} |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
    pub fn choi(&self) -> CMatrix {
        let mut c = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                let mut e = CMatrix::zeros(2, 2);
                e[(i, j)] = C64::new(1.0, 0.0);
                let out = self.apply_qubit(&e);
                for a in 0..2 {
                    for b in 0..2 {
                        c[(2 * i + a, 2 * j + b)] = out[(a, b)];
                    }
                }
            }
        }
        c
    }

    /// Complete positivity and trace preservation on the Choi matrix, within `1e-10`.
    pub fn check_cptp(&self) -> Result<()> {
        let c = self.choi();
        let min = hermitian_eigendecompose(&c)?.eigenvalues[0];
        if min < -1e-10 {
            return Err(Error::Unphysical(format!("channel is not completely positive: Choi eigenvalue {min:e}")));
        }
        // Tr_out C = 1
        for i in 0..2 {
            for j in 0..2 {
                let t = c[(2 * i, 2 * j)] + c[(2 * i + 1, 2 * j + 1)];
                let want = if i == j { 1.0 } else { 0.0 };
                if (t - C64::new(want, 0.0)).norm() > 1e-10 {
                    return Err(Error::Unphysical("channel is not trace preserving".into()));
                }
            }
        }
        Ok(())
    }
}

/// Probability that exactly `k` of `n` qubits are replaced by the maximally mixed state.
pub fn binomial_weights(n: usize, p: f64) -> Vec<f64> {
    (0..=n).map(|k| spin::binomial(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)).collect()
}

/// The channel applied to every qubit. Symmetric inputs are embedded first.
pub fn apply_noise(state: &QuantumState, channel: &NoiseChannel) -> Result<QuantumState> {
    channel.validate()?;
    let full = state.to_full()?;
    let rep = full.rep();
    rep.check_density()?;
    let n = rep.n();
    let d = rep.dim();
    let [q0, qx, qy, qz] = channel.pauli_weights();
    let mut rho = full.density_matrix().into_owned();
    let mut next = CMatrix::zeros(d, d);
    for qubit in 0..n {
        let mask = 1usize << (n - 1 - qubit);
        let sign = |b: usize| if b & mask == 0 { 1.0 } else { -1.0 };
        for col in 0..d {
            let sc = sign(col);
            let fc = col ^ mask;
            for row in 0..d {
                let ss = sign(row) * sc;
                next[(row, col)] = rho[(row, col)] * (q0 + qz * ss) + rho[(row ^ mask, fc)] * (qx + qy * ss);
            }
        }
        std::mem::swap(&mut rho, &mut next);
    }
    let rho = (&rho + rho.adjoint()).scale(0.5);
    Ok(QuantumState::density_trusted(rep, rho, format!("{} + noise", state.label())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub scenario: String,
    pub n: usize,
    pub p: f64,
    pub lambda: f64,
    pub theta0: f64,
    pub precision_inv: f64,
    pub qfi: f64,
    pub bound_sep: f64,
    pub bound_bisep: f64,
    pub bound_heisenberg: f64,
    /// `N/p`; infinite without noise.
    pub ceiling: f64,
    /// `⟨J_z⟩²`, which the ceiling bounds by `N²/4`.
    pub numerator: f64,
    pub var_jx: f64,
}

impl SweepRecord {
    /// First violated invariant, if any.
    pub fn violation(&self) -> Option<String> {
        let nf = self.n as f64;
        if self.precision_inv > self.ceiling + 1e-6 {
            return Some(format!("precision {} above the N/p ceiling {}", self.precision_inv, self.ceiling));
        }
        if self.precision_inv > self.bound_heisenberg + 1e-6 {
            return Some(format!("precision {} above N^2 = {}", self.precision_inv, self.bound_heisenberg));
        }
        let polarization = (4.0 * self.numerator).sqrt() / nf;
        let squeezing = squeezing_ceiling(self.n, polarization.min(1.0));
        if self.precision_inv > squeezing + 1e-6 * squeezing.max(1.0) {
            return Some(format!("precision {} above 2N + N^2(1 - P^2) = {squeezing}", self.precision_inv));
        }
        if self.qfi.is_finite() && self.precision_inv > self.qfi + 1e-6 * self.qfi.max(1.0) {
            return Some(format!("precision {} above F_Q = {}", self.precision_inv, self.qfi));
        }
        let floor = self.p * nf / 4.0;
        if self.var_jx < floor - 1e-12 * nf.max(1.0) {
            return Some(format!("Var(Jx) = {} below pN/4 = {floor}", self.var_jx));
        }
        None
    }

    pub fn key(&self) -> (String, usize, u64, u64) {
        (self.scenario.clone(), self.n, self.p.to_bits(), self.lambda.to_bits())
    }
}

pub const SQUEEZED_SWEEP_ID: &str = "squeezed";

/// Depolarized `H(Λ)` ground state, Ramsey readout at `θ₀ = 0`.
///
/// Without noise the evaluation stays in the symmetric subspace.
pub fn evaluate_noisy_squeezed(n: usize, p: f64, lambda: f64, with_qfi: bool) -> Result<SweepRecord> {
    states::check_probability(p)?;
    let gs = states::squeezed_ground_state(SqueezingSpec::new(n, lambda)?)?.state;
    let probe = if p == 0.0 { gs } else { apply_noise(&gs, &NoiseChannel::depolarizing(p)?)? };
    let rep = probe.rep();
    let (jx, jy, jz) = (spin::jx(rep)?, spin::jy(rep)?, spin::jz(rep)?);
    let e = error_propagation_at(&probe, &jy, &jx, 0.0)?;
    let qfi_value = if with_qfi { qfi(&probe, &jy)?.value } else { f64::NAN };
    let nf = n as f64;
    let mean_z = probe.expect(&jz);
    Ok(SweepRecord {
        scenario: SQUEEZED_SWEEP_ID.into(),
        n,
        p,
        lambda,
        theta0: 0.0,
        precision_inv: e.precision_inv(),
        qfi: qfi_value,
        bound_sep: nf,
        bound_bisep: if n >= 2 { k_producible_bound(n, n - 1) } else { nf },
        bound_heisenberg: nf * nf,
        ceiling: if p > 0.0 { nf / p } else { f64::INFINITY },
        numerator: mean_z * mean_z,
        var_jx: e.variance,
    })
}

/// Every `(N, Λ)` pair, sorted by `N` then `Λ`.
pub fn sweep_grid(ns: &[usize], p: f64, lambdas: &[f64]) -> Result<Vec<SweepRecord>> {
    let tasks: Vec<(usize, f64)> = ns.iter().flat_map(|&n| lambdas.iter().map(move |&l| (n, l))).collect();
    let mut out: Vec<SweepRecord> =
        tasks.par_iter().map(|&(n, l)| evaluate_noisy_squeezed(n, p, l, true)).collect::<Result<_>>()?;
    out.sort_by(|a, b| a.n.cmp(&b.n).then(a.lambda.total_cmp(&b.lambda)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOptions {
    /// Coarse grid size in `Λ`.
    pub coarse_points: usize,
    /// Coarse grid bounds as multiples of `N`.
    pub lambda_range: (f64, f64),
    /// Stop the golden-section search once the bracket in `ln Λ` is this narrow.
    pub golden_tol: f64,
    pub max_golden_steps: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { coarse_points: 16, lambda_range: (1e-3, 1e2), golden_tol: 1e-4, max_golden_steps: 80 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutcome {
    /// Best record per `N`.
    pub optimum: Vec<SweepRecord>,
    /// Every coarse-grid evaluation.
    pub grid: Vec<SweepRecord>,
    /// Log-log slope of the optimum against `N`; needs at least three values.
    pub exponent: Option<f64>,
    pub violations: Vec<String>,
}

/// Maximizes the Ramsey precision over `Λ` for each `N` under depolarizing noise of strength `p`.
pub fn noisy_scaling_sweep(ns: &[usize], p: f64, opts: &SweepOptions) -> Result<SweepOutcome> {
    if ns.is_empty() {
        return Err(Error::InvalidParameter("empty particle-number list".into()));
    }
    if opts.coarse_points < 3 {
        return Err(Error::InvalidParameter("the coarse grid needs at least 3 points".into()));
    }
    let per_n: Vec<(SweepRecord, Vec<SweepRecord>)> =
        ns.par_iter().map(|&n| optimize_lambda(n, p, opts)).collect::<Result<_>>()?;
    let mut optimum = Vec::new();
    let mut grid = Vec::new();
    for (best, coarse) in per_n {
        optimum.push(best);
        grid.extend(coarse);
    }
    let mut violations = Vec::new();
    for r in optimum.iter().chain(grid.iter()) {
        if let Some(v) = r.violation() {
            violations.push(format!("N={} lambda={:e}: {v}", r.n, r.lambda));
        }
    }
    let exponent = if optimum.len() >= 3 {
        let xs: Vec<f64> = optimum.iter().map(|r| r.n as f64).collect();
        let ys: Vec<f64> = optimum.iter().map(|r| r.precision_inv).collect();
        if ys.iter().all(|y| *y > 0.0) {
            log_log_slope(&xs, &ys)
        } else {
            None
        }
    } else {
        None
    };
    Ok(SweepOutcome { optimum, grid, exponent, violations })
}

fn optimize_lambda(n: usize, p: f64, opts: &SweepOptions) -> Result<(SweepRecord, Vec<SweepRecord>)> {
    let lambdas = lambda_grid(n, opts.coarse_points, opts.lambda_range.0, opts.lambda_range.1);
    let coarse: Vec<SweepRecord> =
        lambdas.iter().map(|&l| evaluate_noisy_squeezed(n, p, l, false)).collect::<Result<_>>()?;
    let best = (0..coarse.len())
        .max_by(|&a, &b| coarse[a].precision_inv.total_cmp(&coarse[b].precision_inv).then(b.cmp(&a)))
        .expect("grid is not empty");
    let f = |x: f64| -> Result<f64> { Ok(evaluate_noisy_squeezed(n, p, x.exp(), false)?.precision_inv) };
    let mut a = lambdas[best.saturating_sub(1)].ln();
    let mut b = lambdas[(best + 1).min(lambdas.len() - 1)].ln();
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut steps = 0;
    while b - a > opts.golden_tol && steps < opts.max_golden_steps {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
        steps += 1;
    }
    let x = if fc >= fd { c } else { d };
    let fx = fc.max(fd);
    let lambda = if fx > coarse[best].precision_inv { x.exp() } else { lambdas[best] };
    let best_record = evaluate_noisy_squeezed(n, p, lambda, true)?;
    Ok((best_record, coarse))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrbReport {
    pub id: String,
    pub delta_theta_sq: Option<f64>,
    pub qfi: f64,
    /// `1/F_Q`.
    pub bound: f64,
    /// `(Δθ)² − 1/F_Q`.
    pub gap: f64,
    pub holds: bool,
}

/// Compares error propagation with the quantum Cramér–Rao bound.
pub fn crb_consistency(s: &Scenario) -> Result<CrbReport> {
    let e = error_propagation(s)?;
    let f = qfi(&s.probe, &s.generator)?.value;
    let bound = if f > 0.0 { 1.0 / f } else { f64::INFINITY };
    let (gap, holds) = match e.delta_theta_sq {
        Some(d) => (d - bound, d >= bound - 1e-8 || (bound.is_infinite() && d.is_infinite())),
        None => (f64::INFINITY, true),
    };
    Ok(CrbReport { id: s.id.clone(), delta_theta_sq: e.delta_theta_sq, qfi: f, bound, gap, holds })
}
