//! Spin-squeezing parameters, moment-based entanglement criteria and
//! Fisher-information bounds on entanglement depth.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fisher::{fisher_matrix, qfi};
use crate::numerics::{CMatrix, TOL};
use crate::spin::{build_collective, Axis, CollectiveOperator, Representation};
use crate::states::{Payload, QuantumState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    SatisfiedBoundary,
    Violated,
    Inapplicable,
}

impl Verdict {
    pub fn is_violated(self) -> bool {
        self == Verdict::Violated
    }
}

/// Direction in which a separable state must sit relative to the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    AtLeast,
    AtMost,
}

pub fn verdict(value: f64, threshold: f64, sense: Sense) -> Verdict {
    let margin = match sense {
        Sense::AtLeast => value - threshold,
        Sense::AtMost => threshold - value,
    };
    if margin < -TOL.verdict {
        Verdict::Violated
    } else if margin <= TOL.verdict {
        Verdict::SatisfiedBoundary
    } else {
        Verdict::Satisfied
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub id: String,
    pub value: Option<f64>,
    pub threshold: f64,
    pub sense: Sense,
    pub verdict: Verdict,
    pub certified_depth: Option<usize>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl WitnessReport {
    pub fn evaluate(id: impl Into<String>, value: f64, threshold: f64, sense: Sense) -> Self {
        let v = verdict(value, threshold, sense);
        WitnessReport {
            id: id.into(),
            value: Some(value),
            threshold,
            sense,
            verdict: v,
            certified_depth: if v.is_violated() { Some(2) } else { None },
            extras: BTreeMap::new(),
            note: None,
        }
    }

    pub fn inapplicable(id: impl Into<String>, threshold: f64, sense: Sense, note: impl Into<String>) -> Self {
        WitnessReport {
            id: id.into(),
            value: None,
            threshold,
            sense,
            verdict: Verdict::Inapplicable,
            certified_depth: None,
            extras: BTreeMap::new(),
            note: Some(note.into()),
        }
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }
}

/// First moments `⟨J_l⟩` and symmetrized second moments `⟨{J_k, J_l}⟩/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSet {
    pub n: usize,
    pub mean: [f64; 3],
    pub second: [[f64; 3]; 3],
}

impl MomentSet {
    pub fn mean(&self, a: Axis) -> f64 {
        self.mean[a.index()]
    }

    pub fn second(&self, a: Axis) -> f64 {
        self.second[a.index()][a.index()]
    }

    pub fn var(&self, a: Axis) -> f64 {
        self.second(a) - self.mean(a) * self.mean(a)
    }

    pub fn total_second(&self) -> f64 {
        Axis::ALL.iter().map(|&a| self.second(a)).sum()
    }

    pub fn total_variance(&self) -> f64 {
        Axis::ALL.iter().map(|&a| self.var(a)).sum()
    }

    pub fn n_f(&self) -> f64 {
        self.n as f64
    }

    /// Covariance matrix `⟨{J_k, J_l}⟩/2 − ⟨J_k⟩⟨J_l⟩`.
    pub fn covariance(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|k, l| self.second[k][l] - self.mean[k] * self.mean[l])
    }

    /// Checks positivity of the second-moment matrix and the Casimir bound.
    pub fn validate(&self) -> Result<()> {
        let m = Matrix3::from_fn(|k, l| self.second[k][l]);
        let min = SymmetricEigen::new(m).eigenvalues.min();
        if min < -1e-9 {
            return Err(Error::Unphysical(format!("second-moment matrix has eigenvalue {min:e}")));
        }
        let n = self.n_f();
        let casimir = self.total_second();
        if casimir > n * (n + 2.0) / 4.0 + 1e-9 {
            return Err(Error::Unphysical(format!(
                "<Jx^2+Jy^2+Jz^2> = {casimir} exceeds N(N+2)/4 = {}",
                n * (n + 2.0) / 4.0
            )));
        }
        Ok(())
    }

    /// Moments reconstructed from the average two-particle density matrix.
    pub fn from_two_particle(rho2: &CMatrix, n: usize) -> Result<Self> {
        if rho2.nrows() != 4 || rho2.ncols() != 4 {
            return Err(Error::DimensionMismatch { left: rho2.nrows(), right: 4 });
        }
        let paulis = [crate::numerics::pauli_x(), crate::numerics::pauli_y(), crate::numerics::pauli_z()];
        let id = CMatrix::identity(2, 2);
        let nf = n as f64;
        let mut mean = [0.0; 3];
        let mut second = [[0.0; 3]; 3];
        for k in 0..3 {
            let single = crate::numerics::kron(&paulis[k], &id).scale(0.5);
            mean[k] = nf * crate::numerics::expect_mat(rho2, &single);
            for l in 0..3 {
                let pair = crate::numerics::kron(&paulis[k], &paulis[l]).scale(0.25);
                let corr = crate::numerics::expect_mat(rho2, &pair);
                let same = if k == l { nf / 4.0 } else { 0.0 };
                second[k][l] = same + nf * (nf - 1.0) * corr;
            }
        }
        // symmetrize ⟨J_kJ_l⟩ for k ≠ l: the single-site terms contribute i ε_klm ⟨J_m⟩/2, which cancels
        for k in 0..3 {
            for l in (k + 1)..3 {
                let s = 0.5 * (second[k][l] + second[l][k]);
                second[k][l] = s;
                second[l][k] = s;
            }
        }
        Ok(MomentSet { n, mean, second })
    }
}

/// Collective first and second moments of a state.
pub fn moments(state: &QuantumState) -> Result<MomentSet> {
    let rep = state.rep();
    let ops: Vec<CollectiveOperator> = Axis::ALL.iter().map(|&a| build_collective(a, rep)).collect::<Result<_>>()?;
    let mut mean = [0.0; 3];
    let mut second = [[0.0; 3]; 3];
    for k in 0..3 {
        mean[k] = state.expect(&ops[k]);
        for l in k..3 {
            let v = state.symmetrized_moment(&ops[k], &ops[l]);
            second[k][l] = v;
            second[l][k] = v;
        }
    }
    Ok(MomentSet { n: state.n(), mean, second })
}

/// `ξ_s² = N Var(J_a) / (⟨J_b⟩² + ⟨J_c⟩²)` with `b, c` the axes orthogonal to `a`.
pub fn xi_squared_s(m: &MomentSet, squeezed: Axis) -> WitnessReport {
    let (b, c) = squeezed.others();
    let id = format!("xi_s[{squeezed}]");
    let denom = m.mean(b).powi(2) + m.mean(c).powi(2);
    if denom <= 1e-12 {
        return WitnessReport::inapplicable(id, 1.0, Sense::AtLeast, "mean spin orthogonal to the squeezed axis vanishes");
    }
    WitnessReport::evaluate(id, m.n_f() * m.var(squeezed) / denom, 1.0, Sense::AtLeast)
}

/// `ξ_os² = (N − 1) Var(J_a) / (⟨J_b²⟩ + ⟨J_c²⟩ − N/2)`.
pub fn xi_squared_os(m: &MomentSet, squeezed: Axis) -> WitnessReport {
    let (b, c) = squeezed.others();
    let id = format!("xi_os[{squeezed}]");
    let denom = m.second(b) + m.second(c) - m.n_f() / 2.0;
    if denom <= 1e-12 {
        return WitnessReport::inapplicable(id, 1.0, Sense::AtLeast, "denominator <Jb^2>+<Jc^2>-N/2 is not positive");
    }
    WitnessReport::evaluate(id, (m.n_f() - 1.0) * m.var(squeezed) / denom, 1.0, Sense::AtLeast)
}

/// `ξ_singlet² = Σ_l Var(J_l) / (N/2)`; `N ξ²` bounds the number of unentangled spins.
pub fn xi_squared_singlet(m: &MomentSet) -> WitnessReport {
    let value = m.total_variance() / (m.n_f() / 2.0);
    WitnessReport::evaluate("xi_singlet", value, 1.0, Sense::AtLeast).with_extra("non_entangled_bound", m.n_f() * value)
}

/// The squeezing parameter with the smallest value over the three axes.
pub fn best_over_axes(f: impl Fn(Axis) -> WitnessReport, id: &str) -> WitnessReport {
    let reports: Vec<WitnessReport> = Axis::ALL.iter().map(|&a| f(a)).collect();
    let best = reports
        .iter()
        .enumerate()
        .filter(|(_, r)| r.value.is_some())
        .min_by(|a, b| a.1.value.unwrap().total_cmp(&b.1.value.unwrap()).then(a.0.cmp(&b.0)));
    match best {
        Some((i, r)) => {
            let mut out = r.clone();
            out.id = id.to_string();
            out.extras.insert("axis".into(), i as f64);
            out
        }
        None => {
            let mut out = reports[0].clone();
            out.id = id.to_string();
            out
        }
    }
}

/// The four optimal spin-squeezing inequalities, each at its worst-case axis assignment.
///
/// Inequality (a) holds for every quantum state, so its violation means the
/// moments are unphysical and is returned as an error.
pub fn optimal_ssi(m: &MomentSet) -> Result<Vec<WitnessReport>> {
    let n = m.n_f();
    let casimir = m.total_second();
    let bound_a = n * (n + 2.0) / 4.0;
    if casimir > bound_a + 1e-8 {
        return Err(Error::Unphysical(format!("<Jx^2+Jy^2+Jz^2> = {casimir} exceeds N(N+2)/4 = {bound_a}")));
    }
    let a = WitnessReport::evaluate("ossi_a", casimir, bound_a, Sense::AtMost);
    let b = WitnessReport::evaluate("ossi_b", m.total_variance(), n / 2.0, Sense::AtLeast);
    // (c): ⟨J_k²⟩ + ⟨J_l²⟩ − N/2 ≤ (N − 1) Var(J_m); (d): (N − 1)[Var(J_k) + Var(J_l)] ≥ ⟨J_m²⟩ + N(N − 2)/4
    let mut worst_c = (f64::INFINITY, 0usize);
    let mut worst_d = (f64::INFINITY, 0usize);
    for ax in Axis::ALL {
        let (k, l) = ax.others();
        let c_margin = (n - 1.0) * m.var(ax) - (m.second(k) + m.second(l) - n / 2.0);
        let d_margin = (n - 1.0) * (m.var(k) + m.var(l)) - (m.second(ax) + n * (n - 2.0) / 4.0);
        if c_margin < worst_c.0 {
            worst_c = (c_margin, ax.index());
        }
        if d_margin < worst_d.0 {
            worst_d = (d_margin, ax.index());
        }
    }
    let c = WitnessReport::evaluate("ossi_c", worst_c.0, 0.0, Sense::AtLeast).with_extra("axis_m", worst_c.1 as f64);
    let d = WitnessReport::evaluate("ossi_d", worst_d.0, 0.0, Sense::AtLeast).with_extra("axis_m", worst_d.1 as f64);
    Ok(vec![a, b, c, d])
}

/// `sk² + (N − sk)²` with `s = ⌊N/k⌋`, the single-generator bound for k-producible states.
pub fn k_producible_bound(n: usize, k: usize) -> f64 {
    assert!(k >= 1 && k <= n.max(1));
    let s = n / k;
    let rest = n - s * k;
    (s * k * k + rest * rest) as f64
}

/// Average-QFI bound for k-producible states.
pub fn k_producible_avg_bound(n: usize, k: usize) -> f64 {
    assert!(k >= 1 && k <= n.max(1));
    let nf = n as f64;
    if k == 1 {
        return 2.0 * nf / 3.0;
    }
    let s = n / k;
    let rest = n - s * k;
    let head = (s * k * (k + 2)) as f64 / 3.0;
    if rest == 1 {
        head + 2.0 / 3.0
    } else {
        head + (rest * (rest + 2)) as f64 / 3.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DepthCertificate {
    /// Smallest `k` whose k-producible bound is consistent with the value; the
    /// state contains at least `k`-particle entanglement.
    pub depth: usize,
    /// Value exceeds the biseparable bound `(N − 1)² + 1`.
    pub genuine: bool,
}

/// Entanglement depth certified by a single-generator QFI value.
pub fn depth_certificate(fq: f64, n: usize) -> Result<DepthCertificate> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    let nf = n as f64;
    if fq > nf * nf + 1e-6 || fq.is_nan() {
        return Err(Error::Unphysical(format!("F_Q = {fq} exceeds N^2 = {}", nf * nf)));
    }
    if fq < -1e-9 {
        return Err(Error::Unphysical(format!("F_Q = {fq} is negative")));
    }
    let depth = (1..=n).find(|&k| fq <= k_producible_bound(n, k) + TOL.verdict).unwrap_or(n);
    let genuine = n >= 2 && fq > (nf - 1.0).powi(2) + 1.0 + TOL.verdict;
    Ok(DepthCertificate { depth, genuine })
}

/// Depth certified by the average QFI over the three axes.
pub fn avg_depth_certificate(avg: f64, n: usize) -> usize {
    (1..=n).find(|&k| avg <= k_producible_avg_bound(n, k) + TOL.verdict).unwrap_or(n)
}

/// `F_Q > N` certifies entanglement; values above `N²` are unphysical.
pub fn qfi_entanglement(fq: f64, n: usize) -> Result<WitnessReport> {
    let cert = depth_certificate(fq, n)?;
    let mut r = WitnessReport::evaluate("qfi_separable", fq, n as f64, Sense::AtMost);
    r.certified_depth = if cert.depth >= 2 { Some(cert.depth) } else { None };
    let r = r
        .with_extra("heisenberg_bound", (n * n) as f64)
        .with_extra("biseparable_bound", ((n - 1) * (n - 1) + 1) as f64)
        .with_extra("genuine_multipartite", if cert.genuine { 1.0 } else { 0.0 });
    Ok(r)
}

/// Largest `F_Q[ϱ, J_l]` over the three axes, evaluated as an entanglement witness.
pub fn qfi_entanglement_state(state: &QuantumState) -> Result<WitnessReport> {
    let mut best = (f64::NEG_INFINITY, 0usize);
    for a in Axis::ALL {
        let f = qfi(state, &build_collective(a, state.rep())?)?.value;
        if f > best.0 {
            best = (f, a.index());
        }
    }
    Ok(qfi_entanglement(best.0, state.n())?.with_extra("axis", best.1 as f64))
}

/// `χ² = N / F_Q`.
pub fn chi_squared(state: &QuantumState, op: &CollectiveOperator) -> Result<f64> {
    let f = qfi(state, op)?.value;
    Ok(if f <= 0.0 { f64::INFINITY } else { state.n() as f64 / f })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AvgQfiReport {
    pub value: f64,
    pub per_axis: [f64; 3],
    pub separable_bound: f64,
    pub biseparable_bound: f64,
    pub max_bound: f64,
    /// `(k, bound)` for k-producible states.
    pub k_producible: Vec<(usize, f64)>,
    /// `(4/3)(⟨J²⟩ − |⟨J⟩|²)`.
    pub spin_length_bound: f64,
    pub certified_depth: usize,
}

/// `⅓ Σ_l F_Q[ϱ, J_l]` with the separable, biseparable and k-producible bounds.
pub fn avg_qfi(state: &QuantumState) -> Result<AvgQfiReport> {
    let rep = state.rep();
    let mut per_axis = [0.0; 3];
    for a in Axis::ALL {
        per_axis[a.index()] = qfi(state, &build_collective(a, rep)?)?.value;
    }
    let value = per_axis.iter().sum::<f64>() / 3.0;
    let n = state.n();
    let nf = n as f64;
    let m = moments(state)?;
    let mean2: f64 = m.mean.iter().map(|x| x * x).sum();
    Ok(AvgQfiReport {
        value,
        per_axis,
        separable_bound: 2.0 * nf / 3.0,
        biseparable_bound: (nf * nf + 1.0) / 3.0,
        max_bound: nf * (nf + 2.0) / 3.0,
        k_producible: (1..=n).map(|k| (k, k_producible_avg_bound(n, k))).collect(),
        spin_length_bound: 4.0 * (m.total_second() - mean2) / 3.0,
        certified_depth: avg_depth_certificate(value, n),
    })
}

impl AvgQfiReport {
    pub fn witness(&self, n: usize) -> WitnessReport {
        let mut r = WitnessReport::evaluate("avg_qfi_separable", self.value, self.separable_bound, Sense::AtMost);
        r.certified_depth = if self.certified_depth >= 2 { Some(self.certified_depth) } else { None };
        let genuine = n >= 2 && self.value > self.biseparable_bound + TOL.verdict;
        r.with_extra("biseparable_bound", self.biseparable_bound)
            .with_extra("max_bound", self.max_bound)
            .with_extra("spin_length_bound", self.spin_length_bound)
            .with_extra("genuine_multipartite", if genuine { 1.0 } else { 0.0 })
    }
}

/// Directions on a golden-angle spiral covering the sphere.
pub fn golden_spiral(count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Macroscopicity {
    pub n_eff: f64,
    pub direction: [f64; 3],
    /// Best value on the direction grid before refinement.
    pub grid_max: f64,
    pub grid_index: usize,
}

pub const DEFAULT_DIRECTION_GRID: usize = 256;

/// `N_eff = max_n F_Q[ϱ, 2J_n] / 4N` over uniform collective directions.
///
/// `F_Q[ϱ, J_n] = nᵀ F n` with `F` the Fisher matrix of `(J_x, J_y, J_z)`, so
/// the grid scan works on the 3×3 quadratic form. The grid maximum is refined
/// to the top eigenvector of `F`.
pub fn macroscopicity(state: &QuantumState, grid: usize) -> Result<Macroscopicity> {
    let rep = state.rep();
    let ops: Vec<CollectiveOperator> = Axis::ALL.iter().map(|&a| build_collective(a, rep)).collect::<Result<_>>()?;
    let refs: Vec<&CollectiveOperator> = ops.iter().collect();
    let f = fisher_matrix(state, &refs)?.matrix;
    let f3 = Matrix3::from_fn(|i, j| f[(i, j)]);
    let quad = |n: &[f64; 3]| {
        let v = Vector3::new(n[0], n[1], n[2]);
        (v.transpose() * f3 * v)[(0, 0)]
    };
    let dirs = golden_spiral(grid.max(1));
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (i, d) in dirs.iter().enumerate() {
        let v = quad(d);
        if v > best.0 {
            best = (v, i);
        }
    }
    let eig = SymmetricEigen::new(f3);
    let top = eig.eigenvalues.imax();
    let mut direction = dirs[best.1];
    let mut value = best.0;
    if eig.eigenvalues[top] > value {
        let v = eig.eigenvectors.column(top);
        // keep the hemisphere of the grid point
        let sign = if v[0] * direction[0] + v[1] * direction[1] + v[2] * direction[2] < 0.0 { -1.0 } else { 1.0 };
        direction = [sign * v[0], sign * v[1], sign * v[2]];
        value = eig.eigenvalues[top];
    }
    let n = state.n() as f64;
    // F_Q[2J_n]/4N = F_Q[J_n]/N
    Ok(Macroscopicity { n_eff: value / n, direction, grid_max: best.0 / n, grid_index: best.1 })
}

/// `max_n Var(2 J_n)` over collective directions for a pure state.
pub fn max_collective_variance(state: &QuantumState) -> Result<f64> {
    if !state.is_pure() {
        return Err(Error::NotPure);
    }
    let cov = moments(state)?.covariance();
    Ok(4.0 * SymmetricEigen::new(cov).eigenvalues.max())
}

/// Log–log slope of the maximal collective variance over a family of pure states.
pub fn pure_state_index(family: &dyn Fn(usize) -> Result<QuantumState>, ns: &[usize]) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &n in ns {
        xs.push(n as f64);
        ys.push(max_collective_variance(&family(n)?)?);
    }
    crate::numerics::log_log_slope(&xs, &ys)
        .ok_or_else(|| Error::InvalidParameter("index fit needs at least two distinct sizes".into()))
}

/// `(1/N(N−1)) Σ_{m≠n} ϱ_mn`, the average two-particle reduced state.
pub fn avg_two_particle_dm(state: &QuantumState) -> Result<CMatrix> {
    let n = match state.rep() {
        Representation::Full(n) => n,
        Representation::Symmetric(_) => {
            return Err(Error::Unsupported("average two-particle state needs the full representation".into()))
        }
    };
    if n < 2 {
        return Err(Error::InvalidParameter("average two-particle state needs N >= 2".into()));
    }
    if n > 10 {
        return Err(Error::SizeLimit { what: "qubits for the average two-particle state", n, limit: 10 });
    }
    let dim = 1usize << n;
    let mut acc = CMatrix::zeros(4, 4);
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let ma = 1usize << (n - 1 - a);
            let mb = 1usize << (n - 1 - b);
            let index = |r: usize, i: usize| -> usize {
                let mut x = r & !(ma | mb);
                if i & 2 != 0 {
                    x |= ma;
                }
                if i & 1 != 0 {
                    x |= mb;
                }
                x
            };
            for r in 0..dim {
                if r & (ma | mb) != 0 {
                    continue;
                }
                for i in 0..4 {
                    for j in 0..4 {
                        let (x, y) = (index(r, i), index(r, j));
                        acc[(i, j)] += match state.payload() {
                            Payload::Pure(v) => v[x] * v[y].conj(),
                            Payload::Density(m) => m[(x, y)],
                        };
                    }
                }
            }
        }
    }
    Ok(acc.unscale((n * (n - 1)) as f64))
}

/// Every witness applicable to a state, in a fixed order.
pub fn all_witnesses(state: &QuantumState) -> Result<Vec<WitnessReport>> {
    let m = moments(state)?;
    let mut out = vec![
        best_over_axes(|a| xi_squared_s(&m, a), "xi_s"),
        best_over_axes(|a| xi_squared_os(&m, a), "xi_os"),
        xi_squared_singlet(&m),
    ];
    out.extend(optimal_ssi(&m)?);
    out.push(qfi_entanglement_state(state)?);
    out.push(avg_qfi(state)?.witness(state.n()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::states::{dicke, ghz, maximally_mixed, polarized, random_product_state, singlet_pi};

    fn sym(n: usize) -> Representation {
        Representation::Symmetric(n)
    }

    #[test]
    fn moment_examples() {
        let m = moments(&polarized(4, Axis::Z, sym(4)).unwrap()).unwrap();
        assert!((m.mean(Axis::Z) - 2.0).abs() < 1e-12);
        assert!((m.var(Axis::X) - 1.0).abs() < 1e-12);
        m.validate().unwrap();
        let s = moments(&singlet_pi(4).unwrap()).unwrap();
        assert!(s.mean.iter().chain(s.second.iter().flatten()).all(|x| x.abs() < 1e-9));
        let d = moments(&dicke(4, 2, sym(4)).unwrap()).unwrap();
        assert!((d.second(Axis::X) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn xi_s_cases() {
        let m = moments(&polarized(6, Axis::Z, sym(6)).unwrap()).unwrap();
        let r = xi_squared_s(&m, Axis::X);
        assert!((r.value.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::SatisfiedBoundary);
        let g = moments(&ghz(6, Axis::Z, sym(6)).unwrap()).unwrap();
        assert_eq!(xi_squared_s(&g, Axis::X).verdict, Verdict::Inapplicable);
    }

    #[test]
    fn xi_os_and_singlet_cases() {
        let d = moments(&dicke(4, 2, sym(4)).unwrap()).unwrap();
        let r = xi_squared_os(&d, Axis::Z);
        assert!(r.value.unwrap().abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Violated);
        let p = moments(&polarized(6, Axis::Z, sym(6)).unwrap()).unwrap();
        assert!(xi_squared_os(&p, Axis::X).value.unwrap() >= 1.0 - 1e-12);
        let mm = moments(&maximally_mixed(Representation::Full(4)).unwrap()).unwrap();
        assert_ne!(xi_squared_os(&mm, Axis::X).verdict, Verdict::Violated);
        let sr = xi_squared_singlet(&moments(&singlet_pi(4).unwrap()).unwrap());
        assert!(sr.value.unwrap().abs() < 1e-9);
        assert_eq!(sr.verdict, Verdict::Violated);
        let pr = xi_squared_singlet(&p);
        assert!((pr.value.unwrap() - 1.0).abs() < 1e-12);
        let mr = xi_squared_singlet(&mm);
        assert!((mr.value.unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(mr.verdict, Verdict::Satisfied);
    }

    #[test]
    fn optimal_ssi_cases() {
        let s = optimal_ssi(&moments(&singlet_pi(4).unwrap()).unwrap()).unwrap();
        assert_eq!(s[1].verdict, Verdict::Violated);
        let n = 6.0;
        let p = optimal_ssi(&moments(&polarized(6, Axis::Z, sym(6)).unwrap()).unwrap()).unwrap();
        assert!(p.iter().all(|r| r.verdict != Verdict::Violated));
        assert_eq!(p[3].verdict, Verdict::SatisfiedBoundary);
        assert!((p[0].value.unwrap() - n * (n + 2.0) / 4.0).abs() < 1e-12);
        let d = optimal_ssi(&moments(&dicke(6, 3, sym(6)).unwrap()).unwrap()).unwrap();
        assert_eq!(d[2].verdict, Verdict::Violated);
        assert_eq!(d[2].extras["axis_m"], 2.0);
        let mut bad = moments(&polarized(4, Axis::Z, sym(4)).unwrap()).unwrap();
        bad.second[0][0] += 1.0;
        assert!(matches!(optimal_ssi(&bad), Err(Error::Unphysical(_))));
        assert!(bad.validate().is_err());
    }

    #[test]
    fn depth_examples() {
        let c = depth_certificate(64.0, 8).unwrap();
        assert_eq!(c.depth, 8);
        assert!(c.genuine);
        assert_eq!(depth_certificate(12.0, 6).unwrap().depth, 2);
        assert_eq!(depth_certificate(6.0, 6).unwrap().depth, 1);
        assert!(depth_certificate(65.0, 8).is_err());
        assert_eq!(k_producible_bound(8, 7), 50.0);
    }

    #[test]
    fn avg_bounds_monotone_and_consistent() {
        for n in 2..=12usize {
            for k in 1..n {
                assert!(k_producible_avg_bound(n, k) <= k_producible_avg_bound(n, k + 1) + 1e-12);
                assert!(k_producible_bound(n, k) <= k_producible_bound(n, k + 1));
            }
            let nf = n as f64;
            assert!((k_producible_avg_bound(n, n) - nf * (nf + 2.0) / 3.0).abs() < 1e-12);
            assert!((k_producible_avg_bound(n, n - 1) - (nf * nf + 1.0) / 3.0).abs() < 1e-12 || n == 2);
        }
    }

    #[test]
    fn qfi_witness_cases() {
        let r = qfi_entanglement(16.0, 4).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.certified_depth, Some(4));
        let mm = qfi_entanglement_state(&maximally_mixed(Representation::Full(3)).unwrap()).unwrap();
        assert_eq!(mm.verdict, Verdict::Satisfied);
        assert!(qfi_entanglement(17.0, 4).is_err());
    }

    #[test]
    fn avg_qfi_saturation() {
        for n in [2usize, 4, 6] {
            let nf = n as f64;
            let d = avg_qfi(&dicke(n, n / 2, sym(n)).unwrap()).unwrap();
            assert!((d.value - nf * (nf + 2.0) / 3.0).abs() < 1e-8);
            assert!(d.value <= d.spin_length_bound + 1e-9);
            let g = avg_qfi(&ghz(n, Axis::Z, sym(n)).unwrap()).unwrap();
            assert!((g.value - (nf * nf + 2.0 * nf) / 3.0).abs() < 1e-8);
        }
        let mm = avg_qfi(&maximally_mixed(Representation::Full(3)).unwrap()).unwrap();
        assert!(mm.value.abs() < 1e-12);
    }

    #[test]
    fn chi_squared_cases() {
        let g = ghz(5, Axis::X, sym(5)).unwrap();
        assert!((chi_squared(&g, &build_collective(Axis::X, sym(5)).unwrap()).unwrap() - 0.2).abs() < 1e-12);
        let p = polarized(5, Axis::Z, sym(5)).unwrap();
        assert!((chi_squared(&p, &build_collective(Axis::Y, sym(5)).unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn macroscopicity_cases() {
        for n in [3usize, 6] {
            let g = macroscopicity(&ghz(n, Axis::Z, sym(n)).unwrap(), DEFAULT_DIRECTION_GRID).unwrap();
            assert!((g.n_eff - n as f64).abs() < 1e-9);
            let p = macroscopicity(&polarized(n, Axis::Z, sym(n)).unwrap(), DEFAULT_DIRECTION_GRID).unwrap();
            assert!((p.n_eff - 1.0).abs() < 1e-9);
        }
        let mm = macroscopicity(&maximally_mixed(sym(4)).unwrap(), DEFAULT_DIRECTION_GRID).unwrap();
        assert!(mm.n_eff.abs() < 1e-12);
        let spiral = golden_spiral(256);
        assert!(spiral.iter().all(|d| ((d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) - 1.0).abs() < 1e-12));
    }

    #[test]
    fn pure_state_index_of_families() {
        let ghz_family = |n: usize| ghz(n, Axis::Z, sym(n));
        let p = pure_state_index(&ghz_family, &[4, 8, 16, 32]).unwrap();
        assert!((p - 2.0).abs() < 1e-9);
        let prod = |n: usize| polarized(n, Axis::Z, sym(n));
        assert!((pure_state_index(&prod, &[4, 8, 16, 32]).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_particle_state() {
        let p = polarized(4, Axis::Z, Representation::Full(4)).unwrap();
        let r = avg_two_particle_dm(&p).unwrap();
        assert!((r[(0, 0)].re - 1.0).abs() < 1e-14);
        let s = avg_two_particle_dm(&singlet_pi(2).unwrap()).unwrap();
        assert!((s[(1, 1)].re - 0.5).abs() < 1e-14 && (s[(1, 2)].re + 0.5).abs() < 1e-14);
        let mut rng = random::rng(4);
        let sym_state = QuantumState::density(sym(5), random::density(6, 3, &mut rng), "pi").unwrap();
        let full = sym_state.to_full().unwrap();
        let direct = moments(&full).unwrap();
        let rebuilt = MomentSet::from_two_particle(&avg_two_particle_dm(&full).unwrap(), 5).unwrap();
        for a in Axis::ALL {
            let x = xi_squared_s(&direct, a).value.unwrap();
            let y = xi_squared_s(&rebuilt, a).value.unwrap();
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn product_states_never_violate() {
        let mut rng = random::rng(99);
        for i in 0..30 {
            let n = 2 + i % 5;
            let s = random_product_state(n, &mut rng).unwrap();
            for r in all_witnesses(&s).unwrap() {
                assert_ne!(r.verdict, Verdict::Violated, "{} on N={n}", r.id);
            }
        }
    }
}
