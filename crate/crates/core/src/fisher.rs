//! Quantum and classical Fisher information and the quantities derived from it.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    check_hermitian, hermitian_eigendecompose, max_abs, outer, psd_sqrt, CMatrix, CVector, C64, I, TOL,
};
use crate::random;
use crate::spin::{rotate, CollectiveOperator};
use crate::states::QuantumState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QfiResult {
    pub value: f64,
    /// Number of ordered eigenvalue pairs dropped because `λ_k + λ_l < 1e-12`.
    pub skipped_pairs: usize,
}

/// Eigenvalues (negative round-off clamped to zero) and eigenvectors of a state.
#[derive(Debug, Clone)]
pub struct StateSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl StateSpectrum {
    pub fn of(state: &QuantumState) -> Result<Self> {
        Self::of_matrix(&state.density_matrix())
    }

    pub fn of_matrix(rho: &CMatrix) -> Result<Self> {
        let spec = hermitian_eigendecompose(rho)?;
        if spec.eigenvalues[0] < -TOL.psd {
            return Err(Error::NotPsd { min_eigenvalue: spec.eigenvalues[0] });
        }
        Ok(StateSpectrum {
            eigenvalues: spec.eigenvalues.iter().map(|&l| l.max(0.0)).collect(),
            eigenvectors: spec.eigenvectors,
        })
    }

    /// `⟨k|A|l⟩` for a collective operator.
    pub fn transform(&self, op: &CollectiveOperator) -> CMatrix {
        self.eigenvectors.adjoint() * op.apply_mat(&self.eigenvectors)
    }

    pub fn transform_dense(&self, a: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * (a * &self.eigenvectors)
    }
}

/// `2(λ_k − λ_l)²/(λ_k + λ_l)`, or `None` for a skipped pair.
fn qfi_weight(lk: f64, ll: f64) -> Option<f64> {
    let s = lk + ll;
    if s < TOL.support {
        None
    } else {
        Some(2.0 * (lk - ll) * (lk - ll) / s)
    }
}

/// Eigenbasis form of the quantum Fisher information.
pub fn qfi_from_spectrum(eigenvalues: &[f64], a: &CMatrix) -> QfiResult {
    let d = eigenvalues.len();
    let mut value = 0.0;
    let mut skipped = 0;
    for k in 0..d {
        for l in 0..d {
            match qfi_weight(eigenvalues[k], eigenvalues[l]) {
                Some(w) => value += w * a[(k, l)].norm_sqr(),
                None => skipped += 1,
            }
        }
    }
    QfiResult { value: value.max(0.0), skipped_pairs: skipped }
}

/// Quantum Fisher information of `ϱ` for the unitary family generated by `A`.
pub fn qfi(state: &QuantumState, op: &CollectiveOperator) -> Result<QfiResult> {
    state.rep().ensure_same(op.rep())?;
    if state.is_pure() {
        let d = state.dim();
        return Ok(QfiResult { value: (4.0 * state.variance(op)).max(0.0), skipped_pairs: (d - 1) * (d - 1) });
    }
    let spec = StateSpectrum::of(state)?;
    Ok(qfi_from_spectrum(&spec.eigenvalues, &spec.transform(op)))
}

/// Quantum Fisher information for plain matrices of any dimension.
pub fn qfi_matrices(rho: &CMatrix, a: &CMatrix) -> Result<QfiResult> {
    check_hermitian(a)?;
    if rho.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch { left: rho.nrows(), right: a.nrows() });
    }
    let spec = StateSpectrum::of_matrix(rho)?;
    Ok(qfi_from_spectrum(&spec.eigenvalues, &spec.transform_dense(a)))
}

/// `4 Var(A)` for a pure state.
pub fn qfi_pure(state: &QuantumState, op: &CollectiveOperator) -> Result<f64> {
    state.rep().ensure_same(op.rep())?;
    if !state.is_pure() {
        return Err(Error::NotPure);
    }
    Ok((4.0 * state.variance(op)).max(0.0))
}

/// `4⟨A²⟩ − 8 Σ λ_kλ_l/(λ_k+λ_l) |⟨k|A|l⟩|²`.
pub fn qfi_alternative(state: &QuantumState, op: &CollectiveOperator) -> Result<f64> {
    state.rep().ensure_same(op.rep())?;
    let spec = StateSpectrum::of(state)?;
    let a = spec.transform(op);
    let lam = &spec.eigenvalues;
    let d = lam.len();
    let mut second = 0.0;
    let mut cross = 0.0;
    for k in 0..d {
        for l in 0..d {
            let n2 = a[(k, l)].norm_sqr();
            second += lam[k] * n2;
            let s = lam[k] + lam[l];
            if s >= TOL.support {
                cross += lam[k] * lam[l] / s * n2;
            }
        }
    }
    Ok((4.0 * second - 8.0 * cross).max(0.0))
}

/// Symmetric logarithmic derivative for the family `e^{−iθA} ϱ e^{iθA}`.
///
/// Matrix elements between eigenvectors outside the support of `ϱ` are set to zero.
pub fn sld(state: &QuantumState, op: &CollectiveOperator) -> Result<CMatrix> {
    state.rep().ensure_same(op.rep())?;
    if let Some(psi) = state.vector() {
        // 2i[|ψ⟩⟨ψ|, A]
        let apsi = op.apply(psi);
        return Ok((psi * apsi.adjoint() - &apsi * psi.adjoint()) * (I * 2.0));
    }
    let spec = StateSpectrum::of(state)?;
    Ok(sld_from_spectrum(&spec, &spec.transform(op)))
}

pub fn sld_from_spectrum(spec: &StateSpectrum, a: &CMatrix) -> CMatrix {
    let lam = &spec.eigenvalues;
    let d = lam.len();
    let mut l = CMatrix::zeros(d, d);
    for k in 0..d {
        for j in 0..d {
            let s = lam[k] + lam[j];
            if s >= TOL.support {
                l[(k, j)] = a[(k, j)] * I * (2.0 * (lam[k] - lam[j]) / s);
            }
        }
    }
    let v = &spec.eigenvectors;
    v * l * v.adjoint()
}

#[derive(Debug, Clone)]
pub enum PovmElement {
    /// `|v⟩⟨v|`.
    Rank1(CVector),
    Operator(CMatrix),
}

impl PovmElement {
    pub fn probability(&self, state: &QuantumState) -> f64 {
        match (self, state.vector()) {
            (PovmElement::Rank1(v), Some(psi)) => v.dotc(psi).norm_sqr(),
            (PovmElement::Rank1(v), None) => v.dotc(&(state.density_matrix().as_ref() * v)).re,
            (PovmElement::Operator(m), Some(psi)) => psi.dotc(&(m * psi)).re,
            (PovmElement::Operator(m), None) => crate::numerics::trace_product(m, &state.density_matrix()).re,
        }
    }

    pub fn matrix(&self) -> CMatrix {
        match self {
            PovmElement::Rank1(v) => outer(v),
            PovmElement::Operator(m) => m.clone(),
        }
    }
}

/// Positive operator-valued measure; elements sum to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<PovmElement>,
    dim: usize,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let first = elements.first().ok_or_else(|| Error::InvalidParameter("POVM needs at least one element".into()))?;
        let dim = first.nrows();
        let mut sum = CMatrix::zeros(dim, dim);
        for e in &elements {
            if e.nrows() != dim {
                return Err(Error::DimensionMismatch { left: e.nrows(), right: dim });
            }
            let spec = hermitian_eigendecompose(e)?;
            if spec.eigenvalues[0] < -TOL.psd {
                return Err(Error::NotPsd { min_eigenvalue: spec.eigenvalues[0] });
            }
            sum += e;
        }
        let dev = max_abs(&(sum - CMatrix::identity(dim, dim)));
        if dev > 1e-9 {
            return Err(Error::InvalidParameter(format!("POVM elements miss the identity by {dev:e}")));
        }
        Ok(Povm { elements: elements.into_iter().map(PovmElement::Operator).collect(), dim })
    }

    /// Projective measurement in the orthonormal basis given by the columns of `basis`.
    pub fn projective(basis: &CMatrix) -> Result<Self> {
        let dim = basis.nrows();
        if basis.ncols() != dim {
            return Err(Error::NotSquare { rows: dim, cols: basis.ncols() });
        }
        let dev = max_abs(&(basis.adjoint() * basis - CMatrix::identity(dim, dim)));
        if dev > 1e-9 {
            return Err(Error::InvalidParameter(format!("measurement basis is not orthonormal (deviation {dev:e})")));
        }
        Ok(Povm { elements: (0..dim).map(|k| PovmElement::Rank1(basis.column(k).into_owned())).collect(), dim })
    }

    /// Projective measurement in the eigenbasis of a Hermitian observable.
    pub fn eigenbasis(observable: &CMatrix) -> Result<Self> {
        Self::projective(&hermitian_eigendecompose(observable)?.eigenvectors)
    }

    /// The uninformative single-outcome measurement.
    pub fn trivial(dim: usize) -> Self {
        Povm { elements: vec![PovmElement::Operator(CMatrix::identity(dim, dim))], dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn probabilities(&self, state: &QuantumState) -> Result<Vec<f64>> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch { left: state.dim(), right: self.dim });
        }
        Ok(self.elements.iter().map(|e| e.probability(state)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalFisher {
    pub value: f64,
    /// Outcomes with `p < 1e-12` whose derivative exceeds `1e-6`; left out of the sum.
    pub boundary_outcomes: Vec<usize>,
}

pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Classical Fisher information of the outcome distribution `Tr(ϱ_θ Π_x)` at `θ₀`.
///
/// Derivatives are central differences with step `dθ`; for outcomes with
/// `p < 1e-8` a Richardson-extrapolated difference is used.
pub fn classical_fisher(
    family: &dyn Fn(f64) -> Result<QuantumState>,
    povm: &Povm,
    theta0: f64,
    dtheta: f64,
) -> Result<ClassicalFisher> {
    if !(dtheta > 0.0) {
        return Err(Error::InvalidParameter(format!("finite-difference step must be positive, got {dtheta}")));
    }
    let p0 = povm.probabilities(&family(theta0)?)?;
    let pp = povm.probabilities(&family(theta0 + dtheta)?)?;
    let pm = povm.probabilities(&family(theta0 - dtheta)?)?;
    let needs_fine = p0.iter().any(|&p| p < 1e-8);
    let fine = if needs_fine {
        Some((
            povm.probabilities(&family(theta0 + dtheta / 2.0)?)?,
            povm.probabilities(&family(theta0 - dtheta / 2.0)?)?,
        ))
    } else {
        None
    };
    let mut value = 0.0;
    let mut boundary = Vec::new();
    for x in 0..p0.len() {
        let coarse = (pp[x] - pm[x]) / (2.0 * dtheta);
        let deriv = match (&fine, p0[x] < 1e-8) {
            (Some((fp, fm)), true) => {
                let half = (fp[x] - fm[x]) / dtheta;
                (4.0 * half - coarse) / 3.0
            }
            _ => coarse,
        };
        if p0[x] > TOL.support {
            value += deriv * deriv / p0[x];
        } else if deriv.abs() > 1e-6 {
            boundary.push(x);
        }
    }
    Ok(ClassicalFisher { value, boundary_outcomes: boundary })
}

/// `θ ↦ e^{−iθA} ϱ e^{iθA}` as a closure for [`classical_fisher`].
pub fn rotation_family<'a>(
    state: &'a QuantumState,
    op: &'a CollectiveOperator,
) -> impl Fn(f64) -> Result<QuantumState> + 'a {
    move |theta| rotate(state, op, theta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FisherMatrix {
    pub labels: Vec<String>,
    pub matrix: DMatrix<f64>,
}

/// `F_mn = 2 Σ (λ_k − λ_l)²/(λ_k + λ_l) ⟨k|A_m|l⟩⟨l|A_n|k⟩`.
pub fn fisher_matrix(state: &QuantumState, generators: &[&CollectiveOperator]) -> Result<FisherMatrix> {
    if generators.is_empty() {
        return Err(Error::InvalidParameter("Fisher matrix needs at least one generator".into()));
    }
    for g in generators {
        state.rep().ensure_same(g.rep())?;
    }
    let m = generators.len();
    let labels = generators.iter().map(|g| g.provenance().to_string()).collect();
    let mut f = DMatrix::<f64>::zeros(m, m);
    if let Some(psi) = state.vector() {
        // 4 × covariance for pure states
        let applied: Vec<CVector> = generators.iter().map(|g| g.apply(psi)).collect();
        let means: Vec<f64> = applied.iter().map(|a| psi.dotc(a).re).collect();
        for i in 0..m {
            for j in i..m {
                let v = 4.0 * (applied[i].dotc(&applied[j]).re - means[i] * means[j]);
                f[(i, j)] = v;
                f[(j, i)] = v;
            }
        }
        return Ok(FisherMatrix { labels, matrix: f });
    }
    let spec = StateSpectrum::of(state)?;
    let mats: Vec<CMatrix> = generators.iter().map(|g| spec.transform(g)).collect();
    let lam = &spec.eigenvalues;
    let d = lam.len();
    for i in 0..m {
        for j in i..m {
            let mut acc = 0.0;
            for k in 0..d {
                for l in 0..d {
                    if let Some(w) = qfi_weight(lam[k], lam[l]) {
                        acc += w * (mats[i][(k, l)] * mats[j][(k, l)].conj()).re;
                    }
                }
            }
            f[(i, j)] = acc;
            f[(j, i)] = acc;
        }
    }
    Ok(FisherMatrix { labels, matrix: f })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrbMatrix {
    pub covariance_bound: DMatrix<f64>,
    /// Set when the Fisher matrix was singular and a pseudo-inverse was used.
    pub singular: bool,
}

/// Inverse Fisher matrix, the lower bound on the estimator covariance.
pub fn crb_matrix(f: &FisherMatrix) -> CrbMatrix {
    let eig = SymmetricEigen::new(f.matrix.clone());
    let cutoff = 1e-10 * eig.eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs())).max(1e-300);
    let m = f.matrix.nrows();
    let mut inv = DMatrix::<f64>::zeros(m, m);
    let mut singular = false;
    for k in 0..m {
        let l = eig.eigenvalues[k];
        if l.abs() <= cutoff {
            singular = true;
            continue;
        }
        let v = eig.eigenvectors.column(k);
        inv += (v * v.transpose()) / l;
    }
    CrbMatrix { covariance_bound: inv, singular }
}

/// `(Tr √(√ϱ₁ ϱ₂ √ϱ₁))²`.
pub fn bures_fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let f = match (a.vector(), b.vector()) {
        (Some(u), Some(v)) => u.dotc(v).norm_sqr(),
        (Some(u), None) => u.dotc(&(b.density_matrix().as_ref() * u)).re,
        (None, Some(v)) => v.dotc(&(a.density_matrix().as_ref() * v)).re,
        (None, None) => {
            let s = psd_sqrt(&a.density_matrix())?;
            let inner = &s * b.density_matrix().as_ref() * &s;
            let spec = hermitian_eigendecompose(&crate::numerics::hermitian_part(&inner))?;
            let tr: f64 = spec.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
            tr * tr
        }
    };
    Ok(f.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MandelstamTamm {
    pub fidelity: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compares `F_B(ϱ, ϱ_θ)` with `cos²(√(F_Q/4)·θ)`.
pub fn mandelstam_tamm_check(state: &QuantumState, op: &CollectiveOperator, theta: f64) -> Result<MandelstamTamm> {
    let fq = qfi(state, op)?.value;
    if fq.sqrt() * theta.abs() > std::f64::consts::PI {
        return Err(Error::InvalidParameter(format!(
            "sqrt(F_Q)*|theta| = {} exceeds pi, outside the range of the bound",
            fq.sqrt() * theta.abs()
        )));
    }
    let rotated = rotate(state, op, theta)?;
    let fidelity = bures_fidelity(state, &rotated)?;
    let c = ((fq / 4.0).sqrt() * theta).cos();
    let bound = c * c;
    Ok(MandelstamTamm { fidelity, bound, holds: fidelity >= bound - TOL.verdict })
}

/// Wigner–Yanase skew information `Tr(A²ϱ) − Tr(A√ϱA√ϱ)`.
pub fn wigner_yanase(state: &QuantumState, op: &CollectiveOperator) -> Result<f64> {
    state.rep().ensure_same(op.rep())?;
    if state.is_pure() {
        return Ok(state.variance(op).max(0.0));
    }
    let spec = StateSpectrum::of(state)?;
    let a = spec.transform(op);
    let s: Vec<f64> = spec.eigenvalues.iter().map(|l| l.sqrt()).collect();
    let d = s.len();
    let mut acc = 0.0;
    for k in 0..d {
        for l in 0..d {
            let diff = s[k] - s[l];
            acc += 0.5 * diff * diff * a[(k, l)].norm_sqr();
        }
    }
    Ok(acc)
}

/// Characteristic quantum Zeno time `2/√F_Q`; infinite when `F_Q ≤ 1e-12`.
pub fn zeno_time(state: &QuantumState, op: &CollectiveOperator) -> Result<f64> {
    Ok(zeno_time_from_qfi(qfi(state, op)?.value))
}

pub fn zeno_time_from_qfi(fq: f64) -> f64 {
    if fq <= 1e-12 {
        f64::INFINITY
    } else {
        2.0 / fq.sqrt()
    }
}

/// QFI of `p|Ψ⟩⟨Ψ| + (1 − p)·1/D` from the pure-state value `f_pure`.
///
/// The pure component's eigenvalue exceeds the others by `p`, and each pair
/// sum is `p + 2(1 − p)/D`, which gives `p²/(p + 2(1 − p)/D) · F_Q[Ψ]`.
pub fn white_noise_qfi(f_pure: f64, p: f64, hilbert_dim: usize) -> f64 {
    let denom = p + 2.0 * (1.0 - p) / hilbert_dim as f64;
    if denom <= 0.0 {
        return 0.0;
    }
    p * p / denom * f_pure
}

/// Pure-state decomposition `ϱ = Σ_k p_k |ψ_k⟩⟨ψ_k|`.
pub type Decomposition = Vec<(f64, CVector)>;

/// Average variance `Σ_k p_k Var(A)_{ψ_k}`.
pub fn average_variance(decomposition: &Decomposition, a: &CMatrix) -> f64 {
    decomposition
        .iter()
        .map(|(p, v)| {
            let av = a * v;
            let mean = v.dotc(&av).re;
            p * (av.norm_squared() - mean * mean)
        })
        .sum()
}

/// Eigen-decomposition of a state as a pure-state decomposition.
pub fn eigen_decomposition(state: &QuantumState) -> Result<Decomposition> {
    let spec = StateSpectrum::of(state)?;
    Ok(spec
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > TOL.support)
        .map(|(k, &l)| (l, spec.eigenvectors.column(k).into_owned()))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoofSandwich {
    pub quarter_qfi: f64,
    pub average_variance: f64,
    pub variance: f64,
    pub holds: bool,
}

/// Checks `F_Q/4 ≤ Σ p_k Var_{ψ_k} ≤ Var_ϱ` for a given decomposition.
pub fn roof_sandwich_check(
    state: &QuantumState,
    op: &CollectiveOperator,
    decomposition: &Decomposition,
) -> Result<RoofSandwich> {
    state.rep().ensure_same(op.rep())?;
    let d = state.dim();
    let mut rebuilt = CMatrix::zeros(d, d);
    for (p, v) in decomposition {
        if v.len() != d {
            return Err(Error::DimensionMismatch { left: v.len(), right: d });
        }
        rebuilt += outer(v).scale(*p);
    }
    let dev = max_abs(&(rebuilt - state.density_matrix().as_ref()));
    if dev > 1e-9 {
        return Err(Error::InvalidParameter(format!("decomposition misses the state by {dev:e}")));
    }
    let quarter_qfi = qfi(state, op)?.value / 4.0;
    let average_variance = average_variance(decomposition, op.dense());
    let variance = state.variance(op);
    let holds = quarter_qfi - 1e-8 <= average_variance && average_variance <= variance + 1e-8;
    Ok(RoofSandwich { quarter_qfi, average_variance, variance, holds })
}

#[derive(Debug, Clone, Copy)]
pub struct RoofOptions {
    /// Number of decomposition elements; defaults to the square of the rank.
    pub cardinality: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for RoofOptions {
    fn default() -> Self {
        RoofOptions { cardinality: None, restarts: 32, seed: 0x5eed, max_iterations: 4000 }
    }
}

#[derive(Debug, Clone)]
pub struct RoofResult {
    /// Best average variance found; an upper bound on the convex roof or a lower
    /// bound on the concave roof.
    pub value: f64,
    pub decomposition: Decomposition,
}

#[derive(Clone, Copy, PartialEq)]
enum RoofKind {
    Convex,
    Concave,
}

/// Minimizes the average variance over pure-state decompositions.
pub fn convex_roof_oracle(state: &QuantumState, op: &CollectiveOperator, opts: &RoofOptions) -> Result<RoofResult> {
    roof_oracle(state, op, opts, RoofKind::Convex)
}

/// Maximizes the average variance over pure-state decompositions.
pub fn concave_roof_oracle(state: &QuantumState, op: &CollectiveOperator, opts: &RoofOptions) -> Result<RoofResult> {
    roof_oracle(state, op, opts, RoofKind::Concave)
}

struct RoofProblem {
    /// `Λ^{1/2} V†AV Λ^{1/2}` on the support.
    b: CMatrix,
    lam: Vec<f64>,
    second: f64,
    sign: f64,
}

impl RoofProblem {
    /// `sign · Σ_k a_k²/b_k` and its Euclidean gradient in `U`.
    fn eval(&self, u: &CMatrix, with_grad: bool) -> (f64, Option<CMatrix>) {
        let (k_count, r) = u.shape();
        let mut f = 0.0;
        let mut g = if with_grad { Some(CMatrix::zeros(k_count, r)) } else { None };
        for k in 0..k_count {
            let c: CVector = u.row(k).transpose();
            let bc = &self.b * &c;
            let a = c.dotc(&bc).re;
            let lc = CVector::from_fn(r, |i, _| c[i] * self.lam[i]);
            let bk = c.dotc(&lc).re;
            if bk <= 1e-300 {
                continue;
            }
            f += a * a / bk;
            if let Some(g) = g.as_mut() {
                let grad = bc * C64::new(4.0 * a / bk, 0.0) - lc * C64::new(2.0 * a * a / (bk * bk), 0.0);
                for i in 0..r {
                    g[(k, i)] = grad[i] * self.sign;
                }
            }
        }
        (self.sign * f, g)
    }

    fn average_variance(&self, u: &CMatrix) -> f64 {
        let (f, _) = self.eval(u, false);
        self.second - self.sign * f
    }
}

fn retract(y: CMatrix) -> CMatrix {
    let r = y.ncols();
    let qr = y.qr();
    let mut q = qr.q();
    let rm = qr.r();
    for j in 0..r {
        let d = rm[(j, j)];
        if d.norm() > 0.0 {
            let ph = d / d.norm();
            for i in 0..q.nrows() {
                q[(i, j)] *= ph;
            }
        }
    }
    q
}

fn roof_oracle(state: &QuantumState, op: &CollectiveOperator, opts: &RoofOptions, kind: RoofKind) -> Result<RoofResult> {
    state.rep().ensure_same(op.rep())?;
    let d = state.dim();
    if d > 8 {
        return Err(Error::SizeLimit { what: "Hilbert-space dimension for roof oracles", n: d, limit: 8 });
    }
    let spec = StateSpectrum::of(state)?;
    let support: Vec<usize> = (0..d).filter(|&k| spec.eigenvalues[k] > 1e-10).collect();
    let r = support.len();
    if r > 4 {
        return Err(Error::SizeLimit { what: "state rank for roof oracles", n: r, limit: 4 });
    }
    let card = opts.cardinality.unwrap_or(r * r).max(1);
    if card < r {
        return Err(Error::InvalidParameter(format!("cardinality {card} is below the state rank {r}")));
    }
    let a_full = spec.transform(op);
    let lam: Vec<f64> = support.iter().map(|&k| spec.eigenvalues[k]).collect();
    let b = CMatrix::from_fn(r, r, |i, j| a_full[(support[i], support[j])] * (lam[i] * lam[j]).sqrt());
    let a2 = op.dense() * op.dense();
    let second = crate::numerics::expect_mat(&state.density_matrix(), &a2);
    let sign = if kind == RoofKind::Convex { 1.0 } else { -1.0 };
    let problem = RoofProblem { b, lam: lam.clone(), second, sign };

    let mut rng = random::rng(opts.seed);
    let mut best: Option<(f64, CMatrix)> = None;
    for _ in 0..opts.restarts.max(1) {
        let mut u = retract(random::ginibre(card, r, &mut rng));
        let (mut f, _) = problem.eval(&u, false);
        let mut step = 1.0;
        for _ in 0..opts.max_iterations {
            let (_, g) = problem.eval(&u, true);
            let g = g.expect("gradient requested");
            let utg = u.adjoint() * &g;
            let grad = &g - &u * (&utg + utg.adjoint()).scale(0.5);
            let gnorm2 = grad.norm_squared();
            if gnorm2 < 1e-26 {
                break;
            }
            step *= 2.0;
            let mut accepted = false;
            while step > 1e-14 {
                let cand = retract(&u + &grad * C64::new(step, 0.0));
                let (fc, _) = problem.eval(&cand, false);
                if fc >= f + 1e-4 * step * gnorm2 {
                    u = cand;
                    f = fc;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if best.as_ref().is_none_or(|(bf, _)| f > *bf) {
            best = Some((f, u));
        }
    }
    let (_, u) = best.expect("at least one restart");
    let value = problem.average_variance(&u);
    let mut decomposition = Vec::with_capacity(card);
    for k in 0..card {
        let mut psi = CVector::zeros(d);
        for (i, &s) in support.iter().enumerate() {
            let coeff = u[(k, i)] * lam[i].sqrt();
            psi += spec.eigenvectors.column(s) * coeff;
        }
        let p = psi.norm_squared();
        if p > 1e-300 {
            decomposition.push((p, psi.unscale(p.sqrt())));
        }
    }
    Ok(RoofResult { value, decomposition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{build_collective, jx, jy, jz, parity, Axis, Representation};
    use crate::states::{dicke, ghz, maximally_mixed, mix_white_noise, polarized};

    fn sym(n: usize) -> Representation {
        Representation::Symmetric(n)
    }

    #[test]
    fn ghz_values() {
        for rep in [sym(3), Representation::Full(3)] {
            let g = ghz(3, Axis::X, rep).unwrap();
            assert!((qfi(&g, &jx(rep).unwrap()).unwrap().value - 9.0).abs() < 1e-10);
            assert!((qfi(&g, &jz(rep).unwrap()).unwrap().value - 3.0).abs() < 1e-10);
            let mixed = g.to_density();
            assert!((qfi(&mixed, &jx(rep).unwrap()).unwrap().value - 9.0).abs() < 1e-9);
        }
        for n in [3usize, 5, 8] {
            let g = ghz(n, Axis::Z, sym(n)).unwrap();
            assert!((qfi_pure(&g, &jz(sym(n)).unwrap()).unwrap() - (n * n) as f64).abs() < 1e-9);
            assert!((qfi_pure(&g, &jx(sym(n)).unwrap()).unwrap() - n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn simple_cases() {
        let rep = sym(4);
        let p = polarized(4, Axis::Z, rep).unwrap();
        assert!((qfi(&p, &jy(rep).unwrap()).unwrap().value - 4.0).abs() < 1e-12);
        let d = dicke(4, 2, rep).unwrap();
        assert!((qfi_pure(&d, &jx(rep).unwrap()).unwrap() - 12.0).abs() < 1e-12);
        assert!(qfi_pure(&d, &jz(rep).unwrap()).unwrap().abs() < 1e-12);
        let mm = maximally_mixed(Representation::Full(3)).unwrap();
        let r = qfi(&mm, &jx(Representation::Full(3)).unwrap()).unwrap();
        assert!(r.value.abs() < 1e-12);
        assert_eq!(r.skipped_pairs, 0);
        assert!(matches!(qfi_pure(&mm, &jx(Representation::Full(3)).unwrap()), Err(Error::NotPure)));
        assert!(qfi(&p, &jx(sym(5)).unwrap()).is_err());
    }

    #[test]
    fn white_noise_closed_form() {
        let rep = Representation::Full(2);
        let g = ghz(2, Axis::X, rep).unwrap();
        let a = jx(rep).unwrap();
        let noisy = mix_white_noise(&g, 0.5).unwrap();
        let direct = qfi(&noisy, &a).unwrap().value;
        let closed = white_noise_qfi(qfi_pure(&g, &a).unwrap(), 0.5, 4);
        assert!((direct - closed).abs() < 1e-9);
        assert!((direct - 4.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn sld_relations() {
        let mut rng = random::rng(17);
        let rep = Representation::Full(3);
        for _ in 0..10 {
            let rho = QuantumState::density(rep, random::density(8, 3, &mut rng), "r").unwrap();
            let a = CollectiveOperator::user(random::hermitian(8, &mut rng), rep, "A").unwrap();
            let l = sld(&rho, &a).unwrap();
            let r = rho.density_matrix().into_owned();
            let lhs = (&l * &r + &r * &l).scale(0.5);
            let rhs = (&r * a.dense() - a.dense() * &r) * I;
            assert!(max_abs(&(lhs - rhs)) < 1e-8);
            let fq = qfi(&rho, &a).unwrap().value;
            let trl2 = crate::numerics::trace_product(&r, &(&l * &l)).re;
            assert!((trl2 - fq).abs() < 1e-8);
            assert!(crate::numerics::trace_product(&r, &l).norm() < 1e-9);
            assert!((qfi_alternative(&rho, &a).unwrap() - fq).abs() < 1e-9);
        }
    }

    #[test]
    fn sld_of_polarized_state_is_twice_jx_on_support() {
        let rep = sym(4);
        let p = polarized(4, Axis::Z, rep).unwrap();
        let l = sld(&p, &jy(rep).unwrap()).unwrap();
        let psi = p.vector().unwrap();
        let two_jx = jx(rep).unwrap().apply(psi) * C64::new(2.0, 0.0);
        assert!((&l * psi - two_jx).norm() < 1e-12);
        let mixed_l = sld(&p.to_density(), &jy(rep).unwrap()).unwrap();
        assert!(max_abs(&(mixed_l - l)) < 1e-10);
    }

    #[test]
    fn classical_fisher_cases() {
        let rep = sym(4);
        let p = polarized(4, Axis::Z, rep).unwrap();
        let gen = jy(rep).unwrap();
        let fam = rotation_family(&p, &gen);
        let l = sld(&p, &gen).unwrap();
        let cf = classical_fisher(&fam, &Povm::eigenbasis(&l).unwrap(), 0.0, DEFAULT_FD_STEP).unwrap();
        assert!((cf.value - 4.0).abs() < 4e-6, "{cf:?}");
        let none = classical_fisher(&fam, &Povm::trivial(5), 0.0, DEFAULT_FD_STEP).unwrap();
        assert!(none.value.abs() < 1e-12);

        let g = ghz(3, Axis::Z, sym(3)).unwrap();
        let z = jz(sym(3)).unwrap();
        let fam = rotation_family(&g, &z);
        let zbasis = Povm::eigenbasis(z.dense()).unwrap();
        assert!(classical_fisher(&fam, &zbasis, 0.0, DEFAULT_FD_STEP).unwrap().value.abs() < 1e-12);
        let parity_basis = Povm::eigenbasis(parity(Axis::X, sym(3)).unwrap().dense()).unwrap();
        let cf = classical_fisher(&fam, &parity_basis, 0.3, DEFAULT_FD_STEP).unwrap();
        assert!((cf.value - 9.0).abs() < 1e-5);
    }

    #[test]
    fn fisher_matrix_ghz_diagonal() {
        let rep = sym(3);
        let g = ghz(3, Axis::X, rep).unwrap();
        let ops: Vec<CollectiveOperator> = Axis::ALL.iter().map(|&a| build_collective(a, rep).unwrap()).collect();
        let refs: Vec<&CollectiveOperator> = ops.iter().collect();
        let f = fisher_matrix(&g, &refs).unwrap();
        let diag = [9.0, 3.0, 3.0];
        for i in 0..3 {
            assert!((f.matrix[(i, i)] - diag[i]).abs() < 1e-9);
        }
        let fm = fisher_matrix(&g.to_density(), &refs).unwrap();
        assert!((fm.matrix.clone() - f.matrix.clone()).abs().max() < 1e-9);
        let single = fisher_matrix(&g, &refs[..1]).unwrap();
        assert_eq!(single.matrix.shape(), (1, 1));
        let crb = crb_matrix(&f);
        assert!(!crb.singular);
        let dicke_f = fisher_matrix(&dicke(4, 0, sym(4)).unwrap(), &[&jx(sym(4)).unwrap(), &jz(sym(4)).unwrap()]).unwrap();
        assert!(crb_matrix(&dicke_f).singular);
    }

    #[test]
    fn fidelity_cases() {
        let rep = sym(3);
        let g = ghz(3, Axis::X, rep).unwrap();
        assert!((bures_fidelity(&g, &g).unwrap() - 1.0).abs() < 1e-12);
        let gm = g.to_density();
        assert!((bures_fidelity(&gm, &gm).unwrap() - 1.0).abs() < 1e-7);
        let a = dicke(3, 0, rep).unwrap();
        let b = dicke(3, 1, rep).unwrap();
        assert!(bures_fidelity(&a, &b).unwrap().abs() < 1e-15);
        let theta = 1e-3;
        let r = rotate(&g, &jx(rep).unwrap(), theta).unwrap();
        let f = bures_fidelity(&g, &r).unwrap();
        assert!((f - (1.0 - theta * theta * 9.0 / 4.0)).abs() <= 1e-8);
    }

    #[test]
    fn mandelstam_tamm_saturated_by_ghz() {
        let rep = sym(4);
        let g = ghz(4, Axis::X, rep).unwrap();
        let x = jx(rep).unwrap();
        for theta in [0.0, 0.05, 0.2, 0.5] {
            let mt = mandelstam_tamm_check(&g, &x, theta).unwrap();
            assert!(mt.holds);
            assert!((mt.fidelity - mt.bound).abs() < 1e-8);
        }
        assert!(mandelstam_tamm_check(&g, &x, 1.0).is_err());
    }

    #[test]
    fn wigner_yanase_cases() {
        let rep = sym(4);
        let d = dicke(4, 1, rep).unwrap();
        let x = jx(rep).unwrap();
        assert!((wigner_yanase(&d, &x).unwrap() - d.variance(&x)).abs() < 1e-12);
        assert!((wigner_yanase(&d.to_density(), &x).unwrap() - d.variance(&x)).abs() < 1e-9);
        let mm = maximally_mixed(rep).unwrap();
        assert!(wigner_yanase(&mm, &x).unwrap().abs() < 1e-12);
    }

    #[test]
    fn zeno_cases() {
        for n in 2..=6usize {
            let g = ghz(n, Axis::X, sym(n)).unwrap();
            assert!((zeno_time(&g, &jx(sym(n)).unwrap()).unwrap() - 2.0 / n as f64).abs() < 1e-12);
            let p = polarized(n, Axis::Z, sym(n)).unwrap();
            assert!((zeno_time(&p, &jy(sym(n)).unwrap()).unwrap() - 2.0 / (n as f64).sqrt()).abs() < 1e-12);
        }
        let mm = maximally_mixed(sym(3)).unwrap();
        assert!(zeno_time(&mm, &jx(sym(3)).unwrap()).unwrap().is_infinite());
    }

    #[test]
    fn roofs_on_maximally_mixed_qubit() {
        let rep = Representation::Full(1);
        let mm = maximally_mixed(rep).unwrap();
        let z = jz(rep).unwrap();
        let opts = RoofOptions { restarts: 4, ..RoofOptions::default() };
        let convex = convex_roof_oracle(&mm, &z, &opts).unwrap();
        assert!(convex.value.abs() < 1e-6, "{}", convex.value);
        let concave = concave_roof_oracle(&mm, &z, &opts).unwrap();
        assert!((concave.value - 0.25).abs() < 1e-6, "{}", concave.value);
        let check = roof_sandwich_check(&mm, &z, &concave.decomposition).unwrap();
        assert!(check.holds);
    }

    #[test]
    fn roofs_on_pure_state() {
        let rep = Representation::Full(2);
        let p = polarized(2, Axis::X, rep).unwrap();
        let z = jz(rep).unwrap();
        let opts = RoofOptions { restarts: 2, ..RoofOptions::default() };
        let v = p.variance(&z);
        assert!((convex_roof_oracle(&p, &z, &opts).unwrap().value - v).abs() < 1e-12);
        assert!((concave_roof_oracle(&p, &z, &opts).unwrap().value - v).abs() < 1e-12);
        let err = convex_roof_oracle(&p, &z, &RoofOptions { cardinality: Some(0), ..opts });
        assert!(err.is_ok(), "cardinality is clamped to at least one");
    }

    #[test]
    fn sandwich_rejects_wrong_decomposition() {
        let rep = Representation::Full(1);
        let mm = maximally_mixed(rep).unwrap();
        let wrong = vec![(1.0, CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]))];
        assert!(roof_sandwich_check(&mm, &jz(rep).unwrap(), &wrong).is_err());
    }
}
