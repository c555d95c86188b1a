//! Quantum states and the probe-state families used throughout the crate.

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::numerics::sparse::CsrMatrix;
use crate::numerics::tridiagonal::SymTridiagonal;
use crate::numerics::{
    check_hermitian, hermitian_eigendecompose, kron, outer, trace, CMatrix, CVector, SpectralDecomposition, C64, ONE,
    TOL, ZERO,
};
use crate::random;
use crate::spin::{binomial, embed_symmetric, ladder_up, symmetric_m, Axis, CollectiveOperator, Representation};

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Pure(CVector),
    Density(CMatrix),
}

/// A normalized pure vector or a unit-trace positive density matrix on a qubit register.
#[derive(Debug, Clone)]
pub struct QuantumState {
    rep: Representation,
    payload: Payload,
    label: String,
}

impl QuantumState {
    pub fn pure(rep: Representation, v: CVector, label: impl Into<String>) -> Result<Self> {
        rep.check_vector()?;
        if v.len() != rep.dim() {
            return Err(Error::DimensionMismatch { left: v.len(), right: rep.dim() });
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > TOL.normalization {
            return Err(Error::InvalidState(format!("state vector norm {norm} differs from 1")));
        }
        Ok(Self::pure_trusted(rep, v, label))
    }

    pub fn density(rep: Representation, m: CMatrix, label: impl Into<String>) -> Result<Self> {
        rep.check_density()?;
        if m.nrows() != rep.dim() || m.ncols() != rep.dim() {
            return Err(Error::DimensionMismatch { left: m.nrows(), right: rep.dim() });
        }
        let s = Self::density_trusted(rep, m, label);
        s.validate()?;
        Ok(s)
    }

    pub(crate) fn pure_trusted(rep: Representation, v: CVector, label: impl Into<String>) -> Self {
        QuantumState { rep, payload: Payload::Pure(v), label: label.into() }
    }

    pub(crate) fn density_trusted(rep: Representation, m: CMatrix, label: impl Into<String>) -> Self {
        QuantumState { rep, payload: Payload::Density(m), label: label.into() }
    }

    /// Re-checks normalization, hermiticity and positivity.
    pub fn validate(&self) -> Result<()> {
        match &self.payload {
            Payload::Pure(v) => {
                let norm = v.norm();
                if (norm - 1.0).abs() > TOL.normalization {
                    return Err(Error::InvalidState(format!("state vector norm {norm} differs from 1")));
                }
            }
            Payload::Density(m) => {
                check_hermitian(m)?;
                let tr = trace(m);
                if (tr.re - 1.0).abs() > TOL.normalization || tr.im.abs() > TOL.normalization {
                    return Err(Error::InvalidState(format!("density matrix trace {tr} differs from 1")));
                }
                let spec = hermitian_eigendecompose(m)?;
                if spec.eigenvalues[0] < -TOL.psd {
                    return Err(Error::NotPsd { min_eigenvalue: spec.eigenvalues[0] });
                }
            }
        }
        Ok(())
    }

    pub fn rep(&self) -> Representation {
        self.rep
    }

    pub fn n(&self) -> usize {
        self.rep.n()
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.payload, Payload::Pure(_))
    }

    pub fn vector(&self) -> Option<&CVector> {
        match &self.payload {
            Payload::Pure(v) => Some(v),
            Payload::Density(_) => None,
        }
    }

    pub fn density_matrix(&self) -> Cow<'_, CMatrix> {
        match &self.payload {
            Payload::Pure(v) => Cow::Owned(outer(v)),
            Payload::Density(m) => Cow::Borrowed(m),
        }
    }

    pub fn to_density(&self) -> QuantumState {
        QuantumState::density_trusted(self.rep, self.density_matrix().into_owned(), self.label.clone())
    }

    pub fn trace(&self) -> f64 {
        match &self.payload {
            Payload::Pure(v) => v.norm_squared(),
            Payload::Density(m) => trace(m).re,
        }
    }

    pub fn purity(&self) -> f64 {
        match &self.payload {
            Payload::Pure(v) => v.norm_squared().powi(2),
            Payload::Density(m) => m.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// Spectral decomposition of the density matrix.
    pub fn spectrum(&self) -> Result<SpectralDecomposition> {
        hermitian_eigendecompose(&self.density_matrix())
    }

    /// `Tr(ϱ S)` for a sparse operator (complex in general).
    pub fn expect_sparse(&self, s: &CsrMatrix) -> C64 {
        match &self.payload {
            Payload::Pure(v) => v.dotc(&s.mul_vec(v)),
            Payload::Density(m) => s.trace_with(m),
        }
    }

    pub fn expect(&self, op: &CollectiveOperator) -> f64 {
        self.expect_sparse(op.sparse()).re
    }

    /// `⟨A²⟩`.
    pub fn second_moment(&self, op: &CollectiveOperator) -> f64 {
        match &self.payload {
            Payload::Pure(v) => op.apply(v).norm_squared(),
            Payload::Density(m) => {
                let am = op.apply_mat(m);
                op.sparse().trace_with(&am).re
            }
        }
    }

    /// `⟨{A, B}⟩ / 2`.
    pub fn symmetrized_moment(&self, a: &CollectiveOperator, b: &CollectiveOperator) -> f64 {
        match &self.payload {
            Payload::Pure(v) => a.apply(v).dotc(&b.apply(v)).re,
            Payload::Density(m) => {
                let bm = b.apply_mat(m);
                a.sparse().trace_with(&bm).re
            }
        }
    }

    pub fn variance(&self, op: &CollectiveOperator) -> f64 {
        let mean = self.expect(op);
        self.second_moment(op) - mean * mean
    }

    /// `p·self + (1 − p)·other`.
    pub fn mix(&self, other: &QuantumState, p: f64) -> Result<QuantumState> {
        self.rep.ensure_same(other.rep)?;
        check_probability(p)?;
        let m = self.density_matrix().scale(p) + other.density_matrix().scale(1.0 - p);
        Ok(QuantumState::density_trusted(self.rep, m, format!("mix({}, {})", self.label, other.label)))
    }

    /// Tensor product of two full-representation states.
    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState> {
        let (Representation::Full(a), Representation::Full(b)) = (self.rep, other.rep) else {
            return Err(Error::Unsupported("tensor products need the full representation".into()));
        };
        let rep = Representation::Full(a + b);
        let label = format!("{} (x) {}", self.label, other.label);
        Ok(match (&self.payload, &other.payload) {
            (Payload::Pure(u), Payload::Pure(v)) => {
                rep.check_vector()?;
                QuantumState::pure_trusted(rep, u.kronecker(v), label)
            }
            _ => {
                rep.check_density()?;
                QuantumState::density_trusted(rep, kron(&self.density_matrix(), &other.density_matrix()), label)
            }
        })
    }

    /// Maps a symmetric-subspace state into the full space; full states are returned unchanged.
    pub fn to_full(&self) -> Result<QuantumState> {
        let n = match self.rep {
            Representation::Full(_) => return Ok(self.clone()),
            Representation::Symmetric(n) => n,
        };
        let e = embed_symmetric(n)?;
        let rep = Representation::Full(n);
        Ok(match &self.payload {
            Payload::Pure(v) => QuantumState::pure_trusted(rep, &e * v, self.label.clone()),
            Payload::Density(m) => {
                rep.check_density()?;
                QuantumState::density_trusted(rep, &e * m * e.adjoint(), self.label.clone())
            }
        })
    }

    /// Reduced state of the first `keep` qubits of a full-representation state.
    pub fn partial_trace_keep_first(&self, keep: usize) -> Result<QuantumState> {
        let Representation::Full(n) = self.rep else {
            return Err(Error::Unsupported("partial trace needs the full representation".into()));
        };
        if keep == 0 || keep > n {
            return Err(Error::InvalidParameter(format!("cannot keep {keep} of {n} qubits")));
        }
        let da = 1usize << keep;
        let db = 1usize << (n - keep);
        let m = match &self.payload {
            Payload::Pure(v) => {
                let psi = CMatrix::from_fn(da, db, |i, k| v[i * db + k]);
                &psi * psi.adjoint()
            }
            Payload::Density(m) => crate::numerics::partial_trace_second(m, da, db),
        };
        Ok(QuantumState::density_trusted(Representation::Full(keep), m, format!("Tr_rest({})", self.label)))
    }
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Single-qubit pure state pointing along the Bloch direction `(θ, φ)`.
pub fn qubit_state(polar: f64, azimuth: f64) -> [C64; 2] {
    [C64::new((polar / 2.0).cos(), 0.0), C64::from_polar((polar / 2.0).sin(), azimuth)]
}

fn axis_qubit(axis: Axis, positive: bool) -> [C64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if positive { 1.0 } else { -1.0 };
    match axis {
        Axis::X => [C64::new(s, 0.0), C64::new(sign * s, 0.0)],
        Axis::Y => [C64::new(s, 0.0), C64::new(0.0, sign * s)],
        Axis::Z if positive => [ONE, ZERO],
        Axis::Z => [ZERO, ONE],
    }
}

/// `|φ⟩^{⊗N}` in either representation.
pub fn uniform_product(n: usize, q: [C64; 2], rep: Representation) -> Result<CVector> {
    if rep.n() != n {
        return Err(Error::DimensionMismatch { left: n, right: rep.n() });
    }
    rep.check_vector()?;
    Ok(match rep {
        Representation::Full(_) => {
            let dim = 1usize << n;
            CVector::from_fn(dim, |b, _| {
                let downs = b.count_ones() as i32;
                q[0].powi(n as i32 - downs) * q[1].powi(downs)
            })
        }
        Representation::Symmetric(_) => CVector::from_fn(n + 1, |k, _| {
            q[0].powi((n - k) as i32) * q[1].powi(k as i32) * binomial(n, k).sqrt()
        }),
    })
}

/// Tensor product of arbitrary single-qubit states (full representation).
pub fn product_state(factors: &[[C64; 2]]) -> Result<QuantumState> {
    let n = factors.len();
    let rep = Representation::Full(n);
    rep.check_vector()?;
    let mut v = CVector::from_element(1, ONE);
    for f in factors {
        let norm = (f[0].norm_sqr() + f[1].norm_sqr()).sqrt();
        v = v.kronecker(&CVector::from_vec(vec![f[0] / norm, f[1] / norm]));
    }
    Ok(QuantumState::pure_trusted(rep, v, format!("product({n})")))
}

/// Random product of Haar-random single-qubit pure states.
pub fn random_product_state(n: usize, rng: &mut random::QRng) -> Result<QuantumState> {
    let factors: Vec<[C64; 2]> = (0..n)
        .map(|_| {
            let v = random::pure_state(2, rng);
            [v[0], v[1]]
        })
        .collect();
    product_state(&factors)
}

/// All spins polarized along `+axis`.
pub fn polarized(n: usize, axis: Axis, rep: Representation) -> Result<QuantumState> {
    let v = uniform_product(n, axis_qubit(axis, true), rep)?;
    Ok(QuantumState::pure_trusted(rep, v, format!("polarized({n},{axis})")))
}

/// Spin-coherent state along Bloch direction `(θ, φ)`.
pub fn coherent(n: usize, polar: f64, azimuth: f64, rep: Representation) -> Result<QuantumState> {
    let v = uniform_product(n, qubit_state(polar, azimuth), rep)?;
    Ok(QuantumState::pure_trusted(rep, v, format!("coherent({n})")))
}

/// `(|+a⟩^{⊗N} + |−a⟩^{⊗N})/√2` for orientation axis `a`; `Axis::Z` is the
/// usual `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz(n: usize, axis: Axis, rep: Representation) -> Result<QuantumState> {
    if n < 2 {
        return Err(Error::InvalidParameter("GHZ state needs N >= 2".into()));
    }
    let up = uniform_product(n, axis_qubit(axis, true), rep)?;
    let down = uniform_product(n, axis_qubit(axis, false), rep)?;
    let v = (up + down).unscale(std::f64::consts::SQRT_2);
    let label = if axis == Axis::Z { format!("GHZ({n})") } else { format!("GHZ({n},{axis})") };
    Ok(QuantumState::pure_trusted(rep, v, label))
}

/// Symmetric Dicke state with `m` spins flipped, `J_z = N/2 − m`.
pub fn dicke(n: usize, m: usize, rep: Representation) -> Result<QuantumState> {
    if m > n {
        return Err(Error::InvalidParameter(format!("Dicke state needs 0 <= m <= N, got m={m}, N={n}")));
    }
    if rep.n() != n {
        return Err(Error::DimensionMismatch { left: n, right: rep.n() });
    }
    rep.check_vector()?;
    let v = match rep {
        Representation::Symmetric(_) => {
            let mut v = CVector::zeros(n + 1);
            v[m] = ONE;
            v
        }
        Representation::Full(_) => {
            let amp = C64::new(1.0 / binomial(n, m).sqrt(), 0.0);
            CVector::from_fn(1usize << n, |b, _| if b.count_ones() as usize == m { amp } else { ZERO })
        }
    };
    Ok(QuantumState::pure_trusted(rep, v, format!("Dicke({n},{m})")))
}

/// All perfect matchings of `0..n` as lists of pairs.
pub fn perfect_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(rest: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        let a = rest[0];
        for i in 1..rest.len() {
            let b = rest[i];
            let remaining: Vec<usize> = rest[1..].iter().copied().filter(|&x| x != b).collect();
            acc.push((a, b));
            rec(&remaining, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    let all: Vec<usize> = (0..n).collect();
    rec(&all, &mut Vec::new(), &mut out);
    out
}

/// Product of two-qubit singlets on the given qubit pairs.
pub fn singlet_pairs(n: usize, pairs: &[(usize, usize)]) -> CVector {
    let dim = 1usize << n;
    let amp = (0.5f64).powf(pairs.len() as f64 / 2.0);
    let mut v = CVector::zeros(dim);
    for choice in 0..(1usize << pairs.len()) {
        let mut b = 0usize;
        let mut sign = 1.0;
        for (p, &(i, j)) in pairs.iter().enumerate() {
            // (|01⟩ − |10⟩)/√2 on qubits (i, j)
            let flip_first = choice >> p & 1 == 1;
            let down = if flip_first { i } else { j };
            b |= 1usize << (n - 1 - down);
            if flip_first {
                sign = -sign;
            }
        }
        v[b] = C64::new(sign * amp, 0.0);
    }
    v
}

/// Permutationally invariant singlet: the uniform average over perfect
/// matchings of products of two-qubit singlets.
pub fn singlet_pi(n: usize) -> Result<QuantumState> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidParameter(format!("singlet state needs even N, got {n}")));
    }
    if n > 8 {
        return Err(Error::SizeLimit { what: "qubits for the permutationally invariant singlet", n, limit: 8 });
    }
    let rep = Representation::Full(n);
    let dim = rep.dim();
    let matchings = perfect_matchings(n);
    let mut rho = CMatrix::zeros(dim, dim);
    for m in &matchings {
        let v = singlet_pairs(n, m);
        rho += outer(&v);
    }
    rho.unscale_mut(matchings.len() as f64);
    Ok(QuantumState::density_trusted(rep, rho, format!("singlet({n})")))
}

/// Maximally mixed state on the representation's Hilbert space.
pub fn maximally_mixed(rep: Representation) -> Result<QuantumState> {
    rep.check_density()?;
    let d = rep.dim();
    Ok(QuantumState::density_trusted(rep, CMatrix::identity(d, d).unscale(d as f64), format!("mixed({})", rep.n())))
}

/// `p|Ψ⟩⟨Ψ| + (1 − p)·1/2^N`. Symmetric inputs are embedded into the full space first.
pub fn mix_white_noise(psi: &QuantumState, p: f64) -> Result<QuantumState> {
    check_probability(p)?;
    let Some(_) = psi.vector() else {
        return Err(Error::NotPure);
    };
    let full = psi.to_full()?;
    let rep = full.rep();
    rep.check_density()?;
    let d = rep.dim() as f64;
    let mut m = full.density_matrix().scale(p);
    for i in 0..rep.dim() {
        m[(i, i)] += C64::new((1.0 - p) / d, 0.0);
    }
    Ok(QuantumState::density_trusted(rep, m, format!("{} + white noise(p={p})", psi.label())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingSpec {
    pub n: usize,
    pub lambda: f64,
}

impl SqueezingSpec {
    pub fn new(n: usize, lambda: f64) -> Result<Self> {
        let s = SqueezingSpec { n, lambda };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 2 == 1 {
            return Err(Error::InvalidParameter(format!("squeezing needs even N >= 2, got {}", self.n)));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("Lagrange multiplier must be finite and >= 0, got {}", self.lambda)));
        }
        Representation::Symmetric(self.n).check_vector()
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub state: QuantumState,
    pub energy: f64,
    /// Distance to the next eigenvalue of the full Hamiltonian.
    pub gap: f64,
    /// Set when the gap is below `1e-12·‖H‖`; the lowest-index vector is returned.
    pub degenerate: bool,
}

/// `H(Λ) = J_x² − Λ J_z` restricted to one parity class of the symmetric basis.
fn squeezing_block(n: usize, lambda: f64, parity: usize) -> Option<(Vec<usize>, SymTridiagonal)> {
    let idx: Vec<usize> = (parity..=n).step_by(2).collect();
    if idx.is_empty() {
        return None;
    }
    let j = n as f64 / 2.0;
    let diag: Vec<f64> = idx
        .iter()
        .map(|&k| {
            let m = symmetric_m(n, k);
            (j * (j + 1.0) - m * m) / 2.0 - lambda * m
        })
        .collect();
    let off: Vec<f64> = idx
        .windows(2)
        .map(|w| {
            // ⟨k|J_x²|k+2⟩ = c₊(m−2)·c₊(m−1)/4 with m the J_z value of k
            let m = symmetric_m(n, w[0]);
            ladder_up(n, m - 2.0) * ladder_up(n, m - 1.0) / 4.0
        })
        .collect();
    Some((idx, SymTridiagonal::new(diag, off).expect("block sizes are consistent")))
}

/// Dense `H(Λ)` in the symmetric basis, for cross-checks.
pub fn squeezing_hamiltonian(spec: SqueezingSpec) -> Result<CMatrix> {
    spec.validate()?;
    let rep = Representation::Symmetric(spec.n);
    let x = crate::spin::jx(rep)?;
    let z = crate::spin::jz(rep)?;
    Ok(x.square().to_dense() - z.dense().scale(spec.lambda))
}

/// Ground state of `H(Λ) = J_x² − Λ J_z` in the symmetric subspace.
///
/// The Hamiltonian couples only basis states two steps apart, so it splits into
/// two tridiagonal parity blocks which are solved independently.
pub fn squeezed_ground_state(spec: SqueezingSpec) -> Result<GroundState> {
    spec.validate()?;
    let n = spec.n;
    let blocks: Vec<(Vec<usize>, SymTridiagonal)> =
        [0, 1].iter().filter_map(|&p| squeezing_block(n, spec.lambda, p)).collect();
    let mut candidates: Vec<(f64, usize)> = Vec::new();
    let mut norm = 0.0f64;
    for (b, (_, t)) in blocks.iter().enumerate() {
        norm = norm.max(t.norm_bound());
        candidates.push((t.eigenvalue(0), b));
        if t.dim() > 1 {
            candidates.push((t.eigenvalue(1), b));
        }
    }
    // even block first on ties, since it holds basis index 0
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (energy, block) = candidates[0];
    let gap = candidates.get(1).map(|c| c.0 - energy).unwrap_or(f64::INFINITY);
    let (idx, t) = &blocks[block];
    let pair = t.lowest();
    let mut v = CVector::zeros(n + 1);
    for (pos, &k) in idx.iter().enumerate() {
        v[k] = C64::new(pair.vector[pos], 0.0);
    }
    let degenerate = gap < 1e-12 * norm.max(f64::MIN_POSITIVE);
    let state = QuantumState::pure_trusted(
        Representation::Symmetric(n),
        v,
        format!("squeezed({n},lambda={})", spec.lambda),
    );
    Ok(GroundState { state, energy, gap, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::max_abs;
    use crate::spin::{build_collective, jx, jy, jz, rotate};

    fn sym(n: usize) -> Representation {
        Representation::Symmetric(n)
    }

    #[test]
    fn polarized_moments() {
        for rep in [sym(4), Representation::Full(4)] {
            let s = polarized(4, Axis::Z, rep).unwrap();
            assert!((s.expect(&jz(rep).unwrap()) - 2.0).abs() < 1e-12);
            assert!((s.variance(&jx(rep).unwrap()) - 1.0).abs() < 1e-12);
        }
        for a in Axis::ALL {
            let s = polarized(1, a, Representation::Full(1)).unwrap();
            for b in Axis::ALL {
                let expected = if a == b { 0.5 } else { 0.0 };
                let got = s.expect(&build_collective(b, Representation::Full(1)).unwrap());
                assert!((got - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ghz_forms_agree_across_reps() {
        for axis in Axis::ALL {
            let s = ghz(3, axis, sym(3)).unwrap().to_full().unwrap();
            let f = ghz(3, axis, Representation::Full(3)).unwrap();
            let overlap = s.vector().unwrap().dotc(f.vector().unwrap()).norm();
            assert!((overlap - 1.0).abs() < 1e-12);
        }
        let g = ghz(4, Axis::Z, sym(4)).unwrap();
        let v = g.vector().unwrap();
        assert!((v[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((v[4].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(g.expect(&jz(sym(4)).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn dicke_second_moments() {
        for rep in [sym(4), Representation::Full(4)] {
            let d = dicke(4, 2, rep).unwrap();
            assert!((d.second_moment(&jx(rep).unwrap()) - 3.0).abs() < 1e-12);
            assert!((d.second_moment(&jy(rep).unwrap()) - 3.0).abs() < 1e-12);
            assert!(d.second_moment(&jz(rep).unwrap()).abs() < 1e-12);
        }
        let d0 = dicke(5, 0, sym(5)).unwrap();
        let p = polarized(5, Axis::Z, sym(5)).unwrap();
        assert!((d0.vector().unwrap() - p.vector().unwrap()).norm() < 1e-15);
    }

    #[test]
    fn matching_counts() {
        assert_eq!(perfect_matchings(2).len(), 1);
        assert_eq!(perfect_matchings(4).len(), 3);
        assert_eq!(perfect_matchings(8).len(), 105);
    }

    #[test]
    fn singlet_properties() {
        let s2 = singlet_pi(2).unwrap();
        let psi = CVector::from_vec(vec![ZERO, C64::new(0.5f64.sqrt(), 0.0), C64::new(-(0.5f64.sqrt()), 0.0), ZERO]);
        assert!(max_abs(&(s2.density_matrix().into_owned() - outer(&psi))) < 1e-15);
        for n in [4, 6] {
            let s = singlet_pi(n).unwrap();
            s.validate().unwrap();
            let rep = Representation::Full(n);
            for a in Axis::ALL {
                let op = build_collective(a, rep).unwrap();
                assert!(s.expect(&op).abs() < 1e-9);
                assert!(s.second_moment(&op).abs() < 1e-9);
            }
        }
        assert!(singlet_pi(3).is_err());
    }

    #[test]
    fn singlet_is_rotation_invariant() {
        let s = singlet_pi(4).unwrap();
        let rep = Representation::Full(4);
        let mut rng = random::rng(21);
        for _ in 0..5 {
            let n = random::unit_vector3(&mut rng);
            let op = crate::spin::build_direction(n, rep).unwrap();
            let r = rotate(&s, &op, 1.234).unwrap();
            assert!(max_abs(&(r.density_matrix().into_owned() - s.density_matrix().into_owned())) < 1e-10);
        }
    }

    #[test]
    fn ground_state_matches_dense_diagonalization() {
        for &(n, lambda) in &[(2usize, 0.0), (4, 0.3), (10, 1.7), (20, 5.0), (16, 0.0)] {
            let spec = SqueezingSpec::new(n, lambda).unwrap();
            let g = squeezed_ground_state(spec).unwrap();
            let h = squeezing_hamiltonian(spec).unwrap();
            let dense = hermitian_eigendecompose(&h).unwrap();
            assert!((g.energy - dense.eigenvalues[0]).abs() < 1e-10);
            assert!((g.gap - (dense.eigenvalues[1] - dense.eigenvalues[0])).abs() < 1e-9);
            let overlap = dense.eigenvector(0).dotc(g.state.vector().unwrap()).norm();
            assert!((overlap - 1.0).abs() < 1e-10, "overlap {overlap}");
            assert!(!g.degenerate);
        }
    }

    #[test]
    fn ground_state_limits() {
        let g = squeezed_ground_state(SqueezingSpec::new(8, 0.0).unwrap()).unwrap();
        let x = jx(sym(8)).unwrap();
        assert!(g.state.second_moment(&x).abs() < 1e-10);
        let far = squeezed_ground_state(SqueezingSpec::new(8, 1e6).unwrap()).unwrap();
        let p = polarized(8, Axis::Z, sym(8)).unwrap();
        assert!(far.state.vector().unwrap().dotc(p.vector().unwrap()).norm() > 1.0 - 1e-9);
        assert!(SqueezingSpec::new(7, 1.0).is_err());
        assert!(SqueezingSpec::new(8, -1.0).is_err());
    }

    #[test]
    fn white_noise_mixture() {
        let g = ghz(2, Axis::X, Representation::Full(2)).unwrap();
        let one = mix_white_noise(&g, 1.0).unwrap();
        assert!(max_abs(&(one.density_matrix().into_owned() - g.density_matrix().into_owned())) < 1e-15);
        let zero = mix_white_noise(&g, 0.0).unwrap();
        let mm = maximally_mixed(Representation::Full(2)).unwrap();
        assert!(max_abs(&(zero.density_matrix().into_owned() - mm.density_matrix().into_owned())) < 1e-15);
        assert!(mix_white_noise(&g, 1.5).is_err());
        assert!(matches!(mix_white_noise(&mm, 0.5), Err(Error::NotPure)));
    }

    #[test]
    fn invalid_states_rejected() {
        let rep = Representation::Full(1);
        assert!(QuantumState::pure(rep, CVector::from_vec(vec![ONE, ONE]), "bad").is_err());
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(1.5, 0.0), ZERO, ZERO, C64::new(-0.5, 0.0)]);
        assert!(matches!(QuantumState::density(rep, m, "bad"), Err(Error::NotPsd { .. })));
    }
}
