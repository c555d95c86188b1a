//! Collective angular-momentum operators in the full `2^N` space and the
//! symmetric (Dicke) subspace.
//!
//! Conventions: `ħ = 1`, single-particle spin `j_l = σ_l / 2`, `|0⟩` is spin up.
//! In the full space qubit 1 is the most significant bit of the basis index.
//! In the symmetric space basis index `k` counts flipped spins, so the state
//! has `J_z = N/2 − k`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::sparse::CsrMatrix;
use crate::numerics::{check_hermitian, CMatrix, CVector, C64, I, ONE, TOL};
use crate::states::QuantumState;

pub const FULL_VECTOR_LIMIT: usize = 12;
pub const FULL_DENSITY_LIMIT: usize = 10;
pub const SYMMETRIC_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn unit(self) -> [f64; 3] {
        let mut v = [0.0; 3];
        v[self.index()] = 1.0;
        v
    }

    /// The two remaining axes in cyclic order.
    pub fn others(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::Z, Axis::X),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" | "jx" => Ok(Axis::X),
            "y" | "jy" => Ok(Axis::Y),
            "z" | "jz" => Ok(Axis::Z),
            other => Err(Error::InvalidParameter(format!("unknown axis '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    Full(usize),
    Symmetric(usize),
}

impl Representation {
    pub fn n(self) -> usize {
        match self {
            Representation::Full(n) | Representation::Symmetric(n) => n,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Representation::Full(n) => 1usize << n,
            Representation::Symmetric(n) => n + 1,
        }
    }

    pub fn is_full(self) -> bool {
        matches!(self, Representation::Full(_))
    }

    /// Checks the size limit for state vectors and operators.
    pub fn check_vector(self) -> Result<()> {
        let (n, limit, what) = match self {
            Representation::Full(n) => (n, FULL_VECTOR_LIMIT, "qubits in the full representation"),
            Representation::Symmetric(n) => (n, SYMMETRIC_LIMIT, "qubits in the symmetric representation"),
        };
        if n == 0 {
            return Err(Error::InvalidParameter("at least one qubit is required".into()));
        }
        if n > limit {
            return Err(Error::SizeLimit { what, n, limit });
        }
        Ok(())
    }

    /// Checks the size limit for density matrices.
    pub fn check_density(self) -> Result<()> {
        self.check_vector()?;
        if let Representation::Full(n) = self {
            if n > FULL_DENSITY_LIMIT {
                return Err(Error::SizeLimit {
                    what: "qubits for full-representation density matrices",
                    n,
                    limit: FULL_DENSITY_LIMIT,
                });
            }
        }
        Ok(())
    }

    pub fn ensure_same(self, other: Representation) -> Result<()> {
        if self != other {
            return Err(Error::RepresentationMismatch { left: self.to_string(), right: other.to_string() });
        }
        Ok(())
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representation::Full(n) => write!(f, "full({n})"),
            Representation::Symmetric(n) => write!(f, "symmetric({n})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Axis(Axis),
    Direction([f64; 3]),
    /// `Σ_n w_n j_axis^{(n)}`.
    Weighted { axis: Axis, weights: Vec<f64> },
    /// Tensor product of one Pauli matrix on every qubit.
    Parity(Axis),
    User(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Axis(a) => write!(f, "J_{a}"),
            Provenance::Direction(n) => write!(f, "J_n(n=[{}, {}, {}])", n[0], n[1], n[2]),
            Provenance::Weighted { axis, weights } => write!(f, "sum_n w_n j_{axis}^(n) (N={})", weights.len()),
            Provenance::Parity(a) => write!(f, "sigma_{a}^(x)N"),
            Provenance::User(s) => f.write_str(s),
        }
    }
}

#[derive(Debug)]
struct OpInner {
    sparse: Arc<CsrMatrix>,
    dense: OnceLock<CMatrix>,
    rep: Representation,
    provenance: Provenance,
    norm_bound: f64,
}

/// Hermitian operator on a qubit register with the recipe that produced it.
#[derive(Debug, Clone)]
pub struct CollectiveOperator {
    inner: Arc<OpInner>,
}

impl CollectiveOperator {
    fn from_parts(sparse: Arc<CsrMatrix>, rep: Representation, provenance: Provenance) -> Self {
        let norm_bound = (0..sparse.dim())
            .map(|r| sparse.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        CollectiveOperator {
            inner: Arc::new(OpInner { sparse, dense: OnceLock::new(), rep, provenance, norm_bound }),
        }
    }

    /// Wraps a user-supplied Hermitian matrix.
    pub fn user(matrix: CMatrix, rep: Representation, label: impl Into<String>) -> Result<Self> {
        if matrix.nrows() != rep.dim() {
            return Err(Error::DimensionMismatch { left: matrix.nrows(), right: rep.dim() });
        }
        check_hermitian(&matrix)?;
        let sparse = Arc::new(CsrMatrix::from_dense(&matrix));
        let op = Self::from_parts(sparse, rep, Provenance::User(label.into()));
        let _ = op.inner.dense.set(matrix);
        Ok(op)
    }

    pub fn user_sparse(sparse: CsrMatrix, rep: Representation, label: impl Into<String>) -> Result<Self> {
        if sparse.dim() != rep.dim() {
            return Err(Error::DimensionMismatch { left: sparse.dim(), right: rep.dim() });
        }
        let op = Self::from_parts(Arc::new(sparse), rep, Provenance::User(label.into()));
        if op.dim() <= 512 {
            check_hermitian(op.dense())?;
        }
        Ok(op)
    }

    pub fn rep(&self) -> Representation {
        self.inner.rep
    }

    pub fn dim(&self) -> usize {
        self.inner.sparse.dim()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.inner.provenance
    }

    pub fn sparse(&self) -> &CsrMatrix {
        &self.inner.sparse
    }

    /// Dense matrix, built on first use.
    pub fn dense(&self) -> &CMatrix {
        self.inner.dense.get_or_init(|| self.inner.sparse.to_dense())
    }

    /// Upper bound on the operator norm (maximum absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        self.inner.norm_bound
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        self.inner.sparse.mul_vec(x)
    }

    pub fn apply_mat(&self, x: &CMatrix) -> CMatrix {
        self.inner.sparse.mul_dense(x)
    }

    pub fn right_apply_mat(&self, x: &CMatrix) -> CMatrix {
        self.inner.sparse.dense_mul(x)
    }

    /// `Σ c_i O_i` for operators on a common representation.
    pub fn linear_combination(terms: &[(f64, &CollectiveOperator)], provenance: Provenance) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        let rep = first.1.rep();
        let mut acc = CsrMatrix::from_triplets(rep.dim(), vec![]);
        for (c, op) in terms {
            rep.ensure_same(op.rep())?;
            acc = acc.add(&op.sparse().scale(C64::new(*c, 0.0)));
        }
        Ok(Self::from_parts(Arc::new(acc), rep, provenance))
    }

    /// `O^q`, used for the q-body scaling bound.
    pub fn power(&self, q: u32) -> Self {
        let mut acc = CsrMatrix::from_triplets(self.dim(), (0..self.dim()).map(|i| (i, i, ONE)).collect());
        for _ in 0..q {
            acc = acc.mul_sparse(self.sparse());
        }
        Self::from_parts(Arc::new(acc), self.rep(), Provenance::User(format!("({})^{q}", self.provenance())))
    }

    /// `O²` as a sparse matrix.
    pub fn square(&self) -> CsrMatrix {
        self.sparse().mul_sparse(self.sparse())
    }
}

type CacheKey = (Axis, Representation);

static CACHE: LazyLock<Mutex<HashMap<CacheKey, Arc<CsrMatrix>>>> = LazyLock::new(|| Mutex::new(HashMap::new()));

/// Collective spin component `J_axis`. Cached per `(axis, rep)`.
pub fn build_collective(axis: Axis, rep: Representation) -> Result<CollectiveOperator> {
    rep.check_vector()?;
    let key = (axis, rep);
    let cached = CACHE.lock().expect("operator cache poisoned").get(&key).cloned();
    let sparse = match cached {
        Some(s) => s,
        None => {
            let built = Arc::new(match rep {
                Representation::Full(n) => full_weighted(axis, &vec![1.0; n]),
                Representation::Symmetric(n) => symmetric_axis(axis, n),
            });
            CACHE.lock().expect("operator cache poisoned").entry(key).or_insert(built).clone()
        }
    };
    Ok(CollectiveOperator::from_parts(sparse, rep, Provenance::Axis(axis)))
}

pub fn jx(rep: Representation) -> Result<CollectiveOperator> {
    build_collective(Axis::X, rep)
}

pub fn jy(rep: Representation) -> Result<CollectiveOperator> {
    build_collective(Axis::Y, rep)
}

pub fn jz(rep: Representation) -> Result<CollectiveOperator> {
    build_collective(Axis::Z, rep)
}

/// `J_n = Σ_l n_l J_l` for a unit vector `n`.
pub fn build_direction(n: [f64; 3], rep: Representation) -> Result<CollectiveOperator> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (norm - 1.0).abs() > TOL.unit_vector || !norm.is_finite() {
        return Err(Error::NonUnitVector { norm });
    }
    let ops: Vec<CollectiveOperator> = Axis::ALL.iter().map(|&a| build_collective(a, rep)).collect::<Result<_>>()?;
    let terms: Vec<(f64, &CollectiveOperator)> =
        n.iter().zip(&ops).filter(|(c, _)| **c != 0.0).map(|(c, o)| (*c, o)).collect();
    if terms.len() == 1 && terms[0].0 == 1.0 {
        return Ok(CollectiveOperator::from_parts(terms[0].1.inner.sparse.clone(), rep, Provenance::Direction(n)));
    }
    CollectiveOperator::linear_combination(&terms, Provenance::Direction(n))
}

/// `Σ_n w_n j_axis^{(n)}` in the full representation.
pub fn build_weighted(axis: Axis, weights: &[f64], rep: Representation) -> Result<CollectiveOperator> {
    match rep {
        Representation::Symmetric(_) => Err(Error::Unsupported(
            "site-weighted generators are not permutation invariant and need the full representation".into(),
        )),
        Representation::Full(n) => {
            rep.check_vector()?;
            if weights.len() != n {
                return Err(Error::DimensionMismatch { left: weights.len(), right: n });
            }
            Ok(CollectiveOperator::from_parts(
                Arc::new(full_weighted(axis, weights)),
                rep,
                Provenance::Weighted { axis, weights: weights.to_vec() },
            ))
        }
    }
}

/// Gradient generator `Σ_n n · j_y^{(n)}` with site index `n = 1..N`.
///
/// With `centered` the weights become `n − (N+1)/2`, which removes the
/// homogeneous `J_y` component.
pub fn build_gradient_generator(rep: Representation, centered: bool) -> Result<CollectiveOperator> {
    let n = rep.n();
    let shift = if centered { (n as f64 + 1.0) / 2.0 } else { 0.0 };
    let weights: Vec<f64> = (1..=n).map(|i| i as f64 - shift).collect();
    build_weighted(Axis::Y, &weights, rep)
}

/// `σ_axis^{⊗N}`.
pub fn parity(axis: Axis, rep: Representation) -> Result<CollectiveOperator> {
    rep.check_vector()?;
    let n = rep.n();
    let dim = rep.dim();
    // σ_y = i|1⟩⟨0| − i|0⟩⟨1|, so σ_y^{⊗N} picks up i per up spin and −i per down spin
    let y_phase = |downs: usize| -> C64 { I.powu(n as u32) * if downs.is_multiple_of(2) { ONE } else { -ONE } };
    let triplets: Vec<(usize, usize, C64)> = match rep {
        Representation::Full(_) => {
            let all = dim - 1;
            (0..dim)
                .map(|b| {
                    let downs = b.count_ones() as usize;
                    match axis {
                        Axis::X => (b ^ all, b, ONE),
                        Axis::Y => (b ^ all, b, y_phase(downs)),
                        Axis::Z => (b, b, if downs.is_multiple_of(2) { ONE } else { -ONE }),
                    }
                })
                .collect()
        }
        Representation::Symmetric(_) => (0..dim)
            .map(|k| match axis {
                Axis::X => (n - k, k, ONE),
                Axis::Y => (n - k, k, y_phase(k)),
                Axis::Z => (k, k, if k % 2 == 0 { ONE } else { -ONE }),
            })
            .collect(),
    };
    Ok(CollectiveOperator::from_parts(Arc::new(CsrMatrix::from_triplets(dim, triplets)), rep, Provenance::Parity(axis)))
}

/// Isometry from the symmetric subspace into the full space; column `k` is the
/// normalized symmetric Dicke vector with `k` flipped spins.
pub fn embed_symmetric(n: usize) -> Result<CMatrix> {
    Representation::Full(n).check_vector()?;
    let dim = 1usize << n;
    let mut e = CMatrix::zeros(dim, n + 1);
    for b in 0..dim {
        let k = b.count_ones() as usize;
        e[(b, k)] = C64::new(1.0 / binomial(n, k).sqrt(), 0.0);
    }
    Ok(e)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

fn full_weighted(axis: Axis, weights: &[f64]) -> CsrMatrix {
    let n = weights.len();
    let dim = 1usize << n;
    let mut triplets = Vec::with_capacity(dim * (n + 1));
    for b in 0..dim {
        let mut diag = 0.0;
        for (site, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let mask = 1usize << (n - 1 - site);
            let down = b & mask != 0;
            match axis {
                Axis::Z => diag += if down { -0.5 * w } else { 0.5 * w },
                Axis::X => triplets.push((b ^ mask, b, C64::new(0.5 * w, 0.0))),
                // σ_y|0⟩ = i|1⟩, σ_y|1⟩ = −i|0⟩
                Axis::Y => triplets.push((b ^ mask, b, if down { -I * (0.5 * w) } else { I * (0.5 * w) })),
            }
        }
        if axis == Axis::Z {
            triplets.push((b, b, C64::new(diag, 0.0)));
        }
    }
    CsrMatrix::from_triplets(dim, triplets)
}

/// `√(j(j+1) − m(m+1))`, the `J_+` matrix element from `m` to `m + 1`.
pub fn ladder_up(n: usize, m: f64) -> f64 {
    let j = n as f64 / 2.0;
    (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

/// `J_z` eigenvalue of symmetric basis index `k`.
pub fn symmetric_m(n: usize, k: usize) -> f64 {
    n as f64 / 2.0 - k as f64
}

fn symmetric_axis(axis: Axis, n: usize) -> CsrMatrix {
    let dim = n + 1;
    let mut triplets = Vec::with_capacity(2 * dim);
    for k in 0..dim {
        let m = symmetric_m(n, k);
        match axis {
            Axis::Z => triplets.push((k, k, C64::new(m, 0.0))),
            Axis::X | Axis::Y if k > 0 => {
                // J_+ maps index k (value m) to index k − 1 (value m + 1)
                let c = ladder_up(n, m) / 2.0;
                let (up, down) = if axis == Axis::X { (C64::new(c, 0.0), C64::new(c, 0.0)) } else { (-I * c, I * c) };
                triplets.push((k - 1, k, up));
                triplets.push((k, k - 1, down));
            }
            _ => {}
        }
    }
    CsrMatrix::from_triplets(dim, triplets)
}

/// `exp(−iθA) X` by a scaled Taylor series using only sparse products.
pub fn exp_apply(op: &CollectiveOperator, theta: f64, x: &CMatrix) -> CMatrix {
    if theta == 0.0 {
        return x.clone();
    }
    let scale = (theta.abs() * op.norm_bound()).max(0.0);
    let steps = (scale / 0.5).ceil().max(1.0) as usize;
    let h = C64::new(0.0, -theta / steps as f64);
    let mut out = x.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut sum = out.clone();
        let base = sum.norm().max(f64::MIN_POSITIVE);
        for k in 1..=60 {
            term = op.apply_mat(&term) * (h / k as f64);
            sum += &term;
            if term.norm() <= 1e-18 * base {
                break;
            }
        }
        out = sum;
    }
    out
}

/// `exp(−iθA) ψ`.
pub fn exp_apply_vec(op: &CollectiveOperator, theta: f64, psi: &CVector) -> CVector {
    let m = CMatrix::from_column_slice(psi.len(), 1, psi.as_slice());
    let r = exp_apply(op, theta, &m);
    CVector::from_column_slice(r.as_slice())
}

/// `e^{−iθA} ϱ e^{+iθA}`, or `e^{−iθA}|ψ⟩` for pure states.
pub fn rotate(state: &QuantumState, generator: &CollectiveOperator, theta: f64) -> Result<QuantumState> {
    state.rep().ensure_same(generator.rep())?;
    if theta == 0.0 {
        return Ok(state.clone());
    }
    let label = format!("{} rotated", state.label());
    match state.vector() {
        Some(psi) => {
            let mut v = exp_apply_vec(generator, theta, psi);
            let nrm = v.norm();
            v.unscale_mut(nrm);
            Ok(QuantumState::pure_trusted(state.rep(), v, label))
        }
        None => {
            let rho = state.density_matrix();
            let left = exp_apply(generator, theta, &rho);
            // (U (U ϱ)†)† = U ϱ U†
            let both = exp_apply(generator, theta, &left.adjoint()).adjoint();
            let herm = (&both + both.adjoint()).scale(0.5);
            Ok(QuantumState::density_trusted(state.rep(), herm, label))
        }
    }
}

/// `J_x² + J_y² + J_z²`.
pub fn casimir(rep: Representation) -> Result<CollectiveOperator> {
    let mut acc = CsrMatrix::from_triplets(rep.dim(), vec![]);
    for a in Axis::ALL {
        acc = acc.add(&build_collective(a, rep)?.square());
    }
    Ok(CollectiveOperator::from_parts(Arc::new(acc), rep, Provenance::User("J^2".into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{commutator, hermitian_eigendecompose, kron, max_abs, pauli_x, pauli_y, pauli_z, identity};

    fn reps(n: usize) -> [Representation; 2] {
        [Representation::Full(n), Representation::Symmetric(n)]
    }

    #[test]
    fn commutation_relations_both_reps() {
        for rep in reps(6) {
            let x = jx(rep).unwrap().dense().clone();
            let y = jy(rep).unwrap().dense().clone();
            let z = jz(rep).unwrap().dense().clone();
            assert!(max_abs(&(commutator(&x, &y) - z.clone() * I)) < 1e-10);
            assert!(max_abs(&(commutator(&y, &z) - x.clone() * I)) < 1e-10);
            assert!(max_abs(&(commutator(&z, &x) - y * I)) < 1e-10);
        }
    }

    #[test]
    fn full_rep_matches_kronecker_sum() {
        let n = 3;
        let paulis = [pauli_x(), pauli_y(), pauli_z()];
        for a in Axis::ALL {
            let mut expected = CMatrix::zeros(8, 8);
            for site in 0..n {
                let mut term = identity(1);
                for s in 0..n {
                    let f = if s == site { paulis[a.index()].scale(0.5) } else { identity(2) };
                    term = kron(&term, &f);
                }
                expected += term;
            }
            let got = build_collective(a, Representation::Full(n)).unwrap();
            assert!(max_abs(&(got.dense() - expected)) < 1e-15);
        }
    }

    #[test]
    fn symmetric_jz_diagonal() {
        let z = jz(Representation::Symmetric(4)).unwrap();
        let d: Vec<f64> = (0..5).map(|k| z.dense()[(k, k)].re).collect();
        assert_eq!(d, vec![2.0, 1.0, 0.0, -1.0, -2.0]);
    }

    #[test]
    fn symmetric_matches_restricted_full() {
        let n = 5;
        let e = embed_symmetric(n).unwrap();
        for a in Axis::ALL {
            let full = build_collective(a, Representation::Full(n)).unwrap();
            let sym = build_collective(a, Representation::Symmetric(n)).unwrap();
            let restricted = e.adjoint() * full.dense() * &e;
            assert!(max_abs(&(restricted - sym.dense())) < 1e-12);
        }
    }

    #[test]
    fn direction_operator() {
        let rep = Representation::Symmetric(6);
        let z = build_direction([0.0, 0.0, 1.0], rep).unwrap();
        assert!(max_abs(&(z.dense() - jz(rep).unwrap().dense())) == 0.0);
        let s = 1.0 / 3f64.sqrt();
        let d = build_direction([s, s, s], rep).unwrap();
        let spec = hermitian_eigendecompose(d.dense()).unwrap();
        assert!((spec.eigenvalues[0] + 3.0).abs() < 1e-12);
        assert!((spec.eigenvalues[6] - 3.0).abs() < 1e-12);
        let lin = (jx(rep).unwrap().dense() + jy(rep).unwrap().dense() + jz(rep).unwrap().dense()).scale(s);
        assert!(max_abs(&(lin - d.dense())) < 1e-12);
        assert!(matches!(build_direction([1.0, 1.0, 0.0], rep), Err(Error::NonUnitVector { .. })));
    }

    #[test]
    fn gradient_generator_definition() {
        let g1 = build_gradient_generator(Representation::Full(1), false).unwrap();
        assert!(max_abs(&(g1.dense() - pauli_y().scale(0.5))) < 1e-15);
        let g2 = build_gradient_generator(Representation::Full(2), false).unwrap();
        let jy1 = pauli_y().scale(0.5);
        let expected = kron(&jy1, &identity(2)) + kron(&identity(2), &jy1).scale(2.0);
        assert!(max_abs(&(g2.dense() - expected)) < 1e-15);
        assert!(matches!(build_gradient_generator(Representation::Symmetric(2), false), Err(Error::Unsupported(_))));
    }

    #[test]
    fn size_limits_name_the_limit() {
        match jx(Representation::Full(13)) {
            Err(Error::SizeLimit { limit, .. }) => assert_eq!(limit, FULL_VECTOR_LIMIT),
            other => panic!("unexpected {other:?}"),
        }
        assert!(jx(Representation::Symmetric(4097)).is_err());
    }

    #[test]
    fn parity_symmetric_matches_full() {
        let n = 4;
        let e = embed_symmetric(n).unwrap();
        for a in Axis::ALL {
            let full = parity(a, Representation::Full(n)).unwrap();
            let sym = parity(a, Representation::Symmetric(n)).unwrap();
            assert!(max_abs(&(e.adjoint() * full.dense() * &e - sym.dense())) < 1e-12);
            assert!(max_abs(&(full.dense() * full.dense() - identity(16))) < 1e-12);
        }
    }

    #[test]
    fn exp_apply_matches_spectral_exponential() {
        let rep = Representation::Symmetric(9);
        let a = build_direction([0.6, 0.0, 0.8], rep).unwrap();
        let x = identity(10);
        let u = exp_apply(&a, 2.3, &x);
        let v = crate::numerics::unitary_exp(a.dense(), 2.3, crate::numerics::Sign::Minus).unwrap();
        assert!(max_abs(&(u - v)) < 1e-12);
    }
}
