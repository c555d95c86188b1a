//! Dense complex linear algebra shared by every other module.
//!
//! Matrices are `nalgebra` dense matrices over `Complex64`. Hermitian
//! eigendecomposition is the workhorse: the Fisher information, square roots,
//! fidelities and unitary propagators are all spectral functions.

pub mod sparse;
pub mod tridiagonal;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Numerical thresholds used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Elementwise asymmetry allowed for a Hermitian matrix, relative to its largest entry.
    pub hermitian: f64,
    /// Eigenvalues above `-psd` are clamped to zero by PSD routines.
    pub psd: f64,
    /// Allowed deviation of norm or trace from one.
    pub normalization: f64,
    /// Pairs with `λ_k + λ_l` below this are dropped from Fisher information sums.
    pub support: f64,
    /// Margin applied when comparing a witness value against its threshold.
    pub verdict: f64,
    /// Deviation from unit norm accepted for direction vectors.
    pub unit_vector: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-12,
        psd: 1e-10,
        normalization: 1e-10,
        support: 1e-12,
        verdict: 1e-9,
        unit_vector: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub const TOL: Tolerances = Tolerances::DEFAULT;

/// Orientation of the phase in [`unitary_exp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// `Σ_k f(λ_k) |k⟩⟨k|`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            scaled.column_mut(k).scale_mut_c(w);
        }
        &scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|l| C64::new(l, 0.0))
    }

    /// Matrix elements `⟨k|A|l⟩` in the eigenbasis.
    pub fn transform(&self, a: &CMatrix) -> CMatrix {
        let v = &self.eigenvectors;
        v.adjoint() * (a * v)
    }
}

trait ScaleComplex {
    fn scale_mut_c(&mut self, w: C64);
}

impl<S> ScaleComplex for nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_c(&mut self, w: C64) {
        for z in self.iter_mut() {
            *z *= w;
        }
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Largest elementwise deviation `|M_ij − conj(M_ji)|`.
pub fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    Ok(m.nrows())
}

pub fn check_hermitian(m: &CMatrix) -> Result<()> {
    check_square(m)?;
    let scale = max_abs(m).max(1.0);
    let asym = max_asymmetry(m);
    let tolerance = TOL.hermitian * scale;
    if asym > tolerance {
        return Err(Error::NotHermitian { max_asymmetry: asym, tolerance });
    }
    Ok(())
}

pub fn is_hermitian(m: &CMatrix) -> bool {
    check_hermitian(m).is_ok()
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized before the solve so that round-off asymmetry
/// below the Hermitian tolerance never leaks into complex eigenvalues.
/// Each eigenvector is rephased so that its largest component is real and
/// positive, which makes the output deterministic.
pub fn hermitian_eigendecompose(m: &CMatrix) -> Result<SpectralDecomposition> {
    check_hermitian(m)?;
    let n = m.nrows();
    let (values, vectors) = if m.iter().all(|z| z.im == 0.0) {
        // real symmetric input: the real solver is several times faster
        let re = m.map(|z| z.re);
        let re = (&re + re.transpose()).scale(0.5);
        let eig = re.symmetric_eigen();
        (eig.eigenvalues, eig.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let eig = hermitian_part(m).symmetric_eigen();
        (eig.eigenvalues, eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = vectors.column(src);
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for (i, z) in col.iter().enumerate() {
            // first index within round-off of the maximum wins
            if z.norm() > best_abs * (1.0 + 1e-9) {
                best_abs = z.norm();
                best = i;
            }
        }
        let phase = if best_abs > 0.0 { col[best].conj() / best_abs } else { ONE };
        for i in 0..n {
            eigenvectors[(i, dst)] = col[i] * phase;
        }
    }
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// Principal square root of a positive semidefinite matrix.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let spec = hermitian_eigendecompose(m)?;
    let min = spec.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -TOL.psd {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(spec.map(|l| C64::new(l.max(0.0).sqrt(), 0.0)))
}

/// `exp(±iθA)` for Hermitian `A`, built from its spectral decomposition.
pub fn unitary_exp(a: &CMatrix, theta: f64, sign: Sign) -> Result<CMatrix> {
    let spec = hermitian_eigendecompose(a)?;
    Ok(unitary_from_spectrum(&spec, theta, sign))
}

pub fn unitary_from_spectrum(spec: &SpectralDecomposition, theta: f64, sign: Sign) -> CMatrix {
    let s = sign.factor();
    spec.map(|l| C64::from_polar(1.0, s * theta * l))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `Tr(AB)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// `⟨ψ|A|ψ⟩` real part.
pub fn expect_vec(psi: &CVector, a: &CMatrix) -> f64 {
    psi.dotc(&(a * psi)).re
}

/// `Tr(ϱA)` real part.
pub fn expect_mat(rho: &CMatrix, a: &CMatrix) -> f64 {
    trace_product(rho, a).re
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Embed a block-diagonal direct sum.
pub fn direct_sum(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        let d = b.nrows();
        out.view_mut((offset, offset), (d, d)).copy_from(b);
        offset += d;
    }
    out
}

/// Partial trace of a bipartite operator on `C^{d_a} ⊗ C^{d_b}` over the second factor.
pub fn partial_trace_second(m: &CMatrix, d_a: usize, d_b: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d_a, d_a);
    for i in 0..d_a {
        for j in 0..d_a {
            let mut acc = ZERO;
            for k in 0..d_b {
                acc += m[(i * d_b + k, j * d_b + k)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    #[test]
    fn diagonal_spectrum_is_trivial() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![real(2.0), real(1.0)]));
        let s = hermitian_eigendecompose(&m).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0]);
        assert!((s.eigenvectors[(1, 0)] - ONE).norm() < 1e-15);
        assert!((s.eigenvectors[(0, 1)] - ONE).norm() < 1e-15);
    }

    #[test]
    fn pauli_x_spectrum() {
        let s = hermitian_eigendecompose(&pauli_x()).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian_and_names_asymmetry() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, real(0.5), ZERO, ONE]);
        match hermitian_eigendecompose(&m) {
            Err(Error::NotHermitian { max_asymmetry, .. }) => assert!((max_asymmetry - 0.5).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        let mut rng = random::rng(7);
        for _ in 0..20 {
            let m = random::hermitian(8, &mut rng);
            let s = hermitian_eigendecompose(&m).unwrap();
            let resid = max_abs(&(s.reconstruct() - &m));
            assert!(resid <= 1e-10 * max_abs(&m), "residual {resid}");
            let gram = s.eigenvectors.adjoint() * &s.eigenvectors;
            assert!(max_abs(&(gram - identity(8))) < 1e-10);
            assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigendecomposition_is_deterministic() {
        let mut rng = random::rng(3);
        let m = random::hermitian(6, &mut rng);
        let a = hermitian_eigendecompose(&m).unwrap();
        let b = hermitian_eigendecompose(&m).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }

    #[test]
    fn psd_sqrt_cases() {
        assert!(max_abs(&(psd_sqrt(&identity(3)).unwrap() - identity(3))) < 1e-14);
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![real(4.0), real(9.0)]));
        let r = psd_sqrt(&d).unwrap();
        assert!((r[(0, 0)].re - 2.0).abs() < 1e-14 && (r[(1, 1)].re - 3.0).abs() < 1e-14);
        let mut rng = random::rng(11);
        let g = random::ginibre(6, 6, &mut rng);
        let p = &g * g.adjoint();
        let s = psd_sqrt(&p).unwrap();
        assert!(max_abs(&(&s * &s - &p)) < 1e-9);
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![real(-1e-3), real(1.0)]));
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn unitary_exp_cases() {
        let u = unitary_exp(&pauli_x(), 0.0, Sign::Minus).unwrap();
        assert!(max_abs(&(u - identity(2))) < 1e-15);
        let half_z = pauli_z().scale(0.5);
        let u = unitary_exp(&half_z, 2.0 * std::f64::consts::PI, Sign::Minus).unwrap();
        assert!(max_abs(&(u + identity(2))) < 1e-12);
        let mut rng = random::rng(5);
        for _ in 0..10 {
            let a = random::hermitian(6, &mut rng);
            let u = unitary_exp(&a, 0.7, Sign::Plus).unwrap();
            assert!(max_abs(&(u.adjoint() * &u - identity(6))) < 1e-10);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = random::rng(9);
        let a = random::density(2, 2, &mut rng);
        let b = random::density(3, 3, &mut rng);
        let ab = kron(&a, &b);
        assert!(max_abs(&(partial_trace_second(&ab, 2, 3) - a)) < 1e-14);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        assert!((log_log_slope(&xs, &ys).unwrap() - 2.0).abs() < 1e-12);
    }
}
