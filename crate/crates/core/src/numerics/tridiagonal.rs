//! Lowest eigenpair of a real symmetric tridiagonal matrix.
//!
//! Eigenvalues come from Sturm-sequence bisection, the eigenvector from
//! inverse iteration with a shift just below the eigenvalue so the shifted
//! matrix stays positive definite and the Thomas algorithm needs no pivoting.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter(format!(
                "tridiagonal needs n diagonal and n-1 off-diagonal entries, got {} and {}",
                diag.len(),
                off.len()
            )));
        }
        Ok(SymTridiagonal { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.dim();
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..n {
            if i > 0 {
                let e = self.off[i - 1];
                q = self.diag[i] - x - e * e / q;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection to machine precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.dim());
        let (mut lo, mut hi) = self.gershgorin();
        let scale = self.norm_bound().max(f64::MIN_POSITIVE);
        lo -= 1e-12 * scale;
        hi += 1e-12 * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.off[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Solves `(T − σ) x = b` by the Thomas algorithm.
    fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0] - sigma;
        c[0] = if n > 1 { self.off[0] / denom } else { 0.0 };
        d[0] = b[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - sigma - self.off[i - 1] * c[i - 1];
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            d[i] = (b[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    }

    /// Lowest eigenpair. The eigenvector is normalized with its largest-magnitude
    /// component positive.
    pub fn lowest(&self) -> Eigenpair {
        let n = self.dim();
        let value = self.eigenvalue(0);
        if n == 1 {
            return Eigenpair { value, vector: vec![1.0] };
        }
        let scale = self.norm_bound().max(1.0);
        let sigma = value - 1e-11 * scale;
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919) % 101) as f64).collect();
        normalize(&mut x);
        for _ in 0..50 {
            let mut y = self.solve_shifted(sigma, &x);
            normalize(&mut y);
            let diff: f64 = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            x = y;
            if diff < 1e-15 {
                break;
            }
        }
        fix_sign(&mut x);
        Eigenpair { value, vector: x }
    }
}

fn normalize(x: &mut [f64]) {
    let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in x.iter_mut() {
        *v /= nrm;
    }
}

fn fix_sign(x: &mut [f64]) {
    let mut best = 0;
    for i in 0..x.len() {
        if x[i].abs() > x[best].abs() * (1.0 + 1e-9) {
            best = i;
        }
    }
    if x[best] < 0.0 {
        for v in x.iter_mut() {
            *v = -*v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{hermitian_eigendecompose, CMatrix, C64};

    fn dense(t: &SymTridiagonal) -> CMatrix {
        let n = t.dim();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(t.diag[i], 0.0);
            if i + 1 < n {
                m[(i, i + 1)] = C64::new(t.off[i], 0.0);
                m[(i + 1, i)] = C64::new(t.off[i], 0.0);
            }
        }
        m
    }

    #[test]
    fn matches_dense_solver() {
        for seed in 0..10u64 {
            let n = 3 + seed as usize * 4;
            let diag: Vec<f64> = (0..n).map(|i| ((i as f64 + seed as f64) * 1.3).sin() * 3.0).collect();
            let off: Vec<f64> = (0..n - 1).map(|i| ((i as f64) * 0.7 + 0.2).cos()).collect();
            let t = SymTridiagonal::new(diag, off).unwrap();
            let spec = hermitian_eigendecompose(&dense(&t)).unwrap();
            for k in 0..n {
                assert!((t.eigenvalue(k) - spec.eigenvalues[k]).abs() < 1e-12);
            }
            let low = t.lowest();
            let tx = t.mul_vec(&low.vector);
            let resid = tx.iter().zip(&low.vector).map(|(a, b)| (a - low.value * b).abs()).fold(0.0, f64::max);
            assert!(resid < 1e-10, "residual {resid}");
        }
    }

    #[test]
    fn counts_bracket_spectrum() {
        let t = SymTridiagonal::new(vec![2.0, 2.0, 2.0], vec![-1.0, -1.0]).unwrap();
        assert_eq!(t.count_below(-10.0), 0);
        assert_eq!(t.count_below(10.0), 3);
        let exact = 2.0 - 2.0f64.sqrt();
        assert!((t.eigenvalue(0) - exact).abs() < 1e-14);
    }
}
