//! Compressed sparse row storage for collective operators.
//!
//! Collective spin operators in the full `2^N` space have at most `N + 1`
//! nonzeros per row, so products against dense states are far cheaper in CSR
//! form than as dense matrix products.

use super::{CMatrix, CVector, C64, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and zeros dropped.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            col_idx.push(c);
            values.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut m = CsrMatrix { n, row_ptr, col_idx, values };
        m.prune();
        m
    }

    pub fn from_dense(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut t = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let v = m[(r, c)];
                if v != ZERO {
                    t.push((r, c, v));
                }
            }
        }
        Self::from_triplets(n, t)
    }

    fn prune(&mut self) {
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx = Vec::with_capacity(self.values.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.values[k] != ZERO {
                    col_idx.push(self.col_idx[k]);
                    values.push(self.values[k]);
                }
            }
            row_ptr[r + 1] = values.len();
        }
        self.row_ptr = row_ptr;
        self.col_idx = col_idx;
        self.values = values;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.col_idx[k], self.values[k]))
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                out[(r, c)] += v;
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &CVector) -> CVector {
        CVector::from_iterator(self.n, (0..self.n).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()))
    }

    /// `S · D`.
    pub fn mul_dense(&self, d: &CMatrix) -> CMatrix {
        let cols = d.ncols();
        let mut out = CMatrix::zeros(self.n, cols);
        for j in 0..cols {
            let src = d.column(j);
            let mut dst = out.column_mut(j);
            for r in 0..self.n {
                let mut acc = ZERO;
                for (c, v) in self.row(r) {
                    acc += v * src[c];
                }
                dst[r] = acc;
            }
        }
        out
    }

    /// `D · S`.
    pub fn dense_mul(&self, d: &CMatrix) -> CMatrix {
        let rows = d.nrows();
        let mut out = CMatrix::zeros(rows, self.n);
        for r in 0..self.n {
            let src = d.column(r);
            for (c, v) in self.row(r) {
                let mut dst = out.column_mut(c);
                for i in 0..rows {
                    dst[i] += src[i] * v;
                }
            }
        }
        out
    }

    /// `Tr(S · D)`.
    pub fn trace_with(&self, d: &CMatrix) -> C64 {
        let mut acc = ZERO;
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                acc += v * d[(c, r)];
            }
        }
        acc
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v *= s;
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in sparse add");
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.n {
            t.extend(self.row(r).map(|(c, v)| (r, c, v)));
            t.extend(other.row(r).map(|(c, v)| (r, c, v)));
        }
        Self::from_triplets(self.n, t)
    }

    pub fn mul_sparse(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in sparse product");
        let mut t = Vec::new();
        for r in 0..self.n {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    t.push((r, c, a * b));
                }
            }
        }
        Self::from_triplets(self.n, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::max_abs;
    use crate::random;

    fn sparse_sample(n: usize, seed: u64) -> CMatrix {
        let mut rng = random::rng(seed);
        let mut m = random::ginibre(n, n, &mut rng);
        for r in 0..n {
            for c in 0..n {
                if (r * 7 + c * 3) % 4 != 0 {
                    m[(r, c)] = ZERO;
                }
            }
        }
        m
    }

    #[test]
    fn products_match_dense() {
        let a = sparse_sample(9, 1);
        let b = sparse_sample(9, 2);
        let mut rng = random::rng(3);
        let d = random::ginibre(9, 9, &mut rng);
        let x = random::pure_state(9, &mut rng);
        let s = CsrMatrix::from_dense(&a);
        assert!(max_abs(&(s.to_dense() - &a)) == 0.0);
        assert!(max_abs(&(s.mul_dense(&d) - &a * &d)) < 1e-12);
        assert!(max_abs(&(s.dense_mul(&d) - &d * &a)) < 1e-12);
        assert!((s.mul_vec(&x) - &a * &x).norm() < 1e-12);
        assert!((s.trace_with(&d) - (&a * &d).trace()).norm() < 1e-12);
        let sb = CsrMatrix::from_dense(&b);
        assert!(max_abs(&(s.mul_sparse(&sb).to_dense() - &a * &b)) < 1e-12);
        assert!(max_abs(&(s.add(&sb).to_dense() - (&a + &b))) < 1e-12);
    }

    #[test]
    fn duplicate_triplets_sum() {
        let one = C64::new(1.0, 0.0);
        let s = CsrMatrix::from_triplets(2, vec![(0, 1, one), (0, 1, one), (1, 0, one), (1, 0, -one)]);
        assert_eq!(s.nnz(), 1);
        assert_eq!(s.to_dense()[(0, 1)], C64::new(2.0, 0.0));
    }
}
