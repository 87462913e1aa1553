//! Dense real LU with partial pivoting.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone)]
pub(crate) struct Matrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: alloc::vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Solve `A x = b` in place, consuming the matrix.
    pub fn solve(mut self, mut b: Vec<f64>) -> Result<Vec<f64>> {
        let n = self.n;
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::SingularSystem);
        }
        let tiny = scale * 1e-14 * n as f64;
        for k in 0..n {
            let (mut piv, mut best) = (k, self.get(k, k).abs());
            for i in k + 1..n {
                let v = self.get(i, k).abs();
                if v > best {
                    piv = i;
                    best = v;
                }
            }
            if best <= tiny {
                return Err(Error::SingularSystem);
            }
            if piv != k {
                for j in 0..n {
                    self.data.swap(k * n + j, piv * n + j);
                }
                b.swap(k, piv);
            }
            let pivot = self.get(k, k);
            let (top, rest) = self.data.split_at_mut((k + 1) * n);
            let row_k = &top[k * n..];
            for i in 0..n - k - 1 {
                let row = &mut rest[i * n..(i + 1) * n];
                let f = row[k] / pivot;
                if f != 0.0 {
                    row[k] = f;
                    for j in k + 1..n {
                        row[j] -= f * row_k[j];
                    }
                    b[k + 1 + i] -= f * b[k];
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..n {
                s -= self.get(k, j) * b[j];
            }
            b[k] = s / self.get(k, k);
        }
        Ok(b)
    }
}
