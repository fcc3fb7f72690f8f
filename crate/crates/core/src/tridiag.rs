//! Tridiagonal matrices: Gaussian elimination with partial pivoting and
//! symmetric positive-definiteness probing.

#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    /// Sub-diagonal, `lower[i]` sits at row `i + 1`, column `i`.
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    /// Super-diagonal, `upper[i]` sits at row `i`, column `i + 1`.
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Tridiagonal { lower: vec![0.0; n.saturating_sub(1)], diag: vec![0.0; n], upper: vec![0.0; n.saturating_sub(1)] }
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Self::zeros(n);
        t.diag.iter_mut().for_each(|d| *d = 1.0);
        t
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Solves `A x = b`; `None` when the matrix is numerically singular.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.dim();
        if n == 0 {
            return Some(Vec::new());
        }
        // Row i holds entries at columns i-1 (only before elimination), i, i+1, i+2 (fill-in).
        let mut d = self.diag.clone();
        let mut u1: Vec<f64> = self.upper.iter().copied().chain(std::iter::once(0.0)).collect();
        let mut u2 = vec![0.0; n];
        let mut l = self.lower.clone();
        let mut rhs = b.to_vec();
        let scale =
            self.diag.iter().chain(self.upper.iter()).chain(self.lower.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = scale * 1e-300_f64.max(f64::EPSILON * 1e-4);
        for i in 0..n - 1 {
            if l[i].abs() > d[i].abs() {
                // swap rows i and i+1
                std::mem::swap(&mut d[i], &mut l[i]);
                std::mem::swap(&mut d[i + 1], &mut u1[i]);
                std::mem::swap(&mut u1[i + 1], &mut u2[i]);
                rhs.swap(i, i + 1);
            }
            if d[i].abs() <= tiny {
                return None;
            }
            let m = l[i] / d[i];
            d[i + 1] -= m * u1[i];
            u1[i + 1] -= m * u2[i];
            rhs[i + 1] -= m * rhs[i];
        }
        if d[n - 1].abs() <= tiny {
            return None;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= u2[i] * x[i + 2];
            }
            x[i] = s / d[i];
        }
        if x.iter().all(|v| v.is_finite()) {
            Some(x)
        } else {
            None
        }
    }

    /// True when the matrix is symmetric positive definite (all LDLᵀ pivots positive).
    pub fn is_spd(&self) -> bool {
        let n = self.dim();
        if self.lower != self.upper {
            return false;
        }
        let mut piv = 0.0;
        for i in 0..n {
            let mut d = self.diag[i];
            if i > 0 {
                d -= self.lower[i - 1] * self.lower[i - 1] / piv;
            }
            if !(d > 0.0) {
                return false;
            }
            piv = d;
        }
        true
    }
}
