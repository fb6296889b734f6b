//! Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for
//! selected eigenvalues and inverse iteration for their vectors.

/// Symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e`
/// (`e.len() == d.len() - 1`).
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(d: Vec<f64>, e: Vec<f64>) -> Self {
        assert_eq!(e.len() + 1, d.len(), "off-diagonal length must be n-1");
        SymTridiagonal { d, e }
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (Sturm count from the pivots
    /// of `T - xI = LDLᵀ`).
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = self.d[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                q = self.d[i] - x - self.e[i - 1] * self.e[i - 1] / q;
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

    /// Gershgorin interval containing the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.e[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection, to the
    /// resolution of the floating-point grid.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len());
        let (mut lo, mut hi) = self.bounds();
        let scale = lo.abs().max(hi.abs());
        let span = hi - lo;
        lo -= 1e-12 * span + f64::MIN_POSITIVE;
        hi += 1e-12 * span + f64::MIN_POSITIVE;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale * 1e-3 {
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

    /// The lowest `count` eigenvalues in ascending order.
    pub fn lowest(&self, count: usize) -> Vec<f64> {
        (0..count.min(self.len())).map(|k| self.eigenvalue(k)).collect()
    }

    /// Unit eigenvector for the (accurate) eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let (lo, hi) = self.bounds();
        // nudge off the eigenvalue so the shifted matrix stays invertible
        let shift = lambda + 1e-10 * (hi - lo).max(1.0);
        let mut x = vec![1.0; n];
        for _ in 0..3 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    /// Solves `(T - σI) y = rhs` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            return vec![rhs[0] / (self.d[0] - sigma)];
        }
        // rows stored as (diag, upper, second upper) after pivoting
        let mut diag: Vec<f64> = self.d.iter().map(|d| d - sigma).collect();
        let mut upper: Vec<f64> = self.e.clone();
        upper.push(0.0);
        let mut upper2 = vec![0.0; n];
        let mut lower: Vec<f64> = self.e.clone();
        let mut b = rhs.to_vec();
        let tiny = 1e-300;
        for i in 0..n - 1 {
            if lower[i].abs() > diag[i].abs() {
                // swap rows i and i+1
                let (d0, u0, u20) = (diag[i], upper[i], upper2[i]);
                diag[i] = lower[i];
                upper[i] = diag[i + 1];
                upper2[i] = upper[i + 1];
                lower[i] = d0;
                diag[i + 1] = u0;
                upper[i + 1] = u20;
                b.swap(i, i + 1);
            }
            if diag[i] == 0.0 {
                diag[i] = tiny;
            }
            let factor = lower[i] / diag[i];
            diag[i + 1] -= factor * upper[i];
            upper[i + 1] -= factor * upper2[i];
            b[i + 1] -= factor * b[i];
        }
        if diag[n - 1] == 0.0 {
            diag[n - 1] = tiny;
        }
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= upper[i] * y[i + 1];
            }
            if i + 2 < n {
                v -= upper2[i] * y[i + 2];
            }
            y[i] = v / diag[i];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 50;
        let t = laplacian(n);
        let h = std::f64::consts::PI / (n as f64 + 1.0);
        for (k, got) in t.lowest(5).iter().enumerate() {
            let want = 2.0 - 2.0 * ((k as f64 + 1.0) * h).cos();
            assert!((got - want).abs() < 1e-13, "{k}: {got} vs {want}");
        }
        assert_eq!(t.count_below(0.0), 0);
        assert_eq!(t.count_below(4.0), n);
    }

    #[test]
    fn inverse_iteration_vector() {
        let n = 40;
        let t = laplacian(n);
        let lambda = t.eigenvalue(2);
        let v = t.eigenvector(lambda);
        // residual of T v - λ v
        let mut r = 0.0f64;
        for i in 0..n {
            let mut tv = t.d[i] * v[i];
            if i > 0 {
                tv += t.e[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                tv += t.e[i] * v[i + 1];
            }
            r = r.max((tv - lambda * v[i]).abs());
        }
        assert!(r < 1e-10, "{r:e}");
        // third mode has two interior sign changes
        let changes = v.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
        assert_eq!(changes, 2);
    }
}
