//! Dense real polynomials (ascending coefficients) and companion-matrix roots.

use nalgebra::DMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `(p + q x) * self`
    pub fn mul_linear(&self, p: f64, q: f64) -> Poly {
        let mut out = vec![0.0; self.0.len() + 1];
        for (k, &c) in self.0.iter().enumerate() {
            out[k] += p * c;
            out[k + 1] += q * c;
        }
        Poly(out)
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: f64, other: &Poly) -> Poly {
        let len = self.0.len().max(other.0.len());
        let out = (0..len)
            .map(|k| self.0.get(k).copied().unwrap_or(0.0) + s * other.0.get(k).copied().unwrap_or(0.0))
            .collect();
        Poly(out)
    }

    /// All roots of the polynomial as `(re, im)` pairs, from the eigenvalues
    /// of the companion matrix.
    pub fn roots(&self) -> Vec<(f64, f64)> {
        let d = self.degree();
        if d == 0 {
            return Vec::new();
        }
        let lead = self.0[d];
        let mut companion = DMatrix::<f64>::zeros(d, d);
        for i in 1..d {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..d {
            companion[(i, d - 1)] = -self.0[i] / lead;
        }
        companion.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_build() {
        // (x - 1)(x + 2) = x^2 + x - 2
        let p = Poly::constant(1.0).mul_linear(-1.0, 1.0).mul_linear(2.0, 1.0);
        assert_eq!(p.0, vec![-2.0, 1.0, 1.0]);
        assert_eq!(p.eval(3.0), 10.0);
        assert_eq!(p.add_scaled(2.0, &Poly::constant(1.0)).0, vec![0.0, 1.0, 1.0]);
    }

    #[test]
    fn companion_roots() {
        let p = Poly(vec![-6.0, 11.0, -6.0, 1.0]); // (x-1)(x-2)(x-3)
        let mut r: Vec<f64> = p.roots().iter().map(|z| z.0).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let q = Poly(vec![1.0, 0.0, 1.0]); // x^2 + 1
        assert!(q.roots().iter().all(|z| (z.1.abs() - 1.0).abs() < 1e-12));
    }
}
