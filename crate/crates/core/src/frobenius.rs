//! Power-series solutions about the origin and the truncation condition.
//!
//! Writing `R(ξ) = ξ^γ exp(-bξ/2 - ξ²/2) P(ξ)` with `P = Σ c_j ξ^j` turns the
//! radial equation into a three-term recurrence for `c_j`. Choosing
//! `W = (8(γ+n+1) - b²)/4` kills the `c_n` term of the recurrence at step `n`,
//! so `P` becomes a degree-`n` polynomial whenever in addition `c_{n+1} = 0`.
//! That last condition is a degree-`(n+1)` polynomial equation relating `a`
//! and `b`; each of its `n+1` real roots in `a` gives one "exact" solution.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Coefficients `c_0 ..= c_jmax` of the series factor `P(ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceSeries {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub w: f64,
    pub coeffs: Vec<f64>,
}

/// The `n+1` points `a^(n,i)(b)` sharing the truncation eigenvalue `w`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationSolution {
    pub gamma: f64,
    pub n: usize,
    pub b: f64,
    pub w: f64,
    /// Strictly increasing; `a_roots[i-1]` is the root labelled `i`.
    pub a_roots: Vec<f64>,
}

/// Residual tolerance on `|c_{n+1}|` for accepted roots.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Multipliers `(A_j, B_j)` in `c_{j+2} = A_j c_{j+1} + B_j c_j`.
fn step(gamma: f64, a: f64, b: f64, w: f64, j: i64) -> (f64, f64) {
    let jf = j as f64;
    let den = (jf + 2.0) * (2.0 * gamma + jf + 2.0);
    let first = (b * (2.0 * gamma + 2.0 * jf + 3.0) - 2.0 * a) / (2.0 * den);
    let second = (4.0 * (2.0 * gamma + 2.0 * jf - w + 2.0) - b * b) / (4.0 * den);
    (first, second)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma must be finite and >= 0, got {gamma}")));
    }
    Ok(())
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("truncation order n must be a positive integer (n = 1, 2, ...)".into()));
    }
    Ok(())
}

pub fn recurrence_coefficients(gamma: f64, a: f64, b: f64, w: f64, jmax: usize) -> Result<RecurrenceSeries> {
    check_gamma(gamma)?;
    if jmax == 0 {
        return Err(Error::InvalidArgument("jmax must be >= 1".into()));
    }
    let mut coeffs = Vec::with_capacity(jmax + 1);
    coeffs.push(1.0);
    let (first, _) = step(gamma, a, b, w, -1);
    coeffs.push(first);
    for j in 0..(jmax as i64 - 1) {
        let (first, second) = step(gamma, a, b, w, j);
        let next = first * coeffs[j as usize + 1] + second * coeffs[j as usize];
        coeffs.push(next);
    }
    Ok(RecurrenceSeries { gamma, a, b, w, coeffs })
}

/// Truncation eigenvalue `W_γ^(n)(b)`.
pub fn truncation_w(gamma: f64, n: usize, b: f64) -> f64 {
    (8.0 * (gamma + n as f64 + 1.0) - b * b) / 4.0
}

/// Which coupling is the unknown of the truncation polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unknown {
    A,
    B,
}

/// `(A_j, B_j)` on the truncation manifold, with `A_j = (p + q x)/den`.
/// `B_j` reduces to `2(j-n)/((j+2)(2γ+j+2))` once `W = W^(n)` is substituted,
/// in both parametrisations.
fn truncated_step(gamma: f64, n: usize, unknown: Unknown, fixed: f64, j: i64) -> (f64, f64, f64) {
    let jf = j as f64;
    let den = (jf + 2.0) * (2.0 * gamma + jf + 2.0);
    let (p, q) = match unknown {
        Unknown::A => (fixed * (2.0 * gamma + 2.0 * jf + 3.0), -2.0),
        Unknown::B => (-2.0 * fixed, 2.0 * gamma + 2.0 * jf + 3.0),
    };
    let second = 2.0 * (jf - n as f64) / den;
    (p / (2.0 * den), q / (2.0 * den), second)
}

/// `c_{n+1}` as a polynomial in the unknown coupling.
fn truncation_polynomial(gamma: f64, n: usize, unknown: Unknown, fixed: f64) -> Poly {
    let mut prev = Poly::constant(0.0);
    let mut cur = Poly::constant(1.0);
    for j in -1..(n as i64) {
        let (p, q, second) = truncated_step(gamma, n, unknown, fixed, j);
        let next = cur.mul_linear(p, q).add_scaled(second, &prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// `c_{n+1}` and its derivative with respect to the unknown.
fn truncation_value(gamma: f64, n: usize, unknown: Unknown, fixed: f64, x: f64) -> (f64, f64) {
    let (mut prev, mut dprev) = (0.0, 0.0);
    let (mut cur, mut dcur) = (1.0, 0.0);
    for j in -1..(n as i64) {
        let (p, q, second) = truncated_step(gamma, n, unknown, fixed, j);
        let lin = p + q * x;
        let next = lin * cur + second * prev;
        let dnext = q * cur + lin * dcur + second * dprev;
        prev = cur;
        dprev = dcur;
        cur = next;
        dcur = dnext;
    }
    (cur, dcur)
}

fn newton_polish(gamma: f64, n: usize, unknown: Unknown, fixed: f64, mut x: f64) -> f64 {
    for _ in 0..60 {
        let (f, df) = truncation_value(gamma, n, unknown, fixed, x);
        if f == 0.0 || df == 0.0 || !df.is_finite() {
            break;
        }
        let dx = f / df;
        x -= dx;
        if dx.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
            break;
        }
    }
    x
}

/// Independent residual: run the plain recurrence at the candidate point.
fn residual(gamma: f64, n: usize, a: f64, b: f64) -> f64 {
    let w = truncation_w(gamma, n, b);
    recurrence_coefficients(gamma, a, b, w, n + 1).map(|s| s.coeffs[n + 1].abs()).unwrap_or(f64::INFINITY)
}

fn polished_real_roots(gamma: f64, n: usize, unknown: Unknown, fixed: f64) -> Result<Vec<f64>> {
    let poly = truncation_polynomial(gamma, n, unknown, fixed);
    let mut roots: Vec<f64> = poly
        .roots()
        .into_iter()
        .filter(|&(re, im)| im.abs() < 1e-8 * (1.0 + re.abs()))
        .map(|(re, _)| newton_polish(gamma, n, unknown, fixed, re))
        .collect();
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-9 * (1.0 + x.abs()));
    for &root in &roots {
        let (a, b) = match unknown {
            Unknown::A => (root, fixed),
            Unknown::B => (fixed, root),
        };
        let r = residual(gamma, n, a, b);
        if !(r < RESIDUAL_TOL) {
            return Err(Error::ResidualTooLarge { root, residual: r });
        }
    }
    Ok(roots)
}

/// The `n+1` real roots `a^(n,i)(b)` of `c_{n+1} = 0` at `W = W_γ^(n)(b)`.
pub fn truncation_a_roots(gamma: f64, n: usize, b: f64) -> Result<TruncationSolution> {
    check_gamma(gamma)?;
    check_order(n)?;
    let a_roots = polished_real_roots(gamma, n, Unknown::A, b)?;
    if a_roots.len() != n + 1 {
        return Err(Error::RootCountMismatch { expected: n + 1, found: a_roots.len() });
    }
    Ok(TruncationSolution { gamma, n, b, w: truncation_w(gamma, n, b), a_roots })
}

/// Real roots `b` of `c_{n+1}(a; b) = 0` where `W = W_γ^(n)(b)` also moves
/// with `b`. The number of real roots is whatever exists.
pub fn truncation_b_roots(gamma: f64, n: usize, a: f64) -> Result<Vec<f64>> {
    check_gamma(gamma)?;
    check_order(n)?;
    polished_real_roots(gamma, n, Unknown::B, a)
}

/// Closed-form `n = 1` roots `(a^(1,1), a^(1,2))` at fixed `b`.
pub fn closed_form_n1(gamma: f64, b: f64) -> (f64, f64) {
    let centre = 2.0 * b * (gamma + 1.0);
    let root = (b * b + 8.0 * (2.0 * gamma + 1.0)).sqrt();
    ((centre - root) / 2.0, (centre + root) / 2.0)
}

/// Closed-form `n = 1` roots `(b^(1,1), b^(1,2))` at fixed `a`.
pub fn closed_form_n1_b(gamma: f64, a: f64) -> (f64, f64) {
    let g1 = 2.0 * gamma + 1.0;
    let g3 = 2.0 * gamma + 3.0;
    let root = (a * a + 2.0 * g3 * g1 * g1).sqrt();
    let centre = 2.0 * a * (gamma + 1.0);
    (2.0 * (centre - root) / (g1 * g3), 2.0 * (centre + root) / (g1 * g3))
}

/// Left-hand side of the `n = 2` cubic relating `a` and `b`; zero exactly on
/// the three `n = 2` curves.
pub fn cubic_n2_residual(gamma: f64, a: f64, b: f64) -> f64 {
    let g = gamma;
    4.0 * a.powi(3) - 6.0 * a * a * b * (2.0 * g + 3.0)
        + a * (b * b * (12.0 * g * g + 36.0 * g + 23.0) - 16.0 * (4.0 * g + 3.0))
        - b * (2.0 * g + 1.0) * (b * b * (2.0 * g + 3.0) * (2.0 * g + 5.0) - 16.0 * (4.0 * g + 7.0)) / 2.0
}

/// `R(ξ) = ξ^γ exp(-bξ/2 - ξ²/2) Σ_{j<=n} c_j ξ^j` for a series that
/// terminates at degree `n`.
pub fn polynomial_wavefunction(series: &RecurrenceSeries, n: usize, xi: f64) -> Result<f64> {
    check_order(n)?;
    if !(xi >= 0.0) {
        return Err(Error::InvalidArgument(format!("xi must be >= 0, got {xi}")));
    }
    let tail = series.coeffs.get(n + 1..).unwrap_or(&[]);
    if tail.is_empty() {
        return Err(Error::NotTruncated { degree: n, residual: f64::NAN });
    }
    let worst = tail.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if !(worst < RESIDUAL_TOL) {
        return Err(Error::NotTruncated { degree: n, residual: worst });
    }
    let p = series.coeffs[..=n].iter().rev().fold(0.0, |acc, &c| acc * xi + c);
    Ok(xi.powf(series.gamma) * (-series.b * xi / 2.0 - xi * xi / 2.0).exp() * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_ground_state_series_is_constant() {
        let s = recurrence_coefficients(0.0, 0.0, 0.0, 2.0, 4).unwrap();
        assert_eq!(s.coeffs, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let s = recurrence_coefficients(1.0, 0.0, 0.0, 4.0, 2).unwrap();
        assert_eq!(s.coeffs, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn two_steps_by_hand() {
        // c1 = (b(2γ+1) - 2a) / (2(2γ+1)) = (1 - 5)/2 = -2; c2 vanishes at W = 3.75
        let s = recurrence_coefficients(0.0, 2.5, 1.0, 3.75, 3).unwrap();
        assert_eq!(s.coeffs.len(), 4);
        assert_eq!(s.coeffs[0], 1.0);
        assert_eq!(s.coeffs[1], -2.0);
        assert!(s.coeffs[2].abs() < 1e-15 && s.coeffs[3].abs() < 1e-15);
    }

    #[test]
    fn rejects_zero_jmax_and_negative_gamma() {
        assert!(recurrence_coefficients(0.0, 0.0, 0.0, 1.0, 0).is_err());
        assert!(recurrence_coefficients(-0.5, 0.0, 0.0, 1.0, 3).is_err());
    }

    #[test]
    fn truncation_w_values() {
        assert_eq!(truncation_w(0.0, 2, 1.0), 5.75);
        assert_eq!(truncation_w(0.0, 1, 0.0), 4.0);
        assert_eq!(truncation_w(0.0, 1, 1.0), 3.75);
    }

    #[test]
    fn n_equal_zero_is_rejected() {
        assert!(matches!(truncation_a_roots(0.0, 0, 1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(truncation_b_roots(0.0, 0, 1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn reference_n2_roots() {
        let sol = truncation_a_roots(0.0, 2, 1.0).unwrap();
        assert_eq!(sol.w, 5.75);
        let want = [-1.940551663, 1.190016441, 5.250535221];
        for (got, want) in sol.a_roots.iter().zip(want) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn n1_roots_match_closed_form() {
        let sol = truncation_a_roots(0.0, 1, 1.0).unwrap();
        assert!((sol.a_roots[0] + 0.5).abs() < 1e-14 && (sol.a_roots[1] - 2.5).abs() < 1e-14);
        let sol = truncation_a_roots(0.0, 1, 0.0).unwrap();
        let s2 = 2f64.sqrt();
        assert!((sol.a_roots[0] + s2).abs() < 1e-14 && (sol.a_roots[1] - s2).abs() < 1e-14);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(closed_form_n1(0.0, 1.0), (-0.5, 2.5));
        let (lo, hi) = closed_form_n1(1.0, 0.0);
        assert!((lo + 24f64.sqrt() / 2.0).abs() < 1e-15 && (hi - 24f64.sqrt() / 2.0).abs() < 1e-15);
        let (lo, hi) = closed_form_n1_b(0.0, 0.0);
        let want = 2.0 * 6f64.sqrt() / 3.0;
        assert!((lo + want).abs() < 1e-15 && (hi - want).abs() < 1e-15);
    }

    #[test]
    fn b_roots() {
        let r = truncation_b_roots(0.0, 1, 0.0).unwrap();
        let want = 2.0 * 6f64.sqrt() / 3.0;
        assert_eq!(r.len(), 2);
        assert!((r[0] + want).abs() < 1e-13 && (r[1] - want).abs() < 1e-13);
        let r = truncation_b_roots(0.0, 1, 2.5).unwrap();
        assert!(r.iter().any(|b| (b - 1.0).abs() < 1e-12), "{r:?}");
        let r = truncation_b_roots(0.0, 2, 5.250535221).unwrap();
        assert!(r.iter().any(|b| (b - 1.0).abs() < 1e-8), "{r:?}");
    }

    #[test]
    fn cubic_vanishes_at_reference_roots() {
        assert_eq!(cubic_n2_residual(0.0, 0.0, 0.0), 0.0);
        assert!(cubic_n2_residual(0.0, 5.250535221, 1.0).abs() < 1e-4);
        assert!(cubic_n2_residual(0.0, 1.190016441, 1.0).abs() < 1e-4);
        assert!(cubic_n2_residual(0.0, -1.940551663, 1.0).abs() < 1e-4);
    }

    #[test]
    fn wavefunction_values() {
        let s = recurrence_coefficients(0.0, 0.0, 0.0, 2.0, 4).unwrap();
        assert!((polynomial_wavefunction(&s, 1, 1.0).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        let s = recurrence_coefficients(0.0, 2.5, 1.0, 3.75, 4).unwrap();
        assert!((polynomial_wavefunction(&s, 1, 1.0).unwrap() + (-1.0f64).exp()).abs() < 1e-15);
        let s = recurrence_coefficients(1.0, 0.0, 0.0, 4.0, 4).unwrap();
        assert_eq!(polynomial_wavefunction(&s, 1, 0.0).unwrap(), 0.0);
        assert!(polynomial_wavefunction(&s, 1, 1e-9).unwrap().abs() < 1e-8);
    }

    #[test]
    fn non_terminating_series_is_rejected() {
        let s = recurrence_coefficients(0.0, 2.0, 1.0, 3.0, 6).unwrap();
        assert!(matches!(polynomial_wavefunction(&s, 1, 1.0), Err(Error::NotTruncated { .. })));
        let short = recurrence_coefficients(0.0, 2.5, 1.0, 3.75, 1).unwrap();
        assert!(matches!(polynomial_wavefunction(&short, 1, 1.0), Err(Error::NotTruncated { .. })));
    }
}
