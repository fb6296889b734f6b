//! Physical model constants and their reduction to the dimensionless
//! operator `L = -d²/dξ² - (1/ξ) d/dξ + γ²/ξ² - a/ξ + bξ + ξ²`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frobenius::{recurrence_coefficients, truncation_w};

/// Spin projection `s = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpinLabel {
    Up,
    Down,
}

impl SpinLabel {
    pub fn value(self) -> f64 {
        match self {
            SpinLabel::Up => 1.0,
            SpinLabel::Down => -1.0,
        }
    }
}

impl TryFrom<i32> for SpinLabel {
    type Error = Error;

    fn try_from(s: i32) -> Result<Self> {
        match s {
            1 => Ok(SpinLabel::Up),
            -1 => Ok(SpinLabel::Down),
            _ => Err(Error::InvalidArgument(format!("spin label must be +1 or -1, got {s}"))),
        }
    }
}

/// Constants of the neutral-particle model in natural units.
///
/// `g_factor`, `field_norm` and `lambda_c` only ever enter through the
/// product `κ = g · field_norm · λ`. The oscillator strength `a₂ = m ω²` is
/// derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalParams {
    pub m: f64,
    pub omega: f64,
    pub g_factor: f64,
    pub field_norm: f64,
    pub lambda_c: f64,
    /// Strength of the inverse-square term of the potential.
    pub a1: f64,
    /// Constant offset of the potential.
    pub v0: f64,
    pub l: i32,
    pub s: SpinLabel,
}

impl PhysicalParams {
    /// Parameters with all of the coupling carried by `g_factor = kappa`.
    pub fn with_kappa(m: f64, omega: f64, kappa: f64, a1: f64, v0: f64, l: i32, s: SpinLabel) -> Self {
        PhysicalParams { m, omega, g_factor: kappa, field_norm: 1.0, lambda_c: 1.0, a1, v0, l, s }
    }

    pub fn kappa(&self) -> f64 {
        self.g_factor * self.field_norm * self.lambda_c
    }

    pub fn a2(&self) -> f64 {
        self.m * self.omega * self.omega
    }

    pub fn with_omega(&self, omega: f64) -> Self {
        PhysicalParams { omega, ..*self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.m > 0.0) || !(self.omega > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mass and frequency must be positive (m = {}, omega = {})",
                self.m, self.omega
            )));
        }
        Ok(())
    }
}

/// Parameters `(γ, a, b)` of the reduced operator. Only `|γ|` matters, so
/// `gamma` is kept non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedParams {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
}

impl ReducedParams {
    pub fn new(gamma: f64, a: f64, b: f64) -> Self {
        ReducedParams { gamma: gamma.abs(), a, b }
    }
}

pub fn reduce(p: &PhysicalParams) -> Result<ReducedParams> {
    p.validate()?;
    let m = p.m;
    let kappa = p.kappa();
    let s = p.s.value();
    let gamma_s = p.l as f64 + (1.0 - s) / 2.0;
    let delta_sq = gamma_s * gamma_s + 2.0 * m * p.a1;
    if delta_sq < 0.0 {
        return Err(Error::AttractiveSingularity { delta_sq });
    }
    let tau = s * kappa * gamma_s / (4.0 * m) + kappa / (8.0 * m);
    let alpha = kappa * m;
    let scale = 2.0 * m * p.a2();
    Ok(ReducedParams { gamma: delta_sq.sqrt(), a: tau / scale.powf(0.25), b: alpha / scale.powf(0.75) })
}

/// Physical energy `E = V₀ + W sqrt(2 m a₂) / (2m)` for a reduced eigenvalue `W`.
pub fn energy_from_w(w: f64, p: &PhysicalParams) -> f64 {
    p.v0 + w * (2.0 * p.m * p.a2()).sqrt() / (2.0 * p.m)
}

/// `c_{n+1}` of the series at `W = W_γ^(n)` for the model at frequency `omega`.
pub fn truncation_residual_at(p: &PhysicalParams, n: usize, omega: f64) -> Result<f64> {
    let r = reduce(&p.with_omega(omega))?;
    let w = truncation_w(r.gamma, n, r.b);
    Ok(recurrence_coefficients(r.gamma, r.a, r.b, w, n + 1)?.coeffs[n + 1])
}

/// Default bracket density for [`allowed_omega_scan`].
pub const BRACKETS_PER_DECADE: usize = 1024;

/// Frequencies in `range` at which the truncation condition of order `n`
/// holds, i.e. the "allowed" frequencies one gets by insisting on polynomial
/// solutions. The `omega` field of `p` is ignored.
///
/// The range is split into `per_decade` logarithmic brackets per decade; each
/// strict sign change of `c_{n+1}` is refined by bisection. A function that
/// vanishes identically produces no sign change and hence no roots.
pub fn allowed_omega_scan(p: &PhysicalParams, n: usize, range: (f64, f64), per_decade: usize) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
        return Err(Error::InvalidRange { lo, hi });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("truncation order n must be a positive integer (n = 1, 2, ...)".into()));
    }
    if per_decade == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let f = |omega: f64| truncation_residual_at(p, n, omega);
    let decades = (hi / lo).log10();
    let brackets = ((decades * per_decade as f64).ceil() as usize).max(1);
    let ratio = (hi / lo).ln() / brackets as f64;

    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0)?;
    for k in 1..=brackets {
        let x1 = if k == brackets { hi } else { lo * (ratio * k as f64).exp() };
        let f1 = f(x1)?;
        if f0 * f1 < 0.0 {
            roots.push(bisect(&f, x0, x1, f0)?);
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(roots)
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    // pick the endpoint with the smaller residual
    let (a, b) = (f(lo)?.abs(), f(hi)?.abs());
    Ok(if a <= b { lo } else { hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(kappa: f64, a1: f64, l: i32) -> PhysicalParams {
        PhysicalParams::with_kappa(1.0, 1.0, kappa, a1, 0.0, l, SpinLabel::Up)
    }

    #[test]
    fn reduce_worked_example() {
        let r = reduce(&unit(4.0, 0.0, 1)).unwrap();
        assert_eq!(r.gamma, 1.0);
        assert!((r.a - 1.5 / 2f64.powf(0.25)).abs() < 1e-15);
        assert!((r.a - 1.261345).abs() < 1e-6);
        assert!((r.b - 2.378414).abs() < 1e-6);
    }

    #[test]
    fn reduce_without_coupling() {
        assert_eq!(reduce(&unit(0.0, 0.0, 0)).unwrap(), ReducedParams::new(0.0, 0.0, 0.0));
    }

    #[test]
    fn reduce_rejects_collapse() {
        assert_eq!(reduce(&unit(1.0, -1.0, 0)), Err(Error::AttractiveSingularity { delta_sq: -2.0 }));
    }

    #[test]
    fn spin_down_shifts_gamma() {
        let mut p = unit(0.0, 0.0, 2);
        p.s = SpinLabel::Down;
        assert_eq!(reduce(&p).unwrap().gamma, 3.0);
    }

    #[test]
    fn individual_couplings_enter_as_product() {
        let mut p = unit(4.0, 0.0, 1);
        p.g_factor = 2.0;
        p.field_norm = 0.5;
        p.lambda_c = 4.0;
        assert_eq!(reduce(&p).unwrap(), reduce(&unit(4.0, 0.0, 1)).unwrap());
    }

    #[test]
    fn energies() {
        let p = unit(0.0, 0.0, 0);
        assert!((energy_from_w(2.0, &p) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(energy_from_w(0.0, &p), 0.0);
        let p1 = PhysicalParams { v0: 1.0, ..p };
        assert!((energy_from_w(5.75, &p1) - 5.065864).abs() < 1e-6);
    }

    #[test]
    fn scan_rejects_bad_range() {
        let p = unit(8.0, 0.0, 0);
        assert!(matches!(allowed_omega_scan(&p, 1, (0.0, 1.0), 16), Err(Error::InvalidRange { .. })));
        assert!(matches!(allowed_omega_scan(&p, 1, (2.0, 1.0), 16), Err(Error::InvalidRange { .. })));
    }

    #[test]
    fn scan_finds_single_root() {
        let p = unit(8.0, 0.0, 0);
        let roots = allowed_omega_scan(&p, 1, (0.1, 10.0), BRACKETS_PER_DECADE).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 1.490).abs() < 1e-3, "{roots:?}");
        assert!(truncation_residual_at(&p, 1, roots[0]).unwrap().abs() < 1e-10);
    }
}
