//! Finite-difference oracle and analytic consistency checks.
//!
//! The operator is discretised in flux form. With `R = ξ^γ f` the eigenproblem
//! becomes the Sturm-Liouville problem
//!
//! ```text
//! -(w f')' / w + (-a/ξ + bξ + ξ²) f = W f,    w = ξ^(2γ+1),
//! ```
//!
//! which on the cell-centred grid `ξ_k = (k - 1/2) h` gives a symmetric
//! tridiagonal matrix after the similarity `y_k = sqrt(w_k) f_k`. The flux
//! through `ξ = 0` vanishes with the weight, so no boundary condition is
//! needed there and convergence is `O(h²)` for every `γ >= 0`, including
//! `γ = 0` where the Liouville normal form has a critical `-1/(4ξ²)` term.
//! Successive grid halvings are combined by Richardson extrapolation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ReducedParams;
use crate::tridiag::SymTridiagonal;
use crate::variational::{self, BasisSpec, Precision, DEFAULT_BASIS_SIZE};

/// Grid spacing aimed for on the coarsest level of [`default_grid`].
pub const BASE_SPACING: f64 = 0.012;
/// Largest eigenvector amplitude tolerated in the outer cells, relative to
/// the maximum.
pub const TAIL_TOLERANCE: f64 = 1e-8;
/// Default finite-difference step for [`hf_residuals`].
pub const HF_STEP: f64 = 1e-4;
const MAX_DOMAIN_DOUBLINGS: usize = 6;

/// Uniform grid on `(0, xi_max]`; level `k` uses `points · 2^k` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub xi_max: f64,
    pub points: usize,
    pub refinement_levels: usize,
}

impl GridSpec {
    pub fn new(xi_max: f64, points: usize) -> Self {
        GridSpec { xi_max, points, refinement_levels: 3 }
    }

    pub fn with_levels(self, refinement_levels: usize) -> Self {
        GridSpec { refinement_levels, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.xi_max > 0.0) || !self.xi_max.is_finite() {
            return Err(Error::InvalidArgument(format!("xi_max must be positive, got {}", self.xi_max)));
        }
        if self.points < 64 {
            return Err(Error::InvalidArgument(format!("grid needs at least 64 points, got {}", self.points)));
        }
        if !(1..=8).contains(&self.refinement_levels) {
            return Err(Error::InvalidArgument(format!(
                "refinement levels must be in 1..=8, got {}",
                self.refinement_levels
            )));
        }
        Ok(())
    }

    /// The same spacing on a domain twice as long.
    fn doubled(self) -> Self {
        GridSpec { xi_max: 2.0 * self.xi_max, points: 2 * self.points, ..self }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    /// Eigenvalues on the finest grid.
    pub eigenvalues: Vec<f64>,
    /// Richardson-extrapolated eigenvalues (the `h → 0` estimate).
    pub richardson_estimate: Vec<f64>,
    /// Raw eigenvalues on every level, coarsest first.
    pub level_eigenvalues: Vec<Vec<f64>>,
    pub grid: GridSpec,
}

/// Discretised operator on `cells` cells of width `xi_max / cells`.
fn discretise(params: &ReducedParams, xi_max: f64, cells: usize) -> SymTridiagonal {
    let h = xi_max / cells as f64;
    let p = 2.0 * params.gamma + 1.0;
    let mut d = Vec::with_capacity(cells);
    let mut e = Vec::with_capacity(cells - 1);
    for k in 0..cells {
        let xi = (k as f64 + 0.5) * h;
        let (outer, inner) = (xi + 0.5 * h, xi - 0.5 * h);
        // weight ratios as powers of coordinate ratios: no under/overflow for large γ
        let ratio_out = (outer / xi).powf(p);
        let ratio_in = if k == 0 { 0.0 } else { (inner / xi).powf(p) };
        d.push((ratio_out + ratio_in) / (h * h) - params.a / xi + params.b * xi + xi * xi);
        if k + 1 < cells {
            // w_{k+1/2} / sqrt(w_k w_{k+1})
            let next = xi + h;
            e.push(-(outer * outer / (xi * next)).powf(p / 2.0) / (h * h));
        }
    }
    SymTridiagonal::new(d, e)
}

fn richardson(levels: &[Vec<f64>]) -> Vec<f64> {
    let count = levels[0].len();
    (0..count)
        .map(|nu| {
            let mut table: Vec<f64> = levels.iter().map(|l| l[nu]).collect();
            // table[k] holds the m-th column entry for level k after pass m
            for m in 1..levels.len() {
                let factor = 4f64.powi(m as i32) - 1.0;
                for k in (m..levels.len()).rev() {
                    table[k] += (table[k] - table[k - 1]) / factor;
                }
            }
            table[levels.len() - 1]
        })
        .collect()
}

/// Largest `|y|` over the outer 5% of cells relative to the global maximum.
fn tail_ratio(y: &[f64]) -> f64 {
    let peak = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let start = y.len() - (y.len() / 20).max(1);
    let tail = y[start..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        tail / peak
    } else {
        1.0
    }
}

/// Lowest `count` eigenvalues on `grid` and its refinements.
///
/// Fails with [`Error::DomainTooSmall`] when the highest requested state has
/// not decayed to [`TAIL_TOLERANCE`] of its peak inside the domain.
pub fn fd_spectrum(params: &ReducedParams, count: usize, grid: &GridSpec) -> Result<OracleResult> {
    grid.validate()?;
    if count == 0 || count > grid.points {
        return Err(Error::InvalidArgument(format!(
            "count must satisfy 1 <= count <= points ({}), got {count}",
            grid.points
        )));
    }
    let coarse = discretise(params, grid.xi_max, grid.points);
    let top = coarse.eigenvalue(count - 1);
    let tail = tail_ratio(&coarse.eigenvector(top));
    if tail > TAIL_TOLERANCE {
        return Err(Error::DomainTooSmall { xi_max: grid.xi_max, tail });
    }
    let mut level_eigenvalues = Vec::with_capacity(grid.refinement_levels);
    for level in 0..grid.refinement_levels {
        let t = if level == 0 { coarse.clone() } else { discretise(params, grid.xi_max, grid.points << level) };
        level_eigenvalues.push(t.lowest(count));
    }
    Ok(OracleResult {
        eigenvalues: level_eigenvalues.last().cloned().unwrap_or_default(),
        richardson_estimate: richardson(&level_eigenvalues),
        level_eigenvalues,
        grid: *grid,
    })
}

fn grid_for(xi_max: f64) -> GridSpec {
    let points = ((xi_max / BASE_SPACING).ceil() as usize).max(64);
    GridSpec::new(xi_max, points)
}

/// Domain sized from a coarse variational estimate of the highest requested
/// level: `xi_max = 2 (sqrt(max(W, 0)) + |b|/2 + 3)`.
pub fn default_grid(params: &ReducedParams, count: usize) -> Result<GridSpec> {
    let size = (count + 6).clamp(10, DEFAULT_BASIS_SIZE);
    let w_guess = if count <= size {
        let basis = BasisSpec::new(params.gamma, size);
        variational::eigenvalues(params, count, &basis, Precision::Extended)?[count - 1]
    } else {
        // beyond the coarse basis: free-oscillator estimate
        4.0 * (count - 1) as f64 + 2.0 * params.gamma + 2.0
    };
    let xi_max = 2.0 * (w_guess.max(0.0).sqrt() + params.b.abs() / 2.0 + 3.0);
    Ok(grid_for(xi_max))
}

/// [`fd_spectrum`] on [`default_grid`], doubling the domain (at fixed
/// spacing) whenever the tail check fails.
pub fn fd_spectrum_auto(params: &ReducedParams, count: usize) -> Result<OracleResult> {
    grow_until_contained(default_grid(params, count)?, |g| fd_spectrum(params, count, g))
}

fn grow_until_contained<F>(mut grid: GridSpec, solve: F) -> Result<OracleResult>
where
    F: Fn(&GridSpec) -> Result<OracleResult>,
{
    for _ in 0..MAX_DOMAIN_DOUBLINGS {
        match solve(&grid) {
            Err(Error::DomainTooSmall { .. }) => grid = grid.doubled(),
            other => return other,
        }
    }
    solve(&grid)
}

/// Normalised eigenfunction `R_ν` on the coarsest level of `grid`, as
/// `(ξ_k, R(ξ_k))` pairs with `Σ R² ξ h = 1`.
pub fn fd_eigenfunction(params: &ReducedParams, nu: usize, grid: &GridSpec) -> Result<Vec<(f64, f64)>> {
    grid.validate()?;
    if nu >= grid.points {
        return Err(Error::InvalidArgument(format!("state {nu} outside a {}-point grid", grid.points)));
    }
    let t = discretise(params, grid.xi_max, grid.points);
    let y = t.eigenvector(t.eigenvalue(nu));
    let h = grid.xi_max / grid.points as f64;
    let mut out: Vec<(f64, f64)> = y
        .iter()
        .enumerate()
        .map(|(k, &yk)| {
            let xi = (k as f64 + 0.5) * h;
            // y = sqrt(w) f and R = ξ^γ f, so R = y / sqrt(ξ)
            (xi, yk / xi.sqrt())
        })
        .collect();
    let norm = out.iter().map(|(xi, r)| r * r * xi * h).sum::<f64>().sqrt();
    // sign convention: positive near the origin
    let sign = if out[0].1 < 0.0 { -1.0 } else { 1.0 };
    out.iter_mut().for_each(|(_, r)| *r *= sign / norm);
    Ok(out)
}

/// Finite-difference derivatives of a variational eigenvalue next to the
/// Hellmann-Feynman expectation values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HellmannFeynman {
    pub dw_da: f64,
    pub dw_db: f64,
    pub inv_xi: f64,
    pub xi: f64,
}

impl HellmannFeynman {
    /// `(|∂W/∂a + ⟨1/ξ⟩|, |∂W/∂b - ⟨ξ⟩|)`.
    pub fn residuals(&self) -> (f64, f64) {
        ((self.dw_da + self.inv_xi).abs(), (self.dw_db - self.xi).abs())
    }
}

/// Derivatives of `W_ν` in `a` and `b` by the five-point central stencil
/// `[f(-2h) - 8 f(-h) + 8 f(h) - f(2h)] / 12h`, with `⟨1/ξ⟩` and `⟨ξ⟩` from
/// the eigenvector at the centre. All solves share the default
/// extended-precision basis.
pub fn hellmann_feynman(params: &ReducedParams, nu: usize, step: f64) -> Result<HellmannFeynman> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {step}")));
    }
    let basis = BasisSpec::new(params.gamma, DEFAULT_BASIS_SIZE);
    let count = nu + 1;
    let level = |a: f64, b: f64| -> Result<f64> {
        let p = ReducedParams { a, b, ..*params };
        Ok(variational::eigenvalues(&p, count, &basis, Precision::Extended)?[nu])
    };
    let stencil = |f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        Ok((f(-2.0 * step)? - 8.0 * f(-step)? + 8.0 * f(step)? - f(2.0 * step)?) / (12.0 * step))
    };
    let dw_da = stencil(&|d| level(params.a + d, params.b))?;
    let dw_db = stencil(&|d| level(params.a, params.b + d))?;
    let centre = variational::spectrum(params, count, &basis, Precision::Extended)?;
    Ok(HellmannFeynman {
        dw_da,
        dw_db,
        inv_xi: variational::expectation_inv_xi(&centre, nu)?,
        xi: variational::expectation_xi(&centre, nu)?,
    })
}

/// `(|∂W/∂a + ⟨1/ξ⟩|, |∂W/∂b - ⟨ξ⟩|)` for state `nu`.
pub fn hf_residuals(params: &ReducedParams, nu: usize, step: f64) -> Result<(f64, f64)> {
    Ok(hellmann_feynman(params, nu, step)?.residuals())
}

/// Distance of `W_ν / a²` from its large-`a` limit `-1/(2ν + 2γ + 1)²`.
///
/// The oracle runs on a domain scaled to the Coulomb decay length
/// `(2ν + 2γ + 1) / a`.
pub fn asymptotic_check(gamma: f64, nu: usize, a: f64, b: f64) -> Result<f64> {
    if !(a >= 10.0) {
        return Err(Error::InvalidArgument(format!("asymptotic check needs a >= 10, got {a}")));
    }
    let params = ReducedParams::new(gamma, a, b);
    let n_eff = 2.0 * nu as f64 + 2.0 * params.gamma + 1.0;
    let kappa = a / n_eff;
    let xi_max = (30.0 + 6.0 * nu as f64 + 4.0 * params.gamma) / kappa;
    let grid = GridSpec::new(xi_max, 2000);
    let result = grow_until_contained(grid, |g| fd_spectrum(&params, nu + 1, g))?;
    Ok((result.richardson_estimate[nu] / (a * a) + 1.0 / (n_eff * n_eff)).abs())
}

/// Largest `|W_var - W_fd|` over the lowest `count` states, comparing the
/// default variational solve with the extrapolated oracle.
pub fn crosscheck(params: &ReducedParams, count: usize) -> Result<f64> {
    let basis = BasisSpec::new(params.gamma, DEFAULT_BASIS_SIZE);
    let var = variational::eigenvalues(params, count, &basis, Precision::Extended)?;
    let fd = fd_spectrum_auto(params, count)?;
    Ok(var.iter().zip(&fd.richardson_estimate).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(gamma: f64) -> ReducedParams {
        ReducedParams::new(gamma, 0.0, 0.0)
    }

    #[test]
    fn oscillator_levels() {
        for gamma in [0.0, 0.5, 1.0, 2.0] {
            let r = fd_spectrum(&free(gamma), 3, &GridSpec::new(12.0, 1000)).unwrap();
            for (nu, w) in r.richardson_estimate.iter().enumerate() {
                let want = 4.0 * nu as f64 + 2.0 * gamma + 2.0;
                assert!((w - want).abs() < 1e-7, "γ={gamma} ν={nu}: {w}");
            }
        }
    }

    #[test]
    fn second_order_convergence() {
        let r = fd_spectrum(&ReducedParams::new(0.0, 2.0, 1.0), 3, &GridSpec::new(12.0, 500)).unwrap();
        for nu in 0..3 {
            let lim = r.richardson_estimate[nu];
            let errs: Vec<f64> = r.level_eigenvalues.iter().map(|l| (l[nu] - lim).abs()).collect();
            for pair in errs.windows(2) {
                let ratio = pair[0] / pair[1];
                assert!((2.0..=8.0).contains(&ratio), "ν={nu}: ratio {ratio}");
            }
        }
    }

    #[test]
    fn off_curve_reference_values() {
        let want = [-3.230518994, 4.510929109, 9.532275968, 14.19728140, 18.70978427];
        let r = fd_spectrum_auto(&ReducedParams::new(0.0, 2.0, 1.0), 5).unwrap();
        for (w, x) in r.richardson_estimate.iter().zip(want) {
            assert!((w - x).abs() < 1e-6, "{w} vs {x}");
        }
    }

    #[test]
    fn short_domain_is_reported() {
        let err = fd_spectrum(&free(0.0), 3, &GridSpec::new(3.0, 200)).unwrap_err();
        assert!(matches!(err, Error::DomainTooSmall { .. }), "{err:?}");
    }

    #[test]
    fn grid_validation() {
        assert!(fd_spectrum(&free(0.0), 1, &GridSpec::new(10.0, 10)).is_err());
        assert!(fd_spectrum(&free(0.0), 0, &GridSpec::new(10.0, 100)).is_err());
        assert!(fd_spectrum(&free(0.0), 1, &GridSpec::new(-1.0, 100)).is_err());
    }

    #[test]
    fn hellmann_feynman_free_ground_state() {
        let (ra, rb) = hf_residuals(&free(0.0), 0, HF_STEP).unwrap();
        assert!(ra < 1e-5 && rb < 1e-5, "{ra:e} {rb:e}");
        let hf = hellmann_feynman(&free(0.0), 0, HF_STEP).unwrap();
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((hf.inv_xi - sqrt_pi).abs() < 1e-10);
        assert!((hf.xi - sqrt_pi / 2.0).abs() < 1e-10);
    }

    #[test]
    fn zero_step_is_rejected() {
        assert!(matches!(hf_residuals(&free(0.0), 0, 0.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn eigenfunction_is_normalised_and_nodeless() {
        let grid = GridSpec::new(10.0, 1000);
        let f = fd_eigenfunction(&ReducedParams::new(0.0, 2.0, 1.0), 0, &grid).unwrap();
        assert!(f.iter().filter(|(xi, _)| *xi <= 6.0).all(|&(_, r)| r > 0.0));
        let h = grid.xi_max / grid.points as f64;
        let norm: f64 = f.iter().map(|(xi, r)| r * r * xi * h).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coulomb_limit() {
        assert!(asymptotic_check(0.0, 0, 20.0, 1.0).unwrap() < 5e-3);
        assert!(asymptotic_check(0.0, 1, 50.0, 1.0).unwrap() < 5e-3);
        assert!(asymptotic_check(1.0, 0, 50.0, 0.0).unwrap() < 5e-3);
        assert!(asymptotic_check(0.0, 0, 5.0, 1.0).is_err());
    }

    #[test]
    fn crosscheck_agrees() {
        assert!(crosscheck(&ReducedParams::new(0.0, 2.0, 1.0), 4).unwrap() < 1e-6);
        assert!(crosscheck(&free(0.0), 3).unwrap() < 1e-7);
        assert!(crosscheck(&ReducedParams::new(0.5, -1.0, 2.0), 3).unwrap() < 1e-6);
    }
}
