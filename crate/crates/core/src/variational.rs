//! Rayleigh-Ritz solution of `L R = W R` in the non-orthogonal basis
//! `u_j(ξ) = ξ^(γ+j) exp(-βξ²/2)`, `j = 0 .. N-1`.
//!
//! Every matrix element is a Gaussian moment
//! `M(k) = ∫₀^∞ ξ^(2γ+k+1) e^(-βξ²) dξ = Γ(γ+k/2+1) / (2 β^(γ+k/2+1))`,
//! evaluated in double-double precision from two Gamma values and the ladder
//! `M(k+2) = M(k) (γ+k/2+1)/β`. With `p = γ + j`,
//!
//! ```text
//! L u_j = [ -j(2γ+j) ξ^(p-2) + 2β(p+1) ξ^p + (1-β²) ξ^(p+2) - a ξ^(p-1) + b ξ^(p+1) ] e^(-βξ²/2)
//! ```
//!
//! The Gram matrix condition number grows by roughly a factor of ten per basis
//! function, so the pencil is normally solved in double-double arithmetic.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::generalized_symmetric_eigen;
use crate::model::ReducedParams;
use crate::real::{self, Dd, Real};

/// Arithmetic used for the Cholesky reduction and the eigensolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// IEEE double; usable up to about 12 basis functions.
    Double,
    /// Double-double (about 31 digits); usable up to about 24 basis functions.
    Extended,
}

impl Precision {
    pub fn default_size(self) -> usize {
        match self {
            Precision::Double => 12,
            Precision::Extended => DEFAULT_BASIS_SIZE,
        }
    }
}

/// Default basis size in extended precision.
pub const DEFAULT_BASIS_SIZE: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasisSpec {
    pub gamma: f64,
    pub size: usize,
    /// Gaussian exponent `β`; 1 reproduces the plain `exp(-ξ²/2)` basis.
    pub scale: f64,
}

impl BasisSpec {
    pub fn new(gamma: f64, size: usize) -> Self {
        BasisSpec { gamma, size, scale: 1.0 }
    }

    pub fn with_scale(self, scale: f64) -> Self {
        BasisSpec { scale, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::InvalidArgument("basis size must be >= 1".into()));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::InvalidArgument(format!("basis scale must be > 0, got {}", self.scale)));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        Ok(())
    }
}

/// Gaussian moments `M(k)` for `k = -1 ..= kmax`; entry `k + 1` holds `M(k)`.
fn moments(gamma: f64, scale: f64, kmax: usize) -> Vec<Dd> {
    let g = Dd::from(gamma);
    let beta = Dd::from(scale);
    let ln_beta = real::ln(beta);
    let base = |shift: f64| {
        // Γ(γ+shift) / (2 β^(γ+shift))
        let x = g + shift;
        real::exp(real::ln_gamma(x) - x * ln_beta) * 0.5
    };
    let mut out = vec![Dd::from(0.0); kmax + 2];
    out[0] = base(0.5);
    out[1] = base(1.0);
    for k in 2..kmax + 2 {
        // M(k) = M(k-2) (γ + k/2) / β, with k here shifted by one
        let kk = k as f64 - 1.0;
        out[k] = out[k - 2] * (g + kk / 2.0) / beta;
    }
    out
}

/// `∫₀^∞ u_i u_j ξ dξ`.
pub fn overlap_element(gamma: f64, i: usize, j: usize, scale: f64) -> f64 {
    let m = moments(gamma, scale, i + j);
    m[i + j + 1].as_f64()
}

/// Overlap `S` and operator `H` matrices of the basis.
#[derive(Debug, Clone)]
pub struct MatrixPair<T> {
    pub overlap: DMatrix<T>,
    pub operator: DMatrix<T>,
}

impl MatrixPair<Dd> {
    pub fn to_precision<T: Real>(&self) -> MatrixPair<T> {
        MatrixPair { overlap: self.overlap.map(T::from_dd), operator: self.operator.map(T::from_dd) }
    }
}

fn raw_operator(params: &ReducedParams, basis: &BasisSpec) -> (DMatrix<Dd>, DMatrix<Dd>) {
    let n = basis.size;
    let m = moments(basis.gamma, basis.scale, 2 * n + 2);
    let at = |k: i64| m[(k + 1) as usize];
    let g = Dd::from(basis.gamma);
    let beta = Dd::from(basis.scale);
    let (a, b) = (Dd::from(params.a), Dd::from(params.b));
    let overlap = DMatrix::from_fn(n, n, |i, j| at((i + j) as i64));
    let operator = DMatrix::from_fn(n, n, |i, j| {
        let k = (i + j) as i64;
        let jf = j as f64;
        let p = g + jf;
        let mut h =
            beta * 2.0 * (p + 1.0) * at(k) + (Dd::from(1.0) - beta * beta) * at(k + 2) - a * at(k - 1) + b * at(k + 1);
        if j > 0 {
            // γ² - p² = -j(2γ + j)
            h -= (g * 2.0 + jf) * jf * at(k - 2);
        }
        h
    });
    (overlap, operator)
}

/// Largest `|H_ij - H_ji| / (1 + |H_ij|)` of the assembled operator matrix.
pub fn operator_asymmetry(params: &ReducedParams, basis: &BasisSpec) -> f64 {
    let (_, h) = raw_operator(params, basis);
    let n = h.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let d = (h[(i, j)] - h[(j, i)]).as_f64().abs() / (1.0 + h[(i, j)].as_f64().abs());
            worst = worst.max(d);
        }
    }
    worst
}

/// Assembles `(S, H)` in double-double precision, with `H` symmetrised.
pub fn operator_matrix(params: &ReducedParams, basis: &BasisSpec) -> Result<MatrixPair<Dd>> {
    basis.validate()?;
    if params.gamma != basis.gamma {
        return Err(Error::InvalidArgument(format!(
            "basis gamma {} differs from operator gamma {}",
            basis.gamma, params.gamma
        )));
    }
    let (overlap, mut operator) = raw_operator(params, basis);
    let n = basis.size;
    for i in 0..n {
        for j in i + 1..n {
            let (hij, hji) = (operator[(i, j)], operator[(j, i)]);
            let asym = (hij - hji).as_f64().abs() / (1.0 + hij.as_f64().abs());
            assert!(asym < 1e-10, "operator matrix asymmetric at ({i}, {j}): {asym:e}");
            let mean = (hij + hji) * 0.5;
            operator[(i, j)] = mean;
            operator[(j, i)] = mean;
        }
    }
    Ok(MatrixPair { overlap, operator })
}

/// Eigenvalues and S-normalised coefficient vectors of a Rayleigh-Ritz solve.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub params: ReducedParams,
    pub basis: BasisSpec,
    pub precision: Precision,
    /// Ascending upper bounds to the lowest eigenvalues `W_ν`.
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvalues_extended: Vec<Dd>,
    /// Basis coefficients of each state, normalised so `∫ R² ξ dξ = 1`.
    #[serde(skip)]
    pub vectors: Vec<Vec<Dd>>,
    /// `-log10` of the largest relative change against a basis two smaller.
    pub converged_digits: Option<f64>,
}

struct RawSolve {
    values: Vec<Dd>,
    vectors: Vec<Vec<Dd>>,
}

fn check_request(params: &ReducedParams, count: usize, basis: &BasisSpec) -> Result<()> {
    basis.validate()?;
    if count == 0 || count > basis.size {
        return Err(Error::InvalidArgument(format!(
            "count must satisfy 1 <= count <= basis size ({}), got {count}",
            basis.size
        )));
    }
    if !params.a.is_finite() || !params.b.is_finite() {
        return Err(Error::InvalidArgument("couplings must be finite".into()));
    }
    Ok(())
}

fn solve_in<T: Real>(pair: &MatrixPair<Dd>, count: usize) -> Result<RawSolve> {
    let typed: MatrixPair<T> = pair.to_precision();
    let size = typed.overlap.nrows();
    let ge = generalized_symmetric_eigen(&typed.operator, &typed.overlap, T::PIVOT_FLOOR)
        .map_err(|pivot| Error::IllConditionedOverlap { size, pivot })?;
    let values = ge.values.iter().take(count).map(|v| v.as_dd()).collect();
    let vectors = (0..count)
        .map(|c| {
            let mut v: Vec<Dd> = ge.vectors.column(c).iter().map(|x| x.as_dd()).collect();
            // sign convention: the leading small-ξ coefficient is positive
            let lead = v.iter().find(|x| x.hi() != 0.0).copied().unwrap_or(Dd::from(1.0));
            if lead.hi() < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    Ok(RawSolve { values, vectors })
}

fn solve(params: &ReducedParams, count: usize, basis: &BasisSpec, precision: Precision) -> Result<RawSolve> {
    let params = ReducedParams { gamma: basis.gamma, ..*params };
    let pair = operator_matrix(&params, basis)?;
    match precision {
        Precision::Double => solve_in::<f64>(&pair, count),
        Precision::Extended => solve_in::<Dd>(&pair, count),
    }
}

/// Lowest `count` eigenvalues only (no vectors, no convergence estimate).
pub fn eigenvalues(params: &ReducedParams, count: usize, basis: &BasisSpec, precision: Precision) -> Result<Vec<f64>> {
    check_request(params, count, basis)?;
    guard_gamma(params, basis)?;
    Ok(solve(params, count, basis, precision)?.values.iter().map(|v| v.as_f64()).collect())
}

fn guard_gamma(params: &ReducedParams, basis: &BasisSpec) -> Result<()> {
    if params.gamma != basis.gamma {
        return Err(Error::InvalidArgument(format!(
            "basis gamma {} differs from operator gamma {}",
            basis.gamma, params.gamma
        )));
    }
    Ok(())
}

/// Rayleigh-Ritz spectrum: the lowest `count` eigenvalues (upper bounds) with
/// normalised eigenvectors and a convergence estimate from a basis two
/// functions smaller.
pub fn spectrum(
    params: &ReducedParams,
    count: usize,
    basis: &BasisSpec,
    precision: Precision,
) -> Result<SpectralResult> {
    check_request(params, count, basis)?;
    guard_gamma(params, basis)?;
    let raw = solve(params, count, basis, precision)?;
    let eigenvalues: Vec<f64> = raw.values.iter().map(|v| v.as_f64()).collect();

    let converged_digits = if basis.size >= count + 2 {
        let smaller = BasisSpec { size: basis.size - 2, ..*basis };
        solve(params, count, &smaller, precision).ok().map(|coarse| {
            let change = eigenvalues
                .iter()
                .zip(&coarse.values)
                .map(|(w, c)| (w - c.as_f64()).abs() / w.abs().max(1.0))
                .fold(0.0f64, f64::max);
            if change > 0.0 {
                -change.log10()
            } else {
                32.0
            }
        })
    } else {
        None
    };

    Ok(SpectralResult {
        params: *params,
        basis: *basis,
        precision,
        eigenvalues,
        eigenvalues_extended: raw.values,
        vectors: raw.vectors,
        converged_digits,
    })
}

fn state(result: &SpectralResult, nu: usize) -> Result<&[Dd]> {
    result
        .vectors
        .get(nu)
        .map(|v| v.as_slice())
        .ok_or_else(|| Error::InvalidArgument(format!("state {nu} not computed ({} available)", result.vectors.len())))
}

/// `vᵀ M v` with `M_ij = M(i + j + shift)`.
fn moment_expectation(result: &SpectralResult, nu: usize, shift: i64) -> Result<f64> {
    let v = state(result, nu)?;
    let n = v.len();
    let m = moments(result.basis.gamma, result.basis.scale, 2 * n + 1);
    let mut acc = Dd::from(0.0);
    for i in 0..n {
        let mut row = Dd::from(0.0);
        for j in 0..n {
            row += m[(i as i64 + j as i64 + shift + 1) as usize] * v[j];
        }
        acc += v[i] * row;
    }
    Ok(acc.as_f64())
}

/// `⟨ξ⟩` in state `nu`.
pub fn expectation_xi(result: &SpectralResult, nu: usize) -> Result<f64> {
    moment_expectation(result, nu, 1)
}

/// `⟨1/ξ⟩` in state `nu`.
pub fn expectation_inv_xi(result: &SpectralResult, nu: usize) -> Result<f64> {
    moment_expectation(result, nu, -1)
}

/// Normalised radial function `R_ν(ξ) = Σ v_j ξ^(γ+j) exp(-βξ²/2)`.
pub fn wavefunction_eval(result: &SpectralResult, nu: usize, xi: f64) -> Result<f64> {
    let v = state(result, nu)?;
    if !(xi >= 0.0) {
        return Err(Error::InvalidArgument(format!("xi must be >= 0, got {xi}")));
    }
    // the coefficients cancel heavily, so the polynomial is summed in double-double
    let poly = v.iter().rev().fold(Dd::from(0.0), |acc, &c| acc * xi + c);
    let envelope = xi.powf(result.basis.gamma) * (-result.basis.scale * xi * xi / 2.0).exp();
    Ok(poly.as_f64() * envelope)
}
