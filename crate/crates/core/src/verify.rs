//! Named regression and property checks behind `radspec verify`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::frobenius::{closed_form_n1, recurrence_coefficients, truncation_a_roots, truncation_w, TruncationSolution};
use crate::model::{
    allowed_omega_scan, reduce, truncation_residual_at, PhysicalParams, ReducedParams, SpinLabel, BRACKETS_PER_DECADE,
};
use crate::oracle::{asymptotic_check, crosscheck, fd_spectrum_auto, hellmann_feynman, HF_STEP};
use crate::sweep::{sweep, SweepSpec};
use crate::variational::{self, BasisSpec, Precision, DEFAULT_BASIS_SIZE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Fixed-width pass/fail table, one check per line.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status}  {:width$}  {}", c.name, c.detail);
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.checks.len());
        out
    }

    fn record(&mut self, name: &str, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(Check { name: name.into(), passed, detail });
    }
}

/// The implementation under test. Swapping a function for a broken one must
/// make the matching check fail.
#[derive(Debug, Clone, Copy)]
pub struct Subject {
    pub truncation: fn(f64, usize, f64) -> Result<TruncationSolution>,
    pub eigenvalues: fn(&ReducedParams, usize) -> Result<Vec<f64>>,
}

fn default_eigenvalues(p: &ReducedParams, count: usize) -> Result<Vec<f64>> {
    variational::eigenvalues(p, count, &BasisSpec::new(p.gamma, DEFAULT_BASIS_SIZE), Precision::Extended)
}

impl Default for Subject {
    fn default() -> Self {
        Subject { truncation: truncation_a_roots, eigenvalues: default_eigenvalues }
    }
}

/// Reference roots `a_0^(2,i)(1)`, `i = 1, 2, 3`, to ten digits.
pub const REFERENCE_ROOTS: [f64; 3] = [-1.940551663, 1.190016441, 5.250535221];

/// Reference eigenvalue lists at `γ = 0, b = 1`: `(a, [W_0, W_1, ...])`.
pub const REFERENCE_LISTS: [(&str, f64, &[f64]); 4] = [
    ("a0^(2,1)", -1.940551663, &[5.75, 9.894040660, 14.06831985, 18.24977457]),
    ("a0^(2,2)", 1.190016441, &[-0.1664353619, 5.75, 10.52307155, 15.06421047]),
    ("a0^(2,3)", 5.250535221, &[-27.32460313, -0.5108147276, 5.75, 10.90599171]),
    ("a=2", 2.0, &[-3.230518994, 4.510929109, 9.532275968, 14.19728140, 18.70978427]),
];

/// Parameter triples `(γ, a, b)` for the two-solver comparison.
pub const CROSSCHECK_TRIPLES: [(f64, f64, f64); 6] =
    [(0.0, 2.0, 1.0), (0.5, -1.0, 2.0), (1.0, 2.0, 1.0), (0.5, 3.0, 1.0), (2.0, -3.0, 0.5), (1.5, -2.0, -1.0)];

fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

fn check_reference_roots(s: &Subject) -> Result<(bool, String)> {
    let sol = (s.truncation)(0.0, 2, 1.0)?;
    let dev = max_abs_diff(&sol.a_roots, &REFERENCE_ROOTS);
    Ok((sol.a_roots.len() == 3 && dev < 1e-8 && sol.w == 5.75, format!("max |Δa| = {dev:.2e}, w = {}", sol.w)))
}

fn check_reference_list(s: &Subject, a: f64, want: &[f64]) -> Result<(bool, String)> {
    let got = (s.eigenvalues)(&ReducedParams::new(0.0, a, 1.0), want.len())?;
    let dev = max_abs_diff(&got, want);
    Ok((dev < 1e-6, format!("max |ΔW| = {dev:.2e}")))
}

fn check_oscillator(s: &Subject) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for gamma in [0.0, 0.5, 1.0, 2.0] {
        let got = (s.eigenvalues)(&ReducedParams::new(gamma, 0.0, 0.0), 4)?;
        let want: Vec<f64> = (0..4).map(|nu| 4.0 * nu as f64 + 2.0 * gamma + 2.0).collect();
        worst = worst.max(max_abs_diff(&got, &want));
    }
    Ok((worst < 1e-8, format!("max |W - (4ν+2γ+2)| = {worst:.2e}")))
}

fn check_closed_form(s: &Subject) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for gamma in [0.0, 0.5, 1.0, 2.0] {
        for b in [-3.0, -1.0, 0.0, 1.0, 3.0] {
            let (lo, hi) = closed_form_n1(gamma, b);
            worst = worst.max(max_abs_diff(&(s.truncation)(gamma, 1, b)?.a_roots, &[lo, hi]));
        }
    }
    Ok((worst < 1e-12, format!("max |Δa| = {worst:.2e}")))
}

fn check_auto_termination(s: &Subject) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 1..=8 {
        let sol = (s.truncation)(0.0, n, 1.0)?;
        for &a in &sol.a_roots {
            let series = recurrence_coefficients(0.0, a, 1.0, sol.w, n + 10)?;
            let tail = series.coeffs[n + 1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
            worst = worst.max(tail);
        }
    }
    Ok((worst < 1e-10, format!("max tail |c_j|, j > n: {worst:.2e}")))
}

fn check_points_on_curves(s: &Subject) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 1..=8 {
        let sol = (s.truncation)(0.0, n, 1.0)?;
        for (k, &a) in sol.a_roots.iter().enumerate() {
            let w = (s.eigenvalues)(&ReducedParams::new(0.0, a, 1.0), k + 1)?[k];
            worst = worst.max((w - sol.w).abs());
        }
    }
    Ok((worst < 1e-7, format!("max |W_(i-1) - W^(n)| = {worst:.2e} over 44 points")))
}

/// `(γ, a, b, ν)` grid of the derivative checks.
pub fn hf_grid() -> Vec<(f64, f64, f64, usize)> {
    let mut grid = Vec::new();
    for gamma in [0.0, 1.0] {
        for a in [-1.0, 0.0, 2.0] {
            for b in [0.0, 1.0] {
                for nu in [0, 1] {
                    grid.push((gamma, a, b, nu));
                }
            }
        }
    }
    grid
}

fn check_hellmann_feynman() -> Result<(bool, String)> {
    let (mut worst, mut signs_ok) = (0.0f64, true);
    for (gamma, a, b, nu) in hf_grid() {
        let hf = hellmann_feynman(&ReducedParams::new(gamma, a, b), nu, HF_STEP)?;
        let (ra, rb) = hf.residuals();
        worst = worst.max(ra).max(rb);
        signs_ok &= hf.dw_da < 0.0 && hf.dw_db > 0.0;
    }
    Ok((worst < 1e-5 && signs_ok, format!("max residual {worst:.2e}, dW/da < 0 < dW/db: {signs_ok}")))
}

fn check_asymptote(gamma: f64, nu: usize, a: f64, b: f64) -> Result<(bool, String)> {
    let dev = asymptotic_check(gamma, nu, a, b)?;
    Ok((dev < 5e-3, format!("|W/a² + 1/(2ν+2γ+1)²| = {dev:.2e}")))
}

fn check_crosscheck() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (gamma, a, b) in CROSSCHECK_TRIPLES {
        worst = worst.max(crosscheck(&ReducedParams::new(gamma, a, b), 4)?);
    }
    let free = fd_spectrum_auto(&ReducedParams::new(0.5, 0.0, 0.0), 4)?;
    let exact: Vec<f64> = (0..4).map(|nu| 4.0 * nu as f64 + 3.0).collect();
    let free_dev = max_abs_diff(&free.richardson_estimate, &exact);
    Ok((worst < 1e-6 && free_dev < 1e-7, format!("max |W_var - W_fd| = {worst:.2e}, free oscillator {free_dev:.2e}")))
}

/// The standard sweep: curves for `ν <= 8` on `a ∈ [-2, 14]` with the
/// truncation points for `n <= 8`.
pub fn reference_sweep() -> SweepSpec {
    SweepSpec {
        gamma: 0.0,
        b: 1.0,
        a_min: -2.0,
        a_max: 14.0,
        steps: 160,
        nu_max: 8,
        n_max: 8,
        basis_size: DEFAULT_BASIS_SIZE,
        precision: Precision::Extended,
    }
}

fn check_sweep() -> Result<(bool, String)> {
    let table = sweep(&reference_sweep())?;
    let dev = table.overlay_deviation().unwrap_or(f64::INFINITY);
    let line = truncation_w(0.0, 8, 1.0);
    let flat = table.overlay.iter().filter(|o| o.n == 8).all(|o| o.w == line);
    Ok((
        dev < 1e-6 && flat && table.failures == 0,
        format!("{} overlay points, max deviation {dev:.2e}, n = 8 on w = {line}: {flat}", table.overlay.len()),
    ))
}

/// The coupling-8 frequency scan and the spectrum just beside its root.
fn check_allowed_frequency() -> Result<(bool, String)> {
    let p = PhysicalParams::with_kappa(1.0, 1.0, 8.0, 0.0, 0.0, 0, SpinLabel::Up);
    let roots = allowed_omega_scan(&p, 1, (0.1, 10.0), BRACKETS_PER_DECADE)?;
    let Some(&omega) = roots.first() else {
        return Ok((false, "no allowed frequency found".into()));
    };
    let residual = truncation_residual_at(&p, 1, omega)?.abs();
    let r = reduce(&p.with_omega(1.05 * omega))?;
    let levels = default_eigenvalues(&r, 3)?;
    let increasing = levels.windows(2).all(|w| w[0] < w[1]);
    Ok((
        roots.len() == 1 && (omega - 1.490).abs() < 1e-3 && residual < 1e-10 && increasing,
        format!("ω = {omega:.6}, residual {residual:.1e}, {} levels at 1.05ω", levels.len()),
    ))
}

pub fn run(level: Level) -> Report {
    run_with(level, &Subject::default())
}

pub fn run_with(level: Level, s: &Subject) -> Report {
    let mut r = Report::default();
    r.record("truncation roots a0^(2,i)(1)", check_reference_roots(s));
    for (name, a, want) in REFERENCE_LISTS {
        r.record(&format!("spectrum {name}, b=1"), check_reference_list(s, a, want));
    }
    r.record("free oscillator 4ν+2γ+2", check_oscillator(s));
    if level == Level::Full {
        r.record("n=1 closed form", check_closed_form(s));
        r.record("series auto-termination n<=8", check_auto_termination(s));
        r.record("truncation points on curves n<=8", check_points_on_curves(s));
        r.record("hellmann-feynman grid", check_hellmann_feynman());
        r.record("asymptote γ=0 ν=0 a=20", check_asymptote(0.0, 0, 20.0, 1.0));
        r.record("asymptote γ=0 ν=1 a=50", check_asymptote(0.0, 1, 50.0, 1.0));
        r.record("asymptote γ=1 ν=0 a=50", check_asymptote(1.0, 0, 50.0, 0.0));
        r.record("oracle crosscheck", check_crosscheck());
        r.record("sweep consistency", check_sweep());
        r.record("allowed frequency and off-constraint spectrum", check_allowed_frequency());
    }
    r
}
