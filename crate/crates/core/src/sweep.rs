//! Eigencurves `W_ν(a)` at fixed `(γ, b)` together with the truncation
//! points that sit on them.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frobenius::truncation_a_roots;
use crate::model::ReducedParams;
use crate::output::{sci, Csv};
use crate::variational::{self, BasisSpec, Precision};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub gamma: f64,
    pub b: f64,
    pub a_min: f64,
    pub a_max: f64,
    /// Number of equally spaced abscissae, endpoints included.
    pub steps: usize,
    pub nu_max: usize,
    pub n_max: usize,
    pub basis_size: usize,
    pub precision: Precision,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if !(self.a_min < self.a_max) || !self.a_min.is_finite() || !self.a_max.is_finite() {
            return Err(Error::InvalidArgument(format!("need a_min < a_max, got [{}, {}]", self.a_min, self.a_max)));
        }
        if self.steps < 2 {
            return Err(Error::InvalidArgument(format!("steps must be >= 2, got {}", self.steps)));
        }
        if self.nu_max + 1 > self.basis_size {
            return Err(Error::InvalidArgument(format!(
                "nu_max {} needs a basis of at least {} functions",
                self.nu_max,
                self.nu_max + 1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub a: f64,
    pub nu: usize,
    /// `None` where the solver failed at this abscissa.
    pub w: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlayRow {
    pub n: usize,
    /// 1-based root label; the point belongs to the curve `ν = i - 1`.
    pub i: usize,
    pub a_root: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    /// Sorted by `(nu, a)`.
    pub rows: Vec<CurveRow>,
    pub overlay: Vec<OverlayRow>,
    /// Number of abscissae at which the variational solve failed.
    pub failures: usize,
}

/// Computes the eigencurves on an even grid in `a`, plus every truncation
/// root `a^(n,i)(b)` with `n <= n_max` inside `[a_min, a_max]`. The root
/// abscissae are also added to the curve grid so each overlay point can be
/// compared with a solve at exactly its `a`.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let mut overlay = Vec::new();
    for n in 1..=spec.n_max {
        let sol = truncation_a_roots(spec.gamma, n, spec.b)?;
        for (k, &a_root) in sol.a_roots.iter().enumerate() {
            if (spec.a_min..=spec.a_max).contains(&a_root) {
                overlay.push(OverlayRow { n, i: k + 1, a_root, w: sol.w });
            }
        }
    }

    let span = spec.a_max - spec.a_min;
    let mut abscissae: Vec<f64> = (0..spec.steps)
        .map(|k| if k + 1 == spec.steps { spec.a_max } else { spec.a_min + span * k as f64 / (spec.steps - 1) as f64 })
        .chain(overlay.iter().map(|o| o.a_root))
        .collect();
    abscissae.sort_by(f64::total_cmp);
    abscissae.dedup();

    let count = spec.nu_max + 1;
    let basis = BasisSpec::new(spec.gamma, spec.basis_size);
    let levels: Vec<Option<Vec<f64>>> = abscissae
        .par_iter()
        .map(|&a| {
            let p = ReducedParams::new(spec.gamma, a, spec.b);
            variational::eigenvalues(&p, count, &basis, spec.precision).ok()
        })
        .collect();

    let failures = levels.iter().filter(|l| l.is_none()).count();
    let rows = (0..count)
        .flat_map(|nu| {
            abscissae.iter().zip(&levels).map(move |(&a, l)| CurveRow { a, nu, w: l.as_ref().map(|v| v[nu]) })
        })
        .collect();
    Ok(SweepTable { rows, overlay, failures })
}

impl SweepTable {
    /// `W_ν(a)` by linear interpolation between neighbouring curve rows.
    pub fn interpolate(&self, nu: usize, a: f64) -> Option<f64> {
        let curve: Vec<(f64, f64)> =
            self.rows.iter().filter(|r| r.nu == nu).filter_map(|r| r.w.map(|w| (r.a, w))).collect();
        let k = curve.partition_point(|&(x, _)| x < a);
        if k < curve.len() && curve[k].0 == a {
            return Some(curve[k].1);
        }
        if k == 0 || k == curve.len() {
            return None;
        }
        let ((x0, y0), (x1, y1)) = (curve[k - 1], curve[k]);
        Some(y0 + (y1 - y0) * (a - x0) / (x1 - x0))
    }

    /// Largest `|W_{i-1}(a_root) - w|` over overlay points whose curve was
    /// computed; `None` if no overlay point could be compared.
    pub fn overlay_deviation(&self) -> Option<f64> {
        self.overlay
            .iter()
            .filter_map(|o| self.interpolate(o.i - 1, o.a_root).map(|w| (w - o.w).abs()))
            .reduce(f64::max)
    }

    pub fn curves_csv(&self) -> String {
        let mut csv = Csv::new(&["a", "nu", "w"]);
        for r in &self.rows {
            csv.push([sci(r.a), r.nu.to_string(), r.w.map(sci).unwrap_or_default()]);
        }
        csv.into_string()
    }

    pub fn overlay_csv(&self) -> String {
        let mut csv = Csv::new(&["n", "i", "a_root", "w"]);
        for o in &self.overlay {
            csv.push([o.n.to_string(), o.i.to_string(), sci(o.a_root), sci(o.w)]);
        }
        csv.into_string()
    }
}
