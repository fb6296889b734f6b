use proptest::prelude::*;

use radspec::frobenius::{
    closed_form_n1, cubic_n2_residual, recurrence_coefficients, truncation_a_roots, truncation_w,
};
use radspec::model::{allowed_omega_scan, energy_from_w, reduce, truncation_residual_at};
use radspec::oracle::{hellmann_feynman, HF_STEP};
use radspec::variational::{self, wavefunction_eval, BasisSpec, Precision, DEFAULT_BASIS_SIZE};
use radspec::{PhysicalParams, ReducedParams, SpinLabel};

fn gamma_choice() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.0, 0.5, 1.0, 2.0])
}

/// Relation between consecutive series coefficients, written out directly
/// from substituting the series into the operator.
fn series_defect(gamma: f64, a: f64, b: f64, w: f64, c: &[f64], k: usize) -> f64 {
    let kf = k as f64;
    let lhs = (kf + 1.0) * (kf + 2.0 * gamma + 1.0) * c[k + 1];
    let prev = if k == 0 { 0.0 } else { c[k - 1] };
    let rhs = (b * kf + (2.0 * gamma + 1.0) * b / 2.0 - a) * c[k] + (2.0 * kf + 2.0 * gamma - b * b / 4.0 - w) * prev;
    (lhs - rhs).abs() / (1.0 + lhs.abs() + rhs.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coefficients_satisfy_the_series_relation(
        gamma in 0.0f64..3.0, a in -4.0f64..4.0, b in -4.0f64..4.0, w in -10.0f64..30.0,
    ) {
        let s = recurrence_coefficients(gamma, a, b, w, 14).unwrap();
        prop_assert_eq!(s.coeffs[0], 1.0);
        for k in 0..13 {
            let d = series_defect(gamma, a, b, w, &s.coeffs, k);
            prop_assert!(d < 1e-13, "k = {}, defect {:e}", k, d);
        }
    }

    #[test]
    fn truncation_roots_are_real_and_terminate(gamma in gamma_choice(), n in 1usize..=8, b in -3.0f64..3.0) {
        let sol = truncation_a_roots(gamma, n, b).unwrap();
        prop_assert_eq!(sol.a_roots.len(), n + 1);
        prop_assert!(sol.a_roots.iter().all(|a| a.is_finite()));
        prop_assert!(sol.a_roots.windows(2).all(|p| p[0] < p[1]));
        prop_assert_eq!(sol.w, (8.0 * (gamma + n as f64 + 1.0) - b * b) / 4.0);
        for &a in &sol.a_roots {
            let c = recurrence_coefficients(gamma, a, b, sol.w, n + 10).unwrap().coeffs;
            let head = c[..=n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let tail = c[n + 1..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(tail <= 1e-9 * head, "n = {}, a = {}, tail {:e}, head {:e}", n, a, tail, head);
        }
    }

    #[test]
    fn first_order_roots_match_closed_form(gamma in 0.0f64..4.0, b in -5.0f64..5.0) {
        let sol = truncation_a_roots(gamma, 1, b).unwrap();
        let (lo, hi) = closed_form_n1(gamma, b);
        prop_assert!((sol.a_roots[0] - lo).abs() < 1e-12 * (1.0 + lo.abs()));
        prop_assert!((sol.a_roots[1] - hi).abs() < 1e-12 * (1.0 + hi.abs()));
    }

    #[test]
    fn second_order_roots_solve_the_cubic(gamma in 0.0f64..3.0, b in -3.0f64..3.0) {
        for a in truncation_a_roots(gamma, 2, b).unwrap().a_roots {
            let r = cubic_n2_residual(gamma, a, b);
            prop_assert!(r.abs() < 1e-6 * (1.0 + a.abs().powi(3)), "a = {}, residual {:e}", a, r);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn enlarging_the_basis_never_raises_a_level(
        gamma in 0.0f64..2.5, a in -3.0f64..6.0, b in -2.0f64..2.0, size in 6usize..DEFAULT_BASIS_SIZE,
    ) {
        let p = ReducedParams::new(gamma, a, b);
        let small = variational::eigenvalues(&p, 3, &BasisSpec::new(gamma, size), Precision::Extended).unwrap();
        let large = variational::eigenvalues(&p, 3, &BasisSpec::new(gamma, size + 1), Precision::Extended).unwrap();
        for (s, l) in small.iter().zip(&large) {
            prop_assert!(*l <= s + 1e-12 * (1.0 + s.abs()), "N = {}: {} -> {}", size, s, l);
        }
    }

    #[test]
    fn level_falls_with_a_and_rises_with_b(
        gamma in 0.0f64..2.0, a in -2.0f64..4.0, b in -1.5f64..2.0, nu in 0usize..2,
    ) {
        let hf = hellmann_feynman(&ReducedParams::new(gamma, a, b), nu, HF_STEP).unwrap();
        prop_assert!(hf.dw_da < 0.0 && hf.dw_db > 0.0, "{:?}", hf);
        let (ra, rb) = hf.residuals();
        prop_assert!(ra < 1e-5 && rb < 1e-5, "{:?}", hf);
    }

    #[test]
    fn states_are_normalised(gamma in 0.0f64..2.0, a in -2.0f64..4.0, b in -1.0f64..2.0, nu in 0usize..3) {
        let p = ReducedParams::new(gamma, a, b);
        let r = variational::spectrum(&p, 3, &BasisSpec::new(gamma, DEFAULT_BASIS_SIZE), Precision::Extended).unwrap();
        // composite Simpson in t = sqrt(ξ), which smooths the ξ^(2γ+1) onset
        let (cells, top) = (4000, 12f64.sqrt());
        let h = top / cells as f64;
        let mut sum = 0.0;
        for k in 0..=cells {
            let t = k as f64 * h;
            let weight = if k == 0 || k == cells { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            let v = wavefunction_eval(&r, nu, t * t).unwrap();
            sum += weight * v * v * 2.0 * t.powi(3);
        }
        let norm = sum * h / 3.0;
        prop_assert!((norm - 1.0).abs() < 1e-8, "norm {}", norm);
    }

    #[test]
    fn ground_state_has_no_node(gamma in 0.0f64..2.0, a in -2.0f64..2.5, b in -1.0f64..2.0) {
        let p = ReducedParams::new(gamma, a, b);
        let r = variational::spectrum(&p, 1, &BasisSpec::new(gamma, DEFAULT_BASIS_SIZE), Precision::Extended).unwrap();
        let values: Vec<f64> = (1..=200).map(|k| wavefunction_eval(&r, 0, 6.0 * k as f64 / 200.0).unwrap()).collect();
        let sign = values[0].signum();
        prop_assert!(values.iter().all(|v| v.signum() == sign && *v != 0.0));
    }
}

fn spin() -> impl Strategy<Value = SpinLabel> {
    prop::sample::select(vec![SpinLabel::Up, SpinLabel::Down])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_map_inverts(
        w in -50.0f64..50.0, m in 0.1f64..5.0, omega in 0.1f64..5.0, v0 in -3.0f64..3.0, s in spin(),
    ) {
        let p = PhysicalParams { v0, ..PhysicalParams::with_kappa(m, omega, 2.0, 0.0, 0.0, 1, s) };
        let e = energy_from_w(w, &p);
        let back = (e - v0) * 2.0 * m / (2.0 * m * p.a2()).sqrt();
        prop_assert!((back - w).abs() < 1e-12 * (1.0 + w.abs()));
    }

    #[test]
    fn no_inverse_square_term_keeps_orbital_index(
        l in 0i32..6, m in 0.1f64..5.0, omega in 0.1f64..5.0, kappa in -8.0f64..8.0,
    ) {
        let r = reduce(&PhysicalParams::with_kappa(m, omega, kappa, 0.0, 0.0, l, SpinLabel::Up)).unwrap();
        prop_assert_eq!(r.gamma, l as f64);
    }

    #[test]
    fn truncation_level_is_even_in_b(gamma in 0.0f64..3.0, n in 1usize..10, b in -5.0f64..5.0) {
        prop_assert_eq!(truncation_w(gamma, n, b), truncation_w(gamma, n, -b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scan_roots_are_isolated(kappa in 2.0f64..12.0, n in 1usize..3) {
        let p = PhysicalParams::with_kappa(1.0, 1.0, kappa, 0.0, 0.0, 0, SpinLabel::Up);
        let roots = allowed_omega_scan(&p, n, (0.1, 10.0), 256).unwrap();
        for pair in roots.windows(2) {
            let mid = (pair[0] * pair[1]).sqrt();
            prop_assert!(truncation_residual_at(&p, n, mid).unwrap() != 0.0, "midpoint {}", mid);
        }
        for &omega in &roots {
            prop_assert!((0.1..=10.0).contains(&omega));
            let scale = truncation_residual_at(&p, n, 0.1).unwrap().abs().max(1.0);
            prop_assert!(truncation_residual_at(&p, n, omega).unwrap().abs() < 1e-10 * scale);
        }
    }
}
