mod common;

use dispersion_lab::center_manifold::{
    ab_rhs, build_even_table, build_odd_table, integrate_full, predict_rate, CMTables, IntegratorOptions, ReducedState,
};
use dispersion_lab::harness::experiments::{off_manifold_monitor, on_manifold_slopes, rational_f64};
use proptest::prelude::*;

/// `d/dt h(a(t), eta(t))` by a central difference along the vector field.
fn flow_derivative(tables: &CMTables, a: &[f64], eta: f64, nu: f64) -> Vec<f64> {
    let s = ReducedState { a: a.to_vec(), b: tables.h_all(a, eta, nu), eta, t: 0.0 };
    let d = ab_rhs(&s, nu);
    let eps = 1e-5;
    let shift = |sgn: f64| -> Vec<f64> {
        let a2: Vec<f64> = a.iter().zip(&d.da).map(|(x, dx)| x + sgn * eps * dx).collect();
        tables.h_all(&a2, eta + sgn * eps * d.deta, nu)
    };
    let (p, m) = (shift(1.0), shift(-1.0));
    p.iter().zip(&m).map(|(x, y)| (x - y) / (2.0 * eps)).collect()
}

#[test]
fn low_order_graphs_in_closed_form() {
    let (even, odd) = (build_even_table(6), build_odd_table(5));
    let (nu, eta) = (0.37f64, 0.61f64);
    let a = [0.3, -1.1, 0.7, 2.0, -0.4, 0.9, 1.3];
    let h = |t: &dispersion_lab::center_manifold::CMCoeffTable, k: usize| {
        dispersion_lab::center_manifold::h_eval(t, k, &a, eta, nu).unwrap()
    };
    let close = |x: f64, y: f64| (x - y).abs() < 1e-12 * y.abs().max(1.0);
    assert!(close(h(&even, 2), eta * a[0] / nu.powi(3)));
    assert!(close(h(&even, 4), eta * a[2] / nu.powi(3) - 2.0 * eta * eta * a[0] / nu.powi(5)));
    assert!(close(
        h(&even, 6),
        eta * a[4] / nu.powi(3) - 2.0 * eta * eta * a[2] / nu.powi(5) + 5.0 * eta.powi(3) * a[0] / nu.powi(7)
    ));
    assert_eq!(h(&odd, 1), 0.0);
    assert!(close(h(&odd, 3), eta * a[1] / nu.powi(3)));
}

#[test]
fn larger_tables_extend_smaller_ones() {
    let (small, big) = (build_even_table(6), build_even_table(12));
    for (k, p, c) in small.entries() {
        assert_eq!(big.get(k, p), Some(c));
    }
}

#[test]
fn fitted_slopes_match_table_after_transient() {
    for nu in [0.3, 0.5, 1.0] {
        for row in on_manifold_slopes(nu, &[1.0; 9], (10.0, 18.0), 121).unwrap() {
            let want = -rational_f64(predict_rate(row.k).tau_exponent);
            assert!((row.fit.slope - want).abs() < 5e-3, "nu={nu} k={}: {} vs {want}", row.k, row.fit.slope);
        }
    }
}

#[test]
fn full_system_is_attracted_to_the_manifold() {
    let nu = 0.5;
    let tables = CMTables::new(6);
    let s0 = ReducedState::new(vec![1.0; 7], vec![0.3, -0.8, 1.1, 0.2, -0.5, 0.9, 0.4], 0.0);
    let opts = IntegratorOptions { rtol: 1e-11, ..Default::default() };
    let out = integrate_full(&s0, nu, &[20.0, 40.0], &opts).unwrap();
    let dist = |s: &ReducedState| {
        let b = s.off_manifold(nu, &tables).b;
        b.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    };
    let (d1, d2) = (dist(&out.states[0]), dist(&out.states[1]));
    // e^{-nu t} up to algebraic factors.
    let ratio = d2 / d1;
    assert!(ratio < 10.0 * (-nu * 20.0f64).exp(), "{d1:e} {d2:e}");
}

#[test]
fn off_manifold_amplitudes_saturate() {
    for nu in [0.2, 0.5] {
        let sup = |h: f64| {
            off_manifold_monitor(nu, 6, 20, 7, h, 401).unwrap().iter().map(|r| r.sup).fold(0.0, f64::max)
        };
        let (s10, s100, s400) = (sup(10.0), sup(100.0), sup(400.0));
        assert!(s100 < 1.2 * s10, "nu={nu}: {s10} {s100}");
        assert!(s400 < 1.02 * s100, "nu={nu}: {s100} {s400}");
        // The zeroth mode decays at exactly e^{-nu t}.
        for r in off_manifold_monitor(nu, 6, 3, 11, 10.0, 41).unwrap().iter().filter(|r| r.k == 0) {
            assert!(r.late_drift < 1e-8, "{r:?}");
        }
    }
}

#[test]
fn monitor_is_reproducible() {
    let a = off_manifold_monitor(0.5, 4, 5, 42, 10.0, 51).unwrap();
    let b = off_manifold_monitor(0.5, 4, 5, 42, 10.0, 51).unwrap();
    assert_eq!(a, b);
    let c = off_manifold_monitor(0.5, 4, 5, 43, 10.0, 51).unwrap();
    assert_ne!(a, c);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn manifold_is_invariant_under_the_flow(
        a in prop::collection::vec(-2.0f64..2.0, 11),
        eta in 0.01f64..1.0,
        nu in 0.3f64..2.0,
    ) {
        let tables = CMTables::new(10);
        let lhs = flow_derivative(&tables, &a, eta, nu);
        let s = ReducedState { a: a.clone(), b: tables.h_all(&a, eta, nu), eta, t: 0.0 };
        let rhs = ab_rhs(&s, nu).db;
        let scale = lhs.iter().chain(&rhs).fold(1.0f64, |m, x| m.max(x.abs()));
        for k in 0..=10 {
            prop_assert!((lhs[k] - rhs[k]).abs() < 1e-7 * scale, "k={} {} {}", k, lhs[k], rhs[k]);
        }
    }

    #[test]
    fn table_scaling_in_nu(k in 2usize..12, p_steps in 0usize..5) {
        // H(k, p) nu^{k-p+1} is independent of nu.
        let t = if k % 2 == 0 { build_even_table(12) } else { build_odd_table(11) };
        let p = k.saturating_sub(2 * (p_steps + 1));
        let x = t.value(k, p, 0.3) * 0.3f64.powi((k - p + 1) as i32);
        let y = t.value(k, p, 1.7) * 1.7f64.powi((k - p + 1) as i32);
        prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
    }
}
