mod common;

use dispersion_lab::decomposition::{
    app_from_taylor, assemble_app, decompose, error_scaling_in_window, lemma_norm, offset_grid, recombination_defect,
    reduced_coefficients, solution_moments, taylor_at_zero, true_solution_scaling, wait_time, wbar_jets_at_zero,
    ApproxSolution, CutoffSpec,
};
use dispersion_lab::initial_data::{GaussianPacket, InitialData};
use dispersion_lab::quadrature::Grid;
use dispersion_lab::{Error, C64};
use proptest::prelude::*;

#[test]
fn wait_time_at_one_half() {
    // max(2/nu, (8/nu) log(1/nu)) = 16 log 2
    assert!((wait_time(0.5) - 11.09).abs() < 5e-3);
    assert_eq!(wait_time(1.0), 2.0);
}

#[test]
fn taylor_coefficients_of_a_unit_gaussian() {
    // w0 = e^{-k^2/2}, v0 = 0: wbar = e^{Lambda t} f1 w0 with f1 = 1 + k^2/nu^2 + O(k^4)
    // and Lambda = O(k^4); vbar = e^{Lambda t} f2 w0 with f2 = -ik/nu + O(k^3).
    let data = InitialData::w_only(GaussianPacket::new(1.0, 0.0, 1.0, 0));
    for nu in [0.3, 0.5, 1.0] {
        for t in [0.0, 5.0, 40.0] {
            let (w, v) = wbar_jets_at_zero(nu, &data, t, 4);
            assert!((w.derivative(0) - 1.0).norm() < 1e-14);
            assert!(w.derivative(1).norm() < 1e-14);
            let d2 = 2.0 * (1.0 / (nu * nu) - 0.5);
            assert!((w.derivative(2) - d2).norm() < 1e-12 * d2.abs().max(1.0), "nu={nu} t={t}");
            assert!((v.derivative(1) - C64::new(0.0, -1.0 / nu)).norm() < 1e-12);
        }
    }
}

fn route_gap(nu: f64, n: usize, data: &InitialData, t: f64) -> f64 {
    let approx = ApproxSolution::new(nu, n);
    let c = &reduced_coefficients(nu, n, data, &[t]).unwrap()[0];
    let a = assemble_app(&approx, &c.alpha, &c.beta, t.ln()).unwrap();
    let b = app_from_taylor(&taylor_at_zero(nu, data, n, t).unwrap()).unwrap();
    a.w.iter().chain(&a.v).zip(b.w.iter().chain(&b.v)).map(|(x, y)| (x - y).abs() / (1.0 + y.abs())).fold(0.0, f64::max)
}

#[test]
fn two_routes_to_the_approximation_agree() {
    // The moment route sees the whole solution, the Taylor route only the
    // slow branch; they differ by the e^{-nu t} part.
    let data = InitialData::gaussian(1.0, 1.0);
    for (nu, n) in [(0.5, 4), (1.0, 6), (0.3, 3)] {
        let gap = route_gap(nu, n, &data, wait_time(nu));
        assert!(gap < 10.0 * (-nu * wait_time(nu)).exp(), "nu={nu}: {gap:e}");
        let late = 70.0 / nu;
        let gap = route_gap(nu, n, &data, late);
        assert!(gap < 1e-9, "nu={nu} late: {gap:e}");
    }
}

#[test]
fn moments_from_jets_match_quadrature() {
    let nu = 0.5;
    let data = InitialData::gaussian(1.0, 1.0);
    let t = 15.0;
    let g = Grid::gauss_legendre(-30.0, 30.0, 60, 16).unwrap();
    let (w, v) = true_solution_scaling(nu, &data, t, &g.nodes).unwrap();
    let (wm, vm) = solution_moments(nu, &data, t, 5).unwrap();
    for l in 0..=5 {
        let qw = g.integrate(&g.nodes.iter().zip(&w).map(|(x, f)| x.powi(l as i32) * f).collect::<Vec<_>>());
        let qv = g.integrate(&g.nodes.iter().zip(&v).map(|(x, f)| x.powi(l as i32) * f).collect::<Vec<_>>());
        assert!((qw - wm[l]).abs() < 1e-9 * (1.0 + wm[l].abs()), "w l={l}: {qw} {}", wm[l]);
        assert!((qv - vm[l]).abs() < 1e-9 * (1.0 + vm[l].abs()), "v l={l}: {qv} {}", vm[l]);
    }
}

#[test]
fn lemma_norms_match_gaussian_moments() {
    // ||k^d e^{-a k^2}||^2 = sqrt(pi/(2a)) E[k^{2d}] with variance 1/(4a).
    for d in 0..4u32 {
        for (nu_t, t) in [(2.5, 11.0), (5.2, 300.0), (2.0, 0.5)] {
            let a: f64 = nu_t * t;
            let want = ((std::f64::consts::PI / (2.0 * a)).sqrt() * common::heat_kernel_moment(2 * d, 1.0 / (8.0 * a))).sqrt();
            let got = lemma_norm(d, nu_t, t);
            assert!((got - want).abs() < 1e-13 * want, "d={d}: {got} {want}");
        }
    }
}

#[test]
fn cutoff_region_contains_the_double_point() {
    // The bridge of the cutoff reaches past nu/2 for every nu above ~0.016.
    for nu in [0.05, 0.2, 0.5, 1.0] {
        let spec = CutoffSpec::new(nu);
        assert!(spec.contains(nu / 2.0), "nu={nu}");
    }
}

#[test]
fn early_windows_are_refused() {
    let data = InitialData::gaussian(1.0, 1.0);
    let r = error_scaling_in_window(0.5, 4, 5, &data, (1.0, 3.0), 5);
    assert!(matches!(r, Err(Error::WaitTime { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pieces_recombine(nu in 0.15f64..1.5, t_scale in 1.0f64..5.0, width in 0.5f64..2.0) {
        let data = InitialData::gaussian(width, 1.0);
        let t = t_scale * wait_time(nu);
        let rows = decompose(nu, 4, t, &data, &offset_grid(nu, 2.0, 200)).unwrap();
        prop_assert!(recombination_defect(&rows) < 1e-10);
        // Outside the cutoff support everything is high-frequency.
        let spec = CutoffSpec::new(nu);
        for r in rows.iter().filter(|r| r.k.abs() >= spec.r2) {
            prop_assert!(r.low_n == C64::new(0.0, 0.0) && r.high == r.total);
        }
    }
}
