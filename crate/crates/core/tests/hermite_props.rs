mod common;

use std::sync::Arc;

use dispersion_lab::harness::criteria::biorthogonality_defect;
use dispersion_lab::hermite::{project, HermiteBasis, SpectralCoeffs};
use dispersion_lab::quadrature::WeightedFunction;
use proptest::prelude::*;

#[test]
fn phi_moments_follow_from_heat_kernel_moments() {
    // int xi^l phi_r = (-1)^r l!/(l-r)! int xi^{l-r} phi_0 by parts.
    let b = HermiteBasis::for_nu(0.5, 8);
    for l in 0..=10usize {
        for r in 0..=8usize.min(l) {
            let fall: f64 = (0..r).map(|q| (l - q) as f64).product();
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            let want = sign * fall * common::heat_kernel_moment((l - r) as u32, b.nu_t);
            let got = b.moment(l, r);
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "l={l} r={r}: {got} {want}");
        }
    }
}

#[test]
fn biorthogonal_up_to_ten() {
    for nu in [0.2, 0.5, 1.0, 2.0] {
        let d = biorthogonality_defect(nu, 10).unwrap();
        assert!(d < 1e-10, "nu={nu}: {d:e}");
    }
}

#[test]
fn coefficients_of_a_gaussian_are_scaled_heat_moments() {
    // A Gaussian of the basis' own width is phi_0 exactly.
    let b = HermiteBasis::for_nu(0.7, 6);
    let g = Arc::new(b.grid(8, 1e-14).unwrap());
    let f = WeightedFunction::from_fn(g, 8, |x| 3.0 * b.phi0(x));
    let c = project(&b, &f, 6, 1e-12).unwrap();
    assert!((c[0] - 3.0).abs() < 1e-12);
    assert!(c[1..].iter().all(|x| x.abs() < 1e-11), "{c:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn synthesis_then_projection_is_identity(
        coeffs in prop::collection::vec(-3.0f64..3.0, 7),
        nu in 0.2f64..2.0,
    ) {
        let b = HermiteBasis::for_nu(nu, 6);
        let g = Arc::new(b.grid(8, 1e-14).unwrap());
        let f = b.synthesize(&coeffs, 0, &g, 8).unwrap();
        let back = project(&b, &f, 6, 1e-10).unwrap();
        for (x, y) in coeffs.iter().zip(&back) {
            prop_assert!((x - y).abs() < 1e-9, "{} {}", x, y);
        }
    }

    #[test]
    fn moment_route_matches_quadrature(shift in -1.0f64..1.0, width in 0.8f64..3.0, tilt in -0.5f64..0.5) {
        let b = HermiteBasis::for_nu(0.5, 5);
        let g = Arc::new(b.grid(7, 1e-14).unwrap());
        let f = WeightedFunction::from_fn(g.clone(), 7, |x| (-(x - shift).powi(2) / width).exp() * (1.0 + tilt * x));
        let quad = project(&b, &f, 5, 1e-10).unwrap();
        let mom: Vec<f64> = (0..=5).map(|l| f.moment(l)).collect();
        let via = SpectralCoeffs::from_moments(&b, &mom, &[0.0; 7], 0.0).unwrap();
        for (x, y) in quad.iter().zip(&via.alpha) {
            prop_assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()));
        }
    }
}
