//! The acceptance checks, one function per criterion ID.

use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::center_manifold::{build_even_table, build_odd_table, h_poly, invariance_residual, LinearPoly};
use crate::decomposition::{decompose, offset_grid, recombination_defect, true_solution_scaling, wait_time};
use crate::error::Result;
use crate::hermite::{project_pair, HermiteBasis};
use crate::initial_data::{GaussianPacket, InitialData};
use crate::norms::{equivalence_band, triple_norm, weighted_norm, FourierField};
use crate::params::{GridConfig, Params, Tolerances};
use crate::quadrature::{Grid, WeightedFunction};

use super::config::{ExperimentConfig, ExperimentKind, ExperimentSection};
use super::experiments::{
    bounds_outcome, criterion5_from_rows, criterion6_from_rows, criterion7_from, criterion8_from, off_manifold_monitor,
    on_manifold_slopes, oracle_max_error, run_enhanced_diffusion,
};
use super::report::CriterionResult;
use crate::decomposition::error_scaling_in_window;

fn timed(id: u8, name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult { id, name: name.into(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn with_time(c: Result<CriterionResult>, id: u8, name: &str, start: Instant) -> CriterionResult {
    let mut c = c.unwrap_or_else(|e| CriterionResult {
        id,
        name: name.into(),
        passed: false,
        detail: format!("error: {e}"),
        seconds: 0.0,
    });
    c.seconds = start.elapsed().as_secs_f64();
    c
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `sum c * a_p eta^e nu^q` from `(p, e, q, c)` tuples.
fn poly(terms: &[(usize, u32, i32, i64)]) -> LinearPoly {
    let mut r = LinearPoly::default();
    for &(p, e, q, c) in terms {
        r.add(&LinearPoly::monomial(p, e, q, int(c)));
    }
    r
}

pub fn criterion_1() -> CriterionResult {
    timed(1, "coefficient regression", || {
        let even = build_even_table(6);
        let odd = build_odd_table(5);
        let expected = [
            (&even, 2, poly(&[(0, 1, -3, 1)])),
            (&even, 4, poly(&[(2, 1, -3, 1), (0, 2, -5, -2)])),
            (&even, 6, poly(&[(4, 1, -3, 1), (2, 2, -5, -2), (0, 3, -7, 5)])),
            (&odd, 1, LinearPoly::default()),
            (&odd, 3, poly(&[(1, 1, -3, 1)])),
        ];
        let bad: Vec<usize> = expected.iter().filter(|(t, k, p)| h_poly(t, *k) != *p).map(|e| e.1).collect();
        Ok((bad.is_empty(), format!("h2, h4, h6, h1, h3 exact; mismatches at k = {bad:?}")))
    })
}

pub fn criterion_2() -> CriterionResult {
    timed(2, "symbolic invariance", || {
        let even = build_even_table(10);
        let odd = build_odd_table(9);
        let bad: Vec<usize> =
            (0..=10).filter(|&k| !invariance_residual(if k % 2 == 0 { &even } else { &odd }, k).is_zero()).collect();
        Ok((bad.is_empty(), format!("residual is the zero polynomial for k <= 10 except {bad:?}")))
    })
}

pub fn criterion_3() -> CriterionResult {
    timed(3, "propagator oracle equivalence", || {
        let e = oracle_max_error(&[0.2, 0.5, 1.0], &[1.0, 10.0, 50.0])?;
        Ok((e < 1e-8, format!("max relative error {e:.2e} (need < 1e-8)")))
    })
}

fn diffusion_config(nu: f64) -> Result<ExperimentConfig> {
    let mut s = ExperimentSection::new(ExperimentKind::EnhancedDiffusion);
    s.probes = vec![1e-3];
    ExperimentConfig::new(Params::new(nu, 4, 5, 1.0)?, GridConfig::default(), Tolerances::default(), s)
}

pub fn criterion_4() -> CriterionResult {
    let start = Instant::now();
    let c = (|| {
        let mut details = vec![];
        let mut ok = true;
        for nu in [0.2, 1.0] {
            let r = run_enhanced_diffusion(&diffusion_config(nu)?)?;
            let c = &r.criteria[0];
            ok &= c.passed;
            details.push(c.detail.clone());
        }
        Ok(CriterionResult { id: 4, name: "enhanced diffusivity".into(), passed: ok, detail: details.join("; "), seconds: 0.0 })
    })();
    with_time(c, 4, "enhanced diffusivity", start)
}

pub fn criterion_5() -> CriterionResult {
    let start = Instant::now();
    let window = (3.0, 9.0);
    let c = on_manifold_slopes(0.5, &[1.0; 9], window, 121).map(|rows| criterion5_from_rows(&rows, 0.5, window).unwrap());
    with_time(c, 5, "reduced-system decay exponents", start)
}

pub fn criterion_6() -> CriterionResult {
    let start = Instant::now();
    let c = (|| {
        let mut rows = off_manifold_monitor(0.2, 6, 20, 7, 10.0, 201)?;
        rows.extend(off_manifold_monitor(0.5, 6, 20, 7, 10.0, 201)?);
        Ok(criterion6_from_rows(&rows))
    })();
    with_time(c, 6, "off-manifold contraction", start)
}

pub fn criterion_7() -> CriterionResult {
    let start = Instant::now();
    let c = bounds_outcome(0.5, 4, &InitialData::gaussian(1.0, 1.0), wait_time(0.5)).map(|o| criterion7_from(&o, 4));
    with_time(c, 7, "residual and high-mode bounds", start)
}

pub fn criterion_8() -> CriterionResult {
    let start = Instant::now();
    let nu = 0.5;
    let tau0 = (1.0 + wait_time(nu)).ln();
    let c = error_scaling_in_window(nu, 4, 5, &InitialData::gaussian(1.0, 1.0), (tau0, tau0 + 4.0), 9)
        .map(|r| criterion8_from(&r));
    with_time(c, 8, "approximation error scaling", start)
}

/// `max |int H_k phi_l - delta_kl|` for `k, l <= n`.
pub fn biorthogonality_defect(nu: f64, n: usize) -> Result<f64> {
    let b = HermiteBasis::for_nu(nu, n);
    let g = b.grid(n as u32 + 2, 1e-15)?;
    let mut worst: f64 = 0.0;
    for k in 0..=n {
        for l in 0..=n {
            let v = g.integrate_fn(|x| b.hermite_poly(k, x).unwrap() * b.phi(l, x).unwrap());
            worst = worst.max((v - if k == l { 1.0 } else { 0.0 }).abs());
        }
    }
    Ok(worst)
}

/// Largest relative moment of `w - P_N w` (orders `<= N`) and of
/// `v - d_xi P_N u` (orders `<= N + 1`) for the exact solution at time `t`.
pub fn moment_vanishing_defect(nu: f64, n: usize, m: u32, data: &InitialData, t: f64) -> Result<f64> {
    let b = HermiteBasis::for_nu(nu, n + 1);
    let g = Arc::new(b.grid(m, 1e-14)?);
    let (w, v) = true_solution_scaling(nu, data, t, &g.nodes)?;
    let w = WeightedFunction::new(g.clone(), w, m)?;
    let v = WeightedFunction::new(g.clone(), v, m)?;
    let c = project_pair(&b, &w, &v, n, (1.0 + t).ln(), 1e-10)?;
    let ws = w.sub(&c.w_projection(&b, &g, m)?);
    let vs = v.sub(&c.v_projection(&b, &g, m)?);
    let rel = |f: &WeightedFunction, orig: &WeightedFunction, l: u32| {
        let scale = g.integrate_fn_values(&orig.values, |x, y| (x.abs().powi(l as i32) * y).abs());
        f.moment(l).abs() / scale
    };
    let mut worst: f64 = 0.0;
    for l in 0..=n as u32 {
        worst = worst.max(rel(&ws, &w, l));
    }
    for l in 0..=n as u32 + 1 {
        worst = worst.max(rel(&vs, &v, l));
    }
    Ok(worst)
}

/// Largest recombination defect of the low/high split over a `(nu, t)` grid.
pub fn recombination_check() -> Result<f64> {
    let data = InitialData::gaussian(1.0, 1.0);
    let mut worst: f64 = 0.0;
    for nu in [0.2, 0.5, 1.0] {
        for t in [wait_time(nu), 3.0 * wait_time(nu)] {
            let rows = decompose(nu, 4, t, &data, &offset_grid(nu, 3.0, 400))?;
            worst = worst.max(recombination_defect(&rows));
        }
    }
    Ok(worst)
}

/// Ratio `|||w~||| / ||w||_{L^2(m)}` for a shifted Gaussian derivative,
/// with the weighted norm computed directly in the scaling variable.
pub fn norm_ratio(m: usize, t: f64) -> Result<f64> {
    let p = GaussianPacket::new(1.0, 0.7, 2.0, 1);
    let kg = Grid::gauss_legendre(-20.0, 20.0, 40, 16)?;
    let tn = triple_norm(&FourierField::Analytic { field: &p, grid: &kg }, t, m)?;
    let s = (1.0 + t).sqrt();
    let xg = Arc::new(Grid::gauss_legendre(-60.0 / s, 60.0 / s, 120, 16)?);
    let f = WeightedFunction::from_fn(xg, m as u32, |xi| s * p.value(xi * s));
    Ok(tn / weighted_norm(&f, m as u32, 1e-12)?)
}

pub fn criterion_9() -> CriterionResult {
    timed(9, "structural suites", || {
        let bio = [0.2, 0.5, 1.0].iter().map(|&nu| biorthogonality_defect(nu, 10)).collect::<Result<Vec<_>>>()?;
        let bio = bio.into_iter().fold(0.0, f64::max);
        let data = InitialData::w_only(GaussianPacket::new(1.0, 0.3, 1.0, 0));
        let mom = moment_vanishing_defect(0.5, 4, 6, &data, 20.0)?;
        let rec = recombination_check()?;
        let mut band_ok = true;
        let mut spread: f64 = 0.0;
        for m in 0..=4 {
            let (lo, hi) = equivalence_band(m);
            let r: Vec<f64> = [0.0, 1.0, 10.0, 100.0, 1000.0].iter().map(|&t| norm_ratio(m, t)).collect::<Result<_>>()?;
            band_ok &= r.iter().all(|&x| x >= lo * (1.0 - 1e-10) && x <= hi * (1.0 + 1e-10));
            let (a, b) = r.iter().fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
            spread = spread.max(b / a);
        }
        let ok = bio < 1e-10 && mom < 1e-8 && rec < 1e-10 && band_ok;
        Ok((
            ok,
            format!(
                "biorthogonality {bio:.1e}, moment vanishing {mom:.1e}, recombination {rec:.1e}, norm band held: {band_ok} (max ratio spread {spread:.3})"
            ),
        ))
    })
}

pub fn all_criteria() -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ]
}
