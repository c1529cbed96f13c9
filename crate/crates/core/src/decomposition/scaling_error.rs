use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::center_manifold::{from_diagonal, integrate_full, to_diagonal, IntegratorOptions, ReducedState};
use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::hermite::{HermiteBasis, SpectralCoeffs};
use crate::initial_data::InitialData;
use crate::norms::weighted_norm_with_tail;
use crate::params::enhanced_diffusivity;
use crate::propagator::propagator;
use crate::quadrature::{Grid, WeightedFunction};

use super::cutoff::wait_time;
use super::expansion::{assemble_app, ApproxSolution};

/// `w(xi, tau)` and `v(xi, tau)` at `tau = log(1+t)`, by the trapezoid rule
/// for the inverse transform in `kappa = k sqrt(1+t)`:
/// `w(xi) = (1/2pi) int e^{i kappa xi} w_hat(kappa/sqrt(1+t), t) d kappa`,
/// and `sqrt(1+t)` times the same for `v`.
pub fn true_solution_scaling(nu: f64, data: &InitialData, t: f64, xi: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let s = (1.0 + t).sqrt();
    let span = xi.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(10.0 * enhanced_diffusivity(nu).sqrt());
    // Every mode decays at least like e^{-nu k^2 t}; the data supply the
    // bound at t = 0.
    let kmax = (40.0 / (nu * t.max(1e-300))).sqrt().min(40.0);
    let kappa_max = s * kmax;
    let dk = (2.0 * PI / (4.0 * span)).min(kappa_max / 200.0);
    let m = (kappa_max / dk).ceil() as i64;
    let modes: Vec<(f64, C64, C64)> = (-m..=m)
        .into_par_iter()
        .map(|i| {
            let kappa = i as f64 * dk;
            let k = kappa / s;
            let u = propagator(k, t, nu).apply([data.w_hat(k), data.v_hat(k)]);
            (kappa, u[0], u[1])
        })
        .collect();
    let vals: Vec<(C64, C64)> = xi
        .par_iter()
        .map(|&x| {
            modes.iter().fold((C64::new(0.0, 0.0), C64::new(0.0, 0.0)), |(a, b), (kappa, w, v)| {
                let e = C64::from_polar(1.0, kappa * x);
                (a + e * w, b + e * v)
            })
        })
        .collect();
    let c = dk / (2.0 * PI);
    let scale = vals.iter().map(|(a, b)| a.norm().max(b.norm())).fold(0.0, f64::max) * c;
    let residue = vals.iter().map(|(a, b)| a.im.abs().max(b.im.abs() * s)).fold(0.0, f64::max) * c;
    if residue > 1e-9 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::ImaginaryResidue(residue));
    }
    Ok(vals.iter().map(|(a, b)| (a.re * c, b.re * c * s)).unzip())
}

/// Hermite coefficients of the exact solution along `times` from the
/// projected ODE system, started from the moments of the data.
pub fn reduced_coefficients(nu: f64, n: usize, data: &InitialData, times: &[f64]) -> Result<Vec<SpectralCoeffs>> {
    let basis = HermiteBasis::for_nu(nu, n);
    let jw = data.w_hat_jet(0.0, n + 1);
    let jv = data.v_hat_jet(0.0, n + 1);
    let i = C64::new(0.0, 1.0);
    let wm: Vec<f64> = (0..=n).map(|l| (i.powu(l as u32) * jw.derivative(l)).re).collect();
    let vm: Vec<f64> = (0..=n + 1).map(|l| (i.powu(l as u32) * jv.derivative(l)).re).collect();
    let c0 = SpectralCoeffs::from_moments(&basis, &wm, &vm, 0.0)?;
    let (a, b) = to_diagonal(&c0.alpha, &c0.beta, nu);
    let opts = IntegratorOptions { rtol: 1e-12, ..Default::default() };
    let traj = integrate_full(&ReducedState::new(a, b, 0.0), nu, times, &opts)?;
    Ok(traj
        .states
        .iter()
        .map(|s| {
            let (alpha, beta) = from_diagonal(&s.a, &s.b, nu);
            SpectralCoeffs { alpha, beta, tau: (1.0 + s.t).ln() }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorScalingReport {
    pub nu: f64,
    pub n: usize,
    pub m: u32,
    pub t_wait: f64,
    pub tau_window: (f64, f64),
    pub taus: Vec<f64>,
    /// `||w - w_app||_{L^2(m)} + ||v - v_app||_{L^2(m)}`
    pub errors: Vec<f64>,
    pub slope: Option<f64>,
    pub target: f64,
}

/// Fits the `tau`-slope of the `L^2(m)` distance between the exact solution
/// and `(w_app, v_app)` over `[tau_wait, tau_wait + window_len]`.
pub fn error_scaling_experiment(nu: f64, n: usize, m: u32, data: &InitialData, window_len: f64, samples: usize) -> Result<ErrorScalingReport> {
    let tau0 = (1.0 + wait_time(nu)).ln();
    error_scaling_in_window(nu, n, m, data, (tau0, tau0 + window_len), samples)
}

pub fn error_scaling_in_window(
    nu: f64,
    n: usize,
    m: u32,
    data: &InitialData,
    window: (f64, f64),
    samples: usize,
) -> Result<ErrorScalingReport> {
    let t_wait = wait_time(nu);
    let t_start = window.0.exp() - 1.0;
    if t_start < t_wait * (1.0 - 1e-12) {
        return Err(Error::WaitTime { t: t_start, required: t_wait });
    }
    if samples < 3 || !(window.1 > window.0) {
        return Err(Error::InvalidParameter(format!("need >= 3 samples on a nonempty window, got {samples} on {window:?}")));
    }
    let taus: Vec<f64> = (0..samples).map(|i| window.0 + (window.1 - window.0) * i as f64 / (samples - 1) as f64).collect();
    let times: Vec<f64> = taus.iter().map(|tau| tau.exp() - 1.0).collect();
    let approx = ApproxSolution::new(nu, n);
    let grid = Arc::new(Grid::for_weight(m, enhanced_diffusivity(nu), 1e-14, 16)?);
    let coeffs = reduced_coefficients(nu, n, data, &times)?;
    let mut errors = vec![];
    for (c, &t) in coeffs.iter().zip(&times) {
        let (w, v) = true_solution_scaling(nu, data, t, &grid.nodes)?;
        let sample = assemble_app(&approx, &c.alpha, &c.beta, t.ln())?;
        let (wa, va): (Vec<f64>, Vec<f64>) = grid.nodes.iter().map(|&x| approx.in_scaling_frame(&sample, x)).unzip();
        let dw = WeightedFunction::new(grid.clone(), w.iter().zip(&wa).map(|(a, b)| a - b).collect(), m)?;
        let dv = WeightedFunction::new(grid.clone(), v.iter().zip(&va).map(|(a, b)| a - b).collect(), m)?;
        errors.push(weighted_norm_with_tail(&dw, m).0 + weighted_norm_with_tail(&dv, m).0);
    }
    let slope = if errors.iter().all(|&e| e > 0.0) {
        let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
        Some(linear_fit(&taus, &ly)?.0)
    } else {
        None
    };
    Ok(ErrorScalingReport { nu, n, m, t_wait, tau_window: window, taus, errors, slope, target: -(n as f64) / 4.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::GaussianPacket;

    #[test]
    fn inverse_transform_recovers_initial_profile() {
        let p = GaussianPacket::new(1.0, 0.3, 1.0, 0);
        let data = InitialData::w_only(p.clone());
        let xs = [-2.0, 0.0, 0.7, 3.0];
        let (w, v) = true_solution_scaling(0.5, &data, 1e-6, &xs).unwrap();
        let s = (1.0f64 + 1e-6).sqrt();
        for (x, (a, b)) in xs.iter().zip(w.iter().zip(&v)) {
            // At t ~ 0 the scaling variables coincide with the physical ones.
            assert!((a - s * p.value(x * s)).abs() < 1e-5, "{x}: {a}");
            assert!(b.abs() < 1e-5);
        }
    }

    #[test]
    fn wait_time_is_enforced() {
        let data = InitialData::gaussian(1.0, 1.0);
        assert!(matches!(error_scaling_in_window(0.5, 2, 3, &data, (1.0, 3.0), 5), Err(Error::WaitTime { .. })));
    }
}
