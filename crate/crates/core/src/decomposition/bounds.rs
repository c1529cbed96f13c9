use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::initial_data::InitialData;
use crate::jet::Jet;
use crate::params::enhanced_diffusivity;
use crate::propagator::{is_degenerate, propagator};
use crate::quadrature::Grid;

use super::cutoff::{cutoff_jet, CutoffSpec};
use super::expansion::{taylor_at_zero, LowModeExpansion};
use super::modes::{heat_jet, ModeJets};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Symmetric grid of `n` cell midpoints on `[-kmax, kmax]`; `n` is bumped
/// until no node lies within a tenth of a cell of a double point.
pub fn offset_grid(nu: f64, kmax: f64, n: usize) -> Vec<f64> {
    let mut n = n.max(2);
    loop {
        let h = 2.0 * kmax / n as f64;
        let nodes: Vec<f64> = (0..n).map(|i| -kmax + (i as f64 + 0.5) * h).collect();
        if nodes.iter().all(|k| (k.abs() - 0.5 * nu).abs() > 0.1 * h && !is_degenerate(*k, nu)) {
            return nodes;
        }
        n += 1;
    }
}

/// One row of the frequency decomposition of `w_hat(k, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRow {
    pub k: f64,
    /// `psi e^{-nu_T k^2 t} wbar_low^N`
    pub low_n: C64,
    /// `psi e^{-nu_T k^2 t} wbar_low^res`
    pub residual: C64,
    /// `psi g e^{lambda_minus t}`
    pub minus_part: C64,
    /// `(1 - psi) w_hat`
    pub high: C64,
    /// `w_hat` from the propagator.
    pub total: C64,
}

impl DecompositionRow {
    pub fn recombined(&self) -> C64 {
        self.low_n + self.residual + self.minus_part + self.high
    }
}

/// Splits `w_hat(k, t)` at each `k`. The pieces inside the cutoff come
/// from the eigen-split, `high` and `total` from the propagator, so the
/// recombination is a genuine consistency check.
pub fn decompose(nu: f64, n: usize, t: f64, data: &InitialData, ks: &[f64]) -> Result<Vec<DecompositionRow>> {
    let spec = CutoffSpec::new(nu);
    let exp = taylor_at_zero(nu, data, n, t)?;
    let nu_t = enhanced_diffusivity(nu);
    ks.par_iter()
        .map(|&k| {
            let u = propagator(k, t, nu).apply([data.w_hat(k), data.v_hat(k)]);
            let psi = super::cutoff::cutoff(&spec, k);
            let mut row = DecompositionRow { k, low_n: ZERO, residual: ZERO, minus_part: ZERO, high: u[0] * (1.0 - psi), total: u[0] };
            if psi > 0.0 {
                let j = ModeJets::new(k, t, nu, data, 0)?;
                let heat = (-nu_t * k * k * t).exp();
                let low = exp.eval_w(k) * heat;
                row.low_n = low * psi;
                row.residual = (j.w_plus.value() - low) * psi;
                row.minus_part = j.w_minus.value() * psi;
            }
            Ok(row)
        })
        .collect()
}

/// `max |recombined - total| / max |total|`.
pub fn recombination_defect(rows: &[DecompositionRow]) -> f64 {
    let scale = rows.iter().map(|r| r.total.norm()).fold(0.0, f64::max);
    let err = rows.iter().map(|r| (r.recombined() - r.total).norm()).fold(0.0, f64::max);
    if scale == 0.0 { err } else { err / scale }
}

/// `||k^d e^{-nu_T k^2 t}||_{L^2} = sqrt(Gamma(d + 1/2)) (2 nu_T t)^{-(2d+1)/4}`.
pub fn lemma_norm(d: u32, nu_t: f64, t: f64) -> f64 {
    let mut gamma = PI.sqrt(); // Gamma(1/2)
    for i in 0..d {
        gamma *= i as f64 + 0.5;
    }
    gamma.sqrt() * (2.0 * nu_t * t).powf(-(2.0 * d as f64 + 1.0) / 4.0)
}

/// The same norm by Gauss-Legendre quadrature.
pub fn lemma_norm_quadrature(d: u32, nu_t: f64, t: f64) -> Result<f64> {
    // e^{-2 a k^2} k^{2d} < 1e-40 beyond this.
    let a = nu_t * t;
    let kmax = ((92.0 + 2.0 * d as f64 * 6.0) / (2.0 * a)).sqrt();
    let g = Grid::gauss_legendre(-kmax, kmax, 64, 16)?;
    Ok(g.integrate_fn(|k| k.powi(2 * d as i32) * (-2.0 * a * k * k).exp()).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub d: u32,
    pub t: f64,
    pub formula: f64,
    pub quadrature: f64,
    pub rel_error: f64,
}

pub fn lemma_check(nu: f64, ds: &[u32], ts: &[f64]) -> Result<Vec<LemmaCheck>> {
    let nu_t = enhanced_diffusivity(nu);
    let mut out = vec![];
    for &d in ds {
        for &t in ts {
            let formula = lemma_norm(d, nu_t, t);
            let quadrature = lemma_norm_quadrature(d, nu_t, t)?;
            out.push(LemmaCheck { d, t, formula, quadrature, rel_error: (formula - quadrature).abs() / formula });
        }
    }
    Ok(out)
}

/// `max_{i <= order} sup_k |d^i f(k)|` of the initial transforms over a grid.
pub fn data_c_norm(data: &InitialData, order: usize, kmax: f64) -> f64 {
    let n = 2001;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let k = -kmax + 2.0 * kmax * i as f64 / (n - 1) as f64;
            let (w, v) = (data.w_hat_jet(k, order), data.v_hat_jet(k, order));
            (0..=order).map(|j| w.derivative(j).norm().max(v.derivative(j).norm())).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Time series of a bound check with the smallest admissible constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub nu: f64,
    pub j: usize,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// `norm / (bound shape * data norm)` at each time.
    pub constants: Vec<f64>,
    /// Log-log slope in `t` (residual) or exponential rate (high modes).
    pub fitted: Option<f64>,
    pub predicted: f64,
    /// The constants do not grow: the late maximum is within 10% of the early one.
    pub stabilized: bool,
}

fn stabilized(c: &[f64]) -> bool {
    if c.len() < 2 {
        return true;
    }
    let mid = c.len() / 2;
    let early = c[..mid].iter().cloned().fold(0.0, f64::max);
    let late = c[mid..].iter().cloned().fold(0.0, f64::max);
    late <= 1.1 * early
}

fn l2_of_derivative(nodes: &[f64], f: impl Fn(f64) -> Result<Jet> + Sync, j: usize) -> Result<f64> {
    let h = nodes[1] - nodes[0];
    let sq: Result<Vec<f64>> = nodes.par_iter().map(|&k| Ok(f(k)?.derivative(j).norm_sqr())).collect();
    Ok((sq?.iter().sum::<f64>() * h).sqrt())
}

/// Low-mode residual `(1+t)^{-j/2} ||d_k^j(psi e^{-nu_T k^2 t} wbar_low^res)||`
/// against `nu^{-N/4-j/2} t^{-N/4-1/2}` times the `C^{N+j}` data norm.
pub fn residual_bound_check(nu: f64, n: usize, j: usize, data: &InitialData, t_grid: &[f64]) -> Result<BoundReport> {
    if let Some(&t) = t_grid.iter().find(|&&t| t <= 2.0 / nu) {
        return Err(Error::WaitTime { t, required: 2.0 / nu });
    }
    let spec = CutoffSpec::new(nu);
    let nodes = offset_grid(nu, spec.r2, 4000);
    let dnorm = data_c_norm(data, n + j, spec.r2);
    let expo = n as f64 / 4.0 + 0.5;
    let mut norms = vec![];
    let mut constants = vec![];
    for &t in t_grid {
        let exp: LowModeExpansion = taylor_at_zero(nu, data, n, t)?;
        let f = |k: f64| -> Result<Jet> {
            let m = ModeJets::new(k, t, nu, data, j)?;
            let low = &exp.w_jet(k, j) * &heat_jet(k, t, nu, j);
            Ok(&cutoff_jet(&spec, k, j) * &(&m.w_plus - &low))
        };
        let r = l2_of_derivative(&nodes, f, j)? * (1.0 + t).powf(-(j as f64) / 2.0);
        norms.push(r);
        let shape = nu.powf(-(n as f64) / 4.0 - j as f64 / 2.0) * t.powf(-expo) * dnorm;
        constants.push(if shape > 0.0 { r / shape } else { 0.0 });
    }
    let fitted = log_slope(t_grid, &norms, true)?;
    Ok(BoundReport { nu, j, times: t_grid.to_vec(), stabilized: stabilized(&constants), norms, constants, fitted, predicted: -expo })
}

/// High-mode part `||d^j((1-psi) w_hat)|| + ||d^j(psi g e^{lambda_minus t})||`
/// against `nu^{-2-j} e^{-nu t/8}` times the `C^j` data norm; `fitted` is
/// the exponential rate in `t`.
pub fn high_mode_bound_check(nu: f64, j: usize, data: &InitialData, t_grid: &[f64], kmax: f64) -> Result<BoundReport> {
    let spec = CutoffSpec::new(nu);
    let nodes = offset_grid(nu, kmax, 8000);
    let dnorm = data_c_norm(data, j, kmax);
    let mut norms = vec![];
    let mut constants = vec![];
    for &t in t_grid {
        let high = |k: f64| -> Result<Jet> {
            let m = ModeJets::new(k, t, nu, data, j)?;
            let one_minus = (-cutoff_jet(&spec, k, j)).add_const(C64::new(1.0, 0.0));
            Ok(&one_minus * &m.w_hat())
        };
        let minus = |k: f64| -> Result<Jet> {
            if !spec.contains(k) {
                return Ok(Jet::constant(ZERO, j));
            }
            let m = ModeJets::new(k, t, nu, data, j)?;
            Ok(&cutoff_jet(&spec, k, j) * &m.w_minus)
        };
        let h = l2_of_derivative(&nodes, high, j)? + l2_of_derivative(&nodes, minus, j)?;
        norms.push(h);
        let shape = nu.powf(-2.0 - j as f64) * (-nu * t / 8.0).exp() * dnorm;
        constants.push(if shape > 0.0 { h / shape } else { 0.0 });
    }
    let fitted = log_slope(t_grid, &norms, false)?;
    Ok(BoundReport { nu, j, times: t_grid.to_vec(), stabilized: stabilized(&constants), norms, constants, fitted, predicted: -nu / 8.0 })
}

/// Slope of `log y` against `log t` (or `t`); `None` when the series
/// vanishes or is too short.
fn log_slope(t: &[f64], y: &[f64], log_t: bool) -> Result<Option<f64>> {
    if y.len() < 3 || y.iter().any(|&v| !(v > 0.0)) {
        return Ok(None);
    }
    let x: Vec<f64> = t.iter().map(|&s| if log_t { s.ln() } else { s }).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    Ok(Some(linear_fit(&x, &ly)?.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_grid_avoids_double_points() {
        let g = offset_grid(0.5, 0.5, 4);
        assert!(g.iter().all(|k| (k.abs() - 0.25).abs() > 0.01));
        assert!((g.iter().sum::<f64>()).abs() < 1e-14);
    }

    #[test]
    fn lemma_formula_matches_quadrature() {
        for c in lemma_check(0.5, &[0, 1, 2], &[1.0, 20.0, 300.0]).unwrap() {
            assert!(c.rel_error < 1e-10, "{c:?}");
        }
    }

    #[test]
    fn zero_data_has_zero_residual() {
        let r = residual_bound_check(0.5, 4, 0, &InitialData::zero(), &[20.0, 40.0, 80.0]).unwrap();
        assert!(r.norms.iter().all(|&x| x == 0.0));
        assert!(r.fitted.is_none() && r.stabilized);
    }
}
