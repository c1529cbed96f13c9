use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::HermiteBasis;
use crate::initial_data::{binom, InitialData};
use crate::jet::{factorial, Jet};
use crate::params::enhanced_diffusivity;
use crate::propagator::{lambda_remainder_jet, split_coefficient_jets};
use crate::quadrature::{fornberg_weights, stencil_size, WeightedFunction};

use super::modes::{vbar, wbar, ModeJets};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Taylor data of `wbar(., t)` and `vbar(., t)` at `k = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowModeExpansion {
    pub t: f64,
    pub nu: f64,
    /// `d_k^j wbar(0, t)`, `j = 0..=N`
    pub w: Vec<C64>,
    pub v: Vec<C64>,
}

impl LowModeExpansion {
    pub fn n(&self) -> usize {
        self.w.len() - 1
    }

    /// `wbar_low^N(k) = sum_j d^j wbar(0) k^j / j!`.
    pub fn eval_w(&self, k: f64) -> C64 {
        eval_taylor(&self.w, k)
    }

    pub fn eval_v(&self, k: f64) -> C64 {
        eval_taylor(&self.v, k)
    }

    pub fn w_jet(&self, k0: f64, order: usize) -> Jet {
        taylor_jet(&self.w, k0, order)
    }

    pub fn v_jet(&self, k0: f64, order: usize) -> Jet {
        taylor_jet(&self.v, k0, order)
    }
}

fn eval_taylor(d: &[C64], k: f64) -> C64 {
    d.iter().enumerate().rev().fold(ZERO, |acc, (j, c)| acc * k + c / factorial(j))
}

fn taylor_jet(d: &[C64], k0: f64, order: usize) -> Jet {
    let coeffs: Vec<C64> = d.iter().enumerate().map(|(j, c)| c / factorial(j)).collect();
    Jet::polynomial(&Jet::variable(k0, order), &coeffs)
}

/// Jets at zero of `wbar` and `vbar`, built from the series of `Lambda`
/// and the expansions of `f1..f4`.
pub fn wbar_jets_at_zero(nu: f64, data: &InitialData, t: f64, order: usize) -> (Jet, Jet) {
    let [f1, f2, f3, f4] = split_coefficient_jets(nu, order);
    let el = lambda_remainder_jet(nu, order).scale(C64::new(t, 0.0)).exp();
    let w0 = data.w_hat_jet(0.0, order);
    let v0 = data.v_hat_jet(0.0, order);
    let p = &(&f1 * &w0) + &(&f2 * &v0);
    let q = &(&f3 * &w0) + &(&f4 * &v0);
    (&el * &p, &el * &q)
}

/// Derivatives of `wbar`, `vbar` at zero up to order `n`, checked for
/// `j <= 4` against fourth-order central differences with `h = nu/100`.
pub fn taylor_at_zero(nu: f64, data: &InitialData, n: usize, t: f64) -> Result<LowModeExpansion> {
    // Six extra orders feed the truncation estimate of the difference check.
    let (wj, vj) = wbar_jets_at_zero(nu, data, t, n + 6);
    let h = nu / 100.0;
    for j in 0..=n.min(4) {
        check_derivative(&wj, j, h, |k| wbar(k, t, nu, data))?;
        check_derivative(&vj, j, h, |k| vbar(k, t, nu, data))?;
    }
    Ok(LowModeExpansion {
        t,
        nu,
        w: (0..=n).map(|j| wj.derivative(j)).collect(),
        v: (0..=n).map(|j| vj.derivative(j)).collect(),
    })
}

fn check_derivative(jet: &Jet, j: usize, h: f64, f: impl Fn(f64) -> Result<C64>) -> Result<()> {
    let analytic = jet.derivative(j);
    if j == 0 {
        let v = f(0.0)?;
        if (v - analytic).norm() > 1e-12 * (1.0 + v.norm()) {
            return Err(Error::DerivativeMismatch { order: 0, analytic: analytic.norm(), finite: v.norm() });
        }
        return Ok(());
    }
    let half = (stencil_size(j, 4) / 2) as i64;
    let nodes: Vec<f64> = (-half..=half).map(|i| i as f64 * h).collect();
    let weights = fornberg_weights(0.0, &nodes, j);
    let values = nodes.iter().map(|&k| f(k)).collect::<Result<Vec<_>>>()?;
    let fd: C64 = weights.iter().zip(&values).map(|(w, v)| v * *w).sum();
    let fmax = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let wsum: f64 = weights.iter().map(|w| w.abs()).sum();
    let truncation = 10.0 * (jet.derivative(j + 4).norm() * h.powi(4) + jet.derivative(j + 6).norm() * h.powi(6));
    let rounding = 100.0 * f64::EPSILON * wsum * fmax;
    let tol = truncation + rounding + 1e-12 * analytic.norm();
    if (fd - analytic).norm() > tol {
        return Err(Error::DerivativeMismatch { order: j, analytic: analytic.norm(), finite: fd.norm() });
    }
    Ok(())
}

/// `C_{j,l} = binom(j,l) nu_T^{(j-l)/2} (j-l)!/((j-l)/2)!` for even `j - l`, else 0.
pub fn c_coeff(j: usize, l: usize, nu: f64) -> f64 {
    if l > j || (j - l) % 2 == 1 {
        return 0.0;
    }
    let d = j - l;
    binom(j as u32, l as u32) * enhanced_diffusivity(nu).powi((d / 2) as i32) * factorial(d) / factorial(d / 2)
}

/// Weights for `v_app`: `D_{j,l} = -(l+1) C_{j,l+1}`. They pair with
/// `int xi^l phi_r`, i.e. with the moments of `u`, because
/// `int xi^{l+1} v = -(l+1) int xi^l u`.
pub fn d_coeff(j: usize, l: usize, nu: f64) -> f64 {
    -((l + 1) as f64) * c_coeff(j, l + 1, nu)
}

/// `d_k^l w_hat(0, t) = (-i sqrt(1+t))^l int xi^l w(xi, tau) d xi`, for `w`
/// in scaling variables at `tau = log(1+t)`.
pub fn moment_identity(l: u32, w: &WeightedFunction, t: f64) -> C64 {
    C64::new(0.0, -(1.0 + t).sqrt()).powu(l) * w.moment(l)
}

/// Moments `int xi^l w(xi, tau)`, `int xi^l v(xi, tau)` for `l <= order` of
/// the exact solution at time `t`, from the jets of its transform at zero.
pub fn solution_moments(nu: f64, data: &InitialData, t: f64, order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let j = ModeJets::new(0.0, t, nu, data, order)?;
    let (w, v) = (j.w_hat(), j.v_hat());
    let s = (1.0 + t).sqrt();
    let i = C64::new(0.0, 1.0);
    let wm = (0..=order).map(|l| (i.powu(l as u32) * w.derivative(l)).re / s.powi(l as i32)).collect();
    let vm = (0..=order).map(|l| (i.powu(l as u32) * v.derivative(l)).re * s.powi(1 - l as i32)).collect();
    Ok((wm, vm))
}

/// Hermite-coefficient form of `w_app` and `v_app`.
#[derive(Debug, Clone)]
pub struct ApproxSolution {
    pub nu: f64,
    pub n: usize,
    pub basis: HermiteBasis,
    pub c: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
}

/// Coefficients of `phi_j(xi~)` in `w_app` and `v_app` at `tau~`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppSample {
    pub tau_tilde: f64,
    pub w: Vec<f64>,
    pub v: Vec<f64>,
}

impl ApproxSolution {
    pub fn new(nu: f64, n: usize) -> Self {
        let c = (0..=n).map(|j| (0..=n).map(|l| c_coeff(j, l, nu)).collect()).collect();
        let d = (0..=n).map(|j| (0..=n).map(|l| d_coeff(j, l, nu)).collect()).collect();
        ApproxSolution { nu, n, basis: HermiteBasis::for_nu(nu, n), c, d }
    }

    fn moments(&self, coeffs: &[f64]) -> Vec<f64> {
        (0..=self.n)
            .map(|l| coeffs.iter().enumerate().map(|(r, a)| a * self.basis.moment(l, r)).sum())
            .collect()
    }

    /// `(1/(j! i^j)) sum_l (1 + e^{-tau~})^{l/2} weight[j][l] (-i)^{l + shift} mu_l`.
    fn assemble(&self, weights: &[Vec<f64>], mu: &[f64], shift: u32, tau_tilde: f64) -> Result<Vec<f64>> {
        let grow = 1.0 + (-tau_tilde).exp();
        let mi = C64::new(0.0, -1.0);
        (0..=self.n)
            .map(|j| {
                let mut sum = ZERO;
                let mut scale = 0.0;
                for (l, m) in mu.iter().enumerate().take(j + 1) {
                    let term = mi.powu(l as u32 + shift) * (weights[j][l] * grow.powf(l as f64 / 2.0) * m);
                    scale += term.norm();
                    sum += term;
                }
                let c = sum / (C64::new(0.0, 1.0).powu(j as u32) * factorial(j));
                if c.im.abs() > 1e-9 * (scale / factorial(j)).max(f64::MIN_POSITIVE) {
                    return Err(Error::ImaginaryResidue(c.im));
                }
                Ok(c.re)
            })
            .collect()
    }

    pub fn w_coefficients(&self, alpha: &[f64], tau_tilde: f64) -> Result<Vec<f64>> {
        self.check(alpha)?;
        self.assemble(&self.c, &self.moments(alpha), 0, tau_tilde)
    }

    pub fn v_coefficients(&self, beta: &[f64], tau_tilde: f64) -> Result<Vec<f64>> {
        self.check(beta)?;
        self.assemble(&self.d, &self.moments(beta), 1, tau_tilde)
    }

    fn check(&self, a: &[f64]) -> Result<()> {
        if a.len() != self.n + 1 {
            return Err(Error::InvalidParameter(format!("expected {} coefficients, got {}", self.n + 1, a.len())));
        }
        Ok(())
    }

    /// `sum_j c_j phi_j(xi~)`.
    pub fn eval(&self, coeffs: &[f64], xi_tilde: f64) -> f64 {
        coeffs.iter().enumerate().map(|(j, c)| c * self.basis.phi(j, xi_tilde).unwrap()).sum()
    }

    /// The approximations at physical time `t = e^{tau~}`, re-expressed on
    /// the scaling variable `xi = x/sqrt(1+t)` of the true solution.
    pub fn in_scaling_frame(&self, sample: &AppSample, xi: f64) -> (f64, f64) {
        let t = sample.tau_tilde.exp();
        let ratio = (1.0 + t) / t;
        let y = xi * ratio.sqrt();
        (ratio.sqrt() * self.eval(&sample.w, y), ratio * self.eval(&sample.v, y))
    }
}

/// `w_app` coefficients; `alpha` must be the projection at
/// `tau = log(1 + e^{tau~})`.
pub fn assemble_w_app(approx: &ApproxSolution, alpha: &[f64], tau_tilde: f64) -> Result<Vec<f64>> {
    approx.w_coefficients(alpha, tau_tilde)
}

pub fn assemble_v_app(approx: &ApproxSolution, beta: &[f64], tau_tilde: f64) -> Result<Vec<f64>> {
    approx.v_coefficients(beta, tau_tilde)
}

pub fn assemble_app(approx: &ApproxSolution, alpha: &[f64], beta: &[f64], tau_tilde: f64) -> Result<AppSample> {
    Ok(AppSample {
        tau_tilde,
        w: assemble_w_app(approx, alpha, tau_tilde)?,
        v: assemble_v_app(approx, beta, tau_tilde)?,
    })
}

/// The same coefficients read directly off the Taylor data of `wbar`,
/// `vbar`: `d^j wbar(0, t) t^{-j/2} / (j! i^j)` (and `t^{(1-j)/2}` for `v`).
pub fn app_from_taylor(exp: &LowModeExpansion) -> Result<AppSample> {
    let t = exp.t;
    let conv = |d: &[C64], extra: f64| -> Result<Vec<f64>> {
        d.iter()
            .enumerate()
            .map(|(j, x)| {
                let c = x * t.powf(extra - j as f64 / 2.0) / (C64::new(0.0, 1.0).powu(j as u32) * factorial(j));
                if c.im.abs() > 1e-9 * c.norm().max(f64::MIN_POSITIVE) {
                    return Err(Error::ImaginaryResidue(c.im));
                }
                Ok(c.re)
            })
            .collect()
    };
    Ok(AppSample { tau_tilde: t.ln(), w: conv(&exp.w, 0.0)?, v: conv(&exp.v, 0.5)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_coefficient_examples() {
        for j in 0..6 {
            assert_eq!(c_coeff(j, j, 0.5), 1.0);
        }
        assert_eq!(c_coeff(3, 0, 0.5), 0.0);
        assert!((c_coeff(2, 0, 0.5) - 5.0).abs() < 1e-14);
        assert!((c_coeff(4, 0, 0.5) - 12.0 * 6.25).abs() < 1e-12);
    }

    #[test]
    fn expansion_reproduces_value_at_zero() {
        let data = InitialData::gaussian(1.0, 1.0);
        let e = taylor_at_zero(0.5, &data, 4, 5.0).unwrap();
        assert_eq!(e.eval_w(0.0), e.w[0]);
        assert!((e.w[0] - wbar(0.0, 5.0, 0.5, &data).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn zero_coefficients_give_zero_app() {
        let a = ApproxSolution::new(0.5, 4);
        let s = assemble_app(&a, &[0.0; 5], &[0.0; 5], 3.0).unwrap();
        assert!(s.w.iter().chain(&s.v).all(|&c| c == 0.0));
    }
}
