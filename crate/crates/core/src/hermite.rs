//! Eigenfunctions `phi_k` of `L_T = nu_T d^2 + (1/2) d(xi .)` and the adjoint
//! eigenfunctions `H_k`, with the biorthogonal projection onto their span.
//!
//! With `y = xi / sqrt(nu_T)` both families reduce to the polynomials
//! `q_k(y) = e^{y^2/4} d_y^k e^{-y^2/4}`:
//!
//! ```text
//! phi_k(xi) = phi_0(xi) nu_T^{-k/2} q_k(y)
//! H_k(xi)   = 2^k nu_T^{k/2} / k! * q_k(y)
//! ```

use std::f64::consts::PI;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::factorial;
use crate::norms::weighted_norm_with_tail;
use crate::params::enhanced_diffusivity;
use crate::quadrature::{Grid, WeightedFunction};

/// Coefficients (ascending powers of `y`) of `q_0..=q_n`, from
/// `q_{k+1} = q_k' - (y/2) q_k`.
pub fn q_polynomials(n: usize) -> Vec<Vec<BigRational>> {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let mut out = vec![vec![BigRational::from_integer(BigInt::from(1))]];
    for k in 0..n {
        let q = &out[k];
        let mut next = vec![BigRational::zero(); q.len() + 1];
        for (p, c) in q.iter().enumerate() {
            if p > 0 {
                next[p - 1] += c * BigRational::from_integer(BigInt::from(p));
            }
            next[p + 1] -= c * &half;
        }
        out.push(next);
    }
    out
}

#[derive(Debug, Clone)]
pub struct HermiteBasis {
    pub nu_t: f64,
    pub n: usize,
    exact: Vec<Vec<BigRational>>,
    q: Vec<Vec<f64>>,
    /// `2^k nu_T^{k/2} / k!`
    h_scale: Vec<f64>,
}

impl HermiteBasis {
    pub fn new(nu_t: f64, n: usize) -> Self {
        let exact = q_polynomials(n);
        for (k, q) in exact.iter().enumerate() {
            // Leading coefficient (-1/2)^k; its nonvanishing makes the H_k a
            // basis of polynomials of degree <= k.
            assert!(!q[k].is_zero());
        }
        let q = exact
            .iter()
            .map(|p| p.iter().map(|c| c.to_f64().unwrap()).collect())
            .collect();
        let h_scale = (0..=n)
            .map(|k| 2f64.powi(k as i32) * nu_t.powf(k as f64 / 2.0) / factorial(k))
            .collect();
        HermiteBasis { nu_t, n, exact, q, h_scale }
    }

    pub fn for_nu(nu: f64, n: usize) -> Self {
        Self::new(enhanced_diffusivity(nu), n)
    }

    pub fn exact_polynomial(&self, k: usize) -> Result<&[BigRational]> {
        self.check(k)?;
        Ok(&self.exact[k])
    }

    fn check(&self, k: usize) -> Result<()> {
        if k > self.n {
            return Err(Error::IndexOutOfRange { index: k, max: self.n });
        }
        Ok(())
    }

    fn q_eval(&self, k: usize, y: f64) -> f64 {
        self.q[k].iter().rev().fold(0.0, |acc, c| acc * y + c)
    }

    pub fn phi0(&self, xi: f64) -> f64 {
        (-xi * xi / (4.0 * self.nu_t)).exp() / (4.0 * PI * self.nu_t).sqrt()
    }

    pub fn phi(&self, k: usize, xi: f64) -> Result<f64> {
        self.check(k)?;
        let y = xi / self.nu_t.sqrt();
        Ok(self.phi0(xi) * self.nu_t.powf(-(k as f64) / 2.0) * self.q_eval(k, y))
    }

    pub fn hermite_poly(&self, k: usize, xi: f64) -> Result<f64> {
        self.check(k)?;
        let y = xi / self.nu_t.sqrt();
        Ok(self.h_scale[k] * self.q_eval(k, y))
    }

    /// `int xi^l phi_r d xi`.
    pub fn moment(&self, l: usize, r: usize) -> f64 {
        if r > l || (l - r) % 2 == 1 {
            return 0.0;
        }
        let n = (l - r) / 2;
        let mut falling = 1.0;
        for q in 0..r {
            falling *= (l - q) as f64;
        }
        let mut dfact = 1.0;
        let mut i = 2 * n as i64 - 1;
        while i > 1 {
            dfact *= i as f64;
            i -= 2;
        }
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        sign * falling * (2.0 * self.nu_t).powi(n as i32) * dfact
    }

    /// Monomial coefficients of `H_k` in `xi` (lowest degree first).
    pub fn xi_coefficients(&self, k: usize) -> Result<Vec<f64>> {
        self.check(k)?;
        let s = self.nu_t.sqrt();
        Ok(self.q[k].iter().enumerate().map(|(p, c)| self.h_scale[k] * c / s.powi(p as i32)).collect())
    }

    /// `alpha_k = <H_k, f>` from the moments `int xi^p f`, `p <= N`.
    pub fn project_moments(&self, moments: &[f64]) -> Result<Vec<f64>> {
        let n = moments.len().checked_sub(1).ok_or_else(|| Error::InvalidParameter("no moments".into()))?;
        (0..=n)
            .map(|k| Ok(self.xi_coefficients(k)?.iter().zip(moments).map(|(h, mu)| h * mu).sum()))
            .collect()
    }

    /// Gauss-Legendre grid whose window is sized from `nu_T` and the weight.
    pub fn grid(&self, m: u32, tol: f64) -> Result<Grid> {
        Grid::for_weight(m, self.nu_t, tol, 16)
    }

    pub fn sample_phi(&self, k: usize, grid: &Arc<Grid>, m: u32) -> Result<WeightedFunction> {
        self.check(k)?;
        Ok(WeightedFunction::from_fn(grid.clone(), m, |x| self.phi(k, x).unwrap()))
    }

    /// `sum_k c_k phi_{k + shift}` on `grid`.
    pub fn synthesize(&self, coeffs: &[f64], shift: usize, grid: &Arc<Grid>, m: u32) -> Result<WeightedFunction> {
        if !coeffs.is_empty() {
            self.check(coeffs.len() - 1 + shift)?;
        }
        Ok(WeightedFunction::from_fn(grid.clone(), m, |x| {
            coeffs.iter().enumerate().map(|(k, c)| c * self.phi(k + shift, x).unwrap()).sum()
        }))
    }
}

/// `alpha_k = <H_k, w>` for `k <= N`.
pub fn project(basis: &HermiteBasis, w: &WeightedFunction, n: usize, tol: f64) -> Result<Vec<f64>> {
    if (w.m as f64) <= n as f64 + 0.5 {
        return Err(Error::InvalidParameter(format!(
            "projection to N = {n} needs m > N + 1/2, got m = {}",
            w.m
        )));
    }
    basis.check(n)?;
    let (_, tail) = weighted_norm_with_tail(w, w.m);
    if tail > tol {
        return Err(Error::QuadratureTail { estimate: tail, tolerance: tol });
    }
    let g = &w.grid;
    Ok((0..=n)
        .map(|k| {
            g.nodes
                .iter()
                .zip(&w.values)
                .zip(&g.weights)
                .map(|((&x, f), wt)| wt * basis.hermite_poly(k, x).unwrap() * f)
                .sum()
        })
        .collect())
}

/// `u(xi) = int_{-inf}^{xi} v` for zero-mean `v`.
pub fn antiderivative(v: &WeightedFunction) -> Result<WeightedFunction> {
    let g = &v.grid;
    let norm = v.l2_norm();
    let mean = v.integral();
    if mean.abs() > 1e-10 * norm {
        return Err(Error::NonzeroMean { mean, norm });
    }
    let mut u = g.cumulative(&v.values);
    let total = *u.last().unwrap_or(&0.0);
    let (a, b) = (g.a, g.b);
    for (ui, &x) in u.iter_mut().zip(&g.nodes) {
        *ui -= total * (x - a) / (b - a);
    }
    WeightedFunction::new(g.clone(), u, v.m)
}

/// `diffusivity f'' + (1/2)(xi f)'`.
pub fn apply_operator(diffusivity: f64, f: &WeightedFunction) -> WeightedFunction {
    let (d1, d2) = f.grid.derivatives(&f.values);
    let values = f
        .grid
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| diffusivity * d2[i] + 0.5 * f.values[i] + 0.5 * x * d1[i])
        .collect();
    WeightedFunction { grid: f.grid.clone(), values, m: f.m }
}

/// `L_T f` with `nu_T = nu + 1/nu`.
pub fn apply_lt(nu_t: f64, f: &WeightedFunction) -> WeightedFunction {
    apply_operator(nu_t, f)
}

/// `L f` with the bare diffusivity `nu`.
pub fn apply_l(nu: f64, f: &WeightedFunction) -> WeightedFunction {
    apply_operator(nu, f)
}

/// Hermite coefficients of `w` and of `u = d_xi^{-1} v` at scaling time `tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoeffs {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub tau: f64,
}

impl SpectralCoeffs {
    pub fn zeros(n: usize, tau: f64) -> Self {
        SpectralCoeffs { alpha: vec![0.0; n + 1], beta: vec![0.0; n + 1], tau }
    }

    pub fn n(&self) -> usize {
        self.alpha.len() - 1
    }

    /// `P_N w = sum alpha_k phi_k`.
    pub fn w_projection(&self, basis: &HermiteBasis, grid: &Arc<Grid>, m: u32) -> Result<WeightedFunction> {
        basis.synthesize(&self.alpha, 0, grid, m)
    }

    /// `P_N v = d_xi sum beta_k phi_k = sum beta_k phi_{k+1}`.
    pub fn v_projection(&self, basis: &HermiteBasis, grid: &Arc<Grid>, m: u32) -> Result<WeightedFunction> {
        basis.synthesize(&self.beta, 1, grid, m)
    }
}

impl SpectralCoeffs {
    /// Coefficients from moments of `w` and `v` (each of length `N + 2` at
    /// least for `v`); `int xi^p u = -int xi^{p+1} v / (p + 1)`.
    pub fn from_moments(basis: &HermiteBasis, w_moments: &[f64], v_moments: &[f64], tau: f64) -> Result<Self> {
        let n = w_moments.len() - 1;
        if v_moments.len() < n + 2 {
            return Err(Error::InvalidParameter(format!("need {} v moments, got {}", n + 2, v_moments.len())));
        }
        let u: Vec<f64> = (0..=n).map(|p| -v_moments[p + 1] / (p + 1) as f64).collect();
        Ok(SpectralCoeffs { alpha: basis.project_moments(w_moments)?, beta: basis.project_moments(&u)?, tau })
    }
}

pub fn project_pair(
    basis: &HermiteBasis,
    w: &WeightedFunction,
    v: &WeightedFunction,
    n: usize,
    tau: f64,
    tol: f64,
) -> Result<SpectralCoeffs> {
    let alpha = project(basis, w, n, tol)?;
    let u = antiderivative(v)?;
    let beta = project(basis, &u, n, tol)?;
    Ok(SpectralCoeffs { alpha, beta, tau })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(nu: f64, n: usize, m: u32) -> (HermiteBasis, Arc<Grid>) {
        let b = HermiteBasis::for_nu(nu, n);
        let g = Arc::new(b.grid(m, 1e-14).unwrap());
        (b, g)
    }

    #[test]
    fn pointwise_examples() {
        let b = HermiteBasis::for_nu(0.5, 4);
        for x in [-3.0, 0.0, 1.7] {
            assert_eq!(b.hermite_poly(0, x).unwrap(), 1.0);
        }
        assert!((b.phi(0, 0.0).unwrap() - 1.0 / (4.0 * PI * 2.5).sqrt()).abs() < 1e-16);
        assert!(matches!(b.phi(5, 0.0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn phi_are_derivatives_of_phi0() {
        let b = HermiteBasis::for_nu(0.5, 6);
        let h = 1e-3;
        for k in 1..=6 {
            for x in [-2.3, -0.4, 0.9, 3.1] {
                let fd = (b.phi(k - 1, x - 2.0 * h).unwrap() - 8.0 * b.phi(k - 1, x - h).unwrap()
                    + 8.0 * b.phi(k - 1, x + h).unwrap()
                    - b.phi(k - 1, x + 2.0 * h).unwrap())
                    / (12.0 * h);
                assert!((fd - b.phi(k, x).unwrap()).abs() < 1e-9, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn moment_projection_matches_quadrature() {
        let (b, g) = setup(0.5, 5, 7);
        let f = WeightedFunction::from_fn(g.clone(), 7, |x| (-(x - 0.3) * (x - 0.3) / 3.0).exp() * (1.0 + 0.2 * x));
        let quad = project(&b, &f, 5, 1e-12).unwrap();
        let mom: Vec<f64> = (0..=5).map(|l| f.moment(l)).collect();
        let via = b.project_moments(&mom).unwrap();
        for (a, c) in quad.iter().zip(&via) {
            assert!((a - c).abs() < 1e-10 * (1.0 + a.abs()), "{a} {c}");
        }
    }

    #[test]
    fn first_pair_is_dual() {
        let (b, g) = setup(0.5, 1, 4);
        let v = g.integrate_fn(|x| b.hermite_poly(1, x).unwrap() * b.phi(1, x).unwrap());
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_examples() {
        let (b, g) = setup(0.5, 4, 6);
        let phi0 = b.sample_phi(0, &g, 6).unwrap();
        let a = project(&b, &phi0, 4, 1e-12).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-12 && a[1..].iter().all(|c| c.abs() < 1e-12));
        let f = b.synthesize(&[1.0, 3.0], 0, &g, 6).unwrap();
        let a = project(&b, &f, 4, 1e-12).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-12 && (a[1] - 3.0).abs() < 1e-12);
        assert!(project(&b, &f, 6, 1e-12).is_err());
    }

    #[test]
    fn antiderivative_examples() {
        let (b, g) = setup(0.5, 2, 4);
        let u = antiderivative(&b.sample_phi(1, &g, 4).unwrap()).unwrap();
        for (x, val) in g.nodes.iter().zip(&u.values) {
            assert!((val - b.phi0(*x)).abs() < 1e-12);
        }
        let zero = WeightedFunction::from_fn(g.clone(), 4, |_| 0.0);
        assert!(antiderivative(&zero).unwrap().values.iter().all(|&v| v == 0.0));
        let v = WeightedFunction::from_fn(g.clone(), 4, |x| (1.0 - 2.0 * x * x) * (-x * x).exp());
        let u = antiderivative(&v).unwrap();
        for (x, val) in g.nodes.iter().zip(&u.values) {
            assert!((val - x * (-x * x).exp()).abs() < 1e-12);
        }
        let bad = b.sample_phi(0, &g, 4).unwrap();
        assert!(matches!(antiderivative(&bad), Err(Error::NonzeroMean { .. })));
    }

    #[test]
    fn eigenrelations() {
        let b = HermiteBasis::for_nu(0.5, 3);
        let g = Arc::new(Grid::uniform(-25.0, 25.0, 4001).unwrap());
        let f0 = b.sample_phi(0, &g, 4).unwrap();
        let r = apply_lt(b.nu_t, &f0);
        assert!(r.values.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-6);
        let f2 = b.sample_phi(2, &g, 4).unwrap();
        let r = apply_lt(b.nu_t, &f2);
        for (a, e) in r.values.iter().zip(&f2.values) {
            assert!((a + e).abs() < 1e-6);
        }
        let f1 = b.sample_phi(1, &g, 4).unwrap();
        let r = apply_lt(b.nu_t, &f1);
        let pairing = g.integrate_fn_values(&r.values, |x, v| b.hermite_poly(1, x).unwrap() * v);
        assert!((pairing + 0.5).abs() < 1e-6);
    }
}
