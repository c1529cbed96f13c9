//! Classical RK4 on `U' = A(k) U`, used only to check the propagator.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::propagator::{eigenvalues, mat_vec, system_matrix, Mat2};

const MAX_HALVINGS: usize = 16;
const TOL: f64 = 1e-10;

fn rk4_fixed(a: &Mat2, u0: [C64; 2], t_end: f64, steps: usize) -> [C64; 2] {
    let h = t_end / steps as f64;
    let axpy = |u: [C64; 2], k: [C64; 2], s: f64| [u[0] + k[0] * s, u[1] + k[1] * s];
    let mut u = u0;
    for _ in 0..steps {
        let k1 = mat_vec(a, u);
        let k2 = mat_vec(a, axpy(u, k1, 0.5 * h));
        let k3 = mat_vec(a, axpy(u, k2, 0.5 * h));
        let k4 = mat_vec(a, axpy(u, k3, h));
        for i in 0..2 {
            u[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    u
}

fn norm(u: [C64; 2]) -> f64 {
    (u[0].norm_sqr() + u[1].norm_sqr()).sqrt()
}

/// Integrates to `t_end` starting from step `dt`, halving until two
/// successive answers agree to `1e-10` relative; returns the finer one.
pub fn rk4_oracle(k: f64, nu: f64, u0: [C64; 2], t_end: f64, dt: f64) -> Result<[C64; 2]> {
    if !(t_end >= 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("need t_end >= 0 and dt > 0, got {t_end}, {dt}")));
    }
    if t_end == 0.0 {
        return Ok(u0);
    }
    let a = system_matrix(k, nu);
    let mut steps = (t_end / dt).ceil().max(1.0) as usize;
    let mut coarse = rk4_fixed(&a, u0, t_end, steps);
    for _ in 0..MAX_HALVINGS {
        steps *= 2;
        let fine = rk4_fixed(&a, u0, t_end, steps);
        let diff = norm([fine[0] - coarse[0], fine[1] - coarse[1]]);
        if diff <= TOL * norm(fine) {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::StepConvergence(format!("k = {k}, nu = {nu}, t = {t_end}: no convergence after {MAX_HALVINGS} halvings")))
}

/// Starting step `0.05 / rho(A)`.
pub fn default_step(k: f64, nu: f64) -> f64 {
    let (lp, lm) = eigenvalues(k, nu);
    0.05 / lp.norm().max(lm.norm()).max(1e-3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let u = rk4_oracle(0.0, 0.5, [one, zero], 7.0, 0.1).unwrap();
        assert_eq!(u, [one, zero]);
        let u = rk4_oracle(0.0, 0.5, [zero, one], 2.0, 0.1).unwrap();
        assert!((u[1] - C64::new((-1.0f64).exp(), 0.0)).norm() < 1e-10);
    }

    #[test]
    fn matches_propagator() {
        let u0 = [C64::new(1.0, 0.0), C64::new(0.3, -0.2)];
        let u = rk4_oracle(0.3, 0.5, u0, 10.0, default_step(0.3, 0.5)).unwrap();
        let p = crate::propagator::propagator(0.3, 10.0, 0.5).apply(u0);
        assert!(norm([u[0] - p[0], u[1] - p[1]]) < 1e-8 * norm(p));
    }
}
