use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::initial_data::InitialData;
use crate::jet::Jet;
use crate::params::enhanced_diffusivity;
use crate::propagator::{is_degenerate, lambda_remainder, split_coefficients, sqrt_discriminant};

/// Jets in `k` about `k0` of every piece of the exact solution at time `t`.
///
/// With `r = sqrt(nu^2 - 4k^2)` and `s = r + nu` everything is written
/// without cancellation:
/// `lambda_plus = -nu k^2 - 2k^2/s`, `Lambda = -4k^4/(nu s^2)`,
/// `f1 = s/(2r)`, `f2 = f3 = -ik/r`, `f4 = 1 - f1 = -2k^2/(r s)`.
#[derive(Debug, Clone)]
pub struct ModeJets {
    pub k0: f64,
    pub t: f64,
    /// `e^{lambda_plus t}(f1 w0 + f2 v0)`
    pub w_plus: Jet,
    /// `g e^{lambda_minus t}`
    pub w_minus: Jet,
    pub v_plus: Jet,
    pub v_minus: Jet,
    /// `e^{Lambda t}(f1 w0 + f2 v0)`
    pub wbar: Jet,
    pub vbar: Jet,
    pub g: Jet,
    pub g_v: Jet,
    /// `e^{lambda_minus t}`
    pub minus_factor: Jet,
}

impl ModeJets {
    pub fn new(k0: f64, t: f64, nu: f64, data: &InitialData, order: usize) -> Result<Self> {
        if is_degenerate(k0, nu) {
            return Err(Error::Degenerate(k0));
        }
        let c = |x: f64| C64::new(x, 0.0);
        let k = Jet::variable(k0, order);
        let k2 = &k * &k;
        let d = k2.scale(c(-4.0)).add_const(c(nu * nu));
        let r = d.sqrt_with_root(sqrt_discriminant(k0, nu));
        let s = r.add_const(c(nu));
        let lp = (-k2.scale(c(2.0)).div(&s)) - k2.scale(c(nu));
        let lm = (-k2.scale(c(nu))).add_const(c(-0.5 * nu)) - r.scale(c(0.5));
        let big_lambda = (-(&k2 * &k2).scale(c(4.0 / nu))).div(&(&s * &s));
        let f1 = s.div(&r.scale(c(2.0)));
        let f2 = (-k.scale(C64::new(0.0, 1.0))).div(&r);
        let f4 = (-k2.scale(c(2.0))).div(&(&r * &s));
        let w0 = data.w_hat_jet(k0, order);
        let v0 = data.v_hat_jet(k0, order);
        let p = &(&f1 * &w0) + &(&f2 * &v0);
        let q = &(&f2 * &w0) + &(&f4 * &v0);
        let g = &(&f4 * &w0) - &(&f2 * &v0);
        let g_v = &(&f1 * &v0) - &(&f2 * &w0);
        let ep = lp.scale(c(t)).exp();
        let em = lm.scale(c(t)).exp();
        let el = big_lambda.scale(c(t)).exp();
        Ok(ModeJets {
            k0,
            t,
            w_plus: &ep * &p,
            w_minus: &g * &em,
            v_plus: &ep * &q,
            v_minus: &g_v * &em,
            wbar: &el * &p,
            vbar: &el * &q,
            g,
            g_v,
            minus_factor: em,
        })
    }

    pub fn w_hat(&self) -> Jet {
        &self.w_plus + &self.w_minus
    }

    pub fn v_hat(&self) -> Jet {
        &self.v_plus + &self.v_minus
    }
}

/// `4k^2/nu^2 < 15/16`, where the remainder series converges.
pub fn in_series_region(k: f64, nu: f64) -> bool {
    4.0 * k * k / (nu * nu) < 15.0 / 16.0
}

/// `e^{Lambda(k) t}(f1 w0 + f2 v0)` with `Lambda` from its series.
pub fn wbar(k: f64, t: f64, nu: f64, data: &InitialData) -> Result<C64> {
    let e = series_factor(k, t, nu)?;
    Ok(slow_amplitudes(k, nu, data)?.0 * e)
}

/// The `v` analogue, `e^{Lambda(k) t}(f3 w0 + f4 v0)`.
pub fn vbar(k: f64, t: f64, nu: f64, data: &InitialData) -> Result<C64> {
    let e = series_factor(k, t, nu)?;
    Ok(slow_amplitudes(k, nu, data)?.1 * e)
}

fn series_factor(k: f64, t: f64, nu: f64) -> Result<f64> {
    if !in_series_region(k, nu) {
        return Err(Error::OutsideRegion { k, detail: format!("4k^2/nu^2 >= 15/16 for nu = {nu}") });
    }
    Ok((lambda_remainder(k, nu, 1e-17)? * t).exp())
}

fn slow_amplitudes(k: f64, nu: f64, data: &InitialData) -> Result<(C64, C64)> {
    let f = split_coefficients(k, nu)?;
    let (w0, v0) = (data.w_hat(k), data.v_hat(k));
    Ok((f.f1 * w0 + f.f2 * v0, f.f3 * w0 + f.f4 * v0))
}

/// `wbar` anywhere off the double points, from the closed form.
pub fn wbar_any(k: f64, t: f64, nu: f64, data: &InitialData) -> Result<C64> {
    Ok(ModeJets::new(k, t, nu, data, 0)?.wbar.value())
}

/// `e^{-nu_T k^2 t}` as a jet about `k0`.
pub fn heat_jet(k0: f64, t: f64, nu: f64, order: usize) -> Jet {
    let k = Jet::variable(k0, order);
    (&k * &k).scale(C64::new(-enhanced_diffusivity(nu) * t, 0.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::{evolve, solution_split, ModeState};

    #[test]
    fn jets_agree_with_pointwise_split() {
        let data = InitialData::gaussian(1.0, 1.0);
        for (k, t, nu) in [(0.1, 5.0, 0.5), (0.4, 2.0, 0.5), (1.3, 0.7, 0.2), (0.0, 3.0, 1.0)] {
            let j = ModeJets::new(k, t, nu, &data, 0).unwrap();
            let s = solution_split(data.w_hat(k), data.v_hat(k), k, t, nu).unwrap();
            for (a, b) in [(j.w_plus.value(), s.w_plus), (j.w_minus.value(), s.w_minus), (j.v_plus.value(), s.v_plus)] {
                assert!((a - b).norm() < 1e-13 * (1.0 + b.norm()), "k={k}: {a} {b}");
            }
            let e = evolve(&ModeState::from_initial(&data, vec![k]), t, nu).unwrap();
            assert!((j.w_hat().value() - e.w[0]).norm() < 1e-12);
            assert!((j.v_hat().value() - e.v[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn series_and_closed_form_agree() {
        let data = InitialData::gaussian(0.8, 1.3);
        for k in [0.0, 0.02, 0.1, 0.2, -0.2] {
            let a = wbar(k, 5.0, 0.5, &data).unwrap();
            let b = wbar_any(k, 5.0, 0.5, &data).unwrap();
            assert!((a - b).norm() < 1e-13, "{k}");
        }
        assert!(matches!(wbar(0.245, 1.0, 0.5, &data), Err(Error::OutsideRegion { .. })));
    }

    #[test]
    fn double_point_is_rejected() {
        let data = InitialData::gaussian(1.0, 1.0);
        assert!(matches!(ModeJets::new(0.25, 1.0, 0.5, &data, 2), Err(Error::Degenerate(_))));
    }
}
