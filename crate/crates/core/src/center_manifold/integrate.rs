use serde::{Deserialize, Serialize};

use super::system::{ab_rhs, off_manifold_rhs, OffManifoldState, ReducedState};
use super::table::CMTables;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    /// Steps below `h_min * max(1, |t|)` abort the integration.
    pub h_min: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions { rtol: 1e-10, atol: 1e-300, h0: 1e-3, h_min: 1e-13 }
    }
}

/// `(phi_1, phi_2, phi_3)(z)` with `phi_k(z) = sum_n z^n/(n+k)!`.
pub fn phi_functions(z: f64) -> (f64, f64, f64) {
    if z.abs() < 0.5 {
        let (mut p1, mut p2, mut p3) = (0.0, 0.0, 0.0);
        let mut zn = 1.0;
        let mut fact = 1.0; // n!
        for n in 0..30 {
            p1 += zn / (fact * (n + 1) as f64);
            p2 += zn / (fact * ((n + 1) * (n + 2)) as f64);
            p3 += zn / (fact * ((n + 1) * (n + 2) * (n + 3)) as f64);
            zn *= z;
            fact *= (n + 1) as f64;
        }
        (p1, p2, p3)
    } else {
        let e = z.exp();
        let p1 = (e - 1.0) / z;
        let p2 = (e - 1.0 - z) / (z * z);
        let p3 = (e - 1.0 - z - 0.5 * z * z) / (z * z * z);
        (p1, p2, p3)
    }
}

struct EtdCoeffs {
    e: Vec<f64>,
    e2: Vec<f64>,
    half: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    f3: Vec<f64>,
}

impl EtdCoeffs {
    fn new(lin: &[f64], h: f64) -> Self {
        let n = lin.len();
        let mut c = EtdCoeffs {
            e: vec![0.0; n],
            e2: vec![0.0; n],
            half: vec![0.0; n],
            f1: vec![0.0; n],
            f2: vec![0.0; n],
            f3: vec![0.0; n],
        };
        for (i, &l) in lin.iter().enumerate() {
            let z = h * l;
            let (q1, _, _) = phi_functions(0.5 * z);
            let (p1, p2, p3) = phi_functions(z);
            c.e[i] = z.exp();
            c.e2[i] = (0.5 * z).exp();
            c.half[i] = 0.5 * h * q1;
            c.f1[i] = h * (p1 - 3.0 * p2 + 4.0 * p3);
            c.f2[i] = h * (p2 - 2.0 * p3);
            c.f3[i] = h * (-p2 + 4.0 * p3);
        }
        c
    }
}

/// One Cox-Matthews ETDRK4 step for `u' = L u + N(t, u)` with diagonal `L`.
fn etd_step<F>(u: &[f64], t: f64, h: f64, c: &EtdCoeffs, rhs: &F) -> Vec<f64>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let n = u.len();
    let nu_ = rhs(t, u);
    let a: Vec<f64> = (0..n).map(|i| c.e2[i] * u[i] + c.half[i] * nu_[i]).collect();
    let na = rhs(t + 0.5 * h, &a);
    let b: Vec<f64> = (0..n).map(|i| c.e2[i] * u[i] + c.half[i] * na[i]).collect();
    let nb = rhs(t + 0.5 * h, &b);
    let cc: Vec<f64> = (0..n).map(|i| c.e2[i] * a[i] + c.half[i] * (2.0 * nb[i] - nu_[i])).collect();
    let nc = rhs(t + h, &cc);
    (0..n)
        .map(|i| c.e[i] * u[i] + c.f1[i] * nu_[i] + 2.0 * c.f2[i] * (na[i] + nb[i]) + c.f3[i] * nc[i])
        .collect()
}

/// Adaptive ETDRK4 (step doubling) returning the state at every requested
/// output time, each hit exactly. `outputs` must be nondecreasing and `>= t0`.
pub fn etdrk4_integrate<F>(
    u0: &[f64],
    lin: &[f64],
    rhs: F,
    t0: f64,
    outputs: &[f64],
    opts: &IntegratorOptions,
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let mut out = Vec::with_capacity(outputs.len());
    let mut u = u0.to_vec();
    let mut t = t0;
    let mut h = opts.h0;
    let mut cache: Option<(f64, EtdCoeffs, EtdCoeffs)> = None;
    for &target in outputs {
        if target < t - 1e-12 * t.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!("output time {target} precedes t = {t}")));
        }
        while t < target {
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            let coeffs_ok = matches!(&cache, Some((hc, _, _)) if *hc == step);
            if !coeffs_ok {
                cache = Some((step, EtdCoeffs::new(lin, step), EtdCoeffs::new(lin, 0.5 * step)));
            }
            let (_, full, halfc) = cache.as_ref().unwrap();
            let one = etd_step(&u, t, step, full, &rhs);
            let mid = etd_step(&u, t, 0.5 * step, halfc, &rhs);
            let two = etd_step(&mid, t + 0.5 * step, 0.5 * step, halfc, &rhs);
            let mut err: f64 = 0.0;
            for i in 0..u.len() {
                let scale = opts.atol + opts.rtol * two[i].abs().max(u[i].abs());
                err = err.max((two[i] - one[i]).abs() / 15.0 / scale);
            }
            if !err.is_finite() {
                err = 1e10;
            }
            if err <= 1.0 {
                u = two;
                t = if last { target } else { t + step };
                let grow = if err == 0.0 { 2.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 2.0) };
                // Keep the proposed step when it was only clipped by an output time.
                if !last || step >= h {
                    h = step * grow;
                }
            } else {
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 0.5);
                if h < opts.h_min * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow { t, h });
                }
            }
        }
        out.push(u.clone());
    }
    Ok(out)
}

/// Sampled trajectory of the diagonalised system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<ReducedState>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    /// `(tau, a_k)` pairs.
    pub fn a_series(&self, k: usize) -> Vec<(f64, f64)> {
        self.states.iter().map(|s| (s.tau(), s.a[k])).collect()
    }

    pub fn b_series(&self, k: usize) -> Vec<(f64, f64)> {
        self.states.iter().map(|s| (s.tau(), s.b[k])).collect()
    }
}

fn pack(s: &ReducedState) -> Vec<f64> {
    let mut u = s.a.clone();
    u.extend_from_slice(&s.b);
    u.push(s.eta);
    u
}

fn unpack(u: &[f64], n: usize, t: f64) -> ReducedState {
    ReducedState { a: u[..n].to_vec(), b: u[n..2 * n].to_vec(), eta: u[2 * n], t }
}

/// Full `(a, b, eta)` system; the `-nu b` decay is integrated exactly.
pub fn integrate_full(
    state0: &ReducedState,
    nu: f64,
    outputs: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    let n = state0.a.len();
    let mut lin = vec![0.0; 2 * n + 1];
    for l in lin[n..2 * n].iter_mut() {
        *l = -nu;
    }
    let rhs = |t: f64, u: &[f64]| -> Vec<f64> {
        let s = unpack(u, n, t);
        let d = ab_rhs(&s, nu);
        let mut out = d.da;
        // Remove the part already carried by the linear operator.
        out.extend(d.db.iter().zip(&s.b).map(|(db, b)| db + nu * b));
        out.push(d.deta);
        out
    };
    let raw = etdrk4_integrate(&pack(state0), &lin, rhs, state0.t, outputs, opts)?;
    Ok(Trajectory { states: raw.iter().zip(outputs).map(|(u, &t)| unpack(u, n, t)).collect() })
}

/// Integrates from `state0` to each output time. With `on_manifold` set,
/// `b` is slaved to `h(a, eta)` throughout (the initial `b` is ignored) and
/// only the non-stiff `(a, eta)` system is stepped.
pub fn integrate_reduced(
    state0: &ReducedState,
    outputs: &[f64],
    on_manifold: bool,
    nu: f64,
    tables: &CMTables,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    if let Some(&last) = outputs.last() {
        if last <= state0.t {
            return Err(Error::InvalidParameter(format!("t_end = {last} must exceed t0 = {}", state0.t)));
        }
    }
    if !on_manifold {
        return integrate_full(state0, nu, outputs, opts);
    }
    let n = state0.a.len();
    if tables.n() + 1 < n {
        return Err(Error::IndexOutOfRange { index: n - 1, max: tables.n() });
    }
    let rhs = |_t: f64, u: &[f64]| -> Vec<f64> {
        let (a, eta) = (&u[..n], u[n]);
        let b = tables.h_all(a, eta, nu);
        let s = ReducedState { a: a.to_vec(), b, eta, t: 0.0 };
        let mut d = ab_rhs(&s, nu).da;
        d.push(-eta * eta);
        d
    };
    let mut u0 = state0.a.clone();
    u0.push(state0.eta);
    let lin = vec![0.0; n + 1];
    let raw = etdrk4_integrate(&u0, &lin, rhs, state0.t, outputs, opts)?;
    Ok(Trajectory {
        states: raw
            .iter()
            .zip(outputs)
            .map(|(u, &t)| {
                let a = u[..n].to_vec();
                let b = tables.h_all(&a, u[n], nu);
                ReducedState { a, b, eta: u[n], t }
            })
            .collect(),
    })
}

/// Integrates the linear off-manifold dynamics of `B`.
pub fn integrate_off_manifold(
    state0: &OffManifoldState,
    outputs: &[f64],
    nu: f64,
    tables: &CMTables,
    opts: &IntegratorOptions,
) -> Result<Vec<OffManifoldState>> {
    let n = state0.b.len();
    let mut lin = vec![-nu; n + 1];
    lin[n] = 0.0;
    let rhs = |t: f64, u: &[f64]| -> Vec<f64> {
        let s = OffManifoldState { b: u[..n].to_vec(), eta: u[n], t };
        let mut d: Vec<f64> = off_manifold_rhs(&s, nu, tables).iter().zip(&s.b).map(|(d, b)| d + nu * b).collect();
        d.push(-u[n] * u[n]);
        d
    };
    let mut u0 = state0.b.clone();
    u0.push(state0.eta);
    let raw = etdrk4_integrate(&u0, &lin, rhs, state0.t, outputs, opts)?;
    Ok(raw
        .iter()
        .zip(outputs)
        .map(|(u, &t)| OffManifoldState { b: u[..n].to_vec(), eta: u[n], t })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_functions_are_continuous() {
        for z in [-0.5f64, 0.5] {
            let a = phi_functions(z * (1.0 - 1e-12));
            let b = phi_functions(z * (1.0 + 1e-12));
            assert!((a.0 - b.0).abs() < 1e-10 && (a.1 - b.1).abs() < 1e-10 && (a.2 - b.2).abs() < 1e-10);
        }
        assert_eq!(phi_functions(0.0), (1.0, 0.5, 1.0 / 6.0));
    }

    #[test]
    fn exact_on_linear_decay() {
        let out = etdrk4_integrate(
            &[1.0],
            &[-3.0],
            |_, _| vec![0.0],
            0.0,
            &[1.0, 5.0],
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert!((out[1][0] - (-15.0f64).exp()).abs() < 1e-12 * (-15.0f64).exp());
    }

    #[test]
    fn forced_stiff_scalar() {
        // u' = -50 u + cos t has u = (50 cos t + sin t)/2501 + C e^{-50 t}.
        let exact = |t: f64| (50.0 * t.cos() + t.sin()) / 2501.0 + (1.0 - 50.0 / 2501.0) * (-50.0 * t).exp();
        let out = etdrk4_integrate(&[1.0], &[-50.0], |t, _| vec![t.cos()], 0.0, &[0.1, 2.0], &IntegratorOptions::default())
            .unwrap();
        assert!((out[0][0] - exact(0.1)).abs() < 1e-9);
        assert!((out[1][0] - exact(2.0)).abs() < 1e-9);
    }
}
