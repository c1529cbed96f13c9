//! Exact Fourier-space solution `U(k, t) = exp(A(k) t) U(k, 0)` with
//!
//! ```text
//! A(k) = [[-nu k^2,  -ik           ],
//!         [-ik,      -nu (k^2 + 1) ]]
//! ```

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initial_data::InitialData;
use crate::jet::Jet;
use crate::params::enhanced_diffusivity;

pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat_vec(a: &Mat2, u: [C64; 2]) -> [C64; 2] {
    [a[0][0] * u[0] + a[0][1] * u[1], a[1][0] * u[0] + a[1][1] * u[1]]
}

pub fn identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn system_matrix(k: f64, nu: f64) -> Mat2 {
    let ik = C64::new(0.0, -k);
    [[C64::new(-nu * k * k, 0.0), ik], [ik, C64::new(-nu * (k * k + 1.0), 0.0)]]
}

/// `nu^2 - 4k^2`.
pub fn discriminant(k: f64, nu: f64) -> f64 {
    nu * nu - 4.0 * k * k
}

/// Principal root of the discriminant: real and nonnegative when it is
/// nonnegative, positive imaginary otherwise.
pub fn sqrt_discriminant(k: f64, nu: f64) -> C64 {
    let d = discriminant(k, nu);
    if d >= 0.0 { C64::new(d.sqrt(), 0.0) } else { C64::new(0.0, (-d).sqrt()) }
}

/// Half-width of the band `|nu^2 - 4k^2| < eps_J` treated as the double eigenvalue.
pub fn jordan_threshold(nu: f64) -> f64 {
    1e-8 * nu * nu
}

pub fn is_degenerate(k: f64, nu: f64) -> bool {
    discriminant(k, nu).abs() < jordan_threshold(nu)
}

/// `(lambda_plus, lambda_minus)`.
///
/// `lambda_plus` is evaluated as `-nu k^2 - 2k^2/(nu + r)`, `r` the principal
/// root of the discriminant, which avoids the cancellation in
/// `-nu/2 + r/2` at small `k`.
pub fn eigenvalues(k: f64, nu: f64) -> (C64, C64) {
    let r = sqrt_discriminant(k, nu);
    let k2 = k * k;
    let lp = -(r + nu).inv() * (2.0 * k2) - nu * k2;
    let lm = C64::new(-nu * k2 - 0.5 * nu, 0.0) - r * 0.5;
    (lp, lm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenData {
    pub k: f64,
    pub nu: f64,
    pub lambda_plus: C64,
    pub lambda_minus: C64,
    pub sqrt_disc: C64,
    /// Eigenvector matrix (columns for `lambda_plus`, `lambda_minus`) and its
    /// inverse; absent at the double eigenvalue.
    pub s: Option<Mat2>,
    pub s_inv: Option<Mat2>,
}

impl EigenData {
    pub fn new(k: f64, nu: f64) -> Self {
        let (lp, lm) = eigenvalues(k, nu);
        let sqrt_disc = sqrt_discriminant(k, nu);
        let (s, s_inv) = if is_degenerate(k, nu) {
            (None, None)
        } else {
            // Columns chosen so that neither vanishes at k = 0.
            let vp = [C64::new(nu * (k * k + 1.0), 0.0) + lp, C64::new(0.0, -k)];
            let vm = [C64::new(0.0, -k), C64::new(nu * k * k, 0.0) + lm];
            let s = [[vp[0], vm[0]], [vp[1], vm[1]]];
            let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
            let inv = [[s[1][1] / det, -s[0][1] / det], [-s[1][0] / det, s[0][0] / det]];
            (Some(s), Some(inv))
        };
        EigenData { k, nu, lambda_plus: lp, lambda_minus: lm, sqrt_disc, s, s_inv }
    }

    pub fn trace(&self) -> f64 {
        -self.nu * (2.0 * self.k * self.k + 1.0)
    }

    pub fn det(&self) -> f64 {
        let (k, nu) = (self.k, self.nu);
        nu * nu * k * k * (k * k + 1.0) + k * k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Jordan formula inside the threshold band, diagonalisation outside.
    Auto,
    Diagonal,
    Jordan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeMatrix {
    pub m: Mat2,
    pub k: f64,
    pub t: f64,
    /// Branch actually used (never `Auto`).
    pub branch: Branch,
}

impl ModeMatrix {
    pub fn apply(&self, u: [C64; 2]) -> [C64; 2] {
        mat_vec(&self.m, u)
    }

    pub fn compose(&self, other: &ModeMatrix) -> ModeMatrix {
        ModeMatrix { m: mat_mul(&self.m, &other.m), k: self.k, t: self.t + other.t, branch: self.branch }
    }

    pub fn max_abs_diff(&self, other: &ModeMatrix) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn propagator(k: f64, t: f64, nu: f64) -> ModeMatrix {
    propagator_with(k, t, nu, Branch::Auto)
}

pub fn propagator_with(k: f64, t: f64, nu: f64, branch: Branch) -> ModeMatrix {
    let branch = match branch {
        Branch::Auto if is_degenerate(k, nu) => Branch::Jordan,
        Branch::Auto => Branch::Diagonal,
        b => b,
    };
    let m = match branch {
        Branch::Jordan => jordan(k, t, nu),
        _ => diagonal(k, t, nu),
    };
    ModeMatrix { m, k, t, branch }
}

fn diagonal(k: f64, t: f64, nu: f64) -> Mat2 {
    let e = EigenData::new(k, nu);
    let (s, si) = match (e.s, e.s_inv) {
        (Some(s), Some(si)) => (s, si),
        // Exactly at the double root the diagonal form does not exist.
        _ => return jordan(k, t, nu),
    };
    let d = [[(e.lambda_plus * t).exp(), ZERO], [ZERO, (e.lambda_minus * t).exp()]];
    mat_mul(&mat_mul(&s, &d), &si)
}

/// Jordan-block formula about the mean eigenvalue `mu`, with the leading
/// discriminant corrections so that it stays within rounding of the exact
/// exponential across the whole threshold band:
/// `e^{mu t}[(1 + d t^2/2 + d^2 t^4/24) I + t (1 + d t^2/6 + d^2 t^4/120)(A - mu I)]`,
/// `d = (nu^2 - 4k^2)/4`.
fn jordan(k: f64, t: f64, nu: f64) -> Mat2 {
    let mu = -nu * k * k - 0.5 * nu;
    let d = 0.25 * discriminant(k, nu);
    let (z, z2) = (d * t * t, (d * t * t).powi(2));
    let c = 1.0 + z / 2.0 + z2 / 24.0;
    let s = t * (1.0 + z / 6.0 + z2 / 120.0);
    jordan_form(k, t, nu, mu, c, s)
}

/// The bare Jordan formula `e^{lambda t}(I + t (A - lambda I))` at the mean
/// eigenvalue, without discriminant corrections.
pub fn jordan_plain(k: f64, t: f64, nu: f64) -> Mat2 {
    let mu = -nu * k * k - 0.5 * nu;
    jordan_form(k, t, nu, mu, 1.0, t)
}

fn jordan_form(k: f64, t: f64, nu: f64, mu: f64, c: f64, s: f64) -> Mat2 {
    let a = system_matrix(k, nu);
    let e = (mu * t).exp();
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let shifted = a[i][j] - if i == j { C64::new(mu, 0.0) } else { ZERO };
            let id = if i == j { ONE } else { ZERO };
            out[i][j] = (id * c + shifted * s) * e;
        }
    }
    out
}

/// Complex samples `(w_hat(k), v_hat(k))` on a wavenumber grid at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    pub k: Vec<f64>,
    pub w: Vec<C64>,
    pub v: Vec<C64>,
    pub t: f64,
}

impl ModeState {
    pub fn from_initial(data: &InitialData, k: Vec<f64>) -> Self {
        let w = k.iter().map(|&k| data.w_hat(k)).collect();
        let v = k.iter().map(|&k| data.v_hat(k)).collect();
        ModeState { k, w, v, t: 0.0 }
    }

    /// Largest violation of `f(-k) = conj f(k)` over mirrored grid pairs.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.k.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let j = n - 1 - i;
            if (self.k[i] + self.k[j]).abs() < 1e-12 * (1.0 + self.k[i].abs()) {
                worst = worst.max((self.w[i] - self.w[j].conj()).norm());
                worst = worst.max((self.v[i] - self.v[j].conj()).norm());
            }
        }
        worst
    }
}

/// Applies the propagator over `t_target - state.t` at every wavenumber.
pub fn evolve(state: &ModeState, t_target: f64, nu: f64) -> Result<ModeState> {
    let dt = t_target - state.t;
    if dt < 0.0 {
        return Err(Error::NegativeTime(dt));
    }
    let (w, v): (Vec<C64>, Vec<C64>) = state
        .k
        .par_iter()
        .zip(state.w.par_iter().zip(state.v.par_iter()))
        .map(|(&k, (&w, &v))| {
            let u = propagator(k, dt, nu).apply([w, v]);
            (u[0], u[1])
        })
        .unzip();
    Ok(ModeState { k: state.k.clone(), w, v, t: t_target })
}

/// `lambda_plus(k) + (nu + 1/nu) k^2` from the binomial series in
/// `x = 4k^2/nu^2`, valid for `x <= 15/16`.
pub fn lambda_remainder(k: f64, nu: f64, tol: f64) -> Result<f64> {
    let x = 4.0 * k * k / (nu * nu);
    if x > 15.0 / 16.0 {
        return Err(Error::OutsideRegion {
            k,
            detail: format!("4k^2/nu^2 = {x:.6} exceeds 15/16"),
        });
    }
    let mut binom = 0.5; // binom(1/2, 1)
    let mut xn = x;
    let mut sum = 0.0;
    for n in 2..100_000 {
        binom *= (0.5 - (n as f64 - 1.0)) / n as f64;
        xn *= x;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * binom * xn;
        sum += term;
        if term.abs() < tol * sum.abs() || term == 0.0 {
            break;
        }
    }
    Ok(0.5 * nu * sum)
}

/// Same quantity for any `k`, from the cancellation-free closed form
/// `-4k^4 / (nu (nu + r)^2)`; complex past the double point.
pub fn lambda_remainder_any(k: f64, nu: f64) -> C64 {
    let r = sqrt_discriminant(k, nu);
    let k4 = k.powi(4);
    -((r + nu) * (r + nu) * nu).inv() * (4.0 * k4)
}

/// Taylor jet of the remainder about `k = 0`.
pub fn lambda_remainder_jet(nu: f64, order: usize) -> Jet {
    let k = Jet::variable(0.0, order);
    let x = (&k * &k).scale(C64::new(4.0 / (nu * nu), 0.0));
    // x has no constant term, so only powers up to order/2 contribute.
    let nmax = order / 2;
    let mut coeffs = vec![ZERO; nmax + 1];
    let mut binom = 1.0;
    for (n, c) in coeffs.iter_mut().enumerate() {
        if n > 0 {
            binom *= (0.5 - (n as f64 - 1.0)) / n as f64;
        }
        if n >= 2 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            *c = C64::new(0.5 * nu * sign * binom, 0.0);
        }
    }
    Jet::polynomial(&x, &coeffs)
}

/// Coefficients of the slow projector: `w_hat` receives
/// `(f1 w0 + f2 v0) e^{lambda_plus t}` and `v_hat` receives `(f3 w0 + f4 v0) e^{lambda_plus t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCoeffs {
    pub f1: C64,
    pub f2: C64,
    pub f3: C64,
    pub f4: C64,
}

pub fn split_coefficients(k: f64, nu: f64) -> Result<SplitCoeffs> {
    if is_degenerate(k, nu) {
        return Err(Error::Degenerate(k));
    }
    let r = sqrt_discriminant(k, nu);
    let ik = C64::new(0.0, k);
    Ok(SplitCoeffs {
        f1: (r + nu) / (r * 2.0),
        f2: -ik / r,
        f3: -ik / r,
        f4: (r - nu) / (r * 2.0),
    })
}

/// Jets about `k = 0` of `(f1, f2, f3, f4)`.
pub fn split_coefficient_jets(nu: f64, order: usize) -> [Jet; 4] {
    let k = Jet::variable(0.0, order);
    let d = (&k * &k).scale(C64::new(-4.0, 0.0)).add_const(C64::new(nu * nu, 0.0));
    let r = d.sqrt_with_root(C64::new(nu, 0.0));
    let two_r = r.scale(C64::new(2.0, 0.0));
    let ik = k.scale(C64::new(0.0, 1.0));
    let f1 = r.add_const(C64::new(nu, 0.0)).div(&two_r);
    let f2 = (-&ik).div(&r);
    let f4 = r.add_const(C64::new(-nu, 0.0)).div(&two_r);
    [f1, f2.clone(), f2, f4]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitParts {
    /// `(f1 w0 + f2 v0) e^{lambda_plus t}`
    pub w_plus: C64,
    /// `g e^{lambda_minus t}`
    pub w_minus: C64,
    pub v_plus: C64,
    pub v_minus: C64,
    pub g: C64,
    pub g_v: C64,
}

/// Splits the solution at `k` into its slow (`lambda_plus`) and fast parts.
pub fn solution_split(w0: C64, v0: C64, k: f64, t: f64, nu: f64) -> Result<SplitParts> {
    let c = split_coefficients(k, nu)?;
    let (lp, lm) = eigenvalues(k, nu);
    let (ep, em) = ((lp * t).exp(), (lm * t).exp());
    let g = (ONE - c.f1) * w0 - c.f2 * v0;
    let g_v = -c.f3 * w0 + (ONE - c.f4) * v0;
    Ok(SplitParts {
        w_plus: (c.f1 * w0 + c.f2 * v0) * ep,
        w_minus: g * em,
        v_plus: (c.f3 * w0 + c.f4 * v0) * ep,
        v_minus: g_v * em,
        g,
        g_v,
    })
}

/// `-lambda_plus(k)/k^2`, which tends to `nu + 1/nu` as `k -> 0`.
pub fn effective_rate(k: f64, nu: f64) -> f64 {
    -eigenvalues(k, nu).0.re / (k * k)
}

pub fn nu_t(nu: f64) -> f64 {
    enhanced_diffusivity(nu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn eigenvalue_examples() {
        let (p, m) = eigenvalues(0.0, 0.7);
        assert!(close(p, ZERO, 1e-15) && close(m, C64::new(-0.7, 0.0), 1e-15));
        let nu = 0.5;
        let (p, m) = eigenvalues(nu / 2.0, nu);
        let l = -nu.powi(3) / 4.0 - nu / 2.0;
        assert!(close(p, C64::new(l, 0.0), 1e-15) && close(m, C64::new(l, 0.0), 1e-15));
        let (p, m) = eigenvalues(1.0, 0.5);
        let im = 0.5 * 3.75f64.sqrt();
        assert!(close(p, C64::new(-0.75, im), 1e-14));
        assert!(close(m, C64::new(-0.75, -im), 1e-14));
        assert!((im - 0.968245836551854).abs() < 1e-14);
    }

    #[test]
    fn propagator_at_zero_wavenumber() {
        let nu = 0.3;
        let p = propagator(0.0, 4.0, nu);
        assert!(close(p.m[0][0], ONE, 1e-15));
        assert!(close(p.m[1][1], C64::new((-nu * 4.0f64).exp(), 0.0), 1e-14));
        assert!(p.m[0][1].norm() < 1e-15 && p.m[1][0].norm() < 1e-15);
        let id = propagator(1.3, 0.0, nu);
        assert!(id.max_abs_diff(&ModeMatrix { m: identity(), k: 1.3, t: 0.0, branch: Branch::Diagonal }) < 1e-14);
    }

    #[test]
    fn jordan_point_continuity() {
        let nu = 0.5;
        let kj = nu / 2.0;
        let j = propagator(kj, 2.0, nu);
        assert_eq!(j.branch, Branch::Jordan);
        for dk in [1e-3, 1e-4, 1e-5, 1e-6] {
            let d = propagator(kj + dk, 2.0, nu);
            assert_eq!(d.branch, Branch::Diagonal);
            assert!(d.max_abs_diff(&j) < 4.0 * dk, "dk={dk}");
        }
    }

    #[test]
    fn remainder_series() {
        assert_eq!(lambda_remainder(0.0, 0.5, 1e-16).unwrap(), 0.0);
        let l = lambda_remainder(0.2, 0.5, 1e-16).unwrap();
        let e = eigenvalues(0.2, 0.5).0.re + nu_t(0.5) * 0.04;
        assert!((l - e).abs() < 1e-12);
        for k in [1e-3, 0.05, 0.2, 0.24] {
            let a = lambda_remainder(k, 0.5, 1e-16).unwrap();
            let b = lambda_remainder_any(k, 0.5);
            assert!((a - b.re).abs() < 1e-14 * a.abs() && b.im == 0.0, "{k}");
        }
        assert!(lambda_remainder(0.25, 0.5, 1e-16).is_err());
        let jet = lambda_remainder_jet(0.5, 6);
        assert!(close(jet.derivative(4), C64::new(-24.0 / 0.125, 0.0), 1e-12));
        assert!(jet.derivative(1).norm() == 0.0 && jet.derivative(3).norm() == 0.0);
    }

    #[test]
    fn split_rejects_double_point() {
        assert!(matches!(split_coefficients(0.25, 0.5), Err(Error::Degenerate(_))));
        let s = split_coefficients(1e-9, 0.5).unwrap();
        assert!(close(s.f1, ONE, 1e-12));
    }
}
