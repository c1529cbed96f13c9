//! The weighted norm of `L^2(m)` and the Fourier-side norm `|||.|||`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::initial_data::binom;
use crate::jet::Jet;
use crate::quadrature::{finite_difference, stencil_size, Grid, GridKind, WeightedFunction};

/// `(int (1+xi^2)^m |f|^2)^{1/2}` together with a relative estimate of the
/// mass lost beyond the window.
pub fn weighted_norm_with_tail(f: &WeightedFunction, m: u32) -> (f64, f64) {
    let g = &f.grid;
    let integrand: Vec<f64> = g
        .nodes
        .iter()
        .zip(&f.values)
        .map(|(x, v)| (1.0 + x * x).powi(m as i32) * v * v)
        .collect();
    let total = g.integrate(&integrand);
    let n = integrand.len();
    if total == 0.0 || n < 2 {
        return (total.max(0.0).sqrt(), 0.0);
    }
    let width = g.b - g.a;
    let tail_at = |end: usize, inner: usize| -> f64 {
        let (ge, gi) = (integrand[end], integrand[inner]);
        if ge == 0.0 {
            return 0.0;
        }
        let dx = (g.nodes[end] - g.nodes[inner]).abs();
        // Exponential extrapolation when decaying, else assume the worst.
        let len = if gi > ge { (dx / (gi / ge).ln()).min(width) } else { width };
        ge * len
    };
    let tail = tail_at(0, 1) + tail_at(n - 1, n - 2);
    (total.sqrt(), tail / total)
}

/// Weighted norm; fails when the estimated tail exceeds `tol`.
pub fn weighted_norm(f: &WeightedFunction, m: u32, tol: f64) -> Result<f64> {
    let (v, tail) = weighted_norm_with_tail(f, m);
    if tail > tol {
        return Err(Error::QuadratureTail { estimate: tail, tolerance: tol });
    }
    Ok(v)
}

/// A Fourier-side field with closed-form derivatives.
pub trait AnalyticField: Sync {
    /// Taylor jet of the field about `k` to the given order.
    fn jet(&self, k: f64, order: usize) -> Jet;
}

impl AnalyticField for crate::initial_data::GaussianPacket {
    fn jet(&self, k: f64, order: usize) -> Jet {
        self.hat_jet(k, order)
    }
}

impl<F: Fn(f64, usize) -> Jet + Sync> AnalyticField for F {
    fn jet(&self, k: f64, order: usize) -> Jet {
        self(k, order)
    }
}

/// Input to [`triple_norm`].
pub enum FourierField<'a> {
    /// Closed form, integrated on the given `k` grid.
    Analytic { field: &'a dyn AnalyticField, grid: &'a Grid },
    /// Samples on a uniform `k` grid; derivatives by fourth-order differences.
    Sampled { grid: &'a Grid, values: &'a [C64] },
}

/// `||d^j w_hat||_{L^2(dk)}^2` for `j = 0..=m`.
pub fn derivative_norms_sq(field: &FourierField, m: usize) -> Result<Vec<f64>> {
    match field {
        FourierField::Analytic { field, grid } => {
            let mut acc = vec![0.0; m + 1];
            for (&k, &w) in grid.nodes.iter().zip(&grid.weights) {
                let jet = field.jet(k, m);
                for (j, a) in acc.iter_mut().enumerate() {
                    *a += w * jet.derivative(j).norm_sqr();
                }
            }
            Ok(acc)
        }
        FourierField::Sampled { grid, values } => sampled_derivative_norms(grid, values, m),
    }
}

fn sampled_derivative_norms(grid: &Grid, values: &[C64], m: usize) -> Result<Vec<f64>> {
    if grid.kind != GridKind::Uniform {
        return Err(Error::GridResolution { order: m, detail: "sampled field needs a uniform k grid".into() });
    }
    let n = values.len();
    let need = 2 * stencil_size(m, 4);
    if n < need {
        return Err(Error::GridResolution {
            order: m,
            detail: format!("{n} points, need at least {need}"),
        });
    }
    let h = grid.spacing().unwrap();
    let norms_at = |vals: &[C64], h: f64| -> Vec<f64> {
        (0..=m)
            .map(|j| {
                let d = if j == 0 { vals.to_vec() } else { finite_difference(vals, h, j, 4) };
                let nn = d.len();
                d.iter()
                    .enumerate()
                    .map(|(i, z)| {
                        let w = if i == 0 || i + 1 == nn { 0.5 * h } else { h };
                        w * z.norm_sqr()
                    })
                    .sum()
            })
            .collect()
    };
    let fine = norms_at(values, h);
    // Resolution check: compare with every-other-point subsampling.
    let coarse_vals: Vec<C64> = values.iter().step_by(2).copied().collect();
    let coarse = norms_at(&coarse_vals, 2.0 * h);
    for j in 0..=m {
        let (a, b) = (fine[j].sqrt(), coarse[j].sqrt());
        let scale = fine[0].sqrt().max(a).max(f64::MIN_POSITIVE);
        if (a - b).abs() > 1e-4 * scale.max(a) {
            return Err(Error::GridResolution {
                order: j,
                detail: format!("derivative norm {a:.6e} vs {b:.6e} on the doubled spacing"),
            });
        }
    }
    Ok(fine)
}

/// `|||w~(t)|||` with `C(m) = 1`:
/// `(1+t)^{1/4} (sum_{j<=m} (1+t)^{-j} ||d_k^j w_hat||^2)^{1/2}`.
pub fn triple_norm(field: &FourierField, t: f64, m: usize) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let d = derivative_norms_sq(field, m)?;
    let s = 1.0 + t;
    let sum: f64 = d.iter().enumerate().map(|(j, v)| s.powi(-(j as i32)) * v).sum();
    Ok(s.powf(0.25) * sum.sqrt())
}

/// `||w||_{L^2(m)}` of the scaling-variable counterpart of `w~(., t)`,
/// from the same derivative norms via Plancherel.
pub fn weighted_norm_from_fourier(field: &FourierField, t: f64, m: usize) -> Result<f64> {
    let d = derivative_norms_sq(field, m)?;
    let s = 1.0 + t;
    let sum: f64 = d
        .iter()
        .enumerate()
        .map(|(l, v)| binom(m as u32, l as u32) * s.powf(0.5 - l as f64) * v / (2.0 * PI))
        .sum();
    Ok(sum.sqrt())
}

/// Band `[lo, hi]` that `|||w~||| / ||w||_{L^2(m)}` must lie in for every
/// field and time, given `C(m) = 1`.
pub fn equivalence_band(m: usize) -> (f64, f64) {
    let top = binom(m as u32, (m / 2) as u32);
    ((2.0 * PI / top).sqrt(), (2.0 * PI).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::GaussianPacket;
    use std::sync::Arc;

    #[test]
    fn weighted_norm_examples() {
        let g = Arc::new(Grid::gauss_legendre(-12.0, 12.0, 24, 16).unwrap());
        let zero = WeightedFunction::from_fn(g.clone(), 0, |_| 0.0);
        assert_eq!(weighted_norm(&zero, 0, 1e-14).unwrap(), 0.0);
        let f = WeightedFunction::from_fn(g.clone(), 0, |x| (-x * x / 2.0).exp());
        let n0 = weighted_norm(&f, 0, 1e-14).unwrap();
        assert!((n0 - PI.sqrt().sqrt()).abs() < 1e-13);
        let n1 = weighted_norm(&f, 1, 1e-14).unwrap();
        assert!((n1 - (1.5 * PI.sqrt()).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn tail_is_flagged_on_narrow_window() {
        let g = Arc::new(Grid::gauss_legendre(-2.0, 2.0, 4, 16).unwrap());
        let f = WeightedFunction::from_fn(g, 2, |x| (-x * x / 2.0).exp());
        assert!(matches!(weighted_norm(&f, 2, 1e-14), Err(Error::QuadratureTail { .. })));
    }

    #[test]
    fn triple_norm_examples() {
        let g = Grid::gauss_legendre(-10.0, 10.0, 20, 16).unwrap();
        let p = GaussianPacket::new(1.0, 0.0, 2f64.sqrt(), 0); // e^{-k^2}
        let f = FourierField::Analytic { field: &p, grid: &g };
        let v = triple_norm(&f, 0.0, 0).unwrap();
        assert!((v - (PI / 2.0).sqrt().sqrt()).abs() < 1e-13);
        let u = Grid::uniform(-10.0, 10.0, 4001).unwrap();
        let samples: Vec<C64> = u.nodes.iter().map(|&k| p.hat(k)).collect();
        let s = FourierField::Sampled { grid: &u, values: &samples };
        let a = triple_norm(&f, 3.0, 3).unwrap();
        let b = triple_norm(&s, 3.0, 3).unwrap();
        assert!((a - b).abs() < 1e-8 * a, "{a} {b}");
        let zero = vec![C64::new(0.0, 0.0); u.len()];
        let z = FourierField::Sampled { grid: &u, values: &zero };
        assert_eq!(triple_norm(&z, 1.0, 2).unwrap(), 0.0);
    }

    #[test]
    fn coarse_grid_is_flagged() {
        let u = Grid::uniform(-10.0, 10.0, 41).unwrap();
        let p = GaussianPacket::new(1.0, 0.0, 3.0, 0);
        let samples: Vec<C64> = u.nodes.iter().map(|&k| p.hat(k)).collect();
        let s = FourierField::Sampled { grid: &u, values: &samples };
        assert!(matches!(triple_norm(&s, 0.0, 4), Err(Error::GridResolution { .. })));
    }
}
