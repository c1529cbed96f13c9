use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::jet::Jet;

/// Smooth cutoff equal to one on `|k| <= r1` and zero on `|k| >= r2`.
///
/// The bridge is `1 - s(x)`, `x = (|k| - r1)/(r2 - r1)`, with
/// `s(x) = e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub nu: f64,
    pub r1: f64,
    pub r2: f64,
}

// Beyond these the bridge is within 1e-21 of its limit, and so are all the
// derivatives we take.
const FLAT: f64 = 0.02;

impl CutoffSpec {
    pub fn new(nu: f64) -> Self {
        let r1 = 15f64.sqrt() * nu / 8.0;
        CutoffSpec { nu, r1, r2: r1 + nu * nu }
    }

    pub fn contains(&self, k: f64) -> bool {
        k.abs() < self.r2
    }

    fn bridge_coordinate(&self, k: f64) -> f64 {
        (k.abs() - self.r1) / (self.r2 - self.r1)
    }
}

pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

pub fn cutoff(spec: &CutoffSpec, k: f64) -> f64 {
    1.0 - smooth_step(spec.bridge_coordinate(k))
}

/// Jet of the cutoff about `k0`.
pub fn cutoff_jet(spec: &CutoffSpec, k0: f64, order: usize) -> Jet {
    let x0 = spec.bridge_coordinate(k0);
    if x0 <= FLAT {
        return Jet::constant(C64::new(1.0, 0.0), order);
    }
    if x0 >= 1.0 - FLAT {
        return Jet::constant(C64::new(0.0, 0.0), order);
    }
    let sign = if k0 < 0.0 { -1.0 } else { 1.0 };
    let width = spec.r2 - spec.r1;
    let x = Jet::variable(k0, order)
        .scale(C64::new(sign / width, 0.0))
        .add_const(C64::new(-spec.r1 / width, 0.0));
    let one = C64::new(1.0, 0.0);
    let a = (-x.recip()).exp();
    let b = (-(-&x).add_const(one).recip()).exp();
    let s = a.div(&(&a + &b));
    (-s).add_const(one)
}

/// Start time of the long-time experiments: `max(2/nu, (8/nu) log(1/nu))`.
pub fn wait_time(nu: f64) -> f64 {
    (2.0 / nu).max(8.0 / nu * (1.0 / nu).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        let c = CutoffSpec::new(0.5);
        assert_eq!(cutoff(&c, 0.0), 1.0);
        assert_eq!(cutoff(&c, c.r1), 1.0);
        assert_eq!(cutoff(&c, -(c.r2 + 0.5)), 0.0);
        assert_eq!(cutoff(&c, c.r2), 0.0);
    }

    #[test]
    fn bridge_is_monotone() {
        let c = CutoffSpec::new(0.3);
        let mid = cutoff(&c, 0.5 * (c.r1 + c.r2));
        assert!((mid - 0.5).abs() < 1e-14);
        let mut prev = 1.0;
        for i in 0..=200 {
            let k = c.r1 + (c.r2 - c.r1) * i as f64 / 200.0;
            let v = cutoff(&c, k);
            assert!(v <= prev && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn jet_matches_differences() {
        let c = CutoffSpec::new(0.5);
        let h = 1e-4;
        for k0 in [0.3, -0.35, 0.45] {
            let j = cutoff_jet(&c, k0, 2);
            assert!((j.value().re - cutoff(&c, k0)).abs() < 1e-15);
            let d1 = (cutoff(&c, k0 + h) - cutoff(&c, k0 - h)) / (2.0 * h);
            let d2 = (cutoff(&c, k0 + h) - 2.0 * cutoff(&c, k0) + cutoff(&c, k0 - h)) / (h * h);
            assert!((j.derivative(1).re - d1).abs() < 1e-5 * d1.abs().max(1.0));
            assert!((j.derivative(2).re - d2).abs() < 1e-3 * d2.abs().max(1.0));
        }
    }

    #[test]
    fn wait_time_branches() {
        assert_eq!(wait_time(1.0), 2.0);
        assert!((wait_time(0.5) - 16.0 * 2f64.ln()).abs() < 1e-12);
    }
}
