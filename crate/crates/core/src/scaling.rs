//! Self-similar (scaling) variables `xi = x / sqrt(1+t)`, `tau = log(1+t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimePoint {
    pub x: f64,
    pub t: f64,
    pub xi: f64,
    pub tau: f64,
}

impl SpaceTimePoint {
    pub fn from_physical(x: f64, t: f64) -> Result<Self> {
        let (xi, tau) = to_scaling(x, t)?;
        Ok(SpaceTimePoint { x, t, xi, tau })
    }

    pub fn from_scaled(xi: f64, tau: f64) -> Self {
        let (x, t) = from_scaling(xi, tau);
        SpaceTimePoint { x, t, xi, tau }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

pub fn to_scaling(x: f64, t: f64) -> Result<(f64, f64)> {
    check_time(t)?;
    Ok((x / (1.0 + t).sqrt(), t.ln_1p()))
}

pub fn from_scaling(xi: f64, tau: f64) -> (f64, f64) {
    let t = tau.exp_m1();
    (xi * tau.exp().sqrt(), t)
}

/// Which field a sample belongs to; the two carry different amplitude factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    /// `w~ = (1+t)^{-1/2} w`
    W,
    /// `v~ = (1+t)^{-1} v`
    V,
}

impl Component {
    pub fn exponent(self) -> f64 {
        match self {
            Component::W => 0.5,
            Component::V => 1.0,
        }
    }
}

/// Amplitude factor `(1+t)^{-exponent}` relating physical to scaled values.
pub fn amplitude(component: Component, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok((1.0 + t).powf(-component.exponent()))
}

/// Physical samples `f~(x_i, t)` to scaled samples on the grid `xi_i = x_i/sqrt(1+t)`.
///
/// Returns `(xi, values)`.
pub fn field_to_scaling(
    x: &[f64],
    values: &[f64],
    t: f64,
    component: Component,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let a = amplitude(component, t)?;
    let s = (1.0 + t).sqrt();
    let xi = x.iter().map(|&x| x / s).collect();
    let v = values.iter().map(|&f| f / a).collect();
    Ok((xi, v))
}

/// Inverse of [`field_to_scaling`].
pub fn field_from_scaling(
    xi: &[f64],
    values: &[f64],
    t: f64,
    component: Component,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let a = amplitude(component, t)?;
    let s = (1.0 + t).sqrt();
    let x = xi.iter().map(|&xi| xi * s).collect();
    let v = values.iter().map(|&f| f * a).collect();
    Ok((x, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(to_scaling(3.0, 0.0).unwrap(), (3.0, 0.0));
        let (xi, tau) = to_scaling(0.0, 99.0).unwrap();
        assert_eq!(xi, 0.0);
        assert!((tau - 100f64.ln()).abs() < 1e-15);
        let (xi, tau) = to_scaling(10.0, 3.0).unwrap();
        assert!((xi - 5.0).abs() < 1e-15);
        assert!((tau - 4f64.ln()).abs() < 1e-15);
        assert!(matches!(to_scaling(1.0, -1e-3), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn v_component_constant() {
        let (_, v) = field_from_scaling(&[0.0, 1.0], &[2.0, 2.0], 3.0, Component::V).unwrap();
        assert_eq!(v, vec![0.5, 0.5]);
        let (x, w) = field_from_scaling(&[1.0], &[7.0], 0.0, Component::W).unwrap();
        assert_eq!((x[0], w[0]), (1.0, 7.0));
    }
}
