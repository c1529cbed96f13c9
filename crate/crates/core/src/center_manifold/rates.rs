use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::table::Parity;

/// Predicted decay `|x(tau)| <~ C e^{-rate tau} / nu^{power}` on the manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatePrediction {
    pub k: usize,
    pub parity: Parity,
    /// Exponent shared by `a_k = alpha_k` and `beta_k`.
    pub tau_exponent: Rational64,
    /// Power of `1/nu` in the `alpha_k` constant.
    pub nu_exponent: i64,
    /// Power of `1/nu` in the `beta_k` constant.
    pub beta_nu_exponent: i64,
    /// Exponent of the diagonal variable `b_k`; `None` where `b_k` vanishes
    /// identically on the manifold (`k = 0, 1`).
    pub b_exponent: Option<Rational64>,
}

pub fn predict_rate(k: usize) -> RatePrediction {
    let ki = k as i64;
    let shift = match k % 4 {
        0 => 0,
        1 => 1,
        2 => 2,
        _ => 3,
    };
    let b_shift = match k % 4 {
        0 => 4,
        1 => 5,
        2 => 2,
        _ => 3,
    };
    RatePrediction {
        k,
        parity: Parity::of(k),
        tau_exponent: Rational64::new(ki + shift, 4),
        nu_exponent: ki - 1,
        beta_nu_exponent: ki + 1,
        b_exponent: if k < 2 { None } else { Some(Rational64::new(ki + b_shift, 4)) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        assert_eq!(predict_rate(4).tau_exponent, Rational64::from_integer(1));
        assert_eq!(predict_rate(6).tau_exponent, Rational64::from_integer(2));
        assert_eq!(predict_rate(3).tau_exponent, Rational64::new(3, 2));
        assert_eq!(predict_rate(2).tau_exponent, Rational64::from_integer(1));
        assert_eq!(predict_rate(1).tau_exponent, Rational64::new(1, 2));
        assert_eq!(predict_rate(7).tau_exponent, Rational64::new(5, 2));
        assert_eq!(predict_rate(8).b_exponent, Some(Rational64::from_integer(3)));
        assert_eq!(predict_rate(5).b_exponent, Some(Rational64::new(5, 2)));
        assert_eq!(predict_rate(1).b_exponent, None);
    }
}
