//! Log-linear least-squares fits of decay exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Slope of `log value` against the clock.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log fit.
    pub residual: f64,
    pub points: usize,
}

/// Ordinary least squares `y = intercept + slope * x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::Fit(format!("{} abscissae vs {} ordinates", n, y.len())));
    }
    if n < 3 {
        return Err(Error::Fit(format!("window holds {n} points, need at least 3")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate window: all abscissae equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok((slope, intercept, (rss / nf).sqrt()))
}

/// Fits `log value` against the clock for points with clock in `window`
/// (inclusive). Every value in the window must be positive.
pub fn fit_decay_exponent(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for &(c, v) in series {
        if c < window.0 || c > window.1 {
            continue;
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Fit(format!("non-positive value {v} at clock {c}")));
        }
        x.push(c);
        y.push(v.ln());
    }
    let (slope, intercept, residual) = linear_fit(&x, &y)?;
    Ok(DecayFit { slope, intercept, residual, points: x.len() })
}

/// Same, on `|value|`; zero entries are still rejected.
pub fn fit_decay_exponent_abs(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let abs: Vec<(f64, f64)> = series.iter().map(|&(c, v)| (c, v.abs())).collect();
    fit_decay_exponent(&abs, window)
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = 0.5 * (i + j) as f64 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let sxy: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn exponential_and_constant() {
        let s: Vec<_> = grid(0.0, 5.0, 51).into_iter().map(|t| (t, (-2.0 * t).exp())).collect();
        let f = fit_decay_exponent(&s, (0.0, 5.0)).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-6);
        let c: Vec<_> = grid(0.0, 5.0, 11).into_iter().map(|t| (t, 3.0)).collect();
        assert!(fit_decay_exponent(&c, (0.0, 5.0)).unwrap().slope.abs() < 1e-12);
    }

    #[test]
    fn polynomial_prefactor() {
        // log(tau e^{-tau}) has derivative 1/tau - 1 in [-0.9, -0.8] on [5, 10].
        let s: Vec<_> = grid(5.0, 10.0, 101).into_iter().map(|t| (t, t * (-t).exp())).collect();
        let f = fit_decay_exponent(&s, (5.0, 10.0)).unwrap();
        assert!(f.slope > -0.9 && f.slope < -0.8, "{}", f.slope);
    }

    #[test]
    fn errors() {
        assert!(fit_decay_exponent(&[(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)], (0.0, 2.0)).is_err());
        assert!(fit_decay_exponent(&[(0.0, 1.0), (1.0, 2.0)], (0.0, 2.0)).is_err());
    }

    #[test]
    fn spearman_signs() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &[1.0, 4.0, 9.0, 16.0]) - 1.0).abs() < 1e-15);
        assert!((spearman(&x, &[4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
    }
}
