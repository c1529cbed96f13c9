//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C64;

pub type M2 = [[C64; 2]; 2];

fn mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// `exp(t A(k))` by scaling and squaring of a 30-term Taylor series.
pub fn expm_reference(k: f64, nu: f64, t: f64) -> M2 {
    let ik = C64::new(0.0, -k);
    let a = [[C64::new(-nu * k * k, 0.0), ik], [ik, C64::new(-nu * (k * k + 1.0), 0.0)]];
    let norm = a.iter().flatten().map(|z| z.norm()).sum::<f64>() * t;
    let squarings = norm.max(1.0).log2().ceil() as u32 + 4;
    let h = t / 2f64.powi(squarings as i32);
    let mut term = [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
    let mut sum = term;
    for n in 1..30 {
        term = mul(&term, &a);
        for row in term.iter_mut() {
            for z in row.iter_mut() {
                *z *= h / n as f64;
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = mul(&sum, &sum);
    }
    sum
}

pub fn max_rel(a: &M2, b: &M2) -> f64 {
    let scale = b.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

pub fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `int x^l e^{-x^2/(4 D)} dx / sqrt(4 pi D)`: Gaussian moments by the
/// double-factorial formula.
pub fn heat_kernel_moment(l: u32, d: f64) -> f64 {
    if l % 2 == 1 {
        return 0.0;
    }
    let mut df = 1.0;
    let mut i = l as i64 - 1;
    while i > 1 {
        df *= i as f64;
        i -= 2;
    }
    df * (2.0 * d).powi(l as i32 / 2)
}

/// Slope of the least-squares line through `(x, y)`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
