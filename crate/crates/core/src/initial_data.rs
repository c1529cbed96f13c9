//! Initial data for the model: sums of Gaussian packets (closed-form Fourier
//! transforms) or physical samples read from a file.

use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// `amplitude * d^derivative/dx^derivative G(x - center)` with `G` the unit-mass
/// Gaussian of standard deviation `width`; its transform is
/// `amplitude (ik)^d exp(-ik center - width^2 k^2 / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub amplitude: f64,
    #[serde(default)]
    pub center: f64,
    #[serde(default = "unit")]
    pub width: f64,
    #[serde(default)]
    pub derivative: u32,
}

fn unit() -> f64 {
    1.0
}

impl GaussianPacket {
    pub fn new(amplitude: f64, center: f64, width: f64, derivative: u32) -> Self {
        GaussianPacket { amplitude, center, width, derivative }
    }

    pub fn hat(&self, k: f64) -> C64 {
        let ik = C64::new(0.0, k);
        let phase = C64::new(-0.5 * self.width * self.width * k * k, -k * self.center);
        ik.powu(self.derivative) * phase.exp() * self.amplitude
    }

    pub fn hat_jet(&self, k0: f64, order: usize) -> Jet {
        let k = Jet::variable(k0, order);
        let i = C64::new(0.0, 1.0);
        let ik = k.scale(i);
        let arg = &(&k * &k).scale(C64::new(-0.5 * self.width * self.width, 0.0))
            - &k.scale(i * self.center);
        (&ik.powi(self.derivative) * &arg.exp()).scale(C64::new(self.amplitude, 0.0))
    }

    pub fn value(&self, x: f64) -> f64 {
        let s = self.width;
        let y = (x - self.center) / s;
        let g = (-0.5 * y * y).exp() / ((2.0 * std::f64::consts::PI).sqrt() * s);
        let d = self.derivative as i32;
        let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
        self.amplitude * g * sign * hermite_he(self.derivative, y) / s.powi(d)
    }

    /// `int x^l f dx`.
    pub fn moment(&self, l: u32) -> f64 {
        let d = self.derivative;
        if l < d {
            return 0.0;
        }
        // int x^l f^{(d)} = (-1)^d l!/(l-d)! int x^{l-d} G(x - c)
        let mut fall = 1.0;
        for q in 0..d {
            fall *= (l - q) as f64;
        }
        let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
        let r = l - d;
        let mut acc = 0.0;
        for p in 0..=r {
            if p % 2 == 1 {
                continue;
            }
            let central = double_factorial(p as i64 - 1) * self.width.powi(p as i32);
            acc += binom(r, p) * self.center.powi((r - p) as i32) * central;
        }
        self.amplitude * sign * fall * acc
    }
}

fn double_factorial(n: i64) -> f64 {
    let mut r = 1.0;
    let mut k = n;
    while k > 1 {
        r *= k as f64;
        k -= 2;
    }
    r
}

pub(crate) fn binom(n: u32, k: u32) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r *= (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Probabilists' Hermite polynomial He_n.
fn hermite_he(n: u32, y: f64) -> f64 {
    let (mut a, mut b) = (1.0, y);
    if n == 0 {
        return 1.0;
    }
    for k in 1..n {
        let c = y * b - k as f64 * a;
        a = b;
        b = c;
    }
    b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialData {
    Packets {
        #[serde(default)]
        w: Vec<GaussianPacket>,
        #[serde(default)]
        v: Vec<GaussianPacket>,
    },
    /// Physical samples on an equispaced `x` grid.
    Sampled { x: Vec<f64>, w: Vec<f64>, v: Vec<f64> },
}

impl InitialData {
    pub fn zero() -> Self {
        InitialData::Packets { w: vec![], v: vec![] }
    }

    /// A centred Gaussian in `w` and a zero-mean odd Gaussian derivative in `v`.
    pub fn gaussian(width: f64, amplitude: f64) -> Self {
        InitialData::Packets {
            w: vec![GaussianPacket::new(amplitude, 0.0, width, 0)],
            v: vec![GaussianPacket::new(amplitude, 0.0, width, 1)],
        }
    }

    pub fn w_only(p: GaussianPacket) -> Self {
        InitialData::Packets { w: vec![p], v: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            InitialData::Packets { w, v } => {
                w.iter().chain(v).all(|p| p.amplitude == 0.0)
            }
            InitialData::Sampled { w, v, .. } => w.iter().chain(v).all(|&x| x == 0.0),
        }
    }

    pub fn w_hat(&self, k: f64) -> C64 {
        match self {
            InitialData::Packets { w, .. } => w.iter().map(|p| p.hat(k)).sum(),
            InitialData::Sampled { x, w, .. } => sampled_hat(x, w, k),
        }
    }

    pub fn v_hat(&self, k: f64) -> C64 {
        match self {
            InitialData::Packets { v, .. } => v.iter().map(|p| p.hat(k)).sum(),
            InitialData::Sampled { x, v, .. } => sampled_hat(x, v, k),
        }
    }

    pub fn w_hat_jet(&self, k0: f64, order: usize) -> Jet {
        match self {
            InitialData::Packets { w, .. } => sum_jets(w.iter().map(|p| p.hat_jet(k0, order)), order),
            InitialData::Sampled { x, w, .. } => sampled_jet(x, w, k0, order),
        }
    }

    pub fn v_hat_jet(&self, k0: f64, order: usize) -> Jet {
        match self {
            InitialData::Packets { v, .. } => sum_jets(v.iter().map(|p| p.hat_jet(k0, order)), order),
            InitialData::Sampled { x, v, .. } => sampled_jet(x, v, k0, order),
        }
    }

    pub fn w_value(&self, x0: f64) -> Option<f64> {
        match self {
            InitialData::Packets { w, .. } => Some(w.iter().map(|p| p.value(x0)).sum()),
            InitialData::Sampled { .. } => None,
        }
    }

    pub fn v_value(&self, x0: f64) -> Option<f64> {
        match self {
            InitialData::Packets { v, .. } => Some(v.iter().map(|p| p.value(x0)).sum()),
            InitialData::Sampled { .. } => None,
        }
    }

    /// `int v dx`, which the reduction requires to vanish.
    pub fn v_mass(&self) -> f64 {
        self.v_hat(0.0).re
    }

    /// Loads a JSON packet description or a CSV with columns `x, w, v`.
    pub fn load(path: &Path) -> Result<Self> {
        let is_json = path.extension().map(|e| e == "json").unwrap_or(false);
        if is_json {
            let text = std::fs::read_to_string(path)?;
            let d: InitialData = serde_json::from_str(&text)?;
            return Ok(d);
        }
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let (mut x, mut w, mut v) = (vec![], vec![], vec![]);
        for rec in rdr.deserialize() {
            let (a, b, c): (f64, f64, f64) = rec?;
            x.push(a);
            w.push(b);
            v.push(c);
        }
        if x.len() < 3 {
            return Err(Error::Config(format!("{}: fewer than three samples", path.display())));
        }
        let h = x[1] - x[0];
        if !(h > 0.0) || x.windows(2).any(|p| ((p[1] - p[0]) - h).abs() > 1e-9 * h.abs().max(1.0)) {
            return Err(Error::Config(format!("{}: x must be equispaced and increasing", path.display())));
        }
        Ok(InitialData::Sampled { x, w, v })
    }
}

fn sum_jets(it: impl Iterator<Item = Jet>, order: usize) -> Jet {
    it.fold(Jet::constant(C64::new(0.0, 0.0), order), |a, b| &a + &b)
}

fn trapezoid_weight(i: usize, n: usize, h: f64) -> f64 {
    if i == 0 || i + 1 == n { 0.5 * h } else { h }
}

fn sampled_hat(x: &[f64], f: &[f64], k: f64) -> C64 {
    let h = x[1] - x[0];
    let n = x.len();
    (0..n)
        .map(|i| C64::from_polar(trapezoid_weight(i, n, h) * f[i], -k * x[i]))
        .sum()
}

fn sampled_jet(x: &[f64], f: &[f64], k0: f64, order: usize) -> Jet {
    // d^j/dk^j  int e^{-ikx} f = int (-ix)^j e^{-ikx} f
    let h = x[1] - x[0];
    let n = x.len();
    let mut c = vec![C64::new(0.0, 0.0); order + 1];
    for i in 0..n {
        let base = C64::from_polar(trapezoid_weight(i, n, h) * f[i], -k0 * x[i]);
        let mut p = C64::new(1.0, 0.0);
        for (j, cj) in c.iter_mut().enumerate() {
            *cj += base * p / crate::jet::factorial(j);
            p *= C64::new(0.0, -x[i]);
        }
    }
    Jet { c }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packet_transform_matches_quadrature() {
        let p = GaussianPacket::new(1.3, 0.4, 0.8, 2);
        let h = 0.01;
        let xs: Vec<f64> = (-1200..=1200).map(|i| i as f64 * h).collect();
        let fs: Vec<f64> = xs.iter().map(|&x| p.value(x)).collect();
        for &k in &[0.0, 0.3, -1.1, 2.0] {
            let a = p.hat(k);
            let b = sampled_hat(&xs, &fs, k);
            assert!((a - b).norm() < 1e-10, "k={k}: {a} vs {b}");
        }
        for l in 0..6 {
            let q: f64 = xs.iter().zip(&fs).map(|(x, f)| h * x.powi(l) * f).sum();
            assert!((q - p.moment(l as u32)).abs() < 1e-9, "l={l}");
        }
    }

    #[test]
    fn sampled_jet_matches_packet_jet() {
        let p = GaussianPacket::new(1.0, -0.2, 1.0, 1);
        let h = 0.01;
        let xs: Vec<f64> = (-1500..=1500).map(|i| i as f64 * h).collect();
        let fs: Vec<f64> = xs.iter().map(|&x| p.value(x)).collect();
        let a = p.hat_jet(0.2, 4);
        let b = sampled_jet(&xs, &fs, 0.2, 4);
        for j in 0..=4 {
            assert!((a.derivative(j) - b.derivative(j)).norm() < 1e-9);
        }
    }
}
