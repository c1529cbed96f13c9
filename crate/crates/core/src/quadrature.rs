//! Quadrature grids on a finite window `[-L, L]` and sampled functions on them.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Smallest half-width `L` with `(1+L^2)^m exp(-L^2/(4 nu_T)) < tol`.
pub fn tail_half_width(m: u32, nu_t: f64, tol: f64) -> f64 {
    let g = |l: f64| m as f64 * (1.0 + l * l).ln() - l * l / (4.0 * nu_t);
    let target = tol.ln();
    // g is eventually decreasing; march outward past its maximum, then bisect.
    let mut hi = (4.0 * nu_t).sqrt();
    while g(hi) >= target || g(hi * 1.01) > g(hi) {
        hi *= 1.5;
    }
    let mut lo = hi / 1.5;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridKind {
    /// Composite Gauss-Legendre: `panels` equal panels of `order` nodes each.
    GaussLegendre { panels: usize, order: usize },
    /// Equispaced nodes including both endpoints; trapezoid weights.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub kind: GridKind,
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Grid {
    pub fn gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> Result<Self> {
        if !(b > a) || panels == 0 || order == 0 {
            return Err(Error::InvalidParameter(format!(
                "bad Gauss-Legendre grid [{a}, {b}] with {panels} panels of order {order}"
            )));
        }
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let c = a + (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(c + 0.5 * h * xi);
                weights.push(0.5 * h * wi);
            }
        }
        Ok(Grid { kind: GridKind::GaussLegendre { panels, order }, a, b, nodes, weights })
    }

    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(b > a) || n < 3 {
            return Err(Error::InvalidParameter(format!("bad uniform grid [{a}, {b}] with {n} points")));
        }
        let h = (b - a) / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|i| a + i as f64 * h).collect();
        let mut weights = vec![h; n];
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
        Ok(Grid { kind: GridKind::Uniform, a, b, nodes, weights })
    }

    /// Symmetric Gauss-Legendre grid wide enough for an `L^2(m)` tail of `tol`
    /// on functions with Gaussian decay at diffusivity `nu_t`.
    pub fn for_weight(m: u32, nu_t: f64, tol: f64, order: usize) -> Result<Self> {
        let l = tail_half_width(m, nu_t, tol);
        // Keep panels well below the Gaussian length scale sqrt(nu_t).
        let panels = ((2.0 * l / (0.5 * nu_t.sqrt())).ceil() as usize).max(8);
        Grid::gauss_legendre(-l, l, panels, order)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    /// Node spacing of a uniform grid.
    pub fn spacing(&self) -> Option<f64> {
        match self.kind {
            GridKind::Uniform => Some(self.nodes[1] - self.nodes[0]),
            _ => None,
        }
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        self.weights.iter().zip(values).map(|(w, f)| w * f).sum()
    }

    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, w)| w * f(x)).sum()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    /// `U(x_i) = int_a^{x_i} f`.
    pub fn cumulative(&self, values: &[f64]) -> Vec<f64> {
        match self.kind {
            GridKind::Uniform => cumulative_uniform(&self.nodes, values),
            GridKind::GaussLegendre { panels, order } => {
                let q = panel_integration_matrix(order);
                let h = (self.b - self.a) / panels as f64;
                let mut out = vec![0.0; self.len()];
                let mut base = 0.0;
                for p in 0..panels {
                    let f = &values[p * order..(p + 1) * order];
                    for j in 0..order {
                        let s: f64 = q[j].iter().zip(f).map(|(a, b)| a * b).sum();
                        out[p * order + j] = base + 0.5 * h * s;
                    }
                    let w = &self.weights[p * order..(p + 1) * order];
                    base += w.iter().zip(f).map(|(a, b)| a * b).sum::<f64>();
                }
                out
            }
        }
    }

    /// First and second derivatives of sampled data.
    ///
    /// Uniform grids use fourth-order finite differences; Gauss-Legendre
    /// grids differentiate the interpolant on each panel.
    pub fn derivatives(&self, values: &[f64]) -> (Vec<f64>, Vec<f64>) {
        match self.kind {
            GridKind::Uniform => {
                let h = self.spacing().unwrap();
                (
                    finite_difference(values, h, 1, 4),
                    finite_difference(values, h, 2, 4),
                )
            }
            GridKind::GaussLegendre { panels, order } => {
                let (x, _) = gauss_legendre(order);
                let d = differentiation_matrix(&x);
                let h = (self.b - self.a) / panels as f64;
                let s = 2.0 / h;
                let mut d1 = vec![0.0; self.len()];
                let mut d2 = vec![0.0; self.len()];
                for p in 0..panels {
                    let r = p * order..(p + 1) * order;
                    let f = &values[r.clone()];
                    let g: Vec<f64> = d.iter().map(|row| s * dot(row, f)).collect();
                    for j in 0..order {
                        d1[p * order + j] = g[j];
                        d2[p * order + j] = s * dot(&d[j], &g);
                    }
                }
                (d1, d2)
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            1.0 / (0..x.len()).filter(|&j| j != i).map(|j| x[i] - x[j]).product::<f64>()
        })
        .collect()
}

fn differentiation_matrix(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let w = barycentric_weights(x);
    let mut d = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut diag = 0.0;
        for i in 0..n {
            if i != j {
                d[j][i] = (w[i] / w[j]) / (x[j] - x[i]);
                diag -= d[j][i];
            }
        }
        d[j][j] = diag;
    }
    d
}

/// `Q[j][i] = int_{-1}^{x_j} l_i(s) ds` for the Lagrange basis on GL nodes.
fn panel_integration_matrix(order: usize) -> Vec<Vec<f64>> {
    let (x, _) = gauss_legendre(order);
    let (gx, gw) = gauss_legendre(order);
    let lagrange = |i: usize, s: f64| -> f64 {
        let mut num = 1.0;
        for (j, xj) in x.iter().enumerate() {
            if j != i {
                num *= (s - xj) / (x[i] - xj);
            }
        }
        num
    };
    let mut q = vec![vec![0.0; order]; order];
    for j in 0..order {
        let half = 0.5 * (x[j] + 1.0);
        for i in 0..order {
            q[j][i] = gx
                .iter()
                .zip(&gw)
                .map(|(g, w)| w * half * lagrange(i, -1.0 + half * (g + 1.0)))
                .sum();
        }
    }
    q
}

fn cumulative_uniform(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let h = x[1] - x[0];
    let mut out = vec![0.0; n];
    for i in 0..n - 1 {
        // Cubic interpolation through four neighbours, shifted at the ends.
        let piece = if n < 4 {
            0.5 * h * (f[i] + f[i + 1])
        } else if i == 0 {
            h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
        } else if i == n - 2 {
            h / 24.0 * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4])
        } else {
            h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2])
        };
        out[i + 1] = out[i] + piece;
    }
    out
}

/// Finite-difference weights (Fornberg) for the `deriv`-th derivative at `x0`
/// from the stencil points `xs`.
pub fn fornberg_weights(x0: f64, xs: &[f64], deriv: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; deriv + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(deriv);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[deriv]).collect()
}

/// Stencil size for a `deriv`-th derivative of accuracy `accuracy` (even).
pub fn stencil_size(deriv: usize, accuracy: usize) -> usize {
    2 * ((deriv + 1) / 2) - 1 + accuracy
}

/// Generic finite-difference derivative on equispaced samples; one-sided
/// stencils of the same size are used near the ends.
pub fn finite_difference<T>(values: &[T], h: f64, deriv: usize, accuracy: usize) -> Vec<T>
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + Default,
{
    let n = values.len();
    let size = stencil_size(deriv, accuracy).min(n);
    let half = size / 2;
    let mut cache: std::collections::HashMap<usize, Vec<f64>> = Default::default();
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(half).min(n - size);
            let offset = i - start;
            let w = cache.entry(offset).or_insert_with(|| {
                let xs: Vec<f64> = (0..size).map(|s| s as f64).collect();
                fornberg_weights(offset as f64, &xs, deriv)
                    .into_iter()
                    .map(|c| c / h.powi(deriv as i32))
                    .collect()
            });
            let mut acc = T::default();
            for (s, c) in w.iter().enumerate() {
                acc = acc + values[start + s] * *c;
            }
            acc
        })
        .collect()
}

/// Real samples on a shared grid, tagged with the weight exponent `m`.
#[derive(Debug, Clone)]
pub struct WeightedFunction {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
    pub m: u32,
}

impl WeightedFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>, m: u32) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "{} samples on a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(WeightedFunction { grid, values, m })
    }

    pub fn from_fn(grid: Arc<Grid>, m: u32, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.sample(f);
        WeightedFunction { grid, values, m }
    }

    pub fn zeros_like(&self) -> Self {
        WeightedFunction { grid: self.grid.clone(), values: vec![0.0; self.values.len()], m: self.m }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.grid.nodes
    }

    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    /// `int xi^l f(xi) d xi`.
    pub fn moment(&self, l: u32) -> f64 {
        self.grid
            .nodes
            .iter()
            .zip(&self.values)
            .zip(&self.grid.weights)
            .map(|((x, f), w)| w * x.powi(l as i32) * f)
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.grid.integrate_fn_values(&self.values, |_, f| f * f).sqrt()
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self.grid.nodes.iter().zip(&self.values).map(|(&x, &v)| f(x, v)).collect();
        WeightedFunction { grid: self.grid.clone(), values, m: self.m }
    }

    pub fn sub(&self, other: &WeightedFunction) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        WeightedFunction { grid: self.grid.clone(), values, m: self.m }
    }
}

impl Grid {
    pub(crate) fn integrate_fn_values(&self, values: &[f64], g: impl Fn(f64, f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(values)
            .zip(&self.weights)
            .map(|((&x, &f), w)| w * g(x, f))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for d in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(d as i32)).sum();
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} d={d}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn tail_width_meets_bound() {
        for &(m, nt) in &[(0u32, 2.5f64), (5, 2.5), (10, 5.2), (3, 2.0)] {
            let l = tail_half_width(m, nt, 1e-14);
            let g = (1.0 + l * l).powi(m as i32) * (-l * l / (4.0 * nt)).exp();
            assert!(g < 1e-14 && g > 1e-15, "m={m}: {g}");
        }
    }

    #[test]
    fn cumulative_and_derivatives() {
        let gl = Grid::gauss_legendre(-8.0, 8.0, 16, 12).unwrap();
        let un = Grid::uniform(-8.0, 8.0, 1601).unwrap();
        for g in [&gl, &un] {
            let f = g.sample(|x| (-x * x).exp());
            let c = g.cumulative(&f);
            let last = *c.last().unwrap();
            assert!((last - PI.sqrt()).abs() < 1e-9, "{last}");
            let (d1, d2) = g.derivatives(&f);
            for (i, &x) in g.nodes.iter().enumerate() {
                let e1 = -2.0 * x * (-x * x).exp();
                let e2 = (4.0 * x * x - 2.0) * (-x * x).exp();
                assert!((d1[i] - e1).abs() < 1e-7, "{x}");
                assert!((d2[i] - e2).abs() < 1e-5, "{x}");
            }
        }
    }

    #[test]
    fn fornberg_central_second_derivative() {
        let w = fornberg_weights(2.0, &[0.0, 1.0, 2.0, 3.0, 4.0], 2);
        let expect = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
