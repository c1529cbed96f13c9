use serde::{Deserialize, Serialize};

use super::table::{h_grad_a, CMTables};

/// Diagonalised coefficients on the physical clock `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// `1/(1+t)`
    pub eta: f64,
    pub t: f64,
}

impl ReducedState {
    pub fn new(a: Vec<f64>, b: Vec<f64>, t: f64) -> Self {
        assert_eq!(a.len(), b.len());
        ReducedState { a, b, eta: 1.0 / (1.0 + t), t }
    }

    /// State on the manifold: `b = h(a, eta)`.
    pub fn on_manifold(a: Vec<f64>, t: f64, nu: f64, tables: &CMTables) -> Self {
        let eta = 1.0 / (1.0 + t);
        let b = tables.h_all(&a, eta, nu);
        ReducedState { a, b, eta, t }
    }

    pub fn n(&self) -> usize {
        self.a.len() - 1
    }

    pub fn tau(&self) -> f64 {
        self.t.ln_1p()
    }

    /// `B = b - h(a, eta)`.
    pub fn off_manifold(&self, nu: f64, tables: &CMTables) -> OffManifoldState {
        let h = tables.h_all(&self.a, self.eta, nu);
        OffManifoldState { b: self.b.iter().zip(&h).map(|(b, h)| b - h).collect(), eta: self.eta, t: self.t }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDerivative {
    pub da: Vec<f64>,
    pub db: Vec<f64>,
    pub deta: f64,
}

fn below(v: &[f64], k: usize) -> f64 {
    if k >= 2 { v[k - 2] } else { 0.0 }
}

/// Right-hand side on the `t` clock:
///
/// ```text
/// a_k' = -eta (k/2 a_k + b_{k-2})
/// b_k' = -nu b_k - eta (k/2 b_k - a_{k-2}/nu^2 + 2 b_{k-2}/nu)
/// eta' = -eta^2
/// ```
///
/// Terms with negative indices are absent, which covers `k = 0, 1` for both parities.
pub fn ab_rhs(state: &ReducedState, nu: f64) -> ReducedDerivative {
    let (a, b, eta) = (&state.a, &state.b, state.eta);
    let n = a.len();
    let mut da = vec![0.0; n];
    let mut db = vec![0.0; n];
    for k in 0..n {
        let half = 0.5 * k as f64;
        da[k] = -eta * (half * a[k] + below(b, k));
        db[k] = -nu * b[k] - eta * (half * b[k] - below(a, k) / (nu * nu) + 2.0 * below(b, k) / nu);
    }
    ReducedDerivative { da, db, deta: -eta * eta }
}

/// The projected system on the scaling clock `tau`:
///
/// ```text
/// alpha_k' = -k/2 alpha_k - (alpha_{k-2}/nu + beta_{k-2})
/// beta_k'  = -k/2 beta_k - beta_{k-2}/nu - e^tau (nu beta_k + alpha_k)
/// ```
pub fn alphabeta_rhs(tau: f64, alpha: &[f64], beta: &[f64], nu: f64) -> (Vec<f64>, Vec<f64>) {
    let n = alpha.len();
    let e = tau.exp();
    let mut da = vec![0.0; n];
    let mut db = vec![0.0; n];
    for k in 0..n {
        let half = 0.5 * k as f64;
        da[k] = -half * alpha[k] - (below(alpha, k) / nu + below(beta, k));
        db[k] = -half * beta[k] - below(beta, k) / nu - e * (nu * beta[k] + alpha[k]);
    }
    (da, db)
}

/// `(a, b) = (alpha, alpha/nu + beta)`.
pub fn to_diagonal(alpha: &[f64], beta: &[f64], nu: f64) -> (Vec<f64>, Vec<f64>) {
    (alpha.to_vec(), alpha.iter().zip(beta).map(|(a, b)| a / nu + b).collect())
}

pub fn from_diagonal(a: &[f64], b: &[f64], nu: f64) -> (Vec<f64>, Vec<f64>) {
    (a.to_vec(), a.iter().zip(b).map(|(a, b)| b - a / nu).collect())
}

/// Distance `B = b - h(a, eta)` from the manifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffManifoldState {
    pub b: Vec<f64>,
    pub eta: f64,
    pub t: f64,
}

/// Linear, upper-triangular dynamics of `B`; it does not involve `a`:
///
/// ```text
/// B_k' = -(nu + eta k/2) B_k - (2 eta/nu) B_{k-2} + eta sum_l dh_k/da_l B_{l-2}
/// ```
pub fn off_manifold_rhs(state: &OffManifoldState, nu: f64, tables: &CMTables) -> Vec<f64> {
    let (b, eta) = (&state.b, state.eta);
    let n = b.len();
    let mut db = vec![0.0; n];
    for k in 0..n {
        let mut s = -(nu + 0.5 * eta * k as f64) * b[k] - 2.0 * eta / nu * below(b, k);
        let table = tables.for_index(k);
        let mut l = k % 2 + 2;
        while l < k {
            s += eta * h_grad_a(table, k, l, eta, nu) * b[l - 2];
            l += 2;
        }
        db[k] = s;
    }
    db
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_examples() {
        let nu = 0.5;
        let s = ReducedState { a: vec![1.0, 2.0, 3.0], b: vec![0.4, 0.5, 0.6], eta: 0.0, t: f64::INFINITY };
        let d = ab_rhs(&s, nu);
        assert!(d.da.iter().all(|&x| x == 0.0));
        for k in 0..3 {
            assert_eq!(d.db[k], -nu * s.b[k]);
        }
        let s = ReducedState { eta: 0.3, ..s };
        let d = ab_rhs(&s, nu);
        let expect = -nu * 0.6 - 0.3 * (0.6 - 1.0 / (nu * nu) + 2.0 * 0.4 / nu);
        assert!((d.db[2] - expect).abs() < 1e-14);
        assert!((d.da[1] + 0.15 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn alphabeta_examples() {
        let (da, db) = alphabeta_rhs(0.0, &[0.0, 1.0, 0.0], &[0.0; 3], 0.5);
        assert_eq!(da[0], 0.0);
        assert!((da[1] + 0.5).abs() < 1e-15);
        assert!((db[1] + 1.0).abs() < 1e-15);
        let (_, db) = alphabeta_rhs(0.7, &[2.0, 0.0], &[0.3, 0.0], 0.5);
        assert!((db[0] + 0.7f64.exp() * (0.5 * 0.3 + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn off_manifold_examples() {
        let tables = CMTables::new(6);
        let z = OffManifoldState { b: vec![0.0; 7], eta: 0.2, t: 4.0 };
        assert!(off_manifold_rhs(&z, 0.5, &tables).iter().all(|&x| x == 0.0));
        let s = OffManifoldState { b: vec![1.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0], eta: 0.0, t: f64::INFINITY };
        let d = off_manifold_rhs(&s, 0.5, &tables);
        assert_eq!(d[0], -0.5);
        assert_eq!(d[2], -1.0);
    }
}
