use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(k: usize) -> Self {
        if k % 2 == 0 { Parity::Even } else { Parity::Odd }
    }

    pub fn floor(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    /// Indices `k <= n` of this parity.
    pub fn indices(self, n: usize) -> impl Iterator<Item = usize> {
        (self.floor()..=n).step_by(2)
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => Err(Error::InvalidParameter(format!("parity must be even or odd, got {s}"))),
        }
    }
}

/// Exact coefficients `c(k, p)` with `H(k, p) = c(k, p) nu^{-(k-p)-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CMCoeffTable {
    pub parity: Parity,
    pub n: usize,
    coeffs: BTreeMap<(usize, usize), BigRational>,
}

impl CMCoeffTable {
    pub fn get(&self, k: usize, p: usize) -> Option<&BigRational> {
        self.coeffs.get(&(k, p))
    }

    /// `c(k, p)`, zero where the table has no entry.
    pub fn c(&self, k: usize, p: usize) -> BigRational {
        self.get(k, p).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn nu_exponent(k: usize, p: usize) -> i32 {
        -((k - p) as i32) - 1
    }

    /// `H(k, p)` at the given `nu`.
    pub fn value(&self, k: usize, p: usize, nu: f64) -> f64 {
        self.get(k, p)
            .map(|c| c.to_f64().unwrap() * nu.powi(Self::nu_exponent(k, p)))
            .unwrap_or(0.0)
    }

    /// `(k, p, c(k,p))` in increasing order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &BigRational)> {
        self.coeffs.iter().map(|(&(k, p), c)| (k, p, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Solves the invariance equation
///
/// ```text
/// nu h_k = eta a_{k-2}/nu^2 - (2 eta/nu) h_{k-2} + sum_l H(k, k-2l) eta^{l+1} h_{k-2l-2}
/// ```
///
/// order by order in `eta`. With the `nu` scaling factored out this is
/// `c(k,k-2) = 1` and, for depth `p >= 2`,
/// `c(k,k-2p) = -2 c(k-2,k-2p) + sum_{l=1}^{p-2} c(k,k-2l) c(k-2l-2,k-2p)`.
pub fn build_table(parity: Parity, n: usize) -> CMCoeffTable {
    let mut coeffs: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
    let two = BigRational::from_integer(BigInt::from(2));
    let floor = parity.floor();
    // h_0 and h_1 vanish identically.
    for k in parity.indices(n).filter(|&k| k >= floor + 2) {
        coeffs.insert((k, k - 2), BigRational::one());
        for p in 2..=(k - floor) / 2 {
            let target = k - 2 * p;
            let mut c = -(&two * coeffs.get(&(k - 2, target)).cloned().unwrap_or_else(BigRational::zero));
            for l in 1..=p.saturating_sub(2) {
                let outer = coeffs.get(&(k, k - 2 * l));
                let inner = coeffs.get(&(k - 2 * l - 2, target));
                if let (Some(x), Some(y)) = (outer, inner) {
                    c += x * y;
                }
            }
            coeffs.insert((k, target), c);
        }
    }
    CMCoeffTable { parity, n, coeffs }
}

pub fn build_even_table(n: usize) -> CMCoeffTable {
    build_table(Parity::Even, n)
}

pub fn build_odd_table(n: usize) -> CMCoeffTable {
    build_table(Parity::Odd, n)
}

/// `h_k(a, eta)`; `a` is indexed by mode number and must cover every
/// `k - 2l` down to the parity floor.
pub fn h_eval(table: &CMCoeffTable, k: usize, a: &[f64], eta: f64, nu: f64) -> Result<f64> {
    if k > table.n {
        return Err(Error::IndexOutOfRange { index: k, max: table.n });
    }
    if Parity::of(k) != table.parity {
        return Err(Error::InvalidParameter(format!("index {k} has the wrong parity for this table")));
    }
    let mut sum = 0.0;
    let mut l = 1;
    while 2 * l <= k {
        let p = k - 2 * l;
        if let Some(c) = table.get(k, p) {
            let ap = *a.get(p).ok_or(Error::MissingIndex(p))?;
            sum += c.to_f64().unwrap() * nu.powi(CMCoeffTable::nu_exponent(k, p)) * eta.powi(l as i32) * ap;
        }
        l += 1;
    }
    Ok(sum)
}

/// `d h_k / d a_p = H(k, p) eta^{(k-p)/2}`.
pub fn h_grad_a(table: &CMCoeffTable, k: usize, p: usize, eta: f64, nu: f64) -> f64 {
    if p >= k {
        return 0.0;
    }
    table.value(k, p, nu) * eta.powi(((k - p) / 2) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn catalan_pattern() {
        let t = build_even_table(12);
        assert_eq!(t.c(2, 0), int(1));
        assert_eq!(t.c(4, 0), int(-2));
        assert_eq!(t.c(6, 0), int(5));
        assert_eq!(t.c(8, 0), int(-14));
        assert_eq!(t.c(10, 0), int(42));
        for k in (2..=12).step_by(2) {
            assert_eq!(t.c(k, k - 2), int(1));
        }
        let o = build_odd_table(9);
        assert!(o.get(1, 0).is_none());
        assert_eq!(o.c(3, 1), int(1));
        assert_eq!(o.c(5, 1), int(-2));
    }

    #[test]
    fn evaluation_examples() {
        let e = build_even_table(6);
        assert_eq!(h_eval(&e, 0, &[1.0], 0.3, 0.5).unwrap(), 0.0);
        let nu: f64 = 0.7;
        assert!((h_eval(&e, 2, &[1.0], nu.powi(3), nu).unwrap() - 1.0).abs() < 1e-14);
        let v = h_eval(&e, 4, &[1.0, 0.0, 1.0], 0.1, 0.5).unwrap();
        assert!((v - 0.16).abs() < 1e-14);
        assert!(matches!(h_eval(&e, 4, &[1.0], 0.1, 0.5), Err(Error::MissingIndex(2))));
        let o = build_odd_table(5);
        assert_eq!(h_eval(&o, 1, &[0.0, 3.0], 0.4, 0.5).unwrap(), 0.0);
    }
}

/// Both parity tables up to the same index.
#[derive(Debug, Clone, PartialEq)]
pub struct CMTables {
    pub even: CMCoeffTable,
    pub odd: CMCoeffTable,
}

impl CMTables {
    pub fn new(n: usize) -> Self {
        CMTables { even: build_even_table(n), odd: build_odd_table(n.max(1)) }
    }

    pub fn n(&self) -> usize {
        self.even.n
    }

    pub fn for_index(&self, k: usize) -> &CMCoeffTable {
        match Parity::of(k) {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    pub fn h(&self, k: usize, a: &[f64], eta: f64, nu: f64) -> Result<f64> {
        h_eval(self.for_index(k), k, a, eta, nu)
    }

    /// `h(a, eta)` for every index `k < a.len()`.
    pub fn h_all(&self, a: &[f64], eta: f64, nu: f64) -> Vec<f64> {
        (0..a.len()).map(|k| self.h(k, a, eta, nu).expect("complete coefficient vector")).collect()
    }
}
