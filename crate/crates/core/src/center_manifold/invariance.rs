use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::table::{CMCoeffTable, Parity};

/// Exact polynomial that is linear in `a`: terms `coef * a_p * eta^e * nu^q`
/// keyed by `(p, e, q)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearPoly {
    pub terms: BTreeMap<(usize, u32, i32), BigRational>,
}

impl LinearPoly {
    pub fn monomial(p: usize, eta: u32, nu: i32, c: BigRational) -> Self {
        let mut r = LinearPoly::default();
        r.add_term(p, eta, nu, c);
        r
    }

    fn add_term(&mut self, p: usize, eta: u32, nu: i32, c: BigRational) {
        let e = self.terms.entry((p, eta, nu)).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(p, eta, nu));
        }
    }

    pub fn add(&mut self, other: &LinearPoly) {
        for (&(p, e, q), c) in &other.terms {
            self.add_term(p, e, q, c.clone());
        }
    }

    /// `c eta^de nu^dq * self`
    pub fn shifted(&self, c: &BigRational, de: u32, dq: i32) -> LinearPoly {
        let mut r = LinearPoly::default();
        for (&(p, e, q), x) in &self.terms {
            r.add_term(p, e + de, q + dq, x * c);
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `h_k(a, eta)` as an exact polynomial; zero below the parity floor.
pub fn h_poly(table: &CMCoeffTable, k: usize) -> LinearPoly {
    let mut r = LinearPoly::default();
    for (kk, p, c) in table.entries() {
        if kk == k {
            r.add_term(p, ((k - p) / 2) as u32, CMCoeffTable::nu_exponent(k, p), c.clone());
        }
    }
    r
}

/// `d/dt h_k - (b_k' evaluated at b = h)` along the diagonalised system
///
/// ```text
/// a_p' = -eta (p/2 a_p + h_{p-2}),   eta' = -eta^2,
/// b_k' = -nu b_k - eta (k/2 b_k - a_{k-2}/nu^2 + 2 b_{k-2}/nu).
/// ```
///
/// Vanishes identically when the table solves the invariance equation.
pub fn invariance_residual(table: &CMCoeffTable, k: usize) -> LinearPoly {
    assert_eq!(Parity::of(k), table.parity);
    let h = |j: usize| h_poly(table, j);
    let hk = h(k);
    let mut lhs = LinearPoly::default();
    for (&(p, e, q), c) in &hk.terms {
        // d/da_p of the term, times a_p'.
        let da = LinearPoly::monomial(p, 1, 0, rat(-(p as i64), 2));
        lhs.add(&da.shifted(c, e, q));
        if p >= 2 {
            lhs.add(&h(p - 2).shifted(&(-c.clone()), e + 1, q));
        }
        // d/deta of the term, times -eta^2.
        if e > 0 {
            lhs.add(&LinearPoly::monomial(p, e + 1, q, -(c * rat(e as i64, 1))));
        }
    }
    let mut rhs = hk.shifted(&-BigRational::one(), 0, 1);
    rhs.add(&hk.shifted(&rat(-(k as i64), 2), 1, 0));
    if k >= 2 {
        rhs.add(&LinearPoly::monomial(k - 2, 1, -2, BigRational::one()));
        rhs.add(&h(k - 2).shifted(&rat(-2, 1), 1, -1));
    }
    lhs.add(&rhs.shifted(&-BigRational::one(), 0, 0));
    lhs
}

#[cfg(test)]
mod tests {
    use super::super::table::{build_even_table, build_odd_table};
    use super::*;

    #[test]
    fn tables_are_invariant() {
        let even = build_even_table(10);
        let odd = build_odd_table(9);
        for k in (0..=10).step_by(2) {
            assert!(invariance_residual(&even, k).is_zero(), "even k={k}");
        }
        for k in (1..=9).step_by(2) {
            assert!(invariance_residual(&odd, k).is_zero(), "odd k={k}");
        }
    }

    #[test]
    fn missing_entries_are_detected() {
        // A table built only to 4 has no h_6, leaving a_4 eta/nu^2 unbalanced.
        let r = invariance_residual(&build_even_table(4), 6);
        assert_eq!(r.terms.get(&(4, 1, -2)), Some(&-BigRational::one()));
    }
}
