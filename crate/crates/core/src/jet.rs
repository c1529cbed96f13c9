//! Truncated Taylor series ("jets") with complex coefficients.
//!
//! A jet of order `n` about `k0` stores `c[j] = f^{(j)}(k0) / j!` for
//! `j <= n`; arithmetic propagates these coefficients exactly, which gives
//! analytic derivatives of closed-form expressions without symbolic algebra.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub c: Vec<C64>,
}

impl Jet {
    pub fn constant(v: C64, order: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); order + 1];
        c[0] = v;
        Jet { c }
    }

    /// The independent variable about `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut j = Jet::constant(C64::new(x0, 0.0), order);
        if order >= 1 {
            j.c[1] = C64::new(1.0, 0.0);
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    /// `d^j f / dk^j` at the expansion point.
    pub fn derivative(&self, j: usize) -> C64 {
        self.c[j] * factorial(j)
    }

    pub fn derivatives(&self) -> Vec<C64> {
        (0..self.c.len()).map(|j| self.derivative(j)).collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        Jet { c: self.c.iter().map(|x| x * s).collect() }
    }

    pub fn add_const(&self, s: C64) -> Self {
        let mut r = self.clone();
        r.c[0] += s;
        r
    }

    pub fn recip(&self) -> Self {
        Jet::constant(C64::new(1.0, 0.0), self.order()).div(self)
    }

    pub fn div(&self, d: &Jet) -> Self {
        let n = self.c.len().min(d.c.len());
        let mut b = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut s = self.c[i];
            for k in 1..=i {
                s -= d.c[k] * b[i - k];
            }
            b[i] = s / d.c[0];
        }
        Jet { c: b }
    }

    pub fn exp(&self) -> Self {
        let n = self.c.len();
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[0] = self.c[0].exp();
        for i in 1..n {
            let mut s = C64::new(0.0, 0.0);
            for k in 1..=i {
                s += self.c[k] * e[i - k] * k as f64;
            }
            e[i] = s / i as f64;
        }
        Jet { c: e }
    }

    /// Square root with the given value of the root at the expansion point,
    /// so callers control the branch.
    pub fn sqrt_with_root(&self, root: C64) -> Self {
        let n = self.c.len();
        let mut s = vec![C64::new(0.0, 0.0); n];
        s[0] = root;
        for i in 1..n {
            let mut acc = self.c[i];
            for k in 1..i {
                acc -= s[k] * s[i - k];
            }
            s[i] = acc / (root * 2.0);
        }
        Jet { c: s }
    }

    pub fn sqrt(&self) -> Self {
        self.sqrt_with_root(self.c[0].sqrt())
    }

    pub fn powi(&self, p: u32) -> Self {
        let mut r = Jet::constant(C64::new(1.0, 0.0), self.order());
        for _ in 0..p {
            r = &r * self;
        }
        r
    }

    /// `sum_n coeffs[n] x^n` by Horner's rule.
    pub fn polynomial(x: &Jet, coeffs: &[C64]) -> Jet {
        let mut r = Jet::constant(C64::new(0.0, 0.0), x.order());
        for &a in coeffs.iter().rev() {
            r = (&r * x).add_const(a);
        }
        r
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        let mut c = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..=i {
                c[i] += self.c[j] * o.c[i - j];
            }
        }
        Jet { c }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { c: self.c.iter().map(|a| -a).collect() }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        &self + &o
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        &self - &o
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn exp_of_square() {
        // d^2/dk^2 exp(-k^2) at 0 = -2, d^4 = 12.
        let k = Jet::variable(0.0, 6);
        let e = (&k * &k).scale(C64::new(-1.0, 0.0)).exp();
        assert!(close(e.derivative(2), C64::new(-2.0, 0.0), 1e-14));
        assert!(close(e.derivative(4), C64::new(12.0, 0.0), 1e-14));
        assert!(close(e.derivative(6), C64::new(-120.0, 0.0), 1e-14));
    }

    #[test]
    fn sqrt_and_div_away_from_zero() {
        // f = sqrt(1 + k) / (2 + k) at k0 = 0.3
        let k = Jet::variable(0.3, 3);
        let f = k.add_const(C64::new(1.0, 0.0)).sqrt().div(&k.add_const(C64::new(2.0, 0.0)));
        let g = |x: f64| (1.0 + x).sqrt() / (2.0 + x);
        let h = 1e-3;
        let fd1 = (g(0.3 + h) - g(0.3 - h)) / (2.0 * h);
        assert!((f.value().re - g(0.3)).abs() < 1e-15);
        assert!((f.derivative(1).re - fd1).abs() < 1e-6);
    }
}
