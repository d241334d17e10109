//! Truncated Taylor series at a point, used to differentiate base functions
//! and test functions exactly up to rounding.

use num_complex::Complex64;

use crate::exactalg::scalar::to_f64;
use crate::exactalg::{DiffOp, RatFn, UniPoly};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coefficients `c[k]` of `f(x0 + h) = sum c[k] h^k`, truncated at a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub c: Vec<Complex64>,
}

impl Jet {
    pub fn constant(a: Complex64, order: usize) -> Self {
        let mut c = vec![ZERO; order + 1];
        c[0] = a;
        Jet { c }
    }

    /// The coordinate `x0 + h`.
    pub fn variable(x0: Complex64, order: usize) -> Self {
        let mut j = Jet::constant(x0, order);
        if order > 0 {
            j.c[1] = ONE;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Jet { c: self.c[..=order.min(self.order())].to_vec() }
    }

    /// Derivative values `f^(k)(x0) = k! c[k]`.
    pub fn derivatives(&self) -> Vec<Complex64> {
        let mut fact = 1.0;
        self.c
            .iter()
            .enumerate()
            .map(|(k, v)| {
                if k > 0 {
                    fact *= k as f64;
                }
                v * fact
            })
            .collect()
    }

    /// Jet of `f^(k)`, `k` orders shorter.
    pub fn differentiate(&self, k: usize) -> Self {
        let n = self.order();
        assert!(k <= n, "jet too short for derivative");
        let c = (0..=n - k)
            .map(|j| {
                let falling: f64 = ((j + 1)..=(j + k)).map(|t| t as f64).product();
                self.c[j + k] * falling
            })
            .collect();
        Jet { c }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Jet { c: self.c.iter().map(|v| v * a).collect() }
    }

    pub fn add(&self, o: &Jet) -> Self {
        let n = self.order().min(o.order());
        Jet { c: (0..=n).map(|k| self.c[k] + o.c[k]).collect() }
    }

    pub fn sub(&self, o: &Jet) -> Self {
        let n = self.order().min(o.order());
        Jet { c: (0..=n).map(|k| self.c[k] - o.c[k]).collect() }
    }

    pub fn mul(&self, o: &Jet) -> Self {
        let n = self.order().min(o.order());
        let c = (0..=n).map(|k| (0..=k).map(|j| self.c[j] * o.c[k - j]).sum()).collect();
        Jet { c }
    }

    /// `self / o`; requires `o(x0) != 0`.
    pub fn div(&self, o: &Jet) -> Self {
        let n = self.order().min(o.order());
        let mut c: Vec<Complex64> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut s = self.c[k];
            for j in 1..=k {
                s -= o.c[j] * c[k - j];
            }
            c.push(s / o.c[0]);
        }
        Jet { c }
    }

    pub fn exp(&self) -> Self {
        // h e' = h a' e, coefficientwise
        let n = self.order();
        let mut c = vec![ZERO; n + 1];
        c[0] = self.c[0].exp();
        for k in 1..=n {
            let s: Complex64 = (1..=k).map(|j| self.c[j] * c[k - j] * j as f64).sum();
            c[k] = s / k as f64;
        }
        Jet { c }
    }

    pub fn powi(&self, e: usize) -> Self {
        let mut out = Jet::constant(ONE, self.order());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Jet of the polynomial `p` at `x0`.
    pub fn poly(p: &UniPoly, x0: Complex64, order: usize) -> Self {
        let x = Jet::variable(x0, order);
        let mut acc = Jet::constant(ZERO, order);
        for a in p.coeffs().iter().rev() {
            acc = acc.mul(&x);
            acc.c[0] += Complex64::new(to_f64(a), 0.0);
        }
        acc
    }

    pub fn ratfn(r: &RatFn, x0: Complex64, order: usize) -> Self {
        let num = Jet::poly(r.num(), x0, order);
        if r.den().is_one() {
            num
        } else {
            num.div(&Jet::poly(r.den(), x0, order))
        }
    }
}

/// A differential operator with its coefficients expanded at one point.
#[derive(Clone, Debug)]
pub struct OpAtPoint {
    coeffs: Vec<Jet>,
    order: usize,
}

impl OpAtPoint {
    /// Expands `op` at `x0` for inputs of jet order up to `input_order`.
    pub fn new(op: &DiffOp, x0: Complex64, input_order: usize) -> Self {
        let order = op.order().unwrap_or(0);
        let out = input_order.saturating_sub(order);
        let coeffs = op.coeffs().iter().map(|c| Jet::ratfn(c, x0, out)).collect();
        OpAtPoint { coeffs, order }
    }

    pub fn op_order(&self) -> usize {
        self.order
    }

    /// Jet of `op f`, of order `f.order() - ord(op)`.
    pub fn apply(&self, f: &Jet) -> Jet {
        let n = f.order() - self.order;
        let mut acc = Jet::constant(ZERO, n);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.c.iter().all(|v| *v == ZERO) {
                continue;
            }
            acc = acc.add(&c.truncate(n).mul(&f.differentiate(k).truncate(n)));
        }
        acc
    }

    /// The value `(op f)(x0)`.
    pub fn apply_value(&self, f: &Jet) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let falling: f64 = (1..=k).map(|t| t as f64).product();
                c.c[0] * f.c[k] * falling
            })
            .sum()
    }
}

/// Taylor coefficients at `x0` of the solution of `y'' = q y` with
/// `y(x0) = y0`, `y'(x0) = y1`, given the jet of `q`.
pub fn ode_jet(q: &Jet, y0: Complex64, y1: Complex64, order: usize) -> Jet {
    let mut c = vec![ZERO; order + 1];
    c[0] = y0;
    if order > 0 {
        c[1] = y1;
    }
    for k in 0..order.saturating_sub(1) {
        let s: Complex64 = (0..=k.min(q.order())).map(|j| q.c[j] * c[k - j]).sum();
        c[k + 2] = s / ((k + 1) * (k + 2)) as f64;
    }
    Jet { c }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{parse_diffop, Var};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn exp_and_division() {
        let x0 = Complex64::new(0.3, -0.2);
        let e = Jet::variable(x0, 8).exp();
        for (k, d) in e.derivatives().iter().enumerate() {
            assert!(close(*d, x0.exp(), 1e-14), "k = {k}");
        }
        let x = Jet::variable(x0, 6);
        let inv = Jet::constant(ONE, 6).div(&x);
        let back = inv.mul(&x);
        assert!(close(back.c[0], ONE, 1e-15));
        assert!(back.c[1..].iter().all(|v| v.norm() < 1e-13));
    }

    #[test]
    fn operator_application() {
        // (x^2 D^2 + 1/x) applied to x^3 gives 6x^3 + x^2
        let op = parse_diffop("(x^2) * Dx^2 + (1)/(x)", Var::X).unwrap();
        let x0 = Complex64::new(1.5, 0.5);
        let f = Jet::variable(x0, 5).powi(3);
        let at = OpAtPoint::new(&op, x0, 5);
        let out = at.apply(&f);
        assert_eq!(out.order(), 3);
        let want = 6.0 * x0.powi(3) + x0.powi(2);
        assert!(close(out.value(), want, 1e-14));
        assert!(close(at.apply_value(&f), want, 1e-14));
        assert!(close(out.c[1], 18.0 * x0.powi(2) + 2.0 * x0, 1e-13));
    }

    #[test]
    fn ode_recurrence_reproduces_exponential() {
        // y'' = 4 y, y = exp(2x)
        let x0 = Complex64::new(0.1, 0.0);
        let q = Jet::constant(Complex64::new(4.0, 0.0), 10);
        let y = ode_jet(&q, (2.0 * x0).exp(), 2.0 * (2.0 * x0).exp(), 10);
        let want = Jet::variable(x0, 10).scale(Complex64::new(2.0, 0.0)).exp();
        for k in 0..=10 {
            assert!(close(y.c[k], want.c[k], 1e-14));
        }
    }
}
