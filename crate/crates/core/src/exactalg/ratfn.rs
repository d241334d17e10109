use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::poly::UniPoly;
use super::scalar::{GaussRat, Scalar};

/// Rational function `num / den` in lowest terms with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: UniPoly,
    den: UniPoly,
}

impl RatFn {
    /// Reduces `num / den`. Panics when `den` is zero.
    pub fn new(num: UniPoly, den: UniPoly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_constant() {
            return Self { num: num.scale(&den.lead().recip()), den: UniPoly::one() };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let l = den.lead();
        if l.is_one() {
            Self { num, den }
        } else {
            let inv = l.recip();
            Self { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn zero() -> Self {
        Self { num: UniPoly::zero(), den: UniPoly::one() }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self { num: UniPoly::constant(c), den: UniPoly::one() }
    }

    pub fn poly(p: UniPoly) -> Self {
        Self { num: p, den: UniPoly::one() }
    }

    /// `1 / p`. Panics on the zero polynomial.
    pub fn recip_poly(p: &UniPoly) -> Self {
        Self::new(UniPoly::one(), p.clone())
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_polynomial(&self) -> Option<&UniPoly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        (self.den.is_one() && self.num.is_constant()).then(|| self.num.coeff(0))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn recip(&self) -> Self {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn derivative(&self) -> Self {
        if self.den.is_one() {
            return Self::poly(self.num.derivative());
        }
        let top = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(top, &self.den * &self.den)
    }

    /// `f(-x)`.
    pub fn reflect(&self) -> Self {
        Self::new(self.num.reflect(), self.den.reflect())
    }

    pub fn is_regular_at(&self, x: &Scalar) -> bool {
        !self.den.eval(x).is_zero()
    }

    pub fn eval(&self, x: &Scalar) -> Option<Scalar> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    pub fn eval_gauss(&self, x: &GaussRat) -> Option<GaussRat> {
        let d = self.den.eval_gauss(x).inv()?;
        Some(&self.num.eval_gauss(x) * &d)
    }

    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        self.num.eval_c64(x) / self.den.eval_c64(x)
    }

    pub fn pow(&self, n: usize) -> Self {
        Self { num: self.num.pow(n), den: self.den.pow(n) }
    }
}

impl Default for RatFn {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &RatFn {
    type Output = RatFn;
    fn add(self, rhs: &RatFn) -> RatFn {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFn::poly(&self.num + &rhs.num);
        }
        if self.den == rhs.den {
            return RatFn::new(&self.num + &rhs.num, self.den.clone());
        }
        let g = self.den.gcd(&rhs.den);
        let left = rhs.den.div_rem(&g).0;
        let right = self.den.div_rem(&g).0;
        RatFn::new(&(&self.num * &left) + &(&rhs.num * &right), &self.den * &left)
    }
}

impl Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, rhs: &RatFn) -> RatFn {
        self + &(-rhs)
    }
}

impl Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, rhs: &RatFn) -> RatFn {
        if self.is_zero() || rhs.is_zero() {
            return RatFn::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFn::poly(&self.num * &rhs.num);
        }
        RatFn::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::grammar::format_ratfn(self, 'x'))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::{q, qi};

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    #[test]
    fn normalizes_to_lowest_terms() {
        // (2x^2 - 2) / (4x - 4) = (x + 1) / 2
        let r = RatFn::new(p(&[-2, 0, 2]), p(&[-4, 4]));
        assert!(r.is_polynomial());
        assert_eq!(r.num(), &UniPoly::from_coeffs(vec![q(1, 2), q(1, 2)]));
        let s = RatFn::new(p(&[1]), p(&[0, 3]));
        assert_eq!(s.den(), &p(&[0, 1]));
        assert_eq!(s.num(), &UniPoly::constant(q(1, 3)));
    }

    #[test]
    fn field_arithmetic() {
        let a = RatFn::new(p(&[1]), p(&[0, 1]));
        let b = RatFn::new(p(&[0, 1]), p(&[1, 1]));
        let sum = &a + &b;
        assert_eq!(&sum - &b, a);
        assert_eq!(&(&a * &b) * &a.recip(), b);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn quotient_rule() {
        // d/dx 1/x = -1/x^2
        let r = RatFn::recip_poly(&p(&[0, 1]));
        assert_eq!(r.derivative(), RatFn::new(p(&[-1]), p(&[0, 0, 1])));
        assert_eq!(r.eval(&qi(2)), Some(q(1, 2)));
        assert_eq!(r.eval(&qi(0)), None);
    }
}
