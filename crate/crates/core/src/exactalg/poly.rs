use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::scalar::{to_f64, GaussRat, Scalar};

/// Dense univariate polynomial over the rationals, coefficients stored low to high.
///
/// The coefficient vector never carries trailing zeros, so the zero polynomial
/// is the empty vector and `degree()` is `None` for it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<Scalar>,
}

impl UniPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The monomial `c * x^k`.
    pub fn monomial(c: Scalar, k: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn x() -> Self {
        Self::monomial(Scalar::one(), 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Scalar::from_integer(BigInt::from(c))).collect())
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lead(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let l = self.lead();
        if l.is_one() {
            return self.clone();
        }
        self.scale(&l.recip())
    }

    /// Multiplication by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Scalar::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Scalar::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(Scalar::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_gauss(&self, x: &GaussRat) -> GaussRat {
        self.coeffs.iter().rev().fold(GaussRat::zero(), |acc, c| {
            let mut next = &acc * x;
            next.re += c;
            next
        })
    }

    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + to_f64(c))
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    /// `p(x^2)`.
    pub fn in_square(&self) -> Self {
        let mut coeffs = vec![Scalar::zero(); 2 * self.coeffs.len()];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[2 * k] = c.clone();
        }
        Self::from_coeffs(coeffs)
    }

    /// Composition `p(q(x))` by Horner's scheme.
    pub fn compose(&self, inner: &UniPoly) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * inner) + &Self::constant(c.clone()))
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let inv_lead = divisor.lead().recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Scalar::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = &rem[k + dd] * &inv_lead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.monic(), other.monic());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a
    }

    /// Exact square root when the polynomial is a perfect square over Q.
    pub fn sqrt(&self) -> Option<UniPoly> {
        let Some(d) = self.degree() else {
            return Some(Self::zero());
        };
        if d % 2 == 1 {
            return None;
        }
        let lead = self.lead();
        let root_lead = rational_sqrt(&lead)?;
        let n = d / 2;
        // Coefficients of the root from the top down.
        let mut root = vec![Scalar::zero(); n + 1];
        root[n] = root_lead.clone();
        let two_lead = &root_lead + &root_lead;
        for k in (0..n).rev() {
            // coefficient of x^{n+k} in root^2 must match self
            let mut acc = self.coeff(n + k);
            for i in (k + 1)..n {
                acc -= &root[i] * &root[n + k - i];
            }
            root[k] = acc / &two_lead;
        }
        let candidate = Self::from_coeffs(root);
        (&candidate * &candidate == *self).then_some(candidate)
    }

    /// Integer coefficients `(m * p)` with `m > 0` the least common multiple
    /// of the coefficient denominators.
    pub fn integer_scaled(&self) -> (BigInt, Vec<BigInt>) {
        let m = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = self.coeffs.iter().map(|c| (c * Scalar::from_integer(m.clone())).to_integer()).collect();
        (m, ints)
    }

    /// Complex roots by the Aberth iteration, in no particular order.
    pub fn roots_c64(&self) -> Vec<Complex64> {
        let Some(n) = self.degree() else { return Vec::new() };
        if n == 0 {
            return Vec::new();
        }
        let monic = self.monic();
        let c: Vec<Complex64> = monic.coeffs.iter().map(|a| Complex64::new(to_f64(a), 0.0)).collect();
        let eval = |z: Complex64| -> (Complex64, Complex64) {
            let mut p = Complex64::new(0.0, 0.0);
            let mut dp = Complex64::new(0.0, 0.0);
            for a in c.iter().rev() {
                dp = dp * z + p;
                p = p * z + a;
            }
            (p, dp)
        };
        let radius = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let (p, dp) = eval(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                z[i] -= step;
                moved = moved.max(step.norm());
            }
            if moved < 1e-15 * radius {
                break;
            }
        }
        z
    }

    /// Rational roots with multiplicity ignored, found by the rational root theorem
    /// on the primitive integer form. Only used for small, exactly checked polynomials.
    pub fn rational_roots(&self) -> Vec<Scalar> {
        let Some(_) = self.degree() else { return Vec::new() };
        let mut p = self.clone();
        let mut roots = Vec::new();
        while p.coeff(0).is_zero() && !p.is_zero() {
            if !roots.contains(&Scalar::zero()) {
                roots.push(Scalar::zero());
            }
            p = Self::from_coeffs(p.coeffs[1..].to_vec());
        }
        let (_, ints) = p.integer_scaled();
        if ints.len() <= 1 {
            return roots;
        }
        let a0 = ints[0].abs();
        let an = ints[ints.len() - 1].abs();
        let divisors = |n: &BigInt| -> Vec<BigInt> {
            let mut out = Vec::new();
            let mut d = BigInt::one();
            while &d * &d <= *n {
                if (n % &d).is_zero() {
                    out.push(d.clone());
                    out.push(n / &d);
                }
                d += 1;
            }
            out
        };
        // Keep the search bounded; large constant terms are not expected here.
        if a0.bits() > 40 || an.bits() > 40 {
            return roots;
        }
        for num in divisors(&a0) {
            for den in divisors(&an) {
                for sign in [1, -1] {
                    let r = Scalar::new(&num * sign, den.clone());
                    if p.eval(&r).is_zero() && !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        roots
    }
}

fn rational_sqrt(s: &Scalar) -> Option<Scalar> {
    if s.is_negative() {
        return None;
    }
    let n = s.numer().sqrt();
    let d = s.denom().sqrt();
    (&n * &n == *s.numer() && &d * &d == *s.denom()).then(|| Scalar::new(n, d))
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::{q, qi};

    #[test]
    fn division_identity() {
        let a = UniPoly::from_ints(&[3, 0, -2, 5, 1]);
        let b = UniPoly::from_coeffs(vec![q(1, 2), qi(0), qi(3)]);
        let (quot, rem) = a.div_rem(&b);
        assert_eq!(&(&quot * &b) + &rem, a);
        assert!(rem.degree() < b.degree());
    }

    #[test]
    fn gcd_of_shared_factor() {
        let f = UniPoly::from_ints(&[-1, 1]); // x - 1
        let a = &f * &UniPoly::from_ints(&[2, 0, 1]);
        let b = &f * &UniPoly::from_ints(&[3, 7]);
        assert_eq!(a.gcd(&b), f);
        assert_eq!(UniPoly::from_ints(&[1, 1]).gcd(&UniPoly::from_ints(&[1, 2])), UniPoly::one());
    }

    #[test]
    fn square_roots() {
        let r = UniPoly::from_coeffs(vec![q(1, 3), qi(-2), qi(0), q(5, 2)]);
        let sq = &r * &r;
        let s = sq.sqrt().unwrap();
        assert!(s == r || s == -&r);
        assert!(UniPoly::from_ints(&[1, 0, 2]).sqrt().is_none());
        assert!(UniPoly::from_ints(&[0, 1]).sqrt().is_none());
    }

    #[test]
    fn reflect_and_square_substitution() {
        let p = UniPoly::from_ints(&[1, 2, 3]);
        assert_eq!(p.reflect(), UniPoly::from_ints(&[1, -2, 3]));
        assert_eq!(p.in_square(), UniPoly::from_ints(&[1, 0, 2, 0, 3]));
        assert_eq!(p.compose(&UniPoly::from_ints(&[0, 0, 1])), p.in_square());
    }

    #[test]
    fn numeric_roots() {
        let p = UniPoly::from_ints(&[4, 0, 1]); // x^2 + 4
        let mut roots = p.roots_c64();
        roots.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((roots[0] - Complex64::new(0.0, -2.0)).norm() < 1e-12);
        assert!((roots[1] - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn rational_root_search() {
        let p = &UniPoly::from_ints(&[-1, 2]) * &UniPoly::from_ints(&[0, 0, 3, 1]);
        assert_eq!(p.rational_roots(), vec![qi(-3), qi(0), q(1, 2)]);
    }
}
