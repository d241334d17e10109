use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar. Always reduced with a positive denominator.
pub type Scalar = BigRational;

/// `n / d` as an exact scalar.
pub fn q(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn to_f64(s: &Scalar) -> f64 {
    // Large numerators and denominators overflow a naive division.
    match (s.numer().to_f64(), s.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = s.numer().bits().max(s.denom().bits()) as i64 - 60;
            let shift = shift.max(0) as usize;
            let n = (s.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (s.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            n / d
        }
    }
}

pub fn binomial(n: usize, k: usize) -> Scalar {
    if k > n {
        return Scalar::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(acc)
}

pub fn is_integer(s: &Scalar) -> bool {
    s.denom().is_one()
}

/// Parses `a`, `-a`, or `a/b` with integer `a`, `b`.
pub fn parse_scalar(text: &str) -> Option<Scalar> {
    let text = text.trim();
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Prints `n` or `n/d`; inverse of [`parse_scalar`].
pub fn format_scalar(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Exact element of the Gaussian rationals `Q(i)`, used for contour endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: Scalar,
    pub im: Scalar,
}

impl GaussRat {
    pub fn new(re: Scalar, im: Scalar) -> Self {
        Self { re, im }
    }

    pub fn real(re: Scalar) -> Self {
        Self { re, im: Scalar::zero() }
    }

    pub fn zero() -> Self {
        Self::real(Scalar::zero())
    }

    pub fn one() -> Self {
        Self::real(Scalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Scalar {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self::new(&self.re * s, &self.im * s)
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", format_scalar(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", format_scalar(&self.im))
        } else {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            write!(f, "{}{}{}i", format_scalar(&self.re), sign, format_scalar(&self.im.abs()))
        }
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_text_round_trip() {
        for s in [q(3, 4), q(-7, 2), qi(0), qi(-12)] {
            assert_eq!(parse_scalar(&format_scalar(&s)), Some(s));
        }
        assert_eq!(parse_scalar("1/0"), None);
        assert_eq!(parse_scalar("6/4"), Some(q(3, 2)));
    }

    #[test]
    fn gaussian_inverse() {
        let z = GaussRat::new(q(1, 2), q(-3, 1));
        let w = z.inv().unwrap();
        assert_eq!(&z * &w, GaussRat::one());
        assert!(GaussRat::zero().inv().is_none());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 2), qi(15));
        assert_eq!(binomial(3, 5), qi(0));
    }

    #[test]
    fn huge_ratio_to_f64() {
        let big = Scalar::new(BigInt::from(10).pow(400), BigInt::from(10).pow(399) * 4);
        assert!((to_f64(&big) - 2.5).abs() < 1e-12);
    }
}
