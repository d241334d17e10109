//! The Airy function `Ai` and its derivative at complex arguments.
//!
//! Inside `|x| <= 8` the Maclaurin series is summed in double-double
//! arithmetic, which absorbs the cancellation on the decaying side. Outside
//! that disc the standard asymptotic expansions are used: the exponential
//! form for `|arg x| <= 2 pi / 3` and the oscillatory form near the negative
//! axis.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::NumError;

pub const SERIES_RADIUS: f64 = 8.0;
pub const OVERFLOW_RADIUS: f64 = 200.0;

const AI0: (f64, f64) = (0.3550280538878172, 2.05233632436212e-17);
const MINUS_AIP0: (f64, f64) = (0.2588194037928068, -2.522243111610832e-17);

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }
}

impl From<Dd> for f64 {
    fn from(v: Dd) -> f64 {
        v.hi + v.lo
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let u = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(u.hi, u.lo + t.lo)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::from(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::from(q2);
        let q3 = r.hi / o.hi;
        let q = quick_two_sum(q1, q2);
        q + Dd::from(q3)
    }
}

#[derive(Clone, Copy)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    fn from_c64(z: Complex64) -> Self {
        Cdd { re: Dd::from(z.re), im: Dd::from(z.im) }
    }

    fn zero() -> Self {
        Cdd { re: Dd::from(0.0), im: Dd::from(0.0) }
    }

    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re + o.re, im: self.im + o.im }
    }

    fn mul(self, o: Cdd) -> Cdd {
        Cdd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }

    fn scale(self, a: Dd) -> Cdd {
        Cdd { re: self.re * a, im: self.im * a }
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(f64::from(self.re), f64::from(self.im))
    }

    fn magnitude(self) -> f64 {
        self.to_c64().norm()
    }
}

fn dd(pair: (f64, f64)) -> Dd {
    Dd::from(pair.0) + Dd::from(pair.1)
}

/// `(Ai(x), Ai'(x))` by the Maclaurin series `a_{n+3} = a_n / ((n+2)(n+3))`.
fn maclaurin(x: Complex64) -> (Complex64, Complex64) {
    let xd = Cdd::from_c64(x);
    let mut coeffs = [dd(AI0), -dd(MINUS_AIP0), Dd::from(0.0)];
    let mut val = Cdd::zero();
    let mut der = Cdd::zero();
    // powers x^n and x^(n-1)
    let mut p = Cdd { re: Dd::from(1.0), im: Dd::from(0.0) };
    let mut pm1 = Cdd::zero();
    let mut quiet = 0;
    let mut n = 0usize;
    loop {
        let a = coeffs[n % 3];
        let term = p.scale(a);
        let dterm = pm1.scale(a * Dd::from(n as f64));
        val = val.add(term);
        der = der.add(dterm);
        if n % 3 != 2 {
            let small = term.magnitude() <= 1e-33 * val.magnitude().max(1e-300)
                && dterm.magnitude() <= 1e-33 * der.magnitude().max(1e-300);
            quiet = if small { quiet + 1 } else { 0 };
            if quiet >= 2 || n > 600 {
                break;
            }
        }
        let nf = n as f64;
        coeffs[n % 3] = a / Dd::from((nf + 2.0) * (nf + 3.0));
        pm1 = p;
        p = p.mul(xd);
        n += 1;
    }
    (val.to_c64(), der.to_c64())
}

/// Coefficients `u_k`, `v_k` of the asymptotic expansions.
fn uv(k_max: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..=k_max {
        let kf = k as f64;
        let next = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(next);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * next);
    }
    (u, v)
}

/// Sums `sum_j (-1)^j c_k / zeta^k` over `k = start + j * step`, stopping at
/// the smallest term.
fn asymptotic_sum(c: &[f64], zeta: Complex64, start: usize, step: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    let mut sign = 1.0;
    let mut k = start;
    while k < c.len() {
        let t = c[k] / zeta.powi(k as i32);
        if t.norm() > last {
            break;
        }
        acc += t * sign;
        last = t.norm();
        if last < 1e-18 * acc.norm() {
            break;
        }
        sign = -sign;
        k += step;
    }
    acc
}

fn asymptotic(x: Complex64) -> (Complex64, Complex64) {
    let (u, v) = uv(60);
    let sqrt_pi = std::f64::consts::PI.sqrt();
    if x.arg().abs() <= 2.0 * std::f64::consts::FRAC_PI_3 {
        let zeta = x.powf(1.5) * (2.0 / 3.0);
        let e = (-zeta).exp();
        let q = x.powf(0.25);
        let ai = e / (2.0 * sqrt_pi * q) * asymptotic_sum(&u, zeta, 0, 1);
        let aip = -q * e / (2.0 * sqrt_pi) * asymptotic_sum(&v, zeta, 0, 1);
        (ai, aip)
    } else {
        let w = -x;
        let zeta = w.powf(1.5) * (2.0 / 3.0);
        let q = w.powf(0.25);
        let phase = zeta - std::f64::consts::FRAC_PI_4;
        let (c, s) = (phase.cos(), phase.sin());
        let ai = (c * asymptotic_sum(&u, zeta, 0, 2) + s * asymptotic_sum(&u, zeta, 1, 2)) / (sqrt_pi * q);
        let aip = q / sqrt_pi * (s * asymptotic_sum(&v, zeta, 0, 2) - c * asymptotic_sum(&v, zeta, 1, 2));
        (ai, aip)
    }
}

/// `(Ai(x), Ai'(x))`.
pub fn airy_pair(x: Complex64) -> Result<(Complex64, Complex64), NumError> {
    if !x.is_finite() || x.norm() > OVERFLOW_RADIUS {
        return Err(NumError::Overflow(format!("Airy argument {x}")));
    }
    let (a, b) = if x.norm() <= SERIES_RADIUS { maclaurin(x) } else { asymptotic(x) };
    if !(a.is_finite() && b.is_finite()) {
        return Err(NumError::Overflow(format!("Airy argument {x}")));
    }
    Ok((a, b))
}

/// `Ai(x)`.
pub fn eval_airy(x: Complex64) -> Result<Complex64, NumError> {
    airy_pair(x).map(|p| p.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_arithmetic() {
        let third = Dd::from(1.0) / Dd::from(3.0);
        let back = third * Dd::from(3.0) - Dd::from(1.0);
        assert!(f64::from(back).abs() < 1e-31);
        let (x, mut t, mut s) = (Dd::from(-20.0), Dd::from(1.0), Dd::from(1.0));
        for n in 1..120 {
            t = t * x / Dd::from(n as f64);
            s = s + t;
        }
        assert!((f64::from(s) / (-20f64).exp() - 1.0).abs() < 1e-13);
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn real_reference_values() {
        let table = [
            (-2.0, 0.22740742820168557599, 0.61825902074169104141),
            (-1.0, 0.5355608832923521188, -0.010160567116645209395),
            (0.0, 0.35502805388781723926, -0.25881940379280679841),
            (0.5, 0.23169360648083348977, -0.22491053266468389314),
            (1.0, 0.13529241631288141552, -0.15914744129679321279),
            (2.0, 0.034924130423274379135, -0.053090384433653631704),
            (3.0, 0.0065911393574607191443, -0.011912976705951318474),
            (5.0, 0.00010834442813607441735, -0.000247413890868462476),
            (8.0, 4.6922076160992316256e-8, -1.3414392979067865743e-7),
            (12.0, 1.393184688875360839e-13, -4.854736554985308463e-13),
            (20.0, 1.6916728686705403136e-27, -7.5863916257483549605e-27),
        ];
        for (x, a, ap) in table {
            let (va, vp) = airy_pair(c(x, 0.0)).unwrap();
            let tol = if x > SERIES_RADIUS { 1e-12 } else { 1e-13 };
            assert!(rel(va, c(a, 0.0)) < tol, "Ai({x}) = {va}");
            assert!(rel(vp, c(ap, 0.0)) < tol, "Ai'({x}) = {vp}");
        }
    }

    #[test]
    fn complex_reference_values() {
        let table = [
            (c(1.0, 1.0), c(0.060458308371838149197, -0.15188956587718140235), c(-0.13062795349964751771, 0.16306759644932391574)),
            (c(3.0, 2.0), c(-0.0096772010586102401542, 0.005524689111732705686), c(0.020990085245160245044, -0.0053474656955746458061)),
            (c(-2.0, 1.0), c(0.55630453937119252209, 0.78980143818827582048), c(1.1349598127621306555, -0.88587936564533422201)),
            (c(7.0, -4.0), c(-4.766723112386431465e-7, -3.1596400104343514246e-6), c(3.5773609210316762212e-6, 8.4148204566483866897e-6)),
        ];
        for (x, a, ap) in table {
            let (va, vp) = airy_pair(x).unwrap();
            assert!(rel(va, a) < 1e-12, "Ai({x}) = {va}");
            assert!(rel(vp, ap) < 1e-12, "Ai'({x}) = {vp}");
        }
    }

    #[test]
    fn decays_monotonically() {
        let mut prev = f64::INFINITY;
        for k in 0..=70 {
            let x = 1.0 + 0.1 * k as f64;
            let v = eval_airy(c(x, 0.0)).unwrap().re;
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn seam_between_series_and_expansion() {
        for arg in [0.0, 0.9, 1.8, 2.5, 3.1] {
            let inside = maclaurin(Complex64::from_polar(SERIES_RADIUS, arg));
            let outside = asymptotic(Complex64::from_polar(SERIES_RADIUS, arg));
            assert!(rel(outside.0, inside.0) < 1e-11, "arg {arg}");
            assert!(rel(outside.1, inside.1) < 1e-11, "arg {arg}");
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(airy_pair(c(-500.0, 0.0)), Err(NumError::Overflow(_))));
    }
}
