//! `Psi_nu(x, z) = (xz)^{1/2} J_{nu+1/2}(i x z)` by its ascending series,
//! written with principal powers as
//! `(i/2)^{nu+1/2} x^{nu+1} z^{nu+1} sum_k (xz/2)^{2k} / (k! Gamma(k + nu + 3/2))`.

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use super::NumError;
use crate::exactalg::scalar::{is_integer, to_f64};
use crate::exactalg::Scalar;

const MAX_TERMS: usize = 4000;

/// `Psi_nu(x, z)` and `d/dx Psi_nu(x, z)`.
pub fn bessel_psi_pair(nu: &Scalar, x: Complex64, z: Complex64) -> Result<(Complex64, Complex64), NumError> {
    let mu = to_f64(nu) + 0.5;
    if is_integer(&(nu + crate::exactalg::q(3, 2))) && to_f64(nu) <= -1.5 {
        return Err(NumError::Domain(format!("nu = {nu} puts a pole of Gamma at the first term")));
    }
    if x.norm() == 0.0 {
        return Err(NumError::Domain("x = 0 is a branch point".into()));
    }
    let w2 = (x * z) * (x * z) / 4.0;
    let mut t = Complex64::new(1.0 / gamma(mu + 1.0), 0.0);
    let mut s = t;
    let mut ds = t * (to_f64(nu) + 1.0);
    let mut converged = false;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        t = t * w2 / (kf * (kf + mu));
        s += t;
        let dt = t * (2.0 * kf + to_f64(nu) + 1.0);
        ds += dt;
        if kf * kf > w2.norm() && t.norm() <= 1e-17 * s.norm() && dt.norm() <= 1e-17 * ds.norm() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(NumError::SeriesNonconvergence(format!("Psi_{nu} at x = {x}, z = {z}")));
    }
    let a = to_f64(nu) + 1.0;
    let c = Complex64::new(0.0, 0.5).powf(mu);
    let pre = c * x.powf(a) * z.powf(a);
    Ok((pre * s, pre * ds / x))
}

/// `Psi_nu(x, z)`.
pub fn eval_bessel_psi(nu: &Scalar, x: Complex64, z: Complex64) -> Result<Complex64, NumError> {
    bessel_psi_pair(nu, x, z).map(|p| p.0)
}
