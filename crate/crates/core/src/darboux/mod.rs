//! Selfadjoint Darboux transformations of the Airy and Bessel bispectral
//! functions.
//!
//! A datum consists of a polynomial-coefficient operator `R` and a polynomial
//! `v` with `P = v^{-1} R` (the multiplier is `v(x)` for Airy and `v(x^2)` for
//! Bessel), together with `g`, `m` and a normalizer `n(z)` such that
//!
//! * `a(P) P = eps * f(L)` with `f = g^2` (Airy) or `f(t) = t^{2m} g(t^2)^2`
//!   (Bessel, `g(0) != 0`), and
//! * `n(z)^2 = f(lambda(z))`, where `lambda(z)` is the eigenvalue of `L`
//!   (`z` for Airy, `z^2` for Bessel).
//!
//! The transformed function is `Psi = n(z)^{-1} P Psi_0`.

mod io;
mod kernel;
mod spaces;

pub use io::{certified_to_toml, from_toml, to_toml, DataFileError, DarbouxFile};
pub use kernel::{darboux_from_kernel, Seed, SeedFunctions};
pub use spaces::{dim_bounds_check, dim_report, s_spaces, DimReport};

use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use crate::bispectral::{b_map, Family};
use crate::exactalg::grammar::{format_diffop, format_poly};
use crate::exactalg::{AlgebraError, DiffOp, RatFn, Scalar, UniPoly, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn scalar(self) -> Scalar {
        Scalar::from_integer(self.value().into())
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DarbouxError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("a(P) P differs from the claimed polynomial in L; residual {}", format_diffop(.residual))]
    FactorizationFails { residual: DiffOp },
    #[error("P is not invariant under x -> -x")]
    EvennessViolation,
    #[error("normalizer squared differs from f at the eigenvalue")]
    NormalizerMismatch,
    #[error("seed functions are linearly dependent")]
    SeedsDependent,
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("z-side factorization fails for both signs; residual {}", format_diffop(.residual))]
    DualFactorizationFails { residual: DiffOp },
    #[error("data has not been verified: {0}")]
    UnverifiedData(Box<DarbouxError>),
    #[error("dimension bound violated: {0}")]
    BoundViolated(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DarbouxData {
    pub family: Family,
    pub r: DiffOp,
    pub v: UniPoly,
    pub g: UniPoly,
    pub m: usize,
    pub normalizer: UniPoly,
    pub epsilon: Sign,
}

impl DarbouxData {
    /// `P = 1`, `g = 1`, normalizer `1`.
    pub fn identity(family: Family) -> Self {
        Self {
            family,
            r: DiffOp::one(Var::X),
            v: UniPoly::one(),
            g: UniPoly::one(),
            m: 0,
            normalizer: UniPoly::one(),
            epsilon: Sign::Plus,
        }
    }

    /// The multiplier `v(x)` (Airy) or `v(x^2)` (Bessel) as a polynomial in `x`.
    pub fn v_multiplier(&self) -> UniPoly {
        if self.family.is_bessel() {
            self.v.in_square()
        } else {
            self.v.clone()
        }
    }

    pub fn p(&self) -> DiffOp {
        self.r.lmul_fn(&RatFn::recip_poly(&self.v_multiplier()))
    }

    /// `f(t) = g(t)^2` (Airy) or `t^{2m} g(t^2)^2` (Bessel).
    pub fn f(&self) -> UniPoly {
        if self.family.is_bessel() {
            let g2 = self.g.in_square();
            (&g2 * &g2).shift_up(2 * self.m)
        } else {
            &self.g * &self.g
        }
    }

    /// Image of the multiplier under `b`: `v(L_A(z))` or `v(L_nu(z))`.
    pub fn v_image(&self) -> DiffOp {
        poly_in(&self.v, &self.family.base_operator(Var::Z))
    }

    /// Canonical text used for digests.
    pub fn canonical_text(&self) -> String {
        let vvar = if self.family.is_bessel() { 't' } else { 'x' };
        format!(
            "family={}\nR={}\nv={}\ng={}\nm={}\nnormalizer={}\nepsilon={}\n",
            self.family,
            format_diffop(&self.r),
            format_poly(&self.v, vvar),
            format_poly(&self.g, 't'),
            self.m,
            format_poly(&self.normalizer, 'z'),
            self.epsilon.value()
        )
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }
}

/// `p(op) = sum p_i op^i`.
pub fn poly_in(p: &UniPoly, op: &DiffOp) -> DiffOp {
    let mut acc = DiffOp::zero(op.var());
    let mut pow = DiffOp::one(op.var());
    for (i, c) in p.coeffs().iter().enumerate() {
        if i > 0 {
            pow = &pow * op;
        }
        if !c.is_zero() {
            acc = &acc + &pow.scale(c);
        }
    }
    acc
}

/// Writes `op` as a polynomial in `base` (order 2, leading coefficient 1) if possible.
pub fn as_poly_in(op: &DiffOp, base: &DiffOp) -> Option<UniPoly> {
    let mut rest = op.clone();
    let mut coeffs: Vec<Scalar> = Vec::new();
    let mut pows = vec![DiffOp::one(base.var())];
    while let Some(k) = rest.order() {
        if k % 2 == 1 {
            return None;
        }
        let c = rest.leading_coeff().as_constant()?;
        let j = k / 2;
        while pows.len() <= j {
            let next = pows.last().unwrap() * base;
            pows.push(next);
        }
        rest = &rest - &pows[j].scale(&c);
        if coeffs.len() <= j {
            coeffs.resize(j + 1, Scalar::zero());
        }
        coeffs[j] = c;
    }
    Some(UniPoly::from_coeffs(coeffs))
}

/// Exact checks passed by a datum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub epsilon: Sign,
    pub f: UniPoly,
    pub rho1: usize,
    pub rho2: usize,
    pub residual: DiffOp,
    pub even_checked: bool,
    pub digest: String,
}

/// A datum together with the certificate and dual presentation it passed.
#[derive(Clone, Debug)]
pub struct Certified {
    data: DarbouxData,
    cert: Certificate,
    dual: DualPresentation,
}

impl Certified {
    pub fn data(&self) -> &DarbouxData {
        &self.data
    }

    pub fn certificate(&self) -> &Certificate {
        &self.cert
    }

    pub fn dual(&self) -> &DualPresentation {
        &self.dual
    }

    pub fn rho(&self) -> (usize, usize) {
        (self.cert.rho1, self.cert.rho2)
    }

    /// `key = value` lines describing the datum and both checks, ending in a
    /// sha256 digest of the lines above it.
    pub fn report(&self) -> String {
        let mut out = self.data.canonical_text().replace('=', " = ");
        out.push_str(&format!("rho1 = {}\nrho2 = {}\n", self.cert.rho1, self.cert.rho2));
        out.push_str(&format!("f = {}\n", format_poly(&self.cert.f, 't')));
        out.push_str(&format!("factorization_residual = {}\n", format_diffop(&self.cert.residual)));
        out.push_str(&format!("even_checked = {}\n", self.cert.even_checked));
        out.push_str(&format!("Q = {}\n", format_diffop(&self.dual.q)));
        out.push_str(&format!("dual_sign = {}\n", self.dual.sign.value()));
        out.push_str(&format!("dual_residual = {}\n", format_diffop(&self.dual.residual)));
        out.push_str(&format!("data_digest = {}\n", self.cert.digest));
        let digest = hex::encode(Sha256::digest(out.as_bytes()));
        out.push_str(&format!("digest = {digest}\n"));
        out
    }
}

/// Checks `a(P) P = eps f(L)` exactly, plus the side conditions on the datum.
pub fn darboux_verify(d: &DarbouxData) -> Result<Certificate, DarbouxError> {
    if d.r.var() != Var::X {
        return Err(DarbouxError::InvalidData("R must act on x".into()));
    }
    if !d.r.has_polynomial_coeffs() {
        return Err(DarbouxError::InvalidData("R must have polynomial coefficients".into()));
    }
    if d.v.is_zero() || d.g.is_zero() || d.normalizer.is_zero() {
        return Err(DarbouxError::InvalidData("v, g and the normalizer must be nonzero".into()));
    }
    if d.family.is_bessel() && d.g.coeff(0).is_zero() {
        return Err(DarbouxError::InvalidData("g(0) must be nonzero for Bessel data".into()));
    }
    let p = d.p();
    let f = d.f();
    let lhs = &p.adjoint() * &p;
    let rhs = poly_in(&f, &d.family.base_operator(Var::X)).scale(&d.epsilon.scalar());
    let residual = &lhs - &rhs;
    if !residual.is_zero() {
        return Err(DarbouxError::FactorizationFails { residual });
    }
    let even_checked = d.family.even_mode();
    if even_checked && !p.is_reflection_invariant() {
        return Err(DarbouxError::EvennessViolation);
    }
    let lambda = d.family.eigenvalue();
    if &d.normalizer * &d.normalizer != f.compose(&lambda) {
        return Err(DarbouxError::NormalizerMismatch);
    }
    let rho1 = d.r.order().unwrap_or(0);
    let rho2 = b_map(&d.family, &d.r)?.order().unwrap_or(0);
    Ok(Certificate { epsilon: d.epsilon, f, rho1, rho2, residual, even_checked, digest: d.digest() })
}

/// The z-side description `Q = n^{-1} b(R)` with `a(Q) Q = sign * b(v)^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualPresentation {
    pub b_r: DiffOp,
    pub q: DiffOp,
    pub v_image: DiffOp,
    pub sign: Sign,
    pub residual: DiffOp,
}

pub fn dual_presentation(d: &DarbouxData) -> Result<DualPresentation, DarbouxError> {
    let b_r = b_map(&d.family, &d.r)?;
    let q = b_r.lmul_fn(&RatFn::recip_poly(&d.normalizer));
    let v_image = d.v_image();
    let lhs = &q.adjoint() * &q;
    let v2 = &v_image * &v_image;
    let mut last = DiffOp::zero(Var::Z);
    for sign in [Sign::Plus, Sign::Minus] {
        let residual = &lhs - &v2.scale(&sign.scalar());
        if residual.is_zero() {
            return Ok(DualPresentation { b_r, q, v_image, sign, residual });
        }
        if sign == Sign::Plus {
            last = residual;
        }
    }
    Err(DarbouxError::DualFactorizationFails { residual: last })
}

/// Runs both exact checks and packages the result.
pub fn certify(d: &DarbouxData) -> Result<Certified, DarbouxError> {
    let cert = darboux_verify(d)?;
    let dual = dual_presentation(d)?;
    Ok(Certified { data: d.clone(), cert, dual })
}

/// `ladder(nu, 2k)`: `P = prod_{j = 2k..1} (d - (nu + j)/x)`, highest `j` on the
/// left, with `v(t) = t^k`, `g = 1`, `m = k`, normalizer `z^{2k}` and `eps = +1`.
pub fn ladder(nu: &Scalar, steps: usize) -> Result<DarbouxData, DarbouxError> {
    if steps % 2 == 1 {
        return Err(DarbouxError::EvennessViolation);
    }
    let family = Family::Bessel(nu.clone());
    if steps == 0 {
        return Ok(DarbouxData::identity(family));
    }
    let mut p = DiffOp::one(Var::X);
    for j in 1..=steps {
        let c = -(nu + Scalar::from_integer(j.into()));
        let factor = DiffOp::from_coeffs(Var::X, vec![RatFn::new(UniPoly::constant(c), UniPoly::x()), RatFn::one()]);
        p = &factor * &p;
    }
    let k = steps / 2;
    let r = p.lmul_fn(&RatFn::poly(UniPoly::monomial(Scalar::one(), steps)));
    Ok(DarbouxData {
        family,
        r,
        v: UniPoly::monomial(Scalar::one(), k),
        g: UniPoly::one(),
        m: k,
        normalizer: UniPoly::monomial(Scalar::one(), steps),
        epsilon: Sign::Plus,
    })
}

/// Airy datum with `ker P` spanned by `Ai'` and `Bi'`:
/// `R = x d^2 - d - x^2`, `v = x`, `g(t) = t`, normalizer `z`.
pub fn airy_derivative_example() -> DarbouxData {
    let r = DiffOp::from_coeffs(
        Var::X,
        vec![
            RatFn::poly(UniPoly::from_ints(&[0, 0, -1])),
            RatFn::constant(-Scalar::one()),
            RatFn::poly(UniPoly::x()),
        ],
    );
    DarbouxData {
        family: Family::Airy,
        r,
        v: UniPoly::x(),
        g: UniPoly::x(),
        m: 0,
        normalizer: UniPoly::x(),
        epsilon: Sign::Plus,
    }
}

/// Named data shipped with the crate; every entry passes [`certify`].
pub fn corpus() -> Vec<(&'static str, DarbouxData)> {
    let q = crate::exactalg::q;
    let mut out = vec![
        ("airy-identity", DarbouxData::identity(Family::Airy)),
        ("bessel-0-identity", DarbouxData::identity(Family::Bessel(Scalar::zero()))),
        ("airy-derivative", airy_derivative_example()),
    ];
    for (name, nu) in [("ladder-0", q(0, 1)), ("ladder-1/3", q(1, 3)), ("ladder-1/2", q(1, 2)), ("ladder-3/2", q(3, 2))] {
        out.push((name, ladder(&nu, 2).expect("even ladder")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bispectral::bessel_operator;
    use crate::exactalg::scalar::{q, qi};

    #[test]
    fn identity_certificate() {
        let c = darboux_verify(&DarbouxData::identity(Family::Airy)).unwrap();
        assert_eq!((c.rho1, c.rho2), (0, 0));
        assert!(c.residual.is_zero());
        let dual = dual_presentation(&DarbouxData::identity(Family::Bessel(q(1, 3)))).unwrap();
        assert!(dual.residual.is_zero());
        assert_eq!(dual.sign, Sign::Plus);
    }

    #[test]
    fn ladder_two_steps() {
        let nu = q(1, 2);
        let d = ladder(&nu, 2).unwrap();
        let x = |c: Scalar| RatFn::new(UniPoly::constant(c), UniPoly::x());
        let f1 = DiffOp::from_coeffs(Var::X, vec![x(-(&nu + qi(1))), RatFn::one()]);
        let f2 = DiffOp::from_coeffs(Var::X, vec![x(-(&nu + qi(2))), RatFn::one()]);
        assert_eq!(d.p(), &f2 * &f1);
        let l = bessel_operator(&nu, Var::X);
        assert_eq!(&d.p().adjoint() * &d.p(), &l * &l);
        let c = darboux_verify(&d).unwrap();
        assert_eq!((c.rho1, c.rho2, c.epsilon), (2, 2, Sign::Plus));
        assert_eq!(c.f, UniPoly::monomial(qi(1), 2));
        assert!(dual_presentation(&d).unwrap().residual.is_zero());
    }

    #[test]
    fn ladder_edge_cases() {
        assert_eq!(ladder(&q(1, 3), 0).unwrap(), DarbouxData::identity(Family::Bessel(q(1, 3))));
        assert_eq!(ladder(&q(1, 3), 3), Err(DarbouxError::EvennessViolation));
        let d = ladder(&qi(0), 2).unwrap();
        assert!(d.p().is_reflection_invariant());
        assert!(darboux_verify(&d).unwrap().even_checked);
        let d4 = ladder(&q(1, 2), 4).unwrap();
        let c = darboux_verify(&d4).unwrap();
        assert_eq!((c.rho1, c.rho2), (4, 4));
    }

    #[test]
    fn corrupted_g_fails() {
        let mut d = ladder(&q(1, 2), 2).unwrap();
        d.g = &d.g + &UniPoly::one();
        match darboux_verify(&d) {
            Err(DarbouxError::FactorizationFails { residual }) => assert!(!residual.is_zero()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn airy_example_certifies() {
        let d = airy_derivative_example();
        let la = crate::bispectral::airy_operator(Var::X);
        assert_eq!(&d.p().adjoint() * &d.p(), &la * &la);
        let c = darboux_verify(&d).unwrap();
        assert_eq!((c.rho1, c.rho2), (2, 2));
        let dual = dual_presentation(&d).unwrap();
        assert_eq!(dual.b_r, d.r.with_var(Var::Z));
    }

    #[test]
    fn corpus_certifies() {
        for (name, d) in corpus() {
            assert!(certify(&d).is_ok(), "{name}");
        }
    }

    #[test]
    fn poly_in_round_trip() {
        let l = bessel_operator(&q(2, 5), Var::X);
        let p = UniPoly::from_ints(&[3, 0, -2, 1]);
        assert_eq!(as_poly_in(&poly_in(&p, &l), &l), Some(p));
        assert_eq!(as_poly_in(&DiffOp::d(Var::X), &l), None);
    }
}
