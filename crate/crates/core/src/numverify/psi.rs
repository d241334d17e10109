//! Evaluation of `Psi = n(z)^{-1} P Psi_0` and of its jets in either variable.

use num_complex::Complex64;

use super::airy::airy_pair;
use super::bessel::bessel_psi_pair;
use super::jet::{ode_jet, Jet, OpAtPoint};
use super::NumError;
use crate::bispectral::Family;
use crate::darboux::{Certified, DarbouxData};
use crate::exactalg::scalar::to_f64;
use crate::exactalg::{DiffOp, Scalar, UniPoly, Var};

/// The undressed function `Psi_0`.
#[derive(Clone, Debug, PartialEq)]
pub enum Base {
    /// `Ai(x + z)`.
    Airy,
    /// `Psi_nu(x, z)`.
    Bessel(Scalar),
    /// `exp(x z)`, paired with `exp(-x z)` in the kernel.
    Exp,
}

impl Base {
    pub fn of(family: &Family) -> Self {
        match family {
            Family::Airy => Base::Airy,
            Family::Bessel(nu) => Base::Bessel(nu.clone()),
        }
    }

    /// Taylor coefficients of `x -> Psi_0(x, z)` at `x0`. Every base is
    /// symmetric in its two arguments, so the same routine gives z-jets.
    pub fn jet(&self, x0: Complex64, z: Complex64, order: usize) -> Result<Jet, NumError> {
        match self {
            Base::Airy => {
                let (a, ap) = airy_pair(x0 + z)?;
                let q = Jet::variable(x0 + z, order);
                Ok(ode_jet(&q, a, ap, order))
            }
            Base::Bessel(nu) => {
                let (a, ap) = bessel_psi_pair(nu, x0, z)?;
                let nf = to_f64(nu);
                let x = Jet::variable(x0, order);
                let q = Jet::constant(Complex64::new(nf * (nf + 1.0), 0.0), order)
                    .div(&x.mul(&x))
                    .add(&Jet::constant(z * z, order));
                Ok(ode_jet(&q, a, ap, order))
            }
            Base::Exp => Ok(Jet::variable(x0, order).scale(z).exp()),
        }
    }
}

/// Evaluator for a Darboux datum (or the exponential pair).
#[derive(Clone, Debug)]
pub struct PsiEval {
    base: Base,
    p: DiffOp,
    normalizer: UniPoly,
    dual: Option<(DiffOp, UniPoly)>,
}

impl PsiEval {
    pub fn new(d: &DarbouxData) -> Self {
        PsiEval { base: Base::of(&d.family), p: d.p(), normalizer: d.normalizer.clone(), dual: None }
    }

    /// Also enables the z-route `Psi = v(x)^{-1} Q(z, d_z) Psi_0`.
    pub fn with_dual(c: &Certified) -> Self {
        let d = c.data();
        let mut e = PsiEval::new(d);
        e.dual = Some((c.dual().q.clone(), d.v_multiplier()));
        e
    }

    pub fn exp_pair() -> Self {
        PsiEval {
            base: Base::Exp,
            p: DiffOp::one(Var::X),
            normalizer: UniPoly::one(),
            dual: Some((DiffOp::one(Var::Z), UniPoly::one())),
        }
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn p(&self) -> &DiffOp {
        &self.p
    }

    pub fn p_order(&self) -> usize {
        self.p.order().unwrap_or(0)
    }

    /// `P` expanded at `x0`, reusable across many `z`.
    pub fn p_at(&self, x0: Complex64, order: usize) -> OpAtPoint {
        OpAtPoint::new(&self.p, x0, order + self.p_order())
    }

    fn normalizer_at(&self, z: Complex64) -> Result<Complex64, NumError> {
        let n = self.normalizer.eval_c64(z);
        if n.norm() == 0.0 {
            return Err(NumError::Pole(format!("normalizer vanishes at z = {z}")));
        }
        Ok(n)
    }

    /// Jet in x of `Psi(., z)` at `x0`, using a precomputed `p_at`.
    pub fn x_jet_with(&self, p_at: &OpAtPoint, x0: Complex64, z: Complex64, order: usize) -> Result<Jet, NumError> {
        let base = self.base.jet(x0, z, order + self.p_order())?;
        let n = self.normalizer_at(z)?;
        Ok(p_at.apply(&base).truncate(order).scale(1.0 / n))
    }

    pub fn x_jet(&self, x0: Complex64, z: Complex64, order: usize) -> Result<Jet, NumError> {
        self.x_jet_with(&self.p_at(x0, order), x0, z, order)
    }

    /// Jet in z of `Psi(x, .)` at `z0` through the dual presentation.
    pub fn z_jet(&self, x: Complex64, z0: Complex64, order: usize) -> Result<Jet, NumError> {
        let (q, v) = self.dual.as_ref().ok_or_else(|| NumError::Domain("evaluator built without the dual presentation".into()))?;
        let vx = v.eval_c64(x);
        if vx.norm() == 0.0 {
            return Err(NumError::Pole(format!("v vanishes at x = {x}")));
        }
        let q_order = q.order().unwrap_or(0);
        let base = self.base.jet(z0, x, order + q_order)?;
        let q_at = OpAtPoint::new(q, z0, order + q_order);
        Ok(q_at.apply(&base).truncate(order).scale(1.0 / vx))
    }

    pub fn value(&self, x: Complex64, z: Complex64) -> Result<Complex64, NumError> {
        Ok(self.x_jet(x, z, 0)?.value())
    }

    /// The second kernel factor: `exp(-y z)` for the exponential pair and
    /// `Psi(y, z)` otherwise.
    pub fn partner(&self, y: Complex64, z: Complex64) -> Result<Complex64, NumError> {
        match self.base {
            Base::Exp => Ok((-y * z).exp()),
            _ => self.value(y, z),
        }
    }

    /// `(R Psi)(x, z)` with `R` acting in x.
    pub fn apply_x(&self, r: &DiffOp, x: Complex64, z: Complex64) -> Result<Complex64, NumError> {
        let k = r.order().unwrap_or(0);
        let jet = self.x_jet(x, z, k)?;
        Ok(OpAtPoint::new(r, x, k).apply_value(&jet))
    }

    /// `(S Psi)(x, z)` with `S` acting in z, evaluated through the z-route.
    pub fn apply_z(&self, s: &DiffOp, x: Complex64, z: Complex64) -> Result<Complex64, NumError> {
        let k = s.order().unwrap_or(0);
        let jet = self.z_jet(x, z, k)?;
        Ok(OpAtPoint::new(s, z, k).apply_value(&jet))
    }
}

/// `Psi(x, z)` for the datum `d`.
pub fn eval_psi(d: &DarbouxData, x: Complex64, z: Complex64) -> Result<Complex64, NumError> {
    PsiEval::new(d).value(x, z)
}
