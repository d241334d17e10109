//! Boundary bilinear forms, symmetric normal forms and the jet conditions
//! under which boundary terms of integration by parts vanish.

use num_complex::Complex64;

use super::diffop::{DiffOp, Var};
use super::ratfn::RatFn;
use super::scalar::{binomial, GaussRat, Scalar};
use super::AlgebraError;

/// Bilinear form in the jets of two functions at a point:
/// `(f, g) -> sum_{j,i} B[j][i] f^(j)(xi) g^(i)(xi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetForm {
    pub xi: GaussRat,
    pub matrix: Vec<Vec<GaussRat>>,
}

impl JetForm {
    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(GaussRat::is_zero)
    }

    pub fn size(&self) -> usize {
        self.matrix.len()
    }

    /// Evaluates the form on derivative lists `f[j] = f^(j)(xi)`, `g[i] = g^(i)(xi)`.
    pub fn apply(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, row) in self.matrix.iter().enumerate() {
            for (i, b) in row.iter().enumerate() {
                if !b.is_zero() {
                    acc += b.to_c64() * f[j] * g[i];
                }
            }
        }
        acc
    }
}

fn derivative_values(c: &RatFn, upto: usize, xi: &GaussRat) -> Result<Vec<GaussRat>, AlgebraError> {
    let mut out = Vec::with_capacity(upto + 1);
    let mut cur = c.clone();
    for _ in 0..=upto {
        out.push(cur.eval_gauss(xi).ok_or_else(|| AlgebraError::Pole { at: xi.to_string() })?);
        cur = cur.derivative();
    }
    Ok(out)
}

/// The form produced at `xi` when integrating `(D f) g` by parts:
/// `sum_k sum_{i<k} (-1)^i f^(k-i-1)(xi) (d^i (b_k g))(xi)`, with every
/// `d^i (b_k g)` expanded into jets of `g` by the Leibniz rule.
pub fn boundary_form(op: &DiffOp, xi: &GaussRat) -> Result<JetForm, AlgebraError> {
    let n = op.order().unwrap_or(0);
    let mut matrix = vec![vec![GaussRat::zero(); n]; n];
    for (k, b) in op.coeffs().iter().enumerate().skip(1) {
        if b.is_zero() {
            continue;
        }
        let db = derivative_values(b, k - 1, xi)?;
        for i in 0..k {
            let sign = if i % 2 == 0 { Scalar::from_integer(1.into()) } else { Scalar::from_integer((-1).into()) };
            let j = k - i - 1;
            // d^i (b g) = sum_l C(i, l) b^(i-l) g^(l)
            for l in 0..=i {
                let w = &db[i - l];
                if w.is_zero() {
                    continue;
                }
                let term = w.scale(&(&sign * binomial(i, l)));
                matrix[j][l] = &matrix[j][l] + &term;
            }
        }
    }
    Ok(JetForm { xi: xi.clone(), matrix })
}

/// Coefficients `[c_0, ..., c_n]` of a formally symmetric operator written
/// as `sum_i d^i c_i d^i`. (The derivative power on each side is `i`, the
/// summation index.)
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymForm {
    pub var: Var,
    pub c: Vec<RatFn>,
}

impl SymForm {
    pub fn reconstruct(&self) -> DiffOp {
        let mut acc = DiffOp::zero(self.var);
        for (i, c) in self.c.iter().enumerate() {
            let di = DiffOp::d(self.var).pow(i);
            let term = &(&di * &DiffOp::function(self.var, c.clone())) * &di;
            acc = &acc + &term;
        }
        acc
    }

    pub fn half_order(&self) -> usize {
        self.c.len().saturating_sub(1)
    }
}

/// Peels a formally symmetric operator from the top: the leading coefficient
/// of an order-`2n` symmetric operator is `c_n`, and subtracting
/// `d^n c_n d^n` leaves a symmetric operator of order at most `2n - 2`.
pub fn symmetric_form(op: &DiffOp) -> Result<SymForm, AlgebraError> {
    if !op.is_formally_symmetric() {
        return Err(AlgebraError::NotSymmetric);
    }
    let var = op.var();
    let Some(order) = op.order() else {
        return Ok(SymForm { var, c: Vec::new() });
    };
    let mut c = vec![RatFn::zero(); order / 2 + 1];
    let mut rest = op.clone();
    while let Some(k) = rest.order() {
        if k % 2 == 1 {
            return Err(AlgebraError::OddOrder);
        }
        let n = k / 2;
        let lead = rest.leading_coeff();
        let dn = DiffOp::d(var).pow(n);
        let term = &(&dn * &DiffOp::function(var, lead.clone())) * &dn;
        rest = &rest - &term;
        c[n] = lead;
    }
    Ok(SymForm { var, c })
}

/// One scalar condition `(d^i c_k)(xi) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetCondition {
    pub k: usize,
    pub i: usize,
    pub value: GaussRat,
}

/// The conditions `(d^i c_k)(xi) = 0` for `k = 1..n`, `i = 0..k-1`; their joint
/// vanishing is equivalent to the boundary form of `sum d^i c_i d^i` vanishing at `xi`.
pub fn jet_constraints(sf: &SymForm, xi: &GaussRat) -> Result<Vec<JetCondition>, AlgebraError> {
    let mut out = Vec::new();
    for (k, ck) in sf.c.iter().enumerate().skip(1) {
        let vals = derivative_values(ck, k - 1, xi)?;
        out.extend(vals.into_iter().enumerate().map(|(i, value)| JetCondition { k, i, value }));
    }
    Ok(out)
}

/// Number of conditions contributed by a symmetric operator of half-order `n`.
pub fn constraint_count(n: usize) -> usize {
    n * (n + 1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::UniPoly;
    use crate::exactalg::scalar::{q, qi};

    fn d() -> DiffOp {
        DiffOp::d(Var::X)
    }

    fn real(s: Scalar) -> GaussRat {
        GaussRat::real(s)
    }

    #[test]
    fn order_zero_has_empty_form() {
        let f = boundary_form(&DiffOp::coord(Var::X), &real(qi(3))).unwrap();
        assert!(f.is_zero());
        assert_eq!(f.size(), 0);
    }

    #[test]
    fn second_derivative_form() {
        // f'(0) g(0) - f(0) g'(0)
        let f = boundary_form(&d().pow(2), &real(qi(0))).unwrap();
        assert_eq!(f.matrix[1][0], GaussRat::one());
        assert_eq!(f.matrix[0][1], real(qi(-1)));
        assert!(f.matrix[0][0].is_zero() && f.matrix[1][1].is_zero());
    }

    #[test]
    fn first_derivative_form() {
        let f = boundary_form(&d(), &real(qi(1))).unwrap();
        assert_eq!(f.matrix, vec![vec![GaussRat::one()]]);
    }

    #[test]
    fn pole_is_reported() {
        let op = DiffOp::from_coeffs(Var::X, vec![RatFn::zero(), RatFn::recip_poly(&UniPoly::x())]);
        assert!(matches!(boundary_form(&op, &real(qi(0))), Err(AlgebraError::Pole { .. })));
    }

    #[test]
    fn symmetric_form_examples() {
        let sf = symmetric_form(&d().pow(2)).unwrap();
        assert_eq!(sf.c, vec![RatFn::zero(), RatFn::one()]);
        // d (1 - x^2) d - 4 x^2
        let c1 = RatFn::poly(UniPoly::from_ints(&[1, 0, -1]));
        let c0 = RatFn::poly(UniPoly::from_ints(&[0, 0, -4]));
        let prolate = SymForm { var: Var::X, c: vec![c0.clone(), c1.clone()] }.reconstruct();
        assert_eq!(symmetric_form(&prolate).unwrap().c, vec![c0, c1]);
        assert_eq!(symmetric_form(&DiffOp::euler(Var::X)), Err(AlgebraError::NotSymmetric));
    }

    #[test]
    fn jet_condition_lists() {
        let c = |p: &[i64]| RatFn::poly(UniPoly::from_ints(p));
        let xi = real(q(1, 2));
        let one = SymForm { var: Var::X, c: vec![c(&[1]), c(&[0, 1])] };
        let conds = jet_constraints(&one, &xi).unwrap();
        assert_eq!(conds.len(), 1);
        assert_eq!((conds[0].k, conds[0].i), (1, 0));
        assert_eq!(conds[0].value, real(q(1, 2)));
        let two = SymForm { var: Var::X, c: vec![c(&[1]), c(&[1]), c(&[0, 0, 1])] };
        let conds = jet_constraints(&two, &xi).unwrap();
        let idx: Vec<(usize, usize)> = conds.iter().map(|c| (c.k, c.i)).collect();
        assert_eq!(idx, vec![(1, 0), (2, 0), (2, 1)]);
        assert!(jet_constraints(&SymForm { var: Var::X, c: vec![c(&[3])] }, &xi).unwrap().is_empty());
    }

    #[test]
    fn complex_point_evaluation() {
        let c1 = RatFn::poly(UniPoly::from_ints(&[4, 0, 1])); // z^2 + 4 vanishes at 2i
        let sf = SymForm { var: Var::Z, c: vec![RatFn::zero(), c1] };
        let conds = jet_constraints(&sf, &GaussRat::new(qi(0), qi(2))).unwrap();
        assert!(conds[0].value.is_zero());
    }
}
