use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::One;

use super::poly::UniPoly;
use super::ratfn::RatFn;
use super::scalar::{binomial, Scalar};
use super::AlgebraError;

/// Which side of the bispectral pair an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Z,
}

impl Var {
    pub fn name(self) -> char {
        match self {
            Var::X => 'x',
            Var::Z => 'z',
        }
    }

    pub fn other(self) -> Var {
        match self {
            Var::X => Var::Z,
            Var::Z => Var::X,
        }
    }
}

/// Differential operator `sum_k c_k(var) d^k` with rational coefficients,
/// always kept with coefficients on the left.
///
/// `coeffs[k]` is `c_k`; the vector carries no trailing zero coefficients, so
/// the zero operator has no coefficients and `order()` returns `None`, which
/// sorts below every `Some(k)` and plays the role of order `-inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffOp {
    var: Var,
    coeffs: Vec<RatFn>,
}

impl DiffOp {
    pub fn zero(var: Var) -> Self {
        Self { var, coeffs: Vec::new() }
    }

    pub fn one(var: Var) -> Self {
        Self::function(var, RatFn::one())
    }

    pub fn scalar(var: Var, c: Scalar) -> Self {
        Self::function(var, RatFn::constant(c))
    }

    /// Multiplication by a rational function.
    pub fn function(var: Var, f: RatFn) -> Self {
        Self::from_coeffs(var, vec![f])
    }

    pub fn poly(var: Var, p: UniPoly) -> Self {
        Self::function(var, RatFn::poly(p))
    }

    /// Multiplication by the coordinate.
    pub fn coord(var: Var) -> Self {
        Self::poly(var, UniPoly::x())
    }

    /// The derivation `d/dvar`.
    pub fn d(var: Var) -> Self {
        Self::from_coeffs(var, vec![RatFn::zero(), RatFn::one()])
    }

    /// Euler operator `var * d/dvar`.
    pub fn euler(var: Var) -> Self {
        Self::from_coeffs(var, vec![RatFn::zero(), RatFn::poly(UniPoly::x())])
    }

    pub fn from_coeffs(var: Var, mut coeffs: Vec<RatFn>) -> Self {
        while coeffs.last().is_some_and(RatFn::is_zero) {
            coeffs.pop();
        }
        Self { var, coeffs }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    /// Same coefficients, read as an operator in the other variable.
    pub fn with_var(&self, var: Var) -> Self {
        Self { var, coeffs: self.coeffs.clone() }
    }

    pub fn coeffs(&self) -> &[RatFn] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> RatFn {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        match self.coeffs.len() {
            0 => true,
            1 => self.coeffs[0].as_constant().is_some(),
            _ => false,
        }
    }

    pub fn leading_coeff(&self) -> RatFn {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn has_polynomial_coeffs(&self) -> bool {
        self.coeffs.iter().all(RatFn::is_polynomial)
    }

    /// Least common multiple of the coefficient denominators (monic).
    pub fn denominator_lcm(&self) -> UniPoly {
        self.coeffs.iter().fold(UniPoly::one(), |acc, c| {
            let g = acc.gcd(c.den());
            &acc * &c.den().div_rem(&g).0
        })
    }

    pub fn is_regular_at(&self, x: &Scalar) -> bool {
        self.coeffs.iter().all(|c| c.is_regular_at(x))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::from_coeffs(self.var, self.coeffs.iter().map(|a| a.scale(c)).collect())
    }

    /// `f * self` for a rational function `f`.
    pub fn lmul_fn(&self, f: &RatFn) -> Self {
        Self::from_coeffs(self.var, self.coeffs.iter().map(|a| a * f).collect())
    }

    /// Product in the operator algebra; errors when the variables differ.
    pub fn try_mul(&self, rhs: &DiffOp) -> Result<DiffOp, AlgebraError> {
        if self.var != rhs.var {
            return Err(AlgebraError::VarMismatch);
        }
        let (Some(na), Some(nb)) = (self.order(), rhs.order()) else {
            return Ok(Self::zero(self.var));
        };
        // derivs[j][l] = (d/dx)^l b_j for l <= na
        let derivs: Vec<Vec<RatFn>> = rhs
            .coeffs
            .iter()
            .map(|b| {
                let mut row = Vec::with_capacity(na + 1);
                let mut cur = b.clone();
                for _ in 0..=na {
                    let next = cur.derivative();
                    row.push(cur);
                    if next.is_zero() {
                        break;
                    }
                    cur = next;
                }
                row
            })
            .collect();
        let mut out = vec![RatFn::zero(); na + nb + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, row) in derivs.iter().enumerate() {
                for (l, bl) in row.iter().enumerate().take(i + 1) {
                    if bl.is_zero() {
                        continue;
                    }
                    let c = binomial(i, l);
                    let term = (a * bl).scale(&c);
                    let slot = &mut out[i - l + j];
                    *slot = &*slot + &term;
                }
            }
        }
        Ok(Self::from_coeffs(self.var, out))
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::one(self.var);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Formal adjoint `sum_k (-d)^k o c_k`, renormalized with coefficients on the left.
    pub fn adjoint(&self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![RatFn::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // d^k c = sum_l C(k, l) c^{(k - l)} d^l
            let mut derivs = Vec::with_capacity(k + 1);
            let mut cur = c.clone();
            for _ in 0..=k {
                let next = cur.derivative();
                derivs.push(cur);
                cur = next;
            }
            let sign = if k % 2 == 0 { Scalar::one() } else { -Scalar::one() };
            for (l, slot) in out.iter_mut().enumerate().take(k + 1) {
                let dc = &derivs[k - l];
                if dc.is_zero() {
                    continue;
                }
                *slot = &*slot + &dc.scale(&(&sign * binomial(k, l)));
            }
        }
        Self::from_coeffs(self.var, out)
    }

    pub fn is_formally_symmetric(&self) -> bool {
        self.adjoint() == *self
    }

    /// The substitution `x -> -x` (so `d -> -d`).
    pub fn reflect(&self) -> Self {
        Self::from_coeffs(
            self.var,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let r = c.reflect();
                    if k % 2 == 1 {
                        -&r
                    } else {
                        r
                    }
                })
                .collect(),
        )
    }

    pub fn is_reflection_invariant(&self) -> bool {
        self.reflect() == *self
    }
}

impl Add for &DiffOp {
    type Output = DiffOp;
    fn add(self, rhs: &DiffOp) -> DiffOp {
        assert_eq!(self.var, rhs.var, "adding operators in different variables");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        DiffOp::from_coeffs(self.var, (0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl Sub for &DiffOp {
    type Output = DiffOp;
    fn sub(self, rhs: &DiffOp) -> DiffOp {
        self + &(-rhs)
    }
}

impl Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        DiffOp { var: self.var, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

/// Panics on a variable mismatch; use [`DiffOp::try_mul`] to handle it.
impl Mul for &DiffOp {
    type Output = DiffOp;
    fn mul(self, rhs: &DiffOp) -> DiffOp {
        self.try_mul(rhs).expect("multiplying operators in different variables")
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::grammar::format_diffop(self))
    }
}

/// Builds `sum_k scalar * var^a d^b` from `(coefficient, a, b)` triples.
pub fn from_terms(var: Var, terms: &[(Scalar, usize, usize)]) -> DiffOp {
    let mut coeffs: Vec<UniPoly> = Vec::new();
    for (c, a, b) in terms {
        if coeffs.len() <= *b {
            coeffs.resize(b + 1, UniPoly::zero());
        }
        coeffs[*b] = &coeffs[*b] + &UniPoly::monomial(c.clone(), *a);
    }
    DiffOp::from_coeffs(var, coeffs.into_iter().map(RatFn::poly).collect())
}

/// Sum of a list of operators in the same variable.
pub fn sum_ops<'a>(var: Var, ops: impl IntoIterator<Item = &'a DiffOp>) -> DiffOp {
    ops.into_iter().fold(DiffOp::zero(var), |acc, op| &acc + op)
}

impl DiffOp {
    /// Applies `self` to a polynomial or rational function, returning the image function.
    pub fn apply_fn(&self, f: &RatFn) -> RatFn {
        let mut acc = RatFn::zero();
        let mut cur = f.clone();
        for c in &self.coeffs {
            acc = &acc + &(c * &cur);
            cur = cur.derivative();
        }
        acc
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].as_constant().is_some_and(|c| c.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::{q, qi};

    fn x() -> DiffOp {
        DiffOp::coord(Var::X)
    }
    fn d() -> DiffOp {
        DiffOp::d(Var::X)
    }

    #[test]
    fn leibniz_relation() {
        // d * x = x d + 1
        let lhs = &d() * &x();
        let rhs = &(&x() * &d()) + &DiffOp::one(Var::X);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn variable_mismatch_is_an_error() {
        assert_eq!(d().try_mul(&DiffOp::d(Var::Z)), Err(AlgebraError::VarMismatch));
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(d().adjoint(), -&d());
        // a(x d^2) = x d^2 + 2 d
        let xd2 = &x() * &d().pow(2);
        let expected = &xd2 + &d().scale(&qi(2));
        assert_eq!(xd2.adjoint(), expected);
        let airy = &d().pow(2) - &x();
        assert_eq!(airy.adjoint(), airy);
    }

    #[test]
    fn adjoint_of_rational_coefficient() {
        // a(1/x d) = -d o 1/x = -1/x d + 1/x^2
        let inv_x = RatFn::recip_poly(&UniPoly::x());
        let op = DiffOp::from_coeffs(Var::X, vec![RatFn::zero(), inv_x.clone()]);
        let expected = DiffOp::from_coeffs(Var::X, vec![inv_x.pow(2), -&inv_x]);
        assert_eq!(op.adjoint(), expected);
    }

    #[test]
    fn reflection() {
        let op = &(&x() * &d()) + &d().pow(2);
        assert!(op.is_reflection_invariant());
        assert!(!d().is_reflection_invariant());
        assert_eq!(d().reflect(), -&d());
    }

    #[test]
    fn zero_order_is_minus_infinity() {
        assert_eq!(DiffOp::zero(Var::X).order(), None);
        assert!(DiffOp::zero(Var::X).order() < Some(0));
        assert_eq!(DiffOp::scalar(Var::X, q(1, 2)).order(), Some(0));
    }

    #[test]
    fn apply_to_functions() {
        let f = RatFn::poly(UniPoly::from_ints(&[0, 0, 0, 1]));
        // (x d) x^3 = 3 x^3
        assert_eq!(DiffOp::euler(Var::X).apply_fn(&f), f.scale(&qi(3)));
    }
}
