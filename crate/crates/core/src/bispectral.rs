//! The Airy and Bessel bispectral structures and their anti-isomorphisms.
//!
//! Airy: `Psi(x, z) = Ai(x + z)` with `L_A = d^2 - x`. The map `b_A` sends
//! `x -> L_A(z)` and `d_x -> d_z`, reversing products.
//!
//! Bessel: `Psi_nu(x, z) = (xz)^{1/2} J_{nu+1/2}(ixz)` with
//! `L_nu = d^2 - nu(nu+1)/x^2` and `D = x d`. The map `b_nu` sends
//! `L_nu(x) -> z^2`, `D_x -> D_z` and `x^2 -> L_nu(z)`, again reversing products.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactalg::frame::frame_coordinates;
use crate::exactalg::linalg::{independent_subset, rank_of};
use crate::exactalg::scalar::{format_scalar, is_integer, parse_scalar};
use crate::exactalg::{AlgebraError, DiffOp, RatFn, Scalar, UniPoly, Var};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Family {
    Airy,
    Bessel(Scalar),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown family `{0}` (expected `airy` or `bessel:<num>/<den>`)")]
pub struct FamilyParseError(pub String);

impl Family {
    pub fn parse(text: &str) -> Result<Self, FamilyParseError> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("airy") {
            return Ok(Family::Airy);
        }
        t.strip_prefix("bessel:")
            .and_then(parse_scalar)
            .map(Family::Bessel)
            .ok_or_else(|| FamilyParseError(text.to_string()))
    }

    pub fn nu(&self) -> Option<&Scalar> {
        match self {
            Family::Airy => None,
            Family::Bessel(nu) => Some(nu),
        }
    }

    pub fn is_bessel(&self) -> bool {
        matches!(self, Family::Bessel(_))
    }

    /// 2 for Airy and for Bessel with non-integer `nu`, 1 for integer `nu`.
    pub fn rank(&self) -> usize {
        match self {
            Family::Bessel(nu) if is_integer(nu) => 1,
            _ => 2,
        }
    }

    pub fn even_mode(&self) -> bool {
        matches!(self, Family::Bessel(nu) if is_integer(nu))
    }

    /// The operator having `Psi` as eigenfunction in `var`: `L_A` or `L_nu`.
    pub fn base_operator(&self, var: Var) -> DiffOp {
        match self {
            Family::Airy => airy_operator(var),
            Family::Bessel(nu) => bessel_operator(nu, var),
        }
    }

    /// Eigenvalue of the base operator as a polynomial in the spectral variable
    /// (`z` for Airy, `z^2` for Bessel).
    pub fn eigenvalue(&self) -> UniPoly {
        match self {
            Family::Airy => UniPoly::x(),
            Family::Bessel(_) => UniPoly::monomial(Scalar::one(), 2),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Airy => f.write_str("airy"),
            Family::Bessel(nu) => write!(f, "bessel:{}/{}", nu.numer(), nu.denom()),
        }
    }
}

impl TryFrom<String> for Family {
    type Error = FamilyParseError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Family::parse(&s)
    }
}

impl From<Family> for String {
    fn from(f: Family) -> String {
        f.to_string()
    }
}

/// `L_A = d^2 - x`.
pub fn airy_operator(var: Var) -> DiffOp {
    DiffOp::from_coeffs(var, vec![RatFn::poly(UniPoly::from_ints(&[0, -1])), RatFn::zero(), RatFn::one()])
}

/// `L_nu = d^2 - nu(nu+1)/x^2`.
pub fn bessel_operator(nu: &Scalar, var: Var) -> DiffOp {
    let c = -(nu * (nu + Scalar::one()));
    let pot = RatFn::new(UniPoly::constant(c), UniPoly::monomial(Scalar::one(), 2));
    DiffOp::from_coeffs(var, vec![pot, RatFn::zero(), RatFn::one()])
}

fn even_power(var: Var, m: usize) -> DiffOp {
    DiffOp::poly(var, UniPoly::monomial(Scalar::one(), 2 * m))
}

fn powers(op: &DiffOp, upto: usize) -> Vec<DiffOp> {
    let mut out = Vec::with_capacity(upto + 1);
    out.push(DiffOp::one(op.var()));
    for i in 0..upto {
        let next = &out[i] * op;
        out.push(next);
    }
    out
}

/// Image of an x-side operator with polynomial coefficients under `b_A`:
/// `x^m d^n -> d_z^n (d_z^2 - z)^m`.
pub fn b_airy(r: &DiffOp) -> Result<DiffOp, AlgebraError> {
    if !r.has_polynomial_coeffs() {
        return Err(AlgebraError::NotPolynomial);
    }
    let target = r.var().other();
    let max_deg = r.coeffs().iter().filter_map(|c| c.num().degree()).max().unwrap_or(0);
    let lp = powers(&airy_operator(target), max_deg);
    let d = DiffOp::d(target);
    let mut out = DiffOp::zero(target);
    for (n, c) in r.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut inner = DiffOp::zero(target);
        for (m, a) in c.num().coeffs().iter().enumerate() {
            if !a.is_zero() {
                inner = &inner + &lp[m].scale(a);
            }
        }
        out = &out + &(&d.pow(n) * &inner);
    }
    Ok(out)
}

/// Inverse of `b_A`: `z^m d_z^n -> d_x^n L_A^m`, the same closed form with the
/// roles of the variables exchanged.
pub fn b_airy_inv(s: &DiffOp) -> Result<DiffOp, AlgebraError> {
    b_airy(s)
}

/// Coordinates in the basis `{x^{2m} L^n} ∪ {x^{2m} D L^n}`, keyed by
/// `(m, n, has_D)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BasisDecomp {
    pub terms: BTreeMap<(usize, usize, bool), Scalar>,
}

impl BasisDecomp {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, m: usize, n: usize, with_d: bool) -> Scalar {
        self.terms.get(&(m, n, with_d)).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Rebuilds the operator in `var`.
    pub fn reconstruct(&self, nu: &Scalar, var: Var) -> DiffOp {
        let max_n = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let lp = powers(&bessel_operator(nu, var), max_n);
        let d = DiffOp::euler(var);
        let mut out = DiffOp::zero(var);
        for (&(m, n, with_d), c) in &self.terms {
            let mut t = lp[n].clone();
            if with_d {
                t = &d * &t;
            }
            out = &out + &(&even_power(var, m) * &t).scale(c);
        }
        out
    }
}

/// Coordinates of `r` in the basis of the subalgebra generated by `L_nu`,
/// `D` and `x^2`.
///
/// Each basis element has a single monomial leading coefficient (`x^{2m}` at
/// order `2n`, `x^{2m+1}` at order `2n+1`), so the top coefficient is cleared
/// one monomial at a time, then the next order, and so on.
pub fn decompose_bessel(r: &DiffOp, nu: &Scalar) -> Result<BasisDecomp, AlgebraError> {
    let var = r.var();
    let l = bessel_operator(nu, var);
    let d = DiffOp::euler(var);
    let mut lp = vec![DiffOp::one(var)];
    let mut out = BasisDecomp::default();
    let mut rest = r.clone();
    while let Some(k) = rest.order() {
        let lead = rest.leading_coeff();
        let p = lead.as_polynomial().ok_or(AlgebraError::NotInSubalgebra)?.clone();
        let n = k / 2;
        while lp.len() <= n {
            let next = lp.last().unwrap() * &l;
            lp.push(next);
        }
        let with_d = k % 2 == 1;
        let mut elem_base = lp[n].clone();
        if with_d {
            elem_base = &d * &elem_base;
        }
        for (j, a) in p.coeffs().iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let parity_ok = if with_d { j % 2 == 1 } else { j % 2 == 0 };
            if !parity_ok {
                return Err(AlgebraError::NotInSubalgebra);
            }
            let m = if with_d { (j - 1) / 2 } else { j / 2 };
            let elem = &even_power(var, m) * &elem_base;
            rest = &rest - &elem.scale(a);
            let slot = out.terms.entry((m, n, with_d)).or_insert_with(Scalar::zero);
            *slot += a;
            if slot.is_zero() {
                out.terms.remove(&(m, n, with_d));
            }
        }
        debug_assert!(rest.order().is_none_or(|o| o < k));
    }
    Ok(out)
}

/// `b_nu` on the subalgebra: `x^{2m} L^n -> z^{2n} L_z^m` and
/// `x^{2m} D L^n -> z^{2n} D_z L_z^m`.
pub fn b_bessel(r: &DiffOp, nu: &Scalar) -> Result<DiffOp, AlgebraError> {
    let decomp = decompose_bessel(r, nu)?;
    let target = r.var().other();
    let max_m = decomp.terms.keys().map(|k| k.0).max().unwrap_or(0);
    let lp = powers(&bessel_operator(nu, target), max_m);
    let d = DiffOp::euler(target);
    let mut out = DiffOp::zero(target);
    for (&(m, n, with_d), c) in &decomp.terms {
        let mut t = lp[m].clone();
        if with_d {
            t = &d * &t;
        }
        out = &out + &(&even_power(target, n) * &t).scale(c);
    }
    Ok(out)
}

/// Inverse of `b_nu`; the formula is symmetric under exchanging `x` and `z`.
pub fn b_bessel_inv(s: &DiffOp, nu: &Scalar) -> Result<DiffOp, AlgebraError> {
    b_bessel(s, nu)
}

/// The anti-isomorphism of the family, applied to an operator in either variable.
pub fn b_map(family: &Family, op: &DiffOp) -> Result<DiffOp, AlgebraError> {
    match family {
        Family::Airy => b_airy(op),
        Family::Bessel(nu) => b_bessel(op, nu),
    }
}

/// A space spanned by pairs `(M, b(M))` of formally symmetric operators.
#[derive(Debug, Default)]
pub struct SymSpace {
    generators: Vec<(DiffOp, DiffOp)>,
    coords: OnceLock<Vec<Vec<Scalar>>>,
    rank: OnceLock<usize>,
}

impl Clone for SymSpace {
    fn clone(&self) -> Self {
        Self::new(self.generators.clone())
    }
}

impl SymSpace {
    pub fn new(generators: Vec<(DiffOp, DiffOp)>) -> Self {
        Self { generators, coords: OnceLock::new(), rank: OnceLock::new() }
    }

    pub fn generators(&self) -> &[(DiffOp, DiffOp)] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Coordinate vectors in the frame of this space alone.
    pub fn coordinates(&self) -> &[Vec<Scalar>] {
        self.coords.get_or_init(|| pair_coordinates(self.generators.iter()))
    }

    pub fn rank(&self) -> usize {
        *self.rank.get_or_init(|| rank_of(self.coordinates()))
    }

    /// Indices of a maximal independent subset of the generators.
    pub fn basis_indices(&self) -> Vec<usize> {
        independent_subset(self.coordinates())
    }

    /// Every generator is fixed by the formal adjoint on both sides.
    pub fn all_symmetric(&self) -> bool {
        self.generators.iter().all(|(a, b)| a.is_formally_symmetric() && b.is_formally_symmetric())
    }
}

/// Frame coordinates of pairs: x-side block followed by z-side block, in a
/// frame shared by every pair of the iterator.
pub fn pair_coordinates<'a>(pairs: impl Iterator<Item = &'a (DiffOp, DiffOp)> + Clone) -> Vec<Vec<Scalar>> {
    let xs: Vec<&DiffOp> = pairs.clone().map(|p| &p.0).collect();
    let zs: Vec<&DiffOp> = pairs.map(|p| &p.1).collect();
    frame_coordinates(&xs)
        .into_iter()
        .zip(frame_coordinates(&zs))
        .map(|(mut a, b)| {
            a.extend(b);
            a
        })
        .collect()
}

/// Generators `x^m L^n + L^n x^m` (Airy) or `x^{2m} L^n + L^n x^{2m}` (Bessel)
/// for `n <= l1`, `m <= l2`, each paired with its image under `b`.
pub fn sym_filtration(family: &Family, l1: usize, l2: usize) -> SymSpace {
    let (lx, lz) = (family.base_operator(Var::X), family.base_operator(Var::Z));
    let lxp = powers(&lx, l1);
    let lzp = powers(&lz, l2);
    let step = if family.is_bessel() { 2 } else { 1 };
    let mono = |var: Var, k: usize| DiffOp::poly(var, UniPoly::monomial(Scalar::one(), step * k));
    let mut gens = Vec::with_capacity((l1 + 1) * (l2 + 1));
    for n in 0..=l1 {
        for m in 0..=l2 {
            let xm = mono(Var::X, m);
            let zn = mono(Var::Z, n);
            let xs = &(&xm * &lxp[n]) + &(&lxp[n] * &xm);
            let zs = &(&zn * &lzp[m]) + &(&lzp[m] * &zn);
            gens.push((xs, zs));
        }
    }
    SymSpace::new(gens)
}

/// `format_scalar` for `nu` in messages.
pub fn describe(family: &Family) -> String {
    match family {
        Family::Airy => "Airy".to_string(),
        Family::Bessel(nu) => format!("Bessel(nu = {})", format_scalar(nu)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::{q, qi};
    use crate::exactalg::parse_diffop;

    fn px(s: &str) -> DiffOp {
        parse_diffop(s, Var::X).unwrap()
    }
    fn pz(s: &str) -> DiffOp {
        parse_diffop(s, Var::Z).unwrap()
    }

    #[test]
    fn family_text() {
        assert_eq!(Family::parse("airy").unwrap(), Family::Airy);
        assert_eq!(Family::parse("bessel:1/2").unwrap(), Family::Bessel(q(1, 2)));
        assert_eq!(Family::parse("bessel:3").unwrap(), Family::Bessel(qi(3)));
        assert_eq!(Family::Bessel(qi(0)).to_string(), "bessel:0/1");
        assert_eq!(Family::Bessel(q(-2, 6)).to_string(), "bessel:-1/3");
        assert!(Family::parse("hermite").is_err());
        assert!(Family::parse("bessel:1/0").is_err());
        assert_eq!(Family::Airy.rank(), 2);
        assert_eq!(Family::Bessel(q(1, 3)).rank(), 2);
        assert_eq!(Family::Bessel(qi(2)).rank(), 1);
        assert!(Family::Bessel(qi(0)).even_mode());
        assert!(!Family::Bessel(q(1, 2)).even_mode() && !Family::Airy.even_mode());
    }

    #[test]
    fn airy_map_examples() {
        assert_eq!(b_airy(&DiffOp::coord(Var::X)).unwrap(), pz("Dz^2 + (-z)"));
        assert_eq!(b_airy(&DiffOp::d(Var::X)).unwrap(), DiffOp::d(Var::Z));
        assert_eq!(b_airy(&DiffOp::euler(Var::X)).unwrap(), pz("Dz^3 + (-z) * Dz + (-1)"));
        assert_eq!(b_airy(&airy_operator(Var::X)).unwrap(), DiffOp::coord(Var::Z));
        let inv = DiffOp::function(Var::X, RatFn::recip_poly(&UniPoly::x()));
        assert_eq!(b_airy(&inv), Err(AlgebraError::NotPolynomial));
    }

    #[test]
    fn airy_inverse_examples() {
        assert_eq!(b_airy_inv(&DiffOp::coord(Var::Z)).unwrap(), airy_operator(Var::X));
        assert_eq!(b_airy_inv(&DiffOp::d(Var::Z)).unwrap(), DiffOp::d(Var::X));
        assert_eq!(b_airy_inv(&pz("Dz^3 + (-z) * Dz + (-1)")).unwrap(), DiffOp::euler(Var::X));
        let r = px("(x^3 - 2) * Dx^2 + (x) * Dx + (5)");
        assert_eq!(b_airy_inv(&b_airy(&r).unwrap()).unwrap(), r);
    }

    #[test]
    fn bessel_decomposition() {
        let nu = q(1, 3);
        let l = bessel_operator(&nu, Var::X);
        let dec = decompose_bessel(&l, &nu).unwrap();
        assert_eq!(dec.terms.len(), 1);
        assert_eq!(dec.get(0, 1, false), qi(1));
        let x2 = even_power(Var::X, 1);
        let s = &(&x2 * &l) + &(&l * &x2);
        let dec = decompose_bessel(&s, &nu).unwrap();
        assert_eq!(dec.reconstruct(&nu, Var::X), s);
        // x^2 L + L x^2 = 2 x^2 L + 4 D + 2, since [L, x^2] = 4x d + 2.
        assert_eq!(dec.get(1, 1, false), qi(2));
        assert_eq!(dec.get(0, 0, true), qi(4));
        assert_eq!(dec.get(0, 0, false), qi(2));
        assert_eq!(decompose_bessel(&DiffOp::d(Var::X), &nu), Err(AlgebraError::NotInSubalgebra));
        assert_eq!(decompose_bessel(&DiffOp::coord(Var::X), &nu), Err(AlgebraError::NotInSubalgebra));
        assert!(decompose_bessel(&DiffOp::zero(Var::X), &nu).unwrap().is_empty());
    }

    #[test]
    fn bessel_map_examples() {
        let nu = q(1, 3);
        let lz = bessel_operator(&nu, Var::Z);
        assert_eq!(b_bessel(&even_power(Var::X, 1), &nu).unwrap(), lz);
        assert_eq!(b_bessel(&DiffOp::euler(Var::X), &nu).unwrap(), DiffOp::euler(Var::Z));
        let x2d = &even_power(Var::X, 1) * &DiffOp::euler(Var::X);
        assert_eq!(b_bessel(&x2d, &nu).unwrap(), &DiffOp::euler(Var::Z) * &lz);
        assert_eq!(b_bessel(&bessel_operator(&nu, Var::X), &nu).unwrap(), even_power(Var::Z, 1));
        let back = b_bessel_inv(&b_bessel(&x2d, &nu).unwrap(), &nu).unwrap();
        assert_eq!(back, x2d);
    }

    #[test]
    fn small_filtrations() {
        let s = sym_filtration(&Family::Airy, 0, 0);
        assert_eq!(s.len(), 1);
        assert_eq!(s.generators()[0].0, DiffOp::scalar(Var::X, qi(2)));
        assert_eq!(s.rank(), 1);
        let s = sym_filtration(&Family::Airy, 2, 3);
        assert_eq!(s.rank(), 12);
        assert!(s.all_symmetric());
        let s = sym_filtration(&Family::Bessel(q(1, 2)), 3, 3);
        assert_eq!(s.rank(), 16);
        assert!(s.all_symmetric());
        for (x, z) in s.generators() {
            assert_eq!(&b_bessel(x, &q(1, 2)).unwrap(), z);
        }
    }

    #[test]
    fn b_of_generators_matches_closed_form() {
        let s = sym_filtration(&Family::Airy, 2, 2);
        for (x, z) in s.generators() {
            assert_eq!(&b_airy(x).unwrap(), z);
        }
    }
}
