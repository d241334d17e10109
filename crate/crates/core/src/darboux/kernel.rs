//! Building `P` from a basis of its kernel.

use num_traits::{One, Zero};

use super::{as_poly_in, certify, DarbouxData, DarbouxError, Sign};
use crate::bispectral::Family;
use crate::exactalg::{DiffOp, RatFn, Scalar, UniPoly, Var};

/// A symbolic kernel function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Seed {
    /// `x^alpha q(x)`.
    Power { alpha: Scalar, q: UniPoly },
    /// The two-dimensional space `{ y^(k)(x + lambda) : y'' = x y }`.
    AiryJet { lambda: Scalar, k: usize },
}

pub type SeedFunctions = Vec<Seed>;

impl Seed {
    pub fn power(alpha: Scalar) -> Self {
        Seed::Power { alpha, q: UniPoly::one() }
    }

    fn dimension(&self) -> usize {
        match self {
            Seed::Power { .. } => 1,
            Seed::AiryJet { .. } => 2,
        }
    }

    /// Rows `r_j`, `j = 0..=n`, such that `P s = 0` for `P = sum p_j d^j`
    /// reads `sum_j p_j r_j = 0` row by row.
    fn equations(&self, n: usize) -> Vec<Vec<RatFn>> {
        match self {
            Seed::Power { alpha, q } => {
                // d^j (x^a r) = x^a (r' + a r / x)
                let a_over_x = RatFn::new(UniPoly::constant(alpha.clone()), UniPoly::x());
                let mut r = RatFn::poly(q.clone());
                let mut row = Vec::with_capacity(n + 1);
                for _ in 0..=n {
                    let next = &r.derivative() + &(&a_over_x * &r);
                    row.push(r);
                    r = next;
                }
                vec![row]
            }
            Seed::AiryJet { lambda, k } => {
                // y^(j) = A_j y + B_j y' with y'' = (x + lambda) y
                let shift = RatFn::poly(UniPoly::from_coeffs(vec![lambda.clone(), Scalar::one()]));
                let step = |(a, b): (RatFn, RatFn)| {
                    let na = &a.derivative() + &(&shift * &b);
                    let nb = &a + &b.derivative();
                    (na, nb)
                };
                let mut cur = (RatFn::one(), RatFn::zero());
                for _ in 0..*k {
                    cur = step(cur);
                }
                let (mut ra, mut rb) = (Vec::with_capacity(n + 1), Vec::with_capacity(n + 1));
                for _ in 0..=n {
                    ra.push(cur.0.clone());
                    rb.push(cur.1.clone());
                    cur = step(cur);
                }
                vec![ra, rb]
            }
        }
    }
}

/// Solves a square system over Q(x); `None` when it is singular.
fn solve(mut a: Vec<Vec<RatFn>>, mut b: Vec<RatFn>) -> Option<Vec<RatFn>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] = &a[r][c] - &t;
            }
            let t = &f * &b[col];
            b[r] = &b[r] - &t;
        }
    }
    Some(b)
}

/// The monic operator of least order annihilating every seed.
pub fn annihilator(seeds: &[Seed]) -> Result<DiffOp, DarbouxError> {
    let n: usize = seeds.iter().map(Seed::dimension).sum();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for s in seeds {
        for mut row in s.equations(n) {
            let last = row.pop().expect("n + 1 entries");
            b.push(-&last);
            a.push(row);
        }
    }
    let mut p = solve(a, b).ok_or(DarbouxError::SeedsDependent)?;
    p.push(RatFn::one());
    Ok(DiffOp::from_coeffs(Var::X, p))
}

/// Splits `f = eps * f0` into the `(g, m)` parametrization of the family.
fn parametrize(family: &Family, f: &UniPoly) -> Option<(Sign, UniPoly, usize)> {
    for sign in [Sign::Plus, Sign::Minus] {
        let h = f.scale(&sign.scalar());
        match family {
            Family::Airy => {
                if let Some(g) = h.sqrt().filter(|g| !g.is_zero()) {
                    return Some((sign, g, 0));
                }
            }
            Family::Bessel(_) => {
                let j = h.coeffs().iter().position(|c| !c.is_zero())?;
                if j % 2 == 1 {
                    continue;
                }
                let rest = UniPoly::from_coeffs(h.coeffs()[j..].to_vec());
                let Some(s) = rest.sqrt() else { continue };
                if s.coeffs().iter().skip(1).step_by(2).any(|c| !c.is_zero()) {
                    continue;
                }
                let g = UniPoly::from_coeffs(s.coeffs().iter().step_by(2).cloned().collect());
                return Some((sign, g, j / 2));
            }
        }
    }
    None
}

/// Clears the denominators of `P`, choosing a multiplier of the form `v(x^2)`
/// for Bessel data.
fn split_denominator(family: &Family, p: &DiffOp) -> (UniPoly, UniPoly) {
    let mut mult = p.denominator_lcm();
    if family.is_bessel() {
        let refl = mult.reflect();
        let g = mult.gcd(&refl);
        mult = (&mult * &refl.div_rem(&g).0).monic();
        if mult.coeffs().iter().skip(1).step_by(2).any(|c| !c.is_zero()) {
            mult = mult.shift_up(1);
        }
        let v = UniPoly::from_coeffs(mult.coeffs().iter().step_by(2).cloned().collect());
        (mult, v)
    } else {
        (mult.clone(), mult)
    }
}

/// Builds the datum whose `P` is the monic annihilator of the seeds, infers
/// `f` from `a(P) P = F(L)` and certifies the result.
pub fn darboux_from_kernel(family: &Family, seeds: &[Seed]) -> Result<DarbouxData, DarbouxError> {
    if family.is_bessel() && seeds.iter().any(|s| matches!(s, Seed::AiryJet { .. })) {
        return Err(DarbouxError::InvalidSeed("Airy jets need the Airy family".into()));
    }
    if seeds.is_empty() {
        return Ok(DarbouxData::identity(family.clone()));
    }
    let p = annihilator(seeds)?;
    let (mult, v) = split_denominator(family, &p);
    let r = p.lmul_fn(&RatFn::poly(mult));
    let product = &p.adjoint() * &p;
    let base = family.base_operator(Var::X);
    let Some(big_f) = as_poly_in(&product, &base) else {
        return Err(DarbouxError::FactorizationFails { residual: product });
    };
    let Some((epsilon, g, m)) = parametrize(family, &big_f) else {
        return Err(DarbouxError::FactorizationFails { residual: product });
    };
    let f_lambda = if family.is_bessel() {
        let g2 = g.in_square();
        (&g2 * &g2).shift_up(2 * m)
    } else {
        &g * &g
    }
    .compose(&family.eigenvalue());
    let normalizer = f_lambda.sqrt().ok_or(DarbouxError::NormalizerMismatch)?;
    let data = DarbouxData { family: family.clone(), r, v, g, m, normalizer, epsilon };
    certify(&data)?;
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::{airy_derivative_example, ladder};
    use crate::exactalg::scalar::{q, qi};

    #[test]
    fn single_power_seed() {
        let nu = q(1, 3);
        let p = annihilator(&[Seed::power(&nu + qi(1))]).unwrap();
        let expected = DiffOp::from_coeffs(
            Var::X,
            vec![RatFn::new(UniPoly::constant(-(&nu + qi(1))), UniPoly::x()), RatFn::one()],
        );
        assert_eq!(p, expected);
        let fam = Family::Bessel(nu);
        assert!(matches!(darboux_from_kernel(&fam, &[Seed::power(q(4, 3))]), Err(DarbouxError::FactorizationFails { .. })));
    }

    #[test]
    fn dependent_seeds() {
        let s = Seed::power(q(3, 2));
        let t = Seed::Power { alpha: q(3, 2), q: UniPoly::constant(qi(5)) };
        assert_eq!(annihilator(&[s, t]), Err(DarbouxError::SeedsDependent));
    }

    #[test]
    fn two_power_seeds_give_the_ladder() {
        let nu = q(1, 2);
        let fam = Family::Bessel(nu.clone());
        let d = darboux_from_kernel(&fam, &[Seed::power(&nu + qi(1)), Seed::power(&nu + qi(3))]).unwrap();
        let l = ladder(&nu, 2).unwrap();
        assert_eq!(d.p(), l.p());
        assert_eq!(d.f(), l.f());
        assert_eq!(d.normalizer, l.normalizer);
    }

    #[test]
    fn airy_jet_seed() {
        let d = darboux_from_kernel(&Family::Airy, &[Seed::AiryJet { lambda: qi(0), k: 1 }]).unwrap();
        let e = airy_derivative_example();
        assert_eq!(d.p(), e.p());
        assert_eq!(d.f(), e.f());
        assert_eq!(d.epsilon, Sign::Plus);
    }

    #[test]
    fn airy_functions_themselves() {
        // ker L_A: P = L_A, a(P) P = L_A^2, g(t) = t.
        let d = darboux_from_kernel(&Family::Airy, &[Seed::AiryJet { lambda: qi(0), k: 0 }]).unwrap();
        assert_eq!(d.p(), crate::bispectral::airy_operator(Var::X));
        assert_eq!(d.g, UniPoly::x());
    }
}
