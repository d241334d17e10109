//! The spaces `S_1 = span{P M a(P)}` and `S_2 = span{v M v}` of doubly
//! formally symmetric operators, and the dimension bounds they satisfy.

use rayon::prelude::*;

use super::{certify, Certified, DarbouxData, DarbouxError};
use crate::bispectral::{pair_coordinates, sym_filtration, SymSpace};
use crate::exactalg::linalg::rank_of;
use crate::exactalg::{DiffOp, RatFn, Var};

/// Generators of `S_1` (over `M` in the filtration with `l1 - rho1, l2`) and
/// `S_2` (over `l1, l2 - rho2`), each paired with its `b_Psi` image:
///
/// * `P M a(P)  ->  eps * n * b(M) * n`
/// * `v M v     ->  sign * Q * b(M) * a(Q)`, `Q = n^{-1} b(R)`.
pub fn s_spaces(c: &Certified, l1: usize, l2: usize) -> (SymSpace, SymSpace) {
    let d = c.data();
    let (rho1, rho2) = c.rho();
    let p = d.p();
    let ap = p.adjoint();
    let n = DiffOp::poly(Var::Z, d.normalizer.clone());
    let eps = d.epsilon.scalar();
    let s1 = if l1 >= rho1 {
        let base = sym_filtration(&d.family, l1 - rho1, l2);
        let gens = base
            .generators()
            .par_iter()
            .map(|(mx, mz)| {
                let x = &(&p * mx) * &ap;
                let z = (&(&n * mz) * &n).scale(&eps);
                (x, z)
            })
            .collect();
        SymSpace::new(gens)
    } else {
        SymSpace::new(Vec::new())
    };
    let s2 = if l2 >= rho2 {
        let base = sym_filtration(&d.family, l1, l2 - rho2);
        let v = DiffOp::function(Var::X, RatFn::poly(d.v_multiplier()));
        let q = &c.dual().q;
        let aq = q.adjoint();
        let sign = c.dual().sign.scalar();
        let gens = base
            .generators()
            .par_iter()
            .map(|(mx, mz)| {
                let x = &(&v * mx) * &v;
                let z = (&(q * mz) * &aq).scale(&sign);
                (x, z)
            })
            .collect();
        SymSpace::new(gens)
    } else {
        SymSpace::new(Vec::new())
    };
    (s1, s2)
}

/// Exact ranks of `S_1`, `S_2`, their sum and intersection, with the bounds
/// `dim(S_1 + S_2) >= (l1+1)(l2+1) - rho1 rho2` and
/// `dim(S_1 ∩ S_2) <= (l1-rho1+1)(l2-rho2+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimReport {
    pub l1: usize,
    pub l2: usize,
    pub rho1: usize,
    pub rho2: usize,
    pub dim_s1: usize,
    pub dim_s2: usize,
    pub dim_sum: usize,
    pub dim_intersection: usize,
    pub sum_lower_bound: i64,
    pub intersection_upper_bound: i64,
    pub all_symmetric: bool,
    pub parity_invariant: Option<bool>,
}

impl DimReport {
    pub fn sum_bound_holds(&self) -> bool {
        self.dim_sum as i64 >= self.sum_lower_bound
    }

    pub fn intersection_bound_holds(&self) -> bool {
        self.dim_intersection as i64 <= self.intersection_upper_bound
    }

    pub fn passed(&self) -> bool {
        self.sum_bound_holds() && self.intersection_bound_holds() && self.all_symmetric && self.parity_invariant != Some(false)
    }
}

pub fn dim_report(c: &Certified, l1: usize, l2: usize) -> DimReport {
    let (rho1, rho2) = c.rho();
    let (s1, s2) = s_spaces(c, l1, l2);
    let dim_s1 = s1.rank();
    let dim_s2 = s2.rank();
    let joint = pair_coordinates(s1.generators().iter().chain(s2.generators()));
    let dim_sum = rank_of(&joint);
    let all_symmetric = s1.all_symmetric() && s2.all_symmetric();
    let parity_invariant = c.data().family.even_mode().then(|| {
        s1.generators().iter().chain(s2.generators()).all(|(x, _)| x.is_reflection_invariant())
    });
    let (l1i, l2i, r1, r2) = (l1 as i64, l2 as i64, rho1 as i64, rho2 as i64);
    let upper = if l1 >= rho1 && l2 >= rho2 { (l1i - r1 + 1) * (l2i - r2 + 1) } else { 0 };
    DimReport {
        l1,
        l2,
        rho1,
        rho2,
        dim_s1,
        dim_s2,
        dim_sum,
        dim_intersection: dim_s1 + dim_s2 - dim_sum,
        sum_lower_bound: (l1i + 1) * (l2i + 1) - r1 * r2,
        intersection_upper_bound: upper,
        all_symmetric,
        parity_invariant,
    }
}

/// Computes the report and turns a failed bound into an error.
pub fn dim_bounds_check(d: &DarbouxData, l1: usize, l2: usize) -> Result<DimReport, DarbouxError> {
    let c = certify(d).map_err(|e| DarbouxError::UnverifiedData(Box::new(e)))?;
    let report = dim_report(&c, l1, l2);
    if !report.passed() {
        return Err(DarbouxError::BoundViolated(format!("{report:?}")));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bispectral::Family;
    use crate::darboux::ladder;
    use crate::exactalg::q;

    #[test]
    fn identity_spaces_coincide() {
        let c = certify(&DarbouxData::identity(Family::Airy)).unwrap();
        let r = dim_report(&c, 2, 2);
        assert_eq!((r.dim_s1, r.dim_s2, r.dim_sum, r.dim_intersection), (9, 9, 9, 9));
        assert!(r.passed());
    }

    #[test]
    fn ladder_bounds() {
        let d = ladder(&q(1, 2), 2).unwrap();
        let r = dim_bounds_check(&d, 3, 3).unwrap();
        assert!(r.dim_sum >= 12);
        let c = certify(&d).unwrap();
        let r = dim_report(&c, 1, 1);
        assert_eq!((r.dim_s1, r.dim_s2, r.dim_sum), (0, 0, 0));
    }

    #[test]
    fn even_mode_parity() {
        let d = ladder(&q(0, 1), 2).unwrap();
        let r = dim_bounds_check(&d, 3, 3).unwrap();
        assert_eq!(r.parity_invariant, Some(true));
    }
}
