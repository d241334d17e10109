//! Boundary conditions on the contours and the exact search for a
//! differential operator commuting with the integral operator.
//!
//! An element `(D, S)` of `S_1 + S_2` commutes with the integral operator
//! with kernel `K(x, y) = int_{Gamma_2} Psi(x, z) Psi(y, z) dz` on `Gamma_1`
//! when the boundary forms of `D` vanish at the endpoints of `Gamma_1` and
//! those of `S` at the endpoints of `Gamma_2`. Both are linear conditions on
//! the coordinates of `(D, S)`, so the commuting operators are a nullspace.

pub mod contour;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

pub use contour::{ContourConfig, ContourError, ContourSpec, Endpoint, Piece, PieceEnd};

use crate::bispectral::pair_coordinates;
use crate::darboux::{s_spaces, Certified, DarbouxError};
use crate::exactalg::grammar::format_diffop;
use crate::exactalg::linalg::{independent_subset, QMatrix};
use crate::exactalg::{boundary_form, jet_constraints, symmetric_form, AlgebraError, DiffOp, GaussRat, RatFn, Scalar, SymForm, UniPoly, Var};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CommuteError {
    #[error(transparent)]
    Darboux(#[from] DarbouxError),
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error("pole on contour: {what} vanishes at {at}")]
    PoleOnContour { what: String, at: String },
    #[error("generator is not formally symmetric on the {0} side")]
    NotSymmetricGenerator(char),
    #[error("no nonconstant solution at (l1, l2) = ({l1}, {l2}){}", if *.predicted { " although the counting condition predicts one" } else { "" })]
    NoNonconstantSolution { l1: usize, l2: usize, predicted: bool },
    #[error("no nonconstant solution with l1 + l2 <= {0}")]
    SearchBudgetExceeded(usize),
    #[error("internal check failed: {0}")]
    Internal(String),
}

/// Which inequality of the counting condition applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `dim > l1(l1+1)|e1|/2 + l2(l2+1)|e2|/2`.
    General,
    /// `dim > l1(l1+1)|e1|/4 + l2(l2+1)|e2|/4`, for parity-invariant
    /// subalgebras on symmetric contours.
    Symmetric,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counting {
    pub condition: Condition,
    /// `(l1+1)(l2+1) - rho1 rho2`.
    pub estimate: i64,
    /// Right-hand side, multiplied by 4 to stay integral.
    pub threshold_times_4: i64,
    /// The strict inequality itself.
    pub predicted: bool,
    /// The inequality with one dimension set aside for the constants, which
    /// always satisfy the boundary conditions.
    pub nonconstant_predicted: bool,
}

pub fn symmetric_mode(c: &Certified, g1: &ContourSpec, g2: &ContourSpec) -> bool {
    c.data().family.is_bessel() && g1.is_symmetric() && g2.is_symmetric()
}

pub fn counting_condition(c: &Certified, g1: &ContourSpec, g2: &ContourSpec, l1: usize, l2: usize) -> Counting {
    let (rho1, rho2) = c.rho();
    let estimate = ((l1 + 1) * (l2 + 1)) as i64 - (rho1 * rho2) as i64;
    let e1 = g1.endpoints().len() as i64;
    let e2 = g2.endpoints().len() as i64;
    let (l1, l2) = (l1 as i64, l2 as i64);
    let raw = l1 * (l1 + 1) * e1 + l2 * (l2 + 1) * e2;
    let condition = if symmetric_mode(c, g1, g2) { Condition::Symmetric } else { Condition::General };
    let threshold_times_4 = match condition {
        Condition::General => 2 * raw,
        Condition::Symmetric => raw,
    };
    Counting {
        condition,
        estimate,
        threshold_times_4,
        predicted: 4 * estimate > threshold_times_4,
        nonconstant_predicted: 4 * (estimate - 1) > threshold_times_4,
    }
}

/// The homogeneous system on the coordinates of a basis of `S_1 + S_2`.
#[derive(Clone, Debug)]
pub struct System {
    pub l1: usize,
    pub l2: usize,
    pub symmetric_mode: bool,
    pub generator_count: usize,
    pub basis: Vec<(DiffOp, DiffOp)>,
    pub matrix: QMatrix,
}

fn check_poles(ops: &[&DiffOp], contour: &ContourSpec, side: char) -> Result<(), CommuteError> {
    let den = ops.iter().fold(UniPoly::one(), |acc, op| {
        let b = op.denominator_lcm();
        let g = acc.gcd(&b);
        &acc * &b.div_rem(&g).0
    });
    if let Some(z) = contour.find_root(&den) {
        return Err(CommuteError::PoleOnContour { what: format!("a {side}-side coefficient denominator"), at: format!("{z}") });
    }
    Ok(())
}

/// Rejects contours meeting zeros of `v` or the normalizer, or the branch
/// point `0` of `Psi_nu` for non-integer `nu`.
pub fn check_admissible(c: &Certified, g1: &ContourSpec, g2: &ContourSpec) -> Result<(), CommuteError> {
    let d = c.data();
    g1.validate_for(&d.family)?;
    g2.validate_for(&d.family)?;
    if let Some(z) = g1.find_root(&d.v_multiplier()) {
        return Err(CommuteError::PoleOnContour { what: "v".into(), at: format!("{z}") });
    }
    if let Some(z) = g2.find_root(&d.normalizer) {
        return Err(CommuteError::PoleOnContour { what: "the normalizer".into(), at: format!("{z}") });
    }
    if d.family.rank() == 2 && d.family.is_bessel() {
        let zero = GaussRat::zero();
        if g1.contains_exact(&zero) || g2.contains_exact(&zero) {
            return Err(CommuteError::PoleOnContour { what: "the branch point of Psi".into(), at: "0".into() });
        }
    }
    Ok(())
}

fn pole_err(side: char, e: AlgebraError) -> CommuteError {
    match e {
        AlgebraError::Pole { at } => CommuteError::PoleOnContour { what: format!("a {side}-side coefficient"), at },
        AlgebraError::NotSymmetric | AlgebraError::OddOrder => CommuteError::NotSymmetricGenerator(side),
        other => CommuteError::Internal(other.to_string()),
    }
}

/// Jet conditions of one symmetric form at the given points, keyed by
/// `(point index, k, i)`.
fn conditions(sf: &SymForm, points: &[GaussRat], side: char) -> Result<BTreeMap<(usize, usize, usize), GaussRat>, CommuteError> {
    let mut out = BTreeMap::new();
    for (pi, xi) in points.iter().enumerate() {
        for cond in jet_constraints(sf, xi).map_err(|e| pole_err(side, e))? {
            out.insert((pi, cond.k, cond.i), cond.value);
        }
    }
    Ok(out)
}

pub fn assemble_system(c: &Certified, g1: &ContourSpec, g2: &ContourSpec, l1: usize, l2: usize) -> Result<System, CommuteError> {
    check_admissible(c, g1, g2)?;
    let sym = symmetric_mode(c, g1, g2);
    let (s1, s2) = s_spaces(c, l1, l2);
    let mut gens: Vec<(DiffOp, DiffOp)> = s1.generators().iter().chain(s2.generators()).cloned().collect();
    if sym {
        gens.retain(|(x, _)| x.is_reflection_invariant());
    }
    let generator_count = gens.len();
    let coords = pair_coordinates(gens.iter());
    let basis: Vec<(DiffOp, DiffOp)> = independent_subset(&coords).into_iter().map(|i| gens[i].clone()).collect();
    let xs: Vec<&DiffOp> = basis.iter().map(|p| &p.0).collect();
    let zs: Vec<&DiffOp> = basis.iter().map(|p| &p.1).collect();
    check_poles(&xs, g1, 'x')?;
    check_poles(&zs, g2, 'z')?;
    let points = |g: &ContourSpec| -> Vec<GaussRat> {
        if sym {
            g.endpoint_representatives()
        } else {
            g.endpoints().into_iter().map(|e| e.point).collect()
        }
    };
    let (p1, p2) = (points(g1), points(g2));
    let mut per_gen: Vec<BTreeMap<(u8, usize, usize, usize), GaussRat>> = Vec::with_capacity(basis.len());
    for (x, z) in &basis {
        let sx = symmetric_form(x).map_err(|e| pole_err('x', e))?;
        let sz = symmetric_form(z).map_err(|e| pole_err('z', e))?;
        let mut m = BTreeMap::new();
        for ((p, k, i), v) in conditions(&sx, &p1, 'x')? {
            m.insert((0u8, p, k, i), v);
        }
        for ((p, k, i), v) in conditions(&sz, &p2, 'z')? {
            m.insert((1u8, p, k, i), v);
        }
        per_gen.push(m);
    }
    let keys: std::collections::BTreeSet<_> = per_gen.iter().flat_map(|m| m.keys().cloned()).collect();
    let mut matrix = QMatrix::new(basis.len());
    for key in keys {
        let vals: Vec<GaussRat> = per_gen.iter().map(|m| m.get(&key).cloned().unwrap_or_else(GaussRat::zero)).collect();
        let re: Vec<Scalar> = vals.iter().map(|v| v.re.clone()).collect();
        let im: Vec<Scalar> = vals.iter().map(|v| v.im.clone()).collect();
        for row in [re, im] {
            if row.iter().any(|v| !v.is_zero()) {
                matrix.push_row(row);
            }
        }
    }
    Ok(System { l1, l2, symmetric_mode: sym, generator_count, basis, matrix })
}

/// Constant part of an operator: the constant term of the polynomial part of `c_0`.
fn constant_part(op: &DiffOp) -> Scalar {
    let c0 = op.coeff(0);
    c0.num().div_rem(c0.den()).0.coeff(0)
}

fn remove_constant(pair: &(DiffOp, DiffOp)) -> (DiffOp, DiffOp) {
    let c = constant_part(&pair.0);
    if c.is_zero() {
        return pair.clone();
    }
    (&pair.0 - &DiffOp::scalar(Var::X, c.clone()), &pair.1 - &DiffOp::scalar(Var::Z, c))
}

fn combine(basis: &[(DiffOp, DiffOp)], alpha: &[Scalar]) -> (DiffOp, DiffOp) {
    let mut d = DiffOp::zero(Var::X);
    let mut s = DiffOp::zero(Var::Z);
    for ((x, z), a) in basis.iter().zip(alpha) {
        if !a.is_zero() {
            d = &d + &x.scale(a);
            s = &s + &z.scale(a);
        }
    }
    (d, s)
}

/// Coordinates with every derivative-order block of the x-side listed from the
/// highest order down, followed by the z-side blocks in the same order.
fn ordered_coordinates(pairs: &[(DiffOp, DiffOp)]) -> Vec<Vec<Scalar>> {
    let reversed: Vec<(DiffOp, DiffOp)> = pairs.iter().map(|(x, z)| (reverse_orders(x), reverse_orders(z))).collect();
    pair_coordinates(reversed.iter())
}

fn reverse_orders(op: &DiffOp) -> DiffOp {
    // Re-indexes c_k as the coefficient of order (N - k) for a fixed large N,
    // so that frame blocks come out highest order first.
    const N: usize = 64;
    let mut coeffs = vec![RatFn::zero(); N + 1];
    for (k, c) in op.coeffs().iter().enumerate() {
        coeffs[N - k] = c.clone();
    }
    DiffOp::from_coeffs(op.var(), coeffs)
}

/// A certified commuting pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutingSolution {
    pub d: DiffOp,
    pub s: DiffOp,
    pub l1: usize,
    pub l2: usize,
    pub symmetric_mode: bool,
    pub generator_count: usize,
    pub basis_dim: usize,
    /// Dimension of the nullspace modulo constants.
    pub solution_dim: usize,
    pub predicted: bool,
    pub sym_d: SymForm,
    pub sym_s: SymForm,
    /// `(side, endpoint, boundary form is zero)` for every endpoint of both contours.
    pub boundary: Vec<(char, GaussRat, bool)>,
}

impl CommutingSolution {
    pub fn order(&self) -> usize {
        self.d.order().unwrap_or(0)
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("l1 = {}\nl2 = {}\n", self.l1, self.l2));
        out.push_str(&format!("symmetric_mode = {}\n", self.symmetric_mode));
        out.push_str(&format!("generators = {}\nbasis_dim = {}\nsolution_dim = {}\n", self.generator_count, self.basis_dim, self.solution_dim));
        out.push_str(&format!("counting_predicted = {}\n", self.predicted));
        out.push_str(&format!("order = {}\n", self.order()));
        out.push_str(&format!("D = \"{}\"\n", format_diffop(&self.d)));
        out.push_str(&format!("S = \"{}\"\n", format_diffop(&self.s)));
        for (side, xi, ok) in &self.boundary {
            out.push_str(&format!("boundary_{side}[{xi}] = {}\n", if *ok { "zero" } else { "NONZERO" }));
        }
        let digest = hex::encode(Sha256::digest(out.as_bytes()));
        out.push_str(&format!("digest = \"{digest}\"\n"));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Search {
    Fixed(usize, usize),
    /// Increasing `l1 + l2`, then increasing `|l1 - l2|`, smaller `l1` first,
    /// up to the given total.
    Minimal { max_total: usize },
}

/// The `(l1, l2)` schedule of the minimal search.
pub fn schedule(max_total: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for total in 0..=max_total {
        let mut delta = total % 2;
        while delta <= total {
            let lo = (total - delta) / 2;
            let hi = lo + delta;
            out.push((lo, hi));
            if delta > 0 {
                out.push((hi, lo));
            }
            delta += 2;
        }
    }
    out
}

fn solve_at(c: &Certified, g1: &ContourSpec, g2: &ContourSpec, l1: usize, l2: usize) -> Result<Option<CommutingSolution>, CommuteError> {
    let sys = assemble_system(c, g1, g2, l1, l2)?;
    let predicted = counting_condition(c, g1, g2, l1, l2).nonconstant_predicted;
    let null = sys.matrix.nullspace();
    if null.is_empty() {
        return Ok(None);
    }
    let pairs: Vec<(DiffOp, DiffOp)> = null.iter().map(|a| remove_constant(&combine(&sys.basis, a))).collect();
    let coords = ordered_coordinates(&pairs);
    let width = coords.first().map_or(0, Vec::len);
    let rows: Vec<Vec<Scalar>> = coords
        .into_iter()
        .zip(&null)
        .map(|(mut w, a)| {
            w.extend(a.iter().cloned());
            w
        })
        .collect();
    let mut m = QMatrix::from_rows(width + sys.basis.len(), rows);
    let pivots = m.rref();
    let nonconstant: Vec<usize> = pivots.iter().enumerate().filter(|(_, &p)| p < width).map(|(r, _)| r).collect();
    let solution_dim = nonconstant.len();
    let Some(&row) = nonconstant.last() else {
        return Ok(None);
    };
    // The last row with a pivot in the operator block has the lowest order;
    // among rows of that order the first one is taken.
    let chosen_order = {
        let alpha = &m.rows()[row][width..];
        combine(&sys.basis, alpha).0.order()
    };
    let first_row = nonconstant
        .iter()
        .copied()
        .find(|&r| combine(&sys.basis, &m.rows()[r][width..]).0.order() == chosen_order)
        .expect("row exists");
    let alpha = m.rows()[first_row][width..].to_vec();
    let (mut d, mut s) = remove_constant(&combine(&sys.basis, &alpha));
    let lead = d.leading_coeff();
    let first = lead.num().coeffs().iter().find(|c| !c.is_zero()).cloned().unwrap_or_else(Scalar::one);
    let inv = first.recip();
    d = d.scale(&inv);
    s = s.scale(&inv);
    let sol = certify_solution(&sys, d, s, g1, g2, solution_dim, predicted)?;
    Ok(Some(sol))
}

fn certify_solution(
    sys: &System,
    d: DiffOp,
    s: DiffOp,
    g1: &ContourSpec,
    g2: &ContourSpec,
    solution_dim: usize,
    predicted: bool,
) -> Result<CommutingSolution, CommuteError> {
    if !d.is_formally_symmetric() || !s.is_formally_symmetric() {
        return Err(CommuteError::Internal("solution is not formally symmetric".into()));
    }
    if d.order().unwrap_or(0) > 2 * sys.l1 {
        return Err(CommuteError::Internal("solution order exceeds 2 l1".into()));
    }
    let mut boundary = Vec::new();
    for (side, op, g) in [('x', &d, g1), ('z', &s, g2)] {
        for e in g.endpoints() {
            let form = boundary_form(op, &e.point).map_err(|err| pole_err(side, err))?;
            if !form.is_zero() {
                return Err(CommuteError::Internal(format!("boundary form of the {side}-side operator is nonzero at {}", e.point)));
            }
            boundary.push((side, e.point, true));
        }
    }
    let sym_d = symmetric_form(&d).map_err(|e| pole_err('x', e))?;
    let sym_s = symmetric_form(&s).map_err(|e| pole_err('z', e))?;
    Ok(CommutingSolution {
        d,
        s,
        l1: sys.l1,
        l2: sys.l2,
        symmetric_mode: sys.symmetric_mode,
        generator_count: sys.generator_count,
        basis_dim: sys.basis.len(),
        solution_dim,
        predicted,
        sym_d,
        sym_s,
        boundary,
    })
}

pub fn solve_commuting(c: &Certified, g1: &ContourSpec, g2: &ContourSpec, search: Search) -> Result<CommutingSolution, CommuteError> {
    match search {
        Search::Fixed(l1, l2) => solve_at(c, g1, g2, l1, l2)?.ok_or_else(|| CommuteError::NoNonconstantSolution {
            l1,
            l2,
            predicted: counting_condition(c, g1, g2, l1, l2).nonconstant_predicted,
        }),
        Search::Minimal { max_total } => {
            check_admissible(c, g1, g2)?;
            for (l1, l2) in schedule(max_total) {
                if let Some(sol) = solve_at(c, g1, g2, l1, l2)? {
                    return Ok(sol);
                }
            }
            Err(CommuteError::SearchBudgetExceeded(max_total))
        }
    }
}
