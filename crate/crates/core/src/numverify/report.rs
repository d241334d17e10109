//! Numerical certificates: commutator residuals, eigen-alignment and the
//! integration-by-parts identity.

use std::fmt::Write as _;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use sha2::{Digest, Sha256};

use super::jet::OpAtPoint;
use super::kernel::{KernelMatrix, TestFamily};
use super::quadrature::ContourRule;
use super::NumError;
use crate::commute::ContourSpec;
use crate::exactalg::{boundary_form, format_diffop, DiffOp};

/// Eigenvalues below this fraction of the largest are treated as unresolved.
pub const RESOLVED_FRACTION: f64 = 1e-8;
pub const ALIGNMENT_MODES: usize = 20;
/// A result smaller than this fraction of the summand sizes that produced it
/// carries no significant digits.
pub const CANCELLATION_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorReport {
    pub operator: String,
    pub tests: String,
    pub grid_nodes: usize,
    pub gamma2_nodes: usize,
    pub truncation: Option<f64>,
    pub tail_estimate: Option<f64>,
    /// `max |K|` relative to the summand sizes of the kernel integral.
    pub kernel_cancellation: f64,
    /// `None` where `K` and `D K` both annihilate the test function to rounding level.
    pub residuals: Vec<Option<f64>>,
    pub max: f64,
    pub median: f64,
    /// Off-diagonal over diagonal mass of `D` in the resolved eigenbasis of
    /// `K`; `None` when the kernel vanishes to rounding level.
    pub alignment: Option<f64>,
    pub alignment_modes: usize,
}

impl CommutatorReport {
    /// The kernel integral cancels to rounding level everywhere.
    pub fn degenerate(&self) -> bool {
        self.kernel_cancellation < CANCELLATION_FLOOR
    }

    pub fn resolved(&self) -> usize {
        self.residuals.iter().flatten().count()
    }

    /// Requires a nondegenerate kernel and at least one resolved residual.
    pub fn passes(&self, tol: f64) -> bool {
        !self.degenerate() && self.resolved() > 0 && self.max <= tol
    }

    fn body(&self) -> String {
        let mut s = String::new();
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |t| format!("{t:.6e}"));
        writeln!(s, "operator = \"{}\"", self.operator).unwrap();
        writeln!(s, "tests = \"{}\"", self.tests).unwrap();
        writeln!(s, "grid_nodes = {}", self.grid_nodes).unwrap();
        writeln!(s, "gamma2_nodes = {}", self.gamma2_nodes).unwrap();
        writeln!(s, "truncation = {}", opt(self.truncation)).unwrap();
        writeln!(s, "tail_estimate = {}", opt(self.tail_estimate)).unwrap();
        writeln!(s, "kernel_cancellation = {:.6e}", self.kernel_cancellation).unwrap();
        for (k, r) in self.residuals.iter().enumerate() {
            writeln!(s, "residual[{k}] = {}", opt(*r)).unwrap();
        }
        writeln!(s, "resolved_tests = {}", self.resolved()).unwrap();
        writeln!(s, "max_residual = {:.6e}", self.max).unwrap();
        writeln!(s, "median_residual = {:.6e}", self.median).unwrap();
        writeln!(s, "alignment = {}", opt(self.alignment)).unwrap();
        writeln!(s, "alignment_modes = {}", self.alignment_modes).unwrap();
        s
    }

    /// Deterministic text ending in a sha256 digest of everything above it.
    pub fn to_text(&self) -> String {
        let body = self.body();
        let digest = hex::encode(Sha256::digest(body.as_bytes()));
        format!("{body}digest = \"{digest}\"\n")
    }

    pub fn residuals_csv(&self) -> String {
        let mut out = String::from("k,residual\n");
        for (k, r) in self.residuals.iter().enumerate() {
            match r {
                Some(r) => writeln!(out, "{k},{r:.17e}").unwrap(),
                None => writeln!(out, "{k},").unwrap(),
            }
        }
        out
    }
}

fn weighted_norm(v: &[Complex64], w: &[Complex64]) -> f64 {
    v.iter().zip(w).map(|(a, b)| a.norm_sqr() * b.norm()).sum::<f64>().sqrt()
}

fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Relative residuals `|D K f - K D f| / (|D K f| + |K D f|)` over the test
/// family, and the eigen-alignment score.
pub fn commutator_report(km: &KernelMatrix, d: &DiffOp, tests: &TestFamily) -> Result<CommutatorReport, NumError> {
    let (dk, dk_abs) = km.apply_x(d)?;
    let order = d.order().unwrap_or(0);
    let w = &km.grid.weights;
    let d_at: Vec<OpAtPoint> = km.grid.nodes.iter().map(|&x| OpAtPoint::new(d, x, order)).collect();
    let mut residuals = Vec::with_capacity(tests.count);
    for k in 0..tests.count {
        let jets: Vec<_> = km.grid.nodes.iter().map(|&x| tests.jet(k, x, order)).collect();
        let f: Vec<Complex64> = jets.iter().map(|j| j.value()).collect();
        let df: Vec<Complex64> = jets.iter().zip(&d_at).map(|(j, op)| op.apply_value(j)).collect();
        let dkf = km.apply(&dk, &f);
        let kdf = km.apply(&km.k, &df);
        let diff: Vec<Complex64> = dkf.iter().zip(&kdf).map(|(a, b)| a - b).collect();
        let den = weighted_norm(&dkf, w) + weighted_norm(&kdf, w);
        let sizes: Vec<Complex64> = km
            .apply_abs(&dk_abs, &f)
            .into_iter()
            .zip(km.apply_abs(&km.k_abs, &df))
            .map(|(a, b)| Complex64::new(a + b, 0.0))
            .collect();
        let floor = CANCELLATION_FLOOR * weighted_norm(&sizes, w);
        residuals.push(if den <= floor {
            None
        } else {
            Some(weighted_norm(&diff, w) / den)
        });
    }
    let kernel_cancellation = km.cancellation();
    let (alignment, alignment_modes) = if kernel_cancellation < CANCELLATION_FLOOR {
        (None, 0)
    } else {
        let (a, r) = eigen_alignment(km, &dk);
        (Some(a), r)
    };
    let resolved: Vec<f64> = residuals.iter().flatten().copied().collect();
    let max = resolved.iter().copied().fold(0.0, f64::max);
    Ok(CommutatorReport {
        operator: format_diffop(d),
        tests: tests.describe(),
        grid_nodes: km.size(),
        gamma2_nodes: km.gamma2.len(),
        truncation: km.gamma2.truncation,
        tail_estimate: km.tail_estimate,
        kernel_cancellation,
        median: median(&resolved),
        max,
        residuals,
        alignment,
        alignment_modes,
    })
}

/// Writes `D` in the resolved eigenvectors of the Nyström operator `K W`,
/// using `D phi = (D K) W phi / lambda`, and measures the off-diagonal mass.
fn eigen_alignment(km: &KernelMatrix, dk: &DMatrix<Complex64>) -> (f64, usize) {
    let n = km.size();
    let w = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(km.grid.weights.clone()));
    let a = &km.k * &w;
    let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return (0.0, 0);
    }
    let (q, t) = Schur::new(a).unpack();
    let lambda: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| lambda[j].norm().partial_cmp(&lambda[i].norm()).unwrap().then(i.cmp(&j)));
    let top = lambda[idx[0]].norm();
    let chosen: Vec<usize> =
        idx.into_iter().take(ALIGNMENT_MODES).filter(|&i| lambda[i].norm() >= RESOLVED_FRACTION * top).collect();
    let r = chosen.len();
    let floor = f64::EPSILON * scale;
    let mut v = DMatrix::<Complex64>::zeros(n, r);
    for (col, &p) in chosen.iter().enumerate() {
        let lp = lambda[p];
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        y[p] = Complex64::new(1.0, 0.0);
        for j in (0..p).rev() {
            let s: Complex64 = ((j + 1)..=p).map(|l| t[(j, l)] * y[l]).sum();
            let mut den = t[(j, j)] - lp;
            if den.norm() < floor {
                den = Complex64::new(floor, 0.0);
            }
            y[j] = -s / den;
        }
        let vec = &q * nalgebra::DVector::from_vec(y);
        let nv = vec.norm();
        v.set_column(col, &(vec / Complex64::new(nv, 0.0)));
    }
    let lam_inv = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        r,
        chosen.iter().map(|&p| Complex64::new(1.0, 0.0) / lambda[p]),
    ));
    let image = dk * &w * &v * lam_inv;
    let Ok(c) = v.svd(true, true).solve(&image, 1e-14) else {
        return (f64::INFINITY, r);
    };
    let (mut off, mut diag) = (0.0, 0.0);
    for i in 0..r {
        for j in 0..r {
            if i == j {
                diag += c[(i, j)].norm_sqr();
            } else {
                off += c[(i, j)].norm_sqr();
            }
        }
    }
    (if diag == 0.0 { 0.0 } else { (off / diag).sqrt() }, r)
}

/// Relative defect of `integral (D f) g = sum_xi (-1)^pi phi_xi(D)(f, g) + integral f a(D) g`
/// for test functions `f_kf`, `g_kg` on a finite contour.
pub fn byparts_residual(
    d: &DiffOp,
    contour: &ContourSpec,
    rule: &ContourRule,
    tests: &TestFamily,
    kf: usize,
    kg: usize,
) -> Result<f64, NumError> {
    if contour.has_ray() {
        return Err(NumError::Config("integration by parts is checked on finite contours".into()));
    }
    let order = d.order().unwrap_or(0);
    let ad = d.adjoint();
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut rhs = Complex64::new(0.0, 0.0);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let f = tests.jet(kf, x, order);
        let g = tests.jet(kg, x, order);
        lhs += w * OpAtPoint::new(d, x, order).apply_value(&f) * g.value();
        rhs += w * f.value() * OpAtPoint::new(&ad, x, order).apply_value(&g);
    }
    let mut bdry = Complex64::new(0.0, 0.0);
    for e in contour.endpoints() {
        let form = boundary_form(d, &e.point).map_err(|err| NumError::Pole(err.to_string()))?;
        let xi = e.point.to_c64();
        let fj = tests.jet(kf, xi, order).derivatives();
        let gj = tests.jet(kg, xi, order).derivatives();
        let sign = if e.pi == 1 { -1.0 } else { 1.0 };
        bdry += form.apply(&fj, &gj) * sign;
    }
    let scale = lhs.norm() + rhs.norm() + bdry.norm();
    Ok(if scale == 0.0 { 0.0 } else { (lhs - bdry - rhs).norm() / scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commute::ContourSpec;
    use crate::exactalg::{parse_diffop, qi, GaussRat, Var};
    use crate::numverify::kernel::kernel_matrix;
    use crate::numverify::psi::PsiEval;

    fn g(a: i64, b: i64) -> GaussRat {
        GaussRat::new(qi(a), qi(b))
    }

    fn prolate_kernel(n: usize) -> (KernelMatrix, TestFamily) {
        let g1 = ContourRule::new(&ContourSpec::segment(g(-1, 0), g(1, 0)).unwrap(), n, 8.0).unwrap();
        let g2 = ContourRule::new(&ContourSpec::segment(g(0, -2), g(0, 2)).unwrap(), 80, 8.0).unwrap();
        let km = kernel_matrix(&PsiEval::exp_pair(), &g1, &g2).unwrap();
        let tests = TestFamily::on(&g1, 20);
        (km, tests)
    }

    #[test]
    fn prolate_operator_commutes() {
        let (km, tests) = prolate_kernel(200);
        let d = parse_diffop("(1 - x^2) * Dx^2 + (-2*x) * Dx + (-4*x^2)", Var::X).unwrap();
        let rep = commutator_report(&km, &d, &tests).unwrap();
        assert!(rep.max <= 1e-8, "{}", rep.to_text());
        assert!(rep.alignment.unwrap() <= 1e-6, "{}", rep.to_text());
        assert!(rep.alignment_modes >= 5);
        assert_eq!(rep.resolved(), 20);
        assert!(rep.passes(1e-8));
    }

    #[test]
    fn identity_and_perturbation() {
        let (km, tests) = prolate_kernel(60);
        let rep = commutator_report(&km, &DiffOp::one(Var::X), &tests).unwrap();
        assert!(rep.residuals.iter().all(|r| *r == Some(0.0)));
        let d = parse_diffop("(1 - x^2) * Dx^2 + (-2*x) * Dx + (-4*x^2 + x)", Var::X).unwrap();
        let rep = commutator_report(&km, &d, &tests).unwrap();
        assert!(rep.max > 1e-3, "{}", rep.max);
    }

    #[test]
    fn report_is_reproducible() {
        let (km, tests) = prolate_kernel(40);
        let d = parse_diffop("(1 - x^2) * Dx^2 + (-2*x) * Dx + (-4*x^2)", Var::X).unwrap();
        let a = commutator_report(&km, &d, &tests).unwrap().to_text();
        let b = commutator_report(&km, &d, &tests).unwrap().to_text();
        assert_eq!(a, b);
        assert!(a.lines().last().unwrap().starts_with("digest = \""));
    }

    #[test]
    fn integration_by_parts() {
        let contour = ContourSpec::polyline(&[g(-1, 0), g(-1, 1), g(1, 1), g(2, 0)]).unwrap();
        let rule = ContourRule::new(&contour, 120, 8.0).unwrap();
        let tests = TestFamily::on(&rule, 20);
        let d = parse_diffop("(x^2 + 1) * Dx^3 + (3*x) * Dx^2 + (-2) * Dx + (x^3)", Var::X).unwrap();
        for (kf, kg) in [(0, 0), (3, 7), (12, 19)] {
            let r = byparts_residual(&d, &contour, &rule, &tests, kf, kg).unwrap();
            assert!(r < 1e-10, "({kf}, {kg}): {r}");
        }
    }
}
