//! Nyström discretization of `K(x, y) = integral_{Gamma_2} Psi_1(x, z) Psi_2(y, z) dz`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::jet::{Jet, OpAtPoint};
use super::psi::{Base, PsiEval};
use super::quadrature::ContourRule;
use super::NumError;
use crate::exactalg::DiffOp;

/// Largest admissible estimate of the integral dropped beyond a truncated ray.
pub const TAIL_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct KernelMatrix {
    /// The `Gamma_1` rule; the matrix acts as `(K f)_i = sum_j k[i, j] w_j f_j`.
    pub grid: ContourRule,
    pub k: DMatrix<Complex64>,
    /// `sum_m |w_m Psi_1(x_i, z_m) Psi_2(x_j, z_m)|`: the size of the summands
    /// behind each entry, against which cancellation is judged.
    pub k_abs: DMatrix<f64>,
    pub gamma2: ContourRule,
    /// Estimate of `|integral beyond T|` when `Gamma_2` ends in a ray.
    pub tail_estimate: Option<f64>,
    eval: PsiEval,
    /// `partner(x_j, z_m)`
    right: DMatrix<Complex64>,
}

/// `max_x |Ai(x + z_T)|^2 / (2 sqrt|x + z_T|)` from the leading exponential decay.
fn tail_estimate(base: &Base, grid: &ContourRule, rule: &ContourRule) -> Option<f64> {
    rule.truncation?;
    match base {
        Base::Airy => Some(
            grid.nodes
                .iter()
                .map(|x| {
                    let w = x + rule.far_end;
                    let zeta = w.powf(1.5) * (2.0 / 3.0);
                    (-2.0 * zeta.re).exp() / (2.0 * w.norm().sqrt())
                })
                .fold(0.0, f64::max),
        ),
        _ => Some(0.0),
    }
}

/// Rows `i` of `w_m f(x_i, z_m)`, computed in parallel with a fixed layout.
fn sample(
    xs: &[Complex64],
    rule: &ContourRule,
    f: impl Fn(Complex64, Complex64) -> Result<Complex64, NumError> + Sync,
    weighted: bool,
) -> Result<DMatrix<Complex64>, NumError> {
    let rows: Vec<Vec<Complex64>> = xs
        .par_iter()
        .map(|&x| {
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&z, &w)| f(x, z).map(|v| if weighted { v * w } else { v }))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let m = rule.len();
    Ok(DMatrix::from_fn(xs.len(), m, |i, j| rows[i][j]))
}

/// Assembles the kernel on the `grid` nodes using the `gamma2` rule.
pub fn kernel_matrix(eval: &PsiEval, grid: &ContourRule, gamma2: &ContourRule) -> Result<KernelMatrix, NumError> {
    let tail = tail_estimate(eval.base(), grid, gamma2);
    if let Some(t) = tail.filter(|t| *t > TAIL_TOLERANCE) {
        return Err(NumError::Truncation(t));
    }
    let left = sample(&grid.nodes, gamma2, |x, z| eval.value(x, z), true)?;
    let right = sample(&grid.nodes, gamma2, |y, z| eval.partner(y, z), false)?;
    let k = &left * right.transpose();
    let k_abs = left.map(|v| v.norm()) * right.map(|v| v.norm()).transpose();
    Ok(KernelMatrix { grid: grid.clone(), k, k_abs, gamma2: gamma2.clone(), tail_estimate: tail, eval: eval.clone(), right })
}

impl KernelMatrix {
    pub fn size(&self) -> usize {
        self.grid.len()
    }

    /// The kernel of `D_x K`, with `D` applied to `Psi_1` inside the integral,
    /// and the matching summand sizes.
    pub fn apply_x(&self, d: &DiffOp) -> Result<(DMatrix<Complex64>, DMatrix<f64>), NumError> {
        let k = d.order().unwrap_or(0);
        let rows: Vec<Vec<Complex64>> = self
            .grid
            .nodes
            .par_iter()
            .map(|&x| {
                let p_at = self.eval.p_at(x, k);
                let d_at = OpAtPoint::new(d, x, k);
                self.gamma2
                    .nodes
                    .iter()
                    .zip(&self.gamma2.weights)
                    .map(|(&z, &w)| Ok(d_at.apply_value(&self.eval.x_jet_with(&p_at, x, z, k)?) * w))
                    .collect::<Result<Vec<_>, NumError>>()
            })
            .collect::<Result<_, _>>()?;
        let left = DMatrix::from_fn(self.size(), self.gamma2.len(), |i, j| rows[i][j]);
        let abs = left.map(|v| v.norm()) * self.right.map(|v| v.norm()).transpose();
        Ok((&left * self.right.transpose(), abs))
    }

    /// `max |K| / max sum |summands|`; tiny when the integral cancels to
    /// rounding level everywhere.
    pub fn cancellation(&self) -> f64 {
        let top = self.k.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let scale = self.k_abs.iter().copied().fold(0.0, f64::max);
        if scale == 0.0 { 0.0 } else { top / scale }
    }

    /// The grid rule applied with absolute values: `sum_j m[i, j] |w_j| |f_j|`.
    pub fn apply_abs(&self, m: &DMatrix<f64>, f: &[Complex64]) -> Vec<f64> {
        let n = self.size();
        (0..n).map(|i| (0..n).map(|j| m[(i, j)] * self.grid.weights[j].norm() * f[j].norm()).sum()).collect()
    }

    /// `(K f)(x_i)` by the grid rule.
    pub fn apply(&self, m: &DMatrix<Complex64>, f: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        (0..n).map(|i| (0..n).map(|j| m[(i, j)] * self.grid.weights[j] * f[j]).sum()).collect()
    }

    /// Largest `|K - K^T|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let n = self.size();
        let scale = self.k.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.k[(i, j)] - self.k[(j, i)]).norm());
            }
        }
        worst / scale.max(1e-300)
    }

    /// Comma-separated `i,j,re,im` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,x_re,x_im,y_re,y_im,k_re,k_im\n");
        let n = self.size();
        for i in 0..n {
            for j in 0..n {
                let (x, y, v) = (self.grid.nodes[i], self.grid.nodes[j], self.k[(i, j)]);
                out.push_str(&format!(
                    "{i},{j},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                    x.re, x.im, y.re, y.im, v.re, v.im
                ));
            }
        }
        out
    }
}

/// Test functions `u^k exp(-u^2/2)`, `u = (x - center) / scale`, `k < count`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFamily {
    pub count: usize,
    pub center: Complex64,
    pub scale: f64,
}

impl TestFamily {
    pub fn on(rule: &ContourRule, count: usize) -> Self {
        TestFamily { count, center: rule.center, scale: rule.scale }
    }

    pub fn describe(&self) -> String {
        format!(
            "u^k exp(-u^2/2), k = 0..{}, u = (x - ({:.6}{:+.6}i)) / {:.6}",
            self.count.saturating_sub(1),
            self.center.re,
            self.center.im,
            self.scale
        )
    }

    /// Jet of the `k`-th function at `x0`.
    pub fn jet(&self, k: usize, x0: Complex64, order: usize) -> Jet {
        let u = Jet::variable(x0, order)
            .sub(&Jet::constant(self.center, order))
            .scale(Complex64::new(1.0 / self.scale, 0.0));
        let gauss = u.mul(&u).scale(Complex64::new(-0.5, 0.0)).exp();
        u.powi(k).mul(&gauss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bispectral::Family;
    use crate::commute::ContourSpec;
    use crate::darboux::DarbouxData;
    use crate::exactalg::{qi, GaussRat};
    use crate::numverify::airy::eval_airy;

    fn g(a: i64, b: i64) -> GaussRat {
        GaussRat::new(qi(a), qi(b))
    }

    #[test]
    fn exponential_pair_gives_sine_kernel() {
        let g1 = ContourRule::new(&ContourSpec::segment(g(-1, 0), g(1, 0)).unwrap(), 24, 8.0).unwrap();
        let g2 = ContourRule::new(&ContourSpec::segment(g(0, -2), g(0, 2)).unwrap(), 60, 8.0).unwrap();
        let km = kernel_matrix(&PsiEval::exp_pair(), &g1, &g2).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..24 {
            for j in 0..24 {
                let (x, y) = (g1.nodes[i].re, g1.nodes[j].re);
                let want = if i == j { 4.0 } else { 2.0 * (2.0 * (x - y)).sin() / (x - y) };
                worst = worst.max((km.k[(i, j)] - Complex64::new(0.0, want)).norm());
            }
        }
        assert!(worst < 1e-10, "{worst}");
        assert!(km.asymmetry() < 1e-14);
    }

    #[test]
    fn airy_kernel_against_adaptive_oracle() {
        let g1 = ContourRule::new(&ContourSpec::segment(g(-1, 0), g(2, 0)).unwrap(), 10, 8.0).unwrap();
        let g2 = ContourRule::new(&ContourSpec::ray(g(0, 0), 0).unwrap(), 120, 8.0).unwrap();
        let km = kernel_matrix(&PsiEval::new(&DarbouxData::identity(Family::Airy)), &g1, &g2).unwrap();
        assert!(km.tail_estimate.unwrap() < 1e-9);
        for i in 0..10 {
            for j in 0..10 {
                let (x, y) = (g1.nodes[i].re, g1.nodes[j].re);
                let want = simpson(|z| (eval_airy(Complex64::new(x + z, 0.0)).unwrap() * eval_airy(Complex64::new(y + z, 0.0)).unwrap()).re, 0.0, 8.0, 1e-13);
                assert!((km.k[(i, j)].re - want).abs() < 1e-8 && km.k[(i, j)].im.abs() < 1e-12);
            }
        }
        assert!(km.asymmetry() < 1e-14);
    }

    fn simpson(f: impl Fn(f64) -> f64 + Copy, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(f: impl Fn(f64) -> f64 + Copy, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40)
    }

    #[test]
    fn test_functions_have_exact_jets() {
        let t = TestFamily { count: 5, center: Complex64::new(0.5, 0.0), scale: 2.0 };
        let x0 = Complex64::new(1.3, 0.2);
        let j = t.jet(3, x0, 2);
        let f = |x: Complex64| {
            let u = (x - 0.5) / 2.0;
            u.powi(3) * (-u * u / 2.0).exp()
        };
        let h = 1e-4;
        let fd = (f(x0 + h) - f(x0 - h)) / (2.0 * h);
        assert!((j.value() - f(x0)).norm() < 1e-15);
        assert!((j.derivatives()[1] - fd).norm() < 1e-8);
    }
}
