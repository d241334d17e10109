//! Gauss-Legendre rules along contours, with complex weights `w_k * dz/dt`.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use super::NumError;
use crate::commute::ContourSpec;

/// Nodes and complex weights approximating `integral_Gamma f(z) dz`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourRule {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    /// Length at which a final ray was cut off.
    pub truncation: Option<f64>,
    /// Nodes per piece.
    pub per_piece: Vec<usize>,
    /// Affine frame `u = (x - center) / scale` for test functions.
    pub center: Complex64,
    pub scale: f64,
    /// The last point covered: the contour end, or the cut on the ray.
    pub far_end: Complex64,
}

/// Splits `total` nodes over pieces proportionally to `lengths`
/// (largest remainder, ties to the earlier piece), at least one each.
fn allocate(lengths: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = lengths.iter().sum();
    let spare = total.saturating_sub(lengths.len());
    let shares: Vec<f64> = lengths.iter().map(|l| l / sum * spare as f64).collect();
    let mut counts: Vec<usize> = shares.iter().map(|s| 1 + s.floor() as usize).collect();
    let mut left = total.max(lengths.len()) - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (shares[a] - shares[a].floor(), shares[b] - shares[b].floor());
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

impl ContourRule {
    /// A rule with about `total` nodes; a final ray is cut at length `truncation`.
    pub fn new(contour: &ContourSpec, total: usize, truncation: f64) -> Result<Self, NumError> {
        if total == 0 {
            return Err(NumError::Config("quadrature needs at least one node".into()));
        }
        let pieces = contour.pieces();
        let lengths: Vec<f64> =
            pieces.iter().map(|p| if p.is_ray() { truncation } else { p.velocity().norm() }).collect();
        let counts = allocate(&lengths, total);
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for ((piece, &n), &len) in pieces.iter().zip(&counts).zip(&lengths) {
            let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("positive count"));
            // parameter range: [0, 1] for segments, [0, T] for rays
            let span = if piece.is_ray() { len } else { 1.0 };
            let v = piece.velocity();
            let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            for (t, w) in pairs {
                let s = 0.5 * span * (t + 1.0);
                nodes.push(piece.point(s));
                weights.push(v * (0.5 * span * w));
            }
        }
        let last = pieces.last().expect("validated contour");
        let far_end = last.point(if last.is_ray() { truncation } else { 1.0 });
        let start = contour.start().expect("validated contour").to_c64();
        let (center, scale) = match contour.end() {
            Some(end) => {
                let end = end.to_c64();
                ((start + end) / 2.0, ((end - start).norm() / 2.0).max(1e-3))
            }
            None => (start, truncation / 8.0),
        };
        Ok(ContourRule {
            nodes,
            weights,
            truncation: contour.has_ray().then_some(truncation),
            per_piece: counts,
            center,
            scale,
            far_end,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| w * f(*z)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{qi, GaussRat};

    fn g(a: i64, b: i64) -> GaussRat {
        GaussRat::new(qi(a), qi(b))
    }

    #[test]
    fn allocation_is_proportional() {
        assert_eq!(allocate(&[1.0, 2.0, 1.0], 200), vec![50, 100, 50]);
        assert_eq!(allocate(&[1.0, 1.0, 1.0], 10), vec![4, 3, 3]);
        assert_eq!(allocate(&[5.0, 0.001], 3), vec![2, 1]);
    }

    #[test]
    fn integrates_exponentials_on_chains() {
        let c = ContourSpec::polyline(&[g(-1, 0), g(-1, 1), g(1, 1), g(1, 0)]).unwrap();
        let rule = ContourRule::new(&c, 60, 8.0).unwrap();
        let got = rule.integrate(|z| (2.0 * z).exp());
        let want = ((2.0f64).exp() - (-2.0f64).exp()) / 2.0;
        assert!((got - want).norm() < 1e-13);
    }

    #[test]
    fn vertical_segment_gives_sine_integral() {
        let c = ContourSpec::segment(g(0, -2), g(0, 2)).unwrap();
        let rule = ContourRule::new(&c, 40, 8.0).unwrap();
        let (x, y) = (0.3, -0.5);
        let got = rule.integrate(|z| (x * z).exp() * (-y * z).exp());
        let want = Complex64::new(0.0, 2.0 * (2.0 * (x - y)).sin() / (x - y));
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn rays_are_truncated() {
        let c = ContourSpec::ray(g(0, 0), 30).unwrap();
        let rule = ContourRule::new(&c, 30, 8.0).unwrap();
        assert_eq!(rule.truncation, Some(8.0));
        let got = rule.integrate(|_| Complex64::new(1.0, 0.0));
        assert!((got - Complex64::from_polar(8.0, 30f64.to_radians())).norm() < 1e-13);
    }
}
