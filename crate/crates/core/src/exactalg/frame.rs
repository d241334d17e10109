use super::diffop::DiffOp;
use super::poly::UniPoly;
use super::scalar::Scalar;

/// Coordinates of a list of operators in a shared finite monomial frame.
///
/// For each derivative order `k` the coefficients `c_k` of all operators are
/// brought to the common denominator `q_k` (the lcm over the list); the
/// coordinates are the coefficients of the numerators `q_k c_k`. Two operators
/// from the list are equal iff their coordinate vectors are, and linear
/// relations carry over, so ranks can be computed on the vectors.
pub fn frame_coordinates(ops: &[&DiffOp]) -> Vec<Vec<Scalar>> {
    let max_order = ops.iter().filter_map(|op| op.order()).max();
    let Some(max_order) = max_order else {
        return vec![Vec::new(); ops.len()];
    };
    let mut columns: Vec<Vec<UniPoly>> = vec![Vec::with_capacity(max_order + 1); ops.len()];
    let mut widths = Vec::with_capacity(max_order + 1);
    for k in 0..=max_order {
        let common = ops.iter().fold(UniPoly::one(), |acc, op| {
            let den = op.coeff(k).den().clone();
            let g = acc.gcd(&den);
            &acc * &den.div_rem(&g).0
        });
        let mut width = 0;
        for (col, op) in columns.iter_mut().zip(ops) {
            let c = op.coeff(k);
            let num = c.num() * &common.div_rem(c.den()).0;
            width = width.max(num.degree().map_or(0, |d| d + 1));
            col.push(num);
        }
        widths.push(width);
    }
    columns
        .into_iter()
        .map(|polys| {
            polys
                .iter()
                .zip(&widths)
                .flat_map(|(p, &w)| (0..w).map(move |i| p.coeff(i)))
                .collect()
        })
        .collect()
}
