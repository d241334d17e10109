//! Three operations exported to the page in `www/`:
//! an operator calculator, Darboux data certification, and the sinc-kernel
//! solve with its numerical certificate.

use prolate_core::bispectral::{b_map, Family};
use prolate_core::commute::{solve_commuting, ContourSpec, Search};
use prolate_core::darboux::{certify, ladder, DarbouxData};
use prolate_core::exactalg::{format_diffop, parse_diffop, symmetric_form, GaussRat, Scalar, Var};
use prolate_core::numverify::{numeric_certificate, KernelChoice, NumericSetup};
use wasm_bindgen::prelude::*;

/// Adjoint, symmetric form and bispectral image of an x-side operator.
pub fn describe_operator(text: &str, family: &str) -> Result<String, String> {
    let family = Family::parse(family).map_err(|e| e.to_string())?;
    let op = parse_diffop(text, Var::X).map_err(|e| e.to_string())?;
    let mut out = format!("operator   {}\n", format_diffop(&op));
    out.push_str(&format!("adjoint    {}\n", format_diffop(&op.adjoint())));
    match symmetric_form(&op) {
        Ok(sf) => {
            let parts: Vec<String> = sf.c.iter().enumerate().map(|(i, c)| format!("c{i} = {c}")).collect();
            out.push_str(&format!("symmetric  sum d^i c_i d^i with {}\n", parts.join(", ")));
        }
        Err(e) => out.push_str(&format!("symmetric  no ({e})\n")),
    }
    match b_map(&family, &op) {
        Ok(b) => out.push_str(&format!("b({family})  {}\n", format_diffop(&b))),
        Err(e) => out.push_str(&format!("b({family})  undefined ({e})\n")),
    }
    Ok(out)
}

/// Certificate of the `steps`-step Bessel ladder at `nu`.
pub fn certify_ladder(nu: &str, steps: usize) -> Result<String, String> {
    let nu = prolate_core::exactalg::scalar::parse_scalar(nu).ok_or_else(|| format!("not a rational number: {nu:?}"))?;
    if steps > 4 {
        return Err("at most 4 steps in the browser".into());
    }
    let d = ladder(&nu, steps).map_err(|e| e.to_string())?;
    certify(&d).map(|c| c.report()).map_err(|e| e.to_string())
}

/// The commuting operator for the kernel `2i sin(W(x - y)) / (x - y)` on
/// `[-1, 1]`, with bandwidth `W = num/den`, plus its commutator residuals.
pub fn solve_sinc(num: i64, den: i64, grid: usize) -> Result<String, String> {
    if den <= 0 || num <= 0 {
        return Err("the bandwidth must be a positive fraction".into());
    }
    let grid = grid.clamp(10, 200);
    let w = Scalar::new(num.into(), den.into());
    let zero = Scalar::from_integer(0.into());
    let g1 = ContourSpec::segment(GaussRat::real(-Scalar::from_integer(1.into())), GaussRat::real(Scalar::from_integer(1.into())))
        .map_err(|e| e.to_string())?;
    let g2 = ContourSpec::segment(GaussRat::new(zero.clone(), -w.clone()), GaussRat::new(zero, w)).map_err(|e| e.to_string())?;
    let c = certify(&DarbouxData::identity(Family::Bessel(Scalar::from_integer(0.into())))).map_err(|e| e.to_string())?;
    let sol = solve_commuting(&c, &g1, &g2, Search::Minimal { max_total: 4 }).map_err(|e| e.to_string())?;
    let setup = NumericSetup { grid, kernel: KernelChoice::Exp, ..NumericSetup::default() };
    let rep = numeric_certificate(&c, &sol.d, &g1, &g2, &setup).map_err(|e| e.to_string())?;
    Ok(format!("{}\n{}", sol.report(), rep.to_text()))
}

#[wasm_bindgen(js_name = describeOperator)]
pub fn describe_operator_js(text: &str, family: &str) -> Result<String, JsError> {
    describe_operator(text, family).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = certifyLadder)]
pub fn certify_ladder_js(nu: &str, steps: usize) -> Result<String, JsError> {
    certify_ladder(nu, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = solveSinc)]
pub fn solve_sinc_js(num: i64, den: i64, grid: usize) -> Result<String, JsError> {
    solve_sinc(num, den, grid).map_err(|e| JsError::new(&e))
}
