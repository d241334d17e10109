//! Exact arithmetic for differential operators with rational coefficients.

pub mod boundary;
pub mod diffop;
pub mod frame;
pub mod grammar;
pub mod linalg;
pub mod poly;
pub mod ratfn;
pub mod scalar;

pub use boundary::{boundary_form, jet_constraints, symmetric_form, JetCondition, JetForm, SymForm};
pub use diffop::{DiffOp, Var};
pub use grammar::{format_diffop, format_poly, parse_diffop, parse_poly, ParseError};
pub use linalg::QMatrix;
pub use poly::UniPoly;
pub use ratfn::RatFn;
pub use scalar::{q, qi, GaussRat, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("operators act on different variables")]
    VarMismatch,
    #[error("operator is not formally symmetric")]
    NotSymmetric,
    #[error("formally symmetric operators have even order")]
    OddOrder,
    #[error("coefficient has a pole at {at}")]
    Pole { at: String },
    #[error("operator has non-polynomial coefficients")]
    NotPolynomial,
    #[error("operator is not in the subalgebra generated by L, D and x^2")]
    NotInSubalgebra,
}
