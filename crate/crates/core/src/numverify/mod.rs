//! Floating-point evaluation of the kernel functions, Nyström kernels and
//! numerical certificates for commuting operators.

pub mod airy;
pub mod bessel;
pub mod certify;
pub mod jet;
pub mod kernel;
pub mod psi;
pub mod quadrature;
pub mod report;

pub use airy::{airy_pair, eval_airy};
pub use bessel::{bessel_psi_pair, eval_bessel_psi};
pub use certify::{numeric_certificate, KernelChoice, NumericSetup};
pub use jet::{Jet, OpAtPoint};
pub use kernel::{kernel_matrix, KernelMatrix, TestFamily};
pub use psi::{eval_psi, Base, PsiEval};
pub use quadrature::ContourRule;
pub use report::{byparts_residual, commutator_report, CommutatorReport};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum NumError {
    #[error("argument outside the evaluation range: {0}")]
    Overflow(String),
    #[error("series did not converge: {0}")]
    SeriesNonconvergence(String),
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("truncated tail estimate {0:.3e} above tolerance")]
    Truncation(f64),
    #[error("{0}")]
    Config(String),
}
