//! One-call numerical certificate for an exact solution.

use num_traits::Zero;

use crate::bispectral::Family;
use crate::commute::ContourSpec;
use crate::darboux::{Certified, DarbouxData};
use crate::exactalg::DiffOp;

use super::kernel::{kernel_matrix, TestFamily};
use super::psi::PsiEval;
use super::quadrature::ContourRule;
use super::report::{commutator_report, CommutatorReport};
use super::NumError;

/// Which bispectral function builds the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KernelChoice {
    /// `Psi` of the Darboux data.
    #[default]
    Data,
    /// `exp(xz)` against `exp(-yz)`, for identity data whose base operator is `d^2`.
    Exp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericSetup {
    pub grid: usize,
    pub gamma2_nodes: usize,
    pub truncation: f64,
    pub tests: usize,
    pub kernel: KernelChoice,
}

impl Default for NumericSetup {
    fn default() -> Self {
        NumericSetup { grid: 200, gamma2_nodes: 80, truncation: 8.0, tests: 20, kernel: KernelChoice::Data }
    }
}

fn exp_compatible(d: &DarbouxData) -> bool {
    match &d.family {
        Family::Bessel(nu) => {
            let trivial_potential = (nu.numer() * (nu.numer() + nu.denom())).is_zero();
            trivial_potential && *d == DarbouxData::identity(d.family.clone())
        }
        Family::Airy => false,
    }
}

/// Assembles the kernel for `c` on `g1 x g2` and reports how well `d` commutes with it.
pub fn numeric_certificate(
    c: &Certified,
    d: &DiffOp,
    g1: &ContourSpec,
    g2: &ContourSpec,
    setup: &NumericSetup,
) -> Result<CommutatorReport, NumError> {
    let eval = match setup.kernel {
        KernelChoice::Data => PsiEval::new(c.data()),
        KernelChoice::Exp if exp_compatible(c.data()) => PsiEval::exp_pair(),
        KernelChoice::Exp => {
            return Err(NumError::Config("the exponential kernel needs identity data with base operator d^2".into()))
        }
    };
    let grid = ContourRule::new(g1, setup.grid, setup.truncation)?;
    let gamma2 = ContourRule::new(g2, setup.gamma2_nodes, setup.truncation)?;
    let km = kernel_matrix(&eval, &grid, &gamma2)?;
    commutator_report(&km, d, &TestFamily::on(&grid, setup.tests))
}
