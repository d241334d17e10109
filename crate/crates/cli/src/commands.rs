use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64;
use prolate_core::commute::{solve_commuting, CommuteError, Search};
use prolate_core::darboux::{certified_to_toml, certify, dim_report, Certified, DarbouxError};
use prolate_core::numverify::{numeric_certificate, NumError, PsiEval};

use crate::config::{DataFailure, JobConfig, KernelName};

/// Exit codes.
pub mod code {
    pub const OK: u8 = 0;
    /// Config, parse, contour and pole errors.
    pub const CONFIG: u8 = 1;
    /// An exact identity or dimension bound fails.
    pub const CHECK: u8 = 2;
    /// No nonconstant solution although the counting condition predicts one.
    pub const PREDICTED_MISSING: u8 = 3;
    /// The numerical certificate is above tolerance or unavailable.
    pub const RESIDUAL: u8 = 4;
    /// No nonconstant solution where none was predicted, or the search budget ran out.
    pub const NO_SOLUTION: u8 = 5;
    /// The solver's own consistency checks failed.
    pub const INTERNAL: u8 = 6;
}

/// What a subcommand prints and how the process exits.
pub struct Outcome {
    pub code: u8,
    pub report: String,
    pub diagnostic: Option<String>,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Outcome { code: code::OK, report, diagnostic: None }
    }

    fn fail(code: u8, report: String, diagnostic: impl Into<String>) -> Self {
        Outcome { code, report, diagnostic: Some(diagnostic.into()) }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub l1: Option<usize>,
    pub l2: Option<usize>,
    pub minimal: bool,
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub out: Option<std::path::PathBuf>,
}

impl Overrides {
    pub fn apply(&self, job: &mut JobConfig) {
        if self.l1.is_some() || self.l2.is_some() {
            job.search.minimal = false;
        }
        if let Some(l1) = self.l1 {
            job.search.l1 = Some(l1);
        }
        if let Some(l2) = self.l2 {
            job.search.l2 = Some(l2);
        }
        if self.minimal {
            job.search.minimal = true;
        }
        if let Some(t) = self.tol {
            job.numeric.tol = t;
        }
        if let Some(g) = self.grid {
            job.numeric.grid = g;
        }
        if let Some(o) = &self.out {
            job.output.dir = Some(o.clone());
        }
    }
}

fn darboux_code(e: &DarbouxError) -> u8 {
    match e {
        DarbouxError::InvalidData(_) | DarbouxError::InvalidSeed(_) | DarbouxError::SeedsDependent => code::CONFIG,
        DarbouxError::UnverifiedData(inner) => darboux_code(inner),
        _ => code::CHECK,
    }
}

/// Builds and certifies the job's data; failures become an outcome.
fn certified(job: &JobConfig) -> Result<std::result::Result<Certified, Outcome>> {
    let data = match job.data() {
        Ok(d) => d,
        Err(DataFailure::Config(e)) => return Err(e),
        Err(DataFailure::Check(e)) => return Ok(Err(Outcome::fail(darboux_code(&e), String::new(), e.to_string()))),
    };
    Ok(certify(&data).map_err(|e| Outcome::fail(darboux_code(&e), data.canonical_text(), e.to_string())))
}

fn write_out(job: &JobConfig, files: &[(&str, &str)]) -> Result<()> {
    let Some(dir) = job.out_dir() else {
        return Ok(());
    };
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn cmd_verify(job: &JobConfig) -> Result<Outcome> {
    let c = match certified(job)? {
        Ok(c) => c,
        Err(outcome) => return Ok(outcome),
    };
    let report = c.report();
    write_out(job, &[("certificate.toml", &certified_to_toml(&c)), ("verify.txt", &report)])?;
    Ok(Outcome::ok(report))
}

pub fn cmd_dims(job: &JobConfig, max_l1: usize, max_l2: usize) -> Result<Outcome> {
    let c = match certified(job)? {
        Ok(c) => c,
        Err(outcome) => return Ok(outcome),
    };
    let (rho1, rho2) = c.rho();
    let mut table = format!("# {} rho1 = {rho1} rho2 = {rho2}\n", c.data().family);
    table.push_str("l1,l2,dim_s1,dim_s2,dim_intersection,dim_sum,sum_lower_bound,intersection_upper_bound,passed\n");
    let mut failures = Vec::new();
    for l1 in 0..=max_l1 {
        for l2 in 0..=max_l2 {
            let r = dim_report(&c, l1, l2);
            writeln!(
                table,
                "{l1},{l2},{},{},{},{},{},{},{}",
                r.dim_s1,
                r.dim_s2,
                r.dim_intersection,
                r.dim_sum,
                r.sum_lower_bound,
                r.intersection_upper_bound,
                r.passed()
            )?;
            if !r.passed() {
                failures.push(format!("({l1}, {l2})"));
            }
        }
    }
    write_out(job, &[("dims.csv", &table)])?;
    if failures.is_empty() {
        Ok(Outcome::ok(table))
    } else {
        Ok(Outcome::fail(code::CHECK, table, format!("dimension bound violated at {}", failures.join(", "))))
    }
}

fn commute_code(e: &CommuteError) -> u8 {
    match e {
        CommuteError::Contour(_) | CommuteError::PoleOnContour { .. } => code::CONFIG,
        CommuteError::Darboux(d) => darboux_code(d),
        CommuteError::NoNonconstantSolution { predicted: true, .. } => code::PREDICTED_MISSING,
        CommuteError::NoNonconstantSolution { predicted: false, .. } | CommuteError::SearchBudgetExceeded(_) => {
            code::NO_SOLUTION
        }
        CommuteError::NotSymmetricGenerator(_) | CommuteError::Internal(_) => code::INTERNAL,
    }
}

fn numeric_code(e: &NumError) -> u8 {
    match e {
        NumError::Config(_) | NumError::Truncation(_) | NumError::Pole(_) | NumError::Domain(_) => code::CONFIG,
        NumError::Overflow(_) | NumError::SeriesNonconvergence(_) => code::RESIDUAL,
    }
}

pub fn cmd_solve(job: &JobConfig) -> Result<Outcome> {
    let (g1, g2) = job.contours()?;
    let c = match certified(job)? {
        Ok(c) => c,
        Err(outcome) => return Ok(outcome),
    };
    let search = if job.search.minimal {
        Search::Minimal { max_total: job.search.max_total }
    } else {
        match (job.search.l1, job.search.l2) {
            (Some(l1), Some(l2)) => Search::Fixed(l1, l2),
            _ => anyhow::bail!("a fixed search needs both l1 and l2"),
        }
    };
    let sol = match solve_commuting(&c, &g1, &g2, search) {
        Ok(s) => s,
        Err(e) => return Ok(Outcome::fail(commute_code(&e), String::new(), e.to_string())),
    };
    let mut report = format!("gamma1 = \"{}\"\ngamma2 = \"{}\"\n", g1.describe(), g2.describe());
    report.push_str(&sol.report());
    let tol = job.numeric.tol;
    let numeric = match numeric_certificate(&c, &sol.d, &g1, &g2, &job.numeric.setup()) {
        Ok(r) => r,
        Err(e) => {
            write_out(job, &[("solution.txt", &report)])?;
            return Ok(Outcome::fail(numeric_code(&e), report, format!("numerical certificate: {e}")));
        }
    };
    let passed = numeric.passes(tol);
    report.push_str("\n[commutator]\n");
    report.push_str(&numeric.to_text());
    writeln!(report, "tolerance = {tol:e}\npassed = {passed}")?;
    write_out(job, &[("solution.txt", &report), ("residuals.csv", &numeric.residuals_csv())])?;
    if passed {
        Ok(Outcome::ok(report))
    } else if numeric.degenerate() {
        Ok(Outcome::fail(
            code::RESIDUAL,
            report,
            format!("the kernel vanishes to rounding level (cancellation {:.3e}); no residual is measurable", numeric.kernel_cancellation),
        ))
    } else {
        Ok(Outcome::fail(code::RESIDUAL, report, format!("max residual {:.3e} above tolerance {tol:e}", numeric.max)))
    }
}

pub fn cmd_eval(job: &JobConfig, x: Complex64, z: Complex64) -> Result<Outcome> {
    let eval = match job.numeric.kernel {
        KernelName::Exp => PsiEval::exp_pair(),
        KernelName::Data => match job.data() {
            Ok(d) => PsiEval::new(&d),
            Err(DataFailure::Config(e)) => return Err(e),
            Err(DataFailure::Check(e)) => return Ok(Outcome::fail(darboux_code(&e), String::new(), e.to_string())),
        },
    };
    match eval.x_jet(x, z, 1) {
        Ok(jet) => {
            let [psi, dpsi] = [jet.c[0], jet.c[1]];
            Ok(Outcome::ok(format!(
                "x = {x}\nz = {z}\npsi_re = {:.16e}\npsi_im = {:.16e}\ndpsi_dx_re = {:.16e}\ndpsi_dx_im = {:.16e}\n",
                psi.re, psi.im, dpsi.re, dpsi.im
            )))
        }
        Err(e) => Ok(Outcome::fail(numeric_code(&e), String::new(), e.to_string())),
    }
}

pub fn parse_complex(text: &str) -> Result<Complex64> {
    text.trim().replace(' ', "").parse::<Complex64>().map_err(|_| anyhow::anyhow!("not a complex number: {text:?}"))
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<JobConfig> {
    let mut job = JobConfig::load(path)?;
    overrides.apply(&mut job);
    Ok(job)
}
