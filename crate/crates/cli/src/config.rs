//! Job files.
//!
//! ```toml
//! family = "bessel:0"
//!
//! [data]
//! kind = "identity"          # or "ladder" (steps), "seeds" (seed list), "file" (path)
//!
//! [[gamma1.piece]]
//! from = [-1, 0]
//! to = [1, 0]
//!
//! [[gamma2.piece]]
//! from = [0, -2]
//! to = [0, 2]
//!
//! [search]
//! minimal = true             # default; set l1/l2 and minimal = false for a fixed pair
//! max_total = 10
//!
//! [numeric]
//! grid = 200
//! gamma2_nodes = 80
//! truncation = 8.0
//! tests = 20
//! tol = 1e-8
//! kernel = "exp"             # "data" (default) or "exp"
//!
//! [dims]
//! max_l = 5
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Relative paths are resolved against the directory of the job file.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use prolate_core::bispectral::Family;
use prolate_core::commute::contour::NumText;
use prolate_core::commute::{ContourConfig, ContourSpec};
use prolate_core::darboux::{darboux_from_kernel, from_toml, ladder, DarbouxData, DarbouxError, Seed};
use prolate_core::exactalg::parse_poly;
use prolate_core::numverify::{KernelChoice, NumericSetup};
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub family: Family,
    #[serde(default)]
    pub data: DataSpec,
    pub gamma1: Option<ContourConfig>,
    pub gamma2: Option<ContourConfig>,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub numeric: NumericConfig,
    #[serde(default)]
    pub dims: DimsConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DataSpec {
    #[default]
    Identity,
    Ladder {
        steps: usize,
    },
    Seeds {
        seed: Vec<SeedConfig>,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SeedConfig {
    Power {
        alpha: NumText,
        #[serde(default)]
        q: Option<String>,
    },
    AiryJet {
        lambda: NumText,
        k: usize,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(default = "yes")]
    pub minimal: bool,
    #[serde(default = "default_max_total")]
    pub max_total: usize,
    pub l1: Option<usize>,
    pub l2: Option<usize>,
}

fn yes() -> bool {
    true
}

fn default_max_total() -> usize {
    10
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { minimal: true, max_total: default_max_total(), l1: None, l2: None }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericConfig {
    pub grid: usize,
    pub gamma2_nodes: usize,
    pub truncation: f64,
    pub tests: usize,
    pub tol: f64,
    pub kernel: KernelName,
}

impl Default for NumericConfig {
    fn default() -> Self {
        let s = NumericSetup::default();
        NumericConfig {
            grid: s.grid,
            gamma2_nodes: s.gamma2_nodes,
            truncation: s.truncation,
            tests: s.tests,
            tol: 1e-8,
            kernel: KernelName::Data,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum KernelName {
    #[default]
    Data,
    Exp,
}

impl NumericConfig {
    pub fn setup(&self) -> NumericSetup {
        NumericSetup {
            grid: self.grid,
            gamma2_nodes: self.gamma2_nodes,
            truncation: self.truncation,
            tests: self.tests,
            kernel: match self.kernel {
                KernelName::Data => KernelChoice::Data,
                KernelName::Exp => KernelChoice::Exp,
            },
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimsConfig {
    #[serde(default = "default_max_l")]
    pub max_l: usize,
}

fn default_max_l() -> usize {
    5
}

impl Default for DimsConfig {
    fn default() -> Self {
        DimsConfig { max_l: default_max_l() }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

/// Data construction either fails on a malformed job (config error) or on
/// the exact checks.
pub enum DataFailure {
    Config(anyhow::Error),
    Check(DarbouxError),
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut job: JobConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        job.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        job.validate()?;
        Ok(job)
    }

    fn validate(&self) -> Result<()> {
        let n = &self.numeric;
        if n.grid == 0 || n.gamma2_nodes == 0 || n.tests == 0 {
            bail!("numeric.grid, numeric.gamma2_nodes and numeric.tests must be positive");
        }
        if !(n.truncation > 0.0 && n.truncation.is_finite()) {
            bail!("numeric.truncation must be a positive number");
        }
        if !(n.tol > 0.0) {
            bail!("numeric.tol must be positive");
        }
        if matches!(self.data, DataSpec::Ladder { .. }) && !self.family.is_bessel() {
            bail!("ladder data needs a Bessel family");
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// The Darboux data described by the job, not yet certified.
    pub fn data(&self) -> std::result::Result<DarbouxData, DataFailure> {
        match &self.data {
            DataSpec::Identity => Ok(DarbouxData::identity(self.family.clone())),
            DataSpec::Ladder { steps } => {
                let nu = self.family.nu().expect("validated");
                ladder(nu, *steps).map_err(DataFailure::Check)
            }
            DataSpec::Seeds { seed } => {
                let seeds = seed.iter().map(SeedConfig::to_seed).collect::<Result<Vec<_>>>().map_err(DataFailure::Config)?;
                darboux_from_kernel(&self.family, &seeds).map_err(DataFailure::Check)
            }
            DataSpec::File { path } => {
                let full = self.resolve(path);
                let text = std::fs::read_to_string(&full)
                    .with_context(|| format!("reading {}", full.display()))
                    .map_err(DataFailure::Config)?;
                let (data, _) = from_toml(&text).map_err(|e| DataFailure::Config(anyhow!("{}: {e}", full.display())))?;
                if data.family != self.family {
                    return Err(DataFailure::Config(anyhow!(
                        "data file family {} differs from the job family {}",
                        data.family,
                        self.family
                    )));
                }
                Ok(data)
            }
        }
    }

    pub fn contours(&self) -> Result<(ContourSpec, ContourSpec)> {
        let get = |c: &Option<ContourConfig>, name: &str| -> Result<ContourSpec> {
            let c = c.as_ref().ok_or_else(|| anyhow!("the job has no [{name}] contour"))?;
            ContourSpec::from_config(c).with_context(|| format!("contour {name}"))
        };
        Ok((get(&self.gamma1, "gamma1")?, get(&self.gamma2, "gamma2")?))
    }

    pub fn out_dir(&self) -> Option<PathBuf> {
        self.output.dir.as_deref().map(|d| self.resolve(d))
    }
}

impl SeedConfig {
    fn to_seed(&self) -> Result<Seed> {
        let num = |t: &NumText| t.parse().ok_or_else(|| anyhow!("not a rational number: {t:?}"));
        Ok(match self {
            SeedConfig::Power { alpha, q } => Seed::Power {
                alpha: num(alpha)?,
                q: match q {
                    Some(text) => parse_poly(text).with_context(|| format!("seed polynomial {text:?}"))?,
                    None => parse_poly("1").expect("constant"),
                },
            },
            SeedConfig::AiryJet { lambda, k } => Seed::AiryJet { lambda: num(lambda)?, k: *k },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let job: JobConfig = toml::from_str("family = \"airy\"").unwrap();
        assert!(matches!(job.data, DataSpec::Identity));
        assert!(job.search.minimal);
        assert_eq!(job.numeric.grid, 200);
        assert_eq!(job.dims.max_l, 5);
        assert!(job.contours().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<JobConfig>("family = \"airy\"\ngrid = 3").is_err());
        assert!(toml::from_str::<JobConfig>("family = \"airy\"\n[numeric]\ngird = 3").is_err());
    }

    #[test]
    fn seeds_parse() {
        let text = "family = \"airy\"\n[data]\nkind = \"seeds\"\nseed = [{ lambda = 0, k = 1 }]\n";
        let job: JobConfig = toml::from_str(text).unwrap();
        let DataSpec::Seeds { seed } = &job.data else { panic!() };
        assert!(matches!(seed[0].to_seed().unwrap(), Seed::AiryJet { k: 1, .. }));
        let text = "family = \"bessel:1/2\"\n[data]\nkind = \"seeds\"\nseed = [{ alpha = \"3/2\", q = \"1 + x^2\" }]\n";
        let job: JobConfig = toml::from_str(text).unwrap();
        let DataSpec::Seeds { seed } = &job.data else { panic!() };
        assert!(matches!(seed[0].to_seed().unwrap(), Seed::Power { .. }));
    }
}
