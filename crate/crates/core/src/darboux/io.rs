//! TOML form of Darboux data.
//!
//! ```toml
//! family = "bessel:1/2"
//! R = "(x^2) * Dx^2 + (-4*x) * Dx + (6)"
//! v = "t"
//! g = "1"
//! m = 1
//! normalizer = "z^2"
//! epsilon = 1
//! verified = true
//! ```
//!
//! `v` is a polynomial in `x` for Airy data and in `t = x^2` for Bessel data.
//! `verified = true` is only written for certified data and is re-checked on load.

use serde::{Deserialize, Serialize};

use super::{certify, Certified, DarbouxData, DarbouxError, Sign};
use crate::bispectral::Family;
use crate::exactalg::grammar::{format_diffop, format_poly, parse_diffop, parse_poly, ParseError};
use crate::exactalg::Var;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DarbouxFile {
    pub family: Family,
    #[serde(rename = "R")]
    pub r: String,
    pub v: String,
    pub g: String,
    #[serde(default)]
    pub m: usize,
    pub normalizer: String,
    #[serde(default = "default_epsilon")]
    pub epsilon: i64,
    #[serde(default)]
    pub verified: bool,
}

fn default_epsilon() -> i64 {
    1
}

#[derive(Debug, thiserror::Error)]
pub enum DataFileError {
    #[error("malformed data file: {0}")]
    Toml(String),
    #[error("field `{field}`: {source}")]
    Parse { field: &'static str, source: ParseError },
    #[error("field `{0}` is invalid")]
    Field(&'static str),
    #[error("file is marked verified but the check fails: {0}")]
    Verification(DarbouxError),
}

impl DarbouxFile {
    fn from_data(d: &DarbouxData, verified: bool) -> Self {
        let vvar = if d.family.is_bessel() { 't' } else { 'x' };
        Self {
            family: d.family.clone(),
            r: format_diffop(&d.r),
            v: format_poly(&d.v, vvar),
            g: format_poly(&d.g, 't'),
            m: d.m,
            normalizer: format_poly(&d.normalizer, 'z'),
            epsilon: d.epsilon.value(),
            verified,
        }
    }

    pub fn to_data(&self) -> Result<DarbouxData, DataFileError> {
        let field = |field: &'static str| move |source| DataFileError::Parse { field, source };
        let r = parse_diffop(&self.r, Var::X).map_err(field("R"))?;
        if r.var() != Var::X {
            return Err(DataFileError::Field("R"));
        }
        Ok(DarbouxData {
            family: self.family.clone(),
            r,
            v: parse_poly(&self.v).map_err(field("v"))?,
            g: parse_poly(&self.g).map_err(field("g"))?,
            m: self.m,
            normalizer: parse_poly(&self.normalizer).map_err(field("normalizer"))?,
            epsilon: Sign::from_value(self.epsilon).ok_or(DataFileError::Field("epsilon"))?,
        })
    }
}

/// Unverified serialization (`verified = false`).
pub fn to_toml(d: &DarbouxData) -> String {
    toml::to_string(&DarbouxFile::from_data(d, false)).expect("plain fields serialize")
}

/// Serialization of certified data (`verified = true`).
pub fn certified_to_toml(c: &Certified) -> String {
    toml::to_string(&DarbouxFile::from_data(c.data(), true)).expect("plain fields serialize")
}

/// Parses a data file; a `verified = true` flag is honored only if the data
/// passes the checks again.
pub fn from_toml(text: &str) -> Result<(DarbouxData, Option<Certified>), DataFileError> {
    let file: DarbouxFile = toml::from_str(text).map_err(|e| DataFileError::Toml(e.to_string()))?;
    let data = file.to_data()?;
    let cert = if file.verified { Some(certify(&data).map_err(DataFileError::Verification)?) } else { None };
    Ok((data, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::{corpus, ladder};
    use crate::exactalg::q;

    #[test]
    fn round_trip_corpus() {
        for (name, d) in corpus() {
            let c = certify(&d).unwrap();
            let text = certified_to_toml(&c);
            let (back, cert) = from_toml(&text).unwrap();
            assert_eq!(back, d, "{name}");
            assert!(cert.is_some());
        }
    }

    #[test]
    fn false_verified_flag_is_rejected() {
        let mut d = ladder(&q(1, 2), 2).unwrap();
        d.g = crate::exactalg::UniPoly::from_ints(&[2]);
        let text = to_toml(&d).replace("verified = false", "verified = true");
        assert!(matches!(from_toml(&text), Err(DataFileError::Verification(_))));
        let (_, cert) = from_toml(&to_toml(&d)).unwrap();
        assert!(cert.is_none());
    }

    #[test]
    fn bad_operator_text() {
        let text = to_toml(&ladder(&q(1, 2), 2).unwrap()).replace("Dx^2", "Dq^2");
        assert!(matches!(from_toml(&text), Err(DataFileError::Parse { field: "R", .. })));
    }
}
