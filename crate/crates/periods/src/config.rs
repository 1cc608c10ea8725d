use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fkp::default_orbit_bound;
use crate::numeric_period::{AxisPoles, QuadConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Pretty,
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Guaranteed decimal digits; the working precision is binary64.
    pub precision: u32,
    pub quad_tol: f64,
    /// Shell bound for matrix sums.
    pub matrix_bound: i64,
    /// Truncation order of q-expansions.
    pub series_terms: usize,
    /// Bound on the leading coefficient in the class sum of `f_{k,P}`; `None` picks by weight.
    pub orbit_bound: Option<i64>,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    pub axis_poles: AxisPoles,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            precision: 15,
            quad_tol: 1e-10,
            matrix_bound: 400,
            series_terms: 60,
            orbit_bound: None,
            cache_dir: None,
            format: Format::Pretty,
            axis_poles: AxisPoles::Reject,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.precision == 0 || self.precision > 15 {
            return Err(Error::Invalid(format!("precision {} is outside 1..=15 (binary64 arithmetic)", self.precision)));
        }
        if !(self.quad_tol > 0.0) {
            return Err(Error::Invalid("quad_tol must be positive".into()));
        }
        if self.matrix_bound < 1 || self.series_terms < 1 || self.orbit_bound.is_some_and(|a| a < 2) {
            return Err(Error::Invalid("bounds must be positive".into()));
        }
        Ok(())
    }

    pub fn orbit_bound_for(&self, k: u32) -> i64 {
        self.orbit_bound.unwrap_or_else(|| default_orbit_bound(k))
    }

    pub fn quad(&self) -> QuadConfig {
        QuadConfig { tol: self.quad_tol, axis_poles: self.axis_poles, ..Default::default() }
    }

    /// Short content hash of the settings that affect numeric values.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.cache_dir = None;
        c.format = Format::Pretty;
        content_hash(&c)
    }
}

pub fn content_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable");
    let digest = Sha256::digest(bytes);
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_hash() {
        let c = Config::default();
        c.validate().unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: Config = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let mut d = c.clone();
        d.format = Format::Csv;
        assert_eq!(c.hash(), d.hash());
        d.quad_tol = 1e-8;
        assert_ne!(c.hash(), d.hash());
        let partial: Config = serde_json::from_str(r#"{"matrix_bound": 100}"#).unwrap();
        assert_eq!(partial.matrix_bound, 100);
        assert!(Config { precision: 30, ..Default::default() }.validate().is_err());
    }
}
