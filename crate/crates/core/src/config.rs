//! Run configuration files.
//!
//! A TOML document with three optional sections; dotted keys work too:
//!
//! ```toml
//! [experiment]
//! lambda_sweep = [10, 20, 40]
//! times = [1.5]
//! excitations = [[1, 1]]
//! a2_sign = "both"
//!
//! oracle.n_points = 16384
//! oracle.quadrature_rule.kind = "simpson"
//!
//! [output]
//! dir = "out"
//! formats = ["csv", "json", "svg"]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::duhamel::OracleConfig;
use crate::error::{invalid, Error, Result};
use crate::report::ExperimentSpec;

/// Environment variable overriding `output.dir`.
pub const OUTPUT_DIR_ENV: &str = "MOTT1D_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
    pub verbosity: u8,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("mott1d-out"),
            formats: vec![Format::Csv, Format::Json],
            verbosity: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentSpec,
    pub oracle: OracleConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    /// The experiment with the oracle section folded in.
    pub fn spec(&self) -> ExperimentSpec {
        ExperimentSpec {
            oracle_cfg: self.oracle,
            ..self.experiment.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.output.formats.is_empty() {
            return invalid("output.formats must not be empty");
        }
        self.spec().validate()
    }

    /// `output.dir`, unless the environment override is set.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => self.output.dir.clone(),
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duhamel::TimeRule;
    use crate::report::SignChoice;

    #[test]
    fn empty_document_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn dotted_keys_and_sections() {
        let c = parse_config(
            r#"
            oracle.n_time_nodes = 64
            oracle.quadrature_rule = { kind = "gauss_legendre", order = 8 }
            [experiment]
            lambda_sweep = [10, 20]
            excitations = [[1, 2]]
            a2_sign = "minus"
            [output]
            formats = ["svg"]
            "#,
        )
        .unwrap();
        assert_eq!(c.oracle.n_time_nodes, Some(64));
        assert_eq!(c.oracle.quadrature_rule, TimeRule::GaussLegendre { order: 8 });
        assert_eq!(c.experiment.lambda_sweep, vec![10.0, 20.0]);
        assert_eq!(c.experiment.excitations, vec![(1, 2)]);
        assert_eq!(c.experiment.a2_sign, SignChoice::Minus);
        assert_eq!(c.spec().oracle_cfg.n_time_nodes, Some(64));
        assert_eq!(c.output.formats, vec![Format::Svg]);
    }

    #[test]
    fn typos_and_bad_values_are_rejected() {
        assert!(parse_config("[experiment]\nlambda_swep = [10]").is_err());
        assert!(parse_config("[experiment]\nlambda_sweep = []").is_err());
        assert!(parse_config("oracle.n_points = 1000").is_err());
        assert!(parse_config("[output]\nformats = []").is_err());
    }

    #[test]
    fn roundtrip() {
        let c = RunConfig::default();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(parse_config(&text).unwrap(), c);
    }
}
