//! CLI configuration: flags take precedence over environment variables,
//! which take precedence over defaults.

use std::path::PathBuf;

use crate::Error;

pub const ENV_CACHE_DIR: &str = "NEWSPACE_CACHE_DIR";
pub const ENV_LEVEL_CAP: &str = "NEWSPACE_LEVEL_CAP";
pub const ENV_WEIGHT_CAP: &str = "NEWSPACE_WEIGHT_CAP";
pub const ENV_FORMAT: &str = "NEWSPACE_FORMAT";
pub const ENV_PARALLEL: &str = "NEWSPACE_PARALLELISM";
pub const ENV_STAR: &str = "NEWSPACE_STAR_RESTRICT";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(Error::InvalidParameter(format!(
                "unknown output format '{other}' (expected json, csv or text)"
            ))),
        }
    }
}

/// Resolved configuration for one CLI invocation.
#[derive(Clone, Debug)]
pub struct CliConfig {
    pub cache_dir: Option<PathBuf>,
    pub level_cap: u32,
    pub weight_cap: u32,
    pub format: OutputFormat,
    pub star_restrict: bool,
    pub parallelism: usize,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            cache_dir: None,
            level_cap: 200,
            weight_cap: 4,
            format: OutputFormat::Json,
            star_restrict: false,
            parallelism: 1,
        }
    }
}

impl CliConfig {
    /// Defaults overridden by environment variables.
    pub fn from_env() -> Result<Self, Error> {
        let mut cfg = CliConfig::default();
        if let Ok(dir) = std::env::var(ENV_CACHE_DIR) {
            if !dir.is_empty() {
                cfg.cache_dir = Some(PathBuf::from(dir));
            }
        }
        if let Ok(v) = std::env::var(ENV_LEVEL_CAP) {
            cfg.level_cap = parse_positive(&v, ENV_LEVEL_CAP)?;
        }
        if let Ok(v) = std::env::var(ENV_WEIGHT_CAP) {
            cfg.weight_cap = parse_positive(&v, ENV_WEIGHT_CAP)?;
        }
        if let Ok(v) = std::env::var(ENV_FORMAT) {
            cfg.format = OutputFormat::parse(&v)?;
        }
        if let Ok(v) = std::env::var(ENV_PARALLEL) {
            cfg.parallelism = parse_positive(&v, ENV_PARALLEL)? as usize;
        }
        if let Ok(v) = std::env::var(ENV_STAR) {
            cfg.star_restrict = v == "1" || v.eq_ignore_ascii_case("true");
        }
        Ok(cfg)
    }

    /// Effective level cap at a given weight: the configured cap at weight 2,
    /// scaled down to 3/10 (the default 200 -> 60) at weight 4 and above.
    pub fn effective_level_cap(&self, weight: u32) -> u32 {
        if weight <= 2 {
            self.level_cap
        } else {
            (self.level_cap * 3 / 10).max(1)
        }
    }

    /// Validate `(level, weight)` against the caps.
    pub fn check_space_params(&self, level: u32, weight: u32) -> Result<(), Error> {
        if weight < 2 || weight % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "weight must be even and at least 2, got {weight}"
            )));
        }
        if weight > self.weight_cap {
            return Err(Error::InvalidParameter(format!(
                "weight {weight} exceeds the cap {}",
                self.weight_cap
            )));
        }
        let cap = self.effective_level_cap(weight);
        if level == 0 || level > cap {
            return Err(Error::InvalidParameter(format!(
                "level {level} is outside the allowed range 1..={cap} at weight {weight}"
            )));
        }
        Ok(())
    }
}

fn parse_positive(s: &str, what: &str) -> Result<u32, Error> {
    s.parse::<u32>()
        .ok()
        .filter(|v| *v > 0)
        .ok_or_else(|| Error::InvalidParameter(format!("{what} must be a positive integer, got '{s}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_scale_with_weight() {
        let cfg = CliConfig::default();
        assert_eq!(cfg.effective_level_cap(2), 200);
        assert_eq!(cfg.effective_level_cap(4), 60);
        assert!(cfg.check_space_params(100, 2).is_ok());
        assert!(cfg.check_space_params(100, 4).is_err());
        assert!(cfg.check_space_params(40, 4).is_ok());
        assert!(cfg.check_space_params(10, 3).is_err());
        assert!(cfg.check_space_params(10, 6).is_err()); // above weight cap
    }

    #[test]
    fn format_parsing() {
        assert_eq!(OutputFormat::parse("json").unwrap(), OutputFormat::Json);
        assert!(OutputFormat::parse("yaml").is_err());
    }
}
