//! Defaults for every subcommand, optionally read from one TOML file.
//!
//! ```toml
//! data_dir = "data"
//! port = 8080
//! timezone = "+09:00"
//! tau = 0.25
//! min_shares = 3
//! embeddings = "vectors.txt"
//! rules = "rules.toml"
//! ui_dir = "ui"
//!
//! [labels]
//! min_votes = 5
//! majority = 0.6
//! ```
//!
//! Command-line flags override the file.

use std::path::{Path, PathBuf};

use debunk_core::dataset::LabelPolicy;
use serde::Deserialize;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub data_dir: PathBuf,
    pub port: u16,
    /// UTC offset that defines the archive's calendar day.
    pub timezone: String,
    pub tau: f64,
    /// Tweets need strictly more shares than this.
    pub min_shares: u64,
    /// Word vectors in word2vec text format.
    pub embeddings: Option<PathBuf>,
    /// Rules file (patterns, relations, per-language settings); the built-in
    /// rules when unset.
    pub rules: Option<PathBuf>,
    pub ui_dir: Option<PathBuf>,
    pub labels: LabelPolicy,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            data_dir: PathBuf::from("data"),
            port: 8080,
            timezone: "+00:00".into(),
            tau: 0.25,
            min_shares: 3,
            embeddings: None,
            rules: None,
            ui_dir: None,
            labels: LabelPolicy::default(),
        }
    }
}

impl Settings {
    pub fn from_toml_str(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("reading settings {}: {e}", path.display()))?;
        Self::from_toml_str(&text).map_err(|e| anyhow::anyhow!("settings {}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let s = Settings::from_toml_str("port = 9000\n[labels]\nmin_votes = 3\nmajority = 0.7\n").unwrap();
        assert_eq!(s.port, 9000);
        assert_eq!(s.tau, 0.25);
        assert_eq!(s.labels.min_votes, 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Settings::from_toml_str("prot = 1").is_err());
    }
}
