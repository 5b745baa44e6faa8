//! Per-language rules: debunking patterns, demonstrative stoplists and the
//! handful of switches that differ between scripts.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::{CompiledPattern, PatternError, PatternSpec};

const DEFAULT_RULES: &str = include_str!("../rules/default.toml");

/// Language code such as `en` or `ja`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Lang(String);

impl Lang {
    pub fn new(code: impl Into<String>) -> Self {
        Lang(code.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Lang {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let code = s.trim();
        if code.is_empty() || !code.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(ConfigError::BadLang(s.to_string()));
        }
        Ok(Lang(code.to_string()))
    }
}

/// Which neighbouring sentence the extractor moves to when the fake part
/// climbs to the root without finding a phrase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HopDirection {
    Following,
    Preceding,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LanguageProfile {
    pub hop: HopDirection,
    /// Separator placed between token forms when rendering a phrase.
    pub joiner: String,
    /// Matches may not start or end inside a word.
    pub word_boundary: bool,
    pub case_insensitive: bool,
    pub demonstratives: Vec<String>,
    pub patterns: Vec<String>,
}

impl LanguageProfile {
    pub fn is_demonstrative(&self, form: &str) -> bool {
        let form = form.trim();
        self.demonstratives.iter().any(|d| {
            if self.case_insensitive {
                d.to_lowercase() == form.to_lowercase()
            } else {
                d == form
            }
        })
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read rules file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid rules file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid language code {0:?}")]
    BadLang(String),
    #[error("language {0} has no patterns")]
    NoPatterns(Lang),
    #[error("language {lang}: {source}")]
    Pattern {
        lang: Lang,
        #[source]
        source: PatternError,
    },
}

/// The whole rules file: relation labels plus one profile per language.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RulesConfig {
    pub relations: Vec<String>,
    #[serde(rename = "lang")]
    pub languages: BTreeMap<Lang, LanguageProfile>,
}

impl Default for RulesConfig {
    fn default() -> Self {
        RulesConfig::from_toml_str(DEFAULT_RULES).expect("shipped rules file is valid")
    }
}

impl RulesConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let rules: RulesConfig = toml::from_str(text)?;
        for (lang, profile) in &rules.languages {
            lang.as_str().parse::<Lang>()?;
            if profile.patterns.is_empty() {
                return Err(ConfigError::NoPatterns(lang.clone()));
            }
        }
        Ok(rules)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn profile(&self, lang: &Lang) -> Option<&LanguageProfile> {
        self.languages.get(lang)
    }

    pub fn supports(&self, lang: &Lang) -> bool {
        self.languages.contains_key(lang)
    }

    pub fn supported(&self) -> impl Iterator<Item = &Lang> {
        self.languages.keys()
    }

    /// Compiles every pattern of `lang`. Unknown languages give an empty list.
    pub fn compile_patterns(&self, lang: &Lang) -> Result<Vec<CompiledPattern>, ConfigError> {
        let Some(profile) = self.profile(lang) else {
            return Ok(Vec::new());
        };
        profile
            .patterns
            .iter()
            .map(|source| {
                let spec = PatternSpec::new(lang.clone(), source.clone());
                CompiledPattern::compile(&spec, profile).map_err(|source| ConfigError::Pattern {
                    lang: lang.clone(),
                    source,
                })
            })
            .collect()
    }

    /// Whether a dependency label links a candidate phrase to the fake part.
    ///
    /// Labels are compared after mapping UD v2 names onto the v1 names used in
    /// the rules file, then by their base label (the part before `:`).
    pub fn is_extraction_relation(&self, deprel: &str) -> bool {
        let canonical = canonical_relation(deprel);
        let base = canonical.split(':').next().unwrap_or(canonical);
        self.relations.iter().any(|r| r == canonical || r == base)
    }
}

fn canonical_relation(deprel: &str) -> &str {
    match deprel {
        "obj" => "dobj",
        "nsubj:pass" => "nsubjpass",
        "csubj:pass" => "csubj",
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_rules_have_ten_patterns() {
        let rules = RulesConfig::default();
        let en = rules.profile(&Lang::new("en")).unwrap();
        let ja = rules.profile(&Lang::new("ja")).unwrap();
        assert_eq!(en.patterns.len(), 5);
        assert_eq!(ja.patterns.len(), 5);
        assert_eq!(en.hop, HopDirection::Following);
        assert_eq!(ja.hop, HopDirection::Preceding);
        assert!(rules.compile_patterns(&Lang::new("en")).is_ok());
        assert!(rules.compile_patterns(&Lang::new("ja")).is_ok());
    }

    #[test]
    fn relation_labels_accept_v2_names() {
        let rules = RulesConfig::default();
        for label in ["nsubj", "nsubj:pass", "obj", "dobj", "csubj", "appos", "iobj", "nsubj:outer"] {
            assert!(rules.is_extraction_relation(label), "{label}");
        }
        for label in ["amod", "obl", "root", "cop", "acl"] {
            assert!(!rules.is_extraction_relation(label), "{label}");
        }
    }

    #[test]
    fn demonstratives_fold_case_only_when_configured() {
        let rules = RulesConfig::default();
        let en = rules.profile(&Lang::new("en")).unwrap();
        assert!(en.is_demonstrative("This"));
        assert!(en.is_demonstrative("IT"));
        assert!(!en.is_demonstrative("NASA"));
        let ja = rules.profile(&Lang::new("ja")).unwrap();
        assert!(ja.is_demonstrative("それ"));
    }

    #[test]
    fn new_language_needs_only_configuration() {
        let text = r#"
relations = ["nsubj"]
[lang.de]
hop = "following"
joiner = " "
word_boundary = true
case_insensitive = true
demonstratives = ["das"]
patterns = ["ist (völlig) falsch"]
"#;
        let rules = RulesConfig::from_toml_str(text).unwrap();
        let de = Lang::new("de");
        let compiled = rules.compile_patterns(&de).unwrap();
        assert_eq!(compiled[0].find_all("Das ist völlig falsch!").len(), 1);
    }

    #[test]
    fn rejects_language_without_patterns() {
        let text = r#"
relations = []
[lang.xx]
hop = "following"
joiner = " "
word_boundary = true
case_insensitive = true
demonstratives = []
patterns = []
"#;
        assert!(matches!(RulesConfig::from_toml_str(text), Err(ConfigError::NoPatterns(_))));
    }
}
