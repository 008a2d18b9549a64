use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// UI texts per interface language. Adding a language is a data change:
/// list it in `languages` and provide the full key set under `texts`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationBundle {
    pub languages: Vec<String>,
    pub texts: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslationError {
    #[error("language {0:?} is listed but has no texts")]
    MissingLanguage(String),
    #[error("language {language:?} lacks text key {key:?}")]
    IncompleteTranslation { language: String, key: String },
    #[error("language {language:?} has text key {key:?} unknown to {reference:?}")]
    ExtraKey {
        language: String,
        key: String,
        reference: String,
    },
    #[error("cannot read translations: {0}")]
    Io(String),
    #[error("translations are not valid JSON: {0}")]
    Json(String),
}

impl TranslationBundle {
    /// Every listed language must have exactly the key set of the first one.
    pub fn validate(&self) -> Result<(), TranslationError> {
        let Some(first) = self.languages.first() else {
            return Ok(());
        };
        let keys_of = |lang: &String| {
            self.texts
                .get(lang)
                .map(|t| t.keys().cloned().collect::<BTreeSet<_>>())
                .ok_or_else(|| TranslationError::MissingLanguage(lang.clone()))
        };
        let reference = keys_of(first)?;
        for lang in &self.languages[1..] {
            let keys = keys_of(lang)?;
            if let Some(key) = reference.difference(&keys).next() {
                return Err(TranslationError::IncompleteTranslation {
                    language: lang.clone(),
                    key: key.clone(),
                });
            }
            if let Some(key) = keys.difference(&reference).next() {
                return Err(TranslationError::ExtraKey {
                    language: lang.clone(),
                    key: key.clone(),
                    reference: first.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, TranslationError> {
        let bundle: TranslationBundle =
            serde_json::from_str(text).map_err(|e| TranslationError::Json(e.to_string()))?;
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn load(path: &Path) -> Result<Self, TranslationError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TranslationError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}
