//! Lexical anonymization of identifiers in student code.
//!
//! Every identifier that is neither a keyword nor a listed builtin is
//! renamed to `v0`, `v1`, ... in order of first occurrence. Strings,
//! comments, whitespace and all other tokens are copied byte for byte.

mod lexer;

use std::sync::OnceLock;

use indexmap::IndexMap;
use thiserror::Error;

pub use lexer::{tokenize, LexerProfile, Token, TokenKind};

/// Original identifier to replacement, in order of first occurrence.
pub type IdentifierMap = IndexMap<String, String>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnonymizeError {
    #[error("no lexer profile for language family {0:?}")]
    UnknownLanguageFamily(String),
}

const BUNDLED_PROFILES: &[&str] = &[include_str!("../../profiles/python.json")];

fn bundled() -> &'static [LexerProfile] {
    static PROFILES: OnceLock<Vec<LexerProfile>> = OnceLock::new();
    PROFILES.get_or_init(|| {
        BUNDLED_PROFILES
            .iter()
            .map(|json| serde_json::from_str(json).expect("bundled lexer profile is valid"))
            .collect()
    })
}

pub fn profile_for(family: &str) -> Result<&'static LexerProfile, AnonymizeError> {
    bundled()
        .iter()
        .find(|p| p.family == family)
        .ok_or_else(|| AnonymizeError::UnknownLanguageFamily(family.to_string()))
}

pub fn anonymize_code(code: &str, family: &str) -> Result<(String, IdentifierMap), AnonymizeError> {
    Ok(anonymize_with(code, profile_for(family)?))
}

pub fn anonymize_with(code: &str, profile: &LexerProfile) -> (String, IdentifierMap) {
    let mut map = IdentifierMap::new();
    let mut out = String::with_capacity(code.len());
    for token in tokenize(code, profile) {
        let renamable = token.kind == TokenKind::Identifier
            && !profile.keywords.contains(token.text)
            && !profile.builtins.contains(token.text);
        if renamable {
            let next = map.len();
            let replacement = map
                .entry(token.text.to_string())
                .or_insert_with(|| format!("v{next}"));
            out.push_str(replacement);
        } else {
            out.push_str(token.text);
        }
    }
    (out, map)
}
