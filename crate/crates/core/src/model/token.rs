use std::borrow::Borrow;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// An opaque identifier: unit ids, actor names, document and tool tokens.
///
/// Tokens are non-empty, contain no whitespace or control characters, do not
/// start with `#` and are never the bare absent-field marker `-`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Token(String);

impl Token {
    pub fn new(s: impl Into<String>) -> Result<Token> {
        let s = s.into();
        let ok = !s.is_empty()
            && s != "-"
            && !s.starts_with('#')
            && !s.starts_with('"')
            && s.chars().all(|c| !c.is_whitespace() && !c.is_control());
        if ok {
            Ok(Token(s))
        } else {
            Err(Error::InvalidToken(s))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for Token {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}
