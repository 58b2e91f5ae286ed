//! Tokenization and n-gram extraction shared by every metric.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// How a sentence is cut into tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenScheme {
    /// Split on runs of Unicode whitespace.
    Whitespace,
    /// One token per Unicode scalar, whitespace dropped.
    Character,
}

impl TokenScheme {
    /// Default scheme for a language tag: character tokens for CJK languages,
    /// whitespace tokens otherwise.
    pub fn for_language(tag: &str) -> Self {
        let primary = tag
            .split(['-', '_'])
            .next()
            .unwrap_or("")
            .to_ascii_lowercase();
        match primary.as_str() {
            "zh" | "cmn" | "yue" | "wuu" | "ja" | "jpn" | "ko" | "kor" | "zho" | "chi" => {
                TokenScheme::Character
            }
            _ => TokenScheme::Whitespace,
        }
    }

    fn separator(self) -> &'static str {
        match self {
            TokenScheme::Whitespace => " ",
            TokenScheme::Character => "",
        }
    }
}

impl fmt::Display for TokenScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenScheme::Whitespace => "whitespace",
            TokenScheme::Character => "character",
        })
    }
}

impl FromStr for TokenScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "whitespace" | "word" => Ok(TokenScheme::Whitespace),
            "character" | "char" => Ok(TokenScheme::Character),
            other => Err(Error::InvalidConfig(format!(
                "unknown tokenization scheme {other:?}"
            ))),
        }
    }
}

/// An ordered list of tokens together with the scheme that produced them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenSequence {
    tokens: Vec<String>,
    scheme: TokenScheme,
}

impl TokenSequence {
    pub fn new(tokens: Vec<String>, scheme: TokenScheme) -> Self {
        Self { tokens, scheme }
    }

    /// Builds a sequence from string slices; mostly useful in tests.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S], scheme: TokenScheme) -> Self {
        Self::new(
            tokens.iter().map(|t| t.as_ref().to_string()).collect(),
            scheme,
        )
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn scheme(&self) -> TokenScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Joins tokens back into text so that re-tokenizing under the same
    /// scheme yields this sequence again.
    pub fn joined(&self) -> String {
        self.tokens.join(self.scheme.separator())
    }

    /// Re-tokenizes the joined text under another scheme.
    pub fn retokenize(&self, scheme: TokenScheme) -> TokenSequence {
        if scheme == self.scheme {
            self.clone()
        } else {
            tokenize(&self.joined(), scheme)
        }
    }
}

/// Cuts `text` into tokens under `scheme`. Empty or all-whitespace text gives
/// an empty sequence.
pub fn tokenize(text: &str, scheme: TokenScheme) -> TokenSequence {
    let tokens = match scheme {
        TokenScheme::Whitespace => text.split_whitespace().map(str::to_string).collect(),
        TokenScheme::Character => text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(String::from)
            .collect(),
    };
    TokenSequence { tokens, scheme }
}

/// Tokenization settings carried by a benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tokenizer {
    pub scheme: TokenScheme,
    /// Lowercase before splitting. Only applied under the whitespace scheme.
    pub lowercase: bool,
}

impl Tokenizer {
    pub fn new(scheme: TokenScheme) -> Self {
        Self {
            scheme,
            lowercase: true,
        }
    }

    pub fn for_language(tag: &str) -> Self {
        Self::new(TokenScheme::for_language(tag))
    }

    pub fn with_lowercase(mut self, lowercase: bool) -> Self {
        self.lowercase = lowercase;
        self
    }

    pub fn tokenize(&self, text: &str) -> TokenSequence {
        if self.lowercase && self.scheme == TokenScheme::Whitespace {
            tokenize(&text.to_lowercase(), self.scheme)
        } else {
            tokenize(text, self.scheme)
        }
    }
}

impl Default for Tokenizer {
    fn default() -> Self {
        Self::new(TokenScheme::Whitespace)
    }
}

/// Multiset of n-grams keyed by token windows borrowed from the sequence.
pub type NgramCounts<'a> = HashMap<&'a [String], usize>;

/// All contiguous `n`-grams of `seq` with multiplicity.
///
/// # Panics
///
/// Panics if `n == 0`.
pub fn ngrams(seq: &TokenSequence, n: usize) -> NgramCounts<'_> {
    assert!(n >= 1, "n-gram order must be positive");
    let mut counts = HashMap::new();
    for window in seq.tokens.windows(n) {
        *counts.entry(window).or_insert(0) += 1;
    }
    counts
}
