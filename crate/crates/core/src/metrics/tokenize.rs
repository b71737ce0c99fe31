//! BLEU tokenizers, bit-compatible with sacreBLEU's `13a`, `intl` and `char`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TokenizerId {
    /// mteval-v13a rules (sacreBLEU default).
    #[serde(rename = "13a")]
    Mteval13a,
    /// mteval-v14 `--international-tokenization`: Unicode punctuation and symbols.
    #[serde(rename = "intl")]
    International,
    /// One token per non-space character.
    #[serde(rename = "char")]
    Char,
}

impl TokenizerId {
    pub fn as_str(self) -> &'static str {
        match self {
            TokenizerId::Mteval13a => "13a",
            TokenizerId::International => "intl",
            TokenizerId::Char => "char",
        }
    }
}

impl fmt::Display for TokenizerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TokenizerId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "13a" | "intl-13a" => Ok(TokenizerId::Mteval13a),
            "intl" => Ok(TokenizerId::International),
            "char" => Ok(TokenizerId::Char),
            other => Err(Error::InvalidArgument(format!("unknown tokenizer {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub tokenizer: TokenizerId,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

pub fn tokenize(text: &str, mode: TokenizerId) -> TokenSequence {
    let tokens = match mode {
        TokenizerId::Mteval13a => split_py(&tokenize_13a(text)),
        TokenizerId::International => split_py(&tokenize_intl(text)),
        TokenizerId::Char => text
            .chars()
            .filter(|c| !is_py_whitespace(*c))
            .map(String::from)
            .collect(),
    };
    TokenSequence {
        tokens,
        tokenizer: mode,
    }
}

/// Python's `str.isspace` set: Unicode White_Space plus the ASCII
/// information separators U+001C..U+001F.
fn is_py_whitespace(c: char) -> bool {
    c.is_whitespace() || ('\u{1c}'..='\u{1f}').contains(&c)
}

fn split_py(s: &str) -> Vec<String> {
    s.split(is_py_whitespace)
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

struct Rules13a {
    symbols: Regex,
    period_after: Regex,
    period_before: Regex,
    dash: Regex,
}

fn rules_13a() -> &'static Rules13a {
    static RULES: OnceLock<Rules13a> = OnceLock::new();
    RULES.get_or_init(|| Rules13a {
        symbols: Regex::new(r"([\{-~\[-` -&\(-\+:-@/])").unwrap(),
        period_after: Regex::new(r"([^0-9])([\.,])").unwrap(),
        period_before: Regex::new(r"([\.,])([^0-9])").unwrap(),
        dash: Regex::new(r"([0-9])(-)").unwrap(),
    })
}

fn tokenize_13a(line: &str) -> String {
    let mut line = line
        .replace("<skipped>", "")
        .replace("-\n", "")
        .replace('\n', " ");
    if line.contains('&') {
        line = line
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    let r = rules_13a();
    let line = format!(" {line} ");
    let line = r.symbols.replace_all(&line, " ${1} ");
    let line = r.period_after.replace_all(&line, "${1} ${2} ");
    let line = r.period_before.replace_all(&line, " ${1} ${2}");
    r.dash.replace_all(&line, "${1} ${2} ").into_owned()
}

struct RulesIntl {
    punct_after: Regex,
    punct_before: Regex,
    symbol: Regex,
}

fn rules_intl() -> &'static RulesIntl {
    static RULES: OnceLock<RulesIntl> = OnceLock::new();
    RULES.get_or_init(|| RulesIntl {
        punct_after: Regex::new(r"(\P{N})(\p{P})").unwrap(),
        punct_before: Regex::new(r"(\p{P})(\P{N})").unwrap(),
        symbol: Regex::new(r"(\p{S})").unwrap(),
    })
}

fn tokenize_intl(line: &str) -> String {
    let r = rules_intl();
    let line = r.punct_after.replace_all(line, "${1} ${2} ");
    let line = r.punct_before.replace_all(&line, " ${1} ${2}");
    r.symbol.replace_all(&line, " ${1} ").into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str, mode: TokenizerId) -> Vec<String> {
        tokenize(text, mode).tokens
    }

    #[test]
    fn hello_world_13a() {
        assert_eq!(toks("Hello, world!", TokenizerId::Mteval13a), ["Hello", ",", "world", "!"]);
    }

    #[test]
    fn char_mode() {
        assert_eq!(toks("你好", TokenizerId::Char), ["你", "好"]);
        assert_eq!(toks("a b", TokenizerId::Char), ["a", "b"]);
    }

    #[test]
    fn empty() {
        for m in [TokenizerId::Mteval13a, TokenizerId::International, TokenizerId::Char] {
            assert!(tokenize("", m).is_empty());
            assert!(tokenize("   ", m).is_empty());
        }
    }

    #[test]
    fn numbers_keep_separators() {
        assert_eq!(toks("It costs 3.50, ok.", TokenizerId::Mteval13a), ["It", "costs", "3.50", ",", "ok", "."]);
        assert_eq!(toks("1990-2000", TokenizerId::Mteval13a), ["1990", "-", "2000"]);
    }

    #[test]
    fn entities_unescaped() {
        assert_eq!(toks("a &amp; b &quot;c&quot;", TokenizerId::Mteval13a), ["a", "&", "b", "\"", "c", "\""]);
    }

    #[test]
    fn intl_splits_unicode_punctuation() {
        assert_eq!(toks("«Bonjour»", TokenizerId::International), ["«", "Bonjour", "»"]);
        // 13a leaves non-ASCII punctuation attached
        assert_eq!(toks("«Bonjour»", TokenizerId::Mteval13a), ["«Bonjour»"]);
    }

    #[test]
    fn no_empty_tokens() {
        let t = tokenize(" \u{1f} ,, .. -- ", TokenizerId::Mteval13a);
        assert!(t.tokens.iter().all(|x| !x.is_empty()));
    }

    #[test]
    fn tokenizer_names() {
        assert_eq!("intl-13a".parse::<TokenizerId>().unwrap(), TokenizerId::Mteval13a);
        assert_eq!("char".parse::<TokenizerId>().unwrap().to_string(), "char");
        assert!("spm".parse::<TokenizerId>().is_err());
    }
}
