//! Language codes, ordered language pairs and the code/display-name registry.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textio;

/// A 2–3 letter lowercase ASCII language code such as `en` or `sw`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LanguageCode(String);

impl LanguageCode {
    pub fn new(code: &str) -> Result<Self> {
        let ok = (2..=3).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_lowercase());
        if ok {
            Ok(LanguageCode(code.to_string()))
        } else {
            Err(Error::InvalidLanguageCode(code.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_english(&self) -> bool {
        self.0 == "en"
    }
}

impl fmt::Display for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for LanguageCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LanguageCode::new(s)
    }
}

impl TryFrom<String> for LanguageCode {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        LanguageCode::new(&s)
    }
}

impl From<LanguageCode> for String {
    fn from(c: LanguageCode) -> String {
        c.0
    }
}

/// Ordered (source, target) pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LanguagePair {
    pub source: LanguageCode,
    pub target: LanguageCode,
}

impl LanguagePair {
    pub fn new(source: LanguageCode, target: LanguageCode) -> Self {
        LanguagePair { source, target }
    }

    pub fn parse(source: &str, target: &str) -> Result<Self> {
        Ok(LanguagePair::new(source.parse()?, target.parse()?))
    }

    pub fn reversed(&self) -> Self {
        LanguagePair::new(self.target.clone(), self.source.clone())
    }
}

impl fmt::Display for LanguagePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.source, self.target)
    }
}

/// Bijective mapping between language codes and display names.
///
/// Iteration follows registration order, which is also the row/column order
/// of emitted condition matrices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    order: Vec<LanguageCode>,
    names: BTreeMap<LanguageCode, String>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, code: LanguageCode, name: &str) -> Result<()> {
        let name = name.trim();
        if name.is_empty() {
            return Err(Error::Registry(format!("empty display name for {code}")));
        }
        if self.names.contains_key(&code) {
            return Err(Error::Registry(format!("duplicate code {code}")));
        }
        if self.names.values().any(|n| n == name) {
            return Err(Error::Registry(format!("duplicate display name {name:?}")));
        }
        self.names.insert(code.clone(), name.to_string());
        self.order.push(code);
        Ok(())
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut reg = Registry::new();
        for (code, name) in pairs {
            reg.insert(code.parse()?, name)?;
        }
        Ok(reg)
    }

    /// Reads `code<TAB>display name` lines; `#` starts a comment line.
    pub fn load(path: &Path) -> Result<Self> {
        let mut reg = Registry::new();
        for (lineno, line) in textio::read_lines(path)? {
            let (code, name) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, lineno, "expected code<TAB>name"))?;
            let code = code
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(path, lineno, e.to_string()))?;
            reg.insert(code, name)
                .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        }
        Ok(reg)
    }

    pub fn name(&self, code: &LanguageCode) -> Result<&str> {
        self.names
            .get(code)
            .map(String::as_str)
            .ok_or_else(|| Error::UnknownLanguage(code.to_string()))
    }

    pub fn code_for_name(&self, name: &str) -> Option<&LanguageCode> {
        self.names.iter().find(|(_, n)| *n == name).map(|(c, _)| c)
    }

    pub fn contains(&self, code: &LanguageCode) -> bool {
        self.names.contains_key(code)
    }

    pub fn check(&self, code: &LanguageCode) -> Result<()> {
        self.name(code).map(|_| ())
    }

    pub fn codes(&self) -> &[LanguageCode] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

#[cfg(test)]
pub(crate) fn test_registry() -> Registry {
    Registry::from_pairs([
        ("en", "English"),
        ("de", "German"),
        ("fr", "French"),
        ("ca", "Catalan"),
        ("fi", "Finnish"),
        ("ru", "Russian"),
        ("bg", "Bulgarian"),
        ("zh", "Chinese"),
        ("ko", "Korean"),
        ("ar", "Arabic"),
        ("sw", "Swahili"),
        ("hi", "Hindi"),
        ("ta", "Tamil"),
    ])
    .unwrap()
}
