//! System outputs: one JSONL line per translated test sentence.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lang::{LanguageCode, LanguagePair, Registry};
use crate::textio;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslationRecord {
    pub id: String,
    pub src_lang: LanguageCode,
    pub tgt_lang: LanguageCode,
    pub src: String,
    pub hyp: String,
    #[serde(rename = "ref")]
    pub reference: String,
    /// Externally computed scores such as COMET.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external: Option<BTreeMap<String, f64>>,
}

impl TranslationRecord {
    pub fn pair(&self) -> LanguagePair {
        LanguagePair::new(self.src_lang.clone(), self.tgt_lang.clone())
    }
}

/// Rejects duplicate ids and languages outside the registry.
pub fn validate_records(records: &[TranslationRecord], registry: &Registry) -> Result<()> {
    let mut ids = BTreeSet::new();
    for r in records {
        registry.check(&r.src_lang)?;
        registry.check(&r.tgt_lang)?;
        if r.src_lang == r.tgt_lang {
            return Err(Error::InvalidArgument(format!("record {:?} has identical languages", r.id)));
        }
        if !ids.insert(r.id.as_str()) {
            return Err(Error::IdMismatch(format!("duplicate record id {:?}", r.id)));
        }
    }
    Ok(())
}

pub fn parse_records(text: &str, path: &Path) -> Result<Vec<TranslationRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse(path, i + 1, e.to_string())))
        .collect()
}

pub fn load_records(path: &Path, registry: &Registry) -> Result<Vec<TranslationRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let records = parse_records(&text, path)?;
    validate_records(&records, registry)?;
    Ok(records)
}

pub fn records_to_jsonl(records: &[TranslationRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn save_records(path: &Path, records: &[TranslationRecord]) -> Result<()> {
    textio::write_file(path, records_to_jsonl(records)?.as_bytes())
}
