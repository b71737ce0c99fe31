//! Rendering parallel and monolingual text into instruction-formatted
//! training lines, and few-shot prompts.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{normalize_text, ParallelSentence};
use crate::error::{Error, Result};
use crate::lang::{LanguageCode, LanguagePair, Registry};
use crate::rng::{self, SeededRng};
use crate::textio;

pub const DEFAULT_TRANSLATION_TEMPLATE: &str = "Translation: [{src_name}]: {src} [{tgt_name}]: {tgt}";
pub const DEFAULT_MONOLINGUAL_TEMPLATE: &str = "[{tgt_name}]: {tgt}";

/// Substring that makes the inverse parse of a rendered line ambiguous.
pub const SEPARATOR: &str = "]: ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Translation,
    Monolingual,
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstanceKind::Translation => "translation",
            InstanceKind::Monolingual => "monolingual",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionInstance {
    pub text: String,
    /// For monolingual instances source and target are the same language.
    pub pair: LanguagePair,
    pub kind: InstanceKind,
    /// Set when an input text contains [`SEPARATOR`].
    pub separator_collision: bool,
}

/// Translation and monolingual patterns with `{src_name}`, `{tgt_name}`,
/// `{src}` and `{tgt}` placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Templates {
    pub translation: String,
    pub monolingual: String,
}

impl Default for Templates {
    fn default() -> Self {
        Templates {
            translation: DEFAULT_TRANSLATION_TEMPLATE.to_string(),
            monolingual: DEFAULT_MONOLINGUAL_TEMPLATE.to_string(),
        }
    }
}

const PLACEHOLDERS: [&str; 4] = ["{src_name}", "{tgt_name}", "{src}", "{tgt}"];

impl Templates {
    pub fn new(translation: &str, monolingual: &str) -> Result<Self> {
        for p in PLACEHOLDERS {
            if translation.matches(p).count() != 1 {
                return Err(Error::InvalidArgument(format!(
                    "translation template must contain {p} exactly once"
                )));
            }
        }
        let mono_name = monolingual.matches("{src_name}").count() + monolingual.matches("{tgt_name}").count();
        let mono_text = monolingual.matches("{src}").count() + monolingual.matches("{tgt}").count();
        if mono_name != 1 || mono_text != 1 {
            return Err(Error::InvalidArgument(
                "monolingual template needs one language-name and one text placeholder".into(),
            ));
        }
        if translation.contains('\n') || monolingual.contains('\n') {
            return Err(Error::InvalidArgument("templates must be single-line".into()));
        }
        Ok(Templates {
            translation: translation.to_string(),
            monolingual: monolingual.to_string(),
        })
    }

    /// Override file: `translation=<pattern>` and `monolingual=<pattern>`
    /// lines; a missing key keeps the default.
    pub fn load(path: &Path) -> Result<Self> {
        let mut t = Templates::default();
        for (lineno, line) in textio::read_lines(path)? {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(path, lineno, "expected key=pattern"))?;
            match key.trim() {
                "translation" => t.translation = value.to_string(),
                "monolingual" => t.monolingual = value.to_string(),
                other => return Err(Error::parse(path, lineno, format!("unknown template key {other:?}"))),
            }
        }
        Templates::new(&t.translation, &t.monolingual)
    }
}

fn fill(template: &str, src_name: &str, tgt_name: &str, src: &str, tgt: &str) -> String {
    // single pass so that placeholder-like text inside sentences is left alone
    let mut out = String::with_capacity(template.len() + src.len() + tgt.len() + 16);
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let tail = &rest[open..];
        let (value, len) = if tail.starts_with("{src_name}") {
            (src_name, 10)
        } else if tail.starts_with("{tgt_name}") {
            (tgt_name, 10)
        } else if tail.starts_with("{src}") {
            (src, 5)
        } else if tail.starts_with("{tgt}") {
            (tgt, 5)
        } else {
            ("{", 1)
        };
        out.push_str(value);
        rest = &tail[len..];
    }
    out.push_str(rest);
    out
}

pub fn render_translation_instruction(
    s: &ParallelSentence,
    registry: &Registry,
    templates: &Templates,
) -> Result<InstructionInstance> {
    let src_name = registry.name(&s.src_lang)?;
    let tgt_name = registry.name(&s.tgt_lang)?;
    Ok(InstructionInstance {
        text: fill(&templates.translation, src_name, tgt_name, &s.src_text, &s.tgt_text),
        pair: s.pair(),
        kind: InstanceKind::Translation,
        separator_collision: s.src_text.contains(SEPARATOR) || s.tgt_text.contains(SEPARATOR),
    })
}

pub fn render_monolingual_instruction(
    lang: &LanguageCode,
    text: &str,
    registry: &Registry,
    templates: &Templates,
) -> Result<InstructionInstance> {
    let name = registry.name(lang)?;
    let text = normalize_text(text);
    if text.is_empty() {
        return Err(Error::InvalidArgument("empty monolingual text".into()));
    }
    if text.contains(['\n', '\r']) {
        return Err(Error::InvalidArgument("newline in monolingual text".into()));
    }
    Ok(InstructionInstance {
        text: fill(&templates.monolingual, name, name, &text, &text),
        pair: LanguagePair::new(lang.clone(), lang.clone()),
        kind: InstanceKind::Monolingual,
        separator_collision: text.contains(SEPARATOR),
    })
}

/// Fields recovered from a rendered translation line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedTranslation {
    pub src_lang: LanguageCode,
    pub tgt_lang: LanguageCode,
    pub src_text: String,
    pub tgt_text: String,
}

/// Inverse of the translation template. Language names are matched against
/// the registry; exact for texts without [`SEPARATOR`].
pub struct InstructionParser {
    re: Regex,
    registry: Registry,
}

impl InstructionParser {
    pub fn new(templates: &Templates, registry: &Registry) -> Result<Self> {
        let mut names: Vec<String> = registry
            .codes()
            .iter()
            .map(|c| registry.name(c).map(regex::escape))
            .collect::<Result<_>>()?;
        // longest first so that "Haitian Creole" wins over a hypothetical "Haitian"
        names.sort_by_key(|n| std::cmp::Reverse(n.len()));
        let names = names.join("|");
        let mut pattern = String::from("^");
        let mut rest = templates.translation.as_str();
        while let Some(open) = rest.find('{') {
            pattern.push_str(&regex::escape(&rest[..open]));
            let tail = &rest[open..];
            let (group, len) = if tail.starts_with("{src_name}") {
                (format!("(?P<src_name>{names})"), 10)
            } else if tail.starts_with("{tgt_name}") {
                (format!("(?P<tgt_name>{names})"), 10)
            } else if tail.starts_with("{src}") {
                ("(?P<src>.+?)".to_string(), 5)
            } else if tail.starts_with("{tgt}") {
                ("(?P<tgt>.+?)".to_string(), 5)
            } else {
                (regex::escape("{"), 1)
            };
            pattern.push_str(&group);
            rest = &tail[len..];
        }
        pattern.push_str(&regex::escape(rest));
        pattern.push('$');
        let re = Regex::new(&pattern).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(InstructionParser {
            re,
            registry: registry.clone(),
        })
    }

    pub fn parse(&self, line: &str) -> Result<ParsedTranslation> {
        let caps = self
            .re
            .captures(line)
            .ok_or_else(|| Error::InvalidArgument(format!("not a translation instruction: {line:?}")))?;
        let code = |name: &str| {
            self.registry
                .code_for_name(name)
                .cloned()
                .ok_or_else(|| Error::UnknownLanguage(name.to_string()))
        };
        Ok(ParsedTranslation {
            src_lang: code(&caps["src_name"])?,
            tgt_lang: code(&caps["tgt_name"])?,
            src_text: caps["src"].to_string(),
            tgt_text: caps["tgt"].to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingManifest {
    pub total: usize,
    /// Keyed `src-tgt`; monolingual instances appear as `xx-xx`.
    pub per_pair_counts: BTreeMap<String, usize>,
    pub per_kind_counts: BTreeMap<String, usize>,
    pub seed: u64,
    pub shuffle_algorithm: String,
    /// SHA-256 of the emitted file bytes.
    pub digest: String,
    /// Instances whose text contains the `]: ` separator (1-based output lines).
    pub separator_collisions: Vec<usize>,
}

/// Shuffled training file bytes plus manifest, without touching the disk.
pub fn render_training_file(instances: &[InstructionInstance], shuffle_seed: u64) -> Result<(Vec<u8>, TrainingManifest)> {
    if instances.is_empty() {
        return Err(Error::InvalidArgument("no instances to write".into()));
    }
    let mut order: Vec<usize> = (0..instances.len()).collect();
    SeededRng::new(shuffle_seed).shuffle(&mut order);

    let mut bytes = Vec::new();
    let mut per_pair_counts = BTreeMap::new();
    let mut per_kind_counts = BTreeMap::new();
    let mut separator_collisions = Vec::new();
    for (line, &i) in order.iter().enumerate() {
        let inst = &instances[i];
        if inst.text.contains(['\n', '\r']) {
            return Err(Error::InvalidArgument(format!("instance {i} contains a newline")));
        }
        bytes.extend_from_slice(inst.text.as_bytes());
        bytes.push(b'\n');
        *per_pair_counts.entry(inst.pair.to_string()).or_insert(0) += 1;
        *per_kind_counts.entry(inst.kind.to_string()).or_insert(0) += 1;
        if inst.separator_collision {
            separator_collisions.push(line + 1);
        }
    }
    let manifest = TrainingManifest {
        total: instances.len(),
        per_pair_counts,
        per_kind_counts,
        seed: shuffle_seed,
        shuffle_algorithm: rng::ALGORITHM.to_string(),
        digest: textio::sha256_hex(&bytes),
        separator_collisions,
    };
    Ok((bytes, manifest))
}

/// Writes one instance per line in seeded shuffled order.
pub fn build_training_file(
    instances: &[InstructionInstance],
    shuffle_seed: u64,
    out: &Path,
) -> Result<TrainingManifest> {
    let (bytes, manifest) = render_training_file(instances, shuffle_seed)?;
    textio::write_file(out, &bytes)?;
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IclPrompt {
    pub demonstrations: Vec<(String, String)>,
    pub query_src: String,
    pub rendered: String,
}

/// `k` demonstrations drawn without replacement (never the query itself),
/// rendered as `src = tgt` lines followed by `query = `.
pub fn build_icl_prompt(demos: &[ParallelSentence], query: &str, k: usize, seed: u64) -> Result<IclPrompt> {
    let query_src = normalize_text(query);
    if query_src.contains(['\n', '\r']) {
        return Err(Error::InvalidArgument("newline in ICL query".into()));
    }
    let pool: Vec<&ParallelSentence> = demos.iter().filter(|d| d.src_text != query_src).collect();
    if pool.len() < k {
        return Err(Error::InvalidArgument(format!(
            "demonstration pool has {} usable sentences, {k} requested",
            pool.len()
        )));
    }
    let demonstrations: Vec<(String, String)> = SeededRng::new(seed)
        .choose_indices(pool.len(), k)
        .into_iter()
        .map(|i| (pool[i].src_text.clone(), pool[i].tgt_text.clone()))
        .collect();
    let mut rendered = String::new();
    for (s, t) in &demonstrations {
        rendered.push_str(&format!("{s} = {t}\n"));
    }
    rendered.push_str(&query_src);
    rendered.push_str(" = ");
    Ok(IclPrompt {
        demonstrations,
        query_src,
        rendered,
    })
}
