//! Character n-gram language identification.
//!
//! Each language gets additively smoothed n-gram tables (orders 1..=4) over
//! lowercased, whitespace-collapsed text padded with one space on each side.
//! A text is scored by the mean log-probability of all of its n-grams per
//! character; the best language wins and the gap to the runner-up is the
//! margin.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::lang::{LanguageCode, Registry};
use crate::textio;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LangIdConfig {
    pub max_order: usize,
    /// Additive smoothing constant.
    pub alpha: f64,
    /// Profiles trained on fewer characters carry a warning.
    pub min_training_chars: usize,
    /// Texts shorter than this (in non-space characters) are undetermined...
    pub min_text_chars: usize,
    /// ...unless the margin reaches this value.
    pub short_text_margin: f64,
}

impl Default for LangIdConfig {
    fn default() -> Self {
        LangIdConfig {
            max_order: 4,
            alpha: 0.5,
            min_training_chars: 20_000,
            min_text_chars: 20,
            short_text_margin: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderTable {
    pub n: usize,
    pub total: u64,
    /// Log-probability of any n-gram absent from `logprobs`.
    pub smoothing_mass: f64,
    pub logprobs: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LangProfile {
    pub lang: LanguageCode,
    pub training_chars: usize,
    pub warnings: Vec<String>,
    pub orders: Vec<OrderTable>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LangPrediction {
    pub lang: LanguageCode,
    /// Mean log-likelihood per character.
    pub score: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Identification {
    Language(LangPrediction),
    /// Empty text, or too short for a confident call; `best` is the argmax
    /// when there was anything to score.
    Undetermined { best: Option<LangPrediction> },
}

impl Identification {
    pub fn lang(&self) -> Option<&LanguageCode> {
        match self {
            Identification::Language(p) => Some(&p.lang),
            Identification::Undetermined { .. } => None,
        }
    }
}

fn prepare(text: &str) -> Vec<char> {
    let mut out = vec![' '];
    for c in text.nfc().flat_map(char::to_lowercase) {
        if c.is_whitespace() {
            if out.last() != Some(&' ') {
                out.push(' ');
            }
        } else {
            out.push(c);
        }
    }
    if out.last() != Some(&' ') {
        out.push(' ');
    }
    out
}

fn pack(chars: &[char]) -> u128 {
    let mut key = chars.len() as u128;
    for &c in chars {
        key = (key << 21) | c as u128;
    }
    key
}

fn unpack(mut key: u128) -> String {
    let mut chars = Vec::new();
    while key >= 1 << 21 {
        chars.push(char::from_u32((key & 0x1f_ffff) as u32).unwrap_or('\u{fffd}'));
        key >>= 21;
    }
    chars.reverse();
    chars.into_iter().collect()
}

type GramCounts = HashMap<u128, u64>;

/// Calls `f(order_index, key)` for every n-gram of the prepared text.
fn for_each_gram(chars: &[char], max_order: usize, mut f: impl FnMut(usize, u128)) {
    for n in 1..=max_order {
        if chars.len() < n {
            break;
        }
        for w in chars.windows(n) {
            // a lone space carries no information
            if n == 1 && w[0] == ' ' {
                continue;
            }
            f(n - 1, pack(w));
        }
    }
}

/// Trained identifier: the per-language profiles plus a merged lookup index.
#[derive(Debug, Clone)]
pub struct LangIdModel {
    pub config: LangIdConfig,
    pub profiles: Vec<LangProfile>,
    /// Per language and order: smoothing mass.
    base: Vec<Vec<f64>>,
    /// n-gram → (language index, logprob minus that language's smoothing mass).
    index: HashMap<u128, Vec<(u16, f64)>>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    config: LangIdConfig,
    profiles: Vec<LangProfile>,
}

impl LangIdModel {
    fn from_profiles(config: LangIdConfig, mut profiles: Vec<LangProfile>) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::LangId("no language profiles".into()));
        }
        profiles.sort_by(|a, b| a.lang.cmp(&b.lang));
        let mut base = Vec::with_capacity(profiles.len());
        let mut index: HashMap<u128, Vec<(u16, f64)>> = HashMap::new();
        for (li, p) in profiles.iter().enumerate() {
            if p.orders.len() != config.max_order {
                return Err(Error::LangId(format!("profile {} has {} orders", p.lang, p.orders.len())));
            }
            base.push(p.orders.iter().map(|o| o.smoothing_mass).collect());
            for o in &p.orders {
                for (gram, &lp) in &o.logprobs {
                    let chars: Vec<char> = gram.chars().collect();
                    if chars.len() != o.n {
                        return Err(Error::LangId(format!("{:?} is not a {}-gram", gram, o.n)));
                    }
                    index.entry(pack(&chars)).or_default().push((li as u16, lp - o.smoothing_mass));
                }
            }
        }
        Ok(LangIdModel {
            config,
            profiles,
            base,
            index,
        })
    }

    pub fn languages(&self) -> impl Iterator<Item = &LanguageCode> {
        self.profiles.iter().map(|p| &p.lang)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        textio::write_json(
            path,
            &ModelFile {
                format: "mfti-langid".into(),
                version: FORMAT_VERSION,
                config: self.config.clone(),
                profiles: self.profiles.clone(),
            },
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f: ModelFile = textio::read_json(path)?;
        if f.format != "mfti-langid" || f.version != FORMAT_VERSION {
            return Err(Error::LangId(format!(
                "{}: unsupported profile file {} v{}",
                path.display(),
                f.format,
                f.version
            )));
        }
        LangIdModel::from_profiles(f.config, f.profiles)
    }

    /// Mean per-character log-likelihood for every language, in code order.
    pub fn scores(&self, text: &str) -> Option<Vec<f64>> {
        let chars = prepare(text);
        let mut counts = vec![0usize; self.config.max_order];
        let mut delta = vec![0.0; self.profiles.len()];
        for_each_gram(&chars, self.config.max_order, |o, key| {
            counts[o] += 1;
            if let Some(entries) = self.index.get(&key) {
                for &(li, d) in entries {
                    delta[li as usize] += d;
                }
            }
        });
        if counts[0] == 0 {
            return None;
        }
        let n_chars = counts[0] as f64;
        Some(
            self.base
                .iter()
                .zip(&delta)
                .map(|(b, d)| (b.iter().zip(&counts).map(|(m, &c)| m * c as f64).sum::<f64>() + d) / n_chars)
                .collect(),
        )
    }
}

/// Trains one profile per registry language. Every registry language must
/// have at least one non-blank line.
pub fn train_profiles(
    registry: &Registry,
    mono: &BTreeMap<LanguageCode, Vec<String>>,
    config: &LangIdConfig,
) -> Result<LangIdModel> {
    if config.max_order == 0 || config.max_order > 5 {
        return Err(Error::InvalidArgument("max_order must be in 1..=5".into()));
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(config.alpha > 0.0) {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    for l in mono.keys() {
        registry.check(l)?;
    }
    let mut counts: Vec<(LanguageCode, usize, Vec<GramCounts>)> = Vec::new();
    for lang in registry.codes() {
        let lines = mono
            .get(lang)
            .ok_or_else(|| Error::LangId(format!("no training text for {lang}")))?;
        let mut tables = vec![HashMap::new(); config.max_order];
        let mut chars_seen = 0;
        for line in lines {
            let chars = prepare(line);
            chars_seen += chars.iter().filter(|&&c| c != ' ').count();
            for_each_gram(&chars, config.max_order, |o, key| *tables[o].entry(key).or_insert(0) += 1);
        }
        if chars_seen == 0 {
            return Err(Error::LangId(format!("training text for {lang} is empty")));
        }
        counts.push((lang.clone(), chars_seen, tables));
    }

    let vocab: Vec<usize> = (0..config.max_order)
        .map(|o| {
            counts
                .iter()
                .flat_map(|(_, _, t)| t[o].keys())
                .collect::<BTreeSet<_>>()
                .len()
        })
        .collect();

    let profiles = counts
        .into_iter()
        .map(|(lang, training_chars, tables)| {
            let mut warnings = Vec::new();
            if training_chars < config.min_training_chars {
                warnings.push(format!(
                    "trained on {training_chars} characters, below the minimum of {}",
                    config.min_training_chars
                ));
            }
            let orders = tables
                .into_iter()
                .enumerate()
                .map(|(o, table)| {
                    let total: u64 = table.values().sum();
                    let denom = (total as f64 + config.alpha * (vocab[o] as f64 + 1.0)).ln();
                    let logprobs = table
                        .into_iter()
                        .map(|(k, c)| (unpack(k), (c as f64 + config.alpha).ln() - denom))
                        .collect();
                    OrderTable {
                        n: o + 1,
                        total,
                        smoothing_mass: config.alpha.ln() - denom,
                        logprobs,
                    }
                })
                .collect();
            LangProfile {
                lang,
                training_chars,
                warnings,
                orders,
            }
        })
        .collect();
    LangIdModel::from_profiles(config.clone(), profiles)
}

/// Reads `<dir>/<code>.txt` (one sentence per line) for every registry language.
pub fn load_training_dir(registry: &Registry, dir: &Path) -> Result<BTreeMap<LanguageCode, Vec<String>>> {
    registry
        .codes()
        .iter()
        .map(|c| {
            let lines = textio::read_lines(&dir.join(format!("{c}.txt")))?;
            Ok((c.clone(), lines.into_iter().map(|(_, l)| l).collect()))
        })
        .collect()
}

/// Argmax over languages; ties go to the smaller language code.
pub fn identify(text: &str, model: &LangIdModel) -> Identification {
    let Some(scores) = model.scores(text) else {
        return Identification::Undetermined { best: None };
    };
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    let runner_up = scores
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, s)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    let margin = if runner_up.is_finite() { scores[best] - runner_up } else { f64::INFINITY };
    let pred = LangPrediction {
        lang: model.profiles[best].lang.clone(),
        score: scores[best],
        margin,
    };
    let visible = text.chars().filter(|c| !c.is_whitespace()).count();
    if visible < model.config.min_text_chars && margin < model.config.short_text_margin {
        Identification::Undetermined { best: Some(pred) }
    } else {
        Identification::Language(pred)
    }
}

/// External labels from a `id<TAB>lang` file. When `known_ids` is given,
/// every labelled id must be in it.
pub fn load_external_labels(
    path: &Path,
    registry: &Registry,
    known_ids: Option<&BTreeSet<String>>,
) -> Result<BTreeMap<String, LanguageCode>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in textio::read_lines(path)? {
        let (id, lang) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, lineno, "expected id<TAB>lang"))?;
        let lang: LanguageCode = lang
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad language code {lang:?}")))?;
        if !registry.contains(&lang) {
            return Err(Error::parse(path, lineno, format!("unknown language {lang}")));
        }
        if let Some(ids) = known_ids {
            if !ids.contains(id) {
                return Err(Error::parse(path, lineno, format!("label for unknown record {id:?}")));
            }
        }
        if out.insert(id.to_string(), lang).is_some() {
            return Err(Error::parse(path, lineno, format!("duplicate label for {id:?}")));
        }
    }
    Ok(out)
}
