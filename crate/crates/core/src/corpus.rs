//! Parallel corpus ingestion, quality filtering and per-pair sampling.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::lang::{LanguageCode, LanguagePair};
use crate::rng::SeededRng;

/// NFC-normalizes and trims; interior whitespace is kept verbatim.
pub fn normalize_text(text: &str) -> String {
    text.nfc().collect::<String>().trim().to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelSentence {
    pub src_lang: LanguageCode,
    pub tgt_lang: LanguageCode,
    pub src_text: String,
    pub tgt_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

impl ParallelSentence {
    pub fn new(
        src_lang: LanguageCode,
        tgt_lang: LanguageCode,
        src_text: &str,
        tgt_text: &str,
        score: Option<f64>,
    ) -> Result<Self> {
        if src_lang == tgt_lang {
            return Err(Error::InvalidSentence(format!(
                "source and target language are both {src_lang}"
            )));
        }
        let src_text = normalize_text(src_text);
        let tgt_text = normalize_text(tgt_text);
        for (side, t) in [("source", &src_text), ("target", &tgt_text)] {
            if t.is_empty() {
                return Err(Error::InvalidSentence(format!("empty {side} text")));
            }
            if t.contains(['\n', '\r']) {
                return Err(Error::InvalidSentence(format!("newline in {side} text")));
            }
        }
        if let Some(s) = score {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::InvalidSentence(format!("score {s} outside [0, inf)")));
            }
        }
        Ok(ParallelSentence {
            src_lang,
            tgt_lang,
            src_text,
            tgt_text,
            score,
        })
    }

    pub fn pair(&self) -> LanguagePair {
        LanguagePair::new(self.src_lang.clone(), self.tgt_lang.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusFormat {
    /// `src<TAB>tgt`
    TsvPair,
    /// `score<TAB>src<TAB>tgt`, the WikiMatrix layout
    TsvScored,
    /// `{"src_lang", "tgt_lang", "src_text", "tgt_text", "score"?}` per line
    Jsonl,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv-pair" => Ok(CorpusFormat::TsvPair),
            "tsv-scored" => Ok(CorpusFormat::TsvScored),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            other => Err(Error::InvalidArgument(format!(
                "unknown corpus format {other:?} (expected tsv-pair, tsv-scored or jsonl)"
            ))),
        }
    }
}

impl fmt::Display for CorpusFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusFormat::TsvPair => "tsv-pair",
            CorpusFormat::TsvScored => "tsv-scored",
            CorpusFormat::Jsonl => "jsonl",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub path: PathBuf,
    pub format: CorpusFormat,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MalformedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub pairs: Vec<ParallelSentence>,
    pub provenance: Provenance,
    /// Lines skipped at load time.
    pub malformed: Vec<MalformedLine>,
}

impl Corpus {
    pub fn from_sentences(pairs: Vec<ParallelSentence>, label: &str) -> Self {
        Corpus {
            pairs,
            provenance: Provenance {
                path: PathBuf::from(label),
                format: CorpusFormat::Jsonl,
            },
            malformed: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn with_pairs(&self, pairs: Vec<ParallelSentence>) -> Corpus {
        Corpus {
            pairs,
            provenance: self.provenance.clone(),
            malformed: self.malformed.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Fraction of malformed lines above which loading fails.
    pub max_malformed_fraction: f64,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            max_malformed_fraction: 0.10,
        }
    }
}

#[derive(Deserialize)]
struct JsonlIn {
    src_lang: String,
    tgt_lang: String,
    src_text: String,
    tgt_text: String,
    #[serde(default)]
    score: Option<f64>,
}

fn parse_line(
    line: &str,
    format: CorpusFormat,
    src: &LanguageCode,
    tgt: &LanguageCode,
) -> std::result::Result<ParallelSentence, String> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    if line.trim().is_empty() {
        return Err("empty line".into());
    }
    let sentence = match format {
        CorpusFormat::TsvPair => {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 2 {
                return Err(format!("expected 2 tab-separated fields, found {}", fields.len()));
            }
            ParallelSentence::new(src.clone(), tgt.clone(), fields[0], fields[1], None)
        }
        CorpusFormat::TsvScored => {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(format!("expected 3 tab-separated fields, found {}", fields.len()));
            }
            let score: f64 = fields[0]
                .trim()
                .parse()
                .map_err(|_| format!("bad score {:?}", fields[0]))?;
            ParallelSentence::new(src.clone(), tgt.clone(), fields[1], fields[2], Some(score))
        }
        CorpusFormat::Jsonl => {
            let rec: JsonlIn = serde_json::from_str(line).map_err(|e| e.to_string())?;
            if rec.src_lang != src.as_str() || rec.tgt_lang != tgt.as_str() {
                return Err(format!(
                    "language pair {}-{} does not match declared {src}-{tgt}",
                    rec.src_lang, rec.tgt_lang
                ));
            }
            ParallelSentence::new(src.clone(), tgt.clone(), &rec.src_text, &rec.tgt_text, rec.score)
        }
    };
    sentence.map_err(|e| e.to_string())
}

/// Loads a corpus file, skipping malformed lines (recorded in
/// [`Corpus::malformed`]) unless their share exceeds the configured limit.
pub fn load_corpus(
    path: &Path,
    format: CorpusFormat,
    src: &LanguageCode,
    tgt: &LanguageCode,
    opts: LoadOptions,
) -> Result<Corpus> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text, path, format, src, tgt, opts)
}

pub fn parse_corpus(
    text: &str,
    path: &Path,
    format: CorpusFormat,
    src: &LanguageCode,
    tgt: &LanguageCode,
    opts: LoadOptions,
) -> Result<Corpus> {
    if src == tgt {
        return Err(Error::InvalidSentence(format!("source and target language are both {src}")));
    }
    let mut pairs = Vec::new();
    let mut malformed = Vec::new();
    let mut total = 0;
    for (i, line) in text.lines().enumerate() {
        total += 1;
        match parse_line(line, format, src, tgt) {
            Ok(s) => pairs.push(s),
            Err(reason) => malformed.push(MalformedLine { line: i + 1, reason }),
        }
    }
    if total > 0 && malformed.len() as f64 > opts.max_malformed_fraction * total as f64 {
        let first = &malformed[0];
        return Err(Error::TooManyMalformed {
            path: path.to_path_buf(),
            malformed: malformed.len(),
            total,
            limit: opts.max_malformed_fraction * 100.0,
            first_line: first.line,
            first_reason: first.reason.clone(),
        });
    }
    Ok(Corpus {
        pairs,
        provenance: Provenance {
            path: path.to_path_buf(),
            format,
        },
        malformed,
    })
}

#[derive(Serialize)]
struct JsonlOut<'a> {
    src_lang: &'a str,
    tgt_lang: &'a str,
    src_text: &'a str,
    tgt_text: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    score: Option<f64>,
}

/// Renders the corpus in `format`. Scores use the shortest representation
/// that parses back to the same `f64`.
pub fn serialize_corpus(corpus: &Corpus, format: CorpusFormat) -> Result<String> {
    let mut out = String::new();
    for (i, s) in corpus.pairs.iter().enumerate() {
        match format {
            CorpusFormat::TsvPair => {
                check_tab_free(s)?;
                out.push_str(&format!("{}\t{}\n", s.src_text, s.tgt_text));
            }
            CorpusFormat::TsvScored => {
                check_tab_free(s)?;
                let score = s.score.ok_or(Error::MissingScore { index: i })?;
                out.push_str(&format!("{score}\t{}\t{}\n", s.src_text, s.tgt_text));
            }
            CorpusFormat::Jsonl => {
                let rec = JsonlOut {
                    src_lang: s.src_lang.as_str(),
                    tgt_lang: s.tgt_lang.as_str(),
                    src_text: &s.src_text,
                    tgt_text: &s.tgt_text,
                    score: s.score,
                };
                out.push_str(&serde_json::to_string(&rec)?);
                out.push('\n');
            }
        }
    }
    Ok(out)
}

fn check_tab_free(s: &ParallelSentence) -> Result<()> {
    if s.src_text.contains('\t') || s.tgt_text.contains('\t') {
        return Err(Error::InvalidSentence("tab inside text cannot be written as TSV".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum QualityFilter {
    Threshold { t: f64 },
    TopK { k: usize },
    BottomK { k: usize },
}

fn scores(c: &Corpus) -> Result<Vec<f64>> {
    c.pairs
        .iter()
        .enumerate()
        .map(|(i, s)| s.score.ok_or(Error::MissingScore { index: i }))
        .collect()
}

/// Keeps sentences by alignment score. Output order is input order; for the
/// rank-based modes ties go to the earlier sentence.
pub fn filter_by_quality(c: &Corpus, mode: QualityFilter) -> Result<Corpus> {
    let scores = scores(c)?;
    let keep: Vec<bool> = match mode {
        QualityFilter::Threshold { t } => scores.iter().map(|&s| s >= t).collect(),
        QualityFilter::TopK { k } => rank_keep(&scores, k, true),
        QualityFilter::BottomK { k } => rank_keep(&scores, k, false),
    };
    Ok(c.with_pairs(
        c.pairs
            .iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(s, _)| s.clone())
            .collect(),
    ))
}

/// Marks the `k` highest (or lowest) scores, earlier position winning ties.
fn rank_keep(scores: &[f64], k: usize, top: bool) -> Vec<bool> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let by_score = if top {
            scores[b].total_cmp(&scores[a])
        } else {
            scores[a].total_cmp(&scores[b])
        };
        by_score.then(a.cmp(&b))
    });
    let mut keep = vec![false; scores.len()];
    for &i in order.iter().take(k) {
        keep[i] = true;
    }
    keep
}

/// How the per-pair subset is chosen; recorded in manifests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionStrategy {
    Random,
    TopScore,
}

/// Uniform sample without replacement of `min(n, len)` sentences per language
/// pair. Kept sentences stay in input order.
pub fn sample_per_pair(c: &Corpus, n: usize, seed: u64) -> Result<Corpus> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let mut rng = SeededRng::new(seed);
    let mut keep = vec![false; c.len()];
    for indices in group_by_pair(c).values() {
        for j in rng.choose_indices(indices.len(), n) {
            keep[indices[j]] = true;
        }
    }
    Ok(c.with_pairs(
        c.pairs
            .iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(s, _)| s.clone())
            .collect(),
    ))
}

/// `n` sentences per pair by either strategy.
pub fn select_per_pair(c: &Corpus, n: usize, strategy: SelectionStrategy, seed: u64) -> Result<Corpus> {
    match strategy {
        SelectionStrategy::Random => sample_per_pair(c, n, seed),
        SelectionStrategy::TopScore => {
            if n == 0 {
                return Err(Error::InvalidArgument("sample size must be at least 1".into()));
            }
            let all = scores(c)?;
            let mut keep = vec![false; c.len()];
            for indices in group_by_pair(c).values() {
                let group: Vec<f64> = indices.iter().map(|&i| all[i]).collect();
                for (j, k) in rank_keep(&group, n, true).into_iter().enumerate() {
                    keep[indices[j]] = k;
                }
            }
            Ok(c.with_pairs(
                c.pairs
                    .iter()
                    .zip(keep)
                    .filter(|(_, k)| *k)
                    .map(|(s, _)| s.clone())
                    .collect(),
            ))
        }
    }
}

fn group_by_pair(c: &Corpus) -> BTreeMap<LanguagePair, Vec<usize>> {
    let mut groups: BTreeMap<LanguagePair, Vec<usize>> = BTreeMap::new();
    for (i, s) in c.pairs.iter().enumerate() {
        groups.entry(s.pair()).or_default().push(i);
    }
    groups
}
