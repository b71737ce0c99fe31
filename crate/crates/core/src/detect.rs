//! Instruction-following error detectors: source copy (SC), off-target
//! (OT), over/under translation (OU) and oscillatory hallucination (OH).

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lang::LanguageCode;
use crate::langid::{identify, Identification, LangIdModel};
use crate::metrics::{length_ratio, sentence_bleu, signature, tokenize, MetricOptions};
use crate::records::TranslationRecord;
use crate::textio;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    /// SC fires when sentence BLEU against the source is strictly above this.
    pub sc_threshold: f64,
    /// OU fires when |hyp|/|ref| is strictly above `ou_upper` or below `ou_lower`.
    pub ou_upper: f64,
    pub ou_lower: f64,
    pub oh_max_n: usize,
    pub oh_min_repeats: usize,
    pub metrics: MetricOptions,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            sc_threshold: 80.0,
            ou_upper: 2.0,
            ou_lower: 0.5,
            oh_max_n: 4,
            oh_min_repeats: 3,
            metrics: MetricOptions::default(),
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.oh_max_n == 0 || self.oh_min_repeats == 0 {
            return Err(Error::InvalidArgument("OH n-gram size and repeat count must be positive".into()));
        }
        // negated so that NaN bounds are rejected too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.ou_lower < self.ou_upper) {
            return Err(Error::InvalidArgument("OU bounds must satisfy lower < upper".into()));
        }
        Ok(())
    }

    /// Audit string stored with every report.
    pub fn signature(&self) -> String {
        format!(
            "errors|sc:bleu>{}[{}]|ou:ratio>{}|ou:ratio<{}|ou_tok:bleu|oh:n<={},repeats>={}",
            self.sc_threshold,
            signature(self.metrics.tokenizer, self.metrics.sentence_smoothing),
            self.ou_upper,
            self.ou_lower,
            self.oh_max_n,
            self.oh_min_repeats
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorFlags {
    pub sc: bool,
    pub ot: bool,
    pub ou: bool,
    pub oh: bool,
    pub any: bool,
}

impl ErrorFlags {
    pub fn new(sc: bool, ot: bool, ou: bool, oh: bool) -> Self {
        ErrorFlags {
            sc,
            ot,
            ou,
            oh,
            any: sc || ot || ou || oh,
        }
    }
}

/// Where language labels for OT come from. External labels win for ids
/// they cover; the model handles the rest.
#[derive(Clone, Copy, Default)]
pub struct LidSource<'a> {
    pub model: Option<&'a LangIdModel>,
    pub external: Option<&'a BTreeMap<String, LanguageCode>>,
}

/// Label for one hypothesis; `None` means undetermined.
pub fn lid_label(r: &TranslationRecord, lid: LidSource<'_>) -> Result<Option<LanguageCode>> {
    if let Some(l) = lid.external.and_then(|m| m.get(&r.id)) {
        return Ok(Some(l.clone()));
    }
    let model = lid
        .model
        .ok_or_else(|| Error::LangId(format!("no language label for record {:?}", r.id)))?;
    Ok(match identify(&r.hyp, model) {
        Identification::Language(p) => Some(p.lang),
        Identification::Undetermined { .. } => None,
    })
}

pub fn detect_source_copy(r: &TranslationRecord, cfg: &DetectorConfig) -> bool {
    let tok = cfg.metrics.tokenizer_for(&r.src_lang);
    let hyp = tokenize(&r.hyp, tok);
    if hyp.is_empty() {
        return false;
    }
    sentence_bleu(&hyp, &tokenize(&r.src, tok), cfg.metrics.sentence_smoothing).score > cfg.sc_threshold
}

pub fn detect_off_target(r: &TranslationRecord, lid: LidSource<'_>) -> Result<bool> {
    Ok(lid_label(r, lid)?.as_ref() != Some(&r.tgt_lang))
}

pub fn detect_over_under(r: &TranslationRecord, cfg: &DetectorConfig) -> Result<bool> {
    let tok = cfg.metrics.tokenizer_for(&r.tgt_lang);
    let ratio = length_ratio(&tokenize(&r.hyp, tok), &tokenize(&r.reference, tok))
        .map_err(|_| Error::InvalidArgument(format!("record {:?} has an empty reference", r.id)))?;
    Ok(ratio > cfg.ou_upper || ratio < cfg.ou_lower)
}

/// True when some n-gram with `n <= max_n` occurs at least `min_repeats`
/// times back to back.
pub fn has_repetition<T: PartialEq>(tokens: &[T], max_n: usize, min_repeats: usize) -> bool {
    for n in 1..=max_n {
        if tokens.len() < n * min_repeats {
            break;
        }
        // `min_repeats` copies of an n-gram starting at i is the same as
        // tokens[j] == tokens[j + n] for every j in i..i + (min_repeats-1)*n
        let need = (min_repeats - 1) * n;
        if need == 0 {
            return true;
        }
        let mut run = 0;
        for j in 0..tokens.len() - n {
            if tokens[j] == tokens[j + n] {
                run += 1;
                if run >= need {
                    return true;
                }
            } else {
                run = 0;
            }
        }
    }
    false
}

pub fn detect_oscillatory_hallucination(r: &TranslationRecord, cfg: &DetectorConfig) -> bool {
    let toks = tokenize(&r.hyp, cfg.metrics.tokenizer_for(&r.tgt_lang));
    has_repetition(&toks.tokens, cfg.oh_max_n, cfg.oh_min_repeats)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordDiagnostics {
    pub flags: ErrorFlags,
    /// `None` when the identifier returned undetermined.
    pub lid: Option<LanguageCode>,
}

pub fn detect_all(r: &TranslationRecord, cfg: &DetectorConfig, lid: LidSource<'_>) -> Result<RecordDiagnostics> {
    let label = lid_label(r, lid)?;
    let ot = label.as_ref() != Some(&r.tgt_lang);
    Ok(RecordDiagnostics {
        flags: ErrorFlags::new(
            detect_source_copy(r, cfg),
            ot,
            detect_over_under(r, cfg)?,
            detect_oscillatory_hallucination(r, cfg),
        ),
        lid: label,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorCounts {
    pub n_records: usize,
    pub sc: usize,
    pub ot: usize,
    pub ou: usize,
    pub oh: usize,
    pub any: usize,
    /// OT flags caused by an undetermined label rather than a wrong one.
    pub ot_undetermined: usize,
}

impl ErrorCounts {
    fn add(&mut self, d: &RecordDiagnostics) {
        let f = d.flags;
        self.n_records += 1;
        self.sc += f.sc as usize;
        self.ot += f.ot as usize;
        self.ou += f.ou as usize;
        self.oh += f.oh as usize;
        self.any += f.any as usize;
        self.ot_undetermined += (f.ot && d.lid.is_none()) as usize;
    }

    pub fn ratios(&self) -> ErrorRatios {
        let n = self.n_records.max(1) as f64;
        ErrorRatios {
            sc: self.sc as f64 / n,
            ot: self.ot as f64 / n,
            ou: self.ou as f64 / n,
            oh: self.oh as f64 / n,
            any: self.any as f64 / n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRatios {
    pub sc: f64,
    pub ot: f64,
    pub ou: f64,
    pub oh: f64,
    pub any: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub counts: ErrorCounts,
    pub ratios: ErrorRatios,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub signature: String,
    pub overall: PairReport,
    /// Keyed `src-tgt`.
    pub per_pair: BTreeMap<String, PairReport>,
    pub per_record: BTreeMap<String, RecordDiagnostics>,
}

/// Runs every detector on every record in parallel. Aggregation happens
/// afterwards in id order, so the report is independent of scheduling.
pub fn build_error_report(
    records: &[TranslationRecord],
    cfg: &DetectorConfig,
    lid: LidSource<'_>,
) -> Result<ErrorReport> {
    cfg.validate()?;
    if records.is_empty() {
        return Err(Error::InvalidArgument("error report over zero records".into()));
    }
    let diags: Vec<RecordDiagnostics> = records
        .par_iter()
        .map(|r| detect_all(r, cfg, lid))
        .collect::<Result<_>>()?;

    let mut overall = ErrorCounts::default();
    let mut pairs: BTreeMap<String, ErrorCounts> = BTreeMap::new();
    let mut per_record = BTreeMap::new();
    for (r, d) in records.iter().zip(diags) {
        overall.add(&d);
        pairs.entry(r.pair().to_string()).or_default().add(&d);
        if per_record.insert(r.id.clone(), d).is_some() {
            return Err(Error::IdMismatch(format!("duplicate record id {:?}", r.id)));
        }
    }
    let report = |c: ErrorCounts| PairReport {
        counts: c,
        ratios: c.ratios(),
    };
    Ok(ErrorReport {
        signature: cfg.signature(),
        overall: report(overall),
        per_pair: pairs.into_iter().map(|(k, c)| (k, report(c))).collect(),
        per_record,
    })
}

/// One row per pair plus an `all` row; ratios with four decimals.
pub fn error_summary_tsv(report: &ErrorReport) -> String {
    let mut out = format!("# {}\npair\tsc\tot\tou\toh\tany\tn_records\n", report.signature);
    let rows = report
        .per_pair
        .iter()
        .map(|(k, v)| (k.as_str(), v))
        .chain(std::iter::once(("all", &report.overall)));
    for (pair, p) in rows {
        let r = p.ratios;
        out.push_str(&format!(
            "{pair}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            textio::fmt_f64(r.sc, 4),
            textio::fmt_f64(r.ot, 4),
            textio::fmt_f64(r.ou, 4),
            textio::fmt_f64(r.oh, 4),
            textio::fmt_f64(r.any, 4),
            p.counts.n_records
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetMode {
    /// Each system keeps its own clean records.
    PerSystem,
    /// Only ids clean under every system survive.
    Intersection,
}

/// Records without any error flag. All systems must cover the same ids and
/// every record needs flags.
pub fn error_free_subset(
    systems: &BTreeMap<String, (Vec<TranslationRecord>, BTreeMap<String, ErrorFlags>)>,
    mode: SubsetMode,
) -> Result<BTreeMap<String, Vec<TranslationRecord>>> {
    let mut reference_ids: Option<(&str, BTreeSet<&str>)> = None;
    for (name, (records, flags)) in systems {
        let ids: BTreeSet<&str> = records.iter().map(|r| r.id.as_str()).collect();
        if ids.len() != records.len() {
            return Err(Error::IdMismatch(format!("system {name} has duplicate ids")));
        }
        if let Some(missing) = ids.iter().find(|id| !flags.contains_key(**id)) {
            return Err(Error::Missing(format!("system {name}: no flags for record {missing:?}")));
        }
        match &reference_ids {
            None => reference_ids = Some((name, ids)),
            Some((first, expected)) if *expected != ids => {
                let diff = expected.symmetric_difference(&ids).next().copied().unwrap_or_default();
                return Err(Error::IdMismatch(format!(
                    "systems {first} and {name} differ in record ids (e.g. {diff:?})"
                )));
            }
            Some(_) => {}
        }
    }
    let clean_everywhere: BTreeSet<&str> = match &reference_ids {
        None => BTreeSet::new(),
        Some((_, ids)) => ids
            .iter()
            .copied()
            .filter(|id| systems.values().all(|(_, f)| !f[*id].any))
            .collect(),
    };
    Ok(systems
        .iter()
        .map(|(name, (records, flags))| {
            let kept = records
                .iter()
                .filter(|r| match mode {
                    SubsetMode::PerSystem => !flags[&r.id].any,
                    SubsetMode::Intersection => clean_everywhere.contains(r.id.as_str()),
                })
                .cloned()
                .collect();
            (name.clone(), kept)
        })
        .collect())
}
