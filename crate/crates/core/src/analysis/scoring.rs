//! Corpus BLEU per direction, and pivot composition.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::ScoreGrid;
use crate::corpus::normalize_text;
use crate::error::{Error, Result};
use crate::lang::{LanguageCode, LanguagePair};
use crate::metrics::{corpus_bleu, tokenize, BleuScore, MetricOptions};
use crate::records::TranslationRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredGrid {
    pub grid: ScoreGrid,
    /// Full BLEU breakdown per direction, keyed `src-tgt`.
    pub details: BTreeMap<String, BleuScore>,
}

/// Corpus BLEU of every direction present in `records`, tokenized per
/// target language. Directions are scored in parallel.
pub fn score_records(langs: &[LanguageCode], records: &[TranslationRecord], opts: &MetricOptions) -> Result<ScoredGrid> {
    let mut by_pair: BTreeMap<LanguagePair, Vec<&TranslationRecord>> = BTreeMap::new();
    for r in records {
        by_pair.entry(r.pair()).or_default().push(r);
    }
    let scored: Vec<(LanguagePair, BleuScore)> = by_pair
        .into_par_iter()
        .map(|(pair, recs)| {
            let tok = opts.tokenizer_for(&pair.target);
            let hyps: Vec<_> = recs.iter().map(|r| tokenize(&r.hyp, tok)).collect();
            let refs: Vec<_> = recs.iter().map(|r| tokenize(&r.reference, tok)).collect();
            corpus_bleu(&hyps, &refs, opts.corpus_smoothing).map(|s| (pair, s))
        })
        .collect::<Result<_>>()?;
    let mut grid = ScoreGrid::new(langs.to_vec())?;
    let mut details = BTreeMap::new();
    for (pair, s) in scored {
        grid.set(pair.clone(), s.score)?;
        details.insert(pair.to_string(), s);
    }
    Ok(ScoredGrid { grid, details })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotGain {
    pub direct: ScoreGrid,
    pub pivot: ScoreGrid,
    /// `pivot - direct`
    pub delta: ScoreGrid,
}

/// Builds pivot hypotheses for the non-pivot directions of `direct`.
///
/// For each direct record `x -> y` (neither side the pivot language), `leg1`
/// must hold the record with the same id for `x -> pivot` and `leg2` the one
/// for `pivot -> y`, whose source is leg 1's output. The composed record keeps
/// the direct source and reference and takes leg 2's hypothesis.
pub fn compose_pivot(
    direct: &[TranslationRecord],
    leg1: &[TranslationRecord],
    leg2: &[TranslationRecord],
    pivot: &LanguageCode,
) -> Result<Vec<TranslationRecord>> {
    let index = |recs: &'_ [TranslationRecord], which: &str| -> Result<BTreeMap<String, TranslationRecord>> {
        let mut m = BTreeMap::new();
        for r in recs {
            if m.insert(r.id.clone(), r.clone()).is_some() {
                return Err(Error::IdMismatch(format!("{which}: duplicate id {:?}", r.id)));
            }
        }
        Ok(m)
    };
    let l1 = index(leg1, "leg 1")?;
    let l2 = index(leg2, "leg 2")?;
    let mut out = Vec::new();
    for d in direct.iter().filter(|d| &d.src_lang != pivot && &d.tgt_lang != pivot) {
        let a = l1
            .get(&d.id)
            .ok_or_else(|| Error::Missing(format!("leg 1 output for {:?} ({})", d.id, d.pair())))?;
        let b = l2
            .get(&d.id)
            .ok_or_else(|| Error::Missing(format!("leg 2 output for {:?} ({})", d.id, d.pair())))?;
        if a.src_lang != d.src_lang || &a.tgt_lang != pivot {
            return Err(Error::IdMismatch(format!("leg 1 record {:?} is {}, expected {}-{pivot}", d.id, a.pair(), d.src_lang)));
        }
        if &b.src_lang != pivot || b.tgt_lang != d.tgt_lang {
            return Err(Error::IdMismatch(format!("leg 2 record {:?} is {}, expected {pivot}-{}", d.id, b.pair(), d.tgt_lang)));
        }
        if normalize_text(&b.src) != normalize_text(&a.hyp) {
            return Err(Error::IdMismatch(format!("leg 2 input for {:?} is not leg 1's output", d.id)));
        }
        out.push(TranslationRecord {
            hyp: b.hyp.clone(),
            external: None,
            ..d.clone()
        });
    }
    Ok(out)
}

pub fn pivot_gain(
    langs: &[LanguageCode],
    direct: &[TranslationRecord],
    leg1: &[TranslationRecord],
    leg2: &[TranslationRecord],
    pivot: &LanguageCode,
    opts: &MetricOptions,
) -> Result<PivotGain> {
    let composed = compose_pivot(direct, leg1, leg2, pivot)?;
    let non_pivot: Vec<TranslationRecord> = direct
        .iter()
        .filter(|d| &d.src_lang != pivot && &d.tgt_lang != pivot)
        .cloned()
        .collect();
    let direct = score_records(langs, &non_pivot, opts)?.grid;
    let pivot = score_records(langs, &composed, opts)?.grid;
    let delta = pivot.minus(&direct)?;
    Ok(PivotGain { direct, pivot, delta })
}

/// Cell-wise difference of precomputed grids over their common directions.
pub fn grid_gain(direct: &ScoreGrid, pivot: &ScoreGrid) -> Result<ScoreGrid> {
    let d: BTreeSet<_> = direct.langs.iter().collect();
    if pivot.langs.iter().any(|l| !d.contains(l)) {
        return Err(Error::InvalidArgument("pivot grid has languages missing from the direct grid".into()));
    }
    pivot.minus(direct).map(|mut g| {
        g.langs = direct.langs.clone();
        g
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, s: &str, t: &str, src: &str, hyp: &str, reference: &str) -> TranslationRecord {
        TranslationRecord {
            id: id.into(),
            src_lang: s.parse().unwrap(),
            tgt_lang: t.parse().unwrap(),
            src: src.into(),
            hyp: hyp.into(),
            reference: reference.into(),
            external: None,
        }
    }

    fn langs() -> Vec<LanguageCode> {
        ["en", "de", "fr"].iter().map(|c| c.parse().unwrap()).collect()
    }

    #[test]
    fn identical_outputs_score_100() {
        let recs = vec![
            rec("1", "de", "fr", "a", "le chat noir dort bien", "le chat noir dort bien"),
            rec("2", "en", "de", "a", "die Katze schläft gut", "die Katze schläft gut"),
        ];
        let g = score_records(&langs(), &recs, &MetricOptions::default()).unwrap();
        assert_eq!(g.grid.len(), 2);
        assert!(g.grid.cells.values().all(|&v| (v - 100.0).abs() < 1e-9));
    }

    #[test]
    fn pivot_identity_is_zero() {
        let direct = vec![rec("1", "de", "fr", "Die Katze", "le chat noir dort", "le chat dort bien")];
        let leg1 = vec![rec("1", "de", "en", "Die Katze", "The cat", "")];
        let leg2 = vec![rec("1", "en", "fr", "The cat", "le chat noir dort", "")];
        let en: LanguageCode = "en".parse().unwrap();
        let g = pivot_gain(&langs(), &direct, &leg1, &leg2, &en, &MetricOptions::default()).unwrap();
        assert_eq!(g.delta.cells.values().copied().collect::<Vec<_>>(), vec![0.0]);
    }

    #[test]
    fn pivot_errors() {
        let en: LanguageCode = "en".parse().unwrap();
        let direct = vec![rec("1", "de", "fr", "Die Katze", "x", "y")];
        let leg1 = vec![rec("1", "de", "en", "Die Katze", "The cat", "")];
        assert!(matches!(compose_pivot(&direct, &leg1, &[], &en), Err(Error::Missing(_))));
        let bad_leg2 = vec![rec("1", "en", "fr", "A dog", "z", "")];
        assert!(matches!(compose_pivot(&direct, &leg1, &bad_leg2, &en), Err(Error::IdMismatch(_))));
    }

    #[test]
    fn grid_arithmetic() {
        let mut a = ScoreGrid::new(langs()).unwrap();
        let mut b = ScoreGrid::new(langs()).unwrap();
        let p = LanguagePair::parse("de", "fr").unwrap();
        a.set(p.clone(), 20.0).unwrap();
        b.set(p.clone(), 23.0).unwrap();
        assert!((grid_gain(&a, &b).unwrap().get(&p).unwrap() - 3.0).abs() < 1e-12);
    }
}
