//! Corpus and sentence BLEU, following sacreBLEU's sufficient statistics and
//! smoothing arithmetic operation for operation.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tokenize::{TokenSequence, TokenizerId};
use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4;

/// Stand-in for log(0), as in sacreBLEU.
const LOG_ZERO: f64 = -9_999_999_999.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", content = "value", rename_all = "kebab-case")]
pub enum Smoothing {
    None,
    /// Zero-count orders get precision `value / total`.
    Floor(f64),
    /// Adds `value` to matches and totals for orders above 1.
    AddK(f64),
    /// NIST geometric sequence: the k-th zero-count order gets `1 / (2^k * total)`.
    Exp,
}

impl Smoothing {
    pub fn id(&self) -> String {
        match self {
            Smoothing::None => "none".into(),
            Smoothing::Floor(v) => format!("floor-{v}"),
            Smoothing::AddK(v) => format!("add-k-{v}"),
            Smoothing::Exp => "exp".into(),
        }
    }
}

impl fmt::Display for Smoothing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Smoothing {
    type Err = Error;

    /// `none`, `exp`, `floor`, `floor:0.1`, `add-k`, `add-k:1`
    fn from_str(s: &str) -> Result<Self> {
        let (name, value) = match s.split_once(':') {
            Some((n, v)) => (
                n,
                Some(
                    v.parse::<f64>()
                        .map_err(|_| Error::InvalidArgument(format!("bad smoothing value in {s:?}")))?,
                ),
            ),
            None => (s, None),
        };
        match name {
            "none" => Ok(Smoothing::None),
            "exp" => Ok(Smoothing::Exp),
            "floor" => Ok(Smoothing::Floor(value.unwrap_or(0.1))),
            "add-k" => Ok(Smoothing::AddK(value.unwrap_or(1.0))),
            other => Err(Error::InvalidArgument(format!("unknown smoothing {other:?}"))),
        }
    }
}

/// Additive BLEU sufficient statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BleuStats {
    pub correct: [u64; MAX_ORDER],
    pub total: [u64; MAX_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl std::ops::Add for BleuStats {
    type Output = BleuStats;

    fn add(mut self, rhs: BleuStats) -> BleuStats {
        for n in 0..MAX_ORDER {
            self.correct[n] += rhs.correct[n];
            self.total[n] += rhs.total[n];
        }
        self.hyp_len += rhs.hyp_len;
        self.ref_len += rhs.ref_len;
        self
    }
}

/// Packs up to four interned token ids into one key.
fn ngram_counts(ids: &[u32], n: usize) -> HashMap<u128, u64> {
    let mut counts = HashMap::new();
    for w in ids.windows(n) {
        let key = w.iter().fold(n as u128, |acc, &id| (acc << 32) | u128::from(id));
        *counts.entry(key).or_insert(0) += 1;
    }
    counts
}

fn intern<'a>(vocab: &mut HashMap<&'a str, u32>, toks: &'a [String]) -> Vec<u32> {
    toks.iter()
        .map(|t| {
            let next = vocab.len() as u32;
            *vocab.entry(t.as_str()).or_insert(next)
        })
        .collect()
}

impl BleuStats {
    pub fn from_pair(hyp: &[String], reference: &[String]) -> Self {
        let mut vocab: HashMap<&str, u32> = HashMap::new();
        let h = intern(&mut vocab, hyp);
        let r = intern(&mut vocab, reference);
        let mut stats = BleuStats {
            hyp_len: h.len() as u64,
            ref_len: r.len() as u64,
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            if h.len() < n {
                break;
            }
            stats.total[n - 1] = (h.len() + 1 - n) as u64;
            let ref_counts = ngram_counts(&r, n);
            stats.correct[n - 1] = ngram_counts(&h, n)
                .into_iter()
                .map(|(k, c)| c.min(ref_counts.get(&k).copied().unwrap_or(0)))
                .sum();
        }
        stats
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuScore {
    /// 0..=100
    pub score: f64,
    /// Smoothed modified precisions as fractions in 0..=1.
    pub ngram_precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_len: u64,
    pub ref_len: u64,
    pub signature: String,
}

pub fn signature(tokenizer: TokenizerId, smoothing: Smoothing) -> String {
    format!(
        "bleu|order:{MAX_ORDER}|tok:{tokenizer}|smooth:{}|version:mfti-{}",
        smoothing.id(),
        env!("CARGO_PKG_VERSION")
    )
}

/// BLEU from sufficient statistics. With `effective_order` the geometric
/// mean only covers orders for which the hypothesis has any n-gram.
pub fn compute_bleu(
    stats: &BleuStats,
    smoothing: Smoothing,
    effective_order: bool,
    tokenizer: TokenizerId,
) -> BleuScore {
    let sig = signature(tokenizer, smoothing);
    let (hyp_len, ref_len) = (stats.hyp_len, stats.ref_len);
    let bp = if hyp_len < ref_len {
        if hyp_len > 0 {
            (1.0 - ref_len as f64 / hyp_len as f64).exp()
        } else {
            0.0
        }
    } else {
        1.0
    };
    let mut precisions = [0.0f64; MAX_ORDER];
    let done = |score: f64, precisions: [f64; MAX_ORDER]| BleuScore {
        score,
        ngram_precisions: precisions.map(|p| p / 100.0),
        brevity_penalty: bp,
        hyp_len,
        ref_len,
        signature: sig.clone(),
    };
    if stats.correct.iter().all(|&c| c == 0) {
        return done(0.0, precisions);
    }

    let mut correct: [f64; MAX_ORDER] = stats.correct.map(|c| c as f64);
    let mut total: [f64; MAX_ORDER] = stats.total.map(|c| c as f64);
    let mut smooth_mteval = 1.0f64;
    let mut eff_order = MAX_ORDER;
    for n in 0..MAX_ORDER {
        if let Smoothing::AddK(k) = smoothing {
            if n > 0 {
                correct[n] += k;
                total[n] += k;
            }
        }
        if total[n] == 0.0 {
            break;
        }
        if effective_order {
            eff_order = n + 1;
        }
        if correct[n] == 0.0 {
            match smoothing {
                Smoothing::Exp => {
                    smooth_mteval *= 2.0;
                    precisions[n] = 100.0 / (smooth_mteval * total[n]);
                }
                Smoothing::Floor(f) => precisions[n] = 100.0 * f / total[n],
                _ => {}
            }
        } else {
            precisions[n] = 100.0 * correct[n] / total[n];
        }
    }
    let log_sum = precisions[..eff_order]
        .iter()
        .fold(0.0, |acc, &p| acc + if p == 0.0 { LOG_ZERO } else { p.ln() });
    let score = bp * (log_sum / eff_order as f64).exp();
    done(score, precisions)
}

fn check_tokenizers(hyps: &[TokenSequence], refs: &[TokenSequence]) -> Result<TokenizerId> {
    let tok = hyps.first().map(|t| t.tokenizer).unwrap_or(TokenizerId::Mteval13a);
    if hyps.iter().chain(refs).any(|t| t.tokenizer != tok) {
        return Err(Error::InvalidArgument("mixed tokenizers in one BLEU computation".into()));
    }
    Ok(tok)
}

/// Corpus BLEU over aligned hypothesis/reference token sequences.
/// Per-sentence counting runs in parallel; counts are integers so the
/// reduction order does not matter.
pub fn corpus_bleu(hyps: &[TokenSequence], refs: &[TokenSequence], smoothing: Smoothing) -> Result<BleuScore> {
    if hyps.len() != refs.len() {
        return Err(Error::LengthMismatch {
            left: hyps.len(),
            right: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(Error::InvalidArgument("corpus BLEU needs at least one sentence".into()));
    }
    let tok = check_tokenizers(hyps, refs)?;
    let stats = hyps
        .par_iter()
        .zip(refs.par_iter())
        .map(|(h, r)| BleuStats::from_pair(&h.tokens, &r.tokens))
        .reduce(BleuStats::default, |a, b| a + b);
    Ok(compute_bleu(&stats, smoothing, false, tok))
}

pub fn sentence_bleu(hyp: &TokenSequence, reference: &TokenSequence, smoothing: Smoothing) -> BleuScore {
    let stats = BleuStats::from_pair(&hyp.tokens, &reference.tokens);
    compute_bleu(&stats, smoothing, true, hyp.tokenizer)
}

/// |hyp| / |ref| in tokens.
pub fn length_ratio(hyp: &TokenSequence, reference: &TokenSequence) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::InvalidArgument("length ratio against an empty reference".into()));
    }
    Ok(hyp.len() as f64 / reference.len() as f64)
}
