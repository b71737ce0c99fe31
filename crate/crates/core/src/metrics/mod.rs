pub mod bleu;
pub mod stats;
pub mod tokenize;

pub use bleu::{
    compute_bleu, corpus_bleu, length_ratio, sentence_bleu, signature, BleuScore, BleuStats, Smoothing,
    MAX_ORDER,
};
pub use stats::{average_ranks, loglinear_fit, spearman, LogLinearFit};
pub use tokenize::{tokenize, TokenSequence, TokenizerId};

use serde::{Deserialize, Serialize};

use crate::lang::LanguageCode;

/// Tokenizer and smoothing choices for one evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricOptions {
    pub tokenizer: TokenizerId,
    /// Target languages scored with the character tokenizer.
    pub char_languages: Vec<LanguageCode>,
    pub corpus_smoothing: Smoothing,
    pub sentence_smoothing: Smoothing,
}

impl Default for MetricOptions {
    fn default() -> Self {
        MetricOptions {
            tokenizer: TokenizerId::Mteval13a,
            char_languages: vec![LanguageCode::new("zh").expect("static code")],
            corpus_smoothing: Smoothing::None,
            sentence_smoothing: Smoothing::Exp,
        }
    }
}

impl MetricOptions {
    pub fn tokenizer_for(&self, lang: &LanguageCode) -> TokenizerId {
        if self.char_languages.contains(lang) {
            TokenizerId::Char
        } else {
            self.tokenizer
        }
    }
}
