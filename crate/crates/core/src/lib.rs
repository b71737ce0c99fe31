//! Multilingual translation-instruction finetuning toolkit: corpus handling,
//! instruction rendering, partitions, BLEU and rank statistics, language
//! identification, error detectors and cross-lingual analyses.

pub mod analysis;
pub mod corpus;
pub mod detect;
pub mod error;
pub mod instructions;
pub mod lang;
pub mod langid;
pub mod metrics;
pub mod partitions;
pub mod records;
pub mod rng;
pub mod textio;

pub use error::{Error, Result};
pub use lang::{LanguageCode, LanguagePair, Registry};
