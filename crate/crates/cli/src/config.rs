//! Experiment configuration: one JSON file naming every input of a run.
//!
//! Relative paths are resolved against the directory holding the config
//! file, and every referenced path must exist when the config is loaded.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mfti_core::corpus::{CorpusFormat, QualityFilter, SelectionStrategy};
use mfti_core::detect::DetectorConfig;
use mfti_core::langid::LangIdConfig;
use mfti_core::metrics::MetricOptions;
use mfti_core::textio::sha256_hex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub path: PathBuf,
    pub format: CorpusFormat,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonolingualEntry {
    pub path: PathBuf,
    pub lang: String,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub per_pair: usize,
    #[serde(default = "default_strategy")]
    pub strategy: SelectionStrategy,
}

fn default_strategy() -> SelectionStrategy {
    SelectionStrategy::Random
}

/// Either a saved model or a directory of `<code>.txt` training files.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LangIdSection {
    #[serde(default)]
    pub model: Option<PathBuf>,
    #[serde(default)]
    pub train_dir: Option<PathBuf>,
    #[serde(default)]
    pub config: LangIdConfig,
}

fn default_malformed() -> f64 {
    0.10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub registry: PathBuf,
    #[serde(default)]
    pub corpora: Vec<CorpusEntry>,
    #[serde(default)]
    pub monolingual: Vec<MonolingualEntry>,
    #[serde(default)]
    pub partition: Option<PathBuf>,
    #[serde(default)]
    pub quality_filter: Option<QualityFilter>,
    #[serde(default)]
    pub sample: Option<SampleConfig>,
    #[serde(default)]
    pub templates: Option<PathBuf>,
    #[serde(default)]
    pub detectors: DetectorConfig,
    #[serde(default)]
    pub metrics: Option<MetricOptions>,
    #[serde(default)]
    pub langid: Option<LangIdSection>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_malformed")]
    pub max_malformed_fraction: f64,
}

/// A validated config plus the digest of its bytes.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub base: PathBuf,
    pub digest: String,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).with_context(|| format!("reading config {}", path.display()))?;
        let config: ExperimentConfig =
            serde_json::from_slice(&bytes).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let loaded = LoadedConfig { config, base, digest: sha256_hex(&bytes) };
        loaded.validate().with_context(|| format!("validating config {}", path.display()))?;
        Ok(loaded)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    /// Metric options of the run; detector metrics follow them unless the
    /// config only sets the detector block.
    pub fn metrics(&self) -> MetricOptions {
        self.config.metrics.clone().unwrap_or_else(|| self.config.detectors.metrics.clone())
    }

    pub fn detectors(&self) -> DetectorConfig {
        let mut d = self.config.detectors.clone();
        if let Some(m) = &self.config.metrics {
            d.metrics = m.clone();
        }
        d
    }

    fn validate(&self) -> Result<()> {
        let c = &self.config;
        let mut paths: Vec<(&str, &Path)> = vec![("registry", &c.registry)];
        for e in &c.corpora {
            paths.push(("corpus", &e.path));
        }
        for e in &c.monolingual {
            paths.push(("monolingual", &e.path));
        }
        if let Some(p) = &c.partition {
            paths.push(("partition", p));
        }
        if let Some(p) = &c.templates {
            paths.push(("templates", p));
        }
        if let Some(l) = &c.langid {
            match (&l.model, &l.train_dir) {
                (Some(m), None) => paths.push(("langid model", m)),
                (None, Some(d)) => paths.push(("langid train_dir", d)),
                _ => bail!("langid needs exactly one of `model` or `train_dir`"),
            }
        }
        for (what, p) in paths {
            let full = self.resolve(p);
            if !full.exists() {
                bail!("{what} path {} does not exist", full.display());
            }
        }
        if !(0.0..=1.0).contains(&c.max_malformed_fraction) {
            bail!("max_malformed_fraction must lie in [0, 1]");
        }
        if let Some(s) = &c.sample {
            if s.per_pair == 0 {
                bail!("sample.per_pair must be positive");
            }
        }
        self.detectors().validate()?;
        Ok(())
    }
}
