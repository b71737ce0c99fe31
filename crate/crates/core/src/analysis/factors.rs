//! Typological feature vectors, per-language factors, and their rank
//! correlation with translation quality.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::grid::{per_language_averages, ScoreGrid};
use crate::error::{Error, Result};
use crate::lang::LanguageCode;
use crate::metrics::spearman;
use crate::textio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureCategory {
    Geography,
    Syntax,
    Phylogeny,
    Phonology,
    Inventory,
}

impl FeatureCategory {
    pub const ALL: [FeatureCategory; 5] = [
        FeatureCategory::Geography,
        FeatureCategory::Syntax,
        FeatureCategory::Phylogeny,
        FeatureCategory::Phonology,
        FeatureCategory::Inventory,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureCategory::Geography => "geography",
            FeatureCategory::Syntax => "syntax",
            FeatureCategory::Phylogeny => "phylogeny",
            FeatureCategory::Phonology => "phonology",
            FeatureCategory::Inventory => "inventory",
        }
    }
}

impl fmt::Display for FeatureCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown feature category {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub lang: LanguageCode,
    pub category: FeatureCategory,
    /// `None` marks an undefined entry.
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureSet {
    vectors: BTreeMap<(FeatureCategory, LanguageCode), FeatureVector>,
}

impl FeatureSet {
    pub fn insert(&mut self, v: FeatureVector) -> Result<()> {
        if let Some(other) = self.vectors.values().find(|o| o.category == v.category) {
            if other.values.len() != v.values.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} vector for {} has {} dimensions, expected {}",
                    v.category,
                    v.lang,
                    v.values.len(),
                    other.values.len()
                )));
            }
        }
        let key = (v.category, v.lang.clone());
        if self.vectors.insert(key, v).is_some() {
            return Err(Error::InvalidArgument("duplicate feature vector".into()));
        }
        Ok(())
    }

    pub fn get(&self, lang: &LanguageCode, category: FeatureCategory) -> Option<&FeatureVector> {
        self.vectors.get(&(category, lang.clone()))
    }

    /// `lang<TAB>category<TAB>v1,v2,...` with `?` for undefined entries.
    pub fn load(path: &Path) -> Result<Self> {
        let mut set = FeatureSet::default();
        for (lineno, line) in textio::read_lines(path)? {
            let parts: Vec<&str> = line.split('\t').collect();
            let [lang, category, values] = parts[..] else {
                return Err(Error::parse(path, lineno, "expected lang<TAB>category<TAB>values"));
            };
            let err = |m: String| Error::parse(path, lineno, m);
            let values = values
                .split(',')
                .map(|v| match v.trim() {
                    "?" => Ok(None),
                    x => x.parse().map(Some).map_err(|_| err(format!("bad value {x:?}"))),
                })
                .collect::<Result<_>>()?;
            set.insert(FeatureVector {
                lang: lang.parse().map_err(|_| err(format!("bad language {lang:?}")))?,
                category: category.parse().map_err(|e: Error| err(e.to_string()))?,
                values,
            })
            .map_err(|e| err(e.to_string()))?;
        }
        Ok(set)
    }
}

/// Cosine over the dimensions defined in both vectors.
pub fn cosine_pairwise(a: &[Option<f64>], b: &[Option<f64>]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (mut dot, mut na, mut nb, mut shared) = (0.0, 0.0, 0.0, 0);
    for (x, y) in a.iter().zip(b) {
        if let (Some(x), Some(y)) = (x, y) {
            dot += x * y;
            na += x * x;
            nb += y * y;
            shared += 1;
        }
    }
    if shared < 2 {
        return Err(Error::Degenerate(format!("only {shared} shared dimensions")));
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Degenerate("zero vector over shared dimensions".into()));
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

pub fn similarity_to_english(set: &FeatureSet, lang: &LanguageCode, category: FeatureCategory) -> Result<f64> {
    let en = LanguageCode::new("en")?;
    let missing = |l: &LanguageCode| Error::Missing(format!("no {category} vector for {l}"));
    let a = set.get(lang, category).ok_or_else(|| missing(lang))?;
    let b = set.get(&en, category).ok_or_else(|| missing(&en))?;
    cosine_pairwise(&a.values, &b.values)
}

/// Similarity to English for every non-English language in `langs`.
pub fn similarity_factors(
    set: &FeatureSet,
    category: FeatureCategory,
    langs: &[LanguageCode],
) -> Result<BTreeMap<LanguageCode, f64>> {
    langs
        .iter()
        .filter(|l| !l.is_english())
        .map(|l| similarity_to_english(set, l, category).map(|s| (l.clone(), s)))
        .collect()
}

/// `lang<TAB>value` lines.
pub fn load_factors(path: &Path) -> Result<BTreeMap<LanguageCode, f64>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in textio::read_lines(path)? {
        let (lang, value) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, lineno, "expected lang<TAB>value"))?;
        let lang: LanguageCode = lang
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad language {lang:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad value {value:?}")))?;
        if out.insert(lang.clone(), value).is_some() {
            return Err(Error::parse(path, lineno, format!("duplicate language {lang}")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    ToX,
    FromX,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "to_x" | "to-x" | "to" => Ok(Side::ToX),
            "from_x" | "from-x" | "from" => Ok(Side::FromX),
            other => Err(Error::InvalidArgument(format!("unknown side {other:?}"))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::ToX => "to_x",
            Side::FromX => "from_x",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorCorrelation {
    pub side: Side,
    pub rho: f64,
    pub languages: Vec<LanguageCode>,
}

/// Spearman correlation between per-language average scores on `side` and
/// the factor. Every non-English grid language must have a factor value;
/// English takes part only when the factor map contains it.
pub fn correlate_factors(
    grid: &ScoreGrid,
    factors: &BTreeMap<LanguageCode, f64>,
    side: Side,
) -> Result<FactorCorrelation> {
    let averages = per_language_averages(grid);
    let mut languages = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for lang in &grid.langs {
        let Some(f) = factors.get(lang) else {
            if lang.is_english() {
                continue;
            }
            return Err(Error::Missing(format!("no factor value for {lang}")));
        };
        let avg = averages.get(lang).and_then(|a| match side {
            Side::ToX => a.to_x,
            Side::FromX => a.from_x,
        });
        let avg = avg.ok_or_else(|| Error::Missing(format!("no {side} scores for {lang}")))?;
        languages.push(lang.clone());
        xs.push(avg);
        ys.push(*f);
    }
    Ok(FactorCorrelation {
        side,
        rho: spearman(&xs, &ys)?,
        languages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::LanguagePair;

    fn code(s: &str) -> LanguageCode {
        s.parse().unwrap()
    }

    #[test]
    fn cosine_cases() {
        let v = [Some(1.0), Some(0.0), Some(1.0)];
        assert!((cosine_pairwise(&v, &v).unwrap() - 1.0).abs() < 1e-12);
        let w = [Some(0.0), Some(1.0), Some(0.0)];
        assert_eq!(cosine_pairwise(&v, &w).unwrap(), 0.0);
        // missing dims dropped pairwise, not zero-filled
        let a = [Some(1.0), None, Some(2.0), Some(3.0)];
        let b = [Some(1.0), Some(9.0), Some(2.0), None];
        assert!((cosine_pairwise(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        assert!(cosine_pairwise(&[Some(1.0), None], &[Some(1.0), Some(1.0)]).is_err());
    }

    fn grid() -> ScoreGrid {
        let langs: Vec<_> = ["en", "de", "fr", "ru"].iter().map(|c| code(c)).collect();
        let mut g = ScoreGrid::new(langs.clone()).unwrap();
        for (i, s) in langs.iter().enumerate() {
            for (j, t) in langs.iter().enumerate() {
                if i != j {
                    g.set(LanguagePair::new(s.clone(), t.clone()), (10 * j + i) as f64).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn self_and_anti_correlation() {
        let g = grid();
        let avg = per_language_averages(&g);
        let own: BTreeMap<_, _> = avg.iter().map(|(l, a)| (l.clone(), a.to_x.unwrap())).collect();
        assert_eq!(correlate_factors(&g, &own, Side::ToX).unwrap().rho, 1.0);
        let anti: BTreeMap<_, _> = own.iter().map(|(l, v)| (l.clone(), -v)).collect();
        assert_eq!(correlate_factors(&g, &anti, Side::ToX).unwrap().rho, -1.0);
    }

    #[test]
    fn english_optional_others_required() {
        let g = grid();
        let f: BTreeMap<_, _> = [(code("de"), 1.0), (code("fr"), 2.0), (code("ru"), 3.0)].into();
        let c = correlate_factors(&g, &f, Side::FromX).unwrap();
        assert_eq!(c.languages.len(), 3);
        let gap: BTreeMap<_, _> = [(code("de"), 1.0), (code("fr"), 2.0)].into();
        assert!(matches!(correlate_factors(&g, &gap, Side::ToX), Err(Error::Missing(_))));
    }
}
