//! Training-pair partitions and the six evaluation conditions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lang::{LanguageCode, LanguagePair, Registry};
use crate::textio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    SameDirection,
    ReversedDirection,
    UnseenDirection,
    UnseenSrc,
    UnseenTgt,
    UnseenBoth,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::SameDirection,
        Condition::ReversedDirection,
        Condition::UnseenDirection,
        Condition::UnseenSrc,
        Condition::UnseenTgt,
        Condition::UnseenBoth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::SameDirection => "same_direction",
            Condition::ReversedDirection => "reversed_direction",
            Condition::UnseenDirection => "unseen_direction",
            Condition::UnseenSrc => "unseen_src",
            Condition::UnseenTgt => "unseen_tgt",
            Condition::UnseenBoth => "unseen_both",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown condition {s:?}")))
    }
}

/// On-disk partition description; pairs are `[source, target]` arrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub note: Option<String>,
    pub unseen: Vec<LanguageCode>,
    pub only_source: Vec<LanguageCode>,
    pub only_target: Vec<LanguageCode>,
    pub source_target: Vec<LanguageCode>,
    pub train_pairs: Vec<[LanguageCode; 2]>,
}

/// A validated partition. Construct through [`build_partition`] or
/// [`PartitionSpec::from_config`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSpec {
    pub name: String,
    pub note: Option<String>,
    pub unseen: BTreeSet<LanguageCode>,
    pub only_source: BTreeSet<LanguageCode>,
    pub only_target: BTreeSet<LanguageCode>,
    pub source_target: BTreeSet<LanguageCode>,
    pub train_pairs: BTreeSet<LanguagePair>,
    /// Every language appearing on either side of a training pair.
    seen: BTreeSet<LanguageCode>,
}

/// Validates role groups against the registry and the pair list against the
/// roles. `source_target` is every registry language not named elsewhere.
pub fn build_partition(
    registry: &Registry,
    name: &str,
    unseen: &[LanguageCode],
    only_source: &[LanguageCode],
    only_target: &[LanguageCode],
    pairs: &[LanguagePair],
) -> Result<PartitionSpec> {
    let named: BTreeSet<&LanguageCode> = unseen.iter().chain(only_source).chain(only_target).collect();
    let source_target: Vec<LanguageCode> = registry.codes().iter().filter(|c| !named.contains(c)).cloned().collect();
    PartitionSpec::new(registry, name, None, unseen, only_source, only_target, &source_target, pairs)
}

impl PartitionSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        registry: &Registry,
        name: &str,
        note: Option<String>,
        unseen: &[LanguageCode],
        only_source: &[LanguageCode],
        only_target: &[LanguageCode],
        source_target: &[LanguageCode],
        pairs: &[LanguagePair],
    ) -> Result<Self> {
        let mut role: BTreeMap<&LanguageCode, &str> = BTreeMap::new();
        for (group, langs) in [
            ("unseen", unseen),
            ("only_source", only_source),
            ("only_target", only_target),
            ("source_target", source_target),
        ] {
            for l in langs {
                registry.check(l)?;
                if let Some(prev) = role.insert(l, group) {
                    return Err(Error::Partition(format!("{l} is listed in both {prev} and {group}")));
                }
            }
        }
        let missing: Vec<String> = registry
            .codes()
            .iter()
            .filter(|c| !role.contains_key(c))
            .map(ToString::to_string)
            .collect();
        if !missing.is_empty() {
            return Err(Error::Partition(format!("languages without a role: {}", missing.join(", "))));
        }

        let mut train_pairs = BTreeSet::new();
        for p in pairs {
            registry.check(&p.source)?;
            registry.check(&p.target)?;
            if p.source == p.target {
                return Err(Error::Partition(format!("pair {p} has identical sides")));
            }
            let (rs, rt) = (role[&p.source], role[&p.target]);
            if !matches!(rs, "only_source" | "source_target") {
                return Err(Error::Partition(format!("pair {p}: {} is {rs} and cannot be a source", p.source)));
            }
            if !matches!(rt, "only_target" | "source_target") {
                return Err(Error::Partition(format!("pair {p}: {} is {rt} and cannot be a target", p.target)));
            }
            if !train_pairs.insert(p.clone()) {
                return Err(Error::Partition(format!("pair {p} listed twice")));
            }
        }
        let seen = train_pairs
            .iter()
            .flat_map(|p| [p.source.clone(), p.target.clone()])
            .collect();
        Ok(PartitionSpec {
            name: name.to_string(),
            note,
            unseen: unseen.iter().cloned().collect(),
            only_source: only_source.iter().cloned().collect(),
            only_target: only_target.iter().cloned().collect(),
            source_target: source_target.iter().cloned().collect(),
            train_pairs,
            seen,
        })
    }

    pub fn from_config(registry: &Registry, cfg: &PartitionConfig) -> Result<Self> {
        let pairs: Vec<LanguagePair> = cfg
            .train_pairs
            .iter()
            .map(|[s, t]| LanguagePair::new(s.clone(), t.clone()))
            .collect();
        let name = cfg.name.clone().unwrap_or_else(|| format!("partition-{}", pairs.len()));
        PartitionSpec::new(
            registry,
            &name,
            cfg.note.clone(),
            &cfg.unseen,
            &cfg.only_source,
            &cfg.only_target,
            &cfg.source_target,
            &pairs,
        )
    }

    pub fn load(registry: &Registry, path: &Path) -> Result<Self> {
        let cfg: PartitionConfig = textio::read_json(path)?;
        PartitionSpec::from_config(registry, &cfg)
    }

    pub fn to_config(&self) -> PartitionConfig {
        PartitionConfig {
            name: Some(self.name.clone()),
            note: self.note.clone(),
            unseen: self.unseen.iter().cloned().collect(),
            only_source: self.only_source.iter().cloned().collect(),
            only_target: self.only_target.iter().cloned().collect(),
            source_target: self.source_target.iter().cloned().collect(),
            train_pairs: self
                .train_pairs
                .iter()
                .map(|p| [p.source.clone(), p.target.clone()])
                .collect(),
        }
    }

    /// A copy with `extra` pairs appended, for scaling snapshots.
    pub fn extend(&self, registry: &Registry, name: &str, extra: &[LanguagePair]) -> Result<Self> {
        let mut pairs: Vec<LanguagePair> = self.train_pairs.iter().cloned().collect();
        pairs.extend(extra.iter().cloned());
        let v = |s: &BTreeSet<LanguageCode>| s.iter().cloned().collect::<Vec<_>>();
        PartitionSpec::new(
            registry,
            name,
            self.note.clone(),
            &v(&self.unseen),
            &v(&self.only_source),
            &v(&self.only_target),
            &v(&self.source_target),
            &pairs,
        )
    }

    pub fn is_seen(&self, lang: &LanguageCode) -> bool {
        self.seen.contains(lang)
    }

    fn knows(&self, lang: &LanguageCode) -> bool {
        self.unseen.contains(lang)
            || self.only_source.contains(lang)
            || self.only_target.contains(lang)
            || self.source_target.contains(lang)
    }
}

pub fn classify(spec: &PartitionSpec, dir: &LanguagePair) -> Result<Condition> {
    for l in [&dir.source, &dir.target] {
        if !spec.knows(l) {
            return Err(Error::UnknownLanguage(l.to_string()));
        }
    }
    if dir.source == dir.target {
        return Err(Error::InvalidArgument(format!("direction {dir} has identical sides")));
    }
    Ok(match (spec.is_seen(&dir.source), spec.is_seen(&dir.target)) {
        (true, true) if spec.train_pairs.contains(dir) => Condition::SameDirection,
        (true, true) if spec.train_pairs.contains(&dir.reversed()) => Condition::ReversedDirection,
        (true, true) => Condition::UnseenDirection,
        (false, true) => Condition::UnseenSrc,
        (true, false) => Condition::UnseenTgt,
        (false, false) => Condition::UnseenBoth,
    })
}

/// All ordered pairs of distinct languages, sorted by (source, target).
pub fn enumerate_directions(langs: &[LanguageCode]) -> Result<Vec<LanguagePair>> {
    let set: BTreeSet<&LanguageCode> = langs.iter().collect();
    if set.len() != langs.len() {
        return Err(Error::InvalidArgument("duplicate language in direction enumeration".into()));
    }
    if set.len() < 2 {
        return Err(Error::InvalidArgument("need at least two languages".into()));
    }
    let mut out = Vec::with_capacity(set.len() * (set.len() - 1));
    for s in &set {
        for t in &set {
            if s != t {
                out.push(LanguagePair::new((*s).clone(), (*t).clone()));
            }
        }
    }
    Ok(out)
}

/// Every direction over the registry with its condition.
pub fn classify_all(spec: &PartitionSpec, registry: &Registry) -> Result<Vec<(LanguagePair, Condition)>> {
    enumerate_directions(registry.codes())?
        .into_iter()
        .map(|d| classify(spec, &d).map(|c| (d, c)))
        .collect()
}

pub fn condition_counts(spec: &PartitionSpec, registry: &Registry) -> Result<BTreeMap<Condition, usize>> {
    let mut counts = BTreeMap::new();
    for (_, c) in classify_all(spec, registry)? {
        *counts.entry(c).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Registry-ordered grid of condition labels: rows are sources, columns
/// targets, `-` on the diagonal.
pub fn condition_matrix_tsv(spec: &PartitionSpec, registry: &Registry) -> Result<String> {
    let codes = registry.codes();
    let mut out = String::from("src\\tgt");
    for c in codes {
        out.push('\t');
        out.push_str(c.as_str());
    }
    out.push('\n');
    for s in codes {
        out.push_str(s.as_str());
        for t in codes {
            out.push('\t');
            if s == t {
                out.push('-');
            } else {
                out.push_str(classify(spec, &LanguagePair::new(s.clone(), t.clone()))?.as_str());
            }
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::test_registry;

    fn codes(s: &str) -> Vec<LanguageCode> {
        s.split_whitespace().map(|c| c.parse().unwrap()).collect()
    }

    fn pairs(s: &str) -> Vec<LanguagePair> {
        s.split_whitespace()
            .map(|p| {
                let (a, b) = p.split_once('-').unwrap();
                LanguagePair::parse(a, b).unwrap()
            })
            .collect()
    }

    fn small() -> PartitionSpec {
        build_partition(
            &test_registry(),
            "t",
            &codes("ru ar bg ca ta sw"),
            &codes("fi"),
            &codes("hi"),
            &pairs("de-fr en-de fi-en en-hi"),
        )
        .unwrap()
    }

    fn dir(s: &str, t: &str) -> LanguagePair {
        LanguagePair::parse(s, t).unwrap()
    }

    #[test]
    fn conditions() {
        let spec = small();
        assert_eq!(classify(&spec, &dir("de", "fr")).unwrap(), Condition::SameDirection);
        assert_eq!(classify(&spec, &dir("fr", "de")).unwrap(), Condition::ReversedDirection);
        assert_eq!(classify(&spec, &dir("fr", "en")).unwrap(), Condition::UnseenDirection);
        assert_eq!(classify(&spec, &dir("ru", "ar")).unwrap(), Condition::UnseenBoth);
        assert_eq!(classify(&spec, &dir("ru", "en")).unwrap(), Condition::UnseenSrc);
        assert_eq!(classify(&spec, &dir("en", "ru")).unwrap(), Condition::UnseenTgt);
        // zh is source_target but appears in no pair
        assert_eq!(classify(&spec, &dir("zh", "en")).unwrap(), Condition::UnseenSrc);
        assert!(matches!(classify(&spec, &dir("xx", "en")), Err(Error::UnknownLanguage(_))));
    }

    #[test]
    fn role_violations() {
        let reg = test_registry();
        let err = build_partition(&reg, "t", &codes("ru"), &codes("fi"), &codes("hi"), &pairs("hi-en")).unwrap_err();
        assert!(err.to_string().contains("hi-en"), "{err}");
        assert!(build_partition(&reg, "t", &codes("ru"), &codes("fi"), &codes("hi"), &pairs("en-fi")).is_err());
        assert!(build_partition(&reg, "t", &codes("ru"), &codes("fi"), &codes("hi"), &pairs("ru-en")).is_err());
        assert!(build_partition(&reg, "t", &codes("ru"), &codes("ru"), &codes(""), &[]).is_err());
    }

    #[test]
    fn directions() {
        assert_eq!(enumerate_directions(test_registry().codes()).unwrap().len(), 156);
        let two = enumerate_directions(&codes("fr en")).unwrap();
        assert_eq!(two, vec![dir("en", "fr"), dir("fr", "en")]);
        assert!(enumerate_directions(&codes("en")).is_err());
    }

    #[test]
    fn all_pairs_spec_is_same_direction() {
        let reg = test_registry();
        let all = enumerate_directions(reg.codes()).unwrap();
        let spec = build_partition(&reg, "mFTI-all", &[], &[], &[], &all).unwrap();
        assert!(classify_all(&spec, &reg)
            .unwrap()
            .iter()
            .all(|(_, c)| *c == Condition::SameDirection));
    }

    #[test]
    fn matrix_shape() {
        let reg = test_registry();
        let tsv = condition_matrix_tsv(&small(), &reg).unwrap();
        let rows: Vec<&str> = tsv.lines().collect();
        assert_eq!(rows.len(), 14);
        assert!(rows.iter().all(|r| r.split('\t').count() == 14));
    }

    #[test]
    fn config_roundtrip() {
        let reg = test_registry();
        let spec = small();
        let back = PartitionSpec::from_config(&reg, &spec.to_config()).unwrap();
        assert_eq!(back, spec);
    }
}
