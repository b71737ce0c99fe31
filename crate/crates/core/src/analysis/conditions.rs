use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::grid::ScoreGrid;
use crate::error::Result;
use crate::partitions::{classify, Condition, PartitionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub mean: f64,
    pub n: usize,
}

/// Mean score of the present grid cells in each condition. Conditions with
/// no cells are left out rather than reported as zero.
pub fn bucket_by_condition(grid: &ScoreGrid, spec: &PartitionSpec) -> Result<BTreeMap<Condition, Bucket>> {
    let mut sums: BTreeMap<Condition, (f64, usize)> = BTreeMap::new();
    for (pair, v) in &grid.cells {
        let e = sums.entry(classify(spec, pair)?).or_insert((0.0, 0));
        e.0 += v;
        e.1 += 1;
    }
    Ok(sums
        .into_iter()
        .map(|(c, (s, n))| (c, Bucket { mean: s / n as f64, n }))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{LanguageCode, LanguagePair, Registry};
    use crate::partitions::{build_partition, enumerate_directions};

    #[test]
    fn all_pairs_single_bucket() {
        let reg = Registry::from_pairs([("en", "English"), ("de", "German"), ("fr", "French")]).unwrap();
        let dirs = enumerate_directions(reg.codes()).unwrap();
        let spec = build_partition(&reg, "all", &[], &[], &[], &dirs).unwrap();
        let mut g = ScoreGrid::new(reg.codes().to_vec()).unwrap();
        for (i, d) in dirs.iter().enumerate() {
            g.set(d.clone(), i as f64).unwrap();
        }
        let b = bucket_by_condition(&g, &spec).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[&Condition::SameDirection].mean, g.overall_mean().unwrap());
    }

    #[test]
    fn empty_buckets_absent() {
        let reg = Registry::from_pairs([("en", "English"), ("de", "German"), ("fr", "French")]).unwrap();
        let fr: LanguageCode = "fr".parse().unwrap();
        let spec = build_partition(&reg, "p", &[fr], &[], &[], &[LanguagePair::parse("en", "de").unwrap()]).unwrap();
        let mut g = ScoreGrid::new(reg.codes().to_vec()).unwrap();
        g.set(LanguagePair::parse("en", "de").unwrap(), 10.0).unwrap();
        g.set(LanguagePair::parse("fr", "de").unwrap(), 4.0).unwrap();
        let b = bucket_by_condition(&g, &spec).unwrap();
        assert_eq!(b.keys().copied().collect::<Vec<_>>(), [Condition::SameDirection, Condition::UnseenSrc]);
    }
}
