//! Per-direction score grids.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lang::{LanguageCode, LanguagePair};
use crate::textio;

/// Sparse square grid of scores; rows are sources, columns targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreGrid {
    pub langs: Vec<LanguageCode>,
    pub cells: BTreeMap<LanguagePair, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToFrom {
    /// Mean over present cells `· -> lang`.
    pub to_x: Option<f64>,
    /// Mean over present cells `lang -> ·`.
    pub from_x: Option<f64>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

impl ScoreGrid {
    pub fn new(langs: Vec<LanguageCode>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for l in &langs {
            if !seen.insert(l) {
                return Err(Error::InvalidArgument(format!("language {l} listed twice in grid")));
            }
        }
        Ok(ScoreGrid {
            langs,
            cells: BTreeMap::new(),
        })
    }

    pub fn set(&mut self, pair: LanguagePair, value: f64) -> Result<()> {
        if pair.source == pair.target {
            return Err(Error::InvalidArgument(format!("diagonal cell {pair}")));
        }
        for l in [&pair.source, &pair.target] {
            if !self.langs.contains(l) {
                return Err(Error::UnknownLanguage(l.to_string()));
            }
        }
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite value for {pair}")));
        }
        self.cells.insert(pair, value);
        Ok(())
    }

    pub fn get(&self, pair: &LanguagePair) -> Option<f64> {
        self.cells.get(pair).copied()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn overall_mean(&self) -> Result<f64> {
        let v: Vec<f64> = self.cells.values().copied().collect();
        mean(&v).ok_or_else(|| Error::Degenerate("grid has no cells".into()))
    }

    /// Largest cell; ties resolve to the first pair in (source, target) order.
    pub fn max_cell(&self) -> Option<(&LanguagePair, f64)> {
        self.cells
            .iter()
            .fold(None, |best: Option<(&LanguagePair, f64)>, (p, &v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((p, v)),
            })
    }

    /// Cell-wise `self - other` over pairs present in both.
    pub fn minus(&self, other: &ScoreGrid) -> Result<ScoreGrid> {
        let mut out = ScoreGrid::new(self.langs.clone())?;
        for (p, v) in &self.cells {
            if let Some(w) = other.get(p) {
                out.set(p.clone(), v - w)?;
            }
        }
        Ok(out)
    }

    pub fn parse_tsv(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "missing header row"))?;
        let cols: Vec<LanguageCode> = header
            .split('\t')
            .skip(1)
            .map(|c| c.trim().parse().map_err(|_| Error::parse(path, hline + 1, format!("bad column {c:?}"))))
            .collect::<Result<_>>()?;
        let mut grid = ScoreGrid::new(cols.clone()).map_err(|e| Error::parse(path, hline + 1, e.to_string()))?;
        for (i, line) in lines {
            let lineno = i + 1;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() > cols.len() + 1 {
                return Err(Error::parse(path, lineno, "more cells than columns"));
            }
            let src: LanguageCode = fields[0]
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad row label {:?}", fields[0])))?;
            if !cols.contains(&src) {
                return Err(Error::parse(path, lineno, format!("row {src} has no matching column")));
            }
            for (tgt, cell) in cols.iter().zip(&fields[1..]) {
                let cell = cell.trim();
                if cell.is_empty() {
                    continue;
                }
                let v: f64 = cell
                    .parse()
                    .map_err(|_| Error::parse(path, lineno, format!("bad number {cell:?}")))?;
                grid.set(LanguagePair::new(src.clone(), tgt.clone()), v)
                    .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
            }
        }
        Ok(grid)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ScoreGrid::parse_tsv(&text, path)
    }

    /// Header row and one row per language; empty string for absent cells.
    pub fn to_tsv(&self, decimals: usize) -> String {
        let mut out = String::from("src\\tgt");
        for l in &self.langs {
            out.push('\t');
            out.push_str(l.as_str());
        }
        out.push('\n');
        for s in &self.langs {
            out.push_str(s.as_str());
            for t in &self.langs {
                out.push('\t');
                if let Some(v) = self.get(&LanguagePair::new(s.clone(), t.clone())) {
                    out.push_str(&textio::fmt_f64(v, decimals));
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn average_to_from(grid: &ScoreGrid, lang: &LanguageCode) -> Result<ToFrom> {
    if !grid.langs.contains(lang) {
        return Err(Error::UnknownLanguage(lang.to_string()));
    }
    let to: Vec<f64> = grid.cells.iter().filter(|(p, _)| &p.target == lang).map(|(_, v)| *v).collect();
    let from: Vec<f64> = grid.cells.iter().filter(|(p, _)| &p.source == lang).map(|(_, v)| *v).collect();
    if to.is_empty() && from.is_empty() {
        return Err(Error::Missing(format!("no cells involve {lang}")));
    }
    Ok(ToFrom {
        to_x: mean(&to),
        from_x: mean(&from),
    })
}

/// `average_to_from` for every grid language that has cells.
pub fn per_language_averages(grid: &ScoreGrid) -> BTreeMap<LanguageCode, ToFrom> {
    grid.langs
        .iter()
        .filter_map(|l| average_to_from(grid, l).ok().map(|a| (l.clone(), a)))
        .collect()
}
