//! Rank correlation and log-linear least squares.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Average (fractional) ranks, 1-based; ties share the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::Degenerate("spearman needs at least two observations".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("spearman input contains a non-finite value".into()));
    }
    for (side, v) in [("first", xs), ("second", ys)] {
        if v.iter().all(|&x| x == v[0]) {
            return Err(Error::Degenerate(format!("{side} argument is constant")));
        }
    }
    Ok(pearson(&average_ranks(xs), &average_ranks(ys)))
}

/// `score = intercept + slope * ln(n)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl LogLinearFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.intercept + self.slope * n.ln()
    }
}

pub fn loglinear_fit(ns: &[f64], scores: &[f64]) -> Result<LogLinearFit> {
    if ns.len() != scores.len() {
        return Err(Error::LengthMismatch {
            left: ns.len(),
            right: scores.len(),
        });
    }
    if ns.len() < 2 {
        return Err(Error::Degenerate("log-linear fit needs at least two points".into()));
    }
    if let Some(bad) = ns.iter().find(|&&n| !(n > 0.0 && n.is_finite())) {
        return Err(Error::InvalidArgument(format!("non-positive size {bad}")));
    }
    if ns.iter().all(|&n| n == ns[0]) {
        return Err(Error::Degenerate("all sizes are equal".into()));
    }
    let xs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = scores.iter().sum::<f64>() / k;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(scores) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(scores)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LogLinearFit {
        slope,
        intercept,
        r_squared,
    })
}
