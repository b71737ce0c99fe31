//! Deliberately naive reference implementations used as test oracles.
//! Shared by the core integration tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::HashMap;

/// Rank by counting: rank = 1 + #smaller + (#equal - 1) / 2.
pub fn ranks_by_counting(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let less = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

pub fn pearson_textbook(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    cov / (vx.sqrt() * vy.sqrt())
}

pub fn spearman_oracle(xs: &[f64], ys: &[f64]) -> f64 {
    pearson_textbook(&ranks_by_counting(xs), &ranks_by_counting(ys))
}

/// Solves the 2x2 normal equations (X'X) b = X'y with X = [1, ln n].
pub fn normal_equations(ns: &[f64], ys: &[f64]) -> (f64, f64) {
    let xs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let k = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sy: f64 = ys.iter().sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let det = k * sxx - sx * sx;
    let intercept = (sxx * sy - sx * sxy) / det;
    let slope = (k * sxy - sx * sy) / det;
    (slope, intercept)
}

/// Exhaustive search for an n-gram (n <= max_n) repeated `min_repeats`
/// times back to back.
pub fn repetition_oracle<T: PartialEq>(tokens: &[T], max_n: usize, min_repeats: usize) -> bool {
    for n in 1..=max_n {
        for i in 0..tokens.len() {
            if i + n > tokens.len() {
                break;
            }
            let gram = &tokens[i..i + n];
            let mut copies = 1;
            while i + (copies + 1) * n <= tokens.len() && &tokens[i + copies * n..i + (copies + 1) * n] == gram {
                copies += 1;
            }
            if copies >= min_repeats {
                return true;
            }
        }
    }
    false
}

fn ngrams(toks: &[String], n: usize) -> HashMap<Vec<String>, usize> {
    let mut m = HashMap::new();
    if toks.len() >= n {
        for w in toks.windows(n) {
            *m.entry(w.to_vec()).or_insert(0) += 1;
        }
    }
    m
}

/// Sentence BLEU with exponential smoothing over the orders the hypothesis
/// actually has, written straight from the definition.
pub fn sentence_bleu_exp_oracle(hyp: &[String], reference: &[String]) -> f64 {
    if hyp.is_empty() {
        return 0.0;
    }
    let mut logs = Vec::new();
    let mut any_match = false;
    let mut factor = 1.0;
    for n in 1..=4 {
        let h = ngrams(hyp, n);
        let r = ngrams(reference, n);
        let total: usize = h.values().sum();
        if total == 0 {
            break;
        }
        let matched: usize = h.iter().map(|(g, c)| (*c).min(*r.get(g).unwrap_or(&0))).sum();
        any_match |= matched > 0;
        let p = if matched == 0 {
            factor *= 2.0;
            1.0 / (factor * total as f64)
        } else {
            matched as f64 / total as f64
        };
        logs.push(p.ln());
    }
    if !any_match {
        return 0.0;
    }
    let bp = if hyp.len() < reference.len() {
        (1.0 - reference.len() as f64 / hyp.len() as f64).exp()
    } else {
        1.0
    };
    100.0 * bp * (logs.iter().sum::<f64>() / logs.len() as f64).exp()
}
