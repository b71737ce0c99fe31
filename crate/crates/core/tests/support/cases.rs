//! Constructed detector cases with their expected flags, shared by the core
//! detector tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::BTreeMap;

use mfti_core::records::TranslationRecord;
use mfti_core::rng::SeededRng;
use mfti_core::LanguageCode;

use super::oracles::sentence_bleu_exp_oracle;

pub fn record(id: &str, src_lang: &str, tgt_lang: &str, src: &str, hyp: &str, reference: &str) -> TranslationRecord {
    TranslationRecord {
        id: id.into(),
        src_lang: src_lang.parse().unwrap(),
        tgt_lang: tgt_lang.parse().unwrap(),
        src: src.into(),
        hyp: hyp.into(),
        reference: reference.into(),
        external: None,
    }
}

fn words(prefix: &str, ids: impl IntoIterator<Item = usize>) -> Vec<String> {
    ids.into_iter().map(|i| format!("{prefix}{i}")).collect()
}

fn split(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

/// 200 source-copy cases, 80 of them with a true score within 2 BLEU of
/// the 80 threshold. Expected flag: oracle sentence BLEU(hyp, src) > 80.
pub fn source_copy_cases() -> Vec<(TranslationRecord, bool, f64)> {
    let mut rng = SeededRng::new(80);
    let mut near = Vec::new();
    let mut far = Vec::new();
    let mut k = 0;
    while near.len() < 80 || far.len() < 120 {
        k += 1;
        let len = 8 + rng.below(16) as usize;
        let src: Vec<String> = (0..len).map(|_| format!("w{}", rng.below(60))).collect();
        let mut hyp = src.clone();
        let edits = rng.below(4) as usize;
        for e in 0..edits {
            let pos = rng.below(hyp.len() as u64) as usize;
            match rng.below(3) {
                0 => hyp[pos] = format!("x{k}n{e}"),
                1 if hyp.len() > 1 => {
                    hyp.remove(pos);
                }
                _ => {
                    let j = rng.below(hyp.len() as u64) as usize;
                    hyp.swap(pos, j);
                }
            }
        }
        let score = sentence_bleu_exp_oracle(&hyp, &src);
        let r = record(&format!("sc{k}"), "de", "en", &src.join(" "), &hyp.join(" "), "unused");
        if (score - 80.0).abs() < 2.0 {
            if near.len() < 80 {
                near.push((r, score > 80.0, score));
            }
        } else if far.len() < 120 {
            far.push((r, score > 80.0, score));
        }
    }
    // fixed anchors: verbatim copy, empty output
    let s = "der schnelle braune Fuchs springt über den faulen Hund";
    far[0] = (record("sc-copy", "de", "en", s, s, "x"), true, 100.0);
    far[1] = (record("sc-empty", "de", "en", s, "", "x"), false, 0.0);
    near.extend(far);
    near
}

/// 200 length-ratio cases around 2.0 and 0.5, with exact boundaries.
pub fn over_under_cases() -> Vec<(TranslationRecord, bool)> {
    let mut out = Vec::new();
    let mut id = 0;
    for r in 1..=20usize {
        let mut lens = vec![2 * r - 1, 2 * r, 2 * r + 1, r, 3 * r];
        if r % 2 == 0 {
            lens.extend([r / 2 - 1, r / 2, r / 2 + 1]);
        } else {
            lens.extend([r / 2, r / 2 + 1]);
        }
        for h in lens {
            if out.len() == 200 {
                break;
            }
            id += 1;
            let expected = h > 2 * r || 2 * h < r;
            let hyp = words("h", 0..h).join(" ");
            let reference = words("r", 0..r).join(" ");
            out.push((record(&format!("ou{id}"), "fr", "en", "src", &hyp, &reference), expected));
        }
    }
    let mut r = 21;
    while out.len() < 200 {
        id += 1;
        let h = 2 * r;
        out.push((
            record(&format!("ou{id}"), "fr", "en", "src", &words("h", 0..h).join(" "), &words("r", 0..r).join(" ")),
            false,
        ));
        r += 1;
    }
    out
}

/// 200 repetition cases: an n-gram of distinct tokens repeated 2, 3 or 4
/// times inside distinct filler, n in 1..=5 (5 lies outside the default cap).
pub fn repetition_cases() -> Vec<(TranslationRecord, bool)> {
    let mut rng = SeededRng::new(3);
    (0..200)
        .map(|i| {
            let n = 1 + i % 5;
            let repeats = 2 + (i / 5) % 3;
            let before = rng.below(6) as usize;
            let after = rng.below(6) as usize;
            let gram = words("g", 0..n);
            let mut toks = words("a", 0..before);
            for _ in 0..repeats {
                toks.extend(gram.iter().cloned());
            }
            toks.extend(words("z", 0..after));
            let expected = n <= 4 && repeats >= 3;
            (record(&format!("oh{i}"), "en", "de", "src", &toks.join(" "), "ref"), expected)
        })
        .collect()
}

/// 200 off-target cases driven by external labels; ids without a label
/// and with an empty hypothesis exercise the undetermined path.
pub fn off_target_cases(codes: &[LanguageCode]) -> (Vec<(TranslationRecord, bool)>, BTreeMap<String, LanguageCode>) {
    let mut rng = SeededRng::new(77);
    let mut labels = BTreeMap::new();
    let mut out = Vec::new();
    for i in 0..200 {
        let tgt = &codes[rng.below(codes.len() as u64) as usize];
        let src = codes.iter().find(|c| *c != tgt).unwrap();
        let id = format!("ot{i}");
        match i % 4 {
            0 | 1 => {
                labels.insert(id.clone(), tgt.clone());
                out.push((record(&id, src.as_str(), tgt.as_str(), "s", "h", "r"), false));
            }
            2 => {
                let other = codes.iter().filter(|c| *c != tgt).nth(rng.below(codes.len() as u64 - 1) as usize).unwrap();
                labels.insert(id.clone(), other.clone());
                out.push((record(&id, src.as_str(), tgt.as_str(), "s", "h", "r"), true));
            }
            _ => out.push((record(&id, src.as_str(), tgt.as_str(), "s", "", "r"), true)),
        }
    }
    (out, labels)
}

pub fn tokens(s: &str) -> Vec<String> {
    split(s)
}
