//! Scores pinned from one run of sacreBLEU 2.6.0 over a 100-sentence,
//! 13-language fixture (regenerate with scripts/gen_bleu_fixture.py).

use std::path::PathBuf;
use std::time::Instant;

use mfti_core::metrics::{corpus_bleu, sentence_bleu, tokenize, Smoothing, TokenSequence, TokenizerId};
use serde::Deserialize;
use serde_json::Value;

#[derive(Deserialize)]
struct Row {
    id: String,
    lang: String,
    hyp: String,
    #[serde(rename = "ref")]
    reference: String,
    tok_13a: Vec<String>,
    tok_intl: Vec<String>,
    tok_char: Vec<String>,
    sentence_bleu_13a_exp: f64,
    sentence_bleu_char_exp: f64,
    sentence_bleu_13a_floor: f64,
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn rows() -> Vec<Row> {
    let text = std::fs::read_to_string(fixtures().join("bleu_parity.jsonl")).unwrap();
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn expected() -> Value {
    serde_json::from_str(&std::fs::read_to_string(fixtures().join("bleu_parity_expected.json")).unwrap()).unwrap()
}

fn toks(rows: &[Row], f: impl Fn(&Row) -> &str, t: TokenizerId) -> Vec<TokenSequence> {
    rows.iter().map(|r| tokenize(f(r), t)).collect()
}

const TOL: f64 = 0.05;

#[test]
fn tokenization_matches() {
    for r in rows() {
        assert_eq!(tokenize(&r.hyp, TokenizerId::Mteval13a).tokens, r.tok_13a, "13a {}", r.id);
        assert_eq!(tokenize(&r.hyp, TokenizerId::International).tokens, r.tok_intl, "intl {}", r.id);
        assert_eq!(tokenize(&r.hyp, TokenizerId::Char).tokens, r.tok_char, "char {}", r.id);
    }
}

#[test]
fn corpus_scores_match() {
    let rows = rows();
    let exp = expected();
    let start = Instant::now();
    for (key, tok, smooth) in [
        ("corpus_13a_none", TokenizerId::Mteval13a, Smoothing::None),
        ("corpus_13a_exp", TokenizerId::Mteval13a, Smoothing::Exp),
        ("corpus_intl_none", TokenizerId::International, Smoothing::None),
        ("corpus_char_none", TokenizerId::Char, Smoothing::None),
    ] {
        let b = corpus_bleu(&toks(&rows, |r| &r.hyp, tok), &toks(&rows, |r| &r.reference, tok), smooth).unwrap();
        let e = &exp[key];
        assert!((b.score - e["score"].as_f64().unwrap()).abs() < TOL, "{key}: {}", b.score);
        assert!((b.brevity_penalty - e["bp"].as_f64().unwrap()).abs() < 1e-9, "{key}");
        assert_eq!(b.hyp_len, e["sys_len"].as_u64().unwrap(), "{key}");
        assert_eq!(b.ref_len, e["ref_len"].as_u64().unwrap(), "{key}");
        for (p, q) in b.ngram_precisions.iter().zip(e["precisions"].as_array().unwrap()) {
            assert!((p * 100.0 - q.as_f64().unwrap()).abs() < 1e-9, "{key}");
        }
    }
    let zh: Vec<Row> = rows.into_iter().filter(|r| r.lang == "zh").collect();
    let t = TokenizerId::Char;
    let b = corpus_bleu(&toks(&zh, |r| &r.hyp, t), &toks(&zh, |r| &r.reference, t), Smoothing::None).unwrap();
    assert!((b.score - exp["corpus_zh_char_none"]["score"].as_f64().unwrap()).abs() < TOL);
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn sentence_scores_match() {
    for r in rows() {
        let s = |t, sm| {
            sentence_bleu(&tokenize(&r.hyp, t), &tokenize(&r.reference, t), sm).score
        };
        let a = s(TokenizerId::Mteval13a, Smoothing::Exp);
        let c = s(TokenizerId::Char, Smoothing::Exp);
        let f = s(TokenizerId::Mteval13a, Smoothing::Floor(0.1));
        assert!((a - r.sentence_bleu_13a_exp).abs() < TOL, "{} 13a exp {a} vs {}", r.id, r.sentence_bleu_13a_exp);
        assert!((c - r.sentence_bleu_char_exp).abs() < TOL, "{} char exp", r.id);
        assert!((f - r.sentence_bleu_13a_floor).abs() < TOL, "{} 13a floor", r.id);
    }
}

#[test]
fn no_overlap_sentence() {
    let t = TokenizerId::Mteval13a;
    let b = sentence_bleu(
        &tokenize("alpha beta gamma delta epsilon", t),
        &tokenize("one two three four five six seven", t),
        Smoothing::Exp,
    );
    assert_eq!(b.score, expected()["no_overlap_sentence_exp"].as_f64().unwrap());
    assert!(b.score < 5.0);
}
