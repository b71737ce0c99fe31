mod support;

use mfti_core::detect::{
    detect_off_target, detect_over_under, detect_source_copy, has_repetition, DetectorConfig, LidSource,
};
use mfti_core::langid::{load_training_dir, train_profiles, LangIdConfig};
use mfti_core::metrics::{sentence_bleu, tokenize, Smoothing, TokenizerId};
use mfti_core::rng::SeededRng;
use mfti_core::Registry;
use proptest::prelude::*;
use support::{cases, oracles};

fn data(rel: &str) -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

#[test]
fn source_copy_definition() {
    let cfg = DetectorConfig::default();
    let cases = cases::source_copy_cases();
    assert_eq!(cases.len(), 200);
    let near: Vec<bool> = cases.iter().filter(|c| (c.2 - 80.0).abs() < 2.0).map(|c| c.1).collect();
    assert!(near.len() >= 80 && near.contains(&true) && near.contains(&false));
    for (r, expected, oracle) in &cases {
        assert_eq!(detect_source_copy(r, &cfg), *expected, "{} oracle {oracle}", r.id);
    }
    // equality with the threshold does not count as "above"
    for (r, _, _) in cases.iter().take(20).filter(|(r, _, _)| !r.hyp.is_empty()) {
        let t = TokenizerId::Mteval13a;
        let score = sentence_bleu(&tokenize(&r.hyp, t), &tokenize(&r.src, t), Smoothing::Exp).score;
        let at = DetectorConfig { sc_threshold: score, ..DetectorConfig::default() };
        assert!(!detect_source_copy(r, &at));
    }
}

#[test]
fn sentence_bleu_matches_naive_oracle() {
    for (r, _, oracle) in cases::source_copy_cases().iter().filter(|c| !c.0.hyp.is_empty()) {
        let t = TokenizerId::Mteval13a;
        let ours = sentence_bleu(&tokenize(&r.hyp, t), &tokenize(&r.src, t), Smoothing::Exp).score;
        let naive = oracles::sentence_bleu_exp_oracle(&cases::tokens(&r.hyp), &cases::tokens(&r.src));
        assert!((ours - naive).abs() < 1e-9, "{}: {ours} vs {naive}", r.id);
        if r.id != "sc-copy" {
            assert_eq!(naive, *oracle);
        }
    }
}

#[test]
fn over_under_definition() {
    let cfg = DetectorConfig::default();
    let cases = cases::over_under_cases();
    assert_eq!(cases.len(), 200);
    for (r, expected) in &cases {
        assert_eq!(detect_over_under(r, &cfg).unwrap(), *expected, "{}", r.id);
    }
}

#[test]
fn repetition_definition() {
    let cfg = DetectorConfig::default();
    let cases = cases::repetition_cases();
    assert_eq!(cases.len(), 200);
    for (r, expected) in &cases {
        assert_eq!(mfti_core::detect::detect_oscillatory_hallucination(r, &cfg), *expected, "{}: {}", r.id, r.hyp);
    }
}

#[test]
fn off_target_definition() {
    let reg = Registry::load(&data("registry.tsv")).unwrap();
    let mono = load_training_dir(&reg, &data("langid/train")).unwrap();
    let model = train_profiles(&reg, &mono, &LangIdConfig::default()).unwrap();
    let (cases, labels) = cases::off_target_cases(reg.codes());
    assert_eq!(cases.len(), 200);
    let lid = LidSource { model: Some(&model), external: Some(&labels) };
    for (r, expected) in &cases {
        assert_eq!(detect_off_target(r, lid).unwrap(), *expected, "{}", r.id);
    }
    // plain-text identification through the built-in model
    let fr = cases::record("m1", "en", "fr", "s", "Le chat dort sur le canapé depuis ce matin.", "r");
    let ta = cases::record("m2", "en", "ta", "s", "The cat has been asleep on the sofa all morning.", "r");
    let model_only = LidSource { model: Some(&model), external: None };
    assert!(!detect_off_target(&fr, model_only).unwrap());
    assert!(detect_off_target(&ta, model_only).unwrap());
}

#[test]
fn repetition_matches_bruteforce_10k() {
    let mut rng = SeededRng::new(10_000);
    for case in 0..10_000 {
        let len = rng.below(61) as usize;
        let alphabet = 1 + rng.below(5);
        let toks: Vec<u64> = (0..len).map(|_| rng.below(alphabet)).collect();
        assert_eq!(has_repetition(&toks, 4, 3), oracles::repetition_oracle(&toks, 4, 3), "case {case}: {toks:?}");
    }
}

proptest! {
    #[test]
    fn repetition_any_params(toks in proptest::collection::vec(0u8..4, 0..40), n in 1usize..6, m in 1usize..5) {
        prop_assert_eq!(has_repetition(&toks, n, m), oracles::repetition_oracle(&toks, n, m));
    }

    #[test]
    fn copy_of_four_plus_tokens_is_flagged(words in proptest::collection::vec("[a-z]{1,8}", 4..30)) {
        let s = words.join(" ");
        let r = cases::record("p", "en", "de", &s, &s, "ref");
        prop_assert!(detect_source_copy(&r, &DetectorConfig::default()));
    }
}
