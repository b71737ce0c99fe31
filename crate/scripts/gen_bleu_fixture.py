"""Regenerates crates/core/tests/fixtures/bleu_parity.* with sacreBLEU.

Run once; the outputs are committed. Requires `pip install sacrebleu==2.6.0`.
"""
import json
import random
from pathlib import Path

import sacrebleu
from sacrebleu.metrics import BLEU
from sacrebleu.tokenizers.tokenizer_13a import Tokenizer13a
from sacrebleu.tokenizers.tokenizer_intl import TokenizerV14International
from sacrebleu.tokenizers.tokenizer_char import TokenizerChar

ROOT = Path(__file__).resolve().parent.parent
HELDOUT = ROOT / "data" / "langid" / "heldout"
OUT = ROOT / "crates" / "core" / "tests" / "fixtures"
LANGS = "en de fr ca fi ru bg zh ko ar sw hi ta".split()

rng = random.Random(20230519)


def perturb(ref, lang, donor):
    if lang == "zh":
        chars = list(ref)
        ops = rng.randint(0, 4)
        for _ in range(ops):
            if len(chars) < 3:
                break
            i = rng.randrange(len(chars))
            kind = rng.random()
            if kind < 0.4:
                del chars[i]
            elif kind < 0.7:
                chars[i] = rng.choice(donor)
            else:
                j = rng.randrange(len(chars))
                chars[i], chars[j] = chars[j], chars[i]
        return "".join(chars)
    words = ref.split()
    dwords = donor.split()
    ops = rng.randint(0, 5)
    for _ in range(ops):
        if len(words) < 3:
            break
        i = rng.randrange(len(words))
        kind = rng.random()
        if kind < 0.35:
            del words[i]
        elif kind < 0.65:
            words[i] = rng.choice(dwords)
        elif kind < 0.85:
            j = rng.randrange(len(words))
            words[i], words[j] = words[j], words[i]
        else:
            words.insert(i, rng.choice(dwords))
    return " ".join(words)


records = []
for k in range(100):
    lang = LANGS[k % len(LANGS)]
    lines = [l for l in (HELDOUT / f"{lang}.txt").read_text(encoding="utf8").splitlines() if l]
    ref = lines[(k * 7) % len(lines)]
    donor = lines[(k * 7 + 3) % len(lines)]
    if k % 17 == 5:
        hyp = ref
    elif k % 23 == 11:
        hyp = donor
    else:
        hyp = perturb(ref, lang, donor)
    records.append({"id": f"s{k:03d}", "lang": lang, "hyp": hyp, "ref": ref})

tok13a, tokintl, tokchar = Tokenizer13a(), TokenizerV14International(), TokenizerChar()
sent = BLEU(smooth_method="exp", effective_order=True)
for r in records:
    r["tok_13a"] = tok13a(r["hyp"]).split()
    r["tok_intl"] = tokintl(r["hyp"]).split()
    r["tok_char"] = tokchar(r["hyp"]).split()
    r["sentence_bleu_13a_exp"] = sent.sentence_score(r["hyp"], [r["ref"]]).score
    r["sentence_bleu_char_exp"] = BLEU(tokenize="char", smooth_method="exp", effective_order=True).sentence_score(
        r["hyp"], [r["ref"]]
    ).score
    r["sentence_bleu_13a_floor"] = BLEU(smooth_method="floor", smooth_value=0.1, effective_order=True).sentence_score(
        r["hyp"], [r["ref"]]
    ).score

with open(OUT / "bleu_parity.jsonl", "w", encoding="utf8") as f:
    for r in records:
        f.write(json.dumps(r, ensure_ascii=False) + "\n")

hyps = [r["hyp"] for r in records]
refs = [[r["ref"] for r in records]]


def corpus(**kw):
    b = BLEU(**kw).corpus_score(hyps, refs)
    return {
        "score": b.score,
        "precisions": b.precisions,
        "bp": b.bp,
        "sys_len": b.sys_len,
        "ref_len": b.ref_len,
    }


zh = [r for r in records if r["lang"] == "zh"]
summary = {
    "sacrebleu_version": sacrebleu.__version__,
    "corpus_13a_none": corpus(smooth_method="none"),
    "corpus_13a_exp": corpus(smooth_method="exp"),
    "corpus_intl_none": corpus(tokenize="intl", smooth_method="none"),
    "corpus_char_none": corpus(tokenize="char", smooth_method="none"),
    "corpus_zh_char_none": {
        "score": BLEU(tokenize="char", smooth_method="none")
        .corpus_score([r["hyp"] for r in zh], [[r["ref"] for r in zh]])
        .score
    },
    # no shared n-gram at any order, hypothesis shorter than reference
    "no_overlap_sentence_exp": BLEU(smooth_method="exp", effective_order=True)
    .sentence_score("alpha beta gamma delta epsilon", ["one two three four five six seven"])
    .score,
}
(OUT / "bleu_parity_expected.json").write_text(json.dumps(summary, indent=2) + "\n")
print(json.dumps(summary, indent=2))
