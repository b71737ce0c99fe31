"""Regenerates the shipped data files under data/.

Inputs: the per-direction BLEU table (parsed from a LaTeX dump passed as argv[1])
and the lang2vec 1.1.2 package (URIEL feature vectors). Run once; outputs are
committed and the Rust code never calls back into Python.
"""
import json
import re
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
LANGS = "en de fr ca fi ru bg zh ko ar sw hi ta".split()
NAMES = {
    "en": "English", "de": "German", "fr": "French", "ca": "Catalan", "fi": "Finnish",
    "ru": "Russian", "bg": "Bulgarian", "zh": "Chinese", "ko": "Korean", "ar": "Arabic",
    "sw": "Swahili", "hi": "Hindi", "ta": "Tamil",
}
EXTRA = {
    "es": "Spanish", "ja": "Japanese", "it": "Italian", "pt": "Portuguese", "el": "Greek",
    "id": "Indonesian", "tr": "Turkish", "vi": "Vietnamese", "th": "Thai", "et": "Estonian",
    "bn": "Bengali", "ur": "Urdu", "te": "Telugu", "eu": "Basque", "my": "Burmese",
    "ht": "Haitian Creole", "qu": "Quechua",
}


def parse_table(tex):
    systems = {"icl": {}, "mfti": {}}
    cur = mode = None
    for ln in tex.splitlines():
        m = re.match(r"\\multirow\{4\}\{\*\}\{(\w+)\}", ln.strip())
        if m:
            cur = m.group(1)
        if "bleu" in ln:
            mode = "bleu"
        if "comet" in ln:
            mode = "comet"
        s = re.sub(r"\\textbf\{([^}]*)\}", r"\1", ln)
        if mode == "bleu" and cur in LANGS and ("ICL" in s or "few-shot" in s or "mFTI" in s):
            vals = [v.strip().rstrip("\\").strip() for v in s.split("&")]
            nums = [v for v in vals if re.match(r"^(-|[0-9.]+)$", v)][-14:]
            key = "mfti" if "mFTI" in s else "icl"
            systems[key][cur] = [None if v == "-" else float(v) for v in nums[:13]]
    return systems


def write_grid(path, header, cells):
    lines = [f"# {h}" for h in header]
    lines.append("\t".join(["src\\tgt"] + LANGS))
    for s in LANGS:
        row = [s]
        for t in LANGS:
            v = cells.get((s, t))
            row.append("" if v is None else f"{v:.1f}")
        lines.append("\t".join(row))
    path.write_text("\n".join(lines) + "\n")


# Reconstructed mFTI-16 partition: the held-out six are the languages of the
# three unseen-both pairs studied in the error analysis; the role groups of the
# remaining seven and the 16 pairs are an assumption.
UNSEEN = ["ru", "fr", "bg", "ar", "ca", "ta"]
ONLY_SOURCE = ["fi", "ko"]
ONLY_TARGET = ["sw", "hi"]
SOURCE_TARGET = ["en", "de", "zh"]
TRAIN16 = [
    ("en", "de"), ("de", "en"), ("en", "zh"), ("zh", "de"),
    ("fi", "en"), ("fi", "de"), ("fi", "sw"), ("fi", "hi"),
    ("ko", "en"), ("ko", "zh"), ("ko", "hi"), ("ko", "sw"),
    ("en", "sw"), ("en", "hi"), ("de", "sw"), ("zh", "hi"),
]


def condition(s, t):
    train = set(TRAIN16)
    seen = {l for p in TRAIN16 for l in p}
    if (s, t) in train:
        return "SameDirection"
    if (t, s) in train:
        return "ReversedDirection"
    if s in seen and t in seen:
        return "UnseenDirection"
    if s not in seen and t in seen:
        return "UnseenSrc"
    if s in seen and t not in seen:
        return "UnseenTgt"
    return "UnseenBoth"


TABLE4 = {
    "icl": [14.5, 14.5, 11.2, 13.5, 13.6, 14.6],
    "mfti16": [15.7, 13.7, 12.6, 14.9, 14.5, 15.3],
    "mftiall": [16.7, 16.8, 14.6, 17.6, 17.0, 18.4],
}
CONDS = ["SameDirection", "ReversedDirection", "UnseenDirection", "UnseenSrc", "UnseenTgt", "UnseenBoth"]


def shifted_fixture(base, targets):
    out = {}
    for cond, target in zip(CONDS, targets):
        dirs = [d for d in base if condition(*d) == cond]
        mean = sum(base[d] for d in dirs) / len(dirs)
        cells = {d: max(0.0, round(base[d] + target - mean, 1)) for d in dirs}
        tenths = round(target * len(dirs) * 10) - sum(round(v * 10) for v in cells.values())
        top = max(dirs, key=lambda d: (cells[d], d))
        cells[top] = round(cells[top] + tenths / 10, 1)
        assert round(sum(round(v * 10) for v in cells.values())) == round(target * len(dirs) * 10)
        out.update(cells)
    return out


def main():
    tex = Path(sys.argv[1]).read_text()
    systems = parse_table(tex)
    grids = {}
    for key, label in (("icl", "8-shot ICL"), ("mfti", "mFTI (all pairs)")):
        cells = {}
        for s in LANGS:
            for j, t in enumerate(LANGS):
                if s != t:
                    cells[(s, t)] = systems[key][s][j]
        grids[key] = cells
        write_grid(
            DATA / "grids" / f"xglm_{key}.tsv",
            [f"Per-direction FLORES-101 devtest BLEU, XGLM-7.5B, {label}.",
             "Source language in rows, target language in columns."],
            cells,
        )

    for name, base in (("icl", "icl"), ("mfti16", "icl"), ("mftiall", "mfti")):
        write_grid(
            DATA / "grids" / f"conditions_{name}.tsv",
            ["Synthetic fixture: per-direction scores are not published for this system.",
             f"Cells are the xglm_{base}.tsv grid shifted per data condition of partitions/mfti16.json",
             "so that each condition mean equals the published condition average."],
            shifted_fixture(grids[base], TABLE4[name]),
        )

    reg = "\n".join(f"{c}\t{NAMES[c]}" for c in LANGS) + "\n"
    (DATA / "registry.tsv").write_text(reg)
    (DATA / "registry_xglm30.tsv").write_text(reg + "\n".join(f"{c}\t{n}" for c, n in EXTRA.items()) + "\n")

    part = DATA / "partitions"
    part.mkdir(exist_ok=True)
    spec16 = {
        "name": "mFTI-16",
        "note": "reconstruction: held-out languages follow the unseen-both pairs ru-fr, bg-ar, ca-ta; role groups and pair list are assumed",
        "unseen": UNSEEN, "only_source": ONLY_SOURCE, "only_target": ONLY_TARGET,
        "source_target": SOURCE_TARGET,
        "train_pairs": [list(p) for p in TRAIN16],
    }
    (part / "mfti16.json").write_text(json.dumps(spec16, indent=2) + "\n")
    spec_all = {
        "name": "mFTI-all", "unseen": [], "only_source": [], "only_target": [],
        "source_target": LANGS,
        "train_pairs": [[s, t] for s in LANGS for t in LANGS if s != t],
    }
    (part / "mfti_all.json").write_text(json.dumps(spec_all, indent=2) + "\n")
    extra = list(EXTRA)
    added = [[extra[i], extra[j]] for i in range(len(extra)) for j in range(len(extra)) if i != j][:14]
    spec30 = dict(spec16)
    spec30["name"] = "mFTI-30"
    spec30["note"] = spec16["note"] + "; extends mFTI-16 with 14 pairs among additional languages"
    spec30["source_target"] = SOURCE_TARGET + extra
    spec30["train_pairs"] = spec16["train_pairs"] + added
    (part / "mfti30.json").write_text(json.dumps(spec30, indent=2) + "\n")

    features()


ISO3 = {"en": "eng", "de": "deu", "fr": "fra", "ca": "cat", "fi": "fin", "ru": "rus", "bg": "bul",
        "zh": "zho", "ko": "kor", "ar": "arb", "sw": "swh", "hi": "hin", "ta": "tam"}


def features():
    import lang2vec.lang2vec as l2v

    sets = [("geography", "geo"), ("syntax", "syntax_knn"), ("phylogeny", "fam"),
            ("phonology", "phonology_knn"), ("inventory", "inventory_knn")]
    lines = ["# URIEL typological vectors via lang2vec 1.1.2.",
             "# geography=geo, syntax=syntax_knn, phylogeny=fam, phonology=phonology_knn, inventory=inventory_knn",
             "# lang\tcategory\tvalues ('?' = undefined)"]
    for cat, fs in sets:
        feats = l2v.get_features([ISO3[l] for l in LANGS], fs)
        for l in LANGS:
            vals = ["?" if v == "--" else (str(int(v)) if float(v).is_integer() else repr(float(v))) for v in feats[ISO3[l]]]
            lines.append(f"{l}\t{cat}\t{','.join(vals)}")
    (DATA / "features").mkdir(exist_ok=True)
    (DATA / "features" / "uriel_lang2vec.tsv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
