use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn mfti(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfti")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = mfti(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn codes() -> Vec<String> {
    fs::read_to_string(data("registry.tsv"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split('\t').next().unwrap().to_string())
        .collect()
}

/// One small tsv-pair corpus per direction of the 13-language registry.
fn write_experiment(dir: &Path, corpora: bool) -> PathBuf {
    let codes = codes();
    let mut entries = Vec::new();
    if corpora {
        fs::create_dir_all(dir.join("corpora")).unwrap();
        for s in &codes {
            for t in codes.iter().filter(|t| *t != s) {
                let name = format!("corpora/{s}-{t}.tsv");
                let lines: String = (0..6).map(|i| format!("{s} sentence {i}\t{t} sentence {i}\n")).collect();
                fs::write(dir.join(&name), lines).unwrap();
                entries.push(json!({"path": name, "format": "tsv-pair", "src": s, "tgt": t}));
            }
        }
    }
    let cfg = json!({
        "registry": data("registry.tsv"),
        "corpora": entries,
        "sample": {"per_pair": 4, "strategy": "random"},
        "langid": {"train_dir": data("langid/train")},
        "output_dir": "out",
    });
    let path = dir.join("experiment.json");
    fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

#[test]
fn unknown_subcommand_prints_usage() {
    let out = mfti(&["frobnicate"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn prepare_156_pairs_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_experiment(tmp.path(), true);
    let cfg = cfg.to_str().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    ok(&["prepare", "--config", cfg, "--seed", "11", "--out", a.to_str().unwrap()]);
    ok(&["prepare", "--config", cfg, "--seed", "11", "--out", b.to_str().unwrap()]);
    assert!(!a.join(".failed").exists());
    for f in ["train.txt", "manifest.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let m: Value = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["training"]["per_pair_counts"].as_object().unwrap().len(), 156);
    assert_eq!(m["training"]["total"], 156 * 4);
    assert_eq!(fs::read_to_string(a.join("train.txt")).unwrap().lines().count(), 156 * 4);

    // another seed reshuffles
    let c = tmp.path().join("c");
    ok(&["prepare", "--config", cfg, "--seed", "12", "--out", c.to_str().unwrap()]);
    assert_ne!(fs::read(a.join("train.txt")).unwrap(), fs::read(c.join("train.txt")).unwrap());
}

#[test]
fn prepare_needs_seed_and_corpora() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_experiment(tmp.path(), true);
    let out = tmp.path().join("o");
    let r = mfti(&["prepare", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!r.status.success());
    assert!(fs::read_to_string(out.join(".failed")).unwrap().contains("--seed"));

    let empty = tempfile::tempdir().unwrap();
    let cfg = write_experiment(empty.path(), false);
    let out = empty.path().join("o");
    let r = mfti(&["prepare", "--config", cfg.to_str().unwrap(), "--seed", "1", "--out", out.to_str().unwrap()]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("no corpora"));
    assert!(out.join(".failed").exists());
    assert!(!out.join("train.txt").exists());
}

#[test]
fn config_paths_checked_at_load() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = json!({"registry": "missing.tsv", "corpora": []});
    let p = tmp.path().join("c.json");
    fs::write(&p, cfg.to_string()).unwrap();
    let r = mfti(&["partition", "--config", p.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("does not exist"));
}

/// Results where every hypothesis equals its reference, built from held-out
/// sentences of the target language.
fn identity_results(dir: &Path, pairs: &[(&str, &str)]) -> PathBuf {
    let mut out = String::new();
    for (s, t) in pairs {
        let lines = fs::read_to_string(data(&format!("langid/heldout/{t}.txt"))).unwrap();
        for (i, l) in lines.lines().filter(|l| l.chars().count() >= 30).take(5).enumerate() {
            let rec = json!({"id": format!("{s}-{t}-{i}"), "src_lang": s, "tgt_lang": t, "src": "x", "hyp": l, "ref": l});
            out.push_str(&rec.to_string());
            out.push('\n');
        }
    }
    let p = dir.join("results.jsonl");
    fs::write(&p, out).unwrap();
    p
}

#[test]
fn evaluate_identity_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_experiment(tmp.path(), false);
    let pairs = [("en", "de"), ("de", "zh"), ("fr", "ta"), ("ko", "en")];
    let results = identity_results(tmp.path(), &pairs);
    let run = |name: &str| {
        let o = tmp.path().join(name);
        ok(&[
            "evaluate",
            "--config",
            cfg.to_str().unwrap(),
            "--results",
            results.to_str().unwrap(),
            "--out",
            o.to_str().unwrap(),
        ]);
        o
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["bleu_grid.tsv", "bleu_details.json", "errors.json", "errors.tsv", "evaluate_manifest.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let grid = fs::read_to_string(a.join("bleu_grid.tsv")).unwrap();
    assert!(grid.starts_with("# config sha256 "));
    let cells: Vec<&str> = grid
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("src"))
        .flat_map(|l| l.split('\t').skip(1))
        .filter(|c| !c.is_empty())
        .collect();
    assert_eq!(cells, vec!["100.00"; pairs.len()]);
    // identical output is a copy of the reference, never of the source
    let errors: Value = serde_json::from_slice(&fs::read(a.join("errors.json")).unwrap()).unwrap();
    assert_eq!(errors["report"]["overall"]["counts"]["sc"], 0);
    assert_eq!(errors["report"]["overall"]["counts"]["ou"], 0);
}

#[test]
fn evaluate_rejects_misaligned_refs() {
    let tmp = tempfile::tempdir().unwrap();
    let results = identity_results(tmp.path(), &[("en", "de")]);
    let refs = tmp.path().join("refs.jsonl");
    fs::write(&refs, "{\"id\": \"en-de-0\", \"ref\": \"x\"}\n{\"id\": \"nope\", \"ref\": \"y\"}\n").unwrap();
    let r = mfti(&[
        "evaluate",
        "--registry",
        data("registry.tsv").to_str().unwrap(),
        "--results",
        results.to_str().unwrap(),
        "--refs",
        refs.to_str().unwrap(),
        "--langid-train",
        data("langid/train").to_str().unwrap(),
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("nope"));
    assert!(tmp.path().join("o/.failed").exists());
}

#[test]
fn make_icl_needs_seed_and_is_stable() {
    let tmp = tempfile::tempdir().unwrap();
    let demos = tmp.path().join("demos.tsv");
    let pool: String = (0..20).map(|i| format!("source {i}\ttarget {i}\n")).collect();
    fs::write(&demos, pool).unwrap();
    let queries = tmp.path().join("q.txt");
    fs::write(&queries, "query one\nquery two\n").unwrap();
    let base = ["make-icl", "--demos", demos.to_str().unwrap(), "--src", "en", "--tgt", "de", "--queries", queries.to_str().unwrap(), "--k", "3"];
    let out = tmp.path().join("o");
    let mut args = base.to_vec();
    args.extend(["--out", out.to_str().unwrap()]);
    assert!(!mfti(&args).status.success());
    assert!(out.join(".failed").exists());
    args.extend(["--seed", "5"]);
    ok(&args);
    assert!(!out.join(".failed").exists());
    let first = fs::read(out.join("icl_prompts.jsonl")).unwrap();
    ok(&args);
    assert_eq!(first, fs::read(out.join("icl_prompts.jsonl")).unwrap());
    let line: Value = serde_json::from_slice(first.split(|&b| b == b'\n').next().unwrap()).unwrap();
    assert_eq!(line["demonstrations"].as_array().unwrap().len(), 3);
    assert!(line["rendered"].as_str().unwrap().ends_with("query one = "));
}

#[test]
fn filter_quality_top_k() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("wm.tsv");
    fs::write(&input, "1.07\ta\tA\n1.20\tb\tB\n1.01\tc\tC\nbroken\n1.10\td\tD\n").unwrap();
    let out = tmp.path().join("o");
    ok(&["filter-quality", "--input", input.to_str().unwrap(), "--src", "en", "--tgt", "fr", "--top-k", "2", "--max-malformed", "0.25", "--out", out.to_str().unwrap()]);
    assert_eq!(fs::read_to_string(out.join("filtered.tsv")).unwrap(), "1.2\tb\tB\n1.1\td\tD\n");
    let m: Value = serde_json::from_slice(&fs::read(out.join("filter_manifest.json")).unwrap()).unwrap();
    assert_eq!(m["malformed"], 1);
}

#[test]
fn analysis_commands_on_shipped_data() {
    let tmp = tempfile::tempdir().unwrap();
    let o = |n: &str| tmp.path().join(n).to_str().unwrap().to_string();
    let reg = data("registry.tsv");
    let spec = data("partitions/mfti16.json");
    let matrix = ok(&["partition", "--registry", reg.to_str().unwrap(), "--spec", spec.to_str().unwrap(), "--out", &o("p")]);
    assert_eq!(String::from_utf8_lossy(&matrix.stdout).lines().count(), 14);

    ok(&[
        "correlate",
        "--grid",
        data("grids/xglm_mfti.tsv").to_str().unwrap(),
        "--features",
        data("features/uriel_lang2vec.tsv").to_str().unwrap(),
        "--categories",
        "geography,syntax",
        "--side",
        "to_x",
        "--format",
        "json",
        "--out",
        &o("c"),
    ]);
    let r: Value = serde_json::from_slice(&fs::read(tmp.path().join("c/correlations.json")).unwrap()).unwrap();
    let rows = r["tables"][0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0][2].as_f64().unwrap() > rows[1][2].as_f64().unwrap());

    ok(&[
        "report",
        "--grid",
        &format!("mfti16={}", data("grids/conditions_mfti16.tsv").display()),
        "--partition",
        spec.to_str().unwrap(),
        "--registry",
        reg.to_str().unwrap(),
        "--format",
        "tsv,markdown",
        "--out",
        &o("r"),
    ]);
    let text = fs::read_to_string(tmp.path().join("r/report.tsv")).unwrap();
    assert!(text.contains("mfti16\tsame_direction\t15.7"));
    assert!(tmp.path().join("r/report.md").exists());
}
