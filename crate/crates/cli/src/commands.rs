use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use mfti_core::analysis::{
    bucket_by_condition, correlate_factors, emit_report, error_trend_tsv, grid_gain, load_factors,
    per_language_averages, pivot_gain, score_records, similarity_factors, Cell, FeatureCategory, FeatureSet,
    Report, ReportFormat, ScoreGrid, Side, Table,
};
use mfti_core::corpus::{
    filter_by_quality, load_corpus, select_per_pair, serialize_corpus, CorpusFormat, LoadOptions, QualityFilter,
};
use mfti_core::detect::{build_error_report, error_summary_tsv, DetectorConfig, ErrorRatios, ErrorReport, LidSource};
use mfti_core::instructions::{
    build_icl_prompt, build_training_file, render_monolingual_instruction, render_translation_instruction,
    InstructionInstance, Templates, TrainingManifest,
};
use mfti_core::langid::{load_external_labels, load_training_dir, train_profiles, LangIdConfig, LangIdModel};
use mfti_core::metrics::{loglinear_fit, signature, MetricOptions};
use mfti_core::partitions::{condition_counts, condition_matrix_tsv, Condition, PartitionSpec};
use mfti_core::records::{load_records, TranslationRecord};
use mfti_core::textio::{self, read_lines, sha256_hex, write_file};
use mfti_core::{LanguageCode, LanguagePair, Registry};
use serde::{Deserialize, Serialize};

use crate::config::LoadedConfig;
use crate::{
    CorrelateArgs, DetectArgs, EvaluateArgs, FilterArgs, IclArgs, PartitionArgs, PivotArgs, ReportArgs, ScalingArgs,
};

/// What every command gets from the global flags.
pub struct Ctx {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub formats: Vec<ReportFormat>,
    pub config: Option<LoadedConfig>,
    pub digest: String,
}

impl Ctx {
    fn seed(&self, command: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| anyhow!("{command} samples data and needs an explicit --seed"))
    }

    fn config(&self, command: &str) -> Result<&LoadedConfig> {
        self.config
            .as_ref()
            .ok_or_else(|| anyhow!("{command} needs --config"))
    }

    fn registry(&self, flag: Option<&Path>) -> Result<Registry> {
        let path = match (flag, &self.config) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(c)) => c.resolve(&c.config.registry),
            (None, None) => bail!("no registry: pass --registry or --config"),
        };
        Registry::load(&path).context("stage registry")
    }

    fn metrics(&self) -> MetricOptions {
        self.config.as_ref().map(LoadedConfig::metrics).unwrap_or_default()
    }

    fn detectors(&self) -> DetectorConfig {
        self.config.as_ref().map(LoadedConfig::detectors).unwrap_or_default()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    /// Writes text with a leading `# config sha256` line.
    fn write_tsv(&self, name: &str, body: &str) -> Result<String> {
        let text = format!("# config sha256 {}\n{body}", self.digest);
        write_file(&self.path(name), text.as_bytes())?;
        Ok(sha256_hex(text.as_bytes()))
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<String> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        write_file(&self.path(name), text.as_bytes())?;
        Ok(sha256_hex(text.as_bytes()))
    }

    fn emit(&self, mut report: Report, stem: &str) -> Result<()> {
        report.config_digest = Some(self.digest.clone());
        emit_report(&report, &self.formats, &self.out, stem)?;
        Ok(())
    }
}

fn code(s: &str) -> Result<LanguageCode> {
    s.parse().map_err(|e: mfti_core::Error| anyhow!(e))
}

// ---------------------------------------------------------------- prepare

#[derive(Serialize)]
struct CorpusStats {
    path: String,
    pair: String,
    loaded: usize,
    malformed: usize,
    after_filter: usize,
    after_selection: usize,
    included: bool,
}

#[derive(Serialize)]
struct PrepareManifest {
    config_digest: String,
    quality_filter: Option<QualityFilter>,
    sample: Option<crate::config::SampleConfig>,
    partition: Option<String>,
    corpora: Vec<CorpusStats>,
    monolingual_lines: BTreeMap<String, usize>,
    training: TrainingManifest,
}

pub fn prepare(ctx: &Ctx) -> Result<()> {
    let seed = ctx.seed("prepare")?;
    let lc = ctx.config("prepare")?;
    let cfg = &lc.config;
    if cfg.corpora.is_empty() {
        bail!("stage validate: config lists no corpora");
    }
    let reg = ctx.registry(None)?;
    let templates = match &cfg.templates {
        Some(p) => Templates::load(&lc.resolve(p)).context("stage templates")?,
        None => Templates::default(),
    };
    let partition = cfg
        .partition
        .as_ref()
        .map(|p| PartitionSpec::load(&reg, &lc.resolve(p)))
        .transpose()
        .context("stage partition")?;
    let opts = LoadOptions { max_malformed_fraction: cfg.max_malformed_fraction };

    let mut instances: Vec<InstructionInstance> = Vec::new();
    let mut stats = Vec::new();
    let mut seen_pairs = BTreeSet::new();
    for entry in &cfg.corpora {
        let (src, tgt) = (code(&entry.src)?, code(&entry.tgt)?);
        reg.check(&src).and(reg.check(&tgt)).with_context(|| format!("stage validate: corpus {}", entry.path.display()))?;
        let pair = LanguagePair::new(src.clone(), tgt.clone());
        let path = lc.resolve(&entry.path);
        let corpus = load_corpus(&path, entry.format, &src, &tgt, opts)
            .with_context(|| format!("stage load_corpus: {}", entry.path.display()))?;
        let filtered = match cfg.quality_filter {
            Some(f) => filter_by_quality(&corpus, f)
                .with_context(|| format!("stage filter_by_quality: {}", entry.path.display()))?,
            None => corpus.clone(),
        };
        let selected = match cfg.sample {
            Some(s) => select_per_pair(&filtered, s.per_pair, s.strategy, seed)
                .with_context(|| format!("stage sample_per_pair: {}", entry.path.display()))?,
            None => filtered.clone(),
        };
        let included = partition.as_ref().is_none_or(|p| p.train_pairs.contains(&pair));
        if included {
            seen_pairs.insert(pair.clone());
            for s in &selected.pairs {
                instances.push(
                    render_translation_instruction(s, &reg, &templates)
                        .with_context(|| format!("stage render: {}", entry.path.display()))?,
                );
            }
        }
        stats.push(CorpusStats {
            path: entry.path.display().to_string(),
            pair: pair.to_string(),
            loaded: corpus.len(),
            malformed: corpus.malformed.len(),
            after_filter: filtered.len(),
            after_selection: selected.len(),
            included,
        });
    }
    if let Some(p) = &partition {
        if let Some(missing) = p.train_pairs.iter().find(|tp| !seen_pairs.contains(*tp)) {
            bail!("stage partition: training pair {missing} has no corpus");
        }
    }

    let mut monolingual_lines = BTreeMap::new();
    for entry in &cfg.monolingual {
        let lang = code(&entry.lang)?;
        let path = lc.resolve(&entry.path);
        let lines = read_lines(&path).with_context(|| format!("stage load_monolingual: {}", entry.path.display()))?;
        for (_, line) in &lines {
            instances.push(
                render_monolingual_instruction(&lang, line, &reg, &templates)
                    .with_context(|| format!("stage render: {}", entry.path.display()))?,
            );
        }
        *monolingual_lines.entry(lang.to_string()).or_insert(0) += lines.len();
    }

    let training = build_training_file(&instances, seed, &ctx.path("train.txt")).context("stage build_training_file")?;
    ctx.write_json(
        "manifest.json",
        &PrepareManifest {
            config_digest: ctx.digest.clone(),
            quality_filter: cfg.quality_filter,
            sample: cfg.sample,
            partition: partition.as_ref().map(|p| p.name.clone()),
            corpora: stats,
            monolingual_lines,
            training,
        },
    )?;
    Ok(())
}

// ---------------------------------------------------------- filter-quality

pub fn filter_quality(ctx: &Ctx, a: &FilterArgs) -> Result<()> {
    let (src, tgt) = (code(&a.src)?, code(&a.tgt)?);
    let format: CorpusFormat = a.input_format.parse()?;
    let mode = match (a.threshold, a.top_k, a.bottom_k) {
        (Some(t), None, None) => QualityFilter::Threshold { t },
        (None, Some(k), None) => QualityFilter::TopK { k },
        (None, None, Some(k)) => QualityFilter::BottomK { k },
        _ => bail!("give exactly one of --threshold, --top-k, --bottom-k"),
    };
    let opts = LoadOptions { max_malformed_fraction: a.max_malformed };
    let corpus = load_corpus(&a.input, format, &src, &tgt, opts).context("stage load_corpus")?;
    let kept = filter_by_quality(&corpus, mode).context("stage filter_by_quality")?;
    let ext = match format {
        CorpusFormat::Jsonl => "jsonl",
        _ => "tsv",
    };
    let text = serialize_corpus(&kept, format)?;
    let name = format!("filtered.{ext}");
    write_file(&ctx.path(&name), text.as_bytes())?;
    ctx.write_json(
        "filter_manifest.json",
        &serde_json::json!({
            "config_digest": ctx.digest,
            "mode": mode,
            "input_lines": corpus.len(),
            "malformed": corpus.malformed.len(),
            "kept": kept.len(),
            "output": name,
            "digest": sha256_hex(text.as_bytes()),
        }),
    )?;
    Ok(())
}

// ---------------------------------------------------------------- make-icl

#[derive(Serialize)]
struct IclLine<'a> {
    index: usize,
    seed: u64,
    query: &'a str,
    demonstrations: &'a [(String, String)],
    rendered: &'a str,
}

pub fn make_icl(ctx: &Ctx, a: &IclArgs) -> Result<()> {
    let seed = ctx.seed("make-icl")?;
    let (src, tgt) = (code(&a.src)?, code(&a.tgt)?);
    let format: CorpusFormat = a.demos_format.parse()?;
    let demos = load_corpus(&a.demos, format, &src, &tgt, LoadOptions::default()).context("stage load_demos")?;
    let queries = read_lines(&a.queries).context("stage load_queries")?;
    if queries.is_empty() {
        bail!("stage load_queries: no queries in {}", a.queries.display());
    }
    let mut out = String::new();
    for (i, (_, q)) in queries.iter().enumerate() {
        // one stream per query so that adding queries keeps earlier prompts
        let s = seed.wrapping_add(i as u64);
        let p = build_icl_prompt(&demos.pairs, q, a.k, s).with_context(|| format!("stage build_icl_prompt: query {i}"))?;
        out.push_str(&serde_json::to_string(&IclLine {
            index: i,
            seed: s,
            query: &p.query_src,
            demonstrations: &p.demonstrations,
            rendered: &p.rendered,
        })?);
        out.push('\n');
    }
    write_file(&ctx.path("icl_prompts.jsonl"), out.as_bytes())?;
    ctx.write_json(
        "icl_manifest.json",
        &serde_json::json!({
            "config_digest": ctx.digest,
            "seed": seed,
            "k": a.k,
            "pair": format!("{src}-{tgt}"),
            "queries": queries.len(),
            "digest": sha256_hex(out.as_bytes()),
        }),
    )?;
    Ok(())
}

// --------------------------------------------------------------- partition

pub fn partition(ctx: &Ctx, a: &PartitionArgs) -> Result<()> {
    let reg = ctx.registry(a.registry.as_deref())?;
    let path = match (&a.spec, &ctx.config) {
        (Some(p), _) => p.clone(),
        (None, Some(c)) => c
            .config
            .partition
            .as_ref()
            .map(|p| c.resolve(p))
            .ok_or_else(|| anyhow!("config has no partition"))?,
        (None, None) => bail!("no partition: pass --spec or --config"),
    };
    let spec = PartitionSpec::load(&reg, &path).context("stage partition")?;
    let matrix = condition_matrix_tsv(&spec, &reg)?;
    print!("{matrix}");
    ctx.write_tsv("condition_matrix.tsv", &matrix)?;
    let counts = condition_counts(&spec, &reg)?;
    let mut t = Table::new("condition_counts", &format!("partition:{}", spec.name), &["condition", "directions"]);
    for c in Condition::ALL {
        t.push(vec![c.as_str().into(), counts.get(&c).copied().unwrap_or(0).into()])?;
    }
    ctx.emit(Report { title: format!("partition {}", spec.name), config_digest: None, tables: vec![t] }, "partition")
}

// ------------------------------------------------------- evaluate / detect

#[derive(Deserialize)]
struct RefLine {
    id: String,
    #[serde(rename = "ref")]
    reference: String,
}

/// Replaces references by id; the two files must cover the same ids.
fn apply_refs(records: &mut [TranslationRecord], path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut refs = BTreeMap::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let r: RefLine = serde_json::from_str(line).with_context(|| format!("{}:{}", path.display(), i + 1))?;
        if refs.insert(r.id.clone(), r.reference).is_some() {
            bail!("{}:{}: duplicate id {:?}", path.display(), i + 1, r.id);
        }
    }
    let ids: BTreeSet<&String> = records.iter().map(|r| &r.id).collect();
    if let Some(extra) = refs.keys().find(|k| !ids.contains(k)) {
        return Err(mfti_core::Error::IdMismatch(format!("reference id {extra:?} has no hypothesis")).into());
    }
    for r in records.iter_mut() {
        r.reference = refs
            .remove(&r.id)
            .ok_or_else(|| mfti_core::Error::IdMismatch(format!("hypothesis id {:?} has no reference", r.id)))?;
    }
    Ok(())
}

fn langid_model(ctx: &Ctx, reg: &Registry, model: Option<&Path>, train: Option<&Path>) -> Result<Option<LangIdModel>> {
    let train_from = |dir: &Path, cfg: &LangIdConfig| -> Result<LangIdModel> {
        let mono = load_training_dir(reg, dir)?;
        Ok(train_profiles(reg, &mono, cfg)?)
    };
    let m = match (model, train, ctx.config.as_ref().and_then(|c| c.config.langid.as_ref().map(|l| (c, l)))) {
        (Some(p), _, _) => Some(LangIdModel::load(p)?),
        (None, Some(d), _) => Some(train_from(d, &LangIdConfig::default())?),
        (None, None, Some((c, l))) => match (&l.model, &l.train_dir) {
            (Some(p), _) => Some(LangIdModel::load(&c.resolve(p))?),
            (None, Some(d)) => Some(train_from(&c.resolve(d), &l.config)?),
            (None, None) => None,
        },
        (None, None, None) => None,
    };
    Ok(m)
}

struct Prepared {
    reg: Registry,
    records: Vec<TranslationRecord>,
    model: Option<LangIdModel>,
    labels: Option<BTreeMap<String, LanguageCode>>,
}

fn load_for_detection(ctx: &Ctx, a: &DetectArgs) -> Result<Prepared> {
    let reg = ctx.registry(a.registry.as_deref())?;
    let mut records = load_records(&a.results, &reg).context("stage load_records")?;
    if let Some(refs) = &a.refs {
        apply_refs(&mut records, refs).context("stage align_refs")?;
    }
    let ids: BTreeSet<String> = records.iter().map(|r| r.id.clone()).collect();
    let labels = a
        .labels
        .as_ref()
        .map(|p| load_external_labels(p, &reg, Some(&ids)))
        .transpose()
        .context("stage load_labels")?;
    let model = langid_model(ctx, &reg, a.langid_model.as_deref(), a.langid_train.as_deref()).context("stage langid")?;
    if model.is_none() && labels.as_ref().is_none_or(|l| l.len() < ids.len()) {
        bail!("stage langid: off-target detection needs a language-id model or a label for every record");
    }
    Ok(Prepared { reg, records, model, labels })
}

#[derive(Serialize)]
struct ErrorsOut<'a> {
    config_digest: &'a str,
    report: &'a ErrorReport,
}

fn write_errors(ctx: &Ctx, p: &Prepared, files: &mut BTreeMap<String, String>) -> Result<ErrorReport> {
    let lid = LidSource { model: p.model.as_ref(), external: p.labels.as_ref() };
    let report = build_error_report(&p.records, &ctx.detectors(), lid).context("stage detect_errors")?;
    files.insert(
        "errors.json".into(),
        ctx.write_json("errors.json", &ErrorsOut { config_digest: &ctx.digest, report: &report })?,
    );
    files.insert("errors.tsv".into(), ctx.write_tsv("errors.tsv", &error_summary_tsv(&report))?);
    Ok(report)
}

fn write_run_manifest(ctx: &Ctx, name: &str, n: usize, files: BTreeMap<String, String>) -> Result<()> {
    ctx.write_json(
        name,
        &serde_json::json!({ "config_digest": ctx.digest, "n_records": n, "files": files }),
    )?;
    Ok(())
}

pub fn evaluate(ctx: &Ctx, a: &EvaluateArgs) -> Result<()> {
    let p = load_for_detection(ctx, &a.detect)?;
    let opts = ctx.metrics();
    let scored = score_records(p.reg.codes(), &p.records, &opts).context("stage score")?;
    let mut files = BTreeMap::new();
    let sig = signature(opts.tokenizer, opts.corpus_smoothing);
    let grid = format!("# {sig}\n{}", scored.grid.to_tsv(2));
    files.insert("bleu_grid.tsv".into(), ctx.write_tsv("bleu_grid.tsv", &grid)?);
    files.insert(
        "bleu_details.json".into(),
        ctx.write_json(
            "bleu_details.json",
            &serde_json::json!({
                "config_digest": ctx.digest,
                "metrics": opts,
                "details": scored.details,
            }),
        )?,
    );
    write_errors(ctx, &p, &mut files)?;
    write_run_manifest(ctx, "evaluate_manifest.json", p.records.len(), files)
}

pub fn detect_errors(ctx: &Ctx, a: &DetectArgs) -> Result<()> {
    let p = load_for_detection(ctx, a)?;
    let mut files = BTreeMap::new();
    write_errors(ctx, &p, &mut files)?;
    write_run_manifest(ctx, "detect_manifest.json", p.records.len(), files)
}

// -------------------------------------------------------------- pivot-gain

fn grid_table(name: &str, sig: &str, grids: &[(&str, &ScoreGrid)]) -> Result<Table> {
    let mut cols = vec!["direction"];
    cols.extend(grids.iter().map(|(n, _)| *n));
    let mut t = Table::new(name, sig, &cols);
    let mut dirs = BTreeSet::new();
    for (_, g) in grids {
        dirs.extend(g.cells.keys().cloned());
    }
    for d in dirs {
        let mut row: Vec<Cell> = vec![d.to_string().into()];
        row.extend(grids.iter().map(|(_, g)| Cell::from(g.get(&d))));
        t.push(row)?;
    }
    Ok(t)
}

pub fn pivot(ctx: &Ctx, a: &PivotArgs) -> Result<()> {
    let (direct, pivot, sig) = match (&a.direct_grid, &a.pivot_grid, &a.direct, &a.leg1, &a.leg2) {
        (Some(dg), Some(pg), None, None, None) => {
            let d = ScoreGrid::load(dg).context("stage load_grid")?;
            let p = ScoreGrid::load(pg).context("stage load_grid")?;
            (d, p, "precomputed grids".to_string())
        }
        (None, None, Some(d), Some(l1), Some(l2)) => {
            let reg = ctx.registry(a.registry.as_deref())?;
            let pivot_lang = code(a.pivot.as_deref().unwrap_or("en"))?;
            let load = |p: &Path| load_records(p, &reg).context("stage load_records");
            let opts = ctx.metrics();
            let g = pivot_gain(reg.codes(), &load(d)?, &load(l1)?, &load(l2)?, &pivot_lang, &opts)
                .context("stage pivot_gain")?;
            (g.direct, g.pivot, signature(opts.tokenizer, opts.corpus_smoothing))
        }
        _ => bail!("give either --direct-grid and --pivot-grid, or --direct, --leg1 and --leg2"),
    };
    let delta = grid_gain(&direct, &pivot).context("stage grid_gain")?;
    ctx.write_tsv("pivot_delta.tsv", &delta.to_tsv(2))?;
    let mut summary = Table::new("summary", &sig, &["quantity", "value"]);
    summary.push(vec!["directions".into(), delta.len().into()])?;
    summary.push(vec!["mean_direct".into(), direct.overall_mean().ok().into()])?;
    summary.push(vec!["mean_pivot".into(), pivot.overall_mean().ok().into()])?;
    summary.push(vec!["mean_delta".into(), delta.overall_mean().ok().into()])?;
    let improved = delta.cells.values().filter(|&&v| v > 0.0).count();
    summary.push(vec!["pivot_better".into(), improved.into()])?;
    let cells = grid_table("per_direction", &sig, &[("direct", &direct), ("pivot", &pivot), ("delta", &delta)])?;
    ctx.emit(Report { title: "pivot gain".into(), config_digest: None, tables: vec![summary, cells] }, "pivot_gain")
}

// --------------------------------------------------------------- correlate

fn named_path(s: &str) -> Result<(String, PathBuf)> {
    let (n, p) = s.split_once('=').ok_or_else(|| anyhow!("expected name=path, got {s:?}"))?;
    Ok((n.to_string(), PathBuf::from(p)))
}

pub fn correlate(ctx: &Ctx, a: &CorrelateArgs) -> Result<()> {
    let grid = ScoreGrid::load(&a.grid).context("stage load_grid")?;
    let mut factors: Vec<(String, BTreeMap<LanguageCode, f64>)> = Vec::new();
    if let Some(f) = &a.features {
        let set = FeatureSet::load(f).context("stage load_features")?;
        let cats: Vec<FeatureCategory> = if a.categories.is_empty() {
            FeatureCategory::ALL.to_vec()
        } else {
            a.categories.iter().map(|c| c.parse()).collect::<mfti_core::Result<_>>()?
        };
        for c in cats {
            factors.push((c.to_string(), similarity_factors(&set, c, &grid.langs).context("stage similarity")?));
        }
    }
    for spec in &a.factors {
        let (name, path) = named_path(spec)?;
        factors.push((name, load_factors(&path).context("stage load_factors")?));
    }
    if factors.is_empty() {
        bail!("nothing to correlate: pass --features and/or --factors");
    }
    let sides: Vec<Side> = match a.side.as_deref() {
        None | Some("both") => vec![Side::ToX, Side::FromX],
        Some(s) => vec![s.parse()?],
    };
    let mut t = Table::new("spearman", "spearman(avg-rank pearson)", &["factor", "side", "rho", "n_languages"]);
    for side in sides {
        for (name, f) in &factors {
            let c = correlate_factors(&grid, f, side).with_context(|| format!("stage correlate: {name}"))?;
            t.push(vec![name.clone().into(), side.to_string().into(), c.rho.into(), c.languages.len().into()])?;
        }
    }
    ctx.emit(Report { title: "factor correlations".into(), config_digest: None, tables: vec![t] }, "correlations")
}

// ------------------------------------------------------------- scaling-fit

pub fn scaling_fit(ctx: &Ctx, a: &ScalingArgs) -> Result<()> {
    let (mut ns, mut ys) = (Vec::new(), Vec::new());
    for (lineno, line) in read_lines(&a.points).context("stage load_points")? {
        let f: Vec<&str> = line.split('\t').collect();
        let parse = |s: &str| s.trim().parse::<f64>().ok();
        match (f.as_slice(), f.first().and_then(|s| parse(s))) {
            ([n, y], Some(_)) | ([_, n, y], _) => {
                let (n, y) = parse(n)
                    .zip(parse(y))
                    .ok_or_else(|| anyhow!("{}:{lineno}: expected numbers", a.points.display()))?;
                ns.push(n);
                ys.push(y);
            }
            _ => bail!("{}:{lineno}: expected n<TAB>score", a.points.display()),
        }
    }
    let fit = loglinear_fit(&ns, &ys).context("stage loglinear_fit")?;
    let sig = "score = intercept + slope * ln(n)";
    let mut coef = Table::new("fit", sig, &["quantity", "value"]);
    coef.push(vec!["slope".into(), fit.slope.into()])?;
    coef.push(vec!["intercept".into(), fit.intercept.into()])?;
    coef.push(vec!["points".into(), ns.len().into()])?;
    let mut pts = Table::new("points", sig, &["n", "observed", "fitted"]);
    for (n, y) in ns.iter().zip(&ys) {
        pts.push(vec![(*n).into(), (*y).into(), fit.predict(*n).into()])?;
    }
    for n in &a.predict {
        pts.push(vec![(*n).into(), Cell::Missing(()), fit.predict(*n).into()])?;
    }
    ctx.emit(Report { title: "log-linear scaling fit".into(), config_digest: None, tables: vec![coef, pts] }, "scaling_fit")
}

// ------------------------------------------------------------------ report

#[derive(Deserialize)]
struct ErrorsIn {
    report: ErrorReport,
}

pub fn report(ctx: &Ctx, a: &ReportArgs) -> Result<()> {
    let grids: Vec<(String, ScoreGrid)> = a
        .grid
        .iter()
        .map(|s| {
            let (n, p) = named_path(s)?;
            Ok((n, ScoreGrid::load(&p).context("stage load_grid")?))
        })
        .collect::<Result<_>>()?;
    let mut tables = Vec::new();
    if !grids.is_empty() {
        let mut overall = Table::new("overall", "mean over present directions", &["grid", "directions", "mean"]);
        for (n, g) in &grids {
            overall.push(vec![n.clone().into(), g.len().into(), g.overall_mean().ok().into()])?;
        }
        tables.push(overall);
        let mut avg = Table::new("per_language", "mean over present directions", &["grid", "lang", "to_x", "from_x"]);
        for (n, g) in &grids {
            for (l, tf) in per_language_averages(g) {
                avg.push(vec![n.clone().into(), l.to_string().into(), tf.to_x.into(), tf.from_x.into()])?;
            }
        }
        tables.push(avg);
    }
    if let Some(spec_path) = &a.partition {
        let reg = ctx.registry(a.registry.as_deref())?;
        let spec = PartitionSpec::load(&reg, spec_path).context("stage partition")?;
        let mut t = Table::new("conditions", &format!("partition:{}", spec.name), &["grid", "condition", "mean", "n"]);
        for (n, g) in &grids {
            for (c, b) in bucket_by_condition(g, &spec).context("stage bucket_by_condition")? {
                t.push(vec![n.clone().into(), c.as_str().into(), b.mean.into(), b.n.into()])?;
            }
        }
        tables.push(t);
    }
    if !a.errors.is_empty() {
        let mut points: Vec<(String, usize, ErrorRatios)> = Vec::new();
        for s in &a.errors {
            let mut parts = s.splitn(3, '=');
            let (Some(name), Some(n), Some(path)) = (parts.next(), parts.next(), parts.next()) else {
                bail!("expected system=n_pairs=errors.json, got {s:?}");
            };
            let n: usize = n.parse().with_context(|| format!("bad pair count in {s:?}"))?;
            let e: ErrorsIn = textio::read_json(Path::new(path)).context("stage load_errors")?;
            points.push((name.to_string(), n, e.report.overall.ratios));
        }
        ctx.write_tsv("error_trend.tsv", &error_trend_tsv(&points))?;
    }
    if tables.is_empty() && a.errors.is_empty() {
        bail!("nothing to report: pass --grid and/or --errors");
    }
    if !tables.is_empty() {
        ctx.emit(Report { title: "analysis report".into(), config_digest: None, tables }, "report")?;
    }
    Ok(())
}
