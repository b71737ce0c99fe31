//! `mfti`: prepare instruction data, score system outputs, and run the
//! cross-lingual analyses.
//!
//! Every command writes into `--out`. A `.failed` marker is created before
//! any output and removed only when the command succeeds.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use mfti_core::analysis::ReportFormat;
use mfti_core::textio::sha256_hex;

use commands::Ctx;
use config::LoadedConfig;

#[derive(Parser)]
#[command(name = "mfti", version, about = "Multilingual translation-instruction toolkit")]
struct Cli {
    /// Experiment config (JSON); relative paths resolve against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice. Required by sampling commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; defaults to the config's `output_dir`, else `out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report formats, comma separated: tsv, markdown, json.
    #[arg(long, global = true, value_delimiter = ',', default_value = "tsv")]
    format: Vec<ReportFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load, filter and sample corpora, then write the shuffled instruction file.
    Prepare,
    /// Keep sentence pairs by alignment score.
    FilterQuality(FilterArgs),
    /// Build k-shot prompts for a list of queries.
    MakeIcl(IclArgs),
    /// Validate a partition and print its condition matrix.
    Partition(PartitionArgs),
    /// BLEU grid plus error report for a results file.
    Evaluate(EvaluateArgs),
    /// Error report only.
    DetectErrors(DetectArgs),
    /// Direct versus pivot translation, per direction.
    PivotGain(PivotArgs),
    /// Spearman correlation of per-language averages with language factors.
    Correlate(CorrelateArgs),
    /// Fit score = a + b ln(n).
    ScalingFit(ScalingArgs),
    /// Averages, condition buckets and error trends across grids.
    Report(ReportArgs),
}

#[derive(Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "tsv-scored")]
    pub input_format: String,
    #[arg(long)]
    pub src: String,
    #[arg(long)]
    pub tgt: String,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub top_k: Option<usize>,
    #[arg(long)]
    pub bottom_k: Option<usize>,
    /// Share of malformed input lines tolerated before failing.
    #[arg(long, default_value_t = 0.10)]
    pub max_malformed: f64,
}

#[derive(Args)]
pub struct IclArgs {
    /// Demonstration pool.
    #[arg(long)]
    pub demos: PathBuf,
    #[arg(long, default_value = "tsv-pair")]
    pub demos_format: String,
    #[arg(long)]
    pub src: String,
    #[arg(long)]
    pub tgt: String,
    /// One source sentence per line.
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub k: usize,
}

#[derive(Args)]
pub struct PartitionArgs {
    #[arg(long)]
    pub registry: Option<PathBuf>,
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Args)]
pub struct DetectArgs {
    /// JSONL records: id, src_lang, tgt_lang, src, hyp, ref.
    #[arg(long)]
    pub results: PathBuf,
    /// JSONL `{id, ref}` lines replacing the references by id.
    #[arg(long)]
    pub refs: Option<PathBuf>,
    /// `id<TAB>lang` labels that override the language-id model.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub langid_model: Option<PathBuf>,
    /// Directory of `<code>.txt` files to train the language-id model from.
    #[arg(long)]
    pub langid_train: Option<PathBuf>,
    #[arg(long)]
    pub registry: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub detect: DetectArgs,
}

#[derive(Args)]
pub struct PivotArgs {
    #[arg(long)]
    pub direct_grid: Option<PathBuf>,
    #[arg(long)]
    pub pivot_grid: Option<PathBuf>,
    #[arg(long)]
    pub direct: Option<PathBuf>,
    #[arg(long)]
    pub leg1: Option<PathBuf>,
    #[arg(long)]
    pub leg2: Option<PathBuf>,
    /// Pivot language (default en).
    #[arg(long)]
    pub pivot: Option<String>,
    #[arg(long)]
    pub registry: Option<PathBuf>,
}

#[derive(Args)]
pub struct CorrelateArgs {
    #[arg(long)]
    pub grid: PathBuf,
    /// Typological feature table.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Feature categories to use (default: all).
    #[arg(long, value_delimiter = ',')]
    pub categories: Vec<String>,
    /// Extra per-language factors as name=path.
    #[arg(long)]
    pub factors: Vec<String>,
    /// to_x, from_x or both.
    #[arg(long)]
    pub side: Option<String>,
}

#[derive(Args)]
pub struct ScalingArgs {
    /// `n<TAB>score` or `label<TAB>n<TAB>score` lines.
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub predict: Vec<f64>,
}

#[derive(Args)]
pub struct ReportArgs {
    /// name=path of a score grid; repeatable.
    #[arg(long)]
    pub grid: Vec<String>,
    #[arg(long)]
    pub partition: Option<PathBuf>,
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// system=n_pairs=errors.json; repeatable.
    #[arg(long)]
    pub errors: Vec<String>,
}

/// Digest of the invocation when no config file is given: every argument
/// except the output directory, so reruns into a fresh directory match.
fn args_digest() -> String {
    let mut kept = Vec::new();
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        if a == "--out" {
            args.next();
        } else if !a.starts_with("--out=") {
            kept.push(a);
        }
    }
    sha256_hex(kept.join("\0").as_bytes())
}

fn run(cli: &Cli, ctx: &Ctx) -> Result<()> {
    match &cli.command {
        Command::Prepare => commands::prepare(ctx),
        Command::FilterQuality(a) => commands::filter_quality(ctx, a),
        Command::MakeIcl(a) => commands::make_icl(ctx, a),
        Command::Partition(a) => commands::partition(ctx, a),
        Command::Evaluate(a) => commands::evaluate(ctx, a),
        Command::DetectErrors(a) => commands::detect_errors(ctx, a),
        Command::PivotGain(a) => commands::pivot(ctx, a),
        Command::Correlate(a) => commands::correlate(ctx, a),
        Command::ScalingFit(a) => commands::scaling_fit(ctx, a),
        Command::Report(a) => commands::report(ctx, a),
    }
}

fn setup(cli: &Cli) -> Result<Ctx> {
    let config = cli.config.as_deref().map(LoadedConfig::load).transpose()?;
    let out = match (&cli.out, &config) {
        (Some(o), _) => o.clone(),
        (None, Some(c)) => c.config.output_dir.as_ref().map_or_else(|| PathBuf::from("out"), |o| c.resolve(o)),
        (None, None) => PathBuf::from("out"),
    };
    let digest = config.as_ref().map_or_else(args_digest, |c| c.digest.clone());
    Ok(Ctx { out, seed: cli.seed, formats: cli.format.clone(), config, digest })
}

fn write_marker(dir: &Path, text: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(dir.join(".failed"), text).with_context(|| format!("writing marker in {}", dir.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = match setup(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    if let Err(e) = write_marker(&ctx.out, "running\n") {
        eprintln!("error: {e:#}");
        return ExitCode::FAILURE;
    }
    match run(&cli, &ctx) {
        Ok(()) => match std::fs::remove_file(ctx.out.join(".failed")) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: removing failure marker: {e}");
                ExitCode::FAILURE
            }
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            let _ = write_marker(&ctx.out, &format!("{e:#}\n"));
            ExitCode::FAILURE
        }
    }
}
