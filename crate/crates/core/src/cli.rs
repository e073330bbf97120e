//! The `capkit` command line.
//!
//! Exit codes: 0 on success, 1 when inputs fail validation, 2 on usage
//! errors. `CAPKIT_THREADS` caps the worker pool (0 or unset = automatic).

use std::collections::{BTreeMap, HashMap};
use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{coords_csv, scatter_svg, separation_report, tsne, LabeledPoints, TsneConfig};
use crate::augment::grid::{grid_plans, Grid};
use crate::augment::{apply_plan, AugmentationPlan};
use crate::cleanse::{
    apply_corrections, caption_count, error_stats, human_performance, validate_records, AnnotationRecord,
};
use crate::corpus::{read_jsonl, to_jsonl, CandidateLine, CorpusEntry, ReferenceLine};
use crate::features::{read_features, stub_extract, write_features, FeatureSequence, VideoFrames, DEFAULT_STRIDE};
use crate::metrics::{cider_corpus, evaluate, meteor, rouge_l, MetricConfig, ScoredPair, SynonymTable};
use crate::seq2seq::{load_checkpoint, save_checkpoint, sgd_train, Seq2SeqParams, TrainConfig, DEFAULT_MAX_LEN};
use crate::text::{build_vocab, load_embeddings, tokenize, EmbeddingTable, TokenizedSentence};

pub const THREADS_ENV: &str = "CAPKIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "capkit", version, about = "Video-captioning toolkit")]
struct Cli {
    /// JSON file with default values for options not given on the command line
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score candidate captions against references (BLEU-4, ROUGE-L, METEOR, CIDEr)
    Score(ScoreArgs),
    /// Write the built-in augmentation plans, or apply them to a video
    Augment(AugmentArgs),
    /// Train the captioner
    Train(TrainArgs),
    /// Greedy-decode captions for every feature file in a directory
    Decode(DecodeArgs),
    /// t-SNE embedding and per-label neighbor purity of feature sets
    Tsne(TsneArgs),
    /// Error statistics and validation of an annotation file
    CleanseStats(CleanseStatsArgs),
    /// Apply validated corrections to a corpus
    CleanseApply(CleanseApplyArgs),
    /// Human performance: each caption scored against the others, per round
    HumanPerf(HumanPerfArgs),
    /// Stub feature extraction from PPM frame directories
    FeaturesExtract(FeaturesArgs),
}

#[derive(Debug, Args)]
struct MetricArgs {
    /// Synonym file for METEOR (one whitespace-separated group per line)
    #[arg(long)]
    synonyms: Option<PathBuf>,
    /// Disable the METEOR stemming stage
    #[arg(long)]
    no_stem: bool,
    /// Add-half smoothing of zero BLEU precisions
    #[arg(long)]
    bleu_smoothing: bool,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// JSONL of {"video_id", "caption"}
    #[arg(long)]
    cand: PathBuf,
    /// JSONL of {"video_id", "captions": [...]}
    #[arg(long)]
    refs: PathBuf,
    /// Also report sentence-level ROUGE-L, METEOR and CIDEr per video
    #[arg(long)]
    per_video: bool,
    #[command(flatten)]
    metric: MetricArgs,
}

#[derive(Debug, Args)]
struct AugmentArgs {
    /// Built-in grid: train or test-only
    #[arg(long, conflicts_with = "plan")]
    grid: Option<Grid>,
    /// A single plan file (JSON list of transforms)
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Directory of PPM frames to transform
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Seed of the salt-and-pepper noise
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Directory of <video_id>.ften feature files
    #[arg(long)]
    features: PathBuf,
    /// Training corpus JSONL ({"video_id", "captions"})
    #[arg(long)]
    captions: PathBuf,
    /// Validation corpus JSONL
    #[arg(long)]
    val_captions: PathBuf,
    /// Checkpoint to write
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    max_epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    hidden: Option<usize>,
    /// Word-vector text file; words missing from it get seeded random vectors
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Embedding size when no embedding file is given
    #[arg(long)]
    embed_dim: Option<usize>,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    #[arg(long)]
    model: PathBuf,
    /// Directory of .ften feature files
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    max_len: Option<usize>,
}

#[derive(Debug, Args)]
struct TsneArgs {
    /// label=FILE pairs, one FTEN file per label; every vector is a point
    #[arg(long, num_args = 1.., required = true)]
    features: Vec<String>,
    #[arg(long)]
    perplexity: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Neighbors used for the purity report
    #[arg(long)]
    k: Option<usize>,
    /// CSV of label,x,y
    #[arg(long)]
    out: PathBuf,
    /// Optional SVG scatter plot
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CleanseStatsArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    annotations: PathBuf,
    /// Only count captions of this split
    #[arg(long)]
    split: Option<String>,
}

#[derive(Debug, Args)]
struct CleanseApplyArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    annotations: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct HumanPerfArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    rounds: Option<usize>,
    /// Split to evaluate; all videos when omitted
    #[arg(long)]
    split: Option<String>,
    #[command(flatten)]
    metric: MetricArgs,
}

#[derive(Debug, Args)]
struct FeaturesArgs {
    /// A directory of PPM frames, or a directory of such directories
    #[arg(long)]
    frames: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
}

/// Defaults read from `--config`. Command-line values win.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub synonyms: Option<PathBuf>,
    pub seed: Option<u64>,
    pub lr: Option<f64>,
    pub batch: Option<usize>,
    pub patience: Option<usize>,
    pub max_epochs: Option<usize>,
    pub hidden: Option<usize>,
    pub embed_dim: Option<usize>,
    pub embeddings: Option<PathBuf>,
    pub max_len: Option<usize>,
    pub perplexity: Option<f64>,
    pub iters: Option<usize>,
    pub k: Option<usize>,
    pub rounds: Option<usize>,
    pub stride: Option<usize>,
    pub dim: Option<usize>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Invalid(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Invalid(_) => 1,
        }
    }
}

fn invalid(e: impl Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn require(path: &Path) -> Result<(), CliError> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::Invalid(format!(
            "{}: no such file or directory",
            path.display()
        )))
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

/// Sizes the global worker pool from `CAPKIT_THREADS`.
pub fn configure_threads() {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    if threads > 0 {
        // fails only if a pool already exists, which is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

/// Runs the command line and returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    configure_threads();
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("usage error: {m}"),
                CliError::Invalid(m) => eprintln!("error: {m}"),
            }
            e.code()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => {
            require(path)?;
            let text = fs::read_to_string(path).map_err(invalid)?;
            serde_json::from_str::<CliConfig>(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?
        }
        None => CliConfig::default(),
    };
    match cli.command {
        Command::Score(a) => score(a, &config),
        Command::Augment(a) => augment(a, &config),
        Command::Train(a) => train(a, &config),
        Command::Decode(a) => decode(a, &config),
        Command::Tsne(a) => tsne_cmd(a, &config),
        Command::CleanseStats(a) => cleanse_stats(a),
        Command::CleanseApply(a) => cleanse_apply(a),
        Command::HumanPerf(a) => human_perf(a, &config),
        Command::FeaturesExtract(a) => features_extract(a, &config),
    }
}

fn metric_config(args: &MetricArgs, config: &CliConfig) -> Result<MetricConfig, CliError> {
    let synonyms = match args.synonyms.as_ref().or(config.synonyms.as_ref()) {
        Some(path) => {
            require(path)?;
            Some(SynonymTable::load(path).map_err(invalid)?)
        }
        None => None,
    };
    Ok(MetricConfig {
        bleu_smoothing: args.bleu_smoothing,
        meteor_stem: !args.no_stem,
        synonyms,
        ..MetricConfig::default()
    })
}

fn tokenize_all(captions: &[String], video_id: &str) -> Result<Vec<TokenizedSentence>, CliError> {
    captions
        .iter()
        .map(|c| tokenize(c, false).map_err(|e| invalid(format!("video {video_id}: {e}"))))
        .collect()
}

#[derive(Serialize)]
struct VideoScore {
    video_id: String,
    rouge_l: f64,
    meteor: f64,
    cider: f64,
}

#[derive(Serialize)]
struct ScoreOutput {
    videos: usize,
    #[serde(flatten)]
    report: crate::metrics::MetricReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_video: Option<Vec<VideoScore>>,
}

fn score(args: ScoreArgs, config: &CliConfig) -> Result<(), CliError> {
    require(&args.cand)?;
    require(&args.refs)?;
    let metric = metric_config(&args.metric, config)?;
    let cands: Vec<CandidateLine> = read_jsonl(&args.cand).map_err(invalid)?;
    let refs: Vec<ReferenceLine> = read_jsonl(&args.refs).map_err(invalid)?;
    let mut by_video: HashMap<&str, &ReferenceLine> = HashMap::new();
    for r in &refs {
        if by_video.insert(&r.video_id, r).is_some() {
            return Err(invalid(format!("video {} has two reference lines", r.video_id)));
        }
    }
    let mut seen = HashMap::new();
    let mut pairs = Vec::with_capacity(cands.len());
    for c in &cands {
        if seen.insert(c.video_id.as_str(), ()).is_some() {
            return Err(invalid(format!("video {} has two candidates", c.video_id)));
        }
        let r = by_video
            .get(c.video_id.as_str())
            .ok_or_else(|| invalid(format!("video {} has no references", c.video_id)))?;
        let cand = tokenize(&c.caption, false).map_err(|e| invalid(format!("video {}: {e}", c.video_id)))?;
        let references = tokenize_all(&r.captions, &r.video_id)?;
        pairs.push(ScoredPair::new(c.video_id.clone(), cand, references).map_err(invalid)?);
    }
    let report = evaluate(&pairs, &metric).map_err(invalid)?;
    let per_video = args.per_video.then(|| {
        let opts = metric.meteor_options();
        let cider = cider_corpus(&pairs);
        pairs
            .iter()
            .zip(cider.per_video)
            .map(|(p, (_, c))| VideoScore {
                video_id: p.video_id().to_string(),
                rouge_l: rouge_l(p, metric.rouge_beta),
                meteor: meteor(p, &opts),
                cider: c,
            })
            .collect()
    });
    print_json(&ScoreOutput {
        videos: pairs.len(),
        report,
        per_video,
    });
    Ok(())
}

#[derive(Serialize)]
struct PlanEntry {
    label: String,
    path: String,
}

fn augment(args: AugmentArgs, config: &CliConfig) -> Result<(), CliError> {
    let seed = args.seed.or(config.seed).unwrap_or(0);
    let plans = match (&args.grid, &args.plan) {
        (Some(grid), None) => grid_plans(*grid, seed),
        (None, Some(path)) => {
            require(path)?;
            let text = fs::read_to_string(path).map_err(invalid)?;
            vec![AugmentationPlan::from_json(&text).map_err(invalid)?]
        }
        _ => return Err(CliError::Usage("give exactly one of --grid or --plan".into())),
    };
    for plan in &plans {
        plan.validate().map_err(invalid)?;
    }
    let video = match &args.input {
        Some(dir) => {
            require(dir)?;
            Some(VideoFrames::read_dir(dir).map_err(invalid)?)
        }
        None => None,
    };
    fs::create_dir_all(&args.out).map_err(invalid)?;
    let mut written = Vec::with_capacity(plans.len());
    for plan in &plans {
        let label = plan.label();
        let path = match &video {
            None => {
                let path = args.out.join(format!("{label}.json"));
                fs::write(&path, plan.to_json() + "\n").map_err(invalid)?;
                path
            }
            Some(v) => {
                let path = args.out.join(&label);
                apply_plan(v, plan)
                    .map_err(invalid)?
                    .write_dir(&path)
                    .map_err(invalid)?;
                path
            }
        };
        written.push(PlanEntry {
            label,
            path: path.display().to_string(),
        });
    }
    print_json(&written);
    Ok(())
}

/// `.ften` files of a directory keyed by file stem, in name order.
fn read_feature_dir(dir: &Path) -> Result<BTreeMap<String, FeatureSequence>, CliError> {
    require(dir)?;
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(invalid)? {
        let path = entry.map_err(invalid)?.path();
        if path.extension().is_some_and(|e| e == "ften") {
            let seq = read_features(&path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
            out.insert(seq.video_id().to_string(), seq);
        }
    }
    if out.is_empty() {
        return Err(invalid(format!("{}: no .ften feature files", dir.display())));
    }
    Ok(out)
}

fn features_for<'a>(
    features: &'a BTreeMap<String, FeatureSequence>,
    video_id: &str,
) -> Result<&'a FeatureSequence, CliError> {
    features
        .get(video_id)
        .ok_or_else(|| invalid(format!("no features for video {video_id}")))
}

fn train(args: TrainArgs, config: &CliConfig) -> Result<(), CliError> {
    require(&args.captions)?;
    require(&args.val_captions)?;
    let features = read_feature_dir(&args.features)?;
    let train_corpus: Vec<CorpusEntry> = read_jsonl(&args.captions).map_err(invalid)?;
    let val_corpus: Vec<CorpusEntry> = read_jsonl(&args.val_captions).map_err(invalid)?;

    let mut train_set = Vec::new();
    for e in &train_corpus {
        let feats = features_for(&features, &e.video_id)?;
        for c in tokenize_all(&e.captions, &e.video_id)? {
            train_set.push((feats.clone(), c));
        }
    }
    if train_set.is_empty() {
        return Err(invalid("training corpus has no captions"));
    }
    let mut val_set = Vec::new();
    for e in &val_corpus {
        let refs = tokenize_all(&e.captions, &e.video_id)?;
        if !refs.is_empty() {
            val_set.push((features_for(&features, &e.video_id)?.clone(), refs));
        }
    }

    let seed = args.seed.or(config.seed).unwrap_or(0);
    let tagged: Vec<TokenizedSentence> = train_set.iter().map(|(_, c)| c.tagged()).collect();
    let vocab = build_vocab(&tagged);
    let embed_dim = args.embed_dim.or(config.embed_dim).unwrap_or(32);
    let embeddings = match args.embeddings.as_ref().or(config.embeddings.as_ref()) {
        Some(path) => {
            require(path)?;
            load_embeddings(path, &vocab, seed, embed_dim).map_err(invalid)?
        }
        None => EmbeddingTable::random(&vocab, embed_dim, seed),
    };
    let feature_dim = train_set[0].0.dim();
    let hidden = args.hidden.or(config.hidden).unwrap_or(32);
    if hidden == 0 {
        return Err(invalid("--hidden must be positive"));
    }
    let params = Seq2SeqParams::init(vocab, embeddings, feature_dim, hidden, seed);
    let defaults = TrainConfig::default();
    let train_config = TrainConfig {
        lr: args.lr.or(config.lr).unwrap_or(defaults.lr),
        batch_size: args.batch.or(config.batch).unwrap_or(defaults.batch_size),
        patience: args.patience.or(config.patience).unwrap_or(defaults.patience),
        max_epochs: args.max_epochs.or(config.max_epochs).unwrap_or(defaults.max_epochs),
        seed,
        max_decode_len: config.max_len.unwrap_or(DEFAULT_MAX_LEN),
        metric: MetricConfig::default(),
    };
    let (best, log) = sgd_train(params, &train_set, &val_set, &train_config).map_err(invalid)?;
    save_checkpoint(&args.out, &best).map_err(invalid)?;
    print_json(&log);
    Ok(())
}

fn decode(args: DecodeArgs, config: &CliConfig) -> Result<(), CliError> {
    require(&args.model)?;
    let model = load_checkpoint(&args.model).map_err(invalid)?;
    let features = read_feature_dir(&args.features)?;
    let max_len = args.max_len.or(config.max_len).unwrap_or(DEFAULT_MAX_LEN);
    if max_len == 0 {
        return Err(invalid("--max-len must be at least 1"));
    }
    let mut lines = Vec::with_capacity(features.len());
    for (id, feats) in &features {
        let caption = model.greedy_decode(feats, max_len).map_err(invalid)?;
        lines.push(CandidateLine {
            video_id: id.clone(),
            caption: caption.to_text(),
        });
    }
    print!("{}", to_jsonl(&lines));
    Ok(())
}

fn tsne_cmd(args: TsneArgs, config: &CliConfig) -> Result<(), CliError> {
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for spec in &args.features {
        let (label, file) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected label=FILE, got {spec:?}")))?;
        let path = Path::new(file);
        require(path)?;
        let seq = read_features(path).map_err(invalid)?;
        for v in seq.to_f64() {
            points.push(v);
            labels.push(label.to_string());
        }
    }
    let data = LabeledPoints::new(points, labels).map_err(invalid)?;
    let defaults = TsneConfig::default();
    let tsne_config = TsneConfig {
        perplexity: args.perplexity.or(config.perplexity).unwrap_or(defaults.perplexity),
        iters: args.iters.or(config.iters).unwrap_or(defaults.iters),
        seed: args.seed.or(config.seed).unwrap_or(0),
        ..defaults
    };
    let k = args.k.or(config.k).unwrap_or(10).min(data.len() - 1);
    let embedding = tsne(data.points(), &tsne_config).map_err(invalid)?;
    fs::write(&args.out, coords_csv(data.labels(), &embedding.coords)).map_err(invalid)?;
    if let Some(svg) = &args.svg {
        fs::write(svg, scatter_svg(&embedding.coords, data.labels())).map_err(invalid)?;
    }
    let report = separation_report(&data, k).map_err(invalid)?;
    print_json(&report);
    Ok(())
}

#[derive(Serialize)]
struct CleanseStatsOutput {
    #[serde(flatten)]
    stats: crate::cleanse::CleanseStats,
    violations: Vec<crate::cleanse::Violation>,
}

fn cleanse_stats(args: CleanseStatsArgs) -> Result<(), CliError> {
    require(&args.corpus)?;
    require(&args.annotations)?;
    let mut corpus: Vec<CorpusEntry> = read_jsonl(&args.corpus).map_err(invalid)?;
    let mut records: Vec<AnnotationRecord> = read_jsonl(&args.annotations).map_err(invalid)?;
    if let Some(split) = &args.split {
        corpus.retain(|e| &e.split == split);
        let ids: std::collections::HashSet<&str> = corpus.iter().map(|e| e.video_id.as_str()).collect();
        records.retain(|r| ids.contains(r.video_id.as_str()));
    }
    let violations = validate_records(&records, &corpus);
    let stats = error_stats(&records, caption_count(&corpus)).map_err(invalid)?;
    print_json(&CleanseStatsOutput { stats, violations });
    Ok(())
}

fn cleanse_apply(args: CleanseApplyArgs) -> Result<(), CliError> {
    require(&args.corpus)?;
    require(&args.annotations)?;
    let corpus: Vec<CorpusEntry> = read_jsonl(&args.corpus).map_err(invalid)?;
    let records: Vec<AnnotationRecord> = read_jsonl(&args.annotations).map_err(invalid)?;
    let fixed = apply_corrections(&corpus, &records).map_err(invalid)?;
    let changed: usize = corpus
        .iter()
        .zip(&fixed)
        .map(|(a, b)| a.captions.iter().zip(&b.captions).filter(|(x, y)| x != y).count())
        .sum();
    fs::write(&args.out, to_jsonl(&fixed)).map_err(invalid)?;
    print_json(&serde_json::json!({ "videos": fixed.len(), "captions_changed": changed }));
    Ok(())
}

fn human_perf(args: HumanPerfArgs, config: &CliConfig) -> Result<(), CliError> {
    require(&args.corpus)?;
    let metric = metric_config(&args.metric, config)?;
    let mut corpus: Vec<CorpusEntry> = read_jsonl(&args.corpus).map_err(invalid)?;
    if let Some(split) = &args.split {
        corpus.retain(|e| &e.split == split);
    }
    let rounds = args.rounds.or(config.rounds).unwrap_or(23);
    let result = human_performance(&corpus, rounds, &metric).map_err(invalid)?;
    print_json(&result);
    Ok(())
}

fn features_extract(args: FeaturesArgs, config: &CliConfig) -> Result<(), CliError> {
    require(&args.frames)?;
    let stride = args.stride.or(config.stride).unwrap_or(DEFAULT_STRIDE);
    let dim = args.dim.or(config.dim).unwrap_or(64);
    if stride == 0 || dim < 8 || !dim.is_multiple_of(4) {
        return Err(invalid(
            "--stride must be positive and --dim a multiple of 4 that is at least 8",
        ));
    }
    let has_frames = !crate::augment::ppm::frame_paths(&args.frames)
        .map_err(invalid)?
        .is_empty();
    let dirs: Vec<PathBuf> = if has_frames {
        vec![args.frames.clone()]
    } else {
        let mut d: Vec<PathBuf> = fs::read_dir(&args.frames)
            .map_err(invalid)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        d.sort();
        d
    };
    if dirs.is_empty() {
        return Err(invalid(format!("{}: no frames found", args.frames.display())));
    }
    fs::create_dir_all(&args.out).map_err(invalid)?;
    let mut written = Vec::new();
    for dir in dirs {
        let video = VideoFrames::read_dir(&dir).map_err(invalid)?;
        let seq = stub_extract(&video, stride, dim);
        let path = args.out.join(format!("{}.ften", video.video_id()));
        write_features(&path, &seq).map_err(invalid)?;
        written.push(serde_json::json!({
            "video_id": video.video_id(),
            "vectors": seq.len(),
            "dim": seq.dim(),
            "path": path.display().to_string(),
        }));
    }
    print_json(&written);
    Ok(())
}
