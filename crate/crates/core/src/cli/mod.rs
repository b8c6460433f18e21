//! The `writeright` command line: one subcommand per pipeline stage.
//!
//! Exit codes: 0 on success, 1 on data errors (reported as `file:line:`
//! where a line is known), 2 on usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::align::{diff, Classifier};
use crate::corpus::{
    detect_noise, read_essays, read_m2, read_tree_file, tokenize, write_m2, AnnotatedSentence, EntitySubstituter, EssayRecord, IngestConfig, NamePool,
    NoiseConfig, ParseTree, TokenizedSentence,
};
use crate::corrector::{Backend, CorrectionResult};
use crate::features::NgramModel;
use crate::geceval::{score_m2, DEFAULT_BETA};
use crate::lexicon::Dictionary;
use crate::rubric;
use crate::scorer::{cross_prompt_eval, qwk, qwk_with_range, read_range_table, CrossPromptConfig, QwkScale, RangeTable, ScoreModel, TrainConfig, TrainingExample};
use crate::service::{Pipeline, Service, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "writeright", version, about = "Essay scoring and grammatical error correction")]
pub struct Cli {
    /// Seed for placeholder name assignment.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read an essay TSV and write one JSON record per essay.
    Ingest(IngestArgs),
    /// Replace anonymization placeholders with names and report encoding noise.
    Denoise(DenoiseArgs),
    /// Align parallel source/target sentence files and write M2.
    ExtractEdits(ExtractArgs),
    /// Score a hypothesis M2 file against gold M2 (precision, recall, F-beta).
    EvaluateGec(EvalGecArgs),
    /// Correct one sentence per line.
    Correct(CorrectArgs),
    /// Compute feature vectors for an essay TSV.
    Featurize(FeaturizeArgs),
    /// Train the n-gram language model used for fluency.
    TrainLm(TrainLmArgs),
    /// Train a rubric score model.
    TrainAwe(TrainAweArgs),
    /// Score essays with a trained model.
    Score(ScoreArgs),
    /// Quadratic weighted kappa between two rating files.
    EvalQwk(EvalQwkArgs),
    /// Leave-one-prompt-out evaluation over prompts 1-8.
    CrossPrompt(CrossPromptArgs),
    /// Run the submission service over HTTP.
    Serve(ServeArgs),
}

/// Models and resources, layered over an optional service config file.
#[derive(Debug, Clone, Args)]
pub struct ResourceArgs {
    /// Service config (TOML) supplying defaults for the options below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Rewrite rules, one `pattern => replacement` per line.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Word list with frequencies.
    #[arg(long)]
    pub dictionary: Option<PathBuf>,
    /// Language model checkpoint for the fluency feature.
    #[arg(long)]
    pub lm: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BackendArg {
    Rules,
    External,
}

impl ResourceArgs {
    fn service_config(&self) -> Result<ServiceConfig> {
        let mut cfg = match &self.config {
            Some(p) => ServiceConfig::load(p)?,
            None => ServiceConfig::default(),
        };
        if self.rules.is_some() {
            cfg.rules_path.clone_from(&self.rules);
        }
        if self.dictionary.is_some() {
            cfg.dictionary_path.clone_from(&self.dictionary);
        }
        if self.lm.is_some() {
            cfg.lm_path.clone_from(&self.lm);
        }
        match self.backend {
            Some(BackendArg::Rules) => cfg.backend = Backend::Rules,
            Some(BackendArg::External) => cfg.backend = Backend::External,
            None => {}
        }
        Ok(cfg)
    }

    fn pipeline(&self, seed: u64) -> Result<Pipeline> {
        let mut p = self.service_config()?.build_pipeline()?;
        p.seed = seed;
        Ok(p)
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Column mapping (TOML).
    #[arg(long)]
    pub ingest_config: Option<PathBuf>,
    /// JSON-lines output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    /// Text file, one essay or sentence per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Name pool (TOML table: category = [names]).
    #[arg(long)]
    pub pool: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-line noise report (JSON).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub src: PathBuf,
    #[arg(long)]
    pub tgt: PathBuf,
    /// Inputs are already tokenized; split on whitespace only.
    #[arg(long)]
    pub tokenized: bool,
    /// Word list used to recognize spelling edits.
    #[arg(long)]
    pub dictionary: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalGecArgs {
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    pub beta: f64,
    /// Machine-readable report (JSON).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrectArgs {
    /// Text file, one sentence per line.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub resources: ResourceArgs,
    /// Corrected sentences, tokenized; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Source sentences with the produced edits as M2.
    #[arg(long)]
    pub m2: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Where training or scoring examples come from.
#[derive(Debug, Args)]
pub struct ExampleArgs {
    /// Feature file written by `featurize`.
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    pub features: Option<PathBuf>,
    /// Essay TSV, featurized on the fly.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub ingest_config: Option<PathBuf>,
    /// Directory of `<essay_id>.trees` files, one bracketed tree per line.
    #[arg(long)]
    pub trees: Option<PathBuf>,
    #[command(flatten)]
    pub resources: ResourceArgs,
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub ingest_config: Option<PathBuf>,
    /// Directory of `<essay_id>.trees` files, one bracketed tree per line.
    #[arg(long)]
    pub trees: Option<PathBuf>,
    #[command(flatten)]
    pub resources: ResourceArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainLmArgs {
    /// Text file, one sentence per line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainAweArgs {
    #[command(flatten)]
    pub examples: ExampleArgs,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Native score ranges: `prompt<TAB>rubric<TAB>min<TAB>max`.
    #[arg(long)]
    pub ranges: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub examples: ExampleArgs,
    /// JSON-lines scores.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalQwkArgs {
    /// Integer ratings, one per line.
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long, requires = "max")]
    pub min: Option<i64>,
    #[arg(long, requires = "min")]
    pub max: Option<i64>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScaleArg {
    Native,
    Hundred,
}

#[derive(Debug, Args)]
pub struct CrossPromptArgs {
    #[command(flatten)]
    pub examples: ExampleArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.01, 0.1, 1.0, 10.0])]
    pub lambdas: Vec<f64>,
    #[arg(long, value_enum, default_value = "native")]
    pub scale: ScaleArg,
    #[arg(long, default_value = rubric::OVERALL)]
    pub rubric: String,
    #[arg(long)]
    pub ranges: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    #[arg(long)]
    pub review_mode: bool,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Denoise(a) => denoise(a, seed),
        Command::ExtractEdits(a) => extract_edits(a),
        Command::EvaluateGec(a) => evaluate_gec(a),
        Command::Correct(a) => correct(a, seed),
        Command::Featurize(a) => featurize(a, seed),
        Command::TrainLm(a) => train_lm(a),
        Command::TrainAwe(a) => train_awe(a, seed),
        Command::Score(a) => score(a, seed),
        Command::EvalQwk(a) => eval_qwk(a),
        Command::CrossPrompt(a) => cross_prompt(a, seed),
        Command::Serve(a) => serve(a),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_out(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_out(Some(path), &s)
}

fn jsonl<T: Serialize>(items: &[T]) -> Result<String> {
    let mut s = String::new();
    for it in items {
        s.push_str(&serde_json::to_string(it)?);
        s.push('\n');
    }
    Ok(s)
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = read(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| anyhow!("{}:{}: {e}", path.display(), i + 1)))
        .collect()
}

fn load_essays(path: &Path, config: Option<&Path>) -> Result<Vec<EssayRecord>> {
    let cfg: IngestConfig = match config {
        Some(p) => toml::from_str(&read(p)?).with_context(|| format!("{}: bad ingest config", p.display()))?,
        None => IngestConfig::default(),
    };
    let file = std::fs::File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    read_essays(file, &cfg).map_err(|e| match e.line() {
        Some(l) => anyhow!("{}:{l}: {e}", path.display()),
        None => anyhow!("{}: {e}", path.display()),
    })
}

fn load_ranges(path: Option<&Path>) -> Result<RangeTable> {
    match path {
        Some(p) => {
            let f = std::fs::File::open(p).with_context(|| format!("cannot read {}", p.display()))?;
            read_range_table(f).map_err(|e| anyhow!("{}: {e}", p.display()))
        }
        None => Ok(RangeTable::new()),
    }
}

fn load_trees(dir: Option<&Path>, essay_id: &str) -> Result<Vec<ParseTree>> {
    let Some(dir) = dir else { return Ok(Vec::new()) };
    let path = dir.join(format!("{essay_id}.trees"));
    if !path.exists() {
        return Ok(Vec::new());
    }
    read_tree_file(&read(&path)?).map_err(|(line, e)| anyhow!("{}:{line}: {e}", path.display()))
}

fn lines(path: &Path) -> Result<Vec<String>> {
    Ok(read(path)?.lines().map(str::to_string).collect())
}

fn featurize_records(records: &[EssayRecord], trees: Option<&Path>, resources: &ResourceArgs, seed: u64) -> Result<Vec<TrainingExample>> {
    let pipeline = resources.pipeline(seed)?;
    records
        .iter()
        .map(|r| {
            let trees = load_trees(trees, &r.essay_id)?;
            let a = pipeline.analyze(&r.text, &trees).with_context(|| format!("essay {}", r.essay_id))?;
            Ok(TrainingExample {
                essay_id: r.essay_id.clone(),
                prompt_id: r.prompt_id,
                features: a.features,
                gold: r.gold_scores.clone(),
            })
        })
        .collect()
}

fn load_examples(a: &ExampleArgs, seed: u64) -> Result<Vec<TrainingExample>> {
    match (&a.features, &a.data) {
        (Some(f), _) => read_jsonl(f),
        (None, Some(d)) => {
            let records = load_essays(d, a.ingest_config.as_deref())?;
            featurize_records(&records, a.trees.as_deref(), &a.resources, seed)
        }
        (None, None) => bail!("one of --features or --data is required"),
    }
}

fn ingest(a: IngestArgs) -> Result<()> {
    let records = load_essays(&a.data, a.ingest_config.as_deref())?;
    write_out(a.out.as_deref(), &jsonl(&records)?)?;
    let mut per_prompt: BTreeMap<u8, usize> = BTreeMap::new();
    for r in &records {
        *per_prompt.entry(r.prompt_id).or_default() += 1;
    }
    eprintln!("{} essays; per prompt: {per_prompt:?}", records.len());
    Ok(())
}

fn denoise(a: DenoiseArgs, seed: u64) -> Result<()> {
    let pool = match &a.pool {
        Some(p) => {
            let m: BTreeMap<String, Vec<String>> = toml::from_str(&read(p)?).with_context(|| format!("{}: bad name pool", p.display()))?;
            NamePool::new(m).map_err(|e| anyhow!("{}: {e}", p.display()))?
        }
        None => NamePool::default(),
    };
    let noise = NoiseConfig::default();
    let mut out = String::new();
    let mut reports = Vec::new();
    for line in lines(&a.input)? {
        let sent = tokenize(&line);
        reports.push(detect_noise(&sent, &noise));
        out.push_str(&EntitySubstituter::new(&pool, seed).substitute(&sent).text);
        out.push('\n');
    }
    write_out(a.out.as_deref(), &out)?;
    if let Some(r) = &a.report {
        write_json(r, &reports)?;
    }
    let noisy = reports.iter().filter(|r| r.is_noisy).count();
    eprintln!("{} lines, {noisy} with placeholders or encoding noise", reports.len());
    Ok(())
}

fn tokenize_with(line: &str, pretokenized: bool) -> TokenizedSentence {
    if pretokenized {
        TokenizedSentence::from_tokens(line.split_whitespace())
    } else {
        tokenize(line)
    }
}

fn extract_edits(a: ExtractArgs) -> Result<()> {
    let src = lines(&a.src)?;
    let tgt = lines(&a.tgt)?;
    if src.len() != tgt.len() {
        let (short, n) = if src.len() < tgt.len() { (&a.src, src.len()) } else { (&a.tgt, tgt.len()) };
        bail!("{}:{}: file ends here but the other file has more lines ({} vs {})", short.display(), n + 1, src.len(), tgt.len());
    }
    let dict = match &a.dictionary {
        Some(p) => Dictionary::load(p)?,
        None => Dictionary::english(),
    };
    let classifier = Classifier::new(&dict);
    let entries: Vec<AnnotatedSentence> = src
        .iter()
        .zip(&tgt)
        .map(|(s, t)| {
            let (s, t) = (tokenize_with(s, a.tokenized), tokenize_with(t, a.tokenized));
            let edits = diff(&s, &t, &classifier);
            AnnotatedSentence::new(s).with_annotator(0, edits)
        })
        .collect();
    write_out(a.out.as_deref(), &write_m2(&entries))?;
    let n: usize = entries.iter().map(|e| e.annotations[&0].len()).sum();
    eprintln!("{} sentences, {n} edits", entries.len());
    Ok(())
}

fn load_m2(path: &Path) -> Result<Vec<AnnotatedSentence>> {
    read_m2(&read(path)?).map_err(|e| anyhow!("{}:{}: {e}", path.display(), e.line()))
}

fn evaluate_gec(a: EvalGecArgs) -> Result<()> {
    let hyp = load_m2(&a.hyp)?;
    let gold = load_m2(&a.gold)?;
    let report = score_m2(&hyp, &gold, a.beta)?;
    write_out(None, &report.render_text())?;
    if let Some(r) = &a.report {
        write_json(r, &report)?;
    }
    Ok(())
}

fn correct(a: CorrectArgs, seed: u64) -> Result<()> {
    let pipeline = a.resources.pipeline(seed)?;
    let sents: Vec<TokenizedSentence> = lines(&a.input)?.iter().map(|l| tokenize(l)).collect();
    let results: Vec<CorrectionResult> = pipeline.corrector.correct_batch(&sents)?;
    let mut out = String::new();
    for r in &results {
        out.push_str(&r.corrected.joined());
        out.push('\n');
    }
    write_out(a.out.as_deref(), &out)?;
    if let Some(p) = &a.m2 {
        let entries: Vec<AnnotatedSentence> = results.iter().map(|r| AnnotatedSentence::new(r.source.clone()).with_annotator(0, r.edits.clone())).collect();
        write_out(Some(p), &write_m2(&entries))?;
    }
    if let Some(p) = &a.report {
        write_json(p, &results)?;
    }
    let edits: usize = results.iter().map(|r| r.edits.len()).sum();
    let backend = results.first().map(|r| r.backend.as_str()).unwrap_or("-");
    eprintln!("{} sentences, {edits} edits, backend {backend}", results.len());
    Ok(())
}

fn featurize(a: FeaturizeArgs, seed: u64) -> Result<()> {
    let records = load_essays(&a.data, a.ingest_config.as_deref())?;
    let examples = featurize_records(&records, a.trees.as_deref(), &a.resources, seed)?;
    write_out(a.out.as_deref(), &jsonl(&examples)?)?;
    eprintln!("{} essays featurized", examples.len());
    Ok(())
}

fn train_lm(a: TrainLmArgs) -> Result<()> {
    let sents: Vec<Vec<String>> = lines(&a.input)?.iter().map(|l| tokenize(l).tokens).filter(|t| !t.is_empty()).collect();
    let model = NgramModel::train(sents.iter().map(Vec::as_slice), a.order, a.k)?;
    model.save(&a.out).with_context(|| format!("cannot write {}", a.out.display()))?;
    eprintln!("{} sentences, vocabulary {}", sents.len(), model.vocabulary().count());
    Ok(())
}

fn train_awe(a: TrainAweArgs, seed: u64) -> Result<()> {
    let examples = load_examples(&a.examples, seed)?;
    let config = TrainConfig {
        lambda: a.lambda,
        ranges: load_ranges(a.ranges.as_deref())?,
        ..Default::default()
    };
    let model = ScoreModel::train(&examples, &config)?;
    model.save(&a.out).with_context(|| format!("cannot write {}", a.out.display()))?;
    let fitted: Vec<&str> = model.rubrics.keys().map(String::as_str).collect();
    eprintln!("trained on {} essays; fitted: {}", examples.len(), fitted.join(", "));
    Ok(())
}

#[derive(Serialize)]
struct ScoreLine<'a> {
    essay_id: &'a str,
    prompt_id: u8,
    scores: crate::scorer::RubricScoreSet,
}

fn score(a: ScoreArgs, seed: u64) -> Result<()> {
    let model = ScoreModel::load(&a.model).with_context(|| format!("cannot load {}", a.model.display()))?;
    let examples = load_examples(&a.examples, seed)?;
    let mut lines_out = Vec::new();
    let mut table = String::new();
    let _ = write!(table, "{:<12}", "essay");
    for n in rubric::all_score_names() {
        let _ = write!(table, " {:>8.8}", n);
    }
    table.push('\n');
    for e in &examples {
        let scores = model.predict(&e.features, e.prompt_id).with_context(|| format!("essay {}", e.essay_id))?;
        let _ = write!(table, "{:<12}", e.essay_id);
        for (_, v) in scores.iter() {
            let _ = write!(table, " {v:>8.1}");
        }
        table.push('\n');
        lines_out.push(ScoreLine {
            essay_id: &e.essay_id,
            prompt_id: e.prompt_id,
            scores,
        });
    }
    match &a.out {
        Some(p) => {
            write_out(Some(p), &jsonl(&lines_out)?)?;
            write_out(None, &table)
        }
        None => write_out(None, &table),
    }
}

fn read_ratings(path: &Path) -> Result<Vec<i64>> {
    read(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| l.trim().parse::<i64>().map_err(|_| anyhow!("{}:{}: not an integer rating: {l:?}", path.display(), i + 1)))
        .collect()
}

fn eval_qwk(a: EvalQwkArgs) -> Result<()> {
    let gold = read_ratings(&a.gold)?;
    let pred = read_ratings(&a.pred)?;
    let k = match (a.min, a.max) {
        (Some(lo), Some(hi)) => qwk_with_range(&gold, &pred, lo, hi)?,
        _ => qwk(&gold, &pred)?,
    };
    write_out(None, &format!("QWK: {k:.4}\n"))?;
    if let Some(p) = &a.report {
        write_json(p, &serde_json::json!({ "qwk": k, "n": gold.len() }))?;
    }
    Ok(())
}

fn cross_prompt(a: CrossPromptArgs, seed: u64) -> Result<()> {
    let rubric = rubric::canonical(&a.rubric).ok_or_else(|| anyhow!("unknown rubric {:?}", a.rubric))?;
    let examples = load_examples(&a.examples, seed)?;
    let config = CrossPromptConfig {
        lambdas: a.lambdas.clone(),
        scale: match a.scale {
            ScaleArg::Native => QwkScale::Native,
            ScaleArg::Hundred => QwkScale::Hundred,
        },
        rubric: rubric.to_string(),
        ranges: load_ranges(a.ranges.as_deref())?,
    };
    let report = cross_prompt_eval(&examples, &config)?;
    write_out(None, &report.render_table())?;
    if let Some(p) = &a.report {
        write_json(p, &report)?;
    }
    Ok(())
}

fn serve(a: ServeArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => ServiceConfig::load(p)?,
        None => ServiceConfig::default(),
    };
    if let Some(port) = a.port {
        cfg.port = port;
    }
    if let Some(d) = &a.data_dir {
        cfg.data_dir.clone_from(d);
    }
    cfg.review_mode |= a.review_mode;
    let addr: std::net::SocketAddr = format!("{}:{}", cfg.bind, cfg.port).parse().with_context(|| format!("bad bind address {}:{}", cfg.bind, cfg.port))?;
    let service = Service::start(&cfg, cfg.build_pipeline()?)?;
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    let svc = service.clone();
    rt.block_on(crate::service::http::serve(svc, addr, async {
        let _ = tokio::signal::ctrl_c().await;
    }))?;
    service.shutdown();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["writeright", "no-such-command"]), 2);
        assert_eq!(run(["writeright", "evaluate-gec", "--hyp", "x"]), 2);
        assert_eq!(run(["writeright", "train-awe", "--out", "m.json"]), 2);
    }

    #[test]
    fn data_errors_exit_1() {
        assert_eq!(run(["writeright", "evaluate-gec", "--hyp", "/nonexistent.m2", "--gold", "/nonexistent.m2"]), 1);
    }
}
